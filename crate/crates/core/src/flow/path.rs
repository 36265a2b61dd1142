use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GeneratorSet, G3};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::semigroup::Semigroup;

/// A realization of `t` steps together with the running walk `a(0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    steps: Vec<G3>,
    a_values: Vec<i64>,
}

impl LatticePath {
    /// Every step must move `a` by exactly one.
    pub fn from_steps(steps: Vec<G3>) -> Result<Self> {
        let mut a_values = Vec::with_capacity(steps.len() + 1);
        a_values.push(0);
        for (k, s) in steps.iter().enumerate() {
            if s.a().abs() != 1 {
                return Err(Error::InvariantViolation(format!(
                    "step {k} moves a by {}",
                    s.a()
                )));
            }
            a_values.push(a_values[k] + s.a());
        }
        Ok(LatticePath { steps, a_values })
    }

    /// `+1 ↦ f_+`, `−1 ↦ f_−`.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let steps = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(G3::f_plus()),
                -1 => Ok(G3::f_minus()),
                other => Err(Error::InvalidParameter(format!(
                    "sign must be ±1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        LatticePath::from_steps(steps)
    }

    pub fn t(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[G3] {
        &self.steps
    }

    /// `a(0, k)` for `k = 0..=t`.
    pub fn a_values(&self) -> &[i64] {
        &self.a_values
    }

    /// `a(s, u) = a(0, u) − a(0, s)`.
    pub fn increment(&self, s: usize, u: usize) -> i64 {
        self.a_values[u] - self.a_values[s]
    }

    pub fn is_up(&self, s: usize) -> bool {
        self.a_values[s + 1] > self.a_values[s]
    }

    pub fn min_a(&self) -> i64 {
        *self.a_values.iter().min().expect("a(0,0) is present")
    }

    /// `ξ_{0,t}`, the product of all steps.
    pub fn element(&self) -> G3 {
        self.steps.iter().fold(G3::unit(), |acc, s| acc.compose(s))
    }

    /// `ξ_{0,k}` for `k = 0..=t`.
    pub fn prefix_elements(&self) -> Vec<G3> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(G3::unit());
        for s in &self.steps {
            let next = out.last().expect("non-empty").compose(s);
            out.push(next);
        }
        out
    }
}

/// All `2^t` paths of `±1` steps; bit `k` of the index set means step `k`
/// goes up.
pub fn all_sign_paths(t: usize) -> impl Iterator<Item = LatticePath> {
    (0u64..1 << t).map(move |bits| {
        let signs: Vec<i8> = (0..t)
            .map(|k| if bits >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        LatticePath::from_signs(&signs).expect("signs are ±1")
    })
}

/// `t` independent steps from `gens`; deterministic in `seed`.
pub fn sample_path(gens: &GeneratorSet, t: usize, seed: u64) -> LatticePath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (0..t).map(|_| gens.draw(&mut rng).clone()).collect();
    LatticePath::from_steps(steps).expect("standard generators move a by one")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathViolation {
    pub k: usize,
    pub identity: &'static str,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathIdentityReport {
    pub prefixes: usize,
    pub violations: Vec<PathViolation>,
}

impl PathIdentityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, for every prefix `k`, that `b(0,k) = −min_{s≤k} a(0,s)` and
/// `a(0,k) + b(0,k) = max_{s≤k} a(s,k)`, with `b` taken from the composed
/// semigroup element.
pub fn check_path_identities(path: &LatticePath) -> PathIdentityReport {
    let mut report = PathIdentityReport::default();
    let mut running_min = 0i64;
    for (k, xi) in path.prefix_elements().into_iter().enumerate() {
        let a = path.a_values[k];
        running_min = running_min.min(a);
        if *xi.a() != a {
            report.violations.push(PathViolation {
                k,
                identity: "a matches walk",
                lhs: *xi.a(),
                rhs: a,
            });
        }
        if *xi.b() != -running_min {
            report.violations.push(PathViolation {
                k,
                identity: "b = -min a",
                lhs: *xi.b(),
                rhs: -running_min,
            });
        }
        let max_increment = (0..=k)
            .map(|s| path.increment(s, k))
            .max()
            .expect("s = k is in range");
        if xi.a() + xi.b() != max_increment {
            report.violations.push(PathViolation {
                k,
                identity: "a + b = max a(s,k)",
                lhs: xi.a() + xi.b(),
                rhs: max_increment,
            });
        }
        report.prefixes += 1;
    }
    report
}

/// Exhaustive [`check_path_identities`] over every path of every length up
/// to `t_max`.
pub fn path_identity_report(t_max: usize, limits: &Limits) -> Result<Report> {
    limits.check_dense(t_max)?;
    let (mut paths, mut prefixes, mut violations) = (0i64, 0i64, 0i64);
    let mut first = None;
    for t in 0..=t_max {
        for path in all_sign_paths(t) {
            let r = check_path_identities(&path);
            if first.is_none() {
                first = r
                    .violations
                    .first()
                    .map(|v| format!("{} at k={}: {} vs {}", v.identity, v.k, v.lhs, v.rhs));
            }
            paths += 1;
            prefixes += r.prefixes as i64;
            violations += r.violations.len() as i64;
        }
    }
    let mut report = Report::new("paths").param("t_max", t_max);
    report.push(Check::equal_counts(
        format!("t{t_max}.violations"),
        violations,
        0,
    ));
    report.stat("paths", paths);
    report.stat("prefixes", prefixes);
    if let Some(v) = first {
        report = report.param("first_violation", v);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::{standard_generators, Model};
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn up_then_down() {
        let p = LatticePath::from_signs(&[1, -1]).unwrap();
        assert_eq!(p.a_values(), &[0, 1, 0]);
        assert_eq!(p.element(), G3::new(0, 0, 0).unwrap());
        let r = check_path_identities(&p);
        assert!(r.is_clean());
        assert_eq!(r.prefixes, 3);
        assert!(LatticePath::from_signs(&[2]).is_err());
    }

    #[test]
    fn empty_path() {
        let g = standard_generators(Model::G2, &rat(0, 1), 1).unwrap();
        let p = sample_path(&g, 0, 5);
        assert_eq!(p.t(), 0);
        assert_eq!(p.element(), G3::unit());
        assert!(check_path_identities(&p).is_clean());
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = standard_generators(Model::G3, &rat(1, 3), 1).unwrap();
        assert_eq!(sample_path(&g, 40, 9), sample_path(&g, 40, 9));
        assert_ne!(sample_path(&g, 40, 9), sample_path(&g, 40, 10));
    }

    #[test]
    fn generator_frequencies_within_four_sigma() {
        let g = standard_generators(Model::G3, &rat(1, 3), 1).unwrap();
        let n = 100_000usize;
        let path = sample_path(&g, n, 2024);
        for (gen, p) in g.entries() {
            let p = crate::scalar::rational_to_f64(p);
            let hits = path.steps().iter().filter(|s| *s == gen).count() as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (hits - n as f64 * p).abs() <= 4.0 * sigma,
                "{gen:?}: {hits}"
            );
        }
    }

    #[test]
    fn random_paths_satisfy_identities() {
        let g = standard_generators(Model::G3, &rat(1, 2), 1).unwrap();
        for seed in 0..1000 {
            assert!(check_path_identities(&sample_path(&g, 50, seed)).is_clean());
        }
    }

    #[test]
    fn trap_paths_break_the_b_identity() {
        let g = standard_generators(Model::Trap, &rat(0, 1), 3).unwrap();
        let p = LatticePath::from_steps(vec![g.entries()[0].0.clone()]).unwrap();
        let r = check_path_identities(&p);
        assert!(r.violations.iter().any(|v| v.identity == "b = -min a"));
    }
}
