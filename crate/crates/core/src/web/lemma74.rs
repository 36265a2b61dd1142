//! Correlation bound for blocked cells: for `(X_0, …, X_n)` independent of
//! independent `(Y_1, …, Y_n)`, with `X_k ∈ {0,1}` for `k ≥ 1`,
//! `Corr(φ(X_0, X_1Y_1, …, X_nY_n), ψ(Y)) ≤ √(max_k P(X_k = 1))`.
//!
//! The supremum over `φ, ψ` is the operator norm of the conditional
//! expectation `ψ(Y) ↦ E[ψ(Y) | Z]`, `Z = (X_0, X_1Y_1, …)`, on zero-mean
//! `ψ`. Its square is the second eigenvalue of
//! `B^{−1/2} A B^{−1/2}`, where `B = diag P(y)` and
//! `A_{y,y'} = Σ_z P(y,z) P(y',z) / P(z)` is computed exactly.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::scalar::{rational_to_f64, Rational};

/// Slack allowed for floating error in the eigenvalue.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A finite instance of the blocked-cell setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CellInstance {
    /// Atoms of `(X_0, X_1, …, X_n)`: label of `X_0`, flags `X_1..X_n`,
    /// probability.
    pub x_atoms: Vec<(i64, Vec<bool>, Rational)>,
    /// Law of each `Y_k` as `(value, probability)` pairs.
    pub y_laws: Vec<Vec<(i64, Rational)>>,
}

fn check_law<'a>(what: &str, probs: impl Iterator<Item = &'a Rational>) -> Result<()> {
    let mut total = Rational::zero();
    for p in probs {
        if *p <= Rational::zero() {
            return Err(invalid(format!("{what}: probabilities must be positive")));
        }
        total += p;
    }
    if !total.is_one() {
        return Err(invalid(format!("{what}: probabilities sum to {total}")));
    }
    Ok(())
}

impl CellInstance {
    pub fn new(
        x_atoms: Vec<(i64, Vec<bool>, Rational)>,
        y_laws: Vec<Vec<(i64, Rational)>>,
    ) -> Result<Self> {
        let n = y_laws.len();
        if n == 0 {
            return Err(invalid("need at least one cell"));
        }
        if x_atoms.iter().any(|(_, flags, _)| flags.len() != n) {
            return Err(invalid(format!("every X atom needs {n} flags")));
        }
        check_law("X law", x_atoms.iter().map(|(_, _, p)| p))?;
        for (k, law) in y_laws.iter().enumerate() {
            check_law(&format!("Y_{}", k + 1), law.iter().map(|(_, p)| p))?;
            let mut values: Vec<i64> = law.iter().map(|(v, _)| *v).collect();
            values.sort_unstable();
            values.dedup();
            if values.len() != law.len() {
                return Err(invalid(format!("Y_{} has repeated values", k + 1)));
            }
        }
        Ok(CellInstance { x_atoms, y_laws })
    }

    pub fn n(&self) -> usize {
        self.y_laws.len()
    }

    /// `max_k P(X_k = 1)`.
    pub fn max_open_prob(&self) -> Rational {
        (0..self.n())
            .map(|k| {
                self.x_atoms
                    .iter()
                    .filter(|(_, f, _)| f[k])
                    .map(|(_, _, p)| p.clone())
                    .sum::<Rational>()
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// All joint values of `Y` with their probabilities, as index tuples.
    fn y_space(&self) -> Vec<(Vec<usize>, Rational)> {
        let mut out = vec![(Vec::new(), Rational::one())];
        for law in &self.y_laws {
            out = out
                .into_iter()
                .flat_map(|(idx, p)| {
                    law.iter().enumerate().map(move |(j, (_, q))| {
                        let mut idx = idx.clone();
                        idx.push(j);
                        (idx, &p * q)
                    })
                })
                .collect();
        }
        out
    }
}

/// `sup ‖E[ψ(Y) | Z]‖² / ‖ψ(Y)‖²` over zero-mean `ψ`.
pub fn projection_norm_sq(inst: &CellInstance, limits: &Limits) -> Result<f64> {
    let ys = inst.y_space();
    let joint = ys.len().saturating_mul(inst.x_atoms.len());
    if joint > limits.joint_support {
        return Err(crate::error::Error::BudgetExceeded {
            what: "joint support of (X, Y)".into(),
            size: joint as u128,
            cap: limits.joint_support as u128,
        });
    }
    let dim = ys.len();
    // P(y, z) for each observed z = (X_0, X_1 Y_1, …, X_n Y_n).
    let mut by_z: BTreeMap<(i64, Vec<i64>), Vec<Rational>> = BTreeMap::new();
    for (label, flags, px) in &inst.x_atoms {
        for (j, (idx, py)) in ys.iter().enumerate() {
            // A closed cell reads as X_k Y_k = 0.
            let z: Vec<i64> = flags
                .iter()
                .zip(idx)
                .zip(&inst.y_laws)
                .map(|((open, &i), law)| if *open { law[i].0 } else { 0 })
                .collect();
            by_z.entry((*label, z))
                .or_insert_with(|| vec![Rational::zero(); dim])[j] += px * py;
        }
    }
    let mut gram = vec![vec![Rational::zero(); dim]; dim];
    for col in by_z.values() {
        let pz: Rational = col.iter().cloned().sum();
        for (a, pa) in col.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            for (b, pb) in col.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                gram[a][b] += pa * pb / &pz;
            }
        }
    }
    let root: Vec<f64> = ys.iter().map(|(_, p)| rational_to_f64(p).sqrt()).collect();
    let c = DMatrix::from_fn(dim, dim, |a, b| {
        rational_to_f64(&gram[a][b]) / (root[a] * root[b])
    });
    let u = DVector::from_vec(root);
    let proj = DMatrix::identity(dim, dim) - &u * u.transpose();
    let restricted = &proj * c * &proj;
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let top = SymmetricEigen::new(restricted)
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    Ok(top)
}

pub fn lemma74_bound_check(inst: &CellInstance, id: &str, limits: &Limits) -> Result<Check> {
    let lhs = projection_norm_sq(inst, limits)?;
    let rhs = rational_to_f64(&inst.max_open_prob());
    Ok(Check::new(id, lhs, rhs, lhs <= rhs + NORM_TOLERANCE))
}

/// `X_0 = X_1 ~ Bernoulli(q)`, `Y_1 = ±1` uniform; the squared norm is `q`.
pub fn tightness_instance(q: &Rational) -> Result<CellInstance> {
    let half = Rational::new(1.into(), 2.into());
    let mut atoms = Vec::new();
    if !q.is_zero() {
        atoms.push((1, vec![true], q.clone()));
    }
    if !q.is_one() {
        atoms.push((0, vec![false], Rational::one() - q));
    }
    CellInstance::new(atoms, vec![vec![(-1, half.clone()), (1, half)]])
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..k).map(|_| rng.random_range(1..=6)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter()
        .map(|x| Rational::new(x.into(), total.into()))
        .collect()
}

/// `n ≤ max_n` cells; every law has at most `max_support` atoms.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    max_n: usize,
    max_support: usize,
) -> CellInstance {
    let n = rng.random_range(1..=max_n.max(1));
    let atoms = rng.random_range(1..=max_support.max(1));
    let x_atoms = random_weights(rng, atoms)
        .into_iter()
        .map(|p| {
            let label = rng.random_range(0..3);
            let flags = (0..n).map(|_| rng.random::<bool>()).collect();
            (label, flags, p)
        })
        .collect();
    let y_laws = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=max_support.max(1));
            let mut values: Vec<i64> = (-2..=2).collect();
            for i in 0..k {
                let j = rng.random_range(i..values.len());
                values.swap(i, j);
            }
            values.into_iter().zip(random_weights(rng, k)).collect()
        })
        .collect();
    CellInstance::new(x_atoms, y_laws).expect("generated laws are valid")
}

/// `count` random instances plus the tightness instance at `q = 1/3`.
pub fn lemma74_random_suite(count: usize, seed: u64, limits: &Limits) -> Result<Report> {
    let mut report = Report::new("lemma74")
        .param("instances", count)
        .with_seed(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..count {
        let inst = random_instance(&mut rng, 3, 3);
        let check = lemma74_bound_check(&inst, &format!("random.{i}"), limits)?;
        worst_gap = worst_gap.max(check.lhs.as_f64() - check.rhs.as_f64());
        report.push(check);
    }
    let q = Rational::new(1.into(), 3.into());
    let tight = projection_norm_sq(&tightness_instance(&q)?, limits)?;
    report.push(Check::close(
        "tightness.q=1/3",
        tight,
        rational_to_f64(&q),
        NORM_TOLERANCE,
    ));
    report.stat("worst_gap", worst_gap);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn closed_cells_see_nothing() {
        let inst = CellInstance::new(
            vec![(0, vec![false, false], rat(1, 1))],
            vec![
                vec![(-1, rat(1, 2)), (1, rat(1, 2))],
                vec![(0, rat(1, 3)), (2, rat(2, 3))],
            ],
        )
        .unwrap();
        assert!(projection_norm_sq(&inst, &Limits::default()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn tightness_attains_the_bound() {
        for q in [rat(1, 3), rat(1, 2), rat(5, 7), rat(1, 1)] {
            let norm =
                projection_norm_sq(&tightness_instance(&q).unwrap(), &Limits::default()).unwrap();
            assert!((norm - rational_to_f64(&q)).abs() < 1e-12, "q={q}: {norm}");
        }
    }

    #[test]
    fn open_cells_see_everything() {
        let inst = CellInstance::new(
            vec![(0, vec![true, true], rat(1, 1))],
            vec![
                vec![(1, rat(1, 4)), (2, rat(3, 4))],
                vec![(-1, rat(1, 2)), (1, rat(1, 2))],
            ],
        )
        .unwrap();
        assert!((projection_norm_sq(&inst, &Limits::default()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_suite_small() {
        let r = lemma74_random_suite(40, 3, &Limits::default()).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn validation_and_budget() {
        assert!(
            CellInstance::new(vec![(0, vec![true], rat(1, 2))], vec![vec![(1, rat(1, 1))]])
                .is_err()
        );
        assert!(
            CellInstance::new(vec![(0, vec![], rat(1, 1))], vec![vec![(1, rat(1, 1))]]).is_err()
        );
        assert!(CellInstance::new(
            vec![(0, vec![true], rat(1, 1))],
            vec![vec![(1, rat(1, 2)), (1, rat(1, 2))]]
        )
        .is_err());
        let caps = Limits {
            joint_support: 1,
            ..Limits::default()
        };
        assert!(projection_norm_sq(&tightness_instance(&rat(1, 2)).unwrap(), &caps).is_err());
    }
}
