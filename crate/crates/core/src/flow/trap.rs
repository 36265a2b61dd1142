//! The dyadic trap model: `g_+ = f_{1,0,1}` and `g_− = f_{−1,m,0}` with
//! probability one half each.

use rand::Rng;

use super::{flow_law_with, standard_generators, FlowLaw, Model, G3};
use crate::error::Result;
use crate::limits::Limits;
use crate::scalar::Rational;
use crate::semigroup::Semigroup;

/// Path-wise bound asserted for `|b(0,k) + min_{s≤k} a(0,s)|`.
pub fn trap_deviation_bound(m: i64) -> i64 {
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrapDiagnostics {
    pub t: usize,
    pub m: i64,
    pub bound: i64,
    pub paths: u64,
    /// Largest `|b(0,k) + min_{s≤k} a(0,s)|` over all paths and prefixes.
    pub max_deviation: i64,
}

impl TrapDiagnostics {
    pub fn holds(&self) -> bool {
        self.max_deviation <= self.bound
    }
}

/// Exhaustive over the `2^t` generator sequences.
pub fn trap_path_diagnostics(t: usize, m: i64, limits: &Limits) -> Result<TrapDiagnostics> {
    limits.check_exhaustive("trap path horizon", t)?;
    let gens = standard_generators(Model::Trap, &Rational::default(), m)?;
    let (down, up) = (gens.entries()[0].0.clone(), gens.entries()[1].0.clone());
    let mut max_deviation = 0;
    for bits in 0u64..1 << t {
        let mut xi = G3::unit();
        let mut min_a = 0;
        for k in 0..t {
            xi = xi.compose(if bits >> k & 1 == 1 { &up } else { &down });
            min_a = min_a.min(*xi.a());
            max_deviation = max_deviation.max((xi.b() + min_a).abs());
        }
    }
    Ok(TrapDiagnostics {
        t,
        m,
        bound: trap_deviation_bound(m),
        paths: 1 << t,
        max_deviation,
    })
}

/// Exact law at time `t`, with path diagnostics when `t` is within the
/// exhaustive horizon.
pub fn trap_model_law(
    t: usize,
    m: i64,
    limits: &Limits,
) -> Result<(FlowLaw<G3>, Option<TrapDiagnostics>)> {
    let gens = standard_generators(Model::Trap, &Rational::default(), m)?;
    let law = flow_law_with(&gens, t, limits)?;
    let diag = if t <= limits.exhaustive_t {
        Some(trap_path_diagnostics(t, m, limits)?)
    } else {
        None
    };
    Ok((law, diag))
}

/// One run of `t` trap steps: returns `2^{−m}(a − c − min a)` and its
/// truncation level `2^{−m}(a − min a)`.
pub fn trap_waiting_sample<R: Rng + ?Sized>(m: i64, t: usize, rng: &mut R) -> (f64, f64) {
    let down = G3::new(-1, m, 0).expect("m ≥ 1");
    let up = G3::f_star();
    let mut xi = G3::unit();
    let mut min_a = 0;
    for _ in 0..t {
        xi = xi.compose(if rng.random::<bool>() { &up } else { &down });
        min_a = min_a.min(*xi.a());
    }
    let scale = (-(m as f64)).exp2();
    let span = (xi.a() - min_a) as f64;
    (scale * (span - *xi.c() as f64), scale * span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_law;
    use crate::scalar::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depth_one_is_fully_sticky() {
        let (law, diag) = trap_model_law(1, 1, &Limits::default()).unwrap();
        let g3 = flow_law(&standard_generators(Model::G3, &rat(1, 1), 1).unwrap(), 1).unwrap();
        assert_eq!(law, g3);
        assert!(diag.unwrap().holds());
        for t in 0..6 {
            let (law, _) = trap_model_law(t, 1, &Limits::default()).unwrap();
            assert_eq!(
                law,
                flow_law(&standard_generators(Model::G3, &rat(1, 1), 1).unwrap(), t).unwrap()
            );
        }
    }

    #[test]
    fn deviation_bound_small() {
        for m in [2, 3, 4] {
            let d = trap_path_diagnostics(9, m, &Limits::default()).unwrap();
            assert!(d.holds(), "{d:?}");
            assert_eq!(d.paths, 512);
        }
    }

    #[test]
    fn waiting_statistic_is_within_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (w, cap) = trap_waiting_sample(3, 200, &mut rng);
            assert!(w >= -0.5 && w <= cap + 1e-12, "{w} {cap}");
        }
    }

    #[test]
    fn long_horizons_skip_diagnostics() {
        let (law, diag) = trap_model_law(14, 2, &Limits::default()).unwrap();
        assert!(diag.is_none());
        assert_eq!(law.total(), rat(1, 1));
    }
}
