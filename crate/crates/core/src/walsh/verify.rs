//! Exact checks of the Walsh layer on random rational observables.
//!
//! Every right-hand side is computed in physical space, without the
//! transform: conditional expectations by averaging out coordinates, noisy
//! correlations by applying the two-point transition kernel coordinatewise.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    bks_statistic, conditional_expectation, noisy_correlation, spectral_measure,
    walsh_transform_with, Observable,
};
use crate::error::Result;
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::scalar::{rat, Rational};

/// Applies a `2 × 2` kernel `[[stay, move], [move, stay]]` to every coordinate:
/// `(Kg)(ω) = Σ_{ω'} Π_m K(ω_m, ω'_m) g(ω')`.
fn apply_kernel(g: &[Rational], n: usize, stay: &Rational, flip: &Rational) -> Vec<Rational> {
    let mut out = g.to_vec();
    for m in 0..n {
        let bit = 1 << m;
        for w in (0..out.len()).filter(|w| w & bit == 0) {
            let (lo, hi) = (out[w].clone(), out[w | bit].clone());
            out[w] = stay * &lo + flip * &hi;
            out[w | bit] = stay * &hi + flip * &lo;
        }
    }
    out
}

/// `E[f | F_e]` by averaging over the coordinates outside `e`.
fn average_out(f: &[Rational], n: usize, e: usize) -> Vec<Rational> {
    let half = rat(1, 2);
    let mut out = f.to_vec();
    for m in (0..n).filter(|m| e >> m & 1 == 0) {
        let bit = 1 << m;
        for w in (0..out.len()).filter(|w| w & bit == 0) {
            let avg = (&out[w] + &out[w | bit]) * &half;
            out[w] = avg.clone();
            out[w | bit] = avg;
        }
    }
    out
}

fn mean_sq(v: &[Rational]) -> Rational {
    v.iter().map(|x| x * x).sum::<Rational>() / Rational::from_integer((v.len() as i64).into())
}

/// `trials` random observables on `n` coordinates with values in
/// `{−1, −15/16, …, 1}`; a random dyadic `ρ` and a random subset per trial.
pub fn verify_walsh_layer(n: usize, trials: usize, seed: u64, limits: &Limits) -> Result<Report> {
    limits.check_dense(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("walsh")
        .param("n", n)
        .param("trials", trials)
        .with_seed(seed);
    let size = 1usize << n;
    for j in 0..trials {
        let draw = |rng: &mut ChaCha8Rng| {
            Observable::new(
                n,
                (0..size)
                    .map(|_| rat(rng.random_range(-16..=16), 16))
                    .collect(),
            )
        };
        let f = draw(&mut rng)?;
        let g = draw(&mut rng)?;
        let e = rng.random_range(0..size);
        let rho = rat(rng.random_range(-64..=64), 64);
        let measure = spectral_measure(&walsh_transform_with(&f, limits)?);

        let id = format!("n{n}.trial{j}");
        report.push(Check::exact(
            format!("{id}.parseval"),
            measure.total(),
            f.norm_sq(),
        ));

        let averaged = average_out(f.values(), n, e);
        report.push(Check::exact(
            format!("{id}.projection_norm"),
            mean_sq(&averaged),
            measure.mass_within(e),
        ));
        let projected = conditional_expectation(&f, e)?;
        let mismatched = projected
            .values()
            .iter()
            .zip(&averaged)
            .filter(|(a, b)| a != b)
            .count();
        report.push(Check::equal_counts(
            format!("{id}.projection_pointwise"),
            mismatched as i64,
            0,
        ));

        let half = rat(1, 2);
        let stay = (Rational::one() + &rho) * &half;
        let flip = (Rational::one() - &rho) * &half;
        let smoothed = apply_kernel(g.values(), n, &stay, &flip);
        let coupled = f
            .values()
            .iter()
            .zip(&smoothed)
            .map(|(a, b)| a * b)
            .sum::<Rational>()
            / Rational::from_integer((size as i64).into());
        report.push(Check::exact(
            format!("{id}.coupling"),
            noisy_correlation(&f, &g, rho.clone())?,
            coupled,
        ));
    }
    let coeffs: Vec<Rational> = (0..n).map(|_| rat(rng.random_range(-8..=8), 8)).collect();
    let linear = Observable::from_fn(n, |w| {
        coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (m, c)| {
                acc + c * rat(w.get(m).into(), 1)
            })
    })?;
    let squares = coeffs.iter().map(|c| c * c).sum::<Rational>();
    report.push(Check::exact(
        format!("n{n}.linear_bks"),
        bks_statistic(&linear),
        squares,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_layer_is_exact() {
        for n in [0, 1, 3, 6] {
            let r = verify_walsh_layer(n, 3, 11, &Limits::default()).unwrap();
            assert!(r.passed(), "{}", r.summary());
        }
    }

    #[test]
    fn kernel_endpoints() {
        let g: Vec<Rational> = (0..8).map(|k| rat(k, 3)).collect();
        assert_eq!(apply_kernel(&g, 3, &rat(1, 1), &rat(0, 1)), g);
        let flat = apply_kernel(&g, 3, &rat(1, 2), &rat(1, 2));
        assert!(flat.iter().all(|x| *x == rat(7, 6)));
    }
}
