//! Distances between distributions used by the experiments.

use statrs::distribution::{ContinuousCDF, Discrete, Normal, Poisson};
use statrs::function::erf::erf;

use crate::error::{invalid, Result};

pub fn standard_normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// CDF of the chi distribution with three degrees of freedom.
pub fn maxwell_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    erf(u / std::f64::consts::SQRT_2)
        - (2.0 / std::f64::consts::PI).sqrt() * u * (-u * u / 2.0).exp()
}

pub fn maxwell_density(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    (2.0 / std::f64::consts::PI).sqrt() * u * u * (-u * u / 2.0).exp()
}

/// `sup_x |F(x) − G(x)|` for a discrete law `F` against a continuous CDF `G`.
///
/// `atoms` are `(point, probability)` pairs in any order; the sup is attained
/// at an atom, on one side of its jump.
pub fn ks_discrete_vs_cdf(atoms: &[(f64, f64)], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = atoms.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    let mut k = 0;
    while k < sorted.len() {
        let x = sorted[k].0;
        let mut mass = 0.0;
        while k < sorted.len() && sorted[k].0 == x {
            mass += sorted[k].1;
            k += 1;
        }
        let g = cdf(x);
        sup = sup.max((below - g).abs()).max((below + mass - g).abs());
        below += mass;
    }
    sup
}

/// Two-sample Kolmogorov–Smirnov statistic; ties are stepped over together.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(invalid("two-sample KS needs non-empty samples"));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(invalid("two-sample KS got NaN"));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

/// KS distance from the sample `xs` to the law of `min(η, cap)` with
/// `η ~ Exp(1)` and `cap` drawn uniformly from `caps`.
///
/// The target is continuous between caps and jumps at each cap, so the sup
/// is attained at a sample point or a cap, on one side of it.
pub fn ks_vs_truncated_exp(xs: &[f64], caps: &[f64]) -> Result<f64> {
    if xs.is_empty() || caps.is_empty() {
        return Err(invalid(
            "truncated exponential KS needs non-empty samples and caps",
        ));
    }
    if xs.iter().chain(caps).any(|v| v.is_nan()) {
        return Err(invalid("truncated exponential KS got NaN"));
    }
    let mut xs = xs.to_vec();
    let mut caps = caps.to_vec();
    xs.sort_by(f64::total_cmp);
    caps.sort_by(f64::total_cmp);
    let (nx, nc) = (xs.len() as f64, caps.len() as f64);
    let exp_cdf = |z: f64| -(-z.max(0.0)).exp_m1();
    let mut sup: f64 = 0.0;
    for &z in xs.iter().chain(&caps) {
        let below_x = xs.partition_point(|&v| v < z) as f64 / nx;
        let upto_x = xs.partition_point(|&v| v <= z) as f64 / nx;
        let below_c = caps.partition_point(|&v| v < z) as f64 / nc;
        let upto_c = caps.partition_point(|&v| v <= z) as f64 / nc;
        let right = upto_c + exp_cdf(z) * (1.0 - upto_c);
        let left = below_c + exp_cdf(z) * (1.0 - below_c);
        sup = sup.max((upto_x - right).abs()).max((below_x - left).abs());
    }
    Ok(sup)
}

/// Total variation `½ Σ_k |p_k − q_k|` over a common finite index range.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n)
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// `P(N = k)` for `k = 0..=kmax`, `N ~ Poisson(mean)`.
pub fn poisson_pmf(mean: f64, kmax: u64) -> Result<Vec<f64>> {
    let d = Poisson::new(mean).map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?;
    Ok((0..=kmax).map(|k| d.pmf(k)).collect())
}

/// `Exp(1)` by inversion of a uniform on `[0, 1)`.
pub fn exp1_from_uniform(u: f64) -> f64 {
    -(-u).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_against_normal() {
        let ks = ks_discrete_vs_cdf(&[(-1.0, 0.5), (1.0, 0.5)], standard_normal_cdf);
        assert!((ks - (standard_normal_cdf(1.0) - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn maxwell_cdf_matches_integrated_density() {
        let h = 1e-3;
        let mut acc = 0.0;
        let mut u = 0.0;
        while u < 8.0 {
            acc += h
                * (maxwell_density(u)
                    + 4.0 * maxwell_density(u + h / 2.0)
                    + maxwell_density(u + h))
                / 6.0;
            u += h;
            if (u - 1.5).abs() < h / 2.0 {
                assert!((acc - maxwell_cdf(1.5)).abs() < 1e-9);
            }
        }
        assert!((acc - 1.0).abs() < 1e-9);
    }

    #[test]
    fn truncated_exponential_target() {
        let far = [1e9];
        let ks = ks_vs_truncated_exp(&[std::f64::consts::LN_2], &far).unwrap();
        assert!((ks - 0.5).abs() < 1e-15);
        assert_eq!(ks_vs_truncated_exp(&[0.0, 0.0], &[0.0]).unwrap(), 0.0);
        // Just below 1 the target is 1 − e^{-1} and the sample CDF is 0.
        let ks = ks_vs_truncated_exp(&[1.0], &[1.0, 1e9]).unwrap();
        assert!((ks - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(ks_vs_truncated_exp(&[], &[1.0]).is_err());
    }

    #[test]
    fn two_sample_ties_and_identity() {
        let x = [0.0, 0.0, 1.0, 2.0];
        assert_eq!(ks_two_sample(&x, &x).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[0.0, 0.0], &[0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn tv_and_poisson() {
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0]), 0.5);
        let p = poisson_pmf(1.0, 3).unwrap();
        assert!((p[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((p[2] - (-1.0f64).exp() / 2.0).abs() < 1e-15);
        assert!(exp1_from_uniform(0.0) == 0.0 && exp1_from_uniform(0.5) > 0.69);
    }
}
