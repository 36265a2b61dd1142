//! Products over sliding windows and the Poisson pattern counter.
//!
//! Every Walsh monomial of a window product is an interval of length `L`.
//! Per-coordinate noise therefore damps it by `ρ^L`. Block noise damps it
//! only by `ρ` per block the interval meets.

use std::ops::Range;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::limits::Limits;
use crate::mc::{mean_and_stderr, sample_sharded};
use crate::report::{Check, Report};
use crate::stats::{poisson_pmf, total_variation};
use crate::walsh::{
    block_noise_operator, walsh_transform_with, BlockPartition, Observable, SignVector,
};

/// Micro correlation at or below this counts as sensitive.
pub const MICRO_THRESHOLD: f64 = 1e-6;
/// Sizes from which the stability thresholds apply.
pub const STABILITY_SCALE: usize = 1024;
/// Largest size cross-checked against the exhaustive coupling.
pub const COUPLING_MAX_DIM: usize = 10;
pub const ORACLE_TOLERANCE: f64 = 1e-10;
pub const POISSON_KMAX: u64 = 10;
pub const POISSON_TV_TOLERANCE: f64 = 0.1;
const MAX_PATTERN: usize = 24;

/// `entier(λ√i)`, rounding values within `1e-9` of an integer to it.
pub fn window_length(i: usize, lambda: f64) -> Result<usize> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid(format!(
            "window scale must be positive, got {lambda}"
        )));
    }
    let x = lambda * (i as f64).sqrt();
    let r = x.round();
    let len = if (x - r).abs() < 1e-9 { r } else { x.floor() } as usize;
    if len == 0 || len > i {
        return Err(invalid(format!(
            "window length {len} does not fit in {i} coordinates"
        )));
    }
    Ok(len)
}

fn windows(i: usize, len: usize) -> impl Iterator<Item = Range<usize>> {
    (0..=i - len).map(move |k| k..k + len)
}

/// `i^{−1/2} Σ_k τ_{k+1} ⋯ τ_{k+L}` over all `i − L + 1` windows.
pub fn product_observable(i: usize, lambda: f64, limits: &Limits) -> Result<Observable<f64>> {
    limits.check_dense(i)?;
    let len = window_length(i, lambda)?;
    let norm = (i as f64).sqrt();
    Observable::from_fn(i, |w: &SignVector| {
        windows(i, len)
            .map(|r| r.map(|m| f64::from(w.get(m))).product::<f64>())
            .sum::<f64>()
            / norm
    })
}

/// Normalized correlation under per-coordinate noise: `ρ^L`.
pub fn micro_correlation(len: usize, rho: f64) -> f64 {
    rho.powi(len as i32)
}

/// Normalized correlation under block noise: the mean over windows of
/// `ρ^{blocks met}`. Windows are orthonormal, so this is exact.
pub fn block_correlation(len: usize, blocks: &BlockPartition, rho: f64) -> Result<f64> {
    let i = blocks.n();
    if len == 0 || len > i {
        return Err(invalid(format!(
            "window length {len} does not fit in {i} coordinates"
        )));
    }
    let total: f64 = windows(i, len)
        .map(|r| rho.powi(blocks.blocks_meeting_interval(r) as i32))
        .sum();
    Ok(total / (i - len + 1) as f64)
}

/// `E[f(ω) f(ω')] / E[f²]` by summing over all pairs `(ω, ω')`, where each
/// block of `ω'` equals that of `ω` with probability `ρ` and is fresh
/// otherwise.
pub fn coupled_correlation(f: &Observable<f64>, blocks: &BlockPartition, rho: f64) -> Result<f64> {
    let n = f.n();
    if blocks.n() != n || n > COUPLING_MAX_DIM {
        return Err(invalid(format!(
            "coupling needs a partition of {n} ≤ {COUPLING_MAX_DIM} coordinates"
        )));
    }
    let masks: Vec<(usize, f64)> = blocks
        .blocks()
        .iter()
        .map(|b| {
            (
                b.clone().fold(0, |acc, m| acc | 1 << m),
                (b.len() as f64).exp2().recip(),
            )
        })
        .collect();
    let vals = f.values();
    let mut joint = 0.0;
    for (x, fx) in vals.iter().enumerate() {
        for (y, fy) in vals.iter().enumerate() {
            let kernel: f64 = masks
                .iter()
                .map(|&(mask, fresh)| {
                    let same = f64::from(u8::from((x ^ y) & mask == 0));
                    rho * same + (1.0 - rho) * fresh
                })
                .product();
            joint += fx * fy * kernel;
        }
    }
    let size = vals.len() as f64;
    Ok(joint / size / (f.norm_sq()))
}

/// Micro against block correlation of the window product.
pub fn micro_block_report(
    i: usize,
    lambda: f64,
    rho: f64,
    blocks: usize,
    limits: &Limits,
) -> Result<Report> {
    if !(rho.is_finite() && rho.abs() <= 1.0) {
        return Err(invalid(format!(
            "noise parameter must satisfy |ρ| ≤ 1, got {rho}"
        )));
    }
    let len = window_length(i, lambda)?;
    let partition = BlockPartition::equal(i, blocks)?;
    let micro = micro_correlation(len, rho);
    let block = block_correlation(len, &partition, rho)?;
    let mut report = Report::new("microblock")
        .param("i", i)
        .param("lambda", lambda)
        .param("rho", rho)
        .param("blocks", blocks);
    if i <= COUPLING_MAX_DIM {
        let f = product_observable(i, lambda, limits)?;
        let micro_oracle = coupled_correlation(&f, &BlockPartition::singletons(i), rho)?;
        let block_oracle = coupled_correlation(&f, &partition, rho)?;
        let spec = walsh_transform_with(&f, limits)?;
        let damped = block_noise_operator(&spec, &partition, rho)?;
        let spectral: f64 = spec
            .coeffs()
            .iter()
            .zip(damped.coeffs())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / spec.sum_sq();
        report.push(Check::close(
            "micro_vs_coupling",
            micro,
            micro_oracle,
            ORACLE_TOLERANCE,
        ));
        report.push(Check::close(
            "block_vs_coupling",
            block,
            block_oracle,
            ORACLE_TOLERANCE,
        ));
        report.push(Check::close(
            "block_vs_spectrum",
            block,
            spectral,
            ORACLE_TOLERANCE,
        ));
    }
    if i >= STABILITY_SCALE {
        report.push(Check::at_most("micro", micro, MICRO_THRESHOLD));
        report.push(Check::at_least("block", block, rho * rho));
    }
    report.stat("window", len);
    report.stat("micro", micro);
    report.stat("block", block);
    Ok(report)
}

/// Occurrences of one `+` followed by `n − 1` minus signs.
pub fn pattern_count(signs: &[i8], n: usize) -> usize {
    if n == 0 || signs.len() < n {
        return 0;
    }
    signs
        .windows(n)
        .filter(|w| w[0] == 1 && w[1..].iter().all(|&s| s == -1))
        .count()
}

/// Law of the pattern counter over `t_span · 2^n` signs against
/// Poisson(`t_span`).
pub fn poisson_block_report(
    n_pattern: usize,
    t_span: usize,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    if !(1..=MAX_PATTERN).contains(&n_pattern) || t_span == 0 || samples < 2 {
        return Err(invalid(format!(
            "poisson counter needs 1 ≤ n ≤ {MAX_PATTERN}, t_span ≥ 1 and at least two samples"
        )));
    }
    let len = t_span << n_pattern;
    let counts = sample_sharded(seed, samples, |rng| {
        let signs: Vec<i8> = (0..len)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        pattern_count(&signs, n_pattern)
    });
    let mut hist = vec![0usize; POISSON_KMAX as usize + 1];
    for &c in &counts {
        if let Some(slot) = hist.get_mut(c) {
            *slot += 1;
        }
    }
    let empirical: Vec<f64> = hist.iter().map(|&h| h as f64 / samples as f64).collect();
    let target = poisson_pmf(t_span as f64, POISSON_KMAX)?;
    let tv = total_variation(&empirical, &target);
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean, se) = mean_and_stderr(&as_f64);
    let mut report = Report::new("poisson")
        .param("n_pattern", n_pattern)
        .param("t_span", t_span)
        .param("samples", samples)
        .with_seed(seed);
    report.push(Check::at_most(
        format!("n{n_pattern}.tv"),
        tv,
        POISSON_TV_TOLERANCE,
    ));
    report.stat("tv", tv);
    report.stat("mean", mean);
    report.stat("mean_stderr", se);
    report.stat(
        "expected_mean",
        (len - n_pattern + 1) as f64 / (1u64 << n_pattern) as f64,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_rounding() {
        assert_eq!(window_length(8, 1.0 / 2f64.sqrt()).unwrap(), 2);
        assert_eq!(window_length(4096, 1.0).unwrap(), 64);
        assert_eq!(window_length(16, 0.4).unwrap(), 1);
        assert!(window_length(16, 0.1).is_err());
        assert!(window_length(4, 3.0).is_err());
        assert_eq!(window_length(4, 2.0).unwrap(), 4);
    }

    #[test]
    fn two_blocks_of_four() {
        let rho = 0.37;
        let blocks = BlockPartition::equal(8, 2).unwrap();
        let want = (6.0 * rho + rho * rho) / 7.0;
        assert!((block_correlation(2, &blocks, rho).unwrap() - want).abs() < 1e-15);
        let r = micro_block_report(8, 1.0 / 2f64.sqrt(), rho, 2, &Limits::default()).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn extreme_partitions() {
        let rho = 0.6;
        assert!(
            (block_correlation(3, &BlockPartition::whole(12).unwrap(), rho).unwrap() - rho).abs()
                < 1e-15
        );
        let single = block_correlation(3, &BlockPartition::singletons(12), rho).unwrap();
        assert!((single - micro_correlation(3, rho)).abs() < 1e-15);
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(pattern_count(&[-1; 16], 3), 0);
        assert_eq!(pattern_count(&[1, -1, -1, 1, -1, -1, -1], 3), 2);
        assert_eq!(pattern_count(&[1, -1], 3), 0);
    }

    #[test]
    fn rho_validated() {
        assert!(micro_block_report(8, 1.0, 1.5, 2, &Limits::default()).is_err());
    }
}
