//! Scaling-limit experiments. Each returns a report whose checks are the
//! named thresholds below.
//!
//! Exact reports use deterministic DPs in `f64`. Monte Carlo reports go
//! through [`crate::mc::sample_sharded`] and so depend only on the seed.

mod spectral;
mod stability;

pub use spectral::{hausdorff_distance, spectral_profile, FiniteSpectralSet};
pub use stability::{
    block_correlation, coupled_correlation, micro_block_report, micro_correlation, pattern_count,
    poisson_block_report, product_observable, window_length,
};

use num_traits::ToPrimitive;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::flow::{standard_generators, trap_path_diagnostics, trap_waiting_sample, Model};
use crate::limits::Limits;
use crate::mc::{exp1, mean_and_stderr, sample_sharded};
use crate::report::{Check, Report};
use crate::scalar::{rat, rational_to_f64};
use crate::semigroup::Semigroup;
use crate::stats::{
    ks_discrete_vs_cdf, ks_two_sample, ks_vs_truncated_exp, maxwell_cdf, standard_normal_cdf,
};
use crate::web::{flow_property_exhaustive, mean_critical_count_exact, mean_critical_count_mc};
use crate::G3Int as G3;

/// Smallest `i` with a meaningful radial law.
pub const G2_MIN_STEPS: usize = 16;
/// Scale from which the radial KS threshold applies.
pub const G2_SCALE: usize = 2048;
pub const G2_KS_TOLERANCE: f64 = 0.05;
/// DP against closed form, absolute per atom.
pub const G2_CLOSED_FORM_TOLERANCE: f64 = 1e-12;
pub const G3_MIN_STEPS: usize = 256;
pub const G3_KS_TOLERANCE: f64 = 0.05;
/// Width, in standard errors, of the band for the mass of `c = 0`.
pub const G3_ATOM_SIGMAS: f64 = 3.0;
pub const TRAP_KS_TOLERANCE: f64 = 0.1;
/// Width, in standard errors, of the band for web Monte Carlo means.
pub const WEB_SIGMAS: f64 = 4.0;

/// KS tolerance of the walk CLT at `i` steps.
pub fn clt_tolerance(i: usize) -> f64 {
    1.0 / (i as f64).sqrt()
}

/// `P(a(0,i) = 2k − i)` for `k = 0..=i`, by the Pascal recursion.
pub fn walk_endpoint_law(i: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..i {
        let mut next = vec![0.0; row.len() + 1];
        for (k, p) in row.iter().enumerate() {
            next[k] += 0.5 * p;
            next[k + 1] += 0.5 * p;
        }
        row = next;
    }
    row
}

/// KS distance of `i^{−1/2} a(0,i)` to the standard normal, one check per `i`.
pub fn clt_report(steps: &[usize]) -> Result<Report> {
    if steps.is_empty() || steps.contains(&0) {
        return Err(invalid(
            "clt needs a nonempty list of step counts, each at least 1",
        ));
    }
    let mut report = Report::new("clt").param("i", steps.to_vec());
    for &i in steps {
        let scale = (i as f64).sqrt();
        let atoms: Vec<(f64, f64)> = walk_endpoint_law(i)
            .into_iter()
            .enumerate()
            .map(|(k, p)| ((2.0 * k as f64 - i as f64) / scale, p))
            .collect();
        let ks = ks_discrete_vs_cdf(&atoms, standard_normal_cdf);
        report.push(Check::at_most(format!("i{i}.ks"), ks, clt_tolerance(i)));
        report.stat(format!("i{i}.ks"), ks);
    }
    Ok(report)
}

/// `P(a + 2b = u)` for `u = 0..=i`, by a DP over `(a − min a, −min a)`.
pub fn g2_radial_pmf(i: usize) -> Vec<f64> {
    let w = i + 1;
    // Index `h * w + d`: height `h` above the running minimum, depth `d` of it.
    let mut cur = vec![0.0; w * w];
    let mut next = vec![0.0; w * w];
    cur[0] = 1.0;
    for k in 0..i {
        for h in 0..=k {
            for d in 0..=k - h {
                let p = cur[h * w + d];
                if p == 0.0 {
                    continue;
                }
                cur[h * w + d] = 0.0;
                next[(h + 1) * w + d] += 0.5 * p;
                if h == 0 {
                    next[d + 1] += 0.5 * p;
                } else {
                    next[(h - 1) * w + d] += 0.5 * p;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut out = vec![0.0; w];
    for h in 0..w {
        for d in 0..w - h {
            out[h + d] += cur[h * w + d];
        }
    }
    out
}

/// `P(a + 2b = u) = (u+1)² i! / (2^i ((i+u)/2 + 1)! ((i−u)/2)!)`.
pub fn g2_radial_closed_form(i: usize, u: usize) -> f64 {
    if u > i || (i - u) % 2 == 1 {
        return 0.0;
    }
    let (up, down) = ((i + u) / 2, (i - u) / 2);
    let ln = 2.0 * ((u + 1) as f64).ln() + ln_gamma(i as f64 + 1.0)
        - i as f64 * std::f64::consts::LN_2
        - ln_gamma(up as f64 + 2.0)
        - ln_gamma(down as f64 + 1.0);
    ln.exp()
}

/// KS distance of `(a + 2b)/√i` to the Maxwell law.
pub fn g2_limit_report(i: usize) -> Result<Report> {
    if i < G2_MIN_STEPS {
        return Err(invalid(format!(
            "g2 limit needs i ≥ {G2_MIN_STEPS}, got {i}"
        )));
    }
    let pmf = g2_radial_pmf(i);
    let deviation = pmf
        .iter()
        .enumerate()
        .map(|(u, p)| (p - g2_radial_closed_form(i, u)).abs())
        .fold(0.0, f64::max);
    let scale = (i as f64).sqrt();
    let atoms: Vec<(f64, f64)> = pmf
        .iter()
        .enumerate()
        .map(|(u, &p)| (u as f64 / scale, p))
        .collect();
    let ks = ks_discrete_vs_cdf(&atoms, maxwell_cdf);
    let mut report = Report::new("g2limit").param("i", i);
    report.push(Check::at_most(
        format!("i{i}.dp_vs_closed_form"),
        deviation,
        G2_CLOSED_FORM_TOLERANCE,
    ));
    if i >= G2_SCALE {
        report.push(Check::at_most(format!("i{i}.ks"), ks, G2_KS_TOLERANCE));
    }
    report.stat("ks", ks);
    report.stat("mass", pmf.iter().sum::<f64>());
    Ok(report)
}

/// One sample of the sticky flow over `i` steps with `p = 1/√i`, plus an
/// independent `Exp(1)` draw.
fn sticky_sample(
    gens: &crate::flow::GeneratorSet,
    i: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (i64, i64, i64, f64) {
    let mut xi = G3::unit();
    for _ in 0..i {
        xi = xi.compose(gens.draw(rng));
    }
    (*xi.a(), *xi.b(), *xi.c(), exp1(rng))
}

/// Two-sample KS between `c/√i` and `max(0, (a+b)/√i − η)` on the same
/// `(a, b)` samples; also checks the mass of `c = 0` against its conditional
/// law `(1 − p)^{a+b}`.
pub fn g3_limit_report(i: usize, samples: usize, seed: u64) -> Result<Report> {
    let root = (i as f64).sqrt().round() as usize;
    if root * root != i || i < G3_MIN_STEPS {
        return Err(invalid(format!(
            "g3 limit needs a perfect square i ≥ {G3_MIN_STEPS}, got {i}"
        )));
    }
    if samples < 2 {
        return Err(invalid("g3 limit needs at least two samples"));
    }
    let gens = standard_generators(Model::G3, &rat(1, root as i64), 1)?;
    let draws = sample_sharded(seed, samples, |rng| sticky_sample(&gens, i, rng));
    let scale = root as f64;
    let p = 1.0 / scale;
    let sticky: Vec<f64> = draws.iter().map(|d| d.2 as f64 / scale).collect();
    let limit: Vec<f64> = draws
        .iter()
        .map(|d| ((d.0 + d.1) as f64 / scale - d.3).max(0.0))
        .collect();
    let ks = ks_two_sample(&sticky, &limit)?;
    let residuals: Vec<f64> = draws
        .iter()
        .map(|d| f64::from(u8::from(d.2 == 0)) - (1.0 - p).powi((d.0 + d.1) as i32))
        .collect();
    let (bias, se) = mean_and_stderr(&residuals);
    let zero_mass = draws.iter().filter(|d| d.2 == 0).count() as f64 / samples as f64;
    let limit_zero = draws
        .iter()
        .map(|d| (-((d.0 + d.1) as f64) / scale).exp())
        .sum::<f64>()
        / samples as f64;

    let mut report = Report::new("g3limit")
        .param("i", i)
        .param("samples", samples)
        .with_seed(seed);
    report.push(Check::at_most(format!("i{i}.ks"), ks, G3_KS_TOLERANCE));
    report.push(Check::at_most(
        format!("i{i}.zero_mass_sigmas"),
        bias.abs() / se,
        G3_ATOM_SIGMAS,
    ));
    report.stat("ks", ks);
    report.stat("zero_mass", zero_mass);
    report.stat("zero_mass_stderr", se);
    report.stat("zero_mass_limit", limit_zero);
    Ok(report)
}

/// Exhaustive trap deviation bound at horizon `t` for each depth in `depths`.
pub fn trap_deviation_report(t: usize, depths: &[i64], limits: &Limits) -> Result<Report> {
    if depths.iter().any(|&m| m < 1) {
        return Err(invalid("trap depth must be at least 1"));
    }
    let mut report = Report::new("trap")
        .param("t", t)
        .param("m", depths.to_vec());
    for &m in depths {
        let d = trap_path_diagnostics(t, m, limits)?;
        report.push(Check::new(
            format!("t{t}.m{m}.deviation"),
            d.max_deviation,
            d.bound,
            d.holds(),
        ));
    }
    Ok(report)
}

/// KS between the rescaled waiting statistic and `min(η, cap)`, `η ~ Exp(1)`,
/// where `cap` is each sample's own truncation level.
///
/// The check uses the exact target law given the caps; the two-sample
/// distance against fresh `η` draws is kept as a statistic.
pub fn trap_waiting_report(m: i64, t: usize, samples: usize, seed: u64) -> Result<Report> {
    if !(1..=62).contains(&m) || samples < 2 {
        return Err(invalid(
            "trap waiting needs 1 ≤ m ≤ 62 and at least two samples",
        ));
    }
    let draws = sample_sharded(seed, samples, |rng| {
        let (w, cap) = trap_waiting_sample(m, t, rng);
        (w, cap, exp1(rng).min(cap))
    });
    let waits: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let caps: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let drawn: Vec<f64> = draws.iter().map(|d| d.2).collect();
    let ks = ks_vs_truncated_exp(&waits, &caps)?;
    let ks_drawn = ks_two_sample(&waits, &drawn)?;
    let mut report = Report::new("trap_waiting")
        .param("m", m)
        .param("t", t)
        .param("samples", samples)
        .with_seed(seed);
    report.push(Check::at_most(
        format!("m{m}.t{t}.waiting_ks"),
        ks,
        TRAP_KS_TOLERANCE,
    ));
    report.stat("ks", ks);
    report.stat("ks_two_sample", ks_drawn);
    report.stat("mean_wait", mean_and_stderr(&waits).0);
    report.stat("mean_target", mean_and_stderr(&drawn).0);
    Ok(report)
}

/// Flow property on every field, then `E n(0,t)` exact against Monte Carlo.
pub fn web_report(
    flow: (usize, usize),
    circumference: usize,
    t: usize,
    samples: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Report> {
    let (horizon, flow_circ) = flow;
    let (fields, failures) = flow_property_exhaustive(horizon, flow_circ, limits)?;
    let exact = mean_critical_count_exact(circumference, 0, t, limits)?;
    let (mean, se) = mean_critical_count_mc(circumference, t, samples, seed)?;
    let exact_f = rational_to_f64(&exact);
    let mut report = Report::new("web")
        .param("flow_horizon", horizon)
        .param("flow_circumference", flow_circ)
        .param("circumference", circumference)
        .param("t", t)
        .param("samples", samples)
        .with_seed(seed);
    report.push(Check::equal_counts(
        format!("flow_property.T{horizon}.N{flow_circ}"),
        failures.to_i64().unwrap_or(i64::MAX),
        0,
    ));
    report.push(Check::at_most(
        format!("N{circumference}.t{t}.mean_critical_sigmas"),
        (mean - exact_f).abs() / se,
        WEB_SIGMAS,
    ));
    report.stat("fields", fields.to_i64().unwrap_or(i64::MAX));
    report.stat("exact_mean", exact);
    report.stat("mc_mean", mean);
    report.stat("mc_stderr", se);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::g2_radial_law;

    #[test]
    fn single_step_clt_distance() {
        let r = clt_report(&[1]).unwrap();
        let ks = r.stats["i1.ks"].as_f64();
        assert!((ks - (standard_normal_cdf(1.0) - 0.5)).abs() < 1e-12);
        assert!(clt_report(&[0]).is_err());
        assert!(clt_report(&[]).is_err());
    }

    #[test]
    fn radial_dp_matches_exact_law() {
        for t in [16, 21] {
            let dp = g2_radial_pmf(t);
            for (u, p) in g2_radial_law(t) {
                assert!((dp[u as usize] - rational_to_f64(&p)).abs() < 1e-15);
                let exact = rational_to_f64(&p);
                assert!((g2_radial_closed_form(t, u as usize) - exact).abs() <= 1e-12 * exact);
            }
        }
    }

    #[test]
    fn g2_validation() {
        assert!(g2_limit_report(15).is_err());
        let r = g2_limit_report(64).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert!((r.stats["mass"].as_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn g3_validation() {
        assert!(g3_limit_report(1, 100, 1).is_err());
        assert!(g3_limit_report(300, 100, 1).is_err());
        assert!(g3_limit_report(256, 1, 1).is_err());
    }

    #[test]
    fn g3_reproducible() {
        let a = g3_limit_report(256, 500, 9).unwrap().to_json_string();
        let b = g3_limit_report(256, 500, 9).unwrap().to_json_string();
        assert_eq!(a, b);
    }
}
