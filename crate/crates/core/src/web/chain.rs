//! The half-difference chain `X` (steps −1, 0, +1 with probabilities
//! 1/4, 1/2, 1/4), its version trapped at 0 on a schedule `S`, and the
//! identities linking zeros of `X` to the correlation of a walk with its
//! column-resampled copy.
//!
//! After `k` steps every probability is a multiple of `4^{−k}`, so the DPs
//! run on exact integer numerators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::scalar::Rational;
use crate::walsh::{spectral_measure, walsh_transform_with, Observable};

/// Longest horizon for the integer DPs: numerators stay below `4^62`.
pub const MAX_CHAIN_STEPS: usize = 62;

/// A set `S ⊂ {0, …, n−1}` of trapping times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrapSchedule {
    n: usize,
    mask: u64,
}

impl TrapSchedule {
    pub fn new(n: usize, times: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = 0u64;
        for k in times {
            if k >= n {
                return Err(invalid(format!("trap time {k} outside 0..{n}")));
            }
            mask |= 1 << k;
        }
        TrapSchedule::from_mask(n, mask)
    }

    /// Bit `k` of `mask` puts `k` in `S`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > MAX_CHAIN_STEPS {
            return Err(invalid(format!("horizon {n} exceeds {MAX_CHAIN_STEPS}")));
        }
        if n < 64 && mask >> n != 0 {
            return Err(invalid(format!("mask {mask:#b} has times outside 0..{n}")));
        }
        Ok(TrapSchedule { n, mask })
    }

    pub fn empty(n: usize) -> Result<Self> {
        TrapSchedule::from_mask(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        TrapSchedule::from_mask(n, (1u64 << n) - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, k: usize) -> bool {
        k < self.n && self.mask >> k & 1 == 1
    }

    pub fn times(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| self.contains(k)).collect()
    }

    fn label(&self) -> String {
        let times = self.times();
        if times.is_empty() {
            "none".to_string()
        } else {
            times
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join("_")
        }
    }
}

/// Exact law of a chain at time `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLaw {
    k: usize,
    probs: BTreeMap<i64, Rational>,
}

impl ChainLaw {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn prob(&self, x: i64) -> Rational {
        self.probs.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn probs(&self) -> &BTreeMap<i64, Rational> {
        &self.probs
    }

    pub fn total(&self) -> Rational {
        self.probs.values().cloned().sum()
    }

    pub fn second_moment(&self) -> Rational {
        self.probs
            .iter()
            .map(|(x, p)| p * Rational::from_integer(BigInt::from(x * x)))
            .sum()
    }
}

/// Numerators over `4^steps` on positions `−reach..=reach`.
#[derive(Debug, Clone)]
struct Dyadic {
    reach: usize,
    steps: u32,
    num: Vec<u128>,
}

impl Dyadic {
    fn start(reach: usize) -> Self {
        let mut num = vec![0; 2 * reach + 1];
        num[reach] = 1;
        Dyadic {
            reach,
            steps: 0,
            num,
        }
    }

    fn step(&mut self, trapped: bool) {
        let len = self.num.len();
        let mut next = vec![0u128; len];
        for (i, &w) in self.num.iter().enumerate() {
            if w == 0 {
                continue;
            }
            if trapped && i == self.reach {
                next[i] += 4 * w;
                continue;
            }
            next[i] += 2 * w;
            next[i - 1] += w;
            next[i + 1] += w;
        }
        self.num = next;
        self.steps += 1;
    }

    fn kill_zero(&mut self) {
        self.num[self.reach] = 0;
    }

    fn zero(&self) -> Rational {
        ratio(self.num[self.reach], self.steps)
    }

    fn total(&self) -> Rational {
        ratio(self.num.iter().sum(), self.steps)
    }

    fn into_law(self) -> ChainLaw {
        let probs = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0)
            .map(|(i, w)| (i as i64 - self.reach as i64, ratio(*w, self.steps)))
            .collect();
        ChainLaw {
            k: self.steps as usize,
            probs,
        }
    }
}

fn ratio(num: u128, steps: u32) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(1u8) << (2 * steps as usize))
}

fn check_steps(k: usize) -> Result<()> {
    if k > MAX_CHAIN_STEPS {
        return Err(invalid(format!(
            "chain horizon {k} exceeds {MAX_CHAIN_STEPS}"
        )));
    }
    Ok(())
}

/// Law of `X_k` for the untrapped chain.
pub fn halfdiff_chain_law(k: usize) -> Result<ChainLaw> {
    check_steps(k)?;
    let mut d = Dyadic::start(k + 1);
    for _ in 0..k {
        d.step(false);
    }
    Ok(d.into_law())
}

/// Law of `X^{(S)}_k`: the transition out of time `j` is frozen at 0 when
/// `j ∈ S`.
pub fn trapped_chain_law(schedule: &TrapSchedule, k: usize) -> Result<ChainLaw> {
    if k > schedule.n {
        return Err(invalid(format!(
            "time {k} beyond the schedule horizon {}",
            schedule.n
        )));
    }
    let mut d = Dyadic::start(k + 1);
    for j in 0..k {
        d.step(schedule.contains(j));
    }
    Ok(d.into_law())
}

/// `P(X^{(S)}_k = 0)` for `k = 0..=n` in one pass.
fn trapped_zero_probs(schedule: &TrapSchedule) -> Vec<Rational> {
    let mut d = Dyadic::start(schedule.n + 1);
    let mut out = vec![d.zero()];
    for j in 0..schedule.n {
        d.step(schedule.contains(j));
        out.push(d.zero());
    }
    out
}

/// `P(Z ∩ [0,k] ⊂ k − S)` with `Z` the zero set of the untrapped chain:
/// paths at 0 at a time `l` with `k − l ∉ S` are killed.
pub fn zero_inclusion_prob(k: usize, schedule: &TrapSchedule) -> Result<Rational> {
    check_steps(k)?;
    let mut d = Dyadic::start(k + 1);
    for l in 0..=k {
        if !schedule.contains(k - l) {
            d.kill_zero();
        }
        if l < k {
            d.step(false);
        }
    }
    Ok(d.total())
}

/// `n p_{n,S} = Σ_{θ<n} P(Z ∩ [0,θ] ⊂ θ − S)`.
pub fn zero_set_average(schedule: &TrapSchedule) -> Result<Rational> {
    (0..schedule.n)
        .map(|k| zero_inclusion_prob(k, schedule))
        .sum()
}

/// `Σ_{k∈S} P(X^{(S)}_k = 0)`.
pub fn theorem79_rhs(schedule: &TrapSchedule) -> Rational {
    let zeros = trapped_zero_probs(schedule);
    schedule.times().into_iter().map(|k| zeros[k].clone()).sum()
}

/// `E[ξ_{0,n}(0) ξ′_{0,n}(0)]` for a walk and its copy that shares the sign
/// columns at times in `S` and uses fresh signs elsewhere.
///
/// Computed by a DP over the pair of positions: on a shared column, walkers
/// at the same site move together; otherwise they move independently.
pub fn resampling_correlation(schedule: &TrapSchedule) -> Rational {
    let n = schedule.n;
    let width = 2 * n + 1;
    let idx = |x: usize, y: usize| x * width + y;
    let mut num = vec![0u128; width * width];
    num[idx(n, n)] = 1;
    for k in 0..n {
        let shared = schedule.contains(k);
        let mut next = vec![0u128; width * width];
        for x in 0..width {
            for y in 0..width {
                let w = num[idx(x, y)];
                if w == 0 {
                    continue;
                }
                if shared && x == y {
                    next[idx(x + 1, y + 1)] += 2 * w;
                    next[idx(x - 1, y - 1)] += 2 * w;
                } else {
                    for (dx, dy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        let (nx, ny) = ((x as i64 + dx) as usize, (y as i64 + dy) as usize);
                        next[idx(nx, ny)] += w;
                    }
                }
            }
        }
        num = next;
    }
    let mut acc = BigInt::zero();
    for x in 0..width {
        for y in 0..width {
            let w = num[idx(x, y)];
            if w != 0 {
                acc +=
                    BigInt::from(w) * BigInt::from((x as i64 - n as i64) * (y as i64 - n as i64));
            }
        }
    }
    Rational::new(acc, BigInt::from(1u8) << (2 * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMode {
    All,
    Sample { count: usize, seed: u64 },
}

fn schedules(n: usize, mode: SubsetMode, limits: &Limits) -> Result<Vec<TrapSchedule>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    check_steps(n)?;
    match mode {
        SubsetMode::All => {
            limits.check_subsets("trap schedules", n)?;
            (0..1u64 << n)
                .map(|m| TrapSchedule::from_mask(n, m))
                .collect()
        }
        SubsetMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            (0..count)
                .map(|_| TrapSchedule::from_mask(n, rng.random::<u64>() & full))
                .collect()
        }
    }
}

/// `p_{n,S} = (1/n) Σ_{k∈S} P(X^{(S)}_k = 0)` for each schedule.
pub fn theorem79_check(n: usize, mode: SubsetMode, limits: &Limits) -> Result<Report> {
    let mut report = Report::new("theorem79").param("n", n);
    if let SubsetMode::Sample { count, seed } = mode {
        report = report.param("samples", count).with_seed(seed);
    }
    let denom = Rational::from_integer(BigInt::from(n));
    for s in schedules(n, mode, limits)? {
        let lhs = zero_set_average(&s)? / &denom;
        let rhs = theorem79_rhs(&s) / &denom;
        report.push(Check::exact(format!("n{n}.S={}", s.label()), lhs, rhs));
    }
    Ok(report)
}

/// For each schedule: the resampling correlation equals
/// `Σ_{k∈S} P(X^{(S)}_k = 0)` and `n − 2 E[(X^{(S)}_n)²]`.
pub fn resampling_identities(n: usize, mode: SubsetMode, limits: &Limits) -> Result<Report> {
    let mut report = Report::new("resampling").param("n", n);
    for s in schedules(n, mode, limits)? {
        let corr = resampling_correlation(&s);
        let label = s.label();
        report.push(Check::exact(
            format!("n{n}.S={label}.zeros"),
            corr.clone(),
            theorem79_rhs(&s),
        ));
        let var = Rational::from_integer(BigInt::from(n))
            - trapped_chain_law(&s, n)?.second_moment() * Rational::from_integer(BigInt::from(2));
        report.push(Check::exact(format!("n{n}.S={label}.variance"), corr, var));
    }
    Ok(report)
}

/// `n p_{n,S}` equals the resampling correlation for every `S`. When the
/// light cone of the walk fits in a dense table, also checks the Walsh
/// spectral measure of `ξ_{0,n}(0)` grouped by time columns against
/// `n` times the law of `(θ − Z) ∩ [0, ∞)`.
pub fn zero_spectral_identity(n: usize, limits: &Limits) -> Result<Report> {
    let mut report = Report::new("zero_spectral").param("n", n);
    for s in schedules(n, SubsetMode::All, limits)? {
        let lhs = zero_set_average(&s)?;
        report.push(Check::exact(
            format!("n{n}.S={}", s.label()),
            lhs,
            resampling_correlation(&s),
        ));
    }
    let cone = n * (n + 1) / 2;
    if cone <= limits.dense_dim {
        let by_columns = column_spectral_mass(n, limits)?;
        let zeros = shifted_zero_set_law(n);
        let scale = n as f64;
        let worst = by_columns
            .iter()
            .zip(&zeros)
            .map(|(mu, z)| (mu - scale * z).abs())
            .fold(0.0, f64::max);
        report.push(Check::at_most(
            format!("n{n}.walsh_columns_vs_zero_set"),
            worst,
            1e-9,
        ));
        report.stat("walsh_coordinates", cone);
    }
    Ok(report)
}

/// `μ{M : columns(M) = C}` for the spectral measure of the endpoint of a
/// walk from 0 on the line, indexed by the column mask `C`.
pub fn column_spectral_mass(n: usize, limits: &Limits) -> Result<Vec<f64>> {
    let cone = n * (n + 1) / 2;
    limits.check_dense(cone)?;
    let column: Vec<usize> = (0..n).flat_map(|k| std::iter::repeat_n(k, k + 1)).collect();
    let f = Observable::from_fn(cone, |w| {
        let mut x: i64 = 0;
        for k in 0..n {
            let j = ((x + k as i64) / 2) as usize;
            x += w.get(k * (k + 1) / 2 + j) as i64;
        }
        x as f64
    })?;
    let mu = spectral_measure(&walsh_transform_with(&f, limits)?);
    let mut out = vec![0.0; 1 << n];
    for (m, w) in mu.weights().iter().enumerate() {
        let cols = (0..cone)
            .filter(|c| m >> c & 1 == 1)
            .fold(0usize, |acc, c| acc | 1 << column[c]);
        out[cols] += w;
    }
    Ok(out)
}

/// Law of `{θ − l : l ≤ θ, X_l = 0}` with `θ` uniform on `0..n`, indexed by
/// subset mask.
pub fn shifted_zero_set_law(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << n];
    for theta in 0..n {
        // Enumerate paths of length θ with weights 1/4, 1/2, 1/4.
        let mut paths: Vec<(i64, f64, usize)> = vec![(0, 1.0, 1 << theta)];
        for l in 1..=theta {
            paths = paths
                .into_iter()
                .flat_map(|(x, w, set)| {
                    [(-1i64, 0.25), (0, 0.5), (1, 0.25)]
                        .into_iter()
                        .map(move |(dx, p)| {
                            let y = x + dx;
                            let set = if y == 0 { set | 1 << (theta - l) } else { set };
                            (y, w * p, set)
                        })
                })
                .collect();
        }
        for (_, w, set) in paths {
            out[set] += w / n as f64;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{binomial, rat};

    fn sched(n: usize, times: &[usize]) -> TrapSchedule {
        TrapSchedule::new(n, times.iter().copied()).unwrap()
    }

    #[test]
    fn free_chain_values() {
        let one = halfdiff_chain_law(1).unwrap();
        assert_eq!(one.prob(0), rat(1, 2));
        assert_eq!(one.prob(1), rat(1, 4));
        assert_eq!(one.prob(-1), rat(1, 4));
        assert_eq!(halfdiff_chain_law(2).unwrap().prob(0), rat(3, 8));
        for k in 0..12 {
            let law = halfdiff_chain_law(k).unwrap();
            let expect = Rational::new(
                binomial(2 * k as i64, k as i64),
                BigInt::from(1u8) << (2 * k),
            );
            assert_eq!(law.prob(0), expect);
            assert_eq!(law.total(), rat(1, 1));
            for (x, p) in law.probs() {
                assert!(x.unsigned_abs() as usize <= k);
                assert_eq!(&law.prob(-x), p);
            }
        }
    }

    #[test]
    fn trapped_chain_values() {
        let n = 6;
        for k in 0..=n {
            assert_eq!(
                trapped_chain_law(&TrapSchedule::empty(n).unwrap(), k).unwrap(),
                halfdiff_chain_law(k).unwrap()
            );
            assert_eq!(
                trapped_chain_law(&TrapSchedule::full(n).unwrap(), k)
                    .unwrap()
                    .prob(0),
                rat(1, 1)
            );
        }
        assert_eq!(
            trapped_chain_law(&sched(3, &[1]), 1).unwrap().prob(0),
            rat(1, 2)
        );
        assert!(trapped_chain_law(&sched(3, &[1]), 4).is_err());
    }

    #[test]
    fn zero_inclusion_values() {
        let s = sched(4, &[2]);
        assert_eq!(zero_inclusion_prob(1, &s).unwrap(), rat(0, 1));
        assert_eq!(zero_inclusion_prob(2, &s).unwrap(), rat(3, 8));
        assert_eq!(zero_inclusion_prob(0, &sched(1, &[0])).unwrap(), rat(1, 1));
    }

    #[test]
    fn single_time_schedules() {
        // For S = {s}, p_{n,S} = (1/n) 2^{−(2s−1)} (C(2s−2, s−1) + C(2s−2, s)).
        for s in 2..8usize {
            let sch = sched(8, &[s]);
            let s = s as i64;
            let expect = Rational::new(
                binomial(2 * s - 2, s - 1) + binomial(2 * s - 2, s),
                BigInt::from(1u8) << (2 * s - 1),
            );
            assert_eq!(zero_set_average(&sch).unwrap(), expect);
            assert_eq!(theorem79_rhs(&sch), expect);
        }
        assert_eq!(zero_set_average(&sched(1, &[0])).unwrap(), rat(1, 1));
        assert_eq!(zero_set_average(&sched(2, &[1])).unwrap(), rat(1, 2));
    }

    #[test]
    fn resampling_examples() {
        assert_eq!(
            resampling_correlation(&TrapSchedule::full(5).unwrap()),
            rat(5, 1)
        );
        assert_eq!(
            resampling_correlation(&TrapSchedule::empty(5).unwrap()),
            rat(0, 1)
        );
        assert_eq!(resampling_correlation(&sched(2, &[1])), rat(1, 2));
    }

    #[test]
    fn identities_small() {
        let limits = Limits::default();
        assert!(theorem79_check(5, SubsetMode::All, &limits)
            .unwrap()
            .passed());
        assert!(resampling_identities(5, SubsetMode::All, &limits)
            .unwrap()
            .passed());
        let r = zero_spectral_identity(4, &limits).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.checks.len(), 17);
        let sampled =
            theorem79_check(20, SubsetMode::Sample { count: 5, seed: 1 }, &limits).unwrap();
        assert!(sampled.passed());
        assert_eq!(sampled.checks.len(), 5);
    }

    #[test]
    fn schedule_validation() {
        assert!(TrapSchedule::new(3, [3]).is_err());
        assert!(TrapSchedule::from_mask(2, 0b100).is_err());
        assert!(theorem79_check(0, SubsetMode::All, &Limits::default()).is_err());
        let caps = Limits {
            subset_dim: 4,
            ..Limits::default()
        };
        assert!(theorem79_check(5, SubsetMode::All, &caps).is_err());
    }

    #[test]
    fn shifted_zero_law_is_a_probability() {
        let law = shifted_zero_set_law(5);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // l = 0 always contributes the point θ, so no set is empty.
        assert_eq!(law[0], 0.0);
    }
}
