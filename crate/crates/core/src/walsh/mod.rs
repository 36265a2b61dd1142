//! Fourier–Walsh analysis of functions of `n` random signs.
//!
//! Points `ω ∈ {−1,+1}^n` are stored as bitmasks: bit `m` of the index is
//! set when `τ_m(ω) = +1`. Coordinate subsets `M` use the same bitmask
//! encoding, so `|M|` is a popcount.

mod generators;
mod noise;
mod verify;

pub use generators::{named_observable, ObservableKind};
pub use noise::{
    bks_statistic, block_flip_operator, block_noise_operator, influence, noise_operator,
    noisy_correlation,
};
pub use verify::verify_walsh_layer;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::Limits;
use crate::scalar::Scalar;

/// A point of `{−1,+1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(invalid(format!("sign entries must be ±1, got {bad}")));
        }
        Ok(SignVector { signs })
    }

    /// Decodes the table index `idx` of an `n`-coordinate observable.
    pub fn from_index(n: usize, idx: usize) -> Self {
        let signs = (0..n)
            .map(|m| if idx >> m & 1 == 1 { 1 } else { -1 })
            .collect();
        SignVector { signs }
    }

    pub fn index(&self) -> usize {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == 1)
            .fold(0, |acc, (m, _)| acc | 1 << m)
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn get(&self, m: usize) -> i8 {
        self.signs[m]
    }
}

/// `τ_M(ω)` for a subset mask and a point index.
#[inline]
pub fn walsh_character(subset: usize, point: usize) -> i8 {
    // τ_m = −1 exactly on the coordinates of M missing from the point.
    if (subset & !point).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A real function on `{−1,+1}^n`, stored as a dense `2^n` table.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<S> {
    n: usize,
    values: Vec<S>,
}

impl<S: Scalar> Observable<S> {
    pub fn new(n: usize, values: Vec<S>) -> Result<Self> {
        if n >= usize::BITS as usize - 1 || values.len() != 1usize << n {
            return Err(invalid(format!(
                "observable on {n} coordinates needs 2^{n} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(invalid("observable values must be finite"));
        }
        Ok(Observable { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(&SignVector) -> S) -> Result<Self> {
        if n >= usize::BITS as usize - 1 {
            return Err(Error::DimensionTooLarge {
                n,
                limit: usize::BITS as usize - 2,
            });
        }
        let values = (0..1usize << n)
            .map(|idx| f(&SignVector::from_index(n, idx)))
            .collect();
        Observable::new(n, values)
    }

    pub fn constant(n: usize, c: S) -> Result<Self> {
        Observable::from_fn(n, |_| c.clone())
    }

    /// The character `τ_M` itself.
    pub fn character(n: usize, subset: usize) -> Result<Self> {
        Observable::from_fn(
            n,
            |w| S::from_i64(walsh_character(subset, w.index()) as i64),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value_at(&self, idx: usize) -> &S {
        &self.values[idx]
    }

    pub fn eval(&self, w: &SignVector) -> Result<&S> {
        if w.n() != self.n {
            return Err(invalid("sign vector length does not match observable"));
        }
        Ok(&self.values[w.index()])
    }

    pub fn mean(&self) -> S {
        sum(self.values.iter().cloned()).div_pow2(self.n as u32)
    }

    /// `‖f‖² = E f²` under the uniform measure.
    pub fn norm_sq(&self) -> S {
        sum(self.values.iter().map(|v| v.clone() * v.clone())).div_pow2(self.n as u32)
    }

    pub fn inner(&self, other: &Self) -> Result<S> {
        if self.n != other.n {
            return Err(invalid("observables live on different dimensions"));
        }
        let s = sum(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.clone() * b.clone()));
        Ok(s.div_pow2(self.n as u32))
    }

    pub fn max_abs(&self) -> S {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Observable<T> {
        Observable {
            n: self.n,
            values: self.values.iter().map(f).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ObservableJson {
    n: usize,
    values: Vec<f64>,
}

impl Observable<f64> {
    /// Parses `{"n": int, "values": [2^n floats]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ObservableJson =
            serde_json::from_str(text).map_err(|e| invalid(format!("observable JSON: {e}")))?;
        Observable::new(raw.n, raw.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ObservableJson {
            n: self.n,
            values: self.values.clone(),
        })
        .expect("plain numeric JSON")
    }
}

/// Walsh coefficients `f̂_M`, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshSpectrum<S> {
    n: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> WalshSpectrum<S> {
    pub fn new(n: usize, coeffs: Vec<S>) -> Result<Self> {
        if n >= usize::BITS as usize - 1 || coeffs.len() != 1usize << n {
            return Err(invalid(format!(
                "spectrum on {n} coordinates needs 2^{n} coefficients"
            )));
        }
        Ok(WalshSpectrum { n, coeffs })
    }

    /// Spectrum with the listed nonzero coefficients.
    pub fn from_sparse(n: usize, entries: impl IntoIterator<Item = (usize, S)>) -> Result<Self> {
        if n >= usize::BITS as usize - 1 {
            return Err(Error::DimensionTooLarge {
                n,
                limit: usize::BITS as usize - 2,
            });
        }
        let mut coeffs = vec![S::zero(); 1 << n];
        for (mask, c) in entries {
            if mask >= coeffs.len() {
                return Err(invalid(format!(
                    "subset mask {mask:#b} outside {n} coordinates"
                )));
            }
            coeffs[mask] = c;
        }
        Ok(WalshSpectrum { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: usize) -> &S {
        &self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Nonzero coefficients in increasing mask order.
    pub fn support(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Multiplies each coefficient by `multiplier(M)`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(usize) -> S) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c.clone() * multiplier(m))
            .collect();
        WalshSpectrum { n: self.n, coeffs }
    }

    pub fn sum_sq(&self) -> S {
        sum(self.coeffs.iter().map(|c| c.clone() * c.clone()))
    }
}

/// `μ_f(M) = f̂_M²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<S> {
    n: usize,
    weights: Vec<S>,
}

impl<S: Scalar> SpectralMeasure<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, mask: usize) -> &S {
        &self.weights[mask]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn total(&self) -> S {
        sum(self.weights.iter().cloned())
    }

    /// `μ_f(𝓜)` for the family of subsets selected by `pred`.
    pub fn mass_where(&self, pred: impl Fn(usize) -> bool) -> S {
        sum(self
            .weights
            .iter()
            .enumerate()
            .filter(|(m, _)| pred(*m))
            .map(|(_, w)| w.clone()))
    }

    /// Mass of all subsets of `e`.
    pub fn mass_within(&self, e: usize) -> S {
        self.mass_where(|m| m & !e == 0)
    }

    /// Mass grouped by `|M|`, index `k` holds `μ_f{|M| = k}`.
    pub fn by_cardinality(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.n + 1];
        for (m, w) in self.weights.iter().enumerate() {
            let k = m.count_ones() as usize;
            out[k] = out[k].clone() + w.clone();
        }
        out
    }
}

/// Contiguous blocks of coordinates covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Range<usize>>,
}

impl BlockPartition {
    pub fn new(n: usize, blocks: Vec<Range<usize>>) -> Result<Self> {
        let mut next = 0;
        for b in &blocks {
            if b.start != next || b.end <= b.start {
                return Err(invalid(format!(
                    "blocks must be nonempty, contiguous and in order; got {b:?} after coordinate {next}"
                )));
            }
            next = b.end;
        }
        if next != n {
            return Err(invalid(format!("blocks cover 0..{next}, expected 0..{n}")));
        }
        Ok(BlockPartition { n, blocks })
    }

    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        let mut start = 0;
        let blocks = lengths
            .iter()
            .map(|&len| {
                let r = start..start + len;
                start += len;
                r
            })
            .collect();
        BlockPartition::new(start, blocks)
    }

    pub fn singletons(n: usize) -> Self {
        BlockPartition {
            n,
            blocks: (0..n).map(|m| m..m + 1).collect(),
        }
    }

    pub fn whole(n: usize) -> Result<Self> {
        BlockPartition::new(n, std::iter::once(0..n).collect())
    }

    /// `k` blocks of equal length; `n` must be divisible by `k`.
    pub fn equal(n: usize, k: usize) -> Result<Self> {
        if k == 0 || !n.is_multiple_of(k) {
            return Err(invalid(format!(
                "cannot split {n} coordinates into {k} equal blocks"
            )));
        }
        BlockPartition::from_lengths(&vec![n / k; k])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    /// Index of the block containing coordinate `m`.
    pub fn block_of(&self, m: usize) -> usize {
        self.blocks.partition_point(|b| b.end <= m)
    }

    /// Number of blocks meeting the integer interval `range`.
    pub fn blocks_meeting_interval(&self, range: Range<usize>) -> usize {
        if range.is_empty() {
            return 0;
        }
        self.block_of(range.end - 1) - self.block_of(range.start) + 1
    }

    pub(crate) fn masks(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .map(|b| b.clone().fold(0usize, |acc, m| acc | 1 << m))
            .collect()
    }
}

pub(crate) fn sum<S: Scalar>(it: impl Iterator<Item = S>) -> S {
    it.fold(S::zero(), |a, b| a + b)
}

/// In-place unnormalized butterfly. With `inverse = false` it maps values
/// to `2^n f̂`; with `inverse = true` it maps coefficients back to values.
fn butterfly<S: Scalar>(data: &mut [S], inverse: bool) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        for start in (0..len).step_by(2 * h) {
            for j in start..start + h {
                let lo = data[j].clone();
                let hi = data[j + h].clone();
                if inverse {
                    // lo = coefficient without m, hi = coefficient with m.
                    data[j] = lo.clone() - hi.clone();
                    data[j + h] = lo + hi;
                } else {
                    // lo = value at τ_m = −1, hi = value at τ_m = +1.
                    data[j] = lo.clone() + hi.clone();
                    data[j + h] = hi - lo;
                }
            }
        }
        h *= 2;
    }
}

pub fn walsh_transform<S: Scalar>(f: &Observable<S>) -> Result<WalshSpectrum<S>> {
    walsh_transform_with(f, &Limits::default())
}

/// Fast Walsh–Hadamard transform, `f̂_M = 2^{−n} Σ_ω f(ω) τ_M(ω)`.
pub fn walsh_transform_with<S: Scalar>(
    f: &Observable<S>,
    limits: &Limits,
) -> Result<WalshSpectrum<S>> {
    limits.check_dense(f.n)?;
    let mut data = f.values.clone();
    butterfly(&mut data, false);
    let n = f.n as u32;
    let coeffs = data.into_iter().map(|c| c.div_pow2(n)).collect();
    Ok(WalshSpectrum { n: f.n, coeffs })
}

pub fn synthesize<S: Scalar>(spec: &WalshSpectrum<S>) -> Result<Observable<S>> {
    synthesize_with(spec, &Limits::default())
}

/// `f = Σ_M f̂_M τ_M`.
pub fn synthesize_with<S: Scalar>(
    spec: &WalshSpectrum<S>,
    limits: &Limits,
) -> Result<Observable<S>> {
    limits.check_dense(spec.n)?;
    let mut data = spec.coeffs.clone();
    butterfly(&mut data, true);
    Ok(Observable {
        n: spec.n,
        values: data,
    })
}

pub fn spectral_measure<S: Scalar>(spec: &WalshSpectrum<S>) -> SpectralMeasure<S> {
    SpectralMeasure {
        n: spec.n,
        weights: spec.coeffs.iter().map(|c| c.clone() * c.clone()).collect(),
    }
}

/// `E[f | F_E]`: keeps the coefficients of subsets of `e` and drops the rest.
pub fn conditional_expectation<S: Scalar>(f: &Observable<S>, e: usize) -> Result<Observable<S>> {
    if f.n < usize::BITS as usize && e >> f.n != 0 {
        return Err(invalid(format!(
            "coordinate mask {e:#b} outside {} coordinates",
            f.n
        )));
    }
    let spec = walsh_transform(f)?;
    let kept = spec.apply_multiplier(|m| if m & !e == 0 { S::one() } else { S::zero() });
    synthesize(&kept)
}
