//! Noise operators and the correlations built from them.

use super::{sum, walsh_transform, BlockPartition, Observable, WalshSpectrum};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

fn check_rho<S: Scalar>(rho: &S) -> Result<()> {
    if rho.abs() > S::one() {
        return Err(invalid(format!(
            "noise parameter must satisfy |ρ| ≤ 1, got {rho:?}"
        )));
    }
    Ok(())
}

fn powers<S: Scalar>(rho: &S, k: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(k + 1);
    let mut acc = S::one();
    for _ in 0..=k {
        out.push(acc.clone());
        acc = acc * rho.clone();
    }
    out
}

/// `ρ^N`: multiplies `f̂_M` by `ρ^{|M|}`.
pub fn noise_operator<S: Scalar>(spec: &WalshSpectrum<S>, rho: S) -> Result<WalshSpectrum<S>> {
    check_rho(&rho)?;
    let pw = powers(&rho, spec.n());
    Ok(spec.apply_multiplier(|m| pw[m.count_ones() as usize].clone()))
}

/// Block version of `ρ^N`: multiplies `f̂_M` by `ρ^{b(M)}`, `b(M)` being the
/// number of blocks that meet `M`.
///
/// This is the coupling in which each block is kept with probability `ρ` and
/// otherwise replaced by fresh uniform signs.
pub fn block_noise_operator<S: Scalar>(
    spec: &WalshSpectrum<S>,
    blocks: &BlockPartition,
    rho: S,
) -> Result<WalshSpectrum<S>> {
    check_rho(&rho)?;
    if blocks.n() != spec.n() {
        return Err(invalid(format!(
            "partition covers {} coordinates, spectrum has {}",
            blocks.n(),
            spec.n()
        )));
    }
    let masks = blocks.masks();
    let pw = powers(&rho, masks.len());
    Ok(spec.apply_multiplier(|m| {
        let hit = masks.iter().filter(|b| *b & m != 0).count();
        pw[hit].clone()
    }))
}

/// Whole-block flips: multiplies `f̂_M` by `ρ` for every block meeting `M`
/// in an odd number of coordinates.
///
/// Agrees with [`block_noise_operator`] on singleton partitions only.
pub fn block_flip_operator<S: Scalar>(
    spec: &WalshSpectrum<S>,
    blocks: &BlockPartition,
    rho: S,
) -> Result<WalshSpectrum<S>> {
    check_rho(&rho)?;
    if blocks.n() != spec.n() {
        return Err(invalid(format!(
            "partition covers {} coordinates, spectrum has {}",
            blocks.n(),
            spec.n()
        )));
    }
    let masks = blocks.masks();
    let pw = powers(&rho, masks.len());
    Ok(spec.apply_multiplier(|m| {
        let odd = masks
            .iter()
            .filter(|b| (*b & m).count_ones() % 2 == 1)
            .count();
        pw[odd].clone()
    }))
}

/// `E[(f∘α)(g∘α′)] = Σ_M ρ^{|M|} f̂_M ĝ_M` for per-coordinate ρ-correlated
/// sign arrays.
pub fn noisy_correlation<S: Scalar>(f: &Observable<S>, g: &Observable<S>, rho: S) -> Result<S> {
    check_rho(&rho)?;
    if f.n() != g.n() {
        return Err(invalid("observables live on different dimensions"));
    }
    let fs = walsh_transform(f)?;
    let gs = walsh_transform(g)?;
    let pw = powers(&rho, f.n());
    Ok(sum(fs.coeffs().iter().zip(gs.coeffs()).enumerate().map(
        |(m, (a, b))| pw[m.count_ones() as usize].clone() * a.clone() * b.clone(),
    )))
}

/// `E √Var(f | all coordinates except m)`, i.e. half the mean absolute
/// difference of `f` under flipping coordinate `m`.
///
/// This is half of the more common "flip probability" influence.
pub fn influence<S: Scalar>(f: &Observable<S>, m: usize) -> Result<S> {
    if m >= f.n() {
        return Err(invalid(format!("coordinate {m} outside 0..{}", f.n())));
    }
    let bit = 1usize << m;
    let vals = f.values();
    // Each unordered pair is visited once; its two points carry weight 2^{-n}
    // each and the half-difference halves it again.
    let total = sum((0..vals.len())
        .filter(|w| w & bit == 0)
        .map(|w| (vals[w | bit].clone() - vals[w].clone()).abs()));
    Ok(total.div_pow2(f.n() as u32))
}

/// Sum of squared influences over all coordinates.
pub fn bks_statistic<S: Scalar>(f: &Observable<S>) -> S {
    sum((0..f.n()).map(|m| {
        let i = influence(f, m).expect("coordinate in range");
        i.clone() * i
    }))
}
