//! Finite spectral sets with their Hausdorff distance. Profiles place
//! coordinate `m` of `i` at the point `m / i`.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::walsh::{spectral_measure, walsh_transform_with, Observable};

/// Largest dyadic level for spatial cells.
pub const MAX_CELL_LEVEL: u32 = 4;
const PARSEVAL_TOLERANCE: f64 = 1e-9;
/// Masses below this fraction of `‖f‖²` are rounding noise.
const NEGLIGIBLE_MASS: f64 = 1e-12;

/// Strictly increasing finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpectralSet {
    points: Vec<f64>,
}

impl FiniteSpectralSet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return Err(invalid("spectral points must be finite"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("spectral points must be strictly increasing"));
        }
        Ok(FiniteSpectralSet { points })
    }

    pub fn empty() -> Self {
        FiniteSpectralSet { points: Vec::new() }
    }

    /// Coordinates in `mask` as the points `m / i`.
    pub fn from_mask(mask: usize, i: usize) -> Self {
        let points = (0..usize::BITS as usize)
            .filter(|m| mask >> m & 1 == 1)
            .map(|m| m as f64 / i as f64)
            .collect();
        FiniteSpectralSet { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `min_{y ∈ M} |x − y|`; `M` nonempty.
    fn distance_to(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|&y| y < x);
        let right = self.points.get(k).map_or(f64::INFINITY, |y| y - x);
        let left = k
            .checked_sub(1)
            .map_or(f64::INFINITY, |j| x - self.points[j]);
        left.min(right)
    }

    fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }
}

/// `sup_x |d(x, A) − d(x, B)|`; `1` if exactly one set is empty.
///
/// The difference of distance functions is piecewise linear with kinks at
/// the points and at midpoints of neighbours, and constant beyond the
/// extremes, so the sup is taken over those candidates.
pub fn hausdorff_distance(a: &FiniteSpectralSet, b: &FiniteSpectralSet) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 1.0,
        _ => {}
    }
    a.points
        .iter()
        .chain(&b.points)
        .copied()
        .chain(a.midpoints())
        .chain(b.midpoints())
        .map(|x| (a.distance_to(x) - b.distance_to(x)).abs())
        .fold(0.0, f64::max)
}

/// Spectral mass of `f` by cardinality and by the set of dyadic cells of
/// level `level` met by `M / i`, where `i` is the number of coordinates.
pub fn spectral_profile(f: &Observable<f64>, level: u32, limits: &Limits) -> Result<Report> {
    if level > MAX_CELL_LEVEL {
        return Err(invalid(format!(
            "cell level must be at most {MAX_CELL_LEVEL}"
        )));
    }
    let i = f.n();
    let measure = spectral_measure(&walsh_transform_with(f, limits)?);
    let norm = f.norm_sq();
    let floor = NEGLIGIBLE_MASS * norm;
    let cells = 1usize << level;
    let mut by_cells: BTreeMap<String, f64> = BTreeMap::new();
    for (mask, w) in measure.weights().iter().enumerate() {
        if *w <= floor {
            continue;
        }
        let mut hit = vec![b'0'; cells];
        for m in (0..i).filter(|m| mask >> m & 1 == 1) {
            hit[m * cells / i] = b'1';
        }
        *by_cells
            .entry(String::from_utf8(hit).expect("ascii"))
            .or_default() += w;
    }
    let mut report = Report::new("spectral_profile")
        .param("i", i)
        .param("level", level);
    report.push(Check::close(
        "parseval",
        measure.total(),
        norm,
        PARSEVAL_TOLERANCE * norm.max(1.0),
    ));
    for (k, w) in measure
        .by_cardinality()
        .into_iter()
        .enumerate()
        .filter(|(_, w)| *w > floor)
    {
        report.stat(format!("card.{k}"), w);
    }
    for (pattern, w) in by_cells {
        report.stat(format!("cells.{pattern}"), w);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[f64]) -> FiniteSpectralSet {
        FiniteSpectralSet::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(
            hausdorff_distance(&FiniteSpectralSet::empty(), &set(&[0.0])),
            1.0
        );
        assert_eq!(
            hausdorff_distance(&set(&[0.0, 0.5]), &set(&[0.0, 0.5])),
            0.0
        );
        assert_eq!(hausdorff_distance(&set(&[0.0]), &set(&[0.0, 1.0])), 1.0);
        assert_eq!(
            hausdorff_distance(&FiniteSpectralSet::empty(), &FiniteSpectralSet::empty()),
            0.0
        );
    }

    #[test]
    fn validation() {
        assert!(FiniteSpectralSet::new(vec![0.5, 0.5]).is_err());
        assert!(FiniteSpectralSet::new(vec![f64::NAN]).is_err());
        assert_eq!(FiniteSpectralSet::from_mask(0b101, 4).points(), &[0.0, 0.5]);
    }

    #[test]
    fn linear_profile() {
        let f = Observable::from_fn(8, |w| {
            w.signs().iter().map(|&s| f64::from(s)).sum::<f64>() / 8f64.sqrt()
        })
        .unwrap();
        let r = spectral_profile(&f, 1, &Limits::default()).unwrap();
        assert!(r.passed());
        assert!((r.stats["card.1"].as_f64() - 1.0).abs() < 1e-12);
        assert!((r.stats["cells.10"].as_f64() - 0.5).abs() < 1e-12);
        assert_eq!(r.stats.len(), 3);
    }
}
