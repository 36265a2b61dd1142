//! Chords under a walk path and the independent chord selection that
//! produces the sticky coordinate `c`.
//!
//! Every up-step `s` opens a chord at level `a(0,s)` that closes at the
//! first return to that level. Chords still open at the horizon are alive;
//! their levels are exactly `min a, …, a(0,t) − 1`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{all_sign_paths, binomial_pmf, rational_weight, FlowLaw, LatticePath, G3};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::scalar::Rational;
use crate::semigroup::Semigroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chord {
    pub start: usize,
    /// First return to `level`; `None` if the level is not revisited by the
    /// horizon.
    pub end: Option<usize>,
    pub level: i64,
}

impl Chord {
    pub fn is_alive(&self) -> bool {
        self.end.is_none()
    }
}

/// Chords of one path, ordered by start, with a selection flag each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordSet {
    horizon: usize,
    chords: Vec<Chord>,
    selected: Vec<bool>,
}

impl ChordSet {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn selected(&self) -> &[bool] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn with_selection(mut self, selected: Vec<bool>) -> Result<Self> {
        if selected.len() != self.chords.len() {
            return Err(Error::InvalidParameter(format!(
                "selection has {} flags for {} chords",
                selected.len(),
                self.chords.len()
            )));
        }
        self.selected = selected;
        Ok(self)
    }

    /// Selection from the low bits of `mask`, bit `j` for chord `j`.
    pub fn with_mask(self, mask: u64) -> Self {
        let selected = (0..self.chords.len()).map(|j| mask >> j & 1 == 1).collect();
        ChordSet { selected, ..self }
    }

    /// Levels of alive chords, ascending.
    pub fn alive_levels(&self) -> Vec<i64> {
        let mut levels: Vec<i64> = self
            .chords
            .iter()
            .filter(|c| c.is_alive())
            .map(|c| c.level)
            .collect();
        levels.sort_unstable();
        levels
    }

    pub fn selected_alive(&self) -> usize {
        self.chords
            .iter()
            .zip(&self.selected)
            .filter(|(c, s)| **s && c.is_alive())
            .count()
    }
}

pub fn chord_decomposition(path: &LatticePath) -> ChordSet {
    let a = path.a_values();
    let mut next_visit: HashMap<i64, usize> = HashMap::new();
    let mut chords = Vec::new();
    for s in (0..a.len()).rev() {
        if s < path.t() && path.is_up(s) {
            chords.push(Chord {
                start: s,
                end: next_visit.get(&a[s]).copied(),
                level: a[s],
            });
        }
        next_visit.insert(a[s], s);
    }
    chords.reverse();
    let selected = vec![false; chords.len()];
    ChordSet {
        horizon: path.t(),
        chords,
        selected,
    }
}

/// Product of the path's steps with each up-step replaced by `f_*` if its
/// chord is selected and by `f_+` otherwise.
pub fn snake_element(path: &LatticePath, chords: &ChordSet) -> G3 {
    let mut flags = vec![false; path.t()];
    for (c, s) in chords.chords.iter().zip(&chords.selected) {
        flags[c.start] = *s;
    }
    (0..path.t()).fold(G3::unit(), |acc, s| {
        let step = match (path.is_up(s), flags[s]) {
            (false, _) => G3::f_minus(),
            (true, false) => G3::f_plus(),
            (true, true) => G3::f_star(),
        };
        acc.compose(&step)
    })
}

/// `c = a − min(a, lowest selected alive level)`.
pub fn snake_c(path: &LatticePath, chords: &ChordSet) -> i64 {
    let a = path.a_values()[path.t()];
    let lowest = chords
        .chords
        .iter()
        .zip(&chords.selected)
        .filter(|(c, s)| **s && c.is_alive())
        .map(|(c, _)| c.level)
        .min();
    a - lowest.map_or(a, |x| x.min(a))
}

/// Law of `c` given the path when each chord is selected independently with
/// probability `p`.
pub fn snake_conditional_c(path: &LatticePath, p: &Rational) -> BTreeMap<i64, Rational> {
    let a = path.a_values()[path.t()];
    let levels = chord_decomposition(path).alive_levels();
    let q = Rational::one() - p;
    let mut out = BTreeMap::new();
    let mut none_yet = Rational::one();
    for x in levels {
        let w = &none_yet * p;
        if !w.is_zero() {
            *out.entry(a - x).or_insert_with(Rational::zero) += w;
        }
        none_yet *= &q;
    }
    if !none_yet.is_zero() {
        *out.entry(0).or_insert_with(Rational::zero) += none_yet;
    }
    out
}

/// Average of [`snake_conditional_c`] over all `2^t` equally likely walk
/// paths, as a law on G3.
pub fn snake_aggregate_law(t: usize, p: &Rational, limits: &Limits) -> Result<FlowLaw<G3>> {
    limits.check_exhaustive("snake aggregate horizon", t)?;
    let path_weight = Rational::new(1.into(), num_bigint::BigInt::one() << t);
    let mut entries = Vec::new();
    for path in all_sign_paths(t) {
        let xi = path.element();
        for (c, w) in snake_conditional_c(&path, p) {
            entries.push((G3::new(*xi.a(), *xi.b(), c)?, &path_weight * w));
        }
    }
    FlowLaw::from_entries(t, entries)
}

/// Over every path and every chord selection: the formula for `c` agrees
/// with composition, and the number of selected alive chords is
/// Binomial(`a + b`, `p`) given the path.
pub fn alive_chord_binomial_check(t: usize, p: &Rational, limits: &Limits) -> Result<Report> {
    limits.check_exhaustive("chord selection horizon", t)?;
    let q = Rational::one() - p;
    let mut report = Report::new("snake").param("t", t).param("p", p.to_string());
    let (mut formula_mismatch, mut law_mismatch, mut alive_mismatch) = (0i64, 0i64, 0i64);
    let mut selections = 0u64;
    for path in all_sign_paths(t) {
        let chords = chord_decomposition(&path);
        let xi = path.element();
        let alive = chords.alive_levels().len();
        if alive as i64 != xi.a() + xi.b() {
            alive_mismatch += 1;
        }
        let mut count_law = vec![Rational::zero(); alive + 1];
        for mask in 0u64..1 << chords.len() {
            let sel = chords.clone().with_mask(mask);
            let w = rational_weight(p, &q, mask.count_ones() as usize, chords.len());
            count_law[sel.selected_alive()] += w;
            if *snake_element(&path, &sel).c() != snake_c(&path, &sel) {
                formula_mismatch += 1;
            }
            selections += 1;
        }
        if count_law != binomial_pmf(alive, p) {
            law_mismatch += 1;
        }
    }
    report.push(Check::equal_counts(
        format!("t{t}.alive_count_is_a_plus_b"),
        alive_mismatch,
        0,
    ));
    report.push(Check::equal_counts(
        format!("t{t}.c_formula_vs_composition"),
        formula_mismatch,
        0,
    ));
    report.push(Check::equal_counts(
        format!("t{t}.alive_binomial"),
        law_mismatch,
        0,
    ));
    report.stat("selections", selections as i64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::{flow_law, standard_generators, Model};
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn single_chord() {
        let p = LatticePath::from_signs(&[1, -1]).unwrap();
        let cs = chord_decomposition(&p);
        assert_eq!(
            cs.chords(),
            &[Chord {
                start: 0,
                end: Some(2),
                level: 0
            }]
        );
        assert!(cs.alive_levels().is_empty());
    }

    #[test]
    fn decreasing_path_has_no_chords() {
        let p = LatticePath::from_signs(&[-1, -1, -1]).unwrap();
        assert!(chord_decomposition(&p).is_empty());
    }

    #[test]
    fn alive_levels_span_min_to_top() {
        let p = LatticePath::from_signs(&[-1, -1, 1, 1, 1, -1, 1, 1]).unwrap();
        let cs = chord_decomposition(&p);
        assert_eq!(cs.alive_levels(), vec![-2, -1, 0, 1]);
        for c in cs.chords() {
            if let Some(end) = c.end {
                assert!(c.start < end);
                assert_eq!(p.a_values()[end], c.level);
                assert!((c.start + 1..end).all(|u| p.a_values()[u] > c.level));
            }
        }
    }

    #[test]
    fn chord_count_bounded_by_up_steps() {
        for t in 0..=10 {
            for path in all_sign_paths(t) {
                let ups = (0..t).filter(|&s| path.is_up(s)).count();
                let cs = chord_decomposition(&path);
                assert!(cs.len() <= ups);
                let mut starts: Vec<usize> = cs.chords().iter().map(|c| c.start).collect();
                starts.dedup();
                assert_eq!(starts.len(), cs.len());
            }
        }
    }

    #[test]
    fn extreme_selection_probabilities() {
        let path = LatticePath::from_signs(&[-1, 1, 1, -1, 1]).unwrap();
        assert_eq!(
            snake_conditional_c(&path, &rat(0, 1)),
            BTreeMap::from([(0, rat(1, 1))])
        );
        let xi = path.element();
        let c = xi.a() + xi.b();
        assert_eq!(
            snake_conditional_c(&path, &rat(1, 1)),
            BTreeMap::from([(c, rat(1, 1))])
        );
    }

    #[test]
    fn aggregate_matches_flow_small() {
        let p = rat(2, 5);
        let lhs = snake_aggregate_law(6, &p, &Limits::default()).unwrap();
        let rhs = flow_law(&standard_generators(Model::G3, &p, 1).unwrap(), 6).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn binomial_check_small() {
        let r = alive_chord_binomial_check(6, &rat(1, 3), &Limits::default()).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn selection_length_is_validated() {
        let cs = chord_decomposition(&LatticePath::from_signs(&[1, 1]).unwrap());
        assert!(cs.clone().with_selection(vec![true]).is_err());
        assert!(cs.with_selection(vec![true, false]).is_ok());
    }
}
