//! Random flows in the semigroups: exact laws by dynamic programming and
//! their closed forms. Path enumeration, the chord construction of
//! stickiness and the dyadic trap model live in submodules.
//!
//! All laws are exact rationals keyed by integer semigroup elements. The
//! standard G1 and G2 flows are run as G3 flows with `c ≡ 0` and projected.

mod path;
mod snake;
mod trap;

pub use path::{
    all_sign_paths, check_path_identities, path_identity_report, sample_path, LatticePath,
    PathIdentityReport,
};
pub use snake::{
    alive_chord_binomial_check, chord_decomposition, snake_aggregate_law, snake_c,
    snake_conditional_c, snake_element, Chord, ChordSet,
};
pub use trap::{
    trap_deviation_bound, trap_model_law, trap_path_diagnostics, trap_waiting_sample,
    TrapDiagnostics,
};

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::limits::Limits;
use crate::report::{Check, Report};
use crate::scalar::{binomial, factorial, parse_rational, Rational};
use crate::semigroup::{G1Element, G2Element, G3Element, Semigroup};

type G1 = G1Element<i64>;
type G2 = G2Element<i64>;
type G3 = G3Element<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    G1,
    G2,
    G3,
    /// Dyadic generators `g_+ = f_{1,0,1}`, `g_− = f_{−1,m,0}`.
    Trap,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g1" => Ok(Model::G1),
            "g2" => Ok(Model::G2),
            "g3" => Ok(Model::G3),
            "trap" => Ok(Model::Trap),
            other => Err(invalid(format!("unknown model {other:?}"))),
        }
    }
}

/// Step distribution: generators with positive rational probabilities
/// summing to exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    entries: Vec<(G3, Rational)>,
    /// Integer weights over a common denominator, for exact sampling.
    weights: Vec<u64>,
    scale: u64,
}

impl GeneratorSet {
    pub fn new(entries: Vec<(G3, Rational)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("generator set is empty"));
        }
        if let Some((g, p)) = entries.iter().find(|(_, p)| *p <= Rational::zero()) {
            return Err(invalid(format!(
                "generator {g:?} has non-positive probability {p}"
            )));
        }
        let total: Rational = entries.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(invalid(format!(
                "generator probabilities sum to {total}, not 1"
            )));
        }
        let den = crate::scalar::common_denominator(entries.iter().map(|(_, p)| p));
        let scale = den
            .to_u64()
            .filter(|d| *d <= 1 << 62)
            .ok_or_else(|| invalid(format!("common denominator {den} too large to sample")))?;
        let weights = entries
            .iter()
            .map(|(_, p)| {
                (p * Rational::from_integer(den.clone()))
                    .to_integer()
                    .to_u64()
                    .expect("weight ≤ scale")
            })
            .collect();
        Ok(GeneratorSet {
            entries,
            weights,
            scale,
        })
    }

    pub fn entries(&self) -> &[(G3, Rational)] {
        &self.entries
    }

    pub fn prob_of(&self, g: &G3) -> Rational {
        self.entries
            .iter()
            .filter(|(h, _)| h == g)
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// Index of a generator drawn with its exact probability.
    pub fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.random_range(0..self.scale);
        for (k, w) in self.weights.iter().enumerate() {
            if u < *w {
                return k;
            }
            u -= w;
        }
        unreachable!("weights sum to scale")
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &G3 {
        &self.entries[self.draw_index(rng)].0
    }
}

/// Generators of the standard flows.
///
/// `p` is the stickiness of G3 and is ignored otherwise; `m` is the trap
/// depth and is ignored except for [`Model::Trap`]. Zero-probability
/// generators are dropped.
pub fn standard_generators(model: Model, p: &Rational, m: i64) -> Result<GeneratorSet> {
    let half = Rational::new(1.into(), 2.into());
    let entries = match model {
        Model::G1 | Model::G2 => vec![(G3::f_minus(), half.clone()), (G3::f_plus(), half)],
        Model::G3 => {
            if *p < Rational::zero() || *p > Rational::one() {
                return Err(invalid(format!("stickiness p must lie in [0, 1], got {p}")));
            }
            let mut e = vec![(G3::f_minus(), half.clone())];
            let plus = (Rational::one() - p) * &half;
            let star = p * &half;
            if !plus.is_zero() {
                e.push((G3::f_plus(), plus));
            }
            if !star.is_zero() {
                e.push((G3::f_star(), star));
            }
            e
        }
        Model::Trap => {
            if m < 1 {
                return Err(invalid(format!("trap depth m must be ≥ 1, got {m}")));
            }
            vec![(G3::new(-1, m, 0)?, half.clone()), (G3::f_star(), half)]
        }
    };
    GeneratorSet::new(entries)
}

/// Exact law of a random semigroup element at integer time `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowLaw<E> {
    t: usize,
    probs: BTreeMap<E, Rational>,
}

impl<E: Semigroup + Ord> FlowLaw<E> {
    pub fn point_mass(t: usize, e: E) -> Self {
        FlowLaw {
            t,
            probs: BTreeMap::from([(e, Rational::one())]),
        }
    }

    /// Merges repeated keys and drops zeros; the total must be exactly one.
    pub fn from_entries(
        t: usize,
        entries: impl IntoIterator<Item = (E, Rational)>,
    ) -> Result<Self> {
        let mut probs: BTreeMap<E, Rational> = BTreeMap::new();
        for (e, p) in entries {
            if p < Rational::zero() {
                return Err(Error::InvariantViolation(format!(
                    "negative probability {p} at {e:?}"
                )));
            }
            *probs.entry(e).or_insert_with(Rational::zero) += p;
        }
        probs.retain(|_, p| !p.is_zero());
        let law = FlowLaw { t, probs };
        if !law.total().is_one() {
            return Err(Error::InvariantViolation(format!(
                "law sums to {}, not 1",
                law.total()
            )));
        }
        Ok(law)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, e: &E) -> Rational {
        self.probs.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, &Rational)> {
        self.probs.iter()
    }

    pub fn total(&self) -> Rational {
        self.probs.values().cloned().sum()
    }

    /// Law of `x y` for independent `x ~ self`, `y ~ other`.
    pub fn convolve(&self, other: &Self, limits: &Limits) -> Result<Self> {
        limits.check_support("convolution pairs", self.len().saturating_mul(other.len()))?;
        let mut probs: BTreeMap<E, Rational> = BTreeMap::new();
        for (x, p) in &self.probs {
            for (y, q) in &other.probs {
                *probs.entry(x.compose(y)).or_insert_with(Rational::zero) += p * q;
            }
        }
        Ok(FlowLaw {
            t: self.t + other.t,
            probs,
        })
    }

    pub fn push_forward<F: Semigroup + Ord>(&self, f: impl Fn(&E) -> F) -> FlowLaw<F> {
        let mut probs: BTreeMap<F, Rational> = BTreeMap::new();
        for (e, p) in &self.probs {
            *probs.entry(f(e)).or_insert_with(Rational::zero) += p;
        }
        FlowLaw { t: self.t, probs }
    }

    /// Keys where the two laws differ, with both probabilities.
    pub fn differences<'a>(&'a self, other: &'a Self) -> Vec<(&'a E, Rational, Rational)> {
        let mut keys: Vec<&E> = self.probs.keys().chain(other.probs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter_map(|e| {
                let (p, q) = (self.prob(e), other.prob(e));
                (p != q).then_some((e, p, q))
            })
            .collect()
    }
}

impl FlowLaw<G3> {
    pub fn project(&self) -> FlowLaw<G2> {
        self.push_forward(G3::project)
    }

    /// `P(c = ·, a, b)` jointly with the marginal `P(a, b)`.
    pub fn c_given_ab(&self) -> BTreeMap<(i64, i64), BTreeMap<i64, Rational>> {
        let mut out: BTreeMap<(i64, i64), BTreeMap<i64, Rational>> = BTreeMap::new();
        for (e, p) in &self.probs {
            *out.entry((*e.a(), *e.b()))
                .or_default()
                .entry(*e.c())
                .or_insert_with(Rational::zero) += p;
        }
        out
    }

    /// `{"t", "entries": [{"a", "b", "c", "num", "den"}]}`.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .probs
            .iter()
            .map(|(e, p)| {
                json!({"a": e.a(), "b": e.b(), "c": e.c(),
                       "num": p.numer().to_string(), "den": p.denom().to_string()})
            })
            .collect();
        json!({"t": self.t, "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| invalid(format!("flow law JSON: {what}"));
        let t = v["t"].as_u64().ok_or_else(|| bad("missing t"))? as usize;
        let entries = v["entries"]
            .as_array()
            .ok_or_else(|| bad("missing entries"))?;
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let coord = |k: &str| {
                e[k].as_i64()
                    .ok_or_else(|| bad(&format!("missing integer {k}")))
            };
            let text = |k: &str| {
                e[k].as_str()
                    .ok_or_else(|| bad(&format!("missing string {k}")))
            };
            let p = parse_rational(&format!("{}/{}", text("num")?, text("den")?))?;
            out.push((G3::new(coord("a")?, coord("b")?, coord("c")?)?, p));
        }
        FlowLaw::from_entries(t, out)
    }
}

impl FlowLaw<G2> {
    pub fn project(&self) -> FlowLaw<G1> {
        self.push_forward(G2::project)
    }
}

/// Law of the product of `t` independent steps drawn from `gens`.
pub fn flow_law(gens: &GeneratorSet, t: usize) -> Result<FlowLaw<G3>> {
    flow_law_with(gens, t, &Limits::default())
}

pub fn flow_law_with(gens: &GeneratorSet, t: usize, limits: &Limits) -> Result<FlowLaw<G3>> {
    let mut law = FlowLaw::point_mass(0, G3::unit());
    for _ in 0..t {
        let mut next: BTreeMap<G3, Rational> = BTreeMap::new();
        for (x, p) in &law.probs {
            for (g, q) in &gens.entries {
                *next.entry(x.compose(g)).or_insert_with(Rational::zero) += p * q;
            }
        }
        limits.check_support("flow law support", next.len())?;
        law = FlowLaw {
            t: law.t + 1,
            probs: next,
        };
    }
    Ok(law)
}

fn pow2(t: usize) -> BigInt {
    BigInt::one() << t
}

/// `P(a(0,t) = a) = 2^{−t} C(t, (t+a)/2)`.
pub fn g1_prob(t: usize, a: i64) -> Rational {
    let t = t as i64;
    if (t + a) % 2 != 0 || a.abs() > t {
        return Rational::zero();
    }
    Rational::new(binomial(t, (t + a) / 2), pow2(t as usize))
}

/// `P(a(0,t) = a, b(0,t) = b) = (a+2b+1) 2^{−t} t! / (((t+a)/2+b+1)! ((t−a)/2−b)!)`.
pub fn g2_prob(t: usize, a: i64, b: i64) -> Rational {
    let tt = t as i64;
    if (tt + a) % 2 != 0 || b < 0 || a + b < 0 || (tt - a) / 2 - b < 0 {
        return Rational::zero();
    }
    let num = BigInt::from(a + 2 * b + 1) * factorial(tt);
    let den = pow2(t) * factorial((tt + a) / 2 + b + 1) * factorial((tt - a) / 2 - b);
    Rational::new(num, den)
}

/// `g2_prob` times `p (1−p)^{a+b−c}` for `c > 0`, or `(1−p)^{a+b}` for `c = 0`.
pub fn g3_prob(t: usize, a: i64, b: i64, c: i64, p: &Rational) -> Rational {
    if c < 0 || c > a + b {
        return Rational::zero();
    }
    g2_prob(t, a, b) * truncated_geometric(a + b, p)[c as usize].clone()
}

/// Law of `max(0, s − G + 1)`, `G ~ Geom(p)` on `{1, 2, …}`, indexed by
/// value `0..=s`.
pub fn truncated_geometric(s: i64, p: &Rational) -> Vec<Rational> {
    let q = Rational::one() - p;
    let s = s.max(0) as usize;
    let mut out = vec![Rational::zero(); s + 1];
    let mut qk = Rational::one();
    for k in 0..s {
        out[s - k] = p * &qk;
        qk *= &q;
    }
    out[0] += qk;
    out
}

pub fn closed_form_g1(t: usize) -> FlowLaw<G1> {
    let tt = t as i64;
    let probs = (0..=tt).map(|k| {
        let a = 2 * k - tt;
        (G1::new(a), g1_prob(t, a))
    });
    FlowLaw {
        t,
        probs: probs.collect(),
    }
}

fn g2_support(t: usize) -> impl Iterator<Item = (i64, i64)> {
    let tt = t as i64;
    (0..=tt).flat_map(move |k| {
        let a = 2 * k - tt;
        ((-a).max(0)..=(tt - a) / 2).map(move |b| (a, b))
    })
}

pub fn closed_form_g2(t: usize) -> FlowLaw<G2> {
    let probs = g2_support(t).map(|(a, b)| (G2::new(a, b).expect("in support"), g2_prob(t, a, b)));
    FlowLaw {
        t,
        probs: probs.collect(),
    }
}

pub fn closed_form_g3(t: usize, p: &Rational) -> Result<FlowLaw<G3>> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(invalid(format!("stickiness p must lie in [0, 1], got {p}")));
    }
    let mut probs = BTreeMap::new();
    for (a, b) in g2_support(t) {
        let base = g2_prob(t, a, b);
        for (c, w) in truncated_geometric(a + b, p).into_iter().enumerate() {
            if !w.is_zero() {
                probs.insert(G3::new(a, b, c as i64)?, &base * w);
            }
        }
    }
    Ok(FlowLaw { t, probs })
}

/// A closed-form law in the semigroup its model lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelLaw {
    G1(FlowLaw<G1>),
    G2(FlowLaw<G2>),
    G3(FlowLaw<G3>),
}

pub fn closed_form_law(model: Model, t: usize, p: &Rational) -> Result<ModelLaw> {
    Ok(match model {
        Model::G1 => ModelLaw::G1(closed_form_g1(t)),
        Model::G2 => ModelLaw::G2(closed_form_g2(t)),
        Model::G3 => ModelLaw::G3(closed_form_g3(t, p)?),
        Model::Trap => return Err(invalid("the trap model has no closed-form law")),
    })
}

fn law_check<E: Semigroup + Ord>(
    report: &mut Report,
    id: String,
    dp: &FlowLaw<E>,
    exact: &FlowLaw<E>,
) {
    let diffs = dp.differences(exact);
    if let Some((e, p, q)) = diffs.first() {
        report.push(Check::exact(
            format!("{id}.first_mismatch.{}", e.params().join(":")),
            p.clone(),
            q.clone(),
        ));
    }
    report.push(Check::equal_counts(
        format!("{id}.mismatched_atoms"),
        diffs.len() as i64,
        0,
    ));
}

/// DP laws against the closed forms for every model and each `p` in `ps`,
/// plus projection and convolution consistency.
pub fn verify_flow_laws(t: usize, ps: &[Rational], limits: &Limits) -> Result<Report> {
    let mut report = Report::new("flows")
        .param("t", t)
        .param("p", ps.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    let std2 = flow_law_with(
        &standard_generators(Model::G2, &Rational::zero(), 1)?,
        t,
        limits,
    )?;
    let g2 = std2.project();
    law_check(
        &mut report,
        format!("g1.t{t}"),
        &g2.project(),
        &closed_form_g1(t),
    );
    law_check(&mut report, format!("g2.t{t}"), &g2, &closed_form_g2(t));
    for p in ps {
        let gens = standard_generators(Model::G3, p, 1)?;
        let dp = flow_law_with(&gens, t, limits)?;
        law_check(
            &mut report,
            format!("g3.p{p}.t{t}"),
            &dp,
            &closed_form_g3(t, p)?,
        );
        law_check(
            &mut report,
            format!("g3.p{p}.projection"),
            &dp.project(),
            &g2,
        );
        let (t1, t2) = (t / 2, t - t / 2);
        let conv = flow_law_with(&gens, t1, limits)?
            .convolve(&flow_law_with(&gens, t2, limits)?, limits)?;
        law_check(
            &mut report,
            format!("g3.p{p}.convolution.{t1}+{t2}"),
            &conv,
            &dp,
        );
    }
    report.stat("support.g2", g2.len());
    Ok(report)
}

/// Conditional law of `c` given `(a, b)` from the DP, against the truncated
/// geometric law, for every `(a, b)` in the support.
pub fn conditional_c_law(t: usize, p: &Rational, limits: &Limits) -> Result<Report> {
    limits.check_exhaustive("conditional c law horizon", t)?;
    let law = flow_law_with(&standard_generators(Model::G3, p, 1)?, t, limits)?;
    let mut report = Report::new("conditional_c")
        .param("t", t)
        .param("p", p.to_string());
    let mut mismatches = 0usize;
    let table = law.c_given_ab();
    for ((a, b), cs) in &table {
        let marginal: Rational = cs.values().cloned().sum();
        let target = truncated_geometric(a + b, p);
        for (c, w) in target.iter().enumerate() {
            let got = cs.get(&(c as i64)).cloned().unwrap_or_else(Rational::zero) / &marginal;
            if &got != w {
                mismatches += 1;
                report.push(Check::exact(
                    format!("c.t{t}.a{a}.b{b}.c{c}"),
                    got,
                    w.clone(),
                ));
            }
        }
        if cs.keys().any(|c| *c < 0 || *c > a + b) {
            mismatches += 1;
        }
    }
    report.push(Check::equal_counts(
        format!("c.t{t}.mismatches"),
        mismatches as i64,
        0,
    ));
    report.stat("pairs", table.len());
    Ok(report)
}

/// Exact law of `a + 2b`, the G2 radial statistic, from the closed form.
pub fn g2_radial_law(t: usize) -> BTreeMap<i64, Rational> {
    let mut out = BTreeMap::new();
    for (a, b) in g2_support(t) {
        *out.entry(a + 2 * b).or_insert_with(Rational::zero) += g2_prob(t, a, b);
    }
    out
}

pub(crate) fn rational_weight(p: &Rational, q: &Rational, k: usize, n: usize) -> Rational {
    num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), n - k)
}

/// `C(n, k) p^k (1−p)^{n−k}` for `k = 0..=n`.
pub fn binomial_pmf(n: usize, p: &Rational) -> Vec<Rational> {
    let q = Rational::one() - p;
    (0..=n)
        .map(|k| {
            Rational::from_integer(binomial(n as i64, k as i64)) * rational_weight(p, &q, k, n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn g2(a: i64, b: i64) -> G2 {
        G2::new(a, b).unwrap()
    }

    fn g3(a: i64, b: i64, c: i64) -> G3 {
        G3::new(a, b, c).unwrap()
    }

    #[test]
    fn generator_sets() {
        let g = standard_generators(Model::G2, &rat(0, 1), 1).unwrap();
        assert_eq!(g.entries().len(), 2);
        assert!(g.entries().iter().all(|(_, p)| *p == rat(1, 2)));
        let g = standard_generators(Model::G3, &rat(1, 2), 1).unwrap();
        assert_eq!(g.prob_of(&G3::f_star()), rat(1, 4));
        assert_eq!(g.prob_of(&G3::f_plus()), rat(1, 4));
        let trap = standard_generators(Model::Trap, &rat(0, 1), 1).unwrap();
        assert_eq!(trap.prob_of(&G3::f_minus()), rat(1, 2));
        assert!(standard_generators(Model::Trap, &rat(0, 1), 0).is_err());
        assert!(standard_generators(Model::G3, &rat(3, 2), 1).is_err());
        assert_eq!(
            standard_generators(Model::G3, &rat(0, 1), 1)
                .unwrap()
                .entries()
                .len(),
            2
        );
        assert!(GeneratorSet::new(vec![(G3::f_plus(), rat(1, 3))]).is_err());
        assert_eq!("G3".parse::<Model>().unwrap(), Model::G3);
    }

    #[test]
    fn small_laws() {
        let g = standard_generators(Model::G2, &rat(0, 1), 1).unwrap();
        assert_eq!(flow_law(&g, 0).unwrap(), FlowLaw::point_mass(0, G3::unit()));
        let two = flow_law(&g, 2).unwrap().project();
        for (a, b) in [(2, 0), (0, 1), (0, 0), (-2, 2)] {
            assert_eq!(two.prob(&g2(a, b)), rat(1, 4));
        }
        assert_eq!(two.len(), 4);
        let g = standard_generators(Model::G3, &rat(1, 2), 1).unwrap();
        assert_eq!(flow_law(&g, 2).unwrap().prob(&g3(2, 0, 2)), rat(1, 8));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(g1_prob(2, 0), rat(1, 2));
        assert_eq!(g2_prob(2, 2, 0), rat(1, 4));
        let p = rat(1, 3);
        assert_eq!(g3_prob(1, 1, 0, 0, &p), (rat(1, 1) - &p) / rat(2, 1));
        assert_eq!(closed_form_g1(5).total(), rat(1, 1));
        assert_eq!(closed_form_g2(7).total(), rat(1, 1));
        assert_eq!(closed_form_g3(6, &p).unwrap().total(), rat(1, 1));
        assert!(closed_form_law(Model::Trap, 2, &p).is_err());
    }

    #[test]
    fn truncated_geometric_law() {
        let p = rat(1, 3);
        assert_eq!(truncated_geometric(0, &p), vec![rat(1, 1)]);
        let w = truncated_geometric(2, &p);
        assert_eq!(w, vec![rat(4, 9), rat(2, 9), rat(1, 3)]);
    }

    #[test]
    fn dp_matches_closed_forms_small() {
        let report = verify_flow_laws(6, &[rat(1, 2), rat(1, 3)], &Limits::default()).unwrap();
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn conditional_law_small() {
        let r = conditional_c_law(5, &rat(2, 7), &Limits::default()).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let caps = Limits {
            exhaustive_t: 4,
            ..Limits::default()
        };
        assert!(matches!(
            conditional_c_law(5, &rat(1, 2), &caps),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let caps = Limits {
            support_cap: 5,
            ..Limits::default()
        };
        let g = standard_generators(Model::G3, &rat(1, 2), 1).unwrap();
        assert!(matches!(
            flow_law_with(&g, 6, &caps),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = standard_generators(Model::G3, &rat(1, 3), 1).unwrap();
        let law = flow_law(&g, 3).unwrap();
        let v = law.to_json();
        assert_eq!(v["t"], json!(3));
        assert_eq!(FlowLaw::from_json(&v).unwrap(), law);
        let mut broken = v.clone();
        broken["entries"][0]["num"] = json!("0");
        assert!(FlowLaw::from_json(&broken).is_err());
    }

    #[test]
    fn radial_law_sums_to_one() {
        let law = g2_radial_law(9);
        assert_eq!(law.values().cloned().sum::<Rational>(), rat(1, 1));
        assert!(law.keys().all(|u| *u >= 0));
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let pmf = binomial_pmf(4, &rat(1, 3));
        assert_eq!(pmf[0], rat(16, 81));
        assert_eq!(pmf.iter().cloned().sum::<Rational>(), rat(1, 1));
    }
}
