//! The semigroups G1 to G3 and their actions on `[0, ∞)`.
//!
//! Products are written left to right in time order: `x.compose(&y)` is
//! "first `x`, then `y`", and acts by `(xy)(v) = y(x(v))`. Integer scalars
//! give the discrete semigroups, real scalars the continuous ones.

use std::fmt::Debug;

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Scalars for semigroup parameters: `i64`, `f64`, exact rationals.
pub trait ParamScalar: Clone + Debug + PartialOrd + Num {}

impl<T: Clone + Debug + PartialOrd + Num> ParamScalar for T {}

fn max<S: ParamScalar>(x: S, y: S) -> S {
    if y > x {
        y
    } else {
        x
    }
}

/// A semigroup with unit; composition in time order.
pub trait Semigroup: Clone + PartialEq + Debug {
    fn unit() -> Self;
    fn compose(&self, next: &Self) -> Self;

    /// Parameters in declaration order, used for serialization and reports.
    fn params(&self) -> Vec<String>;
}

/// `f_a`, an element of G1 (the additive group).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(
    from = "(S,)",
    into = "(S,)",
    bound(serialize = "S: Clone + Serialize")
)]
pub struct G1Element<S> {
    a: S,
}

/// `f_{a,b}` with `b ≥ 0`, `a + b ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "(S, S)",
    into = "(S, S)",
    bound(
        serialize = "S: Clone + Serialize",
        deserialize = "S: ParamScalar + Deserialize<'de>"
    )
)]
pub struct G2Element<S> {
    a: S,
    b: S,
}

/// `f_{a,b,c}` with `b ≥ 0`, `0 ≤ c ≤ a + b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "(S, S, S)",
    into = "(S, S, S)",
    bound(
        serialize = "S: Clone + Serialize",
        deserialize = "S: ParamScalar + Deserialize<'de>"
    )
)]
pub struct G3Element<S> {
    a: S,
    b: S,
    c: S,
}

impl<S: ParamScalar> G1Element<S> {
    pub fn new(a: S) -> Self {
        G1Element { a }
    }

    pub fn a(&self) -> &S {
        &self.a
    }
}

impl<S: ParamScalar> G2Element<S> {
    pub fn new(a: S, b: S) -> Result<Self> {
        if b < S::zero() || a.clone() + b.clone() < S::zero() {
            return Err(Error::InvariantViolation(format!(
                "G2 element needs b ≥ 0 and a+b ≥ 0, got ({a:?}, {b:?})"
            )));
        }
        Ok(G2Element { a, b })
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn b(&self) -> &S {
        &self.b
    }

    /// `f_+ = f_{1,0}`.
    pub fn f_plus() -> Self {
        G2Element {
            a: S::one(),
            b: S::zero(),
        }
    }

    /// `f_− = f_{−1,1}`.
    pub fn f_minus() -> Self {
        G2Element {
            a: S::zero() - S::one(),
            b: S::one(),
        }
    }

    /// `f_{a,b}(v) = a + max(v, b)` on `v ≥ 0`.
    pub fn act(&self, v: S) -> Result<S> {
        if v < S::zero() {
            return Err(invalid(format!("action is defined on v ≥ 0, got {v:?}")));
        }
        Ok(self.a.clone() + max(v, self.b.clone()))
    }

    pub fn project(&self) -> G1Element<S> {
        G1Element { a: self.a.clone() }
    }
}

impl<S: ParamScalar> G3Element<S> {
    pub fn new(a: S, b: S, c: S) -> Result<Self> {
        if b < S::zero() || c < S::zero() || c > a.clone() + b.clone() {
            return Err(Error::InvariantViolation(format!(
                "G3 element needs b ≥ 0 and 0 ≤ c ≤ a+b, got ({a:?}, {b:?}, {c:?})"
            )));
        }
        Ok(G3Element { a, b, c })
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn b(&self) -> &S {
        &self.b
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    /// `f_− = f_{−1,1,0}`.
    pub fn f_minus() -> Self {
        G3Element {
            a: S::zero() - S::one(),
            b: S::one(),
            c: S::zero(),
        }
    }

    /// `f_+ = f_{1,0,0}`, sticky at zero.
    pub fn f_plus() -> Self {
        G3Element {
            a: S::one(),
            b: S::zero(),
            c: S::zero(),
        }
    }

    /// `f_* = f_{1,0,1}`, the unconditional shift.
    pub fn f_star() -> Self {
        G3Element {
            a: S::one(),
            b: S::zero(),
            c: S::one(),
        }
    }

    /// `f_{a,b,c}(v) = c` for `v ≤ b`, `v + a` for `v > b`.
    pub fn act(&self, v: S) -> Result<S> {
        if v < S::zero() {
            return Err(invalid(format!("action is defined on v ≥ 0, got {v:?}")));
        }
        Ok(if v <= self.b {
            self.c.clone()
        } else {
            v + self.a.clone()
        })
    }

    pub fn project(&self) -> G2Element<S> {
        G2Element {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

impl<S: ParamScalar> Semigroup for G1Element<S> {
    fn unit() -> Self {
        G1Element { a: S::zero() }
    }

    fn compose(&self, next: &Self) -> Self {
        G1Element {
            a: self.a.clone() + next.a.clone(),
        }
    }

    fn params(&self) -> Vec<String> {
        vec![format!("{:?}", self.a)]
    }
}

impl<S: ParamScalar> Semigroup for G2Element<S> {
    fn unit() -> Self {
        G2Element {
            a: S::zero(),
            b: S::zero(),
        }
    }

    fn compose(&self, next: &Self) -> Self {
        G2Element {
            a: self.a.clone() + next.a.clone(),
            b: max(self.b.clone(), next.b.clone() - self.a.clone()),
        }
    }

    fn params(&self) -> Vec<String> {
        vec![format!("{:?}", self.a), format!("{:?}", self.b)]
    }
}

impl<S: ParamScalar> Semigroup for G3Element<S> {
    fn unit() -> Self {
        G3Element {
            a: S::zero(),
            b: S::zero(),
            c: S::zero(),
        }
    }

    fn compose(&self, next: &Self) -> Self {
        let c = if self.c > next.b {
            next.a.clone() + self.c.clone()
        } else {
            next.c.clone()
        };
        G3Element {
            a: self.a.clone() + next.a.clone(),
            b: max(self.b.clone(), next.b.clone() - self.a.clone()),
            c,
        }
    }

    fn params(&self) -> Vec<String> {
        vec![
            format!("{:?}", self.a),
            format!("{:?}", self.b),
            format!("{:?}", self.c),
        ]
    }
}

pub fn compose_g2<S: ParamScalar>(x: &G2Element<S>, y: &G2Element<S>) -> G2Element<S> {
    x.compose(y)
}

pub fn compose_g3<S: ParamScalar>(x: &G3Element<S>, y: &G3Element<S>) -> G3Element<S> {
    x.compose(y)
}

impl<S> From<(S,)> for G1Element<S> {
    fn from((a,): (S,)) -> Self {
        G1Element { a }
    }
}

impl<S> From<G1Element<S>> for (S,) {
    fn from(x: G1Element<S>) -> Self {
        (x.a,)
    }
}

impl<S: ParamScalar> TryFrom<(S, S)> for G2Element<S> {
    type Error = Error;

    fn try_from((a, b): (S, S)) -> Result<Self> {
        G2Element::new(a, b)
    }
}

impl<S> From<G2Element<S>> for (S, S) {
    fn from(x: G2Element<S>) -> Self {
        (x.a, x.b)
    }
}

impl<S: ParamScalar> TryFrom<(S, S, S)> for G3Element<S> {
    type Error = Error;

    fn try_from((a, b, c): (S, S, S)) -> Result<Self> {
        G3Element::new(a, b, c)
    }
}

impl<S> From<G3Element<S>> for (S, S, S) {
    fn from(x: G3Element<S>) -> Self {
        (x.a, x.b, x.c)
    }
}
