//! The discrete coalescing web on a circle. Submodules hold the trapped
//! chains and the correlation bound for blocked cells.
//!
//! Signs live on the sublattice `{(t, x) : t + x even}` of
//! `{0, …, T−1} × Z/NZ` with `N` even; the walker at `(t, x)` moves to
//! `x + sign(t, x)`. Walkers that meet share all later signs and so never
//! separate.

mod chain;
mod lemma74;

pub use chain::{
    halfdiff_chain_law, resampling_correlation, resampling_identities, theorem79_check,
    theorem79_rhs, trapped_chain_law, zero_inclusion_prob, zero_set_average,
    zero_spectral_identity, ChainLaw, SubsetMode, TrapSchedule, MAX_CHAIN_STEPS,
};
pub use lemma74::{
    lemma74_bound_check, lemma74_random_suite, projection_norm_sq, random_instance,
    tightness_instance, CellInstance,
};

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::limits::Limits;
use crate::scalar::Rational;

/// Independent signs on the parity sublattice of a `T × N` space-time
/// circle; row `t` holds the `N/2` signs at `x ≡ t (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignField {
    horizon: usize,
    circumference: usize,
    signs: Vec<i8>,
}

fn check_circumference(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(invalid(format!(
            "circumference must be even and ≥ 2, got {n}"
        )));
    }
    Ok(())
}

impl SignField {
    pub fn new(horizon: usize, circumference: usize, signs: Vec<i8>) -> Result<Self> {
        check_circumference(circumference)?;
        if signs.len() != horizon * circumference / 2 {
            return Err(invalid(format!(
                "field needs {} signs, got {}",
                horizon * circumference / 2,
                signs.len()
            )));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(invalid("field signs must be ±1"));
        }
        Ok(SignField {
            horizon,
            circumference,
            signs,
        })
    }

    pub fn constant(horizon: usize, circumference: usize, sign: i8) -> Result<Self> {
        SignField::new(
            horizon,
            circumference,
            vec![sign; horizon * circumference / 2],
        )
    }

    /// Bit `k` of `bits` set means sign `k` (row-major) is `+1`.
    pub fn from_bits(horizon: usize, circumference: usize, bits: u64) -> Result<Self> {
        let len = horizon * circumference / 2;
        if len > 64 {
            return Err(invalid(format!(
                "{len} signs do not fit in a 64-bit pattern"
            )));
        }
        let signs = (0..len)
            .map(|k| if bits >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        SignField::new(horizon, circumference, signs)
    }

    pub fn random<R: Rng + ?Sized>(
        horizon: usize,
        circumference: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_circumference(circumference)?;
        let signs = (0..horizon * circumference / 2)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        SignField::new(horizon, circumference, signs)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn circumference(&self) -> usize {
        self.circumference
    }

    /// Sign at `(t, x)`; `x` must have the parity of `t`.
    pub fn sign(&self, t: usize, x: usize) -> i8 {
        debug_assert_eq!((t + x) % 2, 0);
        self.signs[t * self.circumference / 2 + (x % self.circumference) / 2]
    }
}

/// Map from the sites of one parity class to the sites of another, on a
/// circle of even circumference; `images[j]` is the image of site
/// `domain_parity + 2j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WebMap {
    circumference: usize,
    domain_parity: usize,
    image_parity: usize,
    images: Vec<usize>,
}

impl WebMap {
    pub fn identity(circumference: usize, parity: usize) -> Result<Self> {
        check_circumference(circumference)?;
        let parity = parity % 2;
        let images = (0..circumference / 2).map(|j| parity + 2 * j).collect();
        Ok(WebMap {
            circumference,
            domain_parity: parity,
            image_parity: parity,
            images,
        })
    }

    pub fn circumference(&self) -> usize {
        self.circumference
    }

    pub fn domain_parity(&self) -> usize {
        self.domain_parity
    }

    pub fn image_parity(&self) -> usize {
        self.image_parity
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of any residue; off-parity starts are rounded down to the
    /// domain parity.
    pub fn apply(&self, x: usize) -> usize {
        lookup(
            &self.images,
            self.domain_parity,
            self.circumference,
            x % self.circumference,
        )
    }

    /// `x ↦ next(self(x))`.
    pub fn compose(&self, next: &WebMap) -> Result<WebMap> {
        if self.circumference != next.circumference {
            return Err(invalid(format!(
                "maps live on circles of circumference {} and {}",
                self.circumference, next.circumference
            )));
        }
        if self.image_parity != next.domain_parity {
            return Err(Error::ParityMismatch {
                left: self.image_parity,
                right: next.domain_parity,
            });
        }
        let images = self.images.iter().map(|&y| next.apply(y)).collect();
        Ok(WebMap {
            circumference: self.circumference,
            domain_parity: self.domain_parity,
            image_parity: next.image_parity,
            images,
        })
    }

    /// Number of distinct image points.
    pub fn critical_count(&self) -> usize {
        self.images.iter().collect::<BTreeSet<_>>().len()
    }

    /// Left critical points with their values: domain sites `x` whose
    /// image differs from that of the next site `x + 2`. Empty for a
    /// constant map.
    pub fn critical_points(&self) -> Vec<(usize, usize)> {
        let half = self.images.len();
        (0..half)
            .filter(|&j| self.images[j] != self.images[(j + 1) % half])
            .map(|j| (self.domain_parity + 2 * j, self.images[j]))
            .collect()
    }

    /// Cyclic monotonicity: walking once around the domain, the images
    /// advance in total by exactly one turn (or not at all, for a constant
    /// map).
    pub fn is_cyclically_monotone(&self) -> bool {
        let n = self.circumference;
        let half = self.images.len();
        let advance: usize = (0..half)
            .map(|j| (self.images[(j + 1) % half] + n - self.images[j]) % n)
            .sum();
        advance == n || (advance == 0 && self.critical_count() == 1)
    }
}

/// `ξ_{s,t}`: every site of parity `s` at time `s` follows the field until
/// time `t`.
pub fn evolve_web(field: &SignField, s: usize, t: usize) -> Result<WebMap> {
    if s > t || t > field.horizon {
        return Err(invalid(format!(
            "need 0 ≤ s ≤ t ≤ {}, got s={s}, t={t}",
            field.horizon
        )));
    }
    let n = field.circumference;
    let mut images = vec![0; n / 2];
    evolve_into(field, s, t, &mut images);
    Ok(WebMap {
        circumference: n,
        domain_parity: s % 2,
        image_parity: t % 2,
        images,
    })
}

/// Image of site `x < n` under a map with the given images and domain parity.
#[inline]
fn lookup(images: &[usize], domain_parity: usize, n: usize, x: usize) -> usize {
    debug_assert!(x < n);
    // Off-parity sites round down; site 0 rounds down to `n − 1`.
    let x = if x & 1 == domain_parity {
        x
    } else if x == 0 {
        n - 1
    } else {
        x - 1
    };
    images[x >> 1]
}

/// Moves every walker in `images` through rows `from..to`.
#[inline]
fn advance(field: &SignField, from: usize, to: usize, images: &mut [usize]) {
    let n = field.circumference;
    let half = n / 2;
    for u in from..to {
        let row = &field.signs[u * half..(u + 1) * half];
        for x in images.iter_mut() {
            *x = if row[*x >> 1] > 0 {
                if *x + 1 == n {
                    0
                } else {
                    *x + 1
                }
            } else if *x == 0 {
                n - 1
            } else {
                *x - 1
            };
        }
    }
}

/// Images of `ξ_{s,t}` written into `images` (length `N/2`).
fn evolve_into(field: &SignField, s: usize, t: usize, images: &mut [usize]) {
    for (j, x) in images.iter_mut().enumerate() {
        *x = s % 2 + 2 * j;
    }
    advance(field, s, t, images);
}

pub fn compose_maps(f: &WebMap, g: &WebMap) -> Result<WebMap> {
    f.compose(g)
}

pub fn critical_count(map: &WebMap) -> usize {
    map.critical_count()
}

/// Checks `ξ_{r,s} ξ_{s,t} = ξ_{r,t}` for every `0 ≤ r ≤ s ≤ t ≤ T`.
pub fn flow_property_holds(field: &SignField) -> Result<bool> {
    let horizon = field.horizon;
    for r in 0..=horizon {
        for t in r..=horizon {
            let direct = evolve_web(field, r, t)?;
            for s in r..=t {
                if evolve_web(field, r, s)?.compose(&evolve_web(field, s, t)?)? != direct {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Checks `ξ_{r,s} ξ_{s,t} = ξ_{r,t}` for every `0 ≤ r ≤ s ≤ t ≤ T`, on
/// every one of the `2^{T N / 2}` fields. Returns the number of fields
/// checked and the number of failures.
///
/// Fields are enumerated row by row, so every triple with `t = u` is
/// checked once per choice of rows `0..u`; a failure there is counted for
/// every completion of those rows.
pub fn flow_property_exhaustive(
    horizon: usize,
    circumference: usize,
    limits: &Limits,
) -> Result<(u64, u64)> {
    check_circumference(circumference)?;
    let bits = horizon * circumference / 2;
    limits.check_dense(bits)?;
    let mut walk = RowWalk {
        field: SignField::constant(horizon, circumference, 1)?,
        levels: (0..=horizon)
            .map(|u| vec![0; (u + 1) * circumference / 2])
            .collect(),
        failures: 0,
    };
    walk.levels[0].copy_from_slice(&WebMap::identity(circumference, 0)?.images);
    walk.visit(0);
    Ok((1 << bits, walk.failures))
}

/// Depth-first enumeration state: `levels[u]` holds the images of
/// `ξ_{s,u}` for `s = 0..=u`, valid for the rows fixed so far.
struct RowWalk {
    field: SignField,
    levels: Vec<Vec<usize>>,
    failures: u64,
}

impl RowWalk {
    fn visit(&mut self, u: usize) {
        let (horizon, n) = (self.field.horizon, self.field.circumference);
        if u == horizon {
            return;
        }
        let half = n / 2;
        let t = u + 1;
        for pattern in 0u64..1 << half {
            for (k, sign) in self.field.signs[u * half..t * half].iter_mut().enumerate() {
                *sign = if pattern >> k & 1 == 1 { 1 } else { -1 };
            }
            let (done, rest) = self.levels.split_at_mut(t);
            let next = &mut rest[0];
            next[..t * half].copy_from_slice(&done[u]);
            advance(&self.field, u, t, &mut next[..t * half]);
            evolve_into(&self.field, t, t, &mut next[t * half..]);
            let broken = (0..=t).any(|s| {
                let second = &next[s * half..(s + 1) * half];
                (0..=s).any(|r| {
                    let first = if s == t {
                        &next[r * half..(r + 1) * half]
                    } else {
                        &done[s][r * half..(r + 1) * half]
                    };
                    let direct = &next[r * half..(r + 1) * half];
                    first
                        .iter()
                        .zip(direct)
                        .any(|(&y, &z)| lookup(second, s % 2, n, y) != z)
                })
            });
            if broken {
                self.failures += 1 << ((horizon - t) * half);
            } else {
                self.visit(t);
            }
        }
    }
}

/// `E n(s,t)` by enumerating every field on rows `s..t`.
pub fn mean_critical_count_exact(
    circumference: usize,
    s: usize,
    t: usize,
    limits: &Limits,
) -> Result<Rational> {
    check_circumference(circumference)?;
    if s > t {
        return Err(invalid(format!("need s ≤ t, got s={s}, t={t}")));
    }
    let rows = t - s;
    let bits = rows * circumference / 2;
    limits.check_dense(bits)?;
    let mut total: u64 = 0;
    for pattern in 0u64..1 << bits {
        // Rows before `s` are never read by `ξ_{s,t}`.
        let mut signs = vec![1i8; s * circumference / 2];
        signs.extend((0..bits).map(|k| if pattern >> k & 1 == 1 { 1 } else { -1 }));
        let field = SignField::new(t, circumference, signs)?;
        total += evolve_web(&field, s, t)?.critical_count() as u64;
    }
    Ok(Rational::new(
        BigInt::from(total),
        BigInt::from(1u64) << bits,
    ))
}

/// Monte Carlo estimate of `E n(0,t)`, returned with its standard error.
pub fn mean_critical_count_mc(
    circumference: usize,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_circumference(circumference)?;
    if samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    let counts = crate::mc::sample_sharded(seed, samples, |rng| {
        let field = SignField::random(t, circumference, rng).expect("circumference checked");
        evolve_web(&field, 0, t)
            .expect("times in range")
            .critical_count() as f64
    });
    Ok(crate::mc::mean_and_stderr(&counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_plus_rotates() {
        let field = SignField::constant(5, 8, 1).unwrap();
        let map = evolve_web(&field, 1, 4).unwrap();
        assert_eq!(map.images(), &[4, 6, 0, 2]);
        assert_eq!(map.critical_count(), 4);
        assert!(map.is_cyclically_monotone());
    }

    #[test]
    fn empty_interval_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let field = SignField::random(4, 8, &mut rng).unwrap();
        for s in 0..=4 {
            assert_eq!(
                evolve_web(&field, s, s).unwrap(),
                WebMap::identity(8, s).unwrap()
            );
        }
        assert_eq!(WebMap::identity(8, 0).unwrap().critical_count(), 4);
        assert!(evolve_web(&field, 3, 2).is_err());
        assert!(evolve_web(&field, 0, 5).is_err());
    }

    #[test]
    fn flow_property_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let field = SignField::random(6, 8, &mut rng).unwrap();
            assert!(flow_property_holds(&field).unwrap());
        }
    }

    #[test]
    fn exhaustive_flow_property_agrees_with_per_field_check() {
        for (horizon, n) in [(0, 4), (1, 2), (3, 4), (4, 4)] {
            let bits = horizon * n / 2;
            let brute = (0u64..1 << bits)
                .filter(|&p| {
                    !flow_property_holds(&SignField::from_bits(horizon, n, p).unwrap()).unwrap()
                })
                .count() as u64;
            assert_eq!(
                flow_property_exhaustive(horizon, n, &Limits::default()).unwrap(),
                (1 << bits, brute)
            );
        }
        let tight = Limits {
            dense_dim: 10,
            ..Limits::default()
        };
        assert!(flow_property_exhaustive(6, 8, &tight).is_err());
    }

    #[test]
    fn parity_and_circumference_are_checked() {
        let f = WebMap::identity(8, 0).unwrap();
        let g = WebMap::identity(8, 1).unwrap();
        assert_eq!(
            f.compose(&g),
            Err(Error::ParityMismatch { left: 0, right: 1 })
        );
        assert!(f.compose(&WebMap::identity(6, 0).unwrap()).is_err());
        assert!(SignField::constant(2, 7, 1).is_err());
        assert!(SignField::new(1, 4, vec![1, 0]).is_err());
    }

    #[test]
    fn identity_is_neutral_and_composition_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let field = SignField::random(6, 10, &mut rng).unwrap();
            let f = evolve_web(&field, 0, 2).unwrap();
            let g = evolve_web(&field, 2, 3).unwrap();
            let h = evolve_web(&field, 3, 6).unwrap();
            assert_eq!(WebMap::identity(10, 0).unwrap().compose(&f).unwrap(), f);
            assert_eq!(
                f.compose(&g).unwrap().compose(&h).unwrap(),
                f.compose(&g.compose(&h).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn single_step_table_on_four_sites() {
        // Row 0 holds signs at x = 0, 2; each walker moves by its own sign.
        for bits in 0..4u64 {
            let field = SignField::from_bits(1, 4, bits).unwrap();
            let map = evolve_web(&field, 0, 1).unwrap();
            let expect: Vec<usize> = (0..2)
                .map(|j| {
                    if bits >> j & 1 == 1 {
                        (2 * j + 1) % 4
                    } else {
                        (2 * j + 3) % 4
                    }
                })
                .collect();
            assert_eq!(map.images(), &expect[..]);
            let distinct = if bits == 1 || bits == 2 { 1 } else { 2 };
            assert_eq!(map.critical_count(), distinct, "bits={bits}");
        }
    }

    #[test]
    fn coalescence_is_permanent_and_counts_decrease() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let field = SignField::random(8, 12, &mut rng).unwrap();
            let mut prev = usize::MAX;
            for r in (0..8).rev() {
                let map = evolve_web(&field, r, 8).unwrap();
                assert!(map.critical_count() <= prev);
                assert!(map.is_cyclically_monotone());
                prev = map.critical_count();
            }
            let mid = evolve_web(&field, 0, 4).unwrap();
            let full = evolve_web(&field, 0, 8).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    if mid.images()[i] == mid.images()[j] {
                        assert_eq!(full.images()[i], full.images()[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn critical_points_describe_the_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = SignField::random(5, 12, &mut rng).unwrap();
        let map = evolve_web(&field, 0, 5).unwrap();
        let pts = map.critical_points();
        if map.critical_count() > 1 {
            assert_eq!(pts.len(), map.critical_count());
        } else {
            assert!(pts.is_empty());
        }
    }

    #[test]
    fn off_parity_starts_round_down() {
        let field = SignField::constant(1, 6, -1).unwrap();
        let map = evolve_web(&field, 0, 1).unwrap();
        assert_eq!(map.apply(3), map.apply(2));
        assert_eq!(map.apply(1), map.apply(0));
        assert_eq!(map.apply(2), 1);
    }

    #[test]
    fn mean_critical_count_small() {
        let exact = mean_critical_count_exact(4, 0, 1, &Limits::default()).unwrap();
        assert_eq!(exact, Rational::new(3.into(), 2.into()));
        let (m, se) = mean_critical_count_mc(6, 3, 20_000, 9).unwrap();
        let exact = crate::scalar::rational_to_f64(
            &mean_critical_count_exact(6, 0, 3, &Limits::default()).unwrap(),
        );
        assert!((m - exact).abs() <= 4.0 * se, "{m} ± {se} vs {exact}");
    }
}
