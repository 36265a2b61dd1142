use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Observable;
use crate::error::{invalid, Error, Result};

/// Named observables available from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// Independent uniform values in `[-1, 1)`.
    Random,
    /// `sign(Σ τ_m)`, ties broken towards `+1`.
    Majority,
    Parity,
    /// `τ_0`.
    Dictator,
    /// `n^{-1/2} Σ τ_m`.
    NormalizedSum,
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => ObservableKind::Random,
            "majority" => ObservableKind::Majority,
            "parity" => ObservableKind::Parity,
            "dictator" => ObservableKind::Dictator,
            "sum" => ObservableKind::NormalizedSum,
            other => return Err(invalid(format!("unknown observable generator {other:?}"))),
        })
    }
}

pub fn named_observable(kind: ObservableKind, n: usize, seed: u64) -> Result<Observable<f64>> {
    if n == 0 && kind == ObservableKind::Dictator {
        return Err(invalid("dictator needs at least one coordinate"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Observable::from_fn(n, |w| match kind {
        ObservableKind::Random => rng.random_range(-1.0..1.0),
        ObservableKind::Majority => {
            let s: i64 = w.signs().iter().map(|&x| x as i64).sum();
            if s >= 0 {
                1.0
            } else {
                -1.0
            }
        }
        ObservableKind::Parity => w.signs().iter().map(|&x| x as f64).product(),
        ObservableKind::Dictator => w.get(0) as f64,
        ObservableKind::NormalizedSum => {
            w.signs().iter().map(|&x| x as f64).sum::<f64>() / (n.max(1) as f64).sqrt()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seeded() {
        let a = named_observable(ObservableKind::Random, 4, 1).unwrap();
        let b = named_observable(ObservableKind::Random, 4, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, named_observable(ObservableKind::Random, 4, 2).unwrap());
        assert_eq!(
            "sum".parse::<ObservableKind>().unwrap(),
            ObservableKind::NormalizedSum
        );
        assert!("tribes".parse::<ObservableKind>().is_err());
        let p = named_observable(ObservableKind::Parity, 3, 0).unwrap();
        assert_eq!(p.values()[0], -1.0);
        assert_eq!(p.values()[7], 1.0);
    }
}
