//! Simulated interacting experts.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::query::Answer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleKind {
    /// Answers `P` with probability `x`.
    Plausible,
    /// Answers `P` with probability 1/2.
    Random,
    /// Answers `P` with probability `1 - x`.
    Implausible,
}

impl OracleKind {
    pub const ALL: [OracleKind; 3] = [OracleKind::Plausible, OracleKind::Random, OracleKind::Implausible];

    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Plausible => "plausible",
            OracleKind::Random => "random",
            OracleKind::Implausible => "implausible",
        }
    }

    /// Probability of a positive answer given `p(class(q) = P) = x`.
    pub fn positive_prob(self, x: f64) -> f64 {
        match self {
            OracleKind::Plausible => x,
            OracleKind::Random => 0.5,
            OracleKind::Implausible => 1.0 - x,
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OracleKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidValue {
                what: "oracle",
                value: s.to_string(),
            })
    }
}

/// One answer; consumes exactly one `f64` draw from `rng`.
pub fn classify<R: Rng + ?Sized>(kind: OracleKind, x: f64, rng: &mut R) -> Answer {
    let u: f64 = rng.gen();
    if u < kind.positive_prob(x) {
        Answer::Positive
    } else {
        Answer::Negative
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn forced_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            assert_eq!(classify(OracleKind::Plausible, 1.0, &mut rng), Answer::Positive);
            assert_eq!(classify(OracleKind::Implausible, 1.0, &mut rng), Answer::Negative);
            assert_eq!(classify(OracleKind::Plausible, 0.0, &mut rng), Answer::Negative);
        }
    }

    #[test]
    fn random_oracle_is_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let positives = (0..10_000)
            .filter(|_| classify(OracleKind::Random, 0.9, &mut rng) == Answer::Positive)
            .count();
        assert!((positives as f64 / 10_000.0 - 0.5).abs() <= 0.015, "{positives}");
    }

    #[test]
    fn mirrored_strategies_share_a_stream() {
        for x in [0.1, 0.37, 0.5, 0.82] {
            let mut a = ChaCha8Rng::seed_from_u64(3);
            let mut b = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..200 {
                assert_eq!(
                    classify(OracleKind::Plausible, x, &mut a),
                    classify(OracleKind::Implausible, 1.0 - x, &mut b)
                );
            }
        }
    }
}
