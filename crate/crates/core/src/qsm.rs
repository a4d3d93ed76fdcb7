//! Query selection measures and the arg-best selection rule.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::query::{negative_class_prob, positive_class_prob, QPartition, Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Ent,
    Spl,
    Kl,
    Emcb,
    Mps,
    Bme,
    Rio,
    Rnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
    /// Values are ignored; selection is uniform.
    None,
}

impl Measure {
    pub const ALL: [Measure; 8] = [
        Measure::Ent,
        Measure::Spl,
        Measure::Kl,
        Measure::Emcb,
        Measure::Mps,
        Measure::Bme,
        Measure::Rio,
        Measure::Rnd,
    ];

    pub fn direction(self) -> Direction {
        match self {
            Measure::Ent | Measure::Spl | Measure::Rio => Direction::Minimize,
            Measure::Kl | Measure::Emcb | Measure::Mps | Measure::Bme => Direction::Maximize,
            Measure::Rnd => Direction::None,
        }
    }

    /// Lower-case name used in configs, the CLI and CSV files.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Ent => "ent",
            Measure::Spl => "spl",
            Measure::Kl => "kl",
            Measure::Emcb => "emcb",
            Measure::Mps => "mps",
            Measure::Bme => "bme",
            Measure::Rio => "rio",
            Measure::Rnd => "rnd",
        }
    }

    /// Conventional display designator, e.g. `EMCb`.
    pub fn designator(self) -> &'static str {
        match self {
            Measure::Ent => "ENT",
            Measure::Spl => "SPL",
            Measure::Kl => "KL",
            Measure::Emcb => "EMCb",
            Measure::Mps => "MPS",
            Measure::Bme => "BME",
            Measure::Rio => "RIO",
            Measure::Rnd => "RND",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s) || (*m == Measure::Rio && s.eq_ignore_ascii_case("rio'")))
            .ok_or_else(|| Error::InvalidValue {
                what: "measure",
                value: s.to_string(),
            })
    }
}

/// Adaptive elimination requirement of `RIO`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RioState {
    /// Minimum number of diagnoses a query must eliminate in the worst case.
    pub n: usize,
    pub leading_size: usize,
}

impl RioState {
    /// `n = max(1, ceil(|D| / 4))`.
    pub fn new(leading_size: usize) -> Self {
        RioState {
            n: clamp_n(leading_size.div_ceil(4), leading_size),
            leading_size,
        }
    }
}

fn clamp_n(n: usize, leading_size: usize) -> usize {
    n.clamp(1, (leading_size / 2).max(1))
}

/// Raises `n` when the last query eliminated fewer than half of the
/// previous leading set, lowers it otherwise, then re-clamps against the
/// new leading set size.
pub fn update_rio_state(rio: RioState, eliminated: usize, new_leading_size: usize) -> RioState {
    let n = if eliminated < rio.leading_size.div_ceil(2) {
        rio.n + 1
    } else {
        rio.n.saturating_sub(1)
    };
    RioState {
        n: clamp_n(n, new_leading_size),
        leading_size: new_leading_size,
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn entropy_value(qp: &QPartition) -> f64 {
    plogp(positive_class_prob(qp)) + plogp(negative_class_prob(qp))
}

/// Value of `measure` for the query inducing `qp`.
pub fn evaluate_measure(measure: Measure, qp: &QPartition, rio: Option<&RioState>) -> Result<f64> {
    let (np, nm) = (qp.d_plus.len(), qp.d_minus.len());
    if np == 0 && nm == 0 {
        return Err(Error::InvalidPartition("both D+ and D- are empty".into()));
    }
    let value = match measure {
        Measure::Ent => entropy_value(qp),
        Measure::Spl => np.abs_diff(nm) as f64,
        Measure::Kl => {
            let total_n = (np + nm) as f64;
            let total_p = qp.p_plus + qp.p_minus;
            let mut sum = 0.0;
            for (size, p) in [(np, qp.p_plus), (nm, qp.p_minus)] {
                if size == 0 {
                    continue;
                }
                if !(p > 0.0) {
                    return Ok(f64::NEG_INFINITY);
                }
                sum -= size as f64 / total_n * (p / total_p).log2();
            }
            sum
        }
        Measure::Emcb => positive_class_prob(qp) * nm as f64 + negative_class_prob(qp) * np as f64,
        Measure::Mps => match np.cmp(&nm) {
            std::cmp::Ordering::Less if np == 1 => qp.p_plus,
            std::cmp::Ordering::Greater if nm == 1 => qp.p_minus,
            std::cmp::Ordering::Equal if np == 1 => qp.p_plus.max(qp.p_minus),
            _ => 0.0,
        },
        Measure::Bme => {
            if qp.p_minus < qp.p_plus {
                nm as f64
            } else if qp.p_plus < qp.p_minus {
                np as f64
            } else {
                0.0
            }
        }
        Measure::Rio => {
            let rio = rio.ok_or(Error::MissingRioState)?;
            let c = np.min(nm);
            let penalty = if c >= rio.n { c - rio.n } else { qp.len() };
            entropy_value(qp) / 2.0 + penalty as f64
        }
        // Uniform selection does not look at values.
        Measure::Rnd => 0.0,
    };
    Ok(value)
}

const TIE_TOLERANCE: f64 = 1e-12;

fn ties(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Pool indices whose value is optimal (within a relative tolerance of
/// `1e-12`), ascending. For `RND` every index is optimal.
pub fn optimal_indices(measure: Measure, pool: &[(Query, QPartition)], rio: Option<&RioState>) -> Result<Vec<usize>> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let values = pool
        .iter()
        .map(|(_, qp)| evaluate_measure(measure, qp, rio))
        .collect::<Result<Vec<f64>>>()?;
    let best = match measure.direction() {
        Direction::None => return Ok((0..pool.len()).collect()),
        Direction::Maximize => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Direction::Minimize => values.iter().copied().fold(f64::INFINITY, f64::min),
    };
    Ok((0..values.len()).filter(|&i| ties(values[i], best)).collect())
}

/// Index of the selected query: the first optimal one, or a uniform draw
/// from `rng` for `RND`.
pub fn select_index<R: Rng + ?Sized>(
    measure: Measure,
    pool: &[(Query, QPartition)],
    rio: Option<&RioState>,
    rng: &mut R,
) -> Result<usize> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if measure == Measure::Rnd {
        return Ok(rng.gen_range(0..pool.len()));
    }
    Ok(optimal_indices(measure, pool, rio)?[0])
}

pub fn select_query<'p, R: Rng + ?Sized>(
    measure: Measure,
    pool: &'p [(Query, QPartition)],
    rio: Option<&RioState>,
    rng: &mut R,
) -> Result<&'p Query> {
    let i = select_index(measure, pool, rio, rng)?;
    Ok(&pool[i].0)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::diagnosis::AxiomSet;
    use crate::logic::Dpi;
    use crate::prob::Beliefs;
    use crate::query::candidate_pool;

    /// The seven component probes over six diagnoses with given
    /// probabilities; partitions follow from axiom membership.
    fn example_pool() -> Vec<(Query, QPartition)> {
        let ds: [&[usize]; 6] = [&[2, 3], &[2, 5], &[2, 6], &[2, 7], &[1, 4, 7], &[3, 4, 7]];
        let ps = [0.01, 0.33, 0.14, 0.07, 0.41, 0.04];
        let beliefs = Beliefs::new(
            ds.iter()
                .zip(ps)
                .map(|(d, p)| (d.iter().map(|i| i - 1).collect::<AxiomSet>(), p))
                .collect(),
        );
        let dpi = Dpi::from_axioms(["A1", "A2", "A3", "A4", "A5", "A6", "A7"]).unwrap();
        candidate_pool(&dpi, &beliefs, true).unwrap()
    }

    fn select(m: Measure, rio: Option<&RioState>) -> String {
        let pool = example_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        select_query(m, &pool, rio, &mut rng).unwrap().id.clone()
    }

    #[test]
    fn example_pool_matches_reference_partitions() {
        let pool = example_pool();
        assert_eq!(pool.len(), 7);
        let expect = [(5, 1, 0.59), (2, 4, 0.45), (4, 2, 0.95), (4, 2, 0.55), (5, 1, 0.67), (5, 1, 0.86), (3, 3, 0.48)];
        for ((_, qp), (np, nm, pp)) in pool.iter().zip(expect) {
            assert_eq!((qp.d_plus.len(), qp.d_minus.len()), (np, nm));
            assert!((qp.p_plus - pp).abs() < 1e-9, "{} vs {pp}", qp.p_plus);
        }
    }

    #[test]
    fn example_values() {
        let pool = example_pool();
        let v = |m, i: usize, rio| evaluate_measure(m, &pool[i].1, rio).unwrap();
        assert!((v(Measure::Kl, 2, None) - 1.48).abs() <= 0.02);
        assert!((v(Measure::Mps, 0, None) - 0.41).abs() < 1e-9);
        assert!((v(Measure::Emcb, 6, None) - 3.0).abs() < 1e-9);
        assert_eq!(v(Measure::Spl, 6, None), 0.0);
        assert!((v(Measure::Ent, 6, None) + 0.9988).abs() < 1e-3);
        assert_eq!(v(Measure::Bme, 6, None), 3.0);
        let rio = RioState { n: 2, leading_size: 6 };
        assert!((v(Measure::Rio, 1, Some(&rio)) + 0.4964).abs() < 1e-3);
        assert_eq!(v(Measure::Mps, 1, None), 0.0);
    }

    #[test]
    fn example_selections() {
        for (m, q) in [
            (Measure::Ent, "ax7"),
            (Measure::Spl, "ax7"),
            (Measure::Kl, "ax3"),
            (Measure::Emcb, "ax7"),
            (Measure::Mps, "ax1"),
            (Measure::Bme, "ax7"),
        ] {
            assert_eq!(select(m, None), q, "{m}");
        }
        let rio = RioState { n: 2, leading_size: 6 };
        assert_eq!(select(Measure::Rio, Some(&rio)), "ax2");
        assert_eq!(optimal_indices(Measure::Rio, &example_pool(), Some(&rio)).unwrap(), [1, 3]);
    }

    #[test]
    fn degenerate_partitions() {
        let b = Beliefs::new(vec![(AxiomSet::from_iter([0]), 0.5), (AxiomSet::from_iter([1]), 0.5)]);
        let balanced = QPartition::from_blocks(vec![AxiomSet::from_iter([0])], vec![AxiomSet::from_iter([1])], vec![], &b).unwrap();
        assert_eq!(evaluate_measure(Measure::Bme, &balanced, None).unwrap(), 0.0);
        assert_eq!(evaluate_measure(Measure::Ent, &balanced, None).unwrap(), -1.0);
        assert_eq!(evaluate_measure(Measure::Mps, &balanced, None).unwrap(), 0.5);
        assert!(matches!(evaluate_measure(Measure::Rio, &balanced, None), Err(Error::MissingRioState)));
        let empty = QPartition::from_blocks(vec![], vec![], vec![AxiomSet::from_iter([0])], &b).unwrap();
        assert!(matches!(evaluate_measure(Measure::Ent, &empty, None), Err(Error::InvalidPartition(_))));
        let mut zero_mass = balanced.clone();
        zero_mass.p_minus = 0.0;
        assert_eq!(evaluate_measure(Measure::Kl, &zero_mass, None).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn rio_updates() {
        let up = update_rio_state(RioState { n: 2, leading_size: 10 }, 1, 10);
        assert_eq!(up.n, 3);
        let down = update_rio_state(RioState { n: 3, leading_size: 10 }, 6, 10);
        assert_eq!(down.n, 2);
        let floor = update_rio_state(RioState { n: 1, leading_size: 10 }, 9, 10);
        assert_eq!(floor.n, 1);
        assert_eq!(update_rio_state(RioState { n: 5, leading_size: 10 }, 1, 4).n, 2);
        assert_eq!(RioState::new(10).n, 3);
        assert_eq!(RioState::new(2).n, 1);
    }

    #[test]
    fn names_parse_case_insensitively() {
        for m in Measure::ALL {
            assert_eq!(m.name().to_uppercase().parse::<Measure>().unwrap(), m);
            assert_eq!(m.designator().parse::<Measure>().unwrap(), m);
        }
        assert!("foo".parse::<Measure>().is_err());
    }

    #[test]
    fn empty_pool_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(select_index(Measure::Ent, &[], None, &mut rng), Err(Error::EmptyPool)));
        assert!(matches!(select_index(Measure::Rnd, &[], None, &mut rng), Err(Error::EmptyPool)));
    }
}
