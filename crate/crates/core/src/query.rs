//! Queries, q-partitions and the component-probe candidate pool.

use std::fmt;

use crate::diagnosis::{Diagnosis, FaultChecker};
use crate::error::{Error, Result};
use crate::logic::{Dpi, Formula};
use crate::prob::Beliefs;

/// Classification of a query by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    /// The sentence must hold in the intended model (`q` joins `P`).
    Positive,
    /// The sentence must not be entailed (`q` joins `N`).
    Negative,
}

impl Answer {
    pub fn symbol(self) -> &'static str {
        match self {
            Answer::Positive => "P",
            Answer::Negative => "N",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The three blocks of a q-partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    /// Predicts a positive answer; eliminated by a negative one.
    Plus,
    /// Predicts a negative answer; eliminated by a positive one.
    Minus,
    /// Uncommitted.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub sentence: Formula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QPartition {
    pub d_plus: Vec<Diagnosis>,
    pub d_minus: Vec<Diagnosis>,
    pub d_zero: Vec<Diagnosis>,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_zero: f64,
}

impl QPartition {
    /// Builds a partition whose block probabilities are the belief masses
    /// of the blocks, normalized over all entries of `beliefs`.
    pub fn from_blocks(
        d_plus: Vec<Diagnosis>,
        d_minus: Vec<Diagnosis>,
        d_zero: Vec<Diagnosis>,
        beliefs: &Beliefs,
    ) -> Result<Self> {
        let total = beliefs.total();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        let mass = |block: &[Diagnosis]| -> Result<f64> {
            block.iter().try_fold(0.0, |acc, d| {
                beliefs
                    .prob_of(d)
                    .map(|p| acc + p / total)
                    .ok_or_else(|| Error::InvalidPartition(format!("{d:?} has no belief")))
            })
        };
        let (p_plus, p_minus, p_zero) = (mass(&d_plus)?, mass(&d_minus)?, mass(&d_zero)?);
        Ok(QPartition {
            d_plus,
            d_minus,
            d_zero,
            p_plus,
            p_minus,
            p_zero,
        })
    }

    /// Number of diagnoses over all three blocks.
    pub fn len(&self) -> usize {
        self.d_plus.len() + self.d_minus.len() + self.d_zero.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Both `D+` and `D-` nonempty: every answer rules out some diagnosis.
    pub fn is_query(&self) -> bool {
        !self.d_plus.is_empty() && !self.d_minus.is_empty()
    }

    pub fn block_of(&self, d: &Diagnosis) -> Option<Block> {
        if self.d_plus.contains(d) {
            Some(Block::Plus)
        } else if self.d_minus.contains(d) {
            Some(Block::Minus)
        } else if self.d_zero.contains(d) {
            Some(Block::Zero)
        } else {
            None
        }
    }

    /// How many diagnoses `answer` rules out.
    pub fn eliminated_by(&self, answer: Answer) -> usize {
        match answer {
            Answer::Positive => self.d_minus.len(),
            Answer::Negative => self.d_plus.len(),
        }
    }
}

pub fn is_strong(qp: &QPartition) -> bool {
    qp.d_zero.is_empty()
}

/// `p(D+) + p(D0)/2`.
pub fn positive_class_prob(qp: &QPartition) -> f64 {
    qp.p_plus + 0.5 * qp.p_zero
}

/// `p(D-) + p(D0)/2`. Computed from the blocks rather than as a complement
/// so that mirrored partitions produce mirrored values exactly.
pub fn negative_class_prob(qp: &QPartition) -> f64 {
    qp.p_minus + 0.5 * qp.p_zero
}

/// Assigns each diagnosis of `beliefs` to a block by checking its validity
/// for `<K, B, P ∪ {q}, N>` and `<K, B, P, N ∪ {q}>`.
pub fn compute_qpartition(dpi: &Dpi, beliefs: &Beliefs, q: &Formula) -> Result<QPartition> {
    let base = FaultChecker::new(dpi);
    qpartition_with(&base, beliefs, q)
}

fn qpartition_with(base: &FaultChecker, beliefs: &Beliefs, q: &Formula) -> Result<QPartition> {
    let mut if_positive = base.clone();
    if_positive.add_positive(q);
    let mut if_negative = base.clone();
    if_negative.add_negative(q);
    let (mut plus, mut minus, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for d in beliefs.diagnoses() {
        let survives_p = if_positive.is_diagnosis(d)?;
        let survives_n = if_negative.is_diagnosis(d)?;
        match (survives_p, survives_n) {
            (true, false) => plus.push(d.clone()),
            (false, true) => minus.push(d.clone()),
            (true, true) => zero.push(d.clone()),
            (false, false) => {
                return Err(Error::InvalidPartition(format!(
                    "{d:?} is invalidated by both answers; it is not a diagnosis of the input"
                )))
            }
        }
    }
    QPartition::from_blocks(plus, minus, zero, beliefs)
}

/// Component probes `q := ax` for every axiom of `K`, restricted to those
/// that qualify as queries for the diagnoses in `beliefs`, in axiom order.
///
/// With `fast_path`, a minimal diagnosis containing `ax` goes to `D-` and
/// every other one to `D+` without calling the reasoner. That is exact for
/// minimal diagnoses; the slow path re-checks both hypothetical problems.
pub fn candidate_pool(dpi: &Dpi, beliefs: &Beliefs, fast_path: bool) -> Result<Vec<(Query, QPartition)>> {
    if beliefs.len() < 2 {
        return Err(Error::EmptyPool);
    }
    let base = if fast_path { None } else { Some(FaultChecker::new(dpi)) };
    let mut pool = Vec::new();
    for (i, (label, ax)) in dpi.kb.iter().enumerate() {
        let qp = match &base {
            None => {
                let (minus, plus): (Vec<Diagnosis>, Vec<Diagnosis>) =
                    beliefs.diagnoses().cloned().partition(|d| d.contains(i));
                QPartition::from_blocks(plus, minus, Vec::new(), beliefs)?
            }
            Some(checker) => qpartition_with(checker, beliefs, ax)?,
        };
        if qp.is_query() {
            pool.push((
                Query {
                    id: label.to_string(),
                    sentence: ax.clone(),
                },
                qp,
            ));
        }
    }
    if pool.is_empty() {
        // Two distinct minimal diagnoses always differ in some axiom.
        return Err(Error::EmptyPool);
    }
    Ok(pool)
}
