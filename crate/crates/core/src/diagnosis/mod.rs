//! Diagnoses, minimal conflicts and probability-ordered enumeration of the
//! leading minimal diagnoses.

mod axiom_set;
mod conflict;
mod search;

pub use axiom_set::AxiomSet;
pub use conflict::minimal_conflict;
pub use search::{count_minimal_diagnoses_up_to, leading_diagnoses, DiagnosisSearch, SearchOptions};

use crate::error::{Error, Result};
use crate::logic::sat::Lit;
use crate::logic::{Dpi, Formula, Reasoner};

/// A set of retracted axioms.
pub type Diagnosis = AxiomSet;
/// A set of axioms that, with `B ∪ P`, is inconsistent or entails some `n ∈ N`.
pub type Conflict = AxiomSet;

/// Answers "is `S ∪ B ∪ P` inconsistent or does it entail a negative
/// measurement?" for subsets `S` of `K`, reusing one incremental reasoner.
///
/// Measurements can be appended as a session progresses.
#[derive(Debug, Clone)]
pub struct FaultChecker {
    reasoner: Reasoner,
    axiom_selectors: Vec<Lit>,
    negative_selectors: Vec<Lit>,
    checks: u64,
}

impl FaultChecker {
    pub fn new(dpi: &Dpi) -> Self {
        Self::with_reasoner(dpi, Reasoner::new())
    }

    pub fn with_budget(dpi: &Dpi, budget: u64) -> Self {
        Self::with_reasoner(dpi, Reasoner::with_budget(budget))
    }

    fn with_reasoner(dpi: &Dpi, mut reasoner: Reasoner) -> Self {
        let axiom_selectors = dpi.kb.formulas().map(|f| reasoner.guard(f)).collect();
        for f in dpi.background.iter().chain(&dpi.positive) {
            reasoner.assert(f);
        }
        let negative_selectors = dpi.negative.iter().map(|f| reasoner.guard_negation(f)).collect();
        FaultChecker {
            reasoner,
            axiom_selectors,
            negative_selectors,
            checks: 0,
        }
    }

    pub fn num_axioms(&self) -> usize {
        self.axiom_selectors.len()
    }

    /// Number of `is_faulty` evaluations so far.
    pub fn checks(&self) -> u64 {
        self.checks
    }

    pub fn add_positive(&mut self, f: &Formula) {
        self.reasoner.assert(f);
    }

    pub fn add_negative(&mut self, f: &Formula) {
        let s = self.reasoner.guard_negation(f);
        self.negative_selectors.push(s);
    }

    /// True iff `axioms ∪ B ∪ P` is inconsistent or entails some `n ∈ N`.
    pub fn is_faulty(&mut self, axioms: &AxiomSet) -> Result<bool> {
        self.checks += 1;
        let mut assumptions: Vec<Lit> = axioms.iter().map(|i| self.axiom_selectors[i]).collect();
        if self.negative_selectors.is_empty() {
            return Ok(!self.reasoner.check(&assumptions)?);
        }
        // Each check with a negated measurement also covers plain consistency.
        for k in 0..self.negative_selectors.len() {
            assumptions.push(self.negative_selectors[k]);
            if !self.reasoner.check(&assumptions)? {
                return Ok(true);
            }
            assumptions.pop();
        }
        Ok(false)
    }

    /// True iff `(K \ d) ∪ B ∪ P` is consistent and entails no `n ∈ N`.
    pub fn is_diagnosis(&mut self, d: &Diagnosis) -> Result<bool> {
        let rest = d.complement(self.num_axioms());
        Ok(!self.is_faulty(&rest)?)
    }
}

fn check_indices(dpi: &Dpi, set: &AxiomSet) -> Result<()> {
    match set.iter().find(|&i| i >= dpi.kb.len()) {
        Some(i) => Err(Error::UnknownLabel(format!("#{i}"))),
        None => Ok(()),
    }
}

/// Looks up axiom labels in `K`.
pub fn axioms_from_labels<'a>(dpi: &Dpi, labels: impl IntoIterator<Item = &'a str>) -> Result<AxiomSet> {
    labels
        .into_iter()
        .map(|l| dpi.kb.index_of(l).ok_or_else(|| Error::UnknownLabel(l.to_string())))
        .collect()
}

/// True iff `(K \ d) ∪ B ∪ P` is consistent and entails no negative measurement.
pub fn is_valid_diagnosis(dpi: &Dpi, d: &Diagnosis) -> Result<bool> {
    check_indices(dpi, d)?;
    FaultChecker::new(dpi).is_diagnosis(d)
}
