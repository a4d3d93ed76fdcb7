//! Divide-and-conquer conflict minimization.

use super::{check_indices, AxiomSet, Conflict, FaultChecker};
use crate::error::Result;
use crate::logic::Dpi;

/// Returns a subset-minimal conflict inside `candidates`, or `None` if
/// `candidates ∪ B ∪ P` is consistent and entails no negative measurement.
pub fn minimal_conflict(dpi: &Dpi, candidates: &AxiomSet) -> Result<Option<Conflict>> {
    check_indices(dpi, candidates)?;
    FaultChecker::new(dpi).minimal_conflict(candidates)
}

impl FaultChecker {
    /// QuickXplain over `candidates`; earlier indices are preferred to stay
    /// out of the returned conflict.
    pub fn minimal_conflict(&mut self, candidates: &AxiomSet) -> Result<Option<Conflict>> {
        if !self.is_faulty(candidates)? {
            return Ok(None);
        }
        let items: Vec<usize> = candidates.iter().collect();
        if items.is_empty() || self.is_faulty(&AxiomSet::new())? {
            return Ok(Some(AxiomSet::new()));
        }
        self.quickxplain(&AxiomSet::new(), false, &items).map(Some)
    }

    fn quickxplain(&mut self, base: &AxiomSet, has_delta: bool, items: &[usize]) -> Result<AxiomSet> {
        if has_delta && self.is_faulty(base)? {
            return Ok(AxiomSet::new());
        }
        if items.len() == 1 {
            return Ok(items.iter().copied().collect());
        }
        let (left, right) = items.split_at(items.len() / 2);
        let left_set: AxiomSet = left.iter().copied().collect();
        let d2 = self.quickxplain(&base.union(&left_set), true, right)?;
        let d1 = self.quickxplain(&base.union(&d2), !d2.is_empty(), left)?;
        Ok(d1.union(&d2))
    }
}
