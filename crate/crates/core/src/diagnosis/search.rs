//! Best-first hitting-set tree over minimal conflicts.
//!
//! Nodes are labelled by the set `H` of axioms on their path and expanded in
//! order of their cost `p(H)`. While every fault probability is at most 1/2
//! this cost can only shrink along a path, so the first `ld` minimal
//! diagnoses reached are the `ld` most probable ones. Axioms with p > 1/2
//! break that monotonicity. [`SearchOptions::admissible`] then switches to
//! the bound `p(H) * prod(odds(ax))` over axioms outside `H` with odds above
//! 1, which restores the guarantee but degrades towards full enumeration
//! when many axioms are likely faulty.
//!
//! A node is closed when its label is a superset of a known diagnosis or a
//! duplicate of an earlier label. Leaves are re-checked for subset-minimality
//! because best-first order does not guarantee that subsets come first.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{AxiomSet, Conflict, Diagnosis, FaultChecker};
use crate::error::{Error, Result};
use crate::logic::Dpi;
use crate::prob::{prior_of, FaultModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest diagnosis cardinality explored; `None` means `|K|`.
    pub max_size: Option<usize>,
    /// Keep conflicts between searches (re-minimized after the DPI changes).
    pub reuse_conflicts: bool,
    /// Order nodes by an upper bound that stays exact when some p(ax) > 1/2.
    pub admissible: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_size: None,
            reuse_conflicts: true,
            admissible: false,
        }
    }
}

struct Node {
    bound: f64,
    label: AxiomSet,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: larger bound first, then lexicographically smaller label.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.label.cmp(&self.label))
    }
}

/// Conflict-caching leading-diagnoses search.
#[derive(Debug, Clone, Default)]
pub struct DiagnosisSearch {
    options: SearchOptions,
    conflicts: Vec<Conflict>,
    stale: bool,
}

impl DiagnosisSearch {
    pub fn new(options: SearchOptions) -> Self {
        DiagnosisSearch {
            options,
            conflicts: Vec::new(),
            stale: false,
        }
    }

    /// Signals that the checker gained measurements since the last search.
    pub fn dpi_changed(&mut self) {
        if self.options.reuse_conflicts {
            self.stale = true;
        } else {
            self.conflicts.clear();
        }
    }

    pub fn known_conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    /// Added measurements keep every old conflict a conflict, but possibly a
    /// non-minimal one; shrink them again.
    fn revalidate(&mut self, checker: &mut FaultChecker) -> Result<()> {
        let old = std::mem::take(&mut self.conflicts);
        for c in old {
            if let Some(m) = checker.minimal_conflict(&c)? {
                if !self.conflicts.contains(&m) {
                    self.conflicts.push(m);
                }
            }
        }
        self.stale = false;
        Ok(())
    }

    fn conflict_for(&mut self, checker: &mut FaultChecker, label: &AxiomSet, n: usize) -> Result<Option<Conflict>> {
        if let Some(c) = self.conflicts.iter().find(|c| c.is_disjoint(label)) {
            return Ok(Some(c.clone()));
        }
        let rest = label.complement(n);
        match checker.minimal_conflict(&rest)? {
            Some(c) => {
                self.conflicts.push(c.clone());
                Ok(Some(c))
            }
            None => Ok(None),
        }
    }

    fn is_diagnosis_cached(&mut self, checker: &mut FaultChecker, d: &AxiomSet, n: usize) -> Result<bool> {
        if self.conflicts.iter().any(|c| c.is_disjoint(d)) {
            return Ok(false);
        }
        Ok(!checker.is_faulty(&d.complement(n))?)
    }

    /// Up to `ld` most probable minimal diagnoses with their priors, in
    /// non-increasing prior order (ties broken by the axiom index lists).
    pub fn leading(&mut self, checker: &mut FaultChecker, ax_probs: &[f64], ld: usize) -> Result<Vec<(Diagnosis, f64)>> {
        let n = checker.num_axioms();
        assert_eq!(ax_probs.len(), n, "one probability per axiom");
        if ld == 0 {
            return Ok(Vec::new());
        }
        if self.stale {
            self.revalidate(checker)?;
        }
        if checker.is_faulty(&AxiomSet::new())? {
            return Err(Error::Unsolvable);
        }
        let max_size = self.options.max_size.unwrap_or(n);
        let gains: Vec<(usize, f64)> = if self.options.admissible {
            ax_probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (i, p / (1.0 - p)))
                .filter(|&(_, odds)| odds > 1.0)
                .collect()
        } else {
            Vec::new()
        };
        let bound = |label: &AxiomSet| {
            let extra: f64 = gains
                .iter()
                .filter(|(i, _)| !label.contains(*i))
                .map(|(_, o)| o)
                .product();
            prior_of(label, ax_probs) * extra
        };

        let mut heap = BinaryHeap::new();
        let mut visited = HashSet::new();
        let mut found: Vec<(Diagnosis, f64)> = Vec::new();
        let mut kth: Option<f64> = None;

        let root = AxiomSet::new();
        heap.push(Node {
            bound: bound(&root),
            label: root.clone(),
        });
        visited.insert(root);

        while let Some(Node { bound: b, label }) = heap.pop() {
            if kth.is_some_and(|k| b < k) {
                break;
            }
            if found.iter().any(|(d, _)| d.is_subset(&label)) {
                continue;
            }
            match self.conflict_for(checker, &label, n)? {
                None => {
                    if self.is_minimal(checker, &label, n)? {
                        let p = prior_of(&label, ax_probs);
                        found.push((label, p));
                        if found.len() >= ld {
                            let mut ps: Vec<f64> = found.iter().map(|(_, p)| *p).collect();
                            ps.sort_by(|a, b| b.total_cmp(a));
                            kth = Some(ps[ld - 1]);
                        }
                    }
                }
                Some(conflict) => {
                    if label.len() >= max_size {
                        continue;
                    }
                    for i in conflict.iter() {
                        let child = label.with(i);
                        if found.iter().any(|(d, _)| d.is_subset(&child)) || !visited.insert(child.clone()) {
                            continue;
                        }
                        heap.push(Node {
                            bound: bound(&child),
                            label: child,
                        });
                    }
                }
            }
        }

        found.sort_by(|(da, pa), (db, pb)| pb.total_cmp(pa).then_with(|| da.cmp(db)));
        found.truncate(ld);
        Ok(found)
    }

    fn is_minimal(&mut self, checker: &mut FaultChecker, d: &AxiomSet, n: usize) -> Result<bool> {
        for i in d.iter() {
            if self.is_diagnosis_cached(checker, &d.without(i), n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The `ld` most probable minimal diagnoses of `dpi` under `fault_model`,
/// searched with default options (see the module docs for p(ax) > 1/2).
pub fn leading_diagnoses(dpi: &Dpi, fault_model: &FaultModel, ld: usize) -> Result<Vec<Diagnosis>> {
    let mut checker = FaultChecker::new(dpi);
    let mut search = DiagnosisSearch::default();
    let found = search.leading(&mut checker, fault_model.axiom_probs(), ld)?;
    Ok(found.into_iter().map(|(d, _)| d).collect())
}

/// `min(bound, number of minimal diagnoses of dpi)`.
pub fn count_minimal_diagnoses_up_to(dpi: &Dpi, bound: usize) -> Result<usize> {
    let mut checker = FaultChecker::new(dpi);
    let mut search = DiagnosisSearch::default();
    // Uniform low fault probabilities make the search cardinality-first.
    let probs = vec![0.1; dpi.kb.len()];
    Ok(search.leading(&mut checker, &probs, bound)?.len())
}
