//! Consistency and entailment on top of the SAT solver.
//!
//! Formulas are clausified with a structure-preserving (Tseitin)
//! transformation: each compound subformula gets a fresh variable that is
//! made equivalent to it, so clause count stays linear in formula size.

use std::collections::HashMap;

use super::formula::Formula;
use super::sat::{Lit, Solver, Var, DEFAULT_DECISION_BUDGET};
use crate::error::{Error, Result};

/// An incremental propositional reasoner.
///
/// Cheap to create; one instance holds all of its state and is never shared.
#[derive(Debug, Clone)]
pub struct Reasoner {
    solver: Solver,
    atoms: HashMap<String, Var>,
    encoded: HashMap<Formula, Lit>,
    top: Option<Lit>,
    budget: u64,
}

impl Default for Reasoner {
    fn default() -> Self {
        Self::new()
    }
}

impl Reasoner {
    pub fn new() -> Self {
        Self::with_budget(DEFAULT_DECISION_BUDGET)
    }

    pub fn with_budget(budget: u64) -> Self {
        let mut solver = Solver::new();
        solver.set_decision_budget(budget);
        Reasoner {
            solver,
            atoms: HashMap::new(),
            encoded: HashMap::new(),
            top: None,
            budget,
        }
    }

    pub fn solver_stats(&self) -> super::sat::SolverStats {
        self.solver.stats
    }

    fn top(&mut self) -> Lit {
        if let Some(t) = self.top {
            return t;
        }
        let t = Lit::positive(self.solver.new_var());
        self.solver.add_clause(&[t]);
        self.top = Some(t);
        t
    }

    fn fresh(&mut self) -> Lit {
        Lit::positive(self.solver.new_var())
    }

    /// Returns a literal that is equivalent to `f` in every model.
    pub fn encode(&mut self, f: &Formula) -> Lit {
        if let Some(&l) = self.encoded.get(f) {
            return l;
        }
        let l = self.encode_inner(f);
        self.encoded.insert(f.clone(), l);
        l
    }

    fn encode_inner(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Atom(name) => {
                if let Some(&v) = self.atoms.get(name) {
                    return Lit::positive(v);
                }
                let v = self.solver.new_var();
                self.atoms.insert(name.clone(), v);
                Lit::positive(v)
            }
            Formula::True => self.top(),
            Formula::False => !self.top(),
            Formula::Not(c) => !self.encode_inner(c),
            Formula::And(cs) => {
                let kids: Vec<Lit> = cs.iter().map(|c| self.encode_inner(c)).collect();
                let x = self.fresh();
                let mut long = vec![x];
                for &k in &kids {
                    self.solver.add_clause(&[!x, k]);
                    long.push(!k);
                }
                self.solver.add_clause(&long);
                x
            }
            Formula::Or(cs) => {
                let kids: Vec<Lit> = cs.iter().map(|c| self.encode_inner(c)).collect();
                let x = self.fresh();
                let mut long = vec![!x];
                for &k in &kids {
                    self.solver.add_clause(&[x, !k]);
                    long.push(k);
                }
                self.solver.add_clause(&long);
                x
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.encode_inner(a), self.encode_inner(b));
                let x = self.fresh();
                self.solver.add_clause(&[!x, !a, b]);
                self.solver.add_clause(&[x, a]);
                self.solver.add_clause(&[x, !b]);
                x
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.encode_inner(a), self.encode_inner(b));
                let x = self.fresh();
                self.solver.add_clause(&[!x, !a, b]);
                self.solver.add_clause(&[!x, a, !b]);
                self.solver.add_clause(&[x, a, b]);
                self.solver.add_clause(&[x, !a, !b]);
                x
            }
        }
    }

    /// Adds `f` as a permanent constraint.
    pub fn assert(&mut self, f: &Formula) {
        let l = self.encode(f);
        self.solver.add_clause(&[l]);
    }

    /// Returns a selector literal `s` with `s -> f`; assume `s` to enable `f`.
    pub fn guard(&mut self, f: &Formula) -> Lit {
        let l = self.encode(f);
        let s = self.fresh();
        self.solver.add_clause(&[!s, l]);
        s
    }

    /// Returns a selector literal `s` with `s -> not f`.
    pub fn guard_negation(&mut self, f: &Formula) -> Lit {
        let l = self.encode(f);
        let s = self.fresh();
        self.solver.add_clause(&[!s, !l]);
        s
    }

    /// Satisfiability of the permanent constraints under `assumptions`.
    pub fn check(&mut self, assumptions: &[Lit]) -> Result<bool> {
        self.solver
            .solve(assumptions)
            .map_err(|_| Error::ResourceLimit {
                budget: self.budget,
            })
    }
}

/// True iff the conjunction of `sentences` is satisfiable.
pub fn is_consistent<'a>(sentences: impl IntoIterator<Item = &'a Formula>) -> Result<bool> {
    let mut r = Reasoner::new();
    for s in sentences {
        r.assert(s);
    }
    r.check(&[])
}

/// True iff every model of `sentences` satisfies `goal`.
pub fn entails<'a>(sentences: impl IntoIterator<Item = &'a Formula>, goal: &Formula) -> Result<bool> {
    let mut r = Reasoner::new();
    for s in sentences {
        r.assert(s);
    }
    let neg = r.guard_negation(goal);
    Ok(!r.check(&[neg])?)
}
