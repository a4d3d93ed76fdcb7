//! A small CDCL SAT solver with assumption-based incremental solving.
//!
//! Two-watched-literal propagation, first-UIP learning, VSIDS-style
//! activities with phase saving and Luby restarts. Every call to
//! [`Solver::solve`] returns at decision level 0, so clauses may be added
//! between calls and learnt clauses are kept.

use std::ops::Not;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn positive(var: Var) -> Self {
        Lit::new(var, true)
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const FALSE: u8 = 0;
const TRUE: u8 = 1;
const UNDEF: u8 = 2;

#[inline]
fn lit_value(assigns: &[u8], l: Lit) -> u8 {
    let v = assigns[l.var().index()];
    if v == UNDEF {
        UNDEF
    } else {
        v ^ (l.0 & 1) as u8
    }
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
}

/// The decision budget of a single [`Solver::solve`] call ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub budget: u64,
}

pub const DEFAULT_DECISION_BUDGET: u64 = 10_000_000;
const LEARNT_LIMIT: usize = 4_000;
const RESTART_UNIT: u64 = 64;

#[derive(Debug, Clone)]
pub struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<usize>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    phase: Vec<bool>,
    seen: Vec<bool>,
    model: Vec<bool>,
    ok: bool,
    budget: u64,
    n_learnt: usize,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverStats {
    pub solves: u64,
    pub decisions: u64,
    pub conflicts: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            phase: Vec::new(),
            seen: Vec::new(),
            model: Vec::new(),
            ok: true,
            budget: DEFAULT_DECISION_BUDGET,
            n_learnt: 0,
            stats: SolverStats::default(),
        }
    }

    /// Sets the maximum number of decisions a single `solve` call may make.
    pub fn set_decision_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        v
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = u8::from(l.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a permanent clause. Returns `false` once the clause set is
    /// known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        for w in c.windows(2) {
            if w[0] == !w[1] {
                return true;
            }
        }
        if c.iter().any(|&l| lit_value(&self.assigns, l) == TRUE) {
            return true;
        }
        c.retain(|&l| lit_value(&self.assigns, l) == UNDEF);
        match c.len() {
            0 => {
                self.ok = false;
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(c, false);
            }
        }
        self.ok
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let cr = self.clauses.len();
        self.watches[lits[0].index()].push(cr);
        self.watches[lits[1].index()].push(cr);
        if learnt {
            self.n_learnt += 1;
        }
        self.clauses.push(Clause { lits, learnt });
        cr
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let cr = ws[i];
                i += 1;
                let lits = &mut self.clauses[cr].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if lit_value(&self.assigns, first) == TRUE {
                    ws[j] = cr;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.assigns, lits[k]) != FALSE {
                        lits.swap(1, k);
                        self.watches[lits[1].index()].push(cr);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = cr;
                j += 1;
                if lit_value(&self.assigns, first) == FALSE {
                    conflict = Some(cr);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, Some(cr));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: Var) {
        let a = &mut self.activity[v.index()];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in &mut self.activity {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();

        loop {
            let skip = usize::from(p.is_some());
            for k in skip..self.clauses[confl].lits.len() {
                let q = self.clauses[confl].lits[k];
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.bump(v);
                    self.seen[v.index()] = true;
                    if self.level[v.index()] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var().index()] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            confl = self.reason[lit.var().index()].expect("implied literal without reason");
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var().index()];
        }
        (learnt, bt)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.trail_lim[level as usize];
        for k in (keep..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var().index();
            self.phase[v] = l.is_positive();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(level as usize);
        self.qhead = keep;
    }

    fn pick_branch(&self) -> Option<Lit> {
        let mut best: Option<usize> = None;
        for v in 0..self.assigns.len() {
            if self.assigns[v] == UNDEF && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best.map(|v| Lit::new(Var(v as u32), self.phase[v]))
    }

    /// Decides satisfiability of the clause set under `assumptions`.
    ///
    /// `Ok(false)` means unsatisfiable under the assumptions (the clause set
    /// itself may still be satisfiable).
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<bool, BudgetExceeded> {
        self.stats.solves += 1;
        if !self.ok {
            return Ok(false);
        }
        let result = self.search(assumptions);
        self.cancel_until(0);
        if self.n_learnt > LEARNT_LIMIT {
            self.drop_learnts();
        }
        result
    }

    fn search(&mut self, assumptions: &[Lit]) -> Result<bool, BudgetExceeded> {
        let mut decisions = 0u64;
        let mut restart_round = 0u32;
        let mut conflicts_left = luby(restart_round) * RESTART_UNIT;

        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(false);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cr = self.attach(learnt, true);
                    self.enqueue(asserting, Some(cr));
                }
                self.var_inc /= 0.95;
                conflicts_left = conflicts_left.saturating_sub(1);
                continue;
            }

            if conflicts_left == 0 {
                restart_round += 1;
                conflicts_left = luby(restart_round) * RESTART_UNIT;
                self.cancel_until(0);
                continue;
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match lit_value(&self.assigns, a) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => return Ok(false),
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let next = match next.or_else(|| self.pick_branch()) {
                Some(l) => l,
                None => {
                    self.model = self.assigns.iter().map(|&v| v == TRUE).collect();
                    return Ok(true);
                }
            };
            decisions += 1;
            self.stats.decisions += 1;
            if decisions > self.budget {
                return Err(BudgetExceeded {
                    budget: self.budget,
                });
            }
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    /// Value of `v` in the model found by the last satisfiable `solve`.
    pub fn model_value(&self, v: Var) -> Option<bool> {
        self.model.get(v.index()).copied()
    }

    fn drop_learnts(&mut self) {
        let kept: Vec<Clause> = self.clauses.drain(..).filter(|c| !c.learnt).collect();
        self.clauses = kept;
        for w in &mut self.watches {
            w.clear();
        }
        for (cr, c) in self.clauses.iter().enumerate() {
            self.watches[c.lits[0].index()].push(cr);
            self.watches[c.lits[1].index()].push(cr);
        }
        // Level-0 reasons are never inspected by conflict analysis.
        for r in &mut self.reason {
            *r = None;
        }
        self.n_learnt = 0;
    }
}

fn luby(index: u32) -> u64 {
    let mut x = u64::from(index);
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(s: &mut Solver, n: usize) -> Vec<Var> {
        (0..n).map(|_| s.new_var()).collect()
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_sat_and_unsat() {
        let mut s = Solver::new();
        let v = lits(&mut s, 2);
        let (a, b) = (Lit::positive(v[0]), Lit::positive(v[1]));
        assert!(s.add_clause(&[a, b]));
        assert!(s.add_clause(&[!a]));
        assert_eq!(s.solve(&[]), Ok(true));
        assert_eq!(s.model_value(v[1]), Some(true));
        assert!(!s.add_clause(&[!b]));
        assert_eq!(s.solve(&[]), Ok(false));
    }

    #[test]
    fn assumptions_do_not_poison_the_solver() {
        let mut s = Solver::new();
        let v = lits(&mut s, 3);
        let (a, b, c) = (Lit::positive(v[0]), Lit::positive(v[1]), Lit::positive(v[2]));
        s.add_clause(&[!a, b]);
        s.add_clause(&[!b, c]);
        assert_eq!(s.solve(&[a, !c]), Ok(false));
        assert_eq!(s.solve(&[a]), Ok(true));
        assert_eq!(s.model_value(v[2]), Some(true));
        assert_eq!(s.solve(&[!c]), Ok(true));
    }

    /// Pigeonhole 5 -> 4: unsatisfiable and needs real search.
    #[test]
    fn pigeonhole_is_unsat() {
        let (p, h) = (5, 4);
        let mut s = Solver::new();
        let x: Vec<Vec<Lit>> = (0..p)
            .map(|_| (0..h).map(|_| Lit::positive(s.new_var())).collect())
            .collect();
        for row in &x {
            s.add_clause(row);
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&[!x[a][j], !x[b][j]]);
                }
            }
        }
        assert_eq!(s.solve(&[]), Ok(false));
    }

    #[test]
    fn budget_is_enforced() {
        let mut s = Solver::new();
        let v = lits(&mut s, 20);
        for w in v.windows(2) {
            s.add_clause(&[Lit::positive(w[0]), Lit::positive(w[1])]);
        }
        s.set_decision_budget(1);
        assert!(s.solve(&[]).is_err());
        s.set_decision_budget(1_000);
        assert_eq!(s.solve(&[]), Ok(true));
    }
}
