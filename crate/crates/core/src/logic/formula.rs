//! Propositional formulas and labelled sentence collections.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A propositional formula.
///
/// `And` and `Or` always carry at least two children; use [`Formula::and`]
/// and [`Formula::or`] to build them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    True,
    False,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(is_identifier(&name), "invalid atom name {name:?}");
        Formula::Atom(name)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction of at least two formulas.
    ///
    /// # Panics
    /// If fewer than two children are supplied.
    pub fn and(children: Vec<Formula>) -> Self {
        assert!(children.len() >= 2, "`and` needs at least two children");
        Formula::And(children)
    }

    /// Disjunction of at least two formulas.
    ///
    /// # Panics
    /// If fewer than two children are supplied.
    pub fn or(children: Vec<Formula>) -> Self {
        assert!(children.len() >= 2, "`or` needs at least two children");
        Formula::Or(children)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates the formula under `assignment`; atoms absent from the map are false.
    pub fn eval(&self, assignment: &BTreeMap<&str, bool>) -> bool {
        match self {
            Formula::Atom(name) => assignment.get(name.as_str()).copied().unwrap_or(false),
            Formula::True => true,
            Formula::False => false,
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(cs) => cs.iter().all(|c| c.eval(assignment)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval(assignment)),
            Formula::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            Formula::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }

    /// Collects every atom name occurring in the formula.
    pub fn atoms_into<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name);
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.atoms_into(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.atoms_into(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.atoms_into(out);
                b.atoms_into(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.atoms_into(&mut out);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, op: &str, cs: &[Formula]) -> fmt::Result {
            write!(f, "({op}")?;
            for c in cs {
                write!(f, " {c}")?;
            }
            write!(f, ")")
        }
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Not(c) => write!(f, "(not {c})"),
            Formula::And(cs) => list(f, "and", cs),
            Formula::Or(cs) => list(f, "or", cs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(iff {a} {b})"),
        }
    }
}

pub(crate) const KEYWORDS: [&str; 7] = ["true", "false", "not", "and", "or", "implies", "iff"];

/// True iff `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered collection of labelled formulas with unique labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceSet {
    entries: Vec<(String, Formula)>,
}

impl SentenceSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sentence. Returns `false` (and leaves the set unchanged) if
    /// the label is already taken.
    pub fn push(&mut self, label: impl Into<String>, formula: Formula) -> bool {
        let label = label.into();
        if self.index_of(&label).is_some() {
            return false;
        }
        self.entries.push((label, formula));
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|(l, _)| l == label)
    }

    pub fn label(&self, index: usize) -> &str {
        &self.entries[index].0
    }

    pub fn formula(&self, index: usize) -> &Formula {
        &self.entries[index].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(l, f)| (l.as_str(), f))
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|(_, f)| f)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }
}

impl FromIterator<Formula> for SentenceSet {
    /// Labels formulas `ax1..axk` in iteration order.
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let entries = iter
            .into_iter()
            .enumerate()
            .map(|(i, f)| (format!("ax{}", i + 1), f))
            .collect();
        SentenceSet { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_prefix_syntax() {
        let f = Formula::and(vec![
            Formula::atom("A"),
            Formula::not(Formula::implies(Formula::atom("B"), Formula::False)),
        ]);
        assert_eq!(f.to_string(), "(and A (not (implies B false)))");
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("_x1"));
        assert!(is_identifier("Abc_9"));
        assert!(!is_identifier("9a"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a-b"));
    }

    #[test]
    fn sentence_set_rejects_duplicate_labels() {
        let mut s = SentenceSet::new();
        assert!(s.push("a", Formula::True));
        assert!(!s.push("a", Formula::False));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn eval_connectives() {
        let f = Formula::iff(Formula::atom("A"), Formula::not(Formula::atom("B")));
        let mut m = BTreeMap::new();
        m.insert("A", true);
        assert!(f.eval(&m));
        m.insert("B", true);
        assert!(!f.eval(&m));
    }
}
