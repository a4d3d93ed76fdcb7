use std::cmp::Ordering;
use std::fmt;

use crate::logic::SentenceSet;

/// A set of axiom indices into a DPI's `K`, stored as a bitset.
///
/// Ordering is lexicographic over the ascending index lists, so `{0, 5}`
/// sorts before `{1}` and `{0}` before `{0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AxiomSet {
    words: Vec<u64>,
}

impl AxiomSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        if w >= self.words.len() || self.words[w] & (1 << b) == 0 {
            return false;
        }
        self.words[w] &= !(1 << b);
        self.trim();
        true
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest index plus one, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            Some(&w) => (self.words.len() - 1) * 64 + 64 - w.leading_zeros() as usize,
            None => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn is_subset(&self, other: &AxiomSet) -> bool {
        self.words.len() <= other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &AxiomSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &AxiomSet) -> AxiomSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w |= s;
        }
        AxiomSet { words }
    }

    pub fn difference(&self, other: &AxiomSet) -> AxiomSet {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        let mut s = AxiomSet { words };
        s.trim();
        s
    }

    pub fn with(&self, i: usize) -> AxiomSet {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> AxiomSet {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    /// `{0, .., n-1} \ self`.
    pub fn complement(&self, n: usize) -> AxiomSet {
        AxiomSet::full(n).difference(self)
    }

    pub fn labels<'a>(&self, kb: &'a SentenceSet) -> Vec<&'a str> {
        self.iter().map(|i| kb.label(i)).collect()
    }

    /// Renders the set as `{label, label}` against `kb`.
    pub fn display_with(&self, kb: &SentenceSet) -> String {
        format!("{{{}}}", self.labels(kb).join(", "))
    }
}

impl FromIterator<usize> for AxiomSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AxiomSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Ord for AxiomSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for AxiomSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_algebra() {
        let a: AxiomSet = [1, 3, 70].into_iter().collect();
        let b: AxiomSet = [3, 4].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert_eq!(a.iter().collect::<Vec<_>>(), [1, 3, 70]);
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), [1, 3, 4, 70]);
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), [1, 70]);
        assert!(!a.is_disjoint(&b));
        assert!(a.difference(&b).is_disjoint(&b));
        assert!(AxiomSet::new().is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.bound(), 71);
        assert_eq!(b.complement(6).iter().collect::<Vec<_>>(), [0, 1, 2, 5]);
    }

    #[test]
    fn equality_ignores_trailing_words() {
        let a: AxiomSet = [2].into_iter().collect();
        let b = a.with(100).without(100);
        assert_eq!(a, b);
        let mut h = std::collections::HashSet::new();
        h.insert(a);
        assert!(h.contains(&b));
    }

    #[test]
    fn lexicographic_order() {
        let s = |v: &[usize]| v.iter().copied().collect::<AxiomSet>();
        assert!(s(&[0, 5]) < s(&[1]));
        assert!(s(&[0]) < s(&[0, 1]));
        assert!(s(&[]) < s(&[0]));
    }
}
