use std::collections::HashMap;

use super::term::Term;

/// Bijection between terms and the index range `[0, len)`. Order is insertion
/// order; this is the engine-wide ordering of every tensor mode.
#[derive(Clone, Debug, Default)]
pub struct Dictionary {
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
}

impl Dictionary {
    pub fn new() -> Self {
        Dictionary::default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of `term`, interning it at the end if unseen.
    pub fn intern(&mut self, term: Term) -> usize {
        if let Some(&i) = self.index.get(&term) {
            return i;
        }
        let i = self.terms.len();
        self.index.insert(term.clone(), i);
        self.terms.push(term);
        i
    }

    pub fn get(&self, term: &Term) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&Term> {
        self.terms.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter()
    }

    /// Union dictionary in canonical order: all of `left` first, then the
    /// terms of `right` not already present. Returns the union together with
    /// index maps from each input into it.
    pub fn union(left: &Dictionary, right: &Dictionary) -> (Dictionary, Vec<usize>, Vec<usize>) {
        let mut merged = left.clone();
        let left_map: Vec<usize> = (0..left.len()).collect();
        let right_map: Vec<usize> = right
            .terms
            .iter()
            .map(|t| merged.intern(t.clone()))
            .collect();
        (merged, left_map, right_map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insertion_order_bijection() {
        let mut d = Dictionary::new();
        assert_eq!(d.intern(Term::iri("a")), 0);
        assert_eq!(d.intern(Term::iri("b")), 1);
        assert_eq!(d.intern(Term::iri("a")), 0);
        assert_eq!(d.len(), 2);
        assert_eq!(d.get(&Term::iri("b")), Some(1));
        assert_eq!(d.term(1), Some(&Term::iri("b")));
    }

    #[test]
    fn union_left_then_right_remainder() {
        let mut l = Dictionary::new();
        l.intern(Term::iri("x"));
        l.intern(Term::iri("y"));
        let mut r = Dictionary::new();
        r.intern(Term::iri("y"));
        r.intern(Term::iri("z"));
        let (u, lm, rm) = Dictionary::union(&l, &r);
        assert_eq!(u.len(), 3);
        assert_eq!(lm, vec![0, 1]);
        assert_eq!(rm, vec![1, 2]);
        assert_eq!(u.term(2), Some(&Term::iri("z")));
    }
}
