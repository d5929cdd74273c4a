//! Fixed-width bit sets indexing points of a lattice or cells of a grid.
//!
//! All set-level reasoning in the workbench (regions, covers, packings)
//! runs over these masks, so the type carries a total order for
//! deterministic tie-breaking in searches.

use std::fmt;

/// Bit set over a universe of `len` elements.
///
/// Word storage is canonical: trailing bits above `len` are always zero,
/// so `Eq`/`Ord`/`Hash` can work on the raw words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask {
    len: usize,
    words: Box<[u64]>,
}

impl Mask {
    pub fn empty(len: usize) -> Self {
        let n_words = len.div_ceil(64).max(1);
        Mask {
            len,
            words: vec![0u64; n_words].into_boxed_slice(),
        }
    }

    pub fn full(len: usize) -> Self {
        let mut m = Mask::empty(len);
        for i in 0..len {
            m.insert(i);
        }
        m
    }

    pub fn singleton(len: usize, idx: usize) -> Self {
        let mut m = Mask::empty(len);
        m.insert(idx);
        m
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, idxs: I) -> Self {
        let mut m = Mask::empty(len);
        for i in idxs {
            m.insert(i);
        }
        m
    }

    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, idx: usize) {
        debug_assert!(idx < self.len);
        self.words[idx / 64] |= 1u64 << (idx % 64);
    }

    pub fn remove(&mut self, idx: usize) {
        debug_assert!(idx < self.len);
        self.words[idx / 64] &= !(1u64 << (idx % 64));
    }

    pub fn contains(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        self.words[idx / 64] & (1u64 << (idx % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &Mask) -> Mask {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &Mask) -> Mask {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Mask) -> Mask {
        self.zip_words(other, |a, b| a & !b)
    }

    /// Complement within the universe.
    pub fn complement(&self) -> Mask {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.trim();
        out
    }

    pub fn is_subset(&self, other: &Mask) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Mask) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// Lowest set bit, if any.
    pub fn first(&self) -> Option<usize> {
        for (wi, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.contains(*i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_words(&self, other: &Mask, f: impl Fn(u64, u64) -> u64) -> Mask {
        debug_assert_eq!(self.len, other.len);
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| f(*a, *b))
            .collect::<Vec<_>>()
            .into_boxed_slice();
        let mut m = Mask {
            len: self.len,
            words,
        };
        m.trim();
        m
    }

    fn trim(&mut self) {
        let tail = self.len % 64;
        let full_words = self.len / 64;
        for (wi, w) in self.words.iter_mut().enumerate() {
            if wi > full_words || (wi == full_words && tail == 0) {
                *w = 0;
            } else if wi == full_words {
                *w &= (1u64 << tail) - 1;
            }
        }
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mask{{{:?}}}", self.indices())
    }
}

/// Iterate all subsets of a mask with at most `cap` elements in the
/// universe (intended for small hosts; `2^count` subsets).
pub fn subsets_of(mask: &Mask) -> Vec<Mask> {
    let idxs = mask.indices();
    let n = idxs.len();
    assert!(n <= 24, "subset enumeration capped at 24 elements");
    let mut out = Vec::with_capacity(1 << n);
    for bits in 0u32..(1u32 << n) {
        let mut m = Mask::empty(mask.universe_len());
        for (j, idx) in idxs.iter().enumerate() {
            if bits & (1 << j) != 0 {
                m.insert(*idx);
            }
        }
        out.push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_mask(len: usize) -> impl Strategy<Value = Mask> {
        prop::collection::vec(any::<bool>(), len).prop_map(move |bits| {
            Mask::from_indices(len, bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
        })
    }

    #[test]
    fn basic_ops() {
        let mut m = Mask::empty(70);
        m.insert(0);
        m.insert(69);
        assert!(m.contains(0) && m.contains(69) && !m.contains(1));
        assert_eq!(m.count(), 2);
        assert_eq!(m.first(), Some(0));
        let c = m.complement();
        assert_eq!(c.count(), 68);
        assert!(c.is_disjoint(&m));
        assert_eq!(c.union(&m), Mask::full(70));
    }

    proptest! {
        #[test]
        fn set_algebra(a in arb_mask(70), b in arb_mask(70)) {
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            prop_assert!(a.intersect(&b).is_subset(&a));
            prop_assert!(a.is_subset(&a.union(&b)));
            prop_assert_eq!(a.difference(&b).union(&a.intersect(&b)), a.clone());
            prop_assert_eq!(a.complement().complement(), a);
        }
    }
}
