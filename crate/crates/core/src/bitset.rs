//! Fixed-size vertex sets packed one bit per vertex.

use crate::graph::VertexId;

/// A set of vertices of a graph with a fixed number of vertices.
///
/// Bits above `len` in the last word are always zero, so word-level
/// operations (popcount, equality, subset tests) never need masking.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn empty(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut set = Self {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        set.clear_tail();
        set
    }

    pub fn from_indices<I>(len: usize, indices: I) -> Self
    where
        I: IntoIterator<Item = VertexId>,
    {
        let mut set = Self::empty(len);
        for v in indices {
            set.insert(v);
        }
        set
    }

    /// Build from raw words; bits beyond `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut set = Self { words, len };
        set.clear_tail();
        set
    }

    /// Number of vertices in the universe (not the number of members).
    #[inline]
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        let v = v as usize;
        debug_assert!(v < self.len);
        (self.words[v >> 6] >> (v & 63)) & 1 == 1
    }

    /// Returns `true` if `v` was not already present.
    #[inline]
    pub fn insert(&mut self, v: VertexId) -> bool {
        let v = v as usize;
        assert!(v < self.len, "vertex {v} out of range for set of {}", self.len);
        let mask = 1u64 << (v & 63);
        let word = &mut self.words[v >> 6];
        let fresh = *word & mask == 0;
        *word |= mask;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: VertexId) {
        let v = v as usize;
        self.words[v >> 6] &= !(1u64 << (v & 63));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = (i as u32) << 6;
            BitIter(w).map(move |b| base + b)
        })
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    fn clear_tail(&mut self) {
        if self.len == 0 {
            self.words.fill(0);
        }
        let rem = self.len & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64).max(1)
}

/// Iterates the set bit positions of a word, lowest first.
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_set_has_no_tail_bits() {
        let s = VertexSet::full(70);
        assert_eq!(s.count(), 70);
        assert!(s.is_full());
        assert_eq!(s.words()[1], (1 << 6) - 1);
    }

    #[test]
    fn insert_iter_roundtrip() {
        let s = VertexSet::from_indices(130, [0, 5, 64, 129]);
        assert_eq!(s.to_vec(), vec![0, 5, 64, 129]);
        assert!(s.contains(64));
        assert!(!s.contains(63));
    }

    #[test]
    fn subset() {
        let a = VertexSet::from_indices(10, [1, 2]);
        let b = VertexSet::from_indices(10, [1, 2, 3]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(VertexSet::empty(10).is_subset(&a));
    }

    #[test]
    fn zero_length_universe() {
        let s = VertexSet::full(0);
        assert!(s.is_empty());
        assert!(s.is_full());
    }
}
