//! Dense bit vectors over GF(2) and an incremental elimination basis.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, on: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        if on {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// XOR restricted to the word range `[lo, hi)`.
    #[inline]
    fn xor_range(&mut self, other: &BitVector, lo: usize, hi: usize) {
        for (a, b) in self.words[lo..hi].iter_mut().zip(&other.words[lo..hi]) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set bit at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / 64;
        let mut w = self.words[wi] & (!0u64 << (from % 64));
        loop {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut at = 0;
        core::iter::from_fn(move || {
            let i = self.next_one(at)?;
            at = i + 1;
            Some(i)
        })
    }

    fn last_word(&self) -> usize {
        self.words.iter().rposition(|&w| w != 0).map_or(0, |i| i + 1)
    }
}

/// Row-echelon basis of a subspace of `GF(2)^len`, each row stored at the
/// index of its lowest set bit.
#[derive(Clone, Debug)]
pub struct XorBasis {
    len: usize,
    rows: Vec<Option<(BitVector, usize)>>,
    rank: usize,
}

impl XorBasis {
    pub fn new(len: usize) -> Self {
        XorBasis { len, rows: vec![None; len], rank: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduces `v` in place until its lowest set bit has no pivot row.
    /// Returns that bit, or `None` when `v` reduced to zero.
    fn reduce(&self, v: &mut BitVector) -> Option<usize> {
        let mut at = 0;
        while let Some(b) = v.next_one(at) {
            match &self.rows[b] {
                Some((row, hi)) => v.xor_range(row, b / 64, *hi),
                None => return Some(b),
            }
            at = b + 1;
        }
        None
    }

    /// Adds `v`; returns whether it was independent of the current rows.
    pub fn insert(&mut self, mut v: BitVector) -> bool {
        assert_eq!(v.len, self.len);
        match self.reduce(&mut v) {
            Some(pivot) => {
                let hi = v.last_word();
                self.rows[pivot] = Some((v, hi));
                self.rank += 1;
                true
            }
            None => false,
        }
    }

    /// Membership in the span, by full reduction.
    pub fn contains(&self, v: &BitVector) -> bool {
        assert_eq!(v.len, self.len);
        let mut r = v.clone();
        let mut at = 0;
        while let Some(b) = r.next_one(at) {
            match &self.rows[b] {
                Some((row, hi)) => r.xor_range(row, b / 64, *hi),
                None => return false,
            }
            at = b + 1;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_operations() {
        let mut v = BitVector::from_indices(130, [0, 64, 129]);
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.next_one(1), Some(64));
        v.toggle(64);
        assert_eq!(v.next_one(1), Some(129));
        let w = BitVector::from_indices(130, [0, 129]);
        v.xor_assign(&w);
        assert!(v.is_zero());
    }

    #[test]
    fn span_membership() {
        let mut b = XorBasis::new(8);
        assert!(b.insert(BitVector::from_indices(8, [0, 1])));
        assert!(b.insert(BitVector::from_indices(8, [1, 2])));
        assert!(!b.insert(BitVector::from_indices(8, [0, 2])));
        assert_eq!(b.rank(), 2);
        assert!(b.contains(&BitVector::from_indices(8, [0, 2])));
        assert!(b.contains(&BitVector::zeros(8)));
        assert!(!b.contains(&BitVector::from_indices(8, [0])));
        assert!(!b.contains(&BitVector::from_indices(8, [3, 4])));
    }

    #[test]
    fn span_matches_subset_search() {
        // All 2^k combinations of k random vectors against membership.
        let key = crate::rng::StreamKey::new(5, 0);
        let mut rng = key.rng();
        for _ in 0..50 {
            let len = 70;
            let k = 6;
            let gens: Vec<BitVector> =
                (0..k).map(|_| BitVector::from_indices(len, (0..len).filter(|_| rng.next_u64().is_multiple_of(9)))).collect();
            let mut basis = XorBasis::new(len);
            for g in &gens {
                basis.insert(g.clone());
            }
            let mut reachable = Vec::new();
            for mask in 0..1u32 << k {
                let mut s = BitVector::zeros(len);
                for (i, g) in gens.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        s.xor_assign(g);
                    }
                }
                assert!(basis.contains(&s));
                reachable.push(s);
            }
            for _ in 0..20 {
                let probe = BitVector::from_indices(len, (0..len).filter(|_| rng.next_u64().is_multiple_of(9)));
                assert_eq!(basis.contains(&probe), reachable.contains(&probe));
            }
        }
    }
}
