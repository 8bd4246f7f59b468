//! Packed bit strings for measurement records.

use std::fmt;

/// Fixed-length bit string packed into `u64` words, bit `i` in word `i / 64`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the whole string.
    pub fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }

    pub fn all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn all_one(&self) -> bool {
        self.count_ones() == self.len
    }

    #[inline]
    pub fn hamming(&self, other: &BitString) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Bits at `positions`, in that order.
    pub fn select(&self, positions: &[usize]) -> BitString {
        let mut out = BitString::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            out.set(k, self.get(p));
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics_across_word_boundary() {
        let mut s = BitString::zeros(70);
        s.set(0, true);
        s.set(65, true);
        assert!(s.get(65) && !s.get(64));
        assert_eq!(s.count_ones(), 2);
        assert!(!s.parity());
        let mut t = s.clone();
        t.flip(69);
        assert_eq!(s.hamming(&t), 1);
        assert_eq!(s.select(&[65, 1, 0]).to_bools(), vec![true, false, true]);
        assert_eq!(BitString::from_bools(&[true, false, true]).to_string(), "101");
        assert!(BitString::from_bools(&[true; 3]).all_one());
    }
}
