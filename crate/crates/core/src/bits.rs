//! Compact bit storage for site states.

/// Fixed-length bit vector backed by `u64` words.
///
/// Trailing bits of the last word are kept zero so that `==` and `Hash`
/// work on the raw words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / 64];
        let mask = 1u64 << (i % 64);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Flip every bit (trailing slack stays zero).
    pub fn flip_all(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        let slack = self.words.len() * 64 - self.len;
        if slack > 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX >> slack;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_flip() {
        let mut b = BitVec::zeros(70);
        b.set(0, true);
        b.set(69, true);
        assert!(b.get(0) && b.get(69) && !b.get(35));
        assert_eq!(b.count_ones(), 2);
        b.flip_all();
        assert_eq!(b.count_ones(), 68);
        b.toggle(5);
        assert!(!b.get(5));
    }

    #[test]
    fn flip_all_is_involution_and_hash_safe() {
        let mut b = BitVec::zeros(130);
        b.set(100, true);
        let orig = b.clone();
        b.flip_all();
        b.flip_all();
        assert_eq!(b, orig);
    }
}
