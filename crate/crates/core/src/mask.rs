//! ON/OFF beam activity masks.

use std::fmt;

/// Largest number of beams a [`BeamMask`] can hold.
pub const MAX_BEAMS: usize = 32;

/// Which base station a mask belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Pbs,
    Sbs,
}

/// Per-beam activity indicators of one base station in one interval.
///
/// Bit `k` of the dense encoding is beam `k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BeamMask {
    bits: u32,
    len: u8,
    owner: Owner,
}

impl BeamMask {
    pub fn empty(owner: Owner, len: usize) -> Self {
        assert!(len <= MAX_BEAMS, "beam count {len} exceeds {MAX_BEAMS}");
        Self {
            bits: 0,
            len: len as u8,
            owner,
        }
    }

    pub fn full(owner: Owner, len: usize) -> Self {
        let mut mask = Self::empty(owner, len);
        mask.bits = Self::all_bits(len);
        mask
    }

    /// Builds a mask from its dense encoding. Panics if bits beyond `len` are set.
    pub fn from_bits(owner: Owner, len: usize, bits: u32) -> Self {
        let mut mask = Self::empty(owner, len);
        assert!(
            bits & !Self::all_bits(len) == 0,
            "mask bits {bits:#x} out of range for {len} beams"
        );
        mask.bits = bits;
        mask
    }

    pub fn from_indices(owner: Owner, len: usize, on: &[usize]) -> Self {
        let mut mask = Self::empty(owner, len);
        for &k in on {
            mask.set(k, true);
        }
        mask
    }

    fn all_bits(len: usize) -> u32 {
        if len == 32 {
            u32::MAX
        } else {
            (1u32 << len) - 1
        }
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == Self::all_bits(self.len())
    }

    #[inline]
    pub fn owner(&self) -> Owner {
        self.owner
    }

    #[inline]
    pub fn popcount(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len(), "beam {k} out of range");
        self.bits >> k & 1 == 1
    }

    pub fn set(&mut self, k: usize, on: bool) {
        assert!(k < self.len(), "beam {k} out of range");
        if on {
            self.bits |= 1 << k;
        } else {
            self.bits &= !(1 << k);
        }
    }

    /// Indices of the ON beams, ascending.
    pub fn iter_on(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.len()).filter(move |k| bits >> k & 1 == 1)
    }

    /// True if every ON beam of `self` is also ON in `other`.
    pub fn is_submask_of(&self, other: &BeamMask) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &BeamMask) -> BeamMask {
        debug_assert_eq!(self.len, other.len);
        BeamMask {
            bits: self.bits | other.bits,
            ..*self
        }
    }

    /// Every mask of `len` beams in dense-encoding order.
    pub fn enumerate(owner: Owner, len: usize) -> impl Iterator<Item = BeamMask> {
        let count = 1u64 << len;
        (0..count).map(move |bits| BeamMask::from_bits(owner, len, bits as u32))
    }
}

impl fmt::Debug for BeamMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.owner, self)
    }
}

/// Beam 0 first, e.g. `110` for beams 0 and 1 ON out of three.
impl fmt::Display for BeamMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_and_popcount() {
        let m = BeamMask::from_indices(Owner::Pbs, 8, &[0, 3, 7]);
        assert_eq!(m.bits(), 0b1000_1001);
        assert_eq!(m.popcount(), 3);
        assert_eq!(m.iter_on().collect::<Vec<_>>(), vec![0, 3, 7]);
        assert_eq!(m.to_string(), "10010001");
    }

    #[test]
    fn full_and_empty() {
        assert!(BeamMask::full(Owner::Sbs, 32).is_full());
        assert_eq!(BeamMask::full(Owner::Sbs, 5).bits(), 31);
        assert!(BeamMask::empty(Owner::Sbs, 5).is_empty());
        assert_eq!(BeamMask::enumerate(Owner::Pbs, 3).count(), 8);
    }

    #[test]
    fn submask() {
        let a = BeamMask::from_bits(Owner::Sbs, 4, 0b0101);
        let b = BeamMask::from_bits(Owner::Sbs, 4, 0b0111);
        assert!(a.is_submask_of(&b));
        assert!(!b.is_submask_of(&a));
    }

    #[test]
    #[should_panic]
    fn out_of_range_bits_rejected() {
        BeamMask::from_bits(Owner::Pbs, 2, 0b100);
    }
}
