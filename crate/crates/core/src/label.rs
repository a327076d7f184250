//! Fixed-width bit strings used as wire labels, keys and field elements.

use std::fmt;
use std::ops::{BitAnd, BitXor, BitXorAssign};

use rand::Rng;

/// Label widths accepted by the garbling schemes.
pub const SUPPORTED_K: [usize; 4] = [16, 32, 64, 128];

/// A value of at most 128 bits, kept in the low bits of a `u128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Label(pub u128);

impl Label {
    pub const ZERO: Label = Label(0);

    #[inline]
    pub fn lsb(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn with_lsb(self, bit: bool) -> Label {
        Label((self.0 & !1) | bit as u128)
    }

    /// `self` if `bit`, otherwise zero.
    #[inline]
    pub fn select(self, bit: bool) -> Label {
        Label(self.0 & (bit as u128).wrapping_neg())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Label {
        Label(rng.gen::<u128>() & mask(k))
    }

    /// Little-endian encoding in `k / 8` bytes.
    pub fn to_bytes(self, k: usize) -> Vec<u8> {
        self.0.to_le_bytes()[..k / 8].to_vec()
    }

    pub fn write_bytes(self, k: usize, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.0.to_le_bytes()[..k / 8]);
    }

    /// Reads `k / 8` little-endian bytes. Panics if `bytes` is shorter.
    pub fn from_bytes(bytes: &[u8], k: usize) -> Label {
        let mut buf = [0u8; 16];
        buf[..k / 8].copy_from_slice(&bytes[..k / 8]);
        Label(u128::from_le_bytes(buf))
    }
}

/// Bit mask with the low `k` bits set.
#[inline]
pub const fn mask(k: usize) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

impl BitXor for Label {
    type Output = Label;
    #[inline]
    fn bitxor(self, rhs: Label) -> Label {
        Label(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for Label {
    #[inline]
    fn bitxor_assign(&mut self, rhs: Label) {
        self.0 ^= rhs.0;
    }
}

impl BitAnd for Label {
    type Output = Label;
    #[inline]
    fn bitand(self, rhs: Label) -> Label {
        Label(self.0 & rhs.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({:032x})", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl From<u128> for Label {
    fn from(v: u128) -> Self {
        Label(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bytes_round_trip() {
        let l = Label(0x0102_0304_0506_0708_090a_0b0c_0d0e_0f10);
        assert_eq!(l.to_bytes(128)[0], 0x10);
        assert_eq!(Label::from_bytes(&l.to_bytes(128), 128), l);
        assert_eq!(Label::from_bytes(&l.to_bytes(32), 32), Label(0x0d0e_0f10));
    }

    #[test]
    fn bit_helpers() {
        assert!(Label(3).lsb());
        assert_eq!(Label(3).with_lsb(false), Label(2));
        assert_eq!(Label(9).select(false), Label::ZERO);
        assert_eq!(Label(9).select(true), Label(9));
        assert_eq!(mask(16), 0xffff);
    }
}
