//! Arithmetic in GF(2^k) and low-degree Lagrange interpolation.
//!
//! Elements are polynomials over GF(2) stored little-endian in a `u128`
//! (bit i is the coefficient of x^i). Small integers double as field
//! elements through their binary representation, which is how the
//! interpolation nodes 0..7 are named.

use std::sync::OnceLock;

use thiserror::Error;

use crate::label::mask;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("no field of size 2^{0}")]
    UnsupportedSize(usize),
    #[error("operands live in GF(2^{left}) and GF(2^{right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("interpolation nodes are not distinct")]
    DuplicateNode,
    #[error("interpolation needs 1 to 3 points, got {0}")]
    PointCount(usize),
}

/// Low-order terms of the reduction polynomial for each supported size.
const fn reduction_low(k: usize) -> Option<u128> {
    match k {
        8 => Some(0x1B),   // x^8 + x^4 + x^3 + x + 1
        16 => Some(0x2B),  // x^16 + x^5 + x^3 + x + 1
        32 => Some(0x8D),  // x^32 + x^7 + x^3 + x^2 + 1
        64 => Some(0x1B),  // x^64 + x^4 + x^3 + x + 1
        128 => Some(0x87), // x^128 + x^7 + x^2 + x + 1
        _ => None,
    }
}

pub const FIELD_SIZES: [usize; 5] = [8, 16, 32, 64, 128];

/// Number of small nodes (0..NODES) with precomputed Lagrange weights.
const NODES: usize = 8;

/// Description of GF(2^k) plus cached interpolation weights.
pub struct Gf2k {
    k: usize,
    low: u128,
    mask: u128,
    /// Flattened `[mask][target][node]` Lagrange weights for node sets of size 2 and 3.
    weights: Vec<u128>,
}

impl std::fmt::Debug for Gf2k {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gf2k").field("k", &self.k).field("low", &self.low).finish()
    }
}

impl Gf2k {
    pub fn new(k: usize) -> Result<Self, FieldError> {
        let low = reduction_low(k).ok_or(FieldError::UnsupportedSize(k))?;
        let mut f = Gf2k { k, low, mask: mask(k), weights: Vec::new() };
        f.weights = f.build_weights();
        Ok(f)
    }

    /// Shared instance for `k`.
    pub fn get(k: usize) -> Result<&'static Gf2k, FieldError> {
        static FIELDS: [OnceLock<Gf2k>; 5] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let i = FIELD_SIZES.iter().position(|s| *s == k).ok_or(FieldError::UnsupportedSize(k))?;
        Ok(FIELDS[i].get_or_init(|| Gf2k::new(k).expect("listed size")))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Low-order terms of the reduction polynomial (the x^k term is implicit).
    pub fn reduction_low(&self) -> u128 {
        self.low
    }

    /// Multiplication by x.
    #[inline]
    pub fn double(&self, a: u128) -> u128 {
        let top = (a >> (self.k - 1)) & 1;
        ((a << 1) & self.mask) ^ (self.low & top.wrapping_neg())
    }

    /// Carry-less product reduced modulo the field polynomial, branch-free.
    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let mut acc = 0u128;
        let mut a = a;
        for i in 0..self.k {
            acc ^= a & ((b >> i) & 1).wrapping_neg();
            a = self.double(a);
        }
        acc
    }

    pub fn pow(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a;
        let mut acc = 1u128;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via a^(2^k - 2), or `None` for zero.
    pub fn inv(&self, a: u128) -> Option<u128> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, self.mask - 1))
    }

    fn build_weights(&self) -> Vec<u128> {
        let mut w = vec![0u128; 256 * NODES * NODES];
        for set in 0usize..256 {
            let count = set.count_ones();
            if count != 2 && count != 3 {
                continue;
            }
            let nodes: Vec<u128> = (0..NODES).filter(|i| set >> i & 1 == 1).map(|i| i as u128).collect();
            for t in 0..NODES as u128 {
                for &xi in &nodes {
                    let mut num = 1u128;
                    let mut den = 1u128;
                    for &xj in nodes.iter().filter(|x| **x != xi) {
                        num = self.mul(num, t ^ xj);
                        den = self.mul(den, xi ^ xj);
                    }
                    let weight = self.mul(num, self.inv(den).expect("distinct nodes"));
                    w[(set * NODES + t as usize) * NODES + xi as usize] = weight;
                }
            }
        }
        w
    }

    /// Evaluates at `at` the unique polynomial of degree < `points.len()`
    /// through `points`, whose nodes are distinct small integers below 8.
    /// Two or three points are supported.
    #[inline]
    pub fn interpolate_small(&self, points: &[(u8, u128)], at: u8) -> u128 {
        let mut set = 0usize;
        for (x, _) in points {
            set |= 1 << x;
        }
        debug_assert!(points.len() == set.count_ones() as usize && (2..=3).contains(&points.len()));
        let base = (set * NODES + at as usize) * NODES;
        let mut acc = 0;
        for &(x, y) in points {
            acc ^= self.mul(self.weights[base + x as usize], y);
        }
        acc
    }
}

/// An element of GF(2^k) that remembers its field size.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    bits: u128,
    k: u8,
}

impl FieldElem {
    /// Truncates `bits` to `k` bits. Panics if `k` is not a supported size.
    pub fn new(bits: u128, k: usize) -> FieldElem {
        assert!(reduction_low(k).is_some(), "unsupported field size {k}");
        FieldElem { bits: bits & mask(k), k: (k - 1) as u8 }
    }

    pub fn zero(k: usize) -> FieldElem {
        FieldElem::new(0, k)
    }

    pub fn one(k: usize) -> FieldElem {
        FieldElem::new(1, k)
    }

    pub fn bits(self) -> u128 {
        self.bits
    }

    pub fn k(self) -> usize {
        self.k as usize + 1
    }

    fn field(self) -> &'static Gf2k {
        Gf2k::get(self.k()).expect("constructed with a supported size")
    }
}

fn same_field(a: FieldElem, b: FieldElem) -> Result<&'static Gf2k, FieldError> {
    if a.k != b.k {
        return Err(FieldError::SizeMismatch { left: a.k(), right: b.k() });
    }
    Ok(a.field())
}

pub fn gf_add(a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
    same_field(a, b)?;
    Ok(FieldElem { bits: a.bits ^ b.bits, k: a.k })
}

pub fn gf_mul(a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
    let f = same_field(a, b)?;
    Ok(FieldElem { bits: f.mul(a.bits, b.bits), k: a.k })
}

/// Multiplication by x.
pub fn gf_double(a: FieldElem) -> FieldElem {
    FieldElem { bits: a.field().double(a.bits), k: a.k }
}

pub fn gf_quadruple(a: FieldElem) -> FieldElem {
    gf_double(gf_double(a))
}

pub fn gf_inv(a: FieldElem) -> Option<FieldElem> {
    a.field().inv(a.bits).map(|bits| FieldElem { bits, k: a.k })
}

/// Polynomial with coefficients listed from the constant term up.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.bits != 0)
    }
}

/// Lagrange interpolation through one to three points with distinct nodes.
pub fn interpolate(points: &[(FieldElem, FieldElem)]) -> Result<Poly, FieldError> {
    if points.is_empty() || points.len() > 3 {
        return Err(FieldError::PointCount(points.len()));
    }
    let k = points[0].0.k();
    for &(x, y) in points {
        same_field(points[0].0, x)?;
        same_field(points[0].0, y)?;
    }
    for i in 0..points.len() {
        for j in 0..i {
            if points[i].0 == points[j].0 {
                return Err(FieldError::DuplicateNode);
            }
        }
    }
    let f = points[0].0.field();
    let mut coeffs = vec![0u128; points.len()];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // basis = prod_{j != i} (X - x_j), built up coefficient-wise
        let mut basis = vec![1u128];
        let mut den = 1u128;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![0u128; basis.len() + 1];
            for (d, c) in basis.iter().enumerate() {
                next[d + 1] ^= c;
                next[d] ^= f.mul(*c, xj.bits);
            }
            basis = next;
            den = f.mul(den, xi.bits ^ xj.bits);
        }
        let scale = f.mul(yi.bits, f.inv(den).expect("distinct nodes"));
        for (d, c) in basis.iter().enumerate() {
            coeffs[d] ^= f.mul(*c, scale);
        }
    }
    Ok(Poly { coeffs: coeffs.into_iter().map(|c| FieldElem::new(c, k)).collect() })
}

/// Horner evaluation.
pub fn poly_eval(p: &Poly, x: FieldElem) -> FieldElem {
    let f = x.field();
    let mut acc = 0u128;
    for c in p.coeffs.iter().rev() {
        acc = f.mul(acc, x.bits) ^ c.bits;
    }
    FieldElem { bits: acc, k: x.k }
}
