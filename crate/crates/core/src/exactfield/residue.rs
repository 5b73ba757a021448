//! Residue fields `GF(2)[T]/(f) ≅ GF(2^64)` for irreducible `f` of degree 64.
//!
//! Reducing a matrix over `GF(2)(T)` modulo `f` can only lower its rank, and
//! a minor that is nonzero mod `f` is nonzero over `GF(2)(T)`; ranks mod `f`
//! are therefore certified lower bounds.

use super::poly::clmul;
use super::{BinPoly, RationalFn};

/// `f = T^64 + low`, with `deg low < 32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueField {
    low: u64,
}

/// Irreducible moduli `T^64 + low`, checked by Rabin's test in the unit tests.
pub const MODULI: [u64; 3] = [0x1b, 0x1d, 0x8d];

impl ResidueField {
    pub fn new(low: u64) -> Self {
        assert!(low >> 32 == 0, "modulus tail must have degree < 32");
        Self { low }
    }

    pub fn standard(k: usize) -> Self {
        Self::new(MODULI[k % MODULI.len()])
    }

    pub fn modulus(&self) -> BinPoly {
        BinPoly::from_words(&[self.low, 1])
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let (lo, hi) = clmul(a, b);
        // T^64 = low
        let (l2, h2) = clmul(hi, self.low);
        lo ^ l2 ^ clmul(h2, self.low).0
    }

    /// `y += f·x` elementwise.
    pub fn axpy(&self, y: &mut [u64], f: u64, x: &[u64]) {
        debug_assert_eq!(y.len(), x.len());
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("pclmulqdq") {
                // SAFETY: feature presence checked at runtime.
                return unsafe { axpy_x86(self.low, y, f, x) };
            }
        }
        for (a, &b) in y.iter_mut().zip(x) {
            *a ^= self.mul(f, b);
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u128) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, u64::MAX as u128 - 1)
    }

    pub fn reduce_poly(&self, p: &BinPoly) -> u64 {
        p.words().iter().rev().fold(0, |h, &w| self.mul(h, self.low) ^ w)
    }

    /// Image of `q`, or `None` when `f` divides its denominator.
    pub fn reduce(&self, q: &RationalFn) -> Option<u64> {
        let den = self.reduce_poly(q.denom());
        if den == 0 {
            return None;
        }
        Some(self.mul(self.reduce_poly(q.numer()), self.inv(den)))
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq")]
unsafe fn axpy_x86(low: u64, y: &mut [u64], f: u64, x: &[u64]) {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi128_si64, _mm_set_epi64x, _mm_srli_si128};
    let fv = _mm_set_epi64x(low as i64, f as i64);
    for (a, &b) in y.iter_mut().zip(x) {
        if b == 0 {
            continue;
        }
        let p = _mm_clmulepi64_si128(fv, _mm_set_epi64x(0, b as i64), 0x00);
        let lo = _mm_cvtsi128_si64(p) as u64;
        let hi = _mm_set_epi64x(0, _mm_cvtsi128_si64(_mm_srli_si128(p, 8)));
        // fold the high word twice: T^64 = low
        let q = _mm_clmulepi64_si128(fv, hi, 0x01);
        let l2 = _mm_cvtsi128_si64(q) as u64;
        let h2 = _mm_set_epi64x(0, _mm_cvtsi128_si64(_mm_srli_si128(q, 8)));
        let l3 = _mm_cvtsi128_si64(_mm_clmulepi64_si128(fv, h2, 0x01)) as u64;
        *a ^= lo ^ l2 ^ l3;
    }
}
