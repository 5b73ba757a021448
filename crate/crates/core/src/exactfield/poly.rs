//! Dense bit-packed polynomials over GF(2).

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::FieldError;

type Words = SmallVec<[u64; 2]>;

/// A polynomial in `GF(2)[T]`, one bit per coefficient, lowest degree first.
///
/// The word vector never carries a trailing zero word, so the zero
/// polynomial is the empty vector and equal values are bit-identical.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinPoly {
    words: Words,
}

/// Carry-less 64 x 64 -> 128 bit product, returned as (low, high).
#[inline]
pub(crate) fn clmul(a: u64, b: u64) -> (u64, u64) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: feature presence checked at runtime.
            return unsafe { clmul_x86(a, b) };
        }
    }
    clmul_portable(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq")]
unsafe fn clmul_x86(a: u64, b: u64) -> (u64, u64) {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi128_si64, _mm_set_epi64x, _mm_srli_si128};
    let x = _mm_set_epi64x(0, a as i64);
    let y = _mm_set_epi64x(0, b as i64);
    let p = _mm_clmulepi64_si128(x, y, 0);
    let lo = _mm_cvtsi128_si64(p) as u64;
    let hi = _mm_cvtsi128_si64(_mm_srli_si128(p, 8)) as u64;
    (lo, hi)
}

/// 4-bit windowed carry-less multiply.
#[inline]
fn clmul_portable(a: u64, b: u64) -> (u64, u64) {
    let mut table = [0u128; 16];
    let a = a as u128;
    for i in 1..16usize {
        let mut v = 0u128;
        for bit in 0..4 {
            if i >> bit & 1 == 1 {
                v ^= a << bit;
            }
        }
        table[i] = v;
    }
    let mut acc = 0u128;
    for nib in (0..16).rev() {
        acc <<= 4;
        acc ^= table[((b >> (4 * nib)) & 0xf) as usize];
    }
    (acc as u64, (acc >> 64) as u64)
}

impl BinPoly {
    pub fn zero() -> Self {
        Self { words: Words::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `T^k`.
    pub fn monomial(k: usize) -> Self {
        let mut words = Words::from_elem(0, k / 64 + 1);
        words[k / 64] = 1u64 << (k % 64);
        Self { words }
    }

    /// `1 + T^k`; zero when `k == 0`.
    pub fn one_plus_monomial(k: usize) -> Self {
        let mut p = Self::monomial(k);
        p.flip_bit(0);
        p
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    /// Repeated exponents cancel in pairs.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut p = Self::zero();
        for e in exps {
            p.flip_bit(e);
        }
        p
    }

    pub fn from_words(words: &[u64]) -> Self {
        let mut p = Self { words: words.iter().copied().collect() };
        p.trim();
        p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn trim(&mut self) {
        while let Some(&0) = self.words.last() {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    /// Number of factors of `T` dividing the polynomial (0 for the zero polynomial).
    pub fn trailing_zeros(&self) -> usize {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return i * 64 + w.trailing_zeros() as usize;
            }
        }
        0
    }

    pub fn coeff(&self, k: usize) -> bool {
        self.words.get(k / 64).is_some_and(|w| w >> (k % 64) & 1 == 1)
    }

    pub fn flip_bit(&mut self, k: usize) {
        let idx = k / 64;
        if idx >= self.words.len() {
            self.words.resize(idx + 1, 0);
        }
        self.words[idx] ^= 1u64 << (k % 64);
        self.trim();
    }

    /// Exponents of the nonzero terms, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn add_assign(&mut self, other: &BinPoly) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= *b;
        }
        self.trim();
    }

    pub fn add(&self, other: &BinPoly) -> BinPoly {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn mul(&self, other: &BinPoly) -> BinPoly {
        if self.is_zero() || other.is_zero() {
            return BinPoly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = Words::from_elem(0, self.words.len() + other.words.len());
        for (i, &a) in self.words.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.words.iter().enumerate() {
                let (lo, hi) = clmul(a, b);
                out[i + j] ^= lo;
                out[i + j + 1] ^= hi;
            }
        }
        let mut r = BinPoly { words: out };
        r.trim();
        r
    }

    /// Multiplication by `T^k`.
    pub fn shl(&self, k: usize) -> BinPoly {
        if self.is_zero() {
            return BinPoly::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut out = Words::from_elem(0, self.words.len() + ws + 1);
        for (i, &w) in self.words.iter().enumerate() {
            out[i + ws] ^= w << bs;
            if bs != 0 {
                out[i + ws + 1] ^= w >> (64 - bs);
            }
        }
        let mut r = BinPoly { words: out };
        r.trim();
        r
    }

    /// Floor division by `T^k` (drops the low `k` coefficients).
    pub fn shr(&self, k: usize) -> BinPoly {
        let (ws, bs) = (k / 64, k % 64);
        if ws >= self.words.len() {
            return BinPoly::zero();
        }
        let n = self.words.len() - ws;
        let mut out = Words::from_elem(0, n);
        for i in 0..n {
            let lo = self.words[i + ws] >> bs;
            let hi = if bs != 0 && i + ws + 1 < self.words.len() {
                self.words[i + ws + 1] << (64 - bs)
            } else {
                0
            };
            out[i] = lo | hi;
        }
        let mut r = BinPoly { words: out };
        r.trim();
        r
    }

    /// Euclidean division: returns `(q, r)` with `self = q * divisor + r`
    /// and `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &BinPoly) -> Result<(BinPoly, BinPoly), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::DivideByZero)?;
        let mut rem = self.clone();
        let mut quot = BinPoly::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot.flip_bit(shift);
            xor_shifted(&mut rem.words, &divisor.words, shift);
            rem.trim();
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, divisor: &BinPoly) -> Result<BinPoly, FieldError> {
        let dd = divisor.degree().ok_or(FieldError::DivideByZero)?;
        let mut rem = self.clone();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            xor_shifted(&mut rem.words, &divisor.words, rd - dd);
            rem.trim();
        }
        Ok(rem)
    }

    /// Division that is known to be exact; panics in debug builds otherwise.
    pub fn div_exact(&self, divisor: &BinPoly) -> BinPoly {
        if divisor.is_one() {
            return self.clone();
        }
        let (q, r) = self.divmod(divisor).expect("exact division by zero");
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// Greatest common divisor (binary algorithm); monic by construction.
    /// `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &BinPoly) -> BinPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_one() || other.is_one() {
            return BinPoly::one();
        }
        let tz_a = self.trailing_zeros();
        let tz_b = other.trailing_zeros();
        let shift = tz_a.min(tz_b);
        let mut a = self.shr(tz_a);
        let mut b = other.shr(tz_b);
        // both have constant term 1 from here on
        loop {
            match a.degree().cmp(&b.degree()) {
                Ordering::Less => std::mem::swap(&mut a, &mut b),
                Ordering::Equal if a == b => break,
                _ => {}
            }
            a.add_assign(&b);
            if a.is_zero() {
                a = b;
                break;
            }
            let tz = a.trailing_zeros();
            a = a.shr(tz);
            if a.is_one() {
                break;
            }
        }
        a.shl(shift)
    }
}

fn xor_shifted(target: &mut Words, src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    let need = src.len() + ws + 1;
    if target.len() < need {
        target.resize(need, 0);
    }
    for (i, &w) in src.iter().enumerate() {
        target[i + ws] ^= w << bs;
        if bs != 0 {
            target[i + ws + 1] ^= w >> (64 - bs);
        }
    }
}

impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let exps: Vec<usize> = self.exponents().collect();
        for (i, &e) in exps.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match e {
                0 => write!(f, "1")?,
                1 => write!(f, "T")?,
                _ => write!(f, "T^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(exps: &[usize]) -> BinPoly {
        BinPoly::from_exponents(exps.iter().copied())
    }

    #[test]
    fn characteristic_two() {
        let a = p(&[0, 1]);
        assert!(a.add(&a).is_zero());
    }

    #[test]
    fn gcd_frobenius() {
        // T^2 + 1 = (T + 1)^2
        assert_eq!(p(&[0, 2]).gcd(&p(&[0, 1])), p(&[0, 1]));
    }

    #[test]
    fn hand_product() {
        // (T^3 + T + 1)(T + 1) = T^4 + T^3 + T^2 + 1
        assert_eq!(p(&[0, 1, 3]).mul(&p(&[0, 1])), p(&[0, 2, 3, 4]));
    }

    #[test]
    fn divmod_roundtrip() {
        let a = p(&[0, 3, 7, 64, 130]);
        let b = p(&[1, 5, 66]);
        let (q, r) = a.divmod(&b).unwrap();
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b).add(&r), a);
        assert_eq!(a.divmod(&BinPoly::zero()), Err(FieldError::DivideByZero));
    }

    #[test]
    fn clmul_matches_portable() {
        let cases = [(0u64, 5u64), (u64::MAX, u64::MAX), (0x8000_0000_0000_0001, 0xdead_beef_1234_5678)];
        for (a, b) in cases {
            assert_eq!(clmul(a, b), clmul_portable(a, b));
            // bit-by-bit reference
            let mut lo = 0u64;
            let mut hi = 0u64;
            for i in 0..64 {
                if b >> i & 1 == 1 {
                    lo ^= a << i;
                    if i > 0 {
                        hi ^= a >> (64 - i);
                    }
                }
            }
            assert_eq!(clmul_portable(a, b), (lo, hi));
        }
    }

    #[test]
    fn shifts() {
        let a = p(&[0, 63, 64, 100]);
        assert_eq!(a.shl(70).shr(70), a);
        assert_eq!(a.shr(64), p(&[0, 36]));
        assert_eq!(a.trailing_zeros(), 0);
        assert_eq!(a.shl(5).trailing_zeros(), 5);
        assert_eq!(BinPoly::one_plus_monomial(0), BinPoly::zero());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[0, 1, 3]).to_string(), "T^3 + T + 1");
        assert_eq!(BinPoly::zero().to_string(), "0");
    }
}
