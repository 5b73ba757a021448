//! The rational function field `GF(2)(T)`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use super::{BinPoly, FieldError};

/// A reduced fraction of binary polynomials.
///
/// Invariants: the denominator is nonzero, numerator and denominator are
/// coprime, and zero is stored as `0/1`. Every nonzero polynomial over GF(2)
/// is monic, so this form is canonical and `==` is value equality.
/// Negative powers of `T` live in the denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: BinPoly,
    den: BinPoly,
}

impl Default for RationalFn {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFn {
    pub fn zero() -> Self {
        Self { num: BinPoly::zero(), den: BinPoly::one() }
    }

    pub fn one() -> Self {
        Self { num: BinPoly::one(), den: BinPoly::one() }
    }

    pub fn from_poly(p: BinPoly) -> Self {
        Self { num: p, den: BinPoly::one() }
    }

    pub fn new(num: BinPoly, den: BinPoly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: BinPoly, den: BinPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Self { num, den }
        } else {
            Self { num: num.div_exact(&g), den: den.div_exact(&g) }
        }
    }

    /// `T^k` for any integer `k`.
    pub fn tpow(k: i64) -> Self {
        let e = k.unsigned_abs() as usize;
        if k >= 0 {
            Self::from_poly(BinPoly::monomial(e))
        } else {
            Self { num: BinPoly::one(), den: BinPoly::monomial(e) }
        }
    }

    /// `1 / (1 + T^w)`; fails for `w = 0` where the denominator vanishes.
    pub fn inv_one_plus_tpow(w: i64) -> Result<Self, FieldError> {
        if w == 0 {
            return Err(FieldError::DivideByZero);
        }
        let e = w.unsigned_abs() as usize;
        let base = BinPoly::one_plus_monomial(e);
        if w > 0 {
            Ok(Self { num: BinPoly::one(), den: base })
        } else {
            // 1/(1 + T^-e) = T^e/(T^e + 1)
            Ok(Self { num: BinPoly::monomial(e), den: base })
        }
    }

    pub fn numer(&self) -> &BinPoly {
        &self.num
    }

    pub fn denom(&self) -> &BinPoly {
        &self.den
    }

    pub fn into_parts(self) -> (BinPoly, BinPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add_ref(&self, other: &RationalFn) -> RationalFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::reduced(self.num.add(&other.num), self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            // coprime denominators: the sum is already reduced
            return Self::from_parts_unchecked(num, self.den.mul(&other.den));
        }
        let d1 = self.den.div_exact(&g);
        let d2 = other.den.div_exact(&g);
        let num = self.num.mul(&d2).add(&other.num.mul(&d1));
        if num.is_zero() {
            return Self::zero();
        }
        // any common factor of num and d1*d2*g divides g
        let h = num.gcd(&g);
        let den = d1.mul(&other.den);
        if h.is_one() {
            Self { num, den }
        } else {
            Self { num: num.div_exact(&h), den: den.div_exact(&h) }
        }
    }

    fn from_parts_unchecked(num: BinPoly, den: BinPoly) -> Self {
        if num.is_zero() {
            Self::zero()
        } else {
            Self { num, den }
        }
    }

    pub fn mul_ref(&self, other: &RationalFn) -> RationalFn {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = other.den.div_exact(&g1);
        let n2 = other.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        Self { num: n1.mul(&n2), den: d1.mul(&d2) }
    }

    /// Multiplication by `T^k`.
    pub fn mul_tpow(&self, k: i64) -> RationalFn {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let e = k.unsigned_abs() as usize;
        if k > 0 {
            let cancel = self.den.trailing_zeros().min(e);
            Self { num: self.num.shl(e - cancel), den: self.den.shr(cancel) }
        } else {
            let cancel = self.num.trailing_zeros().min(e);
            Self { num: self.num.shr(cancel), den: self.den.shl(e - cancel) }
        }
    }

    pub fn inv(&self) -> Result<RationalFn, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        Ok(Self { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn div_ref(&self, other: &RationalFn) -> Result<RationalFn, FieldError> {
        Ok(self.mul_ref(&other.inv()?))
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.add_ref(rhs)
    }
}

impl Add for RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: RationalFn) -> RationalFn {
        self.add_ref(&rhs)
    }
}

impl AddAssign<&RationalFn> for RationalFn {
    fn add_assign(&mut self, rhs: &RationalFn) {
        *self = self.add_ref(rhs);
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        self.mul_ref(rhs)
    }
}

impl Mul for RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: RationalFn) -> RationalFn {
        self.mul_ref(&rhs)
    }
}

impl From<BinPoly> for RationalFn {
    fn from(p: BinPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &BinPoly| {
            let s = p.to_string();
            if p.exponents().nth(1).is_some() {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(exps: &[usize]) -> BinPoly {
        BinPoly::from_exponents(exps.iter().copied())
    }

    #[test]
    fn inverse_powers() {
        assert!((RationalFn::tpow(-2) * RationalFn::tpow(2)).is_one());
    }

    #[test]
    fn doubled_fraction_vanishes() {
        let x = RationalFn::inv_one_plus_tpow(3).unwrap();
        assert!((&x + &x).is_zero());
    }

    #[test]
    fn common_denominator_cancels() {
        // T^2/(1+T) + T/(1+T) = T
        let den = poly(&[0, 1]);
        let a = RationalFn::new(poly(&[2]), den.clone()).unwrap();
        let b = RationalFn::new(poly(&[1]), den).unwrap();
        assert_eq!(a + b, RationalFn::tpow(1));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RationalFn::new(BinPoly::one(), BinPoly::zero()), Err(FieldError::DivideByZero));
        assert_eq!(RationalFn::zero().inv(), Err(FieldError::DivideByZero));
        assert_eq!(RationalFn::inv_one_plus_tpow(0), Err(FieldError::DivideByZero));
    }

    #[test]
    fn negative_weight_denominator() {
        // 1/(1 + T^-3) * (1 + T^-3) = 1
        let x = RationalFn::inv_one_plus_tpow(-3).unwrap();
        let y = RationalFn::one() + RationalFn::tpow(-3);
        assert!((x * y).is_one());
    }

    #[test]
    fn mul_tpow_matches_mul() {
        let x = RationalFn::new(poly(&[0, 4]), poly(&[2, 3])).unwrap();
        for k in -7..7 {
            assert_eq!(x.mul_tpow(k), &x * &RationalFn::tpow(k));
        }
    }

    #[test]
    fn display_forms() {
        let x = RationalFn::new(poly(&[0, 2]), poly(&[0, 1, 5])).unwrap();
        assert_eq!(x.to_string(), "(T^2 + 1)/(T^5 + T + 1)");
        assert_eq!(RationalFn::tpow(-2).to_string(), "1/T^2");
    }
}
