//! Rational functions F_q(T), used for exact linear algebra over the
//! subfield F_q(T) ⊂ F_q((T)) when every input entry is a Laurent polynomial.

use crate::error::{Error, Result};
use crate::ff::FiniteField;
use crate::fpoly::{self, FPoly};
use crate::series::Series;
use std::sync::Arc;

/// num/den in lowest terms with den monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: FPoly,
    pub den: FPoly,
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc { num: Vec::new(), den: vec![1] }
    }
    pub fn one() -> RatFunc {
        RatFunc { num: vec![1], den: vec![1] }
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
    pub fn new(f: &FiniteField, num: FPoly, den: FPoly) -> Result<RatFunc> {
        let mut num = num;
        let mut den = den;
        fpoly::trim(&mut num);
        fpoly::trim(&mut den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        if num.is_empty() {
            return Ok(Self::zero());
        }
        let g = fpoly::gcd(f, &num, &den);
        num = fpoly::divrem(f, &num, &g).0;
        den = fpoly::divrem(f, &den, &g).0;
        let l = *den.last().unwrap();
        let li = f.inv(l)?;
        Ok(RatFunc { num: fpoly::scale(f, &num, li), den: fpoly::scale(f, &den, li) })
    }
    /// The exact Laurent polynomial carried by `s`, if any.
    pub fn from_series(f: &FiniteField, s: &Series) -> Option<RatFunc> {
        if !s.is_exact() {
            return None;
        }
        if s.is_exact_zero() {
            return Some(Self::zero());
        }
        let v = s.start();
        let digits = s.digits().to_vec();
        if v >= 0 {
            let mut num = vec![0u32; v as usize];
            num.extend(digits);
            Self::new(f, num, vec![1]).ok()
        } else {
            let mut den = vec![0u32; (-v) as usize];
            den.push(1);
            Self::new(f, digits, den).ok()
        }
    }
    /// Laurent expansion; exact when the denominator is a power of T.
    pub fn to_series(&self, field: &Arc<FiniteField>, rel: i64) -> Result<Series> {
        let num = Series::from_coeffs(field, 0, self.num.clone(), None);
        let den = Series::from_coeffs(field, 0, self.den.clone(), None);
        match num.div_exact(&den) {
            Some(q) => Ok(q),
            None => num.div(&den, rel),
        }
    }
    pub fn add(&self, f: &FiniteField, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let n = fpoly::add(f, &fpoly::mul(f, &self.num, &o.den), &fpoly::mul(f, &o.num, &self.den));
        Self::new(f, n, fpoly::mul(f, &self.den, &o.den)).unwrap()
    }
    pub fn neg(&self, f: &FiniteField) -> RatFunc {
        RatFunc { num: fpoly::scale(f, &self.num, f.neg(1)), den: self.den.clone() }
    }
    pub fn sub(&self, f: &FiniteField, o: &RatFunc) -> RatFunc {
        self.add(f, &o.neg(f))
    }
    pub fn mul(&self, f: &FiniteField, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(f, fpoly::mul(f, &self.num, &o.num), fpoly::mul(f, &self.den, &o.den)).unwrap()
    }
    pub fn inv(&self, f: &FiniteField) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(f, self.den.clone(), self.num.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations() {
        let f = FiniteField::from_order(3).unwrap();
        let a = RatFunc::new(&f, vec![1, 1], vec![0, 1]).unwrap(); // (1+T)/T
        let b = a.inv(&f).unwrap();
        assert_eq!(a.mul(&f, &b), RatFunc::one());
        assert!(a.sub(&f, &a).is_zero());
        let s = a.to_series(&f, 10).unwrap();
        assert_eq!(s.to_text(), Series::parse(&f, "T^-1 + 1").unwrap().to_text());
    }
}
