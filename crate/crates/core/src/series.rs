//! Laurent series over F_q known to an absolute precision O(T^M).
//!
//! A value is either exact (a finite Laurent polynomial, precision +∞) or
//! known modulo T^M. Exactness is preserved by ring operations; inversion of
//! a non-monomial produces an inexact value with a caller-chosen number of
//! significant terms. A value with no certified digit ("O(T^M)") is allowed
//! as an intermediate but refuses valuation queries.

use crate::error::{prec_err, Error, Result};
use crate::ff::FiniteField;
use std::fmt;
use std::sync::Arc;

/// Stand-in for +∞ in valuation and precision arithmetic.
pub const INF: i64 = i64::MAX / 4;

#[inline]
fn sat_add(a: i64, b: i64) -> i64 {
    if a >= INF || b >= INF {
        INF
    } else {
        a + b
    }
}

#[derive(Clone)]
pub struct TruncatedSeries {
    field: Arc<FiniteField>,
    // valuation of coeffs[0]; equals the precision for an O(T^M) value
    v: i64,
    coeffs: Vec<u32>,
    // None: exact
    prec: Option<i64>,
}

pub type Series = TruncatedSeries;

impl TruncatedSeries {
    pub fn zero(field: &Arc<FiniteField>) -> Self {
        TruncatedSeries { field: field.clone(), v: 0, coeffs: Vec::new(), prec: None }
    }
    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::constant(field, 1)
    }
    pub fn constant(field: &Arc<FiniteField>, c: u32) -> Self {
        Self::monomial(field, c, 0)
    }
    pub fn from_int(field: &Arc<FiniteField>, n: i64) -> Self {
        Self::constant(field, field.from_int(n))
    }
    pub fn monomial(field: &Arc<FiniteField>, c: u32, k: i64) -> Self {
        if c == 0 {
            return Self::zero(field);
        }
        TruncatedSeries { field: field.clone(), v: k, coeffs: vec![c], prec: None }
    }
    /// T^k.
    pub fn t_pow(field: &Arc<FiniteField>, k: i64) -> Self {
        Self::monomial(field, 1, k)
    }
    /// O(T^m).
    pub fn big_o(field: &Arc<FiniteField>, m: i64) -> Self {
        TruncatedSeries { field: field.clone(), v: m, coeffs: Vec::new(), prec: Some(m) }
    }
    /// Σ coeffs[i] T^{v+i}, exact when `prec` is None.
    pub fn from_coeffs(field: &Arc<FiniteField>, v: i64, coeffs: Vec<u32>, prec: Option<i64>) -> Self {
        let mut s = TruncatedSeries { field: field.clone(), v, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(m) = self.prec {
            let keep = (m - self.v).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        } else {
            while self.coeffs.last() == Some(&0) {
                self.coeffs.pop();
            }
        }
        let lead = self.coeffs.iter().position(|&c| c != 0);
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.v += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.v = self.prec.unwrap_or(0);
            }
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    /// Absolute precision; `None` for exact values.
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }
    pub fn abs_prec(&self) -> i64 {
        self.prec.unwrap_or(INF)
    }
    pub fn is_exact_zero(&self) -> bool {
        self.prec.is_none() && self.coeffs.is_empty()
    }
    /// No certified nonzero digit at the stored precision.
    pub fn is_indeterminate(&self) -> bool {
        self.prec.is_some() && self.coeffs.is_empty()
    }
    pub fn is_certified_nonzero(&self) -> bool {
        !self.coeffs.is_empty()
    }
    /// Valuation; +∞ (`INF`) for exact zero.
    pub fn valuation(&self) -> Result<i64> {
        if !self.coeffs.is_empty() {
            Ok(self.v)
        } else if self.prec.is_none() {
            Ok(INF)
        } else {
            Err(prec_err(format!("value is O(T^{}) and its valuation is undetermined", self.v)))
        }
    }
    /// A lower bound for the valuation that is always available.
    pub fn val_lb(&self) -> i64 {
        if !self.coeffs.is_empty() {
            self.v
        } else {
            self.prec.unwrap_or(INF)
        }
    }
    /// Number of certified significant terms (∞ for exact nonzero values).
    pub fn rel_prec(&self) -> i64 {
        match self.prec {
            None => INF,
            Some(m) => m - self.val_lb(),
        }
    }
    pub fn leading(&self) -> Option<u32> {
        self.coeffs.first().copied()
    }
    /// Coefficient of T^k; errors beyond the precision.
    pub fn coeff(&self, k: i64) -> Result<u32> {
        if k >= self.abs_prec() {
            return Err(prec_err(format!("coefficient of T^{k} beyond precision {}", self.abs_prec())));
        }
        Ok(self.coeff_or_zero(k))
    }
    pub fn coeff_or_zero(&self, k: i64) -> u32 {
        if k < self.v || self.coeffs.is_empty() {
            return 0;
        }
        self.coeffs.get((k - self.v) as usize).copied().unwrap_or(0)
    }
    /// Raw significant digits starting at `self.v`.
    pub fn digits(&self) -> &[u32] {
        &self.coeffs
    }
    pub fn start(&self) -> i64 {
        self.v
    }
    /// Largest exponent with a nonzero stored digit.
    pub fn degree(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.v + self.coeffs.len() as i64 - 1)
        }
    }
    pub fn is_monomial(&self) -> bool {
        self.prec.is_none() && self.coeffs.len() == 1
    }
    pub fn is_one(&self) -> bool {
        self.is_monomial() && self.v == 0 && self.coeffs[0] == 1
    }

    /// Reduce the precision to at most `m`.
    pub fn truncate(&self, m: i64) -> Self {
        let mut s = self.clone();
        let newp = self.abs_prec().min(m);
        if newp < INF {
            s.prec = Some(newp);
            if s.coeffs.is_empty() {
                s.v = newp;
            }
            s.normalize();
        }
        s
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        TruncatedSeries {
            field: f.clone(),
            v: self.v,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        debug_assert!(Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field);
        let f = &self.field;
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(INF).min(b.unwrap_or(INF))),
        };
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return match prec {
                None => Self::zero(f),
                Some(m) => Self::big_o(f, m),
            };
        }
        let lo = match (self.coeffs.is_empty(), other.coeffs.is_empty()) {
            (true, _) => other.v,
            (_, true) => self.v,
            _ => self.v.min(other.v),
        };
        let end_a = if self.coeffs.is_empty() { lo } else { self.v + self.coeffs.len() as i64 };
        let end_b = if other.coeffs.is_empty() { lo } else { other.v + other.coeffs.len() as i64 };
        let mut hi = end_a.max(end_b);
        if let Some(m) = prec {
            hi = hi.min(m);
        }
        if hi <= lo {
            return Self::big_o(f, prec.unwrap());
        }
        let mut out = vec![0u32; (hi - lo) as usize];
        if !self.coeffs.is_empty() {
            for (i, &c) in self.coeffs.iter().enumerate() {
                let k = self.v + i as i64;
                if k >= hi {
                    break;
                }
                out[(k - lo) as usize] = c;
            }
        }
        if !other.coeffs.is_empty() {
            for (i, &c) in other.coeffs.iter().enumerate() {
                let k = other.v + i as i64;
                if k >= hi {
                    break;
                }
                let slot = &mut out[(k - lo) as usize];
                *slot = if negate { f.sub(*slot, c) } else { f.add(*slot, c) };
            }
        }
        Self::from_coeffs(f, lo, out, prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(f);
        }
        let (la, lb) = (self.val_lb(), other.val_lb());
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (pa, pb) => Some(sat_add(pa.unwrap_or(INF), lb).min(sat_add(pb.unwrap_or(INF), la))),
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::big_o(f, prec.unwrap());
        }
        let v = self.v + other.v;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(m) = prec {
            len = len.min((m - v).max(0) as usize);
        }
        let mut out = vec![0u32; len];
        if f.p() == 2 && f.r() == 1 {
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 || i >= len {
                    continue;
                }
                let lim = (len - i).min(other.coeffs.len());
                for j in 0..lim {
                    out[i + j] ^= other.coeffs[j];
                }
            }
        } else {
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 || i >= len {
                    continue;
                }
                let lim = (len - i).min(other.coeffs.len());
                for j in 0..lim {
                    let b = other.coeffs[j];
                    if b != 0 {
                        out[i + j] = f.add(out[i + j], f.mul(a, b));
                    }
                }
            }
        }
        Self::from_coeffs(f, v, out, prec)
    }

    /// Multiply by a residue-field scalar.
    pub fn scale(&self, c: u32) -> Self {
        let f = &self.field;
        if c == 0 {
            return match self.prec {
                None => Self::zero(f),
                Some(m) => Self::big_o(f, m),
            };
        }
        TruncatedSeries {
            field: f.clone(),
            v: self.v,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by T^k.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.v += k;
        if let Some(m) = s.prec {
            s.prec = Some(m + k);
        }
        s
    }

    /// Multiplicative inverse. Exact monomials invert exactly; other exact
    /// values get `rel` significant terms; inexact values keep their
    /// relative precision.
    pub fn inv(&self, rel: i64) -> Result<Self> {
        let f = &self.field;
        if self.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs.is_empty() {
            return Err(prec_err("inverting a value with no certified digit"));
        }
        let c0inv = f.inv(self.coeffs[0])?;
        if self.is_monomial() {
            return Ok(Self::monomial(f, c0inv, -self.v));
        }
        let r = match self.prec {
            None => rel.max(1),
            Some(m) => m - self.v,
        } as usize;
        // b * a = 1 with a = Σ a_i T^i (normalized), recursively.
        let a = &self.coeffs;
        let mut b = vec![0u32; r];
        b[0] = c0inv;
        for k in 1..r {
            let mut s = 0u32;
            let lim = k.min(a.len() - 1);
            for i in 1..=lim {
                if a[i] != 0 && b[k - i] != 0 {
                    s = f.add(s, f.mul(a[i], b[k - i]));
                }
            }
            b[k] = f.neg(f.mul(s, c0inv));
        }
        Ok(Self::from_coeffs(f, -self.v, b, Some(-self.v + r as i64)))
    }

    pub fn div(&self, other: &Self, rel: i64) -> Result<Self> {
        if other.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact_zero() {
            return Ok(Self::zero(&self.field));
        }
        Ok(self.mul(&other.inv(rel)?))
    }

    /// Exact quotient of exact Laurent polynomials, if `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if !self.is_exact() || !other.is_exact() || other.coeffs.is_empty() {
            return None;
        }
        if self.coeffs.is_empty() {
            return Some(self.clone());
        }
        let f = &self.field;
        let (a, b) = (&self.coeffs, &other.coeffs);
        if a.len() < b.len() {
            return None;
        }
        let binv = f.inv(b[0]).ok()?;
        let mut rem = a.clone();
        let n = a.len() - b.len() + 1;
        let mut quo = vec![0u32; n];
        for k in 0..n {
            let c = f.mul(rem[k], binv);
            quo[k] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    rem[k + j] = f.sub(rem[k + j], f.mul(c, bj));
                }
            }
        }
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        Some(Self::from_coeffs(f, self.v - other.v, quo, None))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact equality of representations (same digits and same precision).
    pub fn same_as(&self, other: &Self) -> bool {
        self.v == other.v && self.coeffs == other.coeffs && self.prec == other.prec
    }

    /// Agreement of the two values modulo T^m.
    pub fn agrees_mod(&self, other: &Self, m: i64) -> bool {
        let d = self.sub(other);
        d.val_lb() >= m
    }

    /// Whether the two values are certified equal (difference exactly zero
    /// or certified beyond `m`) — `Err` when undecidable below `m`.
    pub fn eq_to(&self, other: &Self, m: i64) -> Result<bool> {
        let d = self.sub(other);
        if d.is_certified_nonzero() {
            return Ok(d.v >= m);
        }
        if d.is_exact_zero() || d.val_lb() >= m {
            return Ok(true);
        }
        Err(prec_err(format!("equality undecidable: difference is O(T^{})", d.val_lb())))
    }

    /// Apply a coefficient map into another field (e.g. an embedding).
    pub fn map_coeffs(&self, target: &Arc<FiniteField>, map: impl Fn(u32) -> u32) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| map(c)).collect();
        let mut s = TruncatedSeries { field: target.clone(), v: self.v, coeffs, prec: self.prec };
        s.normalize();
        s
    }

    /// Residue class in F_q of an element of 𝔬 (value at T = 0).
    pub fn residue(&self) -> Result<u32> {
        if self.val_lb() < 0 && self.is_certified_nonzero() {
            return Err(Error::InvalidInput("residue of a non-integral element".into()));
        }
        self.coeff(0)
    }

    /// Formal derivative d/dT.
    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs: Vec<u32> =
            self.coeffs.iter().enumerate().map(|(i, &c)| f.mul(c, f.from_int(self.v + i as i64))).collect();
        let prec = self.prec.map(|m| m - 1);
        Self::from_coeffs(f, self.v - 1, coeffs, prec)
    }

    /// Canonical text form, e.g. `T^-1 + 2 + T^3 + O(T^5)`.
    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let k = self.v + i as i64;
            let coef = if f.r() == 1 {
                format!("{c}")
            } else {
                let co = f.coords(c);
                format!("[{}]", co.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
            };
            let mon = match k {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{k}"),
            };
            let term = if mon.is_empty() {
                coef
            } else if c == 1 {
                mon
            } else {
                format!("{coef}*{mon}")
            };
            parts.push(term);
        }
        if let Some(m) = self.prec {
            parts.push(format!("O(T^{m})"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Parse the text form produced by [`TruncatedSeries::to_text`]; also
    /// accepts signed sums and products of integer or bracketed coefficients
    /// with powers of T.
    pub fn parse(field: &Arc<FiniteField>, text: &str) -> Result<Self> {
        let poly = crate::poly::parse_poly_terms(field, text, false)?;
        Ok(poly.into_iter().next().unwrap_or_else(|| Self::zero(field)))
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$f(rhs)
            }
        }
        impl std::ops::$tr<TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$f(&rhs)
            }
        }
        impl std::ops::$tr<&TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                (&self).$f(rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}
