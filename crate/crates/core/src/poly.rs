//! Polynomials over F_q((T)) with truncated-series coefficients, their
//! Newton polygons and a small expression parser shared with the series
//! syntax.

use crate::error::{prec_err, Error, Result};
use crate::ff::FiniteField;
use crate::series::{Series, INF};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Dense polynomial, coefficients lowest degree first. The top coefficient
/// is never exact zero (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq)]
pub struct SeriesPoly {
    field: Arc<FiniteField>,
    coeffs: Vec<Series>,
}

impl SeriesPoly {
    pub fn new(field: &Arc<FiniteField>, mut coeffs: Vec<Series>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        SeriesPoly { field: field.clone(), coeffs }
    }
    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self::new(field, Vec::new())
    }
    pub fn x(field: &Arc<FiniteField>) -> Self {
        Self::new(field, vec![Series::zero(field), Series::one(field)])
    }
    pub fn constant(c: Series) -> Self {
        let f = c.field().clone();
        Self::new(&f, vec![c])
    }
    /// Monic polynomial from its lower coefficients a_0..a_{d-1}.
    pub fn monic_from_lower(field: &Arc<FiniteField>, lower: &[Series]) -> Self {
        let mut c = lower.to_vec();
        c.push(Series::one(field));
        Self::new(field, c)
    }
    pub fn from_texts(field: &Arc<FiniteField>, texts: &[&str]) -> Result<Self> {
        let coeffs = texts.iter().map(|t| Series::parse(field, t)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(field, coeffs))
    }
    /// Parse an expression in `x`, e.g. `x^2 + T*x + T`.
    pub fn parse(field: &Arc<FiniteField>, text: &str) -> Result<Self> {
        let c = parse_poly_terms(field, text, true)?;
        Ok(Self::new(field, c))
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }
    pub fn coeffs(&self) -> &[Series] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Series {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Series::zero(&self.field))
    }
    /// Degree; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }
    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }
    pub fn leading(&self) -> Series {
        self.coeffs.last().cloned().unwrap_or_else(|| Series::zero(&self.field))
    }
    /// Smallest absolute precision among the coefficients.
    pub fn min_prec(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs_prec()).min().unwrap_or(INF)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect();
        Self::new(&self.field, c)
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect();
        Self::new(&self.field, c)
    }
    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.neg()).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.field);
        }
        let mut c = vec![Series::zero(&self.field); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.field, c)
    }
    pub fn scale(&self, s: &Series) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.mul(s)).collect())
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::constant(Series::one(&self.field));
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, a)| a.scale(f.from_int(i as i64))).collect();
        Self::new(f, c)
    }
    /// Whether the formal derivative is exactly zero (all exponents ≡ 0 mod p
    /// carry zero coefficients). Decided on the exponent pattern, so it is
    /// exact even for inexact coefficients.
    pub fn derivative_vanishes(&self) -> bool {
        let p = self.field.p() as usize;
        self.coeffs.iter().enumerate().all(|(i, c)| i % p == 0 || c.is_exact_zero())
    }
    pub fn eval(&self, x: &Series) -> Series {
        let mut acc = Series::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
    /// Substitute x ↦ c·x (c a series): a_i ↦ a_i c^i.
    pub fn scale_var(&self, c: &Series) -> Self {
        let mut pw = Series::one(&self.field);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.mul(&pw));
            pw = pw.mul(c);
        }
        Self::new(&self.field, out)
    }
    /// Remainder and quotient by a monic divisor.
    pub fn divrem_monic(&self, d: &Self) -> Result<(Self, Self)> {
        if !d.is_monic() {
            return Err(Error::InvalidInput("divisor must be monic".into()));
        }
        let dd = d.deg();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(&self.field), self.clone()));
        }
        let mut q = vec![Series::zero(&self.field); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = r[k].clone();
            q[k - dd] = c.clone();
            if c.is_exact_zero() {
                continue;
            }
            for j in 0..=dd {
                r[k - dd + j] = r[k - dd + j].sub(&c.mul(&d.coeffs[j]));
            }
        }
        r.truncate(dd);
        Ok((Self::new(&self.field, q), Self::new(&self.field, r)))
    }
    /// Lower every coefficient to precision at most `m`.
    pub fn truncate(&self, m: i64) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.truncate(m)).collect())
    }

    pub fn to_text(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_exact_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            let ct = c.to_text();
            let term = if mon.is_empty() {
                if ct.contains(' ') {
                    format!("({ct})")
                } else {
                    ct
                }
            } else if c.is_one() {
                mon
            } else if ct.contains(' ') {
                format!("({ct})*{mon}")
            } else {
                format!("{ct}*{mon}")
            };
            parts.push(term);
        }
        parts.join(" + ")
    }

    /// Coefficient list, lowest degree first.
    pub fn to_texts(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_text()).collect()
    }
}

impl fmt::Debug for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
impl fmt::Display for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// A rational number in lowest terms with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub num: i64,
    pub den: i64,
}

impl Slope {
    pub fn new(num: i64, den: i64) -> Slope {
        assert!(den != 0);
        let g = gcd(num.abs(), den.abs()).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Slope { num: s * num / g, den: s * den / g }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub slope: Slope,
    pub length: i64,
}

/// Lower convex hull of {(i, ν(a_i))}, segments left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
    /// Hull vertices (i, ν(a_i)).
    pub vertices: Vec<(i64, i64)>,
}

impl NewtonPolygon {
    /// Height of the hull at abscissa `i` (within the vertex range).
    pub fn height_at(&self, i: i64) -> Option<Slope> {
        for w in self.vertices.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x0 <= i && i <= x1 {
                return Some(Slope::new(y0 * (x1 - x0) + (y1 - y0) * (i - x0), x1 - x0));
            }
        }
        self.vertices.iter().find(|v| v.0 == i).map(|v| Slope::new(v.1, 1))
    }
}

pub fn newton_polygon(f: &SeriesPoly) -> Result<NewtonPolygon> {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    let mut pending: Vec<(i64, i64)> = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        if c.is_certified_nonzero() {
            pts.push((i as i64, c.valuation()?));
        } else {
            pending.push((i as i64, c.val_lb()));
        }
    }
    if pts.is_empty() {
        return Err(prec_err("no coefficient has a certified valuation"));
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // keep only strict left turns (strictly increasing slopes)
            let cross = (b.0 - a.0) as i128 * (p.1 - a.1) as i128 - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let poly = NewtonPolygon {
        segments: hull
            .windows(2)
            .map(|w| Segment { slope: Slope::new(w[1].1 - w[0].1, w[1].0 - w[0].0), length: w[1].0 - w[0].0 })
            .collect(),
        vertices: hull.clone(),
    };
    let (first, last) = (hull[0].0, hull[hull.len() - 1].0);
    for (i, lb) in pending {
        let below = if i < first || i > last {
            true
        } else {
            let h = poly.height_at(i).unwrap();
            (lb as i128) * (h.den as i128) < h.num as i128
        };
        if below {
            return Err(prec_err(format!("valuation of coefficient {i} undetermined below the hull")));
        }
    }
    Ok(poly)
}

/// Monic, a_i ∈ 𝔭 for i < deg and ν(a_0) = 1.
pub fn is_eisenstein(f: &SeriesPoly) -> Result<bool> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Ok(false),
    };
    if !f.is_monic() {
        return Ok(false);
    }
    let a0 = f.coeff(0);
    if a0.is_exact_zero() {
        return Ok(false);
    }
    if a0.val_lb() >= 2 {
        return Ok(false);
    }
    if a0.valuation()? != 1 {
        return Ok(false);
    }
    for i in 1..d {
        let c = f.coeff(i);
        if c.val_lb() >= 1 {
            continue;
        }
        if c.is_certified_nonzero() {
            return Ok(false);
        }
        return Err(prec_err(format!("valuation of a_{i} undetermined")));
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Expression parser: sums of products of integers, bracketed coordinate
// vectors, powers of T and x, O(T^k) and parenthesized sub-expressions.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    T,
    X,
    BigO,
    Caret,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => {}
            '0'..='9' => {
                let mut n: i64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(chars[i] as i64 - '0' as i64))
                        .ok_or_else(|| Error::Parse("integer overflow".into()))?;
                    i += 1;
                }
                out.push(Tok::Num(n));
                continue;
            }
            'T' | 't' => out.push(Tok::T),
            'x' | 'X' => out.push(Tok::X),
            'O' => out.push(Tok::BigO),
            '^' => out.push(Tok::Caret),
            '*' => out.push(Tok::Star),
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            '[' => out.push(Tok::LBrack),
            ']' => out.push(Tok::RBrack),
            ',' => out.push(Tok::Comma),
            _ => return Err(Error::Parse(format!("unexpected character '{c}' at {i}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a Arc<FiniteField>,
    allow_x: bool,
}

type P = Vec<Series>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {:?} at token {}", t, self.pos)))
        }
    }
    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(Error::Parse(format!("expected integer at token {}", self.pos))),
        }
    }
    fn mono(&self, c: Series, deg: usize) -> P {
        let mut v = vec![Series::zero(self.field); deg + 1];
        v[deg] = c;
        v
    }
    fn expr(&mut self) -> Result<P> {
        let mut acc: P = Vec::new();
        let mut first = true;
        loop {
            let neg = if self.eat(&Tok::Minus) {
                true
            } else if self.eat(&Tok::Plus) || first {
                false
            } else {
                break;
            };
            first = false;
            let t = self.term()?;
            acc = padd(self.field, &acc, &t, neg);
            if !matches!(self.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                break;
            }
        }
        Ok(acc)
    }
    fn term(&mut self) -> Result<P> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let f = self.factor()?;
            acc = pmul(self.field, &acc, &f);
        }
        Ok(acc)
    }
    fn factor(&mut self) -> Result<P> {
        let f = self.field;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.mono(Series::from_int(f, n), 0))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let mut digits = Vec::new();
                loop {
                    let d = self.int()?;
                    digits.push(d.rem_euclid(f.p() as i64) as u32);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(&Tok::RBrack)?;
                    break;
                }
                if digits.len() > f.r() as usize {
                    return Err(Error::Parse("coordinate vector longer than the field degree".into()));
                }
                Ok(self.mono(Series::constant(f, f.from_coords(&digits)), 0))
            }
            Some(Tok::T) => {
                self.pos += 1;
                let k = if self.eat(&Tok::Caret) { self.int()? } else { 1 };
                Ok(self.mono(Series::t_pow(f, k), 0))
            }
            Some(Tok::X) => {
                if !self.allow_x {
                    return Err(Error::Parse("variable x not allowed in a series".into()));
                }
                self.pos += 1;
                let k = if self.eat(&Tok::Caret) { self.int()? } else { 1 };
                if k < 0 {
                    return Err(Error::Parse("negative power of x".into()));
                }
                Ok(self.mono(Series::one(f), k as usize))
            }
            Some(Tok::BigO) => {
                self.pos += 1;
                self.expect(&Tok::LParen)?;
                self.expect(&Tok::T)?;
                let k = if self.eat(&Tok::Caret) { self.int()? } else { 1 };
                self.expect(&Tok::RParen)?;
                Ok(self.mono(Series::big_o(f, k), 0))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                if !self.eat(&Tok::Caret) {
                    return Ok(e);
                }
                let k = self.int()?;
                if k < 0 {
                    return Err(Error::Parse("negative power of a parenthesized expression".into()));
                }
                let mut acc = self.mono(Series::one(f), 0);
                for _ in 0..k {
                    acc = pmul(f, &acc, &e);
                }
                Ok(acc)
            }
            other => Err(Error::Parse(format!("unexpected token {:?} at {}", other, self.pos))),
        }
    }
}

fn padd(f: &Arc<FiniteField>, a: &P, b: &P, neg: bool) -> P {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| Series::zero(f));
            let y = b.get(i).cloned().unwrap_or_else(|| Series::zero(f));
            if neg {
                x.sub(&y)
            } else {
                x.add(&y)
            }
        })
        .collect()
}

fn pmul(f: &Arc<FiniteField>, a: &P, b: &P) -> P {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![Series::zero(f); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] = c[i + j].add(&x.mul(y));
        }
    }
    c
}

/// Parse a polynomial expression into its coefficient list; with
/// `allow_x = false` the result has at most one (constant) coefficient.
pub fn parse_poly_terms(field: &Arc<FiniteField>, text: &str, allow_x: bool) -> Result<Vec<Series>> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, field, allow_x };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    let mut e = e;
    while e.last().is_some_and(|c| c.is_exact_zero()) {
        e.pop();
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FiniteField;

    fn f(q: u32) -> Arc<FiniteField> {
        FiniteField::from_order(q).unwrap()
    }

    #[test]
    fn series_inverse_pair() {
        let k = f(3);
        let a = Series::parse(&k, "T + O(T^5)").unwrap();
        let b = Series::parse(&k, "T^-1 + O(T^3)").unwrap();
        let c = a.mul(&b);
        assert_eq!(c.to_text(), "1 + O(T^4)");
    }

    #[test]
    fn inverse_of_zero_fails() {
        let k = f(5);
        assert_eq!(Series::zero(&k).inv(10).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn char_two_square() {
        let k = f(2);
        let a = Series::parse(&k, "1 + T").unwrap();
        assert_eq!(a.mul(&a).to_text(), "1 + T^2");
        let a = Series::parse(&k, "1 + T + O(T^6)").unwrap();
        assert_eq!(a.mul(&a).to_text(), "1 + T^2 + O(T^6)");
    }

    #[test]
    fn parse_print_roundtrip() {
        let k = f(9);
        for s in ["T^-1 + 1 + T^3", "[0,1]*T^-2 + 2*T + O(T^7)", "0", "O(T^3)", "[2,2]"] {
            let a = Series::parse(&k, s).unwrap();
            let b = Series::parse(&k, &a.to_text()).unwrap();
            assert_eq!(a, b, "{s}");
        }
        let k3 = f(3);
        assert_eq!(Series::parse(&k3, "- T + 1").unwrap().to_text(), "1 + 2*T");
    }

    #[test]
    fn newton_polygon_examples() {
        let k = f(3);
        let p = SeriesPoly::parse(&k, "x^2 - T").unwrap();
        let np = newton_polygon(&p).unwrap();
        assert_eq!(np.segments, vec![Segment { slope: Slope::new(-1, 2), length: 2 }]);
        let p = SeriesPoly::parse(&k, "x^2 - 1").unwrap();
        assert_eq!(newton_polygon(&p).unwrap().segments, vec![Segment { slope: Slope::new(0, 1), length: 2 }]);
        // hull of {(0,1),(1,1),(3,0)}: (1,1) lies above the chord.
        let k2 = f(2);
        let p = SeriesPoly::parse(&k2, "x^3 + T*x + T").unwrap();
        let np = newton_polygon(&p).unwrap();
        assert_eq!(np.vertices, vec![(0, 1), (3, 0)]);
        assert_eq!(np.segments, vec![Segment { slope: Slope::new(-1, 3), length: 3 }]);
    }

    #[test]
    fn eisenstein_examples() {
        let k = f(2);
        assert!(is_eisenstein(&SeriesPoly::parse(&k, "x^2 + T*x + T").unwrap()).unwrap());
        assert!(!is_eisenstein(&SeriesPoly::parse(&k, "x^2 - 1").unwrap()).unwrap());
        assert!(!is_eisenstein(&SeriesPoly::parse(&k, "x^2 + T^2").unwrap()).unwrap());
    }

    #[test]
    fn poly_text_roundtrip() {
        let k = f(4);
        let p = SeriesPoly::parse(&k, "x^3 + (T + [0,1]*T^2)*x + T^-1").unwrap();
        let q = SeriesPoly::parse(&k, &p.to_text()).unwrap();
        assert_eq!(p, q);
    }
}
