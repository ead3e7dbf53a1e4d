//! Elements of End_F(F^N): characteristic and minimal polynomials, invariant
//! factors, conjugacy, classification, the coefficient map Π and the
//! filtration criterion ν(a_j) ≥ (N−j)k + 1.

use crate::error::{prec_err, Error, Result};
use crate::factor::factor_local;
use crate::ff::FiniteField;
use crate::field::FieldData;
use crate::linalg::Mat;
use crate::poly::SeriesPoly;
use crate::ratfunc::RatFunc;
use crate::series::{Series, INF};
use serde::Serialize;
use std::sync::Arc;

/// Coefficient arithmetic for the Smith reduction over K[t].
trait Coef {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> Result<bool>;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Result<Self::E>;
}

/// Exact coefficients in F_q(T).
struct Exact(Arc<FiniteField>);

impl Coef for Exact {
    type E = RatFunc;
    fn zero(&self) -> RatFunc {
        RatFunc::zero()
    }
    fn is_zero(&self, a: &RatFunc) -> Result<bool> {
        Ok(a.is_zero())
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(&self.0, b)
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.sub(&self.0, b)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(&self.0, b)
    }
    fn inv(&self, a: &RatFunc) -> Result<RatFunc> {
        a.inv(&self.0)
    }
}

/// Truncated series; a coefficient is zero only when it is exactly zero.
struct Approx {
    field: Arc<FiniteField>,
    rel: i64,
}

impl Coef for Approx {
    type E = Series;
    fn zero(&self) -> Series {
        Series::zero(&self.field)
    }
    fn is_zero(&self, a: &Series) -> Result<bool> {
        if a.is_exact_zero() {
            Ok(true)
        } else if a.is_certified_nonzero() {
            Ok(false)
        } else {
            Err(prec_err("Smith pivot undetermined at working precision"))
        }
    }
    fn add(&self, a: &Series, b: &Series) -> Series {
        a.add(b)
    }
    fn sub(&self, a: &Series, b: &Series) -> Series {
        a.sub(b)
    }
    fn mul(&self, a: &Series, b: &Series) -> Series {
        a.mul(b)
    }
    fn inv(&self, a: &Series) -> Result<Series> {
        a.inv(self.rel)
    }
}

type P<E> = Vec<E>;

fn ptrim<C: Coef>(c: &C, p: &mut P<C::E>) -> Result<()> {
    while let Some(l) = p.last() {
        if c.is_zero(l)? {
            p.pop();
        } else {
            break;
        }
    }
    Ok(())
}

fn psub_mul<C: Coef>(c: &C, a: &P<C::E>, q: &P<C::E>, b: &P<C::E>) -> Result<P<C::E>> {
    // a − q·b
    let mut out = a.clone();
    let need = if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 };
    while out.len() < need {
        out.push(c.zero());
    }
    for (i, qi) in q.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = c.sub(&out[i + j], &c.mul(qi, bj));
        }
    }
    ptrim(c, &mut out)?;
    Ok(out)
}

fn padd<C: Coef>(c: &C, a: &P<C::E>, b: &P<C::E>) -> Result<P<C::E>> {
    let mut out: Vec<C::E> = (0..a.len().max(b.len()))
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => c.add(x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    ptrim(c, &mut out)?;
    Ok(out)
}

/// Quotient and remainder of a by the nonzero trimmed b.
#[allow(clippy::type_complexity)]
fn pdivrem<C: Coef>(c: &C, a: &P<C::E>, b: &P<C::E>) -> Result<(P<C::E>, P<C::E>)> {
    let lb = c.inv(b.last().expect("nonzero divisor"))?;
    let mut r = a.clone();
    ptrim(c, &mut r)?;
    if r.len() < b.len() {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![c.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let d = r.len() - b.len();
        let coef = c.mul(r.last().unwrap(), &lb);
        for (j, bj) in b.iter().enumerate() {
            r[d + j] = c.sub(&r[d + j], &c.mul(&coef, bj));
        }
        q[d] = coef;
        // the leading term cancels by construction
        r.pop();
        ptrim(c, &mut r)?;
    }
    Ok((q, r))
}

/// Diagonal of the Smith form of a square matrix over K[t], each entry
/// monic, ordered d_1 | d_2 | ... .
fn smith_diagonal<C: Coef>(c: &C, mut a: Vec<Vec<P<C::E>>>) -> Result<Vec<P<C::E>>> {
    let n = a.len();
    for row in a.iter_mut() {
        for p in row.iter_mut() {
            ptrim(c, p)?;
        }
    }
    let mut diag = Vec::with_capacity(n);
    for s in 0..n {
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in s..n {
                for j in s..n {
                    let d = a[i][j].len();
                    if d > 0 && best.is_none_or(|b| d < b.2) {
                        best = Some((i, j, d));
                    }
                }
            }
            let Some((bi, bj, _)) = best else {
                return Err(Error::InvalidInput("tI − γ is singular".into()));
            };
            a.swap(s, bi);
            for row in a.iter_mut() {
                row.swap(s, bj);
            }
            let piv = a[s][s].clone();
            let mut clean = true;
            for i in s + 1..n {
                let (q, r) = pdivrem(c, &a[i][s], &piv)?;
                if !q.is_empty() {
                    for j in s..n {
                        a[i][j] = psub_mul(c, &a[i][j], &q, &a[s][j])?;
                    }
                }
                clean &= r.is_empty();
            }
            for j in s + 1..n {
                let (q, r) = pdivrem(c, &a[s][j], &piv)?;
                if !q.is_empty() {
                    for i in s..n {
                        a[i][j] = psub_mul(c, &a[i][j], &q, &a[i][s])?;
                    }
                }
                clean &= r.is_empty();
            }
            if !clean {
                continue;
            }
            // the pivot must divide the remaining block
            let mut bad = None;
            'outer: for i in s + 1..n {
                for j in s + 1..n {
                    if !pdivrem(c, &a[i][j], &piv)?.1.is_empty() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in s..n {
                        a[s][j] = padd(c, &a[s][j], &a[i][j])?;
                    }
                }
                None => break,
            }
        }
        let p = a[s][s].clone();
        let li = c.inv(p.last().unwrap())?;
        diag.push(p.iter().map(|x| c.mul(x, &li)).collect());
    }
    Ok(diag)
}

fn exact_entries(g: &Mat) -> Option<Vec<RatFunc>> {
    g.entries().iter().map(|s| RatFunc::from_series(g.field(), s)).collect()
}

/// Invariant factors ζ_1, ζ_2, ... of γ, with ζ_{i+1} | ζ_i and ζ_1 the
/// minimal polynomial.
#[derive(Clone, Debug)]
pub struct ConjugacyKey {
    pub factors: Vec<SeriesPoly>,
}

impl ConjugacyKey {
    pub fn minimal(&self) -> &SeriesPoly {
        &self.factors[0]
    }
    pub fn to_texts(&self) -> Vec<String> {
        self.factors.iter().map(|p| p.to_text()).collect()
    }
    /// Coefficientwise agreement at certified precision.
    pub fn agrees(&self, o: &ConjugacyKey) -> Result<bool> {
        if self.factors.len() != o.factors.len() {
            return Ok(false);
        }
        for (a, b) in self.factors.iter().zip(&o.factors) {
            if a.deg() != b.deg() {
                return Ok(false);
            }
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                let m = x.abs_prec().min(y.abs_prec());
                if m == INF {
                    if !x.same_as(y) {
                        return Ok(false);
                    }
                } else if !x.eq_to(y, m)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Characteristic polynomial and invariant factors of γ. Matrices whose
/// entries are Laurent polynomials are reduced exactly over F_q(T).
pub fn char_min_invariant(g: &Mat, cap: i64) -> Result<(SeriesPoly, ConjugacyKey)> {
    if !g.is_square() || g.rows() == 0 {
        return Err(Error::InvalidInput("expected a nonempty square matrix".into()));
    }
    let n = g.rows();
    let fld = g.field().clone();
    let chi = g.char_poly();
    let key: Vec<SeriesPoly> = if let Some(ent) = exact_entries(g) {
        let c = Exact(fld.clone());
        let m: Vec<Vec<P<RatFunc>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = ent[i * n + j].neg(&fld);
                        if i == j {
                            vec![a, RatFunc::one()]
                        } else {
                            vec![a]
                        }
                    })
                    .collect()
            })
            .collect();
        let d = smith_diagonal(&c, m)?;
        let mut out = Vec::new();
        for p in d.iter().rev().filter(|p| p.len() > 1) {
            let cs = p.iter().map(|r| r.to_series(&fld, cap)).collect::<Result<Vec<_>>>()?;
            out.push(SeriesPoly::new(&fld, cs));
        }
        out
    } else {
        let c = Approx { field: fld.clone(), rel: cap };
        let m: Vec<Vec<P<Series>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = g.get(i, j).neg();
                        if i == j {
                            vec![a, Series::one(&fld)]
                        } else {
                            vec![a]
                        }
                    })
                    .collect()
            })
            .collect();
        let d = smith_diagonal(&c, m)?;
        d.iter().rev().filter(|p| p.len() > 1).map(|p| SeriesPoly::new(&fld, p.clone())).collect()
    };
    Ok((chi, ConjugacyKey { factors: key }))
}

pub fn are_conjugate(a: &Mat, b: &Mat, cap: i64) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::InvalidInput("matrices of different sizes".into()));
    }
    let (_, ka) = char_min_invariant(a, cap)?;
    let (_, kb) = char_min_invariant(b, cap)?;
    ka.agrees(&kb)
}

/// Block companion matrix of the invariant factors: the standard
/// representative of the conjugacy class.
pub fn standard_representative(key: &ConjugacyKey) -> Result<Mat> {
    let fld = key.factors[0].field().clone();
    let n: usize = key.factors.iter().map(|p| p.deg()).sum();
    let mut m = Mat::zeros(&fld, n, n);
    let mut at = 0;
    for p in &key.factors {
        m.put_block(at, at, &Mat::companion(p)?);
        at += p.deg();
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorData {
    pub poly: String,
    pub multiplicity: usize,
    pub e: usize,
    pub f: usize,
    pub separable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub closed: bool,
    pub pure: bool,
    pub quasi_regular: bool,
    pub quasi_regular_elliptic: bool,
    pub separable: bool,
    pub regular: bool,
    pub char_poly: String,
    pub invariant_factors: Vec<String>,
    pub factors: Vec<FactorData>,
}

fn is_squarefree(p: &SeriesPoly, prec: i64) -> Result<bool> {
    Ok(factor_local(p, prec)?.iter().all(|f| f.multiplicity == 1))
}

pub fn classify(g: &Mat, work: i64) -> Result<Classification> {
    let (chi, key) = char_min_invariant(g, work)?;
    let min = key.minimal();
    let closed = is_squarefree(min, work)?;
    let facs = factor_local(&chi, work)?;
    let mut factors = Vec::new();
    for lf in &facs {
        let fd = FieldData::new(&lf.poly, work)?;
        factors.push(FactorData {
            poly: lf.poly.to_text(),
            multiplicity: lf.multiplicity,
            e: fd.e(),
            f: fd.f(),
            separable: lf.separable,
        });
    }
    let quasi_regular = closed && key.factors.len() == 1;
    let pure = closed && facs.len() == 1;
    let separable = facs.iter().all(|f| f.separable);
    Ok(Classification {
        closed,
        pure,
        quasi_regular,
        quasi_regular_elliptic: quasi_regular && pure,
        separable,
        regular: quasi_regular && separable,
        char_poly: chi.to_text(),
        invariant_factors: key.to_texts(),
        factors,
    })
}

fn coeff_valuation(c: &Series) -> Result<i64> {
    if c.is_exact_zero() {
        return Ok(INF);
    }
    if !c.is_certified_nonzero() {
        return Ok(c.val_lb().max(c.abs_prec()));
    }
    c.valuation()
}

/// ν(a_j) ≥ (N−j)k + 1 for every coefficient a_j of x^j, j < N.
pub fn filtration_member(g: &Mat, k: i64) -> Result<bool> {
    let chi = g.char_poly();
    let n = chi.deg() as i64;
    for j in 0..n {
        let c = chi.coeff(j as usize);
        let need = (n - j) * k + 1;
        if c.is_exact_zero() {
            continue;
        }
        if c.is_certified_nonzero() {
            if c.valuation()? < need {
                return Ok(false);
            }
        } else if c.abs_prec() < need {
            return Err(prec_err("coefficient valuation undetermined for the filtration test"));
        }
    }
    Ok(true)
}

/// Π(γ) = (a_{N−1}, …, a_0) and the largest k with Π(γ) ∈ ϖ^k·𝔬^N under
/// z·a = (z a_{N−1}, …, z^N a_0); None when every a_j vanishes.
pub fn coefficient_map(g: &Mat) -> Result<(Vec<Series>, Option<i64>)> {
    let chi = g.char_poly();
    let n = chi.deg();
    let coeffs: Vec<Series> = (0..n).rev().map(|j| chi.coeff(j)).collect();
    let mut bound = INF;
    for (i, c) in coeffs.iter().enumerate() {
        let v = coeff_valuation(c)?;
        if v < INF {
            bound = bound.min(v.div_euclid(i as i64 + 1));
        }
    }
    Ok((coeffs, (bound < INF).then_some(bound)))
}

/// ν(det γ) from the constant term of the characteristic polynomial.
pub fn det_valuation(g: &Mat) -> Result<i64> {
    let c = g.char_poly().coeff(0);
    if c.is_exact_zero() {
        return Ok(INF);
    }
    c.valuation()
}

/// Whether g ∈ GL(N, 𝔬) with det g ∈ F_q^×, so that g^{-1} is again a
/// matrix of polynomials.
pub fn is_constant_det_unimodular(g: &Mat, cap: i64) -> Result<bool> {
    // division-free determinant keeps polynomial input exact
    let d = if g.is_exact() { g.char_poly().coeff(0) } else { g.det(cap)? };
    Ok(d.is_exact() && d.is_monomial() && d.start() == 0 && g.min_val_lb() >= 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(q: u32, rows: &[&[&str]]) -> Mat {
        let f = FiniteField::from_order(q).unwrap();
        let r: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        Mat::parse(&f, &r).unwrap()
    }

    #[test]
    fn invariant_factors() {
        let (_, k) = char_min_invariant(&m(3, &[&["T", "0"], &["0", "T"]]), 40).unwrap();
        assert_eq!(k.to_texts(), ["x - T", "x - T"].iter().map(|s| fmt(3, s)).collect::<Vec<_>>());
        let (_, k) = char_min_invariant(&m(3, &[&["1", "0"], &["0", "T"]]), 40).unwrap();
        assert_eq!(k.factors.len(), 1);
        assert_eq!(k.to_texts()[0], fmt(3, "(x - 1)*(x - T)"));
        let c = m(3, &[&["0", "T"], &["1", "0"]]);
        let (_, k) = char_min_invariant(&c, 40).unwrap();
        assert_eq!(k.to_texts(), vec![fmt(3, "x^2 - T")]);
        assert!(are_conjugate(&c, &c.transpose(), 40).unwrap());
        let j = m(3, &[&["T", "1"], &["0", "T"]]);
        assert!(!are_conjugate(&j, &m(3, &[&["T", "0"], &["0", "T"]]), 40).unwrap());
    }

    fn fmt(q: u32, s: &str) -> String {
        let f = FiniteField::from_order(q).unwrap();
        SeriesPoly::parse(&f, s).unwrap().to_text()
    }

    #[test]
    fn classification_flags() {
        let c = classify(&m(2, &[&["0", "T"], &["1", "0"]]), 40).unwrap();
        assert!(c.quasi_regular_elliptic && !c.separable && !c.regular);
        let c = classify(&m(3, &[&["1", "0"], &["0", "T"]]), 40).unwrap();
        assert!(c.quasi_regular && !c.quasi_regular_elliptic && c.regular);
        let c = classify(&m(3, &[&["0", "1"], &["0", "0"]]), 40).unwrap();
        assert!(!c.closed);
        let c = classify(&m(3, &[&["T", "0"], &["0", "T"]]), 40).unwrap();
        assert!(c.closed && c.pure && !c.quasi_regular);
    }

    #[test]
    fn filtration_and_coefficients() {
        assert!(filtration_member(&m(3, &[&["0", "-T"], &["1", "0"]]), 0).unwrap());
        assert!(!filtration_member(&m(3, &[&["1", "0"], &["0", "1"]]), 0).unwrap());
        let t = m(3, &[&["T", "0"], &["0", "T"]]);
        assert!(filtration_member(&t, 0).unwrap());
        assert!(!filtration_member(&t, 1).unwrap());
        assert_eq!(coefficient_map(&m(3, &[&["0", "T"], &["1", "0"]])).unwrap().1, Some(0));
        assert_eq!(coefficient_map(&m(3, &[&["T^2", "0"], &["0", "T^2"]])).unwrap().1, Some(2));
        assert_eq!(coefficient_map(&m(3, &[&["0", "1"], &["0", "0"]])).unwrap().1, None);
    }
}
