//! Finite extensions E/F in two-step form: an unramified F' = F_Q((T)) of
//! degree f followed by an Eisenstein polynomial φ of degree e over F'.
//!
//! Elements are handled as series in a uniformizer π, since E ≅ F_Q((π)).
//! The image τ ∈ F_Q[[π]] of T is the solution of φ(π) = 0 in T.

use crate::error::{prec_err, Error, Result};
use crate::ff::{FiniteField, Tower};
use crate::field::FieldData;
use crate::poly::{is_eisenstein, SeriesPoly};
use crate::roots;
use crate::series::{Series, INF};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct LocalFieldExt {
    pub tower: Tower,
    pub e: usize,
    pub f: usize,
    /// Eisenstein over F' = F_Q((T))
    pub phi: SeriesPoly,
    /// defining polynomial over F, when built from one
    pub origin: SeriesPoly,
    /// T as a π-series
    pub tau: Series,
    tau_inv: Series,
    /// π-adic working precision
    pub prec: i64,
}

/// An element of E as a π-series over F_Q.
#[derive(Clone, Debug)]
pub struct ExtElem {
    pub series: Series,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RamificationReport {
    pub e: usize,
    pub f: usize,
    pub n: usize,
    pub d: Option<i64>,
    pub delta: Option<i64>,
    pub sigma: Option<i64>,
    pub separable: bool,
    pub w: usize,
}

/// a(τ) for a T-series a over F_Q, truncated at π^prec.
fn compose(a: &Series, tau: &Series, tau_inv: &Series, e: usize, prec: i64) -> Series {
    let top = tau.field();
    if a.is_exact_zero() {
        return Series::zero(top);
    }
    let mut acc = Series::zero(top);
    for &d in a.digits().iter().rev() {
        acc = acc.mul(tau).add(&Series::constant(top, d)).truncate(prec);
    }
    let v = a.start();
    let shift = if v >= 0 { tau.pow(v as u64) } else { tau_inv.pow((-v) as u64) };
    let mut out = acc.mul(&shift).truncate(prec);
    if let Some(m) = a.prec() {
        out = out.add(&Series::big_o(top, (e as i64).saturating_mul(m)));
    }
    out
}

fn embed_series(tower: &Tower, s: &Series) -> Series {
    s.map_coeffs(&tower.top, |d| tower.embed(d))
}

impl LocalFieldExt {
    /// E = F[x]/(φ) for φ Eisenstein over F.
    pub fn from_eisenstein(phi: &SeriesPoly, prec: i64) -> Result<LocalFieldExt> {
        if !is_eisenstein(phi)? {
            return Err(Error::InvalidInput("polynomial is not Eisenstein".into()));
        }
        let tower = Tower::new(phi.field().clone(), 1)?;
        Self::assemble(tower, 1, phi.clone(), phi.clone(), prec)
    }

    fn assemble(tower: Tower, f: usize, phi: SeriesPoly, origin: SeriesPoly, prec: i64) -> Result<LocalFieldExt> {
        let e = phi.deg();
        let top = tower.top.clone();
        let a0 = phi.coeff(0);
        let c0 = a0.coeff(1)?;
        // Newton iteration for G(T) = φ(π) = 0 with G_T a unit
        let mut tau = Series::monomial(&top, top.neg(top.inv(c0)?), e as i64);
        let pi = Series::t_pow(&top, 1);
        let dphi: Vec<Series> = phi.coeffs().iter().map(|c| c.derivative()).collect();
        let mut done = false;
        for _ in 0..64 {
            let tau_inv = tau.inv(prec + 2)?;
            let mut g = Series::zero(&top);
            let mut gt = Series::zero(&top);
            let mut pw = Series::one(&top);
            for (c, dc) in phi.coeffs().iter().zip(&dphi) {
                g = g.add(&compose(c, &tau, &tau_inv, e, prec).mul(&pw));
                gt = gt.add(&compose(dc, &tau, &tau_inv, e, prec).mul(&pw));
                pw = pw.mul(&pi).truncate(prec);
            }
            let g = g.truncate(prec);
            if g.val_lb() >= prec {
                done = true;
                break;
            }
            tau = tau.sub(&g.div(&gt, prec)?).truncate(prec);
        }
        if !done {
            return Err(Error::NonConvergence("T as a series in the uniformizer".into()));
        }
        let tau_inv = tau.inv(prec)?;
        Ok(LocalFieldExt { tower, e, f, phi, origin, tau, tau_inv, prec })
    }

    /// Canonical two-step form of F[x]/(ψ) for irreducible ψ. `work` is the
    /// T-adic working precision.
    pub fn build(psi: &SeriesPoly, work: i64) -> Result<LocalFieldExt> {
        let fd = FieldData::new(psi, work)?;
        let (e, f) = (fd.e(), fd.f());
        let prec = (e as i64) * (work / 2).max(8);
        if f == 1 && e == psi.deg() && psi.is_exact() && is_eisenstein(psi).unwrap_or(false) {
            return Self::from_eisenstein(psi, prec);
        }
        let ls = &fd.ls;
        let varpi = &ls.uniformizer;
        let pe = fd.alg.pow(varpi, e as u128);
        let b = ls.to_top_coords(&pe);
        let top = ls.top().clone();
        let mut coeffs: Vec<Series> = b.iter().map(|c| c.neg()).collect();
        coeffs.push(Series::one(&top));
        let phi = SeriesPoly::new(&top, coeffs);
        Self::assemble(ls.tower.clone(), f, phi, psi.clone(), prec)
    }

    pub fn n(&self) -> usize {
        self.e * self.f
    }
    pub fn base(&self) -> &Arc<FiniteField> {
        &self.tower.base
    }
    pub fn top(&self) -> &Arc<FiniteField> {
        &self.tower.top
    }
    /// q_E = Q.
    pub fn residue_order(&self) -> u64 {
        self.top().q() as u64
    }

    /// Image in E of a series over F.
    pub fn image(&self, s: &Series) -> Series {
        compose(&embed_series(&self.tower, s), &self.tau, &self.tau_inv, self.e, self.prec)
    }
    /// Image in E of a series over F'.
    pub fn image_top(&self, s: &Series) -> Series {
        compose(s, &self.tau, &self.tau_inv, self.e, self.prec)
    }
    /// ψ with coefficients mapped into E = F_Q((π)).
    pub fn base_poly_image(&self, psi: &SeriesPoly) -> SeriesPoly {
        SeriesPoly::new(self.top(), psi.coeffs().iter().map(|c| self.image(c)).collect())
    }

    /// Element Σ c_i π^i with c_i ∈ F'.
    pub fn elem_from_coords(&self, coords: &[Series]) -> ExtElem {
        let top = self.top().clone();
        let mut acc = Series::zero(&top);
        for (i, c) in coords.iter().enumerate() {
            acc = acc.add(&self.image_top(c).shift(i as i64));
        }
        ExtElem { series: acc.truncate(self.prec) }
    }
    /// Coordinates c_0..c_{e-1} ∈ F' with x = Σ c_i π^i.
    pub fn coords(&self, x: &ExtElem) -> Result<Vec<Series>> {
        let top = self.top().clone();
        let e = self.e as i64;
        let mut rest = x.series.clone();
        let mut out: Vec<Series> = vec![Series::zero(&top); self.e];
        let mut guard = 0;
        while rest.is_certified_nonzero() {
            guard += 1;
            if guard > 4 * self.prec + 16 {
                return Err(Error::NonConvergence("coordinates in the power basis".into()));
            }
            let v = rest.start();
            let c = rest.leading().unwrap();
            let (k, i) = (v.div_euclid(e), v.rem_euclid(e));
            let lt = self.tau.leading().unwrap();
            let c = top.div(c, top.pow(lt, k.rem_euclid(top.q() as i64 - 1) as u64))?;
            out[i as usize] = out[i as usize].add(&Series::monomial(&top, c, k));
            let term = self.image_top(&Series::monomial(&top, c, k)).shift(i);
            rest = rest.sub(&term);
        }
        let m = rest.abs_prec();
        if m < INF {
            for (i, c) in out.iter_mut().enumerate() {
                *c = c.add(&Series::big_o(&top, (m - i as i64 + e - 1).div_euclid(e)));
            }
        }
        Ok(out)
    }
    pub fn valuation(&self, x: &ExtElem) -> Result<i64> {
        x.series.valuation()
    }

    /// All roots of ψ (over F) lying in E.
    pub fn roots_of(&self, psi: &SeriesPoly) -> Result<Vec<ExtElem>> {
        let p = self.base_poly_image(psi);
        Ok(roots::roots(&p, self.prec - 1)?.into_iter().map(|s| ExtElem { series: s }).collect())
    }
    /// w(E/F): the number of roots of the defining polynomial in E.
    pub fn automorphism_count(&self) -> Result<usize> {
        Ok(self.roots_of(&self.origin)?.len())
    }

    pub fn separable(&self) -> bool {
        !self.phi.derivative_vanishes()
    }
    /// ν_E(φ'(π)), the different exponent; None when inseparable.
    pub fn different_exponent(&self) -> Result<Option<i64>> {
        if !self.separable() {
            return Ok(None);
        }
        let dphi = self.phi.derivative();
        let mut acc = Series::zero(self.top());
        for (i, c) in dphi.coeffs().iter().enumerate() {
            acc = acc.add(&self.image_top(c).shift(i as i64));
        }
        if !acc.is_certified_nonzero() {
            return Err(prec_err("different exponent beyond the working precision"));
        }
        Ok(Some(acc.valuation()?))
    }

    pub fn ramification_report(&self) -> Result<RamificationReport> {
        let d = self.different_exponent()?;
        let f = self.f as i64;
        let e = self.e as i64;
        Ok(RamificationReport {
            e: self.e,
            f: self.f,
            n: self.n(),
            d,
            delta: d.map(|d| f * d),
            sigma: d.map(|d| d - (e - 1)),
            separable: d.is_some(),
            w: self.automorphism_count()?,
        })
    }
}

/// Whether E1 ≅ E2 over F: equal (e, f) and a root of E1's defining
/// polynomial in E2.
pub fn is_isomorphic(a: &LocalFieldExt, b: &LocalFieldExt) -> Result<bool> {
    if a.base() != b.base() {
        return Err(Error::InvalidInput("extensions of different base fields".into()));
    }
    if (a.e, a.f) != (b.e, b.f) {
        return Ok(false);
    }
    Ok(!b.roots_of(&a.origin)?.is_empty())
}

/// Roots of ψ in E.
pub fn roots_in_extension(psi: &SeriesPoly, ext: &LocalFieldExt) -> Result<Vec<ExtElem>> {
    ext.roots_of(psi)
}

pub fn build_extension(psi: &SeriesPoly, work: i64) -> Result<LocalFieldExt> {
    LocalFieldExt::build(psi, work)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(q: u32, s: &str) -> LocalFieldExt {
        let f = FiniteField::from_order(q).unwrap();
        build_extension(&SeriesPoly::parse(&f, s).unwrap(), 40).unwrap()
    }

    #[test]
    fn tame_and_wild_reports() {
        let r = ext(3, "x^2 - T").ramification_report().unwrap();
        assert_eq!((r.e, r.f, r.delta, r.sigma, r.w), (2, 1, Some(1), Some(0), 2));
        let r = ext(2, "x^2 + T*x + T").ramification_report().unwrap();
        assert_eq!((r.e, r.f, r.delta, r.sigma, r.w), (2, 1, Some(2), Some(1), 2));
        let r = ext(2, "x^2 + T").ramification_report().unwrap();
        assert!(!r.separable && r.sigma.is_none());
        assert_eq!(r.w, 1);
    }

    #[test]
    fn unramified_and_general_input() {
        let r = ext(2, "x^2 + x + 1").ramification_report().unwrap();
        assert_eq!((r.e, r.f, r.delta, r.w), (1, 2, Some(0), 2));
        // x^2 − T^3 over F_3 is the ramified field of x^2 − T
        let a = ext(3, "x^2 - T^3");
        assert_eq!((a.e, a.f), (2, 1));
        assert!(is_isomorphic(&a, &ext(3, "x^2 - T")).unwrap());
        assert!(!is_isomorphic(&ext(3, "x^2 + T"), &ext(3, "x^2 - T")).unwrap());
    }

    #[test]
    fn roots_and_coordinates() {
        let k = ext(2, "x^2 + T*x + T");
        let f = FiniteField::from_order(2).unwrap();
        let psi = SeriesPoly::parse(&f, "x^2 + T*x + T").unwrap();
        let rs = roots_in_extension(&psi, &k).unwrap();
        assert_eq!(rs.len(), 2);
        let c = k.coords(&rs[0]).unwrap();
        let back = k.elem_from_coords(&c);
        assert!(back.series.sub(&rs[0].series).val_lb() >= k.prec - 4);
        let k3 = ext(3, "x^2 - T");
        let f3 = FiniteField::from_order(3).unwrap();
        assert!(k3.roots_of(&SeriesPoly::parse(&f3, "x^2 + T").unwrap()).unwrap().is_empty());
    }
}
