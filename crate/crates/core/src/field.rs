//! A finite extension E = F[γ] given by the characteristic polynomial χ of
//! γ, modelled on the power basis of an integral rescaling γ' = T^s γ.

use crate::algebra::{local_structure, maximal_order, Elem, LocalStructure, OrderData, PolyAlgebra};
use crate::error::{prec_err, Error, Result};
use crate::factor::disc_valuation;
use crate::ff::FiniteField;
use crate::fpoly;
use crate::lattice::OLattice;
use crate::linalg::Mat;
use crate::orders::HereditaryOrder;
use crate::poly::SeriesPoly;
use crate::series::{Series, INF};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct FieldData {
    pub chi: SeriesPoly,
    /// γ' = T^shift γ has integral characteristic polynomial
    pub shift: i64,
    pub alg: PolyAlgebra,
    pub od: OrderData,
    pub ls: LocalStructure,
}

/// Smallest s ≥ 0 with T^s γ integral, for γ a root of the monic χ.
pub fn integral_shift(chi: &SeriesPoly) -> i64 {
    let n = chi.deg();
    let mut s = 0i64;
    for (i, c) in chi.coeffs().iter().enumerate().take(n) {
        if c.is_exact_zero() {
            continue;
        }
        let v = c.val_lb();
        if v < 0 {
            let k = (n - i) as i64;
            s = s.max((-v + k - 1) / k);
        }
    }
    s
}

/// χ(x/T^s)·T^{sn}: the characteristic polynomial of T^s γ.
pub fn rescale(chi: &SeriesPoly, s: i64) -> SeriesPoly {
    let f = chi.field();
    let n = chi.deg() as i64;
    let g = chi.scale_var(&Series::t_pow(f, -s)).scale(&Series::t_pow(f, s * n));
    let mut c = g.coeffs().to_vec();
    if let Some(l) = c.last_mut() {
        *l = Series::one(f);
    }
    SeriesPoly::new(f, c)
}

impl FieldData {
    /// Structure of F[x]/(χ) for irreducible χ, with products truncated at
    /// absolute precision `work`.
    pub fn new(chi: &SeriesPoly, work: i64) -> Result<FieldData> {
        if !chi.is_monic() || chi.deg() == 0 {
            return Err(Error::InvalidInput("defining polynomial must be monic of positive degree".into()));
        }
        let shift = integral_shift(chi);
        let chi_int = rescale(chi, shift);
        if chi_int.coeffs().iter().all(|c| c.is_exact()) {
            let bi: fpoly::BiPoly = chi_int
                .coeffs()
                .iter()
                .map(|c| {
                    if c.is_exact_zero() {
                        return Vec::new();
                    }
                    let mut v = vec![0u32; c.start() as usize];
                    v.extend_from_slice(c.digits());
                    v
                })
                .collect();
            if !fpoly::bi_is_squarefree(chi.field(), &bi) {
                return Err(Error::NotIrreducible);
            }
        }
        let alg = PolyAlgebra::new(&chi_int, work, work)?;
        let od = maximal_order(&alg)?;
        let ls = local_structure(&alg, &od)?;
        Ok(FieldData { chi: chi.clone(), shift, alg, od, ls })
    }
    pub fn base(&self) -> &Arc<FiniteField> {
        self.alg.field()
    }
    pub fn n(&self) -> usize {
        self.alg.n()
    }
    pub fn e(&self) -> usize {
        self.ls.e
    }
    pub fn f(&self) -> usize {
        self.ls.f
    }
    pub fn work(&self) -> i64 {
        self.alg.work()
    }
    pub fn separable(&self) -> bool {
        !self.chi.derivative_vanishes()
    }
    /// The generator γ = T^{-s} x'.
    pub fn gamma(&self) -> Elem {
        self.alg.scale(&self.alg.x(), &Series::t_pow(self.base(), -self.shift))
    }
    /// Matrix of multiplication by `a` in the power basis of x'.
    pub fn mult(&self, a: &Elem) -> Mat {
        self.alg.mult_matrix(a)
    }
    /// log_q [𝔬_E : 𝔬[x']].
    pub fn index(&self) -> i64 {
        -self.od.order.det_valuation()
    }
    /// ν_E(a), the valuation normalized by ν_E(ϖ_E) = 1.
    pub fn valuation(&self, a: &Elem) -> Result<i64> {
        let e = self.e() as i64;
        let c = self.ls.coords(a);
        let mut best = INF;
        let mut uncertain = INF;
        for (k, ck) in c.iter().enumerate() {
            if ck.is_exact_zero() {
                continue;
            }
            let lvl = self.ls.level(k) as i64;
            if ck.is_certified_nonzero() {
                best = best.min(e * ck.val_lb() + lvl);
            } else {
                uncertain = uncertain.min(e * ck.val_lb() + lvl);
            }
        }
        if best == INF && uncertain == INF {
            return Ok(INF);
        }
        if uncertain <= best {
            return Err(prec_err("valuation in the extension undetermined at working precision"));
        }
        Ok(best)
    }
    /// ϖ_E^k 𝔬_E in power-basis coordinates.
    pub fn ideal(&self, k: i64) -> Result<OLattice> {
        let e = self.e() as i64;
        let f = self.base().clone();
        let n = self.n();
        let scale: Vec<Series> = (0..n)
            .map(|c| {
                let lvl = self.ls.level(c) as i64;
                Series::t_pow(&f, (k - lvl + e - 1).div_euclid(e))
            })
            .collect();
        let gens = self.ls.basis.mul(&Mat::diagonal(&f, &scale));
        OLattice::from_generators(&gens, self.work())
    }
    /// The hereditary order 𝔄(E) = End^0 of the chain {𝔭_E^i}, in the power
    /// basis of x'.
    pub fn order(&self) -> Result<HereditaryOrder> {
        let levels: Vec<i64> = (0..self.n()).map(|c| self.ls.level(c) as i64).collect();
        HereditaryOrder::with_basis(self.ls.basis.clone(), levels, self.e(), self.work())
    }
    /// Residue class in F_Q of an integral element.
    pub fn residue(&self, a: &Elem) -> Result<u32> {
        let b = self.ls.to_top_coords(a);
        let c = &b[0];
        if c.val_lb() < 0 && c.is_certified_nonzero() {
            return Err(Error::InvalidInput("element is not integral".into()));
        }
        if c.abs_prec() <= 0 {
            return Err(prec_err("residue undetermined at working precision"));
        }
        for bi in &b[1..] {
            if bi.val_lb() < 0 {
                return Err(Error::InvalidInput("element is not integral".into()));
            }
        }
        Ok(c.coeff_or_zero(0))
    }
    /// Degree over F_q of a residue class in F_Q.
    pub fn residue_degree_of(&self, a: u32) -> usize {
        let top = self.ls.top();
        let q = self.base().q() as u64;
        let f = self.f();
        (1..=f).find(|&d| f.is_multiple_of(d) && top.pow(a, q.pow(d as u32)) == a).unwrap_or(f)
    }
    /// δ(E/F) = ν(disc 𝔬_E), or None for inseparable E.
    pub fn delta(&self) -> Result<Option<i64>> {
        if !self.separable() {
            return Ok(None);
        }
        let chi_int = self.alg.modulus();
        Ok(Some(disc_valuation(chi_int)? - 2 * self.index()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u32, s: &str) -> FieldData {
        let f = FiniteField::from_order(q).unwrap();
        FieldData::new(&SeriesPoly::parse(&f, s).unwrap(), 60).unwrap()
    }

    #[test]
    fn ramification_and_delta() {
        let k = field(3, "x^2 - T");
        assert_eq!((k.e(), k.f()), (2, 1));
        assert_eq!(k.delta().unwrap(), Some(1));
        let k = field(2, "x^2 + T*x + T");
        assert_eq!(k.delta().unwrap(), Some(2));
        let k = field(2, "x^2 + T");
        assert_eq!(k.delta().unwrap(), None);
        let k = field(3, "x^2 - T^-3");
        assert_eq!(k.shift, 2);
        assert_eq!(k.valuation(&k.gamma()).unwrap(), -3);
    }

    #[test]
    fn unramified_residue() {
        let k = field(2, "x^2 + x + 1");
        assert_eq!((k.e(), k.f()), (1, 2));
        let r = k.residue(&k.gamma()).unwrap();
        assert_eq!(k.residue_degree_of(r), 2);
        assert_eq!(k.delta().unwrap(), Some(0));
    }
}
