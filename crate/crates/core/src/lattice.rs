//! Full-rank 𝔬-lattices in F^m, 𝔬 = F_q[[T]], given by column bases, and the
//! reductions over the discrete valuation ring that compute spans,
//! preimages, inclusions and indices.

use crate::error::{prec_err, Error, Result};
use crate::ff::FiniteField;
use crate::linalg::{pick_pivot, Mat};
use crate::series::{Series, INF};
use std::sync::Arc;

/// Lattice with a lower-triangular column basis (Hermite form over 𝔬).
#[derive(Clone, Debug)]
pub struct OLattice {
    basis: Mat,
}

impl OLattice {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Mat {
        &self.basis
    }
    pub fn field(&self) -> &Arc<FiniteField> {
        self.basis.field()
    }

    /// 𝔬^m.
    pub fn standard(field: &Arc<FiniteField>, m: usize) -> OLattice {
        OLattice { basis: Mat::identity(field, m) }
    }
    /// ⊕ T^{e_i} 𝔬.
    pub fn diagonal(field: &Arc<FiniteField>, exps: &[i64]) -> OLattice {
        let d: Vec<Series> = exps.iter().map(|&e| Series::t_pow(field, e)).collect();
        OLattice { basis: Mat::diagonal(field, &d) }
    }
    /// Lattice spanned by the columns of `gens` (must have full rank).
    pub fn from_generators(gens: &Mat, cap: i64) -> Result<OLattice> {
        let basis = hermite_columns(gens, cap)?;
        Ok(OLattice { basis })
    }
    /// Wrap a basis that is already lower triangular with nonzero diagonal.
    pub fn from_triangular(basis: Mat) -> Result<OLattice> {
        let m = basis.rows();
        for i in 0..m {
            if !basis.get(i, i).is_certified_nonzero() {
                return Err(prec_err("triangular basis with an undetermined diagonal entry"));
            }
            for j in i + 1..m {
                if !basis.get(i, j).is_exact_zero() {
                    return Err(Error::InvalidInput("basis is not lower triangular".into()));
                }
            }
        }
        Ok(OLattice { basis })
    }

    /// Σ ν(b_ii) = ν(det basis).
    pub fn det_valuation(&self) -> i64 {
        (0..self.dim()).map(|i| self.basis.get(i, i).val_lb()).sum()
    }

    /// Coordinates of `v` in the basis (forward substitution).
    pub fn coords(&self, v: &[Series], cap: i64) -> Result<Vec<Series>> {
        let m = self.dim();
        let f = self.field().clone();
        let mut x = vec![Series::zero(&f); m];
        for i in 0..m {
            let mut r = v[i].clone();
            for (j, xj) in x.iter().enumerate().take(i) {
                let b = self.basis.get(i, j);
                if !b.is_exact_zero() && !xj.is_exact_zero() {
                    r = r.sub(&b.mul(xj));
                }
            }
            x[i] = r.div(self.basis.get(i, i), cap)?;
        }
        Ok(x)
    }

    /// Membership test. Undecidable coordinates raise InsufficientPrecision.
    pub fn contains(&self, v: &[Series], cap: i64) -> Result<bool> {
        let x = self.coords(v, cap)?;
        for c in &x {
            if c.val_lb() >= 0 {
                continue;
            }
            if c.is_certified_nonzero() {
                return Ok(false);
            }
            return Err(prec_err("membership undecidable at working precision"));
        }
        Ok(true)
    }

    /// Whether `other` ⊆ `self`.
    pub fn includes(&self, other: &OLattice, cap: i64) -> Result<bool> {
        for j in 0..other.dim() {
            if !self.contains(&other.basis.col(j), cap)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &OLattice, cap: i64) -> Result<bool> {
        Ok(self.includes(other, cap)? && other.includes(self, cap)?)
    }

    /// L1 + L2.
    pub fn sum(&self, other: &OLattice, cap: i64) -> Result<OLattice> {
        let m = self.dim();
        let f = self.field().clone();
        let mut g = Mat::zeros(&f, m, 2 * m);
        g.put_block(0, 0, &self.basis);
        g.put_block(0, m, &other.basis);
        Self::from_generators(&g, cap)
    }

    /// T^k L.
    pub fn scaled(&self, k: i64) -> OLattice {
        OLattice { basis: self.basis.scale(&Series::t_pow(self.field(), k)) }
    }

    /// Image under an invertible linear map.
    pub fn image(&self, map: &Mat, cap: i64) -> Result<OLattice> {
        Self::from_generators(&map.mul(&self.basis), cap)
    }

    /// Dual lattice {y : yᵀx ∈ 𝔬 for all x ∈ L}.
    pub fn dual(&self, cap: i64) -> Result<OLattice> {
        let inv_t = self.basis.inverse(cap)?.transpose();
        Self::from_generators(&inv_t, cap)
    }

    /// L1 ∩ L2 via duality.
    pub fn intersection(&self, other: &OLattice, cap: i64) -> Result<OLattice> {
        self.dual(cap)?.sum(&other.dual(cap)?, cap)?.dual(cap)
    }
}

/// log_q [L1 : L2] for L2 ⊆ L1 (inclusion verified).
pub fn lattice_index_exponent(l1: &OLattice, l2: &OLattice, cap: i64) -> Result<i64> {
    if !l1.includes(l2, cap)? {
        return Err(Error::NotSublattice);
    }
    Ok(l2.det_valuation() - l1.det_valuation())
}

/// The same index as a power of p: log_p [L1 : L2] = r · log_q.
pub fn lattice_index_exponent_p(l1: &OLattice, l2: &OLattice, cap: i64) -> Result<i64> {
    Ok(lattice_index_exponent(l1, l2, cap)? * l1.field().r() as i64)
}

/// Column Hermite reduction over 𝔬 of a generating set of full rank.
/// The result is lower triangular; discarded columns are certified to lie
/// in the span.
pub fn hermite_columns(gens: &Mat, cap: i64) -> Result<Mat> {
    let m = gens.rows();
    let k = gens.cols();
    if k < m {
        return Err(Error::InvalidInput("too few generators for a full-rank lattice".into()));
    }
    let mut a = gens.clone();
    for r in 0..m {
        let (_, pj) = match pick_pivot(&a, r, r, r + 1, k)? {
            Some(p) => p,
            None => return Err(prec_err(format!("no certified pivot in row {r}: rank deficient at precision"))),
        };
        a.swap_cols(r, pj);
        let pinv = a.get(r, r).inv(cap)?;
        for j in r + 1..k {
            let c = a.get(r, j).mul(&pinv);
            if c.is_exact_zero() {
                continue;
            }
            for i in r + 1..m {
                let v = a.get(i, j).sub(&c.mul(a.get(i, r)));
                a.set(i, j, v);
            }
            // the pivot row entry is zero by construction
            a.set(r, j, Series::zero(gens.field()));
        }
    }
    let basis = a.block(0, 0, m, m);
    let lat = OLattice { basis: basis.clone() };
    // leftover generators must be certified members of the span
    for j in m..k {
        let col = a.col(j);
        if col.iter().all(|x| x.is_exact_zero()) {
            continue;
        }
        let x = lat.coords(&col, cap)?;
        if x.iter().any(|c| c.val_lb() < 0) {
            return Err(prec_err("discarded generator not certified inside the span"));
        }
    }
    Ok(basis)
}

/// Smith-type reduction over 𝔬: returns the diagonal valuations
/// (`INF` for a zero direction) and the unimodular column transform R with
/// L·A·R diagonal for some unimodular L. When `rank` is given the reduction
/// stops after that many pivots and treats the rest as zero.
pub fn smith_columns(a: &Mat, rank: Option<usize>, cap: i64) -> Result<(Vec<i64>, Mat)> {
    let (m, n) = (a.rows(), a.cols());
    let f = a.field().clone();
    let mut w = a.clone();
    let mut r = Mat::identity(&f, n);
    let mut diag = vec![INF; n];
    let steps = m.min(n);
    for t in 0..steps {
        if rank == Some(t) {
            break;
        }
        let piv = pick_pivot(&w, t, t, m, n);
        let (pi, pj) = match piv {
            Ok(Some(p)) => p,
            Ok(None) => {
                let all_zero = (t..m).all(|i| (t..n).all(|j| w.get(i, j).is_exact_zero()));
                if all_zero {
                    break;
                }
                return Err(Error::UnstableKernel(format!(
                    "{} certified pivots, remaining block is O(T^{})",
                    t,
                    w.block(t, t, m - t, n - t).min_val_lb()
                )));
            }
            Err(e) => {
                if rank.is_some() {
                    return Err(e);
                }
                return Err(Error::UnstableKernel(e.to_string()));
            }
        };
        w.swap_rows(pi, t);
        w.swap_cols(pj, t);
        r.swap_cols(pj, t);
        let p = w.get(t, t).clone();
        diag[t] = p.valuation()?;
        let pinv = p.inv(cap)?;
        for i in t + 1..m {
            let c = w.get(i, t).mul(&pinv);
            if c.is_exact_zero() {
                continue;
            }
            for j in t..n {
                let v = w.get(i, j).sub(&c.mul(w.get(t, j)));
                w.set(i, j, v);
            }
        }
        for j in t + 1..n {
            let c = w.get(t, j).mul(&pinv);
            if c.is_exact_zero() {
                continue;
            }
            w.set(t, j, Series::zero(&f));
            for i in 0..n {
                let v = r.get(i, j).sub(&c.mul(r.get(i, t)));
                r.set(i, j, v);
            }
        }
    }
    if let Some(k) = rank {
        if diag.iter().filter(|&&d| d < INF).count() != k {
            return Err(Error::UnstableKernel(format!("expected rank {k}")));
        }
        // the discarded block must carry no certified digit
        for i in k..m {
            for j in k..n {
                if w.get(i, j).is_certified_nonzero() {
                    return Err(Error::UnstableKernel(format!(
                        "rank exceeds the expected {k}: residual entry {}",
                        w.get(i, j)
                    )));
                }
            }
        }
    }
    Ok((diag, r))
}

/// {x ∈ L_dom : C x ∈ L_tgt} for a linear map C: F^n → F^m.
pub fn preimage(c: &Mat, dom: &OLattice, tgt: &OLattice, rank: Option<usize>, cap: i64) -> Result<OLattice> {
    let f = c.field().clone();
    let tgt_inv = tgt.basis().inverse(cap)?;
    let cprime = tgt_inv.mul(c).mul(dom.basis());
    let (diag, r) = smith_columns(&cprime, rank, cap)?;
    let n = dom.dim();
    let scale: Vec<Series> = diag.iter().map(|&d| Series::t_pow(&f, if d >= INF { 0 } else { (-d).max(0) })).collect();
    let gens = dom.basis().mul(&r).mul(&Mat::diagonal(&f, &scale));
    let _ = n;
    OLattice::from_generators(&gens, cap)
}

/// Generators of ker(C) ∩ L_dom when C has the given rank.
pub fn kernel_generators(c: &Mat, dom: &OLattice, rank: usize, cap: i64) -> Result<Mat> {
    let cprime = c.mul(dom.basis());
    let (_, r) = smith_columns(&cprime, Some(rank), cap)?;
    let n = dom.dim();
    Ok(dom.basis().mul(&r).block(0, rank, n, n - rank))
}

/// Generators of a complement in L_dom to ker(C) ∩ L_dom, mapped
/// injectively by C when C has the given rank.
pub fn complement_generators(c: &Mat, dom: &OLattice, rank: usize, cap: i64) -> Result<Mat> {
    let cprime = c.mul(dom.basis());
    let (_, r) = smith_columns(&cprime, Some(rank), cap)?;
    let n = dom.dim();
    Ok(dom.basis().mul(&r).block(0, 0, n, rank))
}
