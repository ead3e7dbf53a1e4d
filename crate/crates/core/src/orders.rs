//! Principal hereditary orders in End_F(F^N), their radical powers 𝔓^k,
//! the intertwining lattices 𝔑_k(β, 𝔄) and the integer k_0(β, 𝔄).
//!
//! An order is described by an adapted basis b_0..b_{N-1} and levels
//! ℓ(j) ∈ [0, e): in that basis 𝔓^k consists of the matrices W with
//! ν(W_{ij}) ≥ ⌈(k + ℓ(j) − ℓ(i))/e⌉. Matrix lattices live in F^{N²} through
//! the row-major vectorization of matrices written in the adapted basis.

use crate::error::{Error, Result};
use crate::ff::FiniteField;
use crate::lattice::{kernel_generators, lattice_index_exponent, preimage, OLattice};
use crate::linalg::Mat;
use crate::series::{Series, INF};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct HereditaryOrder {
    n: usize,
    period: usize,
    levels: Vec<i64>,
    basis: Mat,
    basis_inv: Mat,
    cap: i64,
}

impl HereditaryOrder {
    /// The standard order 𝔄_e: block upper triangular modulo 𝔭 with e
    /// diagonal blocks of size N/e.
    pub fn standard(field: &Arc<FiniteField>, e: usize, n: usize, cap: i64) -> Result<HereditaryOrder> {
        if e == 0 || !n.is_multiple_of(e) {
            return Err(Error::InvalidInput(format!("period {e} does not divide {n}")));
        }
        let block = n / e;
        let levels = (0..n).map(|j| (e - 1 - j / block) as i64).collect();
        Self::with_basis(Mat::identity(field, n), levels, e, cap)
    }

    pub fn with_basis(basis: Mat, levels: Vec<i64>, period: usize, cap: i64) -> Result<HereditaryOrder> {
        let n = basis.rows();
        if levels.len() != n || levels.iter().any(|&l| l < 0 || l >= period as i64) {
            return Err(Error::InvalidInput("levels must lie in [0, period)".into()));
        }
        let basis_inv = basis.inverse(cap)?;
        Ok(HereditaryOrder { n, period, levels, basis, basis_inv, cap })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn period(&self) -> usize {
        self.period
    }
    pub fn levels(&self) -> &[i64] {
        &self.levels
    }
    pub fn cap(&self) -> i64 {
        self.cap
    }
    pub fn field(&self) -> &Arc<FiniteField> {
        self.basis.field()
    }
    /// P^{-1} X P for the adapted basis P.
    pub fn to_adapted(&self, x: &Mat) -> Mat {
        self.basis_inv.mul(x).mul(&self.basis)
    }
    pub fn from_adapted(&self, x: &Mat) -> Mat {
        self.basis.mul(x).mul(&self.basis_inv)
    }
    /// Row-major vector of X in the adapted basis.
    pub fn vec_of(&self, x: &Mat) -> Vec<Series> {
        self.to_adapted(x).entries().to_vec()
    }
    pub fn mat_of(&self, v: &[Series]) -> Mat {
        let n = self.n;
        let a = Mat::from_fn(self.field(), n, n, |i, j| v[i * n + j].clone());
        self.from_adapted(&a)
    }
    fn exponent(&self, k: i64, i: usize, j: usize) -> i64 {
        let e = self.period as i64;
        (k + self.levels[j] - self.levels[i] + e - 1).div_euclid(e)
    }
    /// 𝔓^k as a lattice in F^{N²}.
    pub fn radical_power(&self, k: i64) -> OLattice {
        let n = self.n;
        let exps: Vec<i64> = (0..n * n).map(|t| self.exponent(k, t / n, t % n)).collect();
        OLattice::diagonal(self.field(), &exps)
    }
    pub fn lattice(&self) -> OLattice {
        self.radical_power(0)
    }
    /// ν_𝔄(X) = max{k : X ∈ 𝔓^k}; INF for X = 0.
    pub fn valuation(&self, x: &Mat) -> Result<i64> {
        let a = self.to_adapted(x);
        let e = self.period as i64;
        let n = self.n;
        let mut best = INF;
        let mut uncertain = INF;
        for i in 0..n {
            for j in 0..n {
                let c = a.get(i, j);
                if c.is_exact_zero() {
                    continue;
                }
                let v = e * c.val_lb() + self.levels[i] - self.levels[j];
                if c.is_certified_nonzero() {
                    best = best.min(v);
                } else {
                    uncertain = uncertain.min(v);
                }
            }
        }
        if uncertain <= best && uncertain < INF {
            return Err(crate::error::prec_err("order valuation undetermined at working precision"));
        }
        Ok(best)
    }
    pub fn contains(&self, x: &Mat, k: i64) -> Result<bool> {
        Ok(self.valuation(x)? >= k)
    }
    /// Matrix of ad_β: W ↦ βW − Wβ on row-major vectors in the adapted basis.
    pub fn ad_matrix(&self, beta: &Mat) -> Mat {
        let b = self.to_adapted(beta);
        let id = Mat::identity(self.field(), self.n);
        b.kron(&id).sub(&id.kron(&b.transpose()))
    }
    /// Whether x𝔄x^{-1} = 𝔄 for invertible x.
    pub fn normalized_by(&self, x: &Mat) -> Result<bool> {
        let xinv = x.inverse(self.cap)?;
        let l = self.lattice();
        let n = self.n;
        for t in 0..n * n {
            let w = self.mat_of(&l.basis().col(t));
            if !self.contains(&x.mul(&w).mul(&xinv), 0)? || !self.contains(&xinv.mul(&w).mul(x), 0)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Rank of ad_β for β generating a field of degree m in M_N(F).
pub fn pure_ad_rank(n: usize, m: usize) -> usize {
    n * n - n * n / m
}

/// The data of β relative to 𝔄 needed for the 𝔑_k ladder.
#[derive(Clone, Debug)]
pub struct Intertwining {
    pub order: HereditaryOrder,
    pub ad: Mat,
    pub rank: usize,
    /// ν_𝔄(β)
    pub nu: i64,
    /// 𝔅 = 𝔄 ∩ centralizer of β, as generators in F^{N²}
    pub centralizer: Mat,
}

impl Intertwining {
    pub fn new(beta: &Mat, order: &HereditaryOrder, rank: usize) -> Result<Intertwining> {
        let ad = order.ad_matrix(beta);
        let nu = order.valuation(beta)?;
        let centralizer = kernel_generators(&ad, &order.lattice(), rank, order.cap)?;
        Ok(Intertwining { order: order.clone(), ad, rank, nu, centralizer })
    }
    /// 𝔑_k(β, 𝔄) = {x ∈ 𝔄 : ad_β(x) ∈ 𝔓^k}.
    pub fn lattice(&self, k: i64) -> Result<OLattice> {
        let o = &self.order;
        preimage(&self.ad, &o.lattice(), &o.radical_power(k), Some(self.rank), o.cap)
    }
    /// 𝔅 + 𝔓^k.
    pub fn centralizer_plus(&self, k: i64) -> Result<OLattice> {
        let o = &self.order;
        let n2 = o.n * o.n;
        let p = o.radical_power(k);
        let m = self.centralizer.cols();
        let mut g = Mat::zeros(o.field(), n2, m + n2);
        g.put_block(0, 0, &self.centralizer);
        g.put_block(0, m, p.basis());
        OLattice::from_generators(&g, o.cap)
    }
    /// k_0(β, 𝔄): the largest k with 𝔑_k ⊄ 𝔅 + 𝔓, or None (−∞) for
    /// central β. The search stops with CapExceeded beyond ν_𝔄(β) + window.
    pub fn k0(&self, window: i64) -> Result<Option<i64>> {
        if self.rank == 0 {
            return Ok(None);
        }
        let target = self.centralizer_plus(1)?;
        let cap = self.order.cap;
        let included = |k: i64| -> Result<bool> { target.includes(&self.lattice(k)?, cap) };
        let mut lo = self.nu;
        if included(lo)? {
            return Err(Error::InvalidInput("β does not act as a pure element on the order".into()));
        }
        let mut step = 1;
        let mut hi = lo + step;
        while !included(hi)? {
            lo = hi;
            step *= 2;
            hi = lo + step;
            if hi > self.nu + window {
                hi = self.nu + window;
                if hi <= lo || !included(hi)? {
                    return Err(Error::CapExceeded(format!("k_0 beyond ν_𝔄(β) + {window}")));
                }
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if included(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(lo))
    }
}

/// log_q [L1 : L2] for L2 ⊆ L1.
pub fn index_exponent(l1: &OLattice, l2: &OLattice, cap: i64) -> Result<i64> {
    lattice_index_exponent(l1, l2, cap)
}

/// log_q of the generalized index [L1 : L2] = ν det B_2 − ν det B_1, defined
/// without any inclusion.
pub fn generalized_index(l1: &OLattice, l2: &OLattice) -> i64 {
    l2.det_valuation() - l1.det_valuation()
}
