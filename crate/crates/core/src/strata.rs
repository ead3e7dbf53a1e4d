//! Strata [𝔄, n, r, γ] over F, tame corestrictions, the splitting
//! 𝔓^k = ad_β(𝔑_k) ⊕ x𝔔^k and the successive-approximation loop.
//!
//! Elements of a totally ramified E = F[π] with V = E^d are realized in
//! M_N(F), N = d·[E:F], through the regular representation on the power
//! basis {π^i}: an E-matrix b becomes the block matrix whose (j, k) block is
//! multiplication by b_jk.

use crate::algebra::Elem;
use crate::error::{Error, Result};
use crate::ext::LocalFieldExt;
use crate::factor::is_irreducible;
use crate::ff::FiniteField;
use crate::field::FieldData;
use crate::invariants::{elliptic_invariants, Settings};
use crate::lattice::{complement_generators, kernel_generators, OLattice};
use crate::linalg::Mat;
use crate::matrix::char_min_invariant;
use crate::orders::{pure_ad_rank, HereditaryOrder, Intertwining};
use crate::poly::{gcd, is_eisenstein, SeriesPoly};
use crate::series::{Series, INF};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Stratum {
    pub order: HereditaryOrder,
    pub n: i64,
    pub r: i64,
    pub gamma: Mat,
}

impl Stratum {
    pub fn new(order: HereditaryOrder, n: i64, r: i64, gamma: Mat) -> Result<Stratum> {
        if n <= r {
            return Err(Error::InvalidInput(format!("stratum needs n > r, got n = {n}, r = {r}")));
        }
        if gamma.rows() != order.dim() || !gamma.is_square() {
            return Err(Error::InvalidInput("γ does not act on the order's space".into()));
        }
        if order.valuation(&gamma)? < -n {
            return Err(Error::InvalidInput(format!("ν_𝔄(γ) < −{n}")));
        }
        Ok(Stratum { order, n, r, gamma })
    }
    /// Same order and levels with γ − γ' ∈ 𝔓^{−r}.
    pub fn equivalent(&self, o: &Stratum) -> Result<bool> {
        if self.n != o.n || self.r != o.r {
            return Ok(false);
        }
        Ok(self.order.valuation(&self.gamma.sub(&o.gamma))? >= -self.r)
    }
}

/// Lower bound for ν_𝔄(x) that also counts undetermined entries at their
/// precision.
pub fn level_lb(order: &HereditaryOrder, x: &Mat) -> i64 {
    let a = order.to_adapted(x);
    let e = order.period() as i64;
    let lv = order.levels();
    let n = order.dim();
    let mut best = INF;
    for i in 0..n {
        for j in 0..n {
            let c = a.get(i, j);
            if c.is_exact_zero() {
                continue;
            }
            best = best.min(e.saturating_mul(c.val_lb()).saturating_add(lv[i] - lv[j]));
        }
    }
    best
}

/// The minimal polynomial of γ, read off from an irreducible
/// characteristic polynomial when possible so inexact input stays usable.
pub fn generating_poly(gamma: &Mat, work: i64) -> Result<SeriesPoly> {
    let cp = gamma.char_poly();
    if cp.deg() == 1 || is_irreducible(&cp, work).unwrap_or(false) {
        return Ok(cp);
    }
    let (_, key) = char_min_invariant(gamma, work)?;
    Ok(key.minimal().clone())
}

/// Σ a_i (T^s γ)^i for a ∈ F[x'] with x' = T^s γ.
pub fn eval_elem(fd: &FieldData, a: &Elem, gamma: &Mat) -> Mat {
    let f = gamma.field().clone();
    let xp = gamma.scale(&Series::t_pow(&f, fd.shift));
    let mut acc = Mat::zeros(&f, gamma.rows(), gamma.cols());
    for c in a.iter().rev() {
        acc = acc.mul(&xp);
        for i in 0..gamma.rows() {
            let v = acc.get(i, i).add(c);
            acc.set(i, i, v);
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StratumFlags {
    pub pure: bool,
    pub simple: bool,
    /// ν_𝔄(γ)
    pub valuation: i64,
    /// [F[γ] : F] when F[γ] is a field
    pub field_degree: Option<usize>,
    /// k_0(γ, 𝔄); absent for central γ (k_0 = −∞) or impure strata
    pub k0: Option<i64>,
    pub central: bool,
}

pub fn stratum_flags(s: &Stratum, work: i64, window: i64) -> Result<StratumFlags> {
    let m = generating_poly(&s.gamma, work)?;
    let valuation = s.order.valuation(&s.gamma)?;
    let impure = StratumFlags { pure: false, simple: false, valuation, field_degree: None, k0: None, central: false };
    if m.deg() > 1 && !is_irreducible(&m, work)? {
        return Ok(impure);
    }
    let deg = m.deg();
    if deg == 1 {
        let pure = valuation == -s.n;
        return Ok(StratumFlags { pure, simple: pure, valuation, field_degree: Some(1), k0: None, central: true });
    }
    let fd = FieldData::new(&m, work)?;
    for c in 0..deg {
        let g = eval_elem(&fd, &fd.ls.basis.col(c), &s.gamma);
        if !s.order.contains(&g, 0)? {
            return Ok(StratumFlags { field_degree: Some(deg), ..impure });
        }
    }
    let w = eval_elem(&fd, &fd.ls.uniformizer, &s.gamma);
    if !s.order.normalized_by(&w)? || valuation != -s.n {
        return Ok(StratumFlags { field_degree: Some(deg), ..impure });
    }
    let inter = Intertwining::new(&s.gamma, &s.order, pure_ad_rank(s.order.dim(), deg))?;
    let k0 = inter.k0(window)?;
    let simple = k0.is_none_or(|k| s.r < -k);
    Ok(StratumFlags { pure: true, simple, valuation, field_degree: Some(deg), k0, central: false })
}

/// Characteristic polynomial over F_q of y = T^{n/δ} γ^{e/δ} acting on
/// L_0/𝔭L_0, δ = gcd(e, n). Coefficients run from degree 0 upward.
pub fn stratum_char_poly(s: &Stratum) -> Result<Vec<u32>> {
    let f = s.gamma.field().clone();
    let e = s.order.period() as i64;
    let delta = gcd(e, s.n.abs()).max(1);
    let y = s.gamma.pow((e / delta) as u32).scale(&Series::t_pow(&f, s.n / delta));
    let a = s.order.to_adapted(&y);
    let cp = a.char_poly();
    cp.coeffs()
        .iter()
        .map(|c| {
            if c.is_exact_zero() {
                return Ok(0);
            }
            if c.abs_prec() <= 0 {
                return Err(crate::error::prec_err("residual characteristic polynomial undetermined"));
            }
            if c.val_lb() < 0 {
                return Err(Error::InvalidInput("y_γ is not integral on the lattice chain".into()));
            }
            Ok(c.coeff_or_zero(0))
        })
        .collect()
}

/// An (E, E)-bimodule map s₀ : A(E) = End_F(E) → E with s₀(𝔄(E)) = 𝔬_E and
/// a base point x₀ ∈ 𝔄(E), s₀(x₀) = 1. Matrices act on the power basis of
/// x'; `map` takes row-major vectors to power-basis coordinates.
#[derive(Clone, Debug)]
pub struct Corestriction {
    pub fd: FieldData,
    pub map: Mat,
    pub x0: Mat,
    /// x₀ = 1 was admissible
    pub tame: bool,
}

impl Corestriction {
    pub fn apply(&self, x: &Mat) -> Elem {
        self.map.mul_vec(x.entries())
    }
    pub fn n(&self) -> usize {
        self.fd.n()
    }
    /// s₀(𝔓^k(E)) as a lattice in power-basis coordinates.
    pub fn image_of_radical(&self, k: i64) -> Result<OLattice> {
        let order = self.fd.order()?;
        let l = order.radical_power(k);
        let n = self.n();
        let gens: Vec<Vec<Series>> = (0..n * n).map(|t| self.apply(&order.mat_of(&l.basis().col(t)))).collect();
        let g = Mat::from_cols(self.fd.base(), n, &gens);
        OLattice::from_generators(&g, self.fd.work())
    }
}

/// The corestriction built from the dual basis of {x'^i} under the form
/// (a, b) ↦ [x'^{n−1}](ab), which is nondegenerate on any field extension;
/// s(X) = Σ_i X(e_i)·e_i^∨ is then a bimodule map.
pub fn tame_corestriction(fd: &FieldData) -> Result<Corestriction> {
    let n = fd.n();
    let f = fd.base().clone();
    let cap = fd.work();
    let alg = &fd.alg;
    let x = alg.x();
    let mut pw = vec![alg.one()];
    for k in 1..2 * n - 1 {
        pw.push(alg.mul(&pw[k - 1], &x));
    }
    let gram = Mat::from_fn(&f, n, n, |i, j| pw[i + j][n - 1].clone());
    let ginv = gram.inverse(cap)?;
    let mut map = Mat::zeros(&f, n, n * n);
    for i in 0..n {
        let dual: Elem = (0..n).map(|k| ginv.get(k, i).clone()).collect();
        let md = fd.mult(&dual);
        for r in 0..n {
            for t in 0..n {
                map.set(t, r * n + i, md.get(t, r).clone());
            }
        }
    }
    let mut cor = Corestriction { fd: fd.clone(), map, x0: Mat::identity(&f, n), tame: true };
    let order = fd.order()?;
    let lat = order.lattice();
    let gens: Vec<Mat> = (0..n * n).map(|t| order.mat_of(&lat.basis().col(t))).collect();
    let mut j = INF;
    for g in &gens {
        let v = fd.valuation(&cor.apply(g))?;
        j = j.min(v);
    }
    if j >= INF {
        return Err(Error::NormalizationFailed("corestriction vanishes on 𝔄(E)".into()));
    }
    let mw = fd.mult(&fd.ls.uniformizer);
    let scale = if j > 0 { mw.inverse(cap)?.pow(j as u32) } else { mw.pow((-j) as u32) };
    cor.map = scale.mul(&cor.map);
    let one = cor.apply(&Mat::identity(&f, n));
    if fd.valuation(&one)? == 0 {
        cor.map = fd.mult(&one).inverse(cap)?.mul(&cor.map);
        return Ok(cor);
    }
    for g in &gens {
        let u = cor.apply(g);
        if fd.valuation(&u)? == 0 {
            cor.x0 = g.mul(&fd.mult(&u).inverse(cap)?);
            cor.tame = false;
            return Ok(cor);
        }
    }
    Err(Error::NormalizationFailed("no generator of 𝔄(E) maps to a unit".into()))
}

/// A totally ramified E = F[π] (π a root of an exact Eisenstein φ) acting
/// on V = E^d ≅ F^N.
#[derive(Clone, Debug)]
pub struct EmbeddedField {
    pub fd: FieldData,
    pub ext: LocalFieldExt,
    pub d: usize,
    pub pi_inv: Elem,
}

impl EmbeddedField {
    pub fn new(phi: &SeriesPoly, d: usize, work: i64) -> Result<EmbeddedField> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be positive".into()));
        }
        if !phi.is_exact() || !is_eisenstein(phi)? {
            return Err(Error::InvalidInput("E must be given by an exact Eisenstein polynomial".into()));
        }
        let fd = FieldData::new(phi, work)?;
        let e = phi.deg();
        let ext = LocalFieldExt::from_eisenstein(phi, (e as i64) * work)?;
        let a0 = phi.coeff(0);
        let a0_inv = match Series::one(fd.base()).div_exact(&a0) {
            Some(s) => s,
            None => a0.inv(work)?,
        };
        // π^{-1} = −(π^{e−1} + a_{e−1}π^{e−2} + … + a_1)/a_0
        let pi_inv: Elem = (0..e).map(|i| phi.coeff(i + 1).mul(&a0_inv).neg()).collect();
        Ok(EmbeddedField { fd, ext, d, pi_inv })
    }
    pub fn degree(&self) -> usize {
        self.fd.n()
    }
    pub fn big_n(&self) -> usize {
        self.d * self.fd.n()
    }
    pub fn base(&self) -> &Arc<FiniteField> {
        self.fd.base()
    }
    /// The field carrying E-matrices, E ≅ F_q((π)).
    pub fn top(&self) -> &Arc<FiniteField> {
        self.ext.top()
    }
    /// Power-basis coordinates of a π-series.
    pub fn elem_of_series(&self, s: &Series) -> Elem {
        let alg = &self.fd.alg;
        let f = self.base().clone();
        let e = self.degree() as i64;
        if s.is_exact_zero() {
            let mut z = alg.zero();
            if let Some(m) = s.prec() {
                for (i, c) in z.iter_mut().enumerate() {
                    *c = Series::big_o(&f, (m - i as i64 + e - 1).div_euclid(e));
                }
            }
            return z;
        }
        let start = s.start();
        let low = start.min(0);
        let digits: Vec<Series> =
            (low..start + s.digits().len() as i64).map(|k| Series::constant(&f, s.coeff_or_zero(k))).collect();
        let mut a = alg.from_poly(&SeriesPoly::new(&f, digits));
        if low < 0 {
            a = alg.mul(&a, &alg.pow(&self.pi_inv, (-low) as u128));
        }
        if let Some(m) = s.prec() {
            for (i, c) in a.iter_mut().enumerate() {
                *c = c.add(&Series::big_o(&f, (m - i as i64 + e - 1).div_euclid(e)));
            }
        }
        a
    }
    pub fn series_of_elem(&self, a: &Elem) -> Series {
        let top = self.top().clone();
        let mut acc = Series::zero(&top);
        for (i, c) in a.iter().enumerate() {
            acc = acc.add(&self.ext.image(c).shift(i as i64));
        }
        acc.truncate(self.ext.prec)
    }
    /// a ⊗ I_d.
    pub fn scalar(&self, a: &Elem) -> Mat {
        let m = self.fd.mult(a);
        let n = self.degree();
        let mut out = Mat::zeros(self.base(), self.big_n(), self.big_n());
        for j in 0..self.d {
            out.put_block(j * n, j * n, &m);
        }
        out
    }
    /// ι : M_d(E) → M_N(F).
    pub fn embed(&self, b: &Mat) -> Result<Mat> {
        if b.rows() != self.d || !b.is_square() {
            return Err(Error::InvalidInput(format!("expected a {0}×{0} matrix over E", self.d)));
        }
        let n = self.degree();
        let mut out = Mat::zeros(self.base(), self.big_n(), self.big_n());
        for j in 0..self.d {
            for k in 0..self.d {
                let m = self.fd.mult(&self.elem_of_series(b.get(j, k)));
                out.put_block(j * n, k * n, &m);
            }
        }
        Ok(out)
    }
    /// Inverse of `embed` on the centralizer B of E: block (j, k) is read
    /// off from its first column.
    pub fn extract(&self, x: &Mat) -> Mat {
        let n = self.degree();
        Mat::from_fn(self.top(), self.d, self.d, |j, k| {
            let a: Elem = (0..n).map(|t| x.get(j * n + t, k * n).clone()).collect();
            self.series_of_elem(&a)
        })
    }
    /// 𝔄 = End^0 of the chain 𝔭_E^i ⊗ 𝔬_E^d.
    pub fn order(&self) -> Result<HereditaryOrder> {
        let n = self.degree();
        let ls = &self.fd.ls;
        let mut basis = Mat::zeros(self.base(), self.big_n(), self.big_n());
        let mut levels = Vec::with_capacity(self.big_n());
        for j in 0..self.d {
            basis.put_block(j * n, j * n, &ls.basis);
            levels.extend((0..n).map(|c| ls.level(c) as i64));
        }
        HereditaryOrder::with_basis(basis, levels, self.fd.e(), self.fd.work())
    }
    /// s applied blockwise: M_N(F) → B.
    pub fn corestrict(&self, cor: &Corestriction, x: &Mat) -> Mat {
        let n = self.degree();
        let mut out = Mat::zeros(self.base(), self.big_n(), self.big_n());
        for j in 0..self.d {
            for k in 0..self.d {
                let s = cor.apply(&x.block(j * n, k * n, n, n));
                out.put_block(j * n, k * n, &self.fd.mult(&s));
            }
        }
        out
    }
    /// x = x₀ ⊗ I_d.
    pub fn corrector(&self, cor: &Corestriction) -> Mat {
        let n = self.degree();
        let mut out = Mat::zeros(self.base(), self.big_n(), self.big_n());
        for j in 0..self.d {
            out.put_block(j * n, j * n, &cor.x0);
        }
        out
    }
}

/// Precomputed data for splitting v = ad_β(y) + x·b against a pure β.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub order: HereditaryOrder,
    pub beta: Mat,
    pub x: Mat,
    pub k0: Option<i64>,
    rank: usize,
    complement: Mat,
    centralizer: Mat,
    system_inv: Mat,
}

impl Splitting {
    pub fn new(order: &HereditaryOrder, beta: &Mat, x: &Mat, work: i64, window: i64) -> Result<Splitting> {
        let deg = generating_poly(beta, work)?.deg();
        let big = order.dim();
        let rank = pure_ad_rank(big, deg);
        let inter = Intertwining::new(beta, order, rank)?;
        let k0 = if rank == 0 { None } else { inter.k0(window)? };
        let cap = order.cap();
        let dom = order.lattice();
        let complement = complement_generators(&inter.ad, &dom, rank, cap)?;
        let centralizer = kernel_generators(&inter.ad, &dom, rank, cap)?;
        let n2 = big * big;
        let mut system = Mat::zeros(order.field(), n2, n2);
        system.put_block(0, 0, &inter.ad.mul(&complement));
        for t in 0..centralizer.cols() {
            let xb = x.mul(&order.mat_of(&centralizer.col(t)));
            let v = order.vec_of(&xb);
            for (i, c) in v.into_iter().enumerate() {
                system.set(i, rank + t, c);
            }
        }
        let system_inv = system.inverse(cap)?;
        Ok(Splitting {
            order: order.clone(),
            beta: beta.clone(),
            x: x.clone(),
            k0,
            rank,
            complement,
            centralizer,
            system_inv,
        })
    }

    /// (y, b) with v = ad_β(y) + x·b, y in the chosen complement of 𝔅 and b
    /// in the centralizer of β.
    pub fn split(&self, v: &Mat, k: i64) -> Result<(Mat, Mat)> {
        if let Some(k0) = self.k0 {
            if k < k0 {
                return Err(Error::Precondition(format!("k = {k} lies below k_0 = {k0}")));
            }
        }
        if level_lb(&self.order, v) < k {
            return Err(Error::Precondition(format!("v is not in 𝔓^{k}")));
        }
        let w = self.system_inv.mul_vec(&self.order.vec_of(v));
        let y = self.order.mat_of(&self.complement.mul_vec(&w[..self.rank]));
        let b = self.order.mat_of(&self.centralizer.mul_vec(&w[self.rank..]));
        Ok((y, b))
    }

    /// ad_β(y) + x·b.
    pub fn recombine(&self, y: &Mat, b: &Mat) -> Mat {
        self.beta.mul(y).sub(&y.mul(&self.beta)).add(&self.x.mul(b))
    }
}

#[derive(Clone, Debug)]
pub struct Approximation {
    /// g with gγg^{-1} = β + x·b
    pub conjugator: Mat,
    pub b: Mat,
    pub iterations: usize,
    /// lower bound for ν_𝔄 of the final residual
    pub residual_level: i64,
}

/// Successive approximation γ ↦ (1+y)γ(1+y)^{-1}, b ↦ b + b' until the
/// residual gγg^{-1} − β − x·b lies in 𝔓^target.
pub fn approximate_given_beta(sp: &Splitting, r: i64, gamma: &Mat, target: i64) -> Result<Approximation> {
    let order = &sp.order;
    let f = gamma.field().clone();
    let big = order.dim();
    let cap = order.cap();
    if level_lb(order, &gamma.sub(&sp.beta)) < -r {
        return Err(Error::Precondition(format!("γ − β is not in 𝔓^{}", -r)));
    }
    let e = order.period() as i64;
    let keep = target.div_euclid(e) + 4;
    let id = Mat::identity(&f, big);
    let mut cur = gamma.clone();
    let mut g = id.clone();
    let mut b = Mat::zeros(&f, big, big);
    let mut last = -INF;
    for it in 0..(target + r + 16).max(16) as usize {
        let v = cur.sub(&sp.beta).sub(&sp.x.mul(&b));
        let lv = level_lb(order, &v);
        if lv >= target {
            return Ok(Approximation { conjugator: g, b, iterations: it, residual_level: lv });
        }
        if lv <= last {
            return Err(Error::NonConvergence(format!("residual stuck at level {lv}")));
        }
        last = lv;
        let (y, db) = sp.split(&v, lv)?;
        let h = id.add(&y);
        let hinv = h.inverse(cap)?;
        cur = h.mul(&cur).mul(&hinv).truncate(keep);
        g = h.mul(&g).truncate(keep);
        b = b.add(&db).truncate(keep);
    }
    Err(Error::NonConvergence("iteration limit reached".into()))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    pub checks: usize,
    pub violations: Vec<String>,
}

struct Checker {
    checks: usize,
    violations: Vec<String>,
}

impl Checker {
    fn new() -> Checker {
        Checker { checks: 0, violations: Vec::new() }
    }
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }
    fn check_res(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(b) => self.check(b, what),
            Err(e) => {
                self.checks += 1;
                self.violations.push(format!("{}: {}", what(), e));
            }
        }
    }
    fn finish(self) -> VerificationReport {
        VerificationReport { valid: self.violations.is_empty(), checks: self.checks, violations: self.violations }
    }
}

/// One step γ_i → γ_{i+1} + x_{i+1}·b_i of a minimal approximation sequence.
#[derive(Clone, Debug)]
pub struct ApproxLevel {
    pub order: HereditaryOrder,
    pub n: i64,
    pub r: i64,
    /// F_{i+1} = F[γ_{i+1}] with V = F_{i+1}^d
    pub field: EmbeddedField,
    pub corestriction: Corestriction,
    /// g_i with g_i γ_i g_i^{-1} = γ_{i+1} + x_{i+1}·b_i
    pub conjugator: Mat,
    pub x: Mat,
    pub b: Mat,
    /// claimed e and f of F[γ_i]
    pub e: usize,
    pub f: usize,
}

#[derive(Clone, Debug)]
pub struct MinApproxSequence {
    /// γ_0, …, γ_m
    pub gammas: Vec<Mat>,
    pub levels: Vec<ApproxLevel>,
    /// T-adic tolerance for identities holding to precision
    pub tolerance: i64,
}

impl MinApproxSequence {
    pub fn len(&self) -> usize {
        self.levels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

fn field_of(gamma: &Mat, work: i64) -> Result<FieldData> {
    FieldData::new(&generating_poly(gamma, work)?, work)
}

fn minimal_element(gamma: &Mat, work: i64) -> Result<bool> {
    let m = &generating_poly(gamma, work)?;
    if m.deg() <= 1 {
        return Ok(true);
    }
    let s = Settings { work, ..Settings::default() };
    Ok(elliptic_invariants(m, &s)?.minimal)
}

pub fn verify_min_approx_sequence(seq: &MinApproxSequence, work: i64, window: i64) -> VerificationReport {
    let mut ck = Checker::new();
    let tol = seq.tolerance;
    ck.check(seq.gammas.len() == seq.levels.len() + 1, || {
        format!("{} elements for a sequence of length {}", seq.gammas.len(), seq.levels.len())
    });
    if seq.gammas.len() != seq.levels.len() + 1 {
        return ck.finish();
    }
    for (i, lv) in seq.levels.iter().enumerate() {
        let (gi, gn) = (&seq.gammas[i], &seq.gammas[i + 1]);
        let at = |s: &str| format!("level {i}: {s}");
        match Stratum::new(lv.order.clone(), lv.n, lv.r, gn.clone()) {
            Ok(st) => ck.check_res(stratum_flags(&st, work, window).map(|fl| fl.simple), || {
                at("[𝔄, n, r, γ_{i+1}] is not simple")
            }),
            Err(e) => ck.check(false, || at(&format!("bad stratum for γ_{{i+1}}: {e}"))),
        }
        ck.check_res(lv.order.valuation(gi).map(|v| v >= -lv.n), || at("ν_𝔄(γ_i) < −n"));
        let conj = lv.conjugator.inverse(lv.order.cap()).map(|gi_inv| lv.conjugator.mul(gi).mul(&gi_inv));
        match conj {
            Ok(c) => {
                ck.check(level_lb(&lv.order, &c.sub(gn)) >= -lv.r, || {
                    at("conjugated γ_i is not equivalent to γ_{i+1}")
                });
                let resid = c.sub(gn).sub(&lv.x.mul(&lv.b));
                ck.check(resid.min_val_lb() >= tol, || at("γ_i ≠ γ_{i+1} + x·b_i to precision"));
            }
            Err(e) => ck.check(false, || at(&format!("conjugator not invertible: {e}"))),
        }
        let comm = gn.mul(&lv.b).sub(&lv.b.mul(gn));
        ck.check(comm.min_val_lb() >= tol, || at("b_i does not commute with γ_{i+1}"));
        let n_e = lv.field.degree();
        let a: Elem = (0..n_e).map(|t| gn.get(t, 0).clone()).collect();
        let in_e = lv.field.scalar(&a).sub(gn).min_val_lb() >= tol;
        let generates = generating_poly(gn, work).map(|m| m.deg() == n_e);
        ck.check_res(generates.map(|g| g && in_e), || at("γ_{i+1} does not generate F_{i+1}"));
        let b_e = lv.field.extract(&lv.b);
        let cp = b_e.char_poly();
        ck.check_res(is_irreducible(&cp, work), || at("b_i is not quasi-regular elliptic over F_{i+1}"));
        let bo = HereditaryOrder::standard(lv.field.top(), 1, lv.field.d, lv.order.cap());
        let derived = bo.and_then(|o| Stratum::new(o, lv.r, lv.r - 1, b_e.clone()));
        match derived {
            Ok(st) => ck.check_res(stratum_flags(&st, work, window).map(|fl| fl.simple), || {
                at("[𝔅, r, r−1, b_i] is not simple")
            }),
            Err(e) => ck.check(false, || at(&format!("bad derived stratum: {e}"))),
        }
        let sx = lv.field.corestrict(&lv.corestriction, &lv.x);
        let id = Mat::identity(lv.x.field(), lv.x.rows());
        ck.check(sx.sub(&id).min_val_lb() >= tol, || at("s(x_{i+1}) ≠ 1"));
        ck.check_res(lv.order.valuation(gi).map(|v| v == -lv.n), || at("n_i ≠ −ν_𝔄(γ_i)"));
        ck.check_res(field_of(gi, work).map(|fd| (fd.e(), fd.f()) == (lv.e, lv.f)), || {
            at("recorded e_i, f_i differ from those of F[γ_i]")
        });
    }
    let last = seq.gammas.last().unwrap();
    ck.check_res(minimal_element(last, work), || "γ_m is not minimal".to_string());
    ck.finish()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RefinementReport {
    pub e: usize,
    pub f: usize,
    pub predicted_e: usize,
    pub predicted_f: usize,
    pub k0: Option<i64>,
    pub predicted_k0: Option<i64>,
    pub report: VerificationReport,
}

/// Checks e, f and k_0 of F[γ] for γ = β⊗1 + x·ι(b), β generating E, against the values
/// predicted from β and b.
pub fn verify_refinement(
    field: &EmbeddedField,
    cor: &Corestriction,
    beta: &Elem,
    r: i64,
    b: &Mat,
    work: i64,
    window: i64,
) -> Result<RefinementReport> {
    let order = field.order()?;
    let beta = field.scalar(beta);
    let x = field.corrector(cor);
    let gamma = beta.add(&x.mul(&field.embed(b)?));
    let mb = &generating_poly(b, work)?;
    let (eb, fb) = if mb.deg() == 1 {
        (1, 1)
    } else {
        let fdb = FieldData::new(mb, work)?;
        (fdb.e(), fdb.f())
    };
    let predicted_e = field.fd.e() * eb;
    let predicted_f = field.fd.f() * fb;
    let fdg = field_of(&gamma, work)?;
    let (e, f) = (fdg.e(), fdg.f());
    let inter = Intertwining::new(&gamma, &order, pure_ad_rank(order.dim(), fdg.n()))?;
    let k0 = inter.k0(window)?;
    let predicted_k0 = if mb.deg() > 1 {
        Some(-r)
    } else {
        let ib = Intertwining::new(&beta, &order, pure_ad_rank(order.dim(), field.degree()))?;
        ib.k0(window)?
    };
    let mut ck = Checker::new();
    ck.check(e == predicted_e, || format!("e(F[γ]/F) = {e}, predicted {predicted_e}"));
    ck.check(f == predicted_f, || format!("f(F[γ]/F) = {f}, predicted {predicted_f}"));
    ck.check(k0 == predicted_k0, || format!("k_0(γ, 𝔄) = {k0:?}, predicted {predicted_k0:?}"));
    Ok(RefinementReport { e, f, predicted_e, predicted_f, k0, predicted_k0, report: ck.finish() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FiniteField;

    fn fld(q: u32) -> Arc<FiniteField> {
        FiniteField::from_order(q).unwrap()
    }

    fn emat(f: &Arc<FiniteField>, rows: &[&[&str]]) -> Mat {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        Mat::parse(f, &rows).unwrap()
    }

    #[test]
    fn uniformizer_stratum_is_simple() {
        let f = fld(3);
        let fd = FieldData::new(&SeriesPoly::parse(&f, "x^2 - T").unwrap(), 30).unwrap();
        let order = fd.order().unwrap();
        let g = fd.mult(&fd.gamma());
        let n = -order.valuation(&g).unwrap();
        let s = Stratum::new(order.clone(), n, n - 1, g.clone()).unwrap();
        let fl = stratum_flags(&s, 30, 20).unwrap();
        assert!(fl.pure && fl.simple);
        assert_eq!(fl.k0, Some(-n));
        // central γ
        let c = Mat::identity(&f, 2).scale(&Series::t_pow(&f, -1));
        let s = Stratum::new(order.clone(), 2, 0, c).unwrap();
        let fl = stratum_flags(&s, 30, 20).unwrap();
        assert!(fl.simple && fl.central && fl.k0.is_none());
        // y = T^{-1}π^2 = 1
        let s = Stratum::new(order, n, n - 1, g.clone()).unwrap();
        assert_eq!(stratum_char_poly(&s).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn non_minimal_is_pure_not_simple() {
        let f = fld(3);
        // γ = T^{-1}(1 + π): ν_E = −2, not minimal, k_0 = −1
        let fd = FieldData::new(&SeriesPoly::parse(&f, "x^2 - T").unwrap(), 30).unwrap();
        let order = fd.order().unwrap();
        let g = Mat::identity(&f, 2).add(&fd.mult(&fd.gamma())).scale(&Series::t_pow(&f, -1));
        let s = Stratum::new(order, 2, 1, g).unwrap();
        let fl = stratum_flags(&s, 30, 20).unwrap();
        assert!(fl.pure && !fl.simple);
        assert_eq!(fl.k0, Some(-1));
    }

    #[test]
    fn char_poly_constant_on_equivalence() {
        let f = fld(5);
        let fd = FieldData::new(&SeriesPoly::parse(&f, "x^2 - 2*T").unwrap(), 30).unwrap();
        let order = fd.order().unwrap();
        let g = fd.mult(&fd.gamma());
        let s = Stratum::new(order.clone(), -1, -2, g.clone()).unwrap();
        let base = stratum_char_poly(&s).unwrap();
        // y = T^{-1}π^2 = 2: φ = (x − 2)^2
        assert_eq!(base, vec![4, 1, 1]);
        let d = emat(&f, &[&["T", "T^2"], &["T", "3*T"]]);
        let s2 = Stratum::new(order, -1, -2, g.add(&d)).unwrap();
        assert!(s.equivalent(&s2).unwrap());
        assert_eq!(stratum_char_poly(&s2).unwrap(), base);
    }

    #[test]
    fn corestriction_tame_and_wild() {
        let f = fld(3);
        let fd = FieldData::new(&SeriesPoly::parse(&f, "x^2 - T").unwrap(), 30).unwrap();
        let cor = tame_corestriction(&fd).unwrap();
        assert!(cor.tame);
        assert!(cor.x0.agrees_mod(&Mat::identity(&f, 2), 20));
        // s restricted to E is the identity
        let a: Elem = vec![Series::parse(&f, "1 + T").unwrap(), Series::parse(&f, "2").unwrap()];
        let sa = cor.apply(&fd.mult(&a));
        for (u, v) in sa.iter().zip(&a) {
            assert!(u.agrees_mod(v, 20));
        }
        let f2 = fld(2);
        for chi in ["x^2 + T*x + T", "x^2 + T"] {
            let fd = FieldData::new(&SeriesPoly::parse(&f2, chi).unwrap(), 30).unwrap();
            let cor = tame_corestriction(&fd).unwrap();
            assert!(!cor.tame, "{chi}");
            let one = cor.apply(&cor.x0);
            assert!(one[0].agrees_mod(&Series::one(&f2), 20) && one[1].val_lb() >= 20);
            for k in -2..=2 {
                let img = cor.image_of_radical(k).unwrap();
                assert!(img.equals(&fd.ideal(k).unwrap(), 30).unwrap(), "{chi} k={k}");
            }
            // bimodule property on a sample
            let x = emat(&f2, &[&["1 + T", "T^-1"], &["T^2", "1"]]);
            let pi = fd.mult(&fd.gamma());
            let lhs = cor.apply(&pi.mul(&x));
            let rhs = fd.alg.mul(&fd.gamma(), &cor.apply(&x));
            assert!(lhs.iter().zip(&rhs).all(|(u, v)| u.agrees_mod(v, 15)));
            let lhs = cor.apply(&x.mul(&pi));
            assert!(lhs.iter().zip(&rhs).all(|(u, v)| u.agrees_mod(v, 15)));
        }
    }

    fn setup() -> (EmbeddedField, Corestriction, Mat, HereditaryOrder) {
        let f = fld(3);
        let phi = SeriesPoly::parse(&f, "x^2 - T").unwrap();
        let emb = EmbeddedField::new(&phi, 2, 30).unwrap();
        let cor = tame_corestriction(&emb.fd).unwrap();
        let beta = emb.scalar(&emb.pi_inv.clone());
        let order = emb.order().unwrap();
        (emb, cor, beta, order)
    }

    #[test]
    fn embedding_round_trip() {
        let (emb, _, _, _) = setup();
        let top = emb.top().clone();
        let b = emat(&top, &[&["T^-1 + T^3", "1"], &["2*T", "T^2"]]);
        let m = emb.embed(&b).unwrap();
        assert!(m.is_exact());
        let back = emb.extract(&m);
        assert!(back.agrees_mod(&b, 20));
        let b2 = emat(&top, &[&["T", "1"], &["T", "T^-1"]]);
        let prod = emb.embed(&b.mul(&b2)).unwrap();
        assert!(prod.agrees_mod(&m.mul(&emb.embed(&b2).unwrap()), 20));
    }

    #[test]
    fn split_examples() {
        let (emb, cor, beta, order) = setup();
        let x = emb.corrector(&cor);
        let sp = Splitting::new(&order, &beta, &x, 30, 20).unwrap();
        assert_eq!(sp.k0, Some(-1));
        let top = emb.top().clone();
        let b0 = emb.embed(&emat(&top, &[&["1", "T"], &["2", "T^2"]])).unwrap();
        let (y, b) = sp.split(&x.mul(&b0), 0).unwrap();
        assert!(y.min_val_lb() >= 15 && b.agrees_mod(&b0, 15));
        let f = order.field().clone();
        let y0 =
            emat(&f, &[&["0", "1", "T", "0"], &["T", "0", "1", "2"], &["0", "0", "T", "1"], &["1", "T", "0", "0"]]);
        let y0 = y0.scale(&Series::t_pow(&f, 1));
        let v = beta.mul(&y0).sub(&y0.mul(&beta));
        let (y, b) = sp.split(&v, -1).unwrap();
        assert!(b.min_val_lb() >= 15);
        assert!(sp.recombine(&y, &b).agrees_mod(&v, 15));
        let v = v.add(&x.mul(&b0));
        let (y, b) = sp.split(&v, -1).unwrap();
        assert!(sp.recombine(&y, &b).agrees_mod(&v, 15));
        assert!(b.agrees_mod(&emb.corestrict(&cor, &v), 15));
        assert!(matches!(sp.split(&v, -2), Err(Error::Precondition(_))));
    }

    #[test]
    fn approximation_round_trip() {
        let (emb, cor, beta, order) = setup();
        let x = emb.corrector(&cor);
        let sp = Splitting::new(&order, &beta, &x, 30, 20).unwrap();
        let top = emb.top().clone();
        let f = order.field().clone();
        let b0e = emat(&top, &[&["T", "2 + T"], &["1", "T^2"]]);
        let b0 = emb.embed(&b0e).unwrap();
        let gamma0 = beta.add(&x.mul(&b0));
        let fixed = approximate_given_beta(&sp, 0, &gamma0, 24).unwrap();
        assert!(fixed.b.agrees_mod(&b0, 10));
        let y0 = emat(
            &f,
            &[&["T", "0", "T", "T^2"], &["T", "0", "0", "T"], &["0", "T^2", "T", "0"], &["T", "0", "2*T", "T"]],
        );
        let h = Mat::identity(&f, 4).add(&y0);
        let gamma = h.inverse(40).unwrap().mul(&gamma0).mul(&h);
        let ap = approximate_given_beta(&sp, 0, &gamma, 24).unwrap();
        assert!(ap.residual_level >= 24);
        let g = &ap.conjugator;
        let lhs = g.mul(&gamma).mul(&g.inverse(40).unwrap());
        assert!(lhs.agrees_mod(&beta.add(&x.mul(&ap.b)), 10));
        assert!(order.valuation(&ap.b).unwrap() >= 0);
        assert!(level_lb(&order, &g.sub(&Mat::identity(&f, 4))) >= 1);
        let be = emb.extract(&ap.b);
        let c1 = be.char_poly();
        let c0 = b0e.char_poly();
        for i in 0..=2 {
            assert!(c1.coeff(i).agrees_mod(&c0.coeff(i), 1));
        }
        let seq = MinApproxSequence {
            gammas: vec![gamma.clone(), beta.clone()],
            levels: vec![ApproxLevel {
                order: order.clone(),
                n: 1,
                r: 0,
                field: emb.clone(),
                corestriction: cor.clone(),
                conjugator: ap.conjugator.clone(),
                x: x.clone(),
                b: ap.b.clone(),
                e: 2,
                f: 2,
            }],
            tolerance: 8,
        };
        let rep = verify_min_approx_sequence(&seq, 30, 20);
        assert!(rep.valid, "{:?}", rep.violations);
        let mut bad = seq.clone();
        bad.levels[0].b = emb.embed(&emat(&top, &[&["1", "0"], &["0", "1"]])).unwrap();
        assert!(!verify_min_approx_sequence(&bad, 30, 20).valid);
        assert!(matches!(
            approximate_given_beta(&sp, 0, &gamma0.add(&b0.scale(&Series::t_pow(&f, -1))), 24),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn refinement_predictions() {
        let (emb, cor, _, _) = setup();
        let top = emb.top().clone();
        // E[b]/E unramified quadratic with unit b: k_0(γ) = −r = 0
        let rep =
            verify_refinement(&emb, &cor, &emb.pi_inv, 0, &emat(&top, &[&["0", "2"], &["1", "0"]]), 30, 20).unwrap();
        assert!(rep.report.valid, "{:?}", rep.report.violations);
        assert_eq!((rep.e, rep.f, rep.k0), (2, 2, Some(0)));
        // E[b] = E: k_0(γ) = k_0(β)
        let rep =
            verify_refinement(&emb, &cor, &emb.pi_inv, 0, &emat(&top, &[&["1", "0"], &["0", "1"]]), 30, 20).unwrap();
        assert_eq!(rep.k0, rep.predicted_k0);
    }
}
