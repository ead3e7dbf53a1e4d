//! Invariants of quasi-regular elements: n_F, k_F, k̃_F, minimality, the
//! conductor c_F, ν(D_F), the normalization exponents η_G, η_g and the
//! lattice indices μ_F, μ_F⁺.
//!
//! Exponent conventions: η = q^{−eta_exp} and μ = q^{mu_exp}, with q the
//! order of the residue field of the base.

use crate::error::{Error, Result};
use crate::factor::{factor_local, resultant};
use crate::field::FieldData;
use crate::lattice::OLattice;
use crate::linalg::Mat;
use crate::orders::{generalized_index, index_exponent, Intertwining};
use crate::poly::SeriesPoly;
use crate::series::Series;
use serde::{Deserialize, Serialize};

/// Precision policy for invariant computations.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    /// initial absolute working precision
    pub work: i64,
    /// working precision is doubled on precision failures up to this bound
    pub max_work: i64,
    /// k_0 scan window above ν_𝔄(γ); None selects 4·N·e + 2|c̃| + 8
    pub window: Option<i64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { work: 48, max_work: 400, window: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticInvariants {
    #[serde(rename = "N")]
    pub n: usize,
    pub e: usize,
    pub f: usize,
    #[serde(rename = "n_F")]
    pub n_f: i64,
    /// None encodes −∞
    #[serde(rename = "k_F")]
    pub k_f: Option<i64>,
    pub k_tilde: i64,
    #[serde(rename = "c_F")]
    pub c_f: i64,
    pub c_tilde: i64,
    pub minimal: bool,
    pub separable: bool,
    #[serde(rename = "nu_D")]
    pub nu_d: Option<i64>,
    pub delta: Option<i64>,
    pub sigma: Option<i64>,
    #[serde(rename = "eta_G_exp")]
    pub eta_group_exp: i64,
    #[serde(rename = "eta_g_exp")]
    pub eta_lie_exp: i64,
    pub mu_exp: i64,
    pub mu_plus_exp: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiRegularInvariants {
    pub blocks: Vec<EllipticInvariants>,
    pub block_polys: Vec<String>,
    #[serde(rename = "dMG_val")]
    pub d_mg_val: i64,
    #[serde(rename = "dmg_lie_val")]
    pub d_mg_lie_val: i64,
    #[serde(rename = "eta_G_exp")]
    pub eta_group_exp: i64,
    #[serde(rename = "eta_g_exp")]
    pub eta_lie_exp: i64,
}

/// The element γ of F[γ] ⊆ End_F(F[γ]) together with 𝔄(F[γ]) and the
/// ad_γ data.
#[derive(Clone, Debug)]
pub struct EllipticElement {
    pub field: FieldData,
    pub gamma: Mat,
    pub inter: Intertwining,
}

fn with_retry<T>(s: &Settings, mut run: impl FnMut(i64) -> Result<T>) -> Result<T> {
    let mut work = s.work;
    loop {
        match run(work) {
            Err(e) if e.is_precision_like() && work * 2 <= s.max_work => work *= 2,
            other => return other,
        }
    }
}

impl EllipticElement {
    pub fn new(chi: &SeriesPoly, work: i64) -> Result<EllipticElement> {
        let field = FieldData::new(chi, work)?;
        let gamma = field.mult(&field.gamma());
        let order = field.order()?;
        let n = field.n();
        let inter = Intertwining::new(&gamma, &order, n * n - n)?;
        Ok(EllipticElement { field, gamma, inter })
    }
    pub fn n(&self) -> usize {
        self.field.n()
    }
    /// n_F(γ) = −ν_{F[γ]}(γ).
    pub fn n_f(&self) -> Result<i64> {
        Ok(-self.field.valuation(&self.field.gamma())?)
    }
    /// c_F(γ): the exponent of the conductor of 𝔬[γ] in 𝔬_E.
    pub fn conductor(&self) -> Result<i64> {
        let fd = &self.field;
        let n = fd.n();
        let e = fd.e() as i64;
        let eq = OLattice::standard(fd.base(), n);
        let inside = |c: i64| -> Result<bool> { eq.includes(&fd.ideal(c)?, fd.work()) };
        let (mut lo, mut hi) = (-1i64, e * fd.index());
        if !inside(hi)? {
            return Err(Error::CapExceeded("conductor beyond the index bound".into()));
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if inside(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // hi is the conductor of 𝔬[T^s γ]
        Ok(hi - e * (n as i64 - 1) * fd.shift)
    }
    /// ν(D^+(γ)) = ν det(ad_γ; A(E)/E), or None when E/F is inseparable.
    pub fn lie_discriminant_valuation(&self) -> Result<Option<i64>> {
        if !self.field.separable() {
            return Ok(None);
        }
        let n = self.n();
        Ok(Some(lie_block_valuation(&self.gamma, &self.gamma, n)?))
    }
    /// ν(D_F(γ)) = ν(D^+) − (N−1)ν(det γ).
    pub fn d_valuation(&self) -> Result<Option<i64>> {
        let n = self.n() as i64;
        let det_val = det_valuation_of_char(&self.field.chi)?;
        Ok(self.lie_discriminant_valuation()?.map(|d| d - (n - 1) * det_val))
    }
    /// Whether ϖ^{n_F}γ^e generates κ_E and gcd(n_F, e) = 1.
    pub fn minimal_by_definition(&self) -> Result<bool> {
        let fd = &self.field;
        let n_f = self.n_f()?;
        let e = fd.e() as i64;
        if gcd(n_f.abs(), e) != 1 {
            return Ok(false);
        }
        let y = fd.alg.pow(&fd.gamma(), e as u128);
        let y = fd.alg.scale(&y, &Series::t_pow(fd.base(), n_f));
        let r = fd.residue(&y)?;
        Ok(fd.residue_degree_of(r) == fd.f())
    }
    pub fn k_f(&self, window: i64) -> Result<Option<i64>> {
        self.inter.k0(window)
    }
    /// log_q [𝔑_{k_F} : 𝔬_E + 𝔓^{k̃}].
    pub fn mu_exp(&self, k_f: i64, k_tilde: i64) -> Result<i64> {
        let big = self.inter.lattice(k_f)?;
        let small = self.inter.centralizer_plus(k_tilde)?;
        index_exponent(&big, &small, self.inter.order.cap())
    }
    /// log_q of the index of (E + 𝔓^{k_F})/E in (E + 𝔑_{k_F})/E.
    pub fn mu_plus_exp(&self, k_f: i64) -> Result<i64> {
        let big = self.inter.lattice(k_f)?;
        let small = self.inter.order.radical_power(k_f);
        Ok(generalized_index(&big, &small) - self.field.f() as i64 * k_f)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    crate::poly::gcd(a, b)
}

/// ν(det γ) read from the constant term of its characteristic polynomial.
pub fn det_valuation_of_char(chi: &SeriesPoly) -> Result<i64> {
    let c = chi.coeff(0);
    if c.is_exact_zero() {
        return Err(Error::InvalidInput("singular element".into()));
    }
    c.valuation()
}

/// ν of the product of the nonzero eigenvalues of X ↦ AX − XB, whose kernel
/// has dimension `kernel_dim`: the coefficient of t^{kernel_dim} of its
/// characteristic polynomial.
fn lie_block_valuation(a: &Mat, b: &Mat, kernel_dim: usize) -> Result<i64> {
    let (da, db) = (a.rows(), b.rows());
    let fld = a.field().clone();
    let ad = a.kron(&Mat::identity(&fld, db)).sub(&Mat::identity(&fld, da).kron(&b.transpose()));
    let cp = ad.char_poly();
    let c = cp.coeff(kernel_dim);
    if c.is_exact_zero() {
        return Err(Error::SingularAtPrecision("Lie discriminant vanishes".into()));
    }
    c.valuation().map_err(|_| Error::SingularAtPrecision("Lie discriminant undetermined".into()))
}

/// All invariants of a quasi-regular elliptic element with characteristic
/// polynomial χ.
pub fn elliptic_invariants(chi: &SeriesPoly, s: &Settings) -> Result<EllipticInvariants> {
    if !chi.is_monic() || chi.deg() == 0 {
        return Err(Error::InvalidInput("characteristic polynomial must be monic of positive degree".into()));
    }
    let n = chi.deg();
    if n == 1 {
        let a0 = chi.coeff(0);
        if a0.is_exact_zero() {
            return Err(Error::InvalidInput("the zero element has no valuation".into()));
        }
        let n_f = -a0.valuation()?;
        return Ok(EllipticInvariants {
            n,
            e: 1,
            f: 1,
            n_f,
            k_f: None,
            k_tilde: 0,
            c_f: 0,
            c_tilde: 0,
            minimal: true,
            separable: true,
            nu_d: Some(0),
            delta: Some(0),
            sigma: Some(0),
            eta_group_exp: 0,
            eta_lie_exp: 0,
            mu_exp: 0,
            mu_plus_exp: 0,
        });
    }
    with_retry(s, |work| elliptic_at(chi, s, work))
}

fn elliptic_at(chi: &SeriesPoly, s: &Settings, work: i64) -> Result<EllipticInvariants> {
    let el = EllipticElement::new(chi, work)?;
    let n = el.n() as i64;
    let (e, f) = (el.field.e() as i64, el.field.f() as i64);
    let n_f = el.n_f()?;
    let c_f = el.conductor()?;
    let c_tilde = c_f + (n - 1) * n_f;
    let delta = el.field.delta()?;
    let sigma = delta.map(|d| d / f - (e - 1));
    let nu_d = el.d_valuation()?;
    let window = s.window.unwrap_or(4 * n * e + 2 * c_tilde.abs() + 8);
    let k_f = el.k_f(window)?.ok_or_else(|| Error::InvalidInput("element is central".into()))?;
    let k_tilde = k_f + n_f;
    let minimal_def = el.minimal_by_definition()?;
    if minimal_def != (k_tilde == 0) {
        return Err(Error::InconsistentMinimality(format!("definition says {minimal_def}, k̃ = {k_tilde}")));
    }
    let mu_exp = el.mu_exp(k_f, k_tilde)?;
    let mu_plus_exp = el.mu_plus_exp(k_f)?;
    if mu_plus_exp != mu_exp + f * n_f * (1 - n) {
        return Err(Error::RelationViolated(format!(
            "μ⁺ exponent {mu_plus_exp} against μ exponent {mu_exp} with n_F = {n_f}"
        )));
    }
    Ok(EllipticInvariants {
        n: n as usize,
        e: e as usize,
        f: f as usize,
        n_f,
        k_f: Some(k_f),
        k_tilde,
        c_f,
        c_tilde,
        minimal: minimal_def,
        separable: el.field.separable(),
        nu_d,
        delta,
        sigma,
        eta_group_exp: f * (c_tilde + e - 1),
        eta_lie_exp: f * (c_f + e - 1),
        mu_exp,
        mu_plus_exp,
    })
}

/// Invariants of a quasi-regular element with characteristic polynomial χ
/// (squarefree): blocks are the irreducible factors.
pub fn quasi_regular_invariants(chi: &SeriesPoly, s: &Settings) -> Result<QuasiRegularInvariants> {
    let prec = s.work;
    let factors = factor_local(chi, prec)?;
    if factors.iter().any(|f| f.multiplicity > 1) {
        return Err(Error::Precondition("characteristic polynomial is not squarefree".into()));
    }
    let polys: Vec<SeriesPoly> = factors.iter().map(|f| f.poly.clone()).collect();
    let mut blocks = Vec::new();
    for p in &polys {
        blocks.push(elliptic_invariants(p, s)?);
    }
    let mut d_lie = 0i64;
    let mut d_grp = 0i64;
    for i in 0..polys.len() {
        for j in 0..polys.len() {
            if i == j {
                continue;
            }
            let r = resultant(&polys[i], &polys[j]);
            if !r.is_certified_nonzero() {
                return Err(Error::SingularAtPrecision("blocks share a root at working precision".into()));
            }
            let v = r.valuation()?;
            let di = polys[i].deg() as i64;
            d_lie += v;
            d_grp += v - di * det_valuation_of_char(&polys[j])?;
        }
    }
    let n = chi.deg() as i64;
    let eta_group_exp = d_grp + blocks.iter().map(|b| b.eta_group_exp).sum::<i64>();
    let eta_lie_exp = d_lie + blocks.iter().map(|b| b.eta_lie_exp).sum::<i64>();
    if chi.coeff(0).is_certified_nonzero() {
        let dv = det_valuation_of_char(chi)?;
        if eta_lie_exp != eta_group_exp + (n - 1) * dv {
            return Err(Error::RelationViolated("η_g ≠ |det γ|^{N−1} η_G".into()));
        }
    }
    Ok(QuasiRegularInvariants {
        blocks,
        block_polys: polys.iter().map(|p| p.to_text()).collect(),
        d_mg_val: d_grp,
        d_mg_lie_val: d_lie,
        eta_group_exp,
        eta_lie_exp,
    })
}

/// ν det(1 − Ad_γ) on the off-diagonal block space 𝔤/𝔪 computed from
/// Kronecker products of the block matrices.
pub fn d_mg_direct(blocks: &[Mat], cap: i64) -> Result<i64> {
    let mut total = 0;
    for (i, a) in blocks.iter().enumerate() {
        for (j, b) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            let binv_t = b.inverse(cap)?.transpose();
            let fld = a.field().clone();
            let m = Mat::identity(&fld, a.rows() * b.rows()).sub(&a.kron(&binv_t));
            total += m.det_valuation(cap)?;
        }
    }
    Ok(total)
}

/// Exponent of λ = (q_E^{n_F(β)} μ_F(β))^{d²} in base q.
pub fn descent_lambda(beta_chi: &SeriesPoly, d: usize, s: &Settings) -> Result<i64> {
    if beta_chi.deg() <= 1 {
        return Err(Error::Precondition("β must generate a proper extension".into()));
    }
    let inv = elliptic_invariants(beta_chi, s)?;
    let d2 = (d * d) as i64;
    Ok(d2 * (inv.f as i64 * inv.n_f + inv.mu_exp))
}

/// Characteristic polynomial of zγ from that of γ.
pub fn scale_char_poly(chi: &SeriesPoly, z: &Series) -> SeriesPoly {
    let n = chi.deg();
    let fld = chi.field();
    let mut pw = Series::one(fld);
    let mut c = vec![Series::one(fld); n + 1];
    for i in (0..n).rev() {
        pw = pw.mul(z);
        c[i] = chi.coeff(i).mul(&pw);
    }
    SeriesPoly::new(fld, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FiniteField;

    fn inv(q: u32, s: &str) -> EllipticInvariants {
        let f = FiniteField::from_order(q).unwrap();
        elliptic_invariants(&SeriesPoly::parse(&f, s).unwrap(), &Settings::default()).unwrap()
    }

    #[test]
    fn uniformizer_is_minimal() {
        let r = inv(3, "x^2 - T");
        assert_eq!((r.e, r.f, r.c_f, r.c_tilde, r.n_f), (2, 1, 0, -1, -1));
        assert_eq!(r.k_tilde, 0);
        assert!(r.minimal);
        assert_eq!(r.mu_exp, 0);
        assert_eq!(r.eta_group_exp, 0);
        assert_eq!(r.nu_d, Some(1 + 1 - 2));
    }

    #[test]
    fn eta_mu_on_small_cases() {
        for (q, s) in [
            (3, "x^2 - T^3"),
            (2, "x^2 + T*x + T"),
            (2, "x^2 + T^3"),
            (2, "x^2 + T^3*x + T"),
            (3, "x^3 - T^2"),
            (2, "x^2 + x + 1"),
            (5, "x^2 - T^-1"),
            (2, "x^2 + T^2*x + T^3"),
            (3, "x^3 + T^-1*x + T^-2"),
            (2, "x^4 + T^2*x^2 + T^3*x + T^3"),
        ] {
            let r = inv(q, s);
            assert_eq!(r.eta_group_exp, r.mu_exp, "{s}: {r:?}");
            assert_eq!(r.eta_lie_exp, r.mu_plus_exp, "{s}: {r:?}");
            if let (Some(d), Some(de)) = (r.nu_d, r.delta) {
                assert_eq!(r.c_tilde * r.f as i64, d - de, "{s}: {r:?}");
            }
        }
    }

    #[test]
    fn split_diagonal_example() {
        let f = FiniteField::from_order(3).unwrap();
        let chi = SeriesPoly::parse(&f, "(x - 1)*(x - T)").unwrap();
        let r = quasi_regular_invariants(&chi, &Settings::default()).unwrap();
        assert_eq!(r.d_mg_val, -1);
        assert_eq!(r.eta_group_exp, -1);
    }
}
