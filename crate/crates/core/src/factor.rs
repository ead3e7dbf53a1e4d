//! Factorization of monic polynomials over F = F_q((T)) and the Krasner
//! radius of a separable polynomial.
//!
//! Exact inputs are first split into squarefree layers in F_q[T][x]; each
//! layer is factored through the maximal order of F[x]/(layer), whose
//! primitive idempotents cut out the irreducible factors.

use crate::algebra::{maximal_order, split_factors, PolyAlgebra};
use crate::error::{Error, Result};
use crate::ff::FiniteField;
use crate::fpoly::{self, BiPoly, FPoly};
use crate::linalg::Mat;
use crate::poly::{newton_polygon, SeriesPoly};
use crate::series::{Series, INF};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct LocalFactor {
    pub poly: SeriesPoly,
    pub multiplicity: usize,
    pub separable: bool,
}

/// Sylvester resultant Res(f, g), computed division free.
pub fn resultant(f: &SeriesPoly, g: &SeriesPoly) -> Series {
    let fld = f.field().clone();
    let (m, n) = (f.deg(), g.deg());
    if m + n == 0 {
        return Series::one(&fld);
    }
    let size = m + n;
    let mut s = Mat::zeros(&fld, size, size);
    for i in 0..n {
        for j in 0..=m {
            s.set(i, i + j, f.coeff(m - j));
        }
    }
    for i in 0..m {
        for j in 0..=n {
            s.set(n + i, i + j, g.coeff(n - j));
        }
    }
    let cp = s.char_poly();
    let c0 = cp.coeff(0);
    if size % 2 == 1 {
        c0.neg()
    } else {
        c0
    }
}

/// ν(Res(f, f′)), which for monic f is the valuation of its discriminant.
pub fn disc_valuation(f: &SeriesPoly) -> Result<i64> {
    if f.derivative_vanishes() {
        return Err(Error::Inseparable);
    }
    let r = resultant(f, &f.derivative());
    if r.is_exact_zero() {
        return Err(Error::InvalidInput("polynomial has a repeated factor".into()));
    }
    r.valuation().map_err(|_| Error::SingularAtPrecision("discriminant indistinguishable from zero".into()))
}

/// Any monic g ≡ f mod 𝔭^k (coefficientwise) has the same factorization
/// type as f, for k = ν(disc f) + 1.
pub fn krasner_radius(f: &SeriesPoly) -> Result<i64> {
    if !f.is_monic() {
        return Err(Error::InvalidInput("krasner_radius needs a monic polynomial".into()));
    }
    if f.deg() <= 1 {
        return Ok(1);
    }
    for c in f.coeffs() {
        if c.val_lb() < 0 {
            return Err(Error::InvalidInput("coefficients must be integral".into()));
        }
    }
    Ok(disc_valuation(f)? + 1)
}

fn exact_integral(f: &SeriesPoly) -> bool {
    f.coeffs().iter().all(|c| c.is_exact() && c.val_lb() >= 0)
}

fn to_bipoly(f: &SeriesPoly) -> BiPoly {
    f.coeffs()
        .iter()
        .map(|c| {
            if c.is_exact_zero() {
                return Vec::new();
            }
            let mut v = vec![0u32; c.start() as usize];
            v.extend_from_slice(c.digits());
            v
        })
        .collect()
}

fn from_bipoly(fld: &Arc<FiniteField>, b: &BiPoly) -> SeriesPoly {
    SeriesPoly::new(fld, b.iter().map(|c| Series::from_coeffs(fld, 0, c.clone(), None)).collect())
}

fn bi_monic(fld: &FiniteField, a: &BiPoly) -> BiPoly {
    let lead = a.last().and_then(|c| if c.len() == 1 { Some(c[0]) } else { None });
    match lead {
        Some(l) => {
            let inv = fld.inv(l).unwrap();
            a.iter().map(|c| fpoly::scale(fld, c, inv)).collect()
        }
        None => a.clone(),
    }
}

// Exact quotient a / b in F_q[T][x] for b monic in x.
fn bi_div_monic(fld: &FiniteField, a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = b.len() - 1;
    if a.len() <= db {
        return vec![Vec::new()];
    }
    let mut r = a.clone();
    let mut q: BiPoly = vec![Vec::new(); a.len() - db];
    for k in (db..r.len()).rev() {
        let c = r[k].clone();
        if c.is_empty() {
            continue;
        }
        q[k - db] = c.clone();
        for j in 0..=db {
            let t = fpoly::mul(fld, &c, &b[j]);
            r[k - db + j] = fpoly::sub(fld, &r[k - db + j], &t);
        }
    }
    debug_assert!(r.iter().all(|c| c.is_empty()));
    q
}

// p-th root of a polynomial in x^p and T^p.
fn bi_pth_root(fld: &FiniteField, a: &BiPoly) -> BiPoly {
    let p = fld.p() as usize;
    let e = (fld.q() / fld.p()) as u64;
    a.iter()
        .step_by(p)
        .map(|c| {
            let mut r: FPoly = c.iter().step_by(p).map(|&d| fld.pow(d, e)).collect();
            fpoly::trim(&mut r);
            r
        })
        .collect()
}

// Product of the distinct irreducible factors, monic in x.
fn bi_radical(fld: &FiniteField, a: &BiPoly) -> BiPoly {
    if a.len() <= 1 {
        return vec![vec![1]];
    }
    let dx = fpoly::bi_dx(fld, a);
    let dt = fpoly::bi_dt(fld, a);
    if dx.is_empty() && dt.is_empty() {
        return bi_radical(fld, &bi_pth_root(fld, a));
    }
    let g = bi_monic(fld, &fpoly::bi_gcd(fld, &fpoly::bi_gcd(fld, a, &dx), &dt));
    let s = bi_div_monic(fld, a, &g);
    let rg = bi_radical(fld, &g);
    let common = bi_monic(fld, &fpoly::bi_gcd(fld, &s, &rg));
    let extra = bi_div_monic(fld, &rg, &common);
    bi_mul(fld, &s, &extra)
}

fn bi_mul(fld: &FiniteField, a: &BiPoly, b: &BiPoly) -> BiPoly {
    let mut out: BiPoly = vec![Vec::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let t = fpoly::mul(fld, x, y);
            out[i + j] = fpoly::add(fld, &out[i + j], &t);
        }
    }
    out
}

/// Squarefree layers (P_k, k) with f = Π P_k^k, for exact monic f with
/// polynomial coefficients.
fn squarefree_layers(fld: &FiniteField, f: &BiPoly) -> Vec<(BiPoly, usize)> {
    let mut out = Vec::new();
    let mut cur = f.clone();
    let mut rad = bi_radical(fld, &cur);
    let mut k = 1;
    while cur.len() > 1 {
        let next = bi_div_monic(fld, &cur, &rad);
        let next_rad = bi_radical(fld, &next);
        let layer = bi_div_monic(fld, &rad, &next_rad);
        if layer.len() > 1 {
            out.push((layer, k));
        }
        cur = next;
        rad = next_rad;
        k += 1;
    }
    out
}

fn certify_product(target: &SeriesPoly, factors: &[SeriesPoly], prec: i64) -> bool {
    let fld = target.field();
    let mut prod = SeriesPoly::constant(Series::one(fld));
    for g in factors {
        prod = prod.mul(g);
    }
    if prod.deg() != target.deg() {
        return false;
    }
    prod.coeffs().iter().zip(target.coeffs()).all(|(a, b)| a.sub(b).val_lb() >= prec)
}

// Fast irreducibility certificates: a single Newton segment whose slope
// has denominator n, or a unit constant term with irreducible reduction.
fn evidently_irreducible(f: &SeriesPoly) -> Result<bool> {
    let n = f.deg();
    if n <= 1 {
        return Ok(true);
    }
    let np = newton_polygon(f)?;
    if np.segments.len() == 1 && np.segments[0].slope.den as usize == n {
        return Ok(true);
    }
    if np.segments.len() == 1 && np.segments[0].slope.num == 0 {
        let fld = f.field();
        let mut red: FPoly = Vec::new();
        for c in f.coeffs() {
            if c.abs_prec() <= 0 {
                return Ok(false);
            }
            red.push(c.coeff_or_zero(0));
        }
        return Ok(fpoly::is_irreducible(fld, &red));
    }
    Ok(false)
}

/// Irreducible factors of a squarefree monic integral polynomial.
fn factor_squarefree(f: &SeriesPoly, prec: i64) -> Result<Vec<SeriesPoly>> {
    if evidently_irreducible(f)? {
        return Ok(vec![f.clone()]);
    }
    let disc = disc_valuation(f).unwrap_or(2 * prec);
    let mut work = 2 * prec + 4 * disc + 16;
    for _ in 0..3 {
        let alg = PolyAlgebra::new(f, work, work)?;
        match maximal_order(&alg).and_then(|od| split_factors(&alg, &od)) {
            Ok(fs) => {
                let fs: Vec<SeriesPoly> = fs.iter().map(|g| g.truncate(prec)).collect();
                if fs.len() == 1 {
                    return Ok(vec![f.clone()]);
                }
                if certify_product(f, &fs, prec) {
                    return Ok(fs);
                }
            }
            Err(e) if e.is_precision_like() => {}
            Err(e) => return Err(e),
        }
        work *= 2;
    }
    Err(Error::FactorizationIncomplete(format!("could not certify a splitting of {f}")))
}

/// Factorization of a monic polynomial into irreducible factors with
/// multiplicities. Factors that are not exact are known modulo T^prec.
pub fn factor_local(f: &SeriesPoly, prec: i64) -> Result<Vec<LocalFactor>> {
    if !f.is_monic() || f.deg() == 0 {
        return Err(Error::InvalidInput("factor_local needs a monic polynomial of positive degree".into()));
    }
    let fld = f.field().clone();
    let n = f.deg();
    // x = y / T^s makes every coefficient integral
    let mut s = 0i64;
    for (i, c) in f.coeffs().iter().enumerate().take(n) {
        if c.is_exact_zero() {
            continue;
        }
        let v = c.val_lb();
        if v < 0 {
            let k = (n - i) as i64;
            s = s.max((-v + k - 1) / k);
        }
    }
    let g = f.scale_var(&Series::t_pow(&fld, -s)).scale(&Series::t_pow(&fld, s * n as i64));
    let g = monic_normalize(&g);
    let layers: Vec<(SeriesPoly, usize)> = if exact_integral(&g) {
        squarefree_layers(&fld, &to_bipoly(&g)).into_iter().map(|(b, k)| (from_bipoly(&fld, &b), k)).collect()
    } else {
        vec![(g.clone(), 1)]
    };
    let mut out = Vec::new();
    for (layer, k) in layers {
        for h in factor_squarefree(&layer, prec + s * n as i64)? {
            let d = h.deg() as i64;
            let back = h.scale_var(&Series::t_pow(&fld, s)).scale(&Series::t_pow(&fld, -s * d));
            let back = monic_normalize(&back);
            let separable = !back.derivative_vanishes();
            out.push(LocalFactor { poly: back, multiplicity: k, separable });
        }
    }
    out.sort_by(|a, b| a.poly.deg().cmp(&b.poly.deg()).then_with(|| a.poly.to_text().cmp(&b.poly.to_text())));
    Ok(out)
}

fn monic_normalize(g: &SeriesPoly) -> SeriesPoly {
    let mut c = g.coeffs().to_vec();
    if let Some(l) = c.last_mut() {
        *l = Series::one(g.field());
    }
    SeriesPoly::new(g.field(), c)
}

/// True iff f is irreducible over F.
pub fn is_irreducible(f: &SeriesPoly, prec: i64) -> Result<bool> {
    let fs = factor_local(f, prec)?;
    Ok(fs.len() == 1 && fs[0].multiplicity == 1)
}

/// Valuation of the constant term, INF for exact zero.
pub fn const_valuation(f: &SeriesPoly) -> i64 {
    let c = f.coeff(0);
    if c.is_exact_zero() {
        INF
    } else {
        c.val_lb()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(q: u32, s: &str) -> SeriesPoly {
        SeriesPoly::parse(&FiniteField::from_order(q).unwrap(), s).unwrap()
    }

    #[test]
    fn factors_of_small_examples() {
        let fs = factor_local(&poly(3, "x^2 - T"), 20).unwrap();
        assert_eq!(fs.len(), 1);
        assert!(fs[0].separable);
        let fs = factor_local(&poly(5, "(x - 1)*(x - T)"), 20).unwrap();
        assert_eq!(fs.len(), 2);
        let fs = factor_local(&poly(2, "x^2 - T"), 20).unwrap();
        assert_eq!(fs.len(), 1);
        assert!(!fs[0].separable);
    }

    #[test]
    fn zero_root_splits_off() {
        // x(x² + x + T): the quadratic has distinct residual roots 0 and −1
        for (q, count) in [(2, 3), (3, 3), (5, 3)] {
            let fs = factor_local(&poly(q, "x^3 + x^2 + T*x"), 30).unwrap();
            assert_eq!(fs.len(), count, "q={q}");
            assert!(fs.iter().any(|g| g.poly.deg() == 1 && g.poly.coeff(0).val_lb() >= 30));
        }
    }

    #[test]
    fn multiplicities_and_scaling() {
        let fs = factor_local(&poly(3, "(x - T)^2*(x^2 - T)"), 20).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!((fs[0].poly.deg(), fs[0].multiplicity), (1, 2));
        // (x^2 + T)^2 = x^4 + T^2 over F_2: a square of an inseparable irreducible
        let fs = factor_local(&poly(2, "x^4 + T^2"), 20).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!((fs[0].poly.deg(), fs[0].multiplicity), (2, 2));
        let fs = factor_local(&poly(3, "x^2 - T^-3"), 20).unwrap();
        assert_eq!(fs.len(), 1);
        let fs = factor_local(&poly(5, "x^2 - T^-2"), 20).unwrap();
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn hensel_split_of_inexact_product() {
        // x^2 - 3x + 2 + T: residues 1 and 2 lift to series roots
        let f = poly(5, "x^2 - 3*x + 2 + T");
        let fs = factor_local(&f, 15).unwrap();
        assert_eq!(fs.len(), 2);
        let prod = fs[0].poly.mul(&fs[1].poly);
        for (a, b) in prod.coeffs().iter().zip(f.coeffs()) {
            assert!(a.sub(b).val_lb() >= 15);
        }
    }

    #[test]
    fn krasner_examples() {
        assert_eq!(krasner_radius(&poly(3, "x^2 - T")).unwrap(), 2);
        assert_eq!(krasner_radius(&poly(3, "x - 1")).unwrap(), 1);
        assert_eq!(krasner_radius(&poly(2, "x^2 + T*x + T")).unwrap(), 3);
        assert_eq!(krasner_radius(&poly(2, "x^2 + T")), Err(Error::Inseparable));
    }
}
