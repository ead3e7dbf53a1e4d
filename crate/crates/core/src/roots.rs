//! Roots in F_Q((t)) of polynomials with coefficients in F_Q((t)).
//!
//! Roots are separated digit by digit: in a disk x = r + t^d y, ν(y) ≥ 0,
//! the residual polynomial of the rescaled polynomial counts the roots in
//! each residue class of y. A class holding a single root is finished by
//! Newton iteration, which converges inside such a disk.

use crate::error::{prec_err, Error, Result};
use crate::fpoly;
use crate::poly::SeriesPoly;
use crate::series::{Series, INF};

/// Q(y + c) for a constant c.
fn taylor_shift(q: &SeriesPoly, c: &Series) -> SeriesPoly {
    let f = q.field();
    let lin = SeriesPoly::new(f, vec![c.clone(), Series::one(f)]);
    let mut acc = SeriesPoly::zero(f);
    for a in q.coeffs().iter().rev() {
        acc = acc.mul(&lin).add(&SeriesPoly::constant(a.clone()));
    }
    acc
}

/// Minimum coefficient valuation, or an error when an undetermined
/// coefficient could attain it.
fn min_valuation(q: &SeriesPoly) -> Result<i64> {
    let mut best = INF;
    let mut unsure = INF;
    for c in q.coeffs() {
        if c.is_exact_zero() {
            continue;
        }
        if c.is_certified_nonzero() {
            best = best.min(c.val_lb());
        } else {
            unsure = unsure.min(c.val_lb());
        }
    }
    if unsure <= best {
        return Err(prec_err("root separation needs more precision"));
    }
    Ok(best)
}

fn newton_lift(p: &SeriesPoly, x0: Series, prec: i64) -> Result<Series> {
    let dp = p.derivative();
    let mut x = x0;
    let mut last = -INF;
    for _ in 0..200 {
        let v = p.eval(&x);
        let gain = v.val_lb();
        if v.is_exact_zero() || gain >= prec || gain <= last {
            return Ok(x.truncate(x.abs_prec()));
        }
        last = gain;
        let d = dp.eval(&x);
        if !d.is_certified_nonzero() {
            return Err(prec_err("derivative undetermined during Newton lifting"));
        }
        x = x.sub(&v.div(&d, prec + 8)?);
    }
    Err(Error::NonConvergence("Newton lifting".into()))
}

fn search(p: &SeriesPoly, q: &SeriesPoly, center: &Series, d: i64, prec: i64, out: &mut Vec<Series>) -> Result<()> {
    let f = q.field().clone();
    let mu = min_valuation(q)?;
    if mu >= INF {
        return Err(Error::InvalidInput("zero polynomial has no isolated roots".into()));
    }
    let residual: Vec<u32> = q.coeffs().iter().map(|c| c.coeff_or_zero(mu)).collect();
    for (c, m) in fpoly::roots(&f, &residual) {
        let next = center.add(&Series::monomial(&f, c, d));
        if m == 1 {
            out.push(newton_lift(p, next, prec)?);
            continue;
        }
        if d > prec {
            return Err(prec_err("roots not separated within the working precision"));
        }
        let shifted = taylor_shift(q, &Series::constant(&f, c));
        let t = Series::t_pow(&f, 1);
        let q2 = shifted.scale_var(&t);
        search(p, &q2, &next, d + 1, prec, out)?;
    }
    Ok(())
}

/// Distinct roots of a separable polynomial, each to absolute precision
/// about `prec`.
fn simple_roots(p: &SeriesPoly, prec: i64) -> Result<Vec<Series>> {
    let f = p.field().clone();
    let lead = p.leading();
    if !lead.is_certified_nonzero() {
        return Err(prec_err("leading coefficient undetermined"));
    }
    let mut out = Vec::new();
    let mut p = p.clone();
    if p.coeff(0).is_exact_zero() {
        out.push(Series::zero(&f));
        p = SeriesPoly::new(&f, p.coeffs()[1..].to_vec());
        if p.coeff(0).is_exact_zero() {
            return Err(Error::InseparableRootSearch);
        }
    }
    if p.deg() == 0 {
        return Ok(out);
    }
    // every root has valuation ≥ vmin
    let lv = lead.val_lb();
    let mut vmin = INF;
    for i in 0..p.deg() {
        let c = p.coeff(i);
        if c.is_exact_zero() {
            continue;
        }
        let k = (p.deg() - i) as i64;
        vmin = vmin.min((c.val_lb() - lv).div_euclid(k));
    }
    if vmin >= INF {
        return Ok(out);
    }
    let q = p.scale_var(&Series::t_pow(&f, vmin));
    search(&p, &q, &Series::zero(&f), vmin, prec, &mut out)?;
    Ok(out)
}

/// p-th root of a series whose digits sit in degrees divisible by p.
fn pth_root(s: &Series) -> Option<Series> {
    let f = s.field();
    let p = f.p() as i64;
    if s.is_exact_zero() {
        return Some(s.clone());
    }
    let start = s.start();
    let mut digits = Vec::new();
    for (i, &c) in s.digits().iter().enumerate() {
        let k = start + i as i64;
        if k.rem_euclid(p) != 0 {
            if c != 0 {
                return None;
            }
            continue;
        }
        digits.push((k / p, f.pow(c, (f.q() / f.p()) as u64)));
    }
    let lo = digits.first().map(|d| d.0).unwrap_or(0);
    let mut v = vec![0u32; digits.last().map(|d| (d.0 - lo + 1) as usize).unwrap_or(0)];
    for (k, c) in digits {
        v[(k - lo) as usize] = c;
    }
    let prec = s.prec().map(|m| m.div_euclid(p));
    Some(Series::from_coeffs(f, lo, v, prec))
}

/// Distinct roots of p in F_Q((t)). A polynomial in x^p is reduced to its
/// p-th power roots; other repeated roots fail to separate.
pub fn roots(p: &SeriesPoly, prec: i64) -> Result<Vec<Series>> {
    if p.deg() == 0 {
        return Ok(Vec::new());
    }
    if p.derivative_vanishes() {
        let f = p.field();
        let pp = f.p() as usize;
        let g = SeriesPoly::new(f, p.coeffs().iter().step_by(pp).cloned().collect());
        let ys = roots(&g, prec)?;
        return Ok(ys.iter().filter_map(pth_root).collect());
    }
    simple_roots(p, prec)
}

/// Number of distinct roots.
pub fn count_roots(p: &SeriesPoly, prec: i64) -> Result<usize> {
    Ok(roots(p, prec)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FiniteField;

    #[test]
    fn quadratic_roots() {
        let f = FiniteField::from_order(3).unwrap();
        let p = SeriesPoly::parse(&f, "x^2 - T").unwrap();
        assert!(roots(&p, 20).unwrap().is_empty());
        let p = SeriesPoly::parse(&f, "x^2 - T^2").unwrap();
        assert_eq!(roots(&p, 20).unwrap().len(), 2);
        let p = SeriesPoly::parse(&f, "(x - 1)*(x - 1 - T^3)*(x - T^-2)").unwrap();
        let r = roots(&p, 20).unwrap();
        assert_eq!(r.len(), 3);
        for x in r {
            assert!(p.eval(&x).val_lb() >= 20);
        }
    }

    #[test]
    fn close_roots_separate() {
        // (x − 1)(x − 1 − T^3): the residual root 1 is double
        let f = FiniteField::from_order(2).unwrap();
        let p = SeriesPoly::parse(&f, "x^2 + T^3*x + 1 + T^3").unwrap();
        let r = roots(&p, 30).unwrap();
        assert_eq!(r.len(), 2);
        let p = SeriesPoly::parse(&f, "x^2 + T*x + T").unwrap();
        assert!(roots(&p, 30).unwrap().is_empty());
    }

    #[test]
    fn inseparable_roots() {
        let f = FiniteField::from_order(2).unwrap();
        let p = SeriesPoly::parse(&f, "x^2 + T^2").unwrap();
        let r = roots(&p, 20).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].to_text(), Series::t_pow(&f, 1).to_text());
        assert!(roots(&SeriesPoly::parse(&f, "x^2 + T").unwrap(), 20).unwrap().is_empty());
    }
}
