//! Seeded corpora of quasi-regular elliptic matrices with Laurent-polynomial
//! entries, and random conjugators in GL(N, 𝔬) with constant determinant.
//!
//! An element is the companion matrix of an irreducible χ conjugated by a
//! random unimodular matrix, so every entry stays an exact Laurent
//! polynomial and the inverse conjugator is exact as well.

use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::ff::FiniteField;
use crate::fpoly;
use crate::invariants::scale_char_poly;
use crate::linalg::Mat;
use crate::poly::SeriesPoly;
use crate::series::Series;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// How the characteristic polynomial was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// root is a uniformizer of a totally ramified extension, rescaled
    Eisenstein,
    /// c + ϖ_E for a constant c, rescaled: never minimal
    Shifted,
    /// lift of an irreducible residual polynomial, rescaled
    Unramified,
    /// random coefficients, kept when irreducible
    Generic,
    /// Eisenstein in x^p
    Inseparable,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorpusElement {
    pub id: usize,
    pub q: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub kind: Kind,
    pub chi: String,
    pub gamma: Vec<Vec<String>>,
}

impl CorpusElement {
    pub fn matrix(&self, f: &Arc<FiniteField>) -> Result<Mat> {
        Mat::parse(f, &self.gamma)
    }
    pub fn char_poly(&self, f: &Arc<FiniteField>) -> Result<SeriesPoly> {
        SeriesPoly::parse(f, &self.chi)
    }
}

fn random_series(f: &Arc<FiniteField>, rng: &mut ChaCha8Rng, low: i64, len: usize) -> Series {
    let q = f.q();
    let digits: Vec<u32> = (0..len).map(|_| rng.gen_range(0..q)).collect();
    Series::from_coeffs(f, low, digits, None)
}

fn random_unit(f: &Arc<FiniteField>, rng: &mut ChaCha8Rng) -> u32 {
    rng.gen_range(1..f.q())
}

fn eisenstein(f: &Arc<FiniteField>, rng: &mut ChaCha8Rng, n: usize, step: usize) -> SeriesPoly {
    let mut c = vec![Series::zero(f); n + 1];
    c[n] = Series::one(f);
    for i in (step..n).step_by(step) {
        c[i] = random_series(f, rng, 1, 2);
    }
    let u = Series::constant(f, random_unit(f, rng)).add(&random_series(f, rng, 1, 2));
    c[0] = u.shift(1);
    SeriesPoly::new(f, c)
}

fn residual_irreducible(f: &Arc<FiniteField>, rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    loop {
        let mut p: Vec<u32> = (0..n).map(|_| rng.gen_range(0..f.q())).collect();
        p.push(1);
        if fpoly::is_irreducible(f, &p) {
            return p;
        }
    }
}

fn rescale(chi: &SeriesPoly, a: i64) -> SeriesPoly {
    scale_char_poly(chi, &Series::t_pow(chi.field(), a))
}

fn shift_var(chi: &SeriesPoly, c: u32) -> SeriesPoly {
    let f = chi.field();
    // χ(x − c)
    let lin = SeriesPoly::new(f, vec![Series::constant(f, f.neg(c)), Series::one(f)]);
    let mut acc = SeriesPoly::zero(f);
    for a in chi.coeffs().iter().rev() {
        acc = acc.mul(&lin).add(&SeriesPoly::constant(a.clone()));
    }
    acc
}

/// An irreducible χ of degree n of the given kind, or None when the kind
/// does not exist for (q, n).
pub fn draw_poly(
    f: &Arc<FiniteField>,
    rng: &mut ChaCha8Rng,
    n: usize,
    kind: Kind,
    work: i64,
) -> Result<Option<SeriesPoly>> {
    let p = f.p() as usize;
    let a = rng.gen_range(-1..=1i64);
    let chi = match kind {
        Kind::Eisenstein => rescale(&eisenstein(f, rng, n, 1), a),
        Kind::Shifted => {
            let c = random_unit(f, rng);
            let step = if n.is_multiple_of(p) && rng.gen_bool(0.5) { p } else { 1 };
            rescale(&shift_var(&eisenstein(f, rng, n, step), c), a)
        }
        Kind::Unramified => {
            let r = residual_irreducible(f, rng, n);
            let mut c: Vec<Series> = r.iter().map(|&d| Series::constant(f, d)).collect();
            for ci in c.iter_mut().take(n) {
                *ci = ci.add(&random_series(f, rng, 1, 2));
            }
            rescale(&SeriesPoly::new(f, c), a)
        }
        Kind::Inseparable => {
            if !n.is_multiple_of(p) {
                return Ok(None);
            }
            rescale(&eisenstein(f, rng, n, p), a)
        }
        Kind::Generic => {
            for _ in 0..200 {
                let mut c: Vec<Series> = (0..n).map(|i| random_series(f, rng, -((n - i) as i64), 3)).collect();
                c.push(Series::one(f));
                let chi = SeriesPoly::new(f, c);
                if is_irreducible(&chi, work)? {
                    return Ok(Some(chi));
                }
            }
            return Ok(None);
        }
    };
    Ok(Some(chi))
}

/// A random g ∈ GL(N, 𝔬) with det g ∈ F_q^× and its exact inverse: a
/// product of elementary transvections with polynomial entries, a
/// permutation and a constant diagonal.
pub fn random_unimodular(f: &Arc<FiniteField>, rng: &mut ChaCha8Rng, n: usize, steps: usize) -> (Mat, Mat) {
    let mut g = Mat::identity(f, n);
    let mut ginv = Mat::identity(f, n);
    if n == 1 {
        let u = random_unit(f, rng);
        let s = Series::constant(f, u);
        let si = Series::constant(f, f.inv(u).unwrap());
        return (g.scale(&s), ginv.scale(&si));
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = random_series(f, rng, 0, 2);
        let mut e = Mat::identity(f, n);
        e.set(i, j, c.clone());
        let mut einv = Mat::identity(f, n);
        einv.set(i, j, c.neg());
        g = e.mul(&g);
        ginv = ginv.mul(&einv);
    }
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    g.swap_rows(a, b);
    ginv.swap_cols(a, b);
    let d: Vec<u32> = (0..n).map(|_| random_unit(f, rng)).collect();
    let dm = Mat::diagonal(f, &d.iter().map(|&u| Series::constant(f, u)).collect::<Vec<_>>());
    let dinv = Mat::diagonal(f, &d.iter().map(|&u| Series::constant(f, f.inv(u).unwrap())).collect::<Vec<_>>());
    (dm.mul(&g), ginv.mul(&dinv))
}

/// γ ↦ gγg^{-1}.
pub fn conjugate(gamma: &Mat, g: &(Mat, Mat)) -> Mat {
    g.0.mul(gamma).mul(&g.1)
}

/// The kinds that exist for (q, N), in generation order.
pub fn kinds_for(f: &FiniteField, n: usize) -> Vec<Kind> {
    let mut k = vec![Kind::Eisenstein, Kind::Shifted, Kind::Unramified, Kind::Generic];
    if n.is_multiple_of(f.p() as usize) {
        k.push(Kind::Inseparable);
    }
    k
}

/// `count` elements of size N, cycling through the available kinds.
pub fn generate(f: &Arc<FiniteField>, n: usize, count: usize, seed: u64, work: i64) -> Result<Vec<CorpusElement>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32) ^ ((f.q() as u64) << 48));
    let kinds = kinds_for(f, n);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 50 * count + 100 {
            return Err(Error::BudgetExceeded("corpus generation made no progress".into()));
        }
        let kind = kinds[out.len() % kinds.len()];
        let chi = match draw_poly(f, &mut rng, n, kind, work)? {
            Some(c) => c,
            None => continue,
        };
        let comp = Mat::companion(&chi)?;
        let g = random_unimodular(f, &mut rng, n, 2 * n);
        let gamma = conjugate(&comp, &g);
        out.push(CorpusElement { id: out.len(), q: f.q(), n, kind, chi: chi.to_text(), gamma: gamma.to_texts() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{classify, is_constant_det_unimodular};

    #[test]
    fn corpus_is_reproducible_and_elliptic() {
        let f = FiniteField::from_order(2).unwrap();
        let a = generate(&f, 2, 10, 7, 40).unwrap();
        let b = generate(&f, 2, 10, 7, 40).unwrap();
        assert_eq!(a, b);
        for el in &a {
            let g = el.matrix(&f).unwrap();
            assert!(g.is_exact());
            let c = classify(&g, 40).unwrap();
            assert!(c.quasi_regular_elliptic, "{el:?}");
            assert_eq!(g.char_poly().to_text(), el.char_poly(&f).unwrap().to_text());
        }
        assert!(a.iter().any(|e| e.kind == Kind::Inseparable));
    }

    #[test]
    fn unimodular_inverse_is_exact() {
        let f = FiniteField::from_order(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            let (g, gi) = random_unimodular(&f, &mut rng, n, 6);
            assert!(g.mul(&gi).agrees_mod(&Mat::identity(&f, n), 1000));
            assert!(gi.is_exact());
            assert!(is_constant_det_unimodular(&g, 40).unwrap());
        }
    }
}
