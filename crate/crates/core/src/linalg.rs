//! Dense matrices over F_q((T)): products, division-free characteristic
//! polynomials, determinants and solves with minimal-valuation pivoting.

use crate::error::{prec_err, Error, Result};
use crate::ff::FiniteField;
use crate::poly::SeriesPoly;
use crate::series::{Series, INF};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq)]
pub struct Mat {
    field: Arc<FiniteField>,
    rows: usize,
    cols: usize,
    data: Vec<Series>,
}

impl Mat {
    pub fn zeros(field: &Arc<FiniteField>, rows: usize, cols: usize) -> Mat {
        Mat { field: field.clone(), rows, cols, data: vec![Series::zero(field); rows * cols] }
    }
    pub fn identity(field: &Arc<FiniteField>, n: usize) -> Mat {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Series::one(field));
        }
        m
    }
    pub fn from_rows(field: &Arc<FiniteField>, rows: Vec<Vec<Series>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(Mat { field: field.clone(), rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }
    pub fn from_fn(field: &Arc<FiniteField>, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Series) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { field: field.clone(), rows, cols, data }
    }
    /// Matrix whose columns are the given vectors.
    pub fn from_cols(field: &Arc<FiniteField>, rows: usize, cols: &[Vec<Series>]) -> Mat {
        Self::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }
    pub fn diagonal(field: &Arc<FiniteField>, d: &[Series]) -> Mat {
        let mut m = Self::zeros(field, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }
    pub fn parse(field: &Arc<FiniteField>, rows: &[Vec<String>]) -> Result<Mat> {
        let r = rows
            .iter()
            .map(|row| row.iter().map(|s| Series::parse(field, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, r)
    }
    pub fn to_texts(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_text()).collect()).collect()
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Series) {
        self.data[i * self.cols + j] = v;
    }
    pub fn col(&self, j: usize) -> Vec<Series> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn row(&self, i: usize) -> Vec<Series> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn entries(&self) -> &[Series] {
        &self.data
    }
    pub fn is_exact(&self) -> bool {
        self.data.iter().all(|x| x.is_exact())
    }

    pub fn transpose(&self) -> Mat {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }
    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }
    pub fn sub(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }
    pub fn neg(&self) -> Mat {
        let data = self.data.iter().map(|a| a.neg()).collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }
    pub fn scale(&self, s: &Series) -> Mat {
        let data = self.data.iter().map(|a| a.mul(s)).collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }
    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }
    pub fn mul_vec(&self, v: &[Series]) -> Vec<Series> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Series::zero(&self.field);
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_exact_zero() && !x.is_exact_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }
    pub fn pow(&self, e: u32) -> Mat {
        let mut r = Self::identity(&self.field, self.rows);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
    pub fn truncate(&self, m: i64) -> Mat {
        let data = self.data.iter().map(|a| a.truncate(m)).collect();
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }
    /// Block placement: copy `b` into position (r0, c0).
    pub fn put_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Self::from_fn(&self.field, rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }
    /// Smallest guaranteed valuation over all entries.
    pub fn min_val_lb(&self) -> i64 {
        self.data.iter().map(|x| x.val_lb()).min().unwrap_or(INF)
    }
    /// Smallest absolute precision over all entries.
    pub fn min_prec(&self) -> i64 {
        self.data.iter().map(|x| x.abs_prec()).min().unwrap_or(INF)
    }
    pub fn trace(&self) -> Series {
        let mut acc = Series::zero(&self.field);
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.get(i, i));
        }
        acc
    }
    /// Entrywise agreement modulo T^m.
    pub fn agrees_mod(&self, o: &Mat, m: i64) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data.iter().zip(&o.data).all(|(a, b)| a.agrees_mod(b, m))
    }

    /// Characteristic polynomial det(tI − A), division free (Berkowitz).
    pub fn char_poly(&self) -> SeriesPoly {
        assert!(self.is_square());
        let n = self.rows;
        let f = &self.field;
        // c holds coefficients of the char poly of the leading r×r block,
        // highest degree first.
        let mut c: Vec<Series> = vec![Series::one(f)];
        for r in 0..n {
            // A_r = leading r×r block, R = row r (cols 0..r), S = col r (rows 0..r), a = A[r][r]
            let a = self.get(r, r).clone();
            // Toeplitz column: [1, -a, -R S, -R A S, ..., -R A^{r-1} S]
            let mut t = vec![Series::one(f), a.neg()];
            let mut v: Vec<Series> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let mut rs = Series::zero(f);
                for (k, vk) in v.iter().enumerate() {
                    rs = rs.add(&self.get(r, k).mul(vk));
                }
                t.push(rs.neg());
                let nv: Vec<Series> = (0..r)
                    .map(|i| {
                        let mut acc = Series::zero(f);
                        for (k, vk) in v.iter().enumerate() {
                            acc = acc.add(&self.get(i, k).mul(vk));
                        }
                        acc
                    })
                    .collect();
                v = nv;
            }
            // new c = T * c where T is lower-triangular Toeplitz (r+2)×(r+1)
            let mut nc = vec![Series::zero(f); r + 2];
            for (i, slot) in nc.iter_mut().enumerate() {
                let mut acc = Series::zero(f);
                for (j, cj) in c.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        acc = acc.add(&t[i - j].mul(cj));
                    }
                }
                *slot = acc;
            }
            c = nc;
        }
        c.reverse();
        SeriesPoly::new(f, c)
    }

    /// Determinant by elimination with minimal-valuation pivots.
    pub fn det(&self, cap: i64) -> Result<Series> {
        assert!(self.is_square());
        let n = self.rows;
        let f = self.field.clone();
        let mut a = self.clone();
        let mut det = Series::one(&f);
        for t in 0..n {
            let (pi, pj) = match pick_pivot(&a, t, t, n, t + 1)? {
                Some(p) => p,
                None => {
                    if (t..n).all(|i| a.get(i, t).is_exact_zero()) {
                        return Ok(Series::zero(&f));
                    }
                    return Err(prec_err("determinant undecidable: column is O(T^m)"));
                }
            };
            debug_assert_eq!(pj, t);
            if pi != t {
                a.swap_rows(pi, t);
                det = det.neg();
            }
            let p = a.get(t, t).clone();
            det = det.mul(&p);
            let pinv = p.inv(cap)?;
            for i in t + 1..n {
                let c = a.get(i, t).mul(&pinv);
                if c.is_exact_zero() {
                    continue;
                }
                for j in t..n {
                    let v = a.get(i, j).sub(&c.mul(a.get(t, j)));
                    a.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Valuation of the determinant.
    pub fn det_valuation(&self, cap: i64) -> Result<i64> {
        self.det(cap)?.valuation()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Inverse by Gauss–Jordan with minimal-valuation pivots.
    pub fn inverse(&self, cap: i64) -> Result<Mat> {
        assert!(self.is_square());
        let n = self.rows;
        let f = self.field.clone();
        let mut a = self.clone();
        let mut inv = Mat::identity(&f, n);
        for t in 0..n {
            let (pi, _) = match pick_pivot(&a, t, t, n, t + 1)? {
                Some(p) => p,
                None => {
                    if (t..n).all(|i| a.get(i, t).is_exact_zero()) {
                        return Err(Error::DivisionByZero);
                    }
                    return Err(prec_err("matrix inverse: pivot column is O(T^m)"));
                }
            };
            a.swap_rows(pi, t);
            inv.swap_rows(pi, t);
            let pinv = a.get(t, t).inv(cap)?;
            for j in 0..n {
                let v = a.get(t, j).mul(&pinv);
                a.set(t, j, v);
                let w = inv.get(t, j).mul(&pinv);
                inv.set(t, j, w);
            }
            for i in 0..n {
                if i == t {
                    continue;
                }
                let c = a.get(i, t).clone();
                if c.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(i, j).sub(&c.mul(a.get(t, j)));
                    a.set(i, j, v);
                    let w = inv.get(i, j).sub(&c.mul(inv.get(t, j)));
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// Solve A x = b for square invertible A.
    pub fn solve(&self, b: &[Series], cap: i64) -> Result<Vec<Series>> {
        let inv = self.inverse(cap)?;
        Ok(inv.mul_vec(b))
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Mat) -> Mat {
        Self::from_fn(&self.field, self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols).mul(o.get(i % o.rows, j % o.cols))
        })
    }

    /// Companion matrix of a monic polynomial (last column carries −a_i).
    pub fn companion(p: &SeriesPoly) -> Result<Mat> {
        if !p.is_monic() || p.deg() == 0 {
            return Err(Error::InvalidInput("companion matrix needs a monic polynomial of degree ≥ 1".into()));
        }
        let n = p.deg();
        let f = p.field().clone();
        let mut m = Mat::zeros(&f, n, n);
        for i in 1..n {
            m.set(i, i - 1, Series::one(&f));
        }
        for i in 0..n {
            m.set(i, n - 1, p.coeff(i).neg());
        }
        Ok(m)
    }
}

/// Find a pivot of certified minimal valuation in rows r0.., cols c0..c1.
/// Returns None when no entry has a certified digit; errors when an
/// undetermined entry could have smaller valuation than every certified one.
pub(crate) fn pick_pivot(a: &Mat, r0: usize, c0: usize, r1: usize, c1: usize) -> Result<Option<(usize, usize)>> {
    let mut best: Option<(usize, usize, i64, bool)> = None;
    let mut undetermined_lb = INF;
    for i in r0..r1 {
        for j in c0..c1 {
            let x = a.get(i, j);
            if x.is_certified_nonzero() {
                let v = x.val_lb();
                let better = match best {
                    None => true,
                    Some((_, _, bv, bexact)) => v < bv || (v == bv && x.is_monomial() && !bexact),
                };
                if better {
                    best = Some((i, j, v, x.is_monomial()));
                }
            } else if x.is_indeterminate() {
                undetermined_lb = undetermined_lb.min(x.val_lb());
            }
        }
    }
    match best {
        None => Ok(None),
        Some((i, j, v, _)) => {
            if undetermined_lb < v {
                return Err(prec_err(format!(
                    "pivot of valuation {v} not certified minimal: an entry is only known as O(T^{undetermined_lb})"
                )));
            }
            Ok(Some((i, j)))
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let r: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_text()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: &Arc<FiniteField>, rows: &[&[&str]]) -> Mat {
        let r: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        Mat::parse(f, &r).unwrap()
    }

    #[test]
    fn berkowitz_matches_cofactor_3x3() {
        let f = FiniteField::from_order(5).unwrap();
        let a = m(&f, &[&["1", "T", "2"], &["T^-1", "3", "T^2"], &["0", "1", "T"]]);
        let cp = a.char_poly();
        // det(tI − A) at t = 0 equals −det(A) for odd size
        let d = a.det(20).unwrap();
        assert_eq!(cp.coeff(0), d.neg());
        assert_eq!(cp.coeff(2), a.trace().neg());
        assert!(cp.is_monic());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = FiniteField::from_order(3).unwrap();
        let a = m(&f, &[&["1 + T", "T"], &["T^2", "2"]]);
        let inv = a.inverse(30).unwrap();
        let id = a.mul(&inv);
        assert!(id.agrees_mod(&Mat::identity(&f, 2), 25));
    }

    #[test]
    fn companion_char_poly() {
        let f = FiniteField::from_order(2).unwrap();
        let p = SeriesPoly::parse(&f, "x^3 + T*x + T").unwrap();
        let c = Mat::companion(&p).unwrap();
        assert_eq!(c.char_poly(), p);
    }
}
