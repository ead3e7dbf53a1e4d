//! The commutative F-algebra A = F[x]/(χ) for a monic χ with integral
//! coefficients: its maximal order (Round-2 iteration on the radical),
//! the residue algebra O/TO, primitive idempotents and, when A is a field,
//! a uniformizer and a Teichmüller generator of the residue field.

use crate::error::{prec_err, Error, Result};
use crate::ff::{FiniteField, Tower};
use crate::fpoly;
use crate::lattice::{preimage, OLattice};
use crate::linalg::Mat;
use crate::poly::SeriesPoly;
use crate::series::{Series, INF};
use std::sync::Arc;

pub type Elem = Vec<Series>;

#[derive(Clone, Debug)]
pub struct PolyAlgebra {
    field: Arc<FiniteField>,
    modulus: SeriesPoly,
    n: usize,
    /// absolute precision at which products are truncated
    work: i64,
    /// relative precision for inverting exact non-monomial pivots
    pub cap: i64,
}

impl PolyAlgebra {
    pub fn new(modulus: &SeriesPoly, work: i64, cap: i64) -> Result<PolyAlgebra> {
        if !modulus.is_monic() || modulus.deg() == 0 {
            return Err(Error::InvalidInput("algebra modulus must be monic of positive degree".into()));
        }
        Ok(PolyAlgebra { field: modulus.field().clone(), modulus: modulus.clone(), n: modulus.deg(), work, cap })
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }
    pub fn modulus(&self) -> &SeriesPoly {
        &self.modulus
    }
    pub fn work(&self) -> i64 {
        self.work
    }
    pub fn zero(&self) -> Elem {
        vec![Series::zero(&self.field); self.n]
    }
    pub fn one(&self) -> Elem {
        self.constant(&Series::one(&self.field))
    }
    pub fn constant(&self, c: &Series) -> Elem {
        let mut v = self.zero();
        v[0] = c.clone();
        v
    }
    /// Class of x.
    pub fn x(&self) -> Elem {
        self.from_poly(&SeriesPoly::x(&self.field))
    }
    pub fn from_poly(&self, p: &SeriesPoly) -> Elem {
        self.reduce(p.coeffs().to_vec())
    }
    fn reduce(&self, mut c: Vec<Series>) -> Elem {
        let n = self.n;
        let m = self.modulus.coeffs();
        for k in (n..c.len()).rev() {
            let t = c[k].clone();
            if t.is_exact_zero() {
                continue;
            }
            for j in 0..n {
                if !m[j].is_exact_zero() {
                    c[k - n + j] = c[k - n + j].sub(&t.mul(&m[j]));
                }
            }
        }
        c.resize(n, Series::zero(&self.field));
        c.truncate(n);
        if self.work < INF {
            for x in c.iter_mut() {
                let long = x.degree().is_some_and(|d| d >= self.work);
                if long || (!x.is_exact() && x.abs_prec() > self.work) {
                    *x = x.truncate(self.work);
                }
            }
        }
        c
    }
    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }
    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
    }
    pub fn scale(&self, a: &Elem, s: &Series) -> Elem {
        a.iter().map(|x| x.mul(s)).collect()
    }
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let n = self.n;
        let mut c = vec![Series::zero(&self.field); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_exact_zero() {
                    c[i + j] = c[i + j].add(&x.mul(y));
                }
            }
        }
        self.reduce(c)
    }
    pub fn pow(&self, a: &Elem, mut e: u128) -> Elem {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }
    /// Matrix of y ↦ a·y in the power basis.
    pub fn mult_matrix(&self, a: &Elem) -> Mat {
        let mut cols = Vec::with_capacity(self.n);
        let x = self.x();
        let mut cur = a.clone();
        for j in 0..self.n {
            cols.push(cur.clone());
            if j + 1 < self.n {
                cur = self.mul(&cur, &x);
            }
        }
        Mat::from_cols(&self.field, self.n, &cols)
    }
    /// Characteristic polynomial of multiplication by `a` over F.
    pub fn char_poly(&self, a: &Elem) -> SeriesPoly {
        self.mult_matrix(a).char_poly()
    }
    pub fn is_zero_at_prec(a: &Elem) -> bool {
        a.iter().all(|c| !c.is_certified_nonzero())
    }
}

/// The residue algebra O/TO over F_q for an order O with basis b_i:
/// table[i][j] holds the coordinates of b_i·b_j.
#[derive(Clone, Debug)]
pub struct ResidueAlgebra {
    pub field: Arc<FiniteField>,
    pub n: usize,
    pub table: Vec<Vec<Vec<u32>>>,
    pub one: Vec<u32>,
}

impl ResidueAlgebra {
    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut out = vec![0u32; self.n];
        for i in 0..self.n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if b[j] == 0 {
                    continue;
                }
                let c = f.mul(a[i], b[j]);
                for (k, o) in out.iter_mut().enumerate() {
                    let t = self.table[i][j][k];
                    if t != 0 {
                        *o = f.add(*o, f.mul(c, t));
                    }
                }
            }
        }
        out
    }
    pub fn pow(&self, a: &[u32], mut e: u128) -> Vec<u32> {
        let mut result = self.one.clone();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }
    fn unit(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0u32; self.n];
        v[i] = 1;
        v
    }
    /// Nilradical: kernel of y ↦ y^{q^k} with q^k ≥ n (an F_q-linear map).
    pub fn radical(&self) -> Vec<Vec<u32>> {
        let q = self.field.q() as u128;
        let mut e = q;
        while e < self.n as u128 {
            e *= q;
        }
        let imgs: Vec<Vec<u32>> = (0..self.n).map(|i| self.pow(&self.unit(i), e)).collect();
        let rows: Vec<Vec<u32>> = (0..self.n).map(|k| (0..self.n).map(|i| imgs[i][k]).collect()).collect();
        fpoly::kernel(&self.field, &rows, self.n)
    }
    /// {y : y^q = y}: the F_q-span of the primitive idempotents.
    pub fn frobenius_fixed(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        let q = f.q() as u128;
        let imgs: Vec<Vec<u32>> = (0..self.n)
            .map(|i| {
                let u = self.unit(i);
                self.pow(&u, q).iter().zip(&u).map(|(a, b)| f.sub(*a, *b)).collect()
            })
            .collect();
        let rows: Vec<Vec<u32>> = (0..self.n).map(|k| (0..self.n).map(|i| imgs[i][k]).collect()).collect();
        fpoly::kernel(f, &rows, self.n)
    }
    /// Primitive idempotents.
    pub fn idempotents(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        let fixed = self.frobenius_fixed();
        let s = fixed.len();
        let mut idem = vec![self.one.clone()];
        for z in &fixed {
            if idem.len() == s {
                break;
            }
            let mut next = Vec::new();
            for e in &idem {
                let ze = self.mul(z, e);
                for a in f.elements() {
                    // indicator of the component value a: 1 - (z - a)^{q-1}
                    let shifted: Vec<u32> = ze.iter().zip(e).map(|(x, y)| f.sub(*x, f.mul(a, *y))).collect();
                    let pw = self.pow(&shifted, (f.q() - 1) as u128);
                    let pw_e = self.mul(&pw, e);
                    let d: Vec<u32> = e.iter().zip(&pw_e).map(|(x, y)| f.sub(*x, *y)).collect();
                    if d.iter().any(|&c| c != 0) {
                        next.push(d);
                    }
                }
            }
            idem = next;
        }
        idem
    }
    /// Rank of y ↦ a·y.
    pub fn mult_rank(&self, a: &[u32]) -> usize {
        let cols: Vec<Vec<u32>> = (0..self.n).map(|i| self.mul(a, &self.unit(i))).collect();
        let rows: Vec<Vec<u32>> = (0..self.n).map(|k| (0..self.n).map(|i| cols[i][k]).collect()).collect();
        fpoly::rank(&self.field, &rows)
    }
}

/// A subspace of F_q^n in reduced echelon form, for membership tests.
#[derive(Clone, Debug)]
pub struct Subspace {
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: &FiniteField, gens: &[Vec<u32>]) -> Subspace {
        let mut rows = gens.to_vec();
        let pivots = fpoly::rref(field, &mut rows);
        rows.truncate(pivots.len());
        Subspace { rows, pivots }
    }
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    pub fn reduce(&self, field: &FiniteField, v: &[u32]) -> Vec<u32> {
        let mut y = v.to_vec();
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            let k = y[c];
            if k != 0 {
                for (yi, ri) in y.iter_mut().zip(r) {
                    *yi = field.sub(*yi, field.mul(k, *ri));
                }
            }
        }
        y
    }
    pub fn contains(&self, field: &FiniteField, v: &[u32]) -> bool {
        self.reduce(field, v).iter().all(|&c| c == 0)
    }
    /// Standard basis vectors spanning a complement.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Maximal order O of A with its radical J and the residue algebra O/TO.
#[derive(Clone, Debug)]
pub struct OrderData {
    pub order: OLattice,
    pub radical: OLattice,
    pub residue: ResidueAlgebra,
    /// radical of O/TO (= J/TO)
    pub residue_radical: Vec<Vec<u32>>,
}

fn residue_of(c: &Series) -> Result<u32> {
    if c.val_lb() < 0 {
        if c.is_certified_nonzero() {
            return Err(Error::InvalidInput("element is not integral over the order".into()));
        }
        return Err(prec_err("integrality undecidable at working precision"));
    }
    if c.abs_prec() <= 0 {
        return Err(prec_err("residue undetermined at working precision"));
    }
    Ok(c.coeff_or_zero(0))
}

/// Coordinates of `y` in the basis of `order`, reduced mod T.
pub fn residue_coords(order: &OLattice, y: &Elem, cap: i64) -> Result<Vec<u32>> {
    order.coords(y, cap)?.iter().map(residue_of).collect()
}

pub fn residue_algebra(alg: &PolyAlgebra, order: &OLattice) -> Result<ResidueAlgebra> {
    let n = alg.n();
    let b: Vec<Elem> = (0..n).map(|j| order.basis().col(j)).collect();
    let mut table = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            let c = residue_coords(order, &alg.mul(&b[i], &b[j]), alg.cap)?;
            table[i][j] = c.clone();
            table[j][i] = c;
        }
    }
    let one = residue_coords(order, &alg.one(), alg.cap)?;
    Ok(ResidueAlgebra { field: alg.field().clone(), n, table, one })
}

/// Σ v_i b_i for residue coordinates v (constants lifted).
pub fn lift(alg: &PolyAlgebra, order: &OLattice, v: &[u32]) -> Elem {
    let f = alg.field();
    let mut y = alg.zero();
    for (i, &c) in v.iter().enumerate() {
        if c != 0 {
            y = alg.add(&y, &alg.scale(&order.basis().col(i), &Series::constant(f, c)));
        }
    }
    y
}

fn radical_lattice(alg: &PolyAlgebra, order: &OLattice, rad: &[Vec<u32>]) -> Result<OLattice> {
    let n = alg.n();
    let f = alg.field();
    let mut gens: Vec<Elem> = rad.iter().map(|v| lift(alg, order, v)).collect();
    let t = Series::t_pow(f, 1);
    for j in 0..n {
        gens.push(alg.scale(&order.basis().col(j), &t));
    }
    OLattice::from_generators(&Mat::from_cols(f, n, &gens), alg.cap)
}

/// {y ∈ A : y·J ⊆ J}.
fn multiplier_ring(alg: &PolyAlgebra, order: &OLattice, j: &OLattice) -> Result<OLattice> {
    let n = alg.n();
    let f = alg.field();
    let jinv = j.basis().inverse(alg.cap)?;
    let mut s = Mat::zeros(f, n * n, n);
    for k in 0..n {
        let m = jinv.mul(&alg.mult_matrix(&j.basis().col(k)));
        s.put_block(k * n, 0, &m);
    }
    preimage(&s, &order.scaled(-1), &OLattice::standard(f, n * n), Some(n), alg.cap)
}

/// Round-2 iteration: enlarge 𝔬[x] by the multiplier ring of its radical
/// until stable. Requires A reduced (χ squarefree).
pub fn maximal_order(alg: &PolyAlgebra) -> Result<OrderData> {
    for c in alg.modulus().coeffs() {
        if c.val_lb() < 0 {
            return Err(Error::InvalidInput("modulus must have integral coefficients".into()));
        }
    }
    let f = alg.field();
    let mut order = OLattice::standard(f, alg.n());
    for _ in 0..64 {
        let residue = residue_algebra(alg, &order)?;
        let rad = residue.radical();
        let j = radical_lattice(alg, &order, &rad)?;
        let next = multiplier_ring(alg, &order, &j)?;
        if order.includes(&next, alg.cap)? {
            return Ok(OrderData { order, radical: j, residue, residue_radical: rad });
        }
        order = next;
    }
    Err(Error::FactorizationIncomplete("maximal order not reached: algebra may be non-reduced".into()))
}

/// Lift a residue idempotent to an idempotent of A by e ← 3e² − 2e³.
pub fn lift_idempotent(alg: &PolyAlgebra, order: &OLattice, ebar: &[u32]) -> Result<Elem> {
    let f = alg.field();
    let three = Series::from_int(f, 3);
    let two = Series::from_int(f, 2);
    let mut e = lift(alg, order, ebar);
    let mut last = -1;
    let mut stalled = 0;
    let mut settled = false;
    for _ in 0..64 {
        let e2 = alg.mul(&e, &e);
        let defect = alg.sub(&e2, &e);
        // measured in 𝔬_A-coordinates: the defect lies in the radical and
        // may need several squarings before it gains a power of T
        let v = order.coords(&defect, alg.cap)?.iter().map(|c| c.val_lb()).min().unwrap_or(INF);
        if v >= alg.work() {
            settled = true;
            break;
        }
        if v <= last {
            stalled += 1;
            if stalled > 8 {
                settled = true;
                break;
            }
        } else {
            stalled = 0;
            last = v;
        }
        let e3 = alg.mul(&e2, &e);
        e = alg.sub(&alg.scale(&e2, &three), &alg.scale(&e3, &two));
    }
    if !settled {
        return Err(Error::NonConvergence("idempotent lifting".into()));
    }
    // exact input yields exact iterates that are idempotent only to the
    // working precision; drop the spurious tail
    Ok(e.iter().map(|c| c.truncate(alg.work())).collect())
}

/// Monic irreducible factors of χ, one per primitive idempotent of A.
pub fn split_factors(alg: &PolyAlgebra, od: &OrderData) -> Result<Vec<SeriesPoly>> {
    let idem = od.residue.idempotents();
    if idem.len() == 1 {
        return Ok(vec![alg.modulus().clone()]);
    }
    let n = alg.n();
    let f = alg.field();
    let x = alg.x();
    let mut out = Vec::new();
    for ebar in &idem {
        let d = od.residue.mult_rank(ebar);
        let e = lift_idempotent(alg, &od.order, ebar)?;
        let cp = alg.char_poly(&alg.mul(&x, &e));
        let coeffs = cp.coeffs();
        for c in &coeffs[..n - d] {
            if c.is_certified_nonzero() && c.val_lb() < alg.work() {
                return Err(Error::FactorizationIncomplete("idempotent component has the wrong rank".into()));
            }
        }
        let mut g: Vec<Series> = coeffs[n - d..].to_vec();
        g[d] = Series::one(f);
        out.push(SeriesPoly::new(f, g));
    }
    out.sort_by_key(|g| g.deg());
    Ok(out)
}

/// Structure of A when it is a field: ramification data, a uniformizer ϖ,
/// a Teichmüller lift ũ of a generator of the residue field, and the
/// 𝔬-basis ũ^j ϖ^i of the maximal order (column i·f + j).
#[derive(Clone, Debug)]
pub struct LocalStructure {
    pub e: usize,
    pub f: usize,
    pub tower: Tower,
    pub uniformizer: Elem,
    pub unit_gen: Elem,
    pub basis: Mat,
    pub basis_inv: Mat,
}

impl LocalStructure {
    /// Coordinates of y in the basis ũ^j ϖ^i.
    pub fn coords(&self, y: &Elem) -> Vec<Series> {
        self.basis_inv.mul_vec(y)
    }
    /// Level i of basis column k.
    pub fn level(&self, k: usize) -> usize {
        k / self.f
    }
    pub fn top(&self) -> &Arc<FiniteField> {
        &self.tower.top
    }
    /// y = Σ_i b_i ϖ^i with b_i ∈ F_Q((T)).
    pub fn to_top_coords(&self, y: &Elem) -> Vec<Series> {
        let c = self.coords(y);
        let top = self.top().clone();
        let g = top.generator();
        (0..self.e)
            .map(|i| {
                let mut acc = Series::zero(&top);
                for j in 0..self.f {
                    let cij = c[i * self.f + j].map_coeffs(&top, |d| self.tower.embed(d));
                    acc = acc.add(&cij.scale(top.pow(g, j as u64)));
                }
                acc
            })
            .collect()
    }
}

pub fn local_structure(alg: &PolyAlgebra, od: &OrderData) -> Result<LocalStructure> {
    let n = alg.n();
    let fld = alg.field().clone();
    let res = &od.residue;
    let rad = Subspace::new(&fld, &od.residue_radical);
    let fdeg = n - rad.dim();
    if res.idempotents().len() != 1 || !n.is_multiple_of(fdeg) {
        return Err(Error::NotIrreducible);
    }
    let e = n / fdeg;
    let cap = alg.cap;
    // uniformizer: an element of J outside J²
    let jb: Vec<Elem> = (0..n).map(|k| od.radical.basis().col(k)).collect();
    let mut prods = Vec::new();
    for a in 0..n {
        for b in a..n {
            prods.push(alg.mul(&jb[a], &jb[b]));
        }
    }
    let j2 = OLattice::from_generators(&Mat::from_cols(&fld, n, &prods), cap)?;
    let mut candidates = vec![alg.x()];
    candidates.extend(jb.iter().cloned());
    let mut uniformizer = None;
    for c in candidates {
        if od.radical.contains(&c, cap)? && !j2.contains(&c, cap)? {
            uniformizer = Some(c);
            break;
        }
    }
    let uniformizer = uniformizer.ok_or_else(|| prec_err("no uniformizer certified"))?;
    let tower = Tower::new(fld.clone(), fdeg as u32)?;
    let unit_gen = if fdeg == 1 { alg.one() } else { teichmuller_generator(alg, od, &rad, &tower)? };
    let mut cols = Vec::with_capacity(n);
    let mut pi_pow = alg.one();
    for _ in 0..e {
        let mut u_pow = pi_pow.clone();
        for _ in 0..fdeg {
            cols.push(u_pow.clone());
            u_pow = alg.mul(&u_pow, &unit_gen);
        }
        pi_pow = alg.mul(&pi_pow, &uniformizer);
    }
    let basis = Mat::from_cols(&fld, n, &cols);
    let dv = basis.det_valuation(cap)?;
    if dv != od.order.det_valuation() {
        return Err(prec_err("adapted basis does not span the maximal order"));
    }
    let basis_inv = basis.inverse(cap)?;
    Ok(LocalStructure { e, f: fdeg, tower, uniformizer, unit_gen, basis, basis_inv })
}

// Residue class ū with the defining polynomial of F_Q over F_p and
// compatible with F_q ⊆ F_Q, lifted to a root of unity by ũ ← ũ^Q.
fn teichmuller_generator(alg: &PolyAlgebra, od: &OrderData, rad: &Subspace, tower: &Tower) -> Result<Elem> {
    let fld = alg.field();
    let res = &od.residue;
    let n = alg.n();
    let top = &tower.top;
    let cmod: Vec<u32> = top.modulus().to_vec();
    let comp = rad.complement(n);
    let fdeg = comp.len();
    // image of the base generator written in powers of g with F_p digits
    let alpha = fld.generator();
    let alpha_digits = top.coords(tower.embed(alpha));
    let mut alpha_res = vec![0u32; n];
    for (k, v) in res.one.iter().enumerate() {
        alpha_res[k] = fld.mul(*v, alpha);
    }
    let q = fld.q() as u64;
    let total = q.pow(fdeg as u32);
    for idx in 1..total {
        let mut u = vec![0u32; n];
        let mut t = idx;
        for &c in &comp {
            u[c] = (t % q) as u32;
            t /= q;
        }
        // C(u) in the radical
        let mut acc = vec![0u32; n];
        for &c in cmod.iter().rev() {
            acc = res.mul(&acc, &u);
            for (a, o) in acc.iter_mut().zip(&res.one) {
                *a = fld.add(*a, fld.mul(c, *o));
            }
        }
        if !rad.contains(fld, &acc) {
            continue;
        }
        if fld.r() > 1 {
            let mut val = vec![0u32; n];
            let mut pw = res.one.clone();
            for &d in &alpha_digits {
                for (a, b) in val.iter_mut().zip(&pw) {
                    *a = fld.add(*a, fld.mul(d, *b));
                }
                pw = res.mul(&pw, &u);
            }
            let diff: Vec<u32> = val.iter().zip(&alpha_res).map(|(a, b)| fld.sub(*a, *b)).collect();
            if !rad.contains(fld, &diff) {
                continue;
            }
        }
        let qq = top.q() as u128;
        let mut y = lift(alg, &od.order, &u);
        let mut last = -1;
        for _ in 0..64 {
            let next = alg.pow(&y, qq);
            let d = alg.sub(&next, &y).iter().map(|c| c.val_lb()).min().unwrap_or(INF);
            y = next;
            if d >= alg.work() || d <= last {
                break;
            }
            last = d;
        }
        return Ok(y);
    }
    Err(Error::InvalidInput("residue field generator not found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(q: u32, text: &str) -> PolyAlgebra {
        let f = FiniteField::from_order(q).unwrap();
        PolyAlgebra::new(&SeriesPoly::parse(&f, text).unwrap(), 60, 60).unwrap()
    }

    #[test]
    fn eisenstein_is_already_maximal() {
        let a = alg(3, "x^2 - T");
        let od = maximal_order(&a).unwrap();
        assert_eq!(od.order.det_valuation(), 0);
        let ls = local_structure(&a, &od).unwrap();
        assert_eq!((ls.e, ls.f), (2, 1));
    }

    #[test]
    fn non_maximal_equation_order() {
        // x^2 - T^3: maximal order contains x/T
        let a = alg(3, "x^2 - T^3");
        let od = maximal_order(&a).unwrap();
        assert_eq!(od.order.det_valuation(), -1);
        let ls = local_structure(&a, &od).unwrap();
        assert_eq!((ls.e, ls.f), (2, 1));
    }

    #[test]
    fn unramified_and_split() {
        let a = alg(2, "x^2 + x + 1");
        let od = maximal_order(&a).unwrap();
        let ls = local_structure(&a, &od).unwrap();
        assert_eq!((ls.e, ls.f), (1, 2));
        let b = alg(5, "x^2 - 3*x + 2 + T");
        let od = maximal_order(&b).unwrap();
        let fs = split_factors(&b, &od).unwrap();
        assert_eq!(fs.len(), 2);
        let prod = fs[0].mul(&fs[1]);
        for (u, v) in prod.coeffs().iter().zip(b.modulus().coeffs()) {
            assert!(u.sub(v).val_lb() >= 30);
        }
    }

    #[test]
    fn inseparable_quadratic() {
        let a = alg(2, "x^2 + T^3");
        let od = maximal_order(&a).unwrap();
        let ls = local_structure(&a, &od).unwrap();
        assert_eq!((ls.e, ls.f), (2, 1));
        assert_eq!(od.order.det_valuation(), -1);
    }
}
