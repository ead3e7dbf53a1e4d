//! Dense polynomials over a finite field F_q (coefficients lowest degree
//! first, trimmed) and over F_q[T], the latter only as far as the exact
//! squarefree test needs.

use crate::ff::FiniteField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type FPoly = Vec<u32>;

pub fn trim(a: &mut FPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn deg(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn add(f: &FiniteField, a: &[u32], b: &[u32]) -> FPoly {
    let n = a.len().max(b.len());
    let mut r: FPoly = (0..n).map(|i| f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))).collect();
    trim(&mut r);
    r
}

pub fn sub(f: &FiniteField, a: &[u32], b: &[u32]) -> FPoly {
    let n = a.len().max(b.len());
    let mut r: FPoly = (0..n).map(|i| f.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))).collect();
    trim(&mut r);
    r
}

pub fn scale(f: &FiniteField, a: &[u32], c: u32) -> FPoly {
    let mut r: FPoly = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut r);
    r
}

pub fn mul(f: &FiniteField, a: &[u32], b: &[u32]) -> FPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                r[i + j] = f.add(r[i + j], f.mul(x, y));
            }
        }
    }
    trim(&mut r);
    r
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(f: &FiniteField, a: &[u32], b: &[u32]) -> (FPoly, FPoly) {
    let db = deg(b).expect("division by the zero polynomial");
    let inv = f.inv(b[db]).unwrap();
    let mut r: FPoly = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    for k in (db..r.len()).rev() {
        let c = f.mul(r[k], inv);
        if c == 0 {
            continue;
        }
        q[k - db] = c;
        for j in 0..=db {
            r[k - db + j] = f.sub(r[k - db + j], f.mul(c, b[j]));
        }
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub fn rem(f: &FiniteField, a: &[u32], b: &[u32]) -> FPoly {
    divrem(f, a, b).1
}

pub fn monic(f: &FiniteField, a: &[u32]) -> FPoly {
    match deg(a) {
        None => Vec::new(),
        Some(d) => scale(f, &a[..=d], f.inv(a[d]).unwrap()),
    }
}

/// Monic gcd.
pub fn gcd(f: &FiniteField, a: &[u32], b: &[u32]) -> FPoly {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn derivative(f: &FiniteField, a: &[u32]) -> FPoly {
    let mut r: FPoly = a.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_int(i as i64))).collect();
    trim(&mut r);
    r
}

pub fn eval(f: &FiniteField, a: &[u32], x: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// base^e mod m.
pub fn powmod(f: &FiniteField, base: &[u32], mut e: u128, m: &[u32]) -> FPoly {
    let mut result: FPoly = rem(f, &[1], m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(f, &mul(f, &result, &b), m);
        }
        b = rem(f, &mul(f, &b, &b), m);
        e >>= 1;
    }
    result
}

/// Irreducibility over F_q by the distinct-degree test.
pub fn is_irreducible(f: &FiniteField, a: &[u32]) -> bool {
    let d = match deg(a) {
        None | Some(0) => return false,
        Some(d) => d,
    };
    let m = monic(f, a);
    let x: FPoly = vec![0, 1];
    let mut xp = x.clone();
    for i in 1..=d / 2 {
        xp = powmod(f, &xp, f.q() as u128, &m);
        let g = gcd(f, &m, &sub(f, &xp, &x));
        if !g.is_empty() && deg(&g) != Some(0) {
            return false;
        }
        let _ = i;
    }
    true
}

/// Distinct roots in F_q, sorted, with multiplicities.
pub fn roots(f: &FiniteField, a: &[u32]) -> Vec<(u32, usize)> {
    let m = monic(f, a);
    if deg(&m).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut found = Vec::new();
    if f.q() <= 4096 {
        for x in f.elements() {
            if eval(f, &m, x) == 0 {
                found.push(x);
            }
        }
    } else {
        let xq = powmod(f, &[0, 1], f.q() as u128, &m);
        let g = gcd(f, &m, &sub(f, &xq, &[0, 1]));
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        split_linear(f, &g, &mut rng, &mut found);
        found.sort_unstable();
    }
    found
        .into_iter()
        .map(|r| {
            let mut k = 0;
            let mut cur = m.clone();
            loop {
                let (qt, rm) = divrem(f, &cur, &[f.neg(r), 1]);
                if !rm.is_empty() {
                    break;
                }
                k += 1;
                cur = qt;
            }
            (r, k)
        })
        .collect()
}

// Equal-degree splitting of a product of distinct linear factors.
fn split_linear(f: &FiniteField, g: &[u32], rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
    match deg(g) {
        None | Some(0) => {}
        Some(1) => {
            let m = monic(f, g);
            out.push(f.neg(m[0]));
        }
        Some(_) => loop {
            let a = rng.gen_range(1..f.q());
            let b = rng.gen_range(0..f.q());
            let t: FPoly = vec![b, a];
            let h = if f.p() == 2 {
                // absolute trace map t + t^2 + … + t^{q/2}
                let mut acc = t.clone();
                let mut cur = t.clone();
                for _ in 1..f.r() {
                    cur = rem(f, &mul(f, &cur, &cur), g);
                    acc = add(f, &acc, &cur);
                }
                acc
            } else {
                let e = ((f.q() - 1) / 2) as u128;
                sub(f, &powmod(f, &t, e, g), &[1])
            };
            let d = gcd(f, g, &h);
            let dd = deg(&d).unwrap_or(0);
            if dd > 0 && dd < deg(g).unwrap() {
                let (other, _) = divrem(f, g, &d);
                split_linear(f, &d, rng, out);
                split_linear(f, &other, rng, out);
                return;
            }
        },
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(f: &FiniteField, m: &mut [Vec<u32>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = f.inv(m[r][c]).unwrap();
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let k = m[i][c];
                for j in 0..cols {
                    let t = f.mul(k, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of {v : M v = 0} for M given by rows of length `cols`.
pub fn kernel(f: &FiniteField, m: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    let mut a = m.to_vec();
    let piv = rref(f, &mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![0u32; cols];
        v[free] = 1;
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = f.neg(a[r][free]);
        }
        out.push(v);
    }
    out
}

pub fn rank(f: &FiniteField, m: &[Vec<u32>]) -> usize {
    let mut a = m.to_vec();
    rref(f, &mut a).len()
}

/// Polynomials in x with coefficients in F_q[T].
pub type BiPoly = Vec<FPoly>;

fn bi_trim(a: &mut BiPoly) {
    while a.last().is_some_and(|c| c.is_empty()) {
        a.pop();
    }
}

fn content_gcd(f: &FiniteField, a: &BiPoly) -> FPoly {
    let mut g: FPoly = Vec::new();
    for c in a {
        g = gcd(f, &g, c);
    }
    g
}

fn primitive(f: &FiniteField, a: &BiPoly) -> BiPoly {
    let g = content_gcd(f, a);
    if g.is_empty() {
        return a.clone();
    }
    let mut r: BiPoly = a.iter().map(|c| divrem(f, c, &g).0).collect();
    bi_trim(&mut r);
    r
}

// Pseudo-remainder of a by b in F_q[T][x].
fn bi_prem(f: &FiniteField, a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    while r.len() > db {
        let k = r.len() - 1;
        let lr = r[k].clone();
        let shift = k - db;
        for c in r.iter_mut() {
            *c = mul(f, c, lb);
        }
        for j in 0..=db {
            let t = mul(f, &lr, &b[j]);
            r[shift + j] = sub(f, &r[shift + j], &t);
        }
        bi_trim(&mut r);
        if r.len() == k + 1 {
            r.pop();
            bi_trim(&mut r);
        }
        r = primitive(f, &r);
    }
    r
}

/// Primitive gcd in F_q[T][x], up to a unit of F_q.
pub fn bi_gcd(f: &FiniteField, a: &BiPoly, b: &BiPoly) -> BiPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    bi_trim(&mut x);
    bi_trim(&mut y);
    let cg = gcd(f, &content_gcd(f, &x), &content_gcd(f, &y));
    x = primitive(f, &x);
    y = primitive(f, &y);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = bi_prem(f, &x, &y);
        x = y;
        y = r;
    }
    if x.is_empty() {
        return x;
    }
    let mut out: BiPoly = x.iter().map(|c| mul(f, c, &cg)).collect();
    bi_trim(&mut out);
    out
}

pub fn bi_dx(f: &FiniteField, a: &BiPoly) -> BiPoly {
    let mut r: BiPoly = a.iter().enumerate().skip(1).map(|(i, c)| scale(f, c, f.from_int(i as i64))).collect();
    bi_trim(&mut r);
    r
}

pub fn bi_dt(f: &FiniteField, a: &BiPoly) -> BiPoly {
    let mut r: BiPoly = a.iter().map(|c| derivative(f, c)).collect();
    bi_trim(&mut r);
    r
}

/// Squarefree over F_q(T) (equivalently over F_q((T))): no irreducible
/// factor of positive x-degree divides f, ∂f/∂x and ∂f/∂T together.
pub fn bi_is_squarefree(f: &FiniteField, a: &BiPoly) -> bool {
    let g = bi_gcd(f, a, &bi_dx(f, a));
    let g = bi_gcd(f, &g, &bi_dt(f, a));
    g.len() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_division() {
        let f = FiniteField::from_order(5).unwrap();
        let a = mul(&f, &[1, 1], &[2, 0, 1]);
        let b = mul(&f, &[1, 1], &[3, 1]);
        assert_eq!(gcd(&f, &a, &b), vec![1, 1]);
        let (q, r) = divrem(&f, &a, &[1, 1]);
        assert!(r.is_empty());
        assert_eq!(q, vec![2, 0, 1]);
    }

    #[test]
    fn irreducibility_and_roots() {
        let f2 = FiniteField::from_order(2).unwrap();
        assert!(is_irreducible(&f2, &[1, 1, 1]));
        assert!(!is_irreducible(&f2, &[1, 0, 1]));
        assert_eq!(roots(&f2, &[1, 0, 1]), vec![(1, 2)]);
        let mut m = vec![0u32; 14];
        for i in [0, 1, 3, 4, 13] {
            m[i] = 1;
        }
        let f = FiniteField::with_modulus(2, m).unwrap();
        let r: Vec<u32> = vec![5, 77, 1000];
        let mut p: FPoly = vec![1];
        for &x in &r {
            p = mul(&f, &p, &[x, 1]);
        }
        let got: Vec<u32> = roots(&f, &p).iter().map(|x| x.0).collect();
        let mut want: Vec<u32> = r.iter().map(|&x| f.neg(x)).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn squarefree_in_two_variables() {
        let f = FiniteField::from_order(2).unwrap();
        // x^2 - T: inseparable but squarefree
        let a: BiPoly = vec![vec![0, 1], vec![], vec![1]];
        assert!(bi_is_squarefree(&f, &a));
        // (x - T)^2 = x^2 + T^2
        let b: BiPoly = vec![vec![0, 0, 1], vec![], vec![1]];
        assert!(!bi_is_squarefree(&f, &b));
        // (x - T)(x - 1)
        let c: BiPoly = vec![vec![0, 1], vec![1, 1], vec![1]];
        assert!(bi_is_squarefree(&f, &c));
    }
}
