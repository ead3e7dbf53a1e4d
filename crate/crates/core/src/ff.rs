//! Finite fields F_q, q = p^r, with elements encoded as `u32` whose base-p
//! digits are the coordinates in the power basis of the modulus.
//!
//! Moduli are Conway polynomials, so the fields F_q ⊆ F_{q^f} embed
//! compatibly through g ↦ g^{(q^f-1)/(q-1)} on the canonical generators.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Conway polynomials C_{p,n} for p^n ≤ 64, coefficients low degree first,
/// leading 1 included. Reproduced by [`conway_by_definition`] in the tests.
const CONWAY_TABLE: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 1, &[9, 1]),
    (13, 1, &[11, 1]),
    (17, 1, &[14, 1]),
    (19, 1, &[17, 1]),
    (23, 1, &[18, 1]),
    (29, 1, &[27, 1]),
    (31, 1, &[28, 1]),
    (37, 1, &[35, 1]),
    (41, 1, &[35, 1]),
    (43, 1, &[40, 1]),
    (47, 1, &[42, 1]),
    (53, 1, &[51, 1]),
    (59, 1, &[57, 1]),
    (61, 1, &[59, 1]),
];

/// Largest field order the library will build tables for.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomial arithmetic over the prime field, only used to search
// for and validate moduli.
mod fp {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut r: Vec<u32> = prod.into_iter().map(|x| x as u32).collect();
        reduce(&mut r, m, p);
        r
    }

    /// Reduce modulo a monic polynomial.
    pub fn reduce(r: &mut Vec<u32>, m: &[u32], p: u32) {
        let d = m.len() - 1;
        trim(r);
        while r.len() > d {
            let top = r.len() - 1;
            let c = r[top];
            if c != 0 {
                for k in 0..=d {
                    let idx = top - d + k;
                    r[idx] = ((r[idx] as u64 + (p - c) as u64 * m[k] as u64) % p as u64) as u32;
                }
            }
            trim(r);
        }
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        reduce(&mut result, m, p);
        let mut b = base.to_vec();
        reduce(&mut b, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    /// Evaluate `poly` (over F_p) at `x` in F_p[X]/(m).
    pub fn eval_at(poly: &[u32], x: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut acc: Vec<u32> = Vec::new();
        for &c in poly.iter().rev() {
            acc = mulmod(&acc, x, m, p);
            if acc.is_empty() {
                acc.push(0);
            }
            acc[0] = (acc[0] + c) % p;
            trim(&mut acc);
        }
        acc
    }
}

/// The n-th Conway polynomial over F_p computed from its definition: the
/// least primitive polynomial, in the alternating-sign lexicographic order,
/// whose roots are compatible with the Conway polynomials of every proper
/// divisor degree.
pub fn conway_by_definition(p: u32, n: u32) -> Result<Vec<u32>> {
    if !is_prime(p as u64) || n == 0 {
        return Err(Error::InvalidInput(format!("bad field parameters p={p} n={n}")));
    }
    let order = (p as u64)
        .checked_pow(n)
        .filter(|&o| o <= MAX_FIELD_ORDER)
        .ok_or_else(|| Error::InvalidInput(format!("field {p}^{n} too large")))?;
    let group = order - 1;
    let factors = prime_factors(group);
    let mut sub: Vec<(u32, Vec<u32>)> = Vec::new();
    for m in 1..n {
        if n.is_multiple_of(m) {
            sub.push((m, conway_polynomial(p, m)?));
        }
    }
    let x = vec![0u32, 1];
    // alpha_{n-1}, ..., alpha_0 enumerated lexicographically.
    let total = (p as u64).pow(n);
    for idx in 0..total {
        let mut alphas = vec![0u32; n as usize];
        let mut t = idx;
        for k in (0..n as usize).rev() {
            alphas[k] = (t % p as u64) as u32;
            t /= p as u64;
        }
        // alphas[0] is alpha_{n-1}; coefficient of x^i is (-1)^{n-i} alpha_i.
        let mut poly = vec![0u32; n as usize + 1];
        poly[n as usize] = 1;
        for i in 0..n as usize {
            let a = alphas[n as usize - 1 - i];
            poly[i] = if (n as usize - i).is_multiple_of(2) { a } else { (p - a) % p };
        }
        if poly[0] == 0 {
            continue;
        }
        if fp::powmod(&x, group, &poly, p) != vec![1] {
            continue;
        }
        if factors.iter().any(|&l| fp::powmod(&x, group / l, &poly, p) == vec![1]) {
            continue;
        }
        let compatible = sub.iter().all(|(m, cm)| {
            let e = group / ((p as u64).pow(*m) - 1);
            let y = fp::powmod(&x, e, &poly, p);
            fp::eval_at(cm, &y, &poly, p).is_empty()
        });
        if compatible {
            return Ok(poly);
        }
    }
    Err(Error::InvalidInput(format!("no Conway polynomial found for {p}^{n}")))
}

/// Conway polynomial from the built-in table, falling back to the
/// definition-based search for larger fields.
pub fn conway_polynomial(p: u32, n: u32) -> Result<Vec<u32>> {
    if let Some((_, _, c)) = CONWAY_TABLE.iter().find(|(pp, nn, _)| *pp == p && *nn == n) {
        return Ok(c.to_vec());
    }
    conway_by_definition(p, n)
}

/// The finite field F_p[X]/(modulus) with log/exp tables.
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Vec<u32>,
    neg: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}
impl Eq for FiniteField {}

impl FiniteField {
    /// F_{p^r} with its Conway modulus.
    pub fn new(p: u32, r: u32) -> Result<Arc<FiniteField>> {
        let m = conway_polynomial(p, r)?;
        Self::with_modulus(p, m)
    }

    /// F_q from a prime power q.
    pub fn from_order(q: u32) -> Result<Arc<FiniteField>> {
        let (p, r) = prime_power(q as u64).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Self::new(p as u32, r)
    }

    /// F_p[X]/(modulus) for a caller-supplied monic modulus. The modulus
    /// must be primitive (its root generates the multiplicative group).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Arc<FiniteField>> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("modulus must be monic over F_p".into()));
        }
        let r = (modulus.len() - 1) as u32;
        let q64 = (p as u64).pow(r);
        if q64 > MAX_FIELD_ORDER {
            return Err(Error::InvalidInput(format!("field of order {q64} too large")));
        }
        let q = q64 as u32;
        // Generator: the class of X when r > 1, minus the constant term when r = 1.
        let gen_poly: Vec<u32> = if r == 1 { vec![(p - modulus[0]) % p] } else { vec![0, 1] };
        let encode = |v: &[u32]| -> u32 {
            let mut acc = 0u32;
            for &c in v.iter().rev() {
                acc = acc * p + c;
            }
            acc
        };
        let mut exp = vec![0u32; 2 * (q as usize - 1).max(1)];
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![1u32];
        for k in 0..(q - 1) as usize {
            let mut padded = cur.clone();
            padded.resize(r as usize, 0);
            let code = encode(&padded);
            if log[code as usize] != u32::MAX {
                return Err(Error::InvalidInput("modulus is not primitive".into()));
            }
            log[code as usize] = k as u32;
            exp[k] = code;
            cur = fp::mulmod(&cur, &gen_poly, &modulus, p);
            if cur.is_empty() {
                return Err(Error::InvalidInput("modulus is not irreducible".into()));
            }
        }
        for k in 0..(q - 1) as usize {
            exp[k + (q - 1) as usize] = exp[k];
        }
        let digit_add = |a: u32, b: u32, sign: u32| -> u32 {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut scale = 1u32;
            for _ in 0..r {
                let d = (a % p + sign * (b % p)) % p;
                out += d * scale;
                scale *= p;
                a /= p;
                b /= p;
            }
            out
        };
        let mut neg = vec![0u32; q as usize];
        for (a, n) in neg.iter_mut().enumerate() {
            *n = digit_add(0, a as u32, p - 1);
        }
        let add_table = if q <= 256 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b, 1);
                }
            }
            t
        } else {
            Vec::new()
        };
        Ok(Arc::new(FiniteField {
            p,
            r,
            q,
            generator: exp[if q > 2 { 1 } else { 0 }],
            modulus,
            exp,
            log,
            add_table,
            neg,
        }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// Canonical multiplicative generator.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if !self.add_table.is_empty() {
            return self.add_table[(a * self.q + b) as usize];
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut scale = 1u32;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * scale;
            scale *= p;
            a /= p;
            b /= p;
        }
        out
    }
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }
    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % (self.q as u64 - 1)) % (self.q as u64 - 1);
        self.exp[l as usize]
    }
    /// Discrete logarithm to the canonical generator.
    pub fn log(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }
    /// Image of an integer under Z → F_p ⊆ F_q.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    /// Coordinates over F_p.
    pub fn coords(&self, mut a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.r as usize);
        for _ in 0..self.r {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }
    pub fn from_coords(&self, c: &[u32]) -> u32 {
        let mut acc = 0;
        for &d in c.iter().rev() {
            acc = acc * self.p + d % self.p;
        }
        acc
    }
    /// Frobenius x ↦ x^p.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

/// Split q = p^r.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut r = 0;
    let mut t = q;
    while t.is_multiple_of(p) {
        t /= p;
        r += 1;
    }
    if t == 1 {
        Some((p, r))
    } else {
        None
    }
}

/// F_q ⊆ F_Q with Q = q^f: the embedding table and the decomposition of
/// every element of F_Q in the F_q-basis 1, g, ..., g^{f-1} of powers of
/// the canonical generator g of F_Q.
#[derive(Debug, Clone)]
pub struct Tower {
    pub base: Arc<FiniteField>,
    pub top: Arc<FiniteField>,
    pub degree: u32,
    embed: Vec<u32>,
    decomp: Vec<u32>,
}

impl Tower {
    pub fn new(base: Arc<FiniteField>, degree: u32) -> Result<Tower> {
        let top = if degree == 1 { base.clone() } else { FiniteField::new(base.p(), base.r() * degree)? };
        Self::between(base, top)
    }

    pub fn between(base: Arc<FiniteField>, top: Arc<FiniteField>) -> Result<Tower> {
        if base.p() != top.p() || !top.r().is_multiple_of(base.r()) {
            return Err(Error::InvalidInput("not a subfield".into()));
        }
        let degree = top.r() / base.r();
        let (q, qq) = (base.q() as u64, top.q() as u64);
        let embed: Vec<u32> = if Arc::ptr_eq(&base, &top) || *base == *top {
            (0..base.q()).collect()
        } else {
            // image of the base generator: g^{(Q-1)/(q-1)} when compatible,
            // otherwise any root of the base modulus.
            let cand = top.exp((qq - 1) / (q - 1));
            let root_ok = |x: u32| -> bool {
                let mut acc = 0u32;
                for &c in base.modulus().iter().rev() {
                    acc = top.add(top.mul(acc, x), c);
                }
                acc == 0
            };
            let alpha_img = if base.r() == 1 {
                // prime subfield: identity on digits
                None
            } else if root_ok(cand) {
                Some(cand)
            } else {
                Some((1..top.q()).find(|&x| root_ok(x)).ok_or_else(|| Error::InvalidInput("no embedding".into()))?)
            };
            (0..base.q())
                .map(|a| match alpha_img {
                    None => a,
                    Some(ai) => {
                        let c = base.coords(a);
                        let mut acc = 0u32;
                        for &d in c.iter().rev() {
                            acc = top.add(top.mul(acc, ai), d);
                        }
                        acc
                    }
                })
                .collect()
        };
        // Decomposition table by enumerating all F_q-combinations of g^j.
        let f = degree as usize;
        let mut decomp = vec![0u32; top.q() as usize * f];
        let g = top.generator();
        let gp: Vec<u32> = (0..f).map(|j| top.pow(g, j as u64)).collect();
        let mut coeffs = vec![0u32; f];
        let total = (base.q() as u64).pow(degree);
        let mut seen = vec![false; top.q() as usize];
        for idx in 0..total {
            let mut t = idx;
            for c in coeffs.iter_mut() {
                *c = (t % q) as u32;
                t /= q;
            }
            let mut v = 0u32;
            for j in 0..f {
                v = top.add(v, top.mul(embed[coeffs[j] as usize], gp[j]));
            }
            if seen[v as usize] {
                return Err(Error::InvalidInput("powers of the generator are dependent".into()));
            }
            seen[v as usize] = true;
            decomp[v as usize * f..(v as usize + 1) * f].copy_from_slice(&coeffs);
        }
        Ok(Tower { base, top, degree, embed, decomp })
    }

    #[inline]
    pub fn embed(&self, a: u32) -> u32 {
        self.embed[a as usize]
    }
    /// Coordinates of `a` ∈ F_Q in the basis g^j over F_q.
    #[inline]
    pub fn decompose(&self, a: u32) -> &[u32] {
        let f = self.degree as usize;
        &self.decomp[a as usize * f..(a as usize + 1) * f]
    }
    pub fn compose(&self, c: &[u32]) -> u32 {
        let g = self.top.generator();
        let mut v = 0;
        for (j, &cj) in c.iter().enumerate() {
            v = self.top.add(v, self.top.mul(self.embed(cj), self.top.pow(g, j as u64)));
        }
        v
    }
    /// Whether `a` ∈ F_Q lies in the image of F_q, and its preimage.
    pub fn restrict(&self, a: u32) -> Option<u32> {
        let d = self.decompose(a);
        if d[1..].iter().all(|&c| c == 0) {
            Some(d[0])
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_definition() {
        for &(p, n, c) in CONWAY_TABLE {
            assert_eq!(conway_by_definition(p, n).unwrap(), c.to_vec(), "p={p} n={n}");
        }
    }

    #[test]
    fn known_conway_values() {
        // Published values (Lübeck's tables).
        assert_eq!(conway_polynomial(2, 4).unwrap(), vec![1, 1, 0, 0, 1]);
        assert_eq!(conway_polynomial(3, 2).unwrap(), vec![2, 2, 1]);
        assert_eq!(conway_polynomial(3, 4).unwrap(), vec![2, 0, 0, 2, 1]);
        assert_eq!(conway_polynomial(5, 2).unwrap(), vec![2, 4, 1]);
        assert_eq!(conway_polynomial(2, 6).unwrap(), vec![1, 1, 0, 1, 1, 0, 1]);
        assert_eq!(conway_polynomial(7, 1).unwrap(), vec![4, 1]);
    }

    #[test]
    fn field_axioms_small() {
        for q in [2u32, 3, 4, 5, 8, 9, 25, 27] {
            let f = FiniteField::from_order(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    for c in [0, 1, f.generator()] {
                        let l = f.mul(a, f.add(b, c));
                        let r = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn tower_embedding_is_a_ring_map() {
        for (q, f) in [(2u32, 2u32), (2, 3), (3, 2), (4, 2), (3, 4), (5, 2)] {
            let base = FiniteField::from_order(q).unwrap();
            let t = Tower::new(base.clone(), f).unwrap();
            for a in base.elements() {
                for b in base.elements() {
                    assert_eq!(t.embed(base.mul(a, b)), t.top.mul(t.embed(a), t.embed(b)));
                    assert_eq!(t.embed(base.add(a, b)), t.top.add(t.embed(a), t.embed(b)));
                }
            }
            for x in t.top.elements() {
                assert_eq!(t.compose(t.decompose(x)), x);
            }
        }
    }

    #[test]
    fn large_field_by_search() {
        let f = FiniteField::new(3, 5).unwrap();
        assert_eq!(f.q(), 243);
        assert_eq!(f.pow(f.generator(), 242), 1);
    }
}
