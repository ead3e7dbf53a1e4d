//! Eisenstein polynomials at finite precision, their isomorphism classes
//! and the mass sums Σ q^{−σ(E)} over subfields, Σ (1/w) q^{−σ} over
//! classes, and Σ (1/w) q_E^{−σ} over all extensions of degree n.
//!
//! Catalog entries are polynomials whose coefficients are taken modulo
//! 𝔭^M. They are enumerated as a tree: a node at level K fixes every
//! coefficient modulo 𝔭^K and stands for q^{n(M−K)} entries. A node is
//! resolved once nK > 2δ for its representative: every member then has a
//! root in the representative's field, so the whole node is one class.

use crate::error::{Error, Result};
use crate::ext::LocalFieldExt;
use crate::factor::disc_valuation;
use crate::ff::FiniteField;
use crate::field::FieldData;
use crate::poly::SeriesPoly;
use crate::series::Series;
use num_rational::Ratio;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Rational = Ratio<i128>;

fn poly_from_digits(f: &Arc<FiniteField>, digits: &[Vec<u32>]) -> SeriesPoly {
    let mut coeffs: Vec<Series> = digits
        .iter()
        .map(|d| {
            // d[j] is the digit of T^{j+1}
            Series::from_coeffs(f, 1, d.clone(), None)
        })
        .collect();
    coeffs.push(Series::one(f));
    SeriesPoly::new(f, coeffs)
}

/// Number of catalog entries for degree n at precision M.
pub fn catalog_size(q: u64, n: usize, m: i64) -> u128 {
    let q = q as u128;
    q.pow(((m - 1) * (n as i64 - 1)) as u32) * (q - 1) * q.pow((m - 2) as u32)
}

/// All Eisenstein polynomials of degree n with coefficients modulo 𝔭^M.
pub fn enumerate_eisenstein(f: &Arc<FiniteField>, n: usize, m: i64, budget: u128) -> Result<Vec<SeriesPoly>> {
    if n == 0 || m < 2 {
        return Err(Error::InvalidInput("need n ≥ 1 and M ≥ 2".into()));
    }
    let q = f.q() as u64;
    let total = catalog_size(q, n, m);
    if total > budget {
        return Err(Error::BudgetExceeded(format!("{total} Eisenstein polynomials exceed the budget {budget}")));
    }
    let len = (m - 1) as usize;
    let mut out = Vec::with_capacity(total as usize);
    let slots = n * len;
    let mut digits = vec![0u32; slots];
    'outer: loop {
        // a_0 must have a nonzero T^1 digit
        if digits[0] != 0 {
            let d: Vec<Vec<u32>> = (0..n).map(|i| digits[i * len..(i + 1) * len].to_vec()).collect();
            out.push(poly_from_digits(f, &d));
        }
        for slot in digits.iter_mut() {
            *slot += 1;
            if (*slot as u64) < q {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Node {
    level: i64,
    digits: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub representative: String,
    pub w: usize,
    pub delta: i64,
    pub sigma: i64,
    pub member_count: u128,
    pub nodes: usize,
    /// (1/w) q^{−σ}
    pub mass_term: String,
    /// member_count / catalog size
    pub measure: String,
    #[serde(skip)]
    pub mass_value: Rational,
    #[serde(skip)]
    pub measure_value: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Catalog {
    pub q: u64,
    pub n: usize,
    pub precision: i64,
    pub catalog_size: u128,
    pub classes: Vec<ClassReport>,
    /// entries whose polynomial is inseparable modulo 𝔭^M (mass 0)
    pub inseparable_members: u128,
    /// entries in nodes that never resolved before precision M
    pub precision_limited_members: u128,
    pub precision_limited_nodes: usize,
}

struct ClassBuild {
    ext: LocalFieldExt,
    report: ClassReport,
}

/// Enumerate, resolve and cluster the Eisenstein polynomials of degree n
/// over F at precision M. `node_budget` bounds the tree size.
pub fn cluster_classes(f: &Arc<FiniteField>, n: usize, m: i64, node_budget: usize) -> Result<Catalog> {
    if n == 0 || m < 2 {
        return Err(Error::InvalidInput("need n ≥ 1 and M ≥ 2".into()));
    }
    let q = f.q() as u64;
    let nn = n as i64;
    let total = catalog_size(q, n, m);
    let qq = q as u128;
    let ext_prec = 2 * nn * (m + 4);
    let mut classes: BTreeMap<i64, Vec<ClassBuild>> = BTreeMap::new();
    let mut inseparable = 0u128;
    let mut limited = 0u128;
    let mut limited_nodes = 0usize;
    let mut visited = 0usize;
    // level 2: one digit per coefficient, the T^1 digit of a_0 nonzero
    let mut stack: Vec<Node> = Vec::new();
    for combo in 0..qq.pow(n as u32) {
        let mut t = combo;
        let digits: Vec<Vec<u32>> = (0..n)
            .map(|_| {
                let d = (t % qq) as u32;
                t /= qq;
                vec![d]
            })
            .collect();
        if digits[0][0] != 0 {
            stack.push(Node { level: 2, digits });
        }
    }
    while let Some(node) = stack.pop() {
        visited += 1;
        if visited > node_budget {
            return Err(Error::BudgetExceeded(format!("more than {node_budget} enumeration nodes")));
        }
        let phi = poly_from_digits(f, &node.digits);
        let weight = qq.pow((nn * (m - node.level)) as u32);
        let separable = !phi.derivative_vanishes();
        let delta = if separable { Some(disc_valuation(&phi)?) } else { None };
        let resolved = matches!(delta, Some(d) if nn * node.level > 2 * d);
        if !resolved {
            if node.level >= m {
                if separable {
                    limited += weight;
                    limited_nodes += 1;
                } else {
                    inseparable += weight;
                }
                continue;
            }
            for child in 0..qq.pow(n as u32) {
                let mut c = node.clone();
                c.level += 1;
                let mut t = child;
                for dg in c.digits.iter_mut() {
                    dg.push((t % qq) as u32);
                    t /= qq;
                }
                stack.push(c);
            }
            continue;
        }
        let delta = delta.unwrap();
        let bucket = classes.entry(delta).or_default();
        let mut placed = false;
        for cb in bucket.iter_mut() {
            if !cb.ext.roots_of(&phi)?.is_empty() {
                cb.report.member_count += weight;
                cb.report.nodes += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            let ext = LocalFieldExt::from_eisenstein(&phi, ext_prec)?;
            let index = FieldData::new(&phi, 2 * m + 2 * delta + 8)?.index();
            if index != 0 {
                return Err(Error::RelationViolated(format!("Eisenstein representative {phi} has conductor {index}")));
            }
            let d = ext.different_exponent()?.unwrap_or(-1);
            if d != delta {
                return Err(Error::RelationViolated(format!(
                    "discriminant valuation {delta} differs from different exponent {d} for {phi}"
                )));
            }
            let w = ext.automorphism_count()?;
            let sigma = delta - (nn - 1);
            let mass = Rational::new(1, (w as i128) * (q as i128).pow(sigma as u32));
            bucket.push(ClassBuild {
                ext,
                report: ClassReport {
                    representative: phi.to_text(),
                    w,
                    delta,
                    sigma,
                    member_count: weight,
                    nodes: 1,
                    mass_term: mass.to_string(),
                    measure: String::new(),
                    mass_value: mass,
                    measure_value: Rational::new(0, 1),
                },
            });
        }
    }
    let mut out = Vec::new();
    for (_, bucket) in classes {
        for mut cb in bucket {
            let meas = Rational::new(cb.report.member_count as i128, total as i128);
            cb.report.measure = meas.to_string();
            cb.report.measure_value = meas;
            out.push(cb.report);
        }
    }
    Ok(Catalog {
        q,
        n,
        precision: m,
        catalog_size: total,
        classes: out,
        inseparable_members: inseparable,
        precision_limited_members: limited,
        precision_limited_nodes: limited_nodes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MassSums {
    pub q: u64,
    pub n: usize,
    pub precision: i64,
    pub d_max: i64,
    /// Σ q^{−σ} over subfields of degree n with δ ≤ D_max
    pub sum_totally_ramified: String,
    /// Σ (1/w) q^{−σ} over classes with δ ≤ D_max
    pub weighted_sum: String,
    /// e ↦ Σ (1/w) q_E^{−σ} over classes with ramification index e
    pub per_e_sums: BTreeMap<usize, String>,
    pub grand_sum: String,
    /// Σ_{e | n} e/n
    pub grand_target: String,
    pub catalog: Catalog,
    /// whether every class measure equals its mass term
    pub measures_match: bool,
    #[serde(skip)]
    pub values: MassValues,
}

#[derive(Clone, Debug, Default)]
pub struct MassValues {
    pub sum_totally_ramified: Rational,
    pub weighted_sum: Rational,
    pub per_e: BTreeMap<usize, Rational>,
    pub grand_sum: Rational,
    pub grand_target: Rational,
}

fn sums_up_to(cat: &Catalog, d_max: i64) -> (Rational, Rational) {
    let n = cat.n as i128;
    let mut s = Rational::new(0, 1);
    let mut sw = Rational::new(0, 1);
    for c in cat.classes.iter().filter(|c| c.delta <= d_max) {
        sw += c.mass_value;
        s += c.mass_value * n;
    }
    (s, sw)
}

/// Σ q^{−σ} over subfields with δ ≤ d for each d in `ds`.
pub fn partial_sums(cat: &Catalog, ds: &[i64]) -> Vec<Rational> {
    ds.iter().map(|&d| sums_up_to(cat, d).0).collect()
}

pub fn mass_sums(q: u32, n: usize, m: i64, d_max: Option<i64>, node_budget: usize) -> Result<MassSums> {
    let f = FiniteField::from_order(q)?;
    let d_max = d_max.unwrap_or(m - 2);
    let cat = cluster_classes(&f, n, m, node_budget)?;
    let (s, sw) = sums_up_to(&cat, d_max);
    let measures_match = cat.classes.iter().all(|c| c.measure_value == c.mass_value);
    let mut per_e = BTreeMap::new();
    for e in (1..=n).filter(|e| n.is_multiple_of(*e)) {
        let fdeg = n / e;
        let val = if fdeg == 1 {
            sw
        } else {
            let sub = FiniteField::new(f.p(), f.r() * fdeg as u32)?;
            let c = cluster_classes(&sub, e, m, node_budget)?;
            let (_, w) = sums_up_to(&c, d_max);
            w / fdeg as i128
        };
        per_e.insert(e, val);
    }
    let grand: Rational = per_e.values().copied().sum();
    let target: Rational = (1..=n).filter(|e| n.is_multiple_of(*e)).map(|e| Rational::new(e as i128, n as i128)).sum();
    Ok(MassSums {
        q: q as u64,
        n,
        precision: m,
        d_max,
        sum_totally_ramified: s.to_string(),
        weighted_sum: sw.to_string(),
        per_e_sums: per_e.iter().map(|(k, v)| (*k, v.to_string())).collect(),
        grand_sum: grand.to_string(),
        grand_target: target.to_string(),
        catalog: cat,
        measures_match,
        values: MassValues { sum_totally_ramified: s, weighted_sum: sw, per_e, grand_sum: grand, grand_target: target },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_counts() {
        let f2 = FiniteField::from_order(2).unwrap();
        assert_eq!(enumerate_eisenstein(&f2, 2, 4, 1000).unwrap().len(), 32);
        let f3 = FiniteField::from_order(3).unwrap();
        // a_1 ranges over 𝔭/𝔭^3 (9 values), a_0 over T·units mod T^3 (6 values)
        assert_eq!(enumerate_eisenstein(&f3, 2, 3, 1000).unwrap().len(), 54);
        assert_eq!(enumerate_eisenstein(&f3, 1, 2, 1000).unwrap().len(), 2);
        assert!(enumerate_eisenstein(&f3, 3, 8, 1000).is_err());
    }

    #[test]
    fn tame_quadratic_classes() {
        let f3 = FiniteField::from_order(3).unwrap();
        let c = cluster_classes(&f3, 2, 4, 10_000).unwrap();
        assert_eq!(c.classes.len(), 2);
        assert!(c.classes.iter().all(|k| k.w == 2 && k.sigma == 0));
        let s = mass_sums(3, 2, 4, None, 10_000).unwrap();
        assert_eq!(s.values.sum_totally_ramified, Rational::from_integer(2));
        assert_eq!(s.values.grand_sum, s.values.grand_target);
        assert!(s.measures_match);
    }

    #[test]
    fn degree_one() {
        let f = FiniteField::from_order(5).unwrap();
        let c = cluster_classes(&f, 1, 3, 100).unwrap();
        assert_eq!(c.classes.len(), 1);
        assert_eq!((c.classes[0].w, c.classes[0].sigma), (1, 0));
    }
}
