//! Decomposition of the degree-`k` line bundles over the quantum projective
//! space into elementary projections, the `ν` multiplicities, and checks of
//! the partial isometries realizing the module isomorphisms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeff::Gaussian;
use crate::cone_sets::{BoxRegion, ClopenSet};
use crate::error::{Error, Result};
use crate::gadgets::{build, check_chi_b, check_chi_b_prime, p_cofinite, p_finite, GadgetSpec};
use crate::groupoid::AlgebraElement;
use crate::ktheory::{class_of_elementary, rank_of_class, ElementaryProj, K0Class};
use crate::verify::{Bounds, CheckResult};

/// `ν(m, l)` for `m ≤ m_max`, `1 ≤ l ≤ l_max`, filled by the defining recursion.
#[derive(Clone, Debug)]
pub struct NuTable {
    rows: Vec<Vec<BigUint>>,
}

impl NuTable {
    pub fn new(m_max: u64, l_max: u64) -> Self {
        let (m_max, l_max) = (m_max as usize, l_max.max(1) as usize);
        // rows[l-1][m]
        let mut rows = vec![vec![BigUint::one(); m_max + 1]];
        for _ in 2..=l_max {
            let prev = rows.last().expect("nonempty");
            let mut acc = BigUint::zero();
            let row = prev
                .iter()
                .map(|v| {
                    acc += v;
                    acc.clone()
                })
                .collect();
            rows.push(row);
        }
        NuTable { rows }
    }

    pub fn get(&self, m: u64, l: u64) -> Option<&BigUint> {
        if l == 0 {
            return None;
        }
        self.rows.get(l as usize - 1)?.get(m as usize)
    }

    /// Every entry against `C(m+l-1, m)`; returns the first disagreement.
    pub fn first_mismatch(&self) -> Option<(u64, u64)> {
        for (li, row) in self.rows.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                let (m, l) = (m as u64, li as u64 + 1);
                if *v != nu_closed(m, l) {
                    return Some((m, l));
                }
            }
        }
        None
    }
}

fn nu_closed(m: u64, l: u64) -> BigUint {
    binomial(BigUint::from(m + l - 1), BigUint::from(m))
}

/// `ν(m, l)`, computed by recursion and cross-checked against `C(m+l-1, m)`.
pub fn nu(m: u64, l: u64) -> Result<BigUint> {
    if l == 0 {
        return Err(Error::InvalidParameter("ν(m, l) needs l ≥ 1".into()));
    }
    let table = NuTable::new(m, l);
    let rec = table.get(m, l).expect("in range").clone();
    if rec != nu_closed(m, l) {
        return Err(Error::CertificationFailed(format!(
            "ν({m},{l}) recursion vs closed form"
        )));
    }
    Ok(rec)
}

fn nu_u64(m: u64, l: u64) -> Result<u64> {
    nu(m, l)?
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("ν({m},{l}) exceeds 64 bits")))
}

pub type Multiset = BTreeMap<ElementaryProj, u64>;

fn merge(into: &mut Multiset, from: &Multiset) {
    for (t, c) in from {
        *into.entry(*t).or_insert(0) += c;
    }
}

fn decompose_a_memo(n: usize, r: u64, l: usize, memo: &mut HashMap<(u64, usize), Multiset>) -> Multiset {
    if let Some(m) = memo.get(&(r, l)) {
        return m.clone();
    }
    let mut out = Multiset::new();
    if l > 1 {
        for j in 0..r {
            let sub = decompose_a_memo(n, r - j, l - 1, memo);
            merge(&mut out, &sub);
        }
    }
    *out.entry(ElementaryProj::identity_prefix(n, l).expect("1 ≤ l < n"))
        .or_insert(0) += 1;
    memo.insert((r, l), out.clone());
    out
}

/// Full expansion of `A_{r,l}` into tokens `I^{⊗t} ⊗ P₁^{⊗ n-t}`.
pub fn decompose_a(n: usize, r: u64, l: usize) -> Result<Multiset> {
    if n < 2 || r == 0 || l == 0 || l >= n {
        return Err(Error::InvalidParameter(format!(
            "A_{{r,l}} needs n ≥ 2, r ≥ 1, 1 ≤ l ≤ n-1 (got n={n}, r={r}, l={l})"
        )));
    }
    Ok(decompose_a_memo(n, r, l, &mut HashMap::new()))
}

/// Which computation produced a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `k ≥ 0`: a single cofinite token.
    Direct,
    /// `n > 2, k < 0`: closed form, confirmed against the recursion.
    ClosedForm,
    /// `n = 2, k < 0`: recursion only.
    Recursion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LbDecomposition {
    pub n: usize,
    pub k: i64,
    pub summands: Multiset,
    pub route: Route,
}

impl LbDecomposition {
    pub fn class(&self) -> K0Class {
        self.summands.iter().fold(K0Class::zero(self.n), |acc, (t, c)| {
            acc.add(&class_of_elementary(t).scale(*c as i64))
        })
    }

    /// Realizes every token as a diagonal element and checks it is a projection.
    pub fn realize(&self) -> Result<Vec<(ElementaryProj, AlgebraElement)>> {
        self.summands
            .keys()
            .map(|t| {
                let e = realize_token(t);
                if !e.is_projection() {
                    return Err(Error::CertificationFailed(format!("token {t}")));
                }
                Ok((*t, e))
            })
            .collect()
    }
}

impl fmt::Display for LbDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.summands.iter().map(|(t, c)| format!("{c} × {t}")).collect();
        write!(f, "L_{} (n={}): {}", self.k, self.n, parts.join(" ⊕ "))
    }
}

#[derive(Serialize, Deserialize)]
struct Summand {
    token: String,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
struct LbRepr {
    n: usize,
    k: i64,
    summands: Vec<Summand>,
    k0: Vec<i64>,
    rank: i64,
}

impl Serialize for LbDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let class = self.class();
        LbRepr {
            n: self.n,
            k: self.k,
            summands: self
                .summands
                .iter()
                .map(|(t, c)| Summand {
                    token: t.to_string(),
                    mult: *c,
                })
                .collect(),
            rank: rank_of_class(&class),
            k0: class.coords,
        }
        .serialize(s)
    }
}

/// The diagonal element `I^{⊗ slot-1} ⊗ P_k ⊗ P₁^{⊗ n-slot}`.
pub fn realize_token(t: &ElementaryProj) -> AlgebraElement {
    let middle = match t.k {
        0 => AlgebraElement::identity(1),
        k if k > 0 => p_finite(k as u64),
        k => p_cofinite(k.unsigned_abs()),
    };
    let mut rest = AlgebraElement::identity(0);
    for _ in t.slot..t.n {
        rest = rest.tensor(&p_finite(1));
    }
    AlgebraElement::identity(t.slot - 1).tensor(&middle).tensor(&rest)
}

fn decompose_l_recursion(n: usize, k: i64) -> Multiset {
    let r = k.unsigned_abs();
    let mut memo = HashMap::new();
    let mut out = Multiset::new();
    for m in 0..r {
        merge(&mut out, &decompose_a_memo(n, r - m, n - 1, &mut memo));
    }
    *out.entry(ElementaryProj::identity_prefix(n, n).expect("n ≥ 1"))
        .or_insert(0) += 1;
    out
}

fn decompose_l_closed(n: usize, k: i64) -> Result<Multiset> {
    let r = k.unsigned_abs();
    let mut out = Multiset::new();
    let mut first = 0u64;
    for m in 0..r {
        first += (r - m) * nu_u64(m, n as u64 - 2)?;
    }
    out.insert(ElementaryProj::identity_prefix(n, 1)?, first);
    for l in 1..n {
        let t = ElementaryProj::identity_prefix(n, n - l + 1)?;
        *out.entry(t).or_insert(0) += nu_u64(r - 1, l as u64)?;
    }
    Ok(out)
}

/// Multisets from the closed form and from the recursion, for `n > 2`, `k < 0`.
pub fn decompose_l_both(n: usize, k: i64) -> Result<(Multiset, Multiset)> {
    if n <= 2 || k >= 0 {
        return Err(Error::InvalidParameter("closed form needs n > 2 and k < 0".into()));
    }
    Ok((decompose_l_closed(n, k)?, decompose_l_recursion(n, k)))
}

pub fn decompose_l(n: usize, k: i64) -> Result<LbDecomposition> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("line bundles need n ≥ 2, got {n}")));
    }
    if k >= 0 {
        let mut summands = Multiset::new();
        summands.insert(ElementaryProj::hat_cofinite(n, k as u64)?, 1);
        return Ok(LbDecomposition {
            n,
            k,
            summands,
            route: Route::Direct,
        });
    }
    if n == 2 {
        return Ok(LbDecomposition {
            n,
            k,
            summands: decompose_l_recursion(n, k),
            route: Route::Recursion,
        });
    }
    let (closed, rec) = decompose_l_both(n, k)?;
    if closed != rec {
        return Err(Error::CertificationFailed(format!(
            "L_{k} closed form vs recursion at n={n}"
        )));
    }
    Ok(LbDecomposition {
        n,
        k,
        summands: closed,
        route: Route::ClosedForm,
    })
}

pub fn class_of_l(n: usize, k: i64) -> Result<K0Class> {
    Ok(decompose_l(n, k)?.class())
}

/// A random element of total degree `d` with small supports.
pub fn sample_homogeneous(rng: &mut impl Rng, n: usize, d: i64, terms: usize) -> AlgebraElement {
    let mut out = AlgebraElement::zero(n);
    for _ in 0..terms {
        let mut m: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let head: i64 = m[..n - 1].iter().sum();
        m[n - 1] = d - head;
        let sets: Vec<ClopenSet> = (0..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => ClopenSet::full(),
                1 => ClopenSet::tail_from(rng.gen_range(0..4)),
                2 => ClopenSet::below(rng.gen_range(1..4)),
                _ => ClopenSet::new([rng.gen_range(0..3)], Some(rng.gen_range(3..6))),
            })
            .collect();
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-2..=2);
        }
        let t = AlgebraElement::indicator(m, BoxRegion::from_box(sets)).expect("dimension n");
        out = out.add(&t.scale(Gaussian::from_int(c))).expect("same n");
    }
    out
}

fn action_check(group: &str, name: String, lhs: Result<AlgebraElement>, rhs: Result<AlgebraElement>) -> CheckResult {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => CheckResult::from_bool(group, name, a.quotient_equal(&b).unwrap_or(false), || {
            format!("lhs = {a}\nrhs = {b}")
        }),
        (Err(e), _) | (_, Err(e)) => CheckResult::fail(group, name, e.to_string()),
    }
}

/// Partial-isometry identities and their right actions on sampled
/// homogeneous elements.
pub fn verify_line_bundle_isometries(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let mut out = check_chi_b(n, bounds);
    out.extend(check_chi_b_prime(n, bounds));
    out.extend(module_action_checks(n, bounds));
    out
}

/// Right convolution by `χ_{B_k}` and `χ_{B'_{-r}}` on sampled homogeneous elements.
pub fn module_action_checks(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let group = "module action";
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed.wrapping_mul(1000).wrapping_add(n as u64));
    let one = AlgebraElement::identity(n);
    for k in -bounds.k_max..=bounds.k_max {
        let Ok(chi) = build(&GadgetSpec::ChiB { n, k }).map(|m| m.get(0, 0).clone()) else {
            out.push(CheckResult::fail(
                group,
                format!("n={n} k={k}: build χ"),
                "build failed".into(),
            ));
            continue;
        };
        let star = chi.adjoint();
        let cof = AlgebraElement::identity(n - 1).tensor(&p_cofinite(k.unsigned_abs()));
        let (after_chi, after_star) = if k >= 0 { (cof, one.clone()) } else { (one.clone(), cof) };
        for s in 0..bounds.samples {
            let f = sample_homogeneous(&mut rng, n, 0, 3);
            let g = sample_homogeneous(&mut rng, n, k, 3);
            let fx = f.convolve(&chi);
            out.push(CheckResult::from_bool(
                group,
                format!("n={n} k={k} #{s}: f·χ has degree k"),
                fx.as_ref().is_ok_and(|e| e.is_zero() || e.degree() == Some(k)),
                || "wrong degree".into(),
            ));
            out.push(action_check(
                group,
                format!("n={n} k={k} #{s}: (f·χ)·χ* = f·χχ*"),
                fx.and_then(|e| e.convolve(&star)),
                f.convolve(&after_chi),
            ));
            let gs = g.convolve(&star);
            out.push(CheckResult::from_bool(
                group,
                format!("n={n} k={k} #{s}: g·χ* has degree 0"),
                gs.as_ref().is_ok_and(|e| e.is_zero() || e.degree() == Some(0)),
                || "wrong degree".into(),
            ));
            out.push(action_check(
                group,
                format!("n={n} k={k} #{s}: (g·χ*)·χ = g·χ*χ"),
                gs.and_then(|e| e.convolve(&chi)),
                g.convolve(&after_star),
            ));
        }
    }
    if n >= 2 {
        for r in 1..=bounds.r_max {
            let Ok(chi) = build(&GadgetSpec::ChiBprime { n, r }).map(|m| m.get(0, 0).clone()) else {
                out.push(CheckResult::fail(
                    group,
                    format!("n={n} r={r}: build χ'"),
                    "build failed".into(),
                ));
                continue;
            };
            let proj = AlgebraElement::identity(n - 2)
                .tensor(&p_cofinite(r))
                .tensor(&p_finite(1));
            for s in 0..bounds.samples {
                let g = sample_homogeneous(&mut rng, n, -(r as i64), 3);
                out.push(action_check(
                    group,
                    format!("n={n} r={r} #{s}: (g·χ'*)·χ' = g·(I⊗P_-r⊗P1)"),
                    g.convolve(&chi.adjoint()).and_then(|e| e.convolve(&chi)),
                    g.convolve(&proj),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(n: usize, t: usize) -> ElementaryProj {
        ElementaryProj::identity_prefix(n, t).unwrap()
    }

    #[test]
    fn nu_values() {
        for m in 0..10 {
            assert_eq!(nu(m, 1).unwrap(), BigUint::one());
        }
        assert_eq!(nu(2, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(nu(2, 3).unwrap(), BigUint::from(6u32));
        assert!(nu(2, 0).is_err());
        assert_eq!(NuTable::new(25, 25).first_mismatch(), None);
    }

    #[test]
    fn a_recursion() {
        for r in 1..5 {
            assert_eq!(decompose_a(3, r, 1).unwrap(), Multiset::from([(tok(3, 1), 1)]));
        }
        assert_eq!(
            decompose_a(3, 2, 2).unwrap(),
            Multiset::from([(tok(3, 1), 2), (tok(3, 2), 1)])
        );
        assert_eq!(
            decompose_a(4, 1, 3).unwrap(),
            Multiset::from([(tok(4, 1), 1), (tok(4, 2), 1), (tok(4, 3), 1)])
        );
        assert!(decompose_a(3, 1, 3).is_err());
    }

    #[test]
    fn line_bundle_examples() {
        let d = decompose_l(3, 2).unwrap();
        assert_eq!(
            d.summands,
            Multiset::from([(ElementaryProj::hat_cofinite(3, 2).unwrap(), 1)])
        );
        let d = decompose_l(3, -1).unwrap();
        assert_eq!(
            d.summands,
            Multiset::from([(tok(3, 1), 1), (tok(3, 2), 1), (tok(3, 3), 1)])
        );
        assert_eq!(d.class(), K0Class::new(vec![1, 1, 1]));
        let d = decompose_l(4, -2).unwrap();
        assert_eq!(
            d.summands,
            Multiset::from([(tok(4, 1), 4), (tok(4, 2), 3), (tok(4, 3), 2), (tok(4, 4), 1)])
        );
        let d = decompose_l(2, -3).unwrap();
        assert_eq!(d.route, Route::Recursion);
        assert_eq!(d.summands, Multiset::from([(tok(2, 1), 3), (tok(2, 2), 1)]));
        assert!(decompose_l(1, 1).is_err());
    }

    #[test]
    fn line_bundle_json() {
        let j = serde_json::to_string(&decompose_l(3, -1).unwrap()).unwrap();
        assert_eq!(
            j,
            r#"{"n":3,"k":-1,"summands":[{"token":"I⊗P1⊗P1","mult":1},{"token":"I⊗I⊗P1","mult":1},{"token":"I⊗I⊗I","mult":1}],"k0":[1,1,1],"rank":1}"#
        );
    }

    #[test]
    fn classes() {
        assert_eq!(class_of_l(2, 1).unwrap(), K0Class::new(vec![-1, 1]));
        let relation = class_of_l(3, 1)
            .unwrap()
            .add(&class_of_l(3, -1).unwrap())
            .sub(&K0Class::basis(3, 3).scale(2));
        assert_eq!(relation, K0Class::new(vec![1, 0, 0]));
    }

    #[test]
    fn realized_tokens_are_projections() {
        assert!(decompose_l(3, -2).unwrap().realize().is_ok());
        assert!(decompose_l(3, 2).unwrap().realize().is_ok());
    }

    #[test]
    fn isometries_n2() {
        for c in verify_line_bundle_isometries(2, &Bounds::quick()) {
            assert!(c.passed, "{c:?}");
        }
    }
}
