//! The convolution *-algebra of compactly supported functions on the
//! transformation groupoid `ℤⁿ ⋉ (ℤ≥ ∪ {∞})ⁿ` restricted to the cone.
//!
//! An element is a finite sum `Σ c · χ_{(m,S)}` where `χ_{(m,S)}` is the
//! indicator of the arrows with translation `m` and source in `S`. In the
//! operator picture on `ℓ²(ℤ≥ⁿ)` it sends `e_x` to `e_{x+m}` for `x ∈ S`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeff::Gaussian;
use crate::cone_sets::{BoxRegion, ClopenSet, ExtNat};
use crate::error::{Error, Result};

/// Sources `x` with `x` and `x + m` both in the cone.
pub fn valid_sources(m: &[i64]) -> BoxRegion {
    BoxRegion::from_box(m.iter().map(|&k| ClopenSet::tail_from((-k).max(0) as u64)).collect())
}

/// A single arrow set `(m, S)` with `S` already cut down to legal sources.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidTerm {
    m: Vec<i64>,
    support: BoxRegion,
}

impl GroupoidTerm {
    pub fn new(m: Vec<i64>, support: BoxRegion) -> Result<Self> {
        if m.len() != support.dim() {
            return Err(Error::DimensionMismatch {
                expected: support.dim(),
                found: m.len(),
            });
        }
        let support = support.intersect(&valid_sources(&m))?;
        Ok(GroupoidTerm { m, support })
    }

    pub fn m(&self) -> &[i64] {
        &self.m
    }

    pub fn support(&self) -> &BoxRegion {
        &self.support
    }
}

type Pieces = Vec<(Gaussian, BoxRegion)>;

/// Merge `c · χ_R` into a list of disjoint pieces with distinct coefficients.
fn add_piece(pieces: &Pieces, c: Gaussian, r: &BoxRegion) -> Pieces {
    let mut out: Vec<(Gaussian, BoxRegion)> = Vec::with_capacity(pieces.len() + 2);
    let mut rest = r.clone();
    for (ci, ri) in pieces {
        let inter = ri.intersect(r).expect("same dimension");
        if inter.is_empty() {
            out.push((*ci, ri.clone()));
            continue;
        }
        out.push((*ci + c, inter));
        let diff = ri.subtract(r).expect("same dimension");
        if !diff.is_empty() {
            out.push((*ci, diff));
        }
        rest = rest.subtract(ri).expect("same dimension");
    }
    if !rest.is_empty() {
        out.push((c, rest));
    }
    normalize_pieces(out)
}

fn normalize_pieces(pieces: Pieces) -> Pieces {
    let mut by_coeff: BTreeMap<Gaussian, BoxRegion> = BTreeMap::new();
    for (c, r) in pieces {
        if c.is_zero() || r.is_empty() {
            continue;
        }
        match by_coeff.get_mut(&c) {
            Some(existing) => *existing = existing.union(&r).expect("same dimension"),
            None => {
                by_coeff.insert(c, r);
            }
        }
    }
    by_coeff.into_iter().collect()
}

/// Exact element of the compactly supported convolution algebra on `n` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    n: usize,
    terms: BTreeMap<Vec<i64>, Pieces>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        AlgebraElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// `χ_{(0, cone)}`, the unit.
    pub fn identity(n: usize) -> Self {
        AlgebraElement::indicator(vec![0; n], BoxRegion::full(n)).expect("consistent dimension")
    }

    /// `χ_{(m,S)}`, with `S` silently cut to the legal sources of `m`.
    pub fn indicator(m: Vec<i64>, support: BoxRegion) -> Result<Self> {
        AlgebraElement::from_term(Gaussian::one(), GroupoidTerm::new(m, support)?)
    }

    pub fn from_term(c: Gaussian, t: GroupoidTerm) -> Result<Self> {
        let mut e = AlgebraElement::zero(t.support.dim());
        e.push(c, t.m, &t.support);
        Ok(e)
    }

    /// Diagonal element `χ_{(0, box)}` given coordinatewise.
    pub fn diagonal(sets: Vec<ClopenSet>) -> Self {
        let n = sets.len();
        AlgebraElement::indicator(vec![0; n], BoxRegion::from_box(sets)).expect("consistent dimension")
    }

    fn push(&mut self, c: Gaussian, m: Vec<i64>, r: &BoxRegion) {
        if c.is_zero() || r.is_empty() {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry = add_piece(entry, c, r);
        self.terms.retain(|_, p| !p.is_empty());
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical pieces `(m, c, S)`, ordered by `m` then by `c`.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Gaussian, &BoxRegion)> {
        self.terms
            .iter()
            .flat_map(|(m, pieces)| pieces.iter().map(move |(c, r)| (m.as_slice(), *c, r)))
    }

    pub fn translations(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.terms.keys()
    }

    fn check(&self, other: &AlgebraElement) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(format!(
                "elements over {} and {} coordinates",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c, r) in other.terms() {
            out.push(c, m.to_vec(), r);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(-Gaussian::one()))
    }

    pub fn scale(&self, c: Gaussian) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero(self.n);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, pieces)| {
                (
                    m.clone(),
                    normalize_pieces(pieces.iter().map(|(a, r)| (*a * c, r.clone())).collect()),
                )
            })
            .collect();
        AlgebraElement { n: self.n, terms }
    }

    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(other)?;
        let mut out = AlgebraElement::zero(self.n);
        for (ma, ca, ra) in self.terms() {
            for (mb, cb, rb) in other.terms() {
                let region = ra.shift_pre(mb).intersect(rb)?;
                if region.is_empty() {
                    continue;
                }
                let m: Vec<i64> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.push(ca * cb, m, &region);
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n);
        for (m, c, r) in self.terms() {
            let neg: Vec<i64> = m.iter().map(|k| -k).collect();
            let region = r.shift_pre(&neg);
            out.push(c.conj(), neg, &region);
        }
        out
    }

    /// `f ⊗ g` on `n_f + n_g` coordinates.
    pub fn tensor(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n + other.n);
        for (ma, ca, ra) in self.terms() {
            for (mb, cb, rb) in other.terms() {
                let mut m = ma.to_vec();
                m.extend_from_slice(mb);
                out.push(ca * cb, m, &ra.product(rb));
            }
        }
        out
    }

    /// Parts of total degree `Σ mᵢ`.
    pub fn degree_split(&self) -> BTreeMap<i64, AlgebraElement> {
        let mut out: BTreeMap<i64, AlgebraElement> = BTreeMap::new();
        for (m, pieces) in &self.terms {
            let d = m.iter().sum();
            out.entry(d)
                .or_insert_with(|| AlgebraElement::zero(self.n))
                .terms
                .insert(m.clone(), pieces.clone());
        }
        out
    }

    /// The single degree when the element is homogeneous and nonzero.
    pub fn degree(&self) -> Option<i64> {
        let split = self.degree_split();
        if split.len() == 1 {
            split.keys().next().copied()
        } else {
            None
        }
    }

    /// Membership in the compact ideal: no piece has a tail in any coordinate.
    pub fn in_compact_ideal(&self) -> bool {
        self.terms().all(|(_, _, r)| r.is_finite())
    }

    pub fn quotient_equal(&self, other: &AlgebraElement) -> Result<bool> {
        Ok(self.sub(other)?.in_compact_ideal())
    }

    /// Restriction to the face where the coordinates in `pinned` (0-based)
    /// are `∞`.
    pub fn restrict_sigma(&self, pinned: &[usize]) -> Result<SigmaElement> {
        let pinned: BTreeSet<usize> = pinned.iter().copied().collect();
        if let Some(&bad) = pinned.iter().find(|&&i| i >= self.n) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {} out of range for n = {}",
                bad + 1,
                self.n
            )));
        }
        let pinned: Vec<usize> = pinned.into_iter().collect();
        let rest: Vec<usize> = (0..self.n).filter(|i| !pinned.contains(i)).collect();
        let mut terms: BTreeMap<Vec<i64>, AlgebraElement> = BTreeMap::new();
        for (m, c, r) in self.terms() {
            let slice = r.slice_at_infinity(&pinned);
            if slice.is_empty() {
                continue;
            }
            let exponent: Vec<i64> = pinned.iter().map(|&i| m[i]).collect();
            let residual_m: Vec<i64> = rest.iter().map(|&i| m[i]).collect();
            terms
                .entry(exponent)
                .or_insert_with(|| AlgebraElement::zero(rest.len()))
                .push(c, residual_m, &slice);
        }
        terms.retain(|_, e| !e.is_zero());
        Ok(SigmaElement {
            n: self.n,
            pinned,
            terms,
        })
    }

    /// Sum of `c · |S|` over the translation-zero pieces, or `None` when one
    /// of them has infinite support.
    pub fn trace(&self) -> Option<Gaussian> {
        let mut total = Gaussian::zero();
        if let Some(pieces) = self.terms.get(&vec![0; self.n]) {
            for (c, r) in pieces {
                match r.cardinality() {
                    ExtNat::Fin(k) => total += *c * Gaussian::from_int(k as i64),
                    ExtNat::Inf => return None,
                }
            }
        }
        Some(total)
    }

    pub fn is_projection(&self) -> bool {
        self.adjoint() == *self && self.convolve(self).as_ref() == Ok(self)
    }

    pub fn rank_of_projection(&self) -> Result<ExtNat> {
        if !self.is_projection() {
            return Err(Error::NotAProjection);
        }
        trace_to_rank(self.trace())
    }
}

/// Converts a trace to a rank, rejecting values that are not natural numbers.
pub(crate) fn trace_to_rank(trace: Option<Gaussian>) -> Result<ExtNat> {
    match trace {
        None => Ok(ExtNat::Inf),
        Some(t) => t.as_nonneg_integer().map(ExtNat::Fin).ok_or(Error::NotAProjection),
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c, r)| {
                let ms: Vec<String> = m.iter().map(|k| k.to_string()).collect();
                let head = if c == Gaussian::one() {
                    String::new()
                } else {
                    format!("{c}·")
                };
                format!("{head}χ[({}); {r}]", ms.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: [i64; 4],
    m: Vec<i64>,
    boxes: Vec<Vec<ClopenSet>>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl AlgebraElement {
    fn from_repr(r: ElementRepr) -> Result<Self> {
        let mut out = AlgebraElement::zero(r.n);
        for t in r.terms {
            let c = Gaussian::from_parts(t.c).ok_or_else(|| Error::Parse("zero denominator in coefficient".into()))?;
            let region = BoxRegion::from_boxes(r.n, t.boxes)?;
            let term = GroupoidTerm::new(t.m, region)?;
            out.push(c, term.m, &term.support);
        }
        Ok(out)
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms()
            .map(|(m, c, r)| TermRepr {
                c: c.to_parts(),
                m: m.to_vec(),
                boxes: r.boxes().to_vec(),
            })
            .collect();
        ElementRepr { n: self.n, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ElementRepr::deserialize(d)?;
        AlgebraElement::from_repr(r).map_err(serde::de::Error::custom)
    }
}

/// Image under a restriction map: a Laurent polynomial in the pinned
/// coordinates with coefficients in the algebra of the remaining ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaElement {
    n: usize,
    pinned: Vec<usize>,
    terms: BTreeMap<Vec<i64>, AlgebraElement>,
}

impl SigmaElement {
    /// Pinned coordinates, 0-based and increasing.
    pub fn pinned(&self) -> &[usize] {
        &self.pinned
    }

    pub fn residual_dim(&self) -> usize {
        self.n - self.pinned.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Laurent exponent to residual coefficient.
    pub fn terms(&self) -> &BTreeMap<Vec<i64>, AlgebraElement> {
        &self.terms
    }

    fn check(&self, other: &SigmaElement) -> Result<()> {
        if self.n != other.n || self.pinned != other.pinned {
            return Err(Error::AmbientMismatch("restrictions to different faces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &SigmaElement) -> Result<SigmaElement> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (e, a) in &other.terms {
            let sum = match terms.get(e) {
                Some(b) => b.add(a)?,
                None => a.clone(),
            };
            terms.insert(e.clone(), sum);
        }
        terms.retain(|_, a| !a.is_zero());
        Ok(SigmaElement {
            n: self.n,
            pinned: self.pinned.clone(),
            terms,
        })
    }

    pub fn mul(&self, other: &SigmaElement) -> Result<SigmaElement> {
        self.check(other)?;
        let mut out = SigmaElement {
            n: self.n,
            pinned: self.pinned.clone(),
            terms: BTreeMap::new(),
        };
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let mut single = BTreeMap::new();
                single.insert(e, a.convolve(b)?);
                let part = SigmaElement {
                    n: self.n,
                    pinned: self.pinned.clone(),
                    terms: single,
                };
                out = out.add(&part)?;
            }
        }
        Ok(out)
    }

    /// Sets every Laurent variable to 1.
    pub fn evaluate_at_one(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.residual_dim());
        for a in self.terms.values() {
            out = out.add(a).expect("same residual dimension");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift() -> AlgebraElement {
        AlgebraElement::indicator(vec![1], BoxRegion::full(1)).unwrap()
    }

    fn p(k: u64) -> AlgebraElement {
        AlgebraElement::diagonal(vec![ClopenSet::below(k)])
    }

    #[test]
    fn shift_relations() {
        let s = shift();
        let one = AlgebraElement::identity(1);
        assert_eq!(s.adjoint().convolve(&s).unwrap(), one);
        let ss = s.convolve(&s.adjoint()).unwrap();
        assert_eq!(ss, AlgebraElement::diagonal(vec![ClopenSet::tail_from(1)]));
        assert_eq!(ss, one.sub(&p(1)).unwrap());
    }

    #[test]
    fn adjoint_of_point_term() {
        let f = AlgebraElement::indicator(vec![2], BoxRegion::from_box(vec![ClopenSet::singleton(0)])).unwrap();
        let g = AlgebraElement::indicator(vec![-2], BoxRegion::from_box(vec![ClopenSet::singleton(2)])).unwrap();
        assert_eq!(f.adjoint(), g);
        assert_eq!(p(3).adjoint(), p(3));
    }

    #[test]
    fn validity_is_silent() {
        let f = AlgebraElement::indicator(vec![-2], BoxRegion::full(1)).unwrap();
        let (_, _, r) = f.terms().next().unwrap();
        assert_eq!(r, &BoxRegion::from_box(vec![ClopenSet::tail_from(2)]));
    }

    #[test]
    fn coefficients_merge_and_cancel() {
        let a = p(3);
        let b = AlgebraElement::diagonal(vec![ClopenSet::tail_from(1)]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.terms().count(), 2);
        assert!(sum.sub(&b).unwrap().sub(&a).unwrap().is_zero());
    }

    #[test]
    fn degree_split_examples() {
        let f = AlgebraElement::indicator(vec![1, -1], BoxRegion::full(2)).unwrap();
        let split = f.degree_split();
        assert_eq!(split.len(), 1);
        assert_eq!(split[&0], f);
        assert_eq!(shift().degree(), Some(1));
    }

    #[test]
    fn compact_ideal_examples() {
        assert!(p(3).in_compact_ideal());
        assert!(!AlgebraElement::identity(1).in_compact_ideal());
        assert!(p(1).quotient_equal(&AlgebraElement::zero(1)).unwrap());
        assert!(!AlgebraElement::identity(1)
            .quotient_equal(&AlgebraElement::zero(1))
            .unwrap());
    }

    #[test]
    fn restrict_sigma_examples() {
        let f = AlgebraElement::diagonal(vec![ClopenSet::full(), ClopenSet::singleton(0)]);
        let s = f.restrict_sigma(&[0]).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.terms()[&vec![0]], p(1));

        let s = shift().restrict_sigma(&[0]).unwrap();
        assert_eq!(s.terms().keys().collect::<Vec<_>>(), vec![&vec![1]]);

        let g = AlgebraElement::diagonal(vec![ClopenSet::singleton(0), ClopenSet::singleton(0)]);
        assert!(g.restrict_sigma(&[0]).unwrap().is_zero());
    }

    #[test]
    fn ranks() {
        assert_eq!(p(3).rank_of_projection().unwrap(), ExtNat::Fin(3));
        let c = AlgebraElement::identity(1).sub(&p(2)).unwrap();
        assert_eq!(c.rank_of_projection().unwrap(), ExtNat::Inf);
        let pp = p(1).tensor(&p(1));
        assert_eq!(pp.rank_of_projection().unwrap(), ExtNat::Fin(1));
        assert_eq!(shift().rank_of_projection(), Err(Error::NotAProjection));
    }

    #[test]
    fn json_round_trip() {
        let f = shift()
            .add(&p(2).scale(Gaussian::i()))
            .unwrap()
            .tensor(&shift().adjoint());
        let text = serde_json::to_string(&f).unwrap();
        let back: AlgebraElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn ambient_mismatch() {
        assert!(matches!(
            AlgebraElement::identity(1).convolve(&AlgebraElement::identity(2)),
            Err(Error::AmbientMismatch(_))
        ));
    }
}
