//! Compact-open subsets of the one-point compactified cone `(ℤ≥ ∪ {∞})ⁿ`.
//!
//! A compact-open subset of `ℤ≥ ∪ {∞}` is either a finite set of integers or a
//! tail `[t, ∞]` (which always contains `∞`) together with finitely many extra
//! integers below `t`. [`ClopenSet`] stores exactly that, in a minimal form, so
//! structural equality is set equality.
//!
//! A [`BoxRegion`] is a finite union of products of such sets. Regions are kept
//! in a canonical form obtained by recursive coordinate splitting: the values of
//! the first coordinate are grouped by the slice of the region above them, each
//! slice is canonicalized recursively, and the groups are listed in increasing
//! order of their coordinate set. The resulting boxes are pairwise disjoint and
//! two regions are equal as sets iff they are structurally equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative integer or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNat::Inf)
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            ExtNat::Fin(v) => Some(*v),
            ExtNat::Inf => None,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, o: ExtNat) -> ExtNat {
        match (self, o) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Inf,
        }
    }
}

impl std::iter::Sum for ExtNat {
    fn sum<I: Iterator<Item = ExtNat>>(iter: I) -> ExtNat {
        iter.fold(ExtNat::Fin(0), |a, b| a + b)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(v) => write!(f, "{v}"),
            ExtNat::Inf => write!(f, "∞"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtNat::Fin(v) => s.serialize_u64(*v),
            ExtNat::Inf => s.serialize_str("∞"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(ExtNat::Fin(v)),
            Raw::Str(s) if s == "∞" || s == "inf" => Ok(ExtNat::Inf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad extended natural {s:?}"))),
        }
    }
}

/// Compact-open subset of `ℤ≥ ∪ {∞}`.
///
/// Invariant: every element of `finite` is below `tail`, and `tail - 1` is not
/// in `finite` (the tail absorbs adjacent points).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClopenSet {
    finite: BTreeSet<u64>,
    tail: Option<u64>,
}

impl ClopenSet {
    pub fn new(finite: impl IntoIterator<Item = u64>, tail: Option<u64>) -> Self {
        let mut finite: BTreeSet<u64> = finite.into_iter().collect();
        let mut tail = tail;
        if let Some(mut t) = tail {
            finite.retain(|&x| x < t);
            while t > 0 && finite.remove(&(t - 1)) {
                t -= 1;
            }
            tail = Some(t);
        }
        ClopenSet { finite, tail }
    }

    pub fn empty() -> Self {
        ClopenSet {
            finite: BTreeSet::new(),
            tail: None,
        }
    }

    /// `[0, ∞]`, the whole unit space of one coordinate.
    pub fn full() -> Self {
        ClopenSet {
            finite: BTreeSet::new(),
            tail: Some(0),
        }
    }

    pub fn singleton(x: u64) -> Self {
        ClopenSet::new([x], None)
    }

    /// `{0, 1, …, m-1}`.
    pub fn below(m: u64) -> Self {
        ClopenSet::new(0..m, None)
    }

    /// `[t, ∞]`.
    pub fn tail_from(t: u64) -> Self {
        ClopenSet::new([], Some(t))
    }

    pub fn finite_part(&self) -> &BTreeSet<u64> {
        &self.finite
    }

    pub fn tail(&self) -> Option<u64> {
        self.tail
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.tail.is_none()
    }

    pub fn is_full(&self) -> bool {
        self.tail == Some(0)
    }

    /// True when the set contains no tail (equivalently, does not contain `∞`).
    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    pub fn contains_infinity(&self) -> bool {
        self.tail.is_some()
    }

    pub fn contains_int(&self, x: u64) -> bool {
        self.finite.contains(&x) || self.tail.is_some_and(|t| x >= t)
    }

    pub fn contains(&self, x: ExtNat) -> bool {
        match x {
            ExtNat::Fin(v) => self.contains_int(v),
            ExtNat::Inf => self.contains_infinity(),
        }
    }

    /// Smallest `b` such that all points `≥ b` (and `∞`) share membership.
    pub fn bound(&self) -> u64 {
        match self.tail {
            Some(t) => t,
            None => self.finite.iter().next_back().map_or(0, |&m| m + 1),
        }
    }

    fn combine(&self, other: &ClopenSet, op: impl Fn(bool, bool) -> bool) -> ClopenSet {
        let b = self.bound().max(other.bound());
        let finite = (0..b).filter(|&x| op(self.contains_int(x), other.contains_int(x)));
        let tail = op(self.contains_infinity(), other.contains_infinity()).then_some(b);
        ClopenSet::new(finite, tail)
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &ClopenSet) -> ClopenSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn subtract(&self, other: &ClopenSet) -> ClopenSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> ClopenSet {
        ClopenSet::full().subtract(self)
    }

    /// `{x : x + m ∈ S}`, with `∞ + m = ∞`.
    pub fn shift_pre(&self, m: i64) -> ClopenSet {
        let finite = self.finite.iter().filter_map(|&x| {
            let y = x as i64 - m;
            (y >= 0).then_some(y as u64)
        });
        let tail = self.tail.map(|t| (t as i64 - m).max(0) as u64);
        ClopenSet::new(finite, tail)
    }

    /// The image `S + m`, intersected with the cone.
    pub fn translate(&self, m: i64) -> ClopenSet {
        self.shift_pre(-m)
    }

    pub fn cardinality(&self) -> ExtNat {
        if self.tail.is_some() {
            ExtNat::Inf
        } else {
            ExtNat::Fin(self.finite.len() as u64)
        }
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        if !self.finite.is_empty() {
            let items: Vec<String> = self.finite.iter().map(|x| x.to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
            if self.tail.is_some() {
                write!(f, "∪")?;
            }
        }
        if let Some(t) = self.tail {
            write!(f, "[{t},∞]")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ClopenSetRepr {
    finite: Vec<u64>,
    tail: Option<u64>,
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClopenSetRepr {
            finite: self.finite.iter().copied().collect(),
            tail: self.tail,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ClopenSetRepr::deserialize(d)?;
        Ok(ClopenSet::new(r.finite, r.tail))
    }
}

/// Finite disjoint union of boxes `S₁ × ⋯ × Sₙ` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxRegion {
    dim: usize,
    boxes: Vec<Vec<ClopenSet>>,
}

fn canonical_boxes(dim: usize, boxes: Vec<Vec<ClopenSet>>) -> Vec<Vec<ClopenSet>> {
    let boxes: Vec<Vec<ClopenSet>> = boxes.into_iter().filter(|b| b.iter().all(|s| !s.is_empty())).collect();
    if boxes.is_empty() {
        return Vec::new();
    }
    if dim == 0 {
        return vec![Vec::new()];
    }

    // Group atoms of the first coordinate by which boxes contain them.
    let bound = boxes.iter().map(|b| b[0].bound()).max().unwrap_or(0);
    let mut by_pattern: BTreeMap<Vec<usize>, (Vec<u64>, bool)> = BTreeMap::new();
    for x in 0..bound {
        let pattern: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i][0].contains_int(x)).collect();
        if !pattern.is_empty() {
            by_pattern.entry(pattern).or_default().0.push(x);
        }
    }
    let tail_pattern: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i][0].contains_infinity()).collect();
    if !tail_pattern.is_empty() {
        by_pattern.entry(tail_pattern).or_default().1 = true;
    }

    let mut by_slice: BTreeMap<Vec<Vec<ClopenSet>>, ClopenSet> = BTreeMap::new();
    for (pattern, (points, has_tail)) in by_pattern {
        let rest: Vec<Vec<ClopenSet>> = pattern.iter().map(|&i| boxes[i][1..].to_vec()).collect();
        let slice = canonical_boxes(dim - 1, rest);
        if slice.is_empty() {
            continue;
        }
        let set = ClopenSet::new(points, has_tail.then_some(bound));
        let entry = by_slice.entry(slice).or_insert_with(ClopenSet::empty);
        *entry = entry.union(&set);
    }

    let mut groups: Vec<(ClopenSet, Vec<Vec<ClopenSet>>)> =
        by_slice.into_iter().map(|(slice, set)| (set, slice)).collect();
    groups.sort();
    let mut out = Vec::new();
    for (set, slice) in groups {
        for rest in slice {
            let mut b = Vec::with_capacity(dim);
            b.push(set.clone());
            b.extend(rest);
            out.push(b);
        }
    }
    out
}

fn box_intersect(a: &[ClopenSet], b: &[ClopenSet]) -> Vec<ClopenSet> {
    a.iter().zip(b).map(|(x, y)| x.intersect(y)).collect()
}

/// `a \ b` as at most `dim` disjoint boxes.
fn box_subtract(a: &[ClopenSet], b: &[ClopenSet]) -> Vec<Vec<ClopenSet>> {
    let mut out = Vec::new();
    for i in 0..a.len() {
        let diff = a[i].subtract(&b[i]);
        if diff.is_empty() {
            continue;
        }
        let mut piece = Vec::with_capacity(a.len());
        for j in 0..i {
            piece.push(a[j].intersect(&b[j]));
        }
        piece.push(diff);
        piece.extend(a[i + 1..].iter().cloned());
        if piece.iter().all(|s| !s.is_empty()) {
            out.push(piece);
        }
    }
    out
}

impl BoxRegion {
    pub fn from_boxes(dim: usize, boxes: Vec<Vec<ClopenSet>>) -> Result<Self> {
        if let Some(b) = boxes.iter().find(|b| b.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.len(),
            });
        }
        Ok(BoxRegion {
            dim,
            boxes: canonical_boxes(dim, boxes),
        })
    }

    pub fn from_box(b: Vec<ClopenSet>) -> Self {
        let dim = b.len();
        BoxRegion {
            dim,
            boxes: canonical_boxes(dim, vec![b]),
        }
    }

    pub fn empty(dim: usize) -> Self {
        BoxRegion { dim, boxes: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        BoxRegion::from_box(vec![ClopenSet::full(); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Vec<ClopenSet>] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    fn check_dim(&self, other: &BoxRegion) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &BoxRegion) -> Result<BoxRegion> {
        self.check_dim(other)?;
        let boxes = self.boxes.iter().chain(&other.boxes).cloned().collect();
        Ok(BoxRegion {
            dim: self.dim,
            boxes: canonical_boxes(self.dim, boxes),
        })
    }

    pub fn intersect(&self, other: &BoxRegion) -> Result<BoxRegion> {
        self.check_dim(other)?;
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                let c = box_intersect(a, b);
                if c.iter().all(|s| !s.is_empty()) {
                    boxes.push(c);
                }
            }
        }
        Ok(BoxRegion {
            dim: self.dim,
            boxes: canonical_boxes(self.dim, boxes),
        })
    }

    pub fn subtract(&self, other: &BoxRegion) -> Result<BoxRegion> {
        self.check_dim(other)?;
        let mut pieces = self.boxes.clone();
        for b in &other.boxes {
            pieces = pieces.iter().flat_map(|a| box_subtract(a, b)).collect();
            if pieces.is_empty() {
                break;
            }
        }
        Ok(BoxRegion {
            dim: self.dim,
            boxes: canonical_boxes(self.dim, pieces),
        })
    }

    pub fn complement(&self) -> BoxRegion {
        BoxRegion::full(self.dim).subtract(self).expect("same dimension")
    }

    pub fn contains(&self, point: &[ExtNat]) -> bool {
        point.len() == self.dim
            && self
                .boxes
                .iter()
                .any(|b| b.iter().zip(point).all(|(s, &x)| s.contains(x)))
    }

    /// Coordinatewise preimage `{x : x + m ∈ R}`.
    pub fn shift_pre(&self, m: &[i64]) -> BoxRegion {
        assert_eq!(m.len(), self.dim, "translation length must match region dimension");
        let boxes = self
            .boxes
            .iter()
            .map(|b| b.iter().zip(m).map(|(s, &k)| s.shift_pre(k)).collect())
            .collect();
        BoxRegion {
            dim: self.dim,
            boxes: canonical_boxes(self.dim, boxes),
        }
    }

    /// Cartesian product; the coordinates of `other` come last.
    pub fn product(&self, other: &BoxRegion) -> BoxRegion {
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                let mut c = a.clone();
                c.extend(b.iter().cloned());
                boxes.push(c);
            }
        }
        let dim = self.dim + other.dim;
        BoxRegion {
            dim,
            boxes: canonical_boxes(dim, boxes),
        }
    }

    /// The slice over the points whose coordinates in `pinned` are all `∞`,
    /// as a region in the remaining coordinates (in their original order).
    pub fn slice_at_infinity(&self, pinned: &[usize]) -> BoxRegion {
        let rest: Vec<usize> = (0..self.dim).filter(|i| !pinned.contains(i)).collect();
        let boxes = self
            .boxes
            .iter()
            .filter(|b| pinned.iter().all(|&i| b[i].contains_infinity()))
            .map(|b| rest.iter().map(|&i| b[i].clone()).collect())
            .collect();
        BoxRegion {
            dim: rest.len(),
            boxes: canonical_boxes(rest.len(), boxes),
        }
    }

    /// True when the region is a finite set of lattice points.
    pub fn is_finite(&self) -> bool {
        self.boxes.iter().all(|b| b.iter().all(ClopenSet::is_finite))
    }

    pub fn cardinality(&self) -> ExtNat {
        self.boxes
            .iter()
            .map(|b| {
                b.iter()
                    .map(ClopenSet::cardinality)
                    .fold(ExtNat::Fin(1), |acc, c| match (acc, c) {
                        (ExtNat::Fin(a), ExtNat::Fin(c)) => ExtNat::Fin(a * c),
                        _ => ExtNat::Inf,
                    })
            })
            .sum()
    }

    /// Largest coordinate bound over all boxes; points beyond it behave like `∞`.
    pub fn bound(&self) -> u64 {
        self.boxes.iter().flatten().map(ClopenSet::bound).max().unwrap_or(0)
    }
}

impl fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .boxes
            .iter()
            .map(|b| {
                if b.is_empty() {
                    "pt".to_string()
                } else {
                    b.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("×")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" ⊔ "))
    }
}
