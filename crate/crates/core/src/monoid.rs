//! The monoid of standard projections: ⊞-sums of `⊞^l (identity on A, P₁
//! elsewhere)` over the Toeplitz cube, the quantum sphere and the quantum
//! projective space.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cone_sets::ExtNat;
use crate::error::{Error, Result};
use crate::gadgets::{absorber_block, embed_block, standard_elem};
use crate::groupoid::trace_to_rank;
use crate::matrix::{verify_equivalence, AlgMatrix, Mode};

/// A subset `A ⊆ {1..n}`, stored as a bitmask (bit `i-1` for element `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShuffleIndex(u32);

impl ShuffleIndex {
    pub const EMPTY: ShuffleIndex = ShuffleIndex(0);

    pub fn from_elements(elems: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elems {
            if e == 0 || e > 31 {
                return Err(Error::InvalidParameter(format!("index element {e} out of range")));
            }
            bits |= 1 << (e - 1);
        }
        Ok(ShuffleIndex(bits))
    }

    /// `{1..j}`.
    pub fn prefix(j: usize) -> Self {
        ShuffleIndex(((1u64 << j) - 1) as u32)
    }

    pub fn full(n: usize) -> Self {
        ShuffleIndex::prefix(n)
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn from_bits(bits: u32) -> Self {
        ShuffleIndex(bits)
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(&self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &ShuffleIndex) -> bool {
        self.0 & !other.0 == 0
    }

    /// The order `≺`: strict inclusion.
    pub fn precedes(&self, other: &ShuffleIndex) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn max_element(&self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn is_prefix(&self) -> bool {
        *self == ShuffleIndex::prefix(self.len())
    }

    /// All subsets of `{1..n}`.
    pub fn all(n: usize) -> impl Iterator<Item = ShuffleIndex> {
        (0..(1u32 << n)).map(ShuffleIndex)
    }
}

/// Display order: larger sets first, then lexicographic on elements.
impl Ord for ShuffleIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .len()
            .cmp(&self.len())
            .then_with(|| self.elements().cmp(&other.elements()))
    }
}

impl PartialOrd for ShuffleIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ShuffleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.elements().iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", e.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Toeplitz,
    Sphere,
    Cpn,
}

impl FromStr for Ambient {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "toeplitz" => Ok(Ambient::Toeplitz),
            "sphere" => Ok(Ambient::Sphere),
            "cpn" => Ok(Ambient::Cpn),
            _ => Err(Error::Parse(format!("unknown ambient {s:?} (toeplitz|sphere|cpn)"))),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ambient::Toeplitz => "toeplitz",
            Ambient::Sphere => "sphere",
            Ambient::Cpn => "cpn",
        })
    }
}

/// A ⊞-sum of standard projections, one weight per index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardSum {
    ambient: Ambient,
    n: usize,
    weights: BTreeMap<ShuffleIndex, usize>,
}

impl StandardSum {
    pub fn new(ambient: Ambient, n: usize) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::InvalidParameter(format!("n = {n} outside 1..=31")));
        }
        Ok(StandardSum {
            ambient,
            n,
            weights: BTreeMap::new(),
        })
    }

    pub fn from_tokens(ambient: Ambient, n: usize, tokens: &[(ShuffleIndex, usize)]) -> Result<Self> {
        let mut s = StandardSum::new(ambient, n)?;
        for &(a, l) in tokens {
            s.add_token(a, l)?;
        }
        Ok(s)
    }

    /// Adds `⊞^l` of the standard projection at `a`; same-index weights merge.
    pub fn add_token(&mut self, a: ShuffleIndex, l: usize) -> Result<()> {
        if a.max_element() > self.n {
            return Err(Error::InvalidParameter(format!(
                "index {a} not inside {{1..{}}}",
                self.n
            )));
        }
        if l == 0 {
            return Err(Error::InvalidParameter("weight must be at least 1".into()));
        }
        if a.is_empty() && self.ambient != Ambient::Toeplitz {
            return Ok(());
        }
        *self.weights.entry(a).or_insert(0) += l;
        Ok(())
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Tokens in display order.
    pub fn tokens(&self) -> impl Iterator<Item = (ShuffleIndex, usize)> + '_ {
        self.weights.iter().map(|(a, l)| (*a, *l))
    }

    pub fn weight(&self, a: ShuffleIndex) -> usize {
        self.weights.get(&a).copied().unwrap_or(0)
    }

    fn check(&self, other: &StandardSum) -> Result<()> {
        if self.ambient != other.ambient || self.n != other.n {
            return Err(Error::AmbientMismatch(format!(
                "{} n={} vs {} n={}",
                self.ambient, self.n, other.ambient, other.n
            )));
        }
        Ok(())
    }

    pub fn dsum(&self, other: &StandardSum) -> Result<StandardSum> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, l) in other.tokens() {
            out.add_token(a, l)?;
        }
        Ok(out)
    }

    /// Deletes every index strictly contained in another present index.
    /// Over the projective space nothing is absorbed.
    pub fn reduce(&self) -> StandardSum {
        if self.ambient == Ambient::Cpn {
            return self.clone();
        }
        let keys: Vec<ShuffleIndex> = self.weights.keys().copied().collect();
        let weights = self
            .weights
            .iter()
            .filter(|(a, _)| !keys.iter().any(|b| a.precedes(b)))
            .map(|(a, l)| (*a, *l))
            .collect();
        StandardSum {
            ambient: self.ambient,
            n: self.n,
            weights,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.reduce() == *self
    }

    /// The indices carrying ρ: all subsets over the Toeplitz cube, nonempty
    /// ones otherwise.
    pub fn rho_domain(&self) -> Vec<ShuffleIndex> {
        let mut v: Vec<ShuffleIndex> = ShuffleIndex::all(self.n)
            .filter(|a| self.ambient == Ambient::Toeplitz || !a.is_empty())
            .collect();
        v.sort();
        v
    }

    pub fn rho(&self) -> RhoVector {
        let values = self
            .rho_domain()
            .into_iter()
            .map(|a| {
                let v = self
                    .tokens()
                    .map(|(b, l)| {
                        if a == b {
                            ExtNat::Fin(l as u64)
                        } else if a.precedes(&b) {
                            ExtNat::Inf
                        } else {
                            ExtNat::Fin(0)
                        }
                    })
                    .sum();
                (a, v)
            })
            .collect();
        RhoVector(values)
    }

    /// ρ computed from the realized matrix: the rank of its restriction to
    /// the face where the coordinates in `A` are infinite.
    pub fn measured_rho(&self) -> Result<RhoVector> {
        let p = self.realize();
        let mut values = BTreeMap::new();
        for a in self.rho_domain() {
            let pinned: Vec<usize> = a.elements().iter().map(|i| i - 1).collect();
            let sym = p.symbol_at_one(&pinned)?;
            values.insert(a, trace_to_rank(sym.trace())?);
        }
        Ok(RhoVector(values))
    }

    /// Block-diagonal realization, tokens in display order; the empty sum is
    /// a 1×1 zero.
    pub fn realize(&self) -> AlgMatrix {
        let mut diag = Vec::new();
        for (a, l) in self.tokens() {
            let e = standard_elem(self.n, &a.elements());
            diag.extend(std::iter::repeat_n(e, l));
        }
        if diag.is_empty() {
            return AlgMatrix::zeros(self.n, 1, 1);
        }
        AlgMatrix::diag(self.n, diag).expect("same ambient")
    }

    /// Total number of blocks in the realization.
    pub fn size(&self) -> usize {
        self.weights.values().sum()
    }

    pub fn parse(ambient: Ambient, n: usize, text: &str) -> Result<Self> {
        let mut s = StandardSum::new(ambient, n)?;
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "0" {
            return Ok(s);
        }
        for part in compact.split('+') {
            let (l, set) = match part.split_once('*') {
                Some((l, set)) => {
                    let l: usize = l.parse().map_err(|_| Error::Parse(format!("bad weight in {part:?}")))?;
                    (l, set)
                }
                None => (1, part),
            };
            let inner = set
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("expected {{…}} in {part:?}")))?;
            let elems = inner
                .split(',')
                .filter(|e| !e.is_empty())
                .map(|e| {
                    e.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad element {e:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if elems.iter().any(|&e| e == 0 || e > n) {
                return Err(Error::InvalidParameter(format!("{part:?} not inside {{1..{n}}}")));
            }
            s.add_token(ShuffleIndex::from_elements(&elems)?, l)?;
        }
        Ok(s)
    }
}

impl fmt::Display for StandardSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.tokens().map(|(a, l)| format!("{l}*{a}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct TokenRepr {
    #[serde(rename = "A")]
    a: Vec<usize>,
    l: usize,
}

#[derive(Serialize, Deserialize)]
struct SumRepr {
    ambient: Ambient,
    n: usize,
    tokens: Vec<TokenRepr>,
}

impl Serialize for StandardSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SumRepr {
            ambient: self.ambient,
            n: self.n,
            tokens: self.tokens().map(|(a, l)| TokenRepr { a: a.elements(), l }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StandardSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SumRepr::deserialize(d)?;
        let mut s = StandardSum::new(r.ambient, r.n).map_err(serde::de::Error::custom)?;
        for t in r.tokens {
            if t.a.iter().any(|&e| e == 0 || e > r.n) {
                return Err(serde::de::Error::custom(format!(
                    "index {:?} not inside 1..={}",
                    t.a, r.n
                )));
            }
            let a = ShuffleIndex::from_elements(&t.a).map_err(serde::de::Error::custom)?;
            s.add_token(a, t.l).map_err(serde::de::Error::custom)?;
        }
        Ok(s)
    }
}

/// ρ-invariant: one extended natural per index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RhoVector(pub BTreeMap<ShuffleIndex, ExtNat>);

impl RhoVector {
    /// Componentwise sum with `∞` absorbing.
    pub fn add(&self, other: &RhoVector) -> RhoVector {
        let mut out = self.0.clone();
        for (a, v) in &other.0 {
            let e = out.entry(*a).or_insert(ExtNat::Fin(0));
            *e = *e + *v;
        }
        RhoVector(out)
    }
}

impl fmt::Display for RhoVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, v)| format!("{a}: {v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Serialize for RhoVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            #[serde(rename = "A")]
            a: Vec<usize>,
            rho: ExtNat,
        }
        let v: Vec<Entry> = self
            .0
            .iter()
            .map(|(a, r)| Entry {
                a: a.elements(),
                rho: *r,
            })
            .collect();
        v.serialize(s)
    }
}

/// Equivalence of standard sums: equal reduced forms over the Toeplitz cube
/// and the sphere, literal equality over the projective space.
pub fn equivalent(s: &StandardSum, t: &StandardSum) -> Result<bool> {
    s.check(t)?;
    Ok(match s.ambient {
        Ambient::Cpn => s == t,
        _ => s.reduce() == t.reduce(),
    })
}

/// Every reduced sum over `{1..n}` with weights in `1..=wmax`.
pub fn enumerate_reduced(ambient: Ambient, n: usize, wmax: usize) -> Result<Vec<StandardSum>> {
    let subsets: Vec<ShuffleIndex> = ShuffleIndex::all(n)
        .filter(|a| ambient == Ambient::Toeplitz || !a.is_empty())
        .collect();
    let mut antichains: Vec<Vec<ShuffleIndex>> = Vec::new();
    fn extend(
        subsets: &[ShuffleIndex],
        start: usize,
        current: &mut Vec<ShuffleIndex>,
        out: &mut Vec<Vec<ShuffleIndex>>,
    ) {
        out.push(current.clone());
        for i in start..subsets.len() {
            let a = subsets[i];
            if current.iter().all(|b| !a.precedes(b) && !b.precedes(&a)) {
                current.push(a);
                extend(subsets, i + 1, current, out);
                current.pop();
            }
        }
    }
    extend(&subsets, 0, &mut Vec::new(), &mut antichains);

    let mut out = Vec::new();
    for chain in antichains {
        let mut weights = vec![1usize; chain.len()];
        loop {
            let tokens: Vec<(ShuffleIndex, usize)> = chain.iter().copied().zip(weights.iter().copied()).collect();
            out.push(StandardSum::from_tokens(ambient, n, &tokens)?);
            let Some(i) = weights.iter().position(|&w| w < wmax) else {
                break;
            };
            for w in weights.iter_mut().take(i) {
                *w = 1;
            }
            weights[i] += 1;
        }
    }
    Ok(out)
}

/// An explicit unitary witnessing `⊞^l P_A ⊞ ⊞^{l'} P_{A'} ∼ ⊞^l P_A` for
/// `A' ⊊ A` over the Toeplitz cube.
#[derive(Clone, Debug)]
pub struct AbsorptionChain {
    pub p: AlgMatrix,
    pub q: AlgMatrix,
    pub witness: AlgMatrix,
    pub steps: usize,
}

impl AbsorptionChain {
    pub fn verify(&self) -> bool {
        verify_equivalence(&self.p, &self.q, &self.witness, Mode::Exact)
    }
}

pub fn absorption_chain(
    n: usize,
    a: ShuffleIndex,
    l: usize,
    sub: ShuffleIndex,
    l_sub: usize,
) -> Result<AbsorptionChain> {
    if !sub.precedes(&a) {
        return Err(Error::InvalidParameter(format!("{sub} is not strictly inside {a}")));
    }
    let sum = StandardSum::from_tokens(Ambient::Toeplitz, n, &[(a, l), (sub, l_sub)])?;
    let target = StandardSum::from_tokens(Ambient::Toeplitz, n, &[(a, l)])?;

    // A_0 = sub ⊂ A_1 ⊂ … ⊂ A_d = a, adding one coordinate at a time.
    let added: Vec<usize> = ShuffleIndex(a.0 & !sub.0).elements();
    let d = added.len();
    let size = l + l_sub + d - 1;
    let p = sum.realize().pad(size, size);
    let q = target.realize().pad(size, size);

    let absorb = |slot: usize, hi: usize, lo: usize| embed_block(n, size, hi, lo, absorber_block(n, slot));
    let expand = |slot: usize, hi: usize, lo: usize| {
        let [[a00, a01], [a10, a11]] = absorber_block(n, slot);
        let block = [[a00.adjoint(), a10.adjoint()], [a01.adjoint(), a11.adjoint()]];
        embed_block(n, size, hi, lo, block)
    };

    let mut steps = Vec::new();
    for c in 0..l_sub {
        // Position of the copy of A_t used while absorbing the c-th copy of sub.
        let pos = |t: usize| {
            if t == d {
                0
            } else if t == 0 {
                l + c
            } else {
                l + l_sub + (d - 1 - t)
            }
        };
        for t in (1..d).rev() {
            steps.push(expand(added[t], pos(t + 1), pos(t)));
        }
        for (t, &slot) in added.iter().enumerate() {
            steps.push(absorb(slot, pos(t + 1), pos(t)));
        }
    }
    let mut witness = AlgMatrix::identity(n, size);
    for s in &steps {
        witness = s.mul(&witness)?;
    }
    Ok(AbsorptionChain {
        p,
        q,
        witness,
        steps: steps.len(),
    })
}

/// Class of an idempotent over the one-variable Toeplitz algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct N1Class {
    pub m: u64,
    pub l: ExtNat,
}

impl fmt::Display for N1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.l)
    }
}

/// `(0, trace)` when the symbol vanishes, `(symbol rank, ∞)` otherwise.
pub fn classify_n1(p: &AlgMatrix) -> Result<N1Class> {
    if p.n() != 1 {
        return Err(Error::Domain(format!("classification needs n = 1, got n = {}", p.n())));
    }
    if !p.is_idempotent(Mode::Exact) {
        return Err(Error::NotIdempotent);
    }
    let symbol = p.symbol_at_one(&[0])?;
    let m = symbol
        .trace()
        .and_then(|t| t.as_nonneg_integer())
        .ok_or_else(|| Error::Domain("symbol trace is not a natural number".into()))?;
    if m == 0 {
        let l = p
            .trace()
            .and_then(|t| t.as_nonneg_integer())
            .ok_or_else(|| Error::Domain("trace is not a natural number".into()))?;
        Ok(N1Class {
            m: 0,
            l: ExtNat::Fin(l),
        })
    } else {
        Ok(N1Class { m, l: ExtNat::Inf })
    }
}

/// Rank at and above which every idempotent class is free.
pub fn free_rank_threshold(ambient: Ambient, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    match ambient {
        Ambient::Toeplitz | Ambient::Sphere => Ok((n - 1) / 2 + 3),
        Ambient::Cpn => Err(Error::Domain(
            "no free-rank threshold is known for the projective space".into(),
        )),
    }
}
