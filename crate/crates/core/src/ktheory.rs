//! K₀ of the quantum projective space in the free basis `e_j = [Q_{j,id,1}]`,
//! classes of elementary projections, the positive-cone predicate and the
//! structural formulas (stable rank, connectedness threshold, composition
//! series).

use std::fmt;

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::{Ambient, StandardSum};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K0Class {
    pub n: usize,
    pub coords: Vec<i64>,
}

impl K0Class {
    pub fn zero(n: usize) -> Self {
        K0Class { n, coords: vec![0; n] }
    }

    /// Basis vector `e_j`, 1-based.
    pub fn basis(n: usize, j: usize) -> Self {
        let mut c = K0Class::zero(n);
        c.coords[j - 1] = 1;
        c
    }

    pub fn new(coords: Vec<i64>) -> Self {
        K0Class {
            n: coords.len(),
            coords,
        }
    }

    /// Zero-pads to ambient `n` (the embedding of a smaller ambient).
    pub fn pad(&self, n: usize) -> K0Class {
        let mut coords = self.coords.clone();
        coords.resize(n.max(self.n), 0);
        K0Class {
            n: coords.len(),
            coords,
        }
    }

    pub fn add(&self, other: &K0Class) -> K0Class {
        let n = self.n.max(other.n);
        let (a, b) = (self.pad(n), other.pad(n));
        K0Class::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &K0Class) -> K0Class {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> K0Class {
        K0Class::new(self.coords.iter().map(|x| x * c).collect())
    }
}

impl fmt::Display for K0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", c.join(","))
    }
}

/// `∂_n(I^{⊗ slot-1} ⊗ P_k ⊗ P₁^{⊗ n-slot})` with `P_0 = I` and negative
/// `k` meaning the cofinite `P_{-|k|}`.
///
/// Stored canonically: `P₁` in slot `j ≥ 2` is rewritten as the identity in
/// slot `j-1`, since both denote the same operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementaryProj {
    pub n: usize,
    pub slot: usize,
    pub k: i64,
}

impl ElementaryProj {
    pub fn new(n: usize, slot: usize, k: i64) -> Result<Self> {
        if n == 0 || slot == 0 || slot > n {
            return Err(Error::InvalidParameter(format!("slot {slot} outside 1..={n}")));
        }
        if k == 1 && slot >= 2 {
            return Ok(ElementaryProj {
                n,
                slot: slot - 1,
                k: 0,
            });
        }
        Ok(ElementaryProj { n, slot, k })
    }

    /// `I^{⊗t} ⊗ P₁^{⊗ n-t}` for `1 ≤ t ≤ n`.
    pub fn identity_prefix(n: usize, t: usize) -> Result<Self> {
        ElementaryProj::new(n, t, 0)
    }

    /// `Î ⊗ P_{-k}` for `k ≥ 0`.
    pub fn hat_cofinite(n: usize, k: u64) -> Result<Self> {
        ElementaryProj::new(n, n, -(k as i64))
    }

    pub fn is_identity(&self) -> bool {
        self.slot == self.n && self.k == 0
    }
}

impl fmt::Display for ElementaryProj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec!["I".to_string(); self.slot - 1];
        parts.push(match self.k {
            0 => "I".to_string(),
            k if k > 0 => format!("P{k}"),
            k => format!("P-{}", -k),
        });
        parts.extend(std::iter::repeat_n("P1".to_string(), self.n - self.slot));
        write!(f, "{}", parts.join("⊗"))
    }
}

fn v_raw(n: usize, k: u64) -> K0Class {
    if n == 1 {
        return K0Class::new(vec![1]);
    }
    let mut c = K0Class::basis(n, n);
    for i in 0..k {
        c = c.sub(&v_raw(n - 1, i).pad(n));
    }
    c
}

/// Class of `∂_n(Î ⊗ P_{-k})`.
pub fn v(n: usize, k: u64) -> Result<K0Class> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("v needs n ≥ 2, got {n}")));
    }
    Ok(v_raw(n, k))
}

fn class_at(n: usize, k: i64) -> K0Class {
    if k <= 0 {
        return v_raw(n, k.unsigned_abs());
    }
    if n == 1 {
        return K0Class::zero(1);
    }
    // P_k splits into k rank-one corners, each moved onto I'⊗P_{-i}⊗P₁.
    (0..k as u64).fold(K0Class::zero(n), |acc, i| acc.add(&v_raw(n - 1, i).pad(n)))
}

pub fn class_of_elementary(e: &ElementaryProj) -> K0Class {
    class_at(e.slot, e.k).pad(e.n)
}

/// `Σ l · e_j` for a sum of `Q_{j,id,l}` over the projective space; only
/// prefix indices `{1..j}` are accepted.
pub fn class_of_standard_sum(s: &StandardSum) -> Result<K0Class> {
    if s.ambient() != Ambient::Cpn {
        return Err(Error::AmbientMismatch(
            "K₀ classes are computed over the projective space".into(),
        ));
    }
    let mut c = K0Class::zero(s.n());
    for (a, l) in s.tokens() {
        if !a.is_prefix() {
            return Err(Error::Domain(format!("index {a} is not of the form {{1..j}}")));
        }
        c.coords[a.len() - 1] += l as i64;
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeVerdict {
    In,
    NotIn,
    Unknown,
}

impl fmt::Display for ConeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeVerdict::In => "in",
            ConeVerdict::NotIn => "not_in",
            ConeVerdict::Unknown => "unknown",
        })
    }
}

/// Positive-cone membership: `In` off the pattern `c_j < 0 = c_{j+1} = … = c_n`,
/// `NotIn` for negative rank, `Unknown` otherwise.
pub fn cone_contains(c: &K0Class) -> ConeVerdict {
    let excluded = (0..c.coords.len()).any(|j| c.coords[j] < 0 && c.coords[j + 1..].iter().all(|&x| x == 0));
    if !excluded {
        ConeVerdict::In
    } else if c.coords.last().is_some_and(|&x| x < 0) {
        ConeVerdict::NotIn
    } else {
        ConeVerdict::Unknown
    }
}

pub fn rank_of_class(c: &K0Class) -> i64 {
    c.coords.last().copied().unwrap_or(0)
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

/// Stable rank of the `n`-fold Toeplitz tensor power.
pub fn stable_rank(n: usize) -> Result<usize> {
    require_n(n)?;
    Ok(if n == 1 { 2 } else { n / 2 + 1 })
}

/// Upper bound for the connected stable rank.
pub fn csr_upper(n: usize) -> Result<usize> {
    require_n(n)?;
    Ok(n.div_ceil(2) + 1)
}

/// Size from which `GL_k` of the `n`-fold Toeplitz tensor power is connected.
pub fn gl0_threshold(n: usize) -> Result<usize> {
    require_n(n)?;
    Ok(if n == 1 { 1 } else { n / 2 + 3 })
}

/// One subquotient `⊕^{mult} K(ℓ²(ℤ≥^{compact_dim})) ⊗ C(T^{torus_dim})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub multiplicity: u64,
    pub compact_dim: usize,
    pub torus_dim: usize,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.compact_dim {
            0 => None,
            d => Some(format!("K(ℓ²(ℤ≥^{d}))")),
        };
        let t = match self.torus_dim {
            0 => None,
            d => Some(format!("C(T^{d})")),
        };
        let body = match (k, t) {
            (Some(k), Some(t)) => format!("{k}⊗{t}"),
            (Some(k), None) => k,
            (None, Some(t)) => t,
            (None, None) => "ℂ".to_string(),
        };
        write!(f, "{}×{body}", self.multiplicity)
    }
}

pub fn composition_series(n: usize, which: Ambient) -> Result<Vec<Layer>> {
    require_n(n)?;
    let start = match which {
        Ambient::Toeplitz => 0,
        Ambient::Sphere => 1,
        Ambient::Cpn => {
            return Err(Error::Domain(
                "composition series is given for toeplitz and sphere".into(),
            ))
        }
    };
    Ok((start..=n)
        .map(|j| Layer {
            multiplicity: binomial(n as u64, j as u64),
            compact_dim: n - j,
            torus_dim: j,
        })
        .collect())
}
