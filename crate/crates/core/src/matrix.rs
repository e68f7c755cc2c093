//! Rectangular matrices over the convolution algebra.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeff::Gaussian;
use crate::cone_sets::ExtNat;
use crate::error::{Error, Result};
use crate::groupoid::{trace_to_rank, AlgebraElement};

/// How equalities are decided: literally, or modulo the compact ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    ModCompact,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<AlgebraElement>,
}

impl AlgMatrix {
    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        AlgMatrix {
            n,
            rows,
            cols,
            entries: vec![AlgebraElement::zero(n); rows * cols],
        }
    }

    pub fn identity(n: usize, size: usize) -> Self {
        let mut m = AlgMatrix::zeros(n, size, size);
        for i in 0..size {
            m.entries[i * size + i] = AlgebraElement::identity(n);
        }
        m
    }

    pub fn scalar(e: AlgebraElement) -> Self {
        AlgMatrix {
            n: e.n(),
            rows: 1,
            cols: 1,
            entries: vec![e],
        }
    }

    pub fn from_rows(n: usize, rows: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let entries: Vec<AlgebraElement> = rows.into_iter().flatten().collect();
        if let Some(bad) = entries.iter().find(|e| e.n() != n) {
            return Err(Error::AmbientMismatch(format!(
                "entry over {} coordinates in a matrix over {n}",
                bad.n()
            )));
        }
        Ok(AlgMatrix {
            n,
            rows: r,
            cols: c,
            entries,
        })
    }

    /// Block-diagonal matrix with the given scalars on the diagonal.
    pub fn diag(n: usize, diagonal: Vec<AlgebraElement>) -> Result<Self> {
        let size = diagonal.len();
        let mut m = AlgMatrix::zeros(n, size, size);
        for (i, e) in diagonal.into_iter().enumerate() {
            if e.n() != n {
                return Err(Error::AmbientMismatch("diagonal entry".into()));
            }
            m.entries[i * size + i] = e;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
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

    pub fn get(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: AlgebraElement) -> Result<()> {
        if e.n() != self.n {
            return Err(Error::AmbientMismatch("entry".into()));
        }
        if i >= self.rows || j >= self.cols {
            return Err(Error::ShapeMismatch(format!(
                "index ({i},{j}) outside {}×{}",
                self.rows, self.cols
            )));
        }
        self.entries[i * self.cols + j] = e;
        Ok(())
    }

    fn check_ambient(&self, other: &AlgMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(format!(
                "matrices over {} and {} coordinates",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgMatrix) -> Result<AlgMatrix> {
        self.check_ambient(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}×{} + {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(AlgMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &AlgMatrix) -> Result<AlgMatrix> {
        self.add(&other.scale(-Gaussian::one()))
    }

    pub fn scale(&self, c: Gaussian) -> AlgMatrix {
        AlgMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn mul(&self, other: &AlgMatrix) -> Result<AlgMatrix> {
        self.check_ambient(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (r, c, k) = (self.rows, other.cols, self.cols);
        let entries = (0..r * c)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / c, idx % c);
                let mut acc = AlgebraElement::zero(self.n);
                for t in 0..k {
                    let a = self.get(i, t);
                    let b = other.get(t, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.convolve(b)?)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgMatrix {
            n: self.n,
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn adjoint(&self) -> AlgMatrix {
        let mut out = AlgMatrix::zeros(self.n, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).adjoint();
            }
        }
        out
    }

    /// Block diagonal `self ⊞ other`.
    pub fn dsum(&self, other: &AlgMatrix) -> Result<AlgMatrix> {
        self.check_ambient(other)?;
        let mut out = AlgMatrix::zeros(self.n, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * out.cols + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.entries[(self.rows + i) * out.cols + self.cols + j] = other.get(i, j).clone();
            }
        }
        Ok(out)
    }

    /// `self ⊞ 0` up to the given shape.
    pub fn pad(&self, rows: usize, cols: usize) -> AlgMatrix {
        let rows = rows.max(self.rows);
        let cols = cols.max(self.cols);
        self.dsum(&AlgMatrix::zeros(self.n, rows - self.rows, cols - self.cols))
            .expect("same ambient")
    }

    /// `self ⊞ 1` up to the given size; `self` must be square.
    pub fn pad_identity(&self, size: usize) -> AlgMatrix {
        let extra = size.saturating_sub(self.rows);
        self.dsum(&AlgMatrix::identity(self.n, extra)).expect("same ambient")
    }

    /// Kronecker product with a single element placed on the given side:
    /// each entry `a` becomes `e ⊗ a` (left) or `a ⊗ e` (right).
    pub fn tensor_elem(&self, e: &AlgebraElement, left: bool) -> AlgMatrix {
        AlgMatrix {
            n: self.n + e.n(),
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|a| if left { e.tensor(a) } else { a.tensor(e) })
                .collect(),
        }
    }

    pub fn equals(&self, other: &AlgMatrix, mode: Mode) -> bool {
        if self.n != other.n || self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        match mode {
            Mode::Exact => self == other,
            Mode::ModCompact => self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.quotient_equal(b).unwrap_or(false)),
        }
    }

    pub fn is_idempotent(&self, mode: Mode) -> bool {
        self.is_square() && self.mul(self).is_ok_and(|sq| sq.equals(self, mode))
    }

    pub fn is_self_adjoint(&self, mode: Mode) -> bool {
        self.is_square() && self.adjoint().equals(self, mode)
    }

    pub fn is_projection(&self, mode: Mode) -> bool {
        self.is_self_adjoint(mode) && self.is_idempotent(mode)
    }

    pub fn is_unitary(&self, mode: Mode) -> bool {
        if !self.is_square() {
            return false;
        }
        let id = AlgMatrix::identity(self.n, self.rows);
        let a = self.adjoint();
        a.mul(self).is_ok_and(|x| x.equals(&id, mode)) && self.mul(&a).is_ok_and(|x| x.equals(&id, mode))
    }

    pub fn is_partial_isometry(&self, mode: Mode) -> bool {
        self.mul(&self.adjoint())
            .and_then(|x| x.mul(self))
            .is_ok_and(|x| x.equals(self, mode))
    }

    /// Sum of diagonal traces, `None` when some diagonal trace is infinite.
    pub fn trace(&self) -> Option<Gaussian> {
        let mut total = Gaussian::zero();
        for i in 0..self.rows.min(self.cols) {
            total += self.get(i, i).trace()?;
        }
        Some(total)
    }

    /// Rank of a projection, read off as its trace.
    pub fn rank(&self) -> Result<ExtNat> {
        if !self.is_projection(Mode::Exact) {
            return Err(Error::NotAProjection);
        }
        trace_to_rank(self.trace())
    }

    /// Entrywise restriction to a face, evaluated at `z = 1`.
    pub fn symbol_at_one(&self, pinned: &[usize]) -> Result<AlgMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok(e.restrict_sigma(pinned)?.evaluate_at_one()))
            .collect::<Result<Vec<_>>>()?;
        let n = entries.first().map_or(self.n - pinned.len(), AlgebraElement::n);
        Ok(AlgMatrix {
            n,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Human-readable grid, one row per line.
    pub fn pretty(&self) -> String {
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let c = &cells[i * self.cols + j];
                    format!("{c}{}", " ".repeat(width - c.chars().count()))
                })
                .collect();
            out.push_str(&format!("[ {} ]\n", row.join(" | ")));
        }
        out
    }
}

/// Aligns `u` and `p` to a common size: `u ⊞ 1`, `p ⊞ 0`.
fn align(u: &AlgMatrix, p: &AlgMatrix) -> Result<(AlgMatrix, AlgMatrix)> {
    if !u.is_square() || !p.is_square() {
        return Err(Error::ShapeMismatch("conjugation needs square matrices".into()));
    }
    u.check_ambient(p)?;
    let size = u.rows.max(p.rows);
    Ok((u.pad_identity(size), p.pad(size, size)))
}

/// `u p u*` for a unitary `u` (checked in the given mode).
pub fn conjugate(u: &AlgMatrix, p: &AlgMatrix, mode: Mode) -> Result<AlgMatrix> {
    let (u, p) = align(u, p)?;
    if !u.is_unitary(mode) {
        return Err(Error::NotInvertible);
    }
    u.mul(&p)?.mul(&u.adjoint())
}

/// `u p u⁻¹` with an explicit two-sided inverse (checked in the given mode).
pub fn conjugate_with_inverse(u: &AlgMatrix, u_inv: &AlgMatrix, p: &AlgMatrix, mode: Mode) -> Result<AlgMatrix> {
    let (u, p) = align(u, p)?;
    let (u_inv, _) = align(u_inv, &p)?;
    if u.rows != u_inv.rows {
        return Err(Error::ShapeMismatch("inverse of a different size".into()));
    }
    let id = AlgMatrix::identity(u.n, u.rows);
    if !u.mul(&u_inv)?.equals(&id, mode) || !u_inv.mul(&u)?.equals(&id, mode) {
        return Err(Error::NotInvertible);
    }
    u.mul(&p)?.mul(&u_inv)
}

/// True iff the unitary `witness` conjugates `p` onto `q` (zero-padded to a
/// common size) in the given mode.
pub fn verify_equivalence(p: &AlgMatrix, q: &AlgMatrix, witness: &AlgMatrix, mode: Mode) -> bool {
    let size = p.rows.max(q.rows).max(witness.rows);
    let p = p.pad(size, size);
    let q = q.pad(size, size);
    match conjugate(witness, &p, mode) {
        Ok(r) => r.equals(&q, mode),
        Err(_) => false,
    }
}

impl fmt::Display for AlgMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<AlgebraElement>>,
}

impl Serialize for AlgMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect();
        MatrixRepr {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        let m = AlgMatrix::from_rows(r.n, r.entries).map_err(serde::de::Error::custom)?;
        if m.rows != r.rows || m.cols != r.cols {
            return Err(serde::de::Error::custom("declared shape does not match entries"));
        }
        Ok(m)
    }
}
