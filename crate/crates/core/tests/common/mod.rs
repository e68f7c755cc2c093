//! Oracles shared by the integration tests: a truncated operator model of the
//! one-variable Toeplitz algebra and exact complex-rational linear algebra.
//! Elements are read back through their JSON form so that nothing here goes
//! through the library's own membership or arithmetic code.
#![allow(dead_code)]

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::Zero;
use qps_core::{AlgMatrix, AlgebraElement};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct C {
    pub re: Rational64,
    pub im: Rational64,
}

impl C {
    pub fn int(re: i64, im: i64) -> Self {
        C {
            re: Rational64::from_integer(re),
            im: Rational64::from_integer(im),
        }
    }

    pub fn zero() -> Self {
        C::int(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn inv(&self) -> C {
        let d = self.re * self.re + self.im * self.im;
        C {
            re: self.re / d,
            im: -self.im / d,
        }
    }
}

impl Add for C {
    type Output = C;
    fn add(self, o: C) -> C {
        C {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for C {
    type Output = C;
    fn sub(self, o: C) -> C {
        C {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for C {
    type Output = C;
    fn neg(self) -> C {
        C {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for C {
    type Output = C;
    fn mul(self, o: C) -> C {
        C {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

pub type Mat = Vec<Vec<C>>;

/// A clopen subset of ℕ ∪ {∞}: finite points plus an optional tail `[t, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawSet {
    pub finite: Vec<u64>,
    pub tail: Option<u64>,
}

impl RawSet {
    pub fn has(&self, x: u64) -> bool {
        self.finite.contains(&x) || self.tail.is_some_and(|t| x >= t)
    }

    pub fn has_infinity(&self) -> bool {
        self.tail.is_some()
    }

    pub fn max_finite(&self) -> u64 {
        self.finite.iter().copied().chain(self.tail).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct RawTerm {
    pub c: C,
    pub m: Vec<i64>,
    pub boxes: Vec<Vec<RawSet>>,
}

impl RawTerm {
    /// Whether the source point `x` (finite coordinates) lies in the support.
    pub fn supports(&self, x: &[u64]) -> bool {
        self.boxes.iter().any(|b| b.iter().zip(x).all(|(s, &xi)| s.has(xi)))
    }
}

fn int(v: &Value) -> i64 {
    v.as_i64().expect("integer")
}

/// Decodes an element from its JSON wire form.
pub fn raw_terms(e: &AlgebraElement) -> Vec<RawTerm> {
    let v = serde_json::to_value(e).unwrap();
    v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let c = &t["c"];
            let c = C {
                re: Rational64::new(int(&c[0]), int(&c[1])),
                im: Rational64::new(int(&c[2]), int(&c[3])),
            };
            let m = t["m"].as_array().unwrap().iter().map(int).collect();
            let boxes = t["boxes"]
                .as_array()
                .unwrap()
                .iter()
                .map(|b| {
                    b.as_array()
                        .unwrap()
                        .iter()
                        .map(|s| RawSet {
                            finite: s["finite"]
                                .as_array()
                                .unwrap()
                                .iter()
                                .map(|x| x.as_u64().unwrap())
                                .collect(),
                            tail: s["tail"].as_u64(),
                        })
                        .collect()
                })
                .collect();
            RawTerm { c, m, boxes }
        })
        .collect()
}

/// Truncated `size × size` operator of a one-variable element: the term
/// `c·χ(m, S)` contributes `c` at `(x+m, x)` for every `x ∈ S`.
pub fn operator(terms: &[RawTerm], size: usize) -> Mat {
    let mut out = vec![vec![C::zero(); size]; size];
    for t in terms {
        assert_eq!(t.m.len(), 1, "operator model is one-variable");
        for x in 0..size as i64 {
            let y = x + t.m[0];
            if y < 0 || y >= size as i64 || !t.supports(&[x as u64]) {
                continue;
            }
            out[y as usize][x as usize] = out[y as usize][x as usize] + t.c;
        }
    }
    out
}

pub fn operator_of(e: &AlgebraElement, size: usize) -> Mat {
    operator(&raw_terms(e), size)
}

/// Block operator of a matrix over the one-variable algebra.
pub fn block_operator(m: &AlgMatrix, size: usize) -> Mat {
    let mut out = vec![vec![C::zero(); size * m.cols()]; size * m.rows()];
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let b = operator_of(m.get(i, j), size);
            for (r, row) in b.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    out[i * size + r][j * size + c] = *v;
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(C::zero(), |acc, k| acc + row[k] * b[k][j]))
                .collect()
        })
        .collect()
}

/// Value of the symbol of a one-variable element at `z = 1`: the sum of the
/// coefficients of terms whose support reaches infinity.
pub fn symbol_at_one(e: &AlgebraElement) -> C {
    raw_terms(e)
        .iter()
        .filter(|t| t.boxes.iter().any(|b| b.iter().all(RawSet::has_infinity)))
        .fold(C::zero(), |acc, t| acc + t.c)
}

pub fn symbol_matrix(m: &AlgMatrix) -> Mat {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| symbol_at_one(m.get(i, j))).collect())
        .collect()
}

/// Largest integer that any finite support or translation in `m` reaches.
pub fn reach(m: &AlgMatrix) -> u64 {
    let mut r = 0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            for t in raw_terms(m.get(i, j)) {
                let shift = t.m.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
                for b in &t.boxes {
                    for s in b {
                        r = r.max(s.max_finite() + shift);
                    }
                }
            }
        }
    }
    r
}

/// Rank by exact Gaussian elimination.
pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c] * inv;
                let pivot = a[r].clone();
                for (x, v) in a[i].iter_mut().zip(pivot).skip(c) {
                    *x = *x - f * v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn trace(m: &Mat) -> C {
    (0..m.len()).fold(C::zero(), |acc, i| acc + m[i][i])
}
