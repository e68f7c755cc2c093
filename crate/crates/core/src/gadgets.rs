//! Named operators: shifts, finite and cofinite projections, matrix units,
//! standard projections, the rearranging unitaries and the partial
//! isometries of the line-bundle construction.
//!
//! Every constructor certifies its own output (unitarity, projection or
//! partial-isometry property) before returning it.

use serde::{Deserialize, Serialize};

use crate::cone_sets::{BoxRegion, ClopenSet};
use crate::error::{Error, Result};
use crate::groupoid::AlgebraElement;
use crate::matrix::{conjugate, AlgMatrix, Mode};
use crate::verify::{Bounds, CheckResult};

/// `S^k` on one coordinate; negative `k` gives `(S*)^{|k|}`.
pub fn shift_pow(k: i64) -> AlgebraElement {
    AlgebraElement::indicator(vec![k], BoxRegion::full(1)).expect("one coordinate")
}

/// `P_m`, the projection onto the first `m` basis vectors.
pub fn p_finite(m: u64) -> AlgebraElement {
    AlgebraElement::diagonal(vec![ClopenSet::below(m)])
}

/// `P_{-m} = I - P_m`.
pub fn p_cofinite(m: u64) -> AlgebraElement {
    AlgebraElement::diagonal(vec![ClopenSet::tail_from(m)])
}

/// Rank-one projection onto the basis vector `e_k`.
pub fn point_proj(k: u64) -> AlgebraElement {
    AlgebraElement::diagonal(vec![ClopenSet::singleton(k)])
}

/// `I^{⊗ slot-1} ⊗ e ⊗ I^{⊗ n-slot}` for a one-coordinate `e` (slot is 1-based).
pub fn on_slot(n: usize, slot: usize, e: &AlgebraElement) -> AlgebraElement {
    AlgebraElement::identity(slot - 1)
        .tensor(e)
        .tensor(&AlgebraElement::identity(n - slot))
}

/// The standard projection with identity on the coordinates in `a`
/// (1-based) and `P₁` elsewhere.
pub fn standard_elem(n: usize, a: &[usize]) -> AlgebraElement {
    AlgebraElement::diagonal(
        (1..=n)
            .map(|i| {
                if a.contains(&i) {
                    ClopenSet::full()
                } else {
                    ClopenSet::singleton(0)
                }
            })
            .collect(),
    )
}

/// Places a 2×2 block of elements at rows/columns `(a, b)` of an otherwise
/// identity matrix of the given size.
pub fn embed_block(n: usize, size: usize, a: usize, b: usize, block: [[AlgebraElement; 2]; 2]) -> AlgMatrix {
    let mut m = AlgMatrix::identity(n, size);
    let [[b00, b01], [b10, b11]] = block;
    m.set(a, a, b00).expect("in range");
    m.set(a, b, b01).expect("in range");
    m.set(b, a, b10).expect("in range");
    m.set(b, b, b11).expect("in range");
    m
}

/// The absorbing unitary `[[S, P₁], [0, S*]]` acting on `slot`; its adjoint
/// is the gadget `U = [[S*, 0], [P₁, S]]`.
pub fn absorber_block(n: usize, slot: usize) -> [[AlgebraElement; 2]; 2] {
    [
        [on_slot(n, slot, &shift_pow(1)), on_slot(n, slot, &p_finite(1))],
        [AlgebraElement::zero(n), on_slot(n, slot, &shift_pow(-1))],
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum GadgetSpec {
    Shift {
        n: usize,
        slot: usize,
        k: i64,
    },
    ProjFinite {
        n: usize,
        slot: usize,
        m: u64,
    },
    ProjCofinite {
        n: usize,
        slot: usize,
        m: u64,
    },
    /// `e_ij ⊗ 1` in a `size × size` matrix, 1-based indices.
    MatrixUnit {
        n: usize,
        size: usize,
        i: usize,
        j: usize,
    },
    StandardProj {
        n: usize,
        a: Vec<usize>,
        l: usize,
    },
    #[serde(rename = "U_prop3")]
    UProp3 {
        n: usize,
        slot: usize,
    },
    #[serde(rename = "U_kN")]
    UkN {
        n: usize,
        slot: usize,
        k: usize,
        big_n: u64,
    },
    #[serde(rename = "U_l")]
    Ul {
        n: usize,
        slot: usize,
        k: usize,
        l: u64,
    },
    #[serde(rename = "u_k")]
    Uk {
        n: usize,
        k: u64,
    },
    ChiB {
        n: usize,
        k: i64,
    },
    ChiBprime {
        n: usize,
        r: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Projection,
    Unitary,
    PartialIsometry,
}

impl GadgetSpec {
    pub fn n(&self) -> usize {
        match self {
            GadgetSpec::Shift { n, .. }
            | GadgetSpec::ProjFinite { n, .. }
            | GadgetSpec::ProjCofinite { n, .. }
            | GadgetSpec::MatrixUnit { n, .. }
            | GadgetSpec::StandardProj { n, .. }
            | GadgetSpec::UProp3 { n, .. }
            | GadgetSpec::UkN { n, .. }
            | GadgetSpec::Ul { n, .. }
            | GadgetSpec::Uk { n, .. }
            | GadgetSpec::ChiB { n, .. }
            | GadgetSpec::ChiBprime { n, .. } => *n,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            GadgetSpec::Shift { .. } => "Shift",
            GadgetSpec::ProjFinite { .. } => "ProjFinite",
            GadgetSpec::ProjCofinite { .. } => "ProjCofinite",
            GadgetSpec::MatrixUnit { .. } => "MatrixUnit",
            GadgetSpec::StandardProj { .. } => "StandardProj",
            GadgetSpec::UProp3 { .. } => "U_prop3",
            GadgetSpec::UkN { .. } => "U_kN",
            GadgetSpec::Ul { .. } => "U_l",
            GadgetSpec::Uk { .. } => "u_k",
            GadgetSpec::ChiB { .. } => "ChiB",
            GadgetSpec::ChiBprime { .. } => "ChiBprime",
        }
    }

    pub fn certificate(&self) -> Certificate {
        match self {
            GadgetSpec::ProjFinite { .. } | GadgetSpec::ProjCofinite { .. } | GadgetSpec::StandardProj { .. } => {
                Certificate::Projection
            }
            GadgetSpec::MatrixUnit { i, j, .. } if i == j => Certificate::Projection,
            GadgetSpec::UProp3 { .. } | GadgetSpec::UkN { .. } | GadgetSpec::Ul { .. } | GadgetSpec::Uk { .. } => {
                Certificate::Unitary
            }
            _ => Certificate::PartialIsometry,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let n = self.n();
        if n == 0 {
            return bad("n must be at least 1".into());
        }
        match self {
            GadgetSpec::Shift { slot, .. }
            | GadgetSpec::ProjFinite { slot, .. }
            | GadgetSpec::ProjCofinite { slot, .. }
            | GadgetSpec::UProp3 { slot, .. }
            | GadgetSpec::UkN { slot, .. }
            | GadgetSpec::Ul { slot, .. }
                if *slot == 0 || *slot > n =>
            {
                bad(format!("slot {slot} outside 1..={n}"))
            }
            GadgetSpec::MatrixUnit { size, i, j, .. } if *i == 0 || *j == 0 || *i > *size || *j > *size => {
                bad(format!("matrix unit ({i},{j}) outside size {size}"))
            }
            GadgetSpec::StandardProj { a, l, .. } => {
                if *l == 0 {
                    return bad("weight l must be at least 1".into());
                }
                match a.iter().find(|&&i| i == 0 || i > n) {
                    Some(i) => bad(format!("coordinate {i} outside 1..={n}")),
                    None => Ok(()),
                }
            }
            GadgetSpec::UkN { k, big_n, .. } if *k == 0 || *big_n == 0 => bad("U_kN needs k ≥ 1 and N ≥ 1".into()),
            GadgetSpec::Ul { k, .. } if *k < 2 => bad("U_l needs k ≥ 2".into()),
            GadgetSpec::Uk { k, .. } if n < 2 || *k == 0 => bad("u_k needs n ≥ 2 and k ≥ 1".into()),
            GadgetSpec::ChiBprime { r, .. } if n < 2 || *r == 0 => bad("ChiBprime needs n ≥ 2 and r > 0".into()),
            _ => Ok(()),
        }
    }

    fn construct(&self) -> AlgMatrix {
        let n = self.n();
        match self {
            GadgetSpec::Shift { slot, k, .. } => AlgMatrix::scalar(on_slot(n, *slot, &shift_pow(*k))),
            GadgetSpec::ProjFinite { slot, m, .. } => AlgMatrix::scalar(on_slot(n, *slot, &p_finite(*m))),
            GadgetSpec::ProjCofinite { slot, m, .. } => AlgMatrix::scalar(on_slot(n, *slot, &p_cofinite(*m))),
            GadgetSpec::MatrixUnit { size, i, j, .. } => {
                let mut m = AlgMatrix::zeros(n, *size, *size);
                m.set(i - 1, j - 1, AlgebraElement::identity(n)).expect("in range");
                m
            }
            GadgetSpec::StandardProj { a, l, .. } => {
                AlgMatrix::diag(n, vec![standard_elem(n, a); *l]).expect("same ambient")
            }
            GadgetSpec::UProp3 { slot, .. } => {
                let s = |k| on_slot(n, *slot, &shift_pow(k));
                AlgMatrix::from_rows(
                    n,
                    vec![
                        vec![s(-1), AlgebraElement::zero(n)],
                        vec![on_slot(n, *slot, &p_finite(1)), s(1)],
                    ],
                )
                .expect("square")
            }
            GadgetSpec::UkN { slot, k, big_n, .. } => {
                let (k, big_n) = (*k, *big_n as i64);
                let on = |e: AlgebraElement| on_slot(n, *slot, &e);
                let mut m = AlgMatrix::zeros(n, k, k);
                for j in 1..k {
                    m.set(j - 1, j - 1, on(shift_pow(-big_n))).expect("in range");
                    let e = shift_pow((j as i64 - 1) * big_n)
                        .convolve(&p_finite(big_n as u64))
                        .expect("n = 1");
                    m.set(k - 1, j - 1, on(e)).expect("in range");
                }
                m.set(k - 1, k - 1, on(shift_pow((k as i64 - 1) * big_n)))
                    .expect("in range");
                m
            }
            GadgetSpec::Ul { slot, k, l, .. } => {
                let k = *k;
                let on = |e: AlgebraElement| on_slot(n, *slot, &e);
                let mut m = AlgMatrix::identity(n, k);
                m.set(0, 0, on(shift_pow(*l as i64))).expect("in range");
                m.set(0, k - 1, on(p_finite(*l))).expect("in range");
                m.set(k - 1, k - 1, on(shift_pow(-(*l as i64)))).expect("in range");
                m
            }
            GadgetSpec::Uk { k, .. } => {
                let ip = AlgebraElement::identity(n - 2);
                let one = AlgebraElement::identity(1);
                let kk = *k as i64;
                let two = |a: &AlgebraElement, b: &AlgebraElement| ip.tensor(a).tensor(b);
                AlgMatrix::from_rows(
                    n,
                    vec![
                        vec![two(&one, &p_finite(*k)), two(&shift_pow(-kk), &shift_pow(kk))],
                        vec![two(&shift_pow(kk), &shift_pow(-kk)), two(&p_finite(*k), &one)],
                    ],
                )
                .expect("square")
            }
            GadgetSpec::ChiB { k, .. } => {
                let mut m = vec![0; n];
                m[n - 1] = *k;
                AlgMatrix::scalar(AlgebraElement::indicator(m, BoxRegion::full(n)).expect("dimension n"))
            }
            GadgetSpec::ChiBprime { r, .. } => {
                let mut m = vec![0; n];
                m[n - 2] = -(*r as i64);
                let mut sets = vec![ClopenSet::full(); n - 2];
                sets.push(ClopenSet::tail_from(*r));
                sets.push(ClopenSet::singleton(0));
                AlgMatrix::scalar(AlgebraElement::indicator(m, BoxRegion::from_box(sets)).expect("dimension n"))
            }
        }
    }

    /// Documented degree for homogeneous gadgets.
    pub fn expected_degree(&self) -> Option<i64> {
        match self {
            GadgetSpec::Shift { k, .. } | GadgetSpec::ChiB { k, .. } => Some(*k),
            GadgetSpec::ChiBprime { r, .. } => Some(-(*r as i64)),
            GadgetSpec::ProjFinite { .. }
            | GadgetSpec::ProjCofinite { .. }
            | GadgetSpec::MatrixUnit { .. }
            | GadgetSpec::StandardProj { .. } => Some(0),
            _ => None,
        }
    }
}

pub fn certify(m: &AlgMatrix, cert: Certificate) -> bool {
    match cert {
        Certificate::Projection => m.is_projection(Mode::Exact),
        Certificate::Unitary => m.is_unitary(Mode::Exact),
        Certificate::PartialIsometry => m.is_partial_isometry(Mode::Exact),
    }
}

/// The common degree of all nonzero entries, if there is one.
pub fn matrix_degree(m: &AlgMatrix) -> Option<i64> {
    let mut degree = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            for d in m.get(i, j).degree_split().into_keys() {
                match degree {
                    None => degree = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
    }
    degree
}

/// Builds and certifies a gadget.
pub fn build(spec: &GadgetSpec) -> Result<AlgMatrix> {
    spec.validate()?;
    let m = spec.construct();
    if !certify(&m, spec.certificate()) {
        return Err(Error::CertificationFailed(spec.label().into()));
    }
    if let Some(d) = spec.expected_degree() {
        if !m.get(0, 0).is_zero() && matrix_degree(&m) != Some(d) {
            return Err(Error::CertificationFailed(format!("{} (degree)", spec.label())));
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub params: GadgetSpec,
    pub shape: [usize; 2],
    pub degree: Option<i64>,
    pub certificate: Certificate,
    pub status: String,
}

/// One representative of every gadget family over `n` coordinates, each built
/// and certified.
pub fn catalog(n: usize) -> Vec<CatalogEntry> {
    let mut specs = vec![
        GadgetSpec::Shift { n, slot: n, k: 1 },
        GadgetSpec::ProjFinite { n, slot: n, m: 2 },
        GadgetSpec::ProjCofinite { n, slot: n, m: 2 },
        GadgetSpec::MatrixUnit { n, size: 2, i: 1, j: 2 },
        GadgetSpec::StandardProj { n, a: vec![1], l: 1 },
        GadgetSpec::UProp3 { n, slot: 1 },
        GadgetSpec::UkN {
            n,
            slot: 1,
            k: 3,
            big_n: 2,
        },
        GadgetSpec::Ul { n, slot: 1, k: 3, l: 2 },
        GadgetSpec::ChiB { n, k: 1 },
        GadgetSpec::ChiB { n, k: -1 },
    ];
    if n >= 2 {
        specs.push(GadgetSpec::Uk { n, k: 2 });
        specs.push(GadgetSpec::ChiBprime { n, r: 1 });
    }
    specs
        .into_iter()
        .map(|spec| {
            let (shape, degree, status) = match build(&spec) {
                Ok(m) => ([m.rows(), m.cols()], matrix_degree(&m), "certified".to_string()),
                Err(e) => ([0, 0], None, format!("failed: {e}")),
            };
            CatalogEntry {
                name: spec.label().to_string(),
                certificate: spec.certificate(),
                params: spec,
                shape,
                degree,
                status,
            }
        })
        .collect()
}

fn scalar_matrix(e: AlgebraElement) -> AlgMatrix {
    AlgMatrix::scalar(e)
}

fn equality_check(group: &str, name: String, got: Result<AlgMatrix>, want: &AlgMatrix, mode: Mode) -> CheckResult {
    match got {
        Ok(g) if g.equals(want, mode) => CheckResult::pass(group, name),
        Ok(g) => CheckResult::fail(group, name, format!("expected\n{}got\n{}", want.pretty(), g.pretty())),
        Err(e) => CheckResult::fail(group, name, e.to_string()),
    }
}

fn build_check(group: &str, spec: &GadgetSpec) -> (CheckResult, Option<AlgMatrix>) {
    let name = format!("build {}", serde_json::to_string(spec).expect("serializable"));
    match build(spec) {
        Ok(m) => (CheckResult::pass(group, name), Some(m)),
        Err(e) => (CheckResult::fail(group, name, e.to_string()), None),
    }
}

/// The absorbing unitary identities on every slot.
pub fn check_absorber(n: usize) -> Vec<CheckResult> {
    let group = "absorber";
    let mut out = Vec::new();
    for slot in 1..=n {
        let spec = GadgetSpec::UProp3 { n, slot };
        let (c, u) = build_check(group, &spec);
        out.push(c);
        let Some(u) = u else { continue };
        let id = AlgMatrix::identity(n, 1);
        let p1 = scalar_matrix(on_slot(n, slot, &p_finite(1)));
        let zero = AlgMatrix::zeros(n, 1, 1);
        let lhs = p1.dsum(&id).expect("same ambient");
        let rhs = zero.dsum(&id).expect("same ambient");
        out.push(equality_check(
            group,
            format!("n={n} slot={slot}: U(P1⊞I)U* = 0⊞I"),
            conjugate(&u, &lhs, Mode::Exact),
            &rhs,
            Mode::Exact,
        ));
        let lhs = id.dsum(&p1).expect("same ambient");
        let rhs = id.dsum(&zero).expect("same ambient");
        out.push(equality_check(
            group,
            format!("n={n} slot={slot}: U*(I⊞P1)U = I⊞0"),
            conjugate(&u.adjoint(), &lhs, Mode::Exact),
            &rhs,
            Mode::Exact,
        ));
    }
    out
}

/// Rearrangement unitaries of the one-variable classification.
pub fn check_rearrangement(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "rearrangement";
    let mut out = Vec::new();
    let on = |e: AlgebraElement| on_slot(n, 1, &e);
    for k in 2..=bounds.ukn_k_max {
        for big_n in 1..=bounds.ukn_n_max {
            let (c, u) = build_check(group, &GadgetSpec::UkN { n, slot: 1, k, big_n });
            out.push(c);
            let Some(u) = u else { continue };
            for m in 0..k {
                // (⊞^m I ⊞ 0) ⊞ 0  ↦  (⊞^m I ⊞ 0) ⊞ P_{mN}
                let mut diag = vec![AlgebraElement::zero(n); k];
                for d in diag.iter_mut().take(m) {
                    *d = AlgebraElement::identity(n);
                }
                let p = AlgMatrix::diag(n, diag.clone()).expect("same ambient");
                diag[k - 1] = on(p_finite(m as u64 * big_n));
                let want = AlgMatrix::diag(n, diag.clone()).expect("same ambient");
                out.push(equality_check(
                    group,
                    format!("n={n} U_{{{k},{big_n}}} m={m}: standard part"),
                    conjugate(&u, &p, Mode::Exact),
                    &want,
                    Mode::Exact,
                ));
                if m >= 1 {
                    // A compact perturbation of the first block lands in the corner.
                    let mut p = p.clone();
                    p.set(0, 0, on(p_cofinite(1))).expect("in range");
                    let mut want = want.clone();
                    let corner = p_finite(m as u64 * big_n).sub(&p_finite(1)).expect("n = 1");
                    want.set(k - 1, k - 1, on(corner)).expect("in range");
                    out.push(equality_check(
                        group,
                        format!("n={n} U_{{{k},{big_n}}} m={m}: perturbed part"),
                        conjugate(&u, &p, Mode::Exact),
                        &want,
                        Mode::Exact,
                    ));
                }
            }
        }
    }
    for k in 2..=bounds.ukn_k_max {
        for l in 0..=bounds.ul_max {
            let (c, u) = build_check(group, &GadgetSpec::Ul { n, slot: 1, k, l });
            out.push(c);
            let Some(u) = u else { continue };
            for m in 1..k {
                let mut diag = vec![AlgebraElement::zero(n); k];
                for d in diag.iter_mut().take(m) {
                    *d = AlgebraElement::identity(n);
                }
                let want = AlgMatrix::diag(n, diag.clone()).expect("same ambient");
                diag[k - 1] = on(p_finite(l));
                let p = AlgMatrix::diag(n, diag).expect("same ambient");
                out.push(equality_check(
                    group,
                    format!("n={n} U_{l} k={k} m={m}: corner absorbed"),
                    conjugate(&u, &p, Mode::Exact),
                    &want,
                    Mode::Exact,
                ));
            }
        }
    }
    out
}

/// `u_k` is a self-adjoint unitary moving `(Î⊗e_kk)⊞0` to `0⊞(I'⊗P_{-k}⊗P₁)`.
pub fn check_uk(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "u_k";
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for k in 1..=bounds.uk_max {
        let (c, u) = build_check(group, &GadgetSpec::Uk { n, k });
        out.push(c);
        let Some(u) = u else { continue };
        let hat = AlgebraElement::identity(n - 1);
        let p = AlgMatrix::scalar(hat.tensor(&point_proj(k)))
            .dsum(&AlgMatrix::zeros(n, 1, 1))
            .expect("same ambient");
        let target = AlgebraElement::identity(n - 2)
            .tensor(&p_cofinite(k))
            .tensor(&p_finite(1));
        let want = AlgMatrix::zeros(n, 1, 1)
            .dsum(&AlgMatrix::scalar(target))
            .expect("same ambient");
        for mode in [Mode::ModCompact, Mode::Exact] {
            out.push(equality_check(
                group,
                format!("n={n} k={k}: u(Î⊗e_kk ⊞ 0)u* = 0 ⊞ I'⊗P_-k⊗P1 ({mode:?})"),
                conjugate(&u, &p, mode),
                &want,
                mode,
            ));
        }
        let self_adj = u.adjoint() == u;
        out.push(if self_adj {
            CheckResult::pass(group, format!("n={n} k={k}: u_k self-adjoint"))
        } else {
            CheckResult::fail(group, format!("n={n} k={k}: u_k self-adjoint"), "u* ≠ u".into())
        });
    }
    out
}

fn chi_product_check(
    group: &str,
    name: String,
    a: &AlgebraElement,
    b: &AlgebraElement,
    want: &AlgebraElement,
) -> CheckResult {
    let got = a.convolve(b).map(AlgMatrix::scalar);
    equality_check(group, name, got, &AlgMatrix::scalar(want.clone()), Mode::ModCompact)
}

/// The four product identities of `χ_{B_k}` for `|k| ≤ bounds.k_max`.
pub fn check_chi_b(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "chi_B";
    let mut out = Vec::new();
    let one = AlgebraElement::identity(n);
    for k in -bounds.k_max..=bounds.k_max {
        let (c, m) = build_check(group, &GadgetSpec::ChiB { n, k });
        out.push(c);
        let Some(m) = m else { continue };
        let chi = m.get(0, 0).clone();
        let star = chi.adjoint();
        let cof = |j: i64| AlgebraElement::identity(n - 1).tensor(&p_cofinite(j.unsigned_abs()));
        let (left, right) = if k >= 0 {
            (one.clone(), cof(k))
        } else {
            (cof(k), one.clone())
        };
        out.push(chi_product_check(
            group,
            format!("n={n} k={k}: χ* χ"),
            &star,
            &chi,
            &left,
        ));
        out.push(chi_product_check(
            group,
            format!("n={n} k={k}: χ χ*"),
            &chi,
            &star,
            &right,
        ));
        let deg_ok = chi.degree() == Some(k) && star.degree() == Some(-k);
        let name = format!("n={n} k={k}: degrees of χ and χ*");
        out.push(if deg_ok {
            CheckResult::pass(group, name)
        } else {
            CheckResult::fail(group, name, format!("{:?} / {:?}", chi.degree(), star.degree()))
        });
    }
    out
}

/// The two product identities of `χ_{B'_{-r}}` for `1 ≤ r ≤ bounds.r_max`.
pub fn check_chi_b_prime(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "chi_B'";
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for r in 1..=bounds.r_max {
        let (c, m) = build_check(group, &GadgetSpec::ChiBprime { n, r });
        out.push(c);
        let Some(m) = m else { continue };
        let chi = m.get(0, 0).clone();
        let star = chi.adjoint();
        let left = AlgebraElement::identity(n - 2)
            .tensor(&p_cofinite(r))
            .tensor(&p_finite(1));
        let right = AlgebraElement::identity(n - 1).tensor(&p_finite(1));
        out.push(chi_product_check(
            group,
            format!("n={n} r={r}: χ'* χ'"),
            &star,
            &chi,
            &left,
        ));
        out.push(chi_product_check(
            group,
            format!("n={n} r={r}: χ' χ'*"),
            &chi,
            &star,
            &right,
        ));
        let name = format!("n={n} r={r}: degree of χ'");
        out.push(if chi.degree() == Some(-(r as i64)) {
            CheckResult::pass(group, name)
        } else {
            CheckResult::fail(group, name, format!("{:?}", chi.degree()))
        });
    }
    out
}

/// Runs every gadget identity for ambient `n` within the bounds.
pub fn verify_gadget_identities(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let mut out = check_absorber(n);
    out.extend(check_rearrangement(n, bounds));
    out.extend(check_uk(n, bounds));
    out.extend(check_chi_b(n, bounds));
    out.extend(check_chi_b_prime(n, bounds));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_sets::ExtNat;

    #[test]
    fn shift_symbol() {
        let m = build(&GadgetSpec::Shift { n: 1, slot: 1, k: 1 }).unwrap();
        assert_eq!(
            m.get(0, 0),
            &AlgebraElement::indicator(vec![1], BoxRegion::full(1)).unwrap()
        );
        let sym = m.get(0, 0).restrict_sigma(&[0]).unwrap();
        assert_eq!(sym.terms().keys().next(), Some(&vec![1]));
    }

    #[test]
    fn standard_projection_n2() {
        let m = build(&GadgetSpec::StandardProj { n: 2, a: vec![1], l: 1 }).unwrap();
        assert_eq!(
            m.get(0, 0),
            &AlgebraElement::diagonal(vec![ClopenSet::full(), ClopenSet::singleton(0)])
        );
        assert_eq!(m.rank().unwrap(), ExtNat::Inf);
    }

    #[test]
    fn chi_b_negative() {
        let m = build(&GadgetSpec::ChiB { n: 2, k: -2 }).unwrap();
        let want = AlgebraElement::indicator(
            vec![0, -2],
            BoxRegion::from_box(vec![ClopenSet::full(), ClopenSet::tail_from(2)]),
        )
        .unwrap();
        assert_eq!(m.get(0, 0), &want);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            build(&GadgetSpec::ChiBprime { n: 1, r: 1 }),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build(&GadgetSpec::ChiBprime { n: 3, r: 0 }),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build(&GadgetSpec::Shift { n: 2, slot: 3, k: 1 }),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn unitaries_certify() {
        for spec in [
            GadgetSpec::UProp3 { n: 1, slot: 1 },
            GadgetSpec::UkN {
                n: 1,
                slot: 1,
                k: 4,
                big_n: 3,
            },
            GadgetSpec::Ul {
                n: 1,
                slot: 1,
                k: 3,
                l: 2,
            },
            GadgetSpec::Uk { n: 3, k: 2 },
        ] {
            assert!(build(&spec).is_ok(), "{spec:?}");
        }
    }

    #[test]
    fn chi_identities_hold_exactly() {
        for n in 2..=3 {
            for k in -3i64..=3 {
                let chi = build(&GadgetSpec::ChiB { n, k }).unwrap();
                let star = chi.adjoint();
                let cof = AlgMatrix::scalar(AlgebraElement::identity(n - 1).tensor(&p_cofinite(k.unsigned_abs())));
                let one = AlgMatrix::identity(n, 1);
                let (l, r) = if k >= 0 { (one, cof) } else { (cof, one) };
                assert_eq!(star.mul(&chi).unwrap(), l);
                assert_eq!(chi.mul(&star).unwrap(), r);
            }
        }
    }

    #[test]
    fn identity_suite_n1_n2() {
        let b = Bounds::quick();
        for n in 1..=2 {
            for c in verify_gadget_identities(n, &b) {
                assert!(c.passed, "{c:?}");
            }
        }
    }

    #[test]
    fn catalog_all_certified() {
        for e in catalog(2) {
            assert_eq!(e.status, "certified", "{e:?}");
        }
    }
}
