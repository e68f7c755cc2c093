//! Check records, parameter bounds and the one-shot identity suite.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gadgets::verify_gadget_identities;
use crate::ktheory::{rank_of_class, v, K0Class};
use crate::line_bundles::{class_of_l, decompose_l, decompose_l_both, module_action_checks, NuTable, Route};
use crate::monoid::{absorption_chain, enumerate_reduced, Ambient, ShuffleIndex};

/// Outcome of a single identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub group: String,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn pass(group: &str, name: impl Into<String>) -> Self {
        CheckResult {
            group: group.to_string(),
            name: name.into(),
            passed: true,
            detail: None,
        }
    }

    pub fn fail(group: &str, name: impl Into<String>, detail: String) -> Self {
        CheckResult {
            group: group.to_string(),
            name: name.into(),
            passed: false,
            detail: Some(detail),
        }
    }

    pub fn from_bool(group: &str, name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Self {
        if ok {
            CheckResult::pass(group, name)
        } else {
            CheckResult::fail(group, name, detail())
        }
    }
}

/// Parameter ranges for the verification suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// `|k|` range for `χ_{B_k}`.
    pub k_max: i64,
    /// `r` range for `χ_{B'_{-r}}`.
    pub r_max: u64,
    /// Matrix size range for `U_{k,N}` and `U_l`.
    pub ukn_k_max: usize,
    /// `N` range for `U_{k,N}`.
    pub ukn_n_max: u64,
    /// `l` range for `U_l`.
    pub ul_max: u64,
    /// `k` range for `u_k`.
    pub uk_max: u64,
    /// Largest weight in absorption chains.
    pub weight_max: usize,
    /// Random elements sampled per module-action check.
    pub samples: usize,
    /// `m, l` range for the `ν` table.
    pub nu_max: u64,
    /// `|k|` range for line-bundle decompositions.
    pub lb_k_max: i64,
    pub seed: u64,
}

impl Bounds {
    pub fn quick() -> Self {
        Bounds {
            k_max: 2,
            r_max: 2,
            ukn_k_max: 3,
            ukn_n_max: 2,
            ul_max: 2,
            uk_max: 2,
            weight_max: 1,
            samples: 4,
            nu_max: 10,
            lb_k_max: 3,
            seed: 7,
        }
    }

    pub fn full() -> Self {
        Bounds {
            k_max: 3,
            r_max: 3,
            ukn_k_max: 4,
            ukn_n_max: 3,
            ul_max: 3,
            uk_max: 3,
            weight_max: 2,
            samples: 12,
            nu_max: 25,
            lb_k_max: 6,
            seed: 7,
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let bad = || Error::Parse(format!("bad value {value:?} for bound {key}"));
        match key {
            "k" | "k_max" => self.k_max = value.parse().map_err(|_| bad())?,
            "r" | "r_max" => self.r_max = value.parse().map_err(|_| bad())?,
            "ukn_k" | "ukn_k_max" => self.ukn_k_max = value.parse().map_err(|_| bad())?,
            "ukn_n" | "ukn_n_max" => self.ukn_n_max = value.parse().map_err(|_| bad())?,
            "ul" | "ul_max" => self.ul_max = value.parse().map_err(|_| bad())?,
            "uk" | "uk_max" => self.uk_max = value.parse().map_err(|_| bad())?,
            "weight" | "weight_max" => self.weight_max = value.parse().map_err(|_| bad())?,
            "samples" => self.samples = value.parse().map_err(|_| bad())?,
            "nu" | "nu_max" => self.nu_max = value.parse().map_err(|_| bad())?,
            "lb_k" | "lb_k_max" => self.lb_k_max = value.parse().map_err(|_| bad())?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            _ => return Err(Error::Parse(format!("unknown bound {key:?}"))),
        }
        Ok(())
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            k_max: 3,
            r_max: 3,
            weight_max: 2,
            samples: 8,
            nu_max: 25,
            lb_k_max: 6,
            ..Bounds::quick()
        }
    }
}

/// Accepts `quick`, `default`, `full`, or a comma-separated list of
/// `key=value` overrides applied to the default preset (optionally prefixed
/// by a preset name, as in `quick,k=1`).
impl FromStr for Bounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut b = Bounds::default();
        for (i, part) in s.split(',').map(str::trim).filter(|p| !p.is_empty()).enumerate() {
            match (i, part) {
                (0, "quick") => b = Bounds::quick(),
                (0, "default") => b = Bounds::default(),
                (0, "full") => b = Bounds::full(),
                _ => {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
                    b.set(k.trim(), v.trim())?;
                }
            }
        }
        Ok(b)
    }
}

/// Aggregated result of a verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub n: usize,
    pub bounds: Bounds,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// Pass/fail counts per group, in first-appearance order.
    pub fn by_group(&self) -> Vec<(String, usize, usize)> {
        let mut out: Vec<(String, usize, usize)> = Vec::new();
        for c in &self.checks {
            let idx = match out.iter().position(|(g, _, _)| *g == c.group) {
                Some(i) => i,
                None => {
                    out.push((c.group.clone(), 0, 0));
                    out.len() - 1
                }
            };
            if c.passed {
                out[idx].1 += 1;
            } else {
                out[idx].2 += 1;
            }
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (group, pass, fail) in self.by_group() {
            let tag = if fail == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {group}: {pass} passed, {fail} failed")?;
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            writeln!(f, "  failed [{}] {}", c.group, c.name)?;
            if let Some(d) = &c.detail {
                for line in d.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        write!(f, "total: {} passed, {} failed", self.passed(), self.failed())
    }
}

fn absorption_checks(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "absorption";
    let mut out = Vec::new();
    for a in ShuffleIndex::all(n) {
        for sub in ShuffleIndex::all(n).filter(|s| s.precedes(&a)) {
            for l in 1..=bounds.weight_max {
                for l_sub in 1..=bounds.weight_max {
                    let name = format!("n={n}: {l}*{a} + {l_sub}*{sub} ∼ {l}*{a}");
                    out.push(match absorption_chain(n, a, l, sub, l_sub) {
                        Ok(c) => CheckResult::from_bool(group, name, c.verify(), || {
                            format!("witness of {} steps does not conjugate", c.steps)
                        }),
                        Err(e) => CheckResult::fail(group, name, e.to_string()),
                    });
                }
            }
        }
    }
    out
}

fn rho_checks(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "rho";
    let mut out = Vec::new();
    for ambient in [Ambient::Toeplitz, Ambient::Sphere] {
        let sums = match enumerate_reduced(ambient, n, bounds.weight_max.max(1)) {
            Ok(s) => s,
            Err(e) => {
                out.push(CheckResult::fail(
                    group,
                    format!("{ambient} n={n}: enumerate"),
                    e.to_string(),
                ));
                continue;
            }
        };
        let mut seen = std::collections::HashMap::new();
        let mut clash = None;
        for s in &sums {
            if let Some(prev) = seen.insert(s.rho(), s.clone()) {
                clash.get_or_insert(format!("{prev} and {s}"));
            }
        }
        out.push(CheckResult::from_bool(
            group,
            format!("{ambient} n={n}: ρ injective on {} reduced sums", sums.len()),
            clash.is_none(),
            || clash.clone().unwrap_or_default(),
        ));
        let mismatch = sums.iter().find(|s| s.measured_rho().ok().as_ref() != Some(&s.rho()));
        out.push(CheckResult::from_bool(
            group,
            format!("{ambient} n={n}: restriction ranks reproduce ρ"),
            mismatch.is_none(),
            || format!("{}", mismatch.expect("some mismatch")),
        ));
    }
    out
}

fn nu_checks(bounds: &Bounds) -> Vec<CheckResult> {
    let group = "nu";
    let t = NuTable::new(bounds.nu_max, bounds.nu_max);
    let mismatch = t.first_mismatch();
    let mut pascal_ok = true;
    for m in 2..=bounds.nu_max {
        for l in 2..=bounds.nu_max {
            let lhs = t.get(m, l).cloned();
            let rhs = t.get(m - 1, l).zip(t.get(m, l - 1)).map(|(a, b)| a + b);
            pascal_ok &= lhs == rhs;
        }
    }
    vec![
        CheckResult::from_bool(
            group,
            format!("recursion = C(m+l-1,m) for m,l ≤ {}", bounds.nu_max),
            mismatch.is_none(),
            || format!("first mismatch at {mismatch:?}"),
        ),
        CheckResult::from_bool(group, "Pascal identity", pascal_ok, || "Pascal identity fails".into()),
    ]
}

fn line_bundle_checks(n: usize, bounds: &Bounds) -> Vec<CheckResult> {
    let group = "line bundles";
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for k in -bounds.lb_k_max..=bounds.lb_k_max {
        let name = format!("n={n} k={k}: rank of L_k is 1");
        out.push(match class_of_l(n, k) {
            Ok(c) => CheckResult::from_bool(group, name, rank_of_class(&c) == 1, || c.to_string()),
            Err(e) => CheckResult::fail(group, name, e.to_string()),
        });
        if n > 2 && k < 0 {
            let name = format!("n={n} k={k}: closed form = A-recursion");
            out.push(match decompose_l_both(n, k) {
                Ok((a, b)) => CheckResult::from_bool(group, name, a == b, || format!("{a:?} vs {b:?}")),
                Err(e) => CheckResult::fail(group, name, e.to_string()),
            });
        }
        if n == 2 && k < 0 {
            let ok = decompose_l(n, k).is_ok_and(|d| d.route == Route::Recursion);
            out.push(CheckResult::from_bool(
                group,
                format!("n=2 k={k}: decomposition derived by recursion"),
                ok,
                || "unexpected route".into(),
            ));
        }
    }
    let relation = class_of_l(3, 1)
        .and_then(|a| Ok(a.add(&class_of_l(3, -1)?)))
        .map(|c| c.sub(&K0Class::basis(3, 3).scale(2)));
    out.push(CheckResult::from_bool(
        group,
        "n=3: [L_1] + [L_-1] - 2[1] = (1,0,0)",
        relation.as_ref().is_ok_and(|c| *c == K0Class::new(vec![1, 0, 0])),
        || format!("{relation:?}"),
    ));
    out
}

fn k0_checks(n: usize) -> Vec<CheckResult> {
    let group = "k0";
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for k in 1..=10u64 {
        let name = format!("n={n} k={k}: v(n,k) = (…, -k, 1)");
        out.push(match v(n, k) {
            Ok(c) => CheckResult::from_bool(
                group,
                name,
                c.coords[n - 2] == -(k as i64) && c.coords[n - 1] == 1,
                || c.to_string(),
            ),
            Err(e) => CheckResult::fail(group, name, e.to_string()),
        });
    }
    out
}

/// Runs the whole identity suite for ambient `n`. Groups are evaluated
/// independently (in parallel when asked) and reported in a fixed order.
pub fn run_suite(n: usize, bounds: &Bounds, parallel: bool) -> Report {
    type Job<'a> = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|| verify_gadget_identities(n, bounds)),
        Box::new(|| {
            if n >= 2 {
                module_action_checks(n, bounds)
            } else {
                Vec::new()
            }
        }),
        Box::new(|| absorption_checks(n, bounds)),
        Box::new(|| rho_checks(n, bounds)),
        Box::new(|| nu_checks(bounds)),
        Box::new(|| line_bundle_checks(n, bounds)),
        Box::new(|| k0_checks(n)),
    ];
    let results: Vec<Vec<CheckResult>> = if parallel {
        jobs.par_iter().map(|j| j()).collect()
    } else {
        jobs.iter().map(|j| j()).collect()
    };
    Report {
        n,
        bounds: bounds.clone(),
        checks: results.into_iter().flatten().collect(),
    }
}
