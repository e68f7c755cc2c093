//! `qps`: command-line front end to the exact Toeplitz-cube toolkit.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qps_core::gadgets::{build, catalog};
use qps_core::ktheory::{
    class_of_elementary, class_of_standard_sum, composition_series, cone_contains, csr_upper, gl0_threshold,
    rank_of_class, stable_rank,
};
use qps_core::line_bundles::{decompose_l, nu};
use qps_core::monoid::{classify_n1, equivalent, free_rank_threshold};
use qps_core::verify::run_suite;
use qps_core::{AlgMatrix, Ambient, Bounds, ElementaryProj, Error, GadgetSpec, K0Class, StandardSum};

#[derive(Parser, Debug)]
#[command(
    name = "qps",
    version,
    about = "Exact projections, K-theory and line bundles over Toeplitz cubes"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RankKind {
    Sr,
    Csr,
    Gl0,
    FreeRank,
}

#[derive(clap::Args, Debug)]
struct SumArgs {
    /// toeplitz, sphere or cpn.
    #[arg(long, default_value = "toeplitz")]
    ambient: Ambient,
    #[arg(long)]
    n: usize,
    /// A sum such as "2*{1,2} + {1}".
    sum: String,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Canonical reduced form of a sum of standard projections.
    Reduce(SumArgs),
    /// Rank vector of a sum, from the formula or (with --measured) from the realized matrix.
    Rho {
        #[command(flatten)]
        args: SumArgs,
        #[arg(long)]
        measured: bool,
    },
    /// Decide equivalence of two sums.
    Equiv {
        #[arg(long, default_value = "toeplitz")]
        ambient: Ambient,
        #[arg(long)]
        n: usize,
        left: String,
        right: String,
    },
    /// Diagonal matrix realizing a sum.
    Realize(SumArgs),
    /// Classify an idempotent over the one-variable Toeplitz algebra.
    #[command(name = "classify-n1")]
    ClassifyN1 {
        /// Path to a matrix JSON file, or "-" for standard input.
        matrix: Option<String>,
        /// Classify the realization of this sum instead.
        #[arg(long, conflicts_with = "matrix")]
        sum: Option<String>,
    },
    /// K₀ class of an elementary projection, or of a sum over the projective space.
    #[command(name = "k0-class")]
    K0Class {
        #[arg(long)]
        n: usize,
        #[arg(long, requires = "k")]
        slot: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long, conflicts_with_all = ["slot", "k"])]
        sum: Option<String>,
    },
    /// Positive-cone membership of a K₀ vector such as "1,-2,1".
    Cone {
        #[arg(allow_hyphen_values = true)]
        coords: String,
    },
    /// Stable-rank style invariants.
    Sr {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = RankKind::Sr)]
        kind: RankKind,
        #[arg(long, default_value = "toeplitz")]
        ambient: Ambient,
    },
    /// Composition series layers.
    Series {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "toeplitz")]
        ambient: Ambient,
    },
    /// The multiplicity ν(m, l).
    Nu {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        l: u64,
    },
    /// Decomposition of the line bundle L_k.
    Linebundle {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// Also realize every summand as a projection.
        #[arg(long)]
        realize: bool,
    },
    /// Catalog of gadgets, or one gadget built from a JSON spec.
    Gadgets {
        /// Ambient dimension of the catalog (default 2).
        #[arg(long)]
        n: Option<usize>,
        /// e.g. '{"name":"u_k","n":2,"k":1}'
        #[arg(long)]
        spec: Option<String>,
    },
    /// Run the exact identity suite.
    Verify {
        #[arg(long)]
        n: usize,
        /// quick, default, full, optionally followed by key=value overrides.
        #[arg(long, default_value = "default")]
        bounds: Bounds,
        #[arg(long)]
        parallel: bool,
    },
}

/// Rendered result of a subcommand.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output {
            text: text.into(),
            json,
            ok: true,
        }
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn parse_coords(s: &str) -> Result<Vec<i64>, Error> {
    s.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad coordinate {c:?}")))
        })
        .collect()
}

fn read_input(path: &str) -> Result<String, Error> {
    let mut buf = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(e.to_string()))?;
    } else {
        buf = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    }
    Ok(buf)
}

fn k0_json(c: &K0Class) -> Value {
    json!({ "n": c.n, "coords": c.coords, "rank": rank_of_class(c), "cone": cone_contains(c) })
}

fn run(cmd: Cmd) -> Result<Output, Error> {
    match cmd {
        Cmd::Reduce(a) => {
            let r = StandardSum::parse(a.ambient, a.n, &a.sum)?.reduce();
            Ok(Output::new(r.to_string(), to_value(&r)))
        }
        Cmd::Rho { args: a, measured } => {
            let s = StandardSum::parse(a.ambient, a.n, &a.sum)?;
            let rho = if measured { s.measured_rho()? } else { s.rho() };
            Ok(Output::new(rho.to_string(), to_value(&rho)))
        }
        Cmd::Equiv {
            ambient,
            n,
            left,
            right,
        } => {
            let s = StandardSum::parse(ambient, n, &left)?;
            let t = StandardSum::parse(ambient, n, &right)?;
            let eq = equivalent(&s, &t)?;
            Ok(Output::new(eq.to_string(), json!({ "equivalent": eq })))
        }
        Cmd::Realize(a) => {
            let m = StandardSum::parse(a.ambient, a.n, &a.sum)?.realize();
            Ok(Output::new(m.pretty(), to_value(&m)))
        }
        Cmd::ClassifyN1 { matrix, sum } => {
            let p = match (matrix, sum) {
                (_, Some(s)) => StandardSum::parse(Ambient::Toeplitz, 1, &s)?.realize(),
                (Some(path), None) => {
                    let text = read_input(&path)?;
                    serde_json::from_str::<AlgMatrix>(&text).map_err(|e| Error::Parse(e.to_string()))?
                }
                (None, None) => return Err(Error::InvalidParameter("give a matrix file, \"-\" or --sum".into())),
            };
            let c = classify_n1(&p)?;
            Ok(Output::new(c.to_string(), to_value(&c)))
        }
        Cmd::K0Class { n, slot, k, sum } => {
            let c = match (slot, k, sum) {
                (_, _, Some(s)) => class_of_standard_sum(&StandardSum::parse(Ambient::Cpn, n, &s)?)?,
                (slot, Some(k), None) => {
                    let e = ElementaryProj::new(n, slot.unwrap_or(n), k)?;
                    class_of_elementary(&e)
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "give --k (and optionally --slot), or --sum".into(),
                    ))
                }
            };
            Ok(Output::new(c.to_string(), k0_json(&c)))
        }
        Cmd::Cone { coords } => {
            let c = K0Class::new(parse_coords(&coords)?);
            let verdict = cone_contains(&c);
            Ok(Output::new(
                verdict.to_string(),
                json!({ "coords": c.coords, "verdict": verdict }),
            ))
        }
        Cmd::Sr { n, kind, ambient } => {
            let v = match kind {
                RankKind::Sr => stable_rank(n)?,
                RankKind::Csr => csr_upper(n)?,
                RankKind::Gl0 => gl0_threshold(n)?,
                RankKind::FreeRank => free_rank_threshold(ambient, n)?,
            };
            let name = to_value(&kind.to_possible_value().expect("named").get_name());
            Ok(Output::new(v.to_string(), json!({ "n": n, "kind": name, "value": v })))
        }
        Cmd::Series { n, ambient } => {
            let layers = composition_series(n, ambient)?;
            let text: Vec<String> = layers.iter().map(|l| l.to_string()).collect();
            Ok(Output::new(text.join("\n"), to_value(&layers)))
        }
        Cmd::Nu { m, l } => {
            let v = nu(m, l)?;
            Ok(Output::new(
                v.to_string(),
                json!({ "m": m, "l": l, "nu": v.to_string() }),
            ))
        }
        Cmd::Linebundle { n, k, realize } => {
            let d = decompose_l(n, k)?;
            let mut text = d.to_string();
            let mut value = to_value(&d);
            if realize {
                let parts = d.realize()?;
                let mut realized = Vec::new();
                for (t, e) in &parts {
                    text.push_str(&format!("\n  {t} = {e}"));
                    realized.push(json!({ "token": t.to_string(), "element": to_value(e) }));
                }
                value["realized"] = Value::Array(realized);
            }
            Ok(Output::new(text, value))
        }
        Cmd::Gadgets { n, spec: Some(spec) } => {
            let spec: GadgetSpec = serde_json::from_str(&spec).map_err(|e| Error::Parse(e.to_string()))?;
            if let Some(n) = n.filter(|&n| n != spec.n()) {
                return Err(Error::InvalidParameter(format!(
                    "--n {n} disagrees with the gadget's n = {}",
                    spec.n()
                )));
            }
            let m = build(&spec)?;
            Ok(Output::new(m.pretty(), to_value(&m)))
        }
        Cmd::Gadgets { n, spec: None } => {
            let entries = catalog(n.unwrap_or(2));
            let text: Vec<String> = entries
                .iter()
                .map(|e| {
                    let deg = e.degree.map_or("-".to_string(), |d| d.to_string());
                    format!(
                        "{:<14} {}x{}  degree {:<3} {:<16} {}",
                        e.name,
                        e.shape[0],
                        e.shape[1],
                        deg,
                        format!("{:?}", e.certificate),
                        e.status
                    )
                })
                .collect();
            let ok = entries.iter().all(|e| e.status == "certified");
            Ok(Output {
                text: text.join("\n"),
                json: to_value(&entries),
                ok,
            })
        }
        Cmd::Verify { n, bounds, parallel } => {
            if n == 0 {
                return Err(Error::InvalidParameter("n must be at least 1".into()));
            }
            let report = run_suite(n, &bounds, parallel);
            Ok(Output {
                text: report.to_string(),
                ok: report.all_passed(),
                json: to_value(&report),
            })
        }
    }
}

fn emit(out: &Output, format: Format, path: Option<&str>) -> io::Result<()> {
    let mut rendered = match format {
        Format::Text => out.text.clone(),
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable"),
    };
    rendered.push('\n');
    match path {
        Some(p) => fs::write(p, rendered),
        None => io::stdout().lock().write_all(rendered.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(out) => {
            if let Err(e) = emit(&out, cli.format, cli.out.as_deref()) {
                eprintln!("qps: {e}");
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("qps: {e}");
            ExitCode::from(1)
        }
    }
}
