//! `conekit` command-line front end.
//!
//! Every subcommand prints one report (pretty JSON, or CSV for scans and
//! identity suites) and exits with 0 (all checks pass), 1 (a verified
//! violation), 2 (input or usage error) or 3 (numerically indeterminate).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use conekit::geom::{edge_metric, space_form_box, vertex_metric, ModelChart};
use conekit::germ::{double_polyhedron, germ_param_dim, validate_germ, SingularGerm};
use conekit::indicial::{
    critical_window, friedrichs_filter, report_residual, roots_cone_oneform, roots_cone_scalar, roots_edge,
    roots_vertex, vertex_groups, IndicialReport, Window,
};
use conekit::normal_op::{bessel, gaussian_bump, green_apply, injectivity_scan, RadialGrid};
use conekit::par::Exec;
use conekit::polyrig::{build_regular, rigidity_check, AmbientSpace, Polyhedron, SolidKind, Verdict};
use conekit::spectra::{check_spectral_bounds, football_spectrum, oracle_football_spectrum, EigenvalueList};
use conekit::tensor::identities::{csv_header, csv_row};
use conekit::tensor::{deformation_basis, identity_suite, l2_classify, DeformationKind};
use conekit::{Curvature, Error};

const VERSION: &str = env!("CARGO_PKG_VERSION");

const SPECTRUM_AGREEMENT: f64 = 1e-8;
const INDICIAL_RESIDUAL: f64 = 1e-9;
const GREEN_RESIDUAL: f64 = 1e-6;
const GREEN_LOG: f64 = 1e-6;
const BESSEL_TABLE: f64 = 1e-12;
const BESSEL_WRONSKIAN: f64 = 1e-10;
const BESSEL_ASYMPTOTIC: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "conekit", version, about = "Cone-manifold geometry, spectra and rigidity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a singular-germ file for consistency.
    ValidateGerm {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Double a convex polyhedron into a singular germ.
    Double {
        file: PathBuf,
        /// Where to write the germ.
        #[arg(short = 'o', long = "output")]
        germ: PathBuf,
    },
    /// Write a regular solid as a polyhedron file.
    Solid {
        #[arg(long, value_parser = parse_solid)]
        kind: SolidKind,
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long, default_value_t = 1.0)]
        size: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Spectra of spherical cone-surfaces.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Indicial roots.
    #[command(subcommand)]
    Indicial(IndicialCmd),
    /// The edge normal operator.
    #[command(subcommand, name = "normal-op")]
    NormalOp(NormalOpCmd),
    /// Consistency checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// L² class of a standard-form deformation tensor.
    ClassifyDeformation {
        #[arg(long, value_parser = parse_kind)]
        kind: DeformationKind,
        #[arg(long, allow_negative_numbers = true, value_parser = parse_kappa)]
        kappa: Curvature,
        #[command(flatten)]
        out: Output,
    },
    /// Infinitesimal rigidity of a convex polyhedron.
    Rigidity {
        file: PathBuf,
        /// Relative rank tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Modified Bessel functions.
    #[command(subcommand)]
    Bessel(BesselCmd),
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Friedrichs spectrum of the football with the given cone angle.
    Football {
        #[arg(long, value_parser = parse_angle)]
        angle: f64,
        #[arg(long)]
        max: f64,
        /// Also run the shooting oracle and compare.
        #[arg(long)]
        oracle: bool,
        /// Print the plain `lambda multiplicity` exchange format instead.
        #[arg(long, conflicts_with = "oracle")]
        text: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum IndicialCmd {
    /// Scalar Laplacian at a 2D cone point.
    ConeScalar(ConeArgs),
    /// Hodge Laplacian on one-forms at a 2D cone point.
    ConeOneform(ConeArgs),
    /// Rough Laplacian at an edge.
    Edge(ConeArgs),
    /// Rough Laplacian at a vertex.
    Vertex {
        /// Link spectrum in `lambda multiplicity` format.
        #[arg(long, conflicts_with = "football", required_unless_present = "football")]
        spectrum: Option<PathBuf>,
        /// Use the football with this cone angle as the link.
        #[arg(long, value_parser = parse_angle)]
        football: Option<f64>,
        /// Spectrum cutoff for --football.
        #[arg(long, default_value_t = 20.0)]
        max: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct ConeArgs {
    #[arg(long, value_parser = parse_angle)]
    angle: f64,
    /// Root window (lo, hi]; defaults to the critical window.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum NormalOpCmd {
    /// Weighted-L² membership of the Fourier-mode solutions (CSV).
    Scan {
        #[arg(long)]
        gamma: f64,
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, required = true)]
        deltas: Vec<f64>,
        #[arg(long)]
        nmax: u32,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        xis: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// No-log Green solve against a Gaussian bump source.
    Solve {
        #[arg(long)]
        xi: f64,
        #[arg(long, num_args = 2, value_names = ["CENTER", "WIDTH"])]
        bump: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Residuals of the operator identities on a model chart (CSV).
    Identities {
        #[arg(long, value_enum)]
        chart: ChartChoice,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cone angle of edge and vertex charts.
        #[arg(long, value_parser = parse_angle, default_value = "1.5pi")]
        angle: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum BesselCmd {
    /// Reference table, Wronskian and large-argument checks.
    Selftest {
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output")]
    path: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Euclidean3,
    Hyperbolic3,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartChoice {
    Flat,
    HyperbolicEdge,
    EuclideanEdge,
    SphericalEdge,
    Vertex,
    HyperbolicBox,
    SphericalBox,
}

/// Accepts plain numbers and multiples of π such as `1.5pi` or `pi`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.strip_suffix("pi") {
        Some("") => PI,
        Some(m) => m.trim_end_matches('*').parse::<f64>().map_err(|e| e.to_string())? * PI,
        None => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("angle {s} is not finite"))
    }
}

fn parse_kappa(s: &str) -> Result<Curvature, String> {
    let k = match s {
        "hyperbolic" => -1,
        "flat" | "euclidean" => 0,
        "spherical" => 1,
        _ => s.parse::<i8>().map_err(|_| format!("curvature must be -1, 0 or 1, got {s}"))?,
    };
    Curvature::try_from(k).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<DeformationKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_solid(s: &str) -> Result<SolidKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Violation,
    Indeterminate,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Violation
        }
    }

    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
            Status::Indeterminate => 3,
        }
    }
}

struct Outcome {
    text: String,
    status: Status,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    subcommand: String,
    version: &'static str,
    seed: Option<u64>,
    inputs: Value,
    passed: bool,
    results: Value,
}

fn json_outcome(
    subcommand: &str,
    seed: Option<u64>,
    inputs: Value,
    results: impl Serialize,
    status: Status,
    out: &Output,
) -> Result<Outcome, Error> {
    let report = RunReport {
        subcommand: subcommand.to_string(),
        version: VERSION,
        seed,
        inputs,
        passed: status == Status::Pass,
        results: serde_json::to_value(results).map_err(|e| Error::Numeric(e.to_string()))?,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Numeric(e.to_string()))?;
    text.push('\n');
    Ok(Outcome { text, status, out: out.path.clone() })
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_polyhedron(path: &Path) -> Result<Polyhedron, Error> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn indicial_outcome(name: &str, inputs: Value, report: IndicialReport, out: &Output) -> Result<Outcome, Error> {
    let residual = report_residual(&report)?;
    let filtered = friedrichs_filter(&report);
    let groups = (report.locus == conekit::indicial::LocusTag::Vertex).then(|| {
        let (a, b) = vertex_groups(&report);
        json!({ "a": a, "b": b })
    });
    let results = json!({
        "report": report,
        "friedrichs_subset": filtered.values(),
        "max_mode_residual": residual,
        "vertex_groups": groups,
    });
    json_outcome(name, None, inputs, results, Status::from_bool(residual <= INDICIAL_RESIDUAL), out)
}

fn cone_window(args: &ConeArgs) -> Result<Window, Error> {
    match &args.window {
        Some(w) => {
            let win = Window::new(w[0], w[1]);
            if win.is_empty() {
                return Err(Error::Input(format!("empty window ({}, {}]", w[0], w[1])));
            }
            Ok(win)
        }
        None => Ok(Window::from(critical_window(2)?)),
    }
}

fn chart_for(choice: ChartChoice, angle: f64) -> Result<ModelChart, Error> {
    match choice {
        ChartChoice::Flat => space_form_box(Curvature::Flat, 1.0),
        ChartChoice::HyperbolicBox => space_form_box(Curvature::Hyperbolic, 1.0),
        ChartChoice::SphericalBox => space_form_box(Curvature::Spherical, 1.0),
        ChartChoice::HyperbolicEdge => edge_metric(Curvature::Hyperbolic, angle),
        ChartChoice::EuclideanEdge => edge_metric(Curvature::Flat, angle),
        ChartChoice::SphericalEdge => edge_metric(Curvature::Spherical, angle),
        ChartChoice::Vertex => vertex_metric(Curvature::Hyperbolic, &[angle; 3], 0),
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::ValidateGerm { file, out } => {
            let germ = SingularGerm::from_json(&read(&file)?)?;
            let report = validate_germ(&germ)?;
            let dim = if report.has_errors() { None } else { germ_param_dim(&germ).ok() };
            let results = json!({
                "violations": report.violations,
                "codes": report.codes(),
                "param_dim": dim,
            });
            let status = Status::from_bool(!report.has_errors());
            json_outcome("validate-germ", None, json!({ "file": file }), results, status, &out)
        }
        Command::Double { file, germ } => {
            let poly = load_polyhedron(&file)?;
            let g = double_polyhedron(&poly)?;
            let report = validate_germ(&g)?;
            write(&germ, &(g.to_json() + "\n"))?;
            let results = json!({
                "germ": germ,
                "vertices": g.vertices.len(),
                "edges": g.edges.len(),
                "param_dim": germ_param_dim(&g)?,
                "violations": report.violations,
            });
            let status = Status::from_bool(!report.has_errors());
            json_outcome("double", None, json!({ "file": file }), results, status, &Output { path: None })
        }
        Command::Solid { kind, space, size, out } => {
            let space = match space {
                Space::Euclidean3 => AmbientSpace::Euclidean3,
                Space::Hyperbolic3 => AmbientSpace::Hyperbolic3,
            };
            let p = build_regular(kind, space, size)?;
            let mut text = serde_json::to_string_pretty(&p).map_err(|e| Error::Numeric(e.to_string()))?;
            text.push('\n');
            Ok(Outcome { text, status: Status::Pass, out: out.path })
        }
        Command::Spectrum(SpectrumCmd::Football { angle, max, oracle, text, out }) => {
            let exact = football_spectrum(angle, max)?;
            if text {
                return Ok(Outcome { text: exact.to_text(), status: Status::Pass, out: out.path });
            }
            let inputs = json!({ "angle": angle, "max": max, "oracle": oracle });
            let bounds = check_spectral_bounds(&exact);
            let mut ok = bounds.weiss_ok && bounds.oneform_gap_ok;
            let rows: Vec<Value> = if oracle {
                let o = oracle_football_spectrum(angle, max, Exec::default())?;
                ok &= o.entries.len() == exact.entries.len();
                let mut rows = Vec::new();
                for (i, e) in exact.entries.iter().enumerate() {
                    let (ol, om) = o.entries.get(i).map(|x| (Some(x.lambda), Some(x.multiplicity))).unwrap_or((None, None));
                    let diff = ol.map(|l| (l - e.lambda).abs());
                    ok &= om == Some(e.multiplicity) && diff.is_some_and(|d| d <= SPECTRUM_AGREEMENT);
                    rows.push(json!({
                        "lambda": e.lambda,
                        "multiplicity": e.multiplicity,
                        "labels": e.labels,
                        "oracle_lambda": ol,
                        "oracle_multiplicity": om,
                        "abs_diff": diff,
                    }));
                }
                rows
            } else {
                exact
                    .entries
                    .iter()
                    .map(|e| json!({ "lambda": e.lambda, "multiplicity": e.multiplicity, "labels": e.labels }))
                    .collect()
            };
            let results = json!({ "entries": rows, "bounds": bounds });
            json_outcome("spectrum football", None, inputs, results, Status::from_bool(ok), &out)
        }
        Command::Indicial(cmd) => match cmd {
            IndicialCmd::ConeScalar(a) => {
                let r = roots_cone_scalar(a.angle, cone_window(&a)?)?;
                indicial_outcome("indicial cone-scalar", json!({ "angle": a.angle, "window": a.window }), r, &a.out)
            }
            IndicialCmd::ConeOneform(a) => {
                let r = roots_cone_oneform(a.angle, cone_window(&a)?)?;
                indicial_outcome("indicial cone-oneform", json!({ "angle": a.angle, "window": a.window }), r, &a.out)
            }
            IndicialCmd::Edge(a) => {
                let r = roots_edge(a.angle, cone_window(&a)?)?;
                indicial_outcome("indicial edge", json!({ "angle": a.angle, "window": a.window }), r, &a.out)
            }
            IndicialCmd::Vertex { spectrum, football, max, out } => {
                let (list, inputs) = match (spectrum, football) {
                    (Some(path), _) => {
                        (EigenvalueList::parse_text(&read(&path)?)?, json!({ "spectrum": path }))
                    }
                    (None, Some(a)) => (football_spectrum(a, max)?, json!({ "football": a, "max": max })),
                    (None, None) => return Err(Error::Input("one of --spectrum or --football is required".into())),
                };
                let r = roots_vertex(&list.expanded())?;
                indicial_outcome("indicial vertex", inputs, r, &out)
            }
        },
        Command::NormalOp(NormalOpCmd::Scan { gamma, deltas, nmax, xis, out }) => {
            let t = injectivity_scan(gamma, &deltas, nmax, &xis, Exec::default())?;
            let mut text = t.to_csv();
            for v in &t.verdicts {
                text.push_str(&format!("# delta={:?} injective={} kernel={}\n", v.delta, v.injective, v.kernel.len()));
            }
            Ok(Outcome { text, status: Status::Pass, out: out.path })
        }
        Command::NormalOp(NormalOpCmd::Solve { xi, bump, out }) => {
            let g = RadialGrid::standard();
            let f = g.sample(gaussian_bump(bump[0], bump[1]));
            let rec = green_apply(&g, &f, xi)?.record;
            let ok = rec.residual <= GREEN_RESIDUAL && rec.log_coeff.abs() <= GREEN_LOG * rec.f_norm;
            let inputs = json!({ "xi": xi, "bump": { "center": bump[0], "width": bump[1] } });
            json_outcome("normal-op solve", None, inputs, rec, Status::from_bool(ok), &out)
        }
        Command::Check(CheckCmd::Identities { chart, trials, seed, angle, out }) => {
            let c = chart_for(chart, angle)?;
            let reports = identity_suite(&c, trials, seed, Exec::default())?;
            let mut text = format!("{}\n", csv_header());
            for r in &reports {
                text.push_str(&csv_row(r));
                text.push('\n');
            }
            let ok = reports.iter().all(|r| r.passed);
            Ok(Outcome { text, status: Status::from_bool(ok), out: out.path })
        }
        Command::ClassifyDeformation { kind, kappa, out } => {
            let t = deformation_basis(kappa, kind)?;
            let c = l2_classify(&t)?;
            let inputs = json!({ "kind": kind, "kappa": kappa });
            json_outcome("classify-deformation", None, inputs, c, Status::Pass, &out)
        }
        Command::Rigidity { file, tol, out } => {
            let p = load_polyhedron(&file)?;
            let r = rigidity_check(&p, tol)?;
            let status = match r.verdict {
                Verdict::Pass => Status::Pass,
                Verdict::Fail => Status::Violation,
                Verdict::Indeterminate => Status::Indeterminate,
            };
            json_outcome("rigidity", None, json!({ "file": file, "tol": tol }), r, status, &out)
        }
        Command::Bessel(BesselCmd::Selftest { out }) => {
            let t = bessel::selftest()?;
            let checks = json!({
                "reference_table": t.max_rel_error_i <= BESSEL_TABLE && t.max_rel_error_k <= BESSEL_TABLE,
                "wronskian": t.max_wronskian_defect <= BESSEL_WRONSKIAN,
                "asymptotic": (t.k_asymptotic_ratio - 1.0).abs() <= BESSEL_ASYMPTOTIC
                    && (t.i_asymptotic_ratio - 1.0).abs() <= BESSEL_ASYMPTOTIC,
            });
            let ok = checks.as_object().is_some_and(|m| m.values().all(|v| v == &Value::Bool(true)));
            json_outcome("bessel selftest", None, json!({}), json!({ "values": t, "checks": checks }), Status::from_bool(ok), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = run(cli).and_then(|o| {
        match &o.out {
            Some(p) => write(p, &o.text)?,
            None => print!("{}", o.text),
        }
        Ok(o.status)
    });
    match outcome {
        Ok(s) => ExitCode::from(s.code()),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
