//! `fcstool validate|check-factor|classify|correlations|gauge [flags] <model>`.
//!
//! Every command builds one machine report; `--format text` renders it as
//! indented `key: value` lines. Exit codes: 0 success, 1 invalid input or
//! failed validation, 2 undetermined or internally inconsistent analysis.

pub mod model;

use std::collections::hash_map::DefaultHasher;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cpmap::{check_conditional_expectation, invariance_residual};
use crate::error::{Error, Result};
use crate::fcs::FcsTriple;
use crate::gauge::{subfactor_report, GaugeGroup};
use crate::linalg::{self, kron, CMat};
use crate::markovtype::{
    classify_exact, classify_type, GroupKind, MarkovSpec, SpectrumGroup, TypeLabel, TypeOptions,
};
use crate::peripheral::{is_factor, spectral_data};
use crate::tol::Tolerances;

use model::{load_group, to_matrix, ModelFile};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "fcstool",
    version,
    about = "Analyse finitely correlated states on spin chains"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every invariant of the model.
    Validate { model: PathBuf },
    /// Factoriality, ergodic components and center dimension.
    CheckFactor { model: PathBuf },
    /// Factor type of a quantum Markov state.
    Classify { model: PathBuf },
    /// Decay of `φ(A ⊗ I ⊗ ⋯ ⊗ B)`.
    Correlations {
        model: PathBuf,
        /// Observable A as a JSON matrix of [re, im] pairs (default e_11).
        #[arg(long)]
        a: Option<String>,
        /// Observable B (default e_11).
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 20)]
        max_n: usize,
    },
    /// Gauge covariance, invariant subalgebras and the restricted subfactor.
    Gauge {
        model: PathBuf,
        /// Group file; defaults to the model's `gauge` entry.
        #[arg(long)]
        group: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::CheckFactor { .. } => "check-factor",
            Command::Classify { .. } => "classify",
            Command::Correlations { .. } => "correlations",
            Command::Gauge { .. } => "gauge",
        }
    }

    fn model(&self) -> &Path {
        match self {
            Command::Validate { model }
            | Command::CheckFactor { model }
            | Command::Classify { model }
            | Command::Correlations { model, .. }
            | Command::Gauge { model, .. } => model,
        }
    }
}

/// Result of one command: the report and its exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    pub report: Value,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InternalConsistency(_) | Error::Diagnostic(_) | Error::PeriodNotFound(_) => 2,
        _ => 1,
    }
}

fn digest(bytes: &[u8]) -> String {
    let mut h = DefaultHasher::new();
    h.write(bytes);
    format!("{:016x}", h.finish())
}

struct Analysis {
    verdict: Value,
    diagnostics: Vec<String>,
    exit: i32,
}

impl Analysis {
    fn ok(verdict: Value, diagnostics: Vec<String>) -> Self {
        Self {
            verdict,
            diagnostics,
            exit: 0,
        }
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let path = cli.command.model();
    let mut report = json!({
        "command": cli.command.name(),
        "model": path.display().to_string(),
        "seed": cli.seed,
    });
    let loaded = ModelFile::load(path);
    let result = loaded.and_then(|(model, bytes)| {
        report["input_digest"] = json!(digest(&bytes));
        let tol = model.effective_tolerances()?;
        report["tolerances"] = json!(tol);
        match &cli.command {
            Command::Validate { .. } => validate(&model, &tol),
            Command::CheckFactor { .. } => check_factor(&model),
            Command::Classify { .. } => classify(&model),
            Command::Correlations { a, b, max_n, .. } => {
                correlations(&model, a.as_deref(), b.as_deref(), *max_n)
            }
            Command::Gauge { group, .. } => gauge(&model, group.as_deref(), &tol, cli.seed),
        }
    });
    let exit = match result {
        Ok(a) => {
            report["status"] = json!(if a.exit == 0 { "ok" } else { "undetermined" });
            report["verdict"] = a.verdict;
            report["diagnostics"] = json!(a.diagnostics);
            a.exit
        }
        Err(e) => {
            report["status"] = json!("error");
            report["error"] = json!({"code": e.code(), "message": e.to_string()});
            exit_code(&e)
        }
    };
    report["wall_clock_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    Outcome { exit, report }
}

/// Parses `args` (program name first), runs the command and renders the report.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.to_string());
        }
    };
    let out = execute(&cli);
    let text = match cli.format {
        Format::Machine => serde_json::to_string_pretty(&out.report).expect("report serializes"),
        Format::Text => render_text(&out.report),
    };
    (out.exit, text)
}

pub fn main() -> i32 {
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    if let Err(e) = Cli::try_parse_from(&args) {
        let _ = e.print();
        return if e.use_stderr() { 1 } else { 0 };
    }
    let (code, text) = run(args);
    println!("{}", text.trim_end());
    code
}

/// Indented `key: value` rendering of a machine report.
pub fn render_text(v: &Value) -> String {
    fn scalar(v: &Value) -> Option<String> {
        match v {
            Value::Null => Some("-".into()),
            Value::Bool(b) => Some(b.to_string()),
            Value::Number(n) => Some(n.to_string()),
            Value::String(s) => Some(s.clone()),
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => Some(format!(
                "[{}]",
                a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
            )),
            _ => None,
        }
    }
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    match scalar(x) {
                        Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                        None => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(x, indent + 1, out);
                        }
                    }
                }
            }
            Value::Array(items) => {
                for (i, x) in items.iter().enumerate() {
                    match scalar(x) {
                        Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                        None => {
                            out.push_str(&format!("{pad}- [{i}]\n"));
                            walk(x, indent + 1, out);
                        }
                    }
                }
            }
            other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
        }
    }
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn group_json(g: &SpectrumGroup) -> Value {
    json!({
        "kind": g.kind,
        "lambda": g.lambda,
        "generator": g.generator,
        "generators": g.generators,
        "mode": g.mode,
        "reason": g.reason,
    })
}

fn markov_spec(
    model: &ModelFile,
    phi: &FcsTriple,
    diagnostics: &mut Vec<String>,
) -> Result<Option<MarkovSpec>> {
    match MarkovSpec::from_triple(phi) {
        Ok(spec) => {
            if let Some(expected) = model.markov.as_ref().and_then(|m| m.range_blocks.as_ref()) {
                let got: Vec<[usize; 2]> = spec
                    .range
                    .mults
                    .iter()
                    .zip(&spec.range.dims)
                    .map(|(&m, &d)| [m, d])
                    .collect();
                if &got != expected {
                    return Err(Error::Precondition(format!(
                        "range blocks {got:?} differ from the declared {expected:?}"
                    )));
                }
            }
            Ok(Some(spec))
        }
        Err(e) if model.markov.is_some() => Err(e),
        Err(e) => {
            diagnostics.push(format!("not a quantum Markov state: {e}"));
            Ok(None)
        }
    }
}

fn validate(model: &ModelFile, tol: &Tolerances) -> Result<Analysis> {
    let phi = model.triple()?;
    let e = phi.map();
    let mut diagnostics = Vec::new();
    if !phi.is_minimal() {
        diagnostics.push("triple is not minimal".into());
    }
    let mut verdict = json!({
        "valid": true,
        "site_dim": phi.site_dim(),
        "memory_dims": phi.memory().dims(),
        "kraus_count": e.kraus().len(),
        "choi_min_eigenvalue": e.choi_min_eigenvalue(),
        "unitality_residual": e.unitality_residual(),
        "invariance_residual": invariance_residual(phi.rho(), e),
        "minimal": phi.is_minimal(),
        "c0_dim": phi.c0().basis.len(),
        "c0_steps": phi.c0().n,
    });
    if model.markov.is_some() {
        let ce = check_conditional_expectation(e, None, tol)?;
        if !ce.is_conditional_expectation {
            return Err(Error::NotConditionalExpectation(format!(
                "fix residual {:.3e}, bimodule residual {:.3e}",
                ce.fix_residual, ce.bimodule_residual
            )));
        }
        let spec = markov_spec(model, &phi, &mut diagnostics)?
            .expect("Markov hint makes the Markov data mandatory");
        verdict["markov"] = json!({
            "range_dims": spec.range.dims,
            "range_mults": spec.range.mults,
            "reconstruction_residual": spec.reconstruction_residual,
        });
    }
    if let Some(g) = model.gauge_group(tol.alg)? {
        let (covariant, res) = crate::gauge::check_covariance(e, &g, tol.alg)?;
        verdict["gauge"] =
            json!({"order": g.order(), "covariant": covariant, "covariance_residual": res});
    }
    if let Some(x) = &model.exact_rational {
        if x.basis.iter().any(|&[p, q]| p == 0 || q == 0) {
            return Err(Error::Parse(
                "exact_rational basis entries must be positive".into(),
            ));
        }
        if x.generators.iter().any(|g| g.len() != x.basis.len()) {
            return Err(Error::Parse(
                "exact_rational generator length differs from the basis".into(),
            ));
        }
    }
    Ok(Analysis::ok(verdict, diagnostics))
}

fn check_factor(model: &ModelFile) -> Result<Analysis> {
    let phi = model.triple()?;
    let mut diagnostics = Vec::new();
    let reduced = phi.reduced()?;
    if reduced.memory().dims() != phi.memory().dims() {
        diagnostics.push(format!(
            "memory reduced to the support of rho and the minimal form {:?}",
            reduced.memory().dims()
        ));
    }
    let phi = reduced;
    let v = is_factor(&phi)?;
    let components: Vec<Value> = v
        .components
        .iter()
        .map(|c| json!({"weight": c.weight, "blocks": c.blocks, "regrouping": c.regrouping}))
        .collect();
    let verdict = json!({
        "is_factor": v.is_factor,
        "center_dim": v.center_dim,
        "period": v.period,
        "projections": v.pi.len(),
        "components": components,
        "classes": v.bar_pi,
        "condition_iii": v.condition_iii,
        "intersection_dim": v.intersection_dim,
        "condition_iv": v.condition_iv,
        "class_residual": v.class_residual,
        "clustering_probe": v.clustering_probe,
        "support_reduced": v.support_reduced,
    });
    Ok(Analysis::ok(verdict, diagnostics))
}

fn classify(model: &ModelFile) -> Result<Analysis> {
    let phi = model.triple()?;
    let mut diagnostics = Vec::new();
    let spec = markov_spec(model, &phi, &mut diagnostics)?;
    let v = classify_type(&phi, spec.as_ref(), TypeOptions::default())?;
    let mut verdict = json!({
        "label": v.label,
        "lambda": v.lambda,
        "reason": v.reason,
        "evidence": {
            "is_factor": v.evidence.is_factor,
            "locally_faithful": v.evidence.locally_faithful,
            "min_window_eigenvalue": v.evidence.min_window_eigenvalue,
            "tracial_on_support": v.evidence.tracial_on_support,
            "mean_entropy": v.evidence.mean_entropy,
            "group": v.evidence.group.as_ref().map(group_json),
        },
    });
    if let Some(spec) = &spec {
        verdict["markov"] = json!({
            "range_dims": spec.range.dims,
            "range_mults": spec.range.mults,
            "reconstruction_residual": spec.reconstruction_residual,
            "non_faithful": spec.logs.non_faithful,
        });
    }
    if let Some(x) = &model.exact_rational {
        let basis: Vec<(u64, u64)> = x.basis.iter().map(|&[p, q]| (p, q)).collect();
        let exact = classify_exact(&basis, &x.generators)?;
        if let Some(floating) = &v.evidence.group {
            if floating.kind != exact.kind && floating.kind != GroupKind::Undetermined {
                diagnostics.push(format!(
                    "floating classification {:?} differs from the exact one {:?}",
                    floating.kind, exact.kind
                ));
            }
        }
        verdict["exact_group"] = group_json(&exact);
    }
    let exit = if v.label == TypeLabel::Undetermined {
        2
    } else {
        0
    };
    Ok(Analysis {
        verdict,
        diagnostics,
        exit,
    })
}

fn parse_observable(text: Option<&str>, d: usize) -> Result<CMat> {
    match text {
        None => Ok(linalg::unit(d, 0, 0)),
        Some(t) => {
            let m: model::JsonMatrix = serde_json::from_str(t)?;
            to_matrix(&m)
        }
    }
}

/// Geometric decay rate `r` from a least-squares fit of `log|c_n| ≈ a + n log r`.
pub fn fitted_rate(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, c)| c.abs() > 1e-13)
        .map(|&(n, c)| (n as f64, c.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

fn correlations(
    model: &ModelFile,
    a: Option<&str>,
    b: Option<&str>,
    max_n: usize,
) -> Result<Analysis> {
    let phi = model.triple()?;
    let d = phi.site_dim();
    let a = parse_observable(a, d)?;
    let b = parse_observable(b, d)?;
    let la = crate::fcs::window_length(d, a.nrows())
        .ok_or_else(|| Error::ShapeMismatch("A is not a window observable".into()))?;
    let pa = phi.evaluate(&a)?;
    let pb = phi.evaluate(&b)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for n in la..=max_n.max(la) {
        let v = phi.correlation(&a, &b, n)?;
        let conn = v - pa * pb;
        points.push((n, conn.norm()));
        rows.push(json!({"n": n, "value": [v.re, v.im], "connected": conn.norm()}));
    }
    let mut diagnostics = Vec::new();
    let subleading = match phi.reduced().and_then(|m| spectral_data(&m)) {
        Ok(r) => Some(r.subleading_modulus()),
        Err(e) => {
            diagnostics.push(format!("spectral data unavailable: {e}"));
            None
        }
    };
    let verdict = json!({
        "expectation_a": [pa.re, pa.im],
        "expectation_b": [pb.re, pb.im],
        "table": rows,
        "fitted_rate": fitted_rate(&points),
        "subleading_modulus": subleading,
    });
    Ok(Analysis::ok(verdict, diagnostics))
}

/// Largest `|φ(α_g(X)) − φ(X)|` over random observables on windows `n ≤ 3`.
pub fn state_invariance_residual(phi: &FcsTriple, g: &GaugeGroup, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = phi.site_dim();
    let mut worst: f64 = 0.0;
    for n in 1..=3usize {
        let side = d.pow(n as u32);
        if side * side * phi.memory().rep_dim().pow(2) > crate::fcs::WINDOW_BUDGET {
            break;
        }
        let dens = phi.window_density(n)?;
        for _ in 0..4 {
            let x = CMat::from_fn(side, side, |_, _| {
                linalg::c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let base = (&dens * &x).trace();
            for u in g.elements() {
                let mut un = CMat::identity(1, 1);
                for _ in 0..n {
                    un = kron(&un, u);
                }
                let moved = (&dens * (&un * &x * un.adjoint())).trace();
                worst = worst.max((moved - base).norm());
            }
        }
    }
    Ok(worst)
}

fn gauge(model: &ModelFile, group: Option<&Path>, tol: &Tolerances, seed: u64) -> Result<Analysis> {
    let phi = model.triple()?;
    let g = match group {
        Some(p) => load_group(p)?.group(phi.site_dim(), tol.alg)?,
        None => model.gauge_group(tol.alg)?.ok_or_else(|| {
            Error::Precondition("no gauge group given (model `gauge` entry or --group)".into())
        })?,
    };
    let mut diagnostics = Vec::new();
    let spec = markov_spec(model, &phi, &mut diagnostics)?
        .ok_or_else(|| Error::Precondition("gauge analysis needs a quantum Markov state".into()))?;
    let rep = subfactor_report(&phi, &spec, &g)?;
    let invariance = state_invariance_residual(&phi, &g, seed)?;
    if !rep.restricted.converged {
        diagnostics.push(
            rep.restricted
                .group
                .reason
                .clone()
                .unwrap_or_else(|| "restricted spectrum not stabilized".into()),
        );
    }
    if let Some(note) = &rep.note {
        diagnostics.push(note.clone());
    }
    let verdict = json!({
        "group_order": g.order(),
        "abelian": g.is_abelian(),
        "ambient_label": rep.ambient.label,
        "ambient_lambda": rep.ambient.lambda,
        "preconditions": rep.preconditions,
        "state_invariance_residual": invariance,
        "invariant_dims": rep.invariant_dims,
        "restricted_group": group_json(&rep.restricted.group),
        "restricted_windows": rep.restricted.windows,
        "restricted_converged": rep.restricted.converged,
        "restricted_label": rep.restricted_label,
        "restricted_lambda": rep.restricted_lambda,
        "index": rep.index,
    });
    let exit = if rep.restricted_label == TypeLabel::Undetermined {
        2
    } else {
        0
    };
    Ok(Analysis {
        verdict,
        diagnostics,
        exit,
    })
}
