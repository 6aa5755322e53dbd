//! Command-line front end.
//!
//! `constant` estimates one constant (optionally grid-certified on a
//! plane), `report` estimates the whole catalog on a space, `verify`
//! runs the identity suites, and the `list-*` commands describe what is
//! available. Output is a human table by default; `--format json` and
//! `--format csv` emit machine-readable forms, `--out` redirects to a
//! file.
//!
//! Exit codes: 0 success (all checks passed), 1 at least one identity
//! failed, 2 usage or validation error, 3 a search was inconclusive.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use geomconst::constants::{
    estimate_constant, estimate_many, evaluate_objective, hilbert_reference, resolved_mode,
    ALL_CONSTANTS,
};
use geomconst::oracle::{constrained_grid_sup_2d, grid_sup_2d};
use geomconst::space::parse_space_spec;
use geomconst::verify::{
    check_identity, default_corpus, identity_catalog, run_suite, IdentityReport, Rhs,
};
use geomconst::{
    ConstantId, ConstantQuery, Error, Estimate, EvalMode, Exponent, OptConfig, Result, SpaceSpec,
    Status, Suite, ToleranceConfig, Vector,
};

#[derive(Parser)]
#[command(
    name = "geomconst",
    version,
    about = "Estimate geometric constants of finite-dimensional normed spaces \
             and verify the identities relating them"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate a single constant on a space.
    Constant(ConstantArgs),
    /// Estimate the whole catalog of constants on a space.
    Report(ReportArgs),
    /// Check identities on one space or a corpus.
    Verify(VerifyArgs),
    /// Describe the supported space families and shorthands.
    ListSpaces,
    /// List the constants with their definitions.
    ListConstants,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct ConstantArgs {
    /// Space: shorthand (see list-spaces), inline JSON, or a file path.
    #[arg(long)]
    space: String,
    /// Constant name (see list-constants).
    #[arg(long)]
    name: String,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    upsilon: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Evaluation route: "substituted" (free unit pairs) or "direct"
    /// (isosceles-orthogonal pairs).
    #[arg(long)]
    mode: Option<String>,
    /// Replace the search with an exhaustive grid scan at this resolution
    /// (two-dimensional spaces, pair objectives only).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Space: shorthand, inline JSON, or a file path.
    #[arg(long)]
    space: String,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Single space to check (shorthand, inline JSON, or a file path).
    #[arg(long, conflicts_with = "spaces")]
    space: Option<String>,
    /// Corpus: "default" or a path to a JSON array of space documents or
    /// shorthand strings. Used when --space is absent.
    #[arg(long)]
    spaces: Option<String>,
    /// Check one identity by name (needs --space) instead of a suite.
    #[arg(long)]
    identity: Option<String>,
    /// Identity suite: "core" or "full".
    #[arg(long, default_value = "core")]
    suite: String,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Acceptance tolerance for cross-route equality checks.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit(&e))
        }
    }
}

fn error_exit(e: &Error) -> u8 {
    match e {
        Error::Degenerate(_) | Error::DegenerateObjective(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Constant(a) => cmd_constant(a),
        Cmd::Report(a) => cmd_report(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::ListSpaces => {
            print!("{}", list_spaces_text());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ListConstants => {
            print!("{}", list_constants_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ---- space arguments ----

fn parse_exponent(s: &str) -> Result<Exponent> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "oo" => Ok(Exponent::Infinity),
        other => other
            .parse::<f64>()
            .map(Exponent::Finite)
            .map_err(|_| Error::Parse(format!("invalid exponent \"{s}\""))),
    }
}

fn parse_space_arg(s: &str) -> Result<SpaceSpec> {
    let t = s.trim();
    if t.starts_with('{') {
        return parse_space_spec(t);
    }
    if t == "octagon" {
        return Ok(SpaceSpec::octagon());
    }
    if let Some(rest) = t.strip_prefix("lp:") {
        let (p_str, dim_str) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected lp:<p>:<dim>, got \"{t}\"")))?;
        let p = parse_exponent(p_str)?;
        let dim = dim_str
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("invalid dimension \"{dim_str}\"")))?;
        return SpaceSpec::lp(p, dim);
    }
    if let Some(rest) = t.strip_prefix("random-poly:") {
        let mut parts = rest.split(':');
        let seed = parts
            .next()
            .unwrap_or_default()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("expected random-poly:<seed>[:<pairs>], got \"{t}\"")))?;
        let pairs = match parts.next() {
            Some(p) => p
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid pair count in \"{t}\"")))?,
            None => 5,
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!(
                "expected random-poly:<seed>[:<pairs>], got \"{t}\""
            )));
        }
        return SpaceSpec::random_polyhedral(2, pairs, seed);
    }
    if let Some(rest) = t.strip_prefix("supgrid:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let bad = || Error::Parse(format!("expected supgrid:<grid>[:<alpha>:<beta>], got \"{t}\""));
        let grid = parts
            .first()
            .and_then(|p| p.parse::<usize>().ok())
            .ok_or_else(bad)?;
        let (alpha, beta) = match parts.len() {
            1 => (0.0, 1.0),
            3 => (
                parts[1].parse::<f64>().map_err(|_| bad())?,
                parts[2].parse::<f64>().map_err(|_| bad())?,
            ),
            _ => return Err(bad()),
        };
        return SpaceSpec::discretized_sup(grid, alpha, beta);
    }
    let text = fs::read_to_string(t)
        .map_err(|e| Error::Parse(format!("cannot read space file \"{t}\": {e}")))?;
    parse_space_spec(&text)
}

fn parse_corpus_arg(s: &str) -> Result<Vec<SpaceSpec>> {
    if s == "default" {
        return Ok(default_corpus());
    }
    let text = fs::read_to_string(s)
        .map_err(|e| Error::Parse(format!("cannot read corpus file \"{s}\": {e}")))?;
    let vals: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let arr = vals
        .as_array()
        .ok_or_else(|| Error::Parse("corpus file must contain a JSON array".into()))?;
    let mut out = Vec::new();
    for v in arr {
        match v {
            serde_json::Value::String(sh) => out.push(parse_space_arg(sh)?),
            serde_json::Value::Object(_) => out.push(parse_space_spec(&v.to_string())?),
            other => {
                return Err(Error::Parse(format!(
                    "corpus entries must be strings or objects, got {other}"
                )))
            }
        }
    }
    Ok(out)
}

// ---- output plumbing ----

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::Validation(format!("cannot write \"{}\": {e}", p.display()))),
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| Error::Validation(format!("cannot write to stdout: {e}")))
        }
    }
}

fn json_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Contract(format!("serialization failed: {e}")))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_coords(v: &Vector) -> String {
    let coords = v.coords();
    let shown: Vec<String> = coords.iter().take(8).map(|c| format!("{c:.6}")).collect();
    let tail = if coords.len() > 8 { ", .." } else { "" };
    format!("[{}{}]", shown.join(", "), tail)
}

// ---- constant and report commands ----

#[derive(Serialize)]
struct ConstantRow {
    constant: &'static str,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    value: f64,
    hilbert: f64,
    certification: String,
    evals: u64,
    skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<f64>,
    witness: geomconst::PairWitness,
}

#[derive(Serialize)]
struct ConstantOutput {
    space: String,
    #[serde(flatten)]
    row: ConstantRow,
}

#[derive(Serialize)]
struct ReportOutput {
    space: String,
    seed: u64,
    restarts: usize,
    rows: Vec<ConstantRow>,
}

/// Pretty route label: the dedicated searches are neither of the two
/// pair routes, so they print a dash.
fn mode_label(id: ConstantId, mode: EvalMode) -> &'static str {
    match id {
        ConstantId::DeltaX | ConstantId::A2ViaModulus => "-",
        _ => mode.as_str(),
    }
}

fn make_row(q: &ConstantQuery, est: Estimate) -> Result<ConstantRow> {
    let mode = resolved_mode(q)?;
    Ok(ConstantRow {
        constant: q.id.as_str(),
        mode: mode_label(q.id, mode),
        tau: q.tau,
        upsilon: q.upsilon,
        t: q.t,
        eps: q.eps,
        value: est.value,
        hilbert: hilbert_reference(q)?,
        certification: est.cert.as_str().to_string(),
        evals: est.evals,
        skipped: est.skipped,
        window: est.bound_window,
        witness: est.witness,
    })
}

fn params_label(r: &ConstantRow) -> String {
    let mut parts = Vec::new();
    if let (Some(tau), Some(ups)) = (r.tau, r.upsilon) {
        parts.push(format!("tau={tau} ups={ups}"));
    }
    if let Some(t) = r.t {
        parts.push(format!("t={t}"));
    }
    if let Some(eps) = r.eps {
        parts.push(format!("eps={eps:.6}"));
    }
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(" ")
    }
}

const ROW_CSV_HEADER: &str =
    "space,constant,mode,tau,upsilon,t,eps,value,hilbert,certification,evals,skipped,window\n";

fn row_csv_line(space: &str, r: &ConstantRow) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        csv_field(space),
        r.constant,
        r.mode,
        opt(r.tau),
        opt(r.upsilon),
        opt(r.t),
        opt(r.eps),
        r.value,
        r.hilbert,
        r.certification,
        r.evals,
        r.skipped,
        opt(r.window),
    )
}

fn cmd_constant(a: ConstantArgs) -> Result<ExitCode> {
    let space = parse_space_arg(&a.space)?;
    let id = ConstantId::parse(&a.name)?;
    let mut q = ConstantQuery::new(id);
    if a.tau.is_some() != a.upsilon.is_some() {
        return Err(Error::Validation(
            "--tau and --upsilon must be supplied together".into(),
        ));
    }
    if let (Some(tau), Some(ups)) = (a.tau, a.upsilon) {
        q = q.with_tau_upsilon(tau, ups);
    }
    if let Some(t) = a.t {
        q = q.with_t(t);
    }
    if let Some(eps) = a.eps {
        q = q.with_eps(eps);
    }
    if let Some(m) = &a.mode {
        q = q.with_mode(EvalMode::parse(m)?);
    }
    let opt = OptConfig {
        restarts: a.restarts,
        seed: a.seed,
        ..OptConfig::default()
    };
    let tol = ToleranceConfig::default();
    let est = match a.resolution {
        Some(res) => grid_certified(&space, &q, res, &tol)?,
        None => estimate_constant(&space, &q, &opt, &tol)?,
    };
    let out = ConstantOutput {
        space: space.label(),
        row: make_row(&q, est)?,
    };
    let text = match a.format {
        Format::Table => render_constant_table(&out),
        Format::Json => json_pretty(&out)?,
        Format::Csv => format!("{ROW_CSV_HEADER}{}", row_csv_line(&out.space, &out.row)),
    };
    emit(&text, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

/// Exhaustive scan instead of the search: free pairs for substituted
/// objectives, isosceles-orthogonal pairs for direct ones.
fn grid_certified(
    space: &SpaceSpec,
    q: &ConstantQuery,
    resolution: usize,
    tol: &ToleranceConfig,
) -> Result<Estimate> {
    if matches!(
        q.id,
        ConstantId::H | ConstantId::DeltaX | ConstantId::A2ViaModulus
    ) {
        return Err(Error::Validation(format!(
            "--resolution only applies to pair objectives, not {}",
            q.id.as_str()
        )));
    }
    if space.dim() != 2 {
        return Err(Error::Validation(
            "--resolution grid certification needs a two-dimensional space".into(),
        ));
    }
    let qq = *q;
    match resolved_mode(q)? {
        EvalMode::Substituted => grid_sup_2d(
            space,
            move |u: &Vector, v: &Vector| {
                evaluate_objective(space, &qq, u, v).unwrap_or(f64::NAN)
            },
            resolution,
        ),
        EvalMode::Direct => constrained_grid_sup_2d(
            space,
            move |x: &Vector, z: &Vector| {
                evaluate_objective(space, &qq, x, z).unwrap_or(f64::NAN)
            },
            resolution,
            tol,
        ),
    }
}

fn render_constant_table(o: &ConstantOutput) -> String {
    let r = &o.row;
    let mut s = String::new();
    s.push_str(&format!("space       {}\n", o.space));
    s.push_str(&format!("constant    {}\n", r.constant));
    let params = params_label(r);
    if params != "-" {
        s.push_str(&format!("params      {params}\n"));
    }
    s.push_str(&format!("mode        {}\n", r.mode));
    s.push_str(&format!("value       {:.12}\n", r.value));
    s.push_str(&format!("hilbert     {:.12}\n", r.hilbert));
    s.push_str(&format!("certified   {}\n", r.certification));
    s.push_str(&format!("evals       {} (skipped {})\n", r.evals, r.skipped));
    if let Some(w) = r.window {
        s.push_str(&format!("window      {w:.3e}\n"));
    }
    s.push_str(&format!("witness x   {}\n", fmt_coords(&r.witness.x)));
    match r.witness.lambda {
        Some(l) => s.push_str(&format!(
            "witness y   {} (lambda {l:.9})\n",
            fmt_coords(&r.witness.y)
        )),
        None => s.push_str(&format!("witness y   {}\n", fmt_coords(&r.witness.y))),
    }
    s
}

/// The canonical catalog estimated by `report`: free-pair constants in
/// substituted mode, isosceles constants in direct mode, plus the
/// dedicated searches.
fn report_catalog() -> Vec<ConstantQuery> {
    let ts = [0.0, 0.5, 1.0, 2.0];
    let tus = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)];
    let mut v = vec![
        ConstantQuery::new(ConstantId::CNj),
        ConstantQuery::new(ConstantId::CNjPrime),
        ConstantQuery::new(ConstantId::A2),
    ];
    for t in ts {
        v.push(ConstantQuery::new(ConstantId::E).with_t(t));
    }
    for (tau, ups) in tus {
        v.push(ConstantQuery::new(ConstantId::LYjPrime).with_tau_upsilon(tau, ups));
    }
    v.push(ConstantQuery::new(ConstantId::J).with_mode(EvalMode::Direct));
    v.push(ConstantQuery::new(ConstantId::H));
    v.push(ConstantQuery::new(ConstantId::HTilde).with_mode(EvalMode::Direct));
    v.push(ConstantQuery::new(ConstantId::HTildeSq).with_mode(EvalMode::Direct));
    for t in ts {
        v.push(
            ConstantQuery::new(ConstantId::EI)
                .with_t(t)
                .with_mode(EvalMode::Direct),
        );
    }
    for (tau, ups) in tus {
        v.push(
            ConstantQuery::new(ConstantId::LYjI)
                .with_tau_upsilon(tau, ups)
                .with_mode(EvalMode::Direct),
        );
    }
    v.push(ConstantQuery::new(ConstantId::CNjI).with_mode(EvalMode::Direct));
    v.push(ConstantQuery::new(ConstantId::DeltaX).with_eps(1.0));
    v.push(ConstantQuery::new(ConstantId::DeltaX).with_eps(2.0f64.sqrt()));
    v.push(ConstantQuery::new(ConstantId::A2ViaModulus));
    v
}

fn cmd_report(a: ReportArgs) -> Result<ExitCode> {
    let space = parse_space_arg(&a.space)?;
    let opt = OptConfig {
        restarts: a.restarts,
        seed: a.seed,
        ..OptConfig::default()
    };
    let tol = ToleranceConfig::default();
    let queries = report_catalog();
    let ests = estimate_many(&space, &queries, &opt, &tol)?;
    let mut rows = Vec::with_capacity(queries.len());
    for (q, e) in queries.iter().zip(ests) {
        rows.push(make_row(q, e)?);
    }
    let out = ReportOutput {
        space: space.label(),
        seed: a.seed,
        restarts: a.restarts,
        rows,
    };
    let text = match a.format {
        Format::Table => render_report_table(&out),
        Format::Json => json_pretty(&out)?,
        Format::Csv => {
            let mut s = ROW_CSV_HEADER.to_string();
            for r in &out.rows {
                s.push_str(&row_csv_line(&out.space, r));
            }
            s
        }
    };
    emit(&text, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn render_report_table(o: &ReportOutput) -> String {
    let mut s = format!(
        "space {} (seed {}, restarts {})\n\n",
        o.space, o.seed, o.restarts
    );
    s.push_str(&format!(
        "{:<12} {:<18} {:<12} {:>14} {:>14}  {:<22} {:>10}\n",
        "constant", "params", "mode", "value", "hilbert", "certification", "evals"
    ));
    for r in &o.rows {
        s.push_str(&format!(
            "{:<12} {:<18} {:<12} {:>14.9} {:>14.9}  {:<22} {:>10}\n",
            r.constant,
            params_label(r),
            r.mode,
            r.value,
            r.hilbert,
            r.certification,
            r.evals
        ));
    }
    s
}

// ---- verify command ----

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let opt = OptConfig {
        restarts: a.restarts,
        seed: a.seed,
        ..OptConfig::default()
    };
    let mut tol = ToleranceConfig::default();
    if let Some(v) = a.tol {
        tol = ToleranceConfig::new(tol.eq_tol, tol.opt_tol, v, tol.lambda_max)?;
    }
    if let Some(identity) = &a.identity {
        let space_arg = a.space.as_ref().ok_or_else(|| {
            Error::Validation("--identity checks a single space; add --space".into())
        })?;
        let space = parse_space_arg(space_arg)?;
        let rep = check_identity(&space, identity, &opt, &tol)?;
        let text = match a.format {
            Format::Table => render_identity_lines(&rep),
            Format::Json => json_pretty(&rep)?,
            Format::Csv => verify_csv(std::slice::from_ref(&rep)),
        };
        emit(&text, &a.out)?;
        return Ok(status_exit(std::slice::from_ref(&rep)));
    }
    let spaces = match (&a.space, &a.spaces) {
        (Some(s), _) => vec![parse_space_arg(s)?],
        (None, Some(c)) => parse_corpus_arg(c)?,
        (None, None) => default_corpus(),
    };
    let suite = Suite::parse(&a.suite)?;
    let rep = run_suite(&spaces, suite, &opt, &tol)?;
    let text = match a.format {
        Format::Table => {
            let mut s = format!(
                "suite {} on {} space(s) (seed {}, restarts {}, verify_tol {:.1e})\n\n",
                rep.suite.as_str(),
                spaces.len(),
                rep.seed,
                rep.restarts,
                rep.verify_tol
            );
            for r in &rep.reports {
                s.push_str(&render_identity_lines(r));
            }
            let (p, f, i) = rep.counts();
            s.push_str(&format!("\npass {p} fail {f} inconclusive {i}\n"));
            s
        }
        Format::Json => json_pretty(&rep)?,
        Format::Csv => verify_csv(&rep.reports),
    };
    emit(&text, &a.out)?;
    Ok(status_exit(&rep.reports))
}

fn status_exit(reports: &[IdentityReport]) -> ExitCode {
    if reports.iter().any(|r| r.status == Status::Fail) {
        ExitCode::from(1)
    } else if reports.iter().any(|r| r.status == Status::Inconclusive) {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn render_identity_lines(r: &IdentityReport) -> String {
    let rhs = match r.rhs {
        Rhs::Eq { value } => format!("= {value:.9}"),
        Rhs::Interval { lo, hi } => format!("in [{lo:.9}, {hi:.9}]"),
        Rhs::AtLeast { lo } => format!(">= {lo:.9}"),
    };
    let params = if r.params.is_empty() {
        String::new()
    } else {
        format!(" [{}]", r.params)
    };
    format!(
        "{:<9} {:<14} {:<13} lhs {:.9} {} (tol {:.1e}){}\n    {}\n",
        r.identity,
        r.space,
        r.status.as_str(),
        r.lhs,
        rhs,
        r.tol,
        params,
        r.notes
    )
}

fn verify_csv(reports: &[IdentityReport]) -> String {
    let mut s =
        String::from("identity,space,params,status,lhs,rhs_kind,rhs_lo,rhs_hi,tol,notes\n");
    for r in reports {
        let (kind, lo, hi) = match r.rhs {
            Rhs::Eq { value } => ("eq", value.to_string(), value.to_string()),
            Rhs::Interval { lo, hi } => ("interval", lo.to_string(), hi.to_string()),
            Rhs::AtLeast { lo } => ("at-least", lo.to_string(), String::new()),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.identity,
            csv_field(&r.space),
            csv_field(&r.params),
            r.status.as_str(),
            r.lhs,
            kind,
            lo,
            hi,
            r.tol,
            csv_field(&r.notes),
        ));
    }
    s
}

// ---- listings ----

fn list_spaces_text() -> String {
    let mut s = String::from(
        "Space arguments accept a shorthand, an inline JSON document (first\n\
         character '{'), or a path to a JSON file.\n\n\
         Shorthands:\n\
         \x20 lp:<p>:<dim>                    l_p norm; p is a number in [1, inf] or \"inf\"\n\
         \x20 octagon                         regular octagon norm on the plane\n\
         \x20 random-poly:<seed>[:<pairs>]    seeded random polyhedral norm on the plane\n\
         \x20 supgrid:<grid>[:<alpha>:<beta>] sup norm of functions sampled on a uniform\n\
         \x20                                 grid over [alpha, beta] (defaults [0, 1])\n\n\
         JSON documents take {\"family\": ..., ...} with families \"lp\" (fields p, dim),\n\
         \"weighted-lp\" (p, weights), \"polyhedral\" (functionals), and \"discretized-sup\"\n\
         (grid, alpha, beta). \"inf\" is a valid p.\n\n\
         Default verification corpus:\n",
    );
    for sp in default_corpus() {
        s.push_str(&format!("  {}\n", sp.label()));
    }
    s
}

fn list_constants_text() -> String {
    let mut s = String::from("Constants (names are case-insensitive; aliases in brackets):\n\n");
    for id in ALL_CONSTANTS {
        s.push_str(&format!("  {:<14} {}\n", id.as_str(), id.summary()));
    }
    s.push_str(
        "\nIsosceles-orthogonality constants (H_tilde, H_tilde_sq, E_I, L_YJ_I,\n\
         C_NJ_I, J) take --mode substituted (default) or --mode direct; H is\n\
         always direct; delta_X and A2_via_modulus use dedicated searches.\n\n\
         Identities:\n\n",
    );
    for (name, desc) in identity_catalog() {
        s.push_str(&format!("  {name:<10} {desc}\n"));
    }
    s
}
