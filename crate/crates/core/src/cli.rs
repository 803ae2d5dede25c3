//! The `elliptic-tilt` command line.
//!
//! [`run`] takes its arguments and streams explicitly so the whole surface is
//! testable in-process. Exit codes: 0 on success, 2 on malformed input or a
//! violated precondition, 3 when a charge lies outside the admissible region.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::charges::{
    discriminant, eq12_sides, reduced_charge, slope_mu_f, slope_mu_omega, slope_mu_star, tilt_slope, ExtendedRational,
};
use crate::lattice::{ChernMatrix, GeometryParams, Polarization};
use crate::laurent::{PositiveRoot, RootLocation};
use crate::patterns::{
    classify, entry_bound_s0, ladder_decomposition, limit_heart_bound, minimal_ladder_level, BoundVariant,
};
use crate::phases::{hn_bucket, phase_compare, phase_limit, PhaseError};
use crate::rational::{fraction_string, parse_rational, to_f64, PosRational, Rational};
use crate::stability::{
    candidate_reports, destabilizer_search, wall_locus, SearchBox, StabilityError, WallReport,
};

pub const BOX_BUDGET_VAR: &str = "ELLIPTIC_TILT_BOX_BUDGET";
const DEFAULT_BOX_BUDGET: i64 = 1;

#[derive(Debug, Parser)]
#[command(name = "elliptic-tilt", version, about = "Exact stability data for Chern classes on an elliptic threefold C × S")]
struct Cli {
    #[command(flatten)]
    session: Session,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Session {
    /// Half the self-intersection of the ample class on the K3 base (H_S² = 2h).
    #[arg(long = "h", global = true)]
    h: Option<i64>,
    /// Least positive fiber degree.
    #[arg(long, global = true, default_value_t = 1)]
    c: i64,
    /// Hyperbola parameter: ω = tH + sD with ts = α.
    #[arg(long, global = true, value_parser = positive_rational)]
    alpha: Option<PosRational>,
    /// Scale of the reference class (λ/α)H + λD.
    #[arg(long, global = true, value_parser = positive_rational)]
    lambda: Option<PosRational>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Chern matrix of Φ(E)[n].
    Transform {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
    },
    /// Reduced central charge along ts = α as Laurent polynomials in s.
    Charge {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Limit of the phase as s → ∞.
    Phase {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Eventual order of the phases of A and B.
    Compare {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Sign-pattern cells and the smallest ladder level containing the class.
    Classify {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Values of s where the phases of A and E cross.
    Wall {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        e: String,
        /// Write sampled rows (s, ν(A), ν(E)) to this CSV file.
        #[arg(long)]
        plot_csv: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 100)]
        plot_samples: u32,
    },
    /// Chern-level destabilizer candidates inside a box.
    Destab {
        #[arg(allow_hyphen_values = true)]
        e: String,
        /// "lo:hi" for every entry, or six comma-separated "lo:hi" ranges.
        #[arg(long = "box", allow_hyphen_values = true)]
        search_box: Option<String>,
        /// Drop the heart conditions on the candidate.
        #[arg(long)]
        no_candidate_filter: bool,
        /// Drop the heart conditions on the quotient E − A.
        #[arg(long)]
        no_complement_filter: bool,
    },
    /// Entry bound s₀ (with --t0) and limit-heart bound on s² (with --alpha).
    Bound {
        #[arg(long)]
        rank: i64,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        mustar: Rational,
        #[arg(long, value_parser = positive_rational)]
        t0: Option<PosRational>,
        #[arg(long, default_value = "torsion_free_class")]
        variant: BoundVariant,
    },
    /// Discriminant (ω²ch₁)² − 2ω³ch₀·ωch₂ at ω = tH + sD.
    Disc {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, value_parser = positive_rational)]
        t: PosRational,
        #[arg(long, value_parser = positive_rational)]
        s: PosRational,
    },
    /// μ_f and μ*, plus μ_ω and ν_ω when --t and --s are given.
    Slopes {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, value_parser = positive_rational, requires = "s")]
        t: Option<PosRational>,
        #[arg(long, value_parser = positive_rational, requires = "t")]
        s: Option<PosRational>,
    },
    /// Both sides of ω̄²ch₁(E) = 2h(λ²/α)(2b11 − α·b00) with b = ch(ΦE[1]).
    Eq12 {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
}

fn positive_rational(text: &str) -> Result<PosRational, String> {
    text.parse::<PosRational>().map_err(|e| e.to_string())
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Inadmissible(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Inadmissible(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Inadmissible(m) => m,
        }
    }
}

impl From<PhaseError> for Failure {
    fn from(e: PhaseError) -> Self {
        Failure::Inadmissible(e.to_string())
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Phase(p) => p.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<Output, Failure>;

/// One result: the text rendering and the JSON value.
struct Output {
    text: String,
    json: Value,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Self { text: text.into(), json }
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable")
}

fn frac(v: &Rational) -> Value {
    Value::String(fraction_string(v))
}

struct Context<'a> {
    session: &'a Session,
    command: &'static str,
}

impl Context<'_> {
    fn geometry(&self) -> Result<GeometryParams, Failure> {
        let h = self.session.h.ok_or_else(|| Failure::Usage(format!("--h is required for `{}`", self.command)))?;
        GeometryParams::new(h, self.session.c).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn alpha(&self) -> Result<&PosRational, Failure> {
        self.session.alpha.as_ref().ok_or_else(|| Failure::Usage(format!("--alpha is required for `{}`", self.command)))
    }

    fn lambda(&self) -> Result<&PosRational, Failure> {
        self.session
            .lambda
            .as_ref()
            .ok_or_else(|| Failure::Usage(format!("--lambda is required for `{}`", self.command)))
    }
}

fn parse_matrix(text: &str) -> Result<ChernMatrix, Failure> {
    text.parse().map_err(|e: crate::lattice::LatticeError| Failure::Usage(e.to_string()))
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let rendered = err.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    let format = cli.session.format;
    let results = dispatch(&cli, stdin);
    let mut status = 0;
    for result in results {
        match result {
            Ok(out) => {
                let _ = match format {
                    Format::Text => writeln!(stdout, "{}", out.text.trim_end()),
                    Format::Json => writeln!(stdout, "{}", out.json),
                };
            }
            Err(failure) => {
                let _ = writeln!(stderr, "error: {}", failure.message());
                status = status.max(failure.code());
            }
        }
    }
    status
}

/// Expands a matrix argument: `-` reads one matrix per nonempty stdin line.
fn matrix_inputs(arg: &str, stdin: &mut dyn BufRead) -> Vec<Result<ChernMatrix, Failure>> {
    if arg != "-" {
        return vec![parse_matrix(arg)];
    }
    let mut out = Vec::new();
    let mut line = String::new();
    loop {
        line.clear();
        match stdin.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) if line.trim().is_empty() => continue,
            Ok(_) => out.push(parse_matrix(line.trim())),
            Err(e) => {
                out.push(Err(Failure::Usage(format!("cannot read standard input: {e}"))));
                break;
            }
        }
    }
    out
}

fn for_each_matrix(
    arg: &str,
    stdin: &mut dyn BufRead,
    f: impl Fn(&ChernMatrix) -> Outcome,
) -> Vec<Outcome> {
    matrix_inputs(arg, stdin).into_iter().map(|m| m.and_then(|m| f(&m))).collect()
}

fn dispatch(cli: &Cli, stdin: &mut dyn BufRead) -> Vec<Outcome> {
    let session = &cli.session;
    let ctx = |command| Context { session, command };
    match &cli.command {
        Command::Transform { matrix, shift } => for_each_matrix(matrix, stdin, |m| Ok(transform(m, *shift))),
        Command::Charge { matrix } => for_each_matrix(matrix, stdin, |m| charge(&ctx("charge"), m)),
        Command::Phase { matrix } => for_each_matrix(matrix, stdin, |m| phase(&ctx("phase"), m)),
        Command::Compare { a, b } => vec![compare(&ctx("compare"), a, b)],
        Command::Classify { matrix } => for_each_matrix(matrix, stdin, |m| Ok(classify_cmd(m))),
        Command::Wall { a, e, plot_csv, plot_samples } => {
            vec![wall(&ctx("wall"), a, e, plot_csv.as_deref(), *plot_samples)]
        }
        Command::Destab { e, search_box, no_candidate_filter, no_complement_filter } => vec![destab(
            &ctx("destab"),
            e,
            search_box.as_deref(),
            !no_candidate_filter,
            !no_complement_filter,
        )],
        Command::Bound { rank, mustar, t0, variant } => vec![bound(session, *rank, mustar, t0.as_ref(), *variant)],
        Command::Disc { matrix, t, s } => for_each_matrix(matrix, stdin, |m| disc(&ctx("disc"), m, t, s)),
        Command::Slopes { matrix, t, s } => {
            for_each_matrix(matrix, stdin, |m| slopes(&ctx("slopes"), m, t.as_ref().zip(s.as_ref())))
        }
        Command::Eq12 { matrix } => for_each_matrix(matrix, stdin, |m| eq12(&ctx("eq12"), m)),
    }
}

fn transform(m: &ChernMatrix, shift: i64) -> Output {
    let image = m.fm_transform().shift(shift);
    Output::new(image.to_string(), json!({ "matrix": m, "shift": shift, "transform": image }))
}

fn charge(ctx: &Context, m: &ChernMatrix) -> Outcome {
    let (geo, alpha) = (ctx.geometry()?, ctx.alpha()?);
    let z = reduced_charge(m, alpha, &geo);
    let text = format!("re = {}\nim = {}", z.re, z.im);
    Ok(Output::new(
        text,
        json!({ "matrix": m, "alpha": frac(alpha.get()), "h": geo.h(), "re": z.re, "im": z.im }),
    ))
}

fn phase(ctx: &Context, m: &ChernMatrix) -> Outcome {
    let (geo, alpha) = (ctx.geometry()?, ctx.alpha()?);
    let z = reduced_charge(m, alpha, &geo);
    let limit = phase_limit(&z)?;
    let bucket = hn_bucket(&z)?;
    Ok(Output::new(
        limit.to_string(),
        json!({
            "matrix": m,
            "limit": limit.to_string(),
            "kind": limit.kind,
            "tangent": limit.tangent.as_ref().map(fraction_string),
            "approach": limit.approach,
            "bucket": bucket,
        }),
    ))
}

fn compare(ctx: &Context, a: &str, b: &str) -> Outcome {
    let (geo, alpha) = (ctx.geometry()?, ctx.alpha()?);
    let (a, b) = (parse_matrix(a)?, parse_matrix(b)?);
    let order = phase_compare(&reduced_charge(&a, alpha, &geo), &reduced_charge(&b, alpha, &geo))?;
    Ok(Output::new(order.to_string(), json!({ "a": a, "b": b, "order": order })))
}

fn classify_cmd(m: &ChernMatrix) -> Output {
    let cells = classify(m);
    let level = minimal_ladder_level(m);
    let parts = level.and_then(|k| ladder_decomposition(m, k).expect("level in range")).unwrap_or_default();
    let names: Vec<&str> = cells.iter().map(|c| c.name()).collect();
    let mut text = format!("cells: {}\n", if names.is_empty() { "none".to_string() } else { names.join(", ") });
    match level {
        Some(k) => {
            let _ = write!(text, "ladder level: {k}");
            if !parts.is_empty() {
                let sum: Vec<String> = parts.iter().map(|(c, p)| format!("{p} [{c}]")).collect();
                let _ = write!(text, "\ndecomposition: {}", sum.join(" + "));
            }
        }
        None => text.push_str("ladder level: none"),
    }
    let decomposition: Vec<Value> = parts.iter().map(|(c, p)| json!({ "cell": c, "matrix": p })).collect();
    Output::new(
        text,
        json!({ "matrix": m, "cells": cells, "ladder_level": level, "decomposition": decomposition }),
    )
}

fn root_text(r: &PositiveRoot) -> String {
    match &r.location {
        RootLocation::Exact(x) => format!("s = {x} (multiplicity {})", r.multiplicity),
        RootLocation::Interval { lo, hi } => {
            format!("s in ({lo}, {hi}) ≈ {:.9} (multiplicity {})", r.approx(), r.multiplicity)
        }
    }
}

fn wall_text(report: &WallReport) -> String {
    let mut text = format!("cross = {}\n", report.cross);
    if let Some(which) = report.zero_charge {
        let _ = writeln!(text, "{which} has zero charge: its phase is constantly 1/2");
    }
    if report.roots.is_empty() {
        text.push_str("roots: none\n");
    } else {
        text.push_str("roots:\n");
        for r in &report.roots {
            let _ = writeln!(text, "  {}", root_text(r));
        }
    }
    let _ = write!(text, "safe_s = {}", report.safe_s);
    text
}

fn float_text(v: &ExtendedRational) -> String {
    match v.finite() {
        Some(x) => format!("{}", to_f64(x)),
        None => "inf".to_string(),
    }
}

fn write_plot(
    path: &std::path::Path,
    a: &ChernMatrix,
    e: &ChernMatrix,
    alpha: &PosRational,
    geo: &GeometryParams,
    upper: &Rational,
    samples: u32,
) -> Result<(), Failure> {
    let mut csv = String::from("s,nu_A,nu_E\n");
    let samples = samples.max(1);
    for k in 1..=samples {
        let s = upper * Rational::new(k.into(), samples.into());
        let sp = PosRational::new("s", s.clone()).expect("positive sample");
        let pol = Polarization::on_hyperbola(alpha, &sp);
        let (na, ne) = (tilt_slope(a, &pol, geo), tilt_slope(e, &pol, geo));
        let _ = writeln!(csv, "{},{},{}", to_f64(&s), float_text(&na), float_text(&ne));
    }
    std::fs::write(path, csv).map_err(|err| Failure::Usage(format!("cannot write {}: {err}", path.display())))
}

fn wall(ctx: &Context, a: &str, e: &str, plot: Option<&std::path::Path>, plot_samples: u32) -> Outcome {
    let (geo, alpha) = (ctx.geometry()?, ctx.alpha()?);
    let (a, e) = (parse_matrix(a)?, parse_matrix(e)?);
    let report = match wall_locus(&a, &e, alpha, &geo) {
        Ok(report) => report,
        Err(StabilityError::ProportionalPhases) => {
            return Ok(Output::new(
                "no wall: proportional phases",
                json!({ "a": a, "e": e, "wall": Value::Null, "reason": "proportional_phases" }),
            ))
        }
        Err(other) => return Err(other.into()),
    };
    if let Some(path) = plot {
        let upper = &report.safe_s * Rational::from_integer(2.into());
        write_plot(path, &a, &e, alpha, &geo, &upper, plot_samples)?;
    }
    Ok(Output::new(wall_text(&report), json!({ "a": a, "e": e, "wall": report })))
}

fn parse_range(text: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("malformed box range {text:?} (expected lo:hi)"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn parse_box(text: &str) -> Result<SearchBox, Failure> {
    let ranges: Vec<(i64, i64)> = text.split(',').map(parse_range).collect::<Result<_, _>>()?;
    let (lo, hi) = match ranges.as_slice() {
        [(lo, hi)] => ([*lo; 6], [*hi; 6]),
        six if six.len() == 6 => {
            let mut lo = [0; 6];
            let mut hi = [0; 6];
            for (k, (l, h)) in six.iter().enumerate() {
                lo[k] = *l;
                hi[k] = *h;
            }
            (lo, hi)
        }
        _ => return Err(Failure::Usage(format!("box {text:?} needs one or six lo:hi ranges"))),
    };
    Ok(SearchBox::new(lo, hi)?)
}

fn box_budget() -> Result<i64, Failure> {
    match std::env::var(BOX_BUDGET_VAR) {
        Err(_) => Ok(DEFAULT_BOX_BUDGET),
        Ok(v) => match v.trim().parse::<i64>() {
            Ok(b) if b >= 0 => Ok(b),
            _ => Err(Failure::Usage(format!("{BOX_BUDGET_VAR} must be a nonnegative integer, got {v:?}"))),
        },
    }
}

fn destab(ctx: &Context, e: &str, search_box: Option<&str>, candidate: bool, complement: bool) -> Outcome {
    let (geo, alpha) = (ctx.geometry()?, ctx.alpha()?);
    let e = parse_matrix(e)?;
    let search = match search_box {
        Some(text) => parse_box(text)?,
        None => SearchBox::around(&e, box_budget()?),
    }
    .with_filters(candidate, complement);
    let found = destabilizer_search(&e, &search, alpha, &geo)?;
    let reports = candidate_reports(&e, &found, alpha, &geo);
    let mut text = String::new();
    if reports.is_empty() {
        text.push_str("no Chern-level destabilizer in box");
    }
    for r in &reports {
        let verdict = match r.verdict {
            crate::stability::Verdict::Strict => "strict",
            crate::stability::Verdict::Boundary => "boundary",
        };
        let _ = writeln!(text, "candidate {} {verdict} (walls: {}, safe_s = {})", r.matrix, r.roots.len(), r.safe_s);
    }
    Ok(Output::new(
        text,
        json!({
            "e": e,
            "box": { "lo": search.lo(), "hi": search.hi(), "filter_candidate": candidate, "filter_complement": complement },
            "candidates": reports,
        }),
    ))
}

fn bound(session: &Session, rank: i64, mustar: &Rational, t0: Option<&PosRational>, variant: BoundVariant) -> Outcome {
    if t0.is_none() && session.alpha.is_none() {
        return Err(Failure::Usage("`bound` needs --t0 (entry bound) or --alpha (limit-heart bound)".into()));
    }
    let usage = |e: crate::patterns::PatternError| Failure::Usage(e.to_string());
    let mut text = String::new();
    let mut out = serde_json::Map::new();
    if let Some(t0) = t0 {
        let s0 = entry_bound_s0(rank, mustar, t0, session.c).map_err(usage)?;
        let _ = writeln!(text, "s0 = {s0}");
        out.insert("s0".into(), frac(&s0));
    }
    if let Some(alpha) = &session.alpha {
        let b = limit_heart_bound(rank, mustar, alpha, session.c, variant).map_err(usage)?;
        let _ = writeln!(text, "s^2 {} {}", if b.strict { ">" } else { ">=" }, b.s_squared);
        out.insert("heart_bound".into(), to_json(&b));
        out.insert("variant".into(), to_json(&variant));
    }
    Ok(Output::new(text, Value::Object(out)))
}

fn disc(ctx: &Context, m: &ChernMatrix, t: &PosRational, s: &PosRational) -> Outcome {
    let geo = ctx.geometry()?;
    let pol = Polarization::from_positive(t.clone(), s.clone());
    let d = discriminant(m, &pol, &geo);
    Ok(Output::new(d.to_string(), json!({ "matrix": m, "discriminant": frac(&d) })))
}

fn slopes(ctx: &Context, m: &ChernMatrix, ts: Option<(&PosRational, &PosRational)>) -> Outcome {
    let (mu_f, mu_star) = (slope_mu_f(m), slope_mu_star(m));
    let mut text = format!("mu_f = {mu_f}\nmu_star = {mu_star}");
    let mut out = json!({ "matrix": m, "mu_f": mu_f, "mu_star": mu_star });
    if let Some((t, s)) = ts {
        let geo = ctx.geometry()?;
        let pol = Polarization::from_positive(t.clone(), s.clone());
        let (mu_omega, nu_omega) = (slope_mu_omega(m, &pol, &geo), tilt_slope(m, &pol, &geo));
        let _ = write!(text, "\nmu_omega = {mu_omega}\nnu_omega = {nu_omega}");
        out["mu_omega"] = to_json(&mu_omega);
        out["nu_omega"] = to_json(&nu_omega);
    }
    Ok(Output::new(text, out))
}

fn eq12(ctx: &Context, m: &ChernMatrix) -> Outcome {
    let (geo, alpha, lambda) = (ctx.geometry()?, ctx.alpha()?, ctx.lambda()?);
    let sides = eq12_sides(m, alpha, lambda, &geo);
    let text = format!("lhs = {}\nrhs = {}\nholds = {}", sides.lhs, sides.rhs, sides.holds());
    Ok(Output::new(text, json!({ "matrix": m, "lhs": frac(&sides.lhs), "rhs": frac(&sides.rhs), "holds": sides.holds() })))
}
