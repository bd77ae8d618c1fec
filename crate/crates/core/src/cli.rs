//! The `sdym` command line.
//!
//! Exit codes: 0 on success or a passing check, 1 on a failing check (or a
//! solve that stops short of its tolerance), 2 on usage and input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{random_algebra, AlgebraElement, AlgebraKind, GroupElement};
use crate::cochain::{Cochain, ConnectionField, CurvatureField, Field, GaugeField};
use crate::curvature::{curvature, plane_maxima, pure_gauge, synthetic_sd_curvature, PlaneGenerator};
use crate::duality::{
    check_diagonal_difference_form, check_diagonal_relation, residual, residual_componentwise,
    verify_triviality_theorem, DualityProblem, Orientation, TheoremVerdict,
};
use crate::hodge::{double_star, star, Metric};
use crate::io::{self, FieldFile};
use crate::lattice::{parse_dims, Boundary, LatticeIndex, Plane, Window};
use crate::solver::{solve, Method, SolveConfig, TracePoint};

#[derive(Debug, Parser)]
#[command(name = "sdym", version, about = "Discrete self-dual Yang-Mills fields on Z^4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Zero,
    Constant,
    Random,
    PureGauge,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Relation {
    #[value(name = "13")]
    Diagonal,
    Prop1,
    Prop2,
    Theorem,
    StarTable,
    PathEquivalence,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a field file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value = "4,4,4,4", value_parser = parse_dims)]
        dims: [usize; 4],
        #[arg(long, default_value = "periodic")]
        boundary: Boundary,
        #[arg(long, default_value = "su2")]
        algebra: AlgebraKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// 0 gauge field, 1 connection, 2 curvature.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=2))]
        rank: u8,
        /// Metric of a synthetic field.
        #[arg(long)]
        metric: Option<Metric>,
        /// Orientation of a synthetic field.
        #[arg(long)]
        dual: Option<Orientation>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Curvature of a connection file.
    Curv {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Hodge star of a curvature file.
    Star {
        #[arg(long)]
        metric: Metric,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Duality residual of a connection or curvature file.
    Residual {
        #[arg(long)]
        metric: Metric,
        #[arg(long)]
        dual: Orientation,
        input: PathBuf,
    },
    /// Run a named consistency check.
    Check {
        #[arg(long, value_enum)]
        relation: Relation,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of generated fields when no file is given.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Support radius for `theorem`: one extent or four comma-separated.
        #[arg(long, default_value = "3")]
        bound: String,
        #[arg(long)]
        metric: Option<Metric>,
        #[arg(long)]
        dual: Option<Orientation>,
        input: Option<PathBuf>,
    },
    /// Minimise the duality residual over connections.
    Solve {
        #[arg(long)]
        metric: Metric,
        #[arg(long)]
        dual: Orientation,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1.0)]
        step0: f64,
        #[arg(long, default_value_t = 0.5)]
        backtrack: f64,
        /// gn (Gauss-Newton) or gd (gradient descent).
        #[arg(long, default_value = "gn")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        trace_every: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// A command failure that is the caller's fault (exit code 2).
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Runs the CLI on `args` (program name first), writing to stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut text = String::new();
    let result = dispatch(cli.command, &mut text);
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut String) -> CmdResult {
    match command {
        Command::Gen { kind, dims, boundary, algebra, seed, scale, rank, metric, dual, output } => {
            let window = Window::new(dims, boundary);
            let file = generate(kind, window, algebra, seed, scale, rank, metric, dual)?;
            io::save(&file, &output)?;
            Ok(0)
        }
        Command::Curv { input, output } => {
            let file = io::load(&input)?;
            let a = connection(&file.field, "curv")?;
            io::save(&FieldFile::new(Field::Curvature(curvature(a)), file.metric), &output)?;
            Ok(0)
        }
        Command::Star { metric, input, output } => {
            let file = load_with_metric(&input, metric)?;
            let Field::Curvature(f) = &file.field else {
                return Err(usage(format!(
                    "star needs a rank-2 file, '{}' has rank {}",
                    input.display(),
                    file.field.rank()
                )));
            };
            io::save(&FieldFile::new(Field::Curvature(star(f, metric)), Some(metric)), &output)?;
            Ok(0)
        }
        Command::Residual { metric, dual, input } => {
            let file = load_with_metric(&input, metric)?;
            let f = curvature_of(&file.field, "residual")?;
            let r = residual(&f, DualityProblem::new(metric, dual));
            let _ = writeln!(out, "residual {}", format_g17(r.norm()));
            let maxima = plane_maxima(&r);
            for plane in Plane::ALL {
                let _ = writeln!(out, "plane {plane} {}", format_g17(maxima[&plane]));
            }
            Ok(0)
        }
        Command::Check { relation, seed, count, bound, metric, dual, input } => {
            let file = input.as_deref().map(io::load).transpose()?;
            let outcome = match relation {
                Relation::Diagonal => check_diagonal(file.as_ref(), seed, count, metric, dual)?,
                Relation::Prop1 => check_double_star(file.as_ref(), seed, count, Metric::Euclid, metric)?,
                Relation::Prop2 => check_double_star(file.as_ref(), seed, count, Metric::Mink, metric)?,
                Relation::Theorem => check_theorem(file.as_ref(), seed, count, &bound, metric, dual)?,
                Relation::StarTable => check_star_table(seed),
                Relation::PathEquivalence => check_path_equivalence(file.as_ref(), seed, count, metric, dual)?,
            };
            out.push_str(&outcome.lines);
            let _ = writeln!(out, "{}", if outcome.pass { "PASS" } else { "FAIL" });
            Ok(if outcome.pass { 0 } else { 1 })
        }
        Command::Solve { metric, dual, max_iter, tol, step0, backtrack, method, trace_every, trace, input, output } => {
            let file = load_with_metric(&input, metric)?;
            let a0 = connection(&file.field, "solve")?;
            let cfg = SolveConfig {
                max_iter,
                tol,
                step0,
                backtrack,
                trace_every,
                method,
                ..SolveConfig::new(DualityProblem::new(metric, dual))
            };
            let (a, report) = solve(a0, &cfg)?;
            io::save(&FieldFile::new(Field::Connection(a), Some(metric)), &output)?;
            if let Some(path) = trace {
                fs::write(&path, trace_csv(&report.residual_trace))
                    .map_err(|e| usage(format!("cannot write '{}': {e}", path.display())))?;
            }
            let _ = writeln!(out, "iterations {}", report.iterations);
            let _ = writeln!(out, "residual {}", format_g17(report.final_residual));
            let _ = writeln!(out, "stop {:?}", report.stop);
            Ok(if report.converged { 0 } else { 1 })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: GenKind,
    window: Window,
    algebra: AlgebraKind,
    seed: u64,
    scale: f64,
    rank: u8,
    metric: Option<Metric>,
    dual: Option<Orientation>,
) -> std::result::Result<FieldFile, UsageError> {
    if algebra == AlgebraKind::Gl2 && kind != GenKind::Zero {
        return Err(usage("--algebra gl2 is only available with --kind zero"));
    }
    let field = match (kind, rank) {
        (GenKind::Zero, 0) => Field::Gauge(GaugeField::identity(window, algebra)),
        (GenKind::Zero, 1) => Field::Connection(ConnectionField::zero(window, algebra)),
        (GenKind::Zero, _) => Field::Curvature(CurvatureField::zero(window, algebra)),
        (GenKind::Constant, 0) => Field::Gauge(GaugeField::constant(
            window,
            algebra,
            GroupElement::exp(&random_algebra(seed, algebra, scale)),
        )),
        (GenKind::Constant, 1) => {
            let c = std::array::from_fn(|n| random_algebra(seed.wrapping_add(n as u64), algebra, scale));
            Field::Connection(ConnectionField::constant(window, algebra, c))
        }
        (GenKind::Constant, _) => {
            let c: [AlgebraElement; 6] =
                std::array::from_fn(|n| random_algebra(seed.wrapping_add(n as u64), algebra, scale));
            Field::Curvature(CurvatureField::from_fn(window, algebra, |_, p| c[p.offset()]))
        }
        (GenKind::Random, 0) => Field::Gauge(GaugeField::random(window, algebra, seed, scale)),
        (GenKind::Random, 1) => Field::Connection(ConnectionField::random(window, algebra, seed, scale)),
        (GenKind::Random, _) => Field::Curvature(CurvatureField::random(window, algebra, seed, scale)),
        (GenKind::PureGauge, 1) => {
            Field::Connection(pure_gauge(&GaugeField::random(window, algebra, seed, scale)).map_err(UsageError::from)?)
        }
        (GenKind::PureGauge, r) => return Err(usage(format!("--kind pure-gauge produces a connection, not rank {r}"))),
        (GenKind::Synthetic, 2) => {
            let (Some(m), Some(d)) = (metric, dual) else {
                return Err(usage("--kind synthetic needs --metric and --dual"));
            };
            let gen = PlaneGenerator::Random { seed, kind: algebra, scale };
            Field::Curvature(synthetic_sd_curvature(&gen, window, DualityProblem::new(m, d))?)
        }
        (GenKind::Synthetic, r) => {
            return Err(usage(format!("--kind synthetic produces a curvature field, not rank {r}")))
        }
    };
    let metric = if kind == GenKind::Synthetic { metric } else { None };
    Ok(FieldFile::new(field, metric))
}

/// Loads `path` and rejects files recorded under a different metric.
fn load_with_metric(path: &Path, metric: Metric) -> std::result::Result<FieldFile, UsageError> {
    let file = io::load(path)?;
    match file.metric {
        Some(recorded) if recorded != metric => {
            Err(usage(format!("--metric {metric} conflicts with metric '{recorded}' recorded in '{}'", path.display())))
        }
        _ => Ok(file),
    }
}

fn connection<'a>(field: &'a Field, cmd: &str) -> std::result::Result<&'a ConnectionField, UsageError> {
    match field {
        Field::Connection(a) => Ok(a),
        other => Err(usage(format!("{cmd} needs a rank-1 file, got rank {}", other.rank()))),
    }
}

fn curvature_of(field: &Field, cmd: &str) -> std::result::Result<CurvatureField, UsageError> {
    match field {
        Field::Connection(a) => Ok(curvature(a)),
        Field::Curvature(f) => Ok(f.clone()),
        Field::Gauge(_) => Err(usage(format!("{cmd} needs a rank-1 or rank-2 file, got rank 0"))),
    }
}

struct Outcome {
    pass: bool,
    lines: String,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: String::new() }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push_str(if ok { "ok   " } else { "FAIL " });
        self.lines.push_str(&line);
        self.lines.push('\n');
    }
}

fn problems(metric: Option<Metric>, dual: Option<Orientation>) -> Vec<DualityProblem> {
    DualityProblem::all()
        .into_iter()
        .filter(|p| metric.is_none_or(|m| m == p.metric) && dual.is_none_or(|d| d == p.orientation))
        .collect()
}

fn synthetic_algebra(metric: Metric) -> AlgebraKind {
    match metric {
        Metric::Euclid => AlgebraKind::Su2,
        Metric::Mink => AlgebraKind::Sl2c,
    }
}

/// Synthetic dual fields on varied periodic windows, one per (draw, problem).
fn synthetic_fields(seed: u64, count: usize, problems: &[DualityProblem]) -> Vec<(DualityProblem, CurvatureField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..count {
        for &p in problems {
            let dims = std::array::from_fn(|_| rng.gen_range(2..=4));
            let window = Window::new(dims, Boundary::Periodic);
            let gen = PlaneGenerator::Random { seed: rng.gen(), kind: synthetic_algebra(p.metric), scale: 1.0 };
            let f = synthetic_sd_curvature(&gen, window, p).expect("periodic window and invariant slice");
            out.push((p, f));
        }
    }
    out
}

fn check_diagonal(
    file: Option<&FieldFile>,
    seed: u64,
    count: usize,
    metric: Option<Metric>,
    dual: Option<Orientation>,
) -> std::result::Result<Outcome, UsageError> {
    let mut o = Outcome::new();
    match file.map(|f| &f.field) {
        Some(Field::Connection(a)) => {
            let r = check_diagonal_difference_form(a);
            o.record(r.holds, format!("connection: max violation {}", format_g17(r.max_violation)));
        }
        Some(Field::Curvature(f)) => {
            let r = check_diagonal_relation(f);
            o.record(r.holds, format!("curvature: max violation {}", format_g17(r.max_violation)));
        }
        Some(Field::Gauge(_)) => return Err(usage("relation 13 needs a rank-1 or rank-2 file")),
        None => {
            for (p, f) in synthetic_fields(seed, count, &problems(metric, dual)) {
                let r = check_diagonal_relation(&f);
                o.record(
                    r.holds,
                    format!("synthetic {p} on {}: max violation {}", f.window(), format_g17(r.max_violation)),
                );
            }
        }
    }
    Ok(o)
}

/// `∗∗F = F` (Euclidean) or `∗∗F = -F` (Minkowski) on fields obeying the
/// diagonal relation.
fn check_double_star(
    file: Option<&FieldFile>,
    seed: u64,
    count: usize,
    metric: Metric,
    requested: Option<Metric>,
) -> std::result::Result<Outcome, UsageError> {
    if requested.is_some_and(|m| m != metric) {
        return Err(usage(format!("--metric conflicts with this relation, which is about the {metric} metric")));
    }
    let sign = match metric {
        Metric::Euclid => 1.0,
        Metric::Mink => -1.0,
    };
    let mut o = Outcome::new();
    let mut one = |label: String, f: &CurvatureField| {
        if !check_diagonal_relation(f).holds {
            o.record(false, format!("{label}: diagonal relation fails, premise not met"));
            return;
        }
        let ok = double_star(f, metric) == f.scale(sign);
        o.record(ok, format!("{label}: double star {} F", if sign > 0.0 { "=" } else { "= -" }));
    };
    match file.map(|f| &f.field) {
        Some(Field::Curvature(f)) => one("file".into(), f),
        Some(other) => return Err(usage(format!("this relation needs a rank-2 file, got rank {}", other.rank()))),
        None => {
            for (p, f) in synthetic_fields(seed, count, &problems(Some(metric), None)) {
                one(format!("synthetic {p} on {}", f.window()), &f);
            }
        }
    }
    Ok(o)
}

fn parse_bound(s: &str) -> std::result::Result<[i64; 4], UsageError> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("--bound '{s}' is not an integer or four comma-separated integers")))?;
    match parts.as_slice() {
        [n] => Ok([*n; 4]),
        [a, b, c, d] => Ok([*a, *b, *c, *d]),
        _ => Err(usage(format!("--bound '{s}' needs one or four values"))),
    }
}

/// Random curvature on a zero-boundary 6⁴ window, vanishing outside
/// `max|k_i| < radius`. Slots inside are nonzero with probability 1/2.
pub fn compact_field(seed: u64, radius: i64, kind: AlgebraKind) -> CurvatureField {
    let window = Window::new([6; 4], Boundary::Zero);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = CurvatureField::from_fn(window, kind, |k, _| {
        let inside = k.max_norm() < radius;
        let value = random_algebra(rng.gen(), kind, 1.0);
        if inside && rng.gen_bool(0.5) {
            value
        } else {
            AlgebraElement::zero()
        }
    });
    // never the zero field
    let k = LatticeIndex([
        rng.gen_range(0..radius),
        rng.gen_range(0..radius),
        rng.gen_range(0..radius),
        rng.gen_range(0..radius),
    ]);
    let plane = Plane::ALL[rng.gen_range(0..6)];
    if f.get(k, plane).max_abs() == 0.0 {
        f.set(k, plane, random_algebra(rng.gen(), kind, 1.0));
    }
    f
}

fn check_theorem(
    file: Option<&FieldFile>,
    seed: u64,
    count: usize,
    bound: &str,
    metric: Option<Metric>,
    dual: Option<Orientation>,
) -> std::result::Result<Outcome, UsageError> {
    let bound = parse_bound(bound)?;
    let mut o = Outcome::new();
    let mut one = |label: String, f: &CurvatureField, p: DualityProblem| -> std::result::Result<(), UsageError> {
        let v = verify_triviality_theorem(f, bound, p)?;
        o.record(v != TheoremVerdict::NonzeroContradiction, format!("{label} {p}: {}", v.as_str()));
        Ok(())
    };
    match file.map(|f| &f.field) {
        Some(Field::Curvature(f)) => {
            for p in problems(metric, dual) {
                one("file".into(), f, p)?;
            }
        }
        Some(other) => return Err(usage(format!("theorem needs a rank-2 file, got rank {}", other.rank()))),
        None => {
            let radius = LatticeIndex(bound).max_norm().max(1);
            let zero = CurvatureField::zero(Window::new([6; 4], Boundary::Zero), AlgebraKind::Su2);
            for p in problems(metric, dual) {
                let v = verify_triviality_theorem(&zero, bound, p)?;
                o.record(v == TheoremVerdict::Consistent, format!("zero field {p}: {}", v.as_str()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for n in 0..count {
                let f = compact_field(rng.gen(), radius, AlgebraKind::Sl2c);
                for p in problems(metric, dual) {
                    let v = verify_triviality_theorem(&f, bound, p)?;
                    o.record(
                        v != TheoremVerdict::Consistent && v != TheoremVerdict::NonzeroContradiction,
                        format!("compact field {n} {p}: {}", v.as_str()),
                    );
                }
            }
        }
    }
    Ok(o)
}

/// `(metric, source, target, sign)`: an impulse at `(k, source)` stars to
/// `sign` times itself at `(τ_source k, target)` and nothing else.
pub const STAR_TABLE: [(Metric, Plane, Plane, f64); 12] = [
    (Metric::Euclid, Plane::P12, Plane::P34, 1.0),
    (Metric::Euclid, Plane::P13, Plane::P24, -1.0),
    (Metric::Euclid, Plane::P14, Plane::P23, 1.0),
    (Metric::Euclid, Plane::P23, Plane::P14, 1.0),
    (Metric::Euclid, Plane::P24, Plane::P13, -1.0),
    (Metric::Euclid, Plane::P34, Plane::P12, 1.0),
    (Metric::Mink, Plane::P12, Plane::P34, -1.0),
    (Metric::Mink, Plane::P13, Plane::P24, 1.0),
    (Metric::Mink, Plane::P14, Plane::P23, -1.0),
    (Metric::Mink, Plane::P23, Plane::P14, 1.0),
    (Metric::Mink, Plane::P24, Plane::P13, -1.0),
    (Metric::Mink, Plane::P34, Plane::P12, 1.0),
];

fn check_star_table(seed: u64) -> Outcome {
    let window = Window::periodic(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut o = Outcome::new();
    for (metric, source, target, sign) in STAR_TABLE {
        let k = LatticeIndex(std::array::from_fn(|_| rng.gen_range(0..4)));
        let value = random_algebra(rng.gen(), AlgebraKind::Sl2c, 1.0);
        let s = star(&CurvatureField::impulse(window, AlgebraKind::Sl2c, k, source, value), metric);
        let (i, j) = source.axes();
        let mut dest = k;
        dest.0[i.get() - 1] += 1;
        dest.0[j.get() - 1] += 1;
        let dest = window.wrap(dest).expect("periodic");
        let expected = CurvatureField::impulse(window, AlgebraKind::Sl2c, dest, target, value.scale(sign));
        o.record(s == expected, format!("{metric} {source} at {k} -> {target} at {dest}, sign {sign:+}"));
    }
    o
}

fn check_path_equivalence(
    file: Option<&FieldFile>,
    seed: u64,
    count: usize,
    metric: Option<Metric>,
    dual: Option<Orientation>,
) -> std::result::Result<Outcome, UsageError> {
    const TOL: f64 = 1e-13;
    let mut o = Outcome::new();
    let mut one = |label: String, a: &ConnectionField| {
        for p in problems(metric, dual) {
            let d = residual_componentwise(a, p).max_abs_diff(&residual(&curvature(a), p)).expect("same window");
            o.record(d <= TOL, format!("{label} {p}: max difference {}", format_g17(d)));
        }
    };
    match file.map(|f| &f.field) {
        Some(Field::Connection(a)) => one("file".into(), a),
        Some(other) => return Err(usage(format!("path-equivalence needs a rank-1 file, got rank {}", other.rank()))),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for n in 0..count {
                let window = Window::periodic(if n % 2 == 0 { 3 } else { 4 });
                let kind = if rng.gen_bool(0.5) { AlgebraKind::Su2 } else { AlgebraKind::Sl2c };
                let a = ConnectionField::random(window, kind, rng.gen(), 1.0);
                one(format!("{kind} connection {n} on {window}"), &a);
            }
        }
    }
    Ok(o)
}

/// The solver trace as CSV with a header row.
pub fn trace_csv(trace: &[TracePoint]) -> String {
    let mut s = String::from("iteration,residual,step\n");
    for t in trace {
        let _ = writeln!(s, "{},{},{}", t.iteration, format_g17(t.residual), format_g17(t.step));
    }
    s
}

/// `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        strip_fraction_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_fraction_zeros(mantissa), exp.abs())
    }
}

fn strip_fraction_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.0, "0"),
            (-0.0, "-0"),
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (1e-5, "1.0000000000000001e-05"),
            (1.5e-5, "1.5e-05"),
            (1.2345678901234568e17, "1.2345678901234568e+17"),
            (1e16, "10000000000000000"),
            (1e17, "1e+17"),
            (-2.5e-300, "-2.5e-300"),
            (5e-324, "4.9406564584124654e-324"),
            (1.0 / 3.0, "0.33333333333333331"),
            (12345.678, "12345.678"),
            (1e100, "1e+100"),
            (0.0001, "0.0001"),
            (f64::INFINITY, "inf"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let x = f64::from_bits(rng.gen());
            if x.is_finite() {
                assert_eq!(format_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
            }
        }
    }

    #[test]
    fn trace_csv_layout() {
        let t = [
            TracePoint { iteration: 0, residual: 0.5, step: 0.0 },
            TracePoint { iteration: 3, residual: 0.1, step: 0.25 },
        ];
        assert_eq!(trace_csv(&t), "iteration,residual,step\n0,0.5,0\n3,0.10000000000000001,0.25\n");
    }

    #[test]
    fn star_table_agrees_with_library() {
        for (metric, source, target, sign) in STAR_TABLE {
            let e = crate::hodge::StarTable::new(metric).from_source(source);
            assert_eq!((e.target, e.sign), (target, sign), "{metric} {source}");
        }
    }

    #[test]
    fn bound_parsing() {
        assert_eq!(parse_bound("3").unwrap(), [3; 4]);
        assert_eq!(parse_bound("1,2,3,-4").unwrap(), [1, 2, 3, -4]);
        assert!(parse_bound("1,2").is_err());
        assert!(parse_bound("x").is_err());
    }

    #[test]
    fn compact_fields_are_nonzero_and_supported() {
        for seed in 0..20 {
            let f = compact_field(seed, 3, AlgebraKind::Su2);
            assert!(f.max_abs() > 0.0);
            for k in f.window().sites().filter(|k| k.max_norm() >= 3) {
                assert!(Plane::ALL.iter().all(|&p| f.get(k, p).max_abs() == 0.0));
            }
        }
    }
}
