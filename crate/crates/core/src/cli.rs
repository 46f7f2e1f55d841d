//! Command-line front end: file formats, report emission and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use crate::error::Error;
use crate::exec::{with_threads, Execution};
use crate::metric::{
    conjugacy_class_curves, convex_cloud, k_estimate, k_lower_bound, stretch_march,
    LengthEvaluator, MarchOptions, MarchStatus,
};
use crate::shear::{shear_to_holonomy_rep, stretch, twisted_torus_shears, Curve, ShearStructure};
use crate::surface::{CombinatorialLoop, FreeWord, IdealTriangulation, LoopStep, Slope, Turn};
use crate::traintrack::{
    carries_positive, is_recurrent, positive_witness, weight_cone_basis, Switch, TrainTrack,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSETTLED: i32 = 3;
pub const EXIT_ELLIPTIC: i32 = 4;
pub const EXIT_VERDICT: i32 = 5;

/// Environment variable capping sweep parallelism; 0 means automatic.
pub const THREADS_VAR: &str = "STRETCHLAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "stretchlab",
    version,
    about = "Lipschitz distance between cusped hyperbolic surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Length of one curve.
    Length { surface: PathBuf, curve: String },
    /// Curve-sweep estimate of K(g, h) as a TSV table.
    Kmetric {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_complexity: usize,
        /// Also sweep all conjugacy classes of words up to this length.
        #[arg(long)]
        all_classes: Option<usize>,
    },
    /// Stretch or twist a structure and print the result.
    Deform {
        surface: PathBuf,
        #[command(flatten)]
        how: Deformation,
    },
    /// Gradients of log length of slopes, with hull verdicts.
    Gradcloud {
        surface: PathBuf,
        #[arg(short, long, default_value_t = 20)]
        n: usize,
    },
    /// Descent from g toward h.
    March {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = 500)]
        max_steps: usize,
    },
    /// Recurrence, cone dimension and positivity of a train track.
    Track {
        track: PathBuf,
        /// Print only the verdict line.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Deformation {
    #[arg(long, allow_hyphen_values = true)]
    stretch: Option<f64>,
    /// Slope and twist amount, e.g. `--twist 1/0 0.5`.
    #[arg(long, num_args = 2, value_names = ["SLOPE", "T"], allow_hyphen_values = true)]
    twist: Option<Vec<String>>,
}

/// What a command printed and how it should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Elliptic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EllipticHolonomy { .. } => Failure::Elliptic(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(String, i32), Failure>;

#[derive(Debug, Clone, PartialEq)]
enum TriangulationSource {
    Builtin,
    Table(Vec<[usize; 3]>),
}

/// A parsed surface file.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFile {
    pub label: String,
    triangulation: TriangulationSource,
    pub structure: ShearStructure,
}

pub const BUILTIN_TORUS: &str = "S_1_1";

impl SurfaceFile {
    pub fn builtin(structure: ShearStructure) -> Self {
        SurfaceFile {
            label: BUILTIN_TORUS.into(),
            triangulation: TriangulationSource::Builtin,
            structure,
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| format!("surface file is not valid JSON: {e}"))?;
        let obj = v.as_object().ok_or("surface file must be a JSON object")?;
        let label = match obj.get("surface") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err("\"surface\" must be a string".into()),
            None => return Err("missing key \"surface\"".into()),
        };
        let (source, tri) = match obj.get("triangulation") {
            Some(Value::String(s)) if s == BUILTIN_TORUS => (
                TriangulationSource::Builtin,
                IdealTriangulation::standard_torus(),
            ),
            Some(Value::String(s)) => return Err(format!("unknown built-in triangulation {s:?}")),
            Some(t @ Value::Array(_)) => {
                let table: Vec<[usize; 3]> = Deserialize::deserialize(t).map_err(|e| {
                    format!("triangulation must be a list of edge-label triples: {e}")
                })?;
                let tri = IdealTriangulation::from_edge_labels(table.clone())
                    .map_err(|e| e.to_string())?;
                (TriangulationSource::Table(table), tri)
            }
            Some(_) => {
                return Err("\"triangulation\" must be \"S_1_1\" or a list of triangles".into())
            }
            None => return Err("missing key \"triangulation\"".into()),
        };
        let shears_obj = match obj.get("shears") {
            Some(Value::Object(m)) => m,
            Some(_) => return Err("\"shears\" must be an object keyed e0, e1, ...".into()),
            None => return Err("missing key \"shears\"".into()),
        };
        let e = tri.edge_count();
        let mut shears = vec![None; e];
        for (k, val) in shears_obj {
            let idx = k
                .strip_prefix('e')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&i| i < e && k == &format!("e{i}"))
                .ok_or_else(|| format!("unexpected shear key {k:?}; edges are e0..e{}", e - 1))?;
            shears[idx] = Some(
                val.as_f64()
                    .ok_or_else(|| format!("shear {k} is not a number"))?,
            );
        }
        let shears = shears
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| format!("missing shear e{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let structure = ShearStructure::new(Arc::new(tri), shears).map_err(|e| e.to_string())?;
        Ok(SurfaceFile {
            label,
            triangulation: source,
            structure,
        })
    }

    pub fn with_structure(&self, structure: ShearStructure) -> Self {
        SurfaceFile {
            label: self.label.clone(),
            triangulation: self.triangulation.clone(),
            structure,
        }
    }

    /// JSON text with keys in a fixed order and shears at 17 significant
    /// digits.
    pub fn emit(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"surface\": {},", Value::String(self.label.clone()));
        match &self.triangulation {
            TriangulationSource::Builtin => {
                let _ = writeln!(out, "  \"triangulation\": \"{BUILTIN_TORUS}\",");
            }
            TriangulationSource::Table(t) => {
                let rows: Vec<String> = t
                    .iter()
                    .map(|r| format!("[{}, {}, {}]", r[0], r[1], r[2]))
                    .collect();
                let _ = writeln!(out, "  \"triangulation\": [{}],", rows.join(", "));
            }
        }
        out.push_str("  \"shears\": {\n");
        let n = self.structure.shears().len();
        for (i, x) in self.structure.shears().iter().enumerate() {
            let sep = if i + 1 < n { "," } else { "" };
            let _ = writeln!(out, "    \"e{i}\": {}{sep}", fmt_exact(*x));
        }
        out.push_str("  }\n}\n");
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    fmt_sig(x, 12)
}

pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses `slope:p/q`, `word:<letters>` or `loop:<edge>,<R|L>;...`.
pub fn parse_curve(spec: &str) -> Result<Curve, String> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| format!("curve {spec:?} needs a kind prefix"))?;
    match kind {
        "slope" => parse_slope(body).map(Curve::Slope),
        "word" => FreeWord::parse(body)
            .map(Curve::Word)
            .map_err(|e| e.to_string()),
        "loop" => {
            let steps = body
                .split(';')
                .map(|step| {
                    let (e, t) = step
                        .split_once(',')
                        .ok_or_else(|| format!("loop step {step:?} is not edge,turn"))?;
                    let edge = e
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad edge in loop step {step:?}"))?;
                    let turn = match t.trim() {
                        "R" => Turn::Right,
                        "L" => Turn::Left,
                        _ => return Err(format!("turn in {step:?} must be R or L")),
                    };
                    Ok(LoopStep { edge, turn })
                })
                .collect::<Result<Vec<_>, String>>()?;
            CombinatorialLoop::new(steps)
                .map(Curve::Loop)
                .map_err(|e| e.to_string())
        }
        _ => Err(format!(
            "unknown curve kind {kind:?}; use slope, word or loop"
        )),
    }
}

pub fn parse_slope(s: &str) -> Result<Slope, String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("slope {s:?} must look like p/q"))?;
    let p = p
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("bad numerator in slope {s:?}"))?;
    let q = q
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("bad denominator in slope {s:?}"))?;
    Slope::new(p, q).map_err(|e| e.to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackFile {
    branches: usize,
    switches: Vec<Switch>,
}

pub fn parse_track(text: &str) -> Result<TrainTrack, String> {
    let f: TrackFile =
        serde_json::from_str(text).map_err(|e| format!("invalid track file: {e}"))?;
    TrainTrack::new(f.branches, f.switches).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_surface(path: &Path) -> Result<SurfaceFile, Failure> {
    SurfaceFile::parse(&read(path)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_pair(g: &Path, h: &Path) -> Result<(SurfaceFile, SurfaceFile), Failure> {
    let (g, h) = (load_surface(g)?, load_surface(h)?);
    if !g.structure.same_triangulation(&h.structure) {
        return Err(Error::TriangulationMismatch.into());
    }
    Ok((g, h))
}

/// Two sweep levels ending at `n`, so the report can say whether the
/// maximizer has settled.
pub fn kmetric_schedule(n: usize) -> Vec<usize> {
    let half = n.div_ceil(2);
    if half < n {
        vec![half, n]
    } else {
        vec![n]
    }
}

fn cmd_length(surface: &Path, curve: &str) -> CmdResult {
    let s = load_surface(surface)?;
    let c = parse_curve(curve).map_err(Failure::Invalid)?;
    let len = LengthEvaluator::new(&s.structure).length(&c)?;
    Ok((format!("{}\n", fmt_num(len)), EXIT_OK))
}

fn cmd_kmetric(
    g: &Path,
    h: &Path,
    n: usize,
    all_classes: Option<usize>,
    exec: Execution,
) -> CmdResult {
    if n == 0 {
        return Err(Failure::Invalid(
            "--max-complexity must be at least 1".into(),
        ));
    }
    let (g, h) = load_pair(g, h)?;
    let report = k_estimate(&g.structure, &h.structure, &kmetric_schedule(n), exec)?;
    let mut out = String::from("curve\tlen_g\tlen_h\tlog_ratio\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.curve,
            fmt_num(r.len_g),
            fmt_num(r.len_h),
            fmt_num(r.log_ratio)
        );
    }
    if let Some(len) = all_classes {
        if len == 0 {
            return Err(Failure::Invalid("--all-classes must be at least 1".into()));
        }
        let words = k_lower_bound(
            &g.structure,
            &h.structure,
            &conjugacy_class_curves(len),
            exec,
        )?;
        let _ = writeln!(
            out,
            "K_all_classes={} best={} difference={}",
            fmt_num(words.k_lower),
            words.best,
            fmt_num(words.k_lower - report.k_lower)
        );
    }
    let _ = writeln!(
        out,
        "K_lower={} best={} stabilized={}",
        fmt_num(report.k_lower),
        report.best,
        report.stabilized
    );
    Ok((
        out,
        if report.stabilized {
            EXIT_OK
        } else {
            EXIT_UNSETTLED
        },
    ))
}

fn cmd_deform(surface: &Path, how: &Deformation) -> CmdResult {
    let s = load_surface(surface)?;
    let deformed = match (how.stretch, &how.twist) {
        (Some(t), None) => {
            if !t.is_finite() {
                return Err(Failure::Invalid(format!(
                    "stretch amount {t} is not finite"
                )));
            }
            stretch(&s.structure, t)
        }
        (None, Some(args)) => {
            let slope = parse_slope(&args[0]).map_err(Failure::Invalid)?;
            let t: f64 = args[1]
                .parse()
                .ok()
                .filter(|t: &f64| t.is_finite())
                .ok_or_else(|| {
                    Failure::Invalid(format!("twist amount {:?} is not a number", args[1]))
                })?;
            if t == 0.0 {
                s.structure.clone()
            } else {
                let rep = shear_to_holonomy_rep(&s.structure)?;
                let shears = twisted_torus_shears(&rep, &slope, t)?;
                ShearStructure::new(s.structure.shared_triangulation().clone(), shears.to_vec())?
            }
        }
        _ => {
            return Err(Failure::Invalid(
                "give exactly one of --stretch or --twist".into(),
            ))
        }
    };
    Ok((s.with_structure(deformed).emit(), EXIT_OK))
}

fn cmd_gradcloud(surface: &Path, n: usize, exec: Execution) -> CmdResult {
    if n < 2 {
        return Err(Failure::Invalid("-n must be at least 2".into()));
    }
    let s = load_surface(surface)?;
    let cloud = convex_cloud(&s.structure, n, exec)?;
    let mut out = String::from("p,q,x,y\n");
    for (slope, pt) in cloud.slopes.iter().zip(&cloud.points) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            slope.p(),
            slope.q(),
            fmt_num(pt[0]),
            fmt_num(pt[1])
        );
    }
    let (interior, vertices) = (cloud.origin_interior(), cloud.all_vertices());
    let _ = writeln!(out, "origin_interior={interior}");
    let _ = writeln!(out, "all_vertices={vertices}");
    Ok((
        out,
        if interior && vertices {
            EXIT_OK
        } else {
            EXIT_VERDICT
        },
    ))
}

fn cmd_march(g: &Path, h: &Path, step: f64, max_steps: usize, exec: Execution) -> CmdResult {
    let (g, h) = load_pair(g, h)?;
    let report = stretch_march(
        &g.structure,
        &h.structure,
        &MarchOptions::new(step, max_steps),
        exec,
    )?;
    let mut out = String::from("step\tK_lower\tbest\n");
    for s in &report.trace {
        let _ = writeln!(out, "{}\t{}\t{}", s.index, fmt_num(s.k_lower), s.best);
    }
    let status = match report.status {
        MarchStatus::Converged => "converged",
        MarchStatus::NoProgress => "no_progress",
        MarchStatus::MaxSteps => "max_steps",
    };
    let _ = writeln!(
        out,
        "status={status} K_lower={} steps={}",
        fmt_num(report.final_k),
        report.trace.len()
    );
    let code = if report.status == MarchStatus::Converged {
        EXIT_OK
    } else {
        EXIT_UNSETTLED
    };
    Ok((out, code))
}

fn cmd_track(path: &Path, check: bool) -> CmdResult {
    let tt = parse_track(&read(path)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let basis = weight_cone_basis(&tt);
    let mut out = format!(
        "recurrent={} cone_dim={} positive={}\n",
        is_recurrent(&tt),
        basis.len(),
        carries_positive(&tt)
    );
    if !check {
        for v in &basis {
            let entries: Vec<String> = v.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "basis={}", entries.join(","));
        }
        if let Some(w) = positive_witness(&tt) {
            let entries: Vec<String> = w.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "witness={}", entries.join(","));
        }
    }
    Ok((out, EXIT_OK))
}

fn threads_from_env() -> Result<usize, Failure> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Invalid(format!("{THREADS_VAR}={v:?} is not a thread count"))),
    }
}

fn dispatch(cmd: &Command) -> CmdResult {
    let exec = Execution::default();
    match cmd {
        Command::Length { surface, curve } => cmd_length(surface, curve),
        Command::Kmetric {
            g,
            h,
            max_complexity,
            all_classes,
        } => cmd_kmetric(g, h, *max_complexity, *all_classes, exec),
        Command::Deform { surface, how } => cmd_deform(surface, how),
        Command::Gradcloud { surface, n } => cmd_gradcloud(surface, *n, exec),
        Command::March {
            g,
            h,
            step,
            max_steps,
        } => cmd_march(g, h, *step, *max_steps, exec),
        Command::Track { track, check } => cmd_track(track, *check),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome {
                stdout,
                stderr,
                code,
            };
        }
    };
    let result =
        threads_from_env().and_then(|threads| with_threads(threads, || dispatch(&cli.command)));
    match result {
        Ok((stdout, code)) => Outcome {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(Failure::Invalid(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: EXIT_INVALID,
        },
        Err(Failure::Elliptic(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: EXIT_ELLIPTIC,
        },
    }
}
