//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible request, 3 a hard
//! inequality was violated.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{self, BoundReport, ReportContext, Verdict};
use crate::congruence::{ClassifyOptions, Classifier, Mode, Strategy};
use crate::error::{Error, Result};
use crate::field::{FieldParams, Point};
use crate::harness::{run_sweep, SweepConfig, SweepRow};
use crate::isometry::OrthogonalGroup;
use crate::sets::{parse_point_spec, parse_set_spec, product};
use crate::statistics::StatReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

/// Environment variable forcing orbit-only classification.
pub const ORACLE_ENV: &str = "FPC_ORACLE";

#[derive(Debug, Parser)]
#[command(name = "fpc", version, about = "Congruence classes, distances and hinges over F_p^2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump O2(F_p) as CSV rows m11,m12,m21,m22,det.
    Group(GroupArgs),
    /// Distance and hinge histograms.
    Stats(StatsArgs),
    /// Congruence class count with per-class multiplicities.
    Classes(ClassesArgs),
    /// Every inequality report for one set.
    Verify(VerifyArgs),
    /// Seeded trials over random product sets.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ordered,
    Unordered,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SetArgs {
    #[arg(long)]
    pub p: u64,
    /// Residue set A; the point set is A × A.
    #[arg(long)]
    pub set: Option<String>,
    /// Point set E (file of x,y lines, or a point-set spec).
    #[arg(long, conflicts_with = "set")]
    pub points: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    #[arg(long)]
    pub p: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// Count x = y pairs in ν (default).
    #[arg(long, overrides_with = "exclude_diagonal")]
    pub include_diagonal: bool,
    #[arg(long, overrides_with = "include_diagonal")]
    pub exclude_diagonal: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ClassesArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub k: u8,
    #[arg(long, value_enum, default_value_t = ModeArg::Unordered)]
    pub mode: ModeArg,
    /// Pairwise distinct vertices (default).
    #[arg(long, overrides_with = "allow_repeats")]
    pub distinct: bool,
    #[arg(long, overrides_with = "distinct")]
    pub allow_repeats: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// One or more primes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<u64>,
    /// Sizes |A|, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) | Error::Overflow(_) => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

/// Header fields shared by every artifact, in emission order.
struct Header {
    fields: Vec<(&'static str, String)>,
    conventions: Vec<(&'static str, &'static str)>,
    extra: Vec<(&'static str, String)>,
}

impl Header {
    fn new(command: &str, strategy: Strategy) -> Self {
        Header {
            fields: vec![
                ("tool", format!("fpc {}", env!("CARGO_PKG_VERSION"))),
                ("command", command.to_string()),
                ("classifier", if strategy == Strategy::Oracle { "oracle" } else { "fast" }.to_string()),
            ],
            conventions: vec![
                ("distance", "x^2+y^2"),
                ("nu", "ordered pairs, diagonal per config"),
                ("delta", "distinct points"),
                ("hinges", "q1=q2 and q=p allowed"),
                ("triangles", "collinear included"),
            ],
            extra: Vec::new(),
        }
    }

    fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }

    fn opt(self, key: &'static str, value: &Option<String>) -> Self {
        let v = value.clone().unwrap_or_default();
        self.field(key, v)
    }

    fn common(self, c: &Common) -> Self {
        let out = c.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let format = match c.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        self.field("seed", c.seed).field("format", format).field("out", out)
    }

    fn summary(&mut self, key: &'static str, value: impl ToString) {
        self.extra.push((key, value.to_string()));
    }

    fn csv_lines(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.fields {
            s.push_str(&format!("# {k}={v}\n"));
        }
        for (k, v) in &self.conventions {
            s.push_str(&format!("# convention.{k}={v}\n"));
        }
        for (k, v) in &self.extra {
            s.push_str(&format!("# summary.{k}={v}\n"));
        }
        s
    }

    fn json(&self) -> Value {
        let mut config = Map::new();
        for (k, v) in &self.fields {
            config.insert(k.to_string(), Value::String(v.clone()));
        }
        let conventions: Map<String, Value> = self
            .conventions
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
            .collect();
        json!({ "config": config, "conventions": conventions })
    }
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json_text(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn resolve_points(set: &SetArgs, fp: FieldParams, seed: u64) -> Result<(String, Vec<Point>, Option<usize>)> {
    match (&set.set, &set.points) {
        (Some(spec), _) => {
            let a = parse_set_spec(spec, fp, seed)?;
            let n = a.resolved.len();
            Ok((spec.clone(), product(&a.resolved), Some(n)))
        }
        (None, Some(spec)) => {
            let e = parse_point_spec(spec, fp, seed)?;
            Ok((spec.clone(), e.resolved, None))
        }
        (None, None) => Err(Error::Usage("one of --set or --points is required".into())),
    }
}

fn spec_seed(spec: &str, default: u64) -> Option<u64> {
    if spec.starts_with("random:") {
        spec.split(':').nth(2).and_then(|s| s.parse().ok()).or(Some(default))
    } else {
        None
    }
}

/// Artifact text and exit code for one command.
struct Output {
    text: String,
    code: i32,
    diagnostics: Vec<String>,
}

fn cmd_group(args: &GroupArgs, strategy: Strategy) -> Result<Output> {
    let fp = FieldParams::new(args.p)?;
    let group = OrthogonalGroup::cached(fp);
    let header = Header::new("group", strategy).field("p", args.p).common(&args.common);
    let rows: Vec<Vec<String>> = group
        .elements()
        .iter()
        .map(|m| {
            vec![
                m.m11.to_string(),
                m.m12.to_string(),
                m.m21.to_string(),
                m.m22.to_string(),
                m.det_sign(fp).to_string(),
            ]
        })
        .collect();
    let text = match args.common.format {
        Format::Csv => header.csv_lines() + &csv_body(&["m11", "m12", "m21", "m22", "det"], rows)?,
        Format::Json => {
            let elems: Vec<Value> = group
                .elements()
                .iter()
                .map(|m| json!({"m11": m.m11, "m12": m.m12, "m21": m.m21, "m22": m.m22, "det": m.det_sign(fp)}))
                .collect();
            json_text(&json!({"header": header.json(), "order": group.len(), "elements": elems}))?
        }
    };
    Ok(Output { text, code: EXIT_OK, diagnostics: Vec::new() })
}

fn cmd_stats(args: &StatsArgs, strategy: Strategy) -> Result<Output> {
    let fp = FieldParams::new(args.set.p)?;
    let (_, points, _) = resolve_points(&args.set, fp, args.common.seed)?;
    let include_diagonal = !args.exclude_diagonal;
    let mut report = StatReport::compute(&points, fp);
    if !include_diagonal {
        report.nu = report.nu.exclude_diagonal();
    }
    let summary = report.summary()?;
    let mut header = Header::new("stats", strategy)
        .field("p", args.set.p)
        .opt("set", &args.set.set)
        .opt("points", &args.set.points)
        .field("include_diagonal", include_diagonal)
        .common(&args.common);
    let text = match args.common.format {
        Format::Csv => {
            header.summary("points", summary.points);
            header.summary("sum_nu_sq", summary.sum_nu_sq);
            header.summary("sum_hinges", summary.sum_hinges);
            header.summary("distinct_distances", summary.distinct_distances);
            let rows = report
                .rows()
                .into_iter()
                .map(|(l, n, h)| vec![l.to_string(), n.to_string(), h.to_string()]);
            header.csv_lines() + &csv_body(&["lambda", "nu", "hinge"], rows)?
        }
        Format::Json => {
            let rows: Vec<Value> = report
                .rows()
                .into_iter()
                .map(|(l, n, h)| json!({"lambda": l, "nu": n, "hinge": h}))
                .collect();
            let distances: Vec<u32> = report.distances.values.iter().map(|v| v.value()).collect();
            json_text(&json!({
                "header": header.json(),
                "summary": summary,
                "rows": rows,
                "distances": distances,
            }))?
        }
    };
    Ok(Output { text, code: EXIT_OK, diagnostics: Vec::new() })
}

fn cmd_classes(args: &ClassesArgs, strategy: Strategy) -> Result<Output> {
    let fp = FieldParams::new(args.set.p)?;
    let (_, points, _) = resolve_points(&args.set, fp, args.common.seed)?;
    let mode = match args.mode {
        ModeArg::Ordered => Mode::Ordered,
        ModeArg::Unordered => Mode::Unordered,
    };
    let distinct = !args.allow_repeats;
    let opts = ClassifyOptions {
        k: args.k as usize,
        mode,
        distinct,
        strategy,
    };
    let cc = Classifier::new(fp).count_classes(&points, opts)?;
    let pairs = cc.congruent_pair_count()?;
    let mut header = Header::new("classes", strategy)
        .field("p", args.set.p)
        .opt("set", &args.set.set)
        .opt("points", &args.set.points)
        .field("k", args.k)
        .field("mode", mode)
        .field("distinct", distinct)
        .common(&args.common);
    let text = match args.common.format {
        Format::Csv => {
            header.summary("points", points.len());
            header.summary("simplices", cc.simplices);
            header.summary("classes", cc.total_classes());
            header.summary("non_degenerate_classes", cc.non_degenerate_classes(fp));
            header.summary("congruent_pairs", pairs);
            let mut body = Vec::new();
            cc.write_csv(&mut body)?;
            header.csv_lines() + &String::from_utf8(body).expect("csv output is utf-8")
        }
        Format::Json => {
            let classes: Vec<Value> = cc
                .multiplicities
                .iter()
                .map(|(k, m)| json!({"key": k.to_string(), "multiplicity": m}))
                .collect();
            json_text(&json!({
                "header": header.json(),
                "points": points.len(),
                "simplices": cc.simplices,
                "total_classes": cc.total_classes(),
                "non_degenerate_classes": cc.non_degenerate_classes(fp),
                "congruent_pairs": pairs,
                "classes": classes,
            }))?
        }
    };
    Ok(Output { text, code: EXIT_OK, diagnostics: Vec::new() })
}

fn report_diagnostics(reports: &[BoundReport]) -> (i32, Vec<String>) {
    let mut lines = Vec::new();
    let mut code = EXIT_OK;
    for r in reports {
        if r.is_failure() {
            code = EXIT_ASSERTION;
            lines.push(format!("ASSERTION FAILED {}: {}", r.bound_id, r.detail));
        } else if r.verdict == Verdict::Violated {
            lines.push(format!("finding {}: {}", r.bound_id, r.detail));
        }
    }
    (code, lines)
}

fn cmd_verify(args: &VerifyArgs, strategy: Strategy) -> Result<Output> {
    let fp = FieldParams::new(args.set.p)?;
    let seed = args.common.seed;
    let (spec, points, _) = resolve_points(&args.set, fp, seed)?;
    let ctx = ReportContext {
        seed: spec_seed(&spec, seed),
        set_spec: spec,
    };
    let (sym, reports) = match &args.set.set {
        Some(s) => bounds::verify_product(&parse_set_spec(s, fp, seed)?.resolved, fp, &ctx, strategy)?,
        None => bounds::verify_points(&points, fp, &ctx, strategy)?,
    };
    let (code, diagnostics) = report_diagnostics(&reports);
    let header = Header::new("verify", strategy)
        .field("p", args.set.p)
        .opt("set", &args.set.set)
        .opt("points", &args.set.points)
        .common(&args.common);
    let text = match args.common.format {
        Format::Csv => header.csv_lines() + &csv_body(&BoundReport::CSV_HEADER, reports.iter().map(BoundReport::csv_record))?,
        Format::Json => json_text(&json!({"header": header.json(), "symbols": sym, "reports": reports}))?,
    };
    Ok(Output { text, code, diagnostics })
}

fn cmd_sweep(args: &SweepArgs, strategy: Strategy) -> Result<Output> {
    let join = |v: &[String]| v.join(",");
    let header = Header::new("sweep", strategy)
        .field("p", join(&args.p.iter().map(|p| p.to_string()).collect::<Vec<_>>()))
        .field("n", join(&args.n.iter().map(|n| n.to_string()).collect::<Vec<_>>()))
        .field("trials", args.trials)
        .common(&args.common);
    let cfg = SweepConfig {
        primes: args.p.clone(),
        sizes: args.n.clone(),
        trials: args.trials,
        seed: args.common.seed,
        strategy,
    };
    let outcome = run_sweep(&cfg)?;
    let (code, diagnostics) = report_diagnostics(&outcome.failures);
    let text = match args.common.format {
        Format::Csv => header.csv_lines() + &csv_body(&SweepRow::CSV_HEADER, outcome.rows.iter().map(SweepRow::csv_record))?,
        Format::Json => json_text(&json!({"header": header.json(), "rows": outcome.rows}))?,
    };
    Ok(Output { text, code, diagnostics })
}

fn workers(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Group(a) => a.common.workers,
        Command::Stats(a) => a.common.workers,
        Command::Classes(a) => a.common.workers,
        Command::Verify(a) => a.common.workers,
        Command::Sweep(a) => a.common.workers,
    }
}

fn out_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Group(a) => a.common.out.as_ref(),
        Command::Stats(a) => a.common.out.as_ref(),
        Command::Classes(a) => a.common.out.as_ref(),
        Command::Verify(a) => a.common.out.as_ref(),
        Command::Sweep(a) => a.common.out.as_ref(),
    }
}

fn dispatch(cmd: &Command, strategy: Strategy) -> Result<Output> {
    let go = || match cmd {
        Command::Group(a) => cmd_group(a, strategy),
        Command::Stats(a) => cmd_stats(a, strategy),
        Command::Classes(a) => cmd_classes(a, strategy),
        Command::Verify(a) => cmd_verify(a, strategy),
        Command::Sweep(a) => cmd_sweep(a, strategy),
    };
    match workers(cmd) {
        Some(0) => Err(Error::Usage("--workers must be positive".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(go),
        None => go(),
    }
}

/// Parses `args` (program name first), runs the command, and writes the
/// artifact to `--out` or `stdout`. Returns the process exit code.
pub fn run<I, T>(args: I, strategy: Strategy, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let output = match dispatch(&cli.command, strategy) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match out_path(&cli.command) {
        Some(path) => std::fs::write(path, output.text.as_bytes()),
        None => stdout.write_all(output.text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    for line in &output.diagnostics {
        let _ = writeln!(stderr, "{line}");
    }
    output.code
}

/// Strategy selected by the environment.
pub fn strategy_from_env() -> Strategy {
    match std::env::var(ORACLE_ENV) {
        Ok(v) if v == "1" => Strategy::Oracle,
        _ => Strategy::Fast,
    }
}
