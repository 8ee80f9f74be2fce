//! Argument grammar and subcommand execution.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use spp_core::eval::{evaluate, EvaluationReport};
use spp_core::formats::{read_instance, FormatTag, ParseError, ParseOptions};
use spp_core::lowering::{
    encode_solution, lower_amwc, lower_cell_tracking, lower_gm, lower_mgm, lower_mrf_local_polytope,
    lower_mrf_potts_compact, lower_multicut, lower_tomography, LoweredModel, VarMapEntry, DEFAULT_CYCLE_LIMIT,
};
use spp_core::model::{instance_stats, InstanceStats, MrfLabeling, ProblemClass, ProblemInstance, Solution};
use spp_core::solve::{brute_force, gaec, greedy_edge_fixation, greedy_gm, icm, SolveError, SolveResult, DEFAULT_BUDGET};

use crate::detect::detect_path;
use crate::fetch::{cache_dir, fetch_dataset, DefaultDownloader, Downloader};
use crate::manifest::DatasetManifest;
use crate::solution_io::{read_solution, write_solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spp", version, about = "Inspect, convert, evaluate and solve discrete optimization benchmark instances")]
pub struct Cli {
    /// JSON report on stdout (default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// One human-readable line per record.
    #[arg(long, global = true)]
    text: bool,
    /// Add wall-clock seconds to every record.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List supported formats.
    Formats,
    /// Size statistics per instance file.
    Stats(BatchArgs),
    /// Parse and check instance files.
    Validate(BatchArgs),
    /// Evaluate a solution file against an instance.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        parse: ParseArgs,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Lower an instance to an LP file.
    Convert {
        file: PathBuf,
        #[command(flatten)]
        parse: ParseArgs,
        /// Longest multicut cycle given its own inequality.
        #[arg(long, default_value_t = DEFAULT_CYCLE_LIMIT)]
        cycle_limit: usize,
        /// Compact encoding for Potts MRFs.
        #[arg(long)]
        potts: bool,
        /// LP destination; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// JSON file mapping LP variables back to the instance.
        #[arg(long)]
        var_map: Option<PathBuf>,
        /// Native solution to encode as an LP assignment.
        #[arg(long, requires = "solution_out")]
        solution: Option<PathBuf>,
        #[arg(long, requires = "solution")]
        solution_out: Option<PathBuf>,
    },
    /// Run an exhaustive oracle or a heuristic.
    Solve {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        /// Largest search space brute force may enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// ICM starting labeling (single input only); all zeros otherwise.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Write the solution found (single input only).
        #[arg(long)]
        solution_out: Option<PathBuf>,
    },
    /// Download datasets listed in the manifest.
    Fetch {
        names: Vec<String>,
        /// Print the manifest instead of fetching.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Manifest to use instead of the built-in one.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// Skip detection and read every input in this format.
    #[arg(long, value_parser = parse_format)]
    format: Option<FormatTag>,
    /// Accept UAI files with interleaved scopes or missing unary tables.
    #[arg(long)]
    lenient: bool,
    /// Sum repeated multicut edges instead of rejecting them.
    #[arg(long)]
    merge_duplicates: bool,
}

#[derive(Debug, Args)]
struct BatchArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    parse: ParseArgs,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    Brute,
    Gaec,
    Gef,
    Icm,
    GreedyGm,
}

fn parse_format(s: &str) -> Result<FormatTag, String> {
    FormatTag::from_name(s)
        .ok_or_else(|| format!("unknown format `{s}`; expected one of {}", FormatTag::ALL.map(|t| t.name()).join(", ")))
}

#[derive(Debug, Serialize)]
struct Report<R: Serialize> {
    command: &'static str,
    records: Vec<R>,
}

#[derive(Debug, Serialize)]
struct Record {
    path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<FormatTag>,
    #[serde(flatten)]
    outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Outcome {
    Stats(InstanceStats),
    Valid { class: ProblemClass },
    Evaluation(EvaluationReport),
    Solve(SolveRecord),
    Convert(ConvertRecord),
    Error(Failure),
}

#[derive(Debug, Serialize)]
struct SolveRecord {
    method: Method,
    feasible: bool,
    #[serde(flatten)]
    result: SolveResult,
}

#[derive(Debug, Serialize)]
struct ConvertRecord {
    variables: usize,
    constraints: usize,
    exact: bool,
    objective_offset: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

#[derive(Debug, Serialize)]
struct Failure {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
    #[serde(skip)]
    exit: i32,
}

impl Failure {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        Self { kind, message: message.to_string(), line: None, column: None, exit: EXIT_ERROR }
    }

    fn parse(e: &ParseError) -> Self {
        Self { line: Some(e.line), column: Some(e.column), ..Self::new("parse", format!("{}: {}", e.format, e.message)) }
    }

    fn solve(e: SolveError) -> Self {
        let exit = if e == SolveError::Infeasible { EXIT_VIOLATION } else { EXIT_ERROR };
        Self { exit, ..Self::new("solve", e) }
    }
}

impl Record {
    fn exit_code(&self) -> i32 {
        match &self.outcome {
            Outcome::Error(f) => f.exit,
            Outcome::Evaluation(r) if !r.feasible => EXIT_VIOLATION,
            Outcome::Solve(s) if !s.feasible => EXIT_VIOLATION,
            _ => EXIT_OK,
        }
    }
}

struct Output<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    text: bool,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, out, err, &DefaultDownloader)
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, downloader: &dyn Downloader) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut io = Output { out, err, text: cli.text };
    let timings = cli.timings;
    match cli.command {
        Command::Formats => formats(&mut io),
        Command::Stats(batch) => batch_command(&mut io, "stats", &batch, timings, |_, inst| {
            Outcome::Stats(instance_stats(&inst))
        }),
        Command::Validate(batch) => batch_command(&mut io, "validate", &batch, timings, |_, inst| {
            Outcome::Valid { class: inst.class() }
        }),
        Command::Eval { file, parse, solution } => {
            let record = timed(timings, || {
                with_instance(&file, &parse, |inst| {
                    let text = match fs::read_to_string(&solution) {
                        Ok(t) => t,
                        Err(e) => return Outcome::Error(Failure::new("io", format!("{}: {e}", solution.display()))),
                    };
                    let sol = match read_solution(&inst, &text) {
                        Ok(s) => s,
                        Err(e) => {
                            return Outcome::Error(Failure {
                                line: Some(e.line).filter(|&l| l > 0),
                                ..Failure::new("solution", format!("{}: {e}", solution.display()))
                            })
                        }
                    };
                    match evaluate(&inst, &sol) {
                        Ok(report) => Outcome::Evaluation(report),
                        Err(e) => Outcome::Error(Failure::new("eval", e)),
                    }
                })
            });
            emit(&mut io, "eval", vec![record])
        }
        Command::Convert { file, parse, cycle_limit, potts, output, var_map, solution, solution_out } => {
            let opts = ConvertOptions { cycle_limit, potts, output, var_map, solution, solution_out };
            let mut lp_text = None;
            let record = timed(timings, || {
                with_instance(&file, &parse, |inst| match convert(&inst, &opts) {
                    Ok((record, text)) => {
                        lp_text = text;
                        Outcome::Convert(record)
                    }
                    Err(f) => Outcome::Error(f),
                })
            });
            if let Some(text) = lp_text {
                // The LP itself is the stdout payload; the report goes to stderr.
                let _ = io.out.write_all(text.as_bytes());
                let mut redirected = Output { out: &mut *io.err, err: &mut std::io::sink(), text: io.text };
                return emit(&mut redirected, "convert", vec![record]);
            }
            emit(&mut io, "convert", vec![record])
        }
        Command::Solve { batch, method, budget, solution, solution_out } => {
            if batch.files.len() > 1 && (solution.is_some() || solution_out.is_some()) {
                let _ = writeln!(io.err, "error: --solution and --solution-out need a single input file");
                return EXIT_ERROR;
            }
            batch_command(&mut io, "solve", &batch, timings, |_, inst| {
                solve(&inst, method, budget, solution.as_deref(), solution_out.as_deref())
            })
        }
        Command::Fetch { names, list, cache_dir: dir, manifest } => {
            fetch(&mut io, &names, list, dir.as_deref(), manifest.as_deref(), downloader)
        }
    }
}

fn timed(timings: bool, f: impl FnOnce() -> Record) -> Record {
    let start = Instant::now();
    let mut record = f();
    if timings {
        record.seconds = Some(start.elapsed().as_secs_f64());
    }
    record
}

fn load(path: &Path, parse: &ParseArgs) -> Result<(FormatTag, ProblemInstance), (Option<FormatTag>, Failure)> {
    let format = match parse.format {
        Some(f) => f,
        None => detect_path(path).map_err(|e| (None, Failure::new("detect", e)))?,
    };
    let file = File::open(path).map_err(|e| (Some(format), Failure::new("io", e)))?;
    let opts = ParseOptions { lenient: parse.lenient, merge_duplicates: parse.merge_duplicates };
    let instance = read_instance(format, BufReader::new(file), opts).map_err(|e| (Some(format), Failure::parse(&e)))?;
    Ok((format, instance))
}

fn with_instance(path: &Path, parse: &ParseArgs, f: impl FnOnce(ProblemInstance) -> Outcome) -> Record {
    let (format, outcome) = match load(path, parse) {
        Ok((format, instance)) => (Some(format), f(instance)),
        Err((format, failure)) => (format, Outcome::Error(failure)),
    };
    Record { path: path.display().to_string(), format, outcome, seconds: None }
}

fn batch_command(
    io: &mut Output<'_>,
    command: &'static str,
    batch: &BatchArgs,
    timings: bool,
    f: impl Fn(&Path, ProblemInstance) -> Outcome + Sync,
) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(batch.jobs.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(io.err, "error: cannot start worker threads: {e}");
            return EXIT_ERROR;
        }
    };
    let records = pool.install(|| {
        batch
            .files
            .par_iter()
            .map(|path| timed(timings, || with_instance(path, &batch.parse, |inst| f(path, inst))))
            .collect::<Vec<_>>()
    });
    emit(io, command, records)
}

/// Prints the report and the diagnostics; returns the worst exit code.
fn emit(io: &mut Output<'_>, command: &'static str, records: Vec<Record>) -> i32 {
    for r in &records {
        if let Outcome::Error(f) = &r.outcome {
            let _ = match (f.line, f.column) {
                (Some(l), Some(c)) => writeln!(io.err, "{}:{l}:{c}: {}", r.path, f.message),
                (Some(l), None) => writeln!(io.err, "{}:{l}: {}", r.path, f.message),
                _ => writeln!(io.err, "{}: {}", r.path, f.message),
            };
        }
    }
    let code = records.iter().map(Record::exit_code).max().unwrap_or(EXIT_OK);
    if io.text {
        for r in &records {
            let _ = writeln!(io.out, "{}", text_line(r));
        }
    } else {
        print_json(io.out, &Report { command, records });
    }
    code
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    let _ = out.write_all(text.as_bytes());
}

/// `path: kind key=value ...` over the scalar fields of the record. Arrays
/// print their length.
fn text_line(r: &Record) -> String {
    let mut parts = vec![format!("{}:", r.path)];
    if let Some(f) = r.format {
        parts.push(format!("format={f}"));
    }
    if let serde_json::Value::Object(map) = serde_json::to_value(&r.outcome).expect("records serialize") {
        for (kind, inner) in map {
            parts.push(kind);
            flatten_scalars(&inner, "", &mut parts);
        }
    }
    if let Some(s) = r.seconds {
        parts.push(format!("seconds={s:.3}"));
    }
    parts.join(" ")
}

fn flatten_scalars(value: &serde_json::Value, prefix: &str, parts: &mut Vec<String>) {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_scalars(v, &key, parts);
            }
        }
        Value::Array(items) => parts.push(format!("{prefix}={}", items.len())),
        Value::Null => {}
        Value::String(s) => parts.push(format!("{prefix}={s}")),
        scalar => parts.push(format!("{prefix}={scalar}")),
    }
}

fn formats(io: &mut Output<'_>) -> i32 {
    #[derive(Serialize)]
    struct Entry {
        name: &'static str,
    }
    let entries: Vec<Entry> = FormatTag::ALL.iter().map(|t| Entry { name: t.name() }).collect();
    if io.text {
        for e in &entries {
            let _ = writeln!(io.out, "{}", e.name);
        }
    } else {
        print_json(io.out, &serde_json::json!({ "command": "formats", "formats": entries }));
    }
    EXIT_OK
}

struct ConvertOptions {
    cycle_limit: usize,
    potts: bool,
    output: Option<PathBuf>,
    var_map: Option<PathBuf>,
    solution: Option<PathBuf>,
    solution_out: Option<PathBuf>,
}

fn lower(instance: &ProblemInstance, cycle_limit: usize, potts: bool) -> Result<LoweredModel, Failure> {
    let lowered = match instance {
        ProblemInstance::Mrf(m) if potts => lower_mrf_potts_compact(m),
        ProblemInstance::Mrf(m) => lower_mrf_local_polytope(m),
        ProblemInstance::Tomography(t) => lower_tomography(t),
        ProblemInstance::Multicut(mc) => lower_multicut(mc, cycle_limit),
        ProblemInstance::Amwc(a) => lower_amwc(a, cycle_limit),
        ProblemInstance::GraphMatching(gm) => Ok(lower_gm(gm)),
        ProblemInstance::MultiGraphMatching(mgm) => Ok(lower_mgm(mgm)),
        ProblemInstance::CellTracking(ct) => Ok(lower_cell_tracking(ct)),
        ProblemInstance::BottleneckMrf(_) | ProblemInstance::Ilp(_) => {
            return Err(Failure::new(
                "unsupported",
                format!("{} instances have no ILP lowering", instance.class().name()),
            ))
        }
    };
    lowered.map_err(|e| Failure::new("lowering", e))
}

#[derive(Serialize)]
struct VarMap<'a> {
    objective_offset: f64,
    exact: bool,
    variables: Vec<VarMapEntry<'a>>,
}

fn convert(instance: &ProblemInstance, opts: &ConvertOptions) -> Result<(ConvertRecord, Option<String>), Failure> {
    let model = lower(instance, opts.cycle_limit, opts.potts)?;
    let lp = spp_core::formats::write_lp(&model.ilp);
    let write = |path: &Path, text: &str| {
        fs::write(path, text).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
    };
    if let Some(path) = &opts.var_map {
        let map = VarMap { objective_offset: model.objective_offset, exact: model.exact, variables: model.var_map() };
        let mut text = serde_json::to_string_pretty(&map).expect("variable maps serialize");
        text.push('\n');
        write(path, &text)?;
    }
    if let (Some(input), Some(out)) = (&opts.solution, &opts.solution_out) {
        let text = fs::read_to_string(input).map_err(|e| Failure::new("io", format!("{}: {e}", input.display())))?;
        let native = read_solution(instance, &text)
            .map_err(|e| Failure::new("solution", format!("{}: {e}", input.display())))?;
        let x = encode_solution(&model, &native).map_err(|e| Failure::new("lowering", e))?;
        write(out, &write_solution(&Solution::Ilp(x), Some(&model.ilp)))?;
    }
    let record = ConvertRecord {
        variables: model.ilp.variable_count(),
        constraints: model.ilp.constraints().len(),
        exact: model.exact,
        objective_offset: model.objective_offset,
        output: opts.output.as_ref().map(|p| p.display().to_string()),
    };
    match &opts.output {
        Some(path) => {
            write(path, &lp)?;
            Ok((record, None))
        }
        None => Ok((record, Some(lp))),
    }
}

fn solve(
    instance: &ProblemInstance,
    method: Method,
    budget: u64,
    initial: Option<&Path>,
    solution_out: Option<&Path>,
) -> Outcome {
    let unsupported = |method: &'static str| {
        Outcome::Error(Failure::solve(SolveError::Unsupported { method, class: instance.class().name() }))
    };
    let result = match (method, instance) {
        (Method::Brute, _) => brute_force(instance, budget),
        (Method::Gaec, ProblemInstance::Multicut(mc)) => Ok(gaec(mc)),
        (Method::Gef, ProblemInstance::Multicut(mc)) => Ok(greedy_edge_fixation(mc)),
        (Method::GreedyGm, ProblemInstance::GraphMatching(gm)) => Ok(greedy_gm(gm)),
        (Method::Icm, ProblemInstance::Mrf(mrf)) => {
            let start = match initial {
                None => MrfLabeling::new(vec![0; mrf.node_count()]),
                Some(path) => match fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|text| {
                    read_solution(instance, &text).map_err(|e| e.to_string())
                }) {
                    Ok(Solution::Labeling(l)) => l,
                    Ok(_) => unreachable!("MRF solutions are labelings"),
                    Err(e) => return Outcome::Error(Failure::new("solution", format!("{}: {e}", path.display()))),
                },
            };
            icm(mrf, &start)
        }
        (Method::Gaec, _) => return unsupported("gaec"),
        (Method::Gef, _) => return unsupported("gef"),
        (Method::GreedyGm, _) => return unsupported("greedy-gm"),
        (Method::Icm, _) => return unsupported("icm"),
    };
    let result = match result {
        Ok(r) => r,
        Err(e) => return Outcome::Error(Failure::solve(e)),
    };
    let feasible = match evaluate(instance, &result.solution) {
        Ok(report) => report.feasible,
        Err(e) => return Outcome::Error(Failure::new("eval", e)),
    };
    if let Some(path) = solution_out {
        let ilp = match instance {
            ProblemInstance::Ilp(ilp) => Some(ilp),
            _ => None,
        };
        if let Err(e) = fs::write(path, write_solution(&result.solution, ilp)) {
            return Outcome::Error(Failure::new("io", format!("{}: {e}", path.display())));
        }
    }
    Outcome::Solve(SolveRecord { method, feasible, result })
}

fn fetch(
    io: &mut Output<'_>,
    names: &[String],
    list: bool,
    dir: Option<&Path>,
    manifest_path: Option<&Path>,
    downloader: &dyn Downloader,
) -> i32 {
    let manifest = match manifest_path {
        None => DatasetManifest::builtin(),
        Some(path) => match fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|text| {
            DatasetManifest::parse(&text).map_err(|e| e.to_string())
        }) {
            Ok(m) => m,
            Err(e) => {
                let _ = writeln!(io.err, "{}: {e}", path.display());
                return EXIT_ERROR;
            }
        },
    };
    if list || names.is_empty() {
        if io.text {
            for e in &manifest.entries {
                let _ = writeln!(io.out, "{} {} {}", e.name, e.format, e.url);
            }
        } else {
            print_json(io.out, &serde_json::json!({ "command": "fetch", "datasets": manifest.entries }));
        }
        return EXIT_OK;
    }
    #[derive(Serialize)]
    struct FetchRecord {
        name: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        sha256: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        cached: Option<bool>,
        files: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    }
    let cache = cache_dir(dir);
    let mut code = EXIT_OK;
    let mut records = Vec::new();
    for name in names {
        match fetch_dataset(&manifest, name, &cache, downloader) {
            Ok(f) => records.push(FetchRecord {
                name: name.clone(),
                sha256: Some(f.sha256),
                cached: Some(f.cached),
                files: f.files.iter().map(|p| p.display().to_string()).collect(),
                error: None,
            }),
            Err(e) => {
                let _ = writeln!(io.err, "{name}: {e}");
                code = EXIT_ERROR;
                records.push(FetchRecord { name: name.clone(), sha256: None, cached: None, files: vec![], error: Some(e.to_string()) });
            }
        }
    }
    if io.text {
        for r in &records {
            let _ = match &r.error {
                Some(e) => writeln!(io.out, "{}: error={e}", r.name),
                None => writeln!(io.out, "{}: files={} cached={}", r.name, r.files.len(), r.cached == Some(true)),
            };
        }
    } else {
        print_json(io.out, &Report { command: "fetch", records });
    }
    code
}
