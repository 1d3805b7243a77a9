//! The `prosody` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Every subcommand
//! accepts several inputs; each is processed independently and a failure in
//! one does not stop the others. With more than one input, `--out` names a
//! directory receiving `<stem>.<ext>` per input; without it, results go to
//! standard output in input order, each preceded by a `==> path <==` line.

pub mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::annotation::{self, Annotation, DurationSeries, TierKind};
use crate::metrics::{self, MetricsReport, SdDenominator, METRICS_SCHEMA_VERSION};
use crate::render::{self, PlotSpec};
use crate::scales::{self, IntervalTable};
use crate::signal::{self, F0Track};
use crate::stylization::{self, Domain};
use crate::tonefst::{self, LexicalToneString};

pub use config::{Config, ConfigError};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad invocation or configuration; exit code 1.
    Usage(String),
    /// Input data could not be read, parsed or analysed; exit code 2.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

#[derive(Parser, Debug)]
#[command(
    name = "prosody",
    version,
    about = "Prosodic analysis of speech: F0 tracking and stylisation, timing metrics, intervals, tone terracing, plots",
    after_help = "Precedence: command-line flags override --config values, which override defaults."
)]
struct Cli {
    /// key=value configuration file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file (a directory when several inputs are given); default stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate F0 from 16-bit mono WAV files and write `time_s,f0_hz` CSV
    Track(TrackArgs),
    /// Fit global and per-interval polynomial models to F0 tracks (JSON)
    Stylize(StylizeArgs),
    /// Timing irregularity metrics of a TextGrid tier
    Metrics(MetricsArgs),
    /// Moving-window nPVI profile of a TextGrid tier
    WindowNpvi(WindowArgs),
    /// Duration box statistics by label category
    Durations(DurationsArgs),
    /// Speech rate from the median interval duration
    Rate(RateArgs),
    /// Musical interval between two level F0 spans
    Chroma(ChromaArgs),
    /// Map lexical H/L tones to phonetic h/l tones
    Tonemap(TonemapArgs),
    /// Render an SVG plot
    Plot(PlotArgs),
    /// Lint TextGrid files and check WAV sample rates against f_max
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Default)]
struct F0Flags {
    /// Lowest F0 searched, Hz [default: 70]
    #[arg(long)]
    f_min: Option<f64>,
    /// Highest F0 searched, Hz [default: 400]
    #[arg(long)]
    f_max: Option<f64>,
    /// Frame step, seconds [default: 0.01]
    #[arg(long)]
    frame_step: Option<f64>,
    /// Analysis window, seconds [default: 0.02]
    #[arg(long)]
    window: Option<f64>,
    /// Normalized correlation needed for a voiced frame [default: 0.3]
    #[arg(long)]
    voicing_threshold: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct TierFlags {
    /// Interval tier to mine
    #[arg(long)]
    tier: Option<String>,
    /// Comma-separated labels to skip (",sil" = empty label and "sil") [default: ",#,<p:>,pau,sil,sp"]
    #[arg(long, value_name = "LABELS")]
    exclude: Option<String>,
    /// Keep every interval, ignoring the exclude list
    #[arg(long)]
    keep_all: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct TrackArgs {
    /// WAV files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    f0: F0Flags,
    /// Median-filter the track with this odd width
    #[arg(long)]
    median: Option<usize>,
}

#[derive(Args, Debug)]
struct StylizeArgs {
    /// F0 CSV files (or WAV files, tracked first)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// TextGrid whose tier supplies the local domains (single input only)
    #[arg(long)]
    textgrid: Option<PathBuf>,
    #[command(flatten)]
    tier: TierFlags,
    /// Degree of the global model [default: rule of thumb from --events]
    #[arg(long)]
    global_degree: Option<usize>,
    /// Degree of the local models [default: rule of thumb from --events]
    #[arg(long)]
    local_degree: Option<usize>,
    /// Number of F0-shaping events (pitch accents) for the degree rule
    #[arg(long, default_value_t = 0)]
    events: usize,
    /// Write the residual track as F0 CSV here (single input only)
    #[arg(long, value_name = "FILE")]
    residual: Option<PathBuf>,
    /// Frame step for F0 CSVs with fewer than two rows
    #[arg(long)]
    step: Option<f64>,
    #[command(flatten)]
    f0: F0Flags,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// TextGrid files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    tier: TierFlags,
    /// Standard deviation denominator
    #[arg(long, value_enum)]
    sd_denominator: Option<SdArg>,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SdArg {
    Sample,
    Population,
}

#[derive(Args, Debug)]
struct WindowArgs {
    /// TextGrid files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    tier: TierFlags,
    /// Window length in intervals [default: 5]
    #[arg(long)]
    size: Option<usize>,
    /// Window step in intervals [default: 1]
    #[arg(long)]
    step: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct DurationsArgs {
    /// TextGrid files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    tier: TierFlags,
    /// CSV `label,category`; unmapped labels go to "other". Default: each label is its own category
    #[arg(long, value_name = "FILE")]
    category_map: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct RateArgs {
    /// TextGrid files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    tier: TierFlags,
}

#[derive(Args, Debug)]
struct ChromaArgs {
    /// F0 CSV (or WAV) files
    inputs: Vec<PathBuf>,
    /// Analyse two given mean levels F1,F2 (Hz) instead of files
    #[arg(long, value_name = "F1,F2")]
    means: Option<String>,
    /// First level span t0,t1 in seconds
    #[arg(long, value_name = "T0,T1")]
    span1: Option<String>,
    /// Second level span t0,t1 in seconds
    #[arg(long, value_name = "T0,T1")]
    span2: Option<String>,
    /// TextGrid with the spans labelled (single input only)
    #[arg(long)]
    textgrid: Option<PathBuf>,
    /// Tier holding the span labels
    #[arg(long)]
    tier: Option<String>,
    /// Span labels [default: F01,F02]
    #[arg(long, value_name = "L1,L2")]
    labels: Option<String>,
    /// Frame step for F0 CSVs with fewer than two rows
    #[arg(long)]
    step: Option<f64>,
    #[command(flatten)]
    f0: F0Flags,
}

#[derive(Args, Debug)]
struct TonemapArgs {
    /// Tone strings such as LHLLH, or TextGrid files when --tier is given
    #[arg(required = true)]
    inputs: Vec<String>,
    /// Read tones from this tier; labels end in H or L
    #[arg(long)]
    tier: Option<String>,
    /// Apply the assimilation to the final tone as well
    #[arg(long)]
    no_final_faithful: bool,
    /// Emit `syllable,lexical,phonetic` CSV for tone strings too
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum PlotKind {
    /// F0 trace with statistic lines, models, residual, labels, waveform
    Track,
    /// Duration box plot by category
    Boxes,
    /// Moving-window nPVI series
    Window,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// What to draw
    #[arg(value_enum)]
    kind: PlotKind,
    /// F0 CSV/WAV files (track) or TextGrid files (boxes, window)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    tier: TierFlags,
    /// TextGrid drawn as a label tier under the track (track, single input)
    #[arg(long)]
    textgrid: Option<PathBuf>,
    /// WAV drawn as a waveform thumbnail (track, single input)
    #[arg(long)]
    wav: Option<PathBuf>,
    /// Overlay a global model of this degree (track)
    #[arg(long)]
    global_degree: Option<usize>,
    /// Overlay local models of this degree over the tier intervals (track)
    #[arg(long)]
    local_degree: Option<usize>,
    /// Draw the residual against the global model (track)
    #[arg(long)]
    residual: bool,
    /// Omit min/max/mean/median lines (track)
    #[arg(long)]
    no_stats: bool,
    /// CSV `label,category` (boxes)
    #[arg(long, value_name = "FILE")]
    category_map: Option<PathBuf>,
    /// Window length (window) [default: 5]
    #[arg(long)]
    size: Option<usize>,
    /// Window step (window) [default: 1]
    #[arg(long)]
    step: Option<usize>,
    /// Canvas width in pixels [default: 1000]
    #[arg(long)]
    width: Option<u32>,
    /// Canvas height in pixels [default: 400]
    #[arg(long)]
    height: Option<u32>,
    /// Frame step for F0 CSVs with fewer than two rows
    #[arg(long)]
    frame_step_override: Option<f64>,
    #[command(flatten)]
    f0: F0Flags,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// TextGrid and/or WAV files (by extension)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Highest F0 of interest for the Nyquist check, Hz [default: 400]
    #[arg(long)]
    f_max: Option<f64>,
}

/// One input's result.
struct Output {
    ext: &'static str,
    body: String,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Data(format!("cannot read: {e}")))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(path)?).map_err(|_| CliError::Data("not valid UTF-8".into()))
}

fn is_wav(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("wav"))
        .unwrap_or(false)
}

impl F0Flags {
    fn apply(&self, cfg: &Config) -> signal::F0Params {
        let mut p = cfg.f0;
        if let Some(v) = self.f_min {
            p.f_min = v;
        }
        if let Some(v) = self.f_max {
            p.f_max = v;
        }
        if let Some(v) = self.frame_step {
            p.frame_step = v;
        }
        if let Some(v) = self.window {
            p.window = v;
        }
        if let Some(v) = self.voicing_threshold {
            p.voicing_threshold = v;
        }
        p
    }
}

impl TierFlags {
    fn tier(&self, cfg: &Config) -> Result<String, CliError> {
        self.tier
            .clone()
            .or_else(|| cfg.tier.clone())
            .ok_or_else(|| usage("no tier given: use --tier or set `tier` in the config"))
    }

    fn exclude(&self, cfg: &Config) -> BTreeSet<String> {
        if self.keep_all {
            BTreeSet::new()
        } else if let Some(list) = &self.exclude {
            config::parse_label_list(list)
        } else {
            cfg.exclude_labels.clone()
        }
    }
}

fn load_annotation(path: &Path) -> Result<Annotation, CliError> {
    annotation::parse_textgrid(&read(path)?).map_err(data)
}

fn load_durations(path: &Path, tier: &TierFlags, cfg: &Config) -> Result<DurationSeries, CliError> {
    let a = load_annotation(path)?;
    annotation::extract_durations(&a, &tier.tier(cfg)?, &tier.exclude(cfg)).map_err(data)
}

fn load_track(
    path: &Path,
    f0: &F0Flags,
    step: Option<f64>,
    cfg: &Config,
    warnings: &mut Vec<String>,
) -> Result<F0Track, CliError> {
    if is_wav(path) {
        let params = f0.apply(cfg);
        warnings.extend(params.warnings());
        let sig = signal::read_wav(&read(path)?).map_err(data)?;
        signal::estimate_f0(&sig, &params).map_err(data)
    } else {
        signal::ingest_f0_csv(&read_text(path)?, step).map_err(data)
    }
}

fn load_category_map(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = read_text(path).map_err(|e| data(format!("{}: {}", path.display(), e.message())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut map = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| data(format!("{}: {e}", path.display())))?;
        if rec.len() != 2 {
            return Err(data(format!(
                "{}: row {}: expected label,category",
                path.display(),
                i + 1
            )));
        }
        if i == 0 && &rec[0] == "label" && &rec[1] == "category" {
            continue;
        }
        map.insert(rec[0].to_owned(), rec[1].to_owned());
    }
    Ok(map)
}

fn group(ds: &DurationSeries, map: Option<&BTreeMap<String, String>>) -> BTreeMap<String, Vec<f64>> {
    match map {
        Some(m) => annotation::group_by_label(ds, m),
        None => annotation::group_by(ds, |l| Some(l.to_owned())),
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let err = || usage(format!("{what}: expected two comma-separated numbers, got \"{s}\""));
    let (a, b) = s.split_once(',').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

/// Entry point. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = writeln!(stderr, "error: no subcommand given (see --help)");
                    1
                }
                _ => {
                    let _ = writeln!(stderr, "{}", one_line(&e.render().to_string()));
                    1
                }
            };
        }
    };

    let cfg = match &cli.config {
        None => Config::default(),
        Some(p) => match std::fs::read_to_string(p) {
            Ok(text) => match Config::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {}: {e}", p.display());
                    return 1;
                }
            },
            Err(e) => {
                let _ = writeln!(stderr, "error: {}: {e}", p.display());
                return 1;
            }
        },
    };

    match dispatch(&cli, &cfg, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Collapses clap's multi-line report to its first paragraph on one line.
fn one_line(report: &str) -> String {
    let first: Vec<&str> = report
        .lines()
        .take_while(|l| !l.trim().is_empty())
        .map(str::trim)
        .collect();
    let mut msg = first.join(" ");
    if !msg.starts_with("error:") {
        msg.insert_str(0, "error: ");
    }
    msg + " (see --help)"
}

type JobFn<'a> = dyn Fn(&Path, &mut Vec<String>) -> Result<Output, CliError> + Sync + 'a;
type Job<'a> = Box<JobFn<'a>>;

fn dispatch(
    cli: &Cli,
    cfg: &Config,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let (inputs, job): (&[PathBuf], Job) = match &cli.command {
        Command::Track(a) => (&a.inputs, Box::new(move |p, w| cmd_track(a, cfg, p, w))),
        Command::Stylize(a) => {
            if a.inputs.len() > 1 && (a.textgrid.is_some() || a.residual.is_some()) {
                return Err(usage("--textgrid and --residual need a single input"));
            }
            (&a.inputs, Box::new(move |p, w| cmd_stylize(a, cfg, p, w)))
        }
        Command::Metrics(a) => (&a.inputs, Box::new(move |p, _| cmd_metrics(a, cfg, p))),
        Command::WindowNpvi(a) => (&a.inputs, Box::new(move |p, _| cmd_window(a, cfg, p))),
        Command::Durations(a) => {
            let map = a.category_map.as_deref().map(load_category_map).transpose()?;
            return run_batch(
                &a.inputs,
                &move |p, _| cmd_durations(a, cfg, map.as_ref(), p),
                cli.out.as_deref(),
                stdout,
                stderr,
            );
        }
        Command::Rate(a) => (&a.inputs, Box::new(move |p, _| cmd_rate(a, cfg, p))),
        Command::Chroma(a) => {
            if let Some(m) = &a.means {
                if !a.inputs.is_empty() {
                    return Err(usage("--means takes no input files"));
                }
                let (f1, f2) = parse_pair(m, "--means")?;
                let r = scales::chroma_from_means(f1, f2, &IntervalTable::default()).map_err(data)?;
                emit_single(&r.to_json(), cli.out.as_deref(), stdout)?;
                return Ok(0);
            }
            if a.inputs.is_empty() {
                return Err(usage("chroma needs input files or --means"));
            }
            if a.inputs.len() > 1 && a.textgrid.is_some() {
                return Err(usage("--textgrid needs a single input"));
            }
            (&a.inputs, Box::new(move |p, w| cmd_chroma(a, cfg, p, w)))
        }
        Command::Tonemap(a) => return cmd_tonemap(a, cfg, cli.out.as_deref(), stdout, stderr),
        Command::Plot(a) => {
            if a.inputs.len() > 1 && (a.textgrid.is_some() || a.wav.is_some()) {
                return Err(usage("--textgrid and --wav need a single input"));
            }
            let map = a.category_map.as_deref().map(load_category_map).transpose()?;
            return run_batch(
                &a.inputs,
                &move |p, w| cmd_plot(a, cfg, map.as_ref(), p, w),
                cli.out.as_deref(),
                stdout,
                stderr,
            );
        }
        Command::Validate(a) => (&a.inputs, Box::new(move |p, _| cmd_validate(a, cfg, p))),
    };
    run_batch(inputs, &*job, cli.out.as_deref(), stdout, stderr)
}

fn emit_single(body: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::Data(format!("{}: cannot write: {e}", p.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn run_batch(
    inputs: &[PathBuf],
    job: &JobFn<'_>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let results: Vec<(Vec<String>, Result<Output, CliError>)> = inputs
        .par_iter()
        .map(|p| {
            let mut warnings = Vec::new();
            let r = job(p, &mut warnings);
            (warnings, r)
        })
        .collect();

    if inputs.len() == 1 {
        let (warnings, r) = results.into_iter().next().expect("one input");
        for w in warnings {
            let _ = writeln!(stderr, "warning: {}: {w}", inputs[0].display());
        }
        return match r {
            Ok(o) => emit_single(&o.body, out, stdout).map(|_| 0),
            Err(CliError::Data(m)) => Err(CliError::Data(format!("{}: {m}", inputs[0].display()))),
            Err(e) => Err(e),
        };
    }

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("{}: cannot create: {e}", dir.display())))?;
    }
    let mut failed = 0;
    let mut worst = 0;
    for (path, (warnings, r)) in inputs.iter().zip(results) {
        for w in warnings {
            let _ = writeln!(stderr, "warning: {}: {w}", path.display());
        }
        match r {
            Ok(o) => match out {
                Some(dir) => {
                    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                    let target = dir.join(format!("{stem}.{}", o.ext));
                    if let Err(e) = std::fs::write(&target, &o.body) {
                        failed += 1;
                        worst = worst.max(2);
                        let _ = writeln!(stderr, "error: {}: cannot write: {e}", target.display());
                    }
                }
                None => {
                    let _ = writeln!(stdout, "==> {} <==", path.display());
                    let _ = stdout.write_all(o.body.as_bytes());
                }
            },
            Err(e) => {
                failed += 1;
                worst = worst.max(e.exit_code());
                let _ = writeln!(stderr, "error: {}: {}", path.display(), e.message());
            }
        }
    }
    if failed > 0 {
        let _ = writeln!(stderr, "{failed} of {} inputs failed", inputs.len());
    }
    Ok(worst)
}

fn cmd_track(a: &TrackArgs, cfg: &Config, path: &Path, w: &mut Vec<String>) -> Result<Output, CliError> {
    let mut track = load_track(path, &a.f0, None, cfg, w)?;
    if let Some(width) = a.median {
        track = stylization::median_filter(&track, width).map_err(|e| usage(e.to_string()))?;
    }
    Ok(Output {
        ext: "csv",
        body: track.to_csv(),
    })
}

fn domains(
    textgrid: Option<&Path>,
    tier: &TierFlags,
    cfg: &Config,
) -> Result<Vec<Domain>, CliError> {
    let Some(tg) = textgrid else {
        return Ok(Vec::new());
    };
    let a = load_annotation(tg)?;
    let name = tier.tier(cfg)?;
    let t = a
        .tier(&name)
        .ok_or_else(|| data(annotation::AnnotationError::UnknownTier(name.clone())))?;
    if t.kind != TierKind::Interval {
        return Err(data(annotation::AnnotationError::NotIntervalTier(name)));
    }
    Ok(stylization::domains_from_tier(t, &tier.exclude(cfg)))
}

fn cmd_stylize(
    a: &StylizeArgs,
    cfg: &Config,
    path: &Path,
    w: &mut Vec<String>,
) -> Result<Output, CliError> {
    let track = load_track(path, &a.f0, a.step, cfg, w)?;
    let doms = domains(a.textgrid.as_deref(), &a.tier, cfg)?;
    let rule = stylization::default_degree(a.events);
    let gd = a.global_degree.or(cfg.global_degree).unwrap_or(rule);
    let ld = a.local_degree.or(cfg.local_degree).unwrap_or(rule);
    let r = stylization::mps_stylize(&track, &doms, gd, ld).map_err(data)?;
    for s in &r.skipped {
        w.push(format!(
            "domain {} \"{}\" skipped: {}",
            s.index, s.domain.label, s.reason
        ));
    }
    if let Some(res_path) = &a.residual {
        std::fs::write(res_path, r.residual.to_csv())
            .map_err(|e| CliError::Data(format!("{}: cannot write: {e}", res_path.display())))?;
    }
    Ok(Output {
        ext: "json",
        body: r.to_json(),
    })
}

fn cmd_metrics(a: &MetricsArgs, cfg: &Config, path: &Path) -> Result<Output, CliError> {
    let ds = load_durations(path, &a.tier, cfg)?;
    let denom = match a.sd_denominator {
        Some(SdArg::Sample) => SdDenominator::Sample,
        Some(SdArg::Population) => SdDenominator::Population,
        None => cfg.sd_denominator,
    };
    let r = MetricsReport::compute(&ds.durations(), denom).map_err(data)?;
    Ok(match a.format {
        Format::Json => Output {
            ext: "json",
            body: r.to_json(),
        },
        Format::Csv => Output {
            ext: "csv",
            body: r.to_csv(),
        },
    })
}

fn cmd_window(a: &WindowArgs, cfg: &Config, path: &Path) -> Result<Output, CliError> {
    let ds = load_durations(path, &a.tier, cfg)?;
    let ws = metrics::moving_npvi(
        &ds.durations(),
        a.size.unwrap_or(cfg.npvi_window),
        a.step.unwrap_or(cfg.npvi_step),
    )
    .map_err(data)?;
    Ok(match a.format {
        Format::Json => Output {
            ext: "json",
            body: ws.to_json(),
        },
        Format::Csv => Output {
            ext: "csv",
            body: ws.to_csv(),
        },
    })
}

fn cmd_durations(
    a: &DurationsArgs,
    cfg: &Config,
    map: Option<&BTreeMap<String, String>>,
    path: &Path,
) -> Result<Output, CliError> {
    let ds = load_durations(path, &a.tier, cfg)?;
    let stats = metrics::box_stats(&group(&ds, map)).map_err(data)?;
    Ok(match a.format {
        Format::Csv => Output {
            ext: "csv",
            body: stats.to_csv(),
        },
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                schema_version: u32,
                quartile_method: &'static str,
                categories: &'a BTreeMap<String, metrics::BoxSummary>,
            }
            Output {
                ext: "json",
                body: json(&Doc {
                    schema_version: METRICS_SCHEMA_VERSION,
                    quartile_method: "inclusive linear interpolation",
                    categories: &stats.categories,
                }),
            }
        }
    })
}

fn cmd_rate(a: &RateArgs, cfg: &Config, path: &Path) -> Result<Output, CliError> {
    let ds = load_durations(path, &a.tier, cfg)?;
    let r = metrics::speech_rate(&ds.durations()).map_err(data)?;
    Ok(Output {
        ext: "json",
        body: r.to_json(),
    })
}

fn cmd_chroma(a: &ChromaArgs, cfg: &Config, path: &Path, w: &mut Vec<String>) -> Result<Output, CliError> {
    let track = load_track(path, &a.f0, a.step, cfg, w)?;
    let (s1, s2) = match (&a.textgrid, &a.span1, &a.span2) {
        (Some(tg), None, None) => {
            let ann = load_annotation(tg)?;
            let name = a
                .tier
                .clone()
                .or_else(|| cfg.tier.clone())
                .ok_or_else(|| usage("--textgrid needs --tier"))?;
            let tier = ann
                .tier(&name)
                .ok_or_else(|| data(annotation::AnnotationError::UnknownTier(name.clone())))?;
            let (l1, l2) = match &a.labels {
                Some(s) => {
                    let (x, y) = s
                        .split_once(',')
                        .ok_or_else(|| usage("--labels: expected L1,L2"))?;
                    (x.trim().to_owned(), y.trim().to_owned())
                }
                None => cfg.span_labels.clone(),
            };
            (
                scales::span_from_tier(tier, &l1).map_err(data)?,
                scales::span_from_tier(tier, &l2).map_err(data)?,
            )
        }
        (None, Some(s1), Some(s2)) => (parse_pair(s1, "--span1")?, parse_pair(s2, "--span2")?),
        _ => return Err(usage("give either --textgrid or both --span1 and --span2")),
    };
    let r = scales::chroma_analyze(&track, s1, s2, &IntervalTable::default()).map_err(data)?;
    Ok(Output {
        ext: "json",
        body: r.to_json(),
    })
}

fn cmd_tonemap(
    a: &TonemapArgs,
    cfg: &Config,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let final_faithful = cfg.final_faithful && !a.no_final_faithful;
    if let Some(tier_name) = &a.tier {
        let paths: Vec<PathBuf> = a.inputs.iter().map(PathBuf::from).collect();
        let job = move |p: &Path, _: &mut Vec<String>| -> Result<Output, CliError> {
            let ann = load_annotation(p)?;
            let tier = ann
                .tier(tier_name)
                .ok_or_else(|| data(annotation::AnnotationError::UnknownTier(tier_name.clone())))?;
            let mut syllables = Vec::new();
            let mut tones = Vec::new();
            for it in &tier.items {
                if it.label.trim().is_empty() {
                    continue;
                }
                let (syl, tone) = tonefst::split_tone_label(&it.label).ok_or_else(|| {
                    data(format!("label \"{}\" does not end in H or L", it.label))
                })?;
                syllables.push(syl.to_owned());
                tones.push(tone);
            }
            let lex = LexicalToneString(tones);
            let phon = tonefst::transduce(&lex, final_faithful).map_err(data)?;
            Ok(Output {
                ext: "csv",
                body: tonefst::triples_csv(&syllables, &lex, &phon),
            })
        };
        return run_batch(&paths, &job, out, stdout, stderr);
    }

    let mut body = String::new();
    let mut worst = 0;
    for s in &a.inputs {
        let result = s
            .parse::<LexicalToneString>()
            .and_then(|lex| tonefst::transduce(&lex, final_faithful).map(|p| (lex, p)));
        match result {
            Ok((lex, phon)) if a.csv => {
                let syllables: Vec<String> = (1..=lex.0.len()).map(|i| i.to_string()).collect();
                body.push_str(&tonefst::triples_csv(&syllables, &lex, &phon));
            }
            Ok((_, phon)) => {
                body.push_str(&phon.to_string());
                body.push('\n');
            }
            Err(e) => {
                worst = 2;
                let _ = writeln!(stderr, "error: \"{s}\": {e}");
            }
        }
    }
    emit_single(&body, out, stdout)?;
    Ok(worst)
}

fn cmd_plot(
    a: &PlotArgs,
    cfg: &Config,
    map: Option<&BTreeMap<String, String>>,
    path: &Path,
    w: &mut Vec<String>,
) -> Result<Output, CliError> {
    let width = a.width.unwrap_or(cfg.plot_width);
    let height = a.height.unwrap_or(cfg.plot_height);
    let title = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let svg = match a.kind {
        PlotKind::Track => {
            let track = load_track(path, &a.f0, a.frame_step_override, cfg, w)?;
            let mut spec = PlotSpec::new(track);
            spec.width = width;
            spec.height = height;
            spec.title = title;
            spec.stat_lines = !a.no_stats;
            if let Some(tg) = &a.textgrid {
                let ann = load_annotation(tg)?;
                let name = a.tier.tier(cfg)?;
                spec.annotation = Some(
                    ann.tier(&name)
                        .cloned()
                        .ok_or_else(|| data(annotation::AnnotationError::UnknownTier(name)))?,
                );
            }
            if let Some(wav) = &a.wav {
                spec.waveform = Some(signal::read_wav(&read(wav)?).map_err(data)?);
            }
            let gd = a.global_degree.or(cfg.global_degree);
            let ld = a.local_degree.or(cfg.local_degree);
            if gd.is_some() || ld.is_some() || a.residual {
                let doms = if ld.is_some() {
                    domains(a.textgrid.as_deref(), &a.tier, cfg)?
                } else {
                    Vec::new()
                };
                let rule = stylization::default_degree(0);
                let r = stylization::mps_stylize(
                    &spec.track,
                    &doms,
                    gd.unwrap_or(rule),
                    ld.unwrap_or(rule),
                )
                .map_err(data)?;
                if gd.is_some() {
                    spec.global = Some(r.global.clone());
                }
                spec.locals = r.locals.iter().map(|l| l.model.clone()).collect();
                if a.residual {
                    spec.residual = Some(r.residual);
                }
            }
            render::plot_track(&spec).map_err(data)?
        }
        PlotKind::Boxes => {
            let ds = load_durations(path, &a.tier, cfg)?;
            let groups = group(&ds, map);
            let stats = metrics::box_stats(&groups).map_err(data)?;
            render::plot_boxes(&stats, Some(&groups), width, height, &title).map_err(data)?
        }
        PlotKind::Window => {
            let ds = load_durations(path, &a.tier, cfg)?;
            let ws = metrics::moving_npvi(
                &ds.durations(),
                a.size.unwrap_or(cfg.npvi_window),
                a.step.unwrap_or(cfg.npvi_step),
            )
            .map_err(data)?;
            render::plot_window_series(&ws, width, height, &title).map_err(data)?
        }
    };
    Ok(Output {
        ext: "svg",
        body: svg,
    })
}

fn cmd_validate(a: &ValidateArgs, cfg: &Config, path: &Path) -> Result<Output, CliError> {
    #[derive(Serialize)]
    struct TierSummary<'a> {
        name: &'a str,
        kind: TierKind,
        items: usize,
    }
    #[derive(Serialize)]
    struct TextGridReport<'a> {
        schema_version: u32,
        kind: &'static str,
        valid: bool,
        xmin: f64,
        xmax: f64,
        tiers: Vec<TierSummary<'a>>,
    }
    #[derive(Serialize)]
    struct WavReport {
        schema_version: u32,
        kind: &'static str,
        sample_rate: u32,
        samples: usize,
        duration_s: f64,
        f_max: f64,
        nyquist_ok: bool,
    }

    if is_wav(path) {
        let sig = signal::read_wav(&read(path)?).map_err(data)?;
        let f_max = a.f_max.unwrap_or(cfg.f0.f_max);
        let ok = signal::validate_nyquist(sig.sample_rate as f64, f_max);
        if !ok {
            return Err(data(signal::SignalError::NyquistViolation {
                sample_rate: sig.sample_rate,
                f_max,
            }));
        }
        return Ok(Output {
            ext: "json",
            body: json(&WavReport {
                schema_version: 1,
                kind: "wav",
                sample_rate: sig.sample_rate,
                samples: sig.samples.len(),
                duration_s: sig.duration(),
                f_max,
                nyquist_ok: ok,
            }),
        });
    }
    let ann = load_annotation(path)?;
    Ok(Output {
        ext: "json",
        body: json(&TextGridReport {
            schema_version: 1,
            kind: "textgrid",
            valid: true,
            xmin: ann.xmin,
            xmax: ann.xmax,
            tiers: ann
                .tiers
                .iter()
                .map(|t| TierSummary {
                    name: &t.name,
                    kind: t.kind,
                    items: t.items.len(),
                })
                .collect(),
        }),
    })
}
