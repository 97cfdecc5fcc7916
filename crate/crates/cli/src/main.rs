use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use mnmdtw::io::{self, ReportFormat};
use mnmdtw::pipeline::{prepare, synchronize_series, DEFAULT_THRESHOLD};
use mnmdtw::{
    compute_baseline, evaluate, generate_cohort, generate_squat, LimbGroupMap, Normalization, PipelineConfig,
    PoseSequence, ScoreReport, SquatParams,
};
use rayon::prelude::*;

const THRESHOLD_ENV: &str = "MNMDTW_THRESHOLD";

#[derive(Parser)]
#[command(
    name = "mnmdtw",
    version,
    about = "Per-limb movement error scores from pose landmark recordings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one or more test recordings against a gold recording.
    Score(ScoreArgs),
    /// Compute per-limb baselines from a cohort of correct recordings.
    Baseline(BaselineArgs),
    /// Write a synthetic squat recording.
    Synth(SynthArgs),
    /// Write the test recording warped onto the gold timeline as CSV.
    Align(AlignArgs),
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    gold: PathBuf,
    /// Repeat to score several recordings.
    #[arg(long, required = true)]
    test: Vec<PathBuf>,
    #[arg(long)]
    baseline: PathBuf,
    /// Scores at or below this are good. Overrides MNMDTW_THRESHOLD.
    #[arg(long, value_parser = parse_positive)]
    threshold: Option<f64>,
    /// Report path; `.csv` writes CSV, anything else JSON, `-` is stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// SVG bar chart of the scores.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, required = true, num_args = 1..)]
    controls: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// per-channel, per-axis or pose.
    #[arg(long, default_value_t = Normalization::Pose)]
    normalization: Normalization,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_parser = ["correct", "mistake1", "mistake2"])]
    preset: String,
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long)]
    stance: Option<f64>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Landmark noise in metres.
    #[arg(long)]
    jitter: Option<f64>,
    /// Camera yaw in degrees.
    #[arg(long)]
    yaw: Option<f64>,
    #[arg(long)]
    tempo: Option<f64>,
    /// Write a cohort of this many clips, named `<stem>-<i>.<ext>`.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 1, requires = "count")]
    seed_stride: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = Normalization::Pose)]
    normalization: Normalization,
}

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn resolve_threshold(flag: Option<f64>) -> anyhow::Result<f64> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THRESHOLD_ENV) {
        Ok(v) => parse_positive(&v).map_err(|e| UsageError(format!("{THRESHOLD_ENV}: {e}")).into()),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_THRESHOLD),
        Err(e) => Err(UsageError(format!("{THRESHOLD_ENV}: {e}")).into()),
    }
}

/// `out.json` with stem `t1` becomes `out-t1.json`.
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "test".into())
}

fn read(path: &Path) -> anyhow::Result<PoseSequence> {
    Ok(io::read_landmarks(path)?)
}

fn run_score(args: ScoreArgs) -> anyhow::Result<()> {
    let threshold = resolve_threshold(args.threshold)?;
    let baseline = io::read_baseline(&args.baseline)?;
    let gold = read(&args.gold)?;
    let map = LimbGroupMap::default();
    let config = PipelineConfig {
        normalization: baseline.normalization,
        threshold,
        ..PipelineConfig::default()
    };

    let reports = args
        .test
        .par_iter()
        .map(|path| {
            let test = read(path)?;
            let mut report = evaluate(&test, &gold, &baseline, &map, &config)
                .with_context(|| format!("scoring {}", path.display()))?;
            report.gold_id = args.gold.display().to_string();
            report.test_id = path.display().to_string();
            Ok(report)
        })
        .collect::<anyhow::Result<Vec<ScoreReport>>>()?;

    let multi = args.test.len() > 1;
    for (path, report) in args.test.iter().zip(&reports) {
        let target = |p: &Path| {
            if multi && !io::is_stdout(p) {
                with_suffix(p, &stem_of(path))
            } else {
                p.to_path_buf()
            }
        };
        match &args.report {
            Some(p) => {
                let out = target(p);
                io::write_report(report, ReportFormat::from_path(&out), &out)?;
                info!("wrote {}", out.display());
            }
            None => eprint!("{}", summary(report)),
        }
        if let Some(p) = &args.plot {
            let out = target(p);
            io::render_bar_chart(report, &out)?;
            info!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn summary(report: &ScoreReport) -> String {
    let mut s = format!(
        "{} vs {} (threshold {})\n",
        report.test_id, report.gold_id, report.threshold
    );
    s.push_str(&format!(
        "{:<10} {:>4} {:>12} {:>12} {:>9}\n",
        "group", "axis", "raw", "baseline", "score"
    ));
    for r in &report.rows {
        s.push_str(&format!(
            "{:<10} {:>4} {:>12.4} {:>12.4} {:>9.3}\n",
            r.group, r.axis, r.raw, r.baseline, r.score
        ));
    }
    for v in &report.verdicts {
        s.push_str(&format!("{}: {}\n", v.group, if v.good { "good" } else { "bad" }));
    }
    s
}

fn run_baseline(args: BaselineArgs) -> anyhow::Result<()> {
    let gold = read(&args.gold)?;
    let controls = args
        .controls
        .iter()
        .map(|p| read(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let config = PipelineConfig {
        normalization: args.normalization,
        ..PipelineConfig::default()
    };
    let table = compute_baseline(&controls, &gold, &LimbGroupMap::default(), &config)?;
    for key in &table.floored {
        log::warn!("baseline ({}, {}) is zero and was floored", key.group, key.axis);
    }
    io::write_baseline(&table, &args.out)?;
    info!("wrote {} from {} controls", args.out.display(), table.cohort_size);
    Ok(())
}

fn run_synth(args: SynthArgs) -> anyhow::Result<()> {
    let mut p = SquatParams::preset(&args.preset).expect("clap restricts presets");
    if let Some(v) = args.depth {
        p.depth = v;
    }
    if let Some(v) = args.stance {
        p.stance_width = v;
    }
    if let Some(v) = args.frames {
        p.duration_frames = v;
    }
    if let Some(v) = args.seed {
        p.seed = v;
    }
    if let Some(v) = args.jitter {
        p.jitter_std = v;
    }
    if let Some(v) = args.yaw {
        p.camera_yaw = v;
    }
    if let Some(v) = args.tempo {
        p.tempo = v;
    }
    match args.count {
        None => {
            let seq = generate_squat(&p)?.with_label(args.preset.as_str());
            io::write_landmarks(&seq, &args.out)?;
        }
        Some(n) => {
            if n == 0 {
                bail!(UsageError("--count must be at least 1".into()));
            }
            if io::is_stdout(&args.out) {
                bail!(UsageError("--count needs a file path for --out".into()));
            }
            for (i, seq) in generate_cohort(&p, n, args.seed_stride)?.into_iter().enumerate() {
                let out = with_suffix(&args.out, &(i + 1).to_string());
                io::write_landmarks(&seq.with_label(args.preset.as_str()), &out)?;
                info!("wrote {}", out.display());
            }
        }
    }
    Ok(())
}

fn run_align(args: AlignArgs) -> anyhow::Result<()> {
    let gold = prepare(&read(&args.gold)?, args.normalization)?;
    let test = prepare(&read(&args.test)?, args.normalization)?;
    let synced = synchronize_series(&test, &gold)?;
    io::write_series_csv(&synced, &args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(a) => run_score(a),
        Command::Baseline(a) => run_baseline(a),
        Command::Synth(a) => run_synth(a),
        Command::Align(a) => run_align(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors already embed their source in the message.
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
