use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pcadca::config::RunConfig;
use pcadca::pipeline::{self, StageError};
use pcadca::report;
use pcadca::Error;

#[derive(Parser)]
#[command(name = "pcadca", version, about = "PCA-categorised Dendritic Cell Algorithm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe every attribute of the raw and 1 Hz tables.
    Stats(Flags),
    /// Normalise, merge, rank and categorise attributes.
    Analyse(Flags),
    /// Full pipeline: categorise, run the DCA, classify segments, ROC.
    Run(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long)]
    time_col: Option<String>,
    #[arg(long)]
    marker_col: Option<String>,
    /// Comma-separated columns to drop.
    #[arg(long)]
    exclude: Option<String>,
    #[arg(long)]
    population: Option<String>,
    /// Migration threshold step; default 3 * csm_max / population.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long)]
    fmin: Option<String>,
    #[arg(long)]
    fmax: Option<String>,
    /// "csm_p,csm_d,csm_s;k_p,k_d,k_s".
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    /// Comma-separated classification thresholds.
    #[arg(long, allow_hyphen_values = true)]
    thresholds: Option<String>,
    /// Size of the default threshold grid.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    segments: Option<String>,
    /// Comma-separated second indices; bypasses marker peak detection.
    #[arg(long)]
    boundaries: Option<String>,
    /// Comma-separated per-segment labels (anomalous|normal).
    #[arg(long)]
    labels: Option<String>,
    /// subspace | pc1
    #[arg(long)]
    score_mode: Option<String>,
    #[arg(long)]
    merge_threshold: Option<String>,
    /// Require the rank-sum p-value above this level before merging.
    #[arg(long)]
    merge_min_p: Option<String>,
    /// Retained principal components for scoring.
    #[arg(long)]
    components: Option<String>,
}

impl Flags {
    fn to_config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let pairs = [
            ("input", &self.input),
            ("out-dir", &self.out_dir),
            ("time-col", &self.time_col),
            ("marker-col", &self.marker_col),
            ("exclude", &self.exclude),
            ("population", &self.population),
            ("delta", &self.delta),
            ("fmin", &self.fmin),
            ("fmax", &self.fmax),
            ("weights", &self.weights),
            ("thresholds", &self.thresholds),
            ("grid", &self.grid),
            ("segments", &self.segments),
            ("boundaries", &self.boundaries),
            ("labels", &self.labels),
            ("score-mode", &self.score_mode),
            ("merge-threshold", &self.merge_threshold),
            ("merge-min-p", &self.merge_min_p),
            ("components", &self.components),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<(), StageError> {
    use pipeline::Stage;
    let at = |stage| move |error| StageError { stage, error };

    match cli.command {
        Command::Stats(flags) => {
            let cfg = flags.to_config().map_err(at(Stage::Config))?;
            let stats = pipeline::stats(&cfg)?;
            report::write_stats(&stats, &cfg.out_dir).map_err(at(Stage::Output))?;
            print!("{}", report::stats_csv(&stats.resampled));
        }
        Command::Analyse(flags) => {
            let cfg = flags.to_config().map_err(at(Stage::Config))?;
            let analysis = pipeline::analyse(&cfg)?;
            report::write_analysis(&analysis, &cfg.out_dir).map_err(at(Stage::Output))?;
            print!("{}", report::analysis_summary_text(&analysis));
        }
        Command::Run(flags) => {
            let cfg = flags.to_config().map_err(at(Stage::Config))?;
            let result = pipeline::run(&cfg)?;
            report::write_run(&result, &cfg.out_dir).map_err(at(Stage::Output))?;
            print!("{}", report::run_summary_text(&result));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
