use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "humanscore", version, about = "Biomechanics-grounded scoring of fitted human motion")]
pub struct Cli {
    /// Worker threads for parallel scoring (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score motion bundles, writing one record per video.
    Score(ScoreArgs),
    /// Aggregate score records into a model leaderboard CSV.
    Leaderboard(LeaderboardArgs),
    /// Generate a synthetic bundle from a spec, or a whole reference corpus.
    Synth(SynthArgs),
    /// Ranking robustness sweeps.
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
    },
    /// Correlate scores with human pairwise preferences.
    Correlate(CorrelateArgs),
}

/// Skeleton, limits and scoring configuration shared by every scoring command.
#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Skeleton definition JSON (default: built-in skeleton).
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    /// Limit table JSON (default: built-in limits).
    #[arg(long)]
    pub limits: Option<PathBuf>,
    /// Scoring configuration JSON; keys not given keep their defaults.
    #[arg(long, env = "HUMANSCORE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `rom.tol=20` or `smoothness.jerk_window=7`.
    /// Takes precedence over the config file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Bundle files, or directories whose `*.json` files are all scored.
    #[arg(required = true)]
    pub bundles: Vec<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Directory for `<video_id>.json` records (default: a JSON array on stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LeaderboardArgs {
    /// Directory of score records, or a JSON file holding an array of them.
    pub scores: PathBuf,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write per-model, per-difficulty averages as JSON.
    #[arg(long)]
    pub difficulty: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Synthesis spec JSON: a baseline plus a list of corruptions.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    pub spec: Option<PathBuf>,
    /// Output bundle file (with `--spec`).
    #[arg(long, requires = "spec")]
    pub out: Option<PathBuf>,
    /// Write the reference corruption corpus into this directory instead.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 4, requires = "corpus")]
    pub models: usize,
    #[arg(long, default_value_t = 3, requires = "corpus")]
    pub videos: usize,
    #[arg(long, default_value_t = 60)]
    pub frames: usize,
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    #[arg(long)]
    pub limits: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SweepKind {
    /// Rescore with tolerances and limits multiplied by each scale.
    Tolerance {
        corpus: PathBuf,
        /// Comma-separated scale multipliers.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.75, 1.0, 1.5, 2.0])]
        grid: Vec<f64>,
        #[command(flatten)]
        engine: EngineArgs,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rescore at every point of the (alpha, beta, gamma) simplex grid.
    Ternary {
        corpus: PathBuf,
        /// Grid spacing; must divide 1.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Directory of score records, or a JSON array of them.
    #[arg(long)]
    pub scores: PathBuf,
    /// JSON array of pairwise comparisons `{model_a, model_b, prompt_id, outcome}`.
    #[arg(long)]
    pub preferences: PathBuf,
    /// Overall-score difference treated as a tie when deriving score-based wins.
    #[arg(long, default_value_t = 0.0)]
    pub tie_margin: f64,
    /// Output JSON (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
