//! Leaderboards, preference correlation, difficulty breakdowns and robustness sweeps.

pub mod difficulty;
pub mod leaderboard;
pub mod preference;
pub mod sweep;

pub use difficulty::{difficulty_breakdown, DifficultyBreakdown, DifficultyCell};
pub use leaderboard::{
    build_leaderboard, leaderboard_from_model_scores, rank_entries, ranking, write_leaderboard_csv, LeaderboardEntry,
};
pub use preference::{average_ranks, pairwise_from_scores, spearman_rho, win_ratios, Outcome, PairwiseComparison};
pub use sweep::{
    corpus_geometry, simplex_grid, ternary_sweep, ternary_sweep_evaluations, tolerance_sweep, write_ternary_csv,
    write_tolerance_csv, TernaryPoint, TernarySweep, ToleranceRow, ToleranceSweep, DEFAULT_SCALES,
};
