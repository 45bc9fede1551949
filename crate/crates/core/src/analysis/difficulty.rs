//! Per-model score averages split by prompt difficulty.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::VideoScore;
use crate::error::{Error, Result};
use crate::motion::Difficulty;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DifficultyCell<T> {
    pub videos: usize,
    /// Mean metric scores I..VI.
    pub scores: [T; 6],
    pub overall: T,
}

/// model → difficulty → means. Buckets with no videos are absent.
pub type DifficultyBreakdown<T> = BTreeMap<String, BTreeMap<Difficulty, DifficultyCell<T>>>;

pub fn difficulty_breakdown<T: Real>(scores: &[VideoScore<T>]) -> Result<DifficultyBreakdown<T>> {
    // Per cell: metric sums, overall sum, video count.
    type Sums<T> = ([T; 6], T, usize);
    let mut sums: BTreeMap<String, BTreeMap<Difficulty, Sums<T>>> = BTreeMap::new();
    for v in scores {
        let d = v
            .difficulty
            .ok_or_else(|| Error::MissingLabel(format!("video {} has no difficulty", v.video_id)))?;
        let cell = sums
            .entry(v.model_id.clone())
            .or_default()
            .entry(d)
            .or_insert(([T::zero(); 6], T::zero(), 0));
        for (acc, x) in cell.0.iter_mut().zip(v.scores()) {
            *acc = *acc + x;
        }
        cell.1 = cell.1 + v.overall;
        cell.2 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(m, cells)| {
            let cells = cells
                .into_iter()
                .map(|(d, (s, o, n))| {
                    let nf = T::from_usize_lossy(n);
                    (d, DifficultyCell { videos: n, scores: s.map(|x| x / nf), overall: o / nf })
                })
                .collect();
            (m, cells)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::{MetricId, MetricScore};

    fn video(id: &str, d: Option<Difficulty>, s: f64) -> VideoScore<f64> {
        let metrics = MetricId::ALL.map(|m| MetricScore::from_penalty(m, None, 1.0 - s / 100.0));
        VideoScore::assemble(id.into(), "m".into(), None, d, None, metrics).unwrap()
    }

    #[test]
    fn hand_means() {
        let vids = [
            video("a", Some(Difficulty::Easy), 90.0),
            video("b", Some(Difficulty::Easy), 80.0),
            video("c", Some(Difficulty::Hard), 60.0),
        ];
        let out = difficulty_breakdown(&vids).unwrap();
        let m = &out["m"];
        assert_eq!(m.len(), 2);
        assert!(!m.contains_key(&Difficulty::Medium));
        assert!((m[&Difficulty::Easy].overall - 85.0).abs() < 1e-12);
        assert_eq!(m[&Difficulty::Easy].videos, 2);
        assert!((m[&Difficulty::Hard].scores[3] - 60.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_scores_equal_across_buckets() {
        let vids = [
            video("a", Some(Difficulty::Easy), 70.0),
            video("b", Some(Difficulty::Medium), 70.0),
            video("c", Some(Difficulty::Hard), 70.0),
        ];
        let out = difficulty_breakdown(&vids).unwrap();
        assert!(out["m"].values().all(|c| (c.overall - 70.0).abs() < 1e-12));
    }

    #[test]
    fn missing_label_is_an_error() {
        assert!(matches!(difficulty_breakdown(&[video("a", None, 70.0)]), Err(Error::MissingLabel(_))));
    }
}
