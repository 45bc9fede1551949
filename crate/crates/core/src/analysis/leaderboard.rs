//! Model-level leaderboard.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::aggregation::{dimension_and_overall, MetricId};
use crate::engine::VideoScore;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LeaderboardEntry<T> {
    pub model_id: String,
    /// Metric scores in order I..VI.
    pub scores: [T; 6],
    pub anatomy_avg: T,
    pub kinematic_avg: T,
    pub kinetic_avg: T,
    pub overall: T,
    /// 1-based, descending by overall.
    pub rank: usize,
    /// Number of videos averaged; zero when built from published model scores.
    pub videos: usize,
}

impl<T: Real> LeaderboardEntry<T> {
    fn from_scores(model_id: String, scores: [T; 6], videos: usize) -> Result<Self> {
        let map: BTreeMap<MetricId, T> = MetricId::ALL.into_iter().zip(scores).collect();
        let dims = dimension_and_overall(&map)?;
        Ok(Self {
            model_id,
            scores,
            anatomy_avg: dims.anatomy_avg,
            kinematic_avg: dims.kinematic_avg,
            kinetic_avg: dims.kinetic_avg,
            overall: dims.overall,
            rank: 0,
            videos,
        })
    }

    pub fn score(&self, id: MetricId) -> T {
        self.scores[id as usize]
    }
}

/// Averages each metric over a model's videos, then derives dimensions and overall from the
/// averaged metrics. Entries come back ranked.
pub fn build_leaderboard<T: Real>(videos: &[VideoScore<T>]) -> Result<Vec<LeaderboardEntry<T>>> {
    if videos.is_empty() {
        return Err(Error::NoData("no scored videos".into()));
    }
    let mut groups: BTreeMap<&str, Vec<[T; 6]>> = BTreeMap::new();
    for v in videos {
        groups.entry(v.model_id.as_str()).or_default().push(v.scores());
    }
    let mut entries = groups
        .into_iter()
        .map(|(model, rows)| {
            let n = T::from_usize_lossy(rows.len());
            let mut sum = [T::zero(); 6];
            for row in &rows {
                for (acc, x) in sum.iter_mut().zip(row) {
                    *acc = *acc + *x;
                }
            }
            LeaderboardEntry::from_scores(model.to_owned(), sum.map(|x| x / n), rows.len())
        })
        .collect::<Result<Vec<_>>>()?;
    rank_entries(&mut entries);
    Ok(entries)
}

/// Leaderboard from per-model metric scores that are already averaged, such as a published
/// table.
pub fn leaderboard_from_model_scores<T: Real>(models: &BTreeMap<String, [T; 6]>) -> Result<Vec<LeaderboardEntry<T>>> {
    if models.is_empty() {
        return Err(Error::NoData("no models".into()));
    }
    let mut entries = models
        .iter()
        .map(|(m, s)| LeaderboardEntry::from_scores(m.clone(), *s, 0))
        .collect::<Result<Vec<_>>>()?;
    rank_entries(&mut entries);
    Ok(entries)
}

/// Sorts by overall descending, breaking ties by model id, and assigns ranks 1..N.
pub fn rank_entries<T: Real>(entries: &mut [LeaderboardEntry<T>]) {
    entries.sort_by(|a, b| {
        b.overall
            .partial_cmp(&a.overall)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
}

/// Model ids in rank order.
pub fn ranking<T>(entries: &[LeaderboardEntry<T>]) -> Vec<String> {
    let mut sorted: Vec<&LeaderboardEntry<T>> = entries.iter().collect();
    sorted.sort_by_key(|e| e.rank);
    sorted.into_iter().map(|e| e.model_id.clone()).collect()
}

pub const LEADERBOARD_COLUMNS: [&str; 12] =
    ["model", "I", "II", "III", "IV", "V", "VI", "anatomy", "kinematic", "kinetic", "overall", "rank"];

/// Writes the leaderboard as CSV, scores rounded to one decimal.
pub fn write_leaderboard_csv<T: Real, W: Write>(entries: &[LeaderboardEntry<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEADERBOARD_COLUMNS).map_err(csv_err)?;
    for e in entries {
        let mut row = vec![e.model_id.clone()];
        row.extend(e.scores.iter().map(|&x| fmt1(x)));
        row.extend([e.anatomy_avg, e.kinematic_avg, e.kinetic_avg, e.overall].map(fmt1));
        row.push(e.rank.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn fmt1<T: Real>(x: T) -> String {
    format!("{:.1}", x.to_f64_lossy())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Validation(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::MetricScore;

    fn video(model: &str, id: &str, s: [f64; 6]) -> VideoScore<f64> {
        let metrics = MetricId::ALL.map(|m| {
            let d = 1.0 - s[m as usize] / 100.0;
            MetricScore::from_penalty(m, None, d)
        });
        VideoScore::assemble(id.into(), model.into(), None, None, None, metrics).unwrap()
    }

    #[test]
    fn single_perfect_video() {
        let lb = build_leaderboard(&[video("a", "v", [100.0; 6])]).unwrap();
        assert_eq!(lb.len(), 1);
        assert_eq!(lb[0].rank, 1);
        assert!((lb[0].overall - 100.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_model_ranks_first_and_means_are_per_metric() {
        let vids = [
            video("b", "1", [80.0, 70.0, 60.0, 50.0, 40.0, 30.0]),
            video("a", "2", [90.0, 80.0, 70.0, 60.0, 50.0, 40.0]),
            video("a", "3", [100.0, 90.0, 80.0, 70.0, 60.0, 50.0]),
        ];
        let lb = build_leaderboard(&vids).unwrap();
        assert_eq!(ranking(&lb), ["a", "b"]);
        assert!((lb[0].scores[0] - 95.0).abs() < 1e-12);
        assert_eq!(lb[0].videos, 2);
        // (95+85)/2, (75+65)/2, (55+45)/2 → 90, 70, 50 → 70
        assert!((lb[0].overall - 70.0).abs() < 1e-12);
    }

    #[test]
    fn ties_break_on_model_id() {
        let vids = [video("zeta", "1", [90.0; 6]), video("alpha", "2", [90.0; 6])];
        assert_eq!(ranking(&build_leaderboard(&vids).unwrap()), ["alpha", "zeta"]);
    }

    #[test]
    fn empty_input_is_no_data() {
        assert!(matches!(build_leaderboard::<f64>(&[]), Err(Error::NoData(_))));
    }

    #[test]
    fn csv_layout() {
        let lb = build_leaderboard(&[video("m", "v", [100.0, 90.0, 80.0, 70.0, 60.0, 50.0])]).unwrap();
        let mut buf = Vec::new();
        write_leaderboard_csv(&lb, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "model,I,II,III,IV,V,VI,anatomy,kinematic,kinetic,overall,rank\n\
             m,100.0,90.0,80.0,70.0,60.0,50.0,95.0,75.0,55.0,75.0,1\n"
        );
    }
}
