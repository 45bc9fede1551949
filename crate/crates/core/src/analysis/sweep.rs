//! Robustness sweeps: model rankings under scaled tolerances and under every point of the
//! `(alpha, beta, gamma)` weight simplex.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::leaderboard::{build_leaderboard, csv_err, ranking};
use crate::engine::{Engine, Evaluation, Geometry, ScoringConfig, VideoScore};
use crate::error::{Error, Result};
use crate::motion::MotionBundle;
use crate::scalar::Real;

/// The scale multipliers used when none are given.
pub const DEFAULT_SCALES: [f64; 5] = [0.5, 0.75, 1.0, 1.5, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ToleranceRow<T> {
    pub scale: T,
    /// Model ids, best first.
    pub ranking: Vec<String>,
    pub overall: BTreeMap<String, T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ToleranceSweep<T> {
    pub rows: Vec<ToleranceRow<T>>,
    /// True when every scale yields the same ranking.
    pub invariant: bool,
    /// First scale, in grid order, whose ranking differs from the first row's.
    pub crossing_scale: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TernaryPoint<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub ranking: Vec<String>,
    pub overall: BTreeMap<String, T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TernarySweep<T> {
    pub points: Vec<TernaryPoint<T>>,
    pub distinct_rankings: usize,
    /// The most frequent ranking; ties go to the one seen first.
    pub modal_ranking: Vec<String>,
    /// Fraction of points that produce the modal ranking.
    pub modal_share: T,
}

impl<T> TernarySweep<T> {
    pub fn is_stable(&self) -> bool {
        self.distinct_rankings == 1
    }
}

fn rank_scores<T: Real>(scores: &[VideoScore<T>]) -> Result<(Vec<String>, BTreeMap<String, T>)> {
    let lb = build_leaderboard(scores)?;
    let overall = lb.iter().map(|e| (e.model_id.clone(), e.overall)).collect();
    Ok((ranking(&lb), overall))
}

fn check_corpus<T>(bundles: &[MotionBundle<T>]) -> Result<()> {
    if bundles.is_empty() {
        return Err(Error::NoData("empty corpus".into()));
    }
    Ok(())
}

/// Geometry of every bundle, computed once. Tolerance and weight changes leave it unchanged.
pub fn corpus_geometry<T: Real>(engine: &Engine<T>, bundles: &[MotionBundle<T>]) -> Result<Vec<Geometry<T>>> {
    bundles
        .par_iter()
        .map(|b| {
            b.validate(engine.skeleton())?;
            engine.geometry(b)
        })
        .collect()
}

/// Rescores the corpus with tolerances and limits multiplied by each scale and records the
/// overall ranking of models.
pub fn tolerance_sweep<T: Real>(engine: &Engine<T>, bundles: &[MotionBundle<T>], scales: &[T]) -> Result<ToleranceSweep<T>> {
    check_corpus(bundles)?;
    if scales.is_empty() {
        return Err(Error::Config("empty scale grid".into()));
    }
    let scaled = scales.iter().map(|&k| engine.scaled(k)).collect::<Result<Vec<_>>>()?;
    let geometry = corpus_geometry(engine, bundles)?;
    let rows = scaled
        .par_iter()
        .zip(scales.par_iter())
        .map(|(e, &scale)| {
            let scores = bundles
                .iter()
                .zip(&geometry)
                .map(|(b, g)| e.evaluate_with(b, g)?.score(e.config()))
                .collect::<Result<Vec<_>>>()?;
            let (ranking, overall) = rank_scores(&scores)?;
            Ok(ToleranceRow { scale, ranking, overall })
        })
        .collect::<Result<Vec<_>>>()?;
    let crossing_scale = rows.iter().find(|r| r.ranking != rows[0].ranking).map(|r| r.scale);
    Ok(ToleranceSweep { invariant: crossing_scale.is_none(), crossing_scale, rows })
}

/// Grid points `(i, j, k) / n` with `i + j + k = n` and `n = 1/step`, ordered by `i` then `j`.
pub fn simplex_grid<T: Real>(step: T) -> Result<Vec<(T, T, T)>> {
    if !(step > T::zero() && step <= T::one()) {
        return Err(Error::Config(format!("simplex step must lie in (0, 1], got {step}")));
    }
    let inv = T::one() / step;
    let n = inv.round();
    if (inv - n).abs() > T::lit(1e-6) * n {
        return Err(Error::Config(format!("simplex step {step} does not divide 1")));
    }
    let n = n.to_usize().ok_or_else(|| Error::Config("simplex step too small".into()))?;
    let nf = T::from_usize_lossy(n);
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            out.push((
                T::from_usize_lossy(i) / nf,
                T::from_usize_lossy(j) / nf,
                T::from_usize_lossy(k) / nf,
            ));
        }
    }
    Ok(out)
}

/// Evaluates the corpus once and reranks models at every simplex point.
pub fn ternary_sweep<T: Real>(engine: &Engine<T>, bundles: &[MotionBundle<T>], step: T) -> Result<TernarySweep<T>> {
    check_corpus(bundles)?;
    let evals = bundles.par_iter().map(|b| engine.evaluate(b)).collect::<Result<Vec<_>>>()?;
    ternary_sweep_evaluations(&evals, engine.config(), step)
}

/// As [`ternary_sweep`] on already evaluated videos.
pub fn ternary_sweep_evaluations<T: Real>(
    evals: &[Evaluation<T>],
    config: &ScoringConfig<T>,
    step: T,
) -> Result<TernarySweep<T>> {
    let grid = simplex_grid(step)?;
    if evals.is_empty() {
        return Err(Error::NoData("empty corpus".into()));
    }
    let points = grid
        .par_iter()
        .map(|&(alpha, beta, gamma)| {
            let cfg = config.with_weights(alpha, beta, gamma)?;
            let scores = evals.iter().map(|e| e.score(&cfg)).collect::<Result<Vec<_>>>()?;
            let (ranking, overall) = rank_scores(&scores)?;
            Ok(TernaryPoint { alpha, beta, gamma, ranking, overall })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut counts: Vec<(&Vec<String>, usize)> = Vec::new();
    for p in &points {
        match counts.iter_mut().find(|(r, _)| **r == p.ranking) {
            Some((_, c)) => *c += 1,
            None => counts.push((&p.ranking, 1)),
        }
    }
    let (modal, modal_count) = counts.iter().fold((counts[0].0, 0), |best, &(r, c)| if c > best.1 { (r, c) } else { best });
    Ok(TernarySweep {
        distinct_rankings: counts.len(),
        modal_ranking: modal.clone(),
        modal_share: T::from_usize_lossy(modal_count) / T::from_usize_lossy(points.len()),
        points,
    })
}

fn models_of<'a, T: 'a>(overalls: impl Iterator<Item = &'a BTreeMap<String, T>>) -> Vec<String> {
    let mut all: Vec<String> = overalls.flat_map(|m| m.keys().cloned()).collect();
    all.sort();
    all.dedup();
    all
}

fn fmt4<T: Real>(x: T) -> String {
    format!("{:.4}", x.to_f64_lossy())
}

/// One row per scale: `scale,ranking,<model overall>...`, ranking joined by `>`.
pub fn write_tolerance_csv<T: Real, W: Write>(sweep: &ToleranceSweep<T>, out: W) -> Result<()> {
    let models = models_of(sweep.rows.iter().map(|r| &r.overall));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["scale".to_owned(), "ranking".to_owned()];
    header.extend(models.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for r in &sweep.rows {
        let mut row = vec![fmt4(r.scale), r.ranking.join(">")];
        row.extend(models.iter().map(|m| r.overall.get(m).map(|&x| fmt4(x)).unwrap_or_default()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per simplex point: `alpha,beta,gamma,ranking,<model overall>...`.
pub fn write_ternary_csv<T: Real, W: Write>(sweep: &TernarySweep<T>, out: W) -> Result<()> {
    let models = models_of(sweep.points.iter().map(|p| &p.overall));
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["alpha", "beta", "gamma", "ranking"].map(String::from).to_vec();
    header.extend(models.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for p in &sweep.points {
        let mut row = vec![fmt4(p.alpha), fmt4(p.beta), fmt4(p.gamma), p.ranking.join(">")];
        row.extend(models.iter().map(|m| p.overall.get(m).map(|&x| fmt4(x)).unwrap_or_default()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(simplex_grid(0.1f64).unwrap().len(), 66);
        assert_eq!(simplex_grid(0.5f64).unwrap().len(), 6);
        assert_eq!(simplex_grid(1.0f64).unwrap().len(), 3);
        for (a, b, g) in simplex_grid(0.1f64).unwrap() {
            assert!((a + b + g - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_bad_steps() {
        for bad in [0.0, -0.1, 1.5, 0.3] {
            assert!(matches!(simplex_grid(bad), Err(Error::Config(_))), "{bad}");
        }
    }
}
