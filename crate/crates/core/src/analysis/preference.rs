//! Pairwise preference win ratios and Spearman rank correlation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::VideoScore;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    AWins,
    BWins,
    Tie,
}

impl Outcome {
    /// Points for `(model_a, model_b)`: 1 for a win, 0.5 for a tie, 0 for a loss.
    pub fn points(self) -> (f64, f64) {
        match self {
            Outcome::AWins => (1.0, 0.0),
            Outcome::BWins => (0.0, 1.0),
            Outcome::Tie => (0.5, 0.5),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Outcome::AWins => Outcome::BWins,
            Outcome::BWins => Outcome::AWins,
            Outcome::Tie => Outcome::Tie,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub model_a: String,
    pub model_b: String,
    pub prompt_id: String,
    pub outcome: Outcome,
}

impl PairwiseComparison {
    pub fn new(model_a: impl Into<String>, model_b: impl Into<String>, prompt_id: impl Into<String>, outcome: Outcome) -> Result<Self> {
        let c = Self { model_a: model_a.into(), model_b: model_b.into(), prompt_id: prompt_id.into(), outcome };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.model_a == self.model_b {
            return Err(Error::Validation(format!("model {} compared with itself", self.model_a)));
        }
        Ok(())
    }
}

/// Per model, points earned divided by the number of comparisons it appears in.
pub fn win_ratios<T: Real>(comparisons: &[PairwiseComparison]) -> Result<BTreeMap<String, T>> {
    if comparisons.is_empty() {
        return Err(Error::NoData("no comparisons".into()));
    }
    let mut tally: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for c in comparisons {
        c.validate()?;
        let (pa, pb) = c.outcome.points();
        for (m, p) in [(&c.model_a, pa), (&c.model_b, pb)] {
            let e = tally.entry(m.as_str()).or_default();
            e.0 += p;
            e.1 += 1;
        }
    }
    Ok(tally.into_iter().map(|(m, (pts, n))| (m.to_owned(), T::lit(pts / n as f64))).collect())
}

/// Comparisons derived from scores: on every prompt, each pair of models that both have a
/// video is compared by overall score. Differences within `tie_margin` count as ties. When a
/// model has several videos for one prompt, their overall scores are averaged.
pub fn pairwise_from_scores<T: Real>(scores: &[VideoScore<T>], tie_margin: T) -> Vec<PairwiseComparison> {
    let mut by_prompt: BTreeMap<&str, BTreeMap<&str, (T, usize)>> = BTreeMap::new();
    for v in scores {
        let prompt = v.prompt_id.as_deref().unwrap_or(&v.video_id);
        let e = by_prompt.entry(prompt).or_default().entry(v.model_id.as_str()).or_insert((T::zero(), 0));
        e.0 = e.0 + v.overall;
        e.1 += 1;
    }
    let mut out = Vec::new();
    for (prompt, models) in by_prompt {
        let means: Vec<(&str, T)> = models.into_iter().map(|(m, (s, n))| (m, s / T::from_usize_lossy(n))).collect();
        for (i, &(a, sa)) in means.iter().enumerate() {
            for &(b, sb) in &means[i + 1..] {
                let outcome = if (sa - sb).abs() <= tie_margin {
                    Outcome::Tie
                } else if sa > sb {
                    Outcome::AWins
                } else {
                    Outcome::BWins
                };
                out.push(PairwiseComparison {
                    model_a: a.to_owned(),
                    model_b: b.to_owned(),
                    prompt_id: prompt.to_owned(),
                    outcome,
                });
            }
        }
    }
    out
}

/// 1-based ranks, ties sharing the average of the ranks they span.
pub fn average_ranks<T: Real>(xs: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        // Positions i..=j hold equal values; their 1-based ranks average to (i + j)/2 + 1.
        let r = T::from_usize_lossy(i + j) / T::lit(2.0) + T::one();
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation of the average ranks of `x` and `y`.
pub fn spearman_rho<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("spearman needs at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Validation("spearman inputs must be finite".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::UndefinedCorrelation("constant input has no ranking".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn cmp(a: &str, b: &str, o: Outcome) -> PairwiseComparison {
        PairwiseComparison::new(a, b, "p", o).unwrap()
    }

    #[test]
    fn win_and_tie() {
        let r: BTreeMap<String, f64> = win_ratios(&[cmp("A", "B", Outcome::AWins), cmp("A", "C", Outcome::Tie)]).unwrap();
        assert_eq!(r["A"], 0.75);
        assert_eq!(r["B"], 0.0);
        assert_eq!(r["C"], 0.5);
    }

    #[test]
    fn self_comparison_rejected() {
        assert!(PairwiseComparison::new("A", "A", "p", Outcome::Tie).is_err());
        assert!(matches!(win_ratios::<f64>(&[]), Err(Error::NoData(_))));
    }

    #[test]
    fn spearman_examples() {
        let a = [1.0f64, 2.0, 3.0, 4.0];
        assert!((spearman_rho(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman_rho(&a, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!(matches!(spearman_rho(&a, &[2.0; 4]), Err(Error::UndefinedCorrelation(_))));
        assert!(spearman_rho(&a, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn tied_values_share_average_rank() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    fn outcome() -> impl Strategy<Value = Outcome> {
        prop_oneof![Just(Outcome::AWins), Just(Outcome::BWins), Just(Outcome::Tie)]
    }

    fn comparisons() -> impl Strategy<Value = Vec<PairwiseComparison>> {
        prop::collection::vec((0usize..5, 1usize..5, outcome()), 1..30).prop_map(|v| {
            v.into_iter()
                .map(|(a, k, o)| cmp(&format!("m{a}"), &format!("m{}", (a + k) % 5), o))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reversing_outcomes_complements_ratios(cs in comparisons()) {
            let fwd: BTreeMap<String, f64> = win_ratios(&cs).unwrap();
            let rev: Vec<_> = cs.iter().map(|c| PairwiseComparison { outcome: c.outcome.reversed(), ..c.clone() }).collect();
            let back: BTreeMap<String, f64> = win_ratios(&rev).unwrap();
            for (m, x) in &fwd {
                prop_assert!((back[m] - (1.0 - x)).abs() < 1e-12);
            }
        }

        #[test]
        fn points_sum_to_comparison_count(cs in comparisons()) {
            let ratios: BTreeMap<String, f64> = win_ratios(&cs).unwrap();
            let mut appearances: BTreeMap<&str, usize> = BTreeMap::new();
            for c in &cs {
                *appearances.entry(&c.model_a).or_default() += 1;
                *appearances.entry(&c.model_b).or_default() += 1;
            }
            let total: f64 = ratios.iter().map(|(m, r)| r * appearances[m.as_str()] as f64).sum();
            prop_assert!((total - cs.len() as f64).abs() < 1e-9);
        }

        #[test]
        fn spearman_ignores_monotone_transforms(
            x in prop::collection::vec(-100.0f64..100.0, 3..20),
            seed in prop::collection::vec(-100.0f64..100.0, 20),
        ) {
            let y = &seed[..x.len()];
            prop_assume!(x.iter().any(|v| *v != x[0]) && y.iter().any(|v| *v != y[0]));
            let base = spearman_rho(&x, y).unwrap();
            let tx: Vec<f64> = x.iter().map(|v| (v / 50.0).exp() + 3.0 * v).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * v * v).collect();
            prop_assert!((spearman_rho(&tx, &ty).unwrap() - base).abs() < 1e-9);
            prop_assert!(base.abs() <= 1.0);
        }
    }
}
