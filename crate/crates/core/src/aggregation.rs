//! Frequency / severity / persistence aggregation of per-frame signals into video scores,
//! plus dimension and overall averaging.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricId {
    /// Extra limbs.
    I,
    /// Bone-length stability.
    II,
    /// Joint range of motion.
    III,
    /// Self collision.
    IV,
    /// Kinematic extremes.
    V,
    /// Motion smoothness.
    VI,
}

impl MetricId {
    pub const ALL: [MetricId; 6] = [MetricId::I, MetricId::II, MetricId::III, MetricId::IV, MetricId::V, MetricId::VI];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::I => "I",
            MetricId::II => "II",
            MetricId::III => "III",
            MetricId::IV => "IV",
            MetricId::V => "V",
            MetricId::VI => "VI",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            MetricId::I | MetricId::II => Dimension::Anatomy,
            MetricId::III | MetricId::IV => Dimension::Kinematic,
            MetricId::V | MetricId::VI => Dimension::Kinetic,
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Anatomy,
    Kinematic,
    Kinetic,
}

/// Per-frame binary flags `b_t` and severities `m_t ∈ [0, 1]` for one metric.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSignals<T> {
    pub flags: Vec<bool>,
    pub severity: Vec<T>,
}

impl<T: Real> FrameSignals<T> {
    pub fn new(flags: Vec<bool>, severity: Vec<T>) -> Result<Self> {
        let s = Self { flags, severity };
        s.validate()?;
        Ok(s)
    }

    pub fn zeros(frames: usize) -> Self {
        Self { flags: vec![false; frames], severity: vec![T::zero(); frames] }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.flags.len() != self.severity.len() {
            return Err(Error::Validation(format!(
                "signal lengths differ: {} flags vs {} severities",
                self.flags.len(),
                self.severity.len()
            )));
        }
        if let Some(t) = self.severity.iter().position(|m| !(*m >= T::zero() && *m <= T::one())) {
            return Err(Error::Validation(format!("severity at frame {t} is outside [0, 1]")));
        }
        Ok(())
    }
}

/// Weights of the frequency, severity and persistence terms, with an optional constant
/// offset used by the self-collision metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AggregationWeights<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<T>,
}

impl<T: Real> AggregationWeights<T> {
    /// Normalizes `(alpha, beta, gamma)` to unit sum.
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        Self::normalized(alpha, beta, gamma, None)
    }

    /// Normalizes `(alpha, beta, gamma, delta)` to unit sum.
    pub fn with_delta(alpha: T, beta: T, gamma: T, delta: T) -> Result<Self> {
        Self::normalized(alpha, beta, gamma, Some(delta))
    }

    fn normalized(alpha: T, beta: T, gamma: T, delta: Option<T>) -> Result<Self> {
        let parts = [alpha, beta, gamma, delta.unwrap_or_else(T::zero)];
        if parts.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(Error::Config("aggregation weights must be finite and nonnegative".into()));
        }
        let sum = parts.iter().fold(T::zero(), |a, &b| a + b);
        if sum <= T::zero() {
            return Err(Error::Config("aggregation weights must have a positive sum".into()));
        }
        Ok(Self { alpha: alpha / sum, beta: beta / sum, gamma: gamma / sum, delta: delta.map(|d| d / sum) })
    }

    /// Shared default `(0.5, 0.3, 0.2)`.
    pub fn standard() -> Self {
        Self { alpha: T::lit(0.5), beta: T::lit(0.3), gamma: T::lit(0.2), delta: None }
    }

    /// Self-collision default `(0.45, 0.25, 0.15, 0.15)`: severe and persistent terms dominate
    /// and `alpha > delta`.
    pub fn collision() -> Self {
        Self { alpha: T::lit(0.45), beta: T::lit(0.25), gamma: T::lit(0.15), delta: Some(T::lit(0.15)) }
    }

    pub fn sum(&self) -> T {
        self.alpha + self.beta + self.gamma + self.delta.unwrap_or_else(T::zero)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.alpha, self.beta, self.gamma, self.delta.unwrap_or_else(T::zero)];
        if parts.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(Error::Config("aggregation weights must be finite and nonnegative".into()));
        }
        if (self.sum() - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::Config(format!("aggregation weights must sum to 1, got {}", self.sum())));
        }
        Ok(())
    }
}

impl<T: Real> Default for AggregationWeights<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// Frequency `r`, severity `s` and persistence `p` over the valid frames.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Rsp<T> {
    pub r: T,
    pub s: T,
    pub p: T,
}

/// Result of scoring one metric on one video.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MetricScore<T> {
    pub metric: MetricId,
    /// Frequency term entering `D`; for self collision this is the severe-frame rate.
    /// `None` for bone length, which is scored directly from the mean error.
    pub r: Option<T>,
    pub s: Option<T>,
    pub p: Option<T>,
    #[serde(rename = "D")]
    pub d: T,
    pub score: T,
}

impl<T: Real> MetricScore<T> {
    /// Builds a score whose value is `100 (1 - clip(d, 0, 1))`.
    pub fn from_penalty(metric: MetricId, rsp: Option<Rsp<T>>, d: T) -> Self {
        Self {
            metric,
            r: rsp.map(|x| x.r),
            s: rsp.map(|x| x.s),
            p: rsp.map(|x| x.p),
            d,
            score: penalty_to_score(d),
        }
    }
}

/// `100 (1 - clip(d, 0, 1))`.
pub fn penalty_to_score<T: Real>(d: T) -> T {
    T::lit(100.0) * (T::one() - d.clamp_unit())
}

/// Longest run of consecutive flagged frames. Invalid frames break a run.
pub fn longest_abnormal_run(flags: &[bool], valid: &[bool]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (&b, &v) in flags.iter().zip(valid) {
        if b && v {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Frequency, severity and persistence over the valid frames only:
/// `r = Σb / T_valid`, `s = Σm / max(1, Σb)`, `p = L_max / T_valid`.
pub fn aggregate_rsp<T: Real>(signals: &FrameSignals<T>, valid: &[bool]) -> Result<Rsp<T>> {
    signals.validate()?;
    if valid.len() != signals.len() {
        return Err(Error::Validation(format!(
            "validity mask has {} frames, signals have {}",
            valid.len(),
            signals.len()
        )));
    }
    let valid_frames = valid.iter().filter(|v| **v).count();
    if valid_frames == 0 {
        return Err(Error::NoData("no valid frames to aggregate".into()));
    }
    let mut flagged = 0usize;
    let mut severity = T::zero();
    for ((&b, &m), &v) in signals.flags.iter().zip(&signals.severity).zip(valid) {
        if v {
            flagged += usize::from(b);
            severity = severity + m;
        }
    }
    let n = T::from_usize_lossy(valid_frames);
    Ok(Rsp {
        r: T::from_usize_lossy(flagged) / n,
        s: severity / T::from_usize_lossy(flagged.max(1)),
        p: T::from_usize_lossy(longest_abnormal_run(&signals.flags, valid)) / n,
    })
}

/// Combines `(r, s, p)` into a metric score.
///
/// Without `severe_rate`: `D = αr + βs + γp`. With it (self collision):
/// `D = α·severe_rate + βs + γp + δ`, where `δ` only applies when at least one frame is
/// flagged (`r > 0`), so collision-free videos can still reach 100.
pub fn final_score<T: Real>(
    metric: MetricId,
    rsp: Rsp<T>,
    weights: &AggregationWeights<T>,
    severe_rate: Option<T>,
) -> Result<MetricScore<T>> {
    weights.validate()?;
    let (r, d) = match severe_rate {
        None => (rsp.r, weights.alpha * rsp.r + weights.beta * rsp.s + weights.gamma * rsp.p),
        Some(severe) => {
            let offset = if rsp.r > T::zero() { weights.delta.unwrap_or_else(T::zero) } else { T::zero() };
            (severe, weights.alpha * severe + weights.beta * rsp.s + weights.gamma * rsp.p + offset)
        }
    };
    Ok(MetricScore::from_penalty(metric, Some(Rsp { r, ..rsp }), d))
}

/// Per-dimension averages and the overall score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DimensionScores<T> {
    pub anatomy_avg: T,
    pub kinematic_avg: T,
    pub kinetic_avg: T,
    pub overall: T,
}

/// Each dimension is the mean of its two metrics; overall is the mean of the three dimensions.
pub fn dimension_and_overall<T: Real>(scores: &BTreeMap<MetricId, T>) -> Result<DimensionScores<T>> {
    let get = |m: MetricId| scores.get(&m).copied().ok_or(Error::IncompleteScore(m));
    let half = T::lit(0.5);
    let anatomy_avg = (get(MetricId::I)? + get(MetricId::II)?) * half;
    let kinematic_avg = (get(MetricId::III)? + get(MetricId::IV)?) * half;
    let kinetic_avg = (get(MetricId::V)? + get(MetricId::VI)?) * half;
    Ok(DimensionScores {
        anatomy_avg,
        kinematic_avg,
        kinetic_avg,
        overall: (anatomy_avg + kinematic_avg + kinetic_avg) / T::lit(3.0),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn sig(b: &[u8], m: &[f64]) -> FrameSignals<f64> {
        FrameSignals::new(b.iter().map(|&x| x == 1).collect(), m.to_vec()).unwrap()
    }

    #[test]
    fn longest_run_examples() {
        let all = [true; 6];
        let b = [false, true, true, true, false, true];
        assert_eq!(longest_abnormal_run(&b, &all), 3);
        assert_eq!(longest_abnormal_run(&[false; 4], &[true; 4]), 0);
        assert_eq!(longest_abnormal_run(&[true; 4], &[true, true, false, true]), 2);
        assert_eq!(longest_abnormal_run(&[], &[]), 0);
    }

    #[test]
    fn hand_computed_rsp() {
        let s = sig(&[0, 0, 1, 1, 1, 0, 0, 1, 0, 0], &[0.0, 0.0, 0.2, 0.5, 0.3, 0.0, 0.0, 0.4, 0.0, 0.0]);
        let rsp = aggregate_rsp(&s, &[true; 10]).unwrap();
        // Independent scalar recomputation: 4 flags of 10, severities sum 1.4 over 4 flags, run of 3.
        assert!((rsp.r - 4.0 / 10.0).abs() < 1e-12);
        assert!((rsp.s - 1.4 / 4.0).abs() < 1e-12);
        assert!((rsp.p - 3.0 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn saturation_and_zero() {
        let zero = aggregate_rsp(&FrameSignals::<f64>::zeros(5), &[true; 5]).unwrap();
        assert_eq!((zero.r, zero.s, zero.p), (0.0, 0.0, 0.0));
        let full = aggregate_rsp(&sig(&[1; 5], &[1.0; 5]), &[true; 5]).unwrap();
        assert_eq!((full.r, full.s, full.p), (1.0, 1.0, 1.0));
    }

    #[test]
    fn invalid_frames_are_excluded() {
        let s = sig(&[1, 1, 0, 0], &[0.5, 0.5, 0.0, 0.0]);
        let rsp = aggregate_rsp(&s, &[false, true, true, true]).unwrap();
        assert!((rsp.r - 1.0 / 3.0).abs() < 1e-12);
        assert!((rsp.s - 0.5).abs() < 1e-12);
        assert!(matches!(aggregate_rsp(&s, &[false; 4]), Err(Error::NoData(_))));
    }

    #[test]
    fn final_score_examples() {
        let w = AggregationWeights::<f64>::standard();
        let sc = final_score(MetricId::I, Rsp { r: 0.4, s: 0.35, p: 0.3 }, &w, None).unwrap();
        assert!((sc.d - 0.365).abs() < 1e-12);
        assert!((sc.score - 63.5).abs() < 1e-9);
        let zero = final_score(MetricId::I, Rsp { r: 0.0, s: 0.0, p: 0.0 }, &w, None).unwrap();
        assert_eq!(zero.score, 100.0);
        let one = final_score(MetricId::I, Rsp { r: 1.0, s: 1.0, p: 1.0 }, &w, None).unwrap();
        assert!((one.d - 1.0).abs() < 1e-12);
        assert!(one.score.abs() < 1e-9);
    }

    #[test]
    fn collision_offset_needs_a_flagged_frame() {
        let w = AggregationWeights::<f64>::collision();
        let clean = final_score(MetricId::IV, Rsp { r: 0.0, s: 0.0, p: 0.0 }, &w, Some(0.0)).unwrap();
        assert_eq!(clean.score, 100.0);
        let mild = final_score(MetricId::IV, Rsp { r: 0.1, s: 0.5, p: 0.1 }, &w, Some(0.0)).unwrap();
        assert!((mild.d - (0.25 * 0.5 + 0.15 * 0.1 + 0.15)).abs() < 1e-12);
        let all = final_score(MetricId::IV, Rsp { r: 1.0, s: 1.0, p: 1.0 }, &w, Some(1.0)).unwrap();
        assert!(all.score.abs() < 1e-9);
    }

    #[test]
    fn bad_weights_are_config_errors() {
        assert!(matches!(AggregationWeights::new(-1.0, 1.0, 1.0), Err(Error::Config(_))));
        assert!(matches!(AggregationWeights::new(0.0, 0.0, 0.0), Err(Error::Config(_))));
        let unnormalized = AggregationWeights { alpha: 1.0, beta: 1.0, gamma: 1.0, delta: None };
        assert!(matches!(
            final_score(MetricId::I, Rsp { r: 0.0, s: 0.0, p: 0.0 }, &unnormalized, None),
            Err(Error::Config(_))
        ));
        let w = AggregationWeights::<f64>::with_delta(9.0, 5.0, 3.0, 3.0).unwrap();
        assert!((w.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_averages() {
        let scores: BTreeMap<MetricId, f64> = MetricId::ALL.iter().copied().zip([89.3, 92.6, 82.4, 90.3, 95.2, 94.9]).collect();
        let d = dimension_and_overall(&scores).unwrap();
        assert!((d.anatomy_avg - 90.95).abs() < 1e-9);
        assert!((d.kinematic_avg - 86.35).abs() < 1e-9);
        assert!((d.kinetic_avg - 95.05).abs() < 1e-9);
        assert!((crate::scalar::round1(d.overall) - 90.8).abs() < 1e-9);

        let mut missing = scores.clone();
        missing.remove(&MetricId::IV);
        assert!(matches!(dimension_and_overall(&missing), Err(Error::IncompleteScore(MetricId::IV))));
    }

    fn signals_strategy() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
        (1usize..40).prop_flat_map(|n| (prop::collection::vec(any::<bool>(), n), prop::collection::vec(0.0..=1.0f64, n)))
    }

    proptest! {
        #[test]
        fn score_stays_in_bounds((b, m) in signals_strategy()) {
            let valid = vec![true; b.len()];
            let rsp = aggregate_rsp(&FrameSignals::new(b, m).unwrap(), &valid).unwrap();
            let sc = final_score(MetricId::III, rsp, &AggregationWeights::standard(), None).unwrap();
            prop_assert!((0.0..=100.0).contains(&sc.score));
        }

        #[test]
        fn raising_severity_never_raises_score((b, m) in signals_strategy(), idx in any::<prop::sample::Index>(), bump in 0.0..1.0f64) {
            let valid = vec![true; b.len()];
            let w = AggregationWeights::standard();
            let base = final_score(MetricId::III, aggregate_rsp(&FrameSignals::new(b.clone(), m.clone()).unwrap(), &valid).unwrap(), &w, None).unwrap();
            let mut m2 = m;
            let i = idx.index(m2.len());
            m2[i] = (m2[i] + bump).min(1.0);
            let raised = final_score(MetricId::III, aggregate_rsp(&FrameSignals::new(b, m2).unwrap(), &valid).unwrap(), &w, None).unwrap();
            prop_assert!(raised.score <= base.score + 1e-9);
        }

        #[test]
        fn flagging_a_frame_never_lowers_r_or_p((b, m) in signals_strategy(), idx in any::<prop::sample::Index>()) {
            let valid = vec![true; b.len()];
            let base = aggregate_rsp(&FrameSignals::new(b.clone(), m.clone()).unwrap(), &valid).unwrap();
            let mut b2 = b;
            b2[idx.index(m.len())] = true;
            let flipped = aggregate_rsp(&FrameSignals::new(b2, m).unwrap(), &valid).unwrap();
            prop_assert!(flipped.r >= base.r);
            prop_assert!(flipped.p >= base.p);
        }

        #[test]
        fn frequency_only_weights_give_one_minus_r((b, m) in signals_strategy()) {
            let valid = vec![true; b.len()];
            let rsp = aggregate_rsp(&FrameSignals::new(b, m).unwrap(), &valid).unwrap();
            let w = AggregationWeights::new(1.0, 0.0, 0.0).unwrap();
            let sc = final_score(MetricId::I, rsp, &w, None).unwrap();
            prop_assert_eq!(sc.score, 100.0 * (1.0 - rsp.r));
        }
    }
}
