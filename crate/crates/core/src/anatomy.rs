//! Anatomy metrics: extra limbs (I) and bone-length stability (II).

use serde::{Deserialize, Serialize};

use crate::aggregation::{aggregate_rsp, final_score, AggregationWeights, FrameSignals, MetricId, MetricScore};
use crate::error::{Error, Result};
use crate::motion::{BoneSpec, DETECTION_CLASSES};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct ExtraLimbConfig<T> {
    pub tau_mild: T,
    pub tau_severe: T,
}

impl<T: Real> Default for ExtraLimbConfig<T> {
    fn default() -> Self {
        Self { tau_mild: T::lit(0.005), tau_severe: T::lit(0.03) }
    }
}

impl<T: Real> ExtraLimbConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_mild >= T::zero() && self.tau_mild < self.tau_severe && self.tau_severe.is_finite()) {
            return Err(Error::Config("extra-limb thresholds need 0 <= tau_mild < tau_severe".into()));
        }
        Ok(())
    }
}

/// Two-threshold ramp: 0 at or below `mild`, 1 at or above `severe`, linear in between.
pub fn two_threshold_ramp<T: Real>(x: T, mild: T, severe: T) -> T {
    if x <= mild {
        T::zero()
    } else if x >= severe {
        T::one()
    } else {
        (x - mild) / (severe - mild)
    }
}

/// Per-frame extra-limb signals from the four-class detector confidences.
///
/// `detections = None` means the detector reported nothing, which is the same as zero
/// confidence at every frame.
pub fn extra_limb_signals<T: Real>(
    detections: Option<&[[T; DETECTION_CLASSES]]>,
    frames: usize,
    cfg: &ExtraLimbConfig<T>,
) -> Result<FrameSignals<T>> {
    cfg.validate()?;
    let Some(det) = detections else {
        return Ok(FrameSignals::zeros(frames));
    };
    if det.len() != frames {
        return Err(Error::Schema(format!("detections cover {} frames, bundle has {frames}", det.len())));
    }
    let mut flags = Vec::with_capacity(frames);
    let mut severity = Vec::with_capacity(frames);
    for row in det {
        if row.iter().any(|c| !(*c >= T::zero() && *c <= T::one())) {
            return Err(Error::Validation("confidence out of range".into()));
        }
        let peak = row.iter().fold(T::zero(), |a, &c| a.max(c));
        flags.push(peak > cfg.tau_mild);
        severity.push(two_threshold_ramp(peak, cfg.tau_mild, cfg.tau_severe));
    }
    FrameSignals::new(flags, severity)
}

pub fn score_extra_limbs<T: Real>(
    signals: &FrameSignals<T>,
    valid: &[bool],
    weights: &AggregationWeights<T>,
) -> Result<MetricScore<T>> {
    final_score(MetricId::I, aggregate_rsp(signals, valid)?, weights, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct BoneLengthConfig<T> {
    /// Mean relative error mapped to a zero score.
    pub tolerance: T,
    /// Bones with fewer valid frames are skipped.
    pub min_valid_frames: usize,
    pub epsilon: T,
}

impl<T: Real> Default for BoneLengthConfig<T> {
    fn default() -> Self {
        Self { tolerance: T::lit(0.15), min_valid_frames: 5, epsilon: T::lit(1e-8) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoneError<T> {
    pub bone: usize,
    /// Median length over valid frames.
    pub reference_length: T,
    /// Mean relative deviation from the reference length.
    pub mean_error: T,
}

/// Lower median: for an even count the smaller of the two middle values.
fn lower_median<T: Real>(values: &mut [T]) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite lengths"));
    values[(values.len() - 1) / 2]
}

/// Mean relative error of each bone's length against its median over the valid frames.
///
/// Bones observed in fewer than `cfg.min_valid_frames` valid frames are left out.
pub fn bone_length_errors<T: Real>(
    keypoints: &[Vec<[T; 3]>],
    bones: &[BoneSpec],
    valid: &[bool],
    cfg: &BoneLengthConfig<T>,
) -> Result<Vec<BoneError<T>>> {
    if keypoints.len() != valid.len() {
        return Err(Error::Validation(format!(
            "keypoints cover {} frames, validity mask {}",
            keypoints.len(),
            valid.len()
        )));
    }
    let valid_frames: Vec<usize> = (0..valid.len()).filter(|&t| valid[t]).collect();
    let mut out = Vec::new();
    if valid_frames.len() >= cfg.min_valid_frames.max(1) {
        for (bi, bone) in bones.iter().enumerate() {
            let [a, b] = bone.keypoints;
            let lengths = valid_frames
                .iter()
                .map(|&t| {
                    let frame = &keypoints[t];
                    let (pa, pb) = frame
                        .get(a)
                        .zip(frame.get(b))
                        .ok_or_else(|| Error::Schema(format!("bone '{}' references a missing keypoint", bone.name)))?;
                    let d = [pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]];
                    Ok((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt())
                })
                .collect::<Result<Vec<T>>>()?;
            let reference = lower_median(&mut lengths.clone());
            let denom = reference + cfg.epsilon;
            let total = lengths.iter().fold(T::zero(), |acc, &l| acc + (l - reference).abs() / denom);
            out.push(BoneError {
                bone: bi,
                reference_length: reference,
                mean_error: total / T::from_usize_lossy(lengths.len()),
            });
        }
    }
    if out.is_empty() {
        return Err(Error::NoData("no bone has enough valid frames".into()));
    }
    Ok(out)
}

/// `100 (1 - clip(Ē / τ, 0, 1))` with `Ē` the mean over bones.
pub fn score_bone_length<T: Real>(errors: &[BoneError<T>], tolerance: T) -> Result<MetricScore<T>> {
    if !(tolerance > T::zero() && tolerance.is_finite()) {
        return Err(Error::Config(format!("bone-length tolerance must be positive, got {tolerance}")));
    }
    if errors.is_empty() {
        return Err(Error::NoData("no bone errors to score".into()));
    }
    let sum = errors.iter().fold(T::zero(), |acc, e| acc + e.mean_error);
    let mean = sum / T::from_usize_lossy(errors.len());
    Ok(MetricScore::from_penalty(MetricId::II, None, mean / tolerance))
}
