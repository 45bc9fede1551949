//! Scoring configuration, the per-video scoring pipeline and its output record.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregation::{dimension_and_overall, AggregationWeights, FrameSignals, MetricId, MetricScore};
use crate::anatomy::{
    bone_length_errors, extra_limb_signals, score_bone_length, score_extra_limbs, BoneError, BoneLengthConfig,
    ExtraLimbConfig,
};
use crate::error::{Error, Result};
use crate::kinematic::{
    collision_signals_from_fractions, mesh_face_fractions, rom_signals, score_rom, score_self_collision,
    CollisionConfig, CollisionSignals, RomConfig,
};
use crate::kinetic::{
    extremes_signals, score_extremes, score_smoothness, smoothness_signals, ExtremesConfig, SmoothnessConfig,
};
use crate::motion::{Difficulty, Intensity, LimitTable, MotionBundle, SkeletonDefinition};
use crate::scalar::Real;

/// Every threshold and weight used by the six metrics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct ScoringConfig<T> {
    /// Aggregation weights for metrics I, III, V and VI.
    pub weights: AggregationWeights<T>,
    /// Aggregation weights, including the offset, for metric IV.
    pub collision_weights: AggregationWeights<T>,
    pub extra_limb: ExtraLimbConfig<T>,
    pub bone_length: BoneLengthConfig<T>,
    pub rom: RomConfig<T>,
    pub collision: CollisionConfig<T>,
    pub extremes: ExtremesConfig<T>,
    pub smoothness: SmoothnessConfig<T>,
}

impl<T: Real> Default for ScoringConfig<T> {
    fn default() -> Self {
        Self {
            weights: AggregationWeights::standard(),
            collision_weights: AggregationWeights::collision(),
            extra_limb: ExtraLimbConfig::default(),
            bone_length: BoneLengthConfig::default(),
            rom: RomConfig::default(),
            collision: CollisionConfig::default(),
            extremes: ExtremesConfig::default(),
            smoothness: SmoothnessConfig::default(),
        }
    }
}

impl<T: Real> ScoringConfig<T> {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(Error::from_json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if self.weights.delta.is_some() {
            return Err(Error::Config("the shared weights take no offset term".into()));
        }
        self.collision_weights.validate()?;
        self.extra_limb.validate()?;
        if !(self.bone_length.tolerance > T::zero() && self.bone_length.tolerance.is_finite()) {
            return Err(Error::Config("bone-length tolerance must be positive".into()));
        }
        if !(self.bone_length.epsilon >= T::zero()) {
            return Err(Error::Config("bone-length epsilon must be nonnegative".into()));
        }
        self.rom.validate()?;
        self.collision.validate()?;
        self.extremes.validate()?;
        self.smoothness.validate()
    }

    /// Tolerances scaled by `factor`: the ROM tolerance, both detector and collision ramp
    /// thresholds and the bone-length tolerance. Flag thresholds on the normalized severity
    /// and the collision noise filter are unchanged. Limit tables scale separately through
    /// [`LimitTable::scaled`].
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor.is_finite() && factor > T::zero()) {
            return Err(Error::Config(format!("tolerance scale must be positive, got {factor}")));
        }
        let mut out = *self;
        out.rom.tol = self.rom.tol * factor;
        out.extra_limb.tau_mild = self.extra_limb.tau_mild * factor;
        out.extra_limb.tau_severe = self.extra_limb.tau_severe * factor;
        out.collision.tau_mild = self.collision.tau_mild * factor;
        out.collision.tau_severe = self.collision.tau_severe * factor;
        out.bone_length.tolerance = self.bone_length.tolerance * factor;
        Ok(out)
    }

    /// Replaces `(alpha, beta, gamma)` of the shared weights, and rescales those of the
    /// collision weights by `1 - delta` so the offset keeps its share.
    pub fn with_weights(&self, alpha: T, beta: T, gamma: T) -> Result<Self> {
        let mut out = *self;
        out.weights = AggregationWeights::new(alpha, beta, gamma)?;
        let delta = self.collision_weights.delta.unwrap_or_else(T::zero);
        let keep = T::one() - delta;
        out.collision_weights = AggregationWeights {
            alpha: out.weights.alpha * keep,
            beta: out.weights.beta * keep,
            gamma: out.weights.gamma * keep,
            delta: self.collision_weights.delta,
        };
        out.validate()?;
        Ok(out)
    }
}

/// Per-frame signals of every metric for one video, before aggregation.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation<T> {
    pub video_id: String,
    pub model_id: String,
    pub prompt_id: String,
    pub difficulty: Difficulty,
    pub intensity: Intensity,
    pub valid: Vec<bool>,
    pub extra_limb: FrameSignals<T>,
    pub bone_errors: Vec<BoneError<T>>,
    pub rom: FrameSignals<T>,
    pub collision: CollisionSignals<T>,
    pub extremes: FrameSignals<T>,
    pub smoothness: FrameSignals<T>,
}

impl<T: Real> Evaluation<T> {
    /// Aggregates the stored signals into a score record under `cfg`'s weights and
    /// bone-length tolerance.
    pub fn score(&self, cfg: &ScoringConfig<T>) -> Result<VideoScore<T>> {
        let w = &cfg.weights;
        let metric_i = score_extra_limbs(&self.extra_limb, &self.valid, w)?;
        let metric_ii = score_bone_length(&self.bone_errors, cfg.bone_length.tolerance)?;
        let metric_iii = score_rom(&self.rom, &self.valid, w)?;
        let metric_iv =
            score_self_collision(&self.collision.signals, self.collision.severe_rate, &self.valid, &cfg.collision_weights)?;
        let metric_v = score_extremes(&self.extremes, &self.valid, w)?;
        let metric_vi = score_smoothness(&self.smoothness, &self.valid, w)?;
        VideoScore::assemble(
            self.video_id.clone(),
            self.model_id.clone(),
            Some(self.prompt_id.clone()),
            Some(self.difficulty),
            Some(self.intensity),
            [metric_i, metric_ii, metric_iii, metric_iv, metric_v, metric_vi],
        )
    }
}

/// Per-video score record.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct VideoScore<T> {
    pub video_id: String,
    pub model_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difficulty: Option<Difficulty>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<Intensity>,
    pub metric_I: MetricScore<T>,
    pub metric_II: MetricScore<T>,
    pub metric_III: MetricScore<T>,
    pub metric_IV: MetricScore<T>,
    pub metric_V: MetricScore<T>,
    pub metric_VI: MetricScore<T>,
    pub anatomy_avg: T,
    pub kinematic_avg: T,
    pub kinetic_avg: T,
    pub overall: T,
}

impl<T: Real> VideoScore<T> {
    #[allow(non_snake_case)]
    pub fn assemble(
        video_id: String,
        model_id: String,
        prompt_id: Option<String>,
        difficulty: Option<Difficulty>,
        intensity: Option<Intensity>,
        metrics: [MetricScore<T>; 6],
    ) -> Result<Self> {
        for (m, id) in metrics.iter().zip(MetricId::ALL) {
            if m.metric != id {
                return Err(Error::Validation(format!("metric {} given in the slot of {id}", m.metric)));
            }
        }
        let map: BTreeMap<MetricId, T> = metrics.iter().map(|m| (m.metric, m.score)).collect();
        let dims = dimension_and_overall(&map)?;
        let [metric_I, metric_II, metric_III, metric_IV, metric_V, metric_VI] = metrics;
        Ok(Self {
            video_id,
            model_id,
            prompt_id,
            difficulty,
            intensity,
            metric_I,
            metric_II,
            metric_III,
            metric_IV,
            metric_V,
            metric_VI,
            anatomy_avg: dims.anatomy_avg,
            kinematic_avg: dims.kinematic_avg,
            kinetic_avg: dims.kinetic_avg,
            overall: dims.overall,
        })
    }

    pub fn metric(&self, id: MetricId) -> &MetricScore<T> {
        match id {
            MetricId::I => &self.metric_I,
            MetricId::II => &self.metric_II,
            MetricId::III => &self.metric_III,
            MetricId::IV => &self.metric_IV,
            MetricId::V => &self.metric_V,
            MetricId::VI => &self.metric_VI,
        }
    }

    /// The six metric scores in order I..VI.
    pub fn scores(&self) -> [T; 6] {
        MetricId::ALL.map(|m| self.metric(m).score)
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(Error::from_json)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from_json)
    }
}

/// Colliding-face fractions of a bundle's meshes. They depend only on geometry and the noise
/// filter, so sweeps that change thresholds or weights can reuse them.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry<T> {
    pub face_fraction: Vec<T>,
}

/// Scores bundles against one skeleton, limit table and configuration.
#[derive(Clone, Debug)]
pub struct Engine<T> {
    skeleton: SkeletonDefinition<T>,
    limits: LimitTable<T>,
    config: ScoringConfig<T>,
}

impl<T: Real> Engine<T> {
    pub fn new(skeleton: SkeletonDefinition<T>, limits: LimitTable<T>, config: ScoringConfig<T>) -> Result<Self> {
        skeleton.validate()?;
        limits.check_against(&skeleton)?;
        config.validate()?;
        Ok(Self { skeleton, limits, config })
    }

    /// Engine with the bundled skeleton, limits and default configuration.
    pub fn with_defaults() -> Self {
        Self::new(crate::motion::default_skeleton(), crate::motion::default_limits(), ScoringConfig::default())
            .expect("bundled defaults are consistent")
    }

    pub fn skeleton(&self) -> &SkeletonDefinition<T> {
        &self.skeleton
    }

    pub fn limits(&self) -> &LimitTable<T> {
        &self.limits
    }

    pub fn config(&self) -> &ScoringConfig<T> {
        &self.config
    }

    /// Same skeleton with other limits and configuration.
    pub fn reconfigured(&self, limits: LimitTable<T>, config: ScoringConfig<T>) -> Result<Self> {
        Self::new(self.skeleton.clone(), limits, config)
    }

    /// Engine whose tolerances and limit table are scaled by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        self.reconfigured(self.limits.scaled(factor)?, self.config.scaled(factor)?)
    }

    pub fn geometry(&self, bundle: &MotionBundle<T>) -> Result<Geometry<T>> {
        let meshes = bundle.meshes.as_deref().ok_or(Error::IncompleteScore(MetricId::IV))?;
        Ok(Geometry { face_fraction: mesh_face_fractions(meshes, &self.config.collision)? })
    }

    /// Per-frame signals of all six metrics.
    pub fn evaluate(&self, bundle: &MotionBundle<T>) -> Result<Evaluation<T>> {
        bundle.validate(&self.skeleton)?;
        let geometry = self.geometry(bundle)?;
        self.evaluate_with(bundle, &geometry)
    }

    /// As [`Engine::evaluate`], reusing precomputed collision geometry.
    pub fn evaluate_with(&self, bundle: &MotionBundle<T>, geometry: &Geometry<T>) -> Result<Evaluation<T>> {
        let cfg = &self.config;
        let frames = bundle.frame_count();
        Ok(Evaluation {
            video_id: bundle.video_id.clone(),
            model_id: bundle.model_or_default().to_owned(),
            prompt_id: bundle.prompt_or_video().to_owned(),
            difficulty: bundle.difficulty,
            intensity: bundle.intensity,
            valid: bundle.valid.clone(),
            extra_limb: extra_limb_signals(bundle.detections.as_deref(), frames, &cfg.extra_limb)?,
            bone_errors: bone_length_errors(&bundle.keypoints, &self.skeleton.bones, &bundle.valid, &cfg.bone_length)?,
            rom: rom_signals(&bundle.joint_angles, &self.limits, &cfg.rom)?,
            collision: collision_signals_from_fractions(geometry.face_fraction.clone(), &bundle.valid, &cfg.collision)?,
            extremes: extremes_signals(bundle, &self.skeleton, &self.limits, &cfg.extremes)?,
            smoothness: smoothness_signals(bundle, &self.limits, &cfg.smoothness)?,
        })
    }

    pub fn score(&self, bundle: &MotionBundle<T>) -> Result<VideoScore<T>> {
        self.evaluate(bundle)?.score(&self.config)
    }

    /// Scores every bundle in parallel; results keep the input order.
    pub fn score_all(&self, bundles: &[MotionBundle<T>]) -> Vec<Result<VideoScore<T>>> {
        bundles.par_iter().map(|b| self.score(b)).collect()
    }
}
