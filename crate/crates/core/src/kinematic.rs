//! Kinematic metrics: joint range of motion (III) and self collision (IV).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregation::{aggregate_rsp, final_score, AggregationWeights, FrameSignals, MetricId, MetricScore};
use crate::error::{Error, Result};
use crate::geometry::{colliding_faces, NonLocalFilter};
use crate::motion::{LimitTable, MeshFrame};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct RomConfig<T> {
    /// Degrees added on both sides of every ROM interval.
    pub tol: T,
    pub flag_threshold: T,
    /// Weight of the mean in the per-frame mean/max blend across DoFs.
    pub cross_dof_mix: T,
}

impl<T: Real> Default for RomConfig<T> {
    fn default() -> Self {
        Self { tol: T::lit(15.0), flag_threshold: T::lit(0.05), cross_dof_mix: T::lit(0.5) }
    }
}

impl<T: Real> RomConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= T::zero() && self.tol.is_finite()) {
            return Err(Error::Config("ROM tolerance must be nonnegative".into()));
        }
        if !(self.flag_threshold > T::zero() && self.flag_threshold < T::one()) {
            return Err(Error::Config("ROM flag threshold must lie in (0, 1)".into()));
        }
        if !(self.cross_dof_mix >= T::zero() && self.cross_dof_mix <= T::one()) {
            return Err(Error::Config("cross-DoF mix must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Violation beyond the tolerance-relaxed interval, in degrees, and its ratio to the half
/// range, capped at 1.
pub fn rom_violation<T: Real>(theta: T, rom_min: T, rom_max: T, tol: T) -> (T, T) {
    let excess = (theta - (rom_max + tol)).max((rom_min - tol) - theta).max(T::zero());
    let half = T::lit(0.5) * (rom_max - rom_min);
    (excess, (excess / half).min(T::one()))
}

/// Per-frame ROM signals: `m_t = λ·mean + (1 − λ)·max` of the per-DoF ratios, flagged above
/// the threshold.
pub fn rom_signals<T: Real>(angles: &[Vec<T>], limits: &LimitTable<T>, cfg: &RomConfig<T>) -> Result<FrameSignals<T>> {
    cfg.validate()?;
    let n = limits.dofs.len();
    if n == 0 {
        return Err(Error::NoData("limit table has no DoFs".into()));
    }
    let lambda = cfg.cross_dof_mix;
    let mut flags = Vec::with_capacity(angles.len());
    let mut severity = Vec::with_capacity(angles.len());
    for (t, row) in angles.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Schema(format!("frame {t} has {} angles, limit table {n} DoFs", row.len())));
        }
        let mut sum = T::zero();
        let mut max = T::zero();
        for (theta, lim) in row.iter().zip(&limits.dofs) {
            let (_, ratio) = rom_violation(*theta, lim.rom_min, lim.rom_max, cfg.tol);
            sum = sum + ratio;
            max = max.max(ratio);
        }
        let m = (lambda * sum / T::from_usize_lossy(n) + (T::one() - lambda) * max).clamp_unit();
        flags.push(m > cfg.flag_threshold);
        severity.push(m);
    }
    FrameSignals::new(flags, severity)
}

pub fn score_rom<T: Real>(
    signals: &FrameSignals<T>,
    valid: &[bool],
    weights: &AggregationWeights<T>,
) -> Result<MetricScore<T>> {
    final_score(MetricId::III, aggregate_rsp(signals, valid)?, weights, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct CollisionConfig<T> {
    pub tau_mild: T,
    pub tau_severe: T,
    pub filter: NonLocalFilter<T>,
}

impl<T: Real> Default for CollisionConfig<T> {
    fn default() -> Self {
        Self { tau_mild: T::lit(0.01), tau_severe: T::lit(0.03), filter: NonLocalFilter::default() }
    }
}

impl<T: Real> CollisionConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_mild >= T::zero() && self.tau_mild < self.tau_severe && self.tau_severe.is_finite()) {
            return Err(Error::Config("collision thresholds need 0 <= tau_mild < tau_severe".into()));
        }
        if !(self.filter.min_fraction >= T::zero() && self.filter.min_fraction <= T::one()) {
            return Err(Error::Config("collision min_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionSignals<T> {
    pub signals: FrameSignals<T>,
    /// Fraction of valid frames with `M_t >= tau_severe`.
    pub severe_rate: T,
    /// Colliding-face fraction `M_t` per frame.
    pub face_fraction: Vec<T>,
}

/// Per-frame collision severity from the colliding-face fraction of every mesh frame.
pub fn collision_signals<T: Real>(
    meshes: &[MeshFrame<T>],
    valid: &[bool],
    cfg: &CollisionConfig<T>,
) -> Result<CollisionSignals<T>> {
    cfg.validate()?;
    if meshes.len() != valid.len() {
        return Err(Error::Schema(format!("{} mesh frames for {} frames", meshes.len(), valid.len())));
    }
    let face_fraction = mesh_face_fractions(meshes, cfg)?;
    collision_signals_from_fractions(face_fraction, valid, cfg)
}

/// Colliding-face fraction `M_t` of every mesh frame, computed in parallel. All frames must
/// share one topology.
pub fn mesh_face_fractions<T: Real>(meshes: &[MeshFrame<T>], cfg: &CollisionConfig<T>) -> Result<Vec<T>> {
    let first = meshes.first().ok_or_else(|| Error::NoData("no mesh frames".into()))?;
    if let Some(t) = meshes
        .iter()
        .position(|m| m.faces != first.faces || m.vertices.len() != first.vertices.len())
    {
        return Err(Error::Schema(format!("mesh frame {t} does not share the topology of frame 0")));
    }
    meshes.par_iter().map(|mesh| colliding_faces(mesh, &cfg.filter).map(|c| c.fraction)).collect()
}

/// Collision signals from precomputed face fractions.
pub fn collision_signals_from_fractions<T: Real>(
    face_fraction: Vec<T>,
    valid: &[bool],
    cfg: &CollisionConfig<T>,
) -> Result<CollisionSignals<T>> {
    cfg.validate()?;
    if face_fraction.len() != valid.len() {
        return Err(Error::Schema(format!("{} mesh frames for {} frames", face_fraction.len(), valid.len())));
    }
    let span = cfg.tau_severe - cfg.tau_mild;
    let severity: Vec<T> = face_fraction.iter().map(|&m| ((m - cfg.tau_mild) / span).clamp_unit()).collect();
    let flags = severity.iter().map(|&m| m > T::zero()).collect();
    let valid_count = valid.iter().filter(|v| **v).count();
    if valid_count == 0 {
        return Err(Error::NoData("no valid frames".into()));
    }
    let severe = face_fraction.iter().zip(valid).filter(|(m, v)| **v && **m >= cfg.tau_severe).count();
    Ok(CollisionSignals {
        signals: FrameSignals::new(flags, severity)?,
        severe_rate: T::from_usize_lossy(severe) / T::from_usize_lossy(valid_count),
        face_fraction,
    })
}

pub fn score_self_collision<T: Real>(
    signals: &FrameSignals<T>,
    severe_rate: T,
    valid: &[bool],
    weights: &AggregationWeights<T>,
) -> Result<MetricScore<T>> {
    final_score(MetricId::IV, aggregate_rsp(signals, valid)?, weights, Some(severe_rate))
}
