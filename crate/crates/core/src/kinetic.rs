//! Kinetic metrics: kinematic extremes (V) and motion smoothness (VI).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregation::{aggregate_rsp, final_score, AggregationWeights, FrameSignals, MetricId, MetricScore};
use crate::error::{Error, Result};
use crate::motion::{central_difference, segment_com_velocities, LimitTable, MotionBundle, SkeletonDefinition};
use crate::scalar::Real;

/// `min{1, max(0, value/limit - 1) / norm}`.
pub fn excess_ratio<T: Real>(value: T, limit: T, norm: T) -> Result<T> {
    if !(limit > T::zero()) {
        return Err(Error::Config(format!("limit must be positive, got {limit}")));
    }
    Ok(((value / limit - T::one()).max(T::zero()) / norm).min(T::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct ExtremesConfig<T> {
    pub flag_threshold: T,
    pub excess_norm: T,
}

impl<T: Real> Default for ExtremesConfig<T> {
    fn default() -> Self {
        Self { flag_threshold: T::lit(0.05), excess_norm: T::lit(0.5) }
    }
}

impl<T: Real> ExtremesConfig<T> {
    pub fn validate(&self) -> Result<()> {
        check_threshold_and_norm(self.flag_threshold, self.excess_norm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct SmoothnessConfig<T> {
    /// Odd number of centered frames accumulated into the jerk energy.
    pub jerk_window: usize,
    pub flag_threshold: T,
    pub excess_norm: T,
}

impl<T: Real> Default for SmoothnessConfig<T> {
    fn default() -> Self {
        Self { jerk_window: 5, flag_threshold: T::lit(0.05), excess_norm: T::lit(0.5) }
    }
}

impl<T: Real> SmoothnessConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.jerk_window < 3 || self.jerk_window.is_multiple_of(2) {
            return Err(Error::Config(format!("jerk window must be odd and >= 3, got {}", self.jerk_window)));
        }
        check_threshold_and_norm(self.flag_threshold, self.excess_norm)
    }
}

fn check_threshold_and_norm<T: Real>(threshold: T, norm: T) -> Result<()> {
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(Error::Config(format!("flag threshold must lie in (0, 1), got {threshold}")));
    }
    if !(norm > T::zero() && norm.is_finite()) {
        return Err(Error::Config(format!("excess normalization must be positive, got {norm}")));
    }
    Ok(())
}

fn weighted_mean<T: Real>(pairs: impl Iterator<Item = (T, T)>) -> T {
    let (num, den) = pairs.fold((T::zero(), T::zero()), |(n, d), (x, w)| (n + x * w, d + w));
    if den > T::zero() {
        num / den
    } else {
        T::zero()
    }
}

fn check_bundle<T: Real>(bundle: &MotionBundle<T>, limits: &LimitTable<T>) -> Result<()> {
    if let Some(t) = bundle.joint_angles.iter().position(|row| row.len() != limits.dofs.len()) {
        return Err(Error::Schema(format!(
            "frame {t} has {} angles, limit table {} DoFs",
            bundle.joint_angles[t].len(),
            limits.dofs.len()
        )));
    }
    if limits.dofs.is_empty() {
        return Err(Error::NoData("limit table has no DoFs".into()));
    }
    Ok(())
}

/// `T x DoF` angular velocities in deg/s.
fn angular_velocities<T: Real>(bundle: &MotionBundle<T>, dofs: usize) -> Result<Vec<Vec<T>>> {
    let dt = bundle.dt();
    (0..dofs).into_par_iter().map(|d| central_difference(&bundle.angle_series(d), dt)).collect()
}

/// Per-frame extremes signals: the mean of the weighted joint and body excess ratios.
pub fn extremes_signals<T: Real>(
    bundle: &MotionBundle<T>,
    skeleton: &SkeletonDefinition<T>,
    limits: &LimitTable<T>,
    cfg: &ExtremesConfig<T>,
) -> Result<FrameSignals<T>> {
    cfg.validate()?;
    check_bundle(bundle, limits)?;
    let omega = angular_velocities(bundle, limits.dofs.len())?;
    let speeds = segment_com_velocities(bundle, skeleton)?;
    if speeds.first().is_some_and(|row| row.len() != limits.segments.len()) {
        return Err(Error::Schema("limit table segment rows do not match the skeleton".into()));
    }
    let norm = cfg.excess_norm;
    let frames = bundle.frame_count();
    let mut flags = Vec::with_capacity(frames);
    let mut severity = Vec::with_capacity(frames);
    for t in 0..frames {
        let joint = limits
            .dofs
            .iter()
            .zip(&omega)
            .map(|(l, w)| Ok((excess_ratio(w[t].abs(), l.angular_velocity_max, norm)?, l.weight)))
            .collect::<Result<Vec<_>>>()?;
        let body = limits
            .segments
            .iter()
            .zip(&speeds[t])
            .map(|(l, &v)| Ok((excess_ratio(v, l.linear_velocity_max, norm)?, l.weight)))
            .collect::<Result<Vec<_>>>()?;
        let m = (T::lit(0.5) * (weighted_mean(joint.into_iter()) + weighted_mean(body.into_iter()))).clamp_unit();
        flags.push(m > cfg.flag_threshold);
        severity.push(m);
    }
    FrameSignals::new(flags, severity)
}

pub fn score_extremes<T: Real>(
    signals: &FrameSignals<T>,
    valid: &[bool],
    weights: &AggregationWeights<T>,
) -> Result<MetricScore<T>> {
    final_score(MetricId::V, aggregate_rsp(signals, valid)?, weights, None)
}

/// Angular acceleration and windowed squared jerk for one DoF.
///
/// `α = d ω/dt` and `J = d α/dt` by central differences; `E_J(t)` sums `J_u²` over the
/// `window` frames centered on `t`, truncated at the sequence ends.
pub fn jerk_energy<T: Real>(angular_velocity: &[T], dt: T, window: usize) -> Result<(Vec<T>, Vec<T>)> {
    if window.is_multiple_of(2) {
        return Err(Error::Config(format!("jerk window must be odd, got {window}")));
    }
    let n = angular_velocity.len();
    if n < window.max(2) {
        return Err(Error::InsufficientData(format!("jerk energy needs at least {window} frames, got {n}")));
    }
    let alpha = central_difference(angular_velocity, dt)?;
    let jerk = central_difference(&alpha, dt)?;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(T::zero());
    for j in &jerk {
        let last = *prefix.last().expect("nonempty");
        prefix.push(last + *j * *j);
    }
    let half = window / 2;
    let energy = (0..n)
        .map(|t| {
            let lo = t.saturating_sub(half);
            let hi = (t + half + 1).min(n);
            prefix[hi] - prefix[lo]
        })
        .collect();
    Ok((alpha, energy))
}

/// Per-frame smoothness signals: weighted mean over DoFs of the averaged acceleration and
/// jerk-energy excess ratios.
pub fn smoothness_signals<T: Real>(
    bundle: &MotionBundle<T>,
    limits: &LimitTable<T>,
    cfg: &SmoothnessConfig<T>,
) -> Result<FrameSignals<T>> {
    cfg.validate()?;
    check_bundle(bundle, limits)?;
    let dt = bundle.dt();
    let omega = angular_velocities(bundle, limits.dofs.len())?;
    let per_dof = omega
        .par_iter()
        .map(|w| jerk_energy(w, dt, cfg.jerk_window))
        .collect::<Result<Vec<_>>>()?;
    let norm = cfg.excess_norm;
    let half = T::lit(0.5);
    let frames = bundle.frame_count();
    let mut flags = Vec::with_capacity(frames);
    let mut severity = Vec::with_capacity(frames);
    for t in 0..frames {
        let terms = limits
            .dofs
            .iter()
            .zip(&per_dof)
            .map(|(l, (alpha, energy))| {
                let q = excess_ratio(alpha[t].abs(), l.angular_acceleration_max, norm)?;
                let r = excess_ratio(energy[t], l.jerk_energy_max, norm)?;
                Ok(((q + r) * half, l.weight))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = weighted_mean(terms.into_iter()).clamp_unit();
        flags.push(m > cfg.flag_threshold);
        severity.push(m);
    }
    FrameSignals::new(flags, severity)
}

pub fn score_smoothness<T: Real>(
    signals: &FrameSignals<T>,
    valid: &[bool],
    weights: &AggregationWeights<T>,
) -> Result<MetricScore<T>> {
    final_score(MetricId::VI, aggregate_rsp(signals, valid)?, weights, None)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn excess_ratio_knots() {
        assert_eq!(excess_ratio(150.0, 100.0, 0.5).unwrap(), 1.0);
        assert_eq!(excess_ratio(100.0, 100.0, 0.5).unwrap(), 0.0);
        assert_eq!(excess_ratio(125.0, 100.0, 0.5).unwrap(), 0.5);
        assert_eq!(excess_ratio(20.0, 100.0, 0.5).unwrap(), 0.0);
        assert!(matches!(excess_ratio(1.0, 0.0, 0.5), Err(Error::Config(_))));
    }

    #[test]
    fn constant_and_linear_velocity_have_no_jerk() {
        let (a, e) = jerk_energy(&[3.0; 20], 0.01, 5).unwrap();
        assert!(a.iter().chain(&e).all(|&x| x == 0.0));

        let lin: Vec<f64> = (0..30).map(|t| 2.0 * t as f64).collect();
        let (a, e) = jerk_energy(&lin, 0.1, 5).unwrap();
        assert!(a.iter().all(|&x| (x - 20.0).abs() < 1e-9));
        // Jerk is zero wherever the whole window avoids the two edge samples of α.
        for (t, x) in e.iter().enumerate().take(26).skip(4) {
            assert!(x.abs() < 1e-12, "frame {t}: {x}");
        }
    }

    #[test]
    fn sine_velocity_matches_analytic_jerk_energy() {
        // ω = sin(t) gives α = cos(t) and J = -sin(t), so E_J(t) ≈ Σ_{u ∈ W(t)} sin²(u).
        let dt = 0.01;
        let omega: Vec<f64> = (0..200).map(|i| (i as f64 * dt).sin()).collect();
        let (_, e) = jerk_energy(&omega, dt, 5).unwrap();
        for (t, x) in e.iter().enumerate().take(190).skip(10) {
            let analytic: f64 = (t - 2..=t + 2).map(|u| (u as f64 * dt).sin().powi(2)).sum();
            if analytic > 1e-3 {
                assert!((x - analytic).abs() / analytic < 0.01, "frame {t}: {x} vs {analytic}");
            }
        }
    }

    #[test]
    fn window_is_truncated_at_ends() {
        let omega: Vec<f64> = (0..12).map(|i| ((i * i) as f64).cos()).collect();
        let (alpha, e) = jerk_energy(&omega, 1.0, 5).unwrap();
        let jerk = central_difference(&alpha, 1.0).unwrap();
        let sq: Vec<f64> = jerk.iter().map(|j| j * j).collect();
        assert!((e[0] - (sq[0] + sq[1] + sq[2])).abs() < 1e-9);
        assert!((e[11] - (sq[9] + sq[10] + sq[11])).abs() < 1e-9);
        assert!((e[5] - sq[3..8].iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn jerk_energy_rejects_short_or_even() {
        assert!(matches!(jerk_energy(&[0.0; 4], 0.1, 5), Err(Error::InsufficientData(_))));
        assert!(matches!(jerk_energy(&[0.0; 10], 0.1, 4), Err(Error::Config(_))));
        assert!(SmoothnessConfig::<f64> { jerk_window: 1, ..Default::default() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn excess_ratio_is_monotone_and_bounded(a in 0.0..1000.0f64, b in 0.0..1000.0f64, lim in 1.0..500.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let rl = excess_ratio(lo, lim, 0.5).unwrap();
            let rh = excess_ratio(hi, lim, 0.5).unwrap();
            prop_assert!(rl <= rh);
            prop_assert!((0.0..=1.0).contains(&rl) && (0.0..=1.0).contains(&rh));
        }

        #[test]
        fn jerk_energy_is_time_reversal_symmetric(w in prop::collection::vec(-100.0..100.0f64, 8..40)) {
            // Reversal negates α and J; squared jerk and |α| are unchanged.
            let rev: Vec<f64> = w.iter().rev().map(|x| -x).collect();
            let (a, e) = jerk_energy(&w, 0.05, 5).unwrap();
            let (ar, er) = jerk_energy(&rev, 0.05, 5).unwrap();
            let n = w.len();
            for t in 0..n {
                prop_assert!((e[t] - er[n - 1 - t]).abs() <= 1e-6 * (1.0 + e[t].abs()));
                prop_assert!((a[t].abs() - ar[n - 1 - t].abs()).abs() <= 1e-9 * (1.0 + a[t].abs()));
            }
        }
    }
}
