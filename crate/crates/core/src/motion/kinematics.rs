//! Finite differences and forward kinematics on segment centers of mass.

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::motion::bundle::MotionBundle;
use crate::motion::skeleton::SkeletonDefinition;
use crate::scalar::Real;

/// First derivative of a uniformly sampled series.
///
/// Interior samples use `(x[t+1] - x[t-1]) / (2 dt)`; the two endpoints use one-sided first
/// differences so the output stays frame-aligned with the input.
pub fn central_difference<T: Real>(series: &[T], dt: T) -> Result<Vec<T>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("differentiation needs at least 2 samples, got {n}")));
    }
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let two_dt = dt + dt;
    let mut out = Vec::with_capacity(n);
    out.push((series[1] - series[0]) / dt);
    out.extend(series.windows(3).map(|w| (w[2] - w[0]) / two_dt));
    out.push((series[n - 1] - series[n - 2]) / dt);
    Ok(out)
}

/// Per-segment COM positions (meters) for one frame.
///
/// `joint_angles_frame` holds the articulated DoFs in degrees; `root_pose` is three root
/// rotations in degrees followed by three root translations in meters.
pub fn forward_kinematics_com<T: Real>(
    skeleton: &SkeletonDefinition<T>,
    joint_angles_frame: &[T],
    root_pose: &[T; 6],
) -> Result<Vec<Vec3<T>>> {
    skeleton.tree()?.com_positions(joint_angles_frame, root_pose)
}

/// `T x segments` matrix of COM speeds in m/s.
pub fn segment_com_velocities<T: Real>(
    bundle: &MotionBundle<T>,
    skeleton: &SkeletonDefinition<T>,
) -> Result<Vec<Vec<T>>> {
    let tree = skeleton.tree()?;
    let frames = bundle.frame_count();
    let positions = (0..frames)
        .map(|t| tree.com_positions(&bundle.joint_angles[t], &bundle.root_pose_at(t)))
        .collect::<Result<Vec<_>>>()?;
    let segments = tree.segment_count();
    let dt = bundle.dt();

    let mut speeds = vec![vec![T::zero(); segments]; frames];
    for s in 0..segments {
        let axis = |k: usize| positions.iter().map(|p| p[s][k]).collect::<Vec<_>>();
        let (vx, vy, vz) = (
            central_difference(&axis(0), dt)?,
            central_difference(&axis(1), dt)?,
            central_difference(&axis(2), dt)?,
        );
        for t in 0..frames {
            speeds[t][s] = Vec3::new(vx[t], vy[t], vz[t]).norm();
        }
    }
    Ok(speeds)
}
