//! Per-video input contract and its JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::skeleton::SkeletonDefinition;
use crate::scalar::Real;

/// Number of extra-limb detector classes: extra hand, arm, leg, foot.
pub const DETECTION_CLASSES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intensity {
    Gentle,
    Intense,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MeshFrame<T> {
    pub vertices: Vec<[T; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl<T: Real> MeshFrame<T> {
    pub fn validate(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Err(Error::Validation("mesh has no faces".into()));
        }
        if self.vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Validation("mesh vertex is not finite".into()));
        }
        let n = self.vertices.len();
        for (i, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) {
                return Err(Error::Validation(format!("face {i} references a vertex index >= {n}")));
            }
            let p = f.map(|v| self.vertices[v]);
            if (f[0] == f[1] && f[1] == f[2]) || (p[0] == p[1] && p[1] == p[2]) {
                return Err(Error::Validation(format!("face {i} is degenerate")));
            }
        }
        Ok(())
    }
}

/// All fitted per-video quantities consumed by the metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MotionBundle<T> {
    pub video_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_id: Option<String>,
    pub fps: T,
    pub difficulty: Difficulty,
    pub intensity: Intensity,
    /// Joint-angle column order; must equal the skeleton's DoF order.
    pub dofs: Vec<String>,
    pub valid: Vec<bool>,
    /// `T x DoF`, degrees.
    pub joint_angles: Vec<Vec<T>>,
    /// `T x 6`: root rotations (degrees) then root translations (meters). Zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_pose: Option<Vec<[T; 6]>>,
    /// `T x K x 3`, meters.
    pub keypoints: Vec<Vec<[T; 3]>>,
    /// `T x 4` confidences; absent means no detections at any frame.
    #[serde(default)]
    pub detections: Option<Vec<[T; DETECTION_CLASSES]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meshes: Option<Vec<MeshFrame<T>>>,
}

impl<T: Real> MotionBundle<T> {
    pub fn frame_count(&self) -> usize {
        self.valid.len()
    }

    pub fn dt(&self) -> T {
        T::one() / self.fps
    }

    pub fn root_pose_at(&self, t: usize) -> [T; 6] {
        self.root_pose.as_ref().map_or([T::zero(); 6], |r| r[t])
    }

    /// Column `dof` of the joint-angle matrix.
    pub fn angle_series(&self, dof: usize) -> Vec<T> {
        self.joint_angles.iter().map(|row| row[dof]).collect()
    }

    pub fn model_or_default(&self) -> &str {
        self.model_id.as_deref().unwrap_or("unknown")
    }

    pub fn prompt_or_video(&self) -> &str {
        self.prompt_id.as_deref().unwrap_or(&self.video_id)
    }

    pub fn from_json_str(text: &str, skeleton: &SkeletonDefinition<T>) -> Result<Self> {
        let bundle: Self = serde_json::from_str(text).map_err(Error::from_json)?;
        bundle.validate(skeleton)?;
        Ok(bundle)
    }

    pub fn to_json_string(&self) -> Result<String> {
        self.check_finite()?;
        serde_json::to_string(self).map_err(Error::from_json)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(format!("{what} contains a non-finite value")));
        if !self.fps.is_finite() {
            return bad("fps");
        }
        if self.joint_angles.iter().flatten().any(|x| !x.is_finite()) {
            return bad("joint_angles");
        }
        if self.root_pose.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return bad("root_pose");
        }
        if self.keypoints.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return bad("keypoints");
        }
        if self.detections.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return bad("detections");
        }
        Ok(())
    }

    /// Checks every invariant of the bundle against `skeleton`.
    pub fn validate(&self, skeleton: &SkeletonDefinition<T>) -> Result<()> {
        self.check_finite()?;
        let frames = self.frame_count();
        if frames < 2 {
            return Err(Error::Validation(format!("bundle needs at least 2 frames, has {frames}")));
        }
        if self.fps <= T::zero() {
            return Err(Error::Validation("fps must be positive".into()));
        }
        let names = skeleton.dof_names();
        if self.dofs.len() != names.len() || self.dofs.iter().zip(&names).any(|(a, b)| a != b) {
            return Err(Error::Schema("bundle DoF order does not match the skeleton".into()));
        }
        let same_len = |what: &str, n: usize| {
            if n == frames {
                Ok(())
            } else {
                Err(Error::Validation(format!("{what} has {n} frames, expected {frames}")))
            }
        };
        same_len("joint_angles", self.joint_angles.len())?;
        same_len("keypoints", self.keypoints.len())?;
        if let Some(root) = &self.root_pose {
            same_len("root_pose", root.len())?;
        }
        if let Some(det) = &self.detections {
            same_len("detections", det.len())?;
            if det.iter().flatten().any(|c| *c < T::zero() || *c > T::one()) {
                return Err(Error::Validation("confidence out of range".into()));
            }
        }
        if let Some(row) = self.joint_angles.iter().position(|r| r.len() != names.len()) {
            return Err(Error::Schema(format!(
                "joint_angles row {row} has {} columns, skeleton declares {} DoFs",
                self.joint_angles[row].len(),
                names.len()
            )));
        }
        let k = skeleton.keypoints.len();
        if let Some(t) = self.keypoints.iter().position(|f| f.len() != k) {
            return Err(Error::Schema(format!(
                "keypoints frame {t} has {} points, skeleton declares {k}",
                self.keypoints[t].len()
            )));
        }
        if let Some(meshes) = &self.meshes {
            same_len("meshes", meshes.len())?;
            for (t, mesh) in meshes.iter().enumerate() {
                mesh.validate().map_err(|e| Error::Validation(format!("mesh frame {t}: {e}")))?;
            }
        }
        Ok(())
    }
}

/// Reads and validates a bundle file.
pub fn parse_motion_bundle<T: Real>(path: &Path, skeleton: &SkeletonDefinition<T>) -> Result<MotionBundle<T>> {
    let text = std::fs::read_to_string(path)?;
    MotionBundle::from_json_str(&text, skeleton)
}

pub fn write_motion_bundle<T: Real>(bundle: &MotionBundle<T>, path: &Path) -> Result<()> {
    bundle.write(path)
}
