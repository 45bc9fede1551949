//! Skeleton, limit tables, the motion-bundle input contract and shared kinematics.

mod bundle;
mod kinematics;
mod limits;
mod skeleton;

pub use bundle::{
    parse_motion_bundle, write_motion_bundle, Difficulty, Intensity, MeshFrame, MotionBundle, DETECTION_CLASSES,
};
pub use kinematics::{central_difference, forward_kinematics_com, segment_com_velocities};
pub use limits::{DofLimit, LimitTable, SegmentLimit};
pub use skeleton::{BoneSpec, DofSpec, JointKind, JointSpec, KeypointSpec, KinematicTree, SegmentSpec, SkeletonDefinition};

use crate::scalar::Real;

const DEFAULT_SKELETON: &str = include_str!("../../data/default_skeleton.json");
const DEFAULT_LIMITS: &str = include_str!("../../data/default_limits.json");

/// Full-body skeleton with 31 articulated DoFs plus the 6-DoF pelvis root.
pub fn default_skeleton<T: Real>() -> SkeletonDefinition<T> {
    SkeletonDefinition::from_json_str(DEFAULT_SKELETON).expect("bundled skeleton is valid")
}

/// Limit table matching [`default_skeleton`] row for row.
pub fn default_limits<T: Real>() -> LimitTable<T> {
    LimitTable::from_json_str(DEFAULT_LIMITS).expect("bundled limit table is valid")
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    #[test]
    fn default_skeleton_matches_dof_inventory() {
        let s = default_skeleton::<f64>();
        let expected: BTreeMap<&str, usize> = [
            ("ground", 6),
            ("hip", 3),
            ("knee", 1),
            ("ankle", 1),
            ("subtalar", 1),
            ("mtp", 1),
            ("lumbar", 3),
            ("shoulder", 3),
            ("elbow", 1),
            ("radioulnar", 1),
            ("wrist", 2),
        ]
        .into_iter()
        .collect();
        for j in &s.joints {
            let family = j.name.split('_').next().unwrap();
            assert_eq!(j.dofs.len(), expected[family], "joint {}", j.name);
        }
        assert_eq!(s.dof_count(), 31);
        assert_eq!(s.joints.len(), 20);
        assert_eq!(s.segments.len(), 20);
    }

    #[test]
    fn default_limits_line_up_with_skeleton() {
        let s = default_skeleton::<f64>();
        default_limits::<f64>().check_against(&s).unwrap();
        default_limits::<f32>().check_against(&default_skeleton::<f32>()).unwrap();
    }

    #[test]
    fn every_default_bone_has_distinct_keypoints() {
        let s = default_skeleton::<f64>();
        assert_eq!(s.bones.len(), 13);
        assert!(s.bones.iter().all(|b| b.keypoints[0] != b.keypoints[1]));
    }
}
