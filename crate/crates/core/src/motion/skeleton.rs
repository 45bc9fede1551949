//! Skeleton topology: joints, segments, keypoints and bones.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Rigid, Vec3};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    /// Ball-and-socket, three rotational DoFs.
    Ball,
    /// Pin (hinge), one rotational DoF.
    Pin,
    /// Universal, two rotational DoFs.
    Universal,
    /// Free root joint: three rotations followed by three translations.
    Root,
}

impl JointKind {
    pub fn dof_count(self) -> usize {
        match self {
            JointKind::Ball => 3,
            JointKind::Pin => 1,
            JointKind::Universal => 2,
            JointKind::Root => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DofSpec<T> {
    pub name: String,
    /// Rotation (or, for root translations, displacement) axis in the joint frame.
    pub axis: [T; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct JointSpec<T> {
    pub name: String,
    pub kind: JointKind,
    /// `None` only for the root joint, which attaches to the ground.
    pub parent: Option<String>,
    pub child: String,
    /// Joint center expressed in the parent segment frame (ground frame for the root).
    pub location: [T; 3],
    /// Per-DoF axes, applied intrinsically in the listed order.
    pub dofs: Vec<DofSpec<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SegmentSpec<T> {
    pub name: String,
    pub parent_joint: String,
    /// Center of mass in the segment frame, meters.
    pub com: [T; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct KeypointSpec<T> {
    pub name: String,
    pub segment: String,
    pub offset: [T; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoneSpec {
    pub name: String,
    /// `[parent, child]` keypoint indices.
    pub keypoints: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SkeletonDefinition<T> {
    pub joints: Vec<JointSpec<T>>,
    pub segments: Vec<SegmentSpec<T>>,
    #[serde(default)]
    pub keypoints: Vec<KeypointSpec<T>>,
    #[serde(default)]
    pub bones: Vec<BoneSpec>,
}

impl<T: Real> SkeletonDefinition<T> {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let skeleton: Self = serde_json::from_str(text).map_err(Error::from_json)?;
        skeleton.validate()?;
        Ok(skeleton)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Names of the articulated DoFs, in joint-angle column order. Root DoFs are
    /// carried by the root pose and are not part of this list.
    pub fn dof_names(&self) -> Vec<&str> {
        self.joints
            .iter()
            .filter(|j| j.kind != JointKind::Root)
            .flat_map(|j| j.dofs.iter().map(|d| d.name.as_str()))
            .collect()
    }

    pub fn dof_count(&self) -> usize {
        self.joints
            .iter()
            .filter(|j| j.kind != JointKind::Root)
            .map(|j| j.dofs.len())
            .sum()
    }

    pub fn dof_index(&self, name: &str) -> Option<usize> {
        self.dof_names().iter().position(|n| *n == name)
    }

    pub fn segment_index(&self, name: &str) -> Option<usize> {
        self.segments.iter().position(|s| s.name == name)
    }

    pub fn keypoint_index(&self, name: &str) -> Option<usize> {
        self.keypoints.iter().position(|k| k.name == name)
    }

    pub fn bone_index(&self, name: &str) -> Option<usize> {
        self.bones.iter().position(|b| b.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        self.tree().map(|_| ())
    }

    /// Checks the topology and precomputes traversal order and column offsets.
    pub fn tree(&self) -> Result<KinematicTree<T>> {
        KinematicTree::build(self)
    }
}

fn unique_names<'a>(what: &str, names: impl Iterator<Item = &'a str>) -> Result<BTreeMap<&'a str, usize>> {
    let mut map = BTreeMap::new();
    for (i, name) in names.enumerate() {
        if map.insert(name, i).is_some() {
            return Err(Error::Validation(format!("duplicate {what} name '{name}'")));
        }
    }
    Ok(map)
}

#[derive(Clone, Debug)]
struct TreeJoint<T> {
    parent_segment: Option<usize>,
    child_segment: usize,
    location: Vec3<T>,
    axes: Vec<Vec3<T>>,
    /// First joint-angle column of this joint; unused for the root.
    column: usize,
}

/// Validated, index-resolved view of a [`SkeletonDefinition`] used for forward kinematics.
#[derive(Clone, Debug)]
pub struct KinematicTree<T> {
    /// Joints sorted so that every parent segment is placed before its children.
    order: Vec<TreeJoint<T>>,
    root: TreeJoint<T>,
    segment_com: Vec<Vec3<T>>,
    keypoints: Vec<(usize, Vec3<T>)>,
    dof_count: usize,
}

impl<T: Real> KinematicTree<T> {
    fn build(skeleton: &SkeletonDefinition<T>) -> Result<Self> {
        let seg_index = unique_names("segment", skeleton.segments.iter().map(|s| s.name.as_str()))?;
        let joint_index = unique_names("joint", skeleton.joints.iter().map(|j| j.name.as_str()))?;
        unique_names(
            "DoF",
            skeleton.joints.iter().flat_map(|j| j.dofs.iter().map(|d| d.name.as_str())),
        )?;
        unique_names("keypoint", skeleton.keypoints.iter().map(|k| k.name.as_str()))?;

        let finite = |v: &[T; 3]| v.iter().all(|x| x.is_finite());

        let mut column = 0;
        let mut root = None;
        let mut joints = Vec::with_capacity(skeleton.joints.len());
        let mut child_of_joint = BTreeSet::new();
        for joint in &skeleton.joints {
            if joint.dofs.len() != joint.kind.dof_count() {
                return Err(Error::Validation(format!(
                    "joint '{}' of kind {:?} declares {} DoFs, expected {}",
                    joint.name,
                    joint.kind,
                    joint.dofs.len(),
                    joint.kind.dof_count()
                )));
            }
            if !finite(&joint.location) {
                return Err(Error::Validation(format!("joint '{}' has a non-finite location", joint.name)));
            }
            let mut axes = Vec::with_capacity(joint.dofs.len());
            for dof in &joint.dofs {
                let axis = Vec3::from_array(dof.axis)
                    .normalized()
                    .filter(|a| a.is_finite())
                    .ok_or_else(|| Error::Validation(format!("DoF '{}' has a zero axis", dof.name)))?;
                axes.push(axis);
            }
            let child_segment = *seg_index.get(joint.child.as_str()).ok_or_else(|| {
                Error::Validation(format!("joint '{}' names unknown child segment '{}'", joint.name, joint.child))
            })?;
            if !child_of_joint.insert(child_segment) {
                return Err(Error::Validation(format!("segment '{}' is the child of several joints", joint.child)));
            }
            let parent_segment = match (&joint.parent, joint.kind) {
                (None, JointKind::Root) => None,
                (Some(_), JointKind::Root) => {
                    return Err(Error::Validation(format!("root joint '{}' must not have a parent", joint.name)))
                }
                (None, _) => {
                    return Err(Error::Validation(format!("non-root joint '{}' has no parent segment", joint.name)))
                }
                (Some(p), _) => Some(*seg_index.get(p.as_str()).ok_or_else(|| {
                    Error::Validation(format!("joint '{}' names unknown parent segment '{p}'", joint.name))
                })?),
            };
            let tj = TreeJoint { parent_segment, child_segment, location: Vec3::from_array(joint.location), axes, column };
            if joint.kind == JointKind::Root {
                if root.replace(tj).is_some() {
                    return Err(Error::Validation("skeleton has more than one root joint".into()));
                }
            } else {
                column += joint.dofs.len();
                joints.push(tj);
            }
        }
        let root = root.ok_or_else(|| Error::Validation("skeleton has no root joint".into()))?;
        if skeleton.segments[root.child_segment].name != "pelvis" {
            return Err(Error::Validation("the root joint must drive the 'pelvis' segment".into()));
        }

        for seg in &skeleton.segments {
            let j = joint_index.get(seg.parent_joint.as_str()).ok_or_else(|| {
                Error::Validation(format!("segment '{}' names unknown parent joint '{}'", seg.name, seg.parent_joint))
            })?;
            if skeleton.joints[*j].child != seg.name {
                return Err(Error::Validation(format!(
                    "segment '{}' lists parent joint '{}' whose child is '{}'",
                    seg.name, seg.parent_joint, skeleton.joints[*j].child
                )));
            }
            if !finite(&seg.com) {
                return Err(Error::Validation(format!("segment '{}' has a non-finite COM offset", seg.name)));
            }
        }
        if child_of_joint.len() != skeleton.segments.len() {
            return Err(Error::Validation("every segment must be the child of exactly one joint".into()));
        }

        // Topological order from the pelvis; anything unreached is a cycle or a forest.
        let mut placed = vec![false; skeleton.segments.len()];
        placed[root.child_segment] = true;
        let mut order = Vec::with_capacity(joints.len());
        let mut pending = joints;
        while !pending.is_empty() {
            let before = pending.len();
            let (ready, rest): (Vec<_>, Vec<_>) =
                pending.into_iter().partition(|j| j.parent_segment.is_some_and(|p| placed[p]));
            for j in ready {
                placed[j.child_segment] = true;
                order.push(j);
            }
            pending = rest;
            if pending.len() == before {
                return Err(Error::Validation("segment graph is not a tree rooted at the pelvis".into()));
            }
        }

        let mut keypoints = Vec::with_capacity(skeleton.keypoints.len());
        for kp in &skeleton.keypoints {
            let seg = *seg_index.get(kp.segment.as_str()).ok_or_else(|| {
                Error::Validation(format!("keypoint '{}' names unknown segment '{}'", kp.name, kp.segment))
            })?;
            if !finite(&kp.offset) {
                return Err(Error::Validation(format!("keypoint '{}' has a non-finite offset", kp.name)));
            }
            keypoints.push((seg, Vec3::from_array(kp.offset)));
        }
        for bone in &skeleton.bones {
            let [a, b] = bone.keypoints;
            if a == b {
                return Err(Error::Validation(format!("bone '{}' references keypoint {a} twice", bone.name)));
            }
            if a >= keypoints.len() || b >= keypoints.len() {
                return Err(Error::Validation(format!("bone '{}' references a keypoint out of range", bone.name)));
            }
        }

        Ok(Self {
            order,
            root,
            segment_com: skeleton.segments.iter().map(|s| Vec3::from_array(s.com)).collect(),
            keypoints,
            dof_count: column,
        })
    }

    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    pub fn segment_count(&self) -> usize {
        self.segment_com.len()
    }

    /// World frames of every segment, indexed like the skeleton's segment list.
    ///
    /// `angles` are the articulated DoFs in degrees. `root_pose` holds the three root
    /// rotations in degrees followed by the three root translations in meters.
    pub fn segment_frames(&self, angles: &[T], root_pose: &[T; 6]) -> Result<Vec<Rigid<T>>> {
        if angles.len() != self.dof_count {
            return Err(Error::Schema(format!(
                "angle vector has {} entries, skeleton declares {} DoFs",
                angles.len(),
                self.dof_count
            )));
        }
        let mut frames = vec![Rigid::identity(); self.segment_com.len()];

        let mut root_rot = Mat3::identity();
        for (axis, deg) in self.root.axes[..3].iter().zip(&root_pose[..3]) {
            root_rot = root_rot.mul_mat(&Mat3::from_axis_angle(*axis, deg.to_radians()));
        }
        let shift = self.root.axes[3..]
            .iter()
            .zip(&root_pose[3..])
            .fold(self.root.location, |acc, (axis, d)| acc + axis.scale(*d));
        frames[self.root.child_segment] = Rigid::new(root_rot, shift);

        for joint in &self.order {
            let parent = frames[joint.parent_segment.expect("non-root joint")];
            let mut rot = Mat3::identity();
            for (k, axis) in joint.axes.iter().enumerate() {
                rot = rot.mul_mat(&Mat3::from_axis_angle(*axis, angles[joint.column + k].to_radians()));
            }
            frames[joint.child_segment] = parent.compose(&Rigid::new(rot, joint.location));
        }
        Ok(frames)
    }

    pub fn com_positions(&self, angles: &[T], root_pose: &[T; 6]) -> Result<Vec<Vec3<T>>> {
        let frames = self.segment_frames(angles, root_pose)?;
        Ok(frames.iter().zip(&self.segment_com).map(|(f, c)| f.apply(*c)).collect())
    }

    pub fn keypoint_positions(&self, angles: &[T], root_pose: &[T; 6]) -> Result<Vec<Vec3<T>>> {
        let frames = self.segment_frames(angles, root_pose)?;
        Ok(self.keypoints.iter().map(|(s, off)| frames[*s].apply(*off)).collect())
    }
}
