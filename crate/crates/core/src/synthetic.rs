//! Clean synthetic motion and parameterized biomechanical corruptions.
//!
//! Every corruption edits exactly one input channel of a bundle: joint angles, keypoints,
//! detector confidences or mesh vertices. Derived channels are left as they were, so a
//! corruption only reaches the metrics that read the channel it edits.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregation::MetricId;
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::motion::{
    Difficulty, Intensity, KinematicTree, LimitTable, MeshFrame, MotionBundle, SkeletonDefinition, DETECTION_CLASSES,
};
use crate::scalar::Real;

/// Detector class names, in confidence-column order.
pub const DETECTION_CLASS_NAMES: [&str; DETECTION_CLASSES] = ["extra_hand", "extra_arm", "extra_leg", "extra_foot"];

/// Smallest sequence the generator accepts.
pub const MIN_FRAMES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    BoneStretch,
    RomViolation,
    VelocitySpike,
    Jitter,
    DuplicateLimbConfidence,
    SelfPenetration,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 6] = [
        CorruptionKind::BoneStretch,
        CorruptionKind::RomViolation,
        CorruptionKind::VelocitySpike,
        CorruptionKind::Jitter,
        CorruptionKind::DuplicateLimbConfidence,
        CorruptionKind::SelfPenetration,
    ];
}

/// One localized edit.
///
/// `target` selects what is edited: a bone name for `bone_stretch`; a comma-separated list of
/// DoF names for `rom_violation`, `velocity_spike` and `jitter`; a detector class for
/// `duplicate_limb_confidence`; `"moving:fixed"` capsule names for `self_penetration`. `"*"`
/// selects everything except for `self_penetration`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub magnitude: f64,
    pub frames: Vec<usize>,
    pub target: String,
    #[serde(default)]
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, magnitude: f64, frames: Vec<usize>, target: impl Into<String>) -> Self {
        Self { kind, magnitude, frames, target: target.into(), seed: 0 }
    }

    pub fn validate(&self, frame_count: usize) -> Result<()> {
        if !(self.magnitude.is_finite() && self.magnitude >= 0.0) {
            return Err(Error::Validation(format!("corruption magnitude must be >= 0, got {}", self.magnitude)));
        }
        if let Some(t) = self.frames.iter().find(|&&t| t >= frame_count) {
            return Err(Error::Validation(format!("corruption frame {t} outside [0, {frame_count})")));
        }
        Ok(())
    }
}

/// A capsule rigidly attached to a segment: axis along local y from `y_start` to `y_end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Capsule {
    pub segment: String,
    pub y_start: f64,
    pub y_end: f64,
    pub radius: f64,
}

/// Capsules used for the synthetic body surface, in mesh-vertex order.
pub fn default_capsules() -> Vec<Capsule> {
    let c = |segment: &str, y_start, y_end, radius| Capsule { segment: segment.into(), y_start, y_end, radius };
    vec![
        c("torso", 0.08, 0.30, 0.10),
        c("femur_r", -0.08, -0.31, 0.055),
        c("femur_l", -0.08, -0.31, 0.055),
        c("tibia_r", -0.10, -0.36, 0.045),
        c("tibia_l", -0.10, -0.36, 0.045),
        c("humerus_r", -0.08, -0.21, 0.04),
        c("humerus_l", -0.08, -0.21, 0.04),
        c("radius_r", -0.06, -0.20, 0.035),
        c("radius_l", -0.06, -0.20, 0.035),
    ]
}

const AROUND: usize = 12;
const CAP_RINGS: usize = 2;
const BODY_RINGS: usize = 7;

/// Local-frame vertices and faces of one capsule, poles first and last.
fn capsule_mesh(c: &Capsule) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    use std::f64::consts::{FRAC_PI_2, TAU};
    let dir = if c.y_end >= c.y_start { 1.0 } else { -1.0 };
    // Profile from the start pole to the end pole as (y, ring radius).
    let mut profile = Vec::new();
    for k in 1..=CAP_RINGS {
        let phi = FRAC_PI_2 * (1.0 - k as f64 / (CAP_RINGS as f64 + 1.0));
        profile.push((c.y_start - dir * c.radius * phi.sin(), c.radius * phi.cos()));
    }
    for k in 0..BODY_RINGS {
        let u = k as f64 / (BODY_RINGS as f64 - 1.0);
        profile.push((c.y_start + u * (c.y_end - c.y_start), c.radius));
    }
    for k in (1..=CAP_RINGS).rev() {
        let phi = FRAC_PI_2 * (1.0 - k as f64 / (CAP_RINGS as f64 + 1.0));
        profile.push((c.y_end + dir * c.radius * phi.sin(), c.radius * phi.cos()));
    }

    let mut vertices = vec![[0.0, c.y_start - dir * c.radius, 0.0]];
    for &(y, r) in &profile {
        for i in 0..AROUND {
            let a = TAU * i as f64 / AROUND as f64;
            vertices.push([r * a.cos(), y, r * a.sin()]);
        }
    }
    vertices.push([0.0, c.y_end + dir * c.radius, 0.0]);
    let last = vertices.len() - 1;
    let ring = |k: usize, i: usize| 1 + k * AROUND + i % AROUND;

    let mut faces = Vec::new();
    for i in 0..AROUND {
        faces.push([0, ring(0, i + 1), ring(0, i)]);
    }
    for k in 0..profile.len() - 1 {
        for i in 0..AROUND {
            faces.push([ring(k, i), ring(k, i + 1), ring(k + 1, i + 1)]);
            faces.push([ring(k, i), ring(k + 1, i + 1), ring(k + 1, i)]);
        }
    }
    let k = profile.len() - 1;
    for i in 0..AROUND {
        faces.push([last, ring(k, i), ring(k, i + 1)]);
    }
    (vertices, faces)
}

/// Parameters of one generated video.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub video_id: String,
    #[serde(default)]
    pub model_id: Option<String>,
    #[serde(default)]
    pub prompt_id: Option<String>,
    pub frames: usize,
    pub fps: f64,
    pub seed: u64,
    #[serde(default = "default_difficulty")]
    pub difficulty: Difficulty,
    #[serde(default = "default_intensity")]
    pub intensity: Intensity,
}

fn default_difficulty() -> Difficulty {
    Difficulty::Easy
}

fn default_intensity() -> Intensity {
    Intensity::Gentle
}

impl BaselineSpec {
    pub fn new(video_id: impl Into<String>, frames: usize, fps: f64, seed: u64) -> Self {
        Self {
            video_id: video_id.into(),
            model_id: None,
            prompt_id: None,
            frames,
            fps,
            seed,
            difficulty: Difficulty::Easy,
            intensity: Intensity::Gentle,
        }
    }
}

/// Document accepted by the `synth` command: a baseline plus corruptions applied in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub baseline: BaselineSpec,
    #[serde(default)]
    pub corruptions: Vec<CorruptionSpec>,
}

/// Sinusoid of one DoF: `center + amplitude * sin(2π f t + phase)`, degrees.
#[derive(Clone, Copy, Debug)]
struct Wave {
    center: f64,
    amplitude: f64,
    omega: f64,
    phase: f64,
}

impl Wave {
    fn at(&self, t: f64) -> f64 {
        self.center + self.amplitude * (self.omega * t + self.phase).sin()
    }
}

/// Generator of clean bundles and injector of corruptions for one skeleton and limit table.
#[derive(Clone, Debug)]
pub struct Synthesizer<T> {
    skeleton: SkeletonDefinition<T>,
    tree: KinematicTree<T>,
    limits: LimitTable<T>,
    capsules: Vec<Capsule>,
    capsule_segments: Vec<usize>,
    /// Local vertices of every capsule and the vertex offset of each capsule in the mesh.
    local_vertices: Vec<Vec<[f64; 3]>>,
    vertex_offsets: Vec<usize>,
    vertex_total: usize,
    faces: Vec<[usize; 3]>,
    /// ROM tolerance used by `rom_violation`, degrees.
    pub rom_tol: f64,
    /// Jerk window the baseline keeps its jerk energy within.
    pub jerk_window: usize,
}

impl<T: Real> Synthesizer<T> {
    pub fn new(skeleton: SkeletonDefinition<T>, limits: LimitTable<T>) -> Result<Self> {
        Self::with_capsules(skeleton, limits, default_capsules())
    }

    pub fn with_capsules(skeleton: SkeletonDefinition<T>, limits: LimitTable<T>, capsules: Vec<Capsule>) -> Result<Self> {
        let tree = skeleton.tree()?;
        limits.check_against(&skeleton)?;
        if let Some(d) = limits.dofs.iter().find(|d| !(d.rom_max > d.rom_min)) {
            return Err(Error::Config(format!("DoF '{}' has an empty range of motion", d.dof)));
        }
        let mut capsule_segments = Vec::with_capacity(capsules.len());
        let mut local_vertices = Vec::with_capacity(capsules.len());
        let mut vertex_offsets = Vec::with_capacity(capsules.len());
        let mut faces = Vec::new();
        let mut offset = 0;
        for c in &capsules {
            let seg = skeleton
                .segment_index(&c.segment)
                .ok_or_else(|| Error::Schema(format!("capsule segment '{}' is not in the skeleton", c.segment)))?;
            if !(c.radius > 0.0 && c.y_start != c.y_end) {
                return Err(Error::Config(format!("capsule on '{}' is degenerate", c.segment)));
            }
            let (v, f) = capsule_mesh(c);
            faces.extend(f.into_iter().map(|f| f.map(|i| i + offset)));
            vertex_offsets.push(offset);
            offset += v.len();
            local_vertices.push(v);
            capsule_segments.push(seg);
        }
        Ok(Self {
            skeleton,
            tree,
            limits,
            capsules,
            capsule_segments,
            local_vertices,
            vertex_offsets,
            vertex_total: offset,
            faces,
            rom_tol: 15.0,
            jerk_window: 5,
        })
    }

    pub fn skeleton(&self) -> &SkeletonDefinition<T> {
        &self.skeleton
    }

    pub fn limits(&self) -> &LimitTable<T> {
        &self.limits
    }

    pub fn capsules(&self) -> &[Capsule] {
        &self.capsules
    }

    fn capsule_index(&self, name: &str) -> Result<usize> {
        self.capsules
            .iter()
            .position(|c| c.segment == name)
            .ok_or_else(|| Error::Schema(format!("no capsule on segment '{name}'")))
    }

    /// Capsule body posed by the given angles and root pose.
    pub fn body_mesh(&self, angles: &[T], root_pose: &[T; 6]) -> Result<MeshFrame<T>> {
        let frames = self.tree.segment_frames(angles, root_pose)?;
        let mut vertices = Vec::with_capacity(self.vertex_total);
        for (local, &seg) in self.local_vertices.iter().zip(&self.capsule_segments) {
            for p in local {
                let v = Vec3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2]));
                vertices.push(frames[seg].apply(v).to_array());
            }
        }
        Ok(MeshFrame { vertices, faces: self.faces.clone() })
    }

    fn waves(&self, seed: u64) -> (Vec<Wave>, [Wave; 6]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = self.jerk_window as f64;
        let waves = self
            .limits
            .dofs
            .iter()
            .map(|d| {
                let span = (d.rom_max - d.rom_min).to_f64_lossy();
                let f: f64 = rng.gen_range(0.2..0.6);
                let w = std::f64::consts::TAU * f;
                let mut amplitude = rng.gen_range(0.03..0.08) * span;
                amplitude = amplitude
                    .min(0.5 * d.angular_velocity_max.to_f64_lossy() / w)
                    .min(0.5 * d.angular_acceleration_max.to_f64_lossy() / (w * w))
                    .min((0.5 * d.jerk_energy_max.to_f64_lossy() / window).sqrt() / (w * w * w));
                Wave { center: d.midpoint().to_f64_lossy(), amplitude, omega: w, phase: rng.gen_range(0.0..std::f64::consts::TAU) }
            })
            .collect();
        let mut root = |amplitude: f64, center: f64| Wave {
            center,
            amplitude,
            omega: std::f64::consts::TAU * rng.gen_range(0.1..0.3),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        };
        let root = [root(2.0, 0.0), root(2.0, 0.0), root(5.0, 0.0), root(0.05, 0.0), root(0.01, 0.0), root(0.03, 0.0)];
        (waves, root)
    }

    /// Smooth, limit-respecting motion with consistent keypoints, a collision-free capsule
    /// body and zero detector confidences.
    pub fn generate_baseline(&self, spec: &BaselineSpec) -> Result<MotionBundle<T>> {
        if spec.frames < MIN_FRAMES {
            return Err(Error::Validation(format!(
                "baseline needs at least {MIN_FRAMES} frames, got {}",
                spec.frames
            )));
        }
        if !(spec.fps.is_finite() && spec.fps > 0.0) {
            return Err(Error::Config(format!("fps must be positive, got {}", spec.fps)));
        }
        let (waves, root_waves) = self.waves(spec.seed);
        let mut joint_angles = Vec::with_capacity(spec.frames);
        let mut root_pose = Vec::with_capacity(spec.frames);
        let mut keypoints = Vec::with_capacity(spec.frames);
        let mut meshes = Vec::with_capacity(spec.frames);
        for i in 0..spec.frames {
            let t = i as f64 / spec.fps;
            let angles: Vec<T> = waves.iter().map(|w| T::lit(w.at(t))).collect();
            let root = root_waves.map(|w| T::lit(w.at(t)));
            keypoints.push(self.tree.keypoint_positions(&angles, &root)?.into_iter().map(Vec3::to_array).collect());
            meshes.push(self.body_mesh(&angles, &root)?);
            joint_angles.push(angles);
            root_pose.push(root);
        }
        Ok(MotionBundle {
            video_id: spec.video_id.clone(),
            model_id: spec.model_id.clone(),
            prompt_id: spec.prompt_id.clone(),
            fps: T::lit(spec.fps),
            difficulty: spec.difficulty,
            intensity: spec.intensity,
            dofs: self.skeleton.dof_names().into_iter().map(String::from).collect(),
            valid: vec![true; spec.frames],
            joint_angles,
            root_pose: Some(root_pose),
            keypoints,
            detections: Some(vec![[T::zero(); DETECTION_CLASSES]; spec.frames]),
            meshes: Some(meshes),
        })
    }

    /// Baseline followed by every corruption of `spec`, in order.
    pub fn synthesize(&self, spec: &SynthSpec) -> Result<MotionBundle<T>> {
        let mut bundle = self.generate_baseline(&spec.baseline)?;
        for c in &spec.corruptions {
            bundle = self.inject(&bundle, c)?;
        }
        Ok(bundle)
    }

    fn dof_selection(&self, target: &str) -> Result<Vec<usize>> {
        if target.trim() == "*" {
            return Ok((0..self.limits.dofs.len()).collect());
        }
        target
            .split(',')
            .map(|name| {
                let name = name.trim();
                self.skeleton
                    .dof_index(name)
                    .ok_or_else(|| Error::Schema(format!("DoF '{name}' is not in the skeleton")))
            })
            .collect()
    }

    /// Applies one corruption. Magnitude 0 returns an exact copy.
    pub fn inject(&self, bundle: &MotionBundle<T>, spec: &CorruptionSpec) -> Result<MotionBundle<T>> {
        spec.validate(bundle.frame_count())?;
        // Resolve the selector first so a bad target fails even at magnitude 0.
        match spec.kind {
            CorruptionKind::BoneStretch => {
                self.bone_selection(&spec.target)?;
            }
            CorruptionKind::RomViolation | CorruptionKind::VelocitySpike | CorruptionKind::Jitter => {
                self.dof_selection(&spec.target)?;
            }
            CorruptionKind::DuplicateLimbConfidence => {
                class_selection(&spec.target)?;
            }
            CorruptionKind::SelfPenetration => {
                self.capsule_pair(&spec.target)?;
            }
        }
        let mut out = bundle.clone();
        if spec.magnitude == 0.0 {
            return Ok(out);
        }
        let frames: BTreeSet<usize> = spec.frames.iter().copied().collect();
        let m = spec.magnitude;
        match spec.kind {
            CorruptionKind::BoneStretch => self.stretch_bones(&mut out, &frames, &spec.target, m)?,
            CorruptionKind::RomViolation => {
                for d in self.dof_selection(&spec.target)? {
                    let lim = &self.limits.dofs[d];
                    let value = lim.rom_max + T::lit(self.rom_tol) + T::lit(m) * lim.half_range();
                    for &t in &frames {
                        out.joint_angles[t][d] = value;
                    }
                }
            }
            CorruptionKind::VelocitySpike => {
                let dt = bundle.dt();
                for d in self.dof_selection(&spec.target)? {
                    let lim = &self.limits.dofs[d];
                    let step = (dt + dt) * lim.angular_velocity_max * T::lit(1.0 + m);
                    for &t in &frames {
                        let theta = bundle.joint_angles[t][d];
                        let toward = if theta >= lim.midpoint() { -step } else { step };
                        out.joint_angles[t][d] = theta + toward;
                    }
                }
            }
            CorruptionKind::Jitter => {
                // Period-4 pattern (+, +, -, -): a period-2 alternation cancels in central
                // differences and would leave velocity untouched.
                let phase = (spec.seed % 4) as usize;
                for d in self.dof_selection(&spec.target)? {
                    for &t in &frames {
                        let sign = if (t + phase) % 4 < 2 { 1.0 } else { -1.0 };
                        out.joint_angles[t][d] = out.joint_angles[t][d] + T::lit(sign * m);
                    }
                }
            }
            CorruptionKind::DuplicateLimbConfidence => {
                let classes = class_selection(&spec.target)?;
                let frames_total = out.frame_count();
                let det = out.detections.get_or_insert_with(|| vec![[T::zero(); DETECTION_CLASSES]; frames_total]);
                let value = T::lit(m.min(1.0));
                for &t in &frames {
                    for &c in &classes {
                        det[t][c] = value;
                    }
                }
            }
            CorruptionKind::SelfPenetration => {
                let (moving, fixed) = self.capsule_pair(&spec.target)?;
                let meshes = out
                    .meshes
                    .as_mut()
                    .ok_or_else(|| Error::Validation("self_penetration needs a bundle with meshes".into()))?;
                let range = |c: usize| self.vertex_offsets[c]..self.vertex_offsets[c] + self.local_vertices[c].len();
                let (rm, rf) = (range(moving), range(fixed));
                for &t in &frames {
                    let mesh = &mut meshes[t];
                    if mesh.vertices.len() != self.vertex_total {
                        return Err(Error::Schema(format!("mesh frame {t} is not a synthetic capsule body")));
                    }
                    let centroid = |r: std::ops::Range<usize>| {
                        let n = T::from_usize_lossy(r.len());
                        r.fold(Vec3::zero(), |acc, i| acc + Vec3::from_array(mesh.vertices[i])).scale(T::one() / n)
                    };
                    let dir = (centroid(rf.clone()) - centroid(rm.clone()))
                        .normalized()
                        .ok_or_else(|| Error::DegenerateGeometry("capsules share a centroid".into()))?;
                    let shift = dir.scale(T::lit(m));
                    for i in rm.clone() {
                        mesh.vertices[i] = (Vec3::from_array(mesh.vertices[i]) + shift).to_array();
                    }
                }
            }
        }
        Ok(out)
    }

    fn bone_selection(&self, target: &str) -> Result<Vec<usize>> {
        if target.trim() == "*" {
            return Ok((0..self.skeleton.bones.len()).collect());
        }
        target
            .split(',')
            .map(|name| {
                let name = name.trim();
                self.skeleton
                    .bone_index(name)
                    .ok_or_else(|| Error::Schema(format!("bone '{name}' is not in the skeleton")))
            })
            .collect()
    }

    /// Stretches each selected bone by `(1 + m)` along its own direction, carrying every
    /// keypoint distal to the bone along so that no other bone changes length.
    fn stretch_bones(&self, out: &mut MotionBundle<T>, frames: &BTreeSet<usize>, target: &str, m: f64) -> Result<()> {
        let bones = &self.skeleton.bones;
        for b in self.bone_selection(target)? {
            let [parent, child] = bones[b].keypoints;
            let mut distal = BTreeSet::from([child]);
            loop {
                let before = distal.len();
                for other in bones {
                    if distal.contains(&other.keypoints[0]) && other.keypoints[1] != parent {
                        distal.insert(other.keypoints[1]);
                    }
                }
                if distal.len() == before {
                    break;
                }
            }
            for &t in frames {
                let kp = &mut out.keypoints[t];
                let p = Vec3::from_array(kp[parent]);
                let shift = (Vec3::from_array(kp[child]) - p).scale(T::lit(m));
                for &k in &distal {
                    kp[k] = (Vec3::from_array(kp[k]) + shift).to_array();
                }
            }
        }
        Ok(())
    }

    fn capsule_pair(&self, target: &str) -> Result<(usize, usize)> {
        let (a, b) = target
            .split_once(':')
            .ok_or_else(|| Error::Schema(format!("self_penetration target '{target}' must be 'moving:fixed'")))?;
        let (a, b) = (self.capsule_index(a.trim())?, self.capsule_index(b.trim())?);
        if a == b {
            return Err(Error::Schema("self_penetration needs two different capsules".into()));
        }
        Ok((a, b))
    }
}

fn class_selection(target: &str) -> Result<Vec<usize>> {
    if target.trim() == "*" {
        return Ok((0..DETECTION_CLASSES).collect());
    }
    target
        .split(',')
        .map(|name| {
            let name = name.trim();
            DETECTION_CLASS_NAMES
                .iter()
                .position(|c| *c == name)
                .ok_or_else(|| Error::Schema(format!("unknown detector class '{name}'")))
        })
        .collect()
}

impl CorruptionKind {
    /// The metric this corruption is designed to degrade.
    pub fn target_metric(self) -> MetricId {
        match self {
            CorruptionKind::BoneStretch => MetricId::II,
            CorruptionKind::RomViolation => MetricId::III,
            CorruptionKind::VelocitySpike => MetricId::V,
            CorruptionKind::Jitter => MetricId::VI,
            CorruptionKind::DuplicateLimbConfidence => MetricId::I,
            CorruptionKind::SelfPenetration => MetricId::IV,
        }
    }

    /// Metrics allowed to move along with the target. Angle edits change velocity,
    /// acceleration and jerk, so every angle corruption leaks into V and VI; a velocity
    /// spike targets both.
    pub fn affected_metrics(self) -> &'static [MetricId] {
        match self {
            CorruptionKind::BoneStretch => &[MetricId::II],
            CorruptionKind::RomViolation => &[MetricId::III, MetricId::V, MetricId::VI],
            CorruptionKind::VelocitySpike | CorruptionKind::Jitter => &[MetricId::V, MetricId::VI],
            CorruptionKind::DuplicateLimbConfidence => &[MetricId::I],
            CorruptionKind::SelfPenetration => &[MetricId::IV],
        }
    }

    /// Magnitude reached at level 1 by [`CorruptionKind::reference`].
    pub fn reference_max(self) -> f64 {
        match self {
            CorruptionKind::BoneStretch => 0.5,
            CorruptionKind::RomViolation => 1.0,
            CorruptionKind::VelocitySpike => 0.5,
            CorruptionKind::Jitter => 30.0,
            CorruptionKind::DuplicateLimbConfidence => 0.05,
            CorruptionKind::SelfPenetration => 0.2,
        }
    }

    /// A fixed localized corruption of this kind for a `frames`-long video, with magnitude
    /// `level * reference_max()`. Used by the reference corpus and the degradation sweeps.
    ///
    /// Jitter hits isolated frames: with sustained jitter most frames sit just under the flag
    /// threshold, and their summed severity over a denominator of one outweighs the first
    /// flagged frames, so the score is not monotone in amplitude.
    pub fn reference(self, level: f64, frames: usize) -> CorruptionSpec {
        let block: Vec<usize> = (frames / 3..frames / 3 + frames * 3 / 10).collect();
        let every = |start: usize, step: usize| (start..frames).step_by(step).collect::<Vec<_>>();
        let (frames, target) = match self {
            CorruptionKind::BoneStretch => (every(0, 5), "*"),
            CorruptionKind::RomViolation => (block, "knee_angle_r"),
            CorruptionKind::VelocitySpike => (
                every(1, 3),
                "hip_flexion_r,hip_flexion_l,knee_angle_r,knee_angle_l,arm_flex_r,arm_flex_l,elbow_flex_r,elbow_flex_l",
            ),
            CorruptionKind::Jitter => (every(3, 6), "*"),
            CorruptionKind::DuplicateLimbConfidence => (block, "extra_arm"),
            CorruptionKind::SelfPenetration => (block, "femur_l:femur_r"),
        };
        CorruptionSpec::new(self, level * self.reference_max(), frames, target)
    }
}

/// Reference corpus of `models` models with `videos` videos each. Model `k` applies every
/// reference corruption at level `k / (models - 1)` to the same baselines, so model ids in
/// lexicographic order are also ordered from cleanest to most corrupted.
pub fn reference_corpus<T: Real>(
    synth: &Synthesizer<T>,
    models: usize,
    videos: usize,
    frames: usize,
    fps: f64,
) -> Result<Vec<MotionBundle<T>>> {
    let difficulties = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];
    let mut out = Vec::with_capacity(models * videos);
    for k in 0..models {
        let level = if models > 1 { k as f64 / (models - 1) as f64 } else { 0.0 };
        for v in 0..videos {
            let model = format!("model_{k:02}");
            let mut base = BaselineSpec::new(format!("{model}_v{v:02}"), frames, fps, v as u64);
            base.model_id = Some(model);
            base.prompt_id = Some(format!("prompt_{v:02}"));
            base.difficulty = difficulties[v % 3];
            base.intensity = if v % 2 == 0 { Intensity::Gentle } else { Intensity::Intense };
            let corruptions = CorruptionKind::ALL.iter().map(|kind| kind.reference(level, frames)).collect();
            out.push(synth.synthesize(&SynthSpec { baseline: base, corruptions })?);
        }
    }
    Ok(out)
}
