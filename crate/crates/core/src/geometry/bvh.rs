//! Axis-aligned bounding-box hierarchy over mesh faces.

use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn empty() -> Self {
        let inf = T::infinity();
        Self { min: Vec3::new(inf, inf, inf), max: Vec3::new(-inf, -inf, -inf) }
    }

    pub fn from_points(points: &[Vec3<T>]) -> Self {
        points.iter().fold(Self::empty(), |b, p| b.grow(*p))
    }

    pub fn grow(self, p: Vec3<T>) -> Self {
        Self { min: self.min.min(p), max: self.max.max(p) }
    }

    pub fn union(self, o: Self) -> Self {
        Self { min: self.min.min(o.min), max: self.max.max(o.max) }
    }

    /// Closed overlap test; boxes that only touch overlap.
    pub fn overlaps(&self, o: &Self) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
            && self.min.z <= o.max.z
            && o.min.z <= self.max.z
    }

    pub fn contains_point(&self, p: Vec3<T>) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn inflated(self, pad: T) -> Self {
        let d = Vec3::new(pad, pad, pad);
        Self { min: self.min - d, max: self.max + d }
    }

    fn longest_axis(&self) -> usize {
        let e = self.max - self.min;
        if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BvhNodeKind {
    /// Range into [`Bvh::face_order`].
    Leaf { start: usize, count: usize },
    Inner { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvhNode<T> {
    pub aabb: Aabb<T>,
    pub kind: BvhNodeKind,
}

/// Median-split hierarchy over face centroids. Node 0 is the root.
#[derive(Clone, Debug)]
pub struct Bvh<T> {
    pub nodes: Vec<BvhNode<T>>,
    pub face_order: Vec<usize>,
    pub leaf_size: usize,
}

pub const DEFAULT_LEAF_SIZE: usize = 4;

impl<T: Real> Bvh<T> {
    /// Builds the hierarchy over `face_boxes`, splitting at the centroid median along the
    /// longest axis of the centroid bounds until at most `leaf_size` faces remain.
    pub fn build(face_boxes: &[Aabb<T>], leaf_size: usize) -> Self {
        let leaf_size = leaf_size.max(1);
        let centroids: Vec<Vec3<T>> =
            face_boxes.iter().map(|b| (b.min + b.max).scale(T::lit(0.5))).collect();
        let mut bvh = Self { nodes: Vec::new(), face_order: (0..face_boxes.len()).collect(), leaf_size };
        if !face_boxes.is_empty() {
            bvh.build_node(face_boxes, &centroids, 0, face_boxes.len());
        }
        bvh
    }

    fn build_node(&mut self, boxes: &[Aabb<T>], centroids: &[Vec3<T>], start: usize, end: usize) -> usize {
        let aabb = self.face_order[start..end].iter().fold(Aabb::empty(), |b, &f| b.union(boxes[f]));
        let id = self.nodes.len();
        if end - start <= self.leaf_size {
            self.nodes.push(BvhNode { aabb, kind: BvhNodeKind::Leaf { start, count: end - start } });
            return id;
        }
        let faces = &mut self.face_order[start..end];
        let cbox = faces.iter().fold(Aabb::empty(), |b, &f| b.grow(centroids[f]));
        let axis = cbox.longest_axis();
        let mid = (end - start) / 2;
        faces.select_nth_unstable_by(mid, |&a, &b| {
            centroids[a][axis]
                .partial_cmp(&centroids[b][axis])
                .expect("finite centroids")
                .then(a.cmp(&b))
        });
        self.nodes.push(BvhNode { aabb, kind: BvhNodeKind::Leaf { start, count: 0 } });
        let left = self.build_node(boxes, centroids, start, start + mid);
        let right = self.build_node(boxes, centroids, start + mid, end);
        self.nodes[id].kind = BvhNodeKind::Inner { left, right };
        id
    }

    pub fn depth(&self) -> usize {
        fn go<T>(nodes: &[BvhNode<T>], i: usize) -> usize {
            match nodes[i].kind {
                BvhNodeKind::Leaf { .. } => 1,
                BvhNodeKind::Inner { left, right } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(&self.nodes, 0)
        }
    }

    fn leaf_faces(&self, start: usize, count: usize) -> &[usize] {
        &self.face_order[start..start + count]
    }

    /// All unordered face pairs `(i, j)`, `i < j`, whose boxes overlap, each reported once.
    pub fn self_overlapping_pairs(&self, face_boxes: &[Aabb<T>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.self_node(0, face_boxes, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn self_node(&self, n: usize, boxes: &[Aabb<T>], out: &mut Vec<(usize, usize)>) {
        match self.nodes[n].kind {
            BvhNodeKind::Leaf { start, count } => {
                let faces = self.leaf_faces(start, count);
                for (k, &a) in faces.iter().enumerate() {
                    for &b in &faces[k + 1..] {
                        if boxes[a].overlaps(&boxes[b]) {
                            out.push((a.min(b), a.max(b)));
                        }
                    }
                }
            }
            BvhNodeKind::Inner { left, right } => {
                self.self_node(left, boxes, out);
                self.self_node(right, boxes, out);
                self.cross_nodes(left, right, boxes, out);
            }
        }
    }

    fn cross_nodes(&self, a: usize, b: usize, boxes: &[Aabb<T>], out: &mut Vec<(usize, usize)>) {
        if !self.nodes[a].aabb.overlaps(&self.nodes[b].aabb) {
            return;
        }
        match (&self.nodes[a].kind, &self.nodes[b].kind) {
            (BvhNodeKind::Leaf { start: sa, count: ca }, BvhNodeKind::Leaf { start: sb, count: cb }) => {
                for &fa in self.leaf_faces(*sa, *ca) {
                    for &fb in self.leaf_faces(*sb, *cb) {
                        if boxes[fa].overlaps(&boxes[fb]) {
                            out.push((fa.min(fb), fa.max(fb)));
                        }
                    }
                }
            }
            (BvhNodeKind::Inner { left, right }, BvhNodeKind::Leaf { .. }) => {
                self.cross_nodes(*left, b, boxes, out);
                self.cross_nodes(*right, b, boxes, out);
            }
            (_, BvhNodeKind::Inner { left, right }) => {
                self.cross_nodes(a, *left, boxes, out);
                self.cross_nodes(a, *right, boxes, out);
            }
        }
    }
}
