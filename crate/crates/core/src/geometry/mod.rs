//! Mesh self-intersection: face hierarchy, triangle tests and adjacency filtering.

mod bvh;
mod tritri;

use serde::{Deserialize, Serialize};

pub use bvh::{Aabb, Bvh, BvhNode, BvhNodeKind, DEFAULT_LEAF_SIZE};
pub use tritri::{tri_tri_intersect, unit_normal, Triangle, PLANE_EPS};

use crate::error::Result;
use crate::linalg::Vec3;
use crate::motion::MeshFrame;
use crate::scalar::Real;

/// True iff the faces share at least one vertex index.
pub fn adjacent_faces(f1: &[usize; 3], f2: &[usize; 3]) -> bool {
    f1.iter().any(|v| f2.contains(v))
}

/// Minimum evidence for a frame to count as self-colliding; smaller contacts are treated as
/// numerical noise or cloth contact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct NonLocalFilter<T> {
    pub min_pairs: usize,
    pub min_fraction: T,
}

impl<T: Real> Default for NonLocalFilter<T> {
    fn default() -> Self {
        Self { min_pairs: 8, min_fraction: T::lit(0.01) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Collisions<T> {
    /// Sorted indices of faces involved in a non-adjacent intersecting pair.
    pub faces: Vec<usize>,
    /// Number of intersecting non-adjacent pairs before filtering.
    pub raw_pairs: usize,
    /// `|faces| / F` after filtering.
    pub fraction: T,
}

fn triangles<T: Real>(mesh: &MeshFrame<T>) -> Vec<Triangle<T>> {
    mesh.faces.iter().map(|f| f.map(|v| Vec3::from_array(mesh.vertices[v]))).collect()
}

fn finish<T: Real>(mesh: &MeshFrame<T>, pairs: &[(usize, usize)], filter: &NonLocalFilter<T>) -> Collisions<T> {
    let mut faces: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    faces.sort_unstable();
    faces.dedup();
    let total = T::from_usize_lossy(mesh.faces.len());
    let raw_fraction = T::from_usize_lossy(faces.len()) / total;
    if pairs.len() < filter.min_pairs || raw_fraction < filter.min_fraction {
        return Collisions { faces: Vec::new(), raw_pairs: pairs.len(), fraction: T::zero() };
    }
    Collisions { faces, raw_pairs: pairs.len(), fraction: raw_fraction }
}

fn intersecting_pair<T: Real>(mesh: &MeshFrame<T>, tris: &[Triangle<T>], a: usize, b: usize) -> Result<bool> {
    if adjacent_faces(&mesh.faces[a], &mesh.faces[b]) {
        return Ok(false);
    }
    tri_tri_intersect(&tris[a], &tris[b])
}

/// Non-adjacent intersecting faces of one mesh, found through a face hierarchy.
pub fn colliding_faces<T: Real>(mesh: &MeshFrame<T>, filter: &NonLocalFilter<T>) -> Result<Collisions<T>> {
    mesh.validate()?;
    let tris = triangles(mesh);
    for t in &tris {
        unit_normal(t)?;
    }
    let pad = T::lit(PLANE_EPS);
    let boxes: Vec<Aabb<T>> = tris.iter().map(|t| Aabb::from_points(t).inflated(pad)).collect();
    let bvh = Bvh::build(&boxes, DEFAULT_LEAF_SIZE);
    let mut pairs = Vec::new();
    for (a, b) in bvh.self_overlapping_pairs(&boxes) {
        if intersecting_pair(mesh, &tris, a, b)? {
            pairs.push((a, b));
        }
    }
    Ok(finish(mesh, &pairs, filter))
}

/// All-pairs reference for [`colliding_faces`], quadratic in the face count.
pub fn colliding_faces_brute_force<T: Real>(mesh: &MeshFrame<T>, filter: &NonLocalFilter<T>) -> Result<Collisions<T>> {
    mesh.validate()?;
    let tris = triangles(mesh);
    let mut pairs = Vec::new();
    for a in 0..tris.len() {
        unit_normal(&tris[a])?;
        for b in a + 1..tris.len() {
            if intersecting_pair(mesh, &tris, a, b)? {
                pairs.push((a, b));
            }
        }
    }
    Ok(finish(mesh, &pairs, filter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn unfiltered() -> NonLocalFilter<f64> {
        NonLocalFilter { min_pairs: 0, min_fraction: 0.0 }
    }

    fn tetrahedron() -> MeshFrame<f64> {
        MeshFrame {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            faces: vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        }
    }

    fn boxed(mesh: &mut MeshFrame<f64>, min: [f64; 3], max: [f64; 3]) {
        let base = mesh.vertices.len();
        for i in 0..8 {
            mesh.vertices.push([
                if i & 1 == 0 { min[0] } else { max[0] },
                if i & 2 == 0 { min[1] } else { max[1] },
                if i & 4 == 0 { min[2] } else { max[2] },
            ]);
        }
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        for q in quads {
            mesh.faces.push([base + q[0], base + q[1], base + q[2]]);
            mesh.faces.push([base + q[0], base + q[2], base + q[3]]);
        }
    }

    #[test]
    fn adjacency_examples() {
        assert!(adjacent_faces(&[0, 1, 2], &[2, 3, 4]));
        assert!(!adjacent_faces(&[0, 1, 2], &[3, 4, 5]));
        assert!(adjacent_faces(&[0, 1, 2], &[1, 2, 3]));
    }

    #[test]
    fn convex_mesh_is_clean() {
        let c = colliding_faces(&tetrahedron(), &unfiltered()).unwrap();
        assert!(c.faces.is_empty());
        assert_eq!(c.fraction, 0.0);
    }

    #[test]
    fn interpenetrating_boxes_match_brute_force() {
        let mut mesh = MeshFrame { vertices: vec![], faces: vec![] };
        boxed(&mut mesh, [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        boxed(&mut mesh, [0.5, 0.37, 0.21], [1.5, 1.37, 1.21]);
        let filter = NonLocalFilter::default();
        let fast = colliding_faces(&mesh, &filter).unwrap();
        let slow = colliding_faces_brute_force(&mesh, &filter).unwrap();
        assert_eq!(fast, slow);
        assert!(fast.fraction > 0.0);
    }

    #[test]
    fn single_pair_is_filtered_as_noise() {
        let mesh = MeshFrame {
            vertices: vec![
                [-1.0, -1.0, 0.0],
                [1.0, -1.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, -1.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 1.0],
            ],
            faces: vec![[0, 1, 2], [3, 4, 5]],
        };
        let raw = colliding_faces(&mesh, &unfiltered()).unwrap();
        assert_eq!(raw.raw_pairs, 1);
        assert_eq!(raw.faces, vec![0, 1]);
        let filtered = colliding_faces(&mesh, &NonLocalFilter { min_pairs: 8, min_fraction: 0.01 }).unwrap();
        assert!(filtered.faces.is_empty());
        assert_eq!(filtered.fraction, 0.0);
    }

    #[test]
    fn degenerate_face_propagates() {
        let mesh = MeshFrame {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
            faces: vec![[0, 1, 2]],
        };
        assert!(matches!(colliding_faces(&mesh, &unfiltered()), Err(Error::DegenerateGeometry(_))));
    }
}
