//! Closed triangle–triangle intersection (interval method on the planes' common line,
//! with a 2D fallback for coplanar pairs).

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;

pub type Triangle<T> = [Vec3<T>; 3];

/// Absolute tolerance (meters) on signed plane distances.
pub const PLANE_EPS: f64 = 1e-10;

fn plane_eps<T: Real>(a: &Triangle<T>, b: &Triangle<T>) -> T {
    let extent = a.iter().chain(b).fold(T::one(), |m, p| m.max(p.max_abs_component()));
    T::lit(PLANE_EPS).max(T::epsilon() * T::lit(64.0) * extent)
}

/// Unit normal, or a degenerate-geometry error for zero-area triangles.
pub fn unit_normal<T: Real>(tri: &Triangle<T>) -> Result<Vec3<T>> {
    let n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    let scale = (tri[1] - tri[0]).norm_squared().max((tri[2] - tri[0]).norm_squared());
    if !(n.norm_squared() > scale * scale * T::epsilon() * T::epsilon()) {
        return Err(Error::DegenerateGeometry("triangle has zero area".into()));
    }
    Ok(n.scale(T::one() / n.norm()))
}

fn snapped_distances<T: Real>(tri: &Triangle<T>, normal: Vec3<T>, origin: Vec3<T>, eps: T) -> [T; 3] {
    tri.map(|p| {
        let d = normal.dot(p - origin);
        if d.abs() < eps {
            T::zero()
        } else {
            d
        }
    })
}

/// Interval covered by `tri ∩ other plane`, projected on `dir`.
fn interval_on_line<T: Real>(tri: &Triangle<T>, dist: &[T; 3], dir: Vec3<T>) -> (T, T) {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut push = |p: Vec3<T>| {
        let s = dir.dot(p);
        lo = lo.min(s);
        hi = hi.max(s);
    };
    for i in 0..3 {
        let j = (i + 1) % 3;
        if dist[i] == T::zero() {
            push(tri[i]);
        }
        if (dist[i] > T::zero() && dist[j] < T::zero()) || (dist[i] < T::zero() && dist[j] > T::zero()) {
            let t = dist[i] / (dist[i] - dist[j]);
            push(tri[i] + (tri[j] - tri[i]).scale(t));
        }
    }
    (lo, hi)
}

fn same_strict_side<T: Real>(d: &[T; 3]) -> bool {
    let z = T::zero();
    (d[0] > z && d[1] > z && d[2] > z) || (d[0] < z && d[1] < z && d[2] < z)
}

/// True iff the two closed triangles share at least one point.
pub fn tri_tri_intersect<T: Real>(a: &Triangle<T>, b: &Triangle<T>) -> Result<bool> {
    let na = unit_normal(a)?;
    let nb = unit_normal(b)?;
    let eps = plane_eps(a, b);

    let da = snapped_distances(a, nb, b[0], eps);
    if same_strict_side(&da) {
        return Ok(false);
    }
    let db = snapped_distances(b, na, a[0], eps);
    if same_strict_side(&db) {
        return Ok(false);
    }
    if da.iter().all(|d| *d == T::zero()) || db.iter().all(|d| *d == T::zero()) {
        return Ok(coplanar_intersect(a, b, na));
    }

    let dir = na.cross(nb);
    if dir.norm_squared() <= T::epsilon() * T::epsilon() {
        // Parallel planes within tolerance of each other: treat as coplanar.
        return Ok(coplanar_intersect(a, b, na));
    }
    let (a0, a1) = interval_on_line(a, &da, dir);
    let (b0, b1) = interval_on_line(b, &db, dir);
    Ok(a0 <= b1 && b0 <= a1)
}

type P2<T> = (T, T);

fn project_2d<T: Real>(tri: &Triangle<T>, normal: Vec3<T>) -> [P2<T>; 3] {
    let (ax, ay, az) = (normal.x.abs(), normal.y.abs(), normal.z.abs());
    tri.map(|p| {
        if ax >= ay && ax >= az {
            (p.y, p.z)
        } else if ay >= az {
            (p.x, p.z)
        } else {
            (p.x, p.y)
        }
    })
}

fn orient<T: Real>(a: P2<T>, b: P2<T>, c: P2<T>) -> T {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment<T: Real>(a: P2<T>, b: P2<T>, p: P2<T>) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_intersect<T: Real>(p1: P2<T>, p2: P2<T>, q1: P2<T>, q2: P2<T>) -> bool {
    let z = T::zero();
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(q1, q2, p1))
        || (d2 == z && on_segment(q1, q2, p2))
        || (d3 == z && on_segment(p1, p2, q1))
        || (d4 == z && on_segment(p1, p2, q2))
}

fn point_in_triangle<T: Real>(p: P2<T>, t: &[P2<T>; 3]) -> bool {
    let z = T::zero();
    let s = [orient(t[0], t[1], p), orient(t[1], t[2], p), orient(t[2], t[0], p)];
    (s.iter().all(|x| *x >= z)) || (s.iter().all(|x| *x <= z))
}

fn coplanar_intersect<T: Real>(a: &Triangle<T>, b: &Triangle<T>, normal: Vec3<T>) -> bool {
    let pa = project_2d(a, normal);
    let pb = project_2d(b, normal);
    for i in 0..3 {
        for j in 0..3 {
            if segments_intersect(pa[i], pa[(i + 1) % 3], pb[j], pb[(j + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_triangle(pa[0], &pb) || point_in_triangle(pb[0], &pa)
}
