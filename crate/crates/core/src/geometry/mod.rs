//! Triangle-mesh geometry kernel: mesh statistics, proximity queries,
//! inside/outside classification and surface sampling.

mod bvh;
mod io;
mod mesh;
mod sample;
mod winding;

pub use bvh::{ClosestHit, TriangleBvh};
pub use io::{
    box_mesh, cylinder_mesh, icosphere, read_mesh, read_obj, read_ply, subdivide, unit_cube,
    write_obj, write_ply, MeshIoError,
};
pub use mesh::{Aabb, TriangleMesh};
pub use sample::{sample_surface, sample_surface_with_normals, SurfaceSample};
pub use winding::{winding_number, MeshSignClassifier};

use nalgebra::Point3;

/// Closest point on triangle `(a, b, c)` to `p` (Ericson, "Real-Time
/// Collision Detection" §5.1.5), together with the feature it lies on.
pub fn closest_point_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> (Point3<f64>, TriangleFeature) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, TriangleFeature::Vertex(0));
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, TriangleFeature::Vertex(1));
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, TriangleFeature::Edge(0));
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, TriangleFeature::Vertex(2));
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, TriangleFeature::Edge(2));
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, TriangleFeature::Edge(1));
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, TriangleFeature::Face)
}

/// The triangle feature a closest point lies on. Edge `k` joins local
/// vertices `k` and `(k + 1) % 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleFeature {
    Vertex(u8),
    Edge(u8),
    Face,
}
