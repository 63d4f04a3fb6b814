use nalgebra::{Point3, Vector3};
use rand::Rng;

use super::mesh::TriangleMesh;

/// A surface point with the normal of the face it was drawn from.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub point: Point3<f64>,
    pub normal: Vector3<f64>,
}

/// Draw `n` area-weighted uniform samples from the mesh surface.
pub fn sample_surface<R: Rng>(mesh: &TriangleMesh, n: usize, rng: &mut R) -> Vec<Point3<f64>> {
    sample_surface_with_normals(mesh, n, rng)
        .into_iter()
        .map(|s| s.point)
        .collect()
}

pub fn sample_surface_with_normals<R: Rng>(
    mesh: &TriangleMesh,
    n: usize,
    rng: &mut R,
) -> Vec<SurfaceSample> {
    assert!(!mesh.faces.is_empty(), "cannot sample an empty mesh");
    // Cumulative area table for face selection.
    let mut cdf = Vec::with_capacity(mesh.faces.len());
    let mut acc = 0.0;
    for f in 0..mesh.faces.len() {
        acc += mesh.face_area(f);
        cdf.push(acc);
    }
    let total = acc;
    assert!(total > 0.0, "cannot sample a zero-area mesh");

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let t = rng.random_range(0.0..total);
        let f = match cdf.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) | Err(i) => i.min(mesh.faces.len() - 1),
        };
        let [a, b, c] = mesh.triangle(f);
        // Uniform barycentric draw via the square-root trick.
        let r1: f64 = rng.random::<f64>();
        let r2: f64 = rng.random::<f64>();
        let s = r1.sqrt();
        let u = 1.0 - s;
        let v = r2 * s;
        let w = 1.0 - u - v;
        out.push(SurfaceSample {
            point: Point3::from(a.coords * u + b.coords * v + c.coords * w),
            normal: mesh.face_normal(f),
        });
    }
    out
}
