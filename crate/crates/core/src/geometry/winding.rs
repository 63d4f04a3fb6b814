use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::bvh::TriangleBvh;
use super::mesh::TriangleMesh;
use super::TriangleFeature;

/// Generalized winding number of `mesh` at `p`: the summed signed solid
/// angle of all triangles over 4π. ≈1 inside a closed mesh, ≈0 outside,
/// fractional for open meshes.
pub fn winding_number(mesh: &TriangleMesh, p: &Point3<f64>) -> f64 {
    let mut total = 0.0;
    for f in &mesh.faces {
        let a = mesh.vertices[f[0] as usize] - p;
        let b = mesh.vertices[f[1] as usize] - p;
        let c = mesh.vertices[f[2] as usize] - p;
        total += solid_angle(&a, &b, &c);
    }
    total / (4.0 * std::f64::consts::PI)
}

/// Signed solid angle of a triangle seen from the origin
/// (Van Oosterom & Strackee).
fn solid_angle(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let la = a.norm();
    let lb = b.norm();
    let lc = c.norm();
    let num = a.dot(&b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    2.0 * num.atan2(den)
}

/// How badly open a mesh may be before the winding number stops being
/// trustworthy and we switch to pseudo-normal sign tests.
const OPEN_FRACTION_LIMIT: f64 = 0.25;

/// Inside/outside classifier for a triangle mesh.
///
/// Uses the generalized winding number (threshold 0.5) for meshes that are
/// closed or nearly closed, and the angle-weighted pseudo-normal test for
/// badly open ones.
pub struct MeshSignClassifier<'a> {
    mesh: &'a TriangleMesh,
    bvh: TriangleBvh,
    use_winding: bool,
    vertex_normals: Vec<Vector3<f64>>,
    edge_normals: HashMap<(u32, u32), Vector3<f64>>,
}

impl<'a> MeshSignClassifier<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Self {
        let bvh = TriangleBvh::build(mesh);
        let use_winding = mesh.open_edge_fraction() <= OPEN_FRACTION_LIMIT;

        // Angle-weighted vertex normals and summed edge normals for the
        // pseudo-normal test (Bærentzen & Aanæs).
        let mut vertex_normals = vec![Vector3::zeros(); mesh.vertices.len()];
        let mut edge_normals: HashMap<(u32, u32), Vector3<f64>> = HashMap::new();
        for (fi, f) in mesh.faces.iter().enumerate() {
            let n = mesh.face_normal(fi);
            for k in 0..3 {
                let i = f[k] as usize;
                let prev = mesh.vertices[f[(k + 2) % 3] as usize];
                let next = mesh.vertices[f[(k + 1) % 3] as usize];
                let e1 = (next - mesh.vertices[i]).normalize();
                let e2 = (prev - mesh.vertices[i]).normalize();
                let angle = e1.dot(&e2).clamp(-1.0, 1.0).acos();
                vertex_normals[i] += n * angle;

                let a = f[k].min(f[(k + 1) % 3]);
                let b = f[k].max(f[(k + 1) % 3]);
                *edge_normals.entry((a, b)).or_insert_with(Vector3::zeros) += n;
            }
        }

        MeshSignClassifier {
            mesh,
            bvh,
            use_winding,
            vertex_normals,
            edge_normals,
        }
    }

    pub fn bvh(&self) -> &TriangleBvh {
        &self.bvh
    }

    pub fn uses_winding(&self) -> bool {
        self.use_winding
    }

    pub fn is_inside(&self, p: &Point3<f64>) -> bool {
        if self.use_winding {
            winding_number(self.mesh, p) > 0.5
        } else {
            self.pseudo_normal_inside(p)
        }
    }

    fn pseudo_normal_inside(&self, p: &Point3<f64>) -> bool {
        let hit = self.bvh.closest_point(self.mesh, p);
        let f = self.mesh.faces[hit.triangle];
        let normal = match hit.feature {
            TriangleFeature::Face => self.mesh.face_normal(hit.triangle),
            TriangleFeature::Vertex(k) => self.vertex_normals[f[k as usize] as usize],
            TriangleFeature::Edge(k) => {
                let a = f[k as usize].min(f[(k as usize + 1) % 3]);
                let b = f[k as usize].max(f[(k as usize + 1) % 3]);
                self.edge_normals
                    .get(&(a, b))
                    .copied()
                    .unwrap_or_else(Vector3::zeros)
            }
        };
        (p - hit.point).dot(&normal) < 0.0
    }

    /// Unsigned distance to the surface.
    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        self.bvh.distance(self.mesh, p)
    }
}
