use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::winding::MeshSignClassifier;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3<f64>>) -> Self {
        let mut b = Aabb::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Point3<f64>) {
        for i in 0..3 {
            self.min[i] = self.min[i].min(p[i]);
            self.max[i] = self.max[i].max(p[i]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: Point3::new(
                self.min.x.min(other.min.x),
                self.min.y.min(other.min.y),
                self.min.z.min(other.min.z),
            ),
            max: Point3::new(
                self.max.x.max(other.max.x),
                self.max.y.max(other.max.y),
                self.max.z.max(other.max.z),
            ),
        }
    }

    pub fn extents(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn diagonal(&self) -> f64 {
        self.extents().norm()
    }

    pub fn padded(&self, margin: f64) -> Aabb {
        let m = Vector3::repeat(margin);
        Aabb {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Squared distance from `p` to the box (0 inside).
    pub fn distance_sq(&self, p: &Point3<f64>) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let v = if p[i] < self.min[i] {
                self.min[i] - p[i]
            } else if p[i] > self.max[i] {
                p[i] - self.max[i]
            } else {
                0.0
            };
            d2 += v * v;
        }
        d2
    }

    /// Clamp `p` onto the box.
    pub fn clamp_point(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }
}

/// Indexed triangle mesh. Faces index into `vertices`; no attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[u32; 3]>) -> Self {
        TriangleMesh { vertices, faces }
    }

    pub fn triangle(&self, f: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// All face indices reference existing vertices and are pairwise distinct.
    pub fn faces_valid(&self) -> bool {
        let n = self.vertices.len() as u32;
        self.faces
            .iter()
            .all(|f| f.iter().all(|&i| i < n) && f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.triangle(f);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn face_normal(&self, f: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle(f);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vector3::zeros()
        }
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Area-weighted centroid of the surface.
    pub fn surface_centroid(&self) -> Point3<f64> {
        let mut acc = Vector3::zeros();
        let mut area = 0.0;
        for f in 0..self.faces.len() {
            let [a, b, c] = self.triangle(f);
            let fa = self.face_area(f);
            acc += (a.coords + b.coords + c.coords) / 3.0 * fa;
            area += fa;
        }
        if area > 0.0 {
            Point3::from(acc / area)
        } else {
            // Degenerate surface: fall back to the vertex mean.
            let n = self.vertices.len().max(1) as f64;
            Point3::from(self.vertices.iter().map(|v| v.coords).sum::<Vector3<f64>>() / n)
        }
    }

    /// True iff every undirected edge is shared by exactly two faces with
    /// opposite orientation.
    pub fn is_watertight(&self) -> bool {
        if self.faces.is_empty() {
            return false;
        }
        let mut directed: HashMap<(u32, u32), i32> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                *directed.entry((a, b)).or_insert(0) += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &n)| n == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// Fraction of undirected edges bounded by exactly one face.
    pub fn open_edge_fraction(&self) -> f64 {
        let mut undirected: HashMap<(u32, u32), u32> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let a = f[k].min(f[(k + 1) % 3]);
                let b = f[k].max(f[(k + 1) % 3]);
                *undirected.entry((a, b)).or_insert(0) += 1;
            }
        }
        if undirected.is_empty() {
            return 1.0;
        }
        let open = undirected.values().filter(|&&n| n == 1).count();
        open as f64 / undirected.len() as f64
    }

    /// Signed volume by the divergence theorem. Meaningful only for
    /// watertight meshes; the absolute value is returned.
    pub fn signed_volume(&self) -> f64 {
        let v: f64 = self
            .faces
            .iter()
            .map(|&[a, b, c]| {
                let a = self.vertices[a as usize].coords;
                let b = self.vertices[b as usize].coords;
                let c = self.vertices[c as usize].coords;
                a.cross(&b).dot(&c) / 6.0
            })
            .sum();
        v.abs()
    }

    /// Occupancy volume: voxelize at `resolution` cells along the longest
    /// extent and count voxel centers classified inside. Works for open
    /// meshes, where the divergence theorem does not.
    pub fn voxel_volume(&self, resolution: usize) -> f64 {
        let bb = self.aabb();
        let ext = bb.extents();
        let longest = ext.x.max(ext.y).max(ext.z);
        if longest <= 0.0 || self.faces.is_empty() {
            return 0.0;
        }
        let cell = longest / resolution as f64;
        let dims = [
            ((ext.x / cell).ceil() as usize).max(1),
            ((ext.y / cell).ceil() as usize).max(1),
            ((ext.z / cell).ceil() as usize).max(1),
        ];
        let classifier = MeshSignClassifier::new(self);
        let mut count = 0usize;
        for ix in 0..dims[0] {
            for iy in 0..dims[1] {
                for iz in 0..dims[2] {
                    let p = Point3::new(
                        bb.min.x + (ix as f64 + 0.5) * cell,
                        bb.min.y + (iy as f64 + 0.5) * cell,
                        bb.min.z + (iz as f64 + 0.5) * cell,
                    );
                    if classifier.is_inside(&p) {
                        count += 1;
                    }
                }
            }
        }
        count as f64 * cell * cell * cell
    }

    /// Vertices translated by `t`.
    pub fn translated(&self, t: &Vector3<f64>) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| v + t).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Vertices scaled about the origin.
    pub fn scaled(&self, s: f64) -> TriangleMesh {
        TriangleMesh {
            vertices: self
                .vertices
                .iter()
                .map(|v| Point3::from(v.coords * s))
                .collect(),
            faces: self.faces.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::io::unit_cube;

    #[test]
    fn cube_stats() {
        let cube = unit_cube();
        assert!(cube.is_watertight());
        assert!((cube.surface_area() - 6.0).abs() < 1e-12);
        assert!((cube.signed_volume() - 1.0).abs() < 1e-12);
        let c = cube.surface_centroid();
        assert!(c.coords.norm() < 1e-12);
    }

    #[test]
    fn open_cube_is_not_watertight() {
        let mut cube = unit_cube();
        cube.faces.truncate(10); // drop one quad
        assert!(!cube.is_watertight());
        assert!(cube.open_edge_fraction() > 0.0);
    }

    #[test]
    fn aabb_distance_and_clamp() {
        let bb = Aabb {
            min: Point3::new(0.0, 0.0, 0.0),
            max: Point3::new(1.0, 1.0, 1.0),
        };
        assert_eq!(bb.distance_sq(&Point3::new(0.5, 0.5, 0.5)), 0.0);
        assert!((bb.distance_sq(&Point3::new(2.0, 0.5, 0.5)) - 1.0).abs() < 1e-12);
        assert_eq!(
            bb.clamp_point(&Point3::new(2.0, -1.0, 0.5)),
            Point3::new(1.0, 0.0, 0.5)
        );
    }
}
