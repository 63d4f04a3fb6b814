//! Signed distance fields on trilinear voxel grids: negative inside,
//! positive outside, queryable anywhere with analytic gradients.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{sample_surface_with_normals, Aabb, MeshSignClassifier, TriangleMesh};

#[derive(Debug, Error)]
pub enum SdfError {
    #[error("degenerate mesh: zero surface area")]
    DegenerateMesh,
    #[error("sdf cache {path}: {message}")]
    Cache { path: String, message: String },
}

/// Grid-resolution and padding knobs for field construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SdfConfig {
    /// Node count along the longest AABB axis; other axes scale
    /// proportionally with a floor of 16.
    pub resolution: usize,
    /// Padding around the part AABB as a fraction of its diagonal.
    pub padding_frac: f64,
}

impl Default for SdfConfig {
    fn default() -> Self {
        SdfConfig {
            resolution: 96,
            padding_frac: 0.1,
        }
    }
}

/// A queryable signed distance field for one part.
///
/// Values are stored at grid nodes (f32, little-endian in the cache format)
/// and interpolated trilinearly. Queries outside the padded box clamp to the
/// box and add the Euclidean clamp distance, which keeps values sane and
/// gradients pointing home.
#[derive(Debug, Clone)]
pub struct SdfField {
    pub origin: Point3<f64>,
    pub cell_size: f64,
    pub resolution: [usize; 3],
    pub padding: f64,
    grid: Vec<f32>,
}

const CACHE_MAGIC: &[u8; 8] = b"KTSDF\x00\x00\x01";

impl SdfField {
    /// Node index, z-fastest row-major.
    #[inline]
    fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.resolution[1] + y) * self.resolution[2] + z
    }

    pub fn node_value(&self, x: usize, y: usize, z: usize) -> f64 {
        self.grid[self.idx(x, y, z)] as f64
    }

    pub fn node_position(&self, x: usize, y: usize, z: usize) -> Point3<f64> {
        Point3::new(
            self.origin.x + x as f64 * self.cell_size,
            self.origin.y + y as f64 * self.cell_size,
            self.origin.z + z as f64 * self.cell_size,
        )
    }

    /// The box covered by grid nodes.
    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: self.origin,
            max: Point3::new(
                self.origin.x + (self.resolution[0] - 1) as f64 * self.cell_size,
                self.origin.y + (self.resolution[1] - 1) as f64 * self.cell_size,
                self.origin.z + (self.resolution[2] - 1) as f64 * self.cell_size,
            ),
        }
    }

    /// Construct directly from raw data. Exposed for tests and the cache
    /// reader; `build_sdf` is the normal entry point.
    pub fn from_raw(
        origin: Point3<f64>,
        cell_size: f64,
        resolution: [usize; 3],
        padding: f64,
        grid: Vec<f32>,
    ) -> Self {
        assert_eq!(grid.len(), resolution[0] * resolution[1] * resolution[2]);
        assert!(cell_size > 0.0);
        SdfField {
            origin,
            cell_size,
            resolution,
            padding,
            grid,
        }
    }

    /// Trilinear cell lookup: cell index plus fractional coordinates, for a
    /// point already inside the grid box.
    fn locate(&self, p: &Point3<f64>) -> ([usize; 3], [f64; 3]) {
        let mut cell = [0usize; 3];
        let mut frac = [0f64; 3];
        for i in 0..3 {
            let t = (p[i] - self.origin[i]) / self.cell_size;
            let c = (t.floor() as isize).clamp(0, self.resolution[i] as isize - 2) as usize;
            cell[i] = c;
            let mut f = (t - c as f64).clamp(0.0, 1.0);
            // Snap to node planes so querying at an exact node position
            // returns exactly the stored value despite rounding in t.
            if f < 1e-9 {
                f = 0.0;
            } else if f > 1.0 - 1e-9 {
                f = 1.0;
            }
            frac[i] = f;
        }
        (cell, frac)
    }

    fn corners(&self, cell: [usize; 3]) -> [f64; 8] {
        let [x, y, z] = cell;
        [
            self.node_value(x, y, z),
            self.node_value(x, y, z + 1),
            self.node_value(x, y + 1, z),
            self.node_value(x, y + 1, z + 1),
            self.node_value(x + 1, y, z),
            self.node_value(x + 1, y, z + 1),
            self.node_value(x + 1, y + 1, z),
            self.node_value(x + 1, y + 1, z + 1),
        ]
    }

    fn interp(corners: &[f64; 8], f: &[f64; 3]) -> f64 {
        let [u, v, w] = *f;
        let c00 = corners[0] * (1.0 - w) + corners[1] * w;
        let c01 = corners[2] * (1.0 - w) + corners[3] * w;
        let c10 = corners[4] * (1.0 - w) + corners[5] * w;
        let c11 = corners[6] * (1.0 - w) + corners[7] * w;
        let c0 = c00 * (1.0 - v) + c01 * v;
        let c1 = c10 * (1.0 - v) + c11 * v;
        c0 * (1.0 - u) + c1 * u
    }

    /// Signed distance at `p`.
    pub fn query(&self, p: &Point3<f64>) -> f64 {
        let bounds = self.bounds();
        if bounds.contains(p) {
            let (cell, frac) = self.locate(p);
            Self::interp(&self.corners(cell), &frac)
        } else {
            let q = bounds.clamp_point(p);
            let (cell, frac) = self.locate(&q);
            Self::interp(&self.corners(cell), &frac) + (p - q).norm()
        }
    }

    /// Analytic gradient of the trilinear interpolant (piecewise constant
    /// per cell along each axis pair). Outside the box the clamp-distance
    /// direction takes over on clamped axes.
    pub fn gradient(&self, p: &Point3<f64>) -> Vector3<f64> {
        let bounds = self.bounds();
        let (q, outside) = if bounds.contains(p) {
            (*p, false)
        } else {
            (bounds.clamp_point(p), true)
        };
        let (cell, f) = self.locate(&q);
        let c = self.corners(cell);
        let [u, v, w] = f;

        // Partial derivatives of the trilinear form, scaled by cell size.
        let du = ((c[4] - c[0]) * (1.0 - v) * (1.0 - w)
            + (c[5] - c[1]) * (1.0 - v) * w
            + (c[6] - c[2]) * v * (1.0 - w)
            + (c[7] - c[3]) * v * w)
            / self.cell_size;
        let dv = ((c[2] - c[0]) * (1.0 - u) * (1.0 - w)
            + (c[3] - c[1]) * (1.0 - u) * w
            + (c[6] - c[4]) * u * (1.0 - w)
            + (c[7] - c[5]) * u * w)
            / self.cell_size;
        let dw = ((c[1] - c[0]) * (1.0 - u) * (1.0 - v)
            + (c[3] - c[2]) * (1.0 - u) * v
            + (c[5] - c[4]) * u * (1.0 - v)
            + (c[7] - c[6]) * u * v)
            / self.cell_size;
        let mut g = Vector3::new(du, dv, dw);

        if outside {
            let d = p - q;
            let norm = d.norm();
            if norm > 0.0 {
                let dir = d / norm;
                for i in 0..3 {
                    if d[i] != 0.0 {
                        // Clamped axis: interior value is constant along it.
                        g[i] = dir[i];
                    }
                }
            }
        }
        g
    }

    pub fn query_many(&self, points: &[Point3<f64>]) -> Vec<f64> {
        points.iter().map(|p| self.query(p)).collect()
    }

    pub fn gradient_many(&self, points: &[Point3<f64>]) -> Vec<Vector3<f64>> {
        points.iter().map(|p| self.gradient(p)).collect()
    }

    /// Binary cache: magic+version header, resolution, origin, cell size,
    /// padding, then the f32 grid little-endian, row-major z-fastest.
    pub fn write_cache(&self, path: &Path) -> Result<(), SdfError> {
        let err = |message: String| SdfError::Cache {
            path: path.display().to_string(),
            message,
        };
        let mut out = Vec::with_capacity(64 + self.grid.len() * 4);
        out.extend_from_slice(CACHE_MAGIC);
        for r in self.resolution {
            out.extend_from_slice(&(r as u32).to_le_bytes());
        }
        for c in [
            self.origin.x,
            self.origin.y,
            self.origin.z,
            self.cell_size,
            self.padding,
        ] {
            out.extend_from_slice(&c.to_le_bytes());
        }
        for v in &self.grid {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let mut file = std::fs::File::create(path).map_err(|e| err(e.to_string()))?;
        file.write_all(&out).map_err(|e| err(e.to_string()))
    }

    pub fn read_cache(path: &Path) -> Result<Self, SdfError> {
        let err = |message: String| SdfError::Cache {
            path: path.display().to_string(),
            message,
        };
        let mut data = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut data))
            .map_err(|e| err(e.to_string()))?;
        if data.len() < 8 + 12 + 40 || &data[..8] != CACHE_MAGIC {
            return Err(err("bad magic or truncated header".into()));
        }
        let mut off = 8;
        let mut read_u32 = || {
            let v = u32::from_le_bytes(data[off..off + 4].try_into().unwrap());
            off += 4;
            v
        };
        let resolution = [
            read_u32() as usize,
            read_u32() as usize,
            read_u32() as usize,
        ];
        let mut off = 20;
        let mut read_f64 = || {
            let v = f64::from_le_bytes(data[off..off + 8].try_into().unwrap());
            off += 8;
            v
        };
        let origin = Point3::new(read_f64(), read_f64(), read_f64());
        let cell_size = read_f64();
        let padding = read_f64();
        let n = resolution[0] * resolution[1] * resolution[2];
        if data.len() != 60 + 4 * n {
            return Err(err(format!(
                "payload size mismatch: expected {} grid floats",
                n
            )));
        }
        let grid = data[60..]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(SdfField::from_raw(
            origin, cell_size, resolution, padding, grid,
        ))
    }
}

/// Build the field for a part mesh.
///
/// Node distances come from exact nearest-triangle queries; signs from the
/// generalized winding number (threshold 0.5) evaluated in a band around the
/// surface and flood-filled outward, with a pseudo-normal fallback for badly
/// open meshes.
pub fn build_sdf(
    mesh: &TriangleMesh,
    resolution: usize,
    padding_frac: f64,
) -> Result<SdfField, SdfError> {
    if mesh.surface_area() <= 0.0 {
        return Err(SdfError::DegenerateMesh);
    }
    let bb = mesh.aabb();
    let padding = bb.diagonal() * padding_frac;
    let padded = bb.padded(padding);
    let ext = padded.extents();
    let longest = ext.x.max(ext.y).max(ext.z);
    let resolution = resolution.max(16);
    let cell = longest / (resolution - 1) as f64;
    let dims = [
        (((ext.x / cell).ceil() as usize) + 1).max(16),
        (((ext.y / cell).ceil() as usize) + 1).max(16),
        (((ext.z / cell).ceil() as usize) + 1).max(16),
    ];

    let classifier = MeshSignClassifier::new(mesh);
    let n = dims[0] * dims[1] * dims[2];
    let idx = |x: usize, y: usize, z: usize| (x * dims[1] + y) * dims[2] + z;
    let pos = |x: usize, y: usize, z: usize| {
        Point3::new(
            padded.min.x + x as f64 * cell,
            padded.min.y + y as f64 * cell,
            padded.min.z + z as f64 * cell,
        )
    };

    // Unsigned distances everywhere.
    let mut dist = vec![0f64; n];
    for x in 0..dims[0] {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                dist[idx(x, y, z)] = classifier.distance(&pos(x, y, z));
            }
        }
    }

    // Signs: exact classification within two cells of the surface, plus the
    // outer boundary (always outside the padded box); the rest flood-fills.
    // A node farther than 2 cells from the surface cannot be separated from
    // its neighbours by the surface, so propagation is sound.
    const NEAR: f64 = 2.0;
    let mut inside: Vec<i8> = vec![-1; n]; // -1 unknown, 0 outside, 1 inside
    let mut queue = VecDeque::new();
    for x in 0..dims[0] {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                let i = idx(x, y, z);
                let boundary = x == 0
                    || y == 0
                    || z == 0
                    || x == dims[0] - 1
                    || y == dims[1] - 1
                    || z == dims[2] - 1;
                if dist[i] <= NEAR * cell {
                    inside[i] = classifier.is_inside(&pos(x, y, z)) as i8;
                    queue.push_back((x, y, z));
                } else if boundary {
                    inside[i] = 0;
                    queue.push_back((x, y, z));
                }
            }
        }
    }
    while let Some((x, y, z)) = queue.pop_front() {
        let sign = inside[idx(x, y, z)];
        let mut push =
            |nx: usize, ny: usize, nz: usize, queue: &mut VecDeque<(usize, usize, usize)>| {
                let j = idx(nx, ny, nz);
                if inside[j] == -1 {
                    inside[j] = sign;
                    queue.push_back((nx, ny, nz));
                }
            };
        if x > 0 {
            push(x - 1, y, z, &mut queue);
        }
        if y > 0 {
            push(x, y - 1, z, &mut queue);
        }
        if z > 0 {
            push(x, y, z - 1, &mut queue);
        }
        if x + 1 < dims[0] {
            push(x + 1, y, z, &mut queue);
        }
        if y + 1 < dims[1] {
            push(x, y + 1, z, &mut queue);
        }
        if z + 1 < dims[2] {
            push(x, y, z + 1, &mut queue);
        }
    }

    let grid: Vec<f32> = dist
        .iter()
        .zip(&inside)
        .map(|(&d, &s)| if s == 1 { -d as f32 } else { d as f32 })
        .collect();

    Ok(SdfField::from_raw(padded.min, cell, dims, padding, grid))
}

/// The three-tier point set used to validate a field against its mesh:
/// noisy surface points, near-surface normal offsets, and uniform far
/// samples in the padded box.
#[derive(Debug, Clone)]
pub struct SamplingTiers {
    pub surface_points: Vec<Point3<f64>>,
    pub near_points: Vec<Point3<f64>>,
    pub far_points: Vec<Point3<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TierConfig {
    pub surface_count: usize,
    pub near_count: usize,
    pub far_count: usize,
    /// Gaussian noise applied to tier-one surface samples.
    pub sigma_surf: f64,
    /// Half-width of the uniform normal offset band for tier two.
    pub band: f64,
    /// Padding fraction for the far-sample box.
    pub padding_frac: f64,
    pub seed: u64,
}

impl Default for TierConfig {
    fn default() -> Self {
        TierConfig {
            surface_count: 2000,
            near_count: 2000,
            far_count: 2000,
            sigma_surf: 0.0,
            band: 0.05,
            padding_frac: 0.1,
            seed: 0,
        }
    }
}

pub fn sample_tiers(mesh: &TriangleMesh, cfg: &TierConfig) -> SamplingTiers {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let padded = mesh
        .aabb()
        .padded(mesh.aabb().diagonal() * cfg.padding_frac);

    let gauss = |rng: &mut ChaCha8Rng| -> f64 {
        // Box-Muller; enough for validation noise.
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };

    let surface_points = sample_surface_with_normals(mesh, cfg.surface_count, &mut rng)
        .into_iter()
        .map(|s| {
            s.point
                + Vector3::new(gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)) * cfg.sigma_surf
        })
        .collect();

    let near_points = sample_surface_with_normals(mesh, cfg.near_count, &mut rng)
        .into_iter()
        .map(|s| {
            let offset = rng.random_range(-cfg.band..=cfg.band);
            s.point + s.normal * offset
        })
        .collect();

    let far_points = (0..cfg.far_count)
        .map(|_| {
            Point3::new(
                rng.random_range(padded.min.x..=padded.max.x),
                rng.random_range(padded.min.y..=padded.max.y),
                rng.random_range(padded.min.z..=padded.max.z),
            )
        })
        .collect();

    SamplingTiers {
        surface_points,
        near_points,
        far_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{icosphere, unit_cube};

    fn sphere_field(radius: f64, res: usize) -> (TriangleMesh, SdfField) {
        let mesh = icosphere(radius, 3);
        let field = build_sdf(&mesh, res, 0.1).unwrap();
        (mesh, field)
    }

    #[test]
    fn degenerate_mesh_rejected() {
        let flat = TriangleMesh::new(vec![Point3::origin(); 3], vec![[0, 1, 2]]);
        assert!(matches!(
            build_sdf(&flat, 32, 0.1),
            Err(SdfError::DegenerateMesh)
        ));
    }

    #[test]
    fn sphere_center_value() {
        // Analytic oracle: SDF of a radius-0.5 sphere at its center is -0.5.
        // The center is the cone apex of the distance field, so the ±0.02
        // window needs the full default resolution.
        let (_, field) = sphere_field(0.5, 96);
        let v = field.query(&Point3::origin());
        assert!((-0.52..=-0.48).contains(&v), "center value {v}");
    }

    #[test]
    fn value_at_mesh_vertex_is_small() {
        let (mesh, field) = sphere_field(0.5, 48);
        let v = field.query(&mesh.vertices[0]);
        assert!(
            v.abs() <= 1.5 * field.cell_size,
            "|{v}| vs cell {}",
            field.cell_size
        );
    }

    #[test]
    fn exterior_point_beyond_padding_uses_clamp_distance() {
        // Unit sphere, query at (2,0,0): analytic SDF = 1. The point lies
        // outside the padded box, so the clamped-query semantics must
        // reconstruct the distance within 5%.
        let (_, field) = sphere_field(1.0, 48);
        let v = field.query(&Point3::new(2.0, 0.0, 0.0));
        assert!((0.95..=1.05).contains(&v), "exterior value {v}");
    }

    #[test]
    fn node_and_midpoint_identities() {
        let (_, field) = sphere_field(0.5, 32);
        let v_node = field.query(&field.node_position(3, 4, 5));
        assert_eq!(v_node, field.node_value(3, 4, 5));

        let a = field.node_position(3, 4, 5);
        let b = field.node_position(4, 4, 5);
        let mid = nalgebra::center(&a, &b);
        let expect = 0.5 * (field.node_value(3, 4, 5) + field.node_value(4, 4, 5));
        assert!((field.query(&mid) - expect).abs() < 1e-12);
    }

    #[test]
    fn surface_samples_have_small_values() {
        let (mesh, field) = sphere_field(0.5, 48);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let pts = crate::geometry::sample_surface(&mesh, 1000, &mut rng);
        let mean_abs: f64 =
            pts.iter().map(|p| field.query(p).abs()).sum::<f64>() / pts.len() as f64;
        assert!(mean_abs < field.cell_size, "mean |value| {mean_abs}");
    }

    #[test]
    fn exterior_gradient_is_radial() {
        let (_, field) = sphere_field(1.0, 48);
        let g = field.gradient(&Point3::new(2.0, 0.0, 0.0));
        let cos = g.normalize().dot(&Vector3::x());
        assert!(cos.acos().to_degrees() < 5.0, "gradient {g:?}");
    }

    #[test]
    fn constant_field_gradient_zero() {
        let field = SdfField::from_raw(Point3::origin(), 0.1, [4, 4, 4], 0.0, vec![7.0; 64]);
        let g = field.gradient(&Point3::new(0.15, 0.2, 0.1));
        assert_eq!(g, Vector3::zeros());
    }

    #[test]
    fn gradient_matches_finite_differences_in_cell_interior() {
        let (_, field) = sphere_field(0.5, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bounds = field.bounds();
        let h = 1e-5 * field.cell_size;
        let mut checked = 0;
        while checked < 200 {
            let p = Point3::new(
                rng.random_range(bounds.min.x..bounds.max.x),
                rng.random_range(bounds.min.y..bounds.max.y),
                rng.random_range(bounds.min.z..bounds.max.z),
            );
            // Stay inside one cell so the interpolant is smooth across the stencil.
            let (cell, frac) = field.locate(&p);
            let _ = cell;
            if frac.iter().any(|&f| !(0.01..=0.99).contains(&f)) {
                continue;
            }
            checked += 1;
            let g = field.gradient(&p);
            for axis in 0..3 {
                let mut lo = p;
                let mut hi = p;
                lo[axis] -= h;
                hi[axis] += h;
                let fd = (field.query(&hi) - field.query(&lo)) / (2.0 * h);
                let scale = g[axis].abs().max(1.0);
                assert!(
                    (g[axis] - fd).abs() / scale < 1e-6,
                    "axis {axis}: analytic {} vs fd {fd}",
                    g[axis]
                );
            }
        }
    }

    #[test]
    fn sign_agrees_with_analytic_sphere_inside_test() {
        let (_, field) = sphere_field(0.5, 48);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut disagreements = 0;
        for _ in 0..10_000 {
            let p = Point3::new(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
            );
            let analytic: f64 = p.coords.norm() - 0.5;
            if analytic.abs() <= 1.5 * field.cell_size {
                continue; // near-surface band excluded
            }
            if (field.query(&p) < 0.0) != (analytic < 0.0) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn gradient_is_unit_norm_away_from_surface_and_medial_axis() {
        let (_, field) = sphere_field(0.5, 48);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let two_cells = 2.0 * field.cell_size;
        let mut checked = 0;
        while checked < 500 {
            let p = Point3::new(
                rng.random_range(-0.6..0.6),
                rng.random_range(-0.6..0.6),
                rng.random_range(-0.6..0.6),
            );
            let rho: f64 = p.coords.norm();
            // Stay 2+ cells from the surface, and far enough from the
            // center that the field curvature (1/radius, unbounded at the
            // medial point) is resolvable at this cell size.
            if (rho - 0.5).abs() < two_cells || rho < 9.0 * field.cell_size {
                continue;
            }
            checked += 1;
            let norm = field.gradient(&p).norm();
            assert!(
                (norm - 1.0).abs() <= 0.05,
                "gradient norm {norm} at radius {rho}"
            );
        }
    }

    #[test]
    fn query_is_lipschitz_up_to_grid_error() {
        let (_, field) = sphere_field(0.5, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let sample = |rng: &mut ChaCha8Rng| {
                Point3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            };
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            let lhs = (field.query(&a) - field.query(&b)).abs();
            assert!(lhs <= (a - b).norm() + 2.0 * field.cell_size);
        }
    }

    #[test]
    fn tier_counts_and_zero_noise() {
        let cube = unit_cube();
        let cfg = TierConfig {
            surface_count: 1000,
            near_count: 1000,
            far_count: 1000,
            sigma_surf: 0.0,
            ..TierConfig::default()
        };
        let tiers = sample_tiers(&cube, &cfg);
        assert_eq!(tiers.surface_points.len(), 1000);
        assert_eq!(tiers.near_points.len(), 1000);
        assert_eq!(tiers.far_points.len(), 1000);
        // σ_surf = 0 ⇒ tier-one points lie exactly on the cube faces.
        for p in &tiers.surface_points {
            assert!((0..3).any(|i| (p[i].abs() - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn near_tier_band_bound() {
        let cube = unit_cube();
        let field = build_sdf(&cube, 48, 0.1).unwrap();
        let cfg = TierConfig {
            band: 0.05,
            ..TierConfig::default()
        };
        let tiers = sample_tiers(&cube, &cfg);
        for p in &tiers.near_points {
            assert!(field.query(p).abs() <= 0.05 + 1.5 * field.cell_size);
        }
    }

    #[test]
    fn cache_round_trip() {
        let (_, field) = sphere_field(0.5, 24);
        let dir = std::env::temp_dir().join(format!("kinetree-sdf-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("part0.sdf");
        field.write_cache(&path).unwrap();
        let back = SdfField::read_cache(&path).unwrap();
        assert_eq!(back.resolution, field.resolution);
        assert_eq!(back.grid, field.grid);
        assert_eq!(back.origin, field.origin);
        assert_eq!(back.cell_size, field.cell_size);
        let _ = std::fs::remove_dir_all(&dir);
    }
}
