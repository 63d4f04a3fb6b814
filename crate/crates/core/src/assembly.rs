//! Assembly ingestion: part validation, per-part statistics, symmetry
//! clustering by Chamfer distance, and the manifest file format.

use std::path::{Path, PathBuf};

use nalgebra::{Isometry3, Point3, Rotation3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{read_mesh, sample_surface, Aabb, TriangleMesh};
use crate::joints::JointType;

/// Fixed seed for part surface sampling so identical meshes produce
/// identical samples (and Chamfer distance exactly zero).
const CHAMFER_SAMPLE_SEED: u64 = 0x5eed_c0de;

/// Voxel resolution of the occupancy fallback used for non-watertight meshes.
const VOXEL_VOLUME_RESOLUTION: usize = 64;

/// One rigid part of an assembly.
#[derive(Debug, Clone)]
pub struct PartRecord {
    pub id: usize,
    pub name: String,
    pub mesh: TriangleMesh,
    pub world_transform: Isometry3<f64>,
    /// Alignment rotation carried through from upstream tooling; stored but
    /// not consumed by the pipeline.
    pub intrinsic_rotation: Rotation3<f64>,
    pub centroid: Point3<f64>,
    pub robust_volume: f64,
    pub aabb_extents: Vector3<f64>,
}

/// A set of validated parts plus assembly-level scale information.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub parts: Vec<PartRecord>,
    /// Diagonal of the union AABB; the scale reference for all relative
    /// tolerances.
    pub diagonal: f64,
}

impl Assembly {
    pub fn from_parts(parts: Vec<PartRecord>) -> Self {
        let mut bb = Aabb::empty();
        for p in &parts {
            bb = bb.union(&p.mesh.aabb());
        }
        let diagonal = if parts.is_empty() { 0.0 } else { bb.diagonal() };
        Assembly { parts, diagonal }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PartRejection {
    #[error("too few vertices: {count} < {min}")]
    TooFewVertices { count: usize, min: usize },
    #[error("degenerate spatial spread: extent {extent} < {min_spread} x max extent {max_extent}")]
    DegenerateSpread {
        extent: f64,
        max_extent: f64,
        min_spread: f64,
    },
    #[error("invalid faces (out-of-range or repeated vertex indices)")]
    InvalidFaces,
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("part {index} ({name}) rejected: {reason}")]
    PartRejected {
        index: usize,
        name: String,
        reason: PartRejection,
    },
    #[error("mesh load failed: {0}")]
    MeshIo(#[from] crate::geometry::MeshIoError),
    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("ground truth references unknown part {part}")]
    BadGroundTruthPart { part: usize },
}

/// Validation thresholds for ingested meshes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationConfig {
    pub min_vertices: usize,
    /// Minimum AABB extent along each axis as a fraction of the largest
    /// extent.
    pub min_spread: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            min_vertices: 10,
            min_spread: 1e-3,
        }
    }
}

/// Accept or reject a raw mesh: enough vertices, valid faces, and a
/// non-degenerate spatial spread along every axis.
pub fn validate_part(
    mesh: &TriangleMesh,
    min_vertices: usize,
    min_spread: f64,
) -> Result<(), PartRejection> {
    if !mesh.faces_valid() || mesh.faces.is_empty() {
        return Err(PartRejection::InvalidFaces);
    }
    if mesh.vertices.len() < min_vertices {
        return Err(PartRejection::TooFewVertices {
            count: mesh.vertices.len(),
            min: min_vertices,
        });
    }
    let ext = mesh.aabb().extents();
    let max_extent = ext.x.max(ext.y).max(ext.z);
    for i in 0..3 {
        if ext[i] < min_spread * max_extent {
            return Err(PartRejection::DegenerateSpread {
                extent: ext[i],
                max_extent,
                min_spread,
            });
        }
    }
    Ok(())
}

/// Per-part statistics: area-weighted surface centroid, a volume that is
/// positive even for open meshes, and AABB extents.
pub fn part_stats(mesh: &TriangleMesh) -> (Point3<f64>, f64, Vector3<f64>) {
    let centroid = mesh.surface_centroid();
    let volume = if mesh.is_watertight() {
        mesh.signed_volume()
    } else {
        mesh.voxel_volume(VOXEL_VOLUME_RESOLUTION)
    };
    // Occupancy can still come out zero for sliver geometry; floor it with
    // a fraction of the AABB volume so downstream mass terms stay positive.
    let ext = mesh.aabb().extents();
    let bb_volume = ext.x * ext.y * ext.z;
    let volume = if volume > 0.0 {
        volume
    } else {
        (bb_volume * 1e-3).max(f64::MIN_POSITIVE)
    };
    (centroid, volume, ext)
}

/// Build a [`PartRecord`] from a raw mesh, validating first.
pub fn make_part(
    id: usize,
    name: String,
    mesh: TriangleMesh,
    cfg: &ValidationConfig,
) -> Result<PartRecord, AssemblyError> {
    validate_part(&mesh, cfg.min_vertices, cfg.min_spread).map_err(|reason| {
        AssemblyError::PartRejected {
            index: id,
            name: name.clone(),
            reason,
        }
    })?;
    let (centroid, robust_volume, aabb_extents) = part_stats(&mesh);
    Ok(PartRecord {
        id,
        name,
        mesh,
        world_transform: Isometry3::identity(),
        intrinsic_rotation: Rotation3::identity(),
        centroid,
        robust_volume,
        aabb_extents,
    })
}

/// Symmetric mean squared nearest-neighbour distance between two point sets:
/// `mean_a min_b ‖a−b‖² + mean_b min_a ‖a−b‖²`.
pub fn chamfer_distance(
    points_a: &[Point3<f64>],
    points_b: &[Point3<f64>],
) -> Result<f64, AssemblyError> {
    if points_a.is_empty() || points_b.is_empty() {
        return Err(AssemblyError::EmptyPointSet);
    }
    let one_way = |from: &[Point3<f64>], to: &[Point3<f64>]| -> f64 {
        let total: f64 = from
            .iter()
            .map(|p| {
                to.iter()
                    .map(|q| (p - q).norm_squared())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        total / from.len() as f64
    };
    Ok(one_way(points_a, points_b) + one_way(points_b, points_a))
}

/// Surface samples of a part, re-centered at the part centroid. These feed
/// the pose-invariant Chamfer comparison.
pub fn centered_samples(part: &PartRecord, n: usize) -> Vec<Point3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(CHAMFER_SAMPLE_SEED);
    sample_surface(&part.mesh, n, &mut rng)
        .into_iter()
        .map(|p| Point3::from(p - part.centroid))
        .collect()
}

/// Partition of part ids into symmetry clusters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryClusters {
    pub clusters: Vec<Vec<usize>>,
    pub chamfer_threshold: f64,
}

impl SymmetryClusters {
    /// All-singleton clustering over `n` parts.
    pub fn singletons(n: usize) -> Self {
        SymmetryClusters {
            clusters: (0..n).map(|i| vec![i]).collect(),
            chamfer_threshold: 0.0,
        }
    }

    /// Index of the cluster containing `part`, if any.
    pub fn cluster_of(&self, part: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(&part))
    }

    /// True iff `a` and `b` sit in the same cluster of size ≥ 2.
    pub fn same_multi_cluster(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        self.clusters
            .iter()
            .any(|c| c.len() >= 2 && c.contains(&a) && c.contains(&b))
    }

    pub fn multi_clusters(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.clusters.iter().filter(|c| c.len() >= 2)
    }
}

/// Single-linkage clustering on pairwise centered Chamfer distance.
/// Deterministic given input order; clusters sorted by smallest member.
pub fn cluster_symmetric_parts(
    parts: &[PartRecord],
    threshold: f64,
    samples_per_part: usize,
) -> SymmetryClusters {
    let n = parts.len();
    let samples: Vec<Vec<Point3<f64>>> = parts
        .iter()
        .map(|p| centered_samples(p, samples_per_part))
        .collect();

    // Union-find over parts with edges where chamfer <= threshold.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = chamfer_distance(&samples[i], &samples[j]).expect("non-empty samples");
            if d <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = (ri.min(rj), ri.max(rj));
                    parent[hi] = lo;
                }
            }
        }
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    SymmetryClusters {
        clusters: groups.into_values().collect(),
        chamfer_threshold: threshold,
    }
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// One `parts[]` entry of a manifest file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestPart {
    pub mesh: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Ground-truth joint annotation for evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthEdge {
    pub parent: usize,
    pub child: usize,
    #[serde(rename = "type")]
    pub joint_type: JointType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<[f64; 3]>,
    pub origin: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub root: usize,
    pub edges: Vec<GroundTruthEdge>,
}

/// Assembly manifest: the JSON entry point of the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblyManifest {
    pub parts: Vec<ManifestPart>,
    #[serde(default = "default_units_scale")]
    pub units_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

fn default_units_scale() -> f64 {
    1.0
}

impl AssemblyManifest {
    pub fn load(path: &Path) -> Result<Self, AssemblyError> {
        let text = std::fs::read_to_string(path).map_err(|e| AssemblyError::Manifest {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let manifest: AssemblyManifest =
            serde_json::from_str(&text).map_err(|e| AssemblyError::Manifest {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        manifest.check(path)?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<(), AssemblyError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| AssemblyError::Manifest {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    fn check(&self, path: &Path) -> Result<(), AssemblyError> {
        if self.parts.is_empty() {
            return Err(AssemblyError::Manifest {
                path: path.display().to_string(),
                message: "manifest declares no parts".into(),
            });
        }
        if let Some(gt) = &self.ground_truth {
            if gt.root >= self.parts.len() {
                return Err(AssemblyError::BadGroundTruthPart { part: gt.root });
            }
            for e in &gt.edges {
                for p in [e.parent, e.child] {
                    if p >= self.parts.len() {
                        return Err(AssemblyError::BadGroundTruthPart { part: p });
                    }
                }
            }
        }
        Ok(())
    }

    /// Load all meshes (paths resolved relative to the manifest directory),
    /// apply `units_scale`, validate, and assemble.
    pub fn load_assembly(
        &self,
        manifest_path: &Path,
        cfg: &ValidationConfig,
    ) -> Result<Assembly, AssemblyError> {
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        let mut parts = Vec::with_capacity(self.parts.len());
        for (id, entry) in self.parts.iter().enumerate() {
            let path = if entry.mesh.is_absolute() {
                entry.mesh.clone()
            } else {
                base.join(&entry.mesh)
            };
            let mut mesh = read_mesh(&path)?;
            if self.units_scale != 1.0 {
                mesh = mesh.scaled(self.units_scale);
            }
            let name = entry.name.clone().unwrap_or_else(|| format!("part_{id}"));
            parts.push(make_part(id, name, mesh, cfg)?);
        }
        Ok(Assembly::from_parts(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{box_mesh, unit_cube};

    fn test_cfg() -> ValidationConfig {
        // Primitive test meshes have 8 vertices; relax the ingest floor.
        ValidationConfig {
            min_vertices: 4,
            ..ValidationConfig::default()
        }
    }

    fn cube_part(id: usize) -> PartRecord {
        make_part(id, format!("p{id}"), unit_cube(), &test_cfg()).unwrap()
    }

    #[test]
    fn validate_rejects_tiny_meshes() {
        // 3-vertex triangle vs min_vertices = 10.
        let tri = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        assert!(matches!(
            validate_part(&tri, 10, 0.01),
            Err(PartRejection::TooFewVertices { count: 3, min: 10 })
        ));
    }

    #[test]
    fn validate_accepts_cube() {
        assert!(validate_part(&unit_cube(), 4, 0.01).is_ok());
    }

    #[test]
    fn validate_rejects_flat_quad() {
        // Flat quad: z extent exactly 0, below any positive spread floor.
        let quad = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let ext = quad.aabb().extents();
        assert_eq!(ext.z, 0.0);
        assert!(matches!(
            validate_part(&quad, 3, 0.01),
            Err(PartRejection::DegenerateSpread { .. })
        ));
    }

    #[test]
    fn validate_rejects_bad_faces() {
        let broken = TriangleMesh::new(vec![Point3::origin(); 12], vec![[0, 1, 99]]);
        assert_eq!(
            validate_part(&broken, 3, 0.01),
            Err(PartRejection::InvalidFaces)
        );
    }

    #[test]
    fn stats_of_unit_cube() {
        let (c, v, e) = part_stats(&unit_cube());
        assert!(c.coords.norm() < 1e-9);
        assert!((v - 1.0).abs() < 1e-9);
        assert!((e - Vector3::new(1.0, 1.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn stats_of_translated_cube() {
        let moved = unit_cube().translated(&Vector3::new(2.0, 0.0, 0.0));
        let (c, v, _) = part_stats(&moved);
        assert!((c - Point3::new(2.0, 0.0, 0.0)).norm() < 1e-9);
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stats_of_tetrahedron_matches_analytic() {
        // Tetrahedron (0,0,0),(1,0,0),(0,1,0),(0,0,1): volume 1/6.
        let tet = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(0.0, 0.0, 1.0),
            ],
            vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        );
        assert!(tet.is_watertight());
        let (_, v, _) = part_stats(&tet);
        assert!((v - 1.0 / 6.0).abs() < 1e-9 / 6.0);
    }

    #[test]
    fn open_cube_volume_within_ten_percent() {
        let mut open = unit_cube();
        open.faces.truncate(10); // remove one quad (two triangles)
        assert!(!open.is_watertight());
        let (_, v, _) = part_stats(&open);

        // Independent voxel-count oracle at resolution 64 along the longest
        // extent, classifying voxel centers by a direct winding-number sum.
        let bb = open.aabb();
        let ext = bb.extents();
        let cell = ext.x.max(ext.y).max(ext.z) / 64.0;
        let dims = [
            (ext.x / cell).ceil() as usize,
            (ext.y / cell).ceil() as usize,
            (ext.z / cell).ceil() as usize,
        ];
        let mut count = 0usize;
        for ix in 0..dims[0] {
            for iy in 0..dims[1] {
                for iz in 0..dims[2] {
                    let p = Point3::new(
                        bb.min.x + (ix as f64 + 0.5) * cell,
                        bb.min.y + (iy as f64 + 0.5) * cell,
                        bb.min.z + (iz as f64 + 0.5) * cell,
                    );
                    if crate::geometry::winding_number(&open, &p) > 0.5 {
                        count += 1;
                    }
                }
            }
        }
        let oracle = count as f64 * cell.powi(3);
        assert!((v - oracle).abs() < 1e-9, "impl {v} vs oracle {oracle}");
        assert!((v - 1.0).abs() < 0.1, "volume {v} not within 10% of 1");
    }

    #[test]
    fn chamfer_identical_sets_zero() {
        let pts: Vec<Point3<f64>> = (0..50)
            .map(|i| Point3::new(i as f64 * 0.1, (i % 7) as f64, 0.0))
            .collect();
        assert_eq!(chamfer_distance(&pts, &pts).unwrap(), 0.0);
    }

    #[test]
    fn chamfer_singletons() {
        let a = vec![Point3::new(0.0, 0.0, 0.0)];
        let b = vec![Point3::new(1.0, 0.0, 0.0)];
        // Both directions contribute 1².
        assert!((chamfer_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chamfer_empty_set_errors() {
        let a = vec![Point3::origin()];
        assert!(matches!(
            chamfer_distance(&a, &[]),
            Err(AssemblyError::EmptyPointSet)
        ));
    }

    #[test]
    fn chamfer_rotated_symmetric_cube_stays_below_sampling_noise() {
        // 90° rotation about z maps the cube onto itself; the centered
        // Chamfer distance must look like two independent samplings of the
        // same surface, i.e. stay at the sampling-noise floor rather than a
        // shape difference. The brute-force oracle here IS the definition.
        let cube = cube_part(0);
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2);
        let rotated_mesh = TriangleMesh::new(
            cube.mesh.vertices.iter().map(|v| rot * v).collect(),
            cube.mesh.faces.clone(),
        );
        let rotated = make_part(1, "rot".into(), rotated_mesh, &test_cfg()).unwrap();

        let n = 2048;
        let a = centered_samples(&cube, n);
        let b = centered_samples(&rotated, n);
        let d_rotated = chamfer_distance(&a, &b).unwrap();

        // Noise floor: same surface, two different seeds.
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let resampled: Vec<Point3<f64>> = sample_surface(&cube.mesh, n, &mut rng)
            .into_iter()
            .map(|p| Point3::from(p - cube.centroid))
            .collect();
        let noise_floor = chamfer_distance(&a, &resampled).unwrap();

        assert!(
            d_rotated < 3.0 * noise_floor,
            "rotated {d_rotated} vs noise floor {noise_floor}"
        );
    }

    #[test]
    fn cluster_legs_and_torso() {
        // 4 identical legs + 1 larger torso.
        let leg = box_mesh(Point3::new(0.0, 0.0, 0.0), Point3::new(0.1, 0.1, 0.5));
        let torso = box_mesh(Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.6, 0.3));
        let mut parts = Vec::new();
        for i in 0..4 {
            let m = leg.translated(&Vector3::new(i as f64, 0.0, 0.0));
            parts.push(make_part(i, format!("leg{i}"), m, &test_cfg()).unwrap());
        }
        parts.push(make_part(4, "torso".into(), torso, &test_cfg()).unwrap());

        let clusters = cluster_symmetric_parts(&parts, 1e-6, 512);
        assert_eq!(clusters.clusters, vec![vec![0, 1, 2, 3], vec![4]]);
        assert!(clusters.same_multi_cluster(0, 3));
        assert!(!clusters.same_multi_cluster(0, 4));
    }

    #[test]
    fn cluster_all_distant_gives_singletons() {
        let mut parts = Vec::new();
        for i in 0..3 {
            let m = box_mesh(
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0 + i as f64, 0.5, 0.5),
            );
            parts.push(make_part(i, format!("p{i}"), m, &test_cfg()).unwrap());
        }
        let clusters = cluster_symmetric_parts(&parts, 1e-6, 256);
        assert_eq!(clusters.clusters, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn cluster_scaled_copy_is_separate() {
        let base = unit_cube();
        let parts = vec![
            make_part(0, "a".into(), base.clone(), &test_cfg()).unwrap(),
            make_part(
                1,
                "b".into(),
                base.translated(&Vector3::new(3.0, 0.0, 0.0)),
                &test_cfg(),
            )
            .unwrap(),
            make_part(2, "big".into(), base.scaled(2.0), &test_cfg()).unwrap(),
        ];
        let clusters = cluster_symmetric_parts(&parts, 1e-6, 512);
        assert_eq!(clusters.clusters, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn manifest_units_scale_applies_on_load() {
        let dir = std::env::temp_dir().join(format!("kinetree-units-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        crate::geometry::write_obj(&dir.join("cube.obj"), &unit_cube()).unwrap();
        let manifest = AssemblyManifest {
            parts: vec![ManifestPart {
                mesh: PathBuf::from("cube.obj"),
                name: None,
            }],
            units_scale: 2.0,
            ground_truth: None,
        };
        let path = dir.join("manifest.json");
        manifest.save(&path).unwrap();
        let loaded = AssemblyManifest::load(&path).unwrap();
        let assembly = loaded.load_assembly(&path, &test_cfg()).unwrap();
        let ext = assembly.parts[0].aabb_extents;
        assert!((ext - Vector3::new(2.0, 2.0, 2.0)).norm() < 1e-9);
        assert!((assembly.parts[0].robust_volume - 8.0).abs() < 1e-9);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn manifest_loads_binary_ply_parts() {
        let dir = std::env::temp_dir().join(format!("kinetree-ply-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        crate::geometry::write_ply(&dir.join("cube.ply"), &unit_cube()).unwrap();
        let manifest = AssemblyManifest {
            parts: vec![ManifestPart {
                mesh: PathBuf::from("cube.ply"),
                name: Some("c".into()),
            }],
            units_scale: 1.0,
            ground_truth: None,
        };
        let path = dir.join("manifest.json");
        manifest.save(&path).unwrap();
        let assembly = AssemblyManifest::load(&path)
            .unwrap()
            .load_assembly(&path, &test_cfg())
            .unwrap();
        assert_eq!(assembly.parts.len(), 1);
        assert!((assembly.parts[0].robust_volume - 1.0).abs() < 1e-5); // f32 storage
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn clustering_is_a_partition() {
        let mut parts = Vec::new();
        for i in 0..6 {
            let m = box_mesh(
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(0.3 + 0.2 * (i % 3) as f64, 0.4, 0.5),
            );
            parts.push(make_part(i, format!("p{i}"), m, &test_cfg()).unwrap());
        }
        let clusters = cluster_symmetric_parts(&parts, 1e-6, 256);
        let mut seen = vec![0usize; parts.len()];
        for c in &clusters.clusters {
            for &p in c {
                seen[p] += 1;
            }
        }
        assert!(seen.iter().all(|&k| k == 1));
    }
}
