//! Procedural ground-truth assemblies for end-to-end validation: hinged
//! doors, sliding drawers, stacked turntable chains, and legged bodies,
//! each with a known tree and joint parameters.
//!
//! Every fixture keeps a uniform 2 mm clearance at its functional
//! interfaces so contact detection fires at default tolerances, and every
//! ground-truth joint moves freely over the virtual-motion range while
//! wrong-kind motions run into geometry.

use std::path::{Path, PathBuf};

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    make_part, AssemblyManifest, GroundTruth, GroundTruthEdge, ManifestPart, PartRecord,
    ValidationConfig,
};
use crate::geometry::{box_mesh, cylinder_mesh, subdivide, write_obj, TriangleMesh};
use crate::joints::JointType;

/// Interface clearance shared by all fixtures.
const GAP: f64 = 0.002;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    Chain,
    Star,
    MultiBranch,
    SymmetricLegs,
    Door,
    Drawer,
}

impl std::str::FromStr for Template {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Template::Chain),
            "star" => Ok(Template::Star),
            "multi-branch" => Ok(Template::MultiBranch),
            "symmetric-legs" => Ok(Template::SymmetricLegs),
            "door" => Ok(Template::Door),
            "drawer" => Ok(Template::Drawer),
            other => Err(format!(
                "unknown template '{other}' (chain|star|multi-branch|symmetric-legs|door|drawer)"
            )),
        }
    }
}

impl std::fmt::Display for Template {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Template::Chain => "chain",
            Template::Star => "star",
            Template::MultiBranch => "multi-branch",
            Template::SymmetricLegs => "symmetric-legs",
            Template::Door => "door",
            Template::Drawer => "drawer",
        };
        write!(f, "{name}")
    }
}

/// A generated assembly: validated parts plus ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticAssembly {
    pub template: Template,
    pub seed: u64,
    pub parts: Vec<PartRecord>,
    pub ground_truth: GroundTruth,
}

struct MeshUnion {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
}

impl MeshUnion {
    fn new() -> Self {
        MeshUnion {
            vertices: Vec::new(),
            faces: Vec::new(),
        }
    }

    fn add(&mut self, mesh: &TriangleMesh) -> &mut Self {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&mesh.vertices);
        self.faces.extend(
            mesh.faces
                .iter()
                .map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]),
        );
        self
    }

    fn boxed(&mut self, min: [f64; 3], max: [f64; 3]) -> &mut Self {
        // One subdivision level keeps even single-box parts above the
        // ingest vertex floor and improves sampling coverage.
        self.add(&subdivide(&box_mesh(Point3::from(min), Point3::from(max))))
    }

    fn cylinder(&mut self, center: [f64; 3], radius: f64, height: f64) -> &mut Self {
        self.add(&cylinder_mesh(radius, height, 48).translated(&Vector3::from(center)))
    }

    /// Closed rectangular tube extruded along x: outer walls, bore walls,
    /// and two end rings, one watertight mesh with no internal faces (a
    /// box tiling would bury seam faces inside the material and cap every
    /// measured penetration depth at the seam distance).
    fn rect_tube(
        &mut self,
        x0: f64,
        x1: f64,
        wy_in: f64,
        wz_in: f64,
        wy_out: f64,
        wz_out: f64,
    ) -> &mut Self {
        let mut vertices = Vec::with_capacity(16);
        for &x in &[x0, x1] {
            for &(wy, wz) in &[(wy_out, wz_out), (wy_in, wz_in)] {
                vertices.push(Point3::new(x, -wy, -wz));
                vertices.push(Point3::new(x, wy, -wz));
                vertices.push(Point3::new(x, wy, wz));
                vertices.push(Point3::new(x, -wy, wz));
            }
        }
        // Station s in {0,1}: outer ring at 8s+k, inner ring at 8s+4+k.
        let o = |s: u32, k: u32| 8 * s + (k % 4);
        let i = |s: u32, k: u32| 8 * s + 4 + (k % 4);
        let mut faces = Vec::with_capacity(32);
        for k in 0..4u32 {
            // Outer walls, outward normals.
            faces.push([o(0, k), o(0, k + 1), o(1, k + 1)]);
            faces.push([o(0, k), o(1, k + 1), o(1, k)]);
            // Bore walls, normals toward the bore.
            faces.push([i(0, k), i(1, k + 1), i(0, k + 1)]);
            faces.push([i(0, k), i(1, k), i(1, k + 1)]);
            // End ring at x0 (-x) and x1 (+x).
            faces.push([o(0, k), i(0, k), i(0, k + 1)]);
            faces.push([o(0, k), i(0, k + 1), o(0, k + 1)]);
            faces.push([o(1, k), i(1, k + 1), i(1, k)]);
            faces.push([o(1, k), o(1, k + 1), i(1, k + 1)]);
        }
        self.add(&subdivide(&subdivide(&TriangleMesh::new(vertices, faces))))
    }

    /// Square tube extruded along z (seamless, like [`Self::rect_tube`]):
    /// the captive collar used by pin joints.
    fn rect_tube_z(
        &mut self,
        cx: f64,
        cy: f64,
        a_in: f64,
        a_out: f64,
        z0: f64,
        z1: f64,
    ) -> &mut Self {
        let mut vertices = Vec::with_capacity(16);
        for &z in &[z0, z1] {
            for &a in &[a_out, a_in] {
                vertices.push(Point3::new(cx - a, cy - a, z));
                vertices.push(Point3::new(cx + a, cy - a, z));
                vertices.push(Point3::new(cx + a, cy + a, z));
                vertices.push(Point3::new(cx - a, cy + a, z));
            }
        }
        // Same index pattern as `rect_tube`: both ring orderings are
        // counterclockwise seen from the +extrusion axis.
        let o = |s: u32, k: u32| 8 * s + (k % 4);
        let i = |s: u32, k: u32| 8 * s + 4 + (k % 4);
        let mut faces = Vec::with_capacity(32);
        for k in 0..4u32 {
            faces.push([o(0, k), o(0, k + 1), o(1, k + 1)]);
            faces.push([o(0, k), o(1, k + 1), o(1, k)]);
            faces.push([i(0, k), i(1, k + 1), i(0, k + 1)]);
            faces.push([i(0, k), i(1, k), i(1, k + 1)]);
            faces.push([o(0, k), i(0, k), i(0, k + 1)]);
            faces.push([o(0, k), i(0, k + 1), o(0, k + 1)]);
            faces.push([o(1, k), i(1, k + 1), i(1, k)]);
            faces.push([o(1, k), o(1, k + 1), i(1, k + 1)]);
        }
        self.add(&subdivide(&subdivide(&TriangleMesh::new(vertices, faces))))
    }

    /// Closed annular tube along +z: outer wall, inner wall, and two end
    /// rings, with outward orientation.
    fn tube(&mut self, center_xy: [f64; 2], r_in: f64, r_out: f64, z0: f64, z1: f64) -> &mut Self {
        const SEGMENTS: usize = 48;
        let mut vertices = Vec::with_capacity(4 * SEGMENTS);
        let mut faces = Vec::new();
        // Ring layout: [outer@z0, outer@z1, inner@z0, inner@z1]
        for &(r, z) in &[(r_out, z0), (r_out, z1), (r_in, z0), (r_in, z1)] {
            for k in 0..SEGMENTS {
                let a = 2.0 * std::f64::consts::PI * k as f64 / SEGMENTS as f64;
                vertices.push(Point3::new(
                    center_xy[0] + r * a.cos(),
                    center_xy[1] + r * a.sin(),
                    z,
                ));
            }
        }
        let s = SEGMENTS as u32;
        let ring = |which: u32, k: u32| which * s + (k % s);
        for k in 0..s {
            // outer wall, outward normals
            faces.push([ring(0, k), ring(0, k + 1), ring(1, k + 1)]);
            faces.push([ring(0, k), ring(1, k + 1), ring(1, k)]);
            // inner wall, normals toward the bore
            faces.push([ring(2, k), ring(3, k + 1), ring(2, k + 1)]);
            faces.push([ring(2, k), ring(3, k), ring(3, k + 1)]);
            // bottom ring (normal -z)
            faces.push([ring(2, k), ring(0, k + 1), ring(0, k)]);
            faces.push([ring(2, k), ring(2, k + 1), ring(0, k + 1)]);
            // top ring (normal +z)
            faces.push([ring(3, k), ring(1, k), ring(1, k + 1)]);
            faces.push([ring(3, k), ring(1, k + 1), ring(3, k + 1)]);
        }
        self.add(&TriangleMesh::new(vertices, faces))
    }

    fn build(self) -> TriangleMesh {
        TriangleMesh::new(self.vertices, self.faces)
    }
}

struct Builder {
    parts: Vec<(String, TriangleMesh)>,
    edges: Vec<GroundTruthEdge>,
    root: usize,
}

impl Builder {
    fn new() -> Self {
        Builder {
            parts: Vec::new(),
            edges: Vec::new(),
            root: 0,
        }
    }

    fn part(&mut self, name: &str, mesh: TriangleMesh) -> usize {
        self.parts.push((name.to_string(), mesh));
        self.parts.len() - 1
    }

    fn joint(
        &mut self,
        parent: usize,
        child: usize,
        joint_type: JointType,
        axis: Option<[f64; 3]>,
        pivot: Option<[f64; 3]>,
    ) {
        self.edges.push(GroundTruthEdge {
            parent,
            child,
            joint_type,
            axis,
            pivot,
            origin: [0.0; 3], // filled in after part statistics
        });
    }

    fn finish(self, template: Template, seed: u64) -> SyntheticAssembly {
        let cfg = ValidationConfig::default();
        let parts: Vec<PartRecord> = self
            .parts
            .into_iter()
            .enumerate()
            .map(|(id, (name, mesh))| make_part(id, name, mesh, &cfg).expect("fixture part valid"))
            .collect();
        let mut edges = self.edges;
        for e in &mut edges {
            let o = parts[e.child].centroid - parts[e.parent].centroid;
            e.origin = [o.x, o.y, o.z];
        }
        edges.sort_by_key(|e| (e.parent, e.child));
        SyntheticAssembly {
            template,
            seed,
            parts,
            ground_truth: GroundTruth {
                root: self.root,
                edges,
            },
        }
    }
}

/// A hinge-barrel door: the barrel spins inside a cylindrical bore (exact
/// rotational invariance of the contact), while a mid-barrel flange sits in
/// a slot between the two bore sections so every translation collides or
/// separates immediately.
fn build_door(b: &mut Builder, scale: f64, panel_len: f64) {
    let s = scale;
    let r = 0.04 * s; // barrel radius
    let bore = r + GAP;
    let r_out = 0.1 * s;
    let flange_r = 0.07 * s;

    let mut frame = MeshUnion::new();
    frame.tube([0.0, 0.0], bore, r_out, 0.0, 0.2 * s);
    frame.tube([0.0, 0.0], bore, r_out, 0.35 * s, 0.55 * s);
    let frame_id = b.part("frame", frame.build());

    let mut door = MeshUnion::new();
    door.cylinder([0.0, 0.0, 0.375 * s], r, 0.75 * s);
    // Flange in the slot between the bore sections: blocks axial slides.
    door.cylinder([0.0, 0.0, 0.275 * s], flange_r, 0.15 * s - 2.0 * GAP);
    // Panel above the upper bore section, free to swing.
    door.boxed(
        [0.0, -0.006 * s, 0.57 * s],
        [panel_len, 0.006 * s, 0.73 * s],
    );
    let door_id = b.part("door", door.build());

    b.joint(
        frame_id,
        door_id,
        JointType::Revolute,
        Some([0.0, 0.0, 1.0]),
        Some([0.0, 0.0, 0.3 * s]),
    );
}

/// A telescoping rail: a flat bar inside a longer flat sleeve. The sleeve
/// out-spans the bar by more than the virtual travel, so true sliding keeps
/// every bar point in the bore (zero loss), while every rotation digs a
/// wide face into the slot walls and every cross translation collides.
fn build_drawer(b: &mut Builder, scale: f64) {
    let s = scale;
    let wy = 0.12 * s; // sleeve inner half-width (wide)
    let wz = 0.025 * s; // sleeve inner half-height (flat)
                        // Walls thicker than the largest virtual displacement, so cross slides
                        // and yaws register as collisions instead of tunneling through.
    let t = 0.12 * s;

    let mut cabinet = MeshUnion::new();
    cabinet.rect_tube(-0.6 * s, 0.6 * s, wy, wz, wy + t, wz + t);
    let cabinet_id = b.part("cabinet", cabinet.build());

    let mut drawer = MeshUnion::new();
    drawer.boxed(
        [-0.4 * s, -wy + GAP, -wz + GAP],
        [0.4 * s, wy - GAP, wz - GAP],
    );
    let drawer_id = b.part("drawer", drawer.build());

    b.joint(
        cabinet_id,
        drawer_id,
        JointType::Prismatic,
        Some([1.0, 0.0, 0.0]),
        None,
    );
}

/// Append a captive square-tube collar under a parent plate and return the
/// cylinder leg that hangs in it, its top disk 2 mm under the plate: a pure
/// spin joint about the leg's own vertical axis (a round pin in a square
/// bore keeps every collar point at constant radius), with tilts and cross
/// slides blocked by the bore walls.
fn collared_leg(
    parent_mesh: &mut MeshUnion,
    center: [f64; 2],
    radius: f64,
    z_bottom: f64,
    plate_bottom: f64,
) -> TriangleMesh {
    let [cx, cy] = center;
    let collar_h = 0.1;
    parent_mesh.rect_tube_z(
        cx,
        cy,
        radius + GAP,
        radius + GAP + 0.02,
        plate_bottom - collar_h,
        plate_bottom,
    );
    let height = plate_bottom - GAP - z_bottom;
    cylinder_mesh(radius, height, 48).translated(&Vector3::new(cx, cy, z_bottom + height / 2.0))
}

fn jitter(rng: &mut ChaCha8Rng) -> f64 {
    1.0 + rng.random_range(-0.1..0.1)
}

/// Deterministically generate a ground-truth assembly.
pub fn generate_synthetic(template: Template, seed: u64) -> SyntheticAssembly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5caf_f01d);
    let mut b = Builder::new();
    match template {
        Template::Door => {
            let s = jitter(&mut rng);
            let panel = 0.45 * s * jitter(&mut rng);
            build_door(&mut b, s, panel);
        }
        Template::Drawer => {
            let s = jitter(&mut rng);
            build_drawer(&mut b, s);
        }
        Template::Chain => {
            // Three plates stacked on pin-in-collar turntables. The middle
            // plate has the highest contact degree and is the base; both
            // joints spin about vertical pin axes.
            let s = jitter(&mut rng);
            let pin_r = 0.035 * s;
            let pin_h = 0.05 * s;
            let plate_t = 0.08 * s;
            let half = [0.22 * s, 0.18 * s, 0.14 * s];
            let off = [0.04 * s * jitter(&mut rng), -0.03 * s * jitter(&mut rng)];

            let mut z = 0.0;
            let mut pivots = Vec::new();
            let mut ids = Vec::new();
            for (i, &h) in half.iter().enumerate() {
                let mut m = MeshUnion::new();
                m.boxed([-h, -h, z], [h, h, z + plate_t]);
                if i + 1 < half.len() {
                    // Pin rising from this plate's top face.
                    let cx = off[i];
                    m.cylinder([cx, 0.0, z + plate_t + pin_h / 2.0], pin_r, pin_h);
                    pivots.push([cx, 0.0, z + plate_t + pin_h / 2.0]);
                }
                if i > 0 {
                    // Captive collar under this plate around the pin below.
                    let cx = off[i - 1];
                    m.rect_tube_z(
                        cx,
                        0.0,
                        pin_r + GAP,
                        pin_r + GAP + 0.02 * s,
                        z - pin_h + 2.0 * GAP,
                        z,
                    );
                }
                ids.push(b.part(&format!("plate_{i}"), m.build()));
                z += plate_t + pin_h + GAP;
            }
            b.root = 1; // middle plate: the max-degree node of the path
            b.joint(
                1,
                0,
                JointType::Revolute,
                Some([0.0, 0.0, 1.0]),
                Some(pivots[0]),
            );
            b.joint(
                1,
                2,
                JointType::Revolute,
                Some([0.0, 0.0, 1.0]),
                Some(pivots[1]),
            );
        }
        Template::Star | Template::SymmetricLegs => {
            // A plate with four hanging cylinder legs in two-slab collars.
            // Star uses four distinct leg sizes; symmetric-legs four copies
            // of one leg.
            let s = jitter(&mut rng);
            let plate_bottom = 0.4 * s;
            let mut body = MeshUnion::new();
            body.boxed(
                [-0.3 * s, -0.3 * s, plate_bottom],
                [0.3 * s, 0.3 * s, plate_bottom + 0.1 * s],
            );

            let corners = [
                [-0.2 * s, -0.2 * s],
                [0.2 * s, -0.2 * s],
                [-0.2 * s, 0.2 * s],
                [0.2 * s, 0.2 * s],
            ];
            let mut legs = Vec::new();
            for (i, &corner) in corners.iter().enumerate() {
                let (radius, z_bottom) = if template == Template::Star {
                    (
                        0.03 * s + 0.008 * s * i as f64,
                        0.04 * s + 0.05 * s * i as f64,
                    )
                } else {
                    (0.035 * s, 0.04 * s)
                };
                let mesh = collared_leg(&mut body, corner, radius, z_bottom, plate_bottom);
                legs.push((corner, mesh));
            }
            let body_id = b.part("body", body.build());
            for (i, (corner, mesh)) in legs.into_iter().enumerate() {
                let leg_id = b.part(&format!("leg_{i}"), mesh);
                b.joint(
                    body_id,
                    leg_id,
                    JointType::Revolute,
                    Some([0.0, 0.0, 1.0]),
                    Some([corner[0], corner[1], plate_bottom - GAP]),
                );
            }
        }
        Template::MultiBranch => {
            // A two-segment pendulum (arm, wrist) hanging coaxially from a
            // torso with a head, plus a torso pillar descending beside the
            // wrist at weak-contact range. First-reach orientation grabs
            // the wrist for the torso through the weak pillar contact; the
            // search keeps it on the arm, where the contact is strong and
            // the structure regular.
            let s = jitter(&mut rng);
            let axis_x = -0.2 * s;
            let arm_r = 0.025 * s;
            let wrist_r = 0.03 * s;
            let arm_z = (0.19 * s, 0.398 * s);
            let wrist_z = (0.04 * s, 0.188 * s);
            // Pillar face sits at ~0.6 of the contact tolerance from the
            // wrist surface: a real but weak contact. It stops below the
            // arm's collar so the spinning arm never grazes it.
            let pillar_face = axis_x - wrist_r - 0.0059 * s;

            let mut torso = MeshUnion::new();
            torso.boxed(
                [-0.35 * s, -0.15 * s, 0.4 * s],
                [0.35 * s, 0.15 * s, 0.52 * s],
            );
            torso.boxed(
                [pillar_face - 0.065 * s, -0.05 * s, 0.04 * s],
                [pillar_face, 0.05 * s, 0.12 * s],
            );
            // Captive collar around the arm's top end.
            torso.rect_tube_z(
                axis_x,
                0.0,
                arm_r + GAP,
                arm_r + GAP + 0.016 * s,
                0.35 * s,
                0.4 * s,
            );

            let mut arm = MeshUnion::new();
            arm.cylinder(
                [axis_x, 0.0, (arm_z.0 + arm_z.1) / 2.0],
                arm_r,
                arm_z.1 - arm_z.0,
            );
            // The arm's own collar around the wrist's top end.
            arm.rect_tube_z(
                axis_x,
                0.0,
                wrist_r + GAP,
                wrist_r + GAP + 0.016 * s,
                0.14 * s,
                arm_z.0,
            );

            let mut wrist = MeshUnion::new();
            wrist.cylinder(
                [axis_x, 0.0, (wrist_z.0 + wrist_z.1) / 2.0],
                wrist_r,
                wrist_z.1 - wrist_z.0,
            );

            let mut head = MeshUnion::new();
            head.boxed(
                [-0.15 * s, -0.1 * s, 0.522 * s],
                [0.05 * s, 0.1 * s, 0.64 * s],
            );

            let torso_id = b.part("torso", torso.build());
            let arm_id = b.part("arm", arm.build());
            let wrist_id = b.part("wrist", wrist.build());
            let head_id = b.part("head", head.build());

            b.joint(
                torso_id,
                arm_id,
                JointType::Revolute,
                Some([0.0, 0.0, 1.0]),
                Some([axis_x, 0.0, arm_z.1 + GAP]),
            );
            b.joint(
                arm_id,
                wrist_id,
                JointType::Revolute,
                Some([0.0, 0.0, 1.0]),
                Some([axis_x, 0.0, wrist_z.1 + GAP]),
            );
            b.joint(torso_id, head_id, JointType::Fixed, None, None);
        }
    }
    b.finish(template, seed)
}

/// Write the assembly to disk: OBJ meshes plus a `manifest.json` carrying
/// the ground truth. Returns the manifest path.
pub fn write_synthetic(assembly: &SyntheticAssembly, dir: &Path) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut manifest_parts = Vec::new();
    for part in &assembly.parts {
        let file = format!("{}.obj", part.name);
        write_obj(&dir.join(&file), &part.mesh)
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        manifest_parts.push(ManifestPart {
            mesh: PathBuf::from(file),
            name: Some(part.name.clone()),
        });
    }
    let manifest = AssemblyManifest {
        parts: manifest_parts,
        units_scale: 1.0,
        ground_truth: Some(assembly.ground_truth.clone()),
    };
    let path = dir.join("manifest.json");
    manifest
        .save(&path)
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::chamfer_distance;

    #[test]
    fn chain_is_a_path_with_two_revolute_joints() {
        let a = generate_synthetic(Template::Chain, 0);
        assert_eq!(a.parts.len(), 3);
        assert_eq!(a.ground_truth.edges.len(), 2);
        assert_eq!(a.ground_truth.root, 1);
        let pairs: Vec<(usize, usize)> = a
            .ground_truth
            .edges
            .iter()
            .map(|e| (e.parent, e.child))
            .collect();
        assert_eq!(pairs, vec![(1, 0), (1, 2)]);
        assert!(a
            .ground_truth
            .edges
            .iter()
            .all(|e| e.joint_type == JointType::Revolute));
    }

    #[test]
    fn symmetric_legs_are_chamfer_identical() {
        let a = generate_synthetic(Template::SymmetricLegs, 3);
        assert_eq!(a.parts.len(), 5);
        // Legs are ids 1..=4; pairwise centered Chamfer distance is exactly
        // zero because the meshes are identical up to translation.
        for i in 1..5 {
            for j in (i + 1)..5 {
                let si = crate::assembly::centered_samples(&a.parts[i], 256);
                let sj = crate::assembly::centered_samples(&a.parts[j], 256);
                let d = chamfer_distance(&si, &sj).unwrap();
                assert!(d <= 1e-9, "legs {i},{j} differ by {d}");
            }
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let base = std::env::temp_dir().join(format!("kinetree-gen-{}", std::process::id()));
        let dir_a = base.join("a");
        let dir_b = base.join("b");
        for dir in [&dir_a, &dir_b] {
            let a = generate_synthetic(Template::MultiBranch, 42);
            write_synthetic(&a, dir).unwrap();
        }
        let read_all = |dir: &Path| -> Vec<(String, Vec<u8>)> {
            let mut files: Vec<_> = std::fs::read_dir(dir)
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            files.sort();
            files
                .into_iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(&p).unwrap(),
                    )
                })
                .collect()
        };
        assert_eq!(read_all(&dir_a), read_all(&dir_b));
        let _ = std::fs::remove_dir_all(&base);
    }

    #[test]
    fn all_templates_generate_valid_parts() {
        for template in [
            Template::Chain,
            Template::Star,
            Template::MultiBranch,
            Template::SymmetricLegs,
            Template::Door,
            Template::Drawer,
        ] {
            let a = generate_synthetic(template, 7);
            assert!(!a.parts.is_empty(), "{template}: no parts");
            for p in &a.parts {
                assert!(p.robust_volume > 0.0);
                assert!(p.aabb_extents.iter().all(|&e| e > 0.0));
            }
            for e in &a.ground_truth.edges {
                assert!(e.parent < a.parts.len() && e.child < a.parts.len());
            }
        }
    }
}
