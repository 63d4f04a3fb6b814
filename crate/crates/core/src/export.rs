//! URDF serialization: write the kinematic tree with joint parameters and
//! read it back (the reader inverts the writer on its own output).
//!
//! Frame conventions: every frame is world-aligned (rpy always zero). A
//! link's frame sits at the revolute pivot when its parent joint is
//! revolute, else at the part centroid, so revolute joint origins carry the
//! pivot and axes can be written numerically in world coordinates. Visual
//! origins undo the link frame so meshes stay in world coordinates.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{Point3, Unit, Vector3};
use thiserror::Error;

use crate::assembly::PartRecord;
use crate::geometry::write_obj;
use crate::joints::{JointSpec, JointType};
use crate::topology::{KinematicTree, TreeEdge};

#[derive(Debug, Error)]
pub enum UrdfError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("urdf parse error: {0}")]
    Parse(String),
    #[error("joint structure is not a tree: {0}")]
    NonTreeStructure(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrdfInertial {
    pub origin: [f64; 3],
    pub mass: f64,
    /// ixx, iyy, izz, ixy, ixz, iyz
    pub inertia: [f64; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrdfLink {
    pub name: String,
    pub mesh: Option<String>,
    pub visual_origin: [f64; 3],
    pub inertial: Option<UrdfInertial>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrdfLimit {
    pub lower: f64,
    pub upper: f64,
    pub effort: f64,
    pub velocity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrdfJoint {
    pub name: String,
    pub joint_type: JointType,
    pub parent: String,
    pub child: String,
    pub origin: [f64; 3],
    pub axis: Option<[f64; 3]>,
    pub limit: Option<UrdfLimit>,
}

/// A parsed (or constructed) URDF document.
#[derive(Debug, Clone, PartialEq)]
pub struct UrdfRobot {
    pub name: String,
    pub links: Vec<UrdfLink>,
    pub joints: Vec<UrdfJoint>,
}

/// Effort/velocity sentinels for simulators that require limits.
const EFFORT_SENTINEL: f64 = 1000000.0;
const VELOCITY_SENTINEL: f64 = 1000000.0;

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

fn fmt_vec(v: &[f64; 3]) -> String {
    format!("{} {} {}", fmt_f(v[0]), fmt_f(v[1]), fmt_f(v[2]))
}

fn sanitize(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.is_empty() {
        "link".to_string()
    } else {
        cleaned
    }
}

/// Mesh handling when writing the URDF bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshMode {
    /// Copy part meshes into `out_dir/meshes/` and reference them relatively.
    Copy,
    /// Reference the original mesh paths as given.
    Reference,
}

/// Construct the URDF document for a typed tree. Pure; does not touch the
/// filesystem.
pub fn build_urdf(
    tree: &KinematicTree,
    parts: &[PartRecord],
    mesh_refs: &[String],
    robot_name: &str,
    density: f64,
    prismatic_limit: f64,
) -> Result<UrdfRobot, UrdfError> {
    if !tree.is_spanning_arborescence() {
        return Err(UrdfError::InvalidTree(
            "expected a spanning arborescence".into(),
        ));
    }
    if parts.len() != tree.n_nodes || mesh_refs.len() != tree.n_nodes {
        return Err(UrdfError::InvalidTree(
            "parts/mesh references do not match node count".into(),
        ));
    }

    // Link reference frames: revolute children anchor at the pivot,
    // everything else at the part centroid.
    let mut frame = vec![Point3::origin(); tree.n_nodes];
    frame[tree.root] = parts[tree.root].centroid;
    let mut order: Vec<&TreeEdge> = tree.edges.iter().collect();
    order.sort_by_key(|e| (e.parent, e.child));
    // Process in BFS order so parents are framed before children.
    let depths = tree.depths();
    order.sort_by_key(|e| (depths[e.child], e.parent, e.child));
    for e in &order {
        frame[e.child] = match (e.joint.joint_type, e.joint.pivot_point()) {
            (JointType::Revolute, Some(p)) => p,
            _ => parts[e.child].centroid,
        };
    }

    // Sanitized names must stay unique or the document would alias links;
    // collisions get the part id appended.
    let link_names: Vec<String> = {
        let mut seen = std::collections::HashSet::new();
        parts
            .iter()
            .map(|p| {
                let base = sanitize(&p.name);
                let name = if seen.contains(&base) {
                    format!("{base}_{}", p.id)
                } else {
                    base
                };
                seen.insert(name.clone());
                name
            })
            .collect()
    };
    let link_name = |i: usize| link_names[i].clone();

    let mut links = Vec::with_capacity(tree.n_nodes);
    for i in 0..tree.n_nodes {
        let r = frame[i];
        let c = parts[i].centroid;
        let e = parts[i].aabb_extents;
        let mass = density * parts[i].robust_volume;
        links.push(UrdfLink {
            name: link_name(i),
            mesh: Some(mesh_refs[i].clone()),
            visual_origin: [-r.x, -r.y, -r.z],
            inertial: Some(UrdfInertial {
                origin: [c.x - r.x, c.y - r.y, c.z - r.z],
                mass,
                inertia: [
                    mass / 12.0 * (e.y * e.y + e.z * e.z),
                    mass / 12.0 * (e.x * e.x + e.z * e.z),
                    mass / 12.0 * (e.x * e.x + e.y * e.y),
                    0.0,
                    0.0,
                    0.0,
                ],
            }),
        });
    }

    let mut joints = Vec::with_capacity(tree.edges.len());
    let mut sorted_edges: Vec<&TreeEdge> = tree.edges.iter().collect();
    sorted_edges.sort_by_key(|e| (e.parent, e.child));
    for e in sorted_edges {
        let o = frame[e.child] - frame[e.parent];
        let (axis, limit) = match e.joint.joint_type {
            JointType::Fixed => (None, None),
            JointType::Revolute => (
                e.joint.axis,
                Some(UrdfLimit {
                    lower: -std::f64::consts::FRAC_PI_2,
                    upper: std::f64::consts::FRAC_PI_2,
                    effort: EFFORT_SENTINEL,
                    velocity: VELOCITY_SENTINEL,
                }),
            ),
            JointType::Prismatic => (
                e.joint.axis,
                Some(UrdfLimit {
                    lower: -prismatic_limit,
                    upper: prismatic_limit,
                    effort: EFFORT_SENTINEL,
                    velocity: VELOCITY_SENTINEL,
                }),
            ),
        };
        joints.push(UrdfJoint {
            name: format!("{}_to_{}", link_name(e.parent), link_name(e.child)),
            joint_type: e.joint.joint_type,
            parent: link_name(e.parent),
            child: link_name(e.child),
            origin: [o.x, o.y, o.z],
            axis,
            limit,
        });
    }

    Ok(UrdfRobot {
        name: sanitize(robot_name),
        links,
        joints,
    })
}

/// Deterministic XML serialization.
pub fn urdf_to_xml(robot: &UrdfRobot) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\"?>");
    let _ = writeln!(s, "<robot name=\"{}\">", robot.name);
    for link in &robot.links {
        let _ = writeln!(s, "  <link name=\"{}\">", link.name);
        if let Some(mesh) = &link.mesh {
            for tag in ["visual", "collision"] {
                let _ = writeln!(s, "    <{tag}>");
                let _ = writeln!(
                    s,
                    "      <origin xyz=\"{}\" rpy=\"0 0 0\"/>",
                    fmt_vec(&link.visual_origin)
                );
                let _ = writeln!(s, "      <geometry>");
                let _ = writeln!(s, "        <mesh filename=\"{mesh}\"/>");
                let _ = writeln!(s, "      </geometry>");
                let _ = writeln!(s, "    </{tag}>");
            }
        }
        if let Some(inertial) = &link.inertial {
            let _ = writeln!(s, "    <inertial>");
            let _ = writeln!(
                s,
                "      <origin xyz=\"{}\" rpy=\"0 0 0\"/>",
                fmt_vec(&inertial.origin)
            );
            let _ = writeln!(s, "      <mass value=\"{}\"/>", fmt_f(inertial.mass));
            let _ = writeln!(
                s,
                "      <inertia ixx=\"{}\" iyy=\"{}\" izz=\"{}\" ixy=\"{}\" ixz=\"{}\" iyz=\"{}\"/>",
                fmt_f(inertial.inertia[0]),
                fmt_f(inertial.inertia[1]),
                fmt_f(inertial.inertia[2]),
                fmt_f(inertial.inertia[3]),
                fmt_f(inertial.inertia[4]),
                fmt_f(inertial.inertia[5]),
            );
            let _ = writeln!(s, "    </inertial>");
        }
        let _ = writeln!(s, "  </link>");
    }
    for joint in &robot.joints {
        let _ = writeln!(
            s,
            "  <joint name=\"{}\" type=\"{}\">",
            joint.name, joint.joint_type
        );
        let _ = writeln!(
            s,
            "    <origin xyz=\"{}\" rpy=\"0 0 0\"/>",
            fmt_vec(&joint.origin)
        );
        let _ = writeln!(s, "    <parent link=\"{}\"/>", joint.parent);
        let _ = writeln!(s, "    <child link=\"{}\"/>", joint.child);
        if let Some(axis) = &joint.axis {
            let _ = writeln!(s, "    <axis xyz=\"{}\"/>", fmt_vec(axis));
        }
        if let Some(limit) = &joint.limit {
            let _ = writeln!(
                s,
                "    <limit lower=\"{}\" upper=\"{}\" effort=\"{}\" velocity=\"{}\"/>",
                fmt_f(limit.lower),
                fmt_f(limit.upper),
                fmt_f(limit.effort),
                fmt_f(limit.velocity)
            );
        }
        let _ = writeln!(s, "  </joint>");
    }
    let _ = writeln!(s, "</robot>");
    s
}

fn parse_vec3(text: &str) -> Result<[f64; 3], UrdfError> {
    let parts: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| UrdfError::Parse(format!("bad vector '{text}': {e}")))?;
    if parts.len() != 3 {
        return Err(UrdfError::Parse(format!(
            "expected 3 components in '{text}'"
        )));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn parse_origin(node: roxmltree::Node) -> Result<[f64; 3], UrdfError> {
    let xyz = node
        .attribute("xyz")
        .map(parse_vec3)
        .transpose()?
        .unwrap_or([0.0; 3]);
    if let Some(rpy) = node.attribute("rpy") {
        let rpy = parse_vec3(rpy)?;
        if rpy.iter().any(|&v| v != 0.0) {
            return Err(UrdfError::Parse(
                "rotated origins (nonzero rpy) are not supported".into(),
            ));
        }
    }
    Ok(xyz)
}

/// Parse a URDF document from XML text.
pub fn parse_urdf_str(xml: &str) -> Result<UrdfRobot, UrdfError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| UrdfError::Parse(e.to_string()))?;
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(UrdfError::Parse("root element must be <robot>".into()));
    }
    let name = robot.attribute("name").unwrap_or("robot").to_string();

    let mut links = Vec::new();
    let mut joints = Vec::new();
    for node in robot.children().filter(|n| n.is_element()) {
        match node.tag_name().name() {
            "link" => {
                let link_name = node
                    .attribute("name")
                    .ok_or_else(|| UrdfError::Parse("link without name".into()))?
                    .to_string();
                let mut mesh = None;
                let mut visual_origin = [0.0; 3];
                let mut inertial = None;
                for child in node.children().filter(|n| n.is_element()) {
                    match child.tag_name().name() {
                        "visual" => {
                            for v in child.children().filter(|n| n.is_element()) {
                                match v.tag_name().name() {
                                    "origin" => visual_origin = parse_origin(v)?,
                                    "geometry" => {
                                        for g in v.children().filter(|n| n.is_element()) {
                                            if g.tag_name().name() == "mesh" {
                                                mesh = g.attribute("filename").map(String::from);
                                            }
                                        }
                                    }
                                    _ => {}
                                }
                            }
                        }
                        "inertial" => {
                            let mut origin = [0.0; 3];
                            let mut mass = 0.0;
                            let mut inertia = [0.0; 6];
                            for v in child.children().filter(|n| n.is_element()) {
                                match v.tag_name().name() {
                                    "origin" => origin = parse_origin(v)?,
                                    "mass" => {
                                        mass = v
                                            .attribute("value")
                                            .and_then(|t| t.parse().ok())
                                            .unwrap_or(0.0)
                                    }
                                    "inertia" => {
                                        for (i, key) in ["ixx", "iyy", "izz", "ixy", "ixz", "iyz"]
                                            .iter()
                                            .enumerate()
                                        {
                                            inertia[i] = v
                                                .attribute(*key)
                                                .and_then(|t| t.parse().ok())
                                                .unwrap_or(0.0);
                                        }
                                    }
                                    _ => {}
                                }
                            }
                            inertial = Some(UrdfInertial {
                                origin,
                                mass,
                                inertia,
                            });
                        }
                        _ => {}
                    }
                }
                links.push(UrdfLink {
                    name: link_name,
                    mesh,
                    visual_origin,
                    inertial,
                });
            }
            "joint" => {
                let joint_name = node
                    .attribute("name")
                    .ok_or_else(|| UrdfError::Parse("joint without name".into()))?
                    .to_string();
                let joint_type = match node.attribute("type") {
                    Some("fixed") => JointType::Fixed,
                    Some("revolute") | Some("continuous") => JointType::Revolute,
                    Some("prismatic") => JointType::Prismatic,
                    other => {
                        return Err(UrdfError::Parse(format!(
                            "unsupported joint type {other:?}"
                        )))
                    }
                };
                let mut origin = [0.0; 3];
                let mut parent = None;
                let mut child = None;
                let mut axis = None;
                let mut limit = None;
                for v in node.children().filter(|n| n.is_element()) {
                    match v.tag_name().name() {
                        "origin" => origin = parse_origin(v)?,
                        "parent" => parent = v.attribute("link").map(String::from),
                        "child" => child = v.attribute("link").map(String::from),
                        "axis" => {
                            axis =
                                Some(parse_vec3(v.attribute("xyz").ok_or_else(|| {
                                    UrdfError::Parse("axis without xyz".into())
                                })?)?)
                        }
                        "limit" => {
                            let attr = |k: &str| v.attribute(k).and_then(|t| t.parse().ok());
                            limit = Some(UrdfLimit {
                                lower: attr("lower").unwrap_or(0.0),
                                upper: attr("upper").unwrap_or(0.0),
                                effort: attr("effort").unwrap_or(0.0),
                                velocity: attr("velocity").unwrap_or(0.0),
                            });
                        }
                        _ => {}
                    }
                }
                joints.push(UrdfJoint {
                    name: joint_name,
                    joint_type,
                    parent: parent
                        .ok_or_else(|| UrdfError::Parse("joint without parent".into()))?,
                    child: child.ok_or_else(|| UrdfError::Parse("joint without child".into()))?,
                    origin,
                    axis,
                    limit,
                });
            }
            _ => {}
        }
    }
    Ok(UrdfRobot {
        name,
        links,
        joints,
    })
}

pub fn read_urdf(path: &Path) -> Result<UrdfRobot, UrdfError> {
    let text = std::fs::read_to_string(path).map_err(|source| UrdfError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_urdf_str(&text)
}

pub fn write_urdf_file(robot: &UrdfRobot, path: &Path) -> Result<(), UrdfError> {
    std::fs::write(path, urdf_to_xml(robot)).map_err(|source| UrdfError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Kinematics recovered from a parsed URDF: the tree over link indices in
/// document order, with world-frame joint parameters.
#[derive(Debug, Clone)]
pub struct ExtractedKinematics {
    pub tree: KinematicTree,
    pub link_names: Vec<String>,
}

/// Invert the writer's frame conventions: link frames from visual origins,
/// centroids from inertial origins, pivots at revolute child frames.
pub fn extract_kinematics(robot: &UrdfRobot) -> Result<ExtractedKinematics, UrdfError> {
    let n = robot.links.len();
    let index_of = |name: &str| -> Result<usize, UrdfError> {
        robot
            .links
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| UrdfError::Parse(format!("joint references unknown link '{name}'")))
    };

    let mut parent_count = vec![0usize; n];
    let mut edges: Vec<(usize, usize, &UrdfJoint)> = Vec::new();
    for j in &robot.joints {
        let p = index_of(&j.parent)?;
        let c = index_of(&j.child)?;
        parent_count[c] += 1;
        if parent_count[c] > 1 {
            return Err(UrdfError::NonTreeStructure(format!(
                "link '{}' has multiple parents",
                j.child
            )));
        }
        edges.push((p, c, j));
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parent_count[i] == 0).collect();
    if roots.len() != 1 {
        return Err(UrdfError::NonTreeStructure(format!(
            "expected exactly one root link, found {}",
            roots.len()
        )));
    }
    let root = roots[0];

    // Link frames in world coordinates: the negated visual origin;
    // centroids shift by the inertial origin.
    let frame: Vec<Point3<f64>> = robot
        .links
        .iter()
        .map(|l| {
            Point3::new(
                -l.visual_origin[0],
                -l.visual_origin[1],
                -l.visual_origin[2],
            )
        })
        .collect();
    let centroid: Vec<Point3<f64>> = robot
        .links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let o = l
                .inertial
                .as_ref()
                .map(|inr| inr.origin)
                .unwrap_or([0.0; 3]);
            frame[i] + Vector3::new(o[0], o[1], o[2])
        })
        .collect();

    let mut tree_edges = Vec::new();
    for (p, c, j) in edges {
        let axis = j.axis.map(Vector3::from);
        let joint = match j.joint_type {
            JointType::Fixed => JointSpec::fixed(),
            JointType::Revolute => {
                let axis = axis.ok_or_else(|| {
                    UrdfError::Parse(format!("revolute joint '{}' missing axis", j.name))
                })?;
                JointSpec::revolute(Unit::new_normalize(axis), frame[c], 0.0)
            }
            JointType::Prismatic => {
                let axis = axis.ok_or_else(|| {
                    UrdfError::Parse(format!("prismatic joint '{}' missing axis", j.name))
                })?;
                JointSpec::prismatic(Unit::new_normalize(axis), 0.0)
            }
        };
        let o = centroid[c] - centroid[p];
        tree_edges.push(TreeEdge {
            parent: p,
            child: c,
            origin: [o.x, o.y, o.z],
            joint,
        });
    }
    tree_edges.sort_by_key(|e| (e.parent, e.child));

    let tree = KinematicTree {
        root,
        n_nodes: n,
        edges: tree_edges,
    };
    if !tree.is_spanning_arborescence() {
        return Err(UrdfError::NonTreeStructure(
            "joints do not form a spanning tree".into(),
        ));
    }
    Ok(ExtractedKinematics {
        tree,
        link_names: robot.links.iter().map(|l| l.name.clone()).collect(),
    })
}

/// Write the URDF bundle for a typed tree: the `.urdf` file plus (in copy
/// mode) the part meshes under `meshes/`.
#[allow(clippy::too_many_arguments)]
pub fn write_urdf(
    tree: &KinematicTree,
    parts: &[PartRecord],
    out_dir: &Path,
    robot_name: &str,
    density: f64,
    prismatic_limit: f64,
    mesh_mode: MeshMode,
    source_paths: &[PathBuf],
) -> Result<PathBuf, UrdfError> {
    let io_err = |path: &Path, source: std::io::Error| UrdfError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;

    let mesh_refs: Vec<String> = match mesh_mode {
        MeshMode::Copy => {
            let mesh_dir = out_dir.join("meshes");
            std::fs::create_dir_all(&mesh_dir).map_err(|e| io_err(&mesh_dir, e))?;
            let mut seen = std::collections::HashSet::new();
            parts
                .iter()
                .map(|p| {
                    let base = sanitize(&p.name);
                    let stem = if seen.contains(&base) {
                        format!("{base}_{}", p.id)
                    } else {
                        base
                    };
                    seen.insert(stem.clone());
                    let rel = format!("meshes/{stem}.obj");
                    let path = out_dir.join(&rel);
                    write_obj(&path, &p.mesh)
                        .map(|()| rel)
                        .map_err(|e| UrdfError::Io {
                            path: path.display().to_string(),
                            source: std::io::Error::other(e.to_string()),
                        })
                })
                .collect::<Result<_, _>>()?
        }
        MeshMode::Reference => {
            if source_paths.len() != parts.len() {
                return Err(UrdfError::InvalidTree(
                    "reference mode requires one source path per part".into(),
                ));
            }
            for path in source_paths {
                if !path.exists() {
                    return Err(UrdfError::Io {
                        path: path.display().to_string(),
                        source: std::io::Error::new(
                            std::io::ErrorKind::NotFound,
                            "referenced mesh missing",
                        ),
                    });
                }
            }
            source_paths
                .iter()
                .map(|p| p.display().to_string())
                .collect()
        }
    };

    let robot = build_urdf(
        tree,
        parts,
        &mesh_refs,
        robot_name,
        density,
        prismatic_limit,
    )?;
    let urdf_path = out_dir.join(format!("{}.urdf", sanitize(robot_name)));
    write_urdf_file(&robot, &urdf_path)?;
    Ok(urdf_path)
}
