use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

use super::mesh::TriangleMesh;

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: unsupported mesh format (expected .obj or .ply)")]
    UnsupportedFormat { path: String },
    #[error("{path}: non-triangular face (quads are rejected)")]
    NonTriangleFace { path: String },
}

/// Load a mesh by extension: Wavefront OBJ or binary little-endian PLY.
pub fn read_mesh(path: &Path) -> Result<TriangleMesh, MeshIoError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
    {
        Some(ext) if ext == "obj" => read_obj(path),
        Some(ext) if ext == "ply" => read_ply(path),
        _ => Err(MeshIoError::UnsupportedFormat {
            path: path.display().to_string(),
        }),
    }
}

pub fn read_obj(path: &Path) -> Result<TriangleMesh, MeshIoError> {
    let text = fs::read_to_string(path).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let p = path.display().to_string();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    *c = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| {
                        MeshIoError::Parse {
                            path: p.clone(),
                            line: lineno + 1,
                            message: "malformed vertex".into(),
                        }
                    })?;
                }
                vertices.push(Point3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let idx: Vec<&str> = it.collect();
                if idx.len() != 3 {
                    return Err(MeshIoError::NonTriangleFace { path: p });
                }
                let mut face = [0u32; 3];
                for (k, token) in idx.iter().enumerate() {
                    // "i", "i/t", "i//n", "i/t/n" all start with the vertex index.
                    let first = token.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| MeshIoError::Parse {
                        path: p.clone(),
                        line: lineno + 1,
                        message: format!("bad face index '{token}'"),
                    })?;
                    let resolved = if i < 0 {
                        vertices.len() as i64 + i
                    } else {
                        i - 1
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(MeshIoError::Parse {
                            path: p.clone(),
                            line: lineno + 1,
                            message: format!("face index {i} out of range"),
                        });
                    }
                    face[k] = resolved as u32;
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok(TriangleMesh::new(vertices, faces))
}

pub fn write_obj(path: &Path, mesh: &TriangleMesh) -> Result<(), MeshIoError> {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for f in &mesh.faces {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    fs::write(path, out).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Binary little-endian PLY reader. Accepts float/double vertex positions
/// and uchar/int-counted `vertex_indices` face lists; triangles only.
pub fn read_ply(path: &Path) -> Result<TriangleMesh, MeshIoError> {
    let mut data = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|source| MeshIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
    let p = path.display().to_string();
    let parse_err = |line: usize, message: String| MeshIoError::Parse {
        path: p.clone(),
        line,
        message,
    };

    // Header is ASCII lines up to "end_header".
    let header_end = find_subsequence(&data, b"end_header\n")
        .ok_or_else(|| parse_err(0, "missing end_header".into()))?
        + b"end_header\n".len();
    let header = std::str::from_utf8(&data[..header_end])
        .map_err(|_| parse_err(0, "non-utf8 header".into()))?;

    #[derive(Clone, Copy, PartialEq)]
    enum Scalar {
        F32,
        F64,
        U8,
        I8,
        U16,
        I16,
        U32,
        I32,
    }
    fn scalar(name: &str) -> Option<Scalar> {
        Some(match name {
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            "uchar" | "uint8" => Scalar::U8,
            "char" | "int8" => Scalar::I8,
            "ushort" | "uint16" => Scalar::U16,
            "short" | "int16" => Scalar::I16,
            "uint" | "uint32" => Scalar::U32,
            "int" | "int32" => Scalar::I32,
            _ => return None,
        })
    }
    fn width(s: Scalar) -> usize {
        match s {
            Scalar::U8 | Scalar::I8 => 1,
            Scalar::U16 | Scalar::I16 => 2,
            Scalar::F32 | Scalar::U32 | Scalar::I32 => 4,
            Scalar::F64 => 8,
        }
    }

    struct Element {
        name: String,
        count: usize,
        // (property name, scalar type) or list (count type, item type)
        props: Vec<(String, Scalar, Option<Scalar>)>,
    }

    let mut elements: Vec<Element> = Vec::new();
    let mut is_binary_le = false;
    for (lineno, line) in header.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["ply"] | ["comment", ..] | ["end_header"] => {}
            ["format", "binary_little_endian", _] => is_binary_le = true,
            ["format", other, _] => {
                return Err(parse_err(
                    lineno + 1,
                    format!("unsupported PLY format '{other}' (binary little-endian only)"),
                ));
            }
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| parse_err(lineno + 1, "bad element count".into()))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            ["property", "list", count_ty, item_ty, name] => {
                let ct = scalar(count_ty)
                    .ok_or_else(|| parse_err(lineno + 1, format!("unknown type {count_ty}")))?;
                let it = scalar(item_ty)
                    .ok_or_else(|| parse_err(lineno + 1, format!("unknown type {item_ty}")))?;
                elements
                    .last_mut()
                    .ok_or_else(|| parse_err(lineno + 1, "property before element".into()))?
                    .props
                    .push((name.to_string(), ct, Some(it)));
            }
            ["property", ty, name] => {
                let t = scalar(ty)
                    .ok_or_else(|| parse_err(lineno + 1, format!("unknown type {ty}")))?;
                elements
                    .last_mut()
                    .ok_or_else(|| parse_err(lineno + 1, "property before element".into()))?
                    .props
                    .push((name.to_string(), t, None));
            }
            [] => {}
            _ => {
                return Err(parse_err(
                    lineno + 1,
                    format!("unrecognized header line '{line}'"),
                ))
            }
        }
    }
    if !is_binary_le {
        return Err(parse_err(
            0,
            "missing 'format binary_little_endian' line".into(),
        ));
    }

    let mut cursor = header_end;
    let mut take = |n: usize| -> Result<&[u8], MeshIoError> {
        if cursor + n > data.len() {
            return Err(MeshIoError::Parse {
                path: p.clone(),
                line: 0,
                message: "unexpected end of binary payload".into(),
            });
        }
        let s = &data[cursor..cursor + n];
        cursor += n;
        Ok(s)
    };
    fn read_scalar(bytes: &[u8], s: Scalar) -> f64 {
        match s {
            Scalar::F32 => f32::from_le_bytes(bytes.try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(bytes.try_into().unwrap()),
            Scalar::U8 => bytes[0] as f64,
            Scalar::I8 => bytes[0] as i8 as f64,
            Scalar::U16 => u16::from_le_bytes(bytes.try_into().unwrap()) as f64,
            Scalar::I16 => i16::from_le_bytes(bytes.try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(bytes.try_into().unwrap()) as f64,
            Scalar::I32 => i32::from_le_bytes(bytes.try_into().unwrap()) as f64,
        }
    }

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for el in &elements {
        for _ in 0..el.count {
            let mut xyz = [f64::NAN; 3];
            for (name, ty, list_item) in &el.props {
                if let Some(item_ty) = list_item {
                    let n = read_scalar(take(width(*ty))?, *ty) as usize;
                    let mut items = Vec::with_capacity(n);
                    for _ in 0..n {
                        items.push(read_scalar(take(width(*item_ty))?, *item_ty));
                    }
                    if el.name == "face" && (name == "vertex_indices" || name == "vertex_index") {
                        if n != 3 {
                            return Err(MeshIoError::NonTriangleFace { path: p.clone() });
                        }
                        faces.push([items[0] as u32, items[1] as u32, items[2] as u32]);
                    }
                } else {
                    let v = read_scalar(take(width(*ty))?, *ty);
                    if el.name == "vertex" {
                        match name.as_str() {
                            "x" => xyz[0] = v,
                            "y" => xyz[1] = v,
                            "z" => xyz[2] = v,
                            _ => {}
                        }
                    }
                }
            }
            if el.name == "vertex" {
                vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
            }
        }
    }
    Ok(TriangleMesh::new(vertices, faces))
}

/// Binary little-endian PLY writer (float positions, uchar-counted faces).
pub fn write_ply(path: &Path, mesh: &TriangleMesh) -> Result<(), MeshIoError> {
    let mut out = Vec::new();
    out.extend_from_slice(
        format!(
            "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nelement face {}\nproperty list uchar uint vertex_indices\nend_header\n",
            mesh.vertices.len(),
            mesh.faces.len()
        )
        .as_bytes(),
    );
    for v in &mesh.vertices {
        for c in [v.x, v.y, v.z] {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
    }
    for f in &mesh.faces {
        out.push(3u8);
        for &i in f {
            out.extend_from_slice(&i.to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(&out).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn find_subsequence(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// One level of 1-to-4 midpoint subdivision with welded edge midpoints.
/// Preserves the surface exactly; used to densify coarse primitives.
pub fn subdivide(mesh: &TriangleMesh) -> TriangleMesh {
    let mut vertices = mesh.vertices.clone();
    let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
    let mut faces = Vec::with_capacity(mesh.faces.len() * 4);
    for f in &mesh.faces {
        let mut mid = [0u32; 3];
        for k in 0..3 {
            let a = f[k].min(f[(k + 1) % 3]);
            let b = f[k].max(f[(k + 1) % 3]);
            mid[k] = *midpoints.entry((a, b)).or_insert_with(|| {
                let m = nalgebra::center(&vertices[a as usize], &vertices[b as usize]);
                vertices.push(m);
                (vertices.len() - 1) as u32
            });
        }
        faces.push([f[0], mid[0], mid[2]]);
        faces.push([f[1], mid[1], mid[0]]);
        faces.push([f[2], mid[2], mid[1]]);
        faces.push([mid[0], mid[1], mid[2]]);
    }
    TriangleMesh::new(vertices, faces)
}

/// Axis-aligned box mesh spanning `min..max` (12 triangles, outward normals).
pub fn box_mesh(min: Point3<f64>, max: Point3<f64>) -> TriangleMesh {
    let v = vec![
        Point3::new(min.x, min.y, min.z),
        Point3::new(max.x, min.y, min.z),
        Point3::new(max.x, max.y, min.z),
        Point3::new(min.x, max.y, min.z),
        Point3::new(min.x, min.y, max.z),
        Point3::new(max.x, min.y, max.z),
        Point3::new(max.x, max.y, max.z),
        Point3::new(min.x, max.y, max.z),
    ];
    let faces = vec![
        [0, 2, 1],
        [0, 3, 2], // -z
        [4, 5, 6],
        [4, 6, 7], // +z
        [0, 1, 5],
        [0, 5, 4], // -y
        [3, 7, 6],
        [3, 6, 2], // +y
        [0, 4, 7],
        [0, 7, 3], // -x
        [1, 2, 6],
        [1, 6, 5], // +x
    ];
    TriangleMesh::new(v, faces)
}

/// Unit cube centered at the origin.
pub fn unit_cube() -> TriangleMesh {
    box_mesh(Point3::new(-0.5, -0.5, -0.5), Point3::new(0.5, 0.5, 0.5))
}

/// Closed cylinder of given radius/height along +z, centered at origin.
pub fn cylinder_mesh(radius: f64, height: f64, segments: usize) -> TriangleMesh {
    assert!(segments >= 3);
    let h = height / 2.0;
    let mut vertices = Vec::with_capacity(2 * segments + 2);
    for &z in &[-h, h] {
        for k in 0..segments {
            let a = 2.0 * std::f64::consts::PI * k as f64 / segments as f64;
            vertices.push(Point3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let bottom_center = vertices.len() as u32;
    vertices.push(Point3::new(0.0, 0.0, -h));
    let top_center = vertices.len() as u32;
    vertices.push(Point3::new(0.0, 0.0, h));

    let mut faces = Vec::new();
    let s = segments as u32;
    for k in 0..s {
        let k1 = (k + 1) % s;
        // side quad as two triangles, outward winding
        faces.push([k, k1, s + k1]);
        faces.push([k, s + k1, s + k]);
        // caps
        faces.push([bottom_center, k1, k]);
        faces.push([top_center, s + k, s + k1]);
    }
    TriangleMesh::new(vertices, faces)
}

/// Icosphere of given radius: icosahedron subdivided `subdivisions` times,
/// vertices projected to the sphere.
pub fn icosphere(radius: f64, subdivisions: usize) -> TriangleMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for k in 0..3 {
                let a = f[k].min(f[(k + 1) % 3]);
                let b = f[k].max(f[(k + 1) % 3]);
                mid[k] = *midpoints.entry((a, b)).or_insert_with(|| {
                    let m = (vertices[a as usize] + vertices[b as usize]).normalize();
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        faces = next;
    }

    TriangleMesh::new(
        vertices
            .into_iter()
            .map(|v| Point3::from(v * radius))
            .collect(),
        faces,
    )
}
