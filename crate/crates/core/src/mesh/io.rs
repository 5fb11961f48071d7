//! Mesh file I/O. OFF is the canonical interchange format (read and write);
//! Wavefront OBJ is accepted read-only for meshes produced elsewhere.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            other => Err(Error::MeshParse(format!(
                "cannot infer mesh format from extension {other:?} of {}; expected .off or .obj",
                path.display()
            ))),
        }
    }
}

/// Load a mesh from disk, inferring the format from the file extension.
/// The result passes the full validation set of [`TriMesh::new`].
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::MeshParse(format!("cannot read {}: {e}", path.display())))?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

/// Write a mesh as OFF with shortest round-trip float formatting; reloading
/// reproduces the vertex coordinates bit for bit.
pub fn save_off(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} 0", mesh.vertices().len(), mesh.faces().len()).unwrap();
    for v in mesh.vertices() {
        writeln!(out, "{} {} {}", v.x, v.y, v.z).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Meaningful lines of an OFF/OBJ file: comments stripped, blanks skipped.
fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
}

pub(crate) fn parse_off(text: &str) -> Result<TriMesh> {
    let mut lines = content_lines(text);
    let header = lines
        .next()
        .ok_or_else(|| Error::MeshParse("empty OFF file".into()))?;

    // The counts may share the header line ("OFF 8 12 18") or follow it.
    let counts_str = match header.strip_prefix("OFF") {
        Some(rest) if !rest.trim().is_empty() => rest.trim().to_string(),
        Some(_) => lines
            .next()
            .ok_or_else(|| Error::MeshParse("OFF file ends after header".into()))?
            .to_string(),
        None => return Err(Error::MeshParse("missing OFF header".into())),
    };
    let counts: Vec<usize> = counts_str
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::MeshParse(format!("bad OFF count {t:?}")))
        })
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(Error::MeshParse(format!(
            "OFF count line needs vertex and face counts, got {counts_str:?}"
        )));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| Error::MeshParse("OFF file truncated in vertex list".into()))?;
        vertices.push(parse_vertex(line)?);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines
            .next()
            .ok_or_else(|| Error::MeshParse("OFF file truncated in face list".into()))?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::MeshParse(format!("bad OFF face token {t:?}")))
            })
            .collect::<Result<_>>()?;
        if idx.is_empty() || idx.len() != idx[0] + 1 {
            return Err(Error::MeshParse(format!("malformed OFF face line {line:?}")));
        }
        push_polygon(&mut faces, &idx[1..])?;
    }
    TriMesh::new(vertices, faces)
}

pub(crate) fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in content_lines(text) {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let rest: Vec<&str> = tok.collect();
                vertices.push(parse_vertex(&rest.join(" "))?);
            }
            Some("f") => {
                let idx: Vec<usize> = tok
                    .map(|t| {
                        // "i", "i/j", "i/j/k", "i//k" all carry the vertex
                        // index first; OBJ indices are 1-based.
                        let first = t.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|_| {
                            Error::MeshParse(format!("bad OBJ face token {t:?}"))
                        })?;
                        if i < 1 {
                            return Err(Error::MeshParse(format!(
                                "OBJ vertex index {i} is not positive; relative indices are not supported"
                            )));
                        }
                        Ok(i as usize - 1)
                    })
                    .collect::<Result<_>>()?;
                push_polygon(&mut faces, &idx)?;
            }
            // Normals, texture coordinates, groups, materials: irrelevant here.
            Some(_) => {}
            None => {}
        }
    }
    TriMesh::new(vertices, faces)
}

fn parse_vertex(line: &str) -> Result<Vector3<f64>> {
    let coords: Vec<f64> = line
        .split_whitespace()
        .take(3)
        .map(|t| {
            t.parse()
                .map_err(|_| Error::MeshParse(format!("bad coordinate {t:?}")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != 3 {
        return Err(Error::MeshParse(format!(
            "vertex line {line:?} has fewer than 3 coordinates"
        )));
    }
    Ok(Vector3::new(coords[0], coords[1], coords[2]))
}

/// Fan-triangulate an n-gon face record (n >= 3).
fn push_polygon(faces: &mut Vec<[usize; 3]>, idx: &[usize]) -> Result<()> {
    if idx.len() < 3 {
        return Err(Error::MeshParse(format!(
            "face with {} vertices cannot be triangulated",
            idx.len()
        )));
    }
    for i in 1..idx.len() - 1 {
        faces.push([idx[0], idx[i], idx[i + 1]]);
    }
    Ok(())
}
