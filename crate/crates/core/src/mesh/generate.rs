//! Deterministic analytic test bodies: icosphere, ellipsoid, axis-aligned box.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Maximum icosphere refinement level accepted by the generators. Level 7 is
/// already 327 680 faces; dense kernel matrices beyond that do not fit in
/// ordinary memory.
pub const MAX_REFINEMENT: u32 = 7;

/// Icosphere with `20 * 4^refinement` faces, radius `radius`, centered at the
/// origin. Subdivision splits every edge at its midpoint and projects new
/// vertices back to the sphere; shared edges are welded through a midpoint
/// cache so the result is watertight by construction.
pub fn generate_sphere(radius: f64, refinement: u32) -> Result<TriMesh> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sphere radius must be positive and finite, got {radius}"
        )));
    }
    if refinement > MAX_REFINEMENT {
        return Err(Error::InvalidArgument(format!(
            "refinement {refinement} exceeds the supported maximum {MAX_REFINEMENT}"
        )));
    }
    let (mut vertices, mut faces) = icosahedron();
    for _ in 0..refinement {
        subdivide(&mut vertices, &mut faces);
    }
    for v in &mut vertices {
        *v *= radius / v.norm();
    }
    TriMesh::new(vertices, faces)
}

/// Axis-aligned ellipsoid with semi-axes `(a, b, c)` along x, y, z: an
/// icosphere scaled anisotropically. Vertices lie exactly on the ellipsoid.
pub fn generate_ellipsoid(a: f64, b: f64, c: f64, refinement: u32) -> Result<TriMesh> {
    for (name, s) in [("a", a), ("b", b), ("c", c)] {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ellipsoid semi-axis {name} must be positive and finite, got {s}"
            )));
        }
    }
    let sphere = generate_sphere(1.0, refinement)?;
    let scale = Vector3::new(a, b, c);
    let vertices: Vec<_> = sphere
        .vertices()
        .iter()
        .map(|v| v.component_mul(&scale))
        .collect();
    TriMesh::new(vertices, sphere.faces().to_vec())
}

/// Axis-aligned box `[-lx/2, lx/2] x [-ly/2, ly/2] x [-lz/2, lz/2]` with each
/// face split into a `divisions x divisions` quad grid, every quad into two
/// triangles. Vertices on shared edges are welded.
pub fn generate_box(lx: f64, ly: f64, lz: f64, divisions: u32) -> Result<TriMesh> {
    for (name, s) in [("lx", lx), ("ly", ly), ("lz", lz)] {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "box edge {name} must be positive and finite, got {s}"
            )));
        }
    }
    if divisions == 0 || divisions > 256 {
        return Err(Error::InvalidArgument(format!(
            "box divisions must be in 1..=256, got {divisions}"
        )));
    }
    let n = divisions as usize;
    let half = Vector3::new(lx / 2.0, ly / 2.0, lz / 2.0);

    // Weld by quantized lattice coordinates: every generated vertex sits on
    // the (i/n) grid, so an integer key is exact.
    let mut key_of = HashMap::<[i64; 3], usize>::new();
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    let mut vertex = |lattice: [i64; 3], vertices: &mut Vec<Vector3<f64>>| -> usize {
        *key_of.entry(lattice).or_insert_with(|| {
            let p = Vector3::new(
                lattice[0] as f64 / n as f64 * half.x,
                lattice[1] as f64 / n as f64 * half.y,
                lattice[2] as f64 / n as f64 * half.z,
            );
            vertices.push(p);
            vertices.len() - 1
        })
    };

    // For each face: a fixed axis at +-n, the two remaining axes sweep the
    // grid. `flip` chooses the diagonal orientation so normals point outward.
    for (axis, sign) in [(0usize, 1i64), (0, -1), (1, 1), (1, -1), (2, 1), (2, -1)] {
        let (u_axis, v_axis) = match axis {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        for i in 0..n as i64 {
            for j in 0..n as i64 {
                let mut corner = |di: i64, dj: i64| {
                    let mut lat = [0i64; 3];
                    lat[axis] = sign * n as i64;
                    lat[u_axis] = 2 * (i + di) - n as i64;
                    lat[v_axis] = 2 * (j + dj) - n as i64;
                    vertex(lat, &mut vertices)
                };
                let p00 = corner(0, 0);
                let p10 = corner(1, 0);
                let p01 = corner(0, 1);
                let p11 = corner(1, 1);
                if sign > 0 {
                    faces.push([p00, p10, p11]);
                    faces.push([p00, p11, p01]);
                } else {
                    faces.push([p00, p11, p10]);
                    faces.push([p00, p01, p11]);
                }
            }
        }
    }
    TriMesh::new(vertices, faces)
}

fn icosahedron() -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let verts = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let vertices = verts
        .iter()
        .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
        .collect();
    let faces = vec![
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
    (vertices, faces)
}

fn subdivide(vertices: &mut Vec<Vector3<f64>>, faces: &mut Vec<[usize; 3]>) {
    let mut midpoint_cache = HashMap::<(usize, usize), usize>::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint_cache.entry(key).or_insert_with(|| {
            let m = ((vertices[a] + vertices[b]) / 2.0).normalize();
            vertices.push(m);
            vertices.len() - 1
        })
    };
    let mut new_faces = Vec::with_capacity(faces.len() * 4);
    for &[a, b, c] in faces.iter() {
        let ab = midpoint(a, b, vertices);
        let bc = midpoint(b, c, vertices);
        let ca = midpoint(c, a, vertices);
        new_faces.push([a, ab, ca]);
        new_faces.push([b, bc, ab]);
        new_faces.push([c, ca, bc]);
        new_faces.push([ab, bc, ca]);
    }
    *faces = new_faces;
}
