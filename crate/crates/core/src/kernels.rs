//! Panel-collocation discretizations of the Laplace layer kernels on a
//! triangulated surface: the single-layer kernel 1/r and the double-layer
//! kernel psi(t, s) = d/dN_t (1/r_ts), together with iterated application of
//! the double-layer operator, the Gauss-identity quality metric and a binary
//! cache format.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    SingleLayer,
    DoubleLayer,
}

/// Which argument of psi carries the normal when the double-layer operator is
/// applied as a map on surface fields. `NormalAtOutput` evaluates
/// `(Psi f)(t) = sum_t' area(t') psi(t, t') f(t')` and is the default; the
/// transposed variant is kept for auditing the series definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainOrdering {
    #[default]
    NormalAtOutput,
    NormalAtInput,
}

/// Dense collocation matrix of one layer kernel, tied to its source mesh by
/// the mesh fingerprint. Row-major storage.
///
/// Conventions (fixed by the assembly routines):
/// * single layer: `entries[s][t] ≈ ∫_panel_t dA(y) / |x_s − y|` — the source
///   panel area is folded in; the diagonal is the analytic flat-triangle
///   self-integral evaluated at the centroid.
/// * double layer: `entries[t][s] = psi(t, s)` pointwise without area weight;
///   the diagonal is chosen so that every column satisfies the Gauss identity
///   `sum_t area(t) psi(t, s) = −2π` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    kind: KernelKind,
    n: usize,
    entries: Vec<f64>,
    areas: Vec<f64>,
    mesh_id: u64,
}

/// A scalar field sampled at panel centroids, tied to its mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceField {
    values: Vec<f64>,
    mesh_id: u64,
}

impl SurfaceField {
    pub fn from_values(mesh: &TriMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_panels() {
            return Err(Error::InvalidArgument(format!(
                "field length {} does not match panel count {}",
                values.len(),
                mesh.num_panels()
            )));
        }
        Ok(Self {
            values,
            mesh_id: mesh.id(),
        })
    }

    pub fn constant(mesh: &TriMesh, value: f64) -> Self {
        Self {
            values: vec![value; mesh.num_panels()],
            mesh_id: mesh.id(),
        }
    }

    pub fn from_fn(mesh: &TriMesh, f: impl FnMut(&crate::mesh::PanelData) -> f64) -> Self {
        Self {
            values: mesh.panels().iter().map(f).collect(),
            mesh_id: mesh.id(),
        }
    }

    /// Cartesian component of the outward unit normal as a scalar field.
    pub fn normal_component(mesh: &TriMesh, axis: usize) -> Self {
        Self::from_fn(mesh, |p| p.normal[axis])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }
}

/// Pointwise double-layer kernel: the normal derivative at (`x_t`, `normal_t`)
/// of the potential 1/|x − x_s|, i.e. `normal_t · (x_s − x_t) / |x_s − x_t|³`.
pub fn double_layer_kernel(x_t: Vector3<f64>, normal_t: Vector3<f64>, x_s: Vector3<f64>) -> f64 {
    let d = x_s - x_t;
    let r = d.norm();
    normal_t.dot(&d) / (r * r * r)
}

/// Analytic integral of 1/|p − y| over a flat triangle (a, b, c) with p the
/// in-plane centroid: per-edge closed form of the planar polygon potential.
fn triangle_self_potential(a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>) -> f64 {
    let p = (a + b + c) / 3.0;
    let mut total = 0.0;
    for (ea, eb) in [(a, b), (b, c), (c, a)] {
        let e = (eb - ea).normalize();
        let s_a = (ea - p).dot(&e);
        let s_b = (eb - p).dot(&e);
        let perp = (ea - p) - s_a * e;
        let d = perp.norm();
        if d > 0.0 {
            total += d * ((s_b / d).asinh() - (s_a / d).asinh());
        }
    }
    total
}

impl KernelMatrix {
    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    fn check_field(&self, f: &SurfaceField) -> Result<()> {
        if f.mesh_id != self.mesh_id || f.values.len() != self.n {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }

    /// One application of the discretized operator:
    /// single layer `(G f)(s) = Σ_t entries[s][t] f(t)` (area already folded
    /// in), double layer under the given chain ordering with explicit area
    /// weights.
    pub fn apply_with(&self, f: &SurfaceField, ordering: ChainOrdering) -> Result<SurfaceField> {
        self.check_field(f)?;
        let n = self.n;
        let mut out = vec![0.0; n];
        match (self.kind, ordering) {
            (KernelKind::SingleLayer, _) => {
                out.par_iter_mut().enumerate().for_each(|(s, o)| {
                    let row = &self.entries[s * n..(s + 1) * n];
                    *o = row
                        .iter()
                        .zip(&f.values)
                        .map(|(e, v)| e * v)
                        .sum::<f64>();
                });
            }
            (KernelKind::DoubleLayer, ChainOrdering::NormalAtOutput) => {
                out.par_iter_mut().enumerate().for_each(|(t, o)| {
                    let row = &self.entries[t * n..(t + 1) * n];
                    let mut acc = 0.0;
                    for (tp, &entry) in row.iter().enumerate() {
                        acc += self.areas[tp] * entry * f.values[tp];
                    }
                    *o = acc;
                });
            }
            (KernelKind::DoubleLayer, ChainOrdering::NormalAtInput) => {
                out.par_iter_mut().enumerate().for_each(|(s, o)| {
                    let mut acc = 0.0;
                    for t in 0..n {
                        acc += self.areas[t] * self.entries[t * n + s] * f.values[t];
                    }
                    *o = acc;
                });
            }
        }
        Ok(SurfaceField {
            values: out,
            mesh_id: self.mesh_id,
        })
    }

    pub fn apply(&self, f: &SurfaceField) -> Result<SurfaceField> {
        self.apply_with(f, ChainOrdering::default())
    }

    /// Serialize as a 16-byte header (magic `SBKM`, little-endian u32 panel
    /// count, u32 kind tag, zero padding) followed by the row-major entries as
    /// little-endian f64. Reload is bit-identical.
    pub fn write_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + self.entries.len() * 8);
        buf.extend_from_slice(b"SBKM");
        buf.extend_from_slice(&(self.n as u32).to_le_bytes());
        let kind_tag: u32 = match self.kind {
            KernelKind::SingleLayer => 0,
            KernelKind::DoubleLayer => 1,
        };
        buf.extend_from_slice(&kind_tag.to_le_bytes());
        buf.extend_from_slice(&[0u8; 4]);
        for e in &self.entries {
            buf.extend_from_slice(&e.to_le_bytes());
        }
        fs::write(path, buf)?;
        Ok(())
    }

    /// Load a matrix dump produced by [`write_dump`](Self::write_dump),
    /// re-attaching it to the mesh it was assembled from.
    pub fn read_dump(path: impl AsRef<Path>, mesh: &TriMesh) -> Result<Self> {
        let buf = fs::read(path.as_ref())?;
        if buf.len() < 16 || &buf[0..4] != b"SBKM" {
            return Err(Error::InvalidArgument(format!(
                "{} is not a kernel matrix dump (bad magic)",
                path.as_ref().display()
            )));
        }
        let n = u32::from_le_bytes(buf[4..8].try_into().unwrap()) as usize;
        let kind = match u32::from_le_bytes(buf[8..12].try_into().unwrap()) {
            0 => KernelKind::SingleLayer,
            1 => KernelKind::DoubleLayer,
            k => {
                return Err(Error::InvalidArgument(format!(
                    "unknown kernel kind tag {k}"
                )))
            }
        };
        if n != mesh.num_panels() {
            return Err(Error::MeshMismatch);
        }
        if buf.len() != 16 + n * n * 8 {
            return Err(Error::InvalidArgument(format!(
                "dump payload is {} bytes, expected {}",
                buf.len() - 16,
                n * n * 8
            )));
        }
        let entries = buf[16..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            kind,
            n,
            entries,
            areas: mesh.panels().iter().map(|p| p.area).collect(),
            mesh_id: mesh.id(),
        })
    }
}

/// Packed (row, col) index of the lexicographically first coincident-centroid
/// pair found during parallel assembly, or u64::MAX when none.
fn record_coincidence(flag: &AtomicU64, s: usize, t: usize, n: usize) {
    flag.fetch_min((s * n + t) as u64, Ordering::Relaxed);
}

fn coincidence_error(flag: AtomicU64, n: usize) -> Option<Error> {
    let v = flag.into_inner();
    if v == u64::MAX {
        None
    } else {
        Some(Error::DegenerateMesh(format!(
            "panels {} and {} have coincident centroids",
            v as usize / n,
            v as usize % n
        )))
    }
}

/// Dense single-layer matrix: off-diagonal entries `area_t / r_st` (centroid
/// rule), diagonal entries the analytic flat-triangle self-integral.
pub fn assemble_single_layer(mesh: &TriMesh) -> Result<KernelMatrix> {
    let n = mesh.num_panels();
    let panels = mesh.panels();
    let vertices = mesh.vertices();
    let faces = mesh.faces();
    let mut entries = vec![0.0; n * n];
    let bad = AtomicU64::new(u64::MAX);
    entries
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(s, row)| {
            let xs = panels[s].centroid;
            for (t, e) in row.iter_mut().enumerate() {
                if t == s {
                    let f = faces[s];
                    *e = triangle_self_potential(vertices[f[0]], vertices[f[1]], vertices[f[2]]);
                } else {
                    let r = (xs - panels[t].centroid).norm();
                    if r == 0.0 {
                        record_coincidence(&bad, s, t, n);
                        continue;
                    }
                    *e = panels[t].area / r;
                }
            }
        });
    if let Some(err) = coincidence_error(bad, n) {
        return Err(err);
    }
    Ok(KernelMatrix {
        kind: KernelKind::SingleLayer,
        n,
        entries,
        areas: panels.iter().map(|p| p.area).collect(),
        mesh_id: mesh.id(),
    })
}

/// Dense double-layer matrix: `entries[t][s] = psi(t, s)` off the diagonal;
/// each diagonal entry is then set so the area-weighted column sum equals
/// −2π exactly (deflation), which is the discrete Gauss identity the series
/// formulas rely on.
pub fn assemble_double_layer(mesh: &TriMesh) -> Result<KernelMatrix> {
    let n = mesh.num_panels();
    let panels = mesh.panels();
    let mut entries = vec![0.0; n * n];
    let bad = AtomicU64::new(u64::MAX);
    entries
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(t, row)| {
            let xt = panels[t].centroid;
            let nt = panels[t].normal;
            for (s, e) in row.iter_mut().enumerate() {
                if s == t {
                    continue; // set by deflation below
                }
                let d = panels[s].centroid - xt;
                let r2 = d.norm_squared();
                if r2 == 0.0 {
                    record_coincidence(&bad, t, s, n);
                    continue;
                }
                *e = nt.dot(&d) / (r2 * r2.sqrt());
            }
        });
    if let Some(err) = coincidence_error(bad, n) {
        return Err(err);
    }
    // Deflation: columns are independent, the inner sum runs in fixed order.
    let diag: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut col_sum = 0.0;
            for t in 0..n {
                if t != s {
                    col_sum += panels[t].area * entries[t * n + s];
                }
            }
            (-2.0 * std::f64::consts::PI - col_sum) / panels[s].area
        })
        .collect();
    for (s, d) in diag.into_iter().enumerate() {
        entries[s * n + s] = d;
    }
    Ok(KernelMatrix {
        kind: KernelKind::DoubleLayer,
        n,
        entries,
        areas: panels.iter().map(|p| p.area).collect(),
        mesh_id: mesh.id(),
    })
}

/// `Psi^m f` under the given chain ordering; `m = 0` is the identity.
pub fn apply_iterated_with(
    psi: &KernelMatrix,
    f: &SurfaceField,
    m: usize,
    ordering: ChainOrdering,
) -> Result<SurfaceField> {
    if psi.kind != KernelKind::DoubleLayer {
        return Err(Error::InvalidArgument(
            "iterated application is defined for the double-layer matrix".into(),
        ));
    }
    psi.check_field(f)?;
    let mut g = f.clone();
    for _ in 0..m {
        g = psi.apply_with(&g, ordering)?;
    }
    Ok(g)
}

/// `Psi^m f` under the default ordering.
pub fn apply_iterated(psi: &KernelMatrix, f: &SurfaceField, m: usize) -> Result<SurfaceField> {
    apply_iterated_with(psi, f, m, ChainOrdering::default())
}

/// Quadrature-quality metric: the largest relative deviation of the raw
/// (pre-deflation) column sums from the Gauss identity value −2π. The
/// deflated diagonal absorbs exactly this deviation, so it is recovered as
/// `max_s |diag_s| area_s / 2π`.
pub fn gauss_residual(psi: &KernelMatrix) -> Result<f64> {
    if psi.kind != KernelKind::DoubleLayer {
        return Err(Error::InvalidArgument(
            "the Gauss residual is defined for the double-layer matrix".into(),
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok((0..psi.n)
        .map(|s| (psi.entry(s, s) * psi.areas[s]).abs() / two_pi)
        .fold(0.0, f64::max))
}
