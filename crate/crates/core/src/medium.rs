//! Born-approximation scattering by a rarefied medium: a potential density
//! q(y) sampled on a voxel grid, the forward amplitude as a midpoint
//! quadrature of its Fourier transform, and the FFT-based inverse that
//! recovers q from amplitudes covering a full momentum-transfer lattice.

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Placement of a voxel grid: corner origin, uniform spacing, cell counts.
/// Sample points sit at cell centers, `origin + (index + ½)·spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub origin: Vector3<f64>,
    pub spacing: f64,
    pub dims: (usize, usize, usize),
}

impl GridGeometry {
    fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive and finite, got {}",
                self.spacing
            )));
        }
        if !self.origin.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument("grid origin must be finite".into()));
        }
        let (nx, ny, nz) = self.dims;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dims must all be at least 1, got {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        self.origin
            + Vector3::new(
                (i as f64 + 0.5) * self.spacing,
                (j as f64 + 0.5) * self.spacing,
                (k as f64 + 0.5) * self.spacing,
            )
    }

    /// Linear index with x fastest, then y, then z.
    pub fn linear_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims.0 * (j + self.dims.1 * k)
    }
}

/// Real scalar samples q(y) on a voxel grid (row-major, x fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
}

/// Serialized form of [`PotentialGrid`]: a JSON document with the geometry
/// header and the flat sample array.
#[derive(Serialize, Deserialize)]
struct GridFile {
    origin: [f64; 3],
    spacing: f64,
    dims: [usize; 3],
    values: Vec<f64>,
}

impl PotentialGrid {
    pub fn new(
        origin: Vector3<f64>,
        spacing: f64,
        dims: (usize, usize, usize),
        values: Vec<f64>,
    ) -> Result<Self> {
        let geometry = GridGeometry {
            origin,
            spacing,
            dims,
        };
        geometry.validate()?;
        if values.len() != geometry.cell_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values for dims {:?}, got {}",
                geometry.cell_count(),
                dims,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid values must be finite, found {bad}"
            )));
        }
        Ok(Self { geometry, values })
    }

    pub fn zeros(origin: Vector3<f64>, spacing: f64, dims: (usize, usize, usize)) -> Result<Self> {
        let geometry = GridGeometry {
            origin,
            spacing,
            dims,
        };
        geometry.validate()?;
        let n = geometry.cell_count();
        Ok(Self {
            geometry,
            values: vec![0.0; n],
        })
    }

    /// Sample a function at every cell center.
    pub fn from_fn(
        origin: Vector3<f64>,
        spacing: f64,
        dims: (usize, usize, usize),
        mut f: impl FnMut(Vector3<f64>) -> f64,
    ) -> Result<Self> {
        let geometry = GridGeometry {
            origin,
            spacing,
            dims,
        };
        geometry.validate()?;
        let mut values = Vec::with_capacity(geometry.cell_count());
        for k in 0..dims.2 {
            for j in 0..dims.1 {
                for i in 0..dims.0 {
                    values.push(f(geometry.cell_center(i, j, k)));
                }
            }
        }
        Self::new(origin, spacing, dims, values)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.geometry.linear_index(i, j, k)]
    }

    /// Largest |q| on the grid.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = GridFile {
            origin: [self.geometry.origin.x, self.geometry.origin.y, self.geometry.origin.z],
            spacing: self.geometry.spacing,
            dims: [self.geometry.dims.0, self.geometry.dims.1, self.geometry.dims.2],
            values: self.values.clone(),
        };
        let text = serde_json::to_string(&file)
            .map_err(|e| Error::InvalidArgument(format!("grid serialization failed: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: GridFile = serde_json::from_str(&text)
            .map_err(|e| Error::MeshParse(format!("{}: not a valid grid file: {e}", path.display())))?;
        Self::new(
            Vector3::new(file.origin[0], file.origin[1], file.origin[2]),
            file.spacing,
            (file.dims[0], file.dims[1], file.dims[2]),
            file.values,
        )
    }
}

/// One far-field observation: wavenumber, incidence and observation
/// directions, measured amplitude. The momentum transfer is `κ = k(n−ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BornDatum {
    pub k: f64,
    pub nu: Vector3<f64>,
    pub n: Vector3<f64>,
    pub f: Complex64,
}

impl BornDatum {
    pub fn new(k: f64, nu: Vector3<f64>, n: Vector3<f64>, f: Complex64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be positive and finite, got {k}"
            )));
        }
        for (v, name) in [(&nu, "nu"), (&n, "n")] {
            if (v.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a unit vector, |{name}| = {}",
                    v.norm()
                )));
            }
        }
        Ok(Self { k, nu, n, f })
    }

    pub fn momentum_transfer(&self) -> Vector3<f64> {
        (self.n - self.nu) * self.k
    }
}

/// Dirichlet bodies: `q(y) = N(y)·C` with a body-number density N and a
/// common capacitance C.
pub fn density_from_bodies(n_density: &PotentialGrid, c: f64) -> Result<PotentialGrid> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "capacitance must be positive and finite, got {c}"
        )));
    }
    scaled_density(n_density, c)
}

/// Impedance bodies: `q(y) = N(y)·hS/(1 + hS/C)` (real impedance h).
pub fn density_from_impedance_bodies(
    n_density: &PotentialGrid,
    h: f64,
    s: f64,
    c: f64,
) -> Result<PotentialGrid> {
    if !h.is_finite() {
        return Err(Error::InvalidArgument(format!("impedance must be finite, got {h}")));
    }
    for (x, name) in [(s, "surface area"), (c, "capacitance")] {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive and finite, got {x}"
            )));
        }
    }
    let denom = 1.0 + h * s / c;
    if denom.abs() <= 1e-12 * (h * s / c).abs().max(1.0) {
        return Err(Error::ResonanceDegeneracy);
    }
    scaled_density(n_density, h * s / denom)
}

fn scaled_density(n_density: &PotentialGrid, factor: f64) -> Result<PotentialGrid> {
    if let Some(bad) = n_density.values().iter().find(|&&v| v < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "body-number density must be non-negative, found {bad}"
        )));
    }
    let g = n_density.geometry();
    PotentialGrid::new(
        g.origin,
        g.spacing,
        g.dims,
        n_density.values().iter().map(|&v| v * factor).collect(),
    )
}

/// Born forward amplitude by midpoint quadrature over the voxel grid:
/// `f = −(1/4π)·Σ_cells q(y)·e^{ik(ν−n)·y}·V_cell`.
pub fn born_amplitude(
    grid: &PotentialGrid,
    k: f64,
    nu: Vector3<f64>,
    n: Vector3<f64>,
) -> Result<Complex64> {
    let datum_check = BornDatum::new(k, nu, n, Complex64::new(0.0, 0.0))?;
    let g = grid.geometry();
    // e^{ik(ν−n)·y} = e^{−iκ·y}; accumulate per-axis phase factors once.
    let kappa = datum_check.momentum_transfer();
    let phase_axis = |count: usize, axis: usize| -> Vec<Complex64> {
        (0..count)
            .map(|i| {
                let y = grid.geometry().origin[axis] + (i as f64 + 0.5) * g.spacing;
                (-Complex64::i() * kappa[axis] * y).exp()
            })
            .collect()
    };
    let px = phase_axis(g.dims.0, 0);
    let py = phase_axis(g.dims.1, 1);
    let pz = phase_axis(g.dims.2, 2);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut idx = 0;
    for pz_k in &pz {
        for py_j in &py {
            let plane_phase = pz_k * py_j;
            let mut line = Complex64::new(0.0, 0.0);
            for px_i in &px {
                line += px_i * grid.values()[idx];
                idx += 1;
            }
            sum += plane_phase * line;
        }
    }
    Ok(-sum * g.cell_volume() / FOUR_PI)
}

/// A (ν, n) pair of unit directions realizing the momentum transfer
/// `k(n−ν) = κ`, or `None` when `k < |κ|/2` (the transfer is unreachable at
/// this wavenumber). Deterministic choice, symmetric about the plane ⊥ κ.
pub fn directions_for_momentum(kappa: Vector3<f64>, k: f64) -> Option<(Vector3<f64>, Vector3<f64>)> {
    if !(k > 0.0) {
        return None;
    }
    let q = kappa.norm();
    if q == 0.0 {
        return Some((Vector3::z(), Vector3::z()));
    }
    let half = q / (2.0 * k);
    if half > 1.0 {
        return None;
    }
    let khat = kappa / q;
    // Any unit vector orthogonal to κ; pick against the smallest component.
    let seed = if khat.x.abs() <= khat.y.abs() && khat.x.abs() <= khat.z.abs() {
        Vector3::x()
    } else if khat.y.abs() <= khat.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e = khat.cross(&seed).normalize();
    let s = (1.0 - half * half).max(0.0).sqrt();
    let n = khat * half + e * s;
    let nu = -khat * half + e * s;
    Some((nu, n))
}

/// Recover q on the target grid from amplitudes covering the full
/// momentum-transfer lattice `κ_j = 2π·j/(dim·spacing)` (signed integers j
/// within the Nyquist band). Returns the grid of real parts together with
/// the imaginary residue relative to the recovered peak, which should vanish
/// for data synthesized from a real density.
pub fn born_inverse(data: &[BornDatum], target: &GridGeometry) -> Result<(PotentialGrid, f64)> {
    target.validate()?;
    let (nx, ny, nz) = target.dims;
    let dims = [nx, ny, nz];
    let n_tot = target.cell_count();
    let h = target.spacing;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n_tot];
    let mut seen = vec![false; n_tot];
    // Midpoint sample positions carry the half-cell offset; fold it and the
    // origin into the spectrum so the remaining transform is a plain DFT.
    let y0 = target.origin + Vector3::repeat(0.5 * h);
    for (di, d) in data.iter().enumerate() {
        let kappa = d.momentum_transfer();
        let mut lattice = [0usize; 3];
        for axis in 0..3 {
            let step = TWO_PI / (dims[axis] as f64 * h);
            let j_real = kappa[axis] / step;
            let j = j_real.round();
            if (j_real - j).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "datum {di}: momentum transfer component {} = {} is off the lattice (step {step})",
                    axis, kappa[axis]
                )));
            }
            let j = j as i64;
            let nd = dims[axis] as i64;
            let (lo, hi) = (-(nd / 2), (nd - 1) / 2);
            if j < lo || j > hi {
                return Err(Error::InvalidArgument(format!(
                    "datum {di}: momentum transfer index {j} on axis {axis} exceeds the Nyquist band [{lo}, {hi}]"
                )));
            }
            lattice[axis] = j.rem_euclid(nd) as usize;
        }
        let lin = target.linear_index(lattice[0], lattice[1], lattice[2]);
        let qhat = -d.f * FOUR_PI / target.cell_volume();
        spectrum[lin] = qhat * (Complex64::i() * kappa.dot(&y0)).exp();
        seen[lin] = true;
    }
    let missing = seen.iter().filter(|&&s| !s).count();
    if missing > 0 {
        let mut examples = Vec::new();
        'outer: for kz in 0..nz {
            for jy in 0..ny {
                for ix in 0..nx {
                    if !seen[target.linear_index(ix, jy, kz)] {
                        let signed = |idx: usize, nd: usize| -> i64 {
                            let idx = idx as i64;
                            let nd = nd as i64;
                            if idx > (nd - 1) / 2 { idx - nd } else { idx }
                        };
                        examples.push(format!(
                            "({}, {}, {})",
                            signed(ix, nx),
                            signed(jy, ny),
                            signed(kz, nz)
                        ));
                        if examples.len() == 3 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        return Err(Error::Coverage {
            missing,
            required: n_tot,
            examples: examples.join(", "),
        });
    }

    // Unnormalized inverse DFT, one axis at a time.
    let mut planner = FftPlanner::<f64>::new();
    #[allow(clippy::needless_range_loop)] // axis also selects the stride below
    for axis in 0..3 {
        let fft = planner.plan_fft_inverse(dims[axis]);
        let stride = match axis {
            0 => 1,
            1 => nx,
            _ => nx * ny,
        };
        let mut line = vec![Complex64::new(0.0, 0.0); dims[axis]];
        let (outer_a, outer_b) = match axis {
            0 => (ny, nz),
            1 => (nx, nz),
            _ => (nx, ny),
        };
        for b in 0..outer_b {
            for a in 0..outer_a {
                let base = match axis {
                    0 => target.linear_index(0, a, b),
                    1 => target.linear_index(a, 0, b),
                    _ => target.linear_index(a, b, 0),
                };
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = spectrum[base + t * stride];
                }
                fft.process(&mut line);
                for (t, slot) in line.iter().enumerate() {
                    spectrum[base + t * stride] = *slot;
                }
            }
        }
    }

    let scale = 1.0 / n_tot as f64;
    let mut values = Vec::with_capacity(n_tot);
    let mut max_im = 0.0f64;
    let mut max_re = 0.0f64;
    for z in &spectrum {
        let v = z.re * scale;
        values.push(v);
        max_re = max_re.max(v.abs());
        max_im = max_im.max((z.im * scale).abs());
    }
    let residue = if max_re > 0.0 { max_im / max_re } else { max_im };
    let grid = PotentialGrid::new(target.origin, target.spacing, target.dims, values)?;
    Ok((grid, residue))
}

/// Every lattice momentum transfer of a target grid, in index order.
pub fn momentum_lattice(target: &GridGeometry) -> Result<Vec<Vector3<f64>>> {
    target.validate()?;
    let (nx, ny, nz) = target.dims;
    let h = target.spacing;
    let signed = |idx: usize, nd: usize| -> f64 {
        let idx = idx as i64;
        let nd = nd as i64;
        (if idx > (nd - 1) / 2 { idx - nd } else { idx }) as f64
    };
    let mut out = Vec::with_capacity(target.cell_count());
    for kz in 0..nz {
        for jy in 0..ny {
            for ix in 0..nx {
                out.push(Vector3::new(
                    TWO_PI * signed(ix, nx) / (nx as f64 * h),
                    TWO_PI * signed(jy, ny) / (ny as f64 * h),
                    TWO_PI * signed(kz, nz) / (nz as f64 * h),
                ));
            }
        }
    }
    Ok(out)
}

/// Largest lattice |κ| of a target grid; the inversion needs `k ≥ |κ|/2`
/// for every lattice point, i.e. `k ≥ max|κ|/2`.
pub fn required_wavenumber(target: &GridGeometry) -> Result<f64> {
    Ok(momentum_lattice(target)?
        .iter()
        .map(|k| k.norm())
        .fold(0.0f64, f64::max)
        / 2.0)
}
