//! Serde types for the JSON documents the CLI consumes: scattering scenes,
//! probe measurements and Born data files. All reject unknown fields so a
//! typo fails loudly instead of being ignored.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::Deserialize;

use sbs_core::mesh::{generate_box, generate_ellipsoid, generate_sphere, load_mesh};
use sbs_core::{Error, Result, TriMesh};

use crate::report::SCHEMA_VERSION;

fn one() -> f64 {
    1.0
}

fn default_theta_count() -> usize {
    19
}

fn default_direction_count() -> usize {
    32
}

fn default_max_iter() -> usize {
    200
}

fn default_tol() -> f64 {
    1e-12
}

pub fn ensure_schema_version(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported schema_version {found}, this build reads version {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

pub fn unit_vector(raw: [f64; 3], name: &str) -> Result<Vector3<f64>> {
    let v = Vector3::new(raw[0], raw[1], raw[2]);
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{name} must be a nonzero finite vector, got {raw:?}"
        )));
    }
    Ok(v / n)
}

/// Body geometry in a scene: either a mesh file or a parametric shape.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    #[serde(default)]
    pub mesh_path: Option<PathBuf>,
    #[serde(default)]
    pub shape: Option<String>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub semi_axes: Option<[f64; 3]>,
    #[serde(default)]
    pub size: Option<[f64; 3]>,
    #[serde(default)]
    pub refinement: Option<u32>,
    #[serde(default)]
    pub divisions: Option<u32>,
}

impl BodySpec {
    pub fn build(&self) -> Result<TriMesh> {
        if let Some(path) = &self.mesh_path {
            if self.shape.is_some() {
                return Err(Error::InvalidArgument(
                    "give either mesh_path or shape, not both".into(),
                ));
            }
            return load_mesh(path);
        }
        let refinement = self.refinement.unwrap_or(3);
        match self.shape.as_deref() {
            Some("sphere") => generate_sphere(self.radius.unwrap_or(1.0), refinement),
            Some("ellipsoid") => {
                let [a, b, c] = self.semi_axes.ok_or_else(|| {
                    Error::InvalidArgument("ellipsoid needs semi_axes: [a, b, c]".into())
                })?;
                generate_ellipsoid(a, b, c, refinement)
            }
            Some("box") => {
                let [lx, ly, lz] = self
                    .size
                    .ok_or_else(|| Error::InvalidArgument("box needs size: [lx, ly, lz]".into()))?;
                generate_box(lx, ly, lz, self.divisions.unwrap_or(8))
            }
            Some(other) => Err(Error::InvalidArgument(format!(
                "unknown shape {other:?}; expected sphere, ellipsoid or box"
            ))),
            None => Err(Error::InvalidArgument(
                "body needs a mesh_path or a shape".into(),
            )),
        }
    }

    pub fn describe(&self) -> String {
        if let Some(path) = &self.mesh_path {
            return path.display().to_string();
        }
        self.shape.clone().unwrap_or_else(|| "?".into())
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Boundary {
    Dirichlet,
    Neumann,
    Impedance {
        h_re: f64,
        #[serde(default)]
        h_im: f64,
    },
}

impl Boundary {
    pub fn name(&self) -> &'static str {
        match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Neumann => "neumann",
            Boundary::Impedance { .. } => "impedance",
        }
    }
}

/// Scene for `scatter single`: one body, one plane wave, a sweep of
/// scattering angles in the plane through the incidence direction.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleScene {
    pub schema_version: u32,
    pub k: f64,
    pub nu: [f64; 3],
    #[serde(default = "one")]
    pub amplitude_re: f64,
    #[serde(default)]
    pub amplitude_im: f64,
    pub boundary: Boundary,
    pub body: BodySpec,
    #[serde(default = "default_theta_count")]
    pub theta_count: usize,
}

/// Scene for `scatter many`: point-capacitor bodies under one plane wave.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManyScene {
    pub schema_version: u32,
    pub k: f64,
    pub nu: [f64; 3],
    #[serde(default = "one")]
    pub amplitude_re: f64,
    #[serde(default)]
    pub amplitude_im: f64,
    pub bodies: Vec<ManyBody>,
    #[serde(default)]
    pub method: MethodSpec,
    #[serde(default = "default_direction_count")]
    pub direction_count: usize,
    #[serde(default)]
    pub directions: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManyBody {
    pub position: [f64; 3],
    #[serde(default)]
    pub capacitance: Option<f64>,
    #[serde(default)]
    pub shape: Option<String>,
    #[serde(default)]
    pub radius: Option<f64>,
}

impl ManyBody {
    /// Scalar capacitance of the body (ε₀ = 1): explicit value, or 4πa for a
    /// sphere of radius a.
    pub fn capacitance(&self) -> Result<f64> {
        match (self.capacitance, self.shape.as_deref()) {
            (Some(c), None) => Ok(c),
            (None, Some("sphere")) => {
                let radius = self.radius.ok_or_else(|| {
                    Error::InvalidArgument("sphere body needs a radius".into())
                })?;
                Ok(4.0 * std::f64::consts::PI * radius)
            }
            (None, Some(other)) => Err(Error::InvalidArgument(format!(
                "many-body shape {other:?} not supported; give a capacitance instead"
            ))),
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "give either capacitance or shape, not both".into(),
            )),
            (None, None) => Err(Error::InvalidArgument(
                "body needs a capacitance or a sphere shape".into(),
            )),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MethodSpec {
    #[default]
    Direct,
    Jacobi {
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

/// Input for `probe invert`: two far-field measurements plus the body model.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeInput {
    pub schema_version: u32,
    pub r: f64,
    pub k: f64,
    #[serde(default = "one")]
    pub epsilon0: f64,
    pub n1: [f64; 3],
    pub n2: [f64; 3],
    pub e1: [[f64; 2]; 3],
    pub e2: [[f64; 2]; 3],
    pub alpha: [[f64; 3]; 3],
    pub volume: f64,
}

/// Far-field data file for `medium invert` (also written by `medium born`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BornDataFile {
    pub schema_version: u32,
    pub data: Vec<BornRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BornRecord {
    pub k: f64,
    pub nu: [f64; 3],
    pub n: [f64; 3],
    pub f_re: f64,
    pub f_im: f64,
}

/// Deterministic, roughly uniform direction set (Fibonacci spiral).
pub fn fibonacci_directions(count: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - y * y).max(0.0).sqrt();
            let t = golden * i as f64;
            Vector3::new(r * t.cos(), y, r * t.sin())
        })
        .collect()
}

/// A unit vector orthogonal to `v`, chosen deterministically.
pub fn orthogonal_unit(v: &Vector3<f64>) -> Vector3<f64> {
    let seed = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vector3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    v.cross(&seed).normalize()
}
