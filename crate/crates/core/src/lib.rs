//! Low-frequency (`ka << 1`) acoustic and electromagnetic scattering by small
//! bodies of arbitrary shape.
//!
//! The library starts from a closed triangulated surface and builds everything
//! on top of two dense panel-collocation kernel matrices: the single-layer
//! potential `1/r` and the double-layer kernel `psi = d/dN (1/r)`. Iterating
//! the double-layer operator yields convergent series for the polarizability
//! tensor and the capacitance; from those, closed-form scattering amplitudes
//! follow for Dirichlet, Neumann and impedance boundary conditions, together
//! with the 2x2 electromagnetic scattering matrix, a many-body point-capacitor
//! solver and a Born forward/inverse pair for continuous media.
//!
//! Units are consistent throughout: lengths are arbitrary but common, and the
//! electrostatic normalization `eps0 = mu0 = 1` is assumed by all scattering
//! formulas (capacitance routines accept an explicit `eps0` for standalone
//! use).

// Validation throughout is written `!(x > 0.0)` so NaN lands on the error
// branch; the positive phrasing the lint prefers would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernels;
pub mod manybody;
pub mod medium;
pub mod mesh;
pub mod moments;
pub mod scattering;

pub use error::{Error, Result};
pub use kernels::{KernelKind, KernelMatrix, SurfaceField};
pub use manybody::{Body, BodyEnsemble, ChargeSystem, ChargeVector, SolveMethod};
pub use medium::{BornDatum, GridGeometry, PotentialGrid};
pub use mesh::{MeshMetrics, PanelData, TriMesh};
pub use moments::{Contrast, ConvergenceReport, Tensor3};
pub use scattering::{
    EmPlaneWave, Material, PlaneWave, SMatrix, ScatteringAmplitude,
};
