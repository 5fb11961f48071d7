//! The r-body sound-soft problem in the point-capacitor reduction: each body
//! is collapsed to an interior point carrying a capacitance, the effective
//! charges solve a dense r×r linear system, and the far field is a phased sum
//! of the charges. Valid for well-separated bodies (see [`coupling_margin`]).

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering::PlaneWave;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// One scatterer: an anchor point inside the body plus its electrostatic
/// capacitance in ε₀ = 1 units (use the body centroid and the capacitance
/// series for mesh-derived bodies; a sphere of radius a has C = 4πa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Body {
    pub position: Vector3<f64>,
    pub capacitance: f64,
}

/// A collection of bodies with the incident wave that drives them.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyEnsemble {
    bodies: Vec<Body>,
    incident: PlaneWave,
}

impl BodyEnsemble {
    pub fn new(bodies: Vec<Body>, incident: PlaneWave) -> Result<Self> {
        if bodies.is_empty() {
            return Err(Error::InvalidArgument("ensemble needs at least one body".into()));
        }
        for (j, b) in bodies.iter().enumerate() {
            if !(b.capacitance > 0.0) || !b.capacitance.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "body {j}: capacitance must be positive and finite, got {}",
                    b.capacitance
                )));
            }
            if !b.position.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidArgument(format!("body {j}: non-finite position")));
            }
        }
        for m in 0..bodies.len() {
            for j in m + 1..bodies.len() {
                if bodies[m].position == bodies[j].position {
                    return Err(Error::InvalidArgument(format!(
                        "bodies {m} and {j} share the position {:?}",
                        bodies[m].position
                    )));
                }
            }
        }
        Ok(Self { bodies, incident })
    }

    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn k(&self) -> f64 {
        self.incident.k()
    }

    pub fn incident(&self) -> &PlaneWave {
        &self.incident
    }

    /// Smallest pairwise distance over the largest equivalent sphere radius
    /// C/(4π); large values mean the point-capacitor reduction is safe.
    /// A single body has no pairs and reports infinity.
    pub fn separation_ratio(&self) -> f64 {
        let radius = self
            .bodies
            .iter()
            .map(|b| b.capacitance / FOUR_PI)
            .fold(0.0f64, f64::max);
        let mut min_d = f64::INFINITY;
        for m in 0..self.bodies.len() {
            for j in m + 1..self.bodies.len() {
                min_d = min_d.min((self.bodies[m].position - self.bodies[j].position).norm());
            }
        }
        min_d / radius
    }
}

/// The dense linear system for the effective charges: row m reads
/// `Q_m + Σ_{j≠m} C_m·e^{ikd_mj}/(4πd_mj)·Q_j = −C_m·u₀(t_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSystem {
    matrix: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
}

impl ChargeSystem {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<Complex64> {
        &self.rhs
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Relative solve residual `‖Aq − rhs‖∞ / ‖rhs‖∞`.
    pub fn residual(&self, q: &DVector<Complex64>) -> f64 {
        let r = &self.matrix * q - &self.rhs;
        let num = r.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let den = self.rhs.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

/// Effective charges, one per body.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeVector {
    q: DVector<Complex64>,
}

impl ChargeVector {
    pub fn q(&self) -> &DVector<Complex64> {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMethod {
    /// Dense LU factorization; the reference path.
    Direct,
    /// Fixed-point sweeps starting from the uncoupled charges `Q⁰ = rhs`.
    /// Converges when the system is diagonally dominant, i.e. when
    /// [`coupling_margin`] < 1.
    Jacobi { max_iter: usize, tol: f64 },
}

pub fn assemble_charge_system(ensemble: &BodyEnsemble) -> Result<ChargeSystem> {
    let bodies = ensemble.bodies();
    let r = bodies.len();
    let k = ensemble.k();
    let mut matrix = DMatrix::from_element(r, r, Complex64::new(0.0, 0.0));
    for m in 0..r {
        matrix[(m, m)] = Complex64::from(1.0);
        for j in 0..r {
            if j == m {
                continue;
            }
            let d = (bodies[m].position - bodies[j].position).norm();
            matrix[(m, j)] = Complex64::from(bodies[m].capacitance / (FOUR_PI * d))
                * (Complex64::i() * k * d).exp();
        }
    }
    let rhs = DVector::from_fn(r, |m, _| {
        -Complex64::from(bodies[m].capacitance) * ensemble.incident().eval(bodies[m].position)
    });
    Ok(ChargeSystem { matrix, rhs })
}

pub fn solve_charges(system: &ChargeSystem, method: SolveMethod) -> Result<ChargeVector> {
    match method {
        SolveMethod::Direct => {
            let lu = system.matrix.clone().lu();
            let q = lu.solve(&system.rhs).ok_or(Error::SolverFailure {
                reason: "charge system matrix is singular".into(),
                condition: None,
            })?;
            let res = system.residual(&q);
            if !(res < 1e-12) {
                return Err(Error::SolverFailure {
                    reason: format!("direct solve residual {res:.3e} exceeds 1e-12"),
                    condition: None,
                });
            }
            Ok(ChargeVector { q })
        }
        SolveMethod::Jacobi { max_iter, tol } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "jacobi tolerance must be positive, got {tol}"
                )));
            }
            let mut q = system.rhs.clone();
            let mut res = system.residual(&q);
            for _ in 0..max_iter {
                if res < tol {
                    return Ok(ChargeVector { q });
                }
                // Diagonal is 1, so the sweep is q ← rhs − (A − I)·q.
                let offdiag = &system.matrix * &q - &q;
                q = &system.rhs - offdiag;
                res = system.residual(&q);
            }
            if res < tol {
                Ok(ChargeVector { q })
            } else {
                Err(Error::Divergence {
                    iterations: max_iter,
                    residual: res,
                })
            }
        }
    }
}

/// Far-field amplitude of the ensemble: `f(n) = (1/4π)·Σ_j e^{−ik n·t_j}·Q_j`.
pub fn manybody_amplitude(
    ensemble: &BodyEnsemble,
    q: &ChargeVector,
    n: Vector3<f64>,
) -> Result<Complex64> {
    if (n.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "observation direction must be a unit vector, |n| = {}",
            n.norm()
        )));
    }
    if q.len() != ensemble.bodies().len() {
        return Err(Error::InvalidArgument(format!(
            "charge vector length {} does not match body count {}",
            q.len(),
            ensemble.bodies().len()
        )));
    }
    let k = ensemble.k();
    let sum: Complex64 = ensemble
        .bodies()
        .iter()
        .zip(q.q().iter())
        .map(|(b, &qj)| (-Complex64::i() * k * n.dot(&b.position)).exp() * qj)
        .sum();
    Ok(sum / FOUR_PI)
}

/// Diagonal-dominance measure `max_m Σ_{j≠m} C_m/(4πd_mj)`; below 1 the
/// Jacobi iteration converges, and well below 1 the point-capacitor model
/// itself is trustworthy.
pub fn coupling_margin(ensemble: &BodyEnsemble) -> f64 {
    let bodies = ensemble.bodies();
    (0..bodies.len())
        .map(|m| {
            (0..bodies.len())
                .filter(|&j| j != m)
                .map(|j| {
                    let d = (bodies[m].position - bodies[j].position).norm();
                    bodies[m].capacitance / (FOUR_PI * d)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}
