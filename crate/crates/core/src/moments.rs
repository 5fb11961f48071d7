//! Moment tensors and the convergent series built on the layer kernels:
//! polarizability α(γ), magnetic polarizability β = α(−1), capacitance, and
//! an independent first-kind BEM capacitance solve used as cross-check.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{Error, Result};
use crate::kernels::{apply_iterated_with, ChainOrdering, KernelKind, KernelMatrix, SurfaceField};
use crate::mesh::TriMesh;

/// 3×3 real tensor (polarizability, moment tensors).
pub type Tensor3 = Matrix3<f64>;

/// Relative stopping threshold for the order sweeps: once two successive
/// orders agree this closely the series has converged to working precision.
const EARLY_STOP_REL: f64 = 1e-6;

/// Material contrast γ = (ε − ε₀)/(ε + ε₀), restricted to [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrast {
    gamma: f64,
}

impl Contrast {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma.abs() > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "contrast must lie in [-1, 1], got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Per-order values of a truncated series together with a geometric-decay
/// fit of the residuals. `order_values` holds a scalar summary per order
/// (trace/3 for tensor series); `order_tensors` the full tensors when the
/// series is tensor-valued. The fit model is `A·q^i` over the list index;
/// when no oracle is available the last order serves as reference and is
/// excluded from the fit.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub order_values: Vec<f64>,
    pub order_tensors: Option<Vec<Tensor3>>,
    pub fitted_a: Option<f64>,
    pub fitted_q: Option<f64>,
    pub converged: bool,
}

/// Relative asymmetry ‖T − Tᵀ‖∞ / ‖T‖∞; zero for exactly symmetric tensors.
pub fn symmetry_deviation(t: &Tensor3) -> f64 {
    let scale = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((t[(i, j)] - t[(j, i)]).abs());
        }
    }
    worst / scale
}

fn check_matrices(mesh: &TriMesh, g: &KernelMatrix, psi: &KernelMatrix) -> Result<()> {
    if g.kind() != KernelKind::SingleLayer || psi.kind() != KernelKind::DoubleLayer {
        return Err(Error::InvalidArgument(
            "expected a single-layer and a double-layer matrix, in that order".into(),
        ));
    }
    if g.mesh_id() != mesh.id() || psi.mesh_id() != mesh.id() {
        return Err(Error::MeshMismatch);
    }
    Ok(())
}

/// Area-weighted inner product of two panel fields.
fn dot_area(mesh: &TriMesh, f: &SurfaceField, g: &SurfaceField) -> f64 {
    mesh.panels()
        .iter()
        .zip(f.values())
        .zip(g.values())
        .map(|((p, a), b)| p.area * a * b)
        .sum()
}

/// Moment tensor of the iterated double-layer chain:
/// m = 0 → V·I; m ≥ 1 → ⟨N_i, G Ψ^{m−1} N_j⟩ with area weights.
pub fn moment_b(mesh: &TriMesh, g: &KernelMatrix, psi: &KernelMatrix, m: usize) -> Result<Tensor3> {
    moment_b_with(mesh, g, psi, m, ChainOrdering::default())
}

pub fn moment_b_with(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    m: usize,
    ordering: ChainOrdering,
) -> Result<Tensor3> {
    check_matrices(mesh, g, psi)?;
    if m == 0 {
        return Ok(Tensor3::identity() * mesh.metrics().volume);
    }
    let normals: Vec<SurfaceField> = (0..3)
        .map(|axis| SurfaceField::normal_component(mesh, axis))
        .collect();
    let mut out = Tensor3::zeros();
    for j in 0..3 {
        let chain = apply_iterated_with(psi, &normals[j], m - 1, ordering)?;
        let g_chain = g.apply(&chain)?;
        for i in 0..3 {
            out[(i, j)] = dot_area(mesh, &normals[i], &g_chain);
        }
    }
    Ok(out)
}

/// Series coefficient (γ^{n+2} − γ^{m+1})/(γ − 1), with the removable γ = 1
/// singularity evaluated analytically as n + 1 − m.
fn series_coefficient(gamma: f64, n: usize, m: usize) -> f64 {
    if gamma == 1.0 {
        (n + 1 - m) as f64
    } else {
        (gamma.powi(n as i32 + 2) - gamma.powi(m as i32 + 1)) / (gamma - 1.0)
    }
}

/// Polarizability series to order `n`:
/// α⁽ⁿ⁾ = (2/V) Σ_{m=0..n} ((−1)^m/(2π)^m)·c_m(γ)·b⁽ᵐ⁾. Returns the last
/// computed order (the sweep stops early once successive orders agree to
/// working precision) together with the per-order report.
pub fn alpha_series(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    gamma: Contrast,
    n: usize,
) -> Result<(Tensor3, ConvergenceReport)> {
    alpha_series_with(mesh, g, psi, gamma, n, ChainOrdering::default())
}

pub fn alpha_series_with(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    gamma: Contrast,
    n: usize,
    ordering: ChainOrdering,
) -> Result<(Tensor3, ConvergenceReport)> {
    check_matrices(mesh, g, psi)?;
    if n < 1 {
        return Err(Error::InvalidArgument(
            "the polarizability series needs order n >= 1".into(),
        ));
    }
    let volume = mesh.metrics().volume;
    // b^m for m = 0..n, built incrementally: chain_j = Psi^{m-1} N_j.
    let normals: Vec<SurfaceField> = (0..3)
        .map(|axis| SurfaceField::normal_component(mesh, axis))
        .collect();
    let mut chains = normals.clone();
    let mut b = vec![Tensor3::identity() * volume];
    for m in 1..=n {
        if m > 1 {
            for chain in &mut chains {
                *chain = psi.apply_with(chain, ordering)?;
            }
        }
        let mut bm = Tensor3::zeros();
        for (j, chain) in chains.iter().enumerate() {
            let g_chain = g.apply(chain)?;
            for i in 0..3 {
                bm[(i, j)] = dot_area(mesh, &normals[i], &g_chain);
            }
        }
        b.push(bm);
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut tensors = Vec::new();
    let mut scalars: Vec<f64> = Vec::new();
    for order in 1..=n {
        let mut acc = Tensor3::zeros();
        let mut weight = 1.0; // (−1)^m/(2π)^m
        for (m, bm) in b.iter().enumerate().take(order + 1) {
            acc += series_coefficient(gamma.gamma, order, m) * weight * bm;
            weight /= -two_pi;
        }
        let alpha = acc * (2.0 / volume);
        let scalar = alpha.trace() / 3.0;
        let stop = match scalars.last() {
            Some(&prev) => {
                let scale = f64::max(scalar.abs(), prev.abs());
                scale > 0.0 && (scalar - prev).abs() < EARLY_STOP_REL * scale
            }
            None => false,
        };
        tensors.push(alpha);
        scalars.push(scalar);
        if stop {
            break;
        }
    }
    let last = *tensors.last().unwrap();
    Ok((last, build_report(scalars, Some(tensors))))
}

/// Magnetic polarizability: the same series at γ = −1.
pub fn beta_series(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    n: usize,
) -> Result<(Tensor3, ConvergenceReport)> {
    alpha_series(mesh, g, psi, Contrast::new(-1.0)?, n)
}

pub fn beta_series_with(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    n: usize,
    ordering: ChainOrdering,
) -> Result<(Tensor3, ConvergenceReport)> {
    alpha_series_with(mesh, g, psi, Contrast::new(-1.0)?, n, ordering)
}

/// Capacitance series C⁽ⁿ⁾ = 4πε₀S²·[((−1)^n/(2π)^n)·⟨1, G Ψ^n 1⟩]⁻¹,
/// swept from order 0 with early stopping; returns the last order computed
/// and the per-order report.
pub fn capacitance_series(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    epsilon0: f64,
    n: usize,
) -> Result<(f64, ConvergenceReport)> {
    capacitance_series_with(mesh, g, psi, epsilon0, n, ChainOrdering::default())
}

pub fn capacitance_series_with(
    mesh: &TriMesh,
    g: &KernelMatrix,
    psi: &KernelMatrix,
    epsilon0: f64,
    n: usize,
    ordering: ChainOrdering,
) -> Result<(f64, ConvergenceReport)> {
    check_matrices(mesh, g, psi)?;
    if !(epsilon0 > 0.0) || !epsilon0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon0 must be positive and finite, got {epsilon0}"
        )));
    }
    let surface: f64 = mesh.panels().iter().map(|p| p.area).sum();
    let prefactor = 4.0 * std::f64::consts::PI * epsilon0 * surface * surface;
    let two_pi = 2.0 * std::f64::consts::PI;
    let one = SurfaceField::constant(mesh, 1.0);

    let mut chain = one.clone();
    let mut values: Vec<f64> = Vec::new();
    for order in 0..=n {
        if order > 0 {
            chain = psi.apply_with(&chain, ordering)?;
        }
        let g_chain = g.apply(&chain)?;
        let j = dot_area(mesh, &one, &g_chain);
        let bracket = j * (-1.0f64 / two_pi).powi(order as i32);
        if bracket <= 0.0 {
            return Err(Error::NumericalBreakdown(format!(
                "capacitance series bracket is {bracket} at order {order}; \
                 the quadrature cannot support this order"
            )));
        }
        let value = prefactor / bracket;
        let stop = match values.last() {
            Some(&prev) => (value - prev).abs() < EARLY_STOP_REL * value.abs(),
            None => false,
        };
        values.push(value);
        if stop {
            break;
        }
    }
    let last = *values.last().unwrap();
    Ok((last, build_report(values, None)))
}

/// Independent capacitance cross-check: solve the first-kind boundary system
/// (1/4π)·G·σ = 1 for the charge density at unit potential and integrate it.
/// The system is symmetrized with the panel areas and solved by Cholesky.
pub fn capacitance_bem_oracle(mesh: &TriMesh, g: &KernelMatrix, epsilon0: f64) -> Result<f64> {
    if g.kind() != KernelKind::SingleLayer {
        return Err(Error::InvalidArgument(
            "the capacitance oracle needs the single-layer matrix".into(),
        ));
    }
    if g.mesh_id() != mesh.id() {
        return Err(Error::MeshMismatch);
    }
    if !(epsilon0 > 0.0) || !epsilon0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon0 must be positive and finite, got {epsilon0}"
        )));
    }
    let n = g.n();
    let areas = g.areas();
    // Row-scale by areas: A[s][t] = area_s·G[s][t] is symmetric positive
    // definite (a Galerkin-like product rule), rhs = 4π·area.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for s in 0..n {
        for t in 0..n {
            a[(s, t)] = areas[s] * g.entry(s, t);
        }
    }
    // Symmetrize exactly: off-diagonal pairs differ only by quadrature error.
    for s in 0..n {
        for t in 0..s {
            let avg = 0.5 * (a[(s, t)] + a[(t, s)]);
            a[(s, t)] = avg;
            a[(t, s)] = avg;
        }
    }
    let rhs = DVector::from_iterator(n, areas.iter().map(|ar| 4.0 * std::f64::consts::PI * ar));
    let sigma = solve_spd(a, rhs)?;
    Ok(epsilon0 * areas.iter().zip(sigma.iter()).map(|(ar, s)| ar * s).sum::<f64>())
}

fn solve_spd(a: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let chol = a.cholesky().ok_or(Error::SolverFailure {
        reason: "Cholesky factorization failed (matrix not positive definite)".into(),
        condition: None,
    })?;
    // Rough conditioning estimate from the factor's diagonal spread.
    let l = chol.l_dirty();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let cond = (dmax / dmin).powi(2);
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::SolverFailure {
            reason: "boundary system is numerically singular".into(),
            condition: Some(cond),
        });
    }
    Ok(chol.solve(&rhs))
}

/// Least-squares fit of `log|v_i − reference|` against the list index,
/// modelling the residuals as A·qⁱ. Without an explicit reference the last
/// order is used as proxy and excluded from the fit. Orders whose residual
/// vanishes carry no information and are dropped; fewer than 3 informative
/// residuals is an error.
pub fn fit_geometric_decay(order_values: &[f64], reference: Option<f64>) -> Result<(f64, f64)> {
    let (reference, usable): (f64, &[f64]) = match reference {
        Some(r) => (r, order_values),
        None => match order_values.split_last() {
            Some((last, rest)) => (*last, rest),
            None => (f64::NAN, &[]),
        },
    };
    let points: Vec<(f64, f64)> = usable
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let r = (v - reference).abs();
            (r > 0.0 && r.is_finite()).then(|| (i as f64, r.ln()))
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "geometric fit needs at least 3 nonzero residuals, have {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::InsufficientData(
            "geometric fit is degenerate (single abscissa)".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok((intercept.exp(), slope.exp()))
}

fn build_report(order_values: Vec<f64>, order_tensors: Option<Vec<Tensor3>>) -> ConvergenceReport {
    let fit = fit_geometric_decay(&order_values, None).ok();
    let (fitted_a, fitted_q) = match fit {
        Some((a, q)) => (Some(a), Some(q)),
        None => (None, None),
    };
    let converged = match fitted_q {
        Some(q) => q < 1.0,
        // Fit unavailable: the sweep either stalled at machine precision
        // (converged) or produced too few orders to judge.
        None => match order_values.as_slice() {
            [.., a, b] => {
                let scale = f64::max(a.abs(), b.abs());
                scale > 0.0 && (a - b).abs() < EARLY_STOP_REL * scale
            }
            _ => false,
        },
    };
    ConvergenceReport {
        order_values,
        order_tensors,
        fitted_a,
        fitted_q,
        converged,
    }
}
