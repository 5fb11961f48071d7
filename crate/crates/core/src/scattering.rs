//! Single-body scattering at long wavelength: scalar amplitudes for the
//! Dirichlet, Neumann and impedance boundary conditions, electromagnetic
//! dipole polarizations and far fields, the 2×2 scattering matrix, the
//! refraction tensor of a dilute suspension, and the far-field inversion
//! that recovers the polarization vector and then the incident field.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::Tensor3;

type CVec3 = Vector3<Complex64>;

fn check_unit(v: &Vector3<f64>, name: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be a unit vector, |{name}| = {}",
            v.norm()
        )));
    }
    Ok(())
}

fn check_positive(x: f64, name: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

/// Real 3×3 tensor applied to a complex vector.
fn apply_tensor(t: &Tensor3, v: &CVec3) -> CVec3 {
    CVec3::from_fn(|i, _| {
        (0..3)
            .map(|j| Complex64::from(t[(i, j)]) * v[j])
            .sum::<Complex64>()
    })
}

/// Scalar incident plane wave `amplitude · exp(i k ν·x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    k: f64,
    nu: Vector3<f64>,
    amplitude: Complex64,
}

impl PlaneWave {
    /// `k = 0` is allowed and degenerates to the constant field `amplitude`
    /// (the static limit used by the many-body charge problem).
    pub fn new(k: f64, nu: Vector3<f64>, amplitude: Complex64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavenumber k must be non-negative and finite, got {k}"
            )));
        }
        check_unit(&nu, "nu")?;
        Ok(Self { k, nu, amplitude })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn nu(&self) -> Vector3<f64> {
        self.nu
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn eval(&self, x: Vector3<f64>) -> Complex64 {
        self.amplitude * (Complex64::i() * self.k * self.nu.dot(&x)).exp()
    }
}

/// Electromagnetic plane wave: transverse complex E₀ plus the matching H₀.
#[derive(Debug, Clone, PartialEq)]
pub struct EmPlaneWave {
    pub k: f64,
    pub nu: Vector3<f64>,
    pub e0: CVec3,
    pub h0: CVec3,
}

impl EmPlaneWave {
    pub fn new(k: f64, nu: Vector3<f64>, e0: CVec3, h0: CVec3) -> Result<Self> {
        check_positive(k, "wavenumber k")?;
        check_unit(&nu, "nu")?;
        let trans = (0..3)
            .map(|i| e0[i] * nu[i])
            .sum::<Complex64>()
            .norm();
        if trans > 1e-12 * e0.norm().max(1e-300) {
            return Err(Error::InvalidArgument(format!(
                "E0 must be transverse to nu, E0·nu residual {trans}"
            )));
        }
        Ok(Self { k, nu, e0, h0 })
    }

    /// Linearly polarized wave in a lossless background: H₀ = √(ε₀/μ₀)·ν×E₀.
    pub fn linear(k: f64, nu: Vector3<f64>, e0: CVec3, eps0: f64, mu0: f64) -> Result<Self> {
        check_positive(eps0, "epsilon0")?;
        check_positive(mu0, "mu0")?;
        let nu_c = CVec3::from_fn(|i, _| Complex64::from(nu[i]));
        let h0 = nu_c.cross(&e0) * Complex64::from((eps0 / mu0).sqrt());
        Self::new(k, nu, e0, h0)
    }
}

/// Bulk material parameters (permittivity, permeability, conductivity). Used
/// both for the scatterer and for the ambient medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub epsilon: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl Material {
    pub fn new(epsilon: f64, mu: f64, sigma: f64) -> Result<Self> {
        check_positive(epsilon, "epsilon")?;
        check_positive(mu, "mu")?;
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "conductivity must be non-negative, got {sigma}"
            )));
        }
        Ok(Self { epsilon, mu, sigma })
    }

    pub fn vacuum() -> Self {
        Self {
            epsilon: 1.0,
            mu: 1.0,
            sigma: 0.0,
        }
    }

    /// Electric contrast γ = (ε − ε₀)/(ε + ε₀) against an ambient medium.
    pub fn electric_contrast(&self, ambient: &Material) -> crate::moments::Contrast {
        let g = (self.epsilon - ambient.epsilon) / (self.epsilon + ambient.epsilon);
        crate::moments::Contrast::new(g).expect("ratio of positive permittivities lies in (-1, 1)")
    }

    /// Magnetic contrast γ̃ = (μ − μ₀)/(μ + μ₀).
    pub fn magnetic_contrast(&self, ambient: &Material) -> crate::moments::Contrast {
        let g = (self.mu - ambient.mu) / (self.mu + ambient.mu);
        crate::moments::Contrast::new(g).expect("ratio of positive permeabilities lies in (-1, 1)")
    }
}

/// Scalar far-field amplitude in an observation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitude {
    pub value: Complex64,
    pub direction: Vector3<f64>,
}

/// The 2×2 scattering matrix in the fixed frame: the scattering plane is
/// YOZ, incidence is along +z, axis 1 is x (normal to the plane) and axis 2
/// lies in the plane. Layout `[[S₂, S₃], [S₄, S₁]]`, acting on `(E₂, E₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    pub matrix: Matrix2<Complex64>,
    pub theta: f64,
}

impl SMatrix {
    /// Map incident in-plane/normal components to far-field components:
    /// `(f₂, f₁) = 𝒮 · (E₂, E₁)`.
    pub fn apply(&self, e2: Complex64, e1: Complex64) -> (Complex64, Complex64) {
        (
            self.matrix[(0, 0)] * e2 + self.matrix[(0, 1)] * e1,
            self.matrix[(1, 0)] * e2 + self.matrix[(1, 1)] * e1,
        )
    }
}

/// Sound-soft (Dirichlet) body: `f = −C·u₀/(4π)`, isotropic. `c` is the
/// capacitance in ε₀ = 1 units and `u0_at_body` the incident field sampled
/// at the body.
pub fn amplitude_dirichlet(
    c: f64,
    u0_at_body: Complex64,
    n: Vector3<f64>,
) -> Result<ScatteringAmplitude> {
    check_positive(c, "capacitance")?;
    check_unit(&n, "n")?;
    Ok(ScatteringAmplitude {
        value: -(u0_at_body * c) / (4.0 * std::f64::consts::PI),
        direction: n,
    })
}

/// Sound-hard (Neumann) body under plane-wave incidence:
/// `f = −(k²V/4π)·(β_pq ν_q n_p + 1)`.
pub fn amplitude_neumann(
    beta: &Tensor3,
    v: f64,
    k: f64,
    nu: Vector3<f64>,
    n: Vector3<f64>,
) -> Result<ScatteringAmplitude> {
    check_positive(v, "volume")?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "wavenumber must be non-negative, got {k}"
        )));
    }
    check_unit(&nu, "nu")?;
    check_unit(&n, "n")?;
    let pattern = (beta * nu).dot(&n) + 1.0;
    Ok(ScatteringAmplitude {
        value: Complex64::from(-(k * k * v) / (4.0 * std::f64::consts::PI) * pattern),
        direction: n,
    })
}

/// Sound-hard body under an arbitrary smooth incident field, given its
/// gradient and Laplacian at the body:
/// `f = (ikV/4π)·β_pq n_p ∂u₀/∂x_q + (V/4π)·Δu₀`.
pub fn amplitude_neumann_general(
    beta: &Tensor3,
    v: f64,
    k: f64,
    grad_u0: CVec3,
    laplacian_u0: Complex64,
    n: Vector3<f64>,
) -> Result<ScatteringAmplitude> {
    check_positive(v, "volume")?;
    check_positive(k, "wavenumber k")?;
    check_unit(&n, "n")?;
    let n_c = CVec3::from_fn(|i, _| Complex64::from(n[i]));
    let beta_term = (0..3)
        .map(|p| {
            n_c[p]
                * (0..3)
                    .map(|q| Complex64::from(beta[(p, q)]) * grad_u0[q])
                    .sum::<Complex64>()
        })
        .sum::<Complex64>();
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(ScatteringAmplitude {
        value: Complex64::i() * k * v / four_pi * beta_term + v / four_pi * laplacian_u0,
        direction: n,
    })
}

/// Impedance boundary (∂u/∂N = h·u): `f = −hS/(4π(1 + hS/C))·u₀₀`,
/// isotropic. `h` interpolates between the Neumann (h = 0) and Dirichlet
/// (h → ∞) limits and may be complex (absorbing surface).
pub fn amplitude_impedance(
    h: Complex64,
    s: f64,
    c: f64,
    u00: Complex64,
    n: Vector3<f64>,
) -> Result<ScatteringAmplitude> {
    check_positive(s, "surface area")?;
    check_positive(c, "capacitance")?;
    check_unit(&n, "n")?;
    let hs_over_c = h * s / c;
    let denom = Complex64::from(1.0) + hs_over_c;
    if denom.norm() <= 1e-12 * hs_over_c.norm().max(1.0) {
        return Err(Error::ResonanceDegeneracy);
    }
    Ok(ScatteringAmplitude {
        value: -(h * s) / (4.0 * std::f64::consts::PI * denom) * u00,
        direction: n,
    })
}

/// Induced electric and magnetic dipole densities:
/// `P = α(γ)·V·ε₀·E` and `M = α(γ̃)·V·μ₀·H [+ β·V·μ₀·H]`. The β term is the
/// eddy-current response of a well-conducting body; skip it (flag off) when
/// the skin depth is large compared to the body.
#[allow(clippy::too_many_arguments)]
pub fn em_polarizations(
    alpha: &Tensor3,
    alpha_mag: &Tensor3,
    beta: &Tensor3,
    v: f64,
    eps0: f64,
    mu0: f64,
    e: &CVec3,
    h: &CVec3,
    include_magnetic: bool,
) -> Result<(CVec3, CVec3)> {
    check_positive(v, "volume")?;
    check_positive(eps0, "epsilon0")?;
    check_positive(mu0, "mu0")?;
    let p = apply_tensor(alpha, e) * Complex64::from(v * eps0);
    let mut m = apply_tensor(alpha_mag, h) * Complex64::from(v * mu0);
    if include_magnetic {
        m += apply_tensor(beta, h) * Complex64::from(v * mu0);
    }
    Ok((p, m))
}

/// Far-field amplitudes of the dipole pair:
/// `f_E = (k²/4πε₀)·n×(P×n) + (k²/4π)·√(μ₀/ε₀)·M×n`, `f_H = √(ε₀/μ₀)·n×f_E`.
pub fn em_far_field(
    p: &CVec3,
    m: &CVec3,
    n: Vector3<f64>,
    k: f64,
    eps0: f64,
    mu0: f64,
) -> Result<(CVec3, CVec3)> {
    check_unit(&n, "n")?;
    check_positive(k, "wavenumber k")?;
    check_positive(eps0, "epsilon0")?;
    check_positive(mu0, "mu0")?;
    let n_c = CVec3::from_fn(|i, _| Complex64::from(n[i]));
    let four_pi = 4.0 * std::f64::consts::PI;
    let transverse_p = n_c.cross(&p.cross(&n_c));
    let fe = transverse_p * Complex64::from(k * k / (four_pi * eps0))
        + m.cross(&n_c) * Complex64::from(k * k / four_pi * (mu0 / eps0).sqrt());
    let fh = n_c.cross(&fe) * Complex64::from((eps0 / mu0).sqrt());
    Ok((fe, fh))
}

/// The 2×2 scattering matrix at scattering angle θ (frame described on
/// [`SMatrix`]):
///
/// ```text
/// 𝒮 = (k²V/4π)·[ μ₀β₁₁ + α₂₂cosθ − α₃₂sinθ    α₂₁cosθ − α₃₁sinθ − μ₀β₁₂ ]
///               [ α₁₂ − μ₀β₂₁cosθ + μ₀β₃₁sinθ  α₁₁ + μ₀β₂₂cosθ − μ₀β₃₂sinθ ]
/// ```
pub fn scattering_matrix(
    alpha: &Tensor3,
    beta: &Tensor3,
    theta: f64,
    k: f64,
    v: f64,
    mu0: f64,
) -> Result<SMatrix> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "scattering angle must lie in [0, π], got {theta}"
        )));
    }
    check_positive(k, "wavenumber k")?;
    check_positive(v, "volume")?;
    check_positive(mu0, "mu0")?;
    let (ct, st) = (theta.cos(), theta.sin());
    let a = |i: usize, j: usize| alpha[(i - 1, j - 1)];
    let b = |i: usize, j: usize| mu0 * beta[(i - 1, j - 1)];
    let pre = k * k * v / (4.0 * std::f64::consts::PI);
    let entries = [
        b(1, 1) + a(2, 2) * ct - a(3, 2) * st,
        a(2, 1) * ct - a(3, 1) * st - b(1, 2),
        a(1, 2) - b(2, 1) * ct + b(3, 1) * st,
        a(1, 1) + b(2, 2) * ct - b(3, 2) * st,
    ];
    Ok(SMatrix {
        matrix: Matrix2::from_row_slice(&entries.map(|e| Complex64::from(pre * e))),
        theta,
    })
}

/// Refraction tensor of a dilute cloud of N bodies per unit volume:
/// `n_ij = δ_ij + (2πN/k²)·S_ij(0)` with the forward scattering matrix.
pub fn refraction_tensor(
    n_density: f64,
    k: f64,
    s_forward: &Matrix2<Complex64>,
) -> Result<Matrix2<Complex64>> {
    if !(n_density >= 0.0) || !n_density.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "number density must be non-negative, got {n_density}"
        )));
    }
    check_positive(k, "wavenumber k")?;
    let factor = Complex64::from(2.0 * std::f64::consts::PI * n_density / (k * k));
    Ok(Matrix2::identity() + s_forward * factor)
}

/// Far-field measurement synthesized from a polarization vector:
/// `E′(n) = b·(P − n(P·n))` with `b = (e^{ikr}/r)·(k²/4πε₀)`.
pub fn synthesize_measurement(
    p: &CVec3,
    n: Vector3<f64>,
    r: f64,
    k: f64,
    eps0: f64,
) -> Result<CVec3> {
    check_unit(&n, "n")?;
    check_positive(r, "distance r")?;
    check_positive(k, "wavenumber k")?;
    check_positive(eps0, "epsilon0")?;
    let b = measurement_factor(r, k, eps0);
    let n_c = CVec3::from_fn(|i, _| Complex64::from(n[i]));
    let radial = (0..3).map(|i| p[i] * n_c[i]).sum::<Complex64>();
    Ok((p - n_c * radial) * b)
}

fn measurement_factor(r: f64, k: f64, eps0: f64) -> Complex64 {
    (Complex64::i() * k * r).exp() / r * (k * k / (4.0 * std::f64::consts::PI * eps0))
}

/// Recover the full polarization vector from two far-field measurements in
/// orthogonal directions: the n₁ measurement determines the part of P
/// transverse to n₁, and the radial gap (P·n₁) is read off the n₂
/// measurement, which retains that component.
pub fn reconstruct_polarization(
    eprime_n1: &CVec3,
    eprime_n2: &CVec3,
    n1: Vector3<f64>,
    n2: Vector3<f64>,
    r: f64,
    k: f64,
    eps0: f64,
) -> Result<CVec3> {
    check_unit(&n1, "n1")?;
    check_unit(&n2, "n2")?;
    if n1.dot(&n2).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "measurement directions must be orthogonal, n1·n2 = {}",
            n1.dot(&n2)
        )));
    }
    check_positive(r, "distance r")?;
    check_positive(k, "wavenumber k")?;
    check_positive(eps0, "epsilon0")?;
    let b = measurement_factor(r, k, eps0);
    let n1_c = CVec3::from_fn(|i, _| Complex64::from(n1[i]));
    let transverse = eprime_n1 / b;
    let radial = (0..3).map(|i| (eprime_n2[i] / b) * n1_c[i]).sum::<Complex64>();
    Ok(transverse + n1_c * radial)
}

/// Invert `P = α·V·ε₀·E` for the incident field by a direct 3×3 solve. The
/// quadratic form of α is an energy, so α must be positive definite; the
/// check uses the eigenvalues of the symmetric part.
pub fn reconstruct_field(p: &CVec3, alpha: &Tensor3, v: f64, eps0: f64) -> Result<CVec3> {
    check_positive(v, "volume")?;
    check_positive(eps0, "epsilon0")?;
    let sym = (alpha + alpha.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    if let Some(bad) = eig.iter().find(|&&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: *bad });
    }
    let lu = Matrix3::from(*alpha).lu();
    let scale = Complex64::from(1.0 / (v * eps0));
    let re = Vector3::from_fn(|i, _| p[i].re);
    let im = Vector3::from_fn(|i, _| p[i].im);
    let x_re = lu.solve(&re).ok_or(Error::SolverFailure {
        reason: "polarizability solve failed".into(),
        condition: None,
    })?;
    let x_im = lu.solve(&im).ok_or(Error::SolverFailure {
        reason: "polarizability solve failed".into(),
        condition: None,
    })?;
    Ok(CVec3::from_fn(|i, _| {
        Complex64::new(x_re[i], x_im[i]) * scale
    }))
}
