//! End-to-end checks of the numerical guarantees this crate ships with: one
//! test per guarantee, each printing a single PASS/FAIL summary line.
//!
//! Run `cargo test --test acceptance -- --nocapture` to see the lines; any
//! failure also fails the build the normal way.

use nalgebra::{Vector3};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

use sbs_core::kernels::{
    assemble_double_layer, assemble_single_layer, gauss_residual, ChainOrdering, KernelMatrix,
};
use sbs_core::manybody::{
    assemble_charge_system, coupling_margin, manybody_amplitude, solve_charges, Body, BodyEnsemble,
    SolveMethod,
};
use sbs_core::medium::{
    born_amplitude, born_inverse, directions_for_momentum, momentum_lattice, required_wavenumber,
    BornDatum, GridGeometry, PotentialGrid,
};
use sbs_core::mesh::{generate_box, generate_ellipsoid, generate_sphere};
use sbs_core::moments::{
    alpha_series, beta_series_with, capacitance_bem_oracle, capacitance_series, fit_geometric_decay,
    Contrast, ConvergenceReport,
};
use sbs_core::scattering::{
    amplitude_dirichlet, amplitude_impedance, amplitude_neumann, em_far_field, em_polarizations,
    reconstruct_field, reconstruct_polarization, scattering_matrix, synthesize_measurement,
    PlaneWave,
};
use sbs_core::{Tensor3, TriMesh};

type Outcome = Result<String, String>;

fn verdict(id: u32, title: &str, outcome: Outcome) {
    match outcome {
        Ok(detail) => println!("acceptance {id:02} PASS  {title}: {detail}"),
        Err(why) => {
            println!("acceptance {id:02} FAIL  {title}: {why}");
            panic!("acceptance criterion {id:02} failed: {why}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    format!("unexpected error: {e}")
}

/// Refinement-4 unit icosphere with both kernel matrices, shared by the
/// criteria that need the fine sphere discretization.
static SPHERE4: Lazy<(TriMesh, KernelMatrix, KernelMatrix)> = Lazy::new(|| {
    let mesh = generate_sphere(1.0, 4).expect("icosphere generation");
    let g = assemble_single_layer(&mesh).expect("single-layer assembly");
    let psi = assemble_double_layer(&mesh).expect("double-layer assembly");
    (mesh, g, psi)
});

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

fn random_cvec(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<Complex64> {
    Vector3::from_fn(|_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * Complex64::from(scale)
    })
}

#[test]
fn acceptance_01_sphere_capacitance_order_zero() {
    let outcome = (|| -> Outcome {
        // Fresh single-threaded pool so the timing claim is honest even on
        // multi-core machines; the shared Lazy state is deliberately not used.
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(fail)?;
        let start = Instant::now();
        let (c0, panels) = pool.install(|| -> Result<(f64, usize), String> {
            let mesh = generate_sphere(1.0, 4).map_err(fail)?;
            let g = assemble_single_layer(&mesh).map_err(fail)?;
            let psi = assemble_double_layer(&mesh).map_err(fail)?;
            let (c0, _) = capacitance_series(&mesh, &g, &psi, 1.0, 0).map_err(fail)?;
            Ok((c0, mesh.num_panels()))
        })?;
        let elapsed = start.elapsed();
        let exact = 4.0 * PI;
        let rel = (c0 - exact) / exact;
        ensure(rel.abs() <= 0.01, || {
            format!("C0 = {c0:.6} deviates from 4π by {:.3}%", 100.0 * rel)
        })?;
        ensure(elapsed.as_secs_f64() < 30.0, || {
            format!("single-threaded run took {elapsed:.2?}, budget 30 s")
        })?;
        Ok(format!(
            "C0 = {c0:.5} on {panels} panels, off 4π by {:+.3}%, {elapsed:.2?} single-threaded",
            100.0 * rel
        ))
    })();
    verdict(1, "unit-sphere capacitance at order 0", outcome);
}

#[test]
fn acceptance_02_series_approaches_bem_oracle() {
    let outcome = (|| -> Outcome {
        let mut details = Vec::new();
        let cases: [(&str, TriMesh); 2] = [
            ("cube", generate_box(1.0, 1.0, 1.0, 12).map_err(fail)?),
            ("ellipsoid 2:1:1", generate_ellipsoid(2.0, 1.0, 1.0, 3).map_err(fail)?),
        ];
        for (name, mesh) in cases {
            let g = assemble_single_layer(&mesh).map_err(fail)?;
            let psi = assemble_double_layer(&mesh).map_err(fail)?;
            let (last, report) = capacitance_series(&mesh, &g, &psi, 1.0, 6).map_err(fail)?;
            let oracle = capacitance_bem_oracle(&mesh, &g, 1.0).map_err(fail)?;
            let (_, q) = fit_geometric_decay(&report.order_values, Some(oracle)).map_err(fail)?;
            ensure(q > 0.0 && q < 1.0, || {
                format!("{name}: fitted decay ratio q = {q:.3} outside (0, 1)")
            })?;
            let gap = (last - oracle) / oracle;
            ensure(gap.abs() < 0.02, || {
                format!("{name}: final series gap {:.3}% exceeds 2%", 100.0 * gap)
            })?;
            let c0 = report.order_values[0];
            ensure(c0 <= oracle * 1.005, || {
                format!("{name}: C0 = {c0:.6} exceeds the variational bound {oracle:.6}")
            })?;
            details.push(format!(
                "{name}: oracle {oracle:.5}, gap {:+.3}%, q = {q:.2}",
                100.0 * gap
            ));
        }
        Ok(details.join("; "))
    })();
    verdict(2, "capacitance series vs dense-solve oracle", outcome);
}

#[test]
fn acceptance_03_first_order_polarizability() {
    let outcome = (|| -> Outcome {
        let (mesh, g, psi) = &*SPHERE4;
        let mut worst = 0.0f64;
        for gamma in [-1.0, -0.5, 0.3, 1.0] {
            let contrast = Contrast::new(gamma).map_err(fail)?;
            let (tensor, _) = alpha_series(mesh, g, psi, contrast, 1).map_err(fail)?;
            let value = tensor.trace() / 3.0;
            let expected = 2.0 * gamma + 2.0 * gamma * gamma / 3.0;
            let rel = (value - expected).abs() / expected.abs();
            ensure(rel <= 0.01, || {
                format!(
                    "γ = {gamma}: first-order value {value:.5} vs closed form {expected:.5} ({:.3}% off)",
                    100.0 * rel
                )
            })?;
            worst = worst.max(rel);
        }
        Ok(format!(
            "2γ + 2γ²/3 reproduced for γ ∈ {{−1, −0.5, 0.3, 1}}, worst deviation {:.3}%",
            100.0 * worst
        ))
    })();
    verdict(3, "unit-sphere polarizability at first order", outcome);
}

#[test]
fn acceptance_04_magnetic_polarizability_convergence() {
    let outcome = (|| -> Outcome {
        let (mesh, g, psi) = &*SPHERE4;
        let hit_order = |report: &ConvergenceReport| {
            report
                .order_values
                .iter()
                .position(|v| (v + 1.5).abs() <= 0.02 * 1.5)
                .map(|i| i + 1)
        };
        // The operator-chain grouping is ambiguous on discrete panels; both
        // groupings are exercised and at least one must converge.
        let (_, rep_default) =
            beta_series_with(mesh, g, psi, 12, ChainOrdering::NormalAtOutput).map_err(fail)?;
        let (_, rep_alt) =
            beta_series_with(mesh, g, psi, 12, ChainOrdering::NormalAtInput).map_err(fail)?;
        let hit_default = hit_order(&rep_default);
        let hit_alt = hit_order(&rep_alt);
        ensure(hit_default.is_some() || hit_alt.is_some(), || {
            format!(
                "neither chain grouping reaches −1.5 within 2% by order 12 (last values {:?} / {:?})",
                rep_default.order_values.last(),
                rep_alt.order_values.last()
            )
        })?;
        let last = rep_default.order_values.last().copied().unwrap_or(f64::NAN);
        Ok(format!(
            "β → −1.5 within 2% at order {:?} (default grouping, final {last:.4}); alternate grouping at {:?}",
            hit_default, hit_alt
        ))
    })();
    verdict(4, "unit-sphere magnetic polarizability convergence", outcome);
}

#[test]
fn acceptance_05_gauss_column_identity() {
    let outcome = (|| -> Outcome {
        let mesh3 = generate_sphere(1.0, 3).map_err(fail)?;
        let psi3 = assemble_double_layer(&mesh3).map_err(fail)?;
        let (_, _, psi4) = &*SPHERE4;
        let mut details = Vec::new();
        for (name, psi, tol) in [("refinement 3", &psi3, 0.03), ("refinement 4", psi4, 0.01)] {
            let n = psi.n();
            let areas = psi.areas();
            let mut worst = 0.0f64;
            for col in 0..n {
                let sum: f64 = (0..n).map(|row| areas[row] * psi.entry(row, col)).sum();
                worst = worst.max((sum + 2.0 * PI).abs() / (2.0 * PI));
            }
            ensure(worst <= tol, || {
                format!("{name}: worst column deviation {worst:.2e} exceeds {tol}")
            })?;
            details.push(format!("{name}: worst column deviation {worst:.1e}"));
        }
        // The pre-correction quadrature deviation should shrink under
        // refinement; it is the honest mesh-quality number.
        let r3 = gauss_residual(&psi3).map_err(fail)?;
        let r4 = gauss_residual(&SPHERE4.2).map_err(fail)?;
        ensure(r4 < r3 && r3 < 0.10, || {
            format!("quadrature residual did not improve: {r3:.4} → {r4:.4}")
        })?;
        details.push(format!("raw quadrature residual {:.2}% → {:.2}%", 100.0 * r3, 100.0 * r4));
        Ok(details.join("; "))
    })();
    verdict(5, "solid-angle column identity of the double layer", outcome);
}

#[test]
fn acceptance_06_scalar_amplitudes() {
    let outcome = (|| -> Outcome {
        // Sound-soft unit sphere: C = 4π gives f = −1 in every direction.
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for _ in 0..16 {
            let n = random_unit(&mut rng);
            let f = amplitude_dirichlet(4.0 * PI, Complex64::from(1.0), n).map_err(fail)?;
            ensure(f.value == Complex64::from(-1.0), || {
                format!("sound-soft amplitude {} is not exactly −1", f.value)
            })?;
        }

        // Sound-hard unit sphere with the computed magnetic polarizability
        // and the discrete mesh volume.
        let (mesh, g, psi) = &*SPHERE4;
        let (beta, _) = beta_series_with(mesh, g, psi, 12, ChainOrdering::NormalAtOutput)
            .map_err(fail)?;
        let volume = mesh.metrics().volume;
        let k = 0.5;
        let nu = Vector3::z();
        let scale = (k * k / 3.0) * 2.5; // |f| at backscatter, the pattern peak
        let mut worst = 0.0f64;
        for i in 0..=16 {
            let theta = PI * i as f64 / 16.0;
            let n = Vector3::new(0.0, theta.sin(), theta.cos());
            let f = amplitude_neumann(&beta, volume, k, nu, n).map_err(fail)?;
            let expected = -(k * k / 3.0) * (1.0 - 1.5 * theta.cos());
            let dev = (f.value - Complex64::from(expected)).norm();
            ensure(dev <= 0.02 * scale, || {
                format!("sound-hard pattern at θ = {theta:.2}: deviation {dev:.2e} vs scale {scale:.2e}")
            })?;
            if expected.abs() > 0.3 * scale {
                let rel = dev / expected.abs();
                ensure(rel <= 0.02, || {
                    format!("sound-hard pattern at θ = {theta:.2}: relative error {:.2}%", 100.0 * rel)
                })?;
                worst = worst.max(rel);
            }
        }

        // Impedance limits against the sound-soft value, sphere S = C = 4π.
        let s = 4.0 * PI;
        let cap = 4.0 * PI;
        let u = Complex64::from(1.0);
        let dir = amplitude_dirichlet(cap, u, nu).map_err(fail)?;
        let f_hi = amplitude_impedance(Complex64::from(1e8), s, cap, u, nu).map_err(fail)?;
        let hi_rel = (f_hi.value - dir.value).norm() / dir.value.norm();
        ensure(hi_rel <= 1e-6, || {
            format!("h → ∞ limit off by {hi_rel:.2e} relative")
        })?;
        let f_lo = amplitude_impedance(Complex64::from(1e-8), s, cap, u, nu).map_err(fail)?;
        let lo_rel = f_lo.value.norm() / dir.value.norm();
        ensure(lo_rel <= 1e-6, || {
            format!("h → 0 limit leaves {lo_rel:.2e} of the sound-soft amplitude")
        })?;
        let f_zero = amplitude_impedance(Complex64::from(0.0), s, cap, u, nu).map_err(fail)?;
        ensure(f_zero.value == Complex64::from(0.0), || {
            "h = 0 must scatter nothing at this order".to_string()
        })?;

        Ok(format!(
            "soft: exactly −1; hard: worst pattern error {:.2}%; impedance limits {hi_rel:.1e}/{lo_rel:.1e}",
            100.0 * worst
        ))
    })();
    verdict(6, "scalar amplitudes for the three boundary conditions", outcome);
}

#[test]
fn acceptance_07_em_consistency_and_transversality() {
    let outcome = (|| -> Outcome {
        let alpha = Tensor3::identity() * 2.4;
        let beta = Tensor3::zeros();
        let (k, v, eps0, mu0) = (0.7, 1.3, 1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst_gap = 0.0f64;
        for _ in 0..200 {
            let theta: f64 = rng.gen_range(0.0..PI);
            let e1 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let e2 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let smat = scattering_matrix(&alpha, &beta, theta, k, v, mu0).map_err(fail)?;
            let (f2, f1) = smat.apply(e2, e1);
            let e = Vector3::new(e1, e2, Complex64::from(0.0));
            let (p, m) = em_polarizations(
                &alpha,
                &Tensor3::zeros(),
                &beta,
                v,
                eps0,
                mu0,
                &e,
                &Vector3::zeros(),
                true,
            )
            .map_err(fail)?;
            let n = Vector3::new(0.0, theta.sin(), theta.cos());
            let (fe, _) = em_far_field(&p, &m, n, k, eps0, mu0).map_err(fail)?;
            let in_plane = Vector3::new(0.0, theta.cos(), -theta.sin());
            let f2_ff: Complex64 = (0..3).map(|i| fe[i] * Complex64::from(in_plane[i])).sum();
            let f1_ff = fe[0];
            let scale = fe.norm().max(1e-6);
            let gap = ((f2 - f2_ff).norm().max((f1 - f1_ff).norm())) / scale;
            ensure(gap <= 1e-10, || {
                format!("matrix/far-field mismatch {gap:.2e} at θ = {theta:.3}")
            })?;
            worst_gap = worst_gap.max(gap);
        }

        let mut worst_t = 0.0f64;
        for _ in 0..1000 {
            let p = random_cvec(&mut rng, 1.0);
            let m = random_cvec(&mut rng, 1.0);
            let n = random_unit(&mut rng);
            let (fe, _) = em_far_field(&p, &m, n, 2.0, 1.0, 1.0).map_err(fail)?;
            let dot: Complex64 = (0..3).map(|i| fe[i] * Complex64::from(n[i])).sum();
            let t = dot.norm() / fe.norm().max(1.0);
            ensure(t <= 1e-12, || format!("radial far-field leak {t:.2e}"))?;
            worst_t = worst_t.max(t);
        }
        Ok(format!(
            "matrix vs far field agree to {worst_gap:.1e}; worst transversality {worst_t:.1e} over 1000 draws"
        ))
    })();
    verdict(7, "electromagnetic matrix/far-field consistency", outcome);
}

#[test]
fn acceptance_08_inverse_radiomeasurement_round_trip() {
    let outcome = (|| -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        let (v, eps0, r, k) = (1.4, 1.0, 500.0, 0.8);
        let mut worst = 0.0f64;
        for trial in 0..1000 {
            let m = Tensor3::from_fn(|_, _| rng.gen_range(-0.3..0.3));
            let alpha = Tensor3::identity() * 2.0 + (m + m.transpose()) * 0.5;
            let scale = 10.0f64.powf(rng.gen_range(-2.0..2.0));
            let e = random_cvec(&mut rng, scale);
            let p = Vector3::from_fn(|i, _| {
                (0..3)
                    .map(|j| Complex64::from(alpha[(i, j)]) * e[j])
                    .sum::<Complex64>()
                    * Complex64::from(v * eps0)
            });
            let n1 = random_unit(&mut rng);
            let helper = if n1.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            let n2 = n1.cross(&helper).normalize();
            let m1 = synthesize_measurement(&p, n1, r, k, eps0).map_err(fail)?;
            let m2 = synthesize_measurement(&p, n2, r, k, eps0).map_err(fail)?;
            let p_rec = reconstruct_polarization(&m1, &m2, n1, n2, r, k, eps0).map_err(fail)?;
            let e_rec = reconstruct_field(&p_rec, &alpha, v, eps0).map_err(fail)?;
            let rel = (e_rec - e).norm() / e.norm();
            ensure(rel <= 1e-10, || {
                format!("trial {trial}: field recovered to only {rel:.2e} relative")
            })?;
            worst = worst.max(rel);
        }
        Ok(format!(
            "1000 randomized field→measurement→field trips, worst error {worst:.1e}"
        ))
    })();
    verdict(8, "far-field inversion round trip", outcome);
}

#[test]
fn acceptance_09_many_body_charges() {
    let outcome = (|| -> Outcome {
        let incident = PlaneWave::new(0.0, Vector3::z(), Complex64::from(1.0)).map_err(fail)?;
        let mut details = Vec::new();
        for d in [5.0, 10.0, 100.0] {
            let ensemble = BodyEnsemble::new(
                vec![
                    Body { position: Vector3::zeros(), capacitance: 4.0 * PI },
                    Body { position: Vector3::new(0.0, 0.0, d), capacitance: 4.0 * PI },
                ],
                incident,
            )
            .map_err(fail)?;
            let system = assemble_charge_system(&ensemble).map_err(fail)?;
            let direct = solve_charges(&system, SolveMethod::Direct).map_err(fail)?;
            let expected = -4.0 * PI / (1.0 + 1.0 / d);
            for j in 0..2 {
                let rel = (direct.q()[j] - Complex64::from(expected)).norm() / expected.abs();
                ensure(rel <= 1e-12, || {
                    format!("d = {d}: charge {j} off the closed form by {rel:.2e}")
                })?;
            }
            let margin = coupling_margin(&ensemble);
            ensure(margin < 0.5, || {
                format!("d = {d}: coupling margin {margin:.3} not below 0.5")
            })?;
            let jacobi = solve_charges(
                &system,
                SolveMethod::Jacobi { max_iter: 200, tol: 1e-13 },
            )
            .map_err(fail)?;
            for j in 0..2 {
                let rel = (direct.q()[j] - jacobi.q()[j]).norm() / direct.q()[j].norm();
                ensure(rel <= 1e-10, || {
                    format!("d = {d}: iterative and direct charges differ by {rel:.2e}")
                })?;
            }
            details.push(format!("d = {d}: Q = {:.6}", direct.q()[0].re));
        }

        // One body at the origin collapses to the isolated closed form.
        let single_wave = PlaneWave::new(0.9, Vector3::x(), Complex64::new(0.3, -0.6)).map_err(fail)?;
        let cap = 5.5;
        let single = BodyEnsemble::new(
            vec![Body { position: Vector3::zeros(), capacitance: cap }],
            single_wave,
        )
        .map_err(fail)?;
        let q = solve_charges(&assemble_charge_system(&single).map_err(fail)?, SolveMethod::Direct)
            .map_err(fail)?;
        let f = manybody_amplitude(&single, &q, Vector3::z()).map_err(fail)?;
        let isolated = amplitude_dirichlet(cap, single_wave.eval(Vector3::zeros()), Vector3::z())
            .map_err(fail)?;
        ensure(f == isolated.value, || {
            format!("single-body amplitude {f} differs from the isolated value {}", isolated.value)
        })?;
        details.push("single body: exact isolated reduction".to_string());
        Ok(details.join("; "))
    })();
    verdict(9, "coupled charges for sphere pairs", outcome);
}

#[test]
fn acceptance_10_born_forward_and_inverse() {
    let outcome = (|| -> Outcome {
        // Forward: Gaussian density against its analytic transform at 8 cells
        // per standard deviation.
        let s = 1.0;
        let h = s / 8.0;
        let n_cells = (12.0 * s / h) as usize;
        let grid = PotentialGrid::from_fn(
            Vector3::repeat(-6.0 * s),
            h,
            (n_cells, n_cells, n_cells),
            |y| (-y.norm_squared() / (2.0 * s * s)).exp(),
        )
        .map_err(fail)?;
        let k = 2.0;
        let peak = (2.0 * PI).powf(1.5) * s.powi(3) / (4.0 * PI);
        let nu = Vector3::z();
        let mut worst_fwd = 0.0f64;
        for n_dir in [Vector3::z(), Vector3::new(0.0, 0.6, 0.8), Vector3::x(), -Vector3::z()] {
            let f = born_amplitude(&grid, k, nu, n_dir).map_err(fail)?;
            let kappa = (n_dir - nu) * k;
            let expected = -peak * (-s * s * kappa.norm_squared() / 2.0).exp();
            let dev = (f - Complex64::from(expected)).norm() / peak;
            ensure(dev <= 1e-4, || {
                format!("Gaussian amplitude toward {n_dir:?} off by {dev:.2e} of peak")
            })?;
            worst_fwd = worst_fwd.max(dev);
        }

        // Inverse: full-lattice data from a random band-limited density.
        let nbox = 8;
        let hb = 0.5;
        let origin = Vector3::repeat(-(nbox as f64) * hb / 2.0);
        let geom = GridGeometry { origin, spacing: hb, dims: (nbox, nbox, nbox) };
        let length = nbox as f64 * hb;
        let mut rng = ChaCha8Rng::seed_from_u64(1010);
        let modes: Vec<(Vector3<f64>, f64, f64)> = (0..6)
            .map(|_| {
                let m = Vector3::new(
                    rng.gen_range(-2i32..3) as f64,
                    rng.gen_range(-2i32..3) as f64,
                    rng.gen_range(-2i32..3) as f64,
                );
                (
                    m * 2.0 * PI / length,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..2.0 * PI),
                )
            })
            .collect();
        let density = PotentialGrid::from_fn(origin, hb, (nbox, nbox, nbox), |y| {
            modes.iter().map(|(kv, a, ph)| a * (kv.dot(&y) + ph).cos()).sum()
        })
        .map_err(fail)?;
        let kb = 1.05 * required_wavenumber(&geom).map_err(fail)?;
        let data: Vec<BornDatum> = momentum_lattice(&geom)
            .map_err(fail)?
            .iter()
            .map(|&kappa| -> Result<BornDatum, String> {
                let (nu, n) = directions_for_momentum(kappa, kb)
                    .ok_or_else(|| "wavenumber below lattice requirement".to_string())?;
                let f = born_amplitude(&density, kb, nu, n).map_err(fail)?;
                BornDatum::new(kb, nu, n, f).map_err(fail)
            })
            .collect::<Result<_, _>>()?;
        let (recovered, residue) = born_inverse(&data, &geom).map_err(fail)?;
        let q_peak = density.peak();
        let max_err = density
            .values()
            .iter()
            .zip(recovered.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        ensure(max_err <= 0.01 * q_peak, || {
            format!("recovered density off by {max_err:.2e} vs peak {q_peak:.2e}")
        })?;
        Ok(format!(
            "Gaussian forward worst {worst_fwd:.1e} of peak; inversion max error {:.1e} of peak (imag residue {residue:.1e})",
            max_err / q_peak
        ))
    })();
    verdict(10, "Born forward oracle and Fourier inversion", outcome);
}
