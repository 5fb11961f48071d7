//! One function per subcommand. Each returns the JSON report plus an
//! optional CSV side file; `main` owns rendering, file writes and exit
//! codes.

use std::path::PathBuf;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde_json::{json, Value};

use sbs_core::kernels::{assemble_double_layer, assemble_single_layer, gauss_residual, KernelMatrix};
use sbs_core::medium::{
    born_amplitude, born_inverse, directions_for_momentum, momentum_lattice, required_wavenumber,
};
use sbs_core::mesh::{generate_box, generate_ellipsoid, generate_sphere, load_mesh, MeshMetrics};
use sbs_core::moments::{
    alpha_series, beta_series, capacitance_bem_oracle, capacitance_series, symmetry_deviation,
    Contrast, ConvergenceReport,
};
use sbs_core::scattering::{
    amplitude_dirichlet, amplitude_impedance, amplitude_neumann, reconstruct_field,
    reconstruct_polarization, refraction_tensor, scattering_matrix,
};
use sbs_core::manybody::{
    assemble_charge_system, coupling_margin, manybody_amplitude, solve_charges,
};
use sbs_core::{
    Body, BodyEnsemble, BornDatum, Error, GridGeometry, PlaneWave, PotentialGrid, Result,
    SolveMethod, Tensor3, TriMesh,
};

use crate::args::*;
use crate::report::{cjson, cvecjson, tensorjson, vjson, Diagnostics, Report, SCHEMA_VERSION};
use crate::scenes::{
    ensure_schema_version, fibonacci_directions, orthogonal_unit, read_json, unit_vector,
    BornDataFile, Boundary, ManyScene, MethodSpec, ProbeInput, SingleScene,
};

/// Report plus an optional CSV side file (path, contents).
pub type Outcome = (Report, Option<(PathBuf, String)>);

/// Series order used when a scene does not carry one.
const SCENE_ORDER: usize = 8;

const GAUSS_RESIDUAL_WARN: f64 = 0.05;
const COUPLING_MARGIN_WARN: f64 = 0.5;
const IMAG_RESIDUE_WARN: f64 = 1e-6;

/// Comma-separated triples arrive as flat lists; enforce the length here
/// (clap's own arity check counts shell tokens, not split values).
fn triple(values: &[f64], name: &str) -> Result<[f64; 3]> {
    match values {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(Error::InvalidArgument(format!(
            "{name} needs exactly 3 comma-separated values, got {}",
            values.len()
        ))),
    }
}

fn triple_usize(values: &[usize], name: &str) -> Result<[usize; 3]> {
    match values {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(Error::InvalidArgument(format!(
            "{name} needs exactly 3 comma-separated values, got {}",
            values.len()
        ))),
    }
}

fn mesh_from_args(args: &ShapeArgs) -> Result<(TriMesh, Value)> {
    if let Some(path) = &args.mesh {
        if args.shape.is_some() {
            return Err(Error::InvalidArgument(
                "give either a mesh file or --shape, not both".into(),
            ));
        }
        let mesh = load_mesh(path)?;
        return Ok((mesh, json!({ "mesh": path.display().to_string() })));
    }
    match args.shape {
        Some(ShapeKind::Sphere) => Ok((
            generate_sphere(args.radius, args.refinement)?,
            json!({ "shape": "sphere", "radius": args.radius, "refinement": args.refinement }),
        )),
        Some(ShapeKind::Ellipsoid) => {
            let axes = args.semi_axes.as_ref().ok_or_else(|| {
                Error::InvalidArgument("ellipsoid needs --semi-axes a,b,c".into())
            })?;
            let [a, b, c] = triple(axes, "--semi-axes")?;
            Ok((
                generate_ellipsoid(a, b, c, args.refinement)?,
                json!({ "shape": "ellipsoid", "semi_axes": [a, b, c], "refinement": args.refinement }),
            ))
        }
        Some(ShapeKind::Box) => {
            let size = args
                .size
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("box needs --size lx,ly,lz".into()))?;
            let [lx, ly, lz] = triple(size, "--size")?;
            Ok((
                generate_box(lx, ly, lz, args.divisions)?,
                json!({ "shape": "box", "size": [lx, ly, lz], "divisions": args.divisions }),
            ))
        }
        None => Err(Error::InvalidArgument(
            "give a mesh file or --shape sphere|ellipsoid|box".into(),
        )),
    }
}

fn assemble_kernels(mesh: &TriMesh) -> Result<(KernelMatrix, KernelMatrix, f64)> {
    let g = assemble_single_layer(mesh)?;
    let psi = assemble_double_layer(mesh)?;
    let residual = gauss_residual(&psi)?;
    Ok((g, psi, residual))
}

fn note_gauss(diag: &mut Diagnostics, residual: f64) {
    diag.gauss_residual = Some(residual);
    if residual > GAUSS_RESIDUAL_WARN {
        diag.warn(
            "GAUSS_RESIDUAL_HIGH",
            format!(
                "surface quadrature residual {residual:.3} exceeds {GAUSS_RESIDUAL_WARN}; refine the mesh"
            ),
        );
    }
}

fn note_series(diag: &mut Diagnostics, report: &ConvergenceReport, what: &str) {
    diag.fitted_a = report.fitted_a;
    diag.fitted_q = report.fitted_q;
    if !report.converged {
        diag.warn(
            "SERIES_NOT_CONVERGED",
            format!("the {what} series shows no geometric decay at this order"),
        );
    }
}

fn metrics_json(metrics: &MeshMetrics) -> Value {
    json!({
        "surface_area": metrics.surface_area,
        "volume": metrics.volume,
        "centroid": vjson(&metrics.centroid),
        "diameter": metrics.diameter,
    })
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn mesh_info(args: &ShapeArgs) -> Result<Outcome> {
    let (mesh, inputs) = mesh_from_args(args)?;
    let metrics = mesh.metrics();
    let outputs = json!({
        "vertices": mesh.vertices().len(),
        "faces": mesh.faces().len(),
        "surface_area": metrics.surface_area,
        "volume": metrics.volume,
        "centroid": vjson(&metrics.centroid),
        "diameter": metrics.diameter,
        "reoriented": mesh.was_reoriented(),
        "id": format!("{:016x}", mesh.id()),
    });
    Ok((
        Report::new("mesh info", inputs, outputs, Diagnostics::default()),
        None,
    ))
}

pub fn capacitance(args: &CapacitanceArgs) -> Result<Outcome> {
    let (mesh, mut inputs) = mesh_from_args(&args.shape)?;
    inputs["order"] = json!(args.order);
    inputs["epsilon0"] = json!(args.epsilon0);
    let (g, psi, residual) = assemble_kernels(&mesh)?;
    let (value, report) = capacitance_series(&mesh, &g, &psi, args.epsilon0, args.order)?;

    let mut diag = Diagnostics::default();
    note_gauss(&mut diag, residual);
    note_series(&mut diag, &report, "capacitance");

    let mut outputs = json!({
        "capacitance": value,
        "order_used": report.order_values.len() - 1,
        "order_values": report.order_values,
        "converged": report.converged,
    });
    if args.oracle {
        let oracle = capacitance_bem_oracle(&mesh, &g, args.epsilon0)?;
        outputs["bem_oracle"] = json!(oracle);
        outputs["oracle_gap"] = json!((value - oracle) / oracle);
    }
    Ok((
        Report::new("capacitance", inputs, outputs, diag),
        None,
    ))
}

pub fn polarizability(args: &PolarizabilityArgs) -> Result<Outcome> {
    let (mesh, mut inputs) = mesh_from_args(&args.shape)?;
    inputs["gamma"] = json!(args.gamma);
    inputs["order"] = json!(args.order);
    let (g, psi, residual) = assemble_kernels(&mesh)?;
    let contrast = Contrast::new(args.gamma)?;
    let (alpha, report) = alpha_series(&mesh, &g, &psi, contrast, args.order)?;

    let mut diag = Diagnostics::default();
    note_gauss(&mut diag, residual);
    note_series(&mut diag, &report, "polarizability");

    let outputs = json!({
        "tensor": tensorjson(&alpha),
        "scalar": alpha.trace() / 3.0,
        "symmetry_deviation": symmetry_deviation(&alpha),
        "order_used": report.order_values.len(),
        "order_values": report.order_values,
        "converged": report.converged,
    });
    Ok((
        Report::new("polarizability", inputs, outputs, diag),
        None,
    ))
}

pub fn scatter_single(args: &SceneArgs) -> Result<Outcome> {
    let scene: SingleScene = read_json(&args.scene)?;
    ensure_schema_version(scene.schema_version)?;
    if scene.theta_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "theta_count must be at least 2, got {}",
            scene.theta_count
        )));
    }
    let nu = unit_vector(scene.nu, "nu")?;
    let amplitude = Complex64::new(scene.amplitude_re, scene.amplitude_im);
    let wave = PlaneWave::new(scene.k, nu, amplitude)?;
    let mesh = scene.body.build()?;
    let metrics = mesh.metrics();
    let u0_at = wave.eval(metrics.centroid);

    let (g, psi, residual) = assemble_kernels(&mesh)?;
    let mut diag = Diagnostics::default();
    note_gauss(&mut diag, residual);

    // Quantities each boundary condition needs, in epsilon0 = 1 units.
    let mut used = serde_json::Map::new();
    enum Model {
        Dirichlet { c: f64 },
        Neumann { beta: Tensor3, volume: f64 },
        Impedance { h: Complex64, s: f64, c: f64 },
    }
    let model = match &scene.boundary {
        Boundary::Dirichlet => {
            let (c, report) = capacitance_series(&mesh, &g, &psi, 1.0, SCENE_ORDER)?;
            note_series(&mut diag, &report, "capacitance");
            used.insert("capacitance".into(), json!(c));
            Model::Dirichlet { c }
        }
        Boundary::Neumann => {
            let (beta, report) = beta_series(&mesh, &g, &psi, SCENE_ORDER)?;
            note_series(&mut diag, &report, "magnetic polarizability");
            used.insert("beta".into(), tensorjson(&beta));
            used.insert("volume".into(), json!(metrics.volume));
            Model::Neumann {
                beta,
                volume: metrics.volume,
            }
        }
        Boundary::Impedance { h_re, h_im } => {
            let (c, report) = capacitance_series(&mesh, &g, &psi, 1.0, SCENE_ORDER)?;
            note_series(&mut diag, &report, "capacitance");
            let h = Complex64::new(*h_re, *h_im);
            used.insert("capacitance".into(), json!(c));
            used.insert("surface_area".into(), json!(metrics.surface_area));
            used.insert("h".into(), cjson(h));
            Model::Impedance {
                h,
                s: metrics.surface_area,
                c,
            }
        }
    };

    let in_plane = orthogonal_unit(&nu);
    let mut sweep = Vec::new();
    let mut csv = String::from("theta,f_re,f_im,f_abs2\n");
    for i in 0..scene.theta_count {
        let theta = i as f64 * std::f64::consts::PI / (scene.theta_count - 1) as f64;
        let n = nu * theta.cos() + in_plane * theta.sin();
        let f = match &model {
            Model::Dirichlet { c } => amplitude_dirichlet(*c, u0_at, n)?.value,
            Model::Neumann { beta, volume } => {
                amplitude_neumann(beta, *volume, scene.k, nu, n)?.value * u0_at
            }
            Model::Impedance { h, s, c } => amplitude_impedance(*h, *s, *c, u0_at, n)?.value,
        };
        sweep.push(json!({
            "theta": theta,
            "n": vjson(&n),
            "f": cjson(f),
            "f_abs2": f.norm_sqr(),
        }));
        csv.push_str(&format!("{},{},{},{}\n", theta, f.re, f.im, f.norm_sqr()));
    }

    let inputs = json!({
        "scene": args.scene.display().to_string(),
        "boundary": scene.boundary.name(),
        "k": scene.k,
        "nu": vjson(&nu),
        "amplitude": cjson(amplitude),
        "body": scene.body.describe(),
        "theta_count": scene.theta_count,
    });
    let outputs = json!({
        "body": metrics_json(&metrics),
        "u0_at_body": cjson(u0_at),
        "used": Value::Object(used),
        "sweep": sweep,
    });
    let csv_out = args.csv.clone().map(|p| (p, csv));
    Ok((Report::new("scatter single", inputs, outputs, diag), csv_out))
}

pub fn scatter_many(args: &SceneArgs) -> Result<Outcome> {
    let scene: ManyScene = read_json(&args.scene)?;
    ensure_schema_version(scene.schema_version)?;
    let nu = unit_vector(scene.nu, "nu")?;
    let amplitude = Complex64::new(scene.amplitude_re, scene.amplitude_im);
    let wave = PlaneWave::new(scene.k, nu, amplitude)?;
    let bodies = scene
        .bodies
        .iter()
        .map(|b| {
            Ok(Body {
                position: Vector3::new(b.position[0], b.position[1], b.position[2]),
                capacitance: b.capacitance()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ensemble = BodyEnsemble::new(bodies, wave)?;
    let system = assemble_charge_system(&ensemble)?;
    let (method, method_echo) = match &scene.method {
        MethodSpec::Direct => (SolveMethod::Direct, json!({ "type": "direct" })),
        MethodSpec::Jacobi { max_iter, tol } => (
            SolveMethod::Jacobi {
                max_iter: *max_iter,
                tol: *tol,
            },
            json!({ "type": "jacobi", "max_iter": max_iter, "tol": tol }),
        ),
    };
    let charges = solve_charges(&system, method)?;
    let residual = system.residual(charges.q());

    let directions: Vec<Vector3<f64>> = match &scene.directions {
        Some(list) => list
            .iter()
            .map(|raw| unit_vector(*raw, "direction"))
            .collect::<Result<Vec<_>>>()?,
        None => fibonacci_directions(scene.direction_count),
    };
    let mut amplitudes = Vec::new();
    let mut csv = String::from("nx,ny,nz,f_re,f_im,f_abs2\n");
    for n in &directions {
        let f = manybody_amplitude(&ensemble, &charges, *n)?;
        amplitudes.push(json!({ "n": vjson(n), "f": cjson(f), "f_abs2": f.norm_sqr() }));
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            n.x,
            n.y,
            n.z,
            f.re,
            f.im,
            f.norm_sqr()
        ));
    }

    let margin = coupling_margin(&ensemble);
    let mut diag = Diagnostics {
        coupling_margin: Some(margin),
        ..Diagnostics::default()
    };
    if margin >= COUPLING_MARGIN_WARN {
        diag.warn(
            "COUPLING_MARGIN_HIGH",
            format!(
                "coupling margin {margin:.3} is above {COUPLING_MARGIN_WARN}; the point-capacitor model is strained"
            ),
        );
    }

    let inputs = json!({
        "scene": args.scene.display().to_string(),
        "k": scene.k,
        "nu": vjson(&nu),
        "amplitude": cjson(amplitude),
        "bodies": ensemble.bodies().len(),
        "method": method_echo,
    });
    let outputs = json!({
        "charges": charges.q().iter().map(|&q| cjson(q)).collect::<Vec<_>>(),
        "residual": residual,
        "separation_ratio": finite_or_null(ensemble.separation_ratio()),
        "amplitudes": amplitudes,
    });
    let csv_out = args.csv.clone().map(|p| (p, csv));
    Ok((Report::new("scatter many", inputs, outputs, diag), csv_out))
}

fn matrix2_json(m: &Matrix2<Complex64>) -> Value {
    Value::Array(
        (0..2)
            .map(|i| Value::Array((0..2).map(|j| cjson(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn em_matrix(args: &EmMatrixArgs) -> Result<Outcome> {
    if args.theta_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "--theta-count must be at least 2, got {}",
            args.theta_count
        )));
    }
    let (mesh, mut inputs) = mesh_from_args(&args.shape)?;
    inputs["gamma"] = json!(args.gamma);
    inputs["k"] = json!(args.k);
    inputs["theta_count"] = json!(args.theta_count);
    inputs["mu0"] = json!(args.mu0);
    inputs["magnetic"] = json!(!args.no_magnetic);
    inputs["order"] = json!(args.order);
    if let Some(density) = args.density {
        inputs["density"] = json!(density);
    }
    let metrics = mesh.metrics();
    let (g, psi, residual) = assemble_kernels(&mesh)?;
    let mut diag = Diagnostics::default();
    note_gauss(&mut diag, residual);

    let contrast = Contrast::new(args.gamma)?;
    let (alpha, alpha_report) = alpha_series(&mesh, &g, &psi, contrast, args.order)?;
    note_series(&mut diag, &alpha_report, "polarizability");
    let beta = if args.no_magnetic {
        Tensor3::zeros()
    } else {
        let (beta, beta_report) = beta_series(&mesh, &g, &psi, args.order)?;
        if !beta_report.converged {
            diag.warn(
                "SERIES_NOT_CONVERGED",
                "the magnetic polarizability series shows no geometric decay at this order".into(),
            );
        }
        beta
    };

    let mut matrices = Vec::new();
    let mut csv =
        String::from("theta,s00_re,s00_im,s01_re,s01_im,s10_re,s10_im,s11_re,s11_im\n");
    let mut forward: Option<Matrix2<Complex64>> = None;
    for i in 0..args.theta_count {
        let theta = i as f64 * std::f64::consts::PI / (args.theta_count - 1) as f64;
        let s = scattering_matrix(&alpha, &beta, theta, args.k, metrics.volume, args.mu0)?;
        if i == 0 {
            forward = Some(s.matrix);
        }
        matrices.push(json!({ "theta": theta, "s": matrix2_json(&s.matrix) }));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            theta,
            s.matrix[(0, 0)].re,
            s.matrix[(0, 0)].im,
            s.matrix[(0, 1)].re,
            s.matrix[(0, 1)].im,
            s.matrix[(1, 0)].re,
            s.matrix[(1, 0)].im,
            s.matrix[(1, 1)].re,
            s.matrix[(1, 1)].im,
        ));
    }

    let mut outputs = json!({
        "volume": metrics.volume,
        "alpha": tensorjson(&alpha),
        "beta": tensorjson(&beta),
        "matrices": matrices,
    });
    if let Some(density) = args.density {
        let n_matrix = refraction_tensor(density, args.k, &forward.expect("theta_count >= 2"))?;
        outputs["refraction"] = matrix2_json(&n_matrix);
    }
    let csv_out = args.csv.clone().map(|p| (p, csv));
    Ok((Report::new("em matrix", inputs, outputs, diag), csv_out))
}

fn cvec_from_pairs(pairs: &[[f64; 2]; 3]) -> Vector3<Complex64> {
    Vector3::new(
        Complex64::new(pairs[0][0], pairs[0][1]),
        Complex64::new(pairs[1][0], pairs[1][1]),
        Complex64::new(pairs[2][0], pairs[2][1]),
    )
}

pub fn probe_invert(args: &ProbeInvertArgs) -> Result<Outcome> {
    let input: ProbeInput = read_json(&args.input)?;
    ensure_schema_version(input.schema_version)?;
    let n1 = unit_vector(input.n1, "n1")?;
    let n2 = unit_vector(input.n2, "n2")?;
    let e1 = cvec_from_pairs(&input.e1);
    let e2 = cvec_from_pairs(&input.e2);
    let alpha = Tensor3::from_fn(|i, j| input.alpha[i][j]);

    let p = reconstruct_polarization(&e1, &e2, n1, n2, input.r, input.k, input.epsilon0)?;
    let e = reconstruct_field(&p, &alpha, input.volume, input.epsilon0)?;

    let inputs = json!({
        "input": args.input.display().to_string(),
        "r": input.r,
        "k": input.k,
        "epsilon0": input.epsilon0,
        "n1": vjson(&n1),
        "n2": vjson(&n2),
        "volume": input.volume,
    });
    let outputs = json!({
        "polarization": cvecjson(&p),
        "field": cvecjson(&e),
    });
    Ok((
        Report::new("probe invert", inputs, outputs, Diagnostics::default()),
        None,
    ))
}

pub fn medium_born(args: &MediumBornArgs) -> Result<Outcome> {
    let grid = PotentialGrid::load(&args.grid)?;
    let nu_arg = unit_vector(triple(&args.nu, "--nu")?, "nu")?;
    if !args.observations.len().is_multiple_of(3) {
        return Err(Error::InvalidArgument(format!(
            "each --n needs exactly 3 comma-separated values, got {} in total",
            args.observations.len()
        )));
    }
    if args.full_lattice && !args.observations.is_empty() {
        return Err(Error::InvalidArgument(
            "give either --n directions or --full-lattice, not both".into(),
        ));
    }

    // (nu, n) pairs to evaluate. Explicit observations share the --nu
    // incidence; the full lattice picks its own pair per momentum transfer.
    let mut pairs: Vec<(Vector3<f64>, Vector3<f64>)> = Vec::new();
    if args.full_lattice {
        let needed = required_wavenumber(grid.geometry())?;
        if args.k < needed {
            return Err(Error::InvalidArgument(format!(
                "k = {} cannot reach the grid's momentum lattice; need k >= {needed}",
                args.k
            )));
        }
        for kappa in momentum_lattice(grid.geometry())? {
            let (nu, n) = directions_for_momentum(kappa, args.k).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "momentum transfer {:?} unreachable at k = {}",
                    (kappa.x, kappa.y, kappa.z),
                    args.k
                ))
            })?;
            pairs.push((nu, n));
        }
    } else {
        if args.observations.is_empty() {
            return Err(Error::InvalidArgument(
                "give at least one --n direction or --full-lattice".into(),
            ));
        }
        for chunk in args.observations.chunks(3) {
            pairs.push((nu_arg, unit_vector([chunk[0], chunk[1], chunk[2]], "n")?));
        }
    }

    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut csv = String::from("kappa_x,kappa_y,kappa_z,f_re,f_im\n");
    for (nu, n) in &pairs {
        let f = born_amplitude(&grid, args.k, *nu, *n)?;
        let kappa = (n - nu) * args.k;
        rows.push(json!({
            "k": args.k,
            "nu": vjson(nu),
            "n": vjson(n),
            "kappa": vjson(&kappa),
            "f": cjson(f),
        }));
        records.push(json!({
            "k": args.k,
            "nu": vjson(nu),
            "n": vjson(n),
            "f_re": f.re,
            "f_im": f.im,
        }));
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            kappa.x, kappa.y, kappa.z, f.re, f.im
        ));
    }

    if let Some(path) = &args.data_out {
        let file = json!({ "schema_version": SCHEMA_VERSION, "data": records });
        let mut text = serde_json::to_string_pretty(&file).expect("data serialization");
        text.push('\n');
        std::fs::write(path, text)?;
    }

    let geometry = grid.geometry();
    let inputs = json!({
        "grid": args.grid.display().to_string(),
        "k": args.k,
        "nu": vjson(&nu_arg),
        "full_lattice": args.full_lattice,
    });
    let outputs = json!({
        "grid": {
            "origin": vjson(&geometry.origin),
            "spacing": geometry.spacing,
            "dims": [geometry.dims.0, geometry.dims.1, geometry.dims.2],
            "cells": geometry.cell_count(),
            "peak": grid.peak(),
        },
        "count": rows.len(),
        "data": rows,
    });
    let csv_out = args.csv.clone().map(|p| (p, csv));
    Ok((Report::new("medium born", inputs, outputs, Diagnostics::default()), csv_out))
}

pub fn medium_invert(args: &MediumInvertArgs) -> Result<Outcome> {
    let file: BornDataFile = read_json(&args.data)?;
    ensure_schema_version(file.schema_version)?;
    let data = file
        .data
        .iter()
        .map(|r| {
            BornDatum::new(
                r.k,
                unit_vector(r.nu, "nu")?,
                unit_vector(r.n, "n")?,
                Complex64::new(r.f_re, r.f_im),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let [ox, oy, oz] = triple(&args.origin, "--origin")?;
    let [nx, ny, nz] = triple_usize(&args.dims, "--dims")?;
    let geometry = GridGeometry {
        origin: Vector3::new(ox, oy, oz),
        spacing: args.spacing,
        dims: (nx, ny, nz),
    };
    let (grid, residue) = born_inverse(&data, &geometry)?;

    let mut diag = Diagnostics::default();
    if residue > IMAG_RESIDUE_WARN {
        diag.warn(
            "IMAG_RESIDUE_HIGH",
            format!(
                "imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_WARN:.0e}; the data are inconsistent with a real density"
            ),
        );
    }
    if let Some(path) = &args.grid_out {
        grid.save(path)?;
    }

    let inputs = json!({
        "data": args.data.display().to_string(),
        "origin": vjson(&geometry.origin),
        "spacing": geometry.spacing,
        "dims": [geometry.dims.0, geometry.dims.1, geometry.dims.2],
        "count": data.len(),
    });
    let outputs = json!({
        "residue": residue,
        "grid": {
            "origin": vjson(&geometry.origin),
            "spacing": geometry.spacing,
            "dims": [geometry.dims.0, geometry.dims.1, geometry.dims.2],
            "values": grid.values(),
        },
    });
    Ok((Report::new("medium invert", inputs, outputs, diag), None))
}
