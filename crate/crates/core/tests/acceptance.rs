//! Acceptance criteria, one test each. Every test prints a single
//! `ACCEPTANCE <n> PASS|FAIL <detail>` line before asserting.

use std::f64::consts::PI;
use std::time::Instant;

use conekit::geom::{edge_metric, space_form_box};
use conekit::germ::{double_polyhedron, germ_param_dim, validate_germ};
use conekit::indicial::{critical_window, friedrichs_filter, report_residual, roots_edge, roots_vertex, vertex_groups, Window};
use conekit::normal_op::bessel::{bessel_k_scaled, bessel_i_scaled, wronskian_defect, wronskian_grid};
use conekit::normal_op::{gaussian_bump, green_apply, injectivity_scan, RadialGrid};
use conekit::par::Exec;
use conekit::polyrig::{build_regular, dihedral_angles, rigidity_check, AmbientSpace, SolidKind};
use conekit::spectra::{check_spectral_bounds, football_spectrum, oracle_football_spectrum, scalar_to_oneform_spectrum};
use conekit::tensor::{deformation_basis, identity_suite, l2_classify, DeformationKind};
use conekit::Curvature;

mod tol {
    pub const RANK_TOL: f64 = 1e-8;
    pub const SPECTRAL_GAP: f64 = 1e3;
    pub const CONTAINMENT: f64 = 1e-8;
    pub const FACE_INCLUSION: f64 = 1e-6;
    pub const RIGIDITY_SECONDS: f64 = 5.0;
    pub const SPECTRUM_MAX: f64 = 15.0;
    pub const SPECTRUM_AGREEMENT: f64 = 1e-8;
    pub const INDICIAL_EXACT: f64 = 1e-12;
    pub const MODE_RESIDUAL: f64 = 1e-9;
    pub const WRONSKIAN: f64 = 1e-10;
    pub const ASYMPTOTIC: f64 = 1e-3;
    pub const GREEN_RESIDUAL: f64 = 1e-6;
    pub const GREEN_LOG: f64 = 1e-6;
    pub const IDENTITY_RESIDUAL: f64 = 1e-6;
    pub const IDENTITY_ORDER: f64 = 1.8;
    pub const IDENTITY_TRIALS: usize = 5;
    pub const IDENTITY_SEED: u64 = 20240601;
}

fn report(n: u32, ok: bool, detail: String) {
    println!("ACCEPTANCE {n} {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_1_hyperbolic_stoker() {
    let start = Instant::now();
    let mut cases: Vec<(SolidKind, f64)> = [0.5, 1.0, 2.0].into_iter().map(|s| (SolidKind::Tetrahedron, s)).collect();
    cases.push((SolidKind::Cube, 1.0));
    let mut ok = true;
    let mut detail = Vec::new();
    for (kind, size) in cases {
        let p = build_regular(kind, AmbientSpace::Hyperbolic3, size).unwrap();
        let r = rigidity_check(&p, tol::RANK_TOL).unwrap();
        let good = r.kernel_dim == 6 && r.spectral_gap >= tol::SPECTRAL_GAP && r.trivial_containment_residual <= tol::CONTAINMENT;
        ok &= good;
        detail.push(format!(
            "{}@{size}: dim={} gap={:.3e} contain={:.1e}",
            kind.name(),
            r.kernel_dim,
            r.spectral_gap,
            r.trivial_containment_residual
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= tol::RIGIDITY_SECONDS;
    report(1, ok, format!("{} time={secs:.2}s", detail.join("; ")));
}

/// Velocity fields scaling one Cartesian axis.
fn axis_scalings(p: &conekit::polyrig::Polyhedron) -> Vec<Vec<f64>> {
    (0..3)
        .map(|c| {
            (0..p.vertex_count())
                .flat_map(|i| {
                    let x = p.position(i);
                    (0..3).map(move |k| if k == c { x[c] } else { 0.0 })
                })
                .collect()
        })
        .collect()
}

#[test]
fn criterion_2_euclidean_stoker() {
    let mut ok = true;
    let mut detail = Vec::new();
    for kind in [SolidKind::Cube, SolidKind::Tetrahedron] {
        let p = build_regular(kind, AmbientSpace::Euclidean3, 1.0).unwrap();
        let r = rigidity_check(&p, tol::RANK_TOL).unwrap();
        let inclusion = r.face_angle_inclusion_residual.unwrap();
        ok &= inclusion <= tol::FACE_INCLUSION && r.trivial_containment_residual <= tol::CONTAINMENT;
        if kind == SolidKind::Cube {
            let axis = axis_scalings(&p).iter().map(|f| r.containment_residual(f)).fold(0.0, f64::max);
            ok &= r.kernel_dim >= 9 && axis <= tol::CONTAINMENT;
            detail.push(format!("cube: dim={} incl={inclusion:.1e} rigid={:.1e} axis={axis:.1e}", r.kernel_dim, r.trivial_containment_residual));
        } else {
            detail.push(format!("tetrahedron: dim={} incl={inclusion:.1e}", r.kernel_dim));
        }
    }
    report(2, ok, detail.join("; "));
}

#[test]
fn criterion_3_football_spectra() {
    let mut ok = true;
    let mut worst = 0.0f64;
    for angle in [PI / 2.0, PI, 1.5 * PI, 1.9 * PI] {
        let exact = football_spectrum(angle, tol::SPECTRUM_MAX).unwrap();
        let oracle = oracle_football_spectrum(angle, tol::SPECTRUM_MAX, Exec::default()).unwrap();
        let (a, b) = (exact.expanded(), oracle.expanded());
        ok &= a.len() == b.len();
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
        let first = exact.lambdas().into_iter().find(|&l| l > 0.0).unwrap();
        ok &= first == 2.0;
        ok &= check_spectral_bounds(&exact).weiss_ok;
        ok &= scalar_to_oneform_spectrum(&exact).entries.iter().all(|e| e.lambda > 1.0);
    }
    ok &= worst <= tol::SPECTRUM_AGREEMENT;
    report(3, ok, format!("max |closed form - oracle| = {worst:.2e}"));
}

#[test]
fn criterion_4_indicial_exactness() {
    let r = roots_edge(1.5 * PI, Window::from(critical_window(2).unwrap())).unwrap();
    let inner: Vec<_> = r.roots.iter().filter(|x| !x.endpoint).collect();
    let expect = [-1.0 / 3.0, 0.0, 1.0 / 3.0];
    let mut ok = inner.len() == 3 && inner.iter().zip(expect).all(|(x, e)| (x.value - e).abs() <= tol::INDICIAL_EXACT);
    let zero = r.root(0.0).unwrap();
    ok &= zero.multiplicity == 2 && zero.has_log_partner;
    let edge_res = report_residual(&r).unwrap();

    let v = roots_vertex(&[0.0, 2.0]).unwrap();
    let (a, b) = vertex_groups(&v);
    ok &= a == vec![0.0] && b == vec![-1.0];
    let kept = friedrichs_filter(&v).values();
    ok &= kept == vec![0.0];
    let vertex_res = report_residual(&v).unwrap();
    ok &= edge_res <= tol::MODE_RESIDUAL && vertex_res <= tol::MODE_RESIDUAL;
    report(
        4,
        ok,
        format!(
            "edge={:?} A={a:?} B={b:?} kept={kept:?} residuals=({edge_res:.1e}, {vertex_res:.1e})",
            inner.iter().map(|x| x.value).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_5_bessel_layer() {
    let w = wronskian_grid().into_iter().map(|(a, x)| wronskian_defect(a, x).unwrap().abs()).fold(0.0, f64::max);
    let x = 25.0;
    let a = 1.0 / 3.0;
    let k_ratio = bessel_k_scaled(a, x).unwrap() * (2.0 * x / PI).sqrt();
    let i_ratio = bessel_i_scaled(a, x).unwrap() * (2.0 * PI * x).sqrt();
    let ok = w <= tol::WRONSKIAN && (k_ratio - 1.0).abs() <= tol::ASYMPTOTIC && (i_ratio - 1.0).abs() <= tol::ASYMPTOTIC;
    report(5, ok, format!("wronskian={w:.1e} K ratio={k_ratio:.12} I ratio={i_ratio:.12}"));
}

#[test]
fn criterion_6_green_and_injectivity() {
    let g = RadialGrid::standard();
    let f = g.sample(gaussian_bump(1.0, 0.1));
    let s = green_apply(&g, &f, 1.0).unwrap();
    let rec = s.record;
    let mut ok = rec.residual <= tol::GREEN_RESIDUAL && rec.log_coeff.abs() <= tol::GREEN_LOG * rec.f_norm;
    let t = injectivity_scan(1.2, &[1.25, 0.5], 3, &[0.5, 1.0, 2.0], Exec::default()).unwrap();
    let inj = t.verdict(1.25).unwrap().injective;
    let half = t.verdict(0.5).unwrap();
    let k0 = half.kernel.iter().any(|k| k.starts_with("0,") && k.ends_with("K0:dy"));
    ok &= inj && !half.injective && k0;
    report(
        6,
        ok,
        format!(
            "residual={:.2e} log={:.2e} |f|={:.3} injective(1.25)={inj} K0 kernel(0.5)={k0}",
            rec.residual, rec.log_coeff, rec.f_norm
        ),
    );
}

#[test]
fn criterion_7_operator_identities() {
    let mut charts: Vec<_> = Curvature::ALL.iter().map(|&k| edge_metric(k, 1.5 * PI).unwrap()).collect();
    charts.push(space_form_box(Curvature::Flat, 1.0).unwrap());
    let mut ok = true;
    let mut detail = Vec::new();
    for c in &charts {
        let reps = identity_suite(c, tol::IDENTITY_TRIALS, tol::IDENTITY_SEED, Exec::default()).unwrap();
        let worst = reps.iter().map(|r| r.max_residual).fold(0.0, f64::max);
        let min_order = reps.iter().filter_map(|r| r.order).fold(f64::INFINITY, f64::min);
        let order = if min_order.is_finite() { format!("order>={min_order:.2}") } else { "all exact".to_string() };
        ok &= reps.iter().all(|r| r.max_residual <= tol::IDENTITY_RESIDUAL && (r.exact || r.order.unwrap() >= tol::IDENTITY_ORDER));
        let g = &reps[6];
        let trace = match g.measured_constant {
            Some(c) => format!(" c={c:.6} display={:.6} reference={}", g.display_constant.unwrap(), g.reference_constant.unwrap()),
            None => String::new(),
        };
        detail.push(format!("{:?}/{}: max={worst:.1e} {order}{trace}", c.kind, c.kappa.kappa()));
    }
    report(7, ok, detail.join("; "));
}

#[test]
fn criterion_8_deformation_classification() {
    let mut ok = true;
    let mut detail = Vec::new();
    for k in Curvature::ALL {
        for (kind, expect) in
            [(DeformationKind::Length, (true, true)), (DeformationKind::Twist, (true, true)), (DeformationKind::Angle, (true, false))]
        {
            let c = l2_classify(&deformation_basis(k, kind).unwrap()).unwrap();
            ok &= (c.tensor_in_l2, c.derivative_in_l2) == expect;
            detail.push(format!("{}/{}: ({}, {})", kind.name(), k.kappa(), c.tensor_in_l2, c.derivative_in_l2));
        }
    }
    report(8, ok, detail.join("; "));
}

#[test]
fn criterion_9_germ_pipeline() {
    let mut ok = true;
    let mut dims = Vec::new();
    for space in [AmbientSpace::Euclidean3, AmbientSpace::Hyperbolic3] {
        for kind in SolidKind::ALL {
            let p = build_regular(kind, space, 1.0).unwrap();
            let germ = double_polyhedron(&p).unwrap();
            ok &= validate_germ(&germ).unwrap().is_empty();
            let d = dihedral_angles(&p).unwrap();
            ok &= germ.edges.iter().zip(&d).all(|(e, a)| e.data.angle == 2.0 * a);
            if space == AmbientSpace::Euclidean3 {
                let n = germ_param_dim(&germ).unwrap();
                dims.push(format!("{}={n}", kind.name()));
                match kind {
                    SolidKind::Tetrahedron => ok &= n == 30,
                    SolidKind::Cube => ok &= n == 60,
                    _ => {}
                }
            }
        }
    }
    report(9, ok, format!("param dims: {}", dims.join(", ")));
}
