use proptest::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use conekit::germ::{double_polyhedron, germ_param_dim, validate_germ, SingularGerm};
use conekit::indicial::{critical_window, friedrichs_filter, roots_cone_oneform, roots_edge, Window};
use conekit::normal_op::bessel::wronskian_defect;
use conekit::normal_op::{gaussian_bump, green_apply, RadialGrid};
use conekit::polyrig::{build_regular, rigidity_check, AmbientSpace, SolidKind, Verdict};
use conekit::spectra::{check_spectral_bounds, football_spectrum};

fn crit2() -> Window {
    Window::from(critical_window(2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn football_spectrum_is_well_formed(angle in 0.05f64..(2.0 * PI - 1e-3)) {
        let s = football_spectrum(angle, 14.0).unwrap();
        let l = s.lambdas();
        prop_assert_eq!(l[0], 0.0);
        prop_assert!(l.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(l.iter().copied().find(|&x| x > 0.0), Some(2.0));
        for e in &s.entries {
            prop_assert_eq!(e.labels.len(), e.multiplicity);
        }
        let b = check_spectral_bounds(&s);
        prop_assert!(b.weiss_ok && b.oneform_gap_ok);
    }

    #[test]
    fn friedrichs_filter_is_idempotent(angle in 0.1f64..(2.0 * PI - 0.1)) {
        for r in [roots_edge(angle, crit2()).unwrap(), roots_cone_oneform(angle, crit2()).unwrap()] {
            let once = friedrichs_filter(&r);
            let twice = friedrichs_filter(&once);
            prop_assert_eq!(once.roots, twice.roots);
        }
    }

    #[test]
    fn wronskian_holds(a in 0.0f64..10.0, x in 0.1f64..30.0) {
        prop_assert!(wronskian_defect(a, x).unwrap().abs() <= 1e-10);
    }
}

fn relabel(g: &SingularGerm, vperm: &[usize], eperm: &[usize]) -> SingularGerm {
    let v = |s: &str| format!("w{}", vperm[s[1..].parse::<usize>().unwrap()]);
    let e = |s: &str| format!("f{}", eperm[s[1..].parse::<usize>().unwrap()]);
    let mut out = g.clone();
    out.vertices = g.vertices.iter().map(|s| v(s)).collect();
    for edge in &mut out.edges {
        edge.id = e(&edge.id);
        edge.endpoints = edge.endpoints.as_ref().map(|[a, b]| [v(a), v(b)]);
    }
    out.edges.reverse();
    out.links = g.links.iter().map(|(k, l)| (v(k), l.clone())).collect::<BTreeMap<_, _>>();
    for s in &mut out.slots {
        s.edge = e(&s.edge);
    }
    out
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut s = seed;
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        p.swap(i, (s >> 33) as usize % (i + 1));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn germ_validation_ignores_labels(kind in 0usize..4, seed in any::<u64>(), twist in 0.0f64..0.5) {
        let p = build_regular(SolidKind::ALL[kind], AmbientSpace::Euclidean3, 1.0).unwrap();
        let mut g = double_polyhedron(&p).unwrap();
        g.edges[0].data.twist = twist;
        g.edges[1].data.length = -1.0;
        let r = relabel(&g, &permutation(g.vertices.len(), seed), &permutation(g.edges.len(), seed ^ 1));
        let (a, b) = (validate_germ(&g).unwrap(), validate_germ(&r).unwrap());
        prop_assert_eq!(a.codes(), b.codes());
        prop_assert_eq!(a.violations.len(), b.violations.len());
        prop_assert_eq!(germ_param_dim(&g).unwrap(), germ_param_dim(&r).unwrap());
    }

    #[test]
    fn rigidity_is_gauge_invariant(rapidity in -1.0f64..1.0, phi in 0.0f64..(2.0 * PI), shift in -2.0f64..2.0) {
        let (c, s) = (phi.cos(), phi.sin());
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        // Boost along x₁ after a rotation in the (x₂, x₃) plane.
        let hyp = [[ch, sh, 0.0, 0.0], [sh, ch, 0.0, 0.0], [0.0, 0.0, c, -s], [0.0, 0.0, s, c]];
        let euc = [[1.0, 0.0, 0.0, 0.0], [shift, 1.0, 0.0, 0.0], [0.0, 0.0, c, -s], [-shift, 0.0, s, c]];
        for (space, m) in [(AmbientSpace::Hyperbolic3, hyp), (AmbientSpace::Euclidean3, euc)] {
            for kind in [SolidKind::Tetrahedron, SolidKind::Cube] {
                let p = build_regular(kind, space, 1.0).unwrap();
                let q = p.transformed(&m).unwrap();
                let (a, b) = (rigidity_check(&p, 1e-8).unwrap(), rigidity_check(&q, 1e-8).unwrap());
                prop_assert_eq!(a.verdict, b.verdict);
                prop_assert_eq!(a.kernel_dim, b.kernel_dim);
                prop_assert_eq!(b.verdict, Verdict::Pass);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn green_solve_is_linear(c1 in 0.5f64..2.0, c2 in 0.5f64..2.0, a in 0.2f64..2.0, b in 0.2f64..2.0, xi in 0.3f64..3.0) {
        let g = RadialGrid::log_spaced(1e-5, 40.0, 5e-3).unwrap();
        let f1 = g.sample(gaussian_bump(c1, 0.05 * c1));
        let f2 = g.sample(gaussian_bump(c2, 0.05 * c2));
        let f: Vec<f64> = f1.iter().zip(&f2).map(|(x, y)| a * x + b * y).collect();
        let (u1, u2, u) = (green_apply(&g, &f1, xi).unwrap().u, green_apply(&g, &f2, xi).unwrap().u, green_apply(&g, &f, xi).unwrap().u);
        let scale = u1.iter().chain(&u2).fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..u.len() {
            prop_assert!((u[k] - a * u1[k] - b * u2[k]).abs() <= 1e-12 * scale * (1.0 + a + b));
        }
    }

    #[test]
    fn green_solve_scales_with_xi(m in 1usize..200, xi in 0.3f64..2.0) {
        // u(sρ) solves the problem with ξ' = sξ and source s² f(sρ); with
        // s = e^{m·step} the rescaled source is the original shifted by m nodes.
        let g = RadialGrid::log_spaced(1e-5, 40.0, 5e-3).unwrap();
        let s = (m as f64 * g.step).exp();
        let f = g.sample(gaussian_bump(1.0, 0.1));
        let shifted: Vec<f64> = (0..g.len()).map(|k| if k + m < g.len() { s * s * f[k + m] } else { 0.0 }).collect();
        let u = green_apply(&g, &f, xi).unwrap().u;
        let v = green_apply(&g, &shifted, s * xi).unwrap().u;
        let scale = u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for k in 0..g.len() - m {
            prop_assert!((v[k] - u[k + m]).abs() <= 1e-8 * scale, "k={} {} {}", k, v[k], u[k + m]);
        }
    }
}
