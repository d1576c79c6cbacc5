//! Tensor calculus on model charts: Christoffel symbols and curvature by
//! finite differences, the operator identity suite, and the L² classification
//! of standard-form deformations of a singular edge.

pub mod deformation;
pub mod engine;
pub mod fields;
pub mod identities;

use crate::error::{Error, Result};
use crate::geom::ModelChart;

pub use deformation::{deformation_basis, l2_classify, ChartTensorField, DeformationKind, L2Classification};
pub use engine::{einstein_linearization, Field, Geometry, Mat, Point, Stencil};
pub use identities::{identity_suite, identity_suite_with, IdentityId, OperatorResidualReport};

/// The chart metric as a finite-difference geometry with step `h`.
pub fn geometry(chart: &ModelChart, h: f64) -> Geometry<f64> {
    let c = chart.clone();
    Geometry::new(move |x| c.metric_unchecked(x), h, chart.kappa.value())
}

/// Fails unless every point of a two-deep stencil around `x` is inside the chart.
pub fn check_stencil(chart: &ModelChart, x: &Point, h: f64) -> Result<()> {
    for a in 0..3 {
        for s in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let mut y = *x;
            y[a] += s * h;
            if !chart.in_domain(&y) {
                return Err(Error::Domain(format!("stencil of step {h} around {x:?} leaves the chart")));
            }
        }
    }
    Ok(())
}

/// Γ^k_ij at `x`, indexed [k][i][j].
pub fn christoffel(chart: &ModelChart, x: &Point, h: f64) -> Result<[Mat<f64>; 3]> {
    check_stencil(chart, x, h)?;
    Ok(geometry(chart, h).christoffel(x))
}

/// ∇ of a covariant field on the chart.
pub fn covariant_derivative(chart: &ModelChart, field: &Field<f64>, h: f64) -> Field<f64> {
    geometry(chart, h).nabla(field)
}

/// R_ijkl flattened, with R_ijkl = κ(g_ik g_jl − g_il g_jk) on a space form.
pub fn curvature_tensor(chart: &ModelChart, x: &Point, h: f64) -> Result<Vec<f64>> {
    check_stencil(chart, x, h)?;
    Ok(geometry(chart, h).curvature_tensor(x))
}

/// Sectional curvatures of the coordinate planes (01, 02, 12).
pub fn sectional_curvatures(chart: &ModelChart, x: &Point, h: f64) -> Result<[f64; 3]> {
    let r = curvature_tensor(chart, x, h)?;
    let g = chart.metric(x)?;
    let k = |i: usize, j: usize| r[engine::flat(&[i, j, i, j])] / (g[i][i] * g[j][j] - g[i][j] * g[i][j]);
    Ok([k(0, 1), k(0, 2), k(1, 2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{edge_metric, space_form_box, vertex_metric};
    use crate::Curvature;
    use std::f64::consts::PI;

    #[test]
    fn flat_box_is_flat() {
        let c = space_form_box(Curvature::Flat, 1.0).unwrap();
        let x = [0.1, -0.2, 0.3];
        assert!(christoffel(&c, &x, 1e-3).unwrap().iter().flatten().flatten().all(|v| v.abs() < 1e-12));
        assert!(curvature_tensor(&c, &x, 1e-3).unwrap().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn cylindrical_christoffel() {
        let c = edge_metric(Curvature::Flat, PI).unwrap();
        let x = [0.7, 1.0, 0.2];
        let g = christoffel(&c, &x, 1e-3).unwrap();
        assert!((g[0][1][1] + 0.7).abs() < 1e-6);
        assert!((g[1][0][1] - 1.0 / 0.7).abs() < 1e-6);
    }

    #[test]
    fn sectional_curvature_is_constant() {
        for kappa in Curvature::ALL {
            let charts = [
                edge_metric(kappa, 1.5 * PI).unwrap(),
                vertex_metric(kappa, &[PI, PI], 0).unwrap(),
                space_form_box(kappa, 1.0).unwrap(),
            ];
            let pts = [[0.8, 1.0, 0.3], [0.8, 1.2, 0.5], [0.2, -0.3, 0.25]];
            for (c, x) in charts.iter().zip(pts) {
                let errs = |h: f64| {
                    sectional_curvatures(c, &x, h).unwrap().iter().map(|s| (s - kappa.value()).abs()).fold(0.0, f64::max)
                };
                let (e1, e2) = (errs(1e-2), errs(5e-3));
                assert!(e2 < 1e-4, "{kappa:?} {:?}: {e2}", c.kind);
                if e2 > 1e-9 {
                    assert!(e1 / e2 > 3.0, "order: {e1} {e2}");
                }
            }
        }
    }

    #[test]
    fn stencil_domain_error() {
        let c = edge_metric(Curvature::Flat, PI).unwrap();
        assert!(matches!(christoffel(&c, &[1e-4, 1.0, 0.0], 1e-3), Err(Error::Domain(_))));
    }
}
