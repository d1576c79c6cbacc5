//! Kernel of the angle-constraint Jacobian and the rigidity verdict.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_convex, constraint_jacobians, minkowski, AmbientSpace, Polyhedron, Vec4};
use crate::error::{Error, Result};

/// Smallest admissible ratio between the last kept and first dropped singular value.
pub const MIN_SPECTRAL_GAP: f64 = 1e3;
pub const CONTAINMENT_TOL: f64 = 1e-8;
pub const FACE_ANGLE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

/// Velocity fields (tangent-basis coordinates, 3 per vertex) of the isometries.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivialMotions {
    /// Translations and rotations (Euclidean) or so(1,3) generators (hyperbolic).
    pub fields: Vec<Vec<f64>>,
    /// The homothety field, Euclidean only.
    pub similarity_extra: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub space: AmbientSpace,
    pub tol_rel: f64,
    /// Singular values of [J_planarity; J_dihedral] (rows normalised), descending,
    /// padded with zeros to the number of unknowns.
    pub singular_values: Vec<f64>,
    pub kernel_dim: usize,
    pub spectral_gap: f64,
    pub trivial_dim: usize,
    pub trivial_containment_residual: f64,
    pub face_angle_inclusion_residual: Option<f64>,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
    /// Orthonormal kernel basis, one column per vector.
    #[serde(skip)]
    pub kernel_basis: Option<DMatrix<f64>>,
}

impl RigidityReport {
    /// ‖t − Π_K t‖ / ‖t‖ for a velocity field t.
    pub fn containment_residual(&self, field: &[f64]) -> f64 {
        let t = DVector::from_column_slice(field);
        let norm = t.norm();
        if norm == 0.0 {
            return 0.0;
        }
        match &self.kernel_basis {
            Some(k) => (&t - k * (k.transpose() * &t)).norm() / norm,
            None => 1.0,
        }
    }
}

fn so13_generators() -> Vec<[[f64; 4]; 4]> {
    let mut out = Vec::new();
    for i in 1..4 {
        let mut a = [[0.0; 4]; 4];
        a[0][i] = 1.0;
        a[i][0] = 1.0;
        out.push(a);
    }
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let mut a = [[0.0; 4]; 4];
        a[i][j] = -1.0;
        a[j][i] = 1.0;
        out.push(a);
    }
    out
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Infinitesimal isometries of the ambient space restricted to the vertices.
pub fn trivial_motion_basis(poly: &Polyhedron) -> TrivialMotions {
    let verts = poly.ambient_vertices();
    match poly.space() {
        AmbientSpace::Euclidean3 => {
            let mut fields = Vec::new();
            for c in 0..3 {
                fields.push(verts.iter().flat_map(|_| (0..3).map(move |k| if k == c { 1.0 } else { 0.0 })).collect());
            }
            for c in 0..3 {
                let mut w = [0.0; 3];
                w[c] = 1.0;
                fields.push(verts.iter().flat_map(|v| cross3(w, [v[1], v[2], v[3]])).collect());
            }
            let scaling = verts.iter().flat_map(|v| [v[1], v[2], v[3]]).collect();
            TrivialMotions { fields, similarity_extra: Some(scaling) }
        }
        AmbientSpace::Hyperbolic3 => {
            let fields = so13_generators()
                .iter()
                .map(|a| {
                    verts
                        .iter()
                        .flat_map(|v| {
                            let mut av = [0.0; 4];
                            for (i, o) in av.iter_mut().enumerate() {
                                *o = (0..4).map(|j| a[i][j] * v[j]).sum();
                            }
                            AmbientSpace::Hyperbolic3.tangent_basis(v).map(|e| minkowski(&av, &e))
                        })
                        .collect()
                })
                .collect();
            TrivialMotions { fields, similarity_extra: None }
        }
    }
}

/// Converts tangent-basis coordinates to ambient velocity 4-vectors.
pub fn ambient_velocity(poly: &Polyhedron, field: &[f64]) -> Vec<Vec4> {
    poly.ambient_vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let basis = poly.space().tangent_basis(v);
            let mut out = [0.0; 4];
            for (c, e) in basis.iter().enumerate() {
                for k in 0..4 {
                    out[k] += field[3 * i + c] * e[k];
                }
            }
            out
        })
        .collect()
}

fn normalized_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut row in out.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
    out
}

/// Numerical kernel of [J_planarity; J_dihedral] and the verdict of the
/// infinitesimal Stoker check.
pub fn rigidity_check(poly: &Polyhedron, tol_rel: f64) -> Result<RigidityReport> {
    if !(tol_rel > 0.0 && tol_rel < 1.0) {
        return Err(Error::Domain(format!("tol_rel must lie in (0, 1), got {tol_rel}")));
    }
    check_convex(poly)?;
    let jac = constraint_jacobians(poly);
    let cols = 3 * poly.vertex_count();
    let rows = jac.planarity.nrows() + jac.dihedral.nrows();
    let stacked = normalized_rows(&DMatrix::from_fn(rows, cols, |r, c| {
        if r < jac.planarity.nrows() {
            jac.planarity[(r, c)]
        } else {
            jac.dihedral[(r - jac.planarity.nrows(), c)]
        }
    }));
    // Pad to a square matrix so the SVD returns a full right basis.
    let n = rows.max(cols);
    let padded = DMatrix::from_fn(n, cols, |r, c| if r < rows { stacked[(r, c)] } else { 0.0 });
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let sigma_max = sigma[0];
    let threshold = tol_rel * sigma_max;
    let kernel_dim = sigma.iter().filter(|&&s| s <= threshold).count();
    let rank = cols - kernel_dim;
    let kept_min = if rank > 0 { sigma[rank - 1] } else { f64::INFINITY };
    let dropped_max = if kernel_dim > 0 { sigma[rank] } else { 0.0 };
    let spectral_gap = if dropped_max > 0.0 { kept_min / dropped_max } else { f64::INFINITY };

    let kernel = DMatrix::from_fn(cols, kernel_dim, |r, c| v_t[(order[rank + c], r)]);

    let mut diagnostics = Vec::new();
    let near = sigma.iter().filter(|&&s| s > threshold / 10.0 && s < threshold * 10.0).count();
    let ill_conditioned = spectral_gap < MIN_SPECTRAL_GAP || near > 0;
    if ill_conditioned {
        diagnostics.push(format!(
            "singular values cluster near the threshold {threshold:.3e}: gap {spectral_gap:.3e}, {near} value(s) within 10x"
        ));
    }

    let mut report = RigidityReport {
        space: poly.space(),
        tol_rel,
        singular_values: sigma,
        kernel_dim,
        spectral_gap,
        trivial_dim: 0,
        trivial_containment_residual: 0.0,
        face_angle_inclusion_residual: None,
        verdict: Verdict::Indeterminate,
        diagnostics,
        kernel_basis: Some(kernel),
    };

    let trivial = trivial_motion_basis(poly);
    let mut fields = trivial.fields.clone();
    fields.extend(trivial.similarity_extra.clone());
    report.trivial_dim = fields.len();
    report.trivial_containment_residual =
        fields.iter().map(|t| report.containment_residual(t)).fold(0.0, f64::max);
    let contained = report.trivial_containment_residual <= CONTAINMENT_TOL;

    let structural_ok = match poly.space() {
        AmbientSpace::Hyperbolic3 => kernel_dim == 6,
        AmbientSpace::Euclidean3 => {
            let k = report.kernel_basis.as_ref().expect("kernel basis is set above");
            let inclusion = (0..kernel_dim).map(|c| (&jac.face * k.column(c)).norm()).fold(0.0, f64::max);
            report.face_angle_inclusion_residual = Some(inclusion);
            inclusion <= FACE_ANGLE_TOL
        }
    };
    if !contained {
        report.diagnostics.push(format!(
            "trivial motions leave the kernel (residual {:.3e})",
            report.trivial_containment_residual
        ));
    }
    report.verdict = if ill_conditioned {
        Verdict::Indeterminate
    } else if structural_ok && contained {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrig::{build_regular, SolidKind};

    #[test]
    fn hyperbolic_generators_are_tangent() {
        let p = build_regular(SolidKind::Octahedron, AmbientSpace::Hyperbolic3, 0.8).unwrap();
        for a in so13_generators() {
            for v in p.ambient_vertices() {
                let mut av = [0.0; 4];
                for (i, o) in av.iter_mut().enumerate() {
                    *o = (0..4).map(|j| a[i][j] * v[j]).sum();
                }
                assert!(minkowski(&av, v).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn translations_are_uniform() {
        let p = build_regular(SolidKind::Cube, AmbientSpace::Euclidean3, 1.0).unwrap();
        let t = trivial_motion_basis(&p);
        assert_eq!(t.fields.len(), 6);
        for chunk in t.fields[1].chunks(3) {
            assert_eq!(chunk, &[0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn scaling_preserves_cube_dihedral_angles() {
        let p = build_regular(SolidKind::Cube, AmbientSpace::Euclidean3, 1.0).unwrap();
        let s = DVector::from_vec(trivial_motion_basis(&p).similarity_extra.unwrap());
        let j = constraint_jacobians(&p);
        assert!((&j.dihedral * &s).amax() < 1e-13);
    }

    #[test]
    fn hyperbolic_tetrahedron_is_rigid() {
        let p = build_regular(SolidKind::Tetrahedron, AmbientSpace::Hyperbolic3, 1.0).unwrap();
        let r = rigidity_check(&p, 1e-8).unwrap();
        assert_eq!(r.kernel_dim, 6);
        assert_eq!(r.verdict, Verdict::Pass);
        let k = r.kernel_basis.as_ref().unwrap();
        for c in 0..k.ncols() {
            let col: Vec<f64> = k.column(c).iter().copied().collect();
            for (v, dv) in p.ambient_vertices().iter().zip(ambient_velocity(&p, &col)) {
                assert!(minkowski(v, &dv).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn euclidean_tetrahedron_kernel_is_similarities() {
        let p = build_regular(SolidKind::Tetrahedron, AmbientSpace::Euclidean3, 1.0).unwrap();
        let r = rigidity_check(&p, 1e-8).unwrap();
        assert_eq!(r.kernel_dim, 7);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn invalid_tolerance() {
        let p = build_regular(SolidKind::Cube, AmbientSpace::Euclidean3, 1.0).unwrap();
        assert!(matches!(rigidity_check(&p, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn report_serializes_singular_values() {
        let p = build_regular(SolidKind::Cube, AmbientSpace::Hyperbolic3, 1.0).unwrap();
        let r = rigidity_check(&p, 1e-8).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["singular_values"].as_array().unwrap().len(), 24);
        assert_eq!(json["verdict"], "pass");
    }
}
