//! Linearised constraint maps with respect to vertex velocities.
//!
//! Columns are ordered vertex by vertex, three per vertex, in the tangent
//! basis of [`AmbientSpace::tangent_basis`]. Hyperbolic velocities are thus
//! tangent to the hyperboloid by construction.

use nalgebra::DMatrix;

use super::{dihedral_generic, face_angles_generic, planarity_generic, Polyhedron};
use crate::dual::{Dual, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Jacobians {
    /// One row per face vertex beyond the three that span the face plane.
    pub planarity: DMatrix<f64>,
    /// One row per edge.
    pub dihedral: DMatrix<f64>,
    /// One row per face corner, faces in order.
    pub face: DMatrix<f64>,
}

type Eval<T> = fn(&Polyhedron, &[[T; 4]]) -> Vec<T>;

fn columns(poly: &Polyhedron) -> Vec<(usize, [f64; 4])> {
    let mut out = Vec::with_capacity(3 * poly.vertex_count());
    for (i, v) in poly.ambient_vertices().iter().enumerate() {
        for e in poly.space().tangent_basis(v) {
            out.push((i, e));
        }
    }
    out
}

fn forward_mode(poly: &Polyhedron, f: Eval<Dual>) -> DMatrix<f64> {
    let base: Vec<[Dual; 4]> = poly.ambient_vertices().iter().map(|v| v.map(Dual::cst)).collect();
    let cols = columns(poly);
    let rows = f(poly, &base).len();
    let mut j = DMatrix::zeros(rows, cols.len());
    for (c, (i, e)) in cols.iter().enumerate() {
        let mut verts = base.clone();
        for k in 0..4 {
            verts[*i][k] = Dual::new(poly.ambient_vertices()[*i][k], e[k]);
        }
        for (r, val) in f(poly, &verts).into_iter().enumerate() {
            j[(r, c)] = val.eps;
        }
    }
    j
}

fn central(poly: &Polyhedron, f: Eval<f64>, h: f64) -> DMatrix<f64> {
    let base = poly.ambient_vertices().to_vec();
    let cols = columns(poly);
    let rows = f(poly, &base).len();
    let mut j = DMatrix::zeros(rows, cols.len());
    for (c, (i, e)) in cols.iter().enumerate() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        for k in 0..4 {
            plus[*i][k] += h * e[k];
            minus[*i][k] -= h * e[k];
        }
        for (r, (a, b)) in f(poly, &plus).into_iter().zip(f(poly, &minus)).enumerate() {
            j[(r, c)] = (a - b) / (2.0 * h);
        }
    }
    j
}

/// Jacobians of planarity, dihedral-angle and face-angle maps by forward-mode
/// differentiation.
pub fn constraint_jacobians(poly: &Polyhedron) -> Jacobians {
    Jacobians {
        planarity: forward_mode(poly, planarity_generic::<Dual>),
        dihedral: forward_mode(poly, dihedral_generic::<Dual>),
        face: forward_mode(poly, face_angles_generic::<Dual>),
    }
}

/// The same Jacobians by central differences with step `h`; a test oracle.
pub fn central_difference_jacobians(poly: &Polyhedron, h: f64) -> Jacobians {
    Jacobians {
        planarity: central(poly, planarity_generic::<f64>, h),
        dihedral: central(poly, dihedral_generic::<f64>, h),
        face: central(poly, face_angles_generic::<f64>, h),
    }
}
