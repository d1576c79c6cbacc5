//! Convex polyhedra in Euclidean and hyperbolic 3-space and their
//! infinitesimal rigidity relative to dihedral angles.
//!
//! Vertices are stored as 4-vectors. A Euclidean point p is kept in
//! homogeneous form (1, p); a hyperbolic point is a vector of the hyperboloid
//! ⟨x, x⟩ = −1, x₀ > 0 in ℝ^{1,3}. In both cases a face plane is the kernel of
//! one linear functional w (a cofactor vector of three face vertices), which
//! keeps planarity, normals and dihedral angles in a single code path.

mod jacobian;
mod rigidity;
mod solids;

pub use jacobian::{central_difference_jacobians, constraint_jacobians, Jacobians};
pub use rigidity::{ambient_velocity, rigidity_check, trivial_motion_basis, RigidityReport, TrivialMotions, Verdict};
pub use solids::{build_regular, SolidKind};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::dual::Real;
use crate::error::{Error, Result};

pub type Vec4 = [f64; 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientSpace {
    Euclidean3,
    Hyperbolic3,
}

/// An edge with its two incident faces and its two endpoints (lower index first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyEdge {
    pub faces: [usize; 2],
    pub vertices: [usize; 2],
}

#[derive(Serialize, Deserialize)]
struct PolyhedronFile {
    space: AmbientSpace,
    vertices: Vec<Vec<f64>>,
    faces: Vec<Vec<usize>>,
}

/// A polyhedron with planar faces given as vertex cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyhedronFile", into = "PolyhedronFile")]
pub struct Polyhedron {
    space: AmbientSpace,
    vertices: Vec<Vec4>,
    faces: Vec<Vec<usize>>,
    edges: Vec<PolyEdge>,
    /// Per-face sign making `orient[f] * w_f · x` positive outside the solid.
    orient: Vec<f64>,
}

impl TryFrom<PolyhedronFile> for Polyhedron {
    type Error = Error;
    fn try_from(f: PolyhedronFile) -> Result<Self> {
        Polyhedron::new(f.space, f.vertices, f.faces)
    }
}

impl From<Polyhedron> for PolyhedronFile {
    fn from(p: Polyhedron) -> Self {
        let vertices = (0..p.vertices.len()).map(|i| p.position(i)).collect();
        PolyhedronFile { space: p.space, vertices, faces: p.faces }
    }
}

pub const HYPERBOLOID_TOL: f64 = 1e-12;
pub const PLANARITY_TOL: f64 = 1e-10;

pub(crate) fn minkowski<T: Real>(a: &[T; 4], b: &[T; 4]) -> T {
    -(a[0] * b[0]) + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

fn det3<T: Real>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cofactor vector w with w · x = det(a, b, c, x) for every x.
pub(crate) fn cross4<T: Real>(a: &[T; 4], b: &[T; 4], c: &[T; 4]) -> [T; 4] {
    let minor = |skip: usize| {
        let pick = |v: &[T; 4]| {
            let mut out = [T::zero(); 3];
            let mut k = 0;
            for (i, &x) in v.iter().enumerate() {
                if i != skip {
                    out[k] = x;
                    k += 1;
                }
            }
            out
        };
        det3([pick(a), pick(b), pick(c)])
    };
    // Expansion along the last row: sign (-1)^(3+i).
    [-minor(0), minor(1), -minor(2), minor(3)]
}

fn dot4<T: Real>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

impl AmbientSpace {
    /// Inner product used for face functionals and tangent vectors.
    ///
    /// Euclidean: dot product of the spatial parts. Hyperbolic: the Minkowski
    /// form, which for functionals w equals ⟨Jw, Jw'⟩ on the normals u = Jw.
    pub(crate) fn form<T: Real>(self, a: &[T; 4], b: &[T; 4]) -> T {
        match self {
            AmbientSpace::Euclidean3 => a[1] * b[1] + a[2] * b[2] + a[3] * b[3],
            AmbientSpace::Hyperbolic3 => minkowski(a, b),
        }
    }

    pub fn coordinate_dim(self) -> usize {
        match self {
            AmbientSpace::Euclidean3 => 3,
            AmbientSpace::Hyperbolic3 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AmbientSpace::Euclidean3 => "euclidean3",
            AmbientSpace::Hyperbolic3 => "hyperbolic3",
        }
    }

    /// Orthonormal tangent basis at a vertex, as ambient 4-vectors.
    pub fn tangent_basis(self, v: &Vec4) -> [Vec4; 3] {
        match self {
            AmbientSpace::Euclidean3 => [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
            AmbientSpace::Hyperbolic3 => {
                // Columns 1..3 of the boost taking (1,0,0,0) to v.
                let x0 = v[0];
                let mut out = [[0.0; 4]; 3];
                for (j, col) in out.iter_mut().enumerate() {
                    col[0] = v[j + 1];
                    for i in 0..3 {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        col[i + 1] = delta + v[i + 1] * v[j + 1] / (1.0 + x0);
                    }
                }
                out
            }
        }
    }
}

impl Polyhedron {
    /// Builds and validates a polyhedron. Euclidean vertices have 3
    /// coordinates, hyperbolic vertices 4 (hyperboloid model).
    pub fn new(space: AmbientSpace, vertices: Vec<Vec<f64>>, faces: Vec<Vec<usize>>) -> Result<Self> {
        let dim = space.coordinate_dim();
        let mut verts = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim || v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Input(format!("vertex {i}: expected {dim} finite coordinates for {}", space.name())));
            }
            let x = match space {
                AmbientSpace::Euclidean3 => [1.0, v[0], v[1], v[2]],
                AmbientSpace::Hyperbolic3 => {
                    let x = [v[0], v[1], v[2], v[3]];
                    let q = minkowski(&x, &x);
                    if (q + 1.0).abs() > HYPERBOLOID_TOL || x[0] <= 0.0 {
                        return Err(Error::Input(format!(
                            "vertex {i} is off the upper hyperboloid (<x,x> + 1 = {:.3e})",
                            q + 1.0
                        )));
                    }
                    x
                }
            };
            verts.push(x);
        }
        if verts.len() < 4 || faces.len() < 4 {
            return Err(Error::Input("a polyhedron needs at least 4 vertices and 4 faces".into()));
        }
        for (f, cyc) in faces.iter().enumerate() {
            if cyc.len() < 3 {
                return Err(Error::Input(format!("face {f} has fewer than 3 vertices")));
            }
            if let Some(&bad) = cyc.iter().find(|&&i| i >= verts.len()) {
                return Err(Error::Input(format!("face {f} references missing vertex {bad}")));
            }
            let mut sorted = cyc.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cyc.len() {
                return Err(Error::Input(format!("face {f} repeats a vertex")));
            }
        }

        // Each undirected edge must be used once in each direction.
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (f, cyc) in faces.iter().enumerate() {
            for k in 0..cyc.len() {
                let (a, b) = (cyc[k], cyc[(k + 1) % cyc.len()]);
                if directed.insert((a, b), f).is_some() {
                    return Err(Error::Input(format!(
                        "directed edge {a}->{b} used twice; face cycles must be consistently oriented"
                    )));
                }
            }
        }
        let mut edges = Vec::new();
        for (&(a, b), &f) in &directed {
            if a < b {
                let g = *directed
                    .get(&(b, a))
                    .ok_or_else(|| Error::Input(format!("edge {a}-{b} bounds only one face")))?;
                edges.push(PolyEdge { faces: [f, g], vertices: [a, b] });
            } else if !directed.contains_key(&(b, a)) {
                return Err(Error::Input(format!("edge {b}-{a} bounds only one face")));
            }
        }

        let mut poly = Polyhedron { space, vertices: verts, faces, edges, orient: Vec::new() };
        poly.orient = poly.outward_signs()?;
        let res = poly.planarity_residual();
        if res > PLANARITY_TOL {
            return Err(Error::Input(format!("faces are not planar (residual {res:.3e})")));
        }
        Ok(poly)
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[PolyEdge] {
        &self.edges
    }

    /// Internal 4-vector form of all vertices.
    pub fn ambient_vertices(&self) -> &[Vec4] {
        &self.vertices
    }

    /// Coordinates as stored in files: 3 for Euclidean, 4 for hyperbolic.
    pub fn position(&self, i: usize) -> Vec<f64> {
        let v = self.vertices[i];
        match self.space {
            AmbientSpace::Euclidean3 => v[1..].to_vec(),
            AmbientSpace::Hyperbolic3 => v.to_vec(),
        }
    }

    /// Applies a linear map to every ambient vertex (an isometry in either model).
    pub fn transformed(&self, m: &[[f64; 4]; 4]) -> Result<Polyhedron> {
        let verts = self
            .vertices
            .iter()
            .map(|v| {
                let mut out = [0.0; 4];
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..4).map(|j| m[i][j] * v[j]).sum();
                }
                out
            })
            .collect::<Vec<_>>();
        let coords = verts
            .iter()
            .map(|v| match self.space {
                AmbientSpace::Euclidean3 => v[1..].iter().map(|c| c / v[0]).collect(),
                AmbientSpace::Hyperbolic3 => v.to_vec(),
            })
            .collect();
        Polyhedron::new(self.space, coords, self.faces.clone())
    }

    /// Three well-spread vertices of a face used to define its plane.
    pub(crate) fn face_triple(&self, f: usize) -> [usize; 3] {
        let c = &self.faces[f];
        let m = c.len();
        [c[0], c[m / 3], c[(2 * m) / 3]]
    }

    pub(crate) fn face_functional<T: Real>(&self, f: usize, verts: &[[T; 4]]) -> [T; 4] {
        let [a, b, c] = self.face_triple(f);
        let w = cross4(&verts[a], &verts[b], &verts[c]);
        let s = T::cst(self.orient[f]);
        [w[0] * s, w[1] * s, w[2] * s, w[3] * s]
    }

    fn outward_signs(&self) -> Result<Vec<f64>> {
        // Affine (Klein, for hyperbolic) coordinates.
        let k: Vec<[f64; 3]> =
            self.vertices.iter().map(|v| [v[1] / v[0], v[2] / v[0], v[3] / v[0]]).collect();
        let newell: Vec<[f64; 3]> = self
            .faces
            .iter()
            .map(|cyc| {
                let mut n = [0.0; 3];
                for i in 0..cyc.len() {
                    let (p, q) = (k[cyc[i]], k[cyc[(i + 1) % cyc.len()]]);
                    n[0] += (p[1] - q[1]) * (p[2] + q[2]);
                    n[1] += (p[2] - q[2]) * (p[0] + q[0]);
                    n[2] += (p[0] - q[0]) * (p[1] + q[1]);
                }
                n
            })
            .collect();
        let volume: f64 = self
            .faces
            .iter()
            .zip(&newell)
            .map(|(cyc, n)| {
                let p = k[cyc[0]];
                p[0] * n[0] + p[1] * n[1] + p[2] * n[2]
            })
            .sum();
        if volume.abs() < 1e-14 {
            return Err(Error::Geometry("polyhedron has zero volume".into()));
        }
        let global = volume.signum();
        let mut signs = Vec::with_capacity(self.faces.len());
        for (f, n) in newell.iter().enumerate() {
            let [a, b, c] = self.face_triple(f);
            let w = cross4(&self.vertices[a], &self.vertices[b], &self.vertices[c]);
            let align = w[1] * n[0] + w[2] * n[1] + w[3] * n[2];
            if align == 0.0 || !align.is_finite() {
                return Err(Error::Geometry(format!("face {f} has a degenerate normal")));
            }
            signs.push(global * align.signum());
        }
        Ok(signs)
    }

    fn unit_functional(&self, f: usize) -> Result<Vec4> {
        let w = self.face_functional(f, &self.vertices);
        let n2 = self.space.form(&w, &w);
        if !(n2 > 0.0) {
            return Err(Error::Geometry(format!("face {f} has a degenerate normal")));
        }
        let n = n2.sqrt();
        Ok([w[0] / n, w[1] / n, w[2] / n, w[3] / n])
    }

    /// Signed distance of x from the plane with unit functional u, positive
    /// outside. For hyperbolic points this is the sinh of the distance.
    fn plane_value(&self, u: &Vec4, x: &Vec4) -> f64 {
        dot4(u, x)
    }

    /// Largest distance of a face vertex from its face plane, relative to the size.
    pub fn planarity_residual(&self) -> f64 {
        let scale = match self.space {
            AmbientSpace::Euclidean3 => {
                self.vertices.iter().map(|v| v[1].abs().max(v[2].abs()).max(v[3].abs())).fold(0.0, f64::max).max(1e-300)
            }
            AmbientSpace::Hyperbolic3 => 1.0,
        };
        let mut worst = 0.0f64;
        for (f, cyc) in self.faces.iter().enumerate() {
            let Ok(u) = self.unit_functional(f) else { return f64::INFINITY };
            for &i in cyc {
                worst = worst.max(self.plane_value(&u, &self.vertices[i]).abs() / scale);
            }
        }
        worst
    }

    /// Edge lengths aligned with [`Polyhedron::edges`].
    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| {
                let (a, b) = (&self.vertices[e.vertices[0]], &self.vertices[e.vertices[1]]);
                match self.space {
                    AmbientSpace::Euclidean3 => {
                        ((a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2) + (a[3] - b[3]).powi(2)).sqrt()
                    }
                    AmbientSpace::Hyperbolic3 => (-minkowski(a, b)).max(1.0).acosh(),
                }
            })
            .collect()
    }

    /// Unit tangent direction at vertex `v` towards vertex `w`, in the tangent basis at `v`.
    pub fn edge_direction(&self, v: usize, w: usize) -> [f64; 3] {
        let (x, y) = (&self.vertices[v], &self.vertices[w]);
        let d = match self.space {
            AmbientSpace::Euclidean3 => [0.0, y[1] - x[1], y[2] - x[2], y[3] - x[3]],
            AmbientSpace::Hyperbolic3 => {
                let c = minkowski(y, x);
                [y[0] + c * x[0], y[1] + c * x[1], y[2] + c * x[2], y[3] + c * x[3]]
            }
        };
        let basis = self.space.tangent_basis(x);
        let mut out = [0.0; 3];
        for (o, e) in out.iter_mut().zip(&basis) {
            *o = self.space.form(&d, e);
        }
        let n = (out[0] * out[0] + out[1] * out[1] + out[2] * out[2]).sqrt();
        out.map(|c| c / n)
    }

    /// Edge indices incident to each vertex, in edge order.
    pub fn incident_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.vertices[0]].push(i);
            out[e.vertices[1]].push(i);
        }
        out
    }
}

/// Interior dihedral angles of the given configuration, without reflex detection.
pub(crate) fn dihedral_generic<T: Real>(poly: &Polyhedron, verts: &[[T; 4]]) -> Vec<T> {
    let w: Vec<[T; 4]> = (0..poly.faces.len()).map(|f| poly.face_functional(f, verts)).collect();
    poly.edges
        .iter()
        .map(|e| {
            let (a, b) = (&w[e.faces[0]], &w[e.faces[1]]);
            let c = -poly.space.form(a, b) / (poly.space.form(a, a) * poly.space.form(b, b)).sqrt();
            c.acos()
        })
        .collect()
}

/// Face corner angles, flattened face by face in cycle order.
pub(crate) fn face_angles_generic<T: Real>(poly: &Polyhedron, verts: &[[T; 4]]) -> Vec<T> {
    let space = poly.space;
    let tangent = |v: &[T; 4], a: &[T; 4]| -> [T; 4] {
        match space {
            AmbientSpace::Euclidean3 => [T::zero(), a[1] - v[1], a[2] - v[2], a[3] - v[3]],
            AmbientSpace::Hyperbolic3 => {
                let c = minkowski(a, v) / -minkowski(v, v);
                [a[0] + c * v[0], a[1] + c * v[1], a[2] + c * v[2], a[3] + c * v[3]]
            }
        }
    };
    let mut out = Vec::new();
    for cyc in &poly.faces {
        let m = cyc.len();
        for k in 0..m {
            let v = &verts[cyc[k]];
            let p = tangent(v, &verts[cyc[(k + m - 1) % m]]);
            let q = tangent(v, &verts[cyc[(k + 1) % m]]);
            let c = space.form(&p, &q) / (space.form(&p, &p) * space.form(&q, &q)).sqrt();
            out.push(c.acos());
        }
    }
    out
}

/// det(v_a, v_b, v_c, w) for every face vertex w beyond the defining triple.
pub(crate) fn planarity_generic<T: Real>(poly: &Polyhedron, verts: &[[T; 4]]) -> Vec<T> {
    let mut out = Vec::new();
    for (f, cyc) in poly.faces.iter().enumerate() {
        if cyc.len() <= 3 {
            continue;
        }
        let triple = poly.face_triple(f);
        let [a, b, c] = triple;
        let w = cross4(&verts[a], &verts[b], &verts[c]);
        for &i in cyc {
            if !triple.contains(&i) {
                out.push(dot4(&w, &verts[i]));
            }
        }
    }
    out
}

/// Interior dihedral angle per edge, aligned with [`Polyhedron::edges`].
///
/// Reflex edges (where the solid is locally nonconvex) get angles above π.
pub fn dihedral_angles(poly: &Polyhedron) -> Result<Vec<f64>> {
    let units = (0..poly.faces.len()).map(|f| poly.unit_functional(f)).collect::<Result<Vec<_>>>()?;
    let scale = poly.vertices.iter().map(|v| v[0].abs().max(v[1].abs()).max(v[2].abs()).max(v[3].abs())).fold(0.0, f64::max);
    let mut out = Vec::with_capacity(poly.edges.len());
    for e in &poly.edges {
        let (f, g) = (e.faces[0], e.faces[1]);
        let c = (-poly.space.form(&units[f], &units[g])).clamp(-1.0, 1.0);
        let theta = c.acos();
        let reflex = poly.faces[g]
            .iter()
            .filter(|i| !poly.faces[f].contains(i))
            .any(|&i| dot4(&units[f], &poly.vertices[i]) > 1e-9 * scale);
        out.push(if reflex { 2.0 * PI - theta } else { theta });
    }
    Ok(out)
}

/// Corner angles per face, in cycle order.
pub fn face_angles(poly: &Polyhedron) -> Result<Vec<Vec<f64>>> {
    let flat = face_angles_generic(poly, &poly.vertices);
    if flat.iter().any(|a| !a.is_finite() || *a <= 0.0 || *a >= PI) {
        return Err(Error::Geometry("degenerate face corner".into()));
    }
    let mut out = Vec::with_capacity(poly.faces.len());
    let mut it = flat.into_iter();
    for cyc in &poly.faces {
        out.push(it.by_ref().take(cyc.len()).collect());
    }
    Ok(out)
}

/// Errors unless every dihedral angle lies in (0, π).
pub fn check_convex(poly: &Polyhedron) -> Result<Vec<f64>> {
    let angles = dihedral_angles(poly)?;
    if let Some((i, a)) = angles.iter().enumerate().find(|(_, &a)| !(a > 0.0 && a < PI)) {
        let e = poly.edges[i].vertices;
        return Err(Error::Geometry(format!("not convex: dihedral angle {a} at edge {}-{}", e[0], e[1])));
    }
    Ok(angles)
}
