//! The regular solids in either ambient space.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::{AmbientSpace, Polyhedron};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolidKind {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
}

impl SolidKind {
    pub const ALL: [SolidKind; 4] = [SolidKind::Tetrahedron, SolidKind::Cube, SolidKind::Octahedron, SolidKind::Dodecahedron];

    pub fn name(self) -> &'static str {
        match self {
            SolidKind::Tetrahedron => "tetrahedron",
            SolidKind::Cube => "cube",
            SolidKind::Octahedron => "octahedron",
            SolidKind::Dodecahedron => "dodecahedron",
        }
    }
}

impl FromStr for SolidKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SolidKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown solid '{s}'")))
    }
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cyclic(v: [f64; 3]) -> [[f64; 3]; 3] {
    [v, [v[1], v[2], v[0]], [v[2], v[0], v[1]]]
}

/// Unit vertex directions and unit face-centre directions.
fn directions(kind: SolidKind) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let signs = [-1.0, 1.0];
    let mut cube = Vec::new();
    for &x in &signs {
        for &y in &signs {
            for &z in &signs {
                cube.push([x, y, z]);
            }
        }
    }
    let mut axes = Vec::new();
    for i in 0..3 {
        for &s in &signs {
            let mut v = [0.0; 3];
            v[i] = s;
            axes.push(v);
        }
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let (verts, centres) = match kind {
        SolidKind::Tetrahedron => {
            let v: Vec<[f64; 3]> = cube.iter().copied().filter(|p| p[0] * p[1] * p[2] > 0.0).collect();
            let c = v.iter().map(|p| [-p[0], -p[1], -p[2]]).collect();
            (v, c)
        }
        SolidKind::Cube => (cube.clone(), axes.clone()),
        SolidKind::Octahedron => (axes.clone(), cube.clone()),
        SolidKind::Dodecahedron => {
            let mut v = cube.clone();
            for &a in &signs {
                for &b in &signs {
                    v.extend(cyclic([0.0, a / phi, b * phi]));
                }
            }
            let mut c = Vec::new();
            for &a in &signs {
                for &b in &signs {
                    c.extend(cyclic([0.0, a * phi, b]));
                }
            }
            (v, c)
        }
    };
    (verts.into_iter().map(normalize).collect(), centres.into_iter().map(normalize).collect())
}

/// Face cycles, counter-clockwise seen from outside.
fn faces_from_centres(verts: &[[f64; 3]], centres: &[[f64; 3]]) -> Vec<Vec<usize>> {
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    centres
        .iter()
        .map(|c| {
            let best = verts.iter().map(|v| dot(v, c)).fold(f64::MIN, f64::max);
            let mut idx: Vec<usize> = (0..verts.len()).filter(|&i| dot(&verts[i], c) > best - 1e-9).collect();
            // Angular order in the face plane around the centre direction.
            let helper = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let e1 = normalize([
                helper[0] - dot(&helper, c) * c[0],
                helper[1] - dot(&helper, c) * c[1],
                helper[2] - dot(&helper, c) * c[2],
            ]);
            let e2 = [c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]];
            idx.sort_by(|&i, &j| {
                let ai = dot(&verts[i], &e2).atan2(dot(&verts[i], &e1));
                let aj = dot(&verts[j], &e2).atan2(dot(&verts[j], &e1));
                ai.total_cmp(&aj)
            });
            idx
        })
        .collect()
}

/// Regular solid of circumradius `size` (Euclidean) or with vertices at
/// hyperbolic distance `size` from the centre (hyperbolic).
pub fn build_regular(kind: SolidKind, space: AmbientSpace, size: f64) -> Result<Polyhedron> {
    if !(size > 0.0 && size.is_finite()) {
        return Err(Error::Domain(format!("size must be positive, got {size}")));
    }
    if space == AmbientSpace::Hyperbolic3 && size > 15.0 {
        return Err(Error::Domain(format!("hyperbolic size {size} exceeds the representable range (15)")));
    }
    let (dirs, centres) = directions(kind);
    let faces = faces_from_centres(&dirs, &centres);
    let vertices = dirs
        .iter()
        .map(|d| match space {
            AmbientSpace::Euclidean3 => vec![size * d[0], size * d[1], size * d[2]],
            AmbientSpace::Hyperbolic3 => {
                let (c, s) = (size.cosh(), size.sinh());
                vec![c, s * d[0], s * d[1], s * d[2]]
            }
        })
        .collect();
    let poly = Polyhedron::new(space, vertices, faces).map_err(|e| Error::Construction(e.to_string()))?;
    super::check_convex(&poly).map_err(|e| Error::Construction(e.to_string()))?;
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrig::{dihedral_angles, face_angles};
    use std::f64::consts::PI;

    #[test]
    fn combinatorics() {
        for (kind, v, f, e) in [
            (SolidKind::Tetrahedron, 4, 4, 6),
            (SolidKind::Cube, 8, 6, 12),
            (SolidKind::Octahedron, 6, 8, 12),
            (SolidKind::Dodecahedron, 20, 12, 30),
        ] {
            for space in [AmbientSpace::Euclidean3, AmbientSpace::Hyperbolic3] {
                let p = build_regular(kind, space, 1.0).unwrap();
                assert_eq!((p.vertex_count(), p.faces().len(), p.edges().len()), (v, f, e), "{kind:?}");
            }
        }
    }

    #[test]
    fn euclidean_dihedral_angles() {
        let cases = [
            (SolidKind::Cube, PI / 2.0),
            (SolidKind::Tetrahedron, (1.0f64 / 3.0).acos()),
            (SolidKind::Octahedron, (-1.0f64 / 3.0).acos()),
            (SolidKind::Dodecahedron, (-1.0 / 5f64.sqrt()).acos()),
        ];
        for (kind, expect) in cases {
            let p = build_regular(kind, AmbientSpace::Euclidean3, 1.0).unwrap();
            for a in dihedral_angles(&p).unwrap() {
                assert!((a - expect).abs() < 1e-12, "{kind:?}: {a} vs {expect}");
            }
        }
    }

    #[test]
    fn euclidean_face_angles() {
        let cube = build_regular(SolidKind::Cube, AmbientSpace::Euclidean3, 1.0).unwrap();
        for a in face_angles(&cube).unwrap().concat() {
            assert!((a - PI / 2.0).abs() < 1e-12);
        }
        let tet = build_regular(SolidKind::Tetrahedron, AmbientSpace::Euclidean3, 2.0).unwrap();
        for a in face_angles(&tet).unwrap().concat() {
            assert!((a - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_angles_shrink_with_size() {
        let euc = (1.0f64 / 3.0).acos();
        let mut last = euc;
        for size in [0.25, 0.5, 1.0, 2.0] {
            let p = build_regular(SolidKind::Tetrahedron, AmbientSpace::Hyperbolic3, size).unwrap();
            let a = dihedral_angles(&p).unwrap();
            assert!(a.iter().all(|&x| x < last));
            last = a[0];
            for face in face_angles(&p).unwrap() {
                assert!(face.iter().sum::<f64>() < PI);
            }
        }
    }

    #[test]
    fn hyperbolic_small_size_limit() {
        // Angles are even in size; Richardson on h² removes the leading term.
        let angle = |s: f64| {
            let p = build_regular(SolidKind::Tetrahedron, AmbientSpace::Hyperbolic3, s).unwrap();
            dihedral_angles(&p).unwrap()[0]
        };
        let (a1, a2, a3) = (angle(0.1), angle(0.05), angle(0.025));
        let r1 = (4.0 * a2 - a1) / 3.0;
        let r2 = (4.0 * a3 - a2) / 3.0;
        let exact = (1.0f64 / 3.0).acos();
        assert!((a3 - exact).abs() < 1e-3);
        assert!((r2 - exact).abs() < 1e-6, "{r2} vs {exact}");
        assert!((r2 - exact).abs() < (r1 - exact).abs() + 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(build_regular(SolidKind::Cube, AmbientSpace::Euclidean3, 0.0), Err(Error::Domain(_))));
        assert!("icosahedron".parse::<SolidKind>().is_err());
        assert_eq!("cube".parse::<SolidKind>().unwrap(), SolidKind::Cube);
    }
}
