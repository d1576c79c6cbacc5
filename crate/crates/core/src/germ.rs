//! Singular germs: the local data of a cone-manifold along its singular graph.
//!
//! A germ records, per edge, its length, cone angle and twist, and per vertex
//! the spherical cone-surface link with its cone points. Slots tie each edge
//! end to a cone point of the link at that end.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::geom::Curvature;
use crate::polyrig::{dihedral_angles, AmbientSpace, Polyhedron};

/// Tolerance when comparing an edge angle with the link cone angle at its slot.
pub const ANGLE_MATCH_TOL: f64 = 1e-9;
/// Tolerance for link positions: unit length and pairwise separation.
pub const POSITION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeGerm {
    pub length: f64,
    pub angle: f64,
    pub twist: f64,
}

/// An edge of the singular graph. `endpoints == None` is a closed circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermEdge {
    pub id: String,
    pub endpoints: Option<[String; 2]>,
    #[serde(flatten)]
    pub data: EdgeGerm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub position: [f64; 3],
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalLinkSpec {
    pub cone_points: Vec<ConePoint>,
}

impl SphericalLinkSpec {
    pub fn angles(&self) -> Vec<f64> {
        self.cone_points.iter().map(|c| c.angle).collect()
    }
}

/// Edge end `end` (0 or 1) of edge `edge` sits at cone point `cone_point`
/// of the link of that endpoint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub edge: String,
    pub end: usize,
    pub cone_point: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularGerm {
    pub kappa: Curvature,
    pub vertices: Vec<String>,
    pub edges: Vec<GermEdge>,
    pub links: BTreeMap<String, SphericalLinkSpec>,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Code {
    /// Angle outside (0, 2π).
    V1,
    /// Nonpositive edge length.
    V2,
    /// Twist outside [0, angle).
    V3,
    /// Valence below 3, or not matching the link, or slots not a bijection.
    V4,
    /// Edge angle differs from the link cone angle at its slot.
    V5,
    /// Link area not positive.
    V6,
    /// Link cone-point positions not unit or not distinct.
    V7,
    /// Two-point link: the vertex is removable.
    W1,
    /// Spherical germ with an edge of length ≥ π.
    W2,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: Code,
    /// `edge:<id>` or `vertex:<id>`.
    pub locus: String,
    pub message: String,
    pub severity: Severity,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.violations.iter().any(|v| v.severity == Severity::Error)
    }

    pub fn codes(&self) -> BTreeSet<Code> {
        self.violations.iter().map(|v| v.code).collect()
    }

    fn push(&mut self, code: Code, locus: String, message: String) {
        let severity = match code {
            Code::W1 | Code::W2 => Severity::Warning,
            _ => Severity::Error,
        };
        self.violations.push(Violation { code, locus, message, severity });
    }
}

fn angle_ok(a: f64) -> bool {
    a > 0.0 && a < 2.0 * PI
}

/// Area of a spherical cone-surface with the given cone angles (Gauss–Bonnet).
pub fn link_area(angles: &[f64]) -> Result<f64> {
    if let Some(a) = angles.iter().find(|a| !angle_ok(**a)) {
        return Err(Error::Domain(format!("cone angle {a} outside (0, 2π)")));
    }
    Ok(4.0 * PI - angles.iter().map(|a| 2.0 * PI - a).sum::<f64>())
}

/// Dimension of the moduli space of spherical cone-surfaces with `ell` cone points.
pub fn moduli_dim(ell: usize) -> Result<usize> {
    match ell {
        0 | 1 => Err(Error::Domain(format!("a spherical cone-surface link needs at least two cone points, got {ell}"))),
        2 => Ok(1),
        _ => Ok(3 * ell - 6),
    }
}

/// Dimension of the germ parameter space: 3 per edge plus the link moduli.
pub fn germ_param_dim(g: &SingularGerm) -> Result<usize> {
    let mut dim = 3 * g.edges.len();
    for v in &g.vertices {
        let link = g.links.get(v).ok_or_else(|| Error::Input(format!("vertex {v} has no link")))?;
        dim += moduli_dim(link.cone_points.len())?;
    }
    Ok(dim)
}

fn check_references(g: &SingularGerm) -> Result<()> {
    let vset: BTreeSet<&str> = g.vertices.iter().map(String::as_str).collect();
    if vset.len() != g.vertices.len() {
        return Err(Error::Input("duplicate vertex id".into()));
    }
    let mut eset = BTreeSet::new();
    for e in &g.edges {
        if !eset.insert(e.id.as_str()) {
            return Err(Error::Input(format!("duplicate edge id {}", e.id)));
        }
        if let Some(ends) = &e.endpoints {
            for v in ends {
                if !vset.contains(v.as_str()) {
                    return Err(Error::Input(format!("edge {} references unknown vertex {v}", e.id)));
                }
            }
        }
    }
    for v in g.links.keys() {
        if !vset.contains(v.as_str()) {
            return Err(Error::Input(format!("link given for unknown vertex {v}")));
        }
    }
    for v in &g.vertices {
        if !g.links.contains_key(v) {
            return Err(Error::Input(format!("vertex {v} has no link")));
        }
    }
    for s in &g.slots {
        let edge = g
            .edges
            .iter()
            .find(|e| e.id == s.edge)
            .ok_or_else(|| Error::Input(format!("slot references unknown edge {}", s.edge)))?;
        let ends = edge
            .endpoints
            .as_ref()
            .ok_or_else(|| Error::Input(format!("slot given for closed edge {}", s.edge)))?;
        let v = ends
            .get(s.end)
            .ok_or_else(|| Error::Input(format!("slot end index {} on edge {} is not 0 or 1", s.end, s.edge)))?;
        if s.cone_point >= g.links[v].cone_points.len() {
            return Err(Error::Input(format!(
                "slot ({}, {}) references cone point {} but the link of {v} has {}",
                s.edge,
                s.end,
                s.cone_point,
                g.links[v].cone_points.len()
            )));
        }
    }
    Ok(())
}

/// Lists every violation of the germ realizability conditions.
///
/// Dangling references are input errors rather than violations.
pub fn validate_germ(g: &SingularGerm) -> Result<ValidationReport> {
    check_references(g)?;
    let mut rep = ValidationReport::default();

    for e in &g.edges {
        let locus = format!("edge:{}", e.id);
        let d = e.data;
        if !angle_ok(d.angle) {
            rep.push(Code::V1, locus.clone(), format!("cone angle {} outside (0, 2π)", d.angle));
        }
        if !(d.length > 0.0) || !d.length.is_finite() {
            rep.push(Code::V2, locus.clone(), format!("length {} is not positive", d.length));
        }
        if !(d.twist >= 0.0 && d.twist < d.angle) {
            rep.push(Code::V3, locus.clone(), format!("twist {} outside [0, {})", d.twist, d.angle));
        }
        if g.kappa == Curvature::Spherical && d.length >= PI {
            rep.push(Code::W2, locus, format!("length {} ≥ π for a spherical germ", d.length));
        }
    }

    // Edge ends incident to each vertex; self-loops contribute two.
    let mut ends: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        if let Some(pair) = &e.endpoints {
            for (k, v) in pair.iter().enumerate() {
                ends.entry(v.as_str()).or_default().push((i, k));
            }
        }
    }
    let slot_of: BTreeMap<(&str, usize), &Slot> = g.slots.iter().map(|s| ((s.edge.as_str(), s.end), s)).collect();

    for v in &g.vertices {
        let locus = format!("vertex:{v}");
        let link = &g.links[v];
        let n = link.cone_points.len();
        let incident = ends.get(v.as_str()).cloned().unwrap_or_default();

        for (j, cp) in link.cone_points.iter().enumerate() {
            if !angle_ok(cp.angle) {
                rep.push(Code::V1, locus.clone(), format!("link cone point {j} has angle {} outside (0, 2π)", cp.angle));
            }
            let norm = cp.position.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > POSITION_TOL {
                rep.push(Code::V7, locus.clone(), format!("link cone point {j} position has norm {norm}"));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let (p, q) = (link.cone_points[a].position, link.cone_points[b].position);
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                if d <= POSITION_TOL {
                    rep.push(Code::V7, locus.clone(), format!("link cone points {a} and {b} coincide"));
                }
            }
        }

        if n == 2 {
            rep.push(Code::W1, locus.clone(), "two-point link: the vertex is removable".into());
        } else if incident.len() < 3 || incident.len() != n {
            rep.push(
                Code::V4,
                locus.clone(),
                format!("valence {} with a {n}-point link (need valence ≥ 3 equal to the link size)", incident.len()),
            );
        }

        let mut used: BTreeMap<usize, usize> = BTreeMap::new();
        for &(i, k) in &incident {
            let e = &g.edges[i];
            match slot_of.get(&(e.id.as_str(), k)) {
                None => rep.push(Code::V4, locus.clone(), format!("edge {} end {k} has no slot", e.id)),
                Some(s) => {
                    *used.entry(s.cone_point).or_default() += 1;
                    let link_angle = link.cone_points[s.cone_point].angle;
                    if (link_angle - e.data.angle).abs() > ANGLE_MATCH_TOL {
                        rep.push(
                            Code::V5,
                            format!("edge:{}", e.id),
                            format!(
                                "edge angle {} differs from link angle {link_angle} at cone point {} of {v}",
                                e.data.angle, s.cone_point
                            ),
                        );
                    }
                }
            }
        }
        // With as many ends as cone points, no shared cone point means a bijection.
        if let Some((cp, _)) = used.iter().find(|(_, &c)| c > 1) {
            rep.push(Code::V4, locus.clone(), format!("cone point {cp} receives more than one edge end"));
        }

        if let Ok(area) = link_area(&link.angles()) {
            if area <= 0.0 {
                rep.push(Code::V6, locus.clone(), format!("link area {area} is not positive"));
            }
        }
    }
    Ok(rep)
}

/// The doubled germ of a convex polyhedron: edge angles are twice the
/// dihedral angles, links are doubled vertex polygons, twists vanish.
pub fn double_polyhedron(poly: &Polyhedron) -> Result<SingularGerm> {
    let dihedral = dihedral_angles(poly)?;
    if let Some((i, a)) = dihedral.iter().enumerate().find(|(_, &a)| !(a > 0.0 && 2.0 * a < 2.0 * PI)) {
        let e = poly.edges()[i].vertices;
        return Err(Error::Construction(format!(
            "not convex: doubled angle {} at edge {}-{} is not below 2π",
            2.0 * a,
            e[0],
            e[1]
        )));
    }
    let kappa = match poly.space() {
        AmbientSpace::Euclidean3 => Curvature::Flat,
        AmbientSpace::Hyperbolic3 => Curvature::Hyperbolic,
    };
    let lengths = poly.edge_lengths();
    let vid = |i: usize| format!("v{i}");
    let eid = |i: usize| format!("e{i}");
    let vertices = (0..poly.vertex_count()).map(vid).collect();
    let edges = poly
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| GermEdge {
            id: eid(i),
            endpoints: Some([vid(e.vertices[0]), vid(e.vertices[1])]),
            data: EdgeGerm { length: lengths[i], angle: 2.0 * dihedral[i], twist: 0.0 },
        })
        .collect();
    let mut links = BTreeMap::new();
    let mut slots = Vec::new();
    for (v, inc) in poly.incident_edges().iter().enumerate() {
        let mut cone_points = Vec::with_capacity(inc.len());
        for (j, &i) in inc.iter().enumerate() {
            let e = poly.edges()[i];
            let (end, other) = if e.vertices[0] == v { (0, e.vertices[1]) } else { (1, e.vertices[0]) };
            cone_points.push(ConePoint { position: poly.edge_direction(v, other), angle: 2.0 * dihedral[i] });
            slots.push(Slot { edge: eid(i), end, cone_point: j });
        }
        links.insert(vid(v), SphericalLinkSpec { cone_points });
    }
    slots.sort();
    Ok(SingularGerm { kappa, vertices, edges, links, slots })
}

impl SingularGerm {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("germ serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrig::{build_regular, SolidKind};

    fn cube_double() -> SingularGerm {
        double_polyhedron(&build_regular(SolidKind::Cube, AmbientSpace::Euclidean3, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn link_area_examples() {
        assert!((link_area(&[PI, PI, PI]).unwrap() - PI).abs() < 1e-15);
        let a = 2.0 * PI - 1e-12;
        assert!((link_area(&[a, a]).unwrap() - 4.0 * PI).abs() < 1e-11);
        assert!((link_area(&[PI / 2.0; 3]).unwrap() + PI / 2.0).abs() < 1e-15);
        assert!(matches!(link_area(&[0.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn moduli_dims() {
        assert_eq!(moduli_dim(2).unwrap(), 1);
        assert_eq!(moduli_dim(3).unwrap(), 3);
        assert_eq!(moduli_dim(4).unwrap(), 6);
        assert!(moduli_dim(1).is_err());
    }

    #[test]
    fn cube_double_is_valid() {
        let g = cube_double();
        assert_eq!(g.edges.len(), 12);
        assert_eq!(g.vertices.len(), 8);
        for e in &g.edges {
            assert!((e.data.angle - PI).abs() < 1e-12);
        }
        for l in g.links.values() {
            assert_eq!(l.cone_points.len(), 3);
            assert!(l.cone_points.iter().all(|c| (c.angle - PI).abs() < 1e-12));
        }
        assert!(validate_germ(&g).unwrap().is_empty());
        assert_eq!(germ_param_dim(&g).unwrap(), 60);
    }

    #[test]
    fn closed_circle_germ() {
        let g = SingularGerm {
            kappa: Curvature::Hyperbolic,
            vertices: vec![],
            edges: vec![GermEdge { id: "c".into(), endpoints: None, data: EdgeGerm { length: 1.0, angle: 1.0, twist: 0.5 } }],
            links: BTreeMap::new(),
            slots: vec![],
        };
        assert!(validate_germ(&g).unwrap().is_empty());
        assert_eq!(germ_param_dim(&g).unwrap(), 3);
    }

    #[test]
    fn mismatched_slot_angle_is_v5() {
        let mut g = cube_double();
        let s = g.slots[0].clone();
        let v = g.edges.iter().find(|e| e.id == s.edge).unwrap().endpoints.clone().unwrap()[s.end].clone();
        g.links.get_mut(&v).unwrap().cone_points[s.cone_point].angle = 3.0 * PI / 4.0;
        let codes = validate_germ(&g).unwrap().codes();
        assert!(codes.contains(&Code::V5));
        assert!(!codes.contains(&Code::V4));
    }

    #[test]
    fn edge_field_violations() {
        let mut g = cube_double();
        g.edges[0].data.angle = 7.0;
        g.edges[1].data.length = 0.0;
        g.edges[2].data.twist = 4.0;
        let codes = validate_germ(&g).unwrap().codes();
        for c in [Code::V1, Code::V2, Code::V3] {
            assert!(codes.contains(&c), "{c}");
        }
    }

    #[test]
    fn removable_vertex_warns() {
        let g = SingularGerm {
            kappa: Curvature::Flat,
            vertices: vec!["p".into()],
            edges: vec![GermEdge {
                id: "a".into(),
                endpoints: Some(["p".into(), "p".into()]),
                data: EdgeGerm { length: 2.0, angle: 1.0, twist: 0.0 },
            }],
            links: BTreeMap::from([(
                "p".into(),
                SphericalLinkSpec {
                    cone_points: vec![
                        ConePoint { position: [0.0, 0.0, 1.0], angle: 1.0 },
                        ConePoint { position: [0.0, 0.0, -1.0], angle: 1.0 },
                    ],
                },
            )]),
            slots: vec![
                Slot { edge: "a".into(), end: 0, cone_point: 0 },
                Slot { edge: "a".into(), end: 1, cone_point: 1 },
            ],
        };
        let rep = validate_germ(&g).unwrap();
        assert_eq!(rep.codes(), BTreeSet::from([Code::W1]));
        assert!(!rep.has_errors());
        assert_eq!(germ_param_dim(&g).unwrap(), 4);
    }

    #[test]
    fn nonpositive_link_area_is_v6() {
        let mut g = cube_double();
        let eids: Vec<String> = g.edges.iter().map(|e| e.id.clone()).collect();
        for e in g.edges.iter_mut() {
            e.data.angle = PI / 2.0;
        }
        for l in g.links.values_mut() {
            for c in &mut l.cone_points {
                c.angle = PI / 2.0;
            }
        }
        let rep = validate_germ(&g).unwrap();
        assert!(rep.codes().contains(&Code::V6));
        assert_eq!(eids.len(), 12);
    }

    #[test]
    fn dangling_references_are_input_errors() {
        let mut g = cube_double();
        g.edges[0].endpoints = Some(["v0".into(), "nowhere".into()]);
        assert!(matches!(validate_germ(&g), Err(Error::Input(_))));
        let mut g = cube_double();
        g.slots[0].cone_point = 9;
        assert!(matches!(validate_germ(&g), Err(Error::Input(_))));
    }

    #[test]
    fn duplicate_slot_is_v4() {
        let mut g = cube_double();
        // Send two edge ends at one vertex to the same cone point.
        let v0_slots: Vec<usize> = g
            .slots
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                let e = g.edges.iter().find(|e| e.id == s.edge).unwrap();
                e.endpoints.as_ref().unwrap()[s.end] == "v0"
            })
            .map(|(i, _)| i)
            .collect();
        let target = g.slots[v0_slots[0]].cone_point;
        g.slots[v0_slots[1]].cone_point = target;
        assert!(validate_germ(&g).unwrap().codes().contains(&Code::V4));
    }

    #[test]
    fn spherical_long_edge_warns() {
        let mut g = cube_double();
        g.kappa = Curvature::Spherical;
        g.edges[3].data.length = 3.5;
        let rep = validate_germ(&g).unwrap();
        assert_eq!(rep.codes(), BTreeSet::from([Code::W2]));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let g = double_polyhedron(&build_regular(SolidKind::Dodecahedron, AmbientSpace::Hyperbolic3, 0.9).unwrap()).unwrap();
        let back = SingularGerm::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn nonconvex_input_is_rejected() {
        let h = 1.0;
        let v = vec![
            vec![1.0, 0.0, 0.0],
            vec![-0.5, 0.75f64.sqrt(), 0.0],
            vec![-0.5, -(0.75f64.sqrt()), 0.0],
            vec![0.0, 0.0, -h / 2.0],
            vec![0.0, 0.0, -h],
        ];
        let faces = vec![vec![0, 1, 3], vec![1, 2, 3], vec![2, 0, 3], vec![1, 0, 4], vec![2, 1, 4], vec![0, 2, 4]];
        let p = Polyhedron::new(AmbientSpace::Euclidean3, v, faces).unwrap();
        assert!(matches!(double_polyhedron(&p), Err(Error::Construction(_))));
    }
}
