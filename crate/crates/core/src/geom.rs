//! Curvature-parametrised trigonometry and the local model metrics.
//!
//! The three space forms are indexed by [`Curvature`]. Local normal forms near
//! the singular locus are represented as [`ModelChart`]s: the constant-curvature
//! cylinder around an edge, the cone near a vertex (one link cone point at a
//! time), and a plain space-form coordinate box.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dual::Real;
use crate::error::{Error, Result};

pub type Point = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Sectional curvature of a space form, normalised to -1, 0 or +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Curvature {
    Hyperbolic,
    Flat,
    Spherical,
}

impl Curvature {
    pub const ALL: [Curvature; 3] = [Curvature::Hyperbolic, Curvature::Flat, Curvature::Spherical];

    pub fn kappa(self) -> i8 {
        match self {
            Curvature::Hyperbolic => -1,
            Curvature::Flat => 0,
            Curvature::Spherical => 1,
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.kappa())
    }

    /// Generalised sine: solves f'' + κf = 0, f(0) = 0, f'(0) = 1.
    pub fn sn<T: Real>(self, r: T) -> T {
        match self {
            Curvature::Hyperbolic => r.sinh(),
            Curvature::Flat => r,
            Curvature::Spherical => r.sin(),
        }
    }

    /// Generalised cosine: solves f'' + κf = 0, f(0) = 1, f'(0) = 0.
    pub fn cs<T: Real>(self, r: T) -> T {
        match self {
            // cosh through sinh keeps cs² − sn² = 1 to rounding of one sqrt.
            Curvature::Hyperbolic => {
                let s = r.sinh();
                (T::one() + s * s).sqrt()
            }
            Curvature::Flat => T::one(),
            Curvature::Spherical => r.cos(),
        }
    }
}

impl TryFrom<i8> for Curvature {
    type Error = Error;
    fn try_from(k: i8) -> Result<Self> {
        match k {
            -1 => Ok(Curvature::Hyperbolic),
            0 => Ok(Curvature::Flat),
            1 => Ok(Curvature::Spherical),
            _ => Err(Error::Domain(format!("curvature must be -1, 0 or 1, got {k}"))),
        }
    }
}

impl From<Curvature> for i8 {
    fn from(c: Curvature) -> i8 {
        c.kappa()
    }
}

pub fn sn(kappa: Curvature, r: f64) -> f64 {
    kappa.sn(r)
}

pub fn cs(kappa: Curvature, r: f64) -> f64 {
    kappa.cs(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    /// Coordinates (ρ, θ, y) around a singular edge.
    EdgeNeighborhood,
    /// Coordinates (r, s, θ) near one cone point of a vertex link.
    VertexCone,
    /// Conformally flat coordinates on a box of the space form.
    SpaceFormBox,
}

/// Closed coordinate interval; `periodic` axes have no boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, periodic: true }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.periodic || (v >= self.lo && v <= self.hi)
    }
}

/// A local model of a constant-curvature cone-manifold in explicit coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelChart {
    pub kind: ChartKind,
    pub kappa: Curvature,
    /// Cone angle around the singular axis (edge and vertex charts).
    pub angle: Option<f64>,
    /// Coordinate box; always excludes the singular locus.
    pub bounds: [Interval; 3],
}

fn check_angle(angle: f64, upper_inclusive: bool) -> Result<()> {
    let ok = angle > 0.0 && if upper_inclusive { angle <= 2.0 * PI } else { angle < 2.0 * PI };
    if ok && angle.is_finite() {
        Ok(())
    } else {
        let range = if upper_inclusive { "(0, 2π]" } else { "(0, 2π)" };
        Err(Error::Domain(format!("cone angle {angle} outside {range}")))
    }
}

/// Largest radial coordinate for which the chart metric stays nondegenerate.
fn radial_limit(kappa: Curvature, cs_vanishes: bool) -> f64 {
    match kappa {
        // sn vanishes at π; for edge charts cs already vanishes at π/2.
        Curvature::Spherical if cs_vanishes => PI / 2.0 - 1e-3,
        Curvature::Spherical => PI - 1e-3,
        _ => 8.0,
    }
}

/// Edge chart with metric dρ² + sn²ρ dθ² + cs²ρ dy², θ of period `angle`.
pub fn edge_metric(kappa: Curvature, angle: f64) -> Result<ModelChart> {
    check_angle(angle, true)?;
    Ok(ModelChart {
        kind: ChartKind::EdgeNeighborhood,
        kappa,
        angle: Some(angle),
        bounds: [
            Interval::new(0.0, radial_limit(kappa, true)),
            Interval::periodic(0.0, angle),
            Interval::new(-10.0, 10.0),
        ],
    })
}

/// Vertex chart dr² + sn²r (ds² + sin²s dθ²) near the link cone point `selector`.
pub fn vertex_metric(kappa: Curvature, link_angles: &[f64], selector: usize) -> Result<ModelChart> {
    for &a in link_angles {
        check_angle(a, false)?;
    }
    let angle = *link_angles.get(selector).ok_or_else(|| {
        Error::Input(format!("link cone point {selector} out of range (link has {})", link_angles.len()))
    })?;
    Ok(ModelChart {
        kind: ChartKind::VertexCone,
        kappa,
        angle: Some(angle),
        bounds: [
            Interval::new(0.0, radial_limit(kappa, false)),
            Interval::new(0.0, PI),
            Interval::periodic(0.0, angle),
        ],
    })
}

/// Space-form box with metric |dx|² / (1 + κ|x|²/4)² on [-half, half]³.
pub fn space_form_box(kappa: Curvature, half_width: f64) -> Result<ModelChart> {
    let limit = if kappa == Curvature::Hyperbolic { 1.15 } else { 10.0 };
    if !(half_width > 0.0 && half_width <= limit) {
        return Err(Error::Domain(format!("box half-width {half_width} outside (0, {limit}]")));
    }
    let iv = Interval::new(-half_width, half_width);
    Ok(ModelChart { kind: ChartKind::SpaceFormBox, kappa, angle: None, bounds: [iv; 3] })
}

impl ModelChart {
    /// Diagonal orthonormal-coframe factors, generic over the scalar type.
    ///
    /// All model metrics are diagonal in their coordinates, so the coframe is
    /// `diag(c)` and the metric is `diag(c²)`.
    pub fn coframe_diag<T: Real>(&self, x: [T; 3]) -> [T; 3] {
        let k = self.kappa;
        match self.kind {
            ChartKind::EdgeNeighborhood => [T::one(), k.sn(x[0]), k.cs(x[0])],
            ChartKind::VertexCone => {
                let s = k.sn(x[0]);
                [T::one(), s, s * x[1].sin()]
            }
            ChartKind::SpaceFormBox => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let c = T::one() / (T::one() + r2.scale(k.value() / 4.0));
                [c, c, c]
            }
        }
    }

    pub fn in_domain(&self, x: &Point) -> bool {
        let inside = x.iter().zip(&self.bounds).all(|(&v, iv)| v.is_finite() && iv.contains(v));
        let off_axis = match self.kind {
            ChartKind::EdgeNeighborhood => x[0] > 0.0,
            ChartKind::VertexCone => x[0] > 0.0 && x[1] > 0.0 && x[1] < PI,
            ChartKind::SpaceFormBox => true,
        };
        inside && off_axis
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {x:?} outside the chart or on the singular locus")))
        }
    }

    /// Metric matrix at `x` without the domain check.
    pub fn metric_unchecked(&self, x: &Point) -> Mat3 {
        let c = self.coframe_diag(*x);
        [[c[0] * c[0], 0.0, 0.0], [0.0, c[1] * c[1], 0.0], [0.0, 0.0, c[2] * c[2]]]
    }

    /// Symmetric positive-definite metric matrix at an interior point.
    pub fn metric(&self, x: &Point) -> Result<Mat3> {
        self.check_point(x)?;
        let g = self.metric_unchecked(x);
        if (0..3).any(|i| !(g[i][i] > 0.0)) {
            return Err(Error::Domain(format!("metric degenerate at {x:?}")));
        }
        Ok(g)
    }

    /// Orthonormal coframe matrix A with g = AᵀA.
    pub fn coframe(&self, x: &Point) -> Result<Mat3> {
        self.check_point(x)?;
        let c = self.coframe_diag(*x);
        Ok([[c[0], 0.0, 0.0], [0.0, c[1], 0.0], [0.0, 0.0, c[2]]])
    }

    /// Transverse dimension of the singular stratum the chart is centred on.
    pub fn transverse_dim(&self) -> Option<usize> {
        match self.kind {
            ChartKind::EdgeNeighborhood => Some(2),
            ChartKind::VertexCone => Some(3),
            ChartKind::SpaceFormBox => None,
        }
    }
}

/// Tensor-product sample grid. Axis 0 may be log-spaced for radial sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    pub axes: [Vec<f64>; 3],
}

impl SampleGrid {
    pub fn linear(bounds: [(f64, f64); 3], counts: [usize; 3]) -> Self {
        let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
            if n == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        SampleGrid { axes: [axis(bounds[0], counts[0]), axis(bounds[1], counts[1]), axis(bounds[2], counts[2])] }
    }

    /// Log-spaced radial axis on [lo, hi] with the other axes fixed.
    pub fn radial_log(lo: f64, hi: f64, n: usize, fixed: [f64; 2]) -> Self {
        let (a, b) = (lo.ln(), hi.ln());
        let radial = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
        SampleGrid { axes: [radial, vec![fixed[0]], vec![fixed[1]]] }
    }

    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.axes.iter().map(Vec::len).product());
        for &a in &self.axes[0] {
            for &b in &self.axes[1] {
                for &c in &self.axes[2] {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }
}
