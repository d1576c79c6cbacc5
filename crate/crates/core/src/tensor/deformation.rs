//! Standard-form deformations of an edge and their L² classification.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

use super::engine::{Field, Point};
use super::{check_stencil, geometry};
use crate::error::{Error, Result};
use crate::geom::{edge_metric, ChartKind, ModelChart, SampleGrid};
use crate::Curvature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeformationKind {
    Length,
    Twist,
    Angle,
}

impl DeformationKind {
    pub const ALL: [DeformationKind; 3] = [DeformationKind::Length, DeformationKind::Twist, DeformationKind::Angle];

    pub fn name(self) -> &'static str {
        match self {
            DeformationKind::Length => "length",
            DeformationKind::Twist => "twist",
            DeformationKind::Angle => "angle",
        }
    }
}

impl FromStr for DeformationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DeformationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown deformation kind '{s}' (length, twist, angle)")))
    }
}

/// A covariant tensor field on a model chart.
#[derive(Clone)]
pub struct ChartTensorField {
    pub chart: ModelChart,
    /// (contravariant, covariant) ranks; only (0, s) fields are built here.
    pub valence: (usize, usize),
    pub provenance: String,
    pub field: Field<f64>,
}

impl std::fmt::Debug for ChartTensorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChartTensorField")
            .field("chart", &self.chart)
            .field("valence", &self.valence)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl ChartTensorField {
    pub fn new(chart: ModelChart, rank: usize, provenance: impl Into<String>, field: Field<f64>) -> Self {
        ChartTensorField { chart, valence: (0, rank), provenance: provenance.into(), field }
    }

    pub fn zero(chart: ModelChart, rank: usize) -> Self {
        ChartTensorField::new(chart, rank, "0", Field::zero(rank))
    }

    /// Component arrays at every grid point.
    pub fn sample(&self, grid: &SampleGrid) -> Result<Vec<Vec<f64>>> {
        grid.points()
            .iter()
            .map(|x| {
                if !self.chart.in_domain(x) {
                    return Err(Error::Domain(format!("sample point {x:?} outside the chart")));
                }
                let v = self.field.at(x);
                if v.iter().all(|c| c.is_finite()) {
                    Ok(v)
                } else {
                    Err(Error::Numeric(format!("non-finite component at {x:?}")))
                }
            })
            .collect()
    }
}

/// f′(y) for the deformation profile.
pub fn bump_profile(y: f64) -> f64 {
    (-y * y).exp()
}

/// Cone angle of the chart carrying the basis fields; the tensors are local
/// and do not depend on it.
pub const BASIS_ANGLE: f64 = PI;

/// The derivative of a standard-form family on the edge chart (ρ, θ, y).
pub fn deformation_basis(kappa: Curvature, kind: DeformationKind) -> Result<ChartTensorField> {
    let chart = edge_metric(kappa, BASIS_ANGLE)?;
    let (field, prov) = match kind {
        DeformationKind::Length => (
            Field::new(2, move |x: &Point| {
                let mut v = vec![0.0; 9];
                v[8] = kappa.cs(x[0]).powi(2) * bump_profile(x[2]);
                v
            }),
            "cs^2(rho) f'(y) dy^2",
        ),
        DeformationKind::Twist => (
            Field::new(2, move |x: &Point| {
                let mut v = vec![0.0; 9];
                let c = 0.5 * kappa.sn(x[0]).powi(2) * bump_profile(x[2]);
                v[5] = c;
                v[7] = c;
                v
            }),
            "sn^2(rho) f'(y) dy dtheta",
        ),
        DeformationKind::Angle => (
            Field::new(2, move |x: &Point| {
                let mut v = vec![0.0; 9];
                v[4] = kappa.sn(x[0]).powi(2);
                v
            }),
            "sn^2(rho) dtheta^2",
        ),
    };
    Ok(ChartTensorField::new(chart, 2, prov, field))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub r2: f64,
    pub rms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Classification {
    /// p with |T| ~ ρ^p; +∞ for a vanishing field.
    pub tensor_exponent: f64,
    pub derivative_exponent: f64,
    #[serde(rename = "tensor_in_L2")]
    pub tensor_in_l2: bool,
    #[serde(rename = "derivative_in_L2")]
    pub derivative_in_l2: bool,
    pub tensor_fit: Option<PowerFit>,
    pub derivative_fit: Option<PowerFit>,
}

pub const FIT_RHO: (f64, f64) = (1e-4, 1e-2);
pub const FIT_POINTS: usize = 21;
pub const MIN_R2: f64 = 0.999;
/// A fit is also accepted when log|T| deviates from the line by less than this.
pub const MAX_FIT_RMS: f64 = 1e-3;
/// Margin within which 2p + (d − 1) = −1 counts as the divergent borderline.
pub const BORDERLINE_TOL: f64 = 1e-3;
/// Relative step of the covariant derivative at radius ρ.
pub const RELATIVE_STEP: f64 = 1e-3;
/// |∇T| below this multiple of |T|/ρ is treated as zero.
const NEGLIGIBLE: f64 = 1e-7;

fn power_fit(rho: &[f64], norms: &[f64]) -> PowerFit {
    let xs: Vec<f64> = rho.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let r2 = if syy <= 1e-300 { 1.0 } else { 1.0 - ssr / syy };
    PowerFit { exponent: slope, r2, rms: (ssr / n).sqrt() }
}

fn in_l2(p: f64, d: usize) -> bool {
    p == f64::INFINITY || 2.0 * p + (d as f64 - 1.0) > -1.0 + BORDERLINE_TOL
}

/// Classifies |T| and |∇T| (orthonormal-frame norms) near the singular axis
/// by power-law fits on a log grid over the two innermost decades.
pub fn l2_classify(t: &ChartTensorField) -> Result<L2Classification> {
    let chart = &t.chart;
    let d = chart
        .transverse_dim()
        .ok_or_else(|| Error::Precondition("classification needs an edge or vertex chart".into()))?;
    if t.valence.0 != 0 || t.valence.1 != t.field.rank() {
        return Err(Error::Precondition(format!("valence {:?} is not covariant of rank {}", t.valence, t.field.rank())));
    }
    let angle = chart.angle.unwrap_or(2.0 * PI);
    let fixed = match chart.kind {
        ChartKind::EdgeNeighborhood => [angle / 3.0, 0.3],
        _ => [1.0, angle / 3.0],
    };
    let grid = SampleGrid::radial_log(FIT_RHO.0, FIT_RHO.1, FIT_POINTS, fixed);
    let rank = t.field.rank();
    let mut rho = Vec::new();
    let mut tn = Vec::new();
    let mut dn = Vec::new();
    for x in grid.points() {
        let h = RELATIVE_STEP * x[0];
        check_stencil(chart, &x, h)?;
        let geo = geometry(chart, h);
        let v = t.field.at(&x);
        let dv = geo.nabla(&t.field).at(&x);
        if v.iter().chain(&dv).any(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("non-finite field values at {x:?}")));
        }
        rho.push(x[0]);
        tn.push(geo.norm_sq(&v, rank, &x).max(0.0).sqrt());
        dn.push(geo.norm_sq(&dv, rank + 1, &x).max(0.0).sqrt());
    }

    let classify = |norms: &[f64], zero: &dyn Fn(usize) -> bool, what: &str| -> Result<(f64, Option<PowerFit>)> {
        if (0..norms.len()).all(zero) {
            return Ok((f64::INFINITY, None));
        }
        if norms.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Classification(format!("{what} vanishes at some radii: not a power law")));
        }
        let fit = power_fit(&rho, norms);
        if fit.r2 < MIN_R2 && fit.rms > MAX_FIT_RMS {
            return Err(Error::Classification(format!(
                "{what} is not a power law in rho (R^2 = {:.6}, rms = {:.3e})",
                fit.r2, fit.rms
            )));
        }
        Ok((fit.exponent, Some(fit)))
    };
    let (p, tfit) = classify(&tn, &|i| tn[i] == 0.0, "|T|")?;
    let (q, dfit) = classify(&dn, &|i| dn[i] <= NEGLIGIBLE * tn[i] / rho[i], "|nabla T|")?;
    Ok(L2Classification {
        tensor_exponent: p,
        derivative_exponent: q,
        tensor_in_l2: in_l2(p, d),
        derivative_in_l2: in_l2(q, d),
        tensor_fit: tfit,
        derivative_fit: dfit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_components() {
        let a = deformation_basis(Curvature::Flat, DeformationKind::Angle).unwrap();
        assert_eq!(a.field.at(&[0.5, 1.0, 0.0])[4], 0.25);
        let l = deformation_basis(Curvature::Hyperbolic, DeformationKind::Length).unwrap();
        let v = l.field.at(&[0.7, 1.0, 0.4]);
        assert!((v[8] - 0.7f64.cosh().powi(2) * (-0.16f64).exp()).abs() < 1e-14);
        for k in Curvature::ALL {
            let t = deformation_basis(k, DeformationKind::Twist).unwrap();
            let s = t.field.at(&[1e-3, 1.0, 0.0])[5] / 1e-6;
            assert!((s - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn classification_table() {
        for k in Curvature::ALL {
            let c = |kind| l2_classify(&deformation_basis(k, kind).unwrap()).unwrap();
            let (l, t, a) = (c(DeformationKind::Length), c(DeformationKind::Twist), c(DeformationKind::Angle));
            assert!(l.tensor_in_l2 && l.derivative_in_l2, "{k:?} {l:?}");
            assert!(t.tensor_in_l2 && t.derivative_in_l2, "{k:?} {t:?}");
            assert!(a.tensor_in_l2 && !a.derivative_in_l2, "{k:?} {a:?}");
            assert!((a.derivative_exponent + 1.0).abs() < 1e-3);
            assert!(a.tensor_exponent.abs() < 1e-3);
            assert!((t.tensor_exponent - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_field_sentinel() {
        let chart = edge_metric(Curvature::Flat, 1.0).unwrap();
        let r = l2_classify(&ChartTensorField::zero(chart, 2)).unwrap();
        assert_eq!(r.tensor_exponent, f64::INFINITY);
        assert!(r.tensor_in_l2 && r.derivative_in_l2);
    }

    #[test]
    fn non_power_law_is_rejected() {
        let chart = edge_metric(Curvature::Flat, 1.0).unwrap();
        let f = Field::new(1, |x: &Point| vec![1.0 + (1.0 / x[0]).ln().sin() * 0.5, 0.0, 0.0]);
        let r = l2_classify(&ChartTensorField::new(chart, 1, "oscillating", f));
        assert!(matches!(r, Err(Error::Classification(_))), "{r:?}");
    }

    #[test]
    fn box_chart_is_rejected() {
        let chart = crate::geom::space_form_box(Curvature::Flat, 1.0).unwrap();
        assert!(matches!(l2_classify(&ChartTensorField::zero(chart, 2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("twist".parse::<DeformationKind>().unwrap(), DeformationKind::Twist);
        assert!("shear".parse::<DeformationKind>().is_err());
    }
}
