//! The no-log solve of ρ^{−2}(−(ρ∂ρ)² + ρ²ξ²) u = f on the half line.

use serde::{Deserialize, Serialize};

use super::bessel::bessel_ik_scaled;
use crate::error::{Error, Result};

/// Nodes uniform in t = ln ρ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    /// Weights for ∫ · ρ dρ (trapezoid in t).
    pub weights: Vec<f64>,
    pub step: f64,
}

impl RadialGrid {
    pub fn log_spaced(rho_min: f64, rho_max: f64, step: f64) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max > rho_min && step > 0.0) {
            return Err(Error::Domain(format!("bad radial grid [{rho_min}, {rho_max}] step {step}")));
        }
        let (t0, t1) = (rho_min.ln(), rho_max.ln());
        let m = ((t1 - t0) / step).ceil() as usize;
        let h = (t1 - t0) / m as f64;
        let nodes: Vec<f64> = (0..=m).map(|k| (t0 + h * k as f64).exp()).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let end = if k == 0 || k == m { 0.5 } else { 1.0 };
                end * h * r * r
            })
            .collect();
        Ok(RadialGrid { nodes, weights, step: h })
    }

    /// ρ from 1e−5 to 40 with step 2e−3 in ln ρ.
    pub fn standard() -> Self {
        RadialGrid::log_spaced(1e-5, 40.0, 2e-3).expect("fixed parameters")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    /// L²(ρ dρ) norm.
    pub fn norm(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.weights).map(|(x, w)| x * x * w).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenRecord {
    /// ‖ρ²(N̂u − f)‖ / ‖ρ² f‖ in L²(ρ dρ), interior nodes.
    pub residual: f64,
    /// Fitted coefficient of log ρ on the innermost decade.
    pub log_coeff: f64,
    /// Fitted constant on the innermost decade.
    pub const_coeff: f64,
    /// ∫ K₀(ρ|ξ|) f ρ dρ, the limit of u at ρ = 0.
    pub a_hat: f64,
    pub f_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreenSolution {
    pub u: Vec<f64>,
    pub record: GreenRecord,
}

/// Cumulative ∫_{t_0}^{t_k} g dt by the four-point rule on each cell.
fn cumulative(g: &[f64], h: f64) -> Vec<f64> {
    let m = g.len();
    let at = |k: isize| if k < 0 || k as usize >= m { 0.0 } else { g[k as usize] };
    let mut out = vec![0.0; m];
    for k in 0..m - 1 {
        let i = k as isize;
        out[k + 1] = out[k] + h / 24.0 * (-at(i - 1) + 13.0 * at(i) + 13.0 * at(i + 1) - at(i + 2));
    }
    out
}

/// Fourth-order central second difference in t; zero on the two outer nodes.
pub fn apply_operator(grid: &RadialGrid, u: &[f64], xi: f64) -> Vec<f64> {
    let m = u.len();
    let h2 = grid.step * grid.step;
    let mut out = vec![0.0; m];
    for k in 2..m.saturating_sub(2) {
        let utt = (-u[k - 2] + 16.0 * u[k - 1] - 30.0 * u[k] + 16.0 * u[k + 1] - u[k + 2]) / (12.0 * h2);
        let r = grid.nodes[k];
        out[k] = -utt + r * r * xi * xi * u[k];
    }
    out
}

/// Minimum nodes per unit of ln ρ over which f varies by its full range.
const MIN_NODES_PER_FEATURE: f64 = 8.0;

/// Solves N̂u = f by the Green kernel built from I₀ and K₀, choosing the
/// solution with no log ρ term at 0. The kernel sign is fixed so that the
/// discretised operator applied to u returns +f.
pub fn green_apply(grid: &RadialGrid, f: &[f64], xi: f64) -> Result<GreenSolution> {
    if xi == 0.0 {
        return Err(Error::Unsupported("xi = 0 is the indicial regime; the Green solve needs xi ≠ 0".into()));
    }
    if f.len() != grid.len() || grid.len() < 8 {
        return Err(Error::Input(format!("{} samples for a grid of {} nodes", f.len(), grid.len())));
    }
    let m = f.len();
    let fmax = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let zero = GreenRecord { residual: 0.0, log_coeff: 0.0, const_coeff: 0.0, a_hat: 0.0, f_norm: 0.0 };
    if fmax == 0.0 {
        return Ok(GreenSolution { u: vec![0.0; m], record: zero });
    }
    if f[..4].iter().chain(&f[m - 4..]).any(|x| x.abs() > 1e-14 * fmax) {
        return Err(Error::Precondition("f must vanish near both ends of the grid".into()));
    }
    // Resolution: the sharpest relative jump between neighbours.
    let jump = f.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0f64, f64::max) / fmax;
    if jump > 1.0 / MIN_NODES_PER_FEATURE {
        return Err(Error::Accuracy(format!("source under-resolved: relative jump {jump:.3} between nodes")));
    }

    let s = xi.abs();
    let h = grid.step;
    let mut is = Vec::with_capacity(m);
    let mut ks = Vec::with_capacity(m);
    for &r in &grid.nodes {
        let b = bessel_ik_scaled(0.0, r * s)?;
        is.push(b.i);
        ks.push(b.k);
    }
    // Integrands in t: ρ² f times the scaled Bessel factor; the exponentials
    // are reattached per node pair so nothing overflows.
    let x: Vec<f64> = grid.nodes.iter().map(|r| r * s).collect();
    let gi: Vec<f64> = (0..m).map(|k| is[k] * x[k].exp() * f[k] * grid.nodes[k] * grid.nodes[k]).collect();
    let gk: Vec<f64> = (0..m).map(|k| ks[k] * (-x[k]).exp() * f[k] * grid.nodes[k] * grid.nodes[k]).collect();
    let ci = cumulative(&gi, h);
    let ck = cumulative(&gk, h);
    let total_k = ck[m - 1];
    let u: Vec<f64> = (0..m)
        .map(|k| {
            let (i0, k0) = (is[k] * x[k].exp(), ks[k] * (-x[k]).exp());
            k0 * ci[k] + i0 * (total_k - ck[k])
        })
        .collect();

    let nu = apply_operator(grid, &u, xi);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 2..m - 2 {
        let r2 = grid.nodes[k] * grid.nodes[k];
        let w = grid.weights[k];
        num += (nu[k] - r2 * f[k]).powi(2) * w;
        den += (r2 * f[k]).powi(2) * w;
    }
    let residual = (num / den).sqrt();

    let (const_coeff, log_coeff) = fit_const_log(grid, &u);
    Ok(GreenSolution {
        u,
        record: GreenRecord { residual, log_coeff, const_coeff, a_hat: total_k, f_norm: grid.norm(f) },
    })
}

/// Least squares of u against {1, log ρ} on [ρ_min, 10 ρ_min].
fn fit_const_log(grid: &RadialGrid, u: &[f64]) -> (f64, f64) {
    let rmin = grid.nodes[0];
    let pts: Vec<(f64, f64)> = grid.nodes.iter().zip(u).take_while(|(r, _)| **r <= 10.0 * rmin * (1.0 + 1e-12)).map(|(r, v)| (r.ln(), *v)).collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mu = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mu)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let slope = sxy / sxx;
    (mu - slope * mt, slope)
}

/// Gaussian bump exp(−((ρ − c)/w)²/2), cut to exactly zero beyond 9 widths.
pub fn gaussian_bump(center: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        let z = (r - center) / width;
        if z.abs() > 9.0 {
            0.0
        } else {
            (-0.5 * z * z).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_source() {
        let g = RadialGrid::standard();
        let s = green_apply(&g, &vec![0.0; g.len()], 1.0).unwrap();
        assert!(s.u.iter().all(|&x| x == 0.0));
        assert_eq!(s.record.log_coeff, 0.0);
    }

    #[test]
    fn bump_solution() {
        let g = RadialGrid::standard();
        assert!(g.nodes[0] <= 1e-4 && *g.nodes.last().unwrap() >= 30.0);
        let f = g.sample(gaussian_bump(1.0, 0.1));
        let s = green_apply(&g, &f, 1.0).unwrap();
        let rec = s.record;
        assert!(rec.residual <= 1e-6, "{rec:?}");
        assert!(rec.log_coeff.abs() <= 1e-6 * rec.f_norm, "{rec:?}");
        assert!((rec.const_coeff - rec.a_hat).abs() <= 1e-8 * rec.a_hat.abs());
    }

    #[test]
    fn inner_region_is_multiple_of_i0() {
        // For a source in [0.9, 1.1], u = a·I₀(ρ) below 0.9.
        let g = RadialGrid::standard();
        let f = g.sample(|r| if (r - 1.0).abs() < 0.1 { (1.0 - ((r - 1.0) / 0.1).powi(2)).powi(4) } else { 0.0 });
        let s = green_apply(&g, &f, 1.0).unwrap();
        for (k, &r) in g.nodes.iter().enumerate().filter(|(_, r)| **r < 0.5) {
            let i0 = super::super::bessel::bessel_i(0.0, r).unwrap();
            assert!((s.u[k] - s.record.a_hat * i0).abs() <= 1e-9 * s.record.a_hat);
        }
    }

    #[test]
    fn errors() {
        let g = RadialGrid::standard();
        let f = g.sample(gaussian_bump(1.0, 0.1));
        assert!(matches!(green_apply(&g, &f, 0.0), Err(Error::Unsupported(_))));
        let coarse = RadialGrid::log_spaced(1e-5, 40.0, 0.2).unwrap();
        let f = coarse.sample(gaussian_bump(1.0, 0.05));
        assert!(matches!(green_apply(&coarse, &f, 1.0), Err(Error::Accuracy(_))));
    }
}
