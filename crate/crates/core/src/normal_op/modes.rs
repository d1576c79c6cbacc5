//! Fourier-mode solutions of the edge normal operator of ∇*∇ on one-forms.
//!
//! For η̂ = f̂ dρ + ĝ ρdθ + ĥ dy at Fourier index n (in θ) and frequency ξ (in y),
//!
//! ```text
//! (−(ρ∂ρ)² + n²γ² + 1 + ρ²ξ²) f̂ + 2inγ ĝ = 0
//! (−(ρ∂ρ)² + n²γ² + 1 + ρ²ξ²) ĝ − 2inγ f̂ = 0
//! (−(ρ∂ρ)² + n²γ²     + ρ²ξ²) ĥ = 0
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::bessel::bessel_ik;
use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Radial profile of one basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Radial {
    /// I_a(ρ|ξ|)
    I,
    /// K_a(ρ|ξ|)
    K,
    /// ρ^a (ξ = 0)
    Power,
    /// ρ^{−a} (ξ = 0)
    InversePower,
    /// log ρ (ξ = 0, a = 0)
    Log,
}

/// One fundamental solution: a scalar radial profile of order `order` placed
/// in the components with the weights `polarization`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeModeSolution {
    pub n: i64,
    pub gamma: f64,
    pub xi: f64,
    /// Unit coefficient vector (c¹, …, c⁶).
    pub coefficients: [Complex64; 6],
    pub radial: Radial,
    pub order: f64,
    /// Weights of (f̂, ĝ, ĥ).
    pub polarization: [Complex64; 3],
}

impl EdgeModeSolution {
    /// Index 1..=6 of the nonzero coefficient.
    pub fn slot(&self) -> usize {
        self.coefficients.iter().position(|c| c.norm() > 0.0).map_or(0, |i| i + 1)
    }

    pub fn label(&self) -> String {
        let comp = if self.polarization[2].norm() > 0.0 { "dy" } else { "transverse" };
        let prof = match self.radial {
            Radial::I => format!("I{}", fmt_order(self.order)),
            Radial::K => format!("K{}", fmt_order(self.order)),
            Radial::Power => format!("r^{}", fmt_order(self.order)),
            Radial::InversePower => format!("r^-{}", fmt_order(self.order)),
            Radial::Log => "log".to_string(),
        };
        format!("c{}:{prof}:{comp}", self.slot())
    }

    /// Radial profile and its ρ-derivative.
    pub fn profile(&self, rho: f64) -> Result<(f64, f64)> {
        let a = self.order;
        let x = rho * self.xi.abs();
        Ok(match self.radial {
            Radial::I | Radial::K => {
                let b = bessel_ik(a, x)?;
                let s = self.xi.abs();
                if self.radial == Radial::I {
                    (b.i, s * b.ip)
                } else {
                    (b.k, s * b.kp)
                }
            }
            Radial::Power => (rho.powf(a), a * rho.powf(a - 1.0)),
            Radial::InversePower => (rho.powf(-a), -a * rho.powf(-a - 1.0)),
            Radial::Log => (rho.ln(), 1.0 / rho),
        })
    }

    /// (f̂, ĝ, ĥ) at ρ.
    pub fn components(&self, rho: f64) -> Result<[Complex64; 3]> {
        let (v, _) = self.profile(rho)?;
        Ok(self.polarization.map(|p| p * v))
    }

    /// Leading exponent at ρ = 0 and whether it carries a log.
    pub fn exponent_at_zero(&self) -> (f64, bool) {
        match self.radial {
            Radial::I | Radial::Power => (self.order, false),
            Radial::K if self.order == 0.0 => (0.0, true),
            Radial::K | Radial::InversePower => (-self.order, false),
            Radial::Log => (0.0, true),
        }
    }

    /// Residual of the coupled system at ρ, with (ρ∂ρ)² applied by a central
    /// difference of step h in log ρ.
    pub fn system_residual_fd(&self, rho: f64, h: f64) -> Result<[Complex64; 3]> {
        let ng = self.n as f64 * self.gamma;
        let (um, _) = self.profile(rho * (-h).exp())?;
        let (u0, _) = self.profile(rho)?;
        let (up, _) = self.profile(rho * h.exp())?;
        let d2 = (up - 2.0 * u0 + um) / (h * h);
        let c = self.polarization;
        let i = Complex64::i();
        let base = -d2 + (ng * ng + rho * rho * self.xi * self.xi) * u0;
        Ok([
            c[0] * (base + u0) + 2.0 * i * ng * c[1] * u0,
            c[1] * (base + u0) - 2.0 * i * ng * c[0] * u0,
            c[2] * base,
        ])
    }
}

fn fmt_order(a: f64) -> String {
    if a.fract() == 0.0 {
        format!("{}", a as i64)
    } else {
        format!("{a:.6}")
    }
}

/// The six fundamental solutions at (n, γ, ξ).
pub fn edge_mode_basis(n: i64, gamma: f64, xi: f64) -> Result<Vec<EdgeModeSolution>> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::Precondition(format!("gamma = {gamma} must be ≥ 1")));
    }
    if !xi.is_finite() {
        return Err(Error::Domain("xi must be finite".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::i();
    let sign = if n < 0 { -1.0 } else { 1.0 };
    let ng = n.unsigned_abs() as f64 * gamma;
    let (grow, decay) = if xi == 0.0 { (Radial::Power, Radial::InversePower) } else { (Radial::I, Radial::K) };
    let decay_for = |a: f64| if xi == 0.0 && a == 0.0 { Radial::Log } else { decay };
    let grow_for = |a: f64| if xi == 0.0 && a == 0.0 { Radial::Power } else { grow };
    let specs: [(Radial, f64, [Complex64; 3]); 6] = if n != 0 {
        // ĝ = ±i f̂ with the sign flipped for negative n (complex conjugation).
        let up = i * sign;
        [
            (grow_for(ng - 1.0), ng - 1.0, [one, up, zero]),
            (decay_for(ng - 1.0), ng - 1.0, [one, up, zero]),
            (grow, ng + 1.0, [one, -up, zero]),
            (decay, ng + 1.0, [one, -up, zero]),
            (grow, ng, [zero, zero, one]),
            (decay, ng, [zero, zero, one]),
        ]
    } else {
        [
            (grow, 1.0, [one, zero, zero]),
            (decay, 1.0, [one, zero, zero]),
            (grow, 1.0, [zero, one, zero]),
            (decay, 1.0, [zero, one, zero]),
            (grow_for(0.0), 0.0, [zero, zero, one]),
            (decay_for(0.0), 0.0, [zero, zero, one]),
        ]
    };
    Ok(specs
        .into_iter()
        .enumerate()
        .map(|(k, (radial, order, polarization))| {
            let mut coefficients = [zero; 6];
            coefficients[k] = one;
            EdgeModeSolution { n, gamma, xi, coefficients, radial, order, polarization }
        })
        .collect())
}

/// Whether the solution lies in ρ^δ L²(ρ dρ) on (0, ∞): growing profiles
/// never do; decaying ones do when the exponent μ at 0 satisfies μ > δ − 1,
/// a log counting as an exponent just below 0.
pub fn weighted_membership(sol: &EdgeModeSolution, delta: f64) -> bool {
    match sol.radial {
        Radial::I | Radial::Power | Radial::InversePower | Radial::Log => false,
        Radial::K => {
            let (mu, log) = sol.exponent_at_zero();
            if log {
                delta < 1.0
            } else {
                mu > delta - 1.0
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: i64,
    pub xi: f64,
    pub delta: f64,
    pub mode: String,
    pub member: bool,
    pub exponent_at_zero: f64,
    pub log: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaVerdict {
    pub delta: f64,
    pub injective: bool,
    /// Members, as "n,xi,mode".
    pub kernel: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub gamma: f64,
    pub rows: Vec<ScanRow>,
    pub verdicts: Vec<DeltaVerdict>,
}

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,xi,delta,member,exponent_at_zero,mode,log\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{:?},{:?},{},{:?},{},{}", r.n, r.xi, r.delta, r.member, r.exponent_at_zero, r.mode, r.log);
        }
        s
    }

    pub fn verdict(&self, delta: f64) -> Option<&DeltaVerdict> {
        self.verdicts.iter().find(|v| v.delta == delta)
    }
}

/// Membership of every basis mode with |n| ≤ n_max and ξ ∈ xis, per δ.
pub fn injectivity_scan(gamma: f64, deltas: &[f64], n_max: u32, xis: &[f64], exec: Exec) -> Result<ScanTable> {
    if !(gamma > 1.0) {
        return Err(Error::Precondition(format!("gamma = {gamma} must exceed 1")));
    }
    let mut cells = Vec::new();
    for &delta in deltas {
        for n in -(n_max as i64)..=n_max as i64 {
            for &xi in xis {
                cells.push((delta, n, xi));
            }
        }
    }
    let blocks = par::try_map(exec, &cells, |&(delta, n, xi)| -> Result<Vec<ScanRow>> {
        Ok(edge_mode_basis(n, gamma, xi)?
            .iter()
            .map(|sol| {
                let (mu, log) = sol.exponent_at_zero();
                ScanRow { n, xi, delta, mode: sol.label(), member: weighted_membership(sol, delta), exponent_at_zero: mu, log }
            })
            .collect())
    })?;
    let rows: Vec<ScanRow> = blocks.into_iter().flatten().collect();
    let verdicts = deltas
        .iter()
        .map(|&delta| {
            let kernel: Vec<String> =
                rows.iter().filter(|r| r.delta == delta && r.member).map(|r| format!("{},{:?},{}", r.n, r.xi, r.mode)).collect();
            DeltaVerdict { delta, injective: kernel.is_empty(), kernel }
        })
        .collect();
    Ok(ScanTable { gamma, rows, verdicts })
}
