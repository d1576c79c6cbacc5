//! Friedrichs spectra of spherical footballs, a shooting oracle for them, and
//! the spectral-gap checks the vertex calculus relies on.
//!
//! A football with cone angle α is the spherical suspension of a circle of
//! length α. Separating variables with e^{inγθ}, γ = 2π/α, leaves the radial
//! problem −f″ − cot(r) f′ + ν²/sin²(r) f = λ f on (0, π) with ν = |n|γ,
//! whose regular solutions are associated Legendre functions of degree ν + k.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ode::{integrate, Tolerance};
use crate::par::{self, Exec};

/// Eigenvalues closer than this (relative) are merged into one entry.
pub const MERGE_TOL: f64 = 1e-12;
/// Radius of the Frobenius start away from each pole.
const R0: f64 = 1e-3;
/// Bisection stops when the bracket is this narrow.
pub const BRACKET_WIDTH: f64 = 1e-10;
/// λ step of the sign-change scan; eigenvalues of one mode are ≥ 2 apart.
const SCAN_STEP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
    /// (n, k) labels; empty for user-supplied spectra.
    pub labels: Vec<(i64, u64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub entries: Vec<Eigenvalue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub weiss_ok: bool,
    pub oneform_gap_ok: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs()).max(1.0)
}

impl EigenvalueList {
    /// Builds a sorted list from (λ, label) pairs, merging equal eigenvalues.
    pub fn from_labelled(mut items: Vec<(f64, (i64, u64))>) -> Self {
        items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut entries: Vec<Eigenvalue> = Vec::new();
        for (lambda, label) in items {
            match entries.last_mut() {
                Some(e) if close(e.lambda, lambda) => {
                    e.multiplicity += 1;
                    e.labels.push(label);
                }
                _ => entries.push(Eigenvalue { lambda, multiplicity: 1, labels: vec![label] }),
            }
        }
        EigenvalueList { entries }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Every eigenvalue repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.lambda, e.multiplicity)).collect()
    }

    /// Parses the `lambda multiplicity` text format; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut entries: Vec<Eigenvalue> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: expected 'lambda multiplicity', got '{line}'", ln + 1));
            if fields.len() != 2 {
                return Err(bad());
            }
            let lambda: f64 = fields[0].parse().map_err(|_| bad())?;
            let multiplicity: usize = fields[1].parse().map_err(|_| bad())?;
            if !lambda.is_finite() || lambda < 0.0 || multiplicity == 0 {
                return Err(Error::Parse(format!("line {}: need lambda ≥ 0 and multiplicity ≥ 1", ln + 1)));
            }
            entries.push(Eigenvalue { lambda, multiplicity, labels: Vec::new() });
        }
        entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        Ok(EigenvalueList { entries })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# lambda multiplicity\n");
        for e in &self.entries {
            let _ = writeln!(s, "{:?} {}", e.lambda, e.multiplicity);
        }
        s
    }
}

fn check_angle(angle: f64) -> Result<f64> {
    if angle > 0.0 && angle <= 2.0 * PI {
        Ok(2.0 * PI / angle)
    } else {
        Err(Error::Domain(format!("football angle {angle} outside (0, 2π]")))
    }
}

/// Closed-form Friedrichs spectrum of the football up to `lambda_max`.
pub fn football_spectrum(angle: f64, lambda_max: f64) -> Result<EigenvalueList> {
    let gamma = check_angle(angle)?;
    if !(lambda_max > 0.0) {
        return Err(Error::Domain(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let slack = lambda_max * (1.0 + MERGE_TOL);
    let mut items = Vec::new();
    for n in 0i64.. {
        let nu = n as f64 * gamma;
        if nu * (nu + 1.0) > slack {
            break;
        }
        for k in 0u64.. {
            let d = nu + k as f64;
            let lambda = d * (d + 1.0);
            if lambda > slack {
                break;
            }
            items.push((lambda, (n, k)));
            if n != 0 {
                items.push((lambda, (-n, k)));
            }
        }
    }
    Ok(EigenvalueList::from_labelled(items))
}

/// Integrates the radial equation from the pole at 0 (or π when `right`) to π/2.
fn shoot(nu: f64, lambda: f64, right: bool) -> Result<[f64; 2]> {
    let c = (nu * (nu + 1.0) / 3.0 - lambda) / (4.0 * (nu + 1.0));
    // Leading power r0^ν divided out: the equation is linear.
    let f0 = 1.0 + c * R0 * R0;
    let df0 = nu / R0 + c * (nu + 2.0) * R0;
    let rhs = |r: f64, y: &[f64; 2]| {
        let (s, co) = r.sin_cos();
        [y[1], -(co / s) * y[1] + (nu * nu / (s * s) - lambda) * y[0]]
    };
    let (start, sign) = if right { (PI - R0, -1.0) } else { (R0, 1.0) };
    let mut y = [f0, sign * df0];
    let mut t = start;
    // Geometric segments with renormalisation: f grows like r^ν near the pole.
    let segments = 12;
    for i in 1..=segments {
        let dist = R0 * ((PI / 2.0) / R0).powf(i as f64 / segments as f64);
        let target = if right { PI - dist } else { dist };
        y = integrate(rhs, t, y, target, Tolerance::default()).map_err(|e| {
            Error::Numeric(format!("shooting blew up (nu = {nu}, lambda = {lambda}, from {}): {e}", if right { "π" } else { "0" }))
        })?;
        let scale = y[0].abs().max(y[1].abs());
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Numeric(format!("shooting lost the solution (nu = {nu}, lambda = {lambda})")));
        }
        y = [y[0] / scale, y[1] / scale];
        t = target;
    }
    Ok(y)
}

fn mismatch_nu(nu: f64, lambda: f64) -> Result<f64> {
    let l = shoot(nu, lambda, false)?;
    let r = shoot(nu, lambda, true)?;
    let norm = (l[0].hypot(l[1])) * (r[0].hypot(r[1]));
    Ok((l[0] * r[1] - l[1] * r[0]) / norm)
}

/// Normalised Wronskian mismatch at r = π/2 of the regular solutions from
/// both poles; it vanishes exactly at eigenvalues of mode `n`.
pub fn legendre_shooting(gamma: f64, n: i64, lambda: f64) -> Result<f64> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be ≥ 1, got {gamma}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be ≥ 0, got {lambda}")));
    }
    mismatch_nu(n.unsigned_abs() as f64 * gamma, lambda)
}

fn bisect(nu: f64, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        let fm = mismatch_nu(nu, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenvalues ≤ `lambda_max` of mode `n` located by a sign-change scan of
/// the shooting mismatch followed by bisection.
pub fn oracle_mode_eigenvalues(gamma: f64, n: i64, lambda_max: f64, exec: Exec) -> Result<Vec<f64>> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain(format!("gamma must be ≥ 1, got {gamma}")));
    }
    let nu = n.unsigned_abs() as f64 * gamma;
    // Start slightly below 0 so the constant mode at λ = 0 is bracketed.
    let steps = ((lambda_max + 0.25) / SCAN_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| -0.25 + i as f64 * SCAN_STEP).collect();
    let values = par::try_map(exec, &grid, |&l| mismatch_nu(nu, l))?;
    let mut roots = Vec::new();
    for i in 0..steps {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            roots.push(grid[i]);
        } else if (a > 0.0) != (b > 0.0) && b != 0.0 {
            roots.push(bisect(nu, grid[i], grid[i + 1], a)?);
        }
    }
    if values[steps] == 0.0 {
        roots.push(grid[steps]);
    }
    Ok(roots.into_iter().filter(|&l| l <= lambda_max + BRACKET_WIDTH).collect())
}

/// The football spectrum found by the shooting oracle, labelled by (n, k).
pub fn oracle_football_spectrum(angle: f64, lambda_max: f64, exec: Exec) -> Result<EigenvalueList> {
    let gamma = check_angle(angle)?;
    let mut items = Vec::new();
    for n in 0i64.. {
        let nu = n as f64 * gamma;
        let roots = oracle_mode_eigenvalues(gamma, n, lambda_max, exec)?;
        for (k, &l) in roots.iter().enumerate() {
            items.push((l, (n, k as u64)));
            if n != 0 {
                items.push((l, (-n, k as u64)));
            }
        }
        // Past this mode no eigenvalue can be ≤ lambda_max; it was scanned once to confirm.
        if nu * (nu + 1.0) > lambda_max {
            break;
        }
    }
    // Oracle roots agree only to the bracket width; merge on that scale.
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut entries: Vec<Eigenvalue> = Vec::new();
    for (lambda, label) in items {
        match entries.last_mut() {
            Some(e) if (e.lambda - lambda).abs() <= 1e-8 => {
                e.multiplicity += 1;
                e.labels.push(label);
            }
            _ => entries.push(Eigenvalue { lambda, multiplicity: 1, labels: vec![label] }),
        }
    }
    Ok(EigenvalueList { entries })
}

/// One-form spectrum of a cone-surface from its scalar spectrum: every
/// nonzero eigenvalue carries an exact and a coexact eigenform.
pub fn scalar_to_oneform_spectrum(scalar: &EigenvalueList) -> EigenvalueList {
    let entries = scalar
        .entries
        .iter()
        .filter(|e| e.lambda > MERGE_TOL)
        .map(|e| Eigenvalue {
            lambda: e.lambda,
            multiplicity: 2 * e.multiplicity,
            labels: e.labels.iter().chain(&e.labels).copied().collect(),
        })
        .collect();
    EigenvalueList { entries }
}

/// Weiss bound λ₁ ≥ 2 on the scalar spectrum and the gap λ > 1 on one-forms.
pub fn check_spectral_bounds(list: &EigenvalueList) -> SpectralBounds {
    let first = list.entries.iter().map(|e| e.lambda).find(|&l| l > MERGE_TOL);
    let weiss_ok = first.is_none_or(|l| l >= 2.0 - MERGE_TOL);
    let oneform_gap_ok = scalar_to_oneform_spectrum(list).entries.iter().all(|e| e.lambda > 1.0);
    SpectralBounds { weiss_ok, oneform_gap_ok }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(l: &EigenvalueList) -> Vec<(f64, usize)> {
        l.entries.iter().map(|e| (e.lambda, e.multiplicity)).collect()
    }

    #[test]
    fn round_sphere() {
        let s = football_spectrum(2.0 * PI, 7.0).unwrap();
        assert_eq!(summary(&s), vec![(0.0, 1), (2.0, 3), (6.0, 5)]);
        for e in &s.entries {
            assert_eq!(e.labels.len(), e.multiplicity);
        }
    }

    #[test]
    fn half_angle_football() {
        let s = football_spectrum(PI, 13.0).unwrap();
        assert_eq!(summary(&s), vec![(0.0, 1), (2.0, 1), (6.0, 3), (12.0, 3)]);
    }

    #[test]
    fn angle_domain() {
        assert!(matches!(football_spectrum(7.0, 5.0), Err(Error::Domain(_))));
        assert!(matches!(football_spectrum(0.0, 5.0), Err(Error::Domain(_))));
    }

    #[test]
    fn shooting_examples() {
        assert!(legendre_shooting(1.0, 0, 2.0).unwrap().abs() < 1e-9);
        assert!(legendre_shooting(2.0, 1, 6.0).unwrap().abs() < 1e-9);
        assert!(legendre_shooting(2.0, 1, 5.0).unwrap().abs() > 0.05);
        assert!(legendre_shooting(0.5, 1, 5.0).is_err());
    }

    #[test]
    fn oracle_agrees_with_closed_form() {
        let angle = 1.3;
        let closed = football_spectrum(angle, 15.0).unwrap();
        let oracle = oracle_football_spectrum(angle, 15.0, Exec::default()).unwrap();
        assert_eq!(closed.entries.len(), oracle.entries.len());
        for (a, b) in closed.entries.iter().zip(&oracle.entries) {
            assert!((a.lambda - b.lambda).abs() < 1e-8, "{} vs {}", a.lambda, b.lambda);
            assert_eq!(a.labels, b.labels);
        }
    }

    #[test]
    fn oneform_doubling() {
        let s = EigenvalueList::parse_text("0 1\n2 3\n").unwrap();
        assert_eq!(summary(&scalar_to_oneform_spectrum(&s)), vec![(2.0, 6)]);
        let only_zero = EigenvalueList::parse_text("0 1").unwrap();
        assert!(scalar_to_oneform_spectrum(&only_zero).entries.is_empty());
        let f = football_spectrum(PI, 13.0).unwrap();
        assert!(scalar_to_oneform_spectrum(&f).entries.iter().all(|e| e.lambda > 1.0));
    }

    #[test]
    fn bounds() {
        let f = football_spectrum(2.5, 20.0).unwrap();
        assert_eq!(f.entries[1].lambda, 2.0);
        assert_eq!(check_spectral_bounds(&f), SpectralBounds { weiss_ok: true, oneform_gap_ok: true });
        let bad = EigenvalueList::parse_text("0 1\n1.5 2\n").unwrap();
        assert!(!check_spectral_bounds(&bad).weiss_ok);
        let sphere = football_spectrum(2.0 * PI, 30.0).unwrap();
        assert!(check_spectral_bounds(&sphere).weiss_ok);
    }

    #[test]
    fn text_format() {
        let s = EigenvalueList::parse_text("# link\n0 1\n\n2.75 2  # coupled\n").unwrap();
        assert_eq!(summary(&s), vec![(0.0, 1), (2.75, 2)]);
        let back = EigenvalueList::parse_text(&s.to_text()).unwrap();
        assert_eq!(s, back);
        assert!(matches!(EigenvalueList::parse_text("1 2 3"), Err(Error::Parse(_))));
        assert!(matches!(EigenvalueList::parse_text("-1 2"), Err(Error::Parse(_))));
    }
}
