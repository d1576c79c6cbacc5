//! Indicial roots of the scalar and one-form Laplacians and of the gauge
//! operator at 2D cone points, 3D singular edges and 3D singular vertices.
//!
//! Roots are reported over a half-open window (lo, hi]. Independently of the
//! window, each root is classified against the critical window of its locus
//! and the Friedrichs rule: a solution r^μ·(mode) is allowed when its
//! covariant derivative is square integrable, which excludes log partners and
//! all exponents μ ≤ 1 − d/2 except the constant μ = 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dual::{second_derivative, Dual, Real};
use crate::error::{Error, Result};
use crate::spectra::{scalar_to_oneform_spectrum, EigenvalueList};

/// Roots closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalWindow {
    pub lo: f64,
    pub hi: f64,
    pub transverse_dim: u32,
    pub measure_exponent: u32,
}

impl CriticalWindow {
    pub fn contains(&self, mu: f64) -> bool {
        mu > self.lo && mu <= self.hi
    }

    /// Whether r^μ lies in L²(r^{d−1} dr) near 0.
    pub fn l2_member(&self, mu: f64) -> bool {
        mu > self.lo
    }

    pub fn is_endpoint(&self, mu: f64) -> bool {
        (mu - self.hi).abs() <= DEDUP_TOL
    }
}

/// (−d/2, −d/2 + 2] for transverse dimension d ∈ {2, 3}.
pub fn critical_window(transverse_dim: u32) -> Result<CriticalWindow> {
    if !(2..=3).contains(&transverse_dim) {
        return Err(Error::Unsupported(format!("transverse dimension {transverse_dim} (only 2 and 3)")));
    }
    let lo = -(transverse_dim as f64) / 2.0;
    Ok(CriticalWindow { lo, hi: lo + 2.0, transverse_dim, measure_exponent: transverse_dim - 1 })
}

/// A half-open interval (lo, hi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Self {
        Window { lo, hi }
    }

    pub fn contains(&self, mu: f64) -> bool {
        mu > self.lo + DEDUP_TOL && mu <= self.hi + DEDUP_TOL
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }
}

impl From<CriticalWindow> for Window {
    fn from(c: CriticalWindow) -> Self {
        Window { lo: c.lo, hi: c.hi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarization {
    Scalar,
    /// r^{nγ+1} e^{inγθ}(dr − i r dθ)
    EtaPP,
    /// r^{−nγ−1} e^{inγθ}(dr − i r dθ)
    EtaPM,
    /// r^{nγ−1} e^{inγθ}(dr + i r dθ)
    EtaMP,
    /// r^{−nγ+1} e^{inγθ}(dr + i r dθ)
    EtaMM,
    /// r^{±nγ} e^{inγθ} dy
    Dy,
    /// r^μ φ″ with φ″ a coexact link eigenform.
    Coexact,
    /// r^μ(a ψ dr + b r φ′), μ = −3/2 ± √(1+4λ)/2.
    CoupledA,
    /// r^μ(a ψ dr + b r φ′), μ = 1/2 ± √(1+4λ)/2.
    CoupledB,
    /// r^μ dr from the constant link eigenfunction.
    RadialLambda0,
}

impl Polarization {
    pub fn label(self) -> &'static str {
        match self {
            Polarization::Scalar => "scalar",
            Polarization::EtaPP => "eta++",
            Polarization::EtaPM => "eta+-",
            Polarization::EtaMP => "eta-+",
            Polarization::EtaMM => "eta--",
            Polarization::Dy => "dy",
            Polarization::Coexact => "coexact",
            Polarization::CoupledA => "coupled-A",
            Polarization::CoupledB => "coupled-B",
            Polarization::RadialLambda0 => "radial-lambda0",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeIndex {
    /// Fourier index n of e^{inγθ}.
    Fourier(i64),
    /// Link eigenvalue λ_j.
    Link(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeLabel {
    pub index: ModeIndex,
    pub polarization: Polarization,
    /// The mode carries an extra factor log r.
    pub log: bool,
}

impl ModeLabel {
    pub fn fourier(n: i64, polarization: Polarization) -> Self {
        ModeLabel { index: ModeIndex::Fourier(n), polarization, log: false }
    }

    pub fn link(lambda: f64, polarization: Polarization) -> Self {
        ModeLabel { index: ModeIndex::Link(lambda), polarization, log: false }
    }

    fn with_log(mut self) -> Self {
        self.log = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicialRoot {
    pub value: f64,
    pub multiplicity: usize,
    pub has_log_partner: bool,
    pub modes: Vec<ModeLabel>,
    /// Inside the critical window of the locus.
    pub critical: bool,
    /// Equal to the inclusive end of the critical window.
    pub endpoint: bool,
    /// One of the critical pair 1 − γ, γ − 1 (cone one-forms and edges).
    pub gamma_pair: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorTag {
    /// Scalar Laplacian.
    Laplacian0,
    /// Hodge Laplacian on one-forms.
    Laplacian1,
    /// Rough Laplacian ∇*∇, whose indicial operator is that of P.
    RoughLaplacian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocusTag {
    ConePoint,
    Edge,
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FriedrichsNote {
    pub value: f64,
    pub modes: Vec<ModeLabel>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicialReport {
    pub operator: OperatorTag,
    pub locus: LocusTag,
    pub angle: Option<f64>,
    pub window: Window,
    pub critical_window: CriticalWindow,
    pub roots: Vec<IndicialRoot>,
    pub friedrichs_allowed: Vec<FriedrichsNote>,
    pub friedrichs_excluded: Vec<FriedrichsNote>,
}

impl IndicialReport {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn root(&self, value: f64) -> Option<&IndicialRoot> {
        self.roots.iter().find(|r| (r.value - value).abs() <= 1e-9)
    }

    pub fn allowed_values(&self) -> Vec<f64> {
        self.friedrichs_allowed.iter().map(|n| n.value).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterOptions {
    /// Keep roots at the inclusive end of the critical window.
    pub include_endpoints: bool,
}

fn gamma_of(angle: f64) -> Result<f64> {
    if angle > 0.0 && angle < 2.0 * PI {
        Ok(2.0 * PI / angle)
    } else {
        Err(Error::Domain(format!("cone angle {angle} outside (0, 2π)")))
    }
}

/// Merges (value, mode) candidates inside `window` into sorted roots.
fn collect(cands: Vec<(f64, ModeLabel)>, window: Window, crit: CriticalWindow, gamma: Option<f64>) -> Vec<IndicialRoot> {
    let mut inside: Vec<(f64, ModeLabel)> = cands.into_iter().filter(|(v, _)| window.contains(*v)).collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut roots: Vec<IndicialRoot> = Vec::new();
    for (v, m) in inside {
        match roots.last_mut() {
            Some(r) if (r.value - v).abs() <= DEDUP_TOL => r.modes.push(m),
            _ => roots.push(IndicialRoot {
                value: v,
                multiplicity: 0,
                has_log_partner: false,
                modes: vec![m],
                critical: false,
                endpoint: false,
                gamma_pair: false,
            }),
        }
    }
    for r in &mut roots {
        r.multiplicity = r.modes.len();
        r.has_log_partner = r.modes.iter().any(|m| m.log);
        r.critical = crit.contains(r.value);
        r.endpoint = crit.is_endpoint(r.value);
        if let Some(g) = gamma {
            let pair_present = g < 2.0;
            r.gamma_pair = pair_present && ((r.value - (g - 1.0)).abs() <= DEDUP_TOL || (r.value - (1.0 - g)).abs() <= DEDUP_TOL);
        }
    }
    roots
}

fn fourier_range(window: Window, gamma: f64, shift: f64) -> std::ops::RangeInclusive<i64> {
    let reach = window.lo.abs().max(window.hi.abs()) + shift;
    let n = (reach / gamma).ceil() as i64 + 1;
    -n..=n
}

fn scalar_candidates(gamma: f64, window: Window, pol: Polarization) -> Vec<(f64, ModeLabel)> {
    let mut out = Vec::new();
    for n in fourier_range(window, gamma, 0.0) {
        let nu = n.unsigned_abs() as f64 * gamma;
        if n == 0 {
            out.push((0.0, ModeLabel::fourier(0, pol)));
            out.push((0.0, ModeLabel::fourier(0, pol).with_log()));
        } else {
            out.push((nu, ModeLabel::fourier(n, pol)));
            out.push((-nu, ModeLabel::fourier(n, pol)));
        }
    }
    out
}

fn oneform_candidates(gamma: f64, window: Window) -> Vec<(f64, ModeLabel)> {
    let mut out = Vec::new();
    for n in fourier_range(window, gamma, 1.0) {
        let ng = n as f64 * gamma;
        out.push((ng + 1.0, ModeLabel::fourier(n, Polarization::EtaPP)));
        out.push((-ng - 1.0, ModeLabel::fourier(n, Polarization::EtaPM)));
        out.push((ng - 1.0, ModeLabel::fourier(n, Polarization::EtaMP)));
        out.push((-ng + 1.0, ModeLabel::fourier(n, Polarization::EtaMM)));
    }
    out
}

fn finish(
    operator: OperatorTag,
    locus: LocusTag,
    angle: Option<f64>,
    window: Window,
    crit: CriticalWindow,
    roots: Vec<IndicialRoot>,
) -> IndicialReport {
    let mut report = IndicialReport {
        operator,
        locus,
        angle,
        window,
        critical_window: crit,
        roots,
        friedrichs_allowed: Vec::new(),
        friedrichs_excluded: Vec::new(),
    };
    classify(&mut report, FilterOptions::default());
    report
}

/// Roots nγ of the scalar Laplacian at a cone point.
pub fn roots_cone_scalar(angle: f64, window: Window) -> Result<IndicialReport> {
    let gamma = gamma_of(angle)?;
    let crit = critical_window(2)?;
    let roots = if window.is_empty() { Vec::new() } else { collect(scalar_candidates(gamma, window, Polarization::Scalar), window, crit, None) };
    Ok(finish(OperatorTag::Laplacian0, LocusTag::ConePoint, Some(angle), window, crit, roots))
}

/// Roots nγ ± 1 of the one-form Laplacian at a cone point.
pub fn roots_cone_oneform(angle: f64, window: Window) -> Result<IndicialReport> {
    let gamma = gamma_of(angle)?;
    let crit = critical_window(2)?;
    let roots = if window.is_empty() { Vec::new() } else { collect(oneform_candidates(gamma, window), window, crit, Some(gamma)) };
    Ok(finish(OperatorTag::Laplacian1, LocusTag::ConePoint, Some(angle), window, crit, roots))
}

/// Roots of ∇*∇ (equivalently P) at a singular edge: the one-form lattice in
/// the transverse components and nγ in the dy component.
pub fn roots_edge(angle: f64, window: Window) -> Result<IndicialReport> {
    let gamma = gamma_of(angle)?;
    let crit = critical_window(2)?;
    let roots = if window.is_empty() {
        Vec::new()
    } else {
        let mut c = oneform_candidates(gamma, window);
        c.extend(scalar_candidates(gamma, window, Polarization::Dy));
        collect(c, window, crit, Some(gamma))
    };
    Ok(finish(OperatorTag::RoughLaplacian, LocusTag::Edge, Some(angle), window, crit, roots))
}

/// √(1 + 4λ).
fn s_of(lambda: f64) -> f64 {
    (1.0 + 4.0 * lambda).sqrt()
}

/// Exponent and (ψ dr, r φ′) coefficients of the closed group-A solution η⁺.
pub fn eta_plus(lambda: f64) -> (f64, f64, f64) {
    let s = s_of(lambda);
    (-1.5 + 0.5 * s, 2.0 * lambda.sqrt(), 1.0 + s)
}

/// (a + 1)(1 + s) − 2λ with a the group-A exponent; zero exactly when dη⁺ = 0.
pub fn eta_plus_closedness_defect(lambda: f64) -> f64 {
    let (a, _, _) = eta_plus(lambda);
    (a + 1.0) * (1.0 + s_of(lambda)) - 2.0 * lambda
}

fn check_link_spectrum(spectrum: &[f64]) -> Result<EigenvalueList> {
    if spectrum.first() != Some(&0.0) {
        return Err(Error::Precondition("link spectrum must start with the eigenvalue 0".into()));
    }
    for &l in &spectrum[1..] {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::Precondition(format!("link eigenvalue {l} is not a nonnegative number")));
        }
        if l <= 1.0 {
            return Err(Error::Precondition(format!(
                "link eigenvalue {l} violates the spectral gap: nonzero eigenvalues of a spherical cone-surface with angles below 2π exceed 1"
            )));
        }
    }
    let text: String = spectrum.iter().map(|l| format!("{l:?} 1\n")).collect();
    let mut list = EigenvalueList::parse_text(&text)?;
    // Merge repeated entries into multiplicities.
    list.entries.dedup_by(|b, a| {
        if (a.lambda - b.lambda).abs() <= DEDUP_TOL * a.lambda.max(1.0) {
            a.multiplicity += b.multiplicity;
            true
        } else {
            false
        }
    });
    Ok(list)
}

/// Roots of ∇*∇ at a singular vertex whose link has scalar spectrum `link_spectrum`
/// (first entry 0, the rest listed with repetition).
pub fn roots_vertex(link_spectrum: &[f64]) -> Result<IndicialReport> {
    let scalar = check_link_spectrum(link_spectrum)?;
    let crit = critical_window(3)?;
    let mut cands = Vec::new();
    for _ in 0..scalar.entries[0].multiplicity {
        cands.push((1.0, ModeLabel::link(0.0, Polarization::RadialLambda0)));
        cands.push((-2.0, ModeLabel::link(0.0, Polarization::RadialLambda0)));
    }
    // Each nonzero one-form eigenvalue carries one exact and one coexact form per
    // scalar eigenfunction; the exact half is the φ′ in the coupled system.
    for e in scalar_to_oneform_spectrum(&scalar).entries {
        let (l, s) = (e.lambda, s_of(e.lambda));
        for _ in 0..e.multiplicity / 2 {
            cands.push((-0.5 + 0.5 * s, ModeLabel::link(l, Polarization::Coexact)));
            cands.push((-0.5 - 0.5 * s, ModeLabel::link(l, Polarization::Coexact)));
            cands.push((-1.5 + 0.5 * s, ModeLabel::link(l, Polarization::CoupledA)));
            cands.push((-1.5 - 0.5 * s, ModeLabel::link(l, Polarization::CoupledA)));
            cands.push((0.5 + 0.5 * s, ModeLabel::link(l, Polarization::CoupledB)));
            cands.push((0.5 - 0.5 * s, ModeLabel::link(l, Polarization::CoupledB)));
        }
    }
    let window = Window::new(f64::NEG_INFINITY, f64::INFINITY);
    let roots = collect(cands, window, crit, None);
    Ok(finish(OperatorTag::RoughLaplacian, LocusTag::Vertex, None, window, crit, roots))
}

/// Group-A and group-B critical roots of a vertex report.
pub fn vertex_groups(report: &IndicialReport) -> (Vec<f64>, Vec<f64>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for r in report.roots.iter().filter(|r| r.critical) {
        if r.modes.iter().any(|m| m.polarization == Polarization::CoupledA) && r.value > -0.5 {
            a.push(r.value);
        }
        if r.modes.iter().any(|m| m.polarization == Polarization::CoupledB) && r.value < -0.5 {
            b.push(r.value);
        }
    }
    (a, b)
}

fn decide(locus: LocusTag, value: f64, mode: &ModeLabel, root: &IndicialRoot, opts: FilterOptions) -> (bool, String) {
    if root.endpoint && !opts.include_endpoints {
        return (false, "inclusive end of the critical window; left out of the critical list".into());
    }
    if mode.log {
        return (false, "log partner: a log term is not allowed".into());
    }
    match locus {
        LocusTag::Vertex => {
            if value > -0.5 {
                let what = if mode.polarization == Polarization::CoupledA { "group A (closed η⁺ mode)" } else { "bounded gradient" };
                (true, format!("{what}: ∇η ∈ L²"))
            } else {
                (false, "blows up faster than r^{-1/2}: ∇η ∉ L²".into())
            }
        }
        _ => {
            if value > DEDUP_TOL {
                (true, "positive exponent: ∇η ∈ L²".into())
            } else if value.abs() <= DEDUP_TOL {
                (true, "constant coefficient, no log term".into())
            } else {
                let note = match mode.polarization {
                    Polarization::EtaPP | Polarization::EtaMM => "1 − γ polarization: dη ∉ L², so ∇η ∉ L²",
                    _ => "negative exponent: ∇η ∉ L²",
                };
                (false, note.into())
            }
        }
    }
}

fn classify(report: &mut IndicialReport, opts: FilterOptions) {
    report.friedrichs_allowed.clear();
    report.friedrichs_excluded.clear();
    for root in report.roots.iter().filter(|r| r.critical) {
        let mut allowed: Vec<(ModeLabel, String)> = Vec::new();
        let mut excluded: Vec<(ModeLabel, String)> = Vec::new();
        for m in &root.modes {
            let (ok, note) = decide(report.locus, root.value, m, root, opts);
            if ok {
                allowed.push((*m, note));
            } else {
                excluded.push((*m, note));
            }
        }
        for (list, target) in [(allowed, &mut report.friedrichs_allowed), (excluded, &mut report.friedrichs_excluded)] {
            if let Some((_, note)) = list.first() {
                target.push(FriedrichsNote { value: root.value, modes: list.iter().map(|(m, _)| *m).collect(), note: note.clone() });
            }
        }
    }
}

/// The Friedrichs-allowed part of a report, as a report of its own.
pub fn friedrichs_filter(report: &IndicialReport) -> IndicialReport {
    friedrichs_filter_with(report, FilterOptions::default())
}

pub fn friedrichs_filter_with(report: &IndicialReport, opts: FilterOptions) -> IndicialReport {
    let mut full = report.clone();
    classify(&mut full, opts);
    let roots = full
        .friedrichs_allowed
        .iter()
        .map(|n| {
            let orig = report.roots.iter().find(|r| r.value == n.value).expect("allowed roots come from the report");
            IndicialRoot {
                value: n.value,
                multiplicity: n.modes.len(),
                has_log_partner: false,
                modes: n.modes.clone(),
                critical: true,
                endpoint: orig.endpoint,
                gamma_pair: orig.gamma_pair,
            }
        })
        .collect();
    let mut out = IndicialReport { roots, ..full };
    classify(&mut out, opts);
    out
}

/// The locus and its data for [`mode_residual`].
#[derive(Clone, Debug, PartialEq)]
pub enum ResidualLocus {
    ConeScalar { angle: f64 },
    ConeOneform { angle: f64 },
    Edge { angle: f64 },
    Vertex,
}

type D2 = Dual<Dual<f64>>;

/// Value, r∂r and (r∂r)² of r^μ (log r)^k at r.
fn radial_jet(mu: f64, log: bool, r: f64) -> (f64, f64, f64) {
    let (v, d1, d2) = second_derivative(
        |x: D2| {
            let p = x.powf(mu);
            if log {
                p * x.ln()
            } else {
                p
            }
        },
        r,
    );
    (v, r * d1, r * d1 + r * r * d2)
}

const RESIDUAL_GRID: usize = 41;

fn radial_grid() -> impl Iterator<Item = f64> {
    (0..RESIDUAL_GRID).map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / (RESIDUAL_GRID - 1) as f64))
}

/// Sup over a radial grid of |r² I(η)| / ((1 + μ² + ν²)|η|) for η = r^μ·(mode):
/// zero to rounding exactly when μ is an indicial root carried by the mode.
pub fn mode_residual(locus: &ResidualLocus, root: f64, mode: &ModeLabel) -> Result<f64> {
    let mut worst = 0.0f64;
    let i = Complex64::i();
    match locus {
        ResidualLocus::ConeScalar { angle } | ResidualLocus::ConeOneform { angle } | ResidualLocus::Edge { angle } => {
            let gamma = gamma_of(*angle)?;
            let ModeIndex::Fourier(n) = mode.index else {
                return Err(Error::Input("cone and edge modes carry a Fourier index".into()));
            };
            let ng = n as f64 * gamma;
            let scale = 1.0 + root * root + ng * ng;
            let pol = match (locus, mode.polarization) {
                (ResidualLocus::ConeScalar { .. }, Polarization::Scalar) => None,
                (ResidualLocus::Edge { .. }, Polarization::Dy) => None,
                (ResidualLocus::ConeOneform { .. } | ResidualLocus::Edge { .. }, Polarization::EtaPP | Polarization::EtaPM) => Some(-i),
                (ResidualLocus::ConeOneform { .. } | ResidualLocus::Edge { .. }, Polarization::EtaMP | Polarization::EtaMM) => Some(i),
                _ => return Err(Error::Input(format!("mode {:?} does not live at this locus", mode.polarization))),
            };
            for r in radial_grid() {
                let (v, _, dd) = radial_jet(root, mode.log, r);
                let res = match pol {
                    // −(r∂r)² − ∂θ² on the scalar (or dy) component.
                    None => ((-dd + ng * ng * v) / (scale * v.abs())).abs(),
                    Some(p) => {
                        // (f, g) = φ(r)(1, p); ∂θ acts as inγ.
                        let f = Complex64::from(v);
                        let g = p * v;
                        let lap = |c: Complex64| c * (ng * ng + 1.0) - Complex64::from(dd) * (c / Complex64::from(v));
                        let rf = lap(f) + 2.0 * i * ng * g;
                        let rg = lap(g) - 2.0 * i * ng * f;
                        (rf.norm_sqr() + rg.norm_sqr()).sqrt() / (scale * (f.norm_sqr() + g.norm_sqr()).sqrt())
                    }
                };
                worst = worst.max(res);
            }
        }
        ResidualLocus::Vertex => {
            let ModeIndex::Link(l) = mode.index else {
                return Err(Error::Input("vertex modes carry a link eigenvalue".into()));
            };
            let scale = 1.0 + root * root + l;
            let (a, b) = match mode.polarization {
                Polarization::RadialLambda0 => (1.0, 0.0),
                Polarization::Coexact => (0.0, 1.0),
                Polarization::CoupledA | Polarization::CoupledB => {
                    // Null vector of the first row of the coupled system at μ.
                    (2.0 * l.sqrt(), -(root * root + root - 2.0 - l))
                }
                _ => return Err(Error::Input(format!("mode {:?} does not live at a vertex", mode.polarization))),
            };
            for r in radial_grid() {
                let (v, d, dd) = radial_jet(root, mode.log, r);
                let op = |k: f64| -dd - d + k * v;
                let (rf, rs) = match mode.polarization {
                    Polarization::RadialLambda0 => (op(2.0), 0.0),
                    Polarization::Coexact => (0.0, op(l)),
                    _ => (a * op(2.0 + l) - 2.0 * l.sqrt() * b * v, b * op(l) - 2.0 * l.sqrt() * a * v),
                };
                worst = worst.max(rf.hypot(rs) / (scale * a.hypot(b) * v.abs()));
            }
        }
    }
    Ok(worst)
}

/// Checks every mode of every root in a report; returns the largest residual.
pub fn report_residual(report: &IndicialReport) -> Result<f64> {
    let locus = match (report.locus, report.operator, report.angle) {
        (LocusTag::ConePoint, OperatorTag::Laplacian0, Some(angle)) => ResidualLocus::ConeScalar { angle },
        (LocusTag::ConePoint, OperatorTag::Laplacian1, Some(angle)) => ResidualLocus::ConeOneform { angle },
        (LocusTag::Edge, _, Some(angle)) => ResidualLocus::Edge { angle },
        (LocusTag::Vertex, _, _) => ResidualLocus::Vertex,
        _ => return Err(Error::Input("report lacks the data needed for residuals".into())),
    };
    let mut worst = 0.0f64;
    for r in &report.roots {
        for m in &r.modes {
            worst = worst.max(mode_residual(&locus, r.value, m)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crit2() -> Window {
        critical_window(2).unwrap().into()
    }

    #[test]
    fn windows() {
        let w2 = critical_window(2).unwrap();
        assert_eq!((w2.lo, w2.hi, w2.measure_exponent), (-1.0, 1.0, 1));
        let w3 = critical_window(3).unwrap();
        assert_eq!((w3.lo, w3.hi), (-1.5, 0.5));
        assert!(!w2.l2_member(-1.0));
        assert!(w2.l2_member(-0.99));
        assert!(matches!(critical_window(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn cone_scalar_examples() {
        let r = roots_cone_scalar(PI, Window::new(-1.0, 1.0)).unwrap();
        assert_eq!(r.values(), vec![0.0]);
        assert_eq!(r.roots[0].multiplicity, 2);
        assert!(r.roots[0].has_log_partner);

        let r = roots_cone_scalar(1.5 * PI, Window::new(-4.0, 4.0)).unwrap();
        let expect = [-8.0 / 3.0, -4.0 / 3.0, 0.0, 4.0 / 3.0, 8.0 / 3.0, 4.0];
        assert_eq!(r.roots.len(), expect.len());
        for (a, b) in r.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(report_residual(&r).unwrap() <= 1e-9);

        let r = roots_cone_scalar(1.0, Window::new(0.5, 0.5)).unwrap();
        assert!(r.roots.is_empty());
    }

    #[test]
    fn cone_oneform_critical_pair() {
        let r = roots_cone_oneform(1.5 * PI, crit2()).unwrap();
        let neg = r.root(-1.0 / 3.0).unwrap();
        assert!(neg.gamma_pair);
        assert!(neg.modes.contains(&ModeLabel::fourier(-1, Polarization::EtaPP)));
        assert!(neg.modes.contains(&ModeLabel::fourier(1, Polarization::EtaMM)));
        let pos = r.root(1.0 / 3.0).unwrap();
        assert!(pos.modes.contains(&ModeLabel::fourier(1, Polarization::EtaMP)));
        assert!(pos.modes.contains(&ModeLabel::fourier(-1, Polarization::EtaPM)));
        let one = r.root(1.0).unwrap();
        assert!(one.endpoint);
        assert!(report_residual(&r).unwrap() <= 1e-9);

        let r = roots_cone_oneform(PI / 2.0, crit2()).unwrap();
        assert!(r.roots.iter().all(|x| !x.gamma_pair));
    }

    #[test]
    fn oneform_pair_collapses_near_full_angle() {
        let r = roots_cone_oneform(2.0 * PI - 1e-6, crit2()).unwrap();
        let pair: Vec<f64> = r.roots.iter().filter(|x| x.gamma_pair).map(|x| x.value).collect();
        assert_eq!(pair.len(), 2);
        assert!(pair.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn edge_roots() {
        let r = roots_edge(1.5 * PI, crit2()).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 4);
        assert!((v[0] + 1.0 / 3.0).abs() < 1e-15 && v[1] == 0.0 && (v[2] - 1.0 / 3.0).abs() < 1e-15 && v[3] == 1.0);
        let zero = r.root(0.0).unwrap();
        assert_eq!(zero.multiplicity, 2);
        assert!(zero.has_log_partner);
        assert!(r.root(1.0).unwrap().endpoint);

        let r = roots_edge(2.0 * PI / 3.0, crit2()).unwrap();
        let inner: Vec<f64> = r.roots.iter().filter(|x| !x.endpoint).map(|x| x.value).collect();
        assert_eq!(inner, vec![0.0]);

        let r = roots_edge(PI, Window::new(-3.5, 3.5)).unwrap();
        let v: Vec<f64> = r.values();
        assert_eq!(v, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(report_residual(&r).unwrap() <= 1e-9);
    }

    #[test]
    fn edge_friedrichs() {
        let r = roots_edge(1.5 * PI, crit2()).unwrap();
        let f = friedrichs_filter(&r);
        assert_eq!(f.values().len(), 2);
        let zero = f.root(0.0).unwrap();
        assert_eq!(zero.modes, vec![ModeLabel::fourier(0, Polarization::Dy)]);
        let third = f.root(1.0 / 3.0).unwrap();
        assert_eq!(third.multiplicity, 2);
        let with_end = friedrichs_filter_with(&r, FilterOptions { include_endpoints: true });
        assert_eq!(with_end.roots.len(), 3);
    }

    #[test]
    fn vertex_examples() {
        let r = roots_vertex(&[0.0, 2.0]).unwrap();
        let (a, b) = vertex_groups(&r);
        assert_eq!(a, vec![0.0]);
        assert_eq!(b, vec![-1.0]);
        let coexact: Vec<f64> = r
            .roots
            .iter()
            .filter(|x| x.modes.iter().any(|m| m.polarization == Polarization::Coexact))
            .map(|x| x.value)
            .collect();
        assert_eq!(coexact, vec![-2.0, 1.0]);
        let f = friedrichs_filter(&r);
        assert_eq!(f.values(), vec![0.0]);
        assert_eq!(r.friedrichs_excluded.iter().map(|n| n.value).collect::<Vec<_>>(), vec![-1.0]);
        assert!(report_residual(&r).unwrap() <= 1e-9);

        let r = roots_vertex(&[0.0, 3.9]).unwrap();
        let (a, b) = vertex_groups(&r);
        assert!(a.is_empty() && b.is_empty());

        let r = roots_vertex(&[0.0, 2.75]).unwrap();
        let (a, b) = vertex_groups(&r);
        assert!((a[0] - 0.232_050_807_568_877_3).abs() < 1e-15);
        assert!((b[0] + 1.232_050_807_568_877_3).abs() < 1e-15);
    }

    #[test]
    fn vertex_preconditions() {
        assert!(matches!(roots_vertex(&[0.0, 0.8]), Err(Error::Precondition(_))));
        assert!(matches!(roots_vertex(&[2.0]), Err(Error::Precondition(_))));
        let r = roots_vertex(&[0.0, 3.75]).unwrap();
        let half = r.root(0.5).unwrap();
        assert!(half.endpoint);
        assert!(friedrichs_filter(&r).roots.is_empty());
    }

    #[test]
    fn eta_plus_residual_and_closedness() {
        let m = ModeLabel::link(2.0, Polarization::CoupledA);
        assert!(mode_residual(&ResidualLocus::Vertex, 0.0, &m).unwrap() <= 1e-9);
        let (mu, a, b) = eta_plus(2.0);
        assert_eq!((mu, a, b), (0.0, 2.0 * 2f64.sqrt(), 4.0));
        for l in [1.01, 2.0, 3.3, 10.0, 100.0] {
            assert!(eta_plus_closedness_defect(l).abs() <= 1e-12 * l.max(1.0));
        }
    }

    #[test]
    fn residual_separates_non_roots() {
        let loc = ResidualLocus::ConeScalar { angle: PI };
        let m = ModeLabel::fourier(1, Polarization::Scalar);
        assert!(mode_residual(&loc, 2.0, &m).unwrap() <= 1e-10);
        assert!(mode_residual(&loc, 1.9, &m).unwrap() > 0.01);
    }
}
