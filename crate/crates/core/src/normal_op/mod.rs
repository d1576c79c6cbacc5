//! Edge normal-operator analysis: Bessel functions, Fourier-mode solutions,
//! weighted membership and the no-log Green solve.

pub mod bessel;
pub mod green;
pub mod modes;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_ik, bessel_ik_scaled, bessel_k, bessel_k_scaled, BesselPair};
pub use green::{gaussian_bump, green_apply, GreenRecord, GreenSolution, RadialGrid};
pub use modes::{edge_mode_basis, injectivity_scan, weighted_membership, EdgeModeSolution, Radial, ScanTable};
