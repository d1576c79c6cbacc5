//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-12, atol: 1e-14, max_steps: 200_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates y' = f(t, y) from `t0` to `t1` (either direction) and returns y(t1).
pub fn integrate<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * (span.abs() * 1e-3).max(1e-8);
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);

    for _ in 0..tol.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                ys[i] += h * acc;
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("integration blew up near t = {t:.6e} (step {h:.3e})")));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            // FSAL: last stage is the derivative at the new point.
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Numeric(format!("step size underflow at t = {t:.6e}")));
        }
    }
    Err(Error::Numeric(format!("step budget of {} exhausted at t = {t:.6e}", tol.max_steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let y = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0, Tolerance::default()).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn backwards_integration() {
        let y = integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], -1.0, Tolerance::default()).unwrap();
        assert!((y[0] - (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn blow_up_is_reported() {
        let r = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, Tolerance::default());
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
