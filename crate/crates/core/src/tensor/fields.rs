//! Seeded random test fields and sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::engine::{Field, Point};
use crate::geom::{ChartKind, ModelChart};

/// a₀ + Σ_m a_m Π_{i ∈ m} cos(x_i + φ_{m,i}) over the nonempty subsets m of
/// the three coordinates: a trigonometric polynomial of degree ≤ 3.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    constant: f64,
    terms: Vec<(f64, [bool; 3], [f64; 3])>,
}

impl TrigPoly {
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut terms = Vec::new();
        for mask in 1u8..8 {
            let sel = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
            let phase = [rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)];
            terms.push((rng.random_range(-1.0..1.0) / 3.0, sel, phase));
        }
        TrigPoly { constant: rng.random_range(-1.0..1.0), terms }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let mut s = self.constant;
        for (a, sel, ph) in &self.terms {
            let mut p = *a;
            for i in 0..3 {
                if sel[i] {
                    p *= (x[i] + ph[i]).cos();
                }
            }
            s += p;
        }
        s
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar(rng: &mut impl Rng) -> Field<f64> {
    let p = TrigPoly::random(rng);
    Field::new(0, move |x| vec![p.eval(x)])
}

pub fn random_oneform(rng: &mut impl Rng) -> Field<f64> {
    let ps: Vec<TrigPoly> = (0..3).map(|_| TrigPoly::random(rng)).collect();
    Field::new(1, move |x| ps.iter().map(|p| p.eval(x)).collect())
}

pub fn random_symmetric(rng: &mut impl Rng) -> Field<f64> {
    let ps: Vec<TrigPoly> = (0..6).map(|_| TrigPoly::random(rng)).collect();
    Field::new(2, move |x| {
        let v: Vec<f64> = ps.iter().map(|p| p.eval(x)).collect();
        vec![v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5]]
    })
}

/// Trace-free part of a symmetric field with respect to `metric`.
pub fn trace_free(k: &Field<f64>, metric: impl Fn(&Point) -> [[f64; 3]; 3] + Send + Sync + 'static) -> Field<f64> {
    let k = k.clone();
    Field::new(2, move |x| {
        let g = metric(x);
        let gi = super::engine::inverse3(&g);
        let v = k.at(x);
        let tr: f64 = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| gi[a][b] * v[3 * a + b]).sum();
        (0..9).map(|i| v[i] - tr / 3.0 * g[i / 3][i % 3]).collect()
    })
}

/// Interior points well away from the singular locus and the chart boundary.
pub fn sample_points(chart: &ModelChart, n: usize, rng: &mut impl Rng) -> Vec<Point> {
    let angle = chart.angle.unwrap_or(2.0 * PI);
    let span = |lo: f64, hi: f64, r: &mut dyn FnMut() -> f64| lo + (hi - lo) * r();
    let mut unit = || rng.random::<f64>();
    (0..n)
        .map(|_| match chart.kind {
            ChartKind::EdgeNeighborhood => {
                [span(0.5, 1.0, &mut unit), span(0.2 * angle, 0.8 * angle, &mut unit), span(-1.0, 1.0, &mut unit)]
            }
            ChartKind::VertexCone => {
                [span(0.5, 1.0, &mut unit), span(0.8, 2.3, &mut unit), span(0.2 * angle, 0.8 * angle, &mut unit)]
            }
            ChartKind::SpaceFormBox => {
                let w = 0.4 * chart.bounds[0].hi.min(1.0);
                [span(-w, w, &mut unit), span(-w, w, &mut unit), span(-w, w, &mut unit)]
            }
        })
        .collect()
}
