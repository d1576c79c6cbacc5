//! Finite-difference tensor calculus in coordinates.
//!
//! Fields are closures returning covariant coordinate components, flattened
//! with the first index slowest. Every derivative is a central difference of
//! step `h` (second or fourth order), so composed operators nest stencils. The scalar
//! type is generic: with `Dual<f64>` a metric g + εk is differentiated in ε
//! exactly while the spatial derivatives stay finite differences.

use std::sync::Arc;

use crate::dual::{Dual, Real};

pub type Point = [f64; 3];
pub type Mat<T> = [[T; 3]; 3];

/// Flat offset of a multi-index.
pub fn flat(ix: &[usize]) -> usize {
    ix.iter().fold(0, |a, &i| 3 * a + i)
}

fn unflat(mut k: usize, rank: usize) -> Vec<usize> {
    let mut ix = vec![0; rank];
    for slot in ix.iter_mut().rev() {
        *slot = k % 3;
        k /= 3;
    }
    ix
}

type FieldFn<T> = Arc<dyn Fn(&Point) -> Vec<T> + Send + Sync>;

/// A covariant tensor field of rank `rank`.
#[derive(Clone)]
pub struct Field<T> {
    rank: usize,
    f: FieldFn<T>,
}

impl<T: Real + 'static> Field<T> {
    pub fn new(rank: usize, f: impl Fn(&Point) -> Vec<T> + Send + Sync + 'static) -> Self {
        Field { rank, f: Arc::new(f) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn at(&self, x: &Point) -> Vec<T> {
        let v = (self.f)(x);
        debug_assert_eq!(v.len(), 3usize.pow(self.rank as u32));
        v
    }

    pub fn zero(rank: usize) -> Self {
        Field::new(rank, move |_| vec![T::zero(); 3usize.pow(rank as u32)])
    }

    fn zip(&self, o: &Field<T>, op: fn(T, T) -> T) -> Self {
        assert_eq!(self.rank, o.rank, "rank mismatch");
        let (a, b) = (self.clone(), o.clone());
        Field::new(self.rank, move |x| a.at(x).into_iter().zip(b.at(x)).map(|(p, q)| op(p, q)).collect())
    }

    pub fn add(&self, o: &Field<T>) -> Self {
        self.zip(o, |p, q| p + q)
    }

    pub fn sub(&self, o: &Field<T>) -> Self {
        self.zip(o, |p, q| p - q)
    }

    pub fn scale(&self, s: f64) -> Self {
        let a = self.clone();
        Field::new(self.rank, move |x| a.at(x).into_iter().map(|v| v.scale(s)).collect())
    }

    /// Symmetrisation of a rank-2 field.
    pub fn sym(&self) -> Self {
        assert_eq!(self.rank, 2);
        let a = self.clone();
        Field::new(2, move |x| {
            let v = a.at(x);
            let mut out = v.clone();
            for i in 0..3 {
                for j in 0..3 {
                    out[3 * i + j] = (v[3 * i + j] + v[3 * j + i]).scale(0.5);
                }
            }
            out
        })
    }
}

impl Field<f64> {
    /// The same field with constant dual parts.
    pub fn lift<T: Real + 'static>(&self) -> Field<T> {
        let a = self.clone();
        Field::new(self.rank, move |x| a.at(x).into_iter().map(T::cst).collect())
    }
}

type MetricFn<T> = Arc<dyn Fn(&Point) -> Mat<T> + Send + Sync>;

/// Central-difference stencil for first derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stencil {
    /// Three points, error O(h²).
    Second,
    /// Five points, error O(h⁴).
    #[default]
    Fourth,
}

impl Stencil {
    /// (offset in units of h, weight in units of 1/h).
    pub fn taps(self) -> &'static [(f64, f64)] {
        match self {
            Stencil::Second => &[(1.0, 0.5), (-1.0, -0.5)],
            Stencil::Fourth => &[(2.0, -1.0 / 12.0), (1.0, 8.0 / 12.0), (-1.0, -8.0 / 12.0), (-2.0, 1.0 / 12.0)],
        }
    }

    /// Farthest offset in units of h.
    pub fn reach(self) -> f64 {
        match self {
            Stencil::Second => 1.0,
            Stencil::Fourth => 2.0,
        }
    }

    pub fn order(self) -> f64 {
        match self {
            Stencil::Second => 2.0,
            Stencil::Fourth => 4.0,
        }
    }
}

/// A metric in coordinates with the finite-difference step and the
/// sectional curvature used by constant-curvature formulas.
#[derive(Clone)]
pub struct Geometry<T> {
    metric: MetricFn<T>,
    pub h: f64,
    pub kappa: f64,
    pub stencil: Stencil,
}

fn shift(x: &Point, a: usize, s: f64) -> Point {
    let mut y = *x;
    y[a] += s;
    y
}

impl<T: Real + 'static> Geometry<T> {
    pub fn new(metric: impl Fn(&Point) -> Mat<T> + Send + Sync + 'static, h: f64, kappa: f64) -> Self {
        Geometry { metric: Arc::new(metric), h, kappa, stencil: Stencil::default() }
    }

    pub fn with_step(&self, h: f64) -> Self {
        Geometry { h, ..self.clone() }
    }

    pub fn with_stencil(&self, stencil: Stencil) -> Self {
        Geometry { stencil, ..self.clone() }
    }

    /// ∂_a of every component of `f` at `x`.
    fn partial<V: AsRef<[T]>>(&self, f: impl Fn(&Point) -> V, x: &Point, a: usize) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for &(s, w) in self.stencil.taps() {
            let v = f(&shift(x, a, s * self.h));
            let v = v.as_ref();
            if out.is_empty() {
                out = vec![T::zero(); v.len()];
            }
            for (o, c) in out.iter_mut().zip(v) {
                *o += c.scale(w / self.h);
            }
        }
        out
    }

    pub fn metric(&self, x: &Point) -> Mat<T> {
        (self.metric)(x)
    }

    pub fn inverse(&self, x: &Point) -> Mat<T> {
        inverse3(&self.metric(x))
    }

    /// dg[a][b][c] = ∂_a g_bc.
    pub fn metric_derivative(&self, x: &Point) -> [Mat<T>; 3] {
        let mut out = [[[T::zero(); 3]; 3]; 3];
        for (a, slab) in out.iter_mut().enumerate() {
            let d = self.partial(|y| mat_to_vec(&self.metric(y)), x, a);
            *slab = vec_to_mat(&d);
        }
        out
    }

    /// Γ[k][i][j] = Γ^k_ij.
    pub fn christoffel(&self, x: &Point) -> [Mat<T>; 3] {
        let gi = self.inverse(x);
        let dg = self.metric_derivative(x);
        let mut out = [[[T::zero(); 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = T::zero();
                    for l in 0..3 {
                        s += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                    }
                    out[k][i][j] = s.scale(0.5);
                }
            }
        }
        out
    }

    /// r[l][i][j][k] = R^l_ijk, with R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l.
    pub fn riemann(&self, x: &Point) -> [[Mat<T>; 3]; 3] {
        let gam = self.christoffel(x);
        let mut dgam = [[[[T::zero(); 3]; 3]; 3]; 3];
        for a in 0..3 {
            let d = self.partial(|y| self.christoffel(y).iter().flatten().flatten().copied().collect::<Vec<T>>(), x, a);
            for l in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        dgam[a][l][j][k] = d[flat(&[l, j, k])];
                    }
                }
            }
        }
        let mut r = [[[[T::zero(); 3]; 3]; 3]; 3];
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let mut s = dgam[i][l][j][k] - dgam[j][l][i][k];
                        for m in 0..3 {
                            s += gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k];
                        }
                        r[l][i][j][k] = s;
                    }
                }
            }
        }
        r
    }

    /// R_ijkl = g(R(∂_i, ∂_j)∂_l, ∂_k), flattened; κ(g_ik g_jl − g_il g_jk) at constant curvature.
    pub fn curvature_tensor(&self, x: &Point) -> Vec<T> {
        let g = self.metric(x);
        let r = self.riemann(x);
        let mut out = vec![T::zero(); 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut s = T::zero();
                        for m in 0..3 {
                            s += g[k][m] * r[m][i][j][l];
                        }
                        out[flat(&[i, j, k, l])] = s;
                    }
                }
            }
        }
        out
    }

    /// Ric_jk = R^i_ijk.
    pub fn ricci(&self, x: &Point) -> Mat<T> {
        let r = self.riemann(x);
        let mut out = [[T::zero(); 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    out[j][k] += r[i][i][j][k];
                }
            }
        }
        out
    }

    pub fn metric_field(&self) -> Field<T> {
        let geo = self.clone();
        Field::new(2, move |x| mat_to_vec(&geo.metric(x)))
    }

    pub fn ricci_field(&self) -> Field<T> {
        let geo = self.clone();
        Field::new(2, move |x| mat_to_vec(&geo.ricci(x)))
    }

    /// (∇F)_{a i…} = ∂_a F_{i…} − Σ Γ^m_{a i_s} F_{…m…}.
    pub fn nabla(&self, f: &Field<T>) -> Field<T> {
        let geo = self.clone();
        let f = f.clone();
        let rank = f.rank();
        Field::new(rank + 1, move |x| {
            let n = 3usize.pow(rank as u32);
            let gam = geo.christoffel(x);
            let v = f.at(x);
            let mut out = vec![T::zero(); 3 * n];
            for a in 0..3 {
                let d = geo.partial(|y| f.at(y), x, a);
                for k in 0..n {
                    let mut s = d[k];
                    let ix = unflat(k, rank);
                    for slot in 0..rank {
                        let mut jx = ix.clone();
                        for mm in 0..3 {
                            jx[slot] = mm;
                            s -= gam[mm][a][ix[slot]] * v[flat(&jx)];
                        }
                    }
                    out[a * n + k] = s;
                }
            }
            out
        })
    }

    /// Contraction of the first two indices with g⁻¹.
    pub fn trace12(&self, f: &Field<T>) -> Field<T> {
        assert!(f.rank() >= 2);
        let geo = self.clone();
        let f = f.clone();
        let rest = f.rank() - 2;
        Field::new(rest, move |x| {
            let gi = geo.inverse(x);
            let v = f.at(x);
            let n = 3usize.pow(rest as u32);
            let mut out = vec![T::zero(); n];
            for a in 0..3 {
                for b in 0..3 {
                    for k in 0..n {
                        out[k] += gi[a][b] * v[(3 * a + b) * n + k];
                    }
                }
            }
            out
        })
    }

    /// (δF)_{…} = −g^{ab} ∇_a F_{b…}.
    pub fn divergence(&self, f: &Field<T>) -> Field<T> {
        self.trace12(&self.nabla(f)).scale(-1.0)
    }

    /// ∇*∇F = −g^{ab} ∇_a ∇_b F.
    pub fn rough_laplacian(&self, f: &Field<T>) -> Field<T> {
        self.trace12(&self.nabla(&self.nabla(f))).scale(-1.0)
    }

    /// Exterior derivative of a one-form, (dω)_ij = ∇_i ω_j − ∇_j ω_i.
    pub fn d1(&self, w: &Field<T>) -> Field<T> {
        assert_eq!(w.rank(), 1);
        let nw = self.nabla(w);
        Field::new(2, move |x| {
            let v = nw.at(x);
            let mut out = v.clone();
            for i in 0..3 {
                for j in 0..3 {
                    out[3 * i + j] = v[3 * i + j] - v[3 * j + i];
                }
            }
            out
        })
    }

    /// δ*ω = ½(∇ω + ∇ωᵀ).
    pub fn delta_star(&self, w: &Field<T>) -> Field<T> {
        self.nabla(w).sym()
    }

    /// tr_g of a rank-2 field.
    pub fn trace(&self, k: &Field<T>) -> Field<T> {
        self.trace12(k)
    }

    /// B(k) = δk + ½ d tr k.
    pub fn bianchi(&self, k: &Field<T>) -> Field<T> {
        self.divergence(k).add(&self.nabla(&self.trace(k)).scale(0.5))
    }

    /// (Ric ω)_j = Ric_j^m ω_m.
    pub fn ric_apply(&self, w: &Field<T>) -> Field<T> {
        let geo = self.clone();
        let w = w.clone();
        Field::new(1, move |x| {
            let ric = geo.ricci(x);
            let gi = geo.inverse(x);
            let v = w.at(x);
            (0..3)
                .map(|j| {
                    let mut s = T::zero();
                    for a in 0..3 {
                        for m in 0..3 {
                            s += ric[j][a] * gi[a][m] * v[m];
                        }
                    }
                    s
                })
                .collect()
        })
    }

    /// P = ∇*∇ − Ric on one-forms.
    pub fn p_apply(&self, w: &Field<T>) -> Field<T> {
        self.rough_laplacian(w).sub(&self.ric_apply(w))
    }

    /// L k = ∇*∇k − 2R̊k + Ric∘k + k∘Ric − 2(n − 1)κk with curvatures from the metric.
    pub fn l_apply(&self, k: &Field<T>) -> Field<T> {
        let geo = self.clone();
        let kf = k.clone();
        let zeroth = Field::new(2, move |x| {
            let g = geo.metric(x);
            let gi = inverse3(&g);
            let rm = geo.curvature_tensor(x);
            let ric = geo.ricci(x);
            let kl = vec_to_mat(&kf.at(x));
            let ku = raise2(&gi, &kl);
            let mut out = vec![T::zero(); 9];
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = kl[i][j].scale(-4.0 * geo.kappa);
                    for p in 0..3 {
                        for q in 0..3 {
                            s -= (rm[flat(&[i, p, j, q])] * ku[p][q]).scale(2.0);
                            // Ric_i^p k_pj + k_i^p Ric_pj
                            s += ric[i][p] * gi[p][q] * kl[q][j] + kl[i][p] * gi[p][q] * ric[q][j];
                        }
                    }
                    out[3 * i + j] = s;
                }
            }
            out
        });
        self.rough_laplacian(k).add(&zeroth)
    }

    /// The constant-curvature display ∇*∇k − 2κ(k − tr(k)g).
    pub fn l_display_apply(&self, k: &Field<T>) -> Field<T> {
        let geo = self.clone();
        let kf = k.clone();
        let kappa = self.kappa;
        let zeroth = Field::new(2, move |x| {
            let g = geo.metric(x);
            let gi = inverse3(&g);
            let kl = kf.at(x);
            let mut tr = T::zero();
            for a in 0..3 {
                for b in 0..3 {
                    tr += gi[a][b] * kl[3 * a + b];
                }
            }
            let mut out = vec![T::zero(); 9];
            for i in 0..3 {
                for j in 0..3 {
                    out[3 * i + j] = (kl[3 * i + j] - tr * g[i][j]).scale(-2.0 * kappa);
                }
            }
            out
        });
        self.rough_laplacian(k).add(&zeroth)
    }

    /// DE = ½L − δ*B.
    pub fn de_apply(&self, k: &Field<T>) -> Field<T> {
        self.l_apply(k).scale(0.5).sub(&self.delta_star(&self.bianchi(k)))
    }

    /// d^∇ of a T*M-valued one-form: (d^∇h)_{ijb} = ∇_i h_jb − ∇_j h_ib.
    pub fn d_nabla(&self, h: &Field<T>) -> Field<T> {
        if h.rank() == 1 {
            return self.nabla(h);
        }
        assert_eq!(h.rank(), 2);
        let nh = self.nabla(h);
        Field::new(3, move |x| {
            let v = nh.at(x);
            let mut out = v.clone();
            for i in 0..3 {
                for j in 0..3 {
                    for b in 0..3 {
                        out[flat(&[i, j, b])] = v[flat(&[i, j, b])] - v[flat(&[j, i, b])];
                    }
                }
            }
            out
        })
    }

    /// δ^∇, the divergence in the first (form) index.
    pub fn delta_nabla(&self, f: &Field<T>) -> Field<T> {
        self.divergence(f)
    }

    /// |F|² = g^{ab}g^{cd}… F_{a c…} F_{b d…}.
    pub fn norm_sq(&self, f: &[T], rank: usize, x: &Point) -> T {
        let gi = self.inverse(x);
        let n = 3usize.pow(rank as u32);
        let mut s = T::zero();
        for p in 0..n {
            let ip = unflat(p, rank);
            for q in 0..n {
                let iq = unflat(q, rank);
                let mut w = T::one();
                for r in 0..rank {
                    w *= gi[ip[r]][iq[r]];
                }
                s += w * f[p] * f[q];
            }
        }
        s
    }
}

/// Ric(g + εk) − 2κ(g + εk) differentiated exactly in ε: the linearised
/// Einstein operator computed without any of the operator identities.
pub fn einstein_linearization(geo: &Geometry<f64>, k: &Field<f64>) -> Field<f64> {
    let base = geo.clone();
    let kf = k.clone();
    let kappa = geo.kappa;
    let dual: Geometry<Dual<f64>> = Geometry::new(
        move |x| {
            let g = base.metric(x);
            let kv = kf.at(x);
            let mut m = [[Dual::cst(0.0); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] = Dual::new(g[i][j], kv[3 * i + j]);
                }
            }
            m
        },
        geo.h,
        kappa,
    );
    let kf = k.clone();
    Field::new(2, move |x| {
        let ric = dual.ricci(x);
        let kv = kf.at(x);
        let mut out = vec![0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = ric[i][j].eps - 2.0 * kappa * kv[3 * i + j];
            }
        }
        out
    })
}

pub fn mat_to_vec<T: Real>(m: &Mat<T>) -> Vec<T> {
    m.iter().flat_map(|r| r.iter().copied()).collect()
}

pub fn vec_to_mat<T: Real>(v: &[T]) -> Mat<T> {
    let mut m = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = v[3 * i + j];
        }
    }
    m
}

fn raise2<T: Real>(gi: &Mat<T>, k: &Mat<T>) -> Mat<T> {
    let mut out = [[T::zero(); 3]; 3];
    for p in 0..3 {
        for q in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    out[p][q] += gi[p][a] * gi[q][b] * k[a][b];
                }
            }
        }
    }
    out
}

pub fn inverse3<T: Real>(m: &Mat<T>) -> Mat<T> {
    let c = |i: usize, j: usize| {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = c(i, j) / det;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_geo() -> Geometry<f64> {
        Geometry::new(|_| [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1e-3, 0.0)
    }

    #[test]
    fn inverse_roundtrip() {
        let m = [[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.0]];
        let mi = inverse3(&m);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * mi[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn flat_bianchi_hand_value() {
        // k = x¹ (dx¹)²: δk = −dx¹, ½ d tr k = ½ dx¹.
        let geo = flat_geo();
        let k = Field::new(2, |x: &Point| {
            let mut v = vec![0.0; 9];
            v[0] = x[0];
            v
        });
        let b = geo.bianchi(&k).at(&[0.3, 0.1, -0.2]);
        assert!((b[0] + 0.5).abs() < 1e-10 && b[1].abs() < 1e-12 && b[2].abs() < 1e-12);
    }

    #[test]
    fn flat_delta_star_examples() {
        let geo = flat_geo();
        let dx1 = Field::new(1, |_: &Point| vec![1.0, 0.0, 0.0]);
        assert!(geo.delta_star(&dx1).at(&[0.1, 0.2, 0.3]).iter().all(|v| v.abs() < 1e-12));
        let rot = Field::new(1, |x: &Point| vec![-x[1], x[0], 0.0]);
        assert!(geo.delta_star(&rot).at(&[0.1, 0.2, 0.3]).iter().all(|v| v.abs() < 1e-10));
        let w = Field::new(1, |x: &Point| vec![0.0, x[0], 0.0]);
        let s = geo.delta_star(&w).at(&[0.1, 0.2, 0.3]);
        assert!((s[1] - 0.5).abs() < 1e-10 && (s[3] - 0.5).abs() < 1e-10 && s[0].abs() < 1e-12);
    }

    #[test]
    fn dual_linearization_of_flat_ricci_is_first_order() {
        // For k = 2δ*ω the linearised Einstein operator vanishes.
        let geo = flat_geo().with_step(1e-3);
        let w = Field::new(1, |x: &Point| vec![x[1].sin(), x[0] * x[2], x[0].cos()]);
        let k = geo.delta_star(&w).scale(2.0);
        let de = einstein_linearization(&geo, &k).at(&[0.2, 0.1, 0.4]);
        assert!(de.iter().all(|v| v.abs() < 1e-5), "{de:?}");
    }
}
