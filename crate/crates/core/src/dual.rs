//! Forward-mode dual numbers.
//!
//! `Dual<T>` carries a value and one directional derivative. Nesting
//! (`Dual<Dual<f64>>`) yields exact second derivatives, which the indicial
//! residuals use to apply radial differential operators without truncation
//! error.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar abstraction shared by `f64` and dual numbers.
pub trait Real:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
{
    fn cst(v: f64) -> Self;
    /// Underlying real value (drops all derivative parts).
    fn re(self) -> f64;
    fn sqrt(self) -> Self;
    fn acos(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn scale(self, s: f64) -> Self {
        self * Self::cst(s)
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
}

/// A value together with its derivative along one seeded direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T = f64> {
    pub val: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    pub fn new(val: T, eps: T) -> Self {
        Dual { val, eps }
    }

    /// The independent variable: value `v`, derivative one.
    pub fn var(v: T) -> Self {
        Dual { val: v, eps: T::one() }
    }

    fn chain(self, f: T, df: T) -> Self {
        Dual { val: f, eps: df * self.eps }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.val + o.val, self.eps + o.eps)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.val - o.val, self.eps - o.eps)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.val * o.val, self.val * o.eps + self.eps * o.val)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.val;
        Dual::new(self.val * inv, (self.eps * o.val - self.val * o.eps) * inv * inv)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.val, -self.eps)
    }
}

impl<T: Real> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(v: f64) -> Self {
        Dual::new(T::cst(v), T::zero())
    }
    fn re(self) -> f64 {
        self.val.re()
    }
    fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        self.chain(s, T::one() / (s + s))
    }
    fn acos(self) -> Self {
        let one = T::one();
        self.chain(self.val.acos(), -one / (one - self.val * self.val).sqrt())
    }
    fn ln(self) -> Self {
        self.chain(self.val.ln(), T::one() / self.val)
    }
    fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e)
    }
    fn powf(self, p: f64) -> Self {
        self.chain(self.val.powf(p), self.val.powf(p - 1.0).scale(p))
    }
    fn sin(self) -> Self {
        self.chain(self.val.sin(), self.val.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.val.cos(), -self.val.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.val.sinh(), self.val.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.val.cosh(), self.val.sinh())
    }
}

/// Value, first and second derivative of `f` at `x`, via nested duals.
pub fn second_derivative<F>(f: F, x: f64) -> (f64, f64, f64)
where
    F: Fn(Dual<Dual<f64>>) -> Dual<Dual<f64>>,
{
    let arg = Dual::new(Dual::var(x), Dual::new(1.0, 0.0));
    let out = f(arg);
    (out.val.val, out.val.eps, out.eps.eps)
}
