//! Forward-mode jets for the backstepping partial derivatives.
//!
//! A [`Jet`] carries a value plus sensitivities against a fixed seed set
//! (agent states, observer chain components, parameter estimates). Nesting
//! `Jet<Jet<f64>>` yields exact second-order information, which the stage
//! cascade needs because stage `s` differentiates expressions containing
//! stage `s-1`'s partials.
//!
//! The sensitivity width is a compile-time cap; unused lanes stay zero and
//! propagate for free through the bilinear operations.

use std::ops::{Add, Mul, Neg, Sub};

/// Maximum seed count: `n + n*q + m` for one agent.
pub const JET_DIM: usize = 16;

/// Scalar abstraction over `f64` and nested jets; the controller and the
/// plant nonlinearities are written once against this.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Inject a constant (no sensitivity).
    fn from_f64(c: f64) -> Self;
    /// Multiply by a constant.
    fn scale(self, c: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Nonnegative integer power with exact derivative propagation.
    fn powi(self, k: u32) -> Self;
    /// Innermost payload value.
    fn value(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(c: f64) -> Self {
        c
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powi(self, k: u32) -> Self {
        f64::powi(self, k as i32)
    }
    fn value(self) -> f64 {
        self
    }
}

/// Value plus sensitivities against the seed set.
#[derive(Debug, Clone, Copy)]
pub struct Jet<T> {
    pub v: T,
    pub d: [T; JET_DIM],
}

impl<T: Scalar> Jet<T> {
    /// Constant with zero sensitivities.
    pub fn constant(v: T) -> Self {
        Jet { v, d: [T::zero(); JET_DIM] }
    }

    /// Seed variable `idx`: value with unit sensitivity in its own lane.
    pub fn seed(v: T, idx: usize) -> Self {
        let mut d = [T::zero(); JET_DIM];
        d[idx] = T::one();
        Jet { v, d }
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = d[i] + o.d[i];
        }
        Jet { v: self.v + o.v, d }
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = d[i] - o.d[i];
        }
        Jet { v: self.v - o.v, d }
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [T::zero(); JET_DIM];
        for i in 0..JET_DIM {
            d[i] = self.v * o.d[i] + self.d[i] * o.v;
        }
        Jet { v: self.v * o.v, d }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = -d[i];
        }
        Jet { v: -self.v, d }
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn zero() -> Self {
        Jet::constant(T::zero())
    }
    fn one() -> Self {
        Jet::constant(T::one())
    }
    fn from_f64(c: f64) -> Self {
        Jet::constant(T::from_f64(c))
    }
    fn scale(self, c: f64) -> Self {
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = d[i].scale(c);
        }
        Jet { v: self.v.scale(c), d }
    }
    fn sin(self) -> Self {
        let cos_v = self.v.cos();
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = d[i] * cos_v;
        }
        Jet { v: self.v.sin(), d }
    }
    fn cos(self) -> Self {
        let msin_v = -self.v.sin();
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = d[i] * msin_v;
        }
        Jet { v: self.v.cos(), d }
    }
    fn powi(self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        let grad = self.v.powi(k - 1).scale(k as f64);
        let mut d = self.d;
        for i in 0..JET_DIM {
            d[i] = d[i] * grad;
        }
        Jet { v: self.v.powi(k), d }
    }
    fn value(self) -> f64 {
        self.v.value()
    }
}
