//! Small dense numerics: vectors/matrices, signed fractional powers,
//! symmetric eigen-extrema, bracketed root finding, and an RK4 step.
//!
//! Everything here is pure and allocation-light; matrices are tiny
//! (N <= 64) so no effort is spent on blocking or sparsity.

mod eig;
mod mat;

pub use eig::{sym_eig, sym_eig_extrema};
pub use mat::{Matrix, Vector};

use crate::{Error, Result};

/// Signed fractional power `x^(num/den)` with `num`, `den` positive odd
/// integers: `sign(x) * |x|^(num/den)` with the exact `0 -> 0` branch.
///
/// Odd/odd exponents act like odd root extractions and preserve sign, e.g.
/// `signed_pow(-8.0, 1, 3) == -2.0`.
pub fn signed_pow(x: f64, num: u32, den: u32) -> f64 {
    debug_assert!(num % 2 == 1 && den % 2 == 1, "exponent must be odd/odd");
    debug_assert!(num > 0 && den > 0);
    signed_powf(x, num as f64 / den as f64)
}

/// `sign(x) * |x|^c` for a runtime real exponent `c > 0`.
pub fn signed_powf(x: f64, c: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x.signum() * (c * x.abs().ln()).exp()
}

/// Bisection bracket: `[lo, hi]` with absolute tolerance and iteration cap.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_iter: u32,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "bracket requires lo < hi");
        Bracket { lo, hi, tol: 1e-10, max_iter: 200 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        assert!(tol > 0.0);
        self.tol = tol;
        self
    }
}

/// Root of an increasing scalar function by plain bisection.
///
/// If `f(lo)` and `f(hi)` do not straddle zero, `hi` is expanded
/// geometrically (up to a cap) to find a sign change first.
pub fn solve_root_increasing(f: impl Fn(f64) -> f64, br: Bracket) -> Result<f64> {
    let mut lo = br.lo;
    let mut hi = br.hi;
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo > 0.0 && fhi > 0.0 {
        return Err(Error::NoRoot { lo, hi, flo, fhi });
    }
    let mut expansions = 0;
    while flo.signum() == fhi.signum() {
        if expansions >= 64 || !fhi.is_finite() {
            return Err(Error::NoRoot { lo, hi, flo, fhi });
        }
        lo = hi;
        flo = fhi;
        hi += 2.0 * (hi - br.lo).max(1.0);
        fhi = f(hi);
        expansions += 1;
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..br.max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < br.tol && fm.abs() < br.tol {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One classical fourth-order Runge-Kutta step for `dy/dt = f(t, y)`.
///
/// Any non-finite value in a stage aborts with a blow-up error carrying `t`.
pub fn rk4_step(f: impl Fn(f64, &Vector) -> Vector, t: f64, y: &Vector, h: f64) -> Result<Vector> {
    debug_assert!(h > 0.0);
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.add_scaled(&k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &y.add_scaled(&k2, 0.5 * h));
    let k4 = f(t + h, &y.add_scaled(&k3, h));
    let mut out = y.clone();
    for i in 0..y.len() {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if !out[i].is_finite() {
            return Err(Error::Blowup { t });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn signed_pow_pinned_values() {
        assert_eq!(signed_pow(0.0, 3, 7), 0.0);
        assert_relative_eq!(signed_pow(-1.0, 3, 7), -1.0, max_relative = 1e-14);
        assert_relative_eq!(signed_pow(-8.0, 1, 3), -2.0, max_relative = 1e-14);
        assert_relative_eq!(signed_pow(8.0, 1, 3), 2.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn signed_pow_is_odd(x in -1e6f64..1e6, k in 0usize..4, j in 0usize..4) {
            let odd = [1u32, 3, 5, 7];
            let (num, den) = (odd[k], odd[j]);
            let lhs = signed_pow(-x, num, den);
            let rhs = -signed_pow(x, num, den);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn signed_pow_is_monotone(x in -1e3f64..1e3, d in 1e-6f64..10.0, k in 0usize..4, j in 0usize..4) {
            let odd = [1u32, 3, 5, 7];
            let (num, den) = (odd[k], odd[j]);
            prop_assert!(signed_pow(x + d, num, den) >= signed_pow(x, num, den));
        }
    }

    #[test]
    fn bisection_pinned_roots() {
        let r = solve_root_increasing(|x| x - 1.0, Bracket::new(0.0, 2.0)).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-9);
        let r = solve_root_increasing(|x| x.exp() - 2.0, Bracket::new(0.0, 2.0)).unwrap();
        assert_relative_eq!(r, std::f64::consts::LN_2, epsilon = 1e-9);
    }

    #[test]
    fn bisection_expands_bracket() {
        let r = solve_root_increasing(|x| x - 100.0, Bracket::new(0.0, 1.0)).unwrap();
        assert_relative_eq!(r, 100.0, epsilon = 1e-8);
    }

    #[test]
    fn bisection_reports_missing_root() {
        let err = solve_root_increasing(|_| 1.0, Bracket::new(0.0, 1.0));
        assert!(matches!(err, Err(Error::NoRoot { .. })));
    }

    #[test]
    fn bisection_root_brackets_zero_of_increasing_f() {
        let f = |x: f64| (1.3 * x).exp() - 7.0;
        let br = Bracket::new(0.0, 10.0);
        let r = solve_root_increasing(f, br).unwrap();
        assert!(f(r - br.tol) <= 0.0 && f(r + br.tol) >= 0.0);
    }

    #[test]
    fn rk4_constant_and_exponential() {
        let y = Vector::from(vec![1.0]);
        let out = rk4_step(|_, y| Vector::zeros(y.len()), 0.0, &y, 0.01).unwrap();
        assert_eq!(out[0], 1.0);

        let out = rk4_step(|_, y| y.clone(), 0.0, &y, 0.1).unwrap();
        assert_relative_eq!(out[0], 0.1f64.exp(), epsilon = 1e-7);
    }

    #[test]
    fn rk4_rotation_quarter_turn() {
        // dy/dt = S y with S = [[0,1],[-1,0]] rotates clockwise; at t = pi/2
        // the state [1,0] reaches [0,-1].
        let s = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let mut y = Vector::from(vec![1.0, 0.0]);
        let h = 1e-3;
        let steps = (std::f64::consts::FRAC_PI_2 / h).floor() as usize;
        let mut t = 0.0;
        for _ in 0..steps {
            y = rk4_step(|_, y| s.mul_vec(y), t, &y, h).unwrap();
            t += h;
        }
        let rem = std::f64::consts::FRAC_PI_2 - t;
        y = rk4_step(|_, y| s.mul_vec(y), t, &y, rem).unwrap();
        assert_relative_eq!(y[0], 0.0, epsilon = 1e-6);
        assert_relative_eq!(y[1], -1.0, epsilon = 1e-6);
    }

    #[test]
    fn rk4_linear_field_order_four() {
        // halving h must shrink the global error by at least 8x
        let s = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let run = |h: f64| {
            let mut y = Vector::from(vec![1.0, 0.0]);
            let steps = (1.0 / h).round() as usize;
            for k in 0..steps {
                y = rk4_step(|_, y| s.mul_vec(y), k as f64 * h, &y, h).unwrap();
            }
            // exact solution at t=1: [cos 1 ... ] for this rotation
            ((y[0] - 1f64.cos()).powi(2) + (y[1] + 1f64.sin()).powi(2)).sqrt()
        };
        let e1 = run(0.02);
        let e2 = run(0.01);
        assert!(e1 / e2 >= 8.0, "error ratio {} too small", e1 / e2);
    }

    #[test]
    fn rk4_flags_blowup() {
        let y = Vector::from(vec![1.0]);
        let err = rk4_step(|_, y| Vector::from(vec![y[0] * f64::MAX]), 0.0, &y, 1.0);
        assert!(matches!(err, Err(Error::Blowup { .. })));
    }
}
