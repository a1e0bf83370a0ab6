//! The exosystem and the strict-feedback agents.
//!
//! Agent dynamics are lower triangular:
//! `x_s' = x_{s+1} + phi_s(t, x_1..s)^T theta + b_s v` for `s < n`, and
//! `x_n' = u + phi_n^T theta + b_n v`, with regulated output
//! `e = x_1 + R v`. The unknown parameter vector `theta` stays inside the
//! plant; controllers only ever see their own estimate.

use num_complex::Complex64;

use crate::controller::jet::Scalar;
use crate::numkit::{sym_eig_extrema, Matrix, Vector};
use crate::{Error, Result};

/// Autonomous linear exosystem `v' = S v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exosystem {
    s: Matrix,
}

impl Exosystem {
    pub fn new(s: Matrix) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::NonSquare { rows: s.rows(), cols: s.cols() });
        }
        Ok(Exosystem { s })
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    /// `S v`
    pub fn rhs(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "exosystem state has length {}, expected {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(self.s.mul_vec(v))
    }

    /// Marginal-stability validation: every eigenvalue of `S` must have a
    /// (numerically) zero real part and be semi-simple.
    pub fn validate(&self) -> ExoReport {
        let q = self.dim();
        let lambda_max_s_sym = if q == 0 {
            0.0
        } else {
            sym_eig_extrema(&self.s.add(&self.s.transpose())).map(|(_, hi)| hi).unwrap_or(f64::NAN)
        };
        let eigenvalues = general_eigenvalues(&self.s);
        let max_abs_re = eigenvalues.iter().map(|l| l.re.abs()).fold(0.0, f64::max);
        let mut failure = None;
        if max_abs_re >= 1e-8 {
            failure = Some(format!("eigenvalue with nonzero real part (|Re| = {max_abs_re:.3e})"));
        }
        // cluster eigenvalues, then the semi-simple test: the eigenspace of a
        // cluster with multiplicity k must have rank deficiency exactly k
        let mut semi_simple = true;
        let mut remaining: Vec<Complex64> = eigenvalues.clone();
        while let Some(center) = remaining.first().copied() {
            let (cluster, rest): (Vec<_>, Vec<_>) =
                remaining.iter().partition(|l| (*l - center).norm() < 1e-7);
            let mult = cluster.len();
            let mean = cluster.iter().sum::<Complex64>() / mult as f64;
            let rank = rank_shifted(&self.s, mean);
            if rank != q - mult {
                semi_simple = false;
                failure.get_or_insert(format!(
                    "eigenvalue {mean} has multiplicity {mult} but rank deficiency {}",
                    q - rank
                ));
            }
            remaining = rest;
        }
        ExoReport {
            pass: failure.is_none(),
            eigenvalues,
            max_abs_re,
            semi_simple,
            lambda_max_s_sym,
            failure,
        }
    }
}

/// Outcome of the exosystem validation.
#[derive(Debug, Clone)]
pub struct ExoReport {
    pub pass: bool,
    pub eigenvalues: Vec<Complex64>,
    pub max_abs_re: f64,
    pub semi_simple: bool,
    /// largest eigenvalue of `S + S^T`, consumed by the certificate
    pub lambda_max_s_sym: f64,
    pub failure: Option<String>,
}

/// Eigenvalues of a small general real matrix: characteristic polynomial via
/// Faddeev-LeVerrier, then Durand-Kerner on the monic polynomial. Adequate
/// for q <= 8.
fn general_eigenvalues(a: &Matrix) -> Vec<Complex64> {
    let n = a.rows();
    if n == 0 {
        return vec![];
    }
    // p(x) = x^n + c[0] x^{n-1} + ... + c[n-1]
    let mut coeffs = vec![0.0f64; n];
    let mut m = a.clone();
    let mut c = -trace(&m);
    coeffs[0] = c;
    for k in 2..=n {
        // M <- A (M + c I)
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += c;
        }
        m = mat_mul(a, &shifted);
        c = -trace(&m) / k as f64;
        coeffs[k - 1] = c;
    }
    durand_kerner(&coeffs)
}

fn trace(a: &Matrix) -> f64 {
    (0..a.rows()).map(|i| a[(i, i)]).sum()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    out
}

/// Roots of the monic polynomial `x^n + c[0] x^{n-1} + ... + c[n-1]`.
fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let eval = |x: Complex64| -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for &c in coeffs {
            p = p * x + c;
        }
        p
    };
    let radius = 1.0 + coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| radius * seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-13 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// Numerical rank of `A - lambda I` via complex Gaussian elimination with
/// partial pivoting; tolerance scaled to the matrix size.
fn rank_shifted(a: &Matrix, lambda: Complex64) -> usize {
    let n = a.rows();
    let mut w: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut z = Complex64::new(a[(i, j)], 0.0);
                    if i == j {
                        z -= lambda;
                    }
                    z
                })
                .collect()
        })
        .collect();
    let scale = w
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = 1e-7 * scale;
    let mut rank = 0;
    for col in 0..n {
        let pivot = (rank..n).max_by(|&i, &j| {
            w[i][col].norm().partial_cmp(&w[j][col].norm()).unwrap()
        });
        let Some(p) = pivot else { break };
        if w[p][col].norm() <= tol {
            continue;
        }
        w.swap(rank, p);
        for i in (rank + 1)..n {
            let f = w[i][col] / w[rank][col];
            for j in col..n {
                let sub = f * w[rank][j];
                w[i][j] -= sub;
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Registry of smooth nonlinearity families. Each family evaluates
/// `phi_s(t, x_1..s)` generically over [`Scalar`], which provides both plain
/// values and jet sensitivities from one definition.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiFamily {
    /// identically zero regressor
    Zero { n: usize, m: usize },
    /// one-link manipulator with motor dynamics (n = 3, m = 4)
    Manipulator,
    /// small smooth test family (n = 2, m = 2):
    /// `phi_1 = [sin x1, x1]`, `phi_2 = [x1 x2, x2^2]`
    PolySine,
}

impl PhiFamily {
    pub fn order(&self) -> usize {
        match self {
            PhiFamily::Zero { n, .. } => *n,
            PhiFamily::Manipulator => 3,
            PhiFamily::PolySine => 2,
        }
    }

    pub fn param_dim(&self) -> usize {
        match self {
            PhiFamily::Zero { m, .. } => *m,
            PhiFamily::Manipulator => 4,
            PhiFamily::PolySine => 2,
        }
    }

    /// Evaluate `phi_stage` (1-based) into `out` (length `m`); `xbar` must
    /// provide at least `stage` leading states.
    pub fn eval_into<S: Scalar>(&self, stage: usize, _t: f64, xbar: &[S], out: &mut [S]) {
        debug_assert!(stage >= 1 && stage <= self.order());
        debug_assert!(xbar.len() >= stage);
        debug_assert_eq!(out.len(), self.param_dim());
        for o in out.iter_mut() {
            *o = S::zero();
        }
        match self {
            PhiFamily::Zero { .. } => {}
            PhiFamily::Manipulator => match stage {
                1 => {}
                2 => {
                    out[0] = xbar[0].sin();
                    out[1] = xbar[1];
                }
                _ => {
                    out[2] = xbar[1];
                    out[3] = xbar[2];
                }
            },
            PhiFamily::PolySine => match stage {
                1 => {
                    out[0] = xbar[0].sin();
                    out[1] = xbar[0];
                }
                _ => {
                    out[0] = xbar[0] * xbar[1];
                    out[1] = xbar[1].powi(2);
                }
            },
        }
    }

    /// Plain `f64` evaluation.
    pub fn eval(&self, stage: usize, t: f64, xbar: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.param_dim()];
        self.eval_into(stage, t, xbar, &mut out);
        out
    }
}

/// One strict-feedback agent: shape data plus the hidden true parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentModel {
    pub family: PhiFamily,
    theta_true: Vec<f64>,
    /// disturbance rows `b_1..b_n`, each of length q
    pub b: Vec<Vector>,
    /// output coupling row of length q
    pub r: Vector,
}

impl AgentModel {
    pub fn new(family: PhiFamily, theta_true: Vec<f64>, b: Vec<Vector>, r: Vector) -> Result<Self> {
        let n = family.order();
        let m = family.param_dim();
        if theta_true.len() != m {
            return Err(Error::Dimension(format!(
                "theta has length {}, family expects {m}",
                theta_true.len()
            )));
        }
        if b.len() != n {
            return Err(Error::Dimension(format!("b has {} rows, expected {n}", b.len())));
        }
        let q = r.len();
        if b.iter().any(|row| row.len() != q) {
            return Err(Error::Dimension("b rows must all have length q".into()));
        }
        Ok(AgentModel { family, theta_true, b, r })
    }

    /// One-link manipulator with motor dynamics, parameterized by the agent
    /// index: B = K = 0.2 i, N = G = 0.1 i (D = M = 1).
    pub fn manipulator(index: usize) -> Self {
        let i = index as f64;
        AgentModel::new(
            PhiFamily::Manipulator,
            vec![-0.1 * i, -0.2 * i, -0.2 * i, -0.1 * i],
            vec![
                Vector::zeros(2),
                Vector::from(vec![0.0, 1.0]),
                Vector::zeros(2),
            ],
            Vector::from(vec![1.0, 0.0]),
        )
        .expect("manipulator dimensions are static")
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }

    pub fn param_dim(&self) -> usize {
        self.family.param_dim()
    }

    pub fn exo_dim(&self) -> usize {
        self.r.len()
    }

    /// Ground-truth parameters; consumed by the plant dynamics and the
    /// analysis bounds, never by the controller.
    pub fn theta_true(&self) -> &[f64] {
        &self.theta_true
    }

    /// Strict-feedback derivative under the true parameters.
    pub fn rhs(&self, t: f64, x: &Vector, u: f64, v: &Vector) -> Result<Vector> {
        let n = self.order();
        if x.len() != n {
            return Err(Error::Dimension(format!("state has length {}, expected {n}", x.len())));
        }
        if v.len() != self.exo_dim() {
            return Err(Error::Dimension(format!(
                "exo state has length {}, expected {}",
                v.len(),
                self.exo_dim()
            )));
        }
        let mut dx = Vector::zeros(n);
        for s in 1..=n {
            let phi = self.family.eval(s, t, x.as_slice());
            let drive = if s < n { x[s] } else { u };
            dx[s - 1] = drive
                + phi.iter().zip(&self.theta_true).map(|(p, th)| p * th).sum::<f64>()
                + self.b[s - 1].dot(v);
        }
        Ok(dx)
    }

    /// Regulated output `e = x_1 + R v`.
    pub fn regulated_output(&self, x: &Vector, v: &Vector) -> f64 {
        x[0] + self.r.dot(v)
    }
}
