//! Distributed resilient fixed-time observer.
//!
//! Each agent runs a chain of nonlinear filters `eps_1 .. eps_n` plus the
//! estimate `vhat`. Only the deepest layer `eps_n` talks to neighbors (and
//! to the exosystem when the leader link is up); every hop is gated by the
//! switching adjacency, so no information crosses an attacked edge. The
//! local layers are smooth, which keeps `vhat` and its first `n`
//! derivatives continuous across attack switches.

use crate::numkit::{signed_pow, Matrix, Vector};
use crate::topology::Topology;
use crate::{Error, Result};

/// Gains and exponents of the observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverParams {
    /// local filter gains (linear, contracting power, expanding power)
    pub delta: [f64; 3],
    /// consensus layer gains
    pub mu: [f64; 3],
    /// odd exponent pair with a < b
    pub a: u32,
    pub b: u32,
    /// clamp for negative-exponent factors in the derivative chain
    pub eps_sing: f64,
}

impl ObserverParams {
    pub fn validate(&self) -> Result<()> {
        if self.a % 2 == 0 || self.b % 2 == 0 {
            return Err(Error::invalid("observer exponents", "a and b must be odd"));
        }
        if self.a >= self.b {
            return Err(Error::invalid("observer exponents", "a < b required"));
        }
        if self.delta.iter().any(|d| *d < 0.0) || self.mu.iter().any(|m| *m < 0.0) {
            return Err(Error::invalid("observer gains", "must be nonnegative"));
        }
        if self.delta[0] <= 0.0 || self.mu[0] <= 0.0 {
            return Err(Error::invalid("observer gains", "delta_1 and mu_1 must be positive"));
        }
        if self.eps_sing <= 0.0 {
            return Err(Error::invalid("eps_sing", "must be positive"));
        }
        Ok(())
    }

    /// Reduction to the finite-time variant (third power term off).
    pub fn finite_time_variant(mut self) -> Self {
        self.delta[2] = 0.0;
        self.mu[2] = 0.0;
        self
    }

    /// Reduction to the exponentially converging variant (both power terms
    /// off); the comparison baseline.
    pub fn exponential_variant(mut self) -> Self {
        self.delta[1] = 0.0;
        self.delta[2] = 0.0;
        self.mu[1] = 0.0;
        self.mu[2] = 0.0;
        self
    }

    /// `g(d) = delta_1 d + delta_2 d^(a/b) + delta_3 d^(2 - a/b)`
    /// componentwise into `out`.
    fn local_gain(&self, d: &[f64], out: &mut [f64]) {
        let two_b_minus_a = 2 * self.b - self.a;
        for (o, &x) in out.iter_mut().zip(d) {
            *o = self.delta[0] * x
                + self.delta[1] * signed_pow(x, self.a, self.b)
                + self.delta[2] * signed_pow(x, two_b_minus_a, self.b);
        }
    }

    /// Derivative-chain gain `D(w) = delta_1 + (a/b) delta_2 |w|^((a-b)/b)
    /// + (2 - a/b) delta_3 |w|^((b-a)/b)` with the negative-exponent factor
    /// clamped at `eps_sing`.
    fn chain_gain(&self, w: f64) -> f64 {
        let ab = self.a as f64 / self.b as f64;
        let neg = (w.abs().max(self.eps_sing)).powf(ab - 1.0);
        let pos = w.abs().powf(1.0 - ab);
        self.delta[0] + self.delta[1] * ab * neg + self.delta[2] * (2.0 - ab) * pos
    }
}

/// Observer state of one agent: `vhat` plus the filter chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverState {
    pub vhat: Vector,
    /// `eps[k]` is layer k+1; `eps[n-1]` is the consensus layer
    pub eps: Vec<Vector>,
}

impl ObserverState {
    pub fn uniform(v0: &Vector, n: usize) -> Self {
        ObserverState { vhat: v0.clone(), eps: vec![v0.clone(); n] }
    }
}

/// Time derivative of one agent's observer state.
#[derive(Debug, Clone)]
pub struct ObserverRates {
    pub dvhat: Vector,
    pub deps: Vec<Vector>,
}

/// Evaluate the observer right-hand side for agent `i` (1-based).
///
/// `eps_n_all[j]` must hold agent `j+1`'s consensus layer; `v` is the
/// exosystem state, reachable only through the sigma-gated leader link.
/// `sigma_at` supplies the switching signal per graph edge at the current
/// instant (held constant across an integration step by the engine).
#[allow(clippy::too_many_arguments)]
pub fn observer_rhs(
    p: &ObserverParams,
    topo: &Topology,
    sigma_at: &dyn Fn(usize, usize) -> f64,
    agent: usize,
    st: &ObserverState,
    eps_n_all: &[&Vector],
    v: &Vector,
    s: &Matrix,
) -> ObserverRates {
    let q = st.vhat.len();
    let n = st.eps.len();
    let mut gain = vec![0.0; q];

    // vhat layer: slaved to eps_1
    let mut dvhat = s.mul_vec(&st.vhat);
    let w: Vec<f64> = (0..q).map(|c| st.vhat[c] - st.eps[0][c]).collect();
    p.local_gain(&w, &mut gain);
    for c in 0..q {
        dvhat[c] -= gain[c];
    }

    let mut deps = Vec::with_capacity(n);
    // interior layers: eps_k slaved to eps_{k+1}
    for k in 0..n - 1 {
        let mut d = s.mul_vec(&st.eps[k]);
        let diff: Vec<f64> = (0..q).map(|c| st.eps[k][c] - st.eps[k + 1][c]).collect();
        p.local_gain(&diff, &mut gain);
        for c in 0..q {
            d[c] -= gain[c];
        }
        deps.push(d);
    }

    // consensus layer: neighbors plus the leader, all sigma-gated
    let n_agents = topo.agent_count();
    let mine = &st.eps[n - 1];
    let mut d = s.mul_vec(mine);
    let two_b_minus_a = 2 * p.b - p.a;
    for j in 0..=n_agents {
        if j == agent {
            continue;
        }
        let w_ij = topo.weight(agent, j) * sigma_at(agent, j);
        if w_ij == 0.0 {
            continue;
        }
        let other: &Vector = if j == 0 { v } else { eps_n_all[j - 1] };
        for c in 0..q {
            let diff = mine[c] - other[c];
            d[c] -= w_ij
                * (p.mu[0] * diff
                    + p.mu[1] * signed_pow(diff, p.a, p.b)
                    + p.mu[2] * signed_pow(diff, two_b_minus_a, p.b));
        }
    }
    deps.push(d);

    ObserverRates { dvhat, deps }
}

/// Derivatives `vhat^(1) .. vhat^(order)` of the estimate.
///
/// The first derivative of each local layer comes straight from the filter
/// equations. Higher orders differentiate the `vhat` equation with the
/// power gains frozen at the current offsets:
/// `X^(j+1) = S X^(j) - D(w) (X^(j) - Y^(j))`, recursing down the chain.
/// Order `r` touches layers `eps_1 .. eps_r`, never the consensus layer's
/// derivative, so the chain stays continuous across attack switches.
pub fn vhat_derivatives(
    p: &ObserverParams,
    st: &ObserverState,
    s: &Matrix,
    order: usize,
) -> Result<Vec<Vector>> {
    let n = st.eps.len();
    let q = st.vhat.len();
    if order > n {
        return Err(Error::invalid(
            "derivative order",
            format!("requested {order}, chain depth is {n}"),
        ));
    }
    let mut gain = vec![0.0; q];

    // first derivatives of vhat and eps_1 .. eps_{n-1}
    let mut layer_first: Vec<Vector> = Vec::with_capacity(n);
    {
        let mut dvhat = s.mul_vec(&st.vhat);
        let w: Vec<f64> = (0..q).map(|c| st.vhat[c] - st.eps[0][c]).collect();
        p.local_gain(&w, &mut gain);
        for c in 0..q {
            dvhat[c] -= gain[c];
        }
        layer_first.push(dvhat);
    }
    for k in 0..n.saturating_sub(1) {
        let mut d = s.mul_vec(&st.eps[k]);
        let diff: Vec<f64> = (0..q).map(|c| st.eps[k][c] - st.eps[k + 1][c]).collect();
        p.local_gain(&diff, &mut gain);
        for c in 0..q {
            d[c] -= gain[c];
        }
        layer_first.push(d);
    }

    // chain[l] holds the current highest derivative of layer l
    // (index 0 = vhat, index l = eps_l)
    let mut chain = layer_first;
    let mut out: Vec<Vector> = Vec::with_capacity(order);
    out.push(chain[0].clone());
    for r in 2..=order {
        // layers 0 .. n-r can be raised one more order; deeper layers are
        // no longer needed for vhat^(order)
        let top = n - r;
        let mut next: Vec<Vector> = Vec::with_capacity(top + 1);
        for l in 0..=top {
            let w_l: Vec<f64> = if l == 0 {
                (0..q).map(|c| st.vhat[c] - st.eps[0][c]).collect()
            } else {
                (0..q).map(|c| st.eps[l - 1][c] - st.eps[l][c]).collect()
            };
            let x = &chain[l];
            let y = &chain[l + 1];
            let mut d = s.mul_vec(x);
            for c in 0..q {
                d[c] -= p.chain_gain(w_l[c]) * (x[c] - y[c]);
            }
            next.push(d);
        }
        out.push(next[0].clone());
        chain = next;
    }
    Ok(out)
}
