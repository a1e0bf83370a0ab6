//! Closed-loop assembly and time stepping.
//!
//! The global state stacks `[v | per agent: x | eps_1..eps_n | vhat |
//! theta_hat]`. Integration is classical RK4 on a nominal grid of step `h`
//! that is split at every attack-interval endpoint, so the switching signal
//! is constant inside each step. Within a nominal step, a stability guard
//! subdivides further when the backstepping transient is too stiff for the
//! nominal step (derivative ratio check); trace rows are emitted on the
//! nominal grid only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::controller::{self, AgentGains, ControlInputs};
use crate::dos::DosSchedule;
use crate::numkit::Vector;
use crate::observer::{observer_rhs, vhat_derivatives, ObserverParams, ObserverState};
use crate::plant::{AgentModel, Exosystem};
use crate::topology::Topology;
use crate::{Error, Result};

/// Analysis-side parameters attached to a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    /// residual-set split parameter in (0,1)
    pub varpi: f64,
    /// growth-rate floor for the attacked-phase constant
    pub c_s: f64,
    /// externally reported values to echo next to the computed ones
    pub reference: ReferenceValues,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams { varpi: 0.5, c_s: 2.0, reference: ReferenceValues::default() }
    }
}

/// Published constants to print side by side with the recomputed ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferenceValues {
    pub c2: Option<f64>,
    pub c_bound: Option<f64>,
    pub t_o: Option<f64>,
}

/// Initial conditions for every stacked block.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions {
    pub v0: Vector,
    pub x0: Vec<Vector>,
    pub vhat0: Vec<Vector>,
    /// filter chain start; defaults to `vhat0` replicated per layer
    pub eps0: Option<Vec<Vec<Vector>>>,
    /// defaults to zero
    pub theta_hat0: Option<Vec<Vector>>,
}

/// A complete closed-loop setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topo: Topology,
    pub sched: DosSchedule,
    pub exo: Exosystem,
    pub agents: Vec<AgentModel>,
    pub obs: ObserverParams,
    pub gains: Vec<AgentGains>,
    pub init: InitialConditions,
    pub h: f64,
    pub horizon: f64,
    pub seed: u64,
    /// observer/regulation settling detection
    pub settle_threshold: f64,
    pub settle_hold: f64,
    pub analysis: AnalysisParams,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let n_agents = self.topo.agent_count();
        let q = self.exo.dim();
        if self.agents.len() != n_agents {
            return Err(Error::Validation(format!(
                "{} agent models for {n_agents} topology nodes",
                self.agents.len()
            )));
        }
        if self.gains.len() != n_agents {
            return Err(Error::Validation("one gain set per agent required".into()));
        }
        self.obs.validate()?;
        for (i, (a, g)) in self.agents.iter().zip(&self.gains).enumerate() {
            if a.exo_dim() != q {
                return Err(Error::Validation(format!("agent {} couples to q={} exosystem", i + 1, a.exo_dim())));
            }
            g.validate(a.order(), a.param_dim())?;
        }
        if self.h <= 0.0 {
            return Err(Error::Validation("step h must be positive".into()));
        }
        if self.horizon <= 0.0 || self.horizon > self.sched.horizon + 1e-12 {
            return Err(Error::Validation(format!(
                "horizon {} must lie within the schedule horizon {}",
                self.horizon, self.sched.horizon
            )));
        }
        if self.settle_hold < self.h {
            return Err(Error::Validation("settle hold window shorter than one step".into()));
        }
        if !(0.0..1.0).contains(&self.analysis.varpi) || self.analysis.varpi == 0.0 {
            return Err(Error::Validation("varpi must lie in (0,1)".into()));
        }
        if self.analysis.c_s <= 0.0 {
            return Err(Error::Validation("c_s must be positive".into()));
        }
        if self.init.v0.len() != q
            || self.init.x0.len() != n_agents
            || self.init.vhat0.len() != n_agents
        {
            return Err(Error::Validation("initial condition blocks mismatch the agent count".into()));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if self.init.x0[i].len() != a.order() || self.init.vhat0[i].len() != q {
                return Err(Error::Validation(format!("initial conditions of agent {} mismatch", i + 1)));
            }
        }
        if let Some(eps0) = &self.init.eps0 {
            if eps0.len() != n_agents
                || eps0
                    .iter()
                    .zip(&self.agents)
                    .any(|(e, a)| e.len() != a.order() || e.iter().any(|l| l.len() != q))
            {
                return Err(Error::Validation("eps0 blocks mismatch".into()));
            }
        }
        if let Some(th0) = &self.init.theta_hat0 {
            if th0.len() != n_agents
                || th0.iter().zip(&self.agents).any(|(t, a)| t.len() != a.param_dim())
            {
                return Err(Error::Validation("theta_hat0 blocks mismatch".into()));
            }
        }
        Ok(())
    }

    /// Redraw every initial condition uniformly from `(lo, hi)`,
    /// deterministically from `seed`.
    pub fn with_random_init(mut self, seed: u64, lo: f64, hi: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.exo.dim();
        let mut draw = |len: usize| -> Vector {
            Vector::from((0..len).map(|_| rng.gen_range(lo..hi)).collect::<Vec<_>>())
        };
        let v0 = draw(q);
        let x0 = self.agents.iter().map(|a| draw(a.order())).collect();
        let vhat0: Vec<Vector> = self.agents.iter().map(|_| draw(q)).collect();
        self.init = InitialConditions { v0, x0, vhat0, eps0: None, theta_hat0: None };
        self.seed = seed;
        self
    }
}

/// Per-agent block offsets into the global state vector.
#[derive(Debug, Clone)]
struct Layout {
    q: usize,
    /// (x_start, n, eps_start, vhat_start, theta_start, m) per agent
    blocks: Vec<(usize, usize, usize, usize, usize, usize)>,
    total: usize,
}

impl Layout {
    fn new(sc: &Scenario) -> Self {
        let q = sc.exo.dim();
        let mut off = q;
        let mut blocks = Vec::with_capacity(sc.agents.len());
        for a in &sc.agents {
            let n = a.order();
            let m = a.param_dim();
            let x = off;
            let eps = x + n;
            let vhat = eps + n * q;
            let theta = vhat + q;
            off = theta + m;
            blocks.push((x, n, eps, vhat, theta, m));
        }
        Layout { q, blocks, total: off }
    }

    fn pack(&self, sc: &Scenario) -> Vector {
        let mut y = Vector::zeros(self.total);
        y.as_mut_slice()[..self.q].copy_from_slice(sc.init.v0.as_slice());
        for (i, &(x, n, eps, vhat, theta, m)) in self.blocks.iter().enumerate() {
            y.as_mut_slice()[x..x + n].copy_from_slice(sc.init.x0[i].as_slice());
            for k in 0..n {
                let layer = match &sc.init.eps0 {
                    Some(e) => e[i][k].clone(),
                    None => sc.init.vhat0[i].clone(),
                };
                y.as_mut_slice()[eps + k * self.q..eps + (k + 1) * self.q]
                    .copy_from_slice(layer.as_slice());
            }
            y.as_mut_slice()[vhat..vhat + self.q].copy_from_slice(sc.init.vhat0[i].as_slice());
            if let Some(th0) = &sc.init.theta_hat0 {
                y.as_mut_slice()[theta..theta + m].copy_from_slice(th0[i].as_slice());
            }
        }
        y
    }

    fn observer_state(&self, y: &Vector, agent: usize) -> ObserverState {
        let (_, n, eps, vhat, _, _) = self.blocks[agent];
        ObserverState {
            vhat: Vector::from(&y.as_slice()[vhat..vhat + self.q]),
            eps: (0..n)
                .map(|k| Vector::from(&y.as_slice()[eps + k * self.q..eps + (k + 1) * self.q]))
                .collect(),
        }
    }
}

/// Per-agent controller byproducts at a trace point.
#[derive(Debug, Clone)]
pub struct AgentAux {
    pub u: f64,
    pub z: Vec<f64>,
}

/// Recorded closed-loop run.
#[derive(Debug, Clone)]
pub struct SimTrace {
    pub t: Vec<f64>,
    pub v: Vec<Vector>,
    pub attack: Vec<bool>,
    pub agents: Vec<AgentSeries>,
    /// columns of the CSV rendering, fixed by the layout
    pub n_agents: usize,
}

/// Time series of one agent.
#[derive(Debug, Clone, Default)]
pub struct AgentSeries {
    pub x: Vec<Vector>,
    pub e: Vec<f64>,
    pub vhat: Vec<Vector>,
    pub vhat_err: Vec<f64>,
    pub eps_n: Vec<Vector>,
    pub theta_hat: Vec<Vector>,
    pub u: Vec<f64>,
    pub z: Vec<Vector>,
}

struct Engine<'a> {
    sc: &'a Scenario,
    layout: Layout,
}

impl<'a> Engine<'a> {
    fn new(sc: &'a Scenario) -> Self {
        Engine { sc, layout: Layout::new(sc) }
    }

    /// Full right-hand side under a frozen switching snapshot. When `aux`
    /// is given, the controller byproducts are written there.
    fn rhs(&self, t: f64, y: &Vector, sigma_t: f64, mut aux: Option<&mut Vec<AgentAux>>) -> Result<Vector> {
        let sc = self.sc;
        let q = self.layout.q;
        let mut dy = Vector::zeros(self.layout.total);

        let v = Vector::from(&y.as_slice()[..q]);
        let dv = sc.exo.rhs(&v)?;
        dy.as_mut_slice()[..q].copy_from_slice(dv.as_slice());

        // consensus layers of all agents, gathered up front
        let states: Vec<ObserverState> =
            (0..sc.agents.len()).map(|i| self.layout.observer_state(y, i)).collect();
        let eps_n_all: Vec<&Vector> = states.iter().map(|st| st.eps.last().unwrap()).collect();
        let sigma = |i: usize, j: usize| sc.sched.sigma(i, j, sigma_t);

        if let Some(a) = aux.as_deref_mut() {
            a.clear();
        }
        for (i, agent) in sc.agents.iter().enumerate() {
            let (xo, n, eps, vhat, theta, m) = self.layout.blocks[i];
            let st = &states[i];
            let rates = observer_rhs(
                &sc.obs,
                &sc.topo,
                &sigma,
                i + 1,
                st,
                &eps_n_all,
                &v,
                sc.exo.matrix(),
            );

            // controller sees the estimate chain, never v or theta
            let mut chain = vhat_derivatives(&sc.obs, st, sc.exo.matrix(), n)?;
            chain.insert(0, st.vhat.clone());
            let x = &y.as_slice()[xo..xo + n];
            let theta_hat = &y.as_slice()[theta..theta + m];
            let out = controller::evaluate(
                agent.shape(),
                &sc.gains[i],
                &ControlInputs { t, x, vhat_chain: &chain, theta_hat },
            )?;

            let dx = agent.rhs(t, &Vector::from(x), out.u, &v)?;
            dy.as_mut_slice()[xo..xo + n].copy_from_slice(dx.as_slice());
            for k in 0..n {
                dy.as_mut_slice()[eps + k * q..eps + (k + 1) * q]
                    .copy_from_slice(rates.deps[k].as_slice());
            }
            dy.as_mut_slice()[vhat..vhat + q].copy_from_slice(rates.dvhat.as_slice());
            dy.as_mut_slice()[theta..theta + m].copy_from_slice(&out.theta_hat_dot);

            if let Some(a) = aux.as_deref_mut() {
                a.push(AgentAux { u: out.u, z: out.z });
            }
        }
        Ok(dy)
    }

    /// One guarded nominal step `[t, t+h]`. Subdivides on instability:
    /// a step is rejected when a stage derivative explodes relative to the
    /// entry derivative, which catches the cubic backstepping boundary
    /// layer without an error estimator.
    fn guarded_step(&self, t0: f64, y: &Vector, h: f64, sigma_t: f64) -> Result<Vector> {
        const MAX_EVALS: usize = 200_000;
        let mut t = 0.0;
        let mut cur = y.clone();
        let mut h_try = h;
        let mut evals = 0usize;
        while t < h - 1e-15 * h.max(1.0) {
            h_try = h_try.min(h - t);
            evals += 1;
            if evals > MAX_EVALS {
                return Err(Error::Blowup { t: t0 + t });
            }
            match self.try_step(t0 + t, &cur, h_try, sigma_t) {
                Some(next) => {
                    cur = next;
                    t += h_try;
                    h_try = (h_try * 2.0).min(h);
                }
                None => {
                    h_try *= 0.5;
                    if h_try < 1e-14 {
                        return Err(Error::Blowup { t: t0 + t });
                    }
                }
            }
        }
        Ok(cur)
    }

    /// Attempt one RK4 step; `None` when the stability guard rejects it.
    fn try_step(&self, t: f64, y: &Vector, h: f64, sigma_t: f64) -> Option<Vector> {
        let inf = |v: &Vector| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let k1 = self.rhs(t, y, sigma_t, None).ok()?;
        let k1n = inf(&k1);
        if !k1n.is_finite() {
            return None;
        }
        let k2 = self.rhs(t + 0.5 * h, &y.add_scaled(&k1, 0.5 * h), sigma_t, None).ok()?;
        let k3 = self.rhs(t + 0.5 * h, &y.add_scaled(&k2, 0.5 * h), sigma_t, None).ok()?;
        let k4 = self.rhs(t + h, &y.add_scaled(&k3, h), sigma_t, None).ok()?;
        let k4n = inf(&k4);
        if !k4n.is_finite() || k4n > (2.0 * k1n).max(1.0) {
            return None;
        }
        let mut next = y.clone();
        for i in 0..y.len() {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !next[i].is_finite() {
                return None;
            }
        }
        Some(next)
    }
}

/// Nominal time grid: multiples of `h` split at every attack endpoint.
fn time_grid(sched: &DosSchedule, h: f64, horizon: f64) -> Vec<f64> {
    let mut switch: Vec<f64> = sched
        .attacked_edges()
        .flat_map(|(_, ivs)| ivs.iter().flat_map(|&(s, e)| [s, e]))
        .filter(|&t| t > 0.0 && t < horizon)
        .collect();
    switch.sort_by(|a, b| a.partial_cmp(b).unwrap());
    switch.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut grid = vec![0.0];
    let mut seg_start = 0.0;
    for seg_end in switch.into_iter().chain([horizon]) {
        let span = seg_end - seg_start;
        let steps = (span / h).floor() as usize;
        for k in 1..=steps {
            let t = seg_start + k as f64 * h;
            if t < seg_end - 1e-12 {
                grid.push(t);
            }
        }
        grid.push(seg_end);
        seg_start = seg_end;
    }
    grid
}

/// Run one scenario to completion.
pub fn simulate(sc: &Scenario) -> Result<SimTrace> {
    sc.validate()?;
    let eng = Engine::new(sc);
    let grid = time_grid(&sc.sched, sc.h, sc.horizon);
    let n_agents = sc.agents.len();
    let q = eng.layout.q;

    let mut trace = SimTrace {
        t: Vec::with_capacity(grid.len()),
        v: Vec::with_capacity(grid.len()),
        attack: Vec::with_capacity(grid.len()),
        agents: vec![AgentSeries::default(); n_agents],
        n_agents,
    };
    let mut aux: Vec<AgentAux> = Vec::with_capacity(n_agents);

    let mut y = eng.layout.pack(sc);
    let mut record = |t: f64, y: &Vector, aux: &mut Vec<AgentAux>, eng: &Engine| -> Result<()> {
        eng.rhs(t, y, t, Some(aux))?;
        let v = Vector::from(&y.as_slice()[..q]);
        let attacked = sc
            .topo
            .edges()
            .iter()
            .any(|&(i, j)| sc.sched.sigma(i, j, t) == 0.0);
        trace.t.push(t);
        trace.attack.push(attacked);
        for (i, agent) in sc.agents.iter().enumerate() {
            let (xo, n, eps, vhat, theta, m) = eng.layout.blocks[i];
            let x = Vector::from(&y.as_slice()[xo..xo + n]);
            let vh = Vector::from(&y.as_slice()[vhat..vhat + q]);
            let epsn = Vector::from(&y.as_slice()[eps + (n - 1) * q..eps + n * q]);
            let th = Vector::from(&y.as_slice()[theta..theta + m]);
            let s = &mut trace.agents[i];
            s.e.push(agent.regulated_output(&x, &v));
            s.vhat_err.push(vh.sub(&v).norm());
            s.x.push(x);
            s.vhat.push(vh);
            s.eps_n.push(epsn);
            s.theta_hat.push(th);
            s.u.push(aux[i].u);
            s.z.push(Vector::from(aux[i].z.clone()));
        }
        trace.v.push(v);
        Ok(())
    };

    record(0.0, &y, &mut aux, &eng)?;
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        // switching signal frozen at the segment's interior
        y = eng.guarded_step(t0, &y, t1 - t0, t0)?;
        record(t1, &y, &mut aux, &eng)?;
    }
    Ok(trace)
}

/// Run many scenarios in parallel (scenario data is immutable and shared).
pub fn simulate_batch(scenarios: &[Scenario]) -> Vec<Result<SimTrace>> {
    scenarios.par_iter().map(simulate).collect()
}

/// Converged-behavior metrics extracted from a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// first time after which the worst estimation error stays below the
    /// threshold for the hold window
    pub observer_settling: Option<f64>,
    /// same for the worst regulated output against the residual radius
    pub regulation_time: Option<f64>,
    pub peak_u: f64,
    pub peak_theta_norm: f64,
    pub max_err_after_to: Option<f64>,
    pub max_e_after_ta: Option<f64>,
}

/// Compute metrics against bounds `t_o`, `t_a` and `radius`.
pub fn metrics(tr: &SimTrace, threshold: f64, hold: f64, radius: f64, t_o: f64, t_a: f64) -> Metrics {
    let worst_err: Vec<f64> = (0..tr.t.len())
        .map(|k| tr.agents.iter().map(|a| a.vhat_err[k]).fold(0.0, f64::max))
        .collect();
    let worst_e: Vec<f64> = (0..tr.t.len())
        .map(|k| tr.agents.iter().map(|a| a.e[k].abs()).fold(0.0, f64::max))
        .collect();

    Metrics {
        observer_settling: settle_time(&tr.t, &worst_err, threshold, hold),
        regulation_time: settle_time(&tr.t, &worst_e, radius, hold),
        peak_u: tr
            .agents
            .iter()
            .flat_map(|a| a.u.iter())
            .fold(0.0f64, |m, u| m.max(u.abs())),
        peak_theta_norm: tr
            .agents
            .iter()
            .flat_map(|a| a.theta_hat.iter())
            .fold(0.0f64, |m, th| m.max(th.norm())),
        max_err_after_to: max_after(&tr.t, &worst_err, t_o),
        max_e_after_ta: max_after(&tr.t, &worst_e, t_a),
    }
}

fn settle_time(t: &[f64], series: &[f64], threshold: f64, hold: f64) -> Option<f64> {
    let mut candidate: Option<usize> = None;
    for k in 0..t.len() {
        if series[k] < threshold {
            if candidate.is_none() {
                candidate = Some(k);
            }
        } else {
            candidate = None;
        }
        if let Some(c) = candidate {
            if t[k] - t[c] >= hold {
                return Some(t[c]);
            }
        }
    }
    None
}

fn max_after(t: &[f64], series: &[f64], after: f64) -> Option<f64> {
    let vals: Vec<f64> =
        t.iter().zip(series).filter(|(tt, _)| **tt >= after).map(|(_, v)| *v).collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.into_iter().fold(0.0, f64::max))
    }
}

/// Paired run of the fixed-time observer against its exponential reduction,
/// identical everything else.
#[derive(Debug, Clone)]
pub struct ObserverComparison {
    pub checkpoints: Vec<f64>,
    /// summed estimation error over agents at each checkpoint
    pub fixed_err: Vec<f64>,
    pub exp_err: Vec<f64>,
    pub fixed: SimTrace,
    pub exponential: SimTrace,
}

pub fn compare_observers(sc: &Scenario, checkpoints: &[f64]) -> Result<ObserverComparison> {
    let fixed = simulate(sc)?;
    let mut alt = sc.clone();
    alt.obs = sc.obs.exponential_variant();
    let exponential = simulate(&alt)?;
    let sample = |tr: &SimTrace, t: f64| -> f64 {
        let k = tr
            .t
            .iter()
            .position(|tt| (*tt - t).abs() < 1e-9)
            .unwrap_or_else(|| tr.t.partition_point(|tt| *tt < t).min(tr.t.len() - 1));
        tr.agents.iter().map(|a| a.vhat_err[k]).sum()
    };
    Ok(ObserverComparison {
        checkpoints: checkpoints.to_vec(),
        fixed_err: checkpoints.iter().map(|&t| sample(&fixed, t)).collect(),
        exp_err: checkpoints.iter().map(|&t| sample(&exponential, t)).collect(),
        fixed,
        exponential,
    })
}

/// CSV column header for [`write_trace_csv`].
pub fn trace_csv_header(tr: &SimTrace) -> String {
    let q = tr.v.first().map_or(0, |v| v.len());
    let mut cols = vec!["t".to_string(), "attack".to_string()];
    for c in 0..q {
        cols.push(format!("v{}", c + 1));
    }
    for (i, a) in tr.agents.iter().enumerate() {
        let id = i + 1;
        let n = a.x.first().map_or(0, |x| x.len());
        let m = a.theta_hat.first().map_or(0, |t| t.len());
        for s in 0..n {
            cols.push(format!("x{id}_{}", s + 1));
        }
        cols.push(format!("e{id}"));
        for c in 0..q {
            cols.push(format!("vhat{id}_{}", c + 1));
        }
        cols.push(format!("vhat_err{id}"));
        for c in 0..q {
            cols.push(format!("epsn{id}_{}", c + 1));
        }
        for j in 0..m {
            cols.push(format!("theta_hat{id}_{}", j + 1));
        }
        cols.push(format!("u{id}"));
        for s in 0..n {
            cols.push(format!("z{id}_{}", s + 1));
        }
    }
    cols.join(",")
}

/// One row per nominal grid point, columns per [`trace_csv_header`].
pub fn write_trace_csv(tr: &SimTrace, out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "{}", trace_csv_header(tr))?;
    for k in 0..tr.t.len() {
        let mut row = vec![format!("{:.6}", tr.t[k]), (tr.attack[k] as u8).to_string()];
        let push_vec = |row: &mut Vec<String>, v: &Vector| {
            for x in v.iter() {
                row.push(format!("{x:.9e}"));
            }
        };
        push_vec(&mut row, &tr.v[k]);
        for a in &tr.agents {
            push_vec(&mut row, &a.x[k]);
            row.push(format!("{:.9e}", a.e[k]));
            push_vec(&mut row, &a.vhat[k]);
            row.push(format!("{:.9e}", a.vhat_err[k]));
            push_vec(&mut row, &a.eps_n[k]);
            push_vec(&mut row, &a.theta_hat[k]);
            row.push(format!("{:.9e}", a.u[k]));
            push_vec(&mut row, &a.z[k]);
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// The built-in benchmark scenario: four one-link manipulators on a cycle
/// with leader links into agents 1 and 2, the published attack table, and
/// the published gains and initial conditions.
pub fn paper_scenario() -> Scenario {
    let topo = Topology::from_edges(4, &[(1, 2), (2, 3), (3, 4), (4, 1)], &[1, 2]).unwrap();
    let horizon = 60.0;
    let sched = DosSchedule::new(&crate::dos::bench_attack_edges(), 4.0, 0.1, horizon).unwrap();
    let exo = Exosystem::new(crate::numkit::Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
    let agents: Vec<AgentModel> = (1..=4).map(AgentModel::manipulator).collect();
    let obs = ObserverParams {
        delta: [4.0, 6.0, 6.0],
        mu: [1.6, 2.1, 4.1],
        a: 3,
        b: 7,
        eps_sing: 1e-6,
    };
    let gains: Vec<AgentGains> =
        (0..4).map(|_| AgentGains::uniform(3, 4, 1, 2.0, 1.5, 2.0, 0.01, 1.0, 0.1, 11.0, 0.5)).collect();
    let init = InitialConditions {
        v0: Vector::from(vec![0.62, -0.40]),
        x0: vec![
            Vector::from(vec![-0.16, -0.28, 0.11]),
            Vector::from(vec![0.19, 0.46, 0.14]),
            Vector::from(vec![0.15, 0.25, 0.32]),
            Vector::from(vec![0.29, 0.15, -0.23]),
        ],
        vhat0: vec![
            Vector::from(vec![0.12, -0.13]),
            Vector::from(vec![-0.15, 0.10]),
            Vector::from(vec![-0.20, 0.54]),
            Vector::from(vec![0.16, 0.85]),
        ],
        eps0: None,
        theta_hat0: None,
    };
    Scenario {
        topo,
        sched,
        exo,
        agents,
        obs,
        gains,
        init,
        h: 1e-3,
        horizon,
        seed: 0,
        settle_threshold: 1e-3,
        settle_hold: 1.0,
        analysis: AnalysisParams {
            varpi: 0.5,
            c_s: 2.0,
            reference: ReferenceValues {
                c2: Some(4.6290),
                c_bound: Some(3.6784),
                t_o: Some(24.9113),
            },
        },
    }
}
