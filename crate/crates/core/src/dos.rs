//! Denial-of-service attack schedules.
//!
//! Attacks are half-open per-edge outage intervals `[start, end)` on the
//! leader-augmented graph (node 0 = exosystem). The switching signal
//! `sigma_ij(t)` is 0 while edge `(i,j)` is attacked and 1 otherwise. The
//! graph-level attacked-time set `Psi_D(0, t)` is the union across edges,
//! and the duration budget bounds its measure by `t/p_d + nu_d`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::topology::Topology;
use crate::{Error, Result};

/// Undirected edge key; normalizes to `(max, min)` so `(i,j)` and `(j,i)`
/// share one schedule.
fn edge_key(i: usize, j: usize) -> (usize, usize) {
    (i.max(j), i.min(j))
}

/// Per-edge DoS intervals plus the `(p_d, nu_d)` duration budget.
#[derive(Debug, Clone, PartialEq)]
pub struct DosSchedule {
    edges: BTreeMap<(usize, usize), Vec<(f64, f64)>>,
    pub p_d: f64,
    pub nu_d: f64,
    pub horizon: f64,
}

/// Outcome of the duration-budget check.
///
/// `ok` states whether the schedule fits its budget over the declared
/// window, i.e. `|Psi_D(0, horizon)| <= horizon/p_d + nu_d`. The margin
/// `budget(t) - |Psi_D(0,t)|` is additionally minimized pointwise over the
/// critical instants (t = 0, attack right endpoints, horizon) and reported
/// as `worst_margin`/`worst_t`; a negative value there flags a transient
/// overdraw even when the window-level check passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetReport {
    pub ok: bool,
    pub worst_margin: f64,
    pub worst_t: f64,
    /// margin at the horizon itself (the quantity `ok` is keyed on)
    pub horizon_margin: f64,
}

impl DosSchedule {
    /// Empty schedule (no attacks).
    pub fn empty(p_d: f64, nu_d: f64, horizon: f64) -> Result<Self> {
        DosSchedule::new(&[], p_d, nu_d, horizon)
    }

    /// Build from `(i, j, intervals)` triples. Intervals are sorted and
    /// coalesced per edge; they must lie within `[0, horizon)`.
    pub fn new(
        edges: &[(usize, usize, Vec<(f64, f64)>)],
        p_d: f64,
        nu_d: f64,
        horizon: f64,
    ) -> Result<Self> {
        if p_d <= 1.0 {
            return Err(Error::invalid("p_d", format!("must exceed 1, got {p_d}")));
        }
        if nu_d <= 0.0 {
            return Err(Error::invalid("nu_d", format!("must be positive, got {nu_d}")));
        }
        if horizon <= 0.0 {
            return Err(Error::invalid("horizon", format!("must be positive, got {horizon}")));
        }
        let mut map: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
        for (i, j, ivs) in edges {
            if i == j {
                return Err(Error::invalid("edge", format!("self loop ({i},{i})")));
            }
            for &(s, e) in ivs {
                if !(0.0..horizon).contains(&s) || e <= s || e > horizon {
                    return Err(Error::invalid(
                        "interval",
                        format!("[{s},{e}) out of range for horizon {horizon}"),
                    ));
                }
            }
            map.entry(edge_key(*i, *j)).or_default().extend(ivs.iter().copied());
        }
        for ivs in map.values_mut() {
            *ivs = merge_intervals(ivs);
        }
        Ok(DosSchedule { edges: map, p_d, nu_d, horizon })
    }

    /// Edges that carry at least one attack interval, as `(max, min)` pairs.
    pub fn attacked_edges(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<(f64, f64)>)> {
        self.edges.iter()
    }

    /// Switching signal for edge `(i, j)` at time `t`: 0 during an attack,
    /// 1 otherwise. Unknown edges are never attacked.
    pub fn sigma(&self, i: usize, j: usize, t: f64) -> f64 {
        match self.edges.get(&edge_key(i, j)) {
            None => 1.0,
            Some(ivs) => {
                // intervals sorted and disjoint: find the last start <= t
                match ivs.partition_point(|&(s, _)| s <= t) {
                    0 => 1.0,
                    k => {
                        let (_, e) = ivs[k - 1];
                        if t < e {
                            0.0
                        } else {
                            1.0
                        }
                    }
                }
            }
        }
    }

    /// Sorted disjoint union of all edges' attack intervals clipped to
    /// `[t0, t1]`.
    pub fn attacked_union(&self, t0: f64, t1: f64) -> Vec<(f64, f64)> {
        let mut all: Vec<(f64, f64)> = self
            .edges
            .values()
            .flatten()
            .filter_map(|&(s, e)| {
                let (cs, ce) = (s.max(t0), e.min(t1));
                (cs < ce).then_some((cs, ce))
            })
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        merge_intervals(&all)
    }

    /// `|Psi_D(t0, t1)|`: total attacked time in `[t0, t1]`.
    pub fn attacked_length(&self, t0: f64, t1: f64) -> f64 {
        self.attacked_union(t0, t1).iter().map(|(s, e)| e - s).sum()
    }

    /// Duration-budget check against `t/p_d + nu_d`; see [`BudgetReport`].
    ///
    /// `|Psi_D|` grows at slope <= 1 while the budget grows at slope
    /// `1/p_d`, so the pointwise margin only attains local minima at right
    /// endpoints of attacked intervals (plus the trivial t = 0 endpoint);
    /// checking those instants and the horizon is exhaustive.
    pub fn check_duration_budget(&self) -> BudgetReport {
        let union = self.attacked_union(0.0, self.horizon);
        let budget = |t: f64| t / self.p_d + self.nu_d;
        let mut worst_margin = self.nu_d; // margin at t = 0
        let mut worst_t = 0.0;
        let mut attacked = 0.0;
        for &(s, e) in &union {
            attacked += e - s;
            let m = budget(e) - attacked;
            if m < worst_margin {
                worst_margin = m;
                worst_t = e;
            }
        }
        let horizon_margin = budget(self.horizon) - attacked;
        if horizon_margin < worst_margin {
            worst_margin = horizon_margin;
            worst_t = self.horizon;
        }
        BudgetReport { ok: horizon_margin >= -1e-12, worst_margin, worst_t, horizon_margin }
    }
}

fn merge_intervals(sorted_or_not: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut ivs = sorted_or_not.to_vec();
    ivs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
    for (s, e) in ivs {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

/// Parameters for the randomized schedule generator.
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub p_d: f64,
    pub nu_d: f64,
    pub horizon: f64,
    /// mean attack-epoch duration (exponential); 0 disables attacks
    pub mean_on: f64,
    /// mean gap between attack epochs (exponential)
    pub mean_off: f64,
}

/// Generate a schedule that satisfies the duration budget pointwise, by
/// sampling graph-level attack epochs with exponential on/off durations and
/// truncating any epoch that would overdraw the budget at its right
/// endpoint. Each epoch hits a random nonempty subset of the topology's
/// edges. Deterministic per seed.
pub fn generate_schedule(seed: u64, topo: &Topology, gp: GenParams) -> Result<DosSchedule> {
    if gp.p_d <= 1.0 {
        return Err(Error::invalid("p_d", format!("must exceed 1, got {}", gp.p_d)));
    }
    if gp.mean_on < 0.0 || gp.mean_off < 0.0 {
        return Err(Error::invalid("mean_on/mean_off", "must be nonnegative"));
    }
    let edges = topo.edges();
    if gp.mean_on == 0.0 || edges.is_empty() {
        return DosSchedule::empty(gp.p_d, gp.nu_d, gp.horizon);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_edge: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
    let mut t = 0.0;
    let mut attacked = 0.0; // |Psi_D(0, t)| accumulated over epochs
    let mut placed = 0usize;
    const MIN_DUR: f64 = 1e-6;
    let exp = |rng: &mut ChaCha8Rng, mean: f64| -> f64 {
        // inverse-CDF sampling keeps the stream compatible across platforms
        let u: f64 = rng.gen_range(0.0..1.0f64);
        -mean * (1.0 - u).ln()
    };
    while t < gp.horizon {
        t += exp(&mut rng, gp.mean_off).max(MIN_DUR);
        if t >= gp.horizon {
            break;
        }
        let want = exp(&mut rng, gp.mean_on);
        // truncate so the budget holds at the epoch's right endpoint:
        // attacked + dur <= (t + dur)/p_d + nu_d
        let slack = t / gp.p_d + gp.nu_d - attacked;
        let max_dur = slack / (1.0 - 1.0 / gp.p_d);
        let dur = want.min(max_dur).min(gp.horizon - t);
        if dur <= MIN_DUR {
            continue;
        }
        // nonempty random edge subset for this epoch
        let mut any = false;
        let chosen: Vec<(usize, usize)> = edges
            .iter()
            .filter(|_| {
                let take = rng.gen_bool(0.5);
                any |= take;
                take
            })
            .copied()
            .collect();
        let chosen = if any { chosen } else { vec![edges[rng.gen_range(0..edges.len())]] };
        for (i, j) in chosen {
            per_edge.entry(edge_key(i, j)).or_default().push((t, t + dur));
        }
        attacked += dur;
        t += dur;
        placed += 1;
    }
    if placed == 0 {
        return Err(Error::Infeasible(format!(
            "no attack epoch fits the budget (mean_on={}, p_d={}, nu_d={}, horizon={})",
            gp.mean_on, gp.p_d, gp.nu_d, gp.horizon
        )));
    }
    let triples: Vec<(usize, usize, Vec<(f64, f64)>)> =
        per_edge.into_iter().map(|((i, j), ivs)| (i, j, ivs)).collect();
    let sched = DosSchedule::new(&triples, gp.p_d, gp.nu_d, gp.horizon)?;
    debug_assert!(sched.check_duration_budget().worst_margin >= -1e-9);
    Ok(sched)
}

/// Attack intervals of the `N = 4` manipulator bench (Table-style data over
/// `[0, 20)`), reused by the built-in scenario and several tests.
pub fn bench_attack_edges() -> Vec<(usize, usize, Vec<(f64, f64)>)> {
    vec![
        (1, 0, vec![(0.55, 1.2), (1.95, 2.54), (3.65, 4.5)]),
        (2, 0, vec![(0.01, 0.5), (1.3, 1.9), (4.8, 5.2), (8.0, 8.2)]),
        (
            2,
            1,
            vec![
                (0.01, 0.5),
                (0.55, 1.2),
                (1.3, 1.9),
                (1.95, 2.54),
                (3.65, 4.5),
                (4.8, 5.2),
                (8.0, 8.2),
            ],
        ),
        (
            3,
            2,
            vec![
                (0.01, 0.5),
                (0.55, 1.2),
                (1.3, 1.9),
                (1.95, 2.54),
                (2.7, 3.64),
                (3.65, 4.5),
                (4.8, 5.2),
                (8.0, 8.2),
            ],
        ),
        (
            4,
            3,
            vec![
                (0.01, 0.5),
                (0.55, 1.2),
                (1.3, 1.9),
                (1.95, 2.54),
                (2.7, 3.64),
                (3.65, 4.5),
                (4.8, 5.2),
                (7.7, 7.9),
                (8.0, 8.2),
            ],
        ),
        (
            1,
            4,
            vec![
                (0.01, 0.5),
                (0.55, 1.2),
                (1.3, 1.9),
                (1.95, 2.54),
                (3.65, 4.5),
                (4.8, 5.2),
                (7.7, 7.9),
                (8.0, 8.2),
            ],
        ),
    ]
}
