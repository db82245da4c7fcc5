//! Long-time fate of a grid of initial conditions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pws::integrate_pws;
use super::smooth::integrate_smooth;
use super::trajectory::{IntegrationConfig, Trajectory};
use crate::continuation::{equilibria_all, solve_equilibrium, EquilibriumRecord};
use crate::error::Result;
use crate::model::{region_equilibrium, ModelParams, Side, State};

/// Endpoints closer than this belong to the same equilibrium.
pub const CLUSTER_TOL: f64 = 1e-5;
/// Peak-to-peak `y` over the second half of the run above which an orbit may
/// be oscillating.
pub const CYCLE_AMPLITUDE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IcOutcome {
    /// Converged to equilibrium cluster `index`.
    Equilibrium { index: usize },
    Cycle,
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateCluster {
    pub state: State,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub initial_conditions: Vec<State>,
    pub outcomes: Vec<IcOutcome>,
    /// Attracting equilibria and pseudo-equilibria, in order of discovery.
    pub equilibria: Vec<StateCluster>,
    /// Number of initial conditions that ended on a sustained oscillation.
    pub cycles: usize,
    pub unknown: usize,
    /// All equilibria of the smooth system found by Newton seeding, stable
    /// or not; empty for `ε = 0`.
    pub newton_equilibria: Vec<EquilibriumRecord>,
}

impl Census {
    pub fn has_cycle(&self) -> bool {
        self.cycles > 0
    }
}

/// `n × n` grid over the rectangle `[x0, x1] × [y0, y1]`, row by row in `y`.
pub fn ic_grid(x: (f64, f64), y: (f64, f64), n: usize) -> Vec<State> {
    let at = |(a, b): (f64, f64), i: usize| {
        if n <= 1 {
            0.5 * (a + b)
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    };
    (0..n)
        .flat_map(|j| (0..n).map(move |i| State::new(at(x, i), at(y, j))))
        .collect()
}

/// A grid around Σ and both region equilibria.
pub fn default_ic_grid(p: &ModelParams, n: usize) -> Vec<State> {
    let p1 = region_equilibrium(Side::R1, p);
    let p2 = region_equilibrium(Side::R2, p);
    let ylo = p.eta.min(p2.y).min(p1.y.max(-3.0)).min(0.0) - 0.5;
    let yhi = (p.eta + 1.5).max(p2.y + 0.5).max(p1.y.min(3.0) + 0.5).max(1.0);
    ic_grid((0.0, 1.5), (ylo, yhi), n)
}

enum Fate {
    Point(State),
    Cycle,
    Unknown(String),
}

fn y_range(tr: &Trajectory, t0: f64, t1: f64) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (t, s, _) in tr.samples() {
        if t >= t0 && t <= t1 {
            lo = lo.min(s.y);
            hi = hi.max(s.y);
        }
    }
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

fn fate(s0: State, p: &ModelParams, cfg: &IntegrationConfig) -> Fate {
    let t_max = cfg.t_max;
    let tr = if p.is_pws() {
        integrate_pws(s0, p, cfg, t_max)
    } else {
        integrate_smooth(s0, p, cfg, t_max)
    };
    let tr = match tr {
        Ok(tr) => tr,
        Err(e) => return Fate::Unknown(e.to_string()),
    };
    let end = tr.final_state();
    if !(end.x.is_finite() && end.y.is_finite()) {
        return Fate::Unknown("non-finite state".into());
    }
    let t_end = tr.final_time();
    if t_end < t_max {
        // Stopped on a pseudo-equilibrium.
        return Fate::Point(end);
    }
    let early = y_range(&tr, 0.5 * t_max, 0.75 * t_max);
    let late = y_range(&tr, 0.75 * t_max, t_max);
    if late > CYCLE_AMPLITUDE && late > 0.5 * early {
        return Fate::Cycle;
    }
    if p.is_pws() {
        return if late <= CYCLE_AMPLITUDE {
            Fate::Point(end)
        } else {
            Fate::Unknown(format!("still moving at t = {t_max}"))
        };
    }
    match solve_equilibrium(p, end) {
        Ok(rec) if rec.state.dist(end) < 1e-3 => Fate::Point(rec.state),
        _ if late <= CYCLE_AMPLITUDE => Fate::Point(end),
        _ => Fate::Unknown(format!("still moving at t = {t_max}")),
    }
}

/// Integrate every initial condition for `cfg.t_max` and sort the endpoints
/// into equilibria, sustained oscillations and undecided cases.
pub fn attractor_census(
    p: &ModelParams,
    cfg: &IntegrationConfig,
    ics: &[State],
) -> Result<Census> {
    p.validate()?;
    cfg.validate()?;
    let fates: Vec<Fate> = ics.par_iter().map(|&s| fate(s, p, cfg)).collect();
    let mut equilibria: Vec<StateCluster> = Vec::new();
    let mut outcomes = Vec::with_capacity(fates.len());
    let (mut cycles, mut unknown) = (0, 0);
    for f in fates {
        outcomes.push(match f {
            Fate::Point(s) => {
                let index = match equilibria.iter().position(|c| c.state.dist(s) < CLUSTER_TOL) {
                    Some(i) => {
                        equilibria[i].count += 1;
                        i
                    }
                    None => {
                        equilibria.push(StateCluster { state: s, count: 1 });
                        equilibria.len() - 1
                    }
                };
                IcOutcome::Equilibrium { index }
            }
            Fate::Cycle => {
                cycles += 1;
                IcOutcome::Cycle
            }
            Fate::Unknown(reason) => {
                unknown += 1;
                IcOutcome::Unknown { reason }
            }
        });
    }
    let newton_equilibria = if p.is_pws() {
        Vec::new()
    } else {
        equilibria_all(p).unwrap_or_default()
    };
    Ok(Census {
        initial_conditions: ics.to_vec(),
        outcomes,
        equilibria,
        cycles,
        unknown,
        newton_equilibria,
    })
}
