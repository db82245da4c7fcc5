use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::filippov::pseudo_roots;
use crate::model::{region_equilibrium, ModelParams, Side, State};

/// Residual below which a point counts as an equilibrium.
pub const EQ_TOL: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    StableNode,
    StableFocus,
    UnstableFocus,
    UnstableNode,
    Saddle,
}

impl EquilibriumKind {
    pub fn from_trace_det(trace: f64, det: f64) -> Self {
        if det < 0.0 {
            return EquilibriumKind::Saddle;
        }
        let focus = trace * trace - 4.0 * det < 0.0;
        match (trace < 0.0, focus) {
            (true, true) => EquilibriumKind::StableFocus,
            (true, false) => EquilibriumKind::StableNode,
            (false, true) => EquilibriumKind::UnstableFocus,
            (false, false) => EquilibriumKind::UnstableNode,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumKind::StableNode => "stable-node",
            EquilibriumKind::StableFocus => "stable-focus",
            EquilibriumKind::UnstableFocus => "unstable-focus",
            EquilibriumKind::UnstableNode => "unstable-node",
            EquilibriumKind::Saddle => "saddle",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, EquilibriumKind::StableNode | EquilibriumKind::StableFocus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub state: State,
    pub params: ModelParams,
    pub trace: f64,
    pub det: f64,
    /// `trace² − 4 det`.
    pub discriminant: f64,
    pub kind: EquilibriumKind,
    pub residual: f64,
}

impl EquilibriumRecord {
    /// Build a record at a converged state.
    pub fn at(state: State, p: &ModelParams) -> Self {
        let jet = Jet::at(state, p);
        let (trace, det) = (jet.trace(), jet.det());
        Self {
            state,
            params: *p,
            trace,
            det,
            discriminant: trace * trace - 4.0 * det,
            kind: EquilibriumKind::from_trace_det(trace, det),
            residual: jet.f[0].abs().max(jet.f[1].abs()),
        }
    }
}

fn require_smooth(p: &ModelParams) -> Result<()> {
    p.validate()?;
    if p.epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("smooth equilibria require epsilon > 0".into()))
    }
}

/// Damped Newton from `guess` with the analytic Jacobian.
pub fn solve_equilibrium(p: &ModelParams, guess: State) -> Result<EquilibriumRecord> {
    require_smooth(p)?;
    let res = |s: State| {
        let jet = Jet::at(s, p);
        (jet.f[0].abs().max(jet.f[1].abs()), jet)
    };
    let mut s = guess;
    let (mut r, mut jet) = res(s);
    for _ in 0..50 {
        if r < 1e-13 {
            break;
        }
        let det = jet.det();
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (-jet.f[0] * jet.j[1][1] + jet.f[1] * jet.j[0][1]) / det;
        let dy = (-jet.j[0][0] * jet.f[1] + jet.j[1][0] * jet.f[0]) / det;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = State::new(s.x + lambda * dx, s.y + lambda * dy);
            let (rt, jt) = res(trial);
            if rt < r {
                s = trial;
                r = rt;
                jet = jt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if r < EQ_TOL {
        Ok(EquilibriumRecord::at(s, p))
    } else {
        Err(Error::NoConvergence { residual: r })
    }
}

/// Density anomaly of the equilibrium with mixing rate `k`, minus the actual
/// anomaly `u`: zero exactly at equilibria.
fn reduced(u: f64, p: &ModelParams) -> f64 {
    let k = p.kappa1 + p.delta_kappa() * crate::model::switching_value(u, p.epsilon);
    p.mu / k - 1.0 / (1.0 + k) - p.eta - u
}

/// All equilibria.
///
/// Every equilibrium has `x = 1/(1+k)`, `y = μ/k` for its own mixing rate
/// `k ∈ (κ₁, κ₂)`, so its density anomaly `u` solves a scalar equation on a
/// bounded interval. That equation is scanned for sign changes and near-zero
/// minima, the PWS-limit candidates are added as seeds, and every seed is
/// polished by Newton on the planar system.
pub fn equilibria_all(p: &ModelParams) -> Result<Vec<EquilibriumRecord>> {
    require_smooth(p)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=200 {
        let k = p.kappa1 + p.delta_kappa() * i as f64 / 200.0;
        let u = p.mu / k - 1.0 / (1.0 + k) - p.eta;
        lo = lo.min(u);
        hi = hi.max(u);
    }
    let pad = 0.05 * (hi - lo).max(p.epsilon);
    let (lo, hi) = (lo - pad, hi + pad);
    let mut us: Vec<f64> = (0..=400)
        .map(|i| lo + (hi - lo) * i as f64 / 400.0)
        .collect();
    let w = 40.0 * p.epsilon;
    us.extend((0..=4000).map(|i| -w + 2.0 * w * i as f64 / 4000.0).filter(|u| *u > lo && *u < hi));
    us.sort_by(f64::total_cmp);
    us.dedup();
    let vals: Vec<f64> = us.iter().map(|&u| reduced(u, p)).collect();

    let mut seeds_u = Vec::new();
    for i in 0..us.len() - 1 {
        if vals[i] == 0.0 {
            seeds_u.push(us[i]);
        } else if vals[i] * vals[i + 1] < 0.0 {
            seeds_u.push(bisect(|u| reduced(u, p), us[i], us[i + 1]));
        } else if i > 0
            && vals[i].abs() < vals[i - 1].abs()
            && vals[i].abs() < vals[i + 1].abs()
            && vals[i].abs() < 1e-3
        {
            seeds_u.push(us[i]);
        }
    }
    let to_state = |u: f64| {
        let k = p.kappa1 + p.delta_kappa() * crate::model::switching_value(u, p.epsilon);
        State::new(1.0 / (1.0 + k), p.mu / k)
    };
    let mut seeds: Vec<State> = seeds_u.into_iter().map(to_state).collect();
    seeds.push(region_equilibrium(Side::R1, p));
    seeds.push(region_equilibrium(Side::R2, p));
    if let Some((a, b)) = pseudo_roots(p) {
        seeds.push(State::on_sigma(a, p.eta));
        seeds.push(State::on_sigma(b, p.eta));
    }

    let mut out: Vec<EquilibriumRecord> = Vec::new();
    for s in seeds {
        if let Ok(rec) = solve_equilibrium(p, s) {
            if !out.iter().any(|e| e.state.dist(rec.state) < DEDUP_TOL) {
                out.push(rec);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NotFound("no equilibrium found".into()));
    }
    out.sort_by(|a, b| a.state.x.total_cmp(&b.state.x));
    Ok(out)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}
