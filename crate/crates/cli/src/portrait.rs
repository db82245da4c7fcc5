//! `portrait`: everything needed to redraw a phase portrait.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use welander::continuation::equilibria_all;
use welander::filippov::{pseudo_equilibria, sliding_segment, tangency_point};
use welander::flow::{
    default_ic_grid, find_periodic_orbit, fmt_f64, integrate_pws, integrate_smooth, manifold_orbit, Branch,
    ManifoldDirection, PeriodicOrbit,
};
use welander::model::region_equilibrium;
use welander::{IntegrationConfig, ModelParams, Side, SlidingSegment, State, TangencyPoint, Trajectory};

pub const DEFAULT_DURATION: f64 = 60.0;
pub const DEFAULT_N_IC: usize = 5;
const MANIFOLD_DURATION: f64 = 40.0;

#[derive(Debug, Clone, Serialize)]
pub struct Orbit {
    pub initial: State,
    pub trajectory: Option<Trajectory>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifold {
    pub equilibrium: String,
    pub direction: ManifoldDirection,
    pub branch: Branch,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub name: String,
    pub state: State,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Portrait {
    pub params: ModelParams,
    /// `y = x + η` drawn over this `x` range.
    pub sigma_x: (f64, f64),
    pub sliding_segment: Option<SlidingSegment>,
    pub tangencies: Vec<TangencyPoint>,
    pub equilibria: Vec<Point>,
    pub orbits: Vec<Orbit>,
    pub manifolds: Vec<Manifold>,
    pub periodic_orbit: Option<PeriodicOrbit>,
}

fn equilibria(p: &ModelParams) -> anyhow::Result<Vec<Point>> {
    if !p.is_pws() {
        return Ok(equilibria_all(p)?
            .iter()
            .enumerate()
            .map(|(i, e)| Point { name: format!("e{}", i + 1), state: e.state, kind: e.kind.as_str().to_string() })
            .collect());
    }
    let mut out = Vec::new();
    for (name, side) in [("p1", Side::R1), ("p2", Side::R2)] {
        let s = region_equilibrium(side, p);
        let u = s.y - s.x - p.eta;
        if (side == Side::R1 && u < 0.0) || (side == Side::R2 && u > 0.0) {
            out.push(Point { name: name.into(), state: s, kind: "node".into() });
        }
    }
    if p.eta != 0.0 {
        let qs = pseudo_equilibria(p)?;
        let names: &[&str] = if qs.len() == 1 { &["q"] } else { &["q-", "q+"] };
        for (q, name) in qs.iter().zip(names).filter(|(q, _)| q.admissible) {
            let kind = serde_json::to_value(q.kind)?.as_str().unwrap_or_default().to_string();
            out.push(Point { name: (*name).into(), state: q.location, kind: format!("pseudo-{kind}") });
        }
    }
    Ok(out)
}

fn run(s0: State, p: &ModelParams, cfg: &IntegrationConfig, t: f64) -> welander::Result<Trajectory> {
    if p.is_pws() {
        integrate_pws(s0, p, cfg, t)
    } else {
        integrate_smooth(s0, p, cfg, t)
    }
}

pub fn portrait(
    p: &ModelParams,
    cfg: &IntegrationConfig,
    ics: Option<Vec<State>>,
    n_ic: usize,
    duration: f64,
) -> anyhow::Result<Portrait> {
    if !(duration > 0.0) {
        return Err(welander::Error::InvalidParameter("duration must be positive".into()).into());
    }
    let ics = ics.unwrap_or_else(|| default_ic_grid(p, n_ic));
    let orbits: Vec<Orbit> = ics
        .par_iter()
        .map(|&s0| match run(s0, p, cfg, duration) {
            Ok(tr) => Orbit { initial: s0, trajectory: Some(tr), error: None },
            Err(e) => Orbit { initial: s0, trajectory: None, error: Some(e.to_string()) },
        })
        .collect();
    let eqs = equilibria(p)?;
    use ManifoldDirection::*;
    let jobs: Vec<(&Point, ManifoldDirection, Branch)> = eqs
        .iter()
        .flat_map(|e| {
            [StrongStable, Stable, Unstable, StrongUnstable]
                .into_iter()
                .flat_map(move |d| [(e, d, Branch::Plus), (e, d, Branch::Minus)])
        })
        .collect();
    let manifolds: Vec<Manifold> = jobs
        .par_iter()
        .filter_map(|&(e, d, b)| {
            manifold_orbit(e.state, p, d, b, cfg, MANIFOLD_DURATION).ok().map(|trajectory| Manifold {
                equilibrium: e.name.clone(),
                direction: d,
                branch: b,
                trajectory,
            })
        })
        .collect();
    let xs = ics.iter().map(|s| s.x).chain(eqs.iter().map(|e| e.state.x));
    let (lo, hi) = xs.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
    let (tangencies, segment) = if p.is_pws() {
        (vec![tangency_point(Side::R1, p), tangency_point(Side::R2, p)], sliding_segment(p))
    } else {
        (Vec::new(), None)
    };
    let periodic_orbit = if p.eta == 0.0 && p.is_pws() { None } else { find_periodic_orbit(p, cfg, None).ok().flatten() };
    Ok(Portrait {
        params: *p,
        sigma_x: (lo, hi),
        sliding_segment: segment,
        tangencies,
        equilibria: eqs,
        orbits,
        manifolds,
        periodic_orbit,
    })
}

impl Portrait {
    /// Long format `object,id,t,x,y,label`: one row per sample of every
    /// orbit, manifold and periodic orbit, plus the Σ line, sliding segment,
    /// tangency and equilibrium markers. Failed orbits get one `error` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("object,id,t,x,y,label\n");
        let mut row = |obj: &str, id: &str, t: Option<f64>, st: State, label: &str| {
            let t = t.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(s, "{obj},{id},{t},{},{},{label}", fmt_f64(st.x), fmt_f64(st.y));
        };
        let eta = self.params.eta;
        row("sigma", "", None, State::on_sigma(self.sigma_x.0, eta), "");
        row("sigma", "", None, State::on_sigma(self.sigma_x.1, eta), "");
        if let Some(seg) = &self.sliding_segment {
            let label = serde_json::to_value(seg.stability).ok();
            let label = label.as_ref().and_then(|v| v.as_str()).unwrap_or("");
            row("sliding", "", None, State::on_sigma(seg.x_lo, eta), label);
            row("sliding", "", None, State::on_sigma(seg.x_hi, eta), label);
        }
        for t in &self.tangencies {
            let vis = serde_json::to_value(t.visibility).ok();
            row("tangency", &format!("{:?}", t.field), None, t.location, vis.as_ref().and_then(|v| v.as_str()).unwrap_or(""));
        }
        for e in &self.equilibria {
            row("equilibrium", &e.name, None, e.state, &e.kind);
        }
        for (i, o) in self.orbits.iter().enumerate() {
            let id = i.to_string();
            match (&o.trajectory, &o.error) {
                (Some(tr), _) => {
                    for (t, st, r) in tr.samples() {
                        row("orbit", &id, Some(t), st, r.csv_label());
                    }
                }
                (None, err) => row("orbit", &id, None, o.initial, &format!("error: {}", err.as_deref().unwrap_or("")).replace(',', ";")),
            }
        }
        for m in &self.manifolds {
            let id = format!("{}:{:?}:{:?}", m.equilibrium, m.direction, m.branch);
            for (t, st, r) in m.trajectory.samples() {
                row("manifold", &id, Some(t), st, r.csv_label());
            }
        }
        if let Some(po) = &self.periodic_orbit {
            for st in &po.samples {
                row("periodic", "", None, *st, "");
            }
        }
        s
    }
}
