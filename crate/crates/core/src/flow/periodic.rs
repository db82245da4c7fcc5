//! Poincaré return maps and periodic orbits.
//!
//! For `ε = 0` the section is the crossing part of Σ, traversed from R₁ into
//! R₂. For `ε > 0` it is the horizontal half-line to the right of an unstable
//! equilibrium, parametrised by the distance `r` from it.

use serde::{Deserialize, Serialize};

use super::pws::{integrate_pws_with, Control};
use super::rk::illinois;
use super::trajectory::{Direction, EventKind, IntegrationConfig, Termination};
use super::Adaptive;
use crate::continuation::equilibria_all;
use crate::error::{Error, Result};
use crate::filippov::lie1;
use crate::model::{smooth_rhs, ModelParams, Side, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Point of the orbit on the section.
    pub representative_state: State,
    pub period: f64,
    /// Closed polyline over one period.
    pub samples: Vec<State>,
    pub stability: OrbitStability,
    /// Derivative of the return map at the fixed point.
    pub multiplier: f64,
}

impl PeriodicOrbit {
    /// Peak-to-peak extent `(Δx, Δy)` of the orbit.
    pub fn amplitude(&self) -> (f64, f64) {
        let (mut xl, mut xh, mut yl, mut yh) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for s in &self.samples {
            xl = xl.min(s.x);
            xh = xh.max(s.x);
            yl = yl.min(s.y);
            yh = yh.max(s.y);
        }
        (xh - xl, yh - yl)
    }
}

struct Return {
    coord: f64,
    period: f64,
    samples: Vec<State>,
}

/// Next crossing of Σ into R₂ of the piecewise-smooth orbit that starts at
/// `(x_cross, x_cross + η)`.
pub fn return_map(x_cross: f64, p: &ModelParams, cfg: &IntegrationConfig) -> Result<f64> {
    pws_return(x_cross, p, cfg).map(|r| r.coord)
}

fn pws_return(x_cross: f64, p: &ModelParams, cfg: &IntegrationConfig) -> Result<Return> {
    if !p.is_pws() {
        return Err(Error::Domain("return_map on Σ requires epsilon = 0".into()));
    }
    if !(lie1(Side::R1, x_cross, p) > 0.0 && lie1(Side::R2, x_cross, p) > 0.0) {
        return Err(Error::Domain(format!(
            "x = {x_cross} is not on the R1 -> R2 crossing part of the switching line"
        )));
    }
    let s0 = State::on_sigma(x_cross, p.eta);
    let mut hit = None;
    let tr = integrate_pws_with(s0, p, cfg, cfg.t_max, Direction::Forward, |ev| {
        if ev.kind == (EventKind::Crossing { into: Side::R2 }) {
            hit = Some(*ev);
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    match (tr.termination, hit) {
        (Termination::Stopped, Some(ev)) => Ok(Return {
            coord: ev.state.x,
            period: ev.t,
            samples: tr.samples().map(|(_, s, _)| s).collect(),
        }),
        _ => Err(Error::Escape { t_max: cfg.t_max }),
    }
}

/// Next same-direction crossing of the half-line `y = y_eq, x > x_eq` by the
/// smooth orbit starting at `(x_eq + r, y_eq)`; returns the new `r`.
fn smooth_return(
    eq: State,
    r: f64,
    p: &ModelParams,
    cfg: &IntegrationConfig,
) -> Result<Return> {
    let f = |y: &[f64; 2]| smooth_rhs(State::new(y[0], y[1]), p);
    let s0 = State::new(eq.x + r, eq.y);
    let dir = smooth_rhs(s0, p)[1].signum();
    if dir == 0.0 {
        return Err(Error::Domain("section tangent to the flow".into()));
    }
    let g = |y: &[f64; 2]| dir * (y[1] - eq.y);
    let mut drv = Adaptive::new(&f, 0.0, s0.to_array(), cfg);
    let mut samples = vec![s0];
    let mut left = false;
    while drv.t < cfg.t_max {
        let info = drv.step(cfg.t_max)?;
        let g0 = g(&info.y0);
        let g1 = g(&drv.y);
        if g0 < 0.0 {
            left = true;
        }
        if left && g0 < 0.0 && g1 >= 0.0 && drv.y[0] > eq.x {
            let (s, _) = illinois(
                |s| g(&drv.partial(&info, s)),
                0.0,
                info.h,
                g0,
                g1,
                1e-14,
                100,
            );
            let y = drv.partial(&info, s);
            let hit = State::new(y[0], eq.y);
            samples.push(hit);
            return Ok(Return {
                coord: hit.x - eq.x,
                period: info.t0 + s,
                samples,
            });
        }
        samples.push(State::from_array(drv.y));
    }
    Err(Error::Escape { t_max: cfg.t_max })
}

/// Locate a periodic orbit by bracketing a fixed point of the return map.
///
/// `bracket` is a range of section coordinates: `x` on Σ for `ε = 0`, the
/// distance `r` from the unstable equilibrium for `ε > 0`. Without one, a
/// default range is scanned.
pub fn find_periodic_orbit(
    p: &ModelParams,
    cfg: &IntegrationConfig,
    bracket: Option<(f64, f64)>,
) -> Result<Option<PeriodicOrbit>> {
    p.validate()?;
    cfg.validate()?;
    if p.is_pws() {
        let x_c = (1.0 - p.mu + p.eta * p.kappa1).max(1.0 - p.mu + p.eta * p.kappa2);
        let (a, b) = bracket.unwrap_or((x_c + 1e-6, x_c + 1.5));
        let a = a.max(x_c + 1e-9);
        let map = |x: f64| pws_return(x, p, cfg);
        fixed_point(map, a, b, |x| State::on_sigma(x, p.eta), false)
    } else {
        let eqs = equilibria_all(p)?;
        let Some(eq) = eqs
            .iter()
            .filter(|e| e.trace > 0.0 && e.det > 0.0)
            .map(|e| e.state)
            .next()
        else {
            return Ok(None);
        };
        let (a, b) = bracket.unwrap_or((1e-5, 1.0));
        let map = |r: f64| smooth_return(eq, r, p, cfg);
        fixed_point(map, a, b, |r| State::new(eq.x + r, eq.y), true)
    }
}

fn fixed_point<M, S>(
    map: M,
    a: f64,
    b: f64,
    state: S,
    geometric: bool,
) -> Result<Option<PeriodicOrbit>>
where
    M: Fn(f64) -> Result<Return>,
    S: Fn(f64) -> State,
{
    const SCAN: usize = 40;
    let pts: Vec<f64> = (0..=SCAN)
        .map(|i| {
            let w = i as f64 / SCAN as f64;
            if geometric && a > 0.0 {
                a * (b / a).powf(w)
            } else {
                a + (b - a) * w
            }
        })
        .collect();
    let disp = |c: f64| map(c).ok().map(|r| r.coord - c);
    let vals: Vec<Option<f64>> = pts.iter().map(|&c| disp(c)).collect();
    for i in 0..SCAN {
        let (Some(da), Some(db)) = (vals[i], vals[i + 1]) else {
            continue;
        };
        if da == 0.0 || da * db < 0.0 {
            let (lo, hi) = (pts[i], pts[i + 1]);
            let mut failed = false;
            let (c, _) = illinois(
                |c| {
                    disp(c).unwrap_or_else(|| {
                        failed = true;
                        0.0
                    })
                },
                lo,
                hi,
                da,
                db,
                1e-12 * lo.abs().max(1e-3),
                200,
            );
            if failed {
                continue;
            }
            let ret = map(c)?;
            let h = 1e-6 * c.abs().max(1e-3);
            let slope = match (map(c + h), map(c - h)) {
                (Ok(r1), Ok(r0)) => (r1.coord - r0.coord) / (2.0 * h),
                _ => f64::NAN,
            };
            let stability = if slope.abs() < 1.0 {
                OrbitStability::Stable
            } else {
                OrbitStability::Unstable
            };
            return Ok(Some(PeriodicOrbit {
                representative_state: state(c),
                period: ret.period,
                samples: ret.samples,
                stability,
                multiplier: slope,
            }));
        }
    }
    Ok(None)
}

/// The section coordinate of an orbit's representative point for `ε > 0`,
/// measured from the unstable equilibrium; exposed for diagnostics.
pub fn smooth_return_map(
    eq: State,
    r: f64,
    p: &ModelParams,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    if p.is_pws() {
        return Err(Error::Domain("smooth return map requires epsilon > 0".into()));
    }
    smooth_return(eq, r, p, cfg).map(|r| r.coord)
}
