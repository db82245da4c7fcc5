//! Trajectory integration for the smooth and piecewise-smooth systems,
//! periodic-orbit detection, attractor census and invariant manifolds.

pub mod census;
pub mod manifold;
pub mod periodic;
pub mod pws;
pub mod rk;
pub mod smooth;
pub mod trajectory;

pub use census::{
    attractor_census, default_ic_grid, ic_grid, Census, IcOutcome, StateCluster,
};
pub use manifold::{manifold_orbit, manifold_start, Branch, ManifoldDirection};
pub use periodic::{find_periodic_orbit, return_map, OrbitStability, PeriodicOrbit};
pub use pws::{Control, integrate_pws, integrate_pws_with, PwsIntegrator};
pub use smooth::{integrate_smooth, integrate_smooth_dir, integrate_smooth_until};
pub use trajectory::{
    fmt_f64, Direction, Event, EventKind, IntegrationConfig, Regime, Segment, Termination,
    Trajectory,
};

use crate::error::{Error, Result};
use crate::model::State;
use rk::{dp45_step, initial_step, step_factor};

/// Adaptive Dormand–Prince driver for an autonomous field.
pub(crate) struct Adaptive<'a, F, const N: usize> {
    f: &'a F,
    rtol: f64,
    atol: f64,
    max_step: f64,
    pub h: f64,
    pub t: f64,
    pub y: [f64; N],
    pub k: [f64; N],
}

/// The accepted step just taken.
#[derive(Clone, Copy)]
pub(crate) struct StepInfo<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub k0: [f64; N],
    pub h: f64,
}

impl<'a, F, const N: usize> Adaptive<'a, F, N>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    pub fn new(f: &'a F, t: f64, y: [f64; N], cfg: &IntegrationConfig) -> Self {
        let k = f(&y);
        let h = initial_step(&y, &k, cfg.rel_tol, cfg.abs_tol).min(cfg.max_step);
        Self {
            f,
            rtol: cfg.rel_tol,
            atol: cfg.abs_tol,
            max_step: cfg.max_step,
            h,
            t,
            y,
            k,
        }
    }

    /// One accepted step, not beyond `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<StepInfo<N>> {
        let g = |_t: f64, y: &[f64; N]| (self.f)(y);
        loop {
            let remaining = t_stop - self.t;
            let h = self.h.min(remaining).min(self.max_step);
            if remaining <= 1e-14 * self.t.abs().max(1.0) {
                let info = StepInfo {
                    t0: self.t,
                    y0: self.y,
                    k0: self.k,
                    h: 0.0,
                };
                self.t = t_stop;
                return Ok(info);
            }
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow {
                    t: self.t,
                    state: state_of(&self.y),
                });
            }
            let tr = dp45_step(&g, self.t, &self.y, &self.k, h, self.rtol, self.atol);
            if !tr.y.iter().all(|v| v.is_finite()) {
                self.h = 0.2 * h;
                continue;
            }
            if tr.err <= 1.0 {
                let info = StepInfo {
                    t0: self.t,
                    y0: self.y,
                    k0: self.k,
                    h,
                };
                let last = h >= remaining;
                self.t = if last { t_stop } else { self.t + h };
                self.y = tr.y;
                self.k = tr.dy;
                if !last || h >= self.h {
                    self.h = h * step_factor(tr.err);
                }
                return Ok(info);
            }
            self.h = h * step_factor(tr.err);
        }
    }

    /// State reached from the start of `info` after a partial step `s`.
    pub fn partial(&self, info: &StepInfo<N>, s: f64) -> [f64; N] {
        let g = |_t: f64, y: &[f64; N]| (self.f)(y);
        dp45_step(&g, info.t0, &info.y0, &info.k0, s, self.rtol, self.atol).y
    }
}

pub(crate) fn state_of<const N: usize>(y: &[f64; N]) -> State {
    match N {
        1 => State::new(y[0], f64::NAN),
        _ => State::new(y[0], y[1]),
    }
}
