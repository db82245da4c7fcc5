//! Event-driven integration of the Filippov system (`ε = 0`).

use super::rk::illinois;
use super::trajectory::{
    Direction, Event, EventKind, IntegrationConfig, Regime, Termination, Trajectory,
};
use super::{Adaptive, StepInfo};
use crate::error::{Error, Result};
use crate::filippov::{
    lie1, pseudo_roots, sliding_rhs, sliding_segment, SegmentStability, SigmaPoint,
    SlidingSegment, TANGENCY_TOL,
};
use crate::model::{surface_density_anomaly, vector_field_region, ModelParams, Side, State};

/// Maximum number of switching events per integration.
pub const MAX_EVENTS: usize = 1_000_000;

const LOCATE_ITER: usize = 100;

/// Whether the caller wants integration to continue after an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Region(Side),
    Sliding,
}

/// Integrator for the piecewise-smooth system in a fixed time direction.
///
/// Backward integration follows the Filippov system with fields `−f₁, −f₂`,
/// for which attracting and repelling sliding segments trade places.
#[derive(Debug, Clone, Copy)]
pub struct PwsIntegrator<'a> {
    p: &'a ModelParams,
    cfg: &'a IntegrationConfig,
    direction: Direction,
    sigma: f64,
    bound: f64,
}

/// Integrate the Filippov system forward over `[0, t_end]`.
pub fn integrate_pws(
    s0: State,
    p: &ModelParams,
    cfg: &IntegrationConfig,
    t_end: f64,
) -> Result<Trajectory> {
    PwsIntegrator::new(p, cfg, Direction::Forward)?.run(s0, t_end, |_| Control::Continue)
}

/// As [`integrate_pws`] with a time direction and an event callback.
pub fn integrate_pws_with<F>(
    s0: State,
    p: &ModelParams,
    cfg: &IntegrationConfig,
    duration: f64,
    direction: Direction,
    on_event: F,
) -> Result<Trajectory>
where
    F: FnMut(&Event) -> Control,
{
    PwsIntegrator::new(p, cfg, direction)?.run(s0, duration, on_event)
}

impl<'a> PwsIntegrator<'a> {
    pub fn new(
        p: &'a ModelParams,
        cfg: &'a IntegrationConfig,
        direction: Direction,
    ) -> Result<Self> {
        p.validate()?;
        cfg.validate()?;
        if !p.is_pws() {
            return Err(Error::Domain(
                "piecewise-smooth integration requires epsilon = 0".into(),
            ));
        }
        Ok(Self {
            p,
            cfg,
            direction,
            sigma: direction.sign(),
            bound: f64::INFINITY,
        })
    }

    /// Stop once `|x|` or `|y|` exceeds `bound`.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    fn out_of_bounds(&self, y: &[f64; 2]) -> bool {
        y[0].abs() > self.bound || y[1].abs() > self.bound
    }

    fn lie(&self, side: Side, x: f64) -> f64 {
        self.sigma * lie1(side, x, self.p)
    }

    /// Classification of a point of Σ for the time-oriented system.
    pub fn classify(&self, x: f64) -> SigmaPoint {
        let a = self.lie(Side::R1, x);
        let b = self.lie(Side::R2, x);
        if a.abs() <= TANGENCY_TOL {
            return SigmaPoint::Tangency(Side::R1);
        }
        if b.abs() <= TANGENCY_TOL {
            return SigmaPoint::Tangency(Side::R2);
        }
        if a * b > 0.0 {
            SigmaPoint::Crossing {
                into: if a > 0.0 { Side::R2 } else { Side::R1 },
            }
        } else if a > 0.0 {
            SigmaPoint::Sliding(SegmentStability::Attracting)
        } else {
            SigmaPoint::Sliding(SegmentStability::Repelling)
        }
    }

    /// Region entered when leaving Σ at the tangency point of `tangent`: the
    /// one the other field points into.
    fn departure(&self, tangent: Side, x: f64, t: f64) -> Result<Side> {
        let l = self.lie(tangent.other(), x);
        if l.abs() <= TANGENCY_TOL {
            return Err(Error::GeometricDegeneracy {
                t,
                reason: format!(
                    "both fields tangent to the switching line at x = {x}; departure undefined"
                ),
            });
        }
        Ok(if l > 0.0 { Side::R2 } else { Side::R1 })
    }

    fn initial_mode(&self, s0: State) -> Result<(Mode, State)> {
        let u = surface_density_anomaly(s0, self.p);
        if u.abs() >= self.cfg.event_tol {
            let side = if u > 0.0 { Side::R2 } else { Side::R1 };
            return Ok((Mode::Region(side), s0));
        }
        let s = project(s0, self.p);
        let mode = match self.classify(s.x) {
            SigmaPoint::Crossing { into } => Mode::Region(into),
            SigmaPoint::Sliding(_) => Mode::Sliding,
            SigmaPoint::Tangency(side) => Mode::Region(self.departure(side, s.x, 0.0)?),
        };
        Ok((mode, s))
    }

    /// Integrate for `duration` time units from `s0`.
    pub fn run<F>(&self, s0: State, duration: f64, mut on_event: F) -> Result<Trajectory>
    where
        F: FnMut(&Event) -> Control,
    {
        if !(duration >= 0.0) || !s0.x.is_finite() || !s0.y.is_finite() {
            return Err(Error::InvalidParameter(
                "duration must be >= 0 and the initial state finite".into(),
            ));
        }
        let mut tr = Trajectory::new(self.direction);
        let (mut mode, start) = self.initial_mode(s0)?;
        let mut t = 0.0;
        let mut s = start;
        loop {
            tr.begin(regime(mode), t, s);
            let out = match mode {
                Mode::Region(side) => self.run_region(side, t, s, duration, &mut tr)?,
                Mode::Sliding => self.run_sliding(t, s, duration, &mut tr)?,
            };
            match out {
                Leg::Done(term) => {
                    tr.termination = term;
                    return Ok(tr);
                }
                Leg::Event(ev, next) => {
                    tr.events.push(ev);
                    if tr.events.len() > MAX_EVENTS {
                        return Err(Error::Chatter { limit: MAX_EVENTS });
                    }
                    t = ev.t;
                    s = ev.state;
                    mode = next;
                    if on_event(&ev) == Control::Stop {
                        tr.termination = Termination::Stopped;
                        return Ok(tr);
                    }
                }
            }
        }
    }

    fn run_region(
        &self,
        side: Side,
        t0: f64,
        s0: State,
        duration: f64,
        tr: &mut Trajectory,
    ) -> Result<Leg> {
        let p = self.p;
        let sigma = self.sigma;
        let f = move |y: &[f64; 2]| {
            let v = vector_field_region(side, State::new(y[0], y[1]), p);
            [sigma * v[0], sigma * v[1]]
        };
        // Signed distance to Σ, positive on the wrong side.
        let w = |y: &[f64; 2]| {
            let u = y[1] - y[0] - p.eta;
            match side {
                Side::R1 => u,
                Side::R2 => -u,
            }
        };
        let mut drv = Adaptive::new(&f, t0, s0.to_array(), self.cfg);
        while drv.t < duration {
            let info = drv.step(duration)?;
            let g1 = w(&drv.y);
            if g1 <= 0.0 {
                tr.push(drv.t, State::from_array(drv.y));
                if self.out_of_bounds(&drv.y) {
                    return Ok(Leg::Done(Termination::Stopped));
                }
                continue;
            }
            let (s_ev, y_ev) = self.locate(&drv, &info, &w, g1)?;
            let t_ev = info.t0 + s_ev;
            let on = project(State::from_array(y_ev), p);
            tr.push(t_ev, on);
            let stalled = s_ev == 0.0;
            let (kind, next) = match self.classify(on.x) {
                // The field leaves the region at once: decide by the other field.
                _ if stalled => {
                    let l = self.lie(side.other(), on.x);
                    let back = match side {
                        Side::R1 => l < 0.0,
                        Side::R2 => l > 0.0,
                    };
                    if back && p.eta != 0.0 {
                        (EventKind::SlideStart, Mode::Sliding)
                    } else {
                        let into = side.other();
                        (EventKind::Crossing { into }, Mode::Region(into))
                    }
                }
                SigmaPoint::Crossing { into } if into != side => {
                    (EventKind::Crossing { into }, Mode::Region(into))
                }
                SigmaPoint::Tangency(other) if other != side => (
                    EventKind::Crossing { into: other },
                    Mode::Region(other),
                ),
                SigmaPoint::Sliding(SegmentStability::Attracting) => {
                    (EventKind::SlideStart, Mode::Sliding)
                }
                _ => (EventKind::Graze, Mode::Region(side)),
            };
            let ev = Event {
                t: t_ev,
                state: on,
                kind,
            };
            return Ok(Leg::Event(ev, next));
        }
        Ok(Leg::Done(Termination::EndTime))
    }

    /// Locate the first zero of `w` inside the step, to `event_tol`.
    fn locate<F, W>(
        &self,
        drv: &Adaptive<'_, F, 2>,
        info: &StepInfo<2>,
        w: &W,
        g1: f64,
    ) -> Result<(f64, [f64; 2])>
    where
        F: Fn(&[f64; 2]) -> [f64; 2],
        W: Fn(&[f64; 2]) -> f64,
    {
        let tol = self.cfg.event_tol;
        let mut lo = 0.0;
        let mut g_lo = w(&info.y0);
        if g_lo >= -tol {
            // Started on Σ: find a point of the step strictly inside the region.
            let mut s = 0.5 * info.h;
            let mut found = false;
            for _ in 0..40 {
                let g = w(&drv.partial(info, s));
                if g < 0.0 {
                    lo = s;
                    g_lo = g;
                    found = true;
                    break;
                }
                s *= 0.5;
            }
            if !found {
                return Ok((0.0, info.y0));
            }
        }
        let (s, g) = illinois(
            |s| w(&drv.partial(info, s)),
            lo,
            info.h,
            g_lo,
            g1,
            0.5 * tol,
            LOCATE_ITER,
        );
        if g.abs() >= tol {
            return Err(Error::GeometricDegeneracy {
                t: info.t0 + s,
                reason: format!("switching event not resolved (|g| = {:e})", g.abs()),
            });
        }
        Ok((s, drv.partial(info, s)))
    }

    fn run_sliding(&self, t0: f64, s0: State, duration: f64, tr: &mut Trajectory) -> Result<Leg> {
        let p = self.p;
        let seg = sliding_segment(p).ok_or_else(|| Error::GeometricDegeneracy {
            t: t0,
            reason: "sliding requested with eta = 0".into(),
        })?;
        let sigma = self.sigma;
        let f = move |y: &[f64; 1]| [sigma * sliding_rhs(y[0], p)];
        let x0 = s0.x.clamp(seg.x_lo, seg.x_hi);
        let v0 = f(&[x0])[0];
        // Sliding-stable roots in the direction of motion are approached asymptotically.
        let targets: Vec<f64> = pseudo_roots(p)
            .map(|(a, b)| vec![a, b])
            .unwrap_or_default()
            .into_iter()
            .filter(|&q| {
                q >= seg.x_lo && q <= seg.x_hi && (q - x0) * v0 >= 0.0 && {
                    let slope = sigma * (1.0 - p.mu - p.eta - 2.0 * q) / p.eta;
                    slope < 0.0
                }
            })
            .collect();
        let converged = |x: f64| targets.iter().any(|&q| (x - q).abs() <= 1e-11 * q.abs().max(1.0));
        if v0 == 0.0 || converged(x0) {
            return Ok(Leg::Done(Termination::PseudoEquilibrium));
        }
        let cfg = IntegrationConfig {
            max_step: self.cfg.max_step,
            ..*self.cfg
        };
        let mut drv = Adaptive::new(&f, t0, [x0], &cfg);
        while drv.t < duration {
            let info = drv.step(duration)?;
            let x = drv.y[0];
            let beyond = if x < seg.x_lo {
                Some((seg.x_lo, seg.endpoints.0.field))
            } else if x > seg.x_hi {
                Some((seg.x_hi, seg.endpoints.1.field))
            } else {
                None
            };
            if let Some((x_end, tangent)) = beyond {
                let g = |y: &[f64; 1]| (y[0] - x_end) * v0.signum();
                let (s, _) = illinois(
                    |s| g(&drv.partial(&info, s)),
                    0.0,
                    info.h,
                    g(&info.y0),
                    g(&drv.y),
                    1e-14,
                    LOCATE_ITER,
                );
                let t_ev = info.t0 + s;
                let on = State::on_sigma(x_end, p.eta);
                tr.push(t_ev, on);
                let into = self.departure(tangent, x_end, t_ev)?;
                let ev = Event {
                    t: t_ev,
                    state: on,
                    kind: EventKind::SlideExit { into },
                };
                return Ok(Leg::Event(ev, Mode::Region(into)));
            }
            tr.push(drv.t, State::on_sigma(x, p.eta));
            if converged(x) {
                return Ok(Leg::Done(Termination::PseudoEquilibrium));
            }
        }
        Ok(Leg::Done(Termination::EndTime))
    }

    /// The sliding segment of the time-oriented system, if any.
    pub fn segment(&self) -> Option<SlidingSegment> {
        sliding_segment(self.p)
    }
}

enum Leg {
    Done(Termination),
    Event(Event, Mode),
}

fn regime(mode: Mode) -> Regime {
    match mode {
        Mode::Region(side) => Regime::from_side(side),
        Mode::Sliding => Regime::Sliding,
    }
}

/// Orthogonal projection onto Σ.
fn project(s: State, p: &ModelParams) -> State {
    let u = surface_density_anomaly(s, p);
    State::new(s.x + 0.5 * u, s.y - 0.5 * u)
}

/// Closed-form solution of `ṡ = f_i(s)` from `s0` after time `t`.
pub fn region_flow(side: Side, s0: State, t: f64, p: &ModelParams) -> State {
    let k = p.kappa(side);
    let xs = 1.0 / (1.0 + k);
    let ys = p.mu / k;
    State::new(
        xs + (s0.x - xs) * (-(1.0 + k) * t).exp(),
        ys + (s0.y - ys) * (-k * t).exp(),
    )
}
