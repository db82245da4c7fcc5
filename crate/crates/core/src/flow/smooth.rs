use super::trajectory::{Direction, IntegrationConfig, Regime, Termination, Trajectory};
use super::Adaptive;
use crate::error::{Error, Result};
use crate::model::{smooth_rhs, ModelParams, State};

/// Integrate the smooth system forward over `[0, t_end]`.
pub fn integrate_smooth(
    s0: State,
    p: &ModelParams,
    cfg: &IntegrationConfig,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_smooth_dir(s0, p, cfg, t_end, Direction::Forward)
}

/// Integrate the smooth system for `duration` time units in the given direction.
pub fn integrate_smooth_dir(
    s0: State,
    p: &ModelParams,
    cfg: &IntegrationConfig,
    duration: f64,
    direction: Direction,
) -> Result<Trajectory> {
    integrate_smooth_until(s0, p, cfg, duration, direction, |_| false)
}

/// As [`integrate_smooth_dir`], stopping after the first step whose end
/// state satisfies `stop`.
pub fn integrate_smooth_until<S>(
    s0: State,
    p: &ModelParams,
    cfg: &IntegrationConfig,
    duration: f64,
    direction: Direction,
    stop: S,
) -> Result<Trajectory>
where
    S: Fn(State) -> bool,
{
    p.validate()?;
    cfg.validate()?;
    if p.epsilon <= 0.0 {
        return Err(Error::Domain(
            "smooth integration requires epsilon > 0".into(),
        ));
    }
    if !(duration >= 0.0) {
        return Err(Error::InvalidParameter("duration must be >= 0".into()));
    }
    let sigma = direction.sign();
    let f = move |y: &[f64; 2]| {
        let v = smooth_rhs(State::new(y[0], y[1]), p);
        [sigma * v[0], sigma * v[1]]
    };
    let mut tr = Trajectory::new(direction);
    tr.begin(Regime::Smooth, 0.0, s0);
    let mut drv = Adaptive::new(&f, 0.0, s0.to_array(), cfg);
    while drv.t < duration {
        drv.step(duration)?;
        let s = State::from_array(drv.y);
        tr.push(drv.t, s);
        if stop(s) {
            tr.termination = Termination::Stopped;
            break;
        }
    }
    Ok(tr)
}
