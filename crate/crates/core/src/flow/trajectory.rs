use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Side, State};

/// Regime of a trajectory segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    R1,
    R2,
    Sliding,
    Smooth,
}

impl Regime {
    pub fn from_side(side: Side) -> Self {
        match side {
            Side::R1 => Regime::R1,
            Side::R2 => Regime::R2,
        }
    }

    pub fn csv_label(self) -> &'static str {
        match self {
            Regime::R1 => "R1",
            Regime::R2 => "R2",
            Regime::Sliding => "SLIDE",
            Regime::Smooth => "SMOOTH",
        }
    }
}

/// Step-control and event settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub event_tol: f64,
    pub max_step: f64,
    pub t_max: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            event_tol: 1e-10,
            max_step: 0.25,
            t_max: 400.0,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.rel_tol, self.abs_tol, self.event_tol, self.max_step, self.t_max]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "integration tolerances, max_step and t_max must be positive".into(),
            ))
        }
    }

    /// All tolerances scaled by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * f,
            abs_tol: self.abs_tol * f,
            event_tol: self.event_tol * f,
            ..*self
        }
    }
}

/// Direction of time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// What happened at a switching-line event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Crossing { into: Side },
    SlideStart,
    /// Orbit touched Σ and stays in its region.
    Graze,
    /// Sliding ended at a tangency endpoint; the orbit departs into `into`.
    SlideExit { into: Side },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub state: State,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Reached the requested end time.
    EndTime,
    /// Sliding converged to a sliding-stable pseudo-equilibrium.
    PseudoEquilibrium,
    /// Stopped by a caller-supplied condition.
    Stopped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub regime: Regime,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: Vec<(f64, State)>,
}

/// A hybrid orbit. Times are elapsed times and increase along the record;
/// `direction` says whether the flow was followed forward or backward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub events: Vec<Event>,
    pub direction: Direction,
    pub termination: Termination,
}

impl Trajectory {
    pub(crate) fn new(direction: Direction) -> Self {
        Self {
            segments: Vec::new(),
            events: Vec::new(),
            direction,
            termination: Termination::EndTime,
        }
    }

    pub(crate) fn begin(&mut self, regime: Regime, t: f64, s: State) {
        if let Some(last) = self.segments.last_mut() {
            if last.samples.len() <= 1 && last.regime != regime && last.t_start == t {
                self.segments.pop();
            }
        }
        self.segments.push(Segment {
            regime,
            t_start: t,
            t_end: t,
            samples: vec![(t, s)],
        });
    }

    pub(crate) fn push(&mut self, t: f64, s: State) {
        let seg = self.segments.last_mut().expect("segment begun");
        seg.t_end = t;
        seg.samples.push((t, s));
    }

    pub fn final_state(&self) -> State {
        self.segments
            .last()
            .and_then(|s| s.samples.last())
            .map(|&(_, s)| s)
            .expect("non-empty trajectory")
    }

    pub fn final_time(&self) -> f64 {
        self.segments.last().map(|s| s.t_end).unwrap_or(0.0)
    }

    pub fn final_regime(&self) -> Regime {
        self.segments.last().expect("non-empty trajectory").regime
    }

    /// All samples in order, tagged with their regime.
    pub fn samples(&self) -> impl Iterator<Item = (f64, State, Regime)> + '_ {
        self.segments
            .iter()
            .flat_map(|seg| seg.samples.iter().map(move |&(t, s)| (t, s, seg.regime)))
    }

    /// Linear interpolation of the state at time `t` within the record.
    pub fn state_at(&self, t: f64) -> Option<State> {
        let mut prev: Option<(f64, State)> = None;
        for (tk, sk, _) in self.samples() {
            if tk >= t {
                return Some(match prev {
                    Some((tp, sp)) if tk > tp => {
                        let w = (t - tp) / (tk - tp);
                        sp + w * (sk - sp)
                    }
                    _ => sk,
                });
            }
            prev = Some((tk, sk));
        }
        None
    }

    /// CSV with columns `t,x,y,regime`, floats to 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,regime\n");
        for (t, s, r) in self.samples() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(t),
                fmt_f64(s.x),
                fmt_f64(s.y),
                r.csv_label()
            );
        }
        out
    }
}

/// Fixed 17-significant-digit formatting used by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_values() {
        let mut tr = Trajectory::new(Direction::Forward);
        tr.begin(Regime::R1, 0.0, State::new(0.1, 1.0 / 3.0));
        tr.push(0.5, State::new(0.2, -0.7));
        tr.begin(Regime::Sliding, 0.5, State::new(0.2, -0.7));
        let csv = tr.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,x,y,regime");
        assert_eq!(lines.len(), 4);
        let y: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(y, 1.0 / 3.0);
        assert!(lines[3].ends_with("SLIDE"));
    }

    #[test]
    fn interpolation() {
        let mut tr = Trajectory::new(Direction::Forward);
        tr.begin(Regime::Smooth, 0.0, State::new(0.0, 0.0));
        tr.push(1.0, State::new(1.0, 2.0));
        let s = tr.state_at(0.25).unwrap();
        assert!((s.x - 0.25).abs() < 1e-15 && (s.y - 0.5).abs() < 1e-15);
        assert!(tr.state_at(2.0).is_none());
    }

    #[test]
    fn config_validation() {
        assert!(IntegrationConfig::default().validate().is_ok());
        let bad = IntegrationConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
