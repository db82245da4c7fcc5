//! One-parameter continuation of equilibria with fold and Hopf detection.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::equilibrium::{EquilibriumKind, EquilibriumRecord, EQ_TOL};
use super::jet::Jet;
use super::lyapunov::lyapunov_at;
use super::pal::{continue_curve, locate_zero, Eval, PalConfig, PalStop};
use crate::error::{Error, Result};
use crate::flow::fmt_f64;
use crate::model::{ModelParams, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeParam {
    Mu,
    Eta,
}

impl FreeParam {
    /// Column of the parameter in [`Jet`] gradients.
    pub(crate) fn index(self) -> usize {
        match self {
            FreeParam::Mu => 2,
            FreeParam::Eta => 3,
        }
    }

    pub fn get(self, p: &ModelParams) -> f64 {
        match self {
            FreeParam::Mu => p.mu,
            FreeParam::Eta => p.eta,
        }
    }

    pub fn set(self, p: &ModelParams, v: f64) -> ModelParams {
        match self {
            FreeParam::Mu => ModelParams { mu: v, ..*p },
            FreeParam::Eta => ModelParams { eta: v, ..*p },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchPointKind {
    Fold,
    Hopf,
    Bt,
    Cusp,
    Gh,
}

impl BranchPointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchPointKind::Fold => "fold",
            BranchPointKind::Hopf => "hopf",
            BranchPointKind::Bt => "bt",
            BranchPointKind::Cusp => "cusp",
            BranchPointKind::Gh => "gh",
        }
    }
}

/// Test-function values at a located point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub trace: f64,
    pub det: f64,
    /// Fold quadratic coefficient; zero at a cusp.
    pub fold_quadratic: f64,
    /// First Lyapunov coefficient where `det J > 0`.
    pub lyapunov: Option<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub kind: BranchPointKind,
    pub state: State,
    pub mu: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub diagnostics: Diagnostics,
}

impl BranchPoint {
    pub fn at(kind: BranchPointKind, state: State, p: &ModelParams) -> Self {
        Self {
            kind,
            state,
            mu: p.mu,
            eta: p.eta,
            epsilon: p.epsilon,
            diagnostics: diagnostics(state, p),
        }
    }

    pub fn params(&self, base: &ModelParams) -> ModelParams {
        ModelParams {
            mu: self.mu,
            eta: self.eta,
            epsilon: self.epsilon,
            ..*base
        }
    }
}

pub(crate) fn diagnostics(s: State, p: &ModelParams) -> Diagnostics {
    let jet = Jet::at(s, p);
    let det = jet.det();
    Diagnostics {
        trace: jet.trace(),
        det,
        fold_quadratic: jet.fold_quadratic(),
        lyapunov: (det > 0.0).then(|| lyapunov_at(s, p).ok()).flatten(),
        residual: jet.f[0].abs().max(jet.f[1].abs()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub state: State,
    pub mu: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub trace: f64,
    pub det: f64,
    pub kind: EquilibriumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum BranchEnd {
    ParameterRange,
    MaxSteps,
    StepCollapse { step: f64 },
}

impl From<PalStop> for BranchEnd {
    fn from(s: PalStop) -> Self {
        match s {
            PalStop::Callback => BranchEnd::ParameterRange,
            PalStop::MaxSteps => BranchEnd::MaxSteps,
            PalStop::StepCollapse { step } => BranchEnd::StepCollapse { step },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub free: FreeParam,
    pub samples: Vec<BranchSample>,
    /// Located events with the index of the sample preceding each.
    pub events: Vec<(usize, BranchPoint)>,
    pub end: BranchEnd,
}

impl Branch {
    /// Columns `mu,eta,epsilon,x,y,trace,det,label,event`; located events
    /// are interleaved as extra rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,eta,epsilon,x,y,trace,det,label,event\n");
        let row = |out: &mut String, s: State, mu, eta, eps, tr, det, label: &str, ev: &str| {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_f64(mu),
                fmt_f64(eta),
                fmt_f64(eps),
                fmt_f64(s.x),
                fmt_f64(s.y),
                fmt_f64(tr),
                fmt_f64(det),
                label,
                ev
            ));
        };
        let mut ev = self.events.iter().peekable();
        for (i, s) in self.samples.iter().enumerate() {
            row(&mut out, s.state, s.mu, s.eta, s.epsilon, s.trace, s.det, s.kind.as_str(), "");
            while let Some((j, e)) = ev.peek() {
                if *j != i {
                    break;
                }
                let kind = EquilibriumKind::from_trace_det(e.diagnostics.trace, e.diagnostics.det);
                row(
                    &mut out,
                    e.state,
                    e.mu,
                    e.eta,
                    e.epsilon,
                    e.diagnostics.trace,
                    e.diagnostics.det,
                    kind.as_str(),
                    e.kind.as_str(),
                );
                ev.next();
            }
        }
        out
    }
}

fn system(p: ModelParams, free: FreeParam) -> impl Fn(&DVector<f64>) -> Eval {
    let col = free.index();
    move |z: &DVector<f64>| {
        let q = free.set(&p, z[2]);
        let jet = Jet::at(State::new(z[0], z[1]), &q);
        let r = DVector::from_vec(jet.f.to_vec());
        let mut j = DMatrix::zeros(2, 3);
        for i in 0..2 {
            j[(i, 0)] = jet.df[i][0];
            j[(i, 1)] = jet.df[i][1];
            j[(i, 2)] = jet.df[i][col];
        }
        r.iter().all(|v| v.is_finite()).then_some((r, j))
    }
}

/// Continue the equilibrium `eq0` of `p0` in `free` while the parameter stays
/// in `range`, starting towards increasing (`forward`) or decreasing values.
pub fn continue_equilibrium(
    p0: &ModelParams,
    eq0: State,
    free: FreeParam,
    range: (f64, f64),
    forward: bool,
    cfg: &PalConfig,
) -> Result<Branch> {
    p0.validate()?;
    if p0.is_pws() {
        return Err(Error::Domain("continuation requires epsilon > 0".into()));
    }
    let res = Jet::at(eq0, p0).f;
    if res[0].abs().max(res[1].abs()) >= EQ_TOL {
        return Err(Error::InvalidParameter(
            "starting point is not a converged equilibrium".into(),
        ));
    }
    let cfg = cfg.for_epsilon(p0.epsilon);
    let f = system(*p0, free);
    let z0 = DVector::from_vec(vec![eq0.x, eq0.y, free.get(p0)]);
    let hint = DVector::from_vec(vec![0.0, 0.0, if forward { 1.0 } else { -1.0 }]);
    let (pts, stop) = continue_curve(&f, z0, hint, &cfg, |pt| {
        pt.z[2] >= range.0 && pt.z[2] <= range.1
    })?;

    let params_of = |z: &DVector<f64>| free.set(p0, z[2]);
    let state_of = |z: &DVector<f64>| State::new(z[0], z[1]);
    let samples: Vec<BranchSample> = pts
        .iter()
        .map(|pt| {
            let q = params_of(&pt.z);
            let rec = EquilibriumRecord::at(state_of(&pt.z), &q);
            BranchSample {
                state: rec.state,
                mu: q.mu,
                eta: q.eta,
                epsilon: q.epsilon,
                trace: rec.trace,
                det: rec.det,
                kind: rec.kind,
            }
        })
        .collect();

    let det_of = |z: &DVector<f64>| Jet::at(state_of(z), &params_of(z)).det();
    let tr_of = |z: &DVector<f64>| Jet::at(state_of(z), &params_of(z)).trace();
    let mut events = Vec::new();
    for i in 0..pts.len().saturating_sub(1) {
        let (a, b) = (&samples[i], &samples[i + 1]);
        if a.det * b.det < 0.0 {
            if let Some(z) = locate_zero(&f, &pts[i], &pts[i + 1], det_of, &cfg) {
                events.push((i, BranchPoint::at(BranchPointKind::Fold, state_of(&z), &params_of(&z))));
            }
        }
        if a.trace * b.trace < 0.0 && (a.det > 0.0 || b.det > 0.0) {
            if let Some(z) = locate_zero(&f, &pts[i], &pts[i + 1], tr_of, &cfg) {
                let bp = BranchPoint::at(BranchPointKind::Hopf, state_of(&z), &params_of(&z));
                if bp.diagnostics.det > 0.0 {
                    events.push((i, bp));
                }
            }
        }
    }
    Ok(Branch {
        free,
        samples,
        events,
        end: stop.into(),
    })
}
