//! Two-parameter continuation of the fold curve S and the Hopf curve H at
//! fixed `ε`, and the smooth bifurcation diagram built from them.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::branch::{continue_equilibrium, BranchPoint, BranchPointKind, FreeParam};
use super::equilibrium::equilibria_all;
use super::jet::{Jet, NV};
use super::lyapunov::lyapunov_at;
use super::pal::{continue_curve, locate_zero, tangent, Eval, PalConfig, PalPoint, PalStop};
use crate::atlas::{DEFAULT_ETA_RANGE, DEFAULT_MU_RANGE};
use crate::error::{Error, Result};
use crate::flow::fmt_f64;
use crate::model::{ModelParams, State};

/// Rectangle in the `(μ, η)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub mu: (f64, f64),
    pub eta: (f64, f64),
}

impl Default for Window {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU_RANGE,
            eta: DEFAULT_ETA_RANGE,
        }
    }
}

impl Window {
    pub fn contains(&self, mu: f64, eta: f64) -> bool {
        mu >= self.mu.0 && mu <= self.mu.1 && eta >= self.eta.0 && eta <= self.eta.1
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.0 < self.mu.1 && self.eta.0 < self.eta.1 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("empty window {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    S,
    H,
    #[serde(rename = "BT")]
    Bt,
    #[serde(rename = "CP-locus")]
    CpLocus,
    #[serde(rename = "GH-locus")]
    GhLocus,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::S => "S",
            CurveKind::H => "H",
            CurveKind::Bt => "BT",
            CurveKind::CpLocus => "CP-locus",
            CurveKind::GhLocus => "GH-locus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criticality {
    Supercritical,
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub state: State,
    pub mu: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub trace: f64,
    pub det: f64,
    /// First Lyapunov coefficient, on H only.
    pub lyapunov: Option<f64>,
}

/// Run of consecutive samples `start..=end` with one criticality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSegment {
    pub start: usize,
    pub end: usize,
    pub criticality: Criticality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum CurveEnd {
    Window,
    BtEndpoint,
    EpsilonRange,
    MaxSteps,
    StepCollapse { step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoParCurve {
    pub label: CurveKind,
    pub samples: Vec<CurveSample>,
    /// Codimension-two points found along the curve.
    pub points: Vec<BranchPoint>,
    pub segments: Vec<CurveSegment>,
    /// How each end of the curve terminated.
    pub ends: [CurveEnd; 2],
}

impl TwoParCurve {
    pub fn points_of(&self, kind: BranchPointKind) -> Vec<BranchPoint> {
        self.points.iter().filter(|p| p.kind == kind).copied().collect()
    }

    /// `(μ, η)` polyline.
    pub fn polyline(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| [s.mu, s.eta]).collect()
    }
}

pub(crate) fn params_of(base: &ModelParams, z: &DVector<f64>) -> ModelParams {
    ModelParams {
        mu: z[2],
        eta: z[3],
        epsilon: if z.len() > 4 { z[4] } else { base.epsilon },
        ..*base
    }
}

pub(crate) fn state_of(z: &DVector<f64>) -> State {
    State::new(z[0], z[1])
}

pub(crate) fn sample(z: &DVector<f64>, base: &ModelParams, with_l1: bool) -> CurveSample {
    let p = params_of(base, z);
    let s = state_of(z);
    let jet = Jet::at(s, &p);
    let det = jet.det();
    CurveSample {
        state: s,
        mu: p.mu,
        eta: p.eta,
        epsilon: p.epsilon,
        trace: jet.trace(),
        det,
        lyapunov: if with_l1 && det > 0.0 { lyapunov_at(s, &p).ok() } else { None },
    }
}

/// Augmented system `{F, extra…}` in `z = (x, y, μ, η[, ε])` whose rows are
/// drawn from the jet.
pub(crate) fn jet_system<R>(base: ModelParams, nz: usize, rows: R) -> impl Fn(&DVector<f64>) -> Eval
where
    R: Fn(&Jet) -> Vec<(f64, [f64; NV])>,
{
    move |z: &DVector<f64>| {
        let p = params_of(&base, z);
        if p.epsilon <= 0.0 {
            return None;
        }
        let jet = Jet::at(state_of(z), &p);
        let extra = rows(&jet);
        let n = 2 + extra.len();
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, nz);
        let mut put = |i: usize, v: f64, g: &[f64; NV]| {
            r[i] = v;
            for c in 0..nz {
                j[(i, c)] = g[c];
            }
        };
        put(0, jet.f[0], &jet.df[0]);
        put(1, jet.f[1], &jet.df[1]);
        for (i, (v, g)) in extra.iter().enumerate() {
            put(2 + i, *v, g);
        }
        (r.iter().all(|v| v.is_finite()) && j.iter().all(|v| v.is_finite())).then_some((r, j))
    }
}

pub(crate) fn fold_system(base: ModelParams) -> impl Fn(&DVector<f64>) -> Eval {
    jet_system(base, 4, |j| vec![(j.det(), j.d_det())])
}

pub(crate) fn hopf_system(base: ModelParams) -> impl Fn(&DVector<f64>) -> Eval {
    jet_system(base, 4, |j| vec![(j.trace(), j.d_trace())])
}

/// One direction of a continuation together with the first rejected point.
pub(crate) struct Side {
    pub pts: Vec<PalPoint>,
    pub stop: PalStop,
    pub rejected: Option<(PalPoint, CurveEnd)>,
}

pub(crate) fn trace_side<F, A>(
    f: &F,
    z0: &DVector<f64>,
    hint: DVector<f64>,
    cfg: &PalConfig,
    reject: A,
) -> Result<Side>
where
    F: Fn(&DVector<f64>) -> Eval,
    A: Fn(&DVector<f64>) -> Option<CurveEnd>,
{
    let mut rejected = None;
    let (pts, stop) = continue_curve(f, z0.clone(), hint, cfg, |pt| match reject(&pt.z) {
        Some(why) => {
            rejected = Some((pt.clone(), why));
            false
        }
        None => true,
    })?;
    Ok(Side { pts, stop, rejected })
}

pub(crate) fn end_of(side: &Side) -> CurveEnd {
    match (&side.stop, &side.rejected) {
        (PalStop::Callback, Some((_, why))) => why.clone(),
        (PalStop::MaxSteps, _) => CurveEnd::MaxSteps,
        (PalStop::StepCollapse { step }, _) => CurveEnd::StepCollapse { step: *step },
        (PalStop::Callback, None) => CurveEnd::Window,
    }
}

/// Join a backward and a forward run through their common first point.
pub(crate) fn join(back: &Side, fwd: &Side) -> Vec<PalPoint> {
    let mut pts: Vec<PalPoint> = back
        .pts
        .iter()
        .skip(1)
        .rev()
        .map(|p| PalPoint {
            z: p.z.clone(),
            tangent: -&p.tangent,
        })
        .collect();
    pts.extend(fwd.pts.iter().cloned());
    pts
}

/// Zeros of `test` between consecutive points, located on the curve.
pub(crate) fn scan_zeros<F, T>(
    f: &F,
    pts: &[PalPoint],
    test: T,
    cfg: &PalConfig,
) -> Vec<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Eval,
    T: Fn(&DVector<f64>) -> f64,
{
    let vals: Vec<f64> = pts.iter().map(|p| test(&p.z)).collect();
    let mut out = Vec::new();
    for i in 0..pts.len().saturating_sub(1) {
        if vals[i].is_finite() && vals[i + 1].is_finite() && vals[i] * vals[i + 1] < 0.0 {
            if let Some(z) = locate_zero(f, &pts[i], &pts[i + 1], &test, cfg) {
                out.push(z);
            }
        }
    }
    out
}

/// Points where the `(μ, η)` part of the tangent reverses, i.e. cusps of
/// the curve's projection onto the parameter plane.
pub(crate) fn cusps<F>(f: &F, pts: &[PalPoint], cfg: &PalConfig) -> Vec<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Eval,
{
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let va = [a.tangent[2], a.tangent[3]];
        if va[0] * b.tangent[2] + va[1] * b.tangent[3] >= 0.0 {
            continue;
        }
        let test = |z: &DVector<f64>| match tangent(f, z, &a.tangent) {
            Some(t) => t[2] * va[0] + t[3] * va[1],
            None => f64::NAN,
        };
        if let Some(z) = locate_zero(f, a, b, test, cfg) {
            out.push(z);
        }
    }
    out
}

fn window_reject(w: Window) -> impl Fn(&DVector<f64>) -> Option<CurveEnd> {
    move |z| (!w.contains(z[2], z[3])).then_some(CurveEnd::Window)
}

fn check_start(start: &BranchPoint, p: &ModelParams, need_tr: bool) -> Result<ModelParams> {
    let q = start.params(p);
    q.validate()?;
    if q.is_pws() {
        return Err(Error::Domain("continuation requires epsilon > 0".into()));
    }
    let d = super::branch::diagnostics(start.state, &q);
    let bad = if need_tr {
        d.trace.abs() > 1e-8 || d.det <= 0.0
    } else {
        d.det.abs() > 1e-8
    };
    if bad || d.residual > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "start point does not satisfy the {} conditions",
            if need_tr { "Hopf" } else { "fold" }
        )));
    }
    Ok(q)
}

fn hint4() -> DVector<f64> {
    DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0])
}

/// The fold curve S through `start`, with cusp and BT points.
pub fn continue_fold_curve(
    start: &BranchPoint,
    p: &ModelParams,
    window: Window,
    cfg: &PalConfig,
) -> Result<TwoParCurve> {
    window.validate()?;
    let base = check_start(start, p, false)?;
    let cfg = cfg.for_epsilon(base.epsilon);
    let f = fold_system(base);
    let z0 = DVector::from_vec(vec![start.state.x, start.state.y, start.mu, start.eta]);
    let fwd = trace_side(&f, &z0, hint4(), &cfg, window_reject(window))?;
    let back = trace_side(&f, &z0, -hint4(), &cfg, window_reject(window))?;
    let pts = join(&back, &fwd);
    let eval_jet = |z: &DVector<f64>| Jet::at(state_of(z), &params_of(&base, z));
    let mut points = Vec::new();
    for z in cusps(&f, &pts, &cfg) {
        points.push(BranchPoint::at(BranchPointKind::Cusp, state_of(&z), &params_of(&base, &z)));
    }
    for z in scan_zeros(&f, &pts, |z| eval_jet(z).trace(), &cfg) {
        points.push(BranchPoint::at(BranchPointKind::Bt, state_of(&z), &params_of(&base, &z)));
    }
    Ok(TwoParCurve {
        label: CurveKind::S,
        samples: pts.iter().map(|pt| sample(&pt.z, &base, false)).collect(),
        points,
        segments: Vec::new(),
        ends: [end_of(&back), end_of(&fwd)],
    })
}

/// The Hopf curve H through `start`, ending at BT points, with GH points
/// and criticality segments.
pub fn continue_hopf_curve(
    start: &BranchPoint,
    p: &ModelParams,
    window: Window,
    cfg: &PalConfig,
) -> Result<TwoParCurve> {
    window.validate()?;
    let base = check_start(start, p, true)?;
    let cfg = cfg.for_epsilon(base.epsilon);
    let f = hopf_system(base);
    let det_of = |z: &DVector<f64>| Jet::at(state_of(z), &params_of(&base, z)).det();
    let reject = |z: &DVector<f64>| {
        if det_of(z) <= 0.0 {
            Some(CurveEnd::BtEndpoint)
        } else {
            window_reject(window)(z)
        }
    };
    let z0 = DVector::from_vec(vec![start.state.x, start.state.y, start.mu, start.eta]);
    let fwd = trace_side(&f, &z0, hint4(), &cfg, reject)?;
    let back = trace_side(&f, &z0, -hint4(), &cfg, reject)?;
    let mut pts = join(&back, &fwd);

    let mut points = Vec::new();
    let mut ends = [end_of(&back), end_of(&fwd)];
    for (k, side) in [&back, &fwd].into_iter().enumerate() {
        if let (PalStop::Callback, Some((rej, CurveEnd::BtEndpoint))) = (&side.stop, &side.rejected) {
            let last = side.pts.last().expect("nonempty");
            match locate_zero(&f, last, rej, det_of, &cfg) {
                Some(z) => {
                    let bt = BranchPoint::at(BranchPointKind::Bt, state_of(&z), &params_of(&base, &z));
                    points.push(bt);
                    let pt = PalPoint {
                        z,
                        tangent: last.tangent.clone(),
                    };
                    if k == 0 {
                        pts.insert(0, pt);
                    } else {
                        pts.push(pt);
                    }
                }
                None => ends[k] = CurveEnd::StepCollapse { step: 0.0 },
            }
        }
    }
    let l1 = |z: &DVector<f64>| lyapunov_at(state_of(z), &params_of(&base, z)).unwrap_or(f64::NAN);
    for z in scan_zeros(&f, &pts, l1, &cfg) {
        points.push(BranchPoint::at(BranchPointKind::Gh, state_of(&z), &params_of(&base, &z)));
    }
    let samples: Vec<CurveSample> = pts.iter().map(|pt| sample(&pt.z, &base, true)).collect();
    Ok(TwoParCurve {
        label: CurveKind::H,
        segments: criticality_segments(&samples),
        samples,
        points,
        ends,
    })
}

fn criticality_segments(samples: &[CurveSample]) -> Vec<CurveSegment> {
    let mut out: Vec<CurveSegment> = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let Some(l) = s.lyapunov.filter(|l| l.is_finite()) else {
            continue;
        };
        let c = if l < 0.0 {
            Criticality::Supercritical
        } else {
            Criticality::Subcritical
        };
        match out.last_mut() {
            Some(seg) if seg.criticality == c => seg.end = i,
            _ => out.push(CurveSegment {
                start: i,
                end: i,
                criticality: c,
            }),
        }
    }
    out
}

/// Curves and codimension-two points of the smooth model at fixed `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothDiagram {
    pub params: ModelParams,
    pub epsilon: f64,
    pub window: Window,
    pub curves: Vec<TwoParCurve>,
    /// Cusp and BT points on S, GH points on H.
    pub points: Vec<BranchPoint>,
    /// Continuations that failed, with the reason.
    pub failures: Vec<String>,
}

impl SmoothDiagram {
    pub fn curve(&self, kind: CurveKind) -> Option<&TwoParCurve> {
        self.curves.iter().find(|c| c.label == kind)
    }

    pub fn points_of(&self, kind: BranchPointKind) -> Vec<BranchPoint> {
        self.points.iter().filter(|p| p.kind == kind).copied().collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    /// One row per sample: `mu,eta,epsilon,label,sublabel`, the sublabel
    /// being the criticality on H.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,eta,epsilon,label,sublabel\n");
        for c in &self.curves {
            for (i, s) in c.samples.iter().enumerate() {
                let sub = c
                    .segments
                    .iter()
                    .find(|g| g.start <= i && i <= g.end)
                    .map(|g| match g.criticality {
                        Criticality::Supercritical => "supercritical",
                        Criticality::Subcritical => "subcritical",
                    })
                    .unwrap_or("");
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(s.mu),
                    fmt_f64(s.eta),
                    fmt_f64(s.epsilon),
                    c.label.as_str(),
                    sub
                ));
            }
        }
        out
    }
}

/// First fold and Hopf points met by equilibrium branches continued in `μ`
/// across horizontal slices of the window.
pub fn seed_points(
    p: &ModelParams,
    window: Window,
    cfg: &PalConfig,
) -> Result<(Option<BranchPoint>, Option<BranchPoint>)> {
    const SLICES: usize = 48;
    let etas: Vec<f64> = (0..SLICES)
        .map(|i| window.eta.0 + (window.eta.1 - window.eta.0) * (i as f64 + 0.5) / SLICES as f64)
        .collect();
    let found: Vec<(Option<BranchPoint>, Option<BranchPoint>)> = etas
        .par_iter()
        .map(|&eta| {
            let q = p.with_mu_eta(window.mu.0, eta);
            let Ok(eqs) = equilibria_all(&q) else {
                return (None, None);
            };
            let mut fold = None;
            let mut hopf = None;
            for e in eqs {
                let Ok(b) = continue_equilibrium(&q, e.state, FreeParam::Mu, window.mu, true, cfg) else {
                    continue;
                };
                for (_, ev) in &b.events {
                    if !window.contains(ev.mu, ev.eta) {
                        continue;
                    }
                    match ev.kind {
                        BranchPointKind::Fold if fold.is_none() => fold = Some(*ev),
                        BranchPointKind::Hopf if hopf.is_none() => hopf = Some(*ev),
                        _ => {}
                    }
                }
            }
            (fold, hopf)
        })
        .collect();
    let fold = found.iter().find_map(|f| f.0);
    let hopf = found.iter().find_map(|f| f.1);
    Ok((fold, hopf))
}

/// S and H at the `ε` of `p` over `window`.
pub fn smooth_diagram(p: &ModelParams, window: Window, cfg: &PalConfig) -> Result<SmoothDiagram> {
    p.validate()?;
    window.validate()?;
    if p.is_pws() {
        return Err(Error::Domain("smooth diagram requires epsilon > 0".into()));
    }
    let (fold, hopf) = seed_points(p, window, cfg)?;
    let mut curves = Vec::new();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    if let Some(f) = fold {
        match continue_fold_curve(&f, p, window, cfg) {
            Ok(c) => {
                points.extend(c.points.iter().copied());
                curves.push(c);
            }
            Err(e) => failures.push(format!("S: {e}")),
        }
    }
    if let Some(h) = hopf {
        match continue_hopf_curve(&h, p, window, cfg) {
            Ok(c) => {
                points.extend(c.points_of(BranchPointKind::Gh));
                curves.push(c);
            }
            Err(e) => failures.push(format!("H: {e}")),
        }
    }
    Ok(SmoothDiagram {
        params: *p,
        epsilon: p.epsilon,
        window,
        curves,
        points,
        failures,
    })
}
