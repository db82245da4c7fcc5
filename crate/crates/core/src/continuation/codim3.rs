//! Continuation of codimension-two points in `(μ, η, ε)` and the
//! codimension-three points DBT and GBC.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::branch::{BranchPoint, BranchPointKind};
use super::curves::{
    end_of, jet_system, join, params_of, sample, smooth_diagram, state_of, trace_side, CurveEnd,
    CurveKind, CurveSample, SmoothDiagram, TwoParCurve, Window,
};
use super::jet::{Jet, NV};
use super::pal::{locate_zero, Eval, PalConfig, PalPoint};
use crate::error::{Error, Result};
use crate::flow::fmt_f64;
use crate::model::{ModelParams, State};

pub const DEFAULT_EPSILON_RANGE: (f64, f64) = (0.005, 0.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Codim3Kind {
    #[serde(rename = "DBT")]
    Dbt,
    #[serde(rename = "GBC")]
    Gbc,
}

impl Codim3Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Codim3Kind::Dbt => "DBT",
            Codim3Kind::Gbc => "GBC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Codim3Point {
    pub kind: Codim3Kind,
    pub state: State,
    pub mu: f64,
    pub eta: f64,
    pub epsilon: f64,
}

fn check_range(r: (f64, f64)) -> Result<()> {
    if r.0 > 0.0 && r.0 < r.1 && r.1.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("invalid epsilon range {r:?}")))
    }
}

fn z5(b: &BranchPoint) -> DVector<f64> {
    DVector::from_vec(vec![b.state.x, b.state.y, b.mu, b.eta, b.epsilon])
}

fn hint5() -> DVector<f64> {
    DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 1.0])
}

fn reject(window: Window, range: (f64, f64)) -> impl Fn(&DVector<f64>) -> Option<CurveEnd> {
    move |z| {
        if z[4] < range.0 || z[4] > range.1 {
            Some(CurveEnd::EpsilonRange)
        } else if !window.contains(z[2], z[3]) {
            Some(CurveEnd::Window)
        } else {
            None
        }
    }
}

fn check_point(start: &BranchPoint, kind: BranchPointKind) -> Result<ModelParams> {
    if start.kind != kind || start.epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "expected a smooth {} point, got {} at epsilon = {}",
            kind.as_str(),
            start.kind.as_str(),
            start.epsilon
        )));
    }
    Ok(ModelParams::smooth(start.mu, start.eta, start.epsilon))
}

fn trace_both<F>(
    f: &F,
    base: &ModelParams,
    start: &BranchPoint,
    window: Window,
    range: (f64, f64),
    cfg: &PalConfig,
    label: CurveKind,
) -> Result<(TwoParCurve, Vec<PalPoint>)>
where
    F: Fn(&DVector<f64>) -> Eval,
{
    window.validate()?;
    check_range(range)?;
    let cfg = cfg.for_epsilon(range.0);
    let z0 = z5(start);
    let fwd = trace_side(f, &z0, hint5(), &cfg, reject(window, range))?;
    let back = trace_side(f, &z0, -hint5(), &cfg, reject(window, range))?;
    let pts = join(&back, &fwd);
    let curve = TwoParCurve {
        label,
        samples: pts.iter().map(|pt| sample(&pt.z, base, false)).collect(),
        points: Vec::new(),
        segments: Vec::new(),
        ends: [end_of(&back), end_of(&fwd)],
    };
    Ok((curve, pts))
}

fn bt_system(base: ModelParams) -> impl Fn(&DVector<f64>) -> Eval {
    jet_system(base, 5, |j| vec![(j.trace(), j.d_trace()), (j.det(), j.d_det())])
}

/// The BT curve through `start` with `ε` free.
pub fn continue_bt_in_epsilon(
    start: &BranchPoint,
    window: Window,
    range: (f64, f64),
    cfg: &PalConfig,
) -> Result<TwoParCurve> {
    let base = check_point(start, BranchPointKind::Bt)?;
    let f = bt_system(base);
    Ok(trace_both(&f, &base, start, window, range, cfg, CurveKind::Bt)?.0)
}

fn cusp_value(z: &DVector<f64>, base: &ModelParams) -> f64 {
    Jet::at(state_of(z), &params_of(base, z)).fold_quadratic()
}

fn cusp_system(base: ModelParams) -> impl Fn(&DVector<f64>) -> Eval {
    let fold = jet_system(base, 5, |j| vec![(j.det(), j.d_det())]);
    move |z: &DVector<f64>| {
        let (r3, j3) = fold(z)?;
        let c = cusp_value(z, &base);
        let mut g = [0.0; NV];
        for (i, gi) in g.iter_mut().enumerate() {
            let h = 1e-7 * (1.0 + z[i].abs());
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[i] += h;
            zm[i] -= h;
            *gi = (cusp_value(&zp, &base) - cusp_value(&zm, &base)) / (2.0 * h);
        }
        let mut r = r3.resize_vertically(4, c);
        r[3] = c;
        let mut j = j3.resize_vertically(4, 0.0);
        for (i, gi) in g.iter().enumerate() {
            j[(3, i)] = *gi;
        }
        (c.is_finite() && g.iter().all(|v| v.is_finite())).then_some((r, j))
    }
}

/// The cusp locus through `start` with `ε` free, its GBC point (trace
/// vanishing) attached as a BT entry in `points`.
pub fn continue_cusp_in_epsilon(
    start: &BranchPoint,
    window: Window,
    range: (f64, f64),
    cfg: &PalConfig,
) -> Result<TwoParCurve> {
    let base = check_point(start, BranchPointKind::Cusp)?;
    let f = cusp_system(base);
    let (mut curve, pts) = trace_both(&f, &base, start, window, range, cfg, CurveKind::CpLocus)?;
    let tr = |z: &DVector<f64>| Jet::at(state_of(z), &params_of(&base, z)).trace();
    let cfg = cfg.for_epsilon(range.0);
    for w in pts.windows(2) {
        if tr(&w[0].z) * tr(&w[1].z) < 0.0 {
            if let Some(z) = locate_zero(&f, &w[0], &w[1], tr, &cfg) {
                curve
                    .points
                    .push(BranchPoint::at(BranchPointKind::Bt, state_of(&z), &params_of(&base, &z)));
            }
        }
    }
    Ok(curve)
}

/// Maximum of `ε` along the BT curve from a quadratic through the three
/// samples around the largest `ε`.
pub fn locate_dbt(bt: &TwoParCurve) -> Result<Codim3Point> {
    let s = &bt.samples;
    let i = s
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.epsilon.total_cmp(&b.1.epsilon))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::NotFound("empty BT curve".into()))?;
    if i == 0 || i + 1 == s.len() {
        return Err(Error::NotFound(
            "epsilon has no interior maximum along the BT curve".into(),
        ));
    }
    let (a, b, c) = (&s[i - 1], &s[i], &s[i + 1]);
    let dist = |p: &CurveSample, q: &CurveSample| {
        ((p.mu - q.mu).powi(2) + (p.eta - q.eta).powi(2) + (p.epsilon - q.epsilon).powi(2)).sqrt()
    };
    let (t0, t1, t2) = (0.0, dist(a, b), dist(a, b) + dist(b, c));
    // Lagrange basis at t
    let basis = |t: f64| {
        [
            (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2)),
            (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2)),
            (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1)),
        ]
    };
    let e = [a.epsilon, b.epsilon, c.epsilon];
    let d1 = (e[1] - e[0]) / (t1 - t0);
    let d2 = (e[2] - e[1]) / (t2 - t1);
    let curv = (d2 - d1) / (t2 - t0);
    let t = if curv < 0.0 {
        (0.5 * (t0 + t1) - d1 / (2.0 * curv)).clamp(t0, t2)
    } else {
        t1
    };
    let w = basis(t);
    let mix = |f: &dyn Fn(&CurveSample) -> f64| w[0] * f(a) + w[1] * f(b) + w[2] * f(c);
    Ok(Codim3Point {
        kind: Codim3Kind::Dbt,
        state: State::new(mix(&|s| s.state.x), mix(&|s| s.state.y)),
        mu: mix(&|s| s.mu),
        eta: mix(&|s| s.eta),
        epsilon: mix(&|s| s.epsilon),
    })
}

/// The point of the cusp locus where it meets the BT curve.
pub fn locate_gbc(cusp_locus: &TwoParCurve) -> Result<Codim3Point> {
    cusp_locus
        .points
        .iter()
        .find(|p| p.kind == BranchPointKind::Bt)
        .map(|p| Codim3Point {
            kind: Codim3Kind::Gbc,
            state: p.state,
            mu: p.mu,
            eta: p.eta,
            epsilon: p.epsilon,
        })
        .ok_or_else(|| Error::NotFound("cusp locus does not meet the BT curve".into()))
}

/// BT curve, cusp locus and the codimension-three points, seeded from the
/// diagram at the `ε` of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub seed_epsilon: f64,
    pub bt_curve: Option<TwoParCurve>,
    pub cusp_locus: Option<TwoParCurve>,
    pub dbt: Option<Codim3Point>,
    pub gbc: Option<Codim3Point>,
    pub failures: Vec<String>,
}

impl Landmarks {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    /// `label,mu,eta,epsilon` for the loci samples followed by the points.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,eta,epsilon,label\n");
        for c in [&self.bt_curve, &self.cusp_locus].into_iter().flatten() {
            for s in &c.samples {
                push_row(&mut out, s.mu, s.eta, s.epsilon, c.label.as_str());
            }
        }
        for p in [&self.dbt, &self.gbc].into_iter().flatten() {
            push_row(&mut out, p.mu, p.eta, p.epsilon, p.kind.as_str());
        }
        out
    }
}

fn push_row(out: &mut String, mu: f64, eta: f64, eps: f64, label: &str) {
    out.push_str(&format!("{},{},{},{}\n", fmt_f64(mu), fmt_f64(eta), fmt_f64(eps), label));
}

fn landmarks_from(d: &SmoothDiagram, window: Window, range: (f64, f64), cfg: &PalConfig) -> Landmarks {
    let mut failures = d.failures.clone();
    let bt_curve = match d.points_of(BranchPointKind::Bt).first() {
        Some(bt) => continue_bt_in_epsilon(bt, window, range, cfg)
            .map_err(|e| failures.push(format!("BT curve: {e}")))
            .ok(),
        None => {
            failures.push(format!("no BT point at epsilon = {}", d.epsilon));
            None
        }
    };
    let cusp_locus = match d.points_of(BranchPointKind::Cusp).first() {
        Some(cp) => continue_cusp_in_epsilon(cp, window, range, cfg)
            .map_err(|e| failures.push(format!("cusp locus: {e}")))
            .ok(),
        None => {
            failures.push(format!("no cusp point at epsilon = {}", d.epsilon));
            None
        }
    };
    let dbt = bt_curve
        .as_ref()
        .and_then(|c| locate_dbt(c).map_err(|e| failures.push(format!("DBT: {e}"))).ok());
    let gbc = cusp_locus
        .as_ref()
        .and_then(|c| locate_gbc(c).map_err(|e| failures.push(format!("GBC: {e}"))).ok());
    Landmarks {
        seed_epsilon: d.epsilon,
        bt_curve,
        cusp_locus,
        dbt,
        gbc,
        failures,
    }
}

/// DBT and GBC from loci seeded at the `ε` of `p`.
pub fn codim3_landmarks(
    p: &ModelParams,
    window: Window,
    range: (f64, f64),
    cfg: &PalConfig,
) -> Result<Landmarks> {
    check_range(range)?;
    let d = smooth_diagram(p, window, cfg)?;
    Ok(landmarks_from(&d, window, range, cfg))
}

/// Diagrams at several `ε` with the loci of their codimension-two points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSweep {
    pub slices: Vec<SmoothDiagram>,
    /// Per-slice GH points ordered by `ε`.
    pub gh_locus: Vec<BranchPoint>,
    pub landmarks: Landmarks,
}

impl EpsilonSweep {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    /// Slice curves and points, then the loci, as `mu,eta,epsilon,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,eta,epsilon,label\n");
        for d in &self.slices {
            for c in &d.curves {
                for s in &c.samples {
                    push_row(&mut out, s.mu, s.eta, s.epsilon, c.label.as_str());
                }
            }
            for p in &d.points {
                push_row(&mut out, p.mu, p.eta, p.epsilon, p.kind.as_str());
            }
        }
        for p in &self.gh_locus {
            push_row(&mut out, p.mu, p.eta, p.epsilon, CurveKind::GhLocus.as_str());
        }
        let body = self.landmarks.to_csv();
        out.push_str(body.split_once('\n').map(|(_, b)| b).unwrap_or(""));
        out
    }
}

/// `n` equidistant values `step, 2·step, …`.
pub fn epsilon_slices(step: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| step * i as f64).collect()
}

/// Diagrams at each `ε`, in parallel, with BT and cusp loci seeded from the
/// slice nearest `seed_epsilon`.
pub fn epsilon_sweep(
    p: &ModelParams,
    epsilons: &[f64],
    seed_epsilon: f64,
    window: Window,
    range: (f64, f64),
    cfg: &PalConfig,
) -> Result<EpsilonSweep> {
    if epsilons.is_empty() || epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter("epsilon slices must be positive".into()));
    }
    check_range(range)?;
    let mut slices = epsilons
        .par_iter()
        .map(|&e| smooth_diagram(&p.with_epsilon(e), window, cfg))
        .collect::<Result<Vec<_>>>()?;
    slices.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let mut gh_locus: Vec<BranchPoint> = slices
        .iter()
        .flat_map(|d| d.points_of(BranchPointKind::Gh))
        .collect();
    gh_locus.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.mu.total_cmp(&b.mu)));
    let seed = slices
        .iter()
        .filter(|d| !d.points_of(BranchPointKind::Cusp).is_empty())
        .min_by(|a, b| (a.epsilon - seed_epsilon).abs().total_cmp(&(b.epsilon - seed_epsilon).abs()));
    let landmarks = match seed {
        Some(d) => landmarks_from(d, window, range, cfg),
        None => Landmarks {
            seed_epsilon,
            bt_curve: None,
            cusp_locus: None,
            dbt: None,
            gbc: None,
            failures: vec!["no slice carries a cusp point".into()],
        },
    };
    Ok(EpsilonSweep {
        slices,
        gh_locus,
        landmarks,
    })
}
