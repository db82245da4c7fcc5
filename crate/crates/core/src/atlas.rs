//! Closed-form bifurcation diagram of the piecewise-smooth system in the
//! `(μ, η)` plane.
//!
//! With `tᵢ = κᵢ/(1+κᵢ)` the codimension-two points sit at
//! `GB₁ = t₁² < BB = t₁t₂ < FB₁ = t₁` along BE₁ and
//! `BB < GB₂ = t₂² < FB₂ = t₂` along BE₂.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Side};

/// Distance in `(μ, η)` below which a query counts as lying on a curve.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl RegionId {
    pub const ALL: [RegionId; 8] = [
        RegionId::I,
        RegionId::II,
        RegionId::III,
        RegionId::IV,
        RegionId::V,
        RegionId::VI,
        RegionId::VII,
        RegionId::VIII,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionId::I => "I",
            RegionId::II => "II",
            RegionId::III => "III",
            RegionId::IV => "IV",
            RegionId::V => "V",
            RegionId::VI => "VI",
            RegionId::VII => "VII",
            RegionId::VIII => "VIII",
        }
    }

    /// `"periodic-orbit"` for V, `"bistability"` for VIII.
    pub fn shading(self) -> Option<&'static str> {
        match self {
            RegionId::V => Some("periodic-orbit"),
            RegionId::VIII => Some("bistability"),
            _ => None,
        }
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveLabel {
    #[serde(rename = "BE1")]
    Be1,
    #[serde(rename = "BE2")]
    Be2,
    #[serde(rename = "FF")]
    Ff,
    #[serde(rename = "PS")]
    Ps,
}

impl CurveLabel {
    pub const ALL: [CurveLabel; 4] = [CurveLabel::Be1, CurveLabel::Be2, CurveLabel::Ff, CurveLabel::Ps];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveLabel::Be1 => "BE1",
            CurveLabel::Be2 => "BE2",
            CurveLabel::Ff => "FF",
            CurveLabel::Ps => "PS",
        }
    }

    fn be(side: Side) -> Self {
        match side {
            Side::R1 => CurveLabel::Be1,
            Side::R2 => CurveLabel::Be2,
        }
    }
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Segment of a curve between consecutive codimension-two points.
///
/// `P`/`F`: persistence or nonsmooth fold of the boundary equilibrium; a hat
/// marks segments bounding the periodic-orbit region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublabel {
    #[serde(rename = "BE1^P")]
    Be1P,
    #[serde(rename = "^BE1^P")]
    Be1PHat,
    #[serde(rename = "~BE1^P")]
    Be1PTilde,
    #[serde(rename = "BE1^F")]
    Be1F,
    #[serde(rename = "BE2^P")]
    Be2P,
    #[serde(rename = "^BE2^P")]
    Be2PHat,
    #[serde(rename = "^BE2^F")]
    Be2FHat,
    #[serde(rename = "BE2^F")]
    Be2F,
    #[serde(rename = "FF1")]
    Ff1,
    #[serde(rename = "FU")]
    Fu,
    #[serde(rename = "FF2")]
    Ff2,
    #[serde(rename = "PS")]
    Ps,
}

impl Sublabel {
    pub const ALL: [Sublabel; 12] = [
        Sublabel::Be1P,
        Sublabel::Be1PHat,
        Sublabel::Be1PTilde,
        Sublabel::Be1F,
        Sublabel::Be2P,
        Sublabel::Be2PHat,
        Sublabel::Be2FHat,
        Sublabel::Be2F,
        Sublabel::Ff1,
        Sublabel::Fu,
        Sublabel::Ff2,
        Sublabel::Ps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Sublabel::Be1P => "BE1^P",
            Sublabel::Be1PHat => "^BE1^P",
            Sublabel::Be1PTilde => "~BE1^P",
            Sublabel::Be1F => "BE1^F",
            Sublabel::Be2P => "BE2^P",
            Sublabel::Be2PHat => "^BE2^P",
            Sublabel::Be2FHat => "^BE2^F",
            Sublabel::Be2F => "BE2^F",
            Sublabel::Ff1 => "FF1",
            Sublabel::Fu => "FU",
            Sublabel::Ff2 => "FF2",
            Sublabel::Ps => "PS",
        }
    }

    pub fn curve(self) -> CurveLabel {
        use Sublabel::*;
        match self {
            Be1P | Be1PHat | Be1PTilde | Be1F => CurveLabel::Be1,
            Be2P | Be2PHat | Be2FHat | Be2F => CurveLabel::Be2,
            Ff1 | Fu | Ff2 => CurveLabel::Ff,
            Ps => CurveLabel::Ps,
        }
    }

    /// μ-interval of the segment.
    pub fn mu_interval(self, p: &ModelParams) -> (f64, f64) {
        let c = Codim2Set::new(p);
        let inf = f64::INFINITY;
        use Sublabel::*;
        match self {
            Be1P => (c.fb1.mu, inf),
            Be1PHat => (c.bb.mu, c.fb1.mu),
            Be1PTilde => (c.gb1.mu, c.bb.mu),
            Be1F => (-inf, c.gb1.mu),
            Be2P => (c.fb2.mu, inf),
            Be2PHat => (c.gb2.mu, c.fb2.mu),
            Be2FHat => (c.bb.mu, c.gb2.mu),
            Be2F => (-inf, c.bb.mu),
            Ff1 => (-inf, c.fb1.mu),
            Fu => (c.fb1.mu, c.fb2.mu),
            Ff2 => (c.fb2.mu, inf),
            Ps => (c.gb1.mu, c.gb2.mu),
        }
    }
}

impl fmt::Display for Sublabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Codim2Kind {
    FB1,
    FB2,
    BB,
    GB1,
    GB2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Codim2Point {
    pub kind: Codim2Kind,
    pub mu: f64,
    pub eta: f64,
}

struct Codim2Set {
    fb1: Codim2Point,
    fb2: Codim2Point,
    bb: Codim2Point,
    gb1: Codim2Point,
    gb2: Codim2Point,
}

impl Codim2Set {
    fn new(p: &ModelParams) -> Self {
        let (k1, k2) = (p.kappa1, p.kappa2);
        let pt = |kind, mu, eta| Codim2Point { kind, mu, eta };
        Self {
            fb1: pt(Codim2Kind::FB1, k1 / (1.0 + k1), 0.0),
            fb2: pt(Codim2Kind::FB2, k2 / (1.0 + k2), 0.0),
            bb: pt(
                Codim2Kind::BB,
                k1 * k2 / ((k1 + 1.0) * (k2 + 1.0)),
                -1.0 / ((k1 + 1.0) * (k2 + 1.0)),
            ),
            gb1: pt(
                Codim2Kind::GB1,
                k1 * k1 / ((k1 + 1.0) * (k1 + 1.0)),
                -1.0 / ((k1 + 1.0) * (k1 + 1.0)),
            ),
            gb2: pt(
                Codim2Kind::GB2,
                k2 * k2 / ((k2 + 1.0) * (k2 + 1.0)),
                -1.0 / ((k2 + 1.0) * (k2 + 1.0)),
            ),
        }
    }
}

/// The boundary-equilibrium curve BEᵢ: `η = μ/κᵢ − 1/(1+κᵢ)`.
pub fn be_curve(side: Side, mu: f64, p: &ModelParams) -> f64 {
    let k = p.kappa(side);
    mu / k - 1.0 / (1.0 + k)
}

/// The pseudo-saddle-node curve `η = −(μ+1) + 2√μ`, defined between GB₁
/// and GB₂.
pub fn ps_curve(mu: f64, p: &ModelParams) -> Result<Option<f64>> {
    if mu < 0.0 {
        return Err(Error::Domain(format!("PS curve needs mu >= 0, got {mu}")));
    }
    let c = Codim2Set::new(p);
    if mu < c.gb1.mu || mu > c.gb2.mu {
        return Ok(None);
    }
    Ok(Some(ps_eta(mu)))
}

fn ps_eta(mu: f64) -> f64 {
    -(mu + 1.0) + 2.0 * mu.sqrt()
}

/// FB₁, FB₂, BB, GB₁, GB₂.
pub fn codim2_points(p: &ModelParams) -> Vec<Codim2Point> {
    let c = Codim2Set::new(p);
    vec![c.fb1, c.fb2, c.bb, c.gb1, c.gb2]
}

/// Result of a region query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionQuery {
    Region { id: RegionId },
    Boundary { curve: CurveLabel, sublabel: Sublabel },
}

impl RegionQuery {
    pub fn region(self) -> Option<RegionId> {
        match self {
            RegionQuery::Region { id } => Some(id),
            RegionQuery::Boundary { .. } => None,
        }
    }
}

/// Euclidean distance from `(μ, η)` to each curve, nearest first.
fn curve_distances(mu: f64, eta: f64, p: &ModelParams) -> Vec<(CurveLabel, f64)> {
    let mut d = Vec::with_capacity(4);
    for side in [Side::R1, Side::R2] {
        let k = p.kappa(side);
        let slope = 1.0 / k;
        d.push((
            CurveLabel::be(side),
            (eta - be_curve(side, mu, p)).abs() / (1.0 + slope * slope).sqrt(),
        ));
    }
    d.push((CurveLabel::Ff, eta.abs()));
    let c = Codim2Set::new(p);
    let lo = (c.gb1.mu - BOUNDARY_TOL).max(0.0);
    let hi = c.gb2.mu + BOUNDARY_TOL;
    if mu >= lo && mu <= hi {
        let m = mu.clamp(c.gb1.mu, c.gb2.mu);
        let slope = 1.0 / m.sqrt() - 1.0;
        d.push((
            CurveLabel::Ps,
            (eta - ps_eta(m)).abs() / (1.0 + slope * slope).sqrt(),
        ));
    }
    d.sort_by(|a, b| a.1.total_cmp(&b.1));
    d
}

/// Region containing `(μ, η)`, or the curve segment it lies on.
pub fn classify_region(mu: f64, eta: f64, p: &ModelParams) -> Result<RegionQuery> {
    p.validate()?;
    if !(mu.is_finite() && eta.is_finite()) {
        return Err(Error::InvalidParameter("mu and eta must be finite".into()));
    }
    let (curve, dist) = curve_distances(mu, eta, p)[0];
    if dist < BOUNDARY_TOL {
        return Ok(RegionQuery::Boundary {
            curve,
            sublabel: sublabel_at(curve, mu, p),
        });
    }
    Ok(RegionQuery::Region {
        id: region_off_curves(mu, eta, p),
    })
}

fn region_off_curves(mu: f64, eta: f64, p: &ModelParams) -> RegionId {
    let p1 = eta > be_curve(Side::R1, mu, p);
    let p2 = eta < be_curve(Side::R2, mu, p);
    if eta > 0.0 {
        return if p1 {
            RegionId::I
        } else if p2 {
            RegionId::III
        } else {
            RegionId::II
        };
    }
    match (p1, p2) {
        (true, false) => RegionId::IV,
        (true, true) => RegionId::VIII,
        (false, false) => RegionId::V,
        (false, true) => {
            let c = Codim2Set::new(p);
            if mu > c.gb1.mu && mu < c.gb2.mu && eta > ps_eta(mu) {
                RegionId::VII
            } else {
                RegionId::VI
            }
        }
    }
}

fn sublabel_at(curve: CurveLabel, mu: f64, p: &ModelParams) -> Sublabel {
    let c = Codim2Set::new(p);
    use Sublabel::*;
    match curve {
        CurveLabel::Ff => {
            if mu < c.fb1.mu {
                Ff1
            } else if mu < c.fb2.mu {
                Fu
            } else {
                Ff2
            }
        }
        CurveLabel::Be1 => {
            if mu > c.fb1.mu {
                Be1P
            } else if mu > c.bb.mu {
                Be1PHat
            } else if mu > c.gb1.mu {
                Be1PTilde
            } else {
                Be1F
            }
        }
        CurveLabel::Be2 => {
            if mu > c.fb2.mu {
                Be2P
            } else if mu > c.gb2.mu {
                Be2PHat
            } else if mu > c.bb.mu {
                Be2FHat
            } else {
                Be2F
            }
        }
        CurveLabel::Ps => Ps,
    }
}

/// Segment of `curve` containing `(μ, η)`.
pub fn segment_label(curve: CurveLabel, mu: f64, eta: f64, p: &ModelParams) -> Result<Sublabel> {
    p.validate()?;
    let on = curve_distances(mu, eta, p)
        .into_iter()
        .any(|(c, d)| c == curve && d < BOUNDARY_TOL);
    if !on {
        return Err(Error::Domain(format!(
            "({mu}, {eta}) is not on the {curve} curve"
        )));
    }
    Ok(sublabel_at(curve, mu, p))
}

/// `η` of `curve` at `μ` (PS outside its range is extrapolated).
pub fn curve_eta(curve: CurveLabel, mu: f64, p: &ModelParams) -> f64 {
    match curve {
        CurveLabel::Be1 => be_curve(Side::R1, mu, p),
        CurveLabel::Be2 => be_curve(Side::R2, mu, p),
        CurveLabel::Ff => 0.0,
        CurveLabel::Ps => ps_eta(mu),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublabelPolyline {
    pub name: Sublabel,
    pub mu_eta_polyline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifCurve {
    pub label: CurveLabel,
    pub sublabels: Vec<SublabelPolyline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionInfo {
    pub id: RegionId,
    pub shading: Option<String>,
    /// A point of the region inside the window.
    pub sample: [f64; 2],
}

/// Regions on either side of one curve segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Adjacency {
    pub sublabel: Sublabel,
    /// Region on the side of larger `η`.
    pub above: RegionId,
    pub below: RegionId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwsDiagram {
    pub params: ModelParams,
    pub mu_range: (f64, f64),
    pub eta_range: (f64, f64),
    pub curves: Vec<BifCurve>,
    pub points: Vec<Codim2Point>,
    pub regions: Vec<RegionInfo>,
    pub adjacency: Vec<Adjacency>,
}

impl PwsDiagram {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    /// One row per sample: `mu,eta,label,sublabel`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,eta,label,sublabel\n");
        for c in &self.curves {
            for s in &c.sublabels {
                for [m, e] in &s.mu_eta_polyline {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        crate::flow::fmt_f64(*m),
                        crate::flow::fmt_f64(*e),
                        c.label,
                        s.name
                    ));
                }
            }
        }
        out
    }
}

/// Regions on either side of every curve segment, probed at an interior
/// point of each segment.
pub fn segment_adjacency(p: &ModelParams) -> Vec<Adjacency> {
    let c = Codim2Set::new(p);
    let span = c.fb2.mu - c.gb1.mu;
    Sublabel::ALL
        .iter()
        .map(|&s| {
            let (a, b) = s.mu_interval(p);
            let mu = match (a.is_finite(), b.is_finite()) {
                (true, true) => 0.5 * (a + b),
                (true, false) => a + 0.25 * span,
                (false, true) => b - 0.25 * span,
                (false, false) => unreachable!(),
            };
            let eta = curve_eta(s.curve(), mu, p);
            let h = 1e-7 * (1.0 + eta.abs());
            Adjacency {
                sublabel: s,
                above: region_off_curves(mu, eta + h, p),
                below: region_off_curves(mu, eta - h, p),
            }
        })
        .collect()
}

fn curve_pieces(
    label: CurveLabel,
    p: &ModelParams,
    mu_range: (f64, f64),
    eta_range: (f64, f64),
    n: usize,
) -> Vec<SublabelPolyline> {
    let subs: Vec<Sublabel> = Sublabel::ALL.iter().copied().filter(|s| s.curve() == label).collect();
    let (mut lo, mut hi) = mu_range;
    match label {
        CurveLabel::Be1 | CurveLabel::Be2 => {
            let side = if label == CurveLabel::Be1 { Side::R1 } else { Side::R2 };
            let k = p.kappa(side);
            let off = 1.0 / (1.0 + k);
            lo = lo.max(k * (eta_range.0 + off));
            hi = hi.min(k * (eta_range.1 + off));
        }
        CurveLabel::Ff => {
            if !(eta_range.0 <= 0.0 && 0.0 <= eta_range.1) {
                return Vec::new();
            }
        }
        CurveLabel::Ps => {}
    }
    let mut out = Vec::new();
    for s in subs {
        let (a, b) = s.mu_interval(p);
        let (a, b) = (a.max(lo), b.min(hi));
        if !(a < b) {
            continue;
        }
        let mut mus: Vec<f64> = vec![a, b];
        for i in 1..n.max(2) - 1 {
            let m = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
            if m > a && m < b {
                mus.push(m);
            }
        }
        mus.sort_by(f64::total_cmp);
        let poly: Vec<[f64; 2]> = mus
            .into_iter()
            .map(|m| [m, curve_eta(label, m, p)])
            .filter(|[_, e]| label != CurveLabel::Ps || (*e >= eta_range.0 && *e <= eta_range.1))
            .collect();
        if poly.len() >= 2 {
            out.push(SublabelPolyline {
                name: s,
                mu_eta_polyline: poly,
            });
        }
    }
    out
}

/// The four curves over the window, split at the codimension-two points, with
/// the regions met on a grid of `n_samples × n_samples` probes.
pub fn pws_diagram(
    p: &ModelParams,
    mu_range: (f64, f64),
    eta_range: (f64, f64),
    n_samples: usize,
) -> Result<PwsDiagram> {
    p.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    if !(mu_range.0 < mu_range.1 && eta_range.0 < eta_range.1) {
        return Err(Error::InvalidParameter("empty window".into()));
    }
    let curves: Vec<BifCurve> = CurveLabel::ALL
        .iter()
        .map(|&label| BifCurve {
            label,
            sublabels: curve_pieces(label, p, mu_range, eta_range, n_samples),
        })
        .filter(|c| !c.sublabels.is_empty())
        .collect();
    let inside = |c: &Codim2Point| {
        c.mu >= mu_range.0 && c.mu <= mu_range.1 && c.eta >= eta_range.0 && c.eta <= eta_range.1
    };
    let points: Vec<Codim2Point> = codim2_points(p).into_iter().filter(inside).collect();

    let n = n_samples.max(2);
    let probes: Vec<Option<(RegionId, [f64; 2])>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            let mu = mu_range.0 + (mu_range.1 - mu_range.0) * (i as f64 + 0.5) / n as f64;
            let eta = eta_range.0 + (eta_range.1 - eta_range.0) * (j as f64 + 0.5) / n as f64;
            classify_region(mu, eta, p)
                .ok()
                .and_then(RegionQuery::region)
                .map(|r| (r, [mu, eta]))
        })
        .collect();
    let mut regions: Vec<RegionInfo> = Vec::new();
    for (id, sample) in probes.into_iter().flatten() {
        if !regions.iter().any(|r| r.id == id) {
            regions.push(RegionInfo {
                id,
                shading: id.shading().map(String::from),
                sample,
            });
        }
    }
    regions.sort_by_key(|r| r.id);
    Ok(PwsDiagram {
        params: *p,
        mu_range,
        eta_range,
        curves,
        points,
        regions,
        adjacency: segment_adjacency(p),
    })
}

/// Default `(μ, η)` window.
pub const DEFAULT_MU_RANGE: (f64, f64) = (-0.2, 1.0);
pub const DEFAULT_ETA_RANGE: (f64, f64) = (-1.2, 0.6);
