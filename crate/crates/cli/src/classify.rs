//! `classify`: region report for one parameter point of the PWS system.

use std::fmt::Write as _;

use serde::Serialize;
use welander::filippov::{pseudo_equilibria, sliding_segment, PseudoKind, SegmentStability, SlidingStability};
use welander::flow::{find_periodic_orbit, fmt_f64, OrbitStability};
use welander::model::region_equilibrium;
use welander::{classify_region, IntegrationConfig, ModelParams, RegionQuery, Side, SlidingSegment};

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumEntry {
    pub name: &'static str,
    pub x: f64,
    pub y: f64,
    pub admissible: bool,
    /// `node`, `pseudo-node`, `pseudo-saddle` or `pseudo-saddle-node`.
    pub kind: &'static str,
    pub attracting: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitEntry {
    pub x_sigma: f64,
    pub period: f64,
    pub multiplier: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub params: ModelParams,
    pub region: Option<String>,
    /// Curve segment name when the point lies on a bifurcation curve.
    pub boundary: Option<String>,
    pub summary: String,
    pub equilibria: Vec<EquilibriumEntry>,
    pub sliding_segment: Option<SlidingSegment>,
    pub periodic_orbit: Option<OrbitEntry>,
}

fn pretty(name: &str) -> &str {
    match name {
        "p1" => "p₁",
        "p2" => "p₂",
        "q-" => "q⁻",
        "q+" => "q⁺",
        other => other,
    }
}

fn equilibria(p: &ModelParams) -> Vec<EquilibriumEntry> {
    let mut out = Vec::new();
    for (name, side) in [("p1", Side::R1), ("p2", Side::R2)] {
        let s = region_equilibrium(side, p);
        let u = s.y - s.x - p.eta;
        let admissible = match side {
            Side::R1 => u < 0.0,
            Side::R2 => u > 0.0,
        };
        out.push(EquilibriumEntry { name, x: s.x, y: s.y, admissible, kind: "node", attracting: admissible });
    }
    let attracting_segment = sliding_segment(p).map(|s| s.stability == SegmentStability::Attracting);
    if let Ok(qs) = pseudo_equilibria(p) {
        let names: &[&str] = if qs.len() == 1 { &["q"] } else { &["q-", "q+"] };
        for (q, name) in qs.iter().zip(names) {
            let kind = match q.kind {
                PseudoKind::Node => "pseudo-node",
                PseudoKind::Saddle => "pseudo-saddle",
                PseudoKind::SaddleNode => "pseudo-saddle-node",
            };
            let attracting = q.admissible
                && q.kind == PseudoKind::Node
                && q.sliding_stability == SlidingStability::Stable
                && attracting_segment == Some(true);
            out.push(EquilibriumEntry {
                name,
                x: q.location.x,
                y: q.location.y,
                admissible: q.admissible,
                kind,
                attracting,
            });
        }
    }
    out
}

fn summary(label: &str, eqs: &[EquilibriumEntry], orbit: Option<&OrbitEntry>) -> String {
    let attractors: Vec<&str> = eqs.iter().filter(|e| e.attracting).map(|e| pretty(e.name)).collect();
    let mut parts = Vec::new();
    match (attractors.as_slice(), orbit) {
        ([one], None) => parts.push(format!("{one} global attractor")),
        ([], Some(o)) if o.stable => parts.push("stable crossing periodic orbit".to_string()),
        ([], _) => parts.push("no attracting equilibrium".to_string()),
        (many, o) => {
            parts.push(format!("{}stable {}", if many.len() > 1 { "bi" } else { "" }, many.join(", ")));
            if o.is_some_and(|o| o.stable) {
                parts.push("stable crossing periodic orbit".to_string());
            }
        }
    }
    for e in eqs.iter().filter(|e| e.admissible && !e.attracting && e.kind != "node") {
        let name = pretty(e.name);
        parts.push(match e.kind {
            "pseudo-saddle" => format!("saddle pseudo-equilibrium {name}"),
            "pseudo-node" => format!("{name} repelling pseudo-node admissible"),
            _ => format!("{name} pseudo-saddle-node admissible"),
        });
    }
    format!("{label}: {}", parts.join("; "))
}

pub fn classify(p: &ModelParams, cfg: &IntegrationConfig) -> anyhow::Result<ClassifyReport> {
    let p = p.with_epsilon(0.0);
    let query = classify_region(p.mu, p.eta, &p)?;
    let eqs = equilibria(&p);
    let has_attractor = eqs.iter().any(|e| e.attracting);
    let orbit = if has_attractor || p.eta == 0.0 {
        None
    } else {
        find_periodic_orbit(&p, cfg, None)?.map(|o| OrbitEntry {
            x_sigma: o.representative_state.x,
            period: o.period,
            multiplier: o.multiplier,
            stable: o.stability == OrbitStability::Stable,
        })
    };
    let (region, boundary, label) = match query {
        RegionQuery::Region { id } => (Some(id.as_str().to_string()), None, id.as_str().to_string()),
        RegionQuery::Boundary { sublabel, .. } => {
            (None, Some(sublabel.as_str().to_string()), format!("on {}", sublabel.as_str()))
        }
    };
    Ok(ClassifyReport {
        params: p,
        summary: summary(&label, &eqs, orbit.as_ref()),
        region,
        boundary,
        sliding_segment: sliding_segment(&p),
        equilibria: eqs,
        periodic_orbit: orbit,
    })
}

impl ClassifyReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.summary);
        if let Some(seg) = &self.sliding_segment {
            let st = match seg.stability {
                SegmentStability::Attracting => "attracting",
                SegmentStability::Repelling => "repelling",
            };
            let _ = writeln!(s, "sliding segment: x in [{}, {}], {st}", seg.x_lo, seg.x_hi);
        }
        for e in &self.equilibria {
            let adm = if e.admissible { "admissible" } else { "virtual" };
            let _ = writeln!(s, "{} ({}, {}) {} {adm}", pretty(e.name), e.x, e.y, e.kind);
        }
        if let Some(o) = &self.periodic_orbit {
            let _ = writeln!(
                s,
                "periodic orbit: period {}, multiplier {}, through x = {} on Σ",
                o.period, o.multiplier, o.x_sigma
            );
        }
        s
    }

    /// `name,x,y,kind,admissible,attracting` preceded by `# region` and
    /// `# summary` comment lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let region = self.region.as_deref().or(self.boundary.as_deref()).unwrap_or("");
        let _ = writeln!(s, "# region {region}");
        let _ = writeln!(s, "# {}", self.summary);
        s.push_str("name,x,y,kind,admissible,attracting\n");
        for e in &self.equilibria {
            let _ = writeln!(s, "{},{},{},{},{},{}", e.name, fmt_f64(e.x), fmt_f64(e.y), e.kind, e.admissible, e.attracting);
        }
        s
    }
}
