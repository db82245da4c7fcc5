//! `sweep`: attractor census over a grid of `(μ, η)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use welander::flow::{attractor_census, default_ic_grid, fmt_f64};
use welander::{classify_region, IntegrationConfig, ModelParams, RegionQuery, Window};

pub const DEFAULT_N: usize = 21;
pub const DEFAULT_N_IC: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub eta: f64,
    /// `None` when the census failed.
    pub n_stable_eq: Option<usize>,
    pub cycle_flag: Option<bool>,
    pub region_label: String,
}

fn linspace((a, b): (f64, f64), n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn label(q: &ModelParams, n_eq: usize, cycle: bool) -> String {
    if q.is_pws() {
        return match classify_region(q.mu, q.eta, q) {
            Ok(RegionQuery::Region { id }) => id.as_str().to_string(),
            Ok(RegionQuery::Boundary { sublabel, .. }) => sublabel.as_str().to_string(),
            Err(_) => "unknown".to_string(),
        };
    }
    match (cycle, n_eq) {
        (true, _) => "oscillation",
        (false, 0) => "unknown",
        (false, 1) => "monostable",
        _ => "bistable",
    }
    .to_string()
}

pub fn sweep(
    p: &ModelParams,
    window: Window,
    n_mu: usize,
    n_eta: usize,
    n_ic: usize,
    cfg: &IntegrationConfig,
) -> anyhow::Result<Vec<SweepRow>> {
    if n_mu == 0 || n_eta == 0 || n_ic == 0 {
        return Err(welander::Error::InvalidParameter("grid sizes must be positive".into()).into());
    }
    let points: Vec<(f64, f64)> = linspace(window.eta, n_eta)
        .into_iter()
        .flat_map(|eta| linspace(window.mu, n_mu).into_iter().map(move |mu| (mu, eta)))
        .collect();
    Ok(points
        .par_iter()
        .map(|&(mu, eta)| {
            let q = p.with_mu_eta(mu, eta);
            match attractor_census(&q, cfg, &default_ic_grid(&q, n_ic)) {
                Ok(c) => SweepRow {
                    mu,
                    eta,
                    n_stable_eq: Some(c.equilibria.len()),
                    cycle_flag: Some(c.has_cycle()),
                    region_label: label(&q, c.equilibria.len(), c.has_cycle()),
                },
                Err(_) => SweepRow { mu, eta, n_stable_eq: None, cycle_flag: None, region_label: "unknown".into() },
            }
        })
        .collect())
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("mu,eta,n_stable_eq,cycle_flag,region_label\n");
    for r in rows {
        let n = r.n_stable_eq.map(|n| n.to_string()).unwrap_or_default();
        let c = r.cycle_flag.map(|c| u8::from(c).to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{n},{c},{}", fmt_f64(r.mu), fmt_f64(r.eta), r.region_label);
    }
    s
}
