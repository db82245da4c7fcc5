//! Distance between smooth bifurcation curves and unions of PWS segments.

use super::curves::{TwoParCurve, Window};
use crate::atlas::{pws_diagram, Sublabel};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// PWS segments bounding the fold surface as `ε → 0`.
pub const S_LIMIT: [Sublabel; 4] = [Sublabel::Be1F, Sublabel::Be2F, Sublabel::Be2FHat, Sublabel::Ps];
/// PWS segments bounding the Hopf surface as `ε → 0`.
pub const H_LIMIT: [Sublabel; 4] = [
    Sublabel::Be1PHat,
    Sublabel::Be2PHat,
    Sublabel::Be1PTilde,
    Sublabel::Fu,
];
pub const MATCHED_SAMPLES: usize = 50;

type Pt = [f64; 2];

fn seg_dist(p: Pt, a: Pt, b: Pt) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Distance from `p` to the nearest point of any polyline.
pub fn polyline_distance(p: Pt, lines: &[Vec<Pt>]) -> f64 {
    lines
        .iter()
        .flat_map(|l| {
            if l.len() == 1 {
                vec![seg_dist(p, l[0], l[0])]
            } else {
                l.windows(2).map(|w| seg_dist(p, w[0], w[1])).collect()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn length(l: &[Pt]) -> f64 {
    l.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum()
}

/// `n` points equally spaced in arclength over the union of `lines`.
pub fn resample(lines: &[Vec<Pt>], n: usize) -> Vec<Pt> {
    let total: f64 = lines.iter().map(|l| length(l)).sum();
    let firsts = || lines.iter().filter_map(|l| l.first().copied());
    if n == 0 || total == 0.0 {
        return firsts().take(n).collect();
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = total * i as f64 / (n - 1).max(1) as f64;
        'lines: for l in lines {
            for w in l.windows(2) {
                let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
                if s <= d {
                    let t = if d > 0.0 { s / d } else { 0.0 };
                    out.push([w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])]);
                    break 'lines;
                }
                s -= d;
            }
        }
        if out.len() <= i {
            let last = lines.iter().rev().find_map(|l| l.last().copied());
            out.extend(last);
        }
    }
    out
}

/// Largest distance from `n` arclength samples of `from` to the union `to`.
pub fn one_sided_distance(from: &[Vec<Pt>], to: &[Vec<Pt>], n: usize) -> f64 {
    resample(from, n)
        .into_iter()
        .map(|p| polyline_distance(p, to))
        .fold(0.0, f64::max)
}

/// Symmetric distance between two unions of polylines: each is resampled
/// at `n` points and the largest point-to-union distance in either direction
/// is returned.
pub fn matched_distance(a: &[Vec<Pt>], b: &[Vec<Pt>], n: usize) -> f64 {
    one_sided_distance(a, b, n).max(one_sided_distance(b, a, n))
}

/// Polylines of the given PWS segments inside the window.
pub fn pws_segments(targets: &[Sublabel], p: &ModelParams, window: Window) -> Result<Vec<Vec<Pt>>> {
    let d = pws_diagram(&p.with_epsilon(0.0), window.mu, window.eta, 400)?;
    Ok(d
        .curves
        .iter()
        .flat_map(|c| c.sublabels.iter())
        .filter(|s| targets.contains(&s.name))
        .map(|s| s.mu_eta_polyline.clone())
        .collect())
}

/// [`matched_distance`] between a smooth curve and a union of PWS segments.
pub fn pws_limit_distance(
    curve: &TwoParCurve,
    targets: &[Sublabel],
    p: &ModelParams,
    window: Window,
) -> Result<f64> {
    let line = curve.polyline();
    if line.len() < 2 {
        return Err(Error::Domain(format!("{} has fewer than two samples", curve.label.as_str())));
    }
    let target = pws_segments(targets, p, window)?;
    Ok(matched_distance(&[line], &target, MATCHED_SAMPLES))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::curves::smooth_diagram;
    use crate::continuation::CurveKind;

    #[test]
    fn resample_spacing() {
        let lines = vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[5.0, 0.0], [5.0, 1.0]]];
        let r = resample(&lines, 5);
        assert_eq!(r, vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [5.0, 0.5], [5.0, 1.0]]);
    }

    #[test]
    fn distance_is_symmetric_and_sees_missing_pieces() {
        let a = vec![vec![[0.0, 0.0], [1.0, 0.0]]];
        let b = vec![vec![[0.0, 0.1], [1.0, 0.1]]];
        assert!((matched_distance(&a, &b, 11) - 0.1).abs() < 1e-12);
        let longer = vec![vec![[0.0, 0.0], [2.0, 0.0]]];
        assert!((matched_distance(&a, &longer, 11) - 1.0).abs() < 1e-12);
        assert!((matched_distance(&longer, &a, 11) - 1.0).abs() < 1e-12);
        assert!((polyline_distance([0.5, -2.0], &a) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn segments_respect_window() {
        let p = ModelParams::pws(0.0, 0.0);
        let w = Window::default();
        let segs = pws_segments(&S_LIMIT, &p, w).unwrap();
        assert!(!segs.is_empty());
        for s in segs.iter().flatten() {
            assert!(w.contains(s[0], s[1]));
        }
    }

    #[test]
    fn fold_curve_lies_along_pws_union() {
        let p = ModelParams::smooth(0.0, 0.0, 0.005);
        let w = Window::default();
        let d = smooth_diagram(&p, w, &Default::default()).unwrap();
        let s = d.curve(CurveKind::S).unwrap();
        let target = pws_segments(&S_LIMIT, &p, w).unwrap();
        let near = one_sided_distance(&[s.polyline()], &target, MATCHED_SAMPLES);
        assert!(near < 0.02, "{near}");
        assert!(pws_limit_distance(s, &S_LIMIT, &p, w).unwrap() >= near);
    }

    /// Near `h = 1` the fold curve reads `μ ≈ μ_GB₂ − Cδ − k²ε/(2Δκ δ)` with
    /// `δ = 1 − h`, so the cusp sits at `δ ∼ √ε` and stays `O(√ε)` from GB₂.
    #[test]
    fn cusp_approaches_gb2_like_sqrt_epsilon() {
        for eps in [0.01, 0.0025] {
            let d = smooth_diagram(&ModelParams::smooth(0.0, 0.0, eps), Window::default(), &Default::default())
                .unwrap();
            let cps = d.points_of(crate::continuation::BranchPointKind::Cusp);
            assert_eq!(cps.len(), 1);
            let r = (cps[0].mu - 0.25).hypot(cps[0].eta + 0.25) / eps.sqrt();
            assert!((0.95..1.15).contains(&r), "eps {eps}: {r}");
        }
    }
}
