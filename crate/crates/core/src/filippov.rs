//! Geometry of the switching line `Σ = {y = x + η}` for the piecewise-smooth
//! system: Lie derivatives, tangency points, sliding segments, the sliding
//! vector field and pseudo-equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{vector_field_region, ModelParams, Side, State};

/// Tolerance on the second-Lie-derivative value below which a tangency is
/// reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Margin used for strict segment membership.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;
/// Tolerance on `lie1` for classifying a point of Σ as a tangency.
pub const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Invisible,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyPoint {
    pub location: State,
    pub field: Side,
    pub visibility: Visibility,
    /// The quantity whose sign decides visibility.
    pub degeneracy_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentStability {
    Attracting,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlidingSegment {
    pub x_lo: f64,
    pub x_hi: f64,
    pub stability: SegmentStability,
    /// Tangency points at `x_lo` and `x_hi`.
    pub endpoints: (TangencyPoint, TangencyPoint),
}

impl SlidingSegment {
    /// Strict interior membership with margin [`ADMISSIBILITY_TOL`].
    pub fn contains(&self, x: f64) -> bool {
        x > self.x_lo + ADMISSIBILITY_TOL && x < self.x_hi - ADMISSIBILITY_TOL
    }

    pub fn endpoint_at(&self, side: Side) -> &TangencyPoint {
        if self.endpoints.0.field == side {
            &self.endpoints.0
        } else {
            &self.endpoints.1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlidingStability {
    Stable,
    Unstable,
    /// Double root of the sliding field.
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PseudoKind {
    Node,
    Saddle,
    SaddleNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoEquilibrium {
    pub location: State,
    pub admissible: bool,
    pub sliding_stability: SlidingStability,
    pub kind: PseudoKind,
}

/// Classification of a point of Σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaPoint {
    /// Both fields cross Σ in the same direction; `into` is the region entered.
    Crossing { into: Side },
    /// Sliding point; attracting if both fields point towards Σ.
    Sliding(SegmentStability),
    /// `f_i` is tangent to Σ.
    Tangency(Side),
}

/// `f_i · (−1, 1)` on Σ at abscissa `x`.
#[inline]
pub fn lie1(side: Side, x: f64, p: &ModelParams) -> f64 {
    x - 1.0 + p.mu - p.eta * p.kappa(side)
}

/// Value whose sign decides the visibility of the tangency of `f_i`.
pub fn tangency_degeneracy(side: Side, p: &ModelParams) -> f64 {
    let k = p.kappa(side);
    p.mu + (p.mu - p.eta - 1.0) * k - p.eta * k * k
}

pub fn tangency_point(side: Side, p: &ModelParams) -> TangencyPoint {
    let k = p.kappa(side);
    let x = 1.0 - p.mu + p.eta * k;
    let value = tangency_degeneracy(side, p);
    let visibility = if value.abs() < DEGENERACY_TOL {
        Visibility::Degenerate
    } else {
        let visible = match side {
            Side::R1 => value < 0.0,
            Side::R2 => value > 0.0,
        };
        if visible {
            Visibility::Visible
        } else {
            Visibility::Invisible
        }
    };
    TangencyPoint {
        location: State::on_sigma(x, p.eta),
        field: side,
        visibility,
        degeneracy_value: value,
    }
}

pub fn tangency_points(p: &ModelParams) -> (TangencyPoint, TangencyPoint) {
    (tangency_point(Side::R1, p), tangency_point(Side::R2, p))
}

/// The sliding segment, or `None` when `η = 0`.
pub fn sliding_segment(p: &ModelParams) -> Option<SlidingSegment> {
    let (f1, f2) = tangency_points(p);
    if p.eta > 0.0 {
        Some(SlidingSegment {
            x_lo: f1.location.x,
            x_hi: f2.location.x,
            stability: SegmentStability::Attracting,
            endpoints: (f1, f2),
        })
    } else if p.eta < 0.0 {
        Some(SlidingSegment {
            x_lo: f2.location.x,
            x_hi: f1.location.x,
            stability: SegmentStability::Repelling,
            endpoints: (f2, f1),
        })
    } else {
        None
    }
}

fn require_eta(p: &ModelParams) -> Result<()> {
    if p.eta == 0.0 {
        Err(Error::Domain("sliding dynamics undefined for eta = 0".into()))
    } else {
        Ok(())
    }
}

/// Effective mixing rate `κ_eff = (x + μ − 1)/η` that makes the field tangent to Σ.
pub fn effective_kappa(x: f64, p: &ModelParams) -> Result<f64> {
    require_eta(p)?;
    Ok((x + p.mu - 1.0) / p.eta)
}

/// `λ` with `(1 − λ) f₁ + λ f₂` parallel to `(1, 1)` at `(x, x + η)`.
pub fn convex_coefficient(x: f64, p: &ModelParams) -> Result<f64> {
    let lambda = (effective_kappa(x, p)? - p.kappa1) / p.delta_kappa();
    if !(-ADMISSIBILITY_TOL..=1.0 + ADMISSIBILITY_TOL).contains(&lambda) {
        return Err(Error::Domain(format!(
            "x = {x} is outside the sliding segment (lambda = {lambda})"
        )));
    }
    Ok(lambda.clamp(0.0, 1.0))
}

/// Both Cartesian components of `(1 − λ) f₁ + λ f₂` at `(x, x + η)` for
/// unclamped `λ`; they agree identically.
pub fn sliding_combination(x: f64, p: &ModelParams) -> Result<[f64; 2]> {
    let lambda = (effective_kappa(x, p)? - p.kappa1) / p.delta_kappa();
    let s = State::on_sigma(x, p.eta);
    let f1 = vector_field_region(Side::R1, s, p);
    let f2 = vector_field_region(Side::R2, s, p);
    Ok([
        (1.0 - lambda) * f1[0] + lambda * f2[0],
        (1.0 - lambda) * f1[1] + lambda * f2[1],
    ])
}

/// Speed `dx/dτ = dy/dτ` of the sliding flow along Σ.
#[inline]
pub fn sliding_field(x: f64, p: &ModelParams) -> Result<f64> {
    require_eta(p)?;
    Ok(sliding_rhs(x, p))
}

#[inline]
pub(crate) fn sliding_rhs(x: f64, p: &ModelParams) -> f64 {
    (p.eta + (1.0 - p.mu - p.eta) * x - x * x) / p.eta
}

/// `d(sliding_field)/dx`.
pub fn sliding_field_slope(x: f64, p: &ModelParams) -> Result<f64> {
    require_eta(p)?;
    Ok((1.0 - p.mu - p.eta - 2.0 * x) / p.eta)
}

/// Discriminant `(η + μ + 1)² − 4μ` of the pseudo-equilibrium quadratic.
pub fn pseudo_discriminant(p: &ModelParams) -> f64 {
    let s = p.eta + p.mu + 1.0;
    s * s - 4.0 * p.mu
}

/// Roots `(q⁻, q⁺)` of the sliding field, `None` for a negative discriminant.
pub fn pseudo_roots(p: &ModelParams) -> Option<(f64, f64)> {
    let d = pseudo_discriminant(p);
    if d < 0.0 {
        return None;
    }
    let b = 1.0 - p.mu - p.eta;
    let r = d.sqrt();
    if b == 0.0 {
        return Some((-0.5 * r, 0.5 * r));
    }
    // Larger-magnitude root directly, the other from the product −η.
    let big = 0.5 * (b + r.copysign(b));
    let other = -p.eta / big;
    let (qm, qp) = if big >= other { (other, big) } else { (big, other) };
    Some((qm, qp))
}

/// Both pseudo-equilibria with admissibility and type. A double root is
/// reported once.
pub fn pseudo_equilibria(p: &ModelParams) -> Result<Vec<PseudoEquilibrium>> {
    require_eta(p)?;
    let Some((qm, qp)) = pseudo_roots(p) else {
        return Ok(Vec::new());
    };
    let seg = sliding_segment(p).expect("eta != 0");
    let attracting = seg.stability == SegmentStability::Attracting;
    let double = pseudo_discriminant(p) < 1e-14;
    let roots: &[f64] = if double { &[qm] } else { &[qm, qp] };
    Ok(roots
        .iter()
        .map(|&x| {
            let (sliding_stability, kind) = if double {
                (SlidingStability::Neutral, PseudoKind::SaddleNode)
            } else {
                let stable = sliding_field_slope(x, p).unwrap() < 0.0;
                let st = if stable {
                    SlidingStability::Stable
                } else {
                    SlidingStability::Unstable
                };
                let kind = if stable == attracting {
                    PseudoKind::Node
                } else {
                    PseudoKind::Saddle
                };
                (st, kind)
            };
            PseudoEquilibrium {
                location: State::on_sigma(x, p.eta),
                admissible: seg.contains(x),
                sliding_stability,
                kind,
            }
        })
        .collect())
}

/// Classify a point of Σ by the signs of the two Lie derivatives.
pub fn classify_sigma_point(x: f64, p: &ModelParams) -> SigmaPoint {
    let a = lie1(Side::R1, x, p);
    let b = lie1(Side::R2, x, p);
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
