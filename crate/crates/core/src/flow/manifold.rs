//! Invariant manifolds of equilibria and pseudo-equilibria.

use serde::{Deserialize, Serialize};

use super::pws::{Control, PwsIntegrator};
use super::smooth::integrate_smooth_until;
use super::trajectory::{Direction, IntegrationConfig, Trajectory};
use crate::continuation::solve_equilibrium;
use crate::error::{Error, Result};
use crate::filippov::{
    pseudo_equilibria, sliding_segment, PseudoKind, SegmentStability,
};
use crate::model::{
    region_equilibrium, surface_density_anomaly, vector_field_region, Mat2, ModelParams, Side,
    State,
};

/// Offset of the initial point from the equilibrium.
pub const MANIFOLD_OFFSET: f64 = 1e-7;

/// Orbits are stopped once `|x|` or `|y|` exceeds this.
const BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldDirection {
    StrongStable,
    Stable,
    Unstable,
    StrongUnstable,
}

impl ManifoldDirection {
    fn is_stable(self) -> bool {
        matches!(self, ManifoldDirection::StrongStable | ManifoldDirection::Stable)
    }

    fn time(self) -> Direction {
        if self.is_stable() {
            Direction::Backward
        } else {
            Direction::Forward
        }
    }
}

/// Which of the two branches leaving the equilibrium.
///
/// For eigendirections `Plus` has a positive leading nonzero component. At a
/// pseudo-equilibrium, transverse branches lie in R₂ (`Plus`) or R₁
/// (`Minus`), and branches along Σ go towards increasing (`Plus`) or
/// decreasing `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    fn side(self) -> Side {
        match self {
            Branch::Plus => Side::R2,
            Branch::Minus => Side::R1,
        }
    }
}

/// One branch of an invariant manifold of `eq`, integrated for `duration`
/// time units (backward for stable manifolds) or until it leaves a large box.
pub fn manifold_orbit(
    eq: State,
    p: &ModelParams,
    direction: ManifoldDirection,
    branch: Branch,
    cfg: &IntegrationConfig,
    duration: f64,
) -> Result<Trajectory> {
    p.validate()?;
    let start = manifold_start(eq, p, direction, branch)?;
    let time = direction.time();
    if p.is_pws() {
        PwsIntegrator::new(p, cfg, time)?
            .with_bound(BOUND)
            .run(start, duration, |_| Control::Continue)
    } else {
        integrate_smooth_until(start, p, cfg, duration, time, |s| {
            s.x.abs() > BOUND || s.y.abs() > BOUND
        })
    }
}

/// First point of the requested manifold branch.
pub fn manifold_start(
    eq: State,
    p: &ModelParams,
    direction: ManifoldDirection,
    branch: Branch,
) -> Result<State> {
    let v = if p.is_pws() {
        pws_direction(eq, p, direction, branch)?
    } else {
        let rec = solve_equilibrium(p, eq)?;
        if rec.state.dist(eq) > 1e-6 {
            return Err(Error::Domain(format!(
                "({}, {}) is not an equilibrium",
                eq.x, eq.y
            )));
        }
        let mut v = eigen_direction(&crate::model::smooth_jacobian(rec.state, p), direction)?;
        orient(&mut v, branch);
        return Ok(rec.state + MANIFOLD_OFFSET * State::from_array(v));
    };
    Ok(eq + MANIFOLD_OFFSET * State::from_array(v))
}

fn orient(v: &mut [f64; 2], branch: Branch) {
    let lead = if v[0].abs() > 1e-12 { v[0] } else { v[1] };
    let s = lead.signum() * branch.sign();
    v[0] *= s;
    v[1] *= s;
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Unit eigenvector of `j` selected by `direction`.
fn eigen_direction(j: &Mat2, direction: ManifoldDirection) -> Result<[f64; 2]> {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return Err(Error::Domain("equilibrium has no real eigendirections".into()));
    }
    let r = disc.sqrt();
    let (l1, l2) = ((tr - r) / 2.0, (tr + r) / 2.0);
    use ManifoldDirection::*;
    let lambda = match direction {
        StrongStable if l2 < 0.0 => l1,
        Stable if l1 < 0.0 && l2 > 0.0 => l1,
        Unstable if l1 < 0.0 && l2 > 0.0 => l2,
        StrongUnstable if l1 > 0.0 => l2,
        _ => {
            return Err(Error::Domain(format!(
                "no {direction:?} manifold for eigenvalues {l1}, {l2}"
            )))
        }
    };
    let a = [j[0][1], lambda - j[0][0]];
    let b = [lambda - j[1][1], j[1][0]];
    let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    Ok(unit(v))
}

fn pws_direction(
    eq: State,
    p: &ModelParams,
    direction: ManifoldDirection,
    branch: Branch,
) -> Result<[f64; 2]> {
    let u = surface_density_anomaly(eq, p);
    let not_eq = || Error::Domain(format!("({}, {}) is not an equilibrium", eq.x, eq.y));
    if u.abs() > 1e-9 {
        let side = if u < 0.0 { Side::R1 } else { Side::R2 };
        if region_equilibrium(side, p).dist(eq) > 1e-8 {
            return Err(not_eq());
        }
        // f_i is linear and diagonal: rates −(1+κ_i) along x, −κ_i along y.
        if direction != ManifoldDirection::StrongStable {
            return Err(Error::Domain(format!(
                "no {direction:?} manifold at a stable node"
            )));
        }
        return Ok([branch.sign(), 0.0]);
    }
    let pe = pseudo_equilibria(p)?
        .into_iter()
        .filter(|q| q.admissible)
        .find(|q| (q.location.x - eq.x).abs() < 1e-8)
        .ok_or_else(not_eq)?;
    let seg = sliding_segment(p).ok_or_else(not_eq)?;
    let attracting = seg.stability == SegmentStability::Attracting;
    use ManifoldDirection::*;
    // Orbits of f_i reach Σ in forward time on an attracting segment and leave
    // it on a repelling one; the sliding direction carries the rest.
    let transverse = match (pe.kind, attracting, direction) {
        (PseudoKind::Node, true, StrongStable) => true,
        (PseudoKind::Node, false, StrongUnstable | Unstable) => true,
        (PseudoKind::Saddle, true, Stable) => true,
        (PseudoKind::Saddle, false, Unstable) => true,
        (PseudoKind::Saddle, true, Unstable) => false,
        (PseudoKind::Saddle, false, Stable) => false,
        _ => {
            return Err(Error::Domain(format!(
                "no {direction:?} manifold at a {:?} pseudo-equilibrium",
                pe.kind
            )))
        }
    };
    if transverse {
        let side = branch.side();
        let f = vector_field_region(side, eq, p);
        // Stable branches sit upstream of Σ, unstable ones downstream.
        let s = if direction.is_stable() { -1.0 } else { 1.0 };
        Ok(unit([s * f[0], s * f[1]]))
    } else {
        let s = branch.sign() / 2f64.sqrt();
        Ok([s, s])
    }
}
