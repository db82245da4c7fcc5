//! The adjusted Welander two-box model.
//!
//! Temperature and salinity of the surface box are rescaled to the anomalies
//! `x` and `y`, time to `τ = γ t`, and the mixing rate switches between the
//! non-convective rate `κ₁` and the convective rate `κ₂` as the density
//! anomaly `u = y − x − η` changes sign:
//!
//! ```text
//! ẋ = 1 − (1 + κ(u)) x
//! ẏ = μ − κ(u) y,         κ(u) = κ₁ + H_ε(u) (κ₂ − κ₁)
//! ```
//!
//! with `H_ε(u) = ½(1 + tanh(u/ε))` for `ε > 0` and the Heaviside step for
//! `ε = 0`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default non-convective mixing rate.
pub const DEFAULT_KAPPA1: f64 = 0.1;
/// Default convective mixing rate.
pub const DEFAULT_KAPPA2: f64 = 1.0;

/// Rate of change `(dx/dτ, dy/dτ)`.
pub type Velocity = [f64; 2];
/// Row-major 2×2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// Dimensional parameters of the two-box model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Thermal relaxation rate towards the atmosphere (1/time).
    pub gamma: f64,
    pub t_a: f64,
    pub t_0: f64,
    pub s_0: f64,
    /// Freshwater flux (length/time).
    pub f_0: f64,
    /// Depth of the surface box.
    pub h_depth: f64,
    pub alpha_s: f64,
    pub alpha_t: f64,
    pub k1: f64,
    pub k2: f64,
    /// Density threshold for convective mixing.
    pub g_star: f64,
    pub rho_0: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gamma,
            self.t_a,
            self.t_0,
            self.s_0,
            self.f_0,
            self.h_depth,
            self.alpha_s,
            self.alpha_t,
            self.k1,
            self.k2,
            self.g_star,
            self.rho_0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite physical parameter".into()));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter("gamma must be positive".into()));
        }
        if self.h_depth <= 0.0 {
            return Err(Error::InvalidParameter("h_depth must be positive".into()));
        }
        if self.rho_0 <= 0.0 {
            return Err(Error::InvalidParameter("rho_0 must be positive".into()));
        }
        if self.t_a == self.t_0 {
            return Err(Error::InvalidParameter("t_a must differ from t_0".into()));
        }
        if self.alpha_t == 0.0 {
            return Err(Error::InvalidParameter("alpha_t must be nonzero".into()));
        }
        if !(0.0 < self.k1 && self.k1 < self.k2) {
            return Err(Error::InvalidParameter("require 0 < k1 < k2".into()));
        }
        Ok(())
    }
}

/// Nondimensional parameters. `epsilon = 0` selects the piecewise-smooth limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub mu: f64,
    pub eta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub epsilon: f64,
}

impl ModelParams {
    pub fn new(mu: f64, eta: f64, kappa1: f64, kappa2: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            mu,
            eta,
            kappa1,
            kappa2,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    /// Piecewise-smooth parameters with the default mixing rates.
    pub fn pws(mu: f64, eta: f64) -> Self {
        Self {
            mu,
            eta,
            kappa1: DEFAULT_KAPPA1,
            kappa2: DEFAULT_KAPPA2,
            epsilon: 0.0,
        }
    }

    /// Smooth parameters with the default mixing rates.
    pub fn smooth(mu: f64, eta: f64, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::pws(mu, eta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.mu, self.eta, self.kappa1, self.kappa2, self.epsilon]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite model parameter".into()));
        }
        if !(0.0 < self.kappa1 && self.kappa1 < self.kappa2) {
            return Err(Error::InvalidParameter(format!(
                "require 0 < kappa1 < kappa2, got kappa1 = {}, kappa2 = {}",
                self.kappa1, self.kappa2
            )));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidParameter("epsilon must be >= 0".into()));
        }
        Ok(())
    }

    pub fn is_pws(&self) -> bool {
        self.epsilon == 0.0
    }

    pub fn delta_kappa(&self) -> f64 {
        self.kappa2 - self.kappa1
    }

    /// Mixing rate of field `side`.
    pub fn kappa(&self, side: Side) -> f64 {
        match side {
            Side::R1 => self.kappa1,
            Side::R2 => self.kappa2,
        }
    }

    pub fn with_mu_eta(&self, mu: f64, eta: f64) -> Self {
        Self { mu, eta, ..*self }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }
}

/// One of the two open half-planes separated by the switching line, and the
/// linear field that applies there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `y < x + η`: non-convective mixing.
    R1,
    /// `y > x + η`: convective mixing.
    R2,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::R1 => 1,
            Side::R2 => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Side::R1),
            2 => Ok(Side::R2),
            _ => Err(Error::Domain(format!("field index must be 1 or 2, got {i}"))),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Side::R1 => Side::R2,
            Side::R2 => Side::R1,
        }
    }
}

/// A point in the nondimensional temperature–salinity plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn from_array(a: [f64; 2]) -> Self {
        Self { x: a[0], y: a[1] }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: State) -> f64 {
        (self - other).norm()
    }

    /// The point on the switching line with abscissa `x`.
    pub fn on_sigma(x: f64, eta: f64) -> Self {
        Self { x, y: x + eta }
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    fn mul(self, s: State) -> State {
        State::new(self * s.x, self * s.y)
    }
}

/// Convert dimensional parameters. `epsilon` is not a physical quantity and is
/// supplied by the caller.
///
/// The threshold is scaled as `η = g* / (ρ₀ α_T (T_a − T₀))`, the factor that
/// makes `H(ρ − ρ₀ − g*)` a function of `y − x − η` alone.
pub fn nondimensionalize(p: &PhysicalParams, epsilon: f64) -> Result<ModelParams> {
    p.validate()?;
    let dt = p.t_a - p.t_0;
    let kappa1 = p.k1 / p.gamma;
    let kappa2 = p.k2 / p.gamma;
    let mu = p.f_0 * p.s_0 * p.alpha_s / (p.gamma * p.alpha_t * dt * p.h_depth);
    let eta = p.g_star / (p.alpha_t * dt * p.rho_0);
    ModelParams::new(mu, eta, kappa1, kappa2, epsilon)
}

/// `H_ε(u)`: `½(1 + tanh(u/ε))` for `ε > 0`, the Heaviside step for `ε = 0`
/// (with value ½ at `u = 0`).
pub fn switching_value(u: f64, epsilon: f64) -> f64 {
    if epsilon > 0.0 {
        0.5 * (1.0 + (u / epsilon).tanh())
    } else if u > 0.0 {
        1.0
    } else if u < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `H_ε` and its derivatives at a point, for `ε > 0`.
///
/// `d1..d3` are derivatives in `u`; `de` and `d1e` are `∂H/∂ε` and `∂²H/∂u∂ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub de: f64,
    pub d1e: f64,
    pub d2e: f64,
}

impl SwitchJet {
    pub fn at(u: f64, epsilon: f64) -> Self {
        let s = u / epsilon;
        let t = s.tanh();
        let sech2 = 1.0 - t * t;
        // Derivatives of φ(s) = ½(1 + tanh s).
        let p1 = 0.5 * sech2;
        let p2 = -t * sech2;
        let p3 = -sech2 * (1.0 - 3.0 * t * t);
        let e = epsilon;
        Self {
            value: 0.5 * (1.0 + t),
            d1: p1 / e,
            d2: p2 / (e * e),
            d3: p3 / (e * e * e),
            de: -p1 * s / e,
            d1e: -(p2 * s + p1) / (e * e),
            d2e: -(p3 * s + 2.0 * p2) / (e * e * e),
        }
    }
}

/// Nondimensional density anomaly `y − x − η`; positive on the convective side.
pub fn surface_density_anomaly(s: State, p: &ModelParams) -> f64 {
    s.y - s.x - p.eta
}

/// Effective mixing rate `κ₁ + H_ε(u)(κ₂ − κ₁)` at a state.
pub fn mixing_rate(s: State, p: &ModelParams) -> f64 {
    p.kappa1 + switching_value(surface_density_anomaly(s, p), p.epsilon) * p.delta_kappa()
}

fn require_smooth(p: &ModelParams) -> Result<()> {
    if p.epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(
            "smooth vector field requires epsilon > 0; use the piecewise-smooth engine".into(),
        ))
    }
}

/// Right-hand side of the smooth system (`ε > 0`).
pub fn vector_field_smooth(s: State, p: &ModelParams) -> Result<Velocity> {
    require_smooth(p)?;
    Ok(smooth_rhs(s, p))
}

#[inline]
pub(crate) fn smooth_rhs(s: State, p: &ModelParams) -> Velocity {
    let k = mixing_rate(s, p);
    [1.0 - (1.0 + k) * s.x, p.mu - k * s.y]
}

/// The linear field `f_i = (1 − (1 + κᵢ)x, μ − κᵢ y)`, defined on the whole plane.
#[inline]
pub fn vector_field_region(side: Side, s: State, p: &ModelParams) -> Velocity {
    let k = p.kappa(side);
    [1.0 - (1.0 + k) * s.x, p.mu - k * s.y]
}

/// Zero of `f_i`: `(1/(1 + κᵢ), μ/κᵢ)`.
pub fn region_equilibrium(side: Side, p: &ModelParams) -> State {
    let k = p.kappa(side);
    State::new(1.0 / (1.0 + k), p.mu / k)
}

/// Exact Jacobian of the smooth field.
pub fn jacobian_smooth(s: State, p: &ModelParams) -> Result<Mat2> {
    require_smooth(p)?;
    Ok(smooth_jacobian(s, p))
}

#[inline]
pub(crate) fn smooth_jacobian(s: State, p: &ModelParams) -> Mat2 {
    let u = surface_density_anomaly(s, p);
    let t = (u / p.epsilon).tanh();
    let dh = 0.5 * (1.0 - t * t) / p.epsilon;
    let k = p.kappa1 + 0.5 * (1.0 + t) * p.delta_kappa();
    let a = p.delta_kappa() * dh;
    [
        [-(1.0 + k) + s.x * a, -s.x * a],
        [s.y * a, -k - s.y * a],
    ]
}

pub fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn physical() -> PhysicalParams {
        PhysicalParams {
            gamma: 1.0,
            t_a: 20.0,
            t_0: 10.0,
            s_0: 35.0,
            f_0: 1e-3,
            h_depth: 100.0,
            alpha_s: 8e-4,
            alpha_t: 2e-4,
            k1: 0.1,
            k2: 1.0,
            g_star: 0.0,
            rho_0: 1000.0,
        }
    }

    #[test]
    fn nondimensionalize_reference_values() {
        let m = nondimensionalize(&physical(), 0.0).unwrap();
        // 1e-3 * 35 * 8e-4 / (1 * 2e-4 * 10 * 100)
        assert!((m.mu - 1.4e-4).abs() < 1e-18);
        assert_eq!(m.kappa1, 0.1);
        assert_eq!(m.kappa2, 1.0);
        assert_eq!(m.eta, 0.0);
    }

    #[test]
    fn zero_flux_and_zero_threshold() {
        let mut p = physical();
        p.f_0 = 0.0;
        p.g_star = 0.0;
        let m = nondimensionalize(&p, 0.1).unwrap();
        assert_eq!(m.mu, 0.0);
        assert_eq!(m.eta, 0.0);
        assert_eq!(m.epsilon, 0.1);
    }

    #[test]
    fn nondimensionalize_rejects_degenerate_inputs() {
        for f in [
            |p: &mut PhysicalParams| p.gamma = 0.0,
            |p: &mut PhysicalParams| p.h_depth = 0.0,
            |p: &mut PhysicalParams| p.rho_0 = 0.0,
            |p: &mut PhysicalParams| p.t_a = p.t_0,
            |p: &mut PhysicalParams| p.k2 = p.k1,
        ] {
            let mut p = physical();
            f(&mut p);
            assert!(matches!(
                nondimensionalize(&p, 0.0),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn time_unit_rescaling_leaves_parameters_unchanged() {
        let mut p = physical();
        p.g_star = 0.37;
        let base = nondimensionalize(&p, 0.0).unwrap();
        let c = 3.7;
        p.gamma *= c;
        p.k1 *= c;
        p.k2 *= c;
        p.f_0 *= c;
        let scaled = nondimensionalize(&p, 0.0).unwrap();
        for (a, b) in [
            (base.mu, scaled.mu),
            (base.eta, scaled.eta),
            (base.kappa1, scaled.kappa1),
            (base.kappa2, scaled.kappa2),
        ] {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn switching_values() {
        assert_eq!(switching_value(0.0, 0.1), 0.5);
        assert_eq!(switching_value(0.2, 0.0), 1.0);
        assert_eq!(switching_value(-0.2, 0.0), 0.0);
        assert_eq!(switching_value(0.0, 0.0), 0.5);
        let v = switching_value(0.2, 0.1);
        assert!((v - 0.5 * (1.0 + 2.0_f64.tanh())).abs() < 1e-15);
        assert!((v - 0.98201).abs() < 1e-5);
    }

    #[test]
    fn switch_jet_matches_finite_differences() {
        let eps = 0.07;
        for &u in &[-0.2, -0.03, 0.0, 0.011, 0.15] {
            let j = SwitchJet::at(u, eps);
            let h = 1e-5;
            let fd = |f: &dyn Fn(f64, f64) -> f64, du: f64, de: f64| {
                (f(u + du, eps + de) - f(u - du, eps - de)) / (2.0 * h)
            };
            let hv = |u: f64, e: f64| SwitchJet::at(u, e).value;
            let h1 = |u: f64, e: f64| SwitchJet::at(u, e).d1;
            let h2 = |u: f64, e: f64| SwitchJet::at(u, e).d2;
            let scale = |x: f64| 1e-5 * x.abs().max(1.0);
            assert!((j.d1 - fd(&hv, h, 0.0)).abs() < scale(j.d1));
            assert!((j.d2 - fd(&h1, h, 0.0)).abs() < scale(j.d2));
            assert!((j.d3 - fd(&h2, h, 0.0)).abs() < 1e-4 * j.d3.abs().max(1.0));
            assert!((j.de - fd(&hv, 0.0, h)).abs() < scale(j.de));
            assert!((j.d1e - fd(&h1, 0.0, h)).abs() < scale(j.d1e));
            assert!((j.d2e - fd(&h2, 0.0, h)).abs() < 1e-4 * j.d2e.abs().max(1.0));
        }
    }

    #[test]
    fn smooth_field_examples() {
        let p = ModelParams::smooth(0.14, 0.0, 0.1);
        assert_eq!(vector_field_smooth(State::new(0.0, 0.0), &p).unwrap(), [1.0, 0.14]);
        let eta = -0.37;
        let q = ModelParams::smooth(0.2, eta, 0.1);
        let v = vector_field_smooth(State::new(1.0, 1.0 + eta), &q).unwrap();
        assert!((v[0] + 0.55).abs() < 1e-14);
        assert!(vector_field_smooth(State::new(0.0, 0.0), &ModelParams::pws(0.1, 0.0)).is_err());
        assert!(jacobian_smooth(State::new(0.0, 0.0), &ModelParams::pws(0.1, 0.0)).is_err());
    }

    #[test]
    fn region_field_examples() {
        let p = ModelParams::pws(0.3, 0.1);
        let p1 = region_equilibrium(Side::R1, &p);
        let v = vector_field_region(Side::R1, p1, &p);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        let q = ModelParams::pws(0.25, 0.0);
        assert_eq!(vector_field_region(Side::R2, State::new(0.0, 0.0), &q), [1.0, 0.25]);
        let r = ModelParams::pws(0.5, 0.0);
        let v = vector_field_region(Side::R1, State::new(1.0, 0.0), &r);
        assert!((v[0] + 0.1).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_anomaly_examples() {
        let p = ModelParams::pws(0.0, -0.2);
        assert!(surface_density_anomaly(State::new(0.3, 0.1), &p).abs() < 1e-15);
        assert!((surface_density_anomaly(State::new(0.5, 0.9), &p) - 0.6).abs() < 1e-15);
        let q = ModelParams::pws(0.0225, 0.35);
        assert!(surface_density_anomaly(State::new(1.0125, 1.3625), &q).abs() < 1e-15);
    }

    #[test]
    fn jacobian_far_from_switch_is_diagonal() {
        let p = ModelParams::smooth(0.1, 0.2, 0.01);
        let s = State::new(1.0, 0.5); // u = -0.7, u/ε = -70
        let j = jacobian_smooth(s, &p).unwrap();
        let expected = [[-1.1, 0.0], [0.0, -0.1]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[r][c] - expected[r][c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn jacobian_on_switch_uses_peak_slope() {
        let p = ModelParams::smooth(0.1, 0.2, 0.05);
        let s = State::new(0.6, 0.8);
        let j = jacobian_smooth(s, &p).unwrap();
        let a = p.delta_kappa() / (2.0 * p.epsilon);
        assert!((j[0][1] + s.x * a).abs() < 1e-14);
        assert!((j[1][0] - s.y * a).abs() < 1e-14);
    }

    #[test]
    fn params_validation_and_serde() {
        assert!(ModelParams::new(0.1, 0.1, 1.0, 0.5, 0.0).is_err());
        assert!(ModelParams::new(0.1, 0.1, 0.1, 1.0, -0.1).is_err());
        let p = ModelParams::new(0.1 + 0.2, -1.0 / 3.0, 0.1, 1.0, 0.1).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: ModelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        let bad = r#"{"mu":0.1,"eta":0.0,"kappa1":0.1,"kappa2":1.0,"epsilon":0.0,"extra":1}"#;
        assert!(serde_json::from_str::<ModelParams>(bad).is_err());
    }
}
