//! Pseudo-arclength continuation of the solution curve of `F(z) = 0`,
//! `F: ℝⁿ⁺¹ → ℝⁿ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::rk::illinois;

/// Residual and `n × (n+1)` Jacobian, or `None` where `F` is undefined.
pub type Eval = Option<(DVector<f64>, DMatrix<f64>)>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PalConfig {
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Corrector tolerance on `‖F‖∞`.
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for PalConfig {
    fn default() -> Self {
        Self {
            h0: 1e-3,
            h_min: 1e-12,
            h_max: 0.02,
            max_steps: 20_000,
            tol: 1e-11,
            max_newton: 8,
        }
    }
}

impl PalConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.h_min > 0.0
            && self.h_min <= self.h0
            && self.h0 <= self.h_max
            && self.h_max.is_finite()
            && self.tol > 0.0
            && self.max_newton > 0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid continuation config {self:?}")))
        }
    }

    /// Step bounds shrunk in proportion to `ε` below `ε = 0.02`.
    pub fn for_epsilon(&self, epsilon: f64) -> Self {
        let f = (epsilon / 0.02).min(1.0);
        if f >= 1.0 || f <= 0.0 {
            return *self;
        }
        Self {
            h0: (self.h0 * f).max(self.h_min),
            h_max: (self.h_max * f).max(self.h_min),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PalPoint {
    pub z: DVector<f64>,
    /// Unit tangent in the direction of travel.
    pub tangent: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum PalStop {
    MaxSteps,
    /// The point callback asked to stop.
    Callback,
    StepCollapse { step: f64 },
}

/// Newton on `[F(z); t·(z − z_pred)] = 0`.
fn correct<F>(f: &F, z_pred: &DVector<f64>, t: &DVector<f64>, cfg: &PalConfig) -> Option<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Eval,
{
    let n = t.len();
    let mut z = z_pred.clone();
    for _ in 0..=cfg.max_newton {
        let (r, j) = f(&z)?;
        let plane = t.dot(&(&z - z_pred));
        if r.amax() < cfg.tol && plane.abs() < cfg.tol {
            return Some(z);
        }
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (n - 1, n)).copy_from(&j);
        a.row_mut(n - 1).copy_from(&t.transpose());
        let mut rhs = DVector::zeros(n);
        rhs.rows_mut(0, n - 1).copy_from(&(-&r));
        rhs[n - 1] = -plane;
        let dz = a.lu().solve(&rhs)?;
        z += dz;
        if !z.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    let (r, _) = f(&z)?;
    (r.amax() < cfg.tol).then_some(z)
}

/// Unit tangent at `z` oriented along `hint`.
pub fn tangent<F>(f: &F, z: &DVector<f64>, hint: &DVector<f64>) -> Option<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Eval,
{
    let n = z.len();
    let (_, j) = f(z)?;
    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (n - 1, n)).copy_from(&j);
    a.row_mut(n - 1).copy_from(&hint.transpose());
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let v = a.lu().solve(&rhs)?;
    let norm = v.norm();
    (norm.is_finite() && norm > 0.0).then(|| v / norm)
}

/// Trace the curve from `z0` in the direction of `hint`.
///
/// `accept` sees every new point and returns `false` to stop; the rejected
/// point is not stored.
pub fn continue_curve<F, A>(
    f: F,
    z0: DVector<f64>,
    hint: DVector<f64>,
    cfg: &PalConfig,
    mut accept: A,
) -> Result<(Vec<PalPoint>, PalStop)>
where
    F: Fn(&DVector<f64>) -> Eval,
    A: FnMut(&PalPoint) -> bool,
{
    cfg.validate()?;
    let t0 = tangent(&f, &z0, &hint).ok_or_else(|| {
        Error::Continuation("no tangent at the starting point".into())
    })?;
    let z0 = correct(&f, &z0, &t0, cfg).ok_or_else(|| {
        Error::Continuation("starting point does not satisfy the system".into())
    })?;
    let t0 = tangent(&f, &z0, &t0).unwrap_or(t0);
    let mut pts = vec![PalPoint { z: z0, tangent: t0 }];
    let mut h = cfg.h0;
    while pts.len() < cfg.max_steps {
        let last = pts.last().expect("nonempty");
        let zp = &last.z + h * &last.tangent;
        let next = correct(&f, &zp, &last.tangent, cfg).and_then(|z| {
            let t = tangent(&f, &z, &last.tangent)?;
            let dist = (&z - &last.z).norm();
            (t.dot(&last.tangent) > 0.9 && dist < 2.0 * h).then_some(PalPoint { z, tangent: t })
        });
        match next {
            Some(pt) => {
                if !accept(&pt) {
                    return Ok((pts, PalStop::Callback));
                }
                pts.push(pt);
                h = (h * 1.3).min(cfg.h_max);
            }
            None => {
                h *= 0.5;
                if h < cfg.h_min {
                    return Ok((pts, PalStop::StepCollapse { step: h }));
                }
            }
        }
    }
    Ok((pts, PalStop::MaxSteps))
}

/// Zero of `test` on the curve between two consecutive points whose test
/// values differ in sign. Points on the chord are projected back onto the
/// curve orthogonally to the chord.
pub fn locate_zero<F, T>(
    f: &F,
    a: &PalPoint,
    b: &PalPoint,
    test: T,
    cfg: &PalConfig,
) -> Option<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Eval,
    T: Fn(&DVector<f64>) -> f64,
{
    let chord = &b.z - &a.z;
    let len = chord.norm();
    if len == 0.0 {
        return Some(a.z.clone());
    }
    let d = &chord / len;
    let fine = PalConfig {
        tol: cfg.tol.min(1e-12),
        max_newton: cfg.max_newton.max(12),
        ..*cfg
    };
    let at = |s: f64| -> Option<DVector<f64>> {
        let zp = &a.z + s * &chord;
        correct(f, &zp, &d, &fine).or_else(|| correct(f, &zp, &d, cfg))
    };
    let (ga, gb) = (test(&a.z), test(&b.z));
    if ga == 0.0 {
        return Some(a.z.clone());
    }
    if gb == 0.0 {
        return Some(b.z.clone());
    }
    let mut failed = false;
    let (s, _) = illinois(
        |s| match at(s) {
            Some(z) => test(&z),
            None => {
                failed = true;
                0.0
            }
        },
        0.0,
        1.0,
        ga,
        gb,
        1e-14,
        200,
    );
    if failed {
        return None;
    }
    at(s)
}
