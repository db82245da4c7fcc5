//! First Lyapunov coefficient of a planar Hopf point.

use num_complex::Complex64 as C;

use super::equilibrium::EquilibriumRecord;
use super::jet::Jet;
use crate::error::{Error, Result};
use crate::model::{Mat2, ModelParams, State};

type V = [C; 2];

fn dot(p: V, v: V) -> C {
    p[0].conj() * v[0] + p[1].conj() * v[1]
}

fn solve(a: [[C; 2]; 2], r: V) -> V {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        (r[0] * a[1][1] - a[0][1] * r[1]) / det,
        (a[0][0] * r[1] - a[1][0] * r[0]) / det,
    ]
}

/// Kuznetsov's planar formula for the linear part `a` with eigenvalues
/// `±iω` and multilinear forms `b`, `c`; `q` is normalised to unit length.
pub fn lyapunov_from_forms<B, Cf>(a: &Mat2, b: B, c: Cf) -> Result<f64>
where
    B: Fn(V, V) -> V,
    Cf: Fn(V, V, V) -> V,
{
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det <= 0.0 {
        return Err(Error::Domain(format!(
            "first Lyapunov coefficient needs det J > 0, got {det}"
        )));
    }
    let w = det.sqrt();
    let i = C::i();
    let re = |v: f64| C::from(v);
    let mut q = [re(a[0][1]), i * w - a[0][0]];
    if q[0].norm() + q[1].norm() < 1e-14 {
        q = [i * w - a[1][1], re(a[1][0])];
    }
    let nq = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    let q = [q[0] / nq, q[1] / nq];
    let mut p = [re(a[1][0]), -(re(a[0][0]) + i * w)];
    if p[0].norm() + p[1].norm() < 1e-14 {
        p = [-(re(a[1][1]) + i * w), re(a[0][1])];
    }
    let d = dot(p, q);
    let p = [p[0] / d.conj(), p[1] / d.conj()];
    let qb = [q[0].conj(), q[1].conj()];

    let am = [[re(a[0][0]), re(a[0][1])], [re(a[1][0]), re(a[1][1])]];
    let h11 = solve(am, b(q, qb));
    let shifted = [
        [2.0 * i * w - am[0][0], -am[0][1]],
        [-am[1][0], 2.0 * i * w - am[1][1]],
    ];
    let h20 = solve(shifted, b(q, q));
    let s = dot(p, c(q, q, qb)) - 2.0 * dot(p, b(q, h11)) + dot(p, b(qb, h20));
    Ok(s.re / (2.0 * w))
}

/// `ℓ₁` at a Hopf equilibrium of the smooth system. Negative means
/// supercritical.
pub fn first_lyapunov(eq: &EquilibriumRecord) -> Result<f64> {
    if eq.trace.abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "not a Hopf point: trace = {}",
            eq.trace
        )));
    }
    lyapunov_at(eq.state, &eq.params)
}

/// `ℓ₁` from the local jet, without checking the trace.
pub fn lyapunov_at(s: State, p: &ModelParams) -> Result<f64> {
    let jet = Jet::at(s, p);
    lyapunov_from_forms(&jet.j, |v, w| jet.b2(v, w), |u, v, w| jet.c3(u, v, w))
}
