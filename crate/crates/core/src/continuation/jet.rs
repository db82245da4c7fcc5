//! Local derivatives of the smooth system with respect to state and parameters.
//!
//! Variables are ordered `(x, y, μ, η, ε)`.

use num_complex::Complex64;

use crate::model::{Mat2, ModelParams, State, SwitchJet};

pub const NV: usize = 5;
pub type Grad = [f64; NV];

const U_V: Grad = [-1.0, 1.0, 0.0, -1.0, 0.0];

/// Value and first derivatives of the field, its Jacobian and the planar
/// test functions at one point.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub x: f64,
    pub y: f64,
    /// Mixing rate `k`.
    pub k: f64,
    /// `Δκ H'`, `Δκ H''`, `Δκ H'''`.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f: [f64; 2],
    pub j: Mat2,
    pub df: [Grad; 2],
    pub dj: [[Grad; 2]; 2],
}

fn axpy(a: f64, x: &Grad, y: &Grad) -> Grad {
    let mut o = *y;
    for i in 0..NV {
        o[i] += a * x[i];
    }
    o
}

fn unit(i: usize) -> Grad {
    let mut e = [0.0; NV];
    e[i] = 1.0;
    e
}

fn scale(a: f64, x: &Grad) -> Grad {
    x.map(|v| a * v)
}

impl Jet {
    pub fn at(s: State, p: &ModelParams) -> Self {
        let (x, y) = (s.x, s.y);
        let d = p.delta_kappa();
        let u = y - x - p.eta;
        let h = SwitchJet::at(u, p.epsilon);
        let k = p.kappa1 + d * h.value;
        let a = d * h.d1;
        let b = d * h.d2;
        let c = d * h.d3;
        let mut k_v = scale(a, &U_V);
        k_v[4] += d * h.de;
        let mut a_v = scale(b, &U_V);
        a_v[4] += d * h.d1e;
        let (ex, ey, emu) = (unit(0), unit(1), unit(2));

        let f = [1.0 - (1.0 + k) * x, p.mu - k * y];
        let df = [
            axpy(-(1.0 + k), &ex, &scale(-x, &k_v)),
            axpy(-k, &ey, &axpy(-y, &k_v, &emu)),
        ];
        let j = [[-(1.0 + k) + x * a, -x * a], [y * a, -k - y * a]];
        let xa = axpy(a, &ex, &scale(x, &a_v));
        let ya = axpy(a, &ey, &scale(y, &a_v));
        let dj = [
            [axpy(-1.0, &k_v, &xa), scale(-1.0, &xa)],
            [ya, axpy(-1.0, &k_v, &scale(-1.0, &ya))],
        ];
        Self {
            x,
            y,
            k,
            a,
            b,
            c,
            f,
            j,
            df,
            dj,
        }
    }

    pub fn trace(&self) -> f64 {
        self.j[0][0] + self.j[1][1]
    }

    pub fn det(&self) -> f64 {
        self.j[0][0] * self.j[1][1] - self.j[0][1] * self.j[1][0]
    }

    pub fn d_trace(&self) -> Grad {
        let mut g = [0.0; NV];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = self.dj[0][0][i] + self.dj[1][1][i];
        }
        g
    }

    pub fn d_det(&self) -> Grad {
        let j = &self.j;
        let dj = &self.dj;
        let mut g = [0.0; NV];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = dj[0][0][i] * j[1][1] + j[0][0] * dj[1][1][i]
                - dj[0][1][i] * j[1][0]
                - j[0][1] * dj[1][0][i];
        }
        g
    }

    /// Second derivative `D²F(v, w)`.
    pub fn b2(&self, v: [Complex64; 2], w: [Complex64; 2]) -> [Complex64; 2] {
        let dv = v[1] - v[0];
        let dw = w[1] - w[0];
        let xx = [Complex64::from(self.x), Complex64::from(self.y)];
        let mut out = [Complex64::default(); 2];
        for i in 0..2 {
            out[i] = -(self.b * dv * dw * xx[i] + self.a * (dv * w[i] + dw * v[i]));
        }
        out
    }

    /// Third derivative `D³F(u, v, w)`.
    pub fn c3(&self, u: [Complex64; 2], v: [Complex64; 2], w: [Complex64; 2]) -> [Complex64; 2] {
        let du = u[1] - u[0];
        let dv = v[1] - v[0];
        let dw = w[1] - w[0];
        let xx = [Complex64::from(self.x), Complex64::from(self.y)];
        let mut out = [Complex64::default(); 2];
        for i in 0..2 {
            out[i] = -(self.c * du * dv * dw * xx[i]
                + self.b * (du * dv * w[i] + du * dw * v[i] + dv * dw * u[i]));
        }
        out
    }

    /// Quadratic normal-form coefficient `p · D²F(q, q)` at a fold, with
    /// `q = (J₁₂, −J₁₁)` and `p = (J₂₁, −J₁₁)` (unnormalised null vectors).
    pub fn fold_quadratic(&self) -> f64 {
        let j = &self.j;
        let q = [j[0][1], -j[0][0]];
        let pl = [j[1][0], -j[0][0]];
        let norm = |v: [f64; 2]| v[0].hypot(v[1]);
        let (nq, np) = (norm(q), norm(pl));
        let q = [q[0] / nq, q[1] / nq];
        let pl = [pl[0] / np, pl[1] / np];
        let qc = [Complex64::from(q[0]), Complex64::from(q[1])];
        let bqq = self.b2(qc, qc);
        pl[0] * bqq[0].re + pl[1] * bqq[1].re
    }
}
