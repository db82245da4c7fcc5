use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Outcome of a converged Newton solve.
#[derive(Debug, Clone)]
pub struct Solved {
    pub z: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton iteration for a square system.
///
/// `eval` returns the residual and its Jacobian, or `None` where the system
/// is undefined. Steps are halved until the residual norm decreases.
pub fn newton<E>(eval: E, z0: DVector<f64>, tol: f64, max_iter: usize) -> Result<Solved>
where
    E: Fn(&DVector<f64>) -> Option<(DVector<f64>, DMatrix<f64>)>,
{
    let mut z = z0;
    let (mut f, mut jac) = eval(&z).ok_or(Error::NoConvergence {
        residual: f64::INFINITY,
    })?;
    let mut norm = f.amax();
    for it in 0..max_iter {
        if norm < tol {
            return Ok(Solved {
                z,
                residual: norm,
                iterations: it,
            });
        }
        let Some(dz) = jac.clone().lu().solve(&(-&f)) else {
            return Err(Error::NoConvergence { residual: norm });
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &z + lambda * &dz;
            if let Some((ft, jt)) = eval(&trial) {
                let nt = ft.amax();
                if nt.is_finite() && (nt < norm || nt < tol) {
                    z = trial;
                    f = ft;
                    jac = jt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { residual: norm });
        }
    }
    if norm < tol {
        Ok(Solved {
            z,
            residual: norm,
            iterations: max_iter,
        })
    } else {
        Err(Error::NoConvergence { residual: norm })
    }
}
