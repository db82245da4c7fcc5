use thiserror::Error;

use crate::model::State;

/// Errors raised by the model, geometry, integration and continuation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size underflow at t = {t} (state ({}, {}))", state.x, state.y)]
    StepUnderflow { t: f64, state: State },

    #[error("geometric degeneracy at t = {t}: {reason}")]
    GeometricDegeneracy { t: f64, reason: String },

    #[error("chattering: more than {limit} switching events")]
    Chatter { limit: usize },

    #[error("no return to the section within t_max = {t_max}")]
    Escape { t_max: f64 },

    #[error("Newton iteration failed to converge (last residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("continuation failed: {0}")]
    Continuation(String),

    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
