//! Adjusted Welander two-box model of the Atlantic overturning circulation.
//!
//! The crate covers the piecewise-smooth Filippov limit (`ε = 0`) through
//! closed-form geometry and an event-driven integrator, and the smooth model
//! (`ε > 0`) through adaptive integration and numerical continuation.

pub mod atlas;
pub mod continuation;
pub mod error;
pub mod filippov;
pub mod flow;
pub mod model;

pub use atlas::{
    classify_region, pws_diagram, BifCurve, Codim2Kind, Codim2Point, PwsDiagram, RegionId,
    RegionQuery, Sublabel,
};
pub use continuation::{
    BranchPoint, BranchPointKind, EquilibriumKind, EquilibriumRecord, PalConfig, SmoothDiagram,
    TwoParCurve, Window,
};
pub use error::{Error, Result};
pub use filippov::{PseudoEquilibrium, SlidingSegment, TangencyPoint};
pub use flow::{IntegrationConfig, Regime, Trajectory};
pub use model::{ModelParams, PhysicalParams, Side, State};
