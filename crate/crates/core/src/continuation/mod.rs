//! Numerical bifurcation analysis of the smooth model (`ε > 0`).

pub mod branch;
pub mod codim3;
pub mod curves;
pub mod equilibrium;
pub mod jet;
pub mod limit;
pub mod lyapunov;
pub mod newton;
pub mod pal;

pub use branch::{
    continue_equilibrium, Branch, BranchEnd, BranchPoint, BranchPointKind, BranchSample,
    Diagnostics, FreeParam,
};
pub use codim3::{
    codim3_landmarks, continue_bt_in_epsilon, continue_cusp_in_epsilon, epsilon_slices,
    epsilon_sweep, locate_dbt, locate_gbc, Codim3Kind, Codim3Point, EpsilonSweep, Landmarks,
    DEFAULT_EPSILON_RANGE,
};
pub use curves::{
    continue_fold_curve, continue_hopf_curve, seed_points, smooth_diagram, Criticality, CurveEnd,
    CurveKind, CurveSample, CurveSegment, SmoothDiagram, TwoParCurve, Window,
};
pub use equilibrium::{
    equilibria_all, solve_equilibrium, EquilibriumKind, EquilibriumRecord, EQ_TOL,
};
pub use limit::{one_sided_distance, pws_limit_distance, H_LIMIT, MATCHED_SAMPLES, S_LIMIT};
pub use lyapunov::{first_lyapunov, lyapunov_at};
pub use pal::{PalConfig, PalStop};
