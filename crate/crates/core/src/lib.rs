//! Certified large-time bounds for nonlinear evolution problems.
//!
//! For systems `u' = A(t)u + F(t, u) + b(t)` whose scalar reduction
//! `g = |u|` obeys a differential inequality
//! `g' <= -gamma(t) g + alpha(t, g) + beta(t)`, a positive C^1 *majorant*
//! `mu(t)` with
//!
//! ```text
//! alpha(t, 1/mu) + beta(t) <= (1/mu)(gamma - mu'/mu),   mu(0) g(0) <= 1,
//! ```
//!
//! certifies global existence and the bound `0 <= g(t) <= 1/mu(t)` — decay to
//! zero when `mu` diverges. This crate provides:
//!
//! * [`certificate`] — verification of majorant certificates on a grid, with
//!   exact tail reductions for the parametric families, and cross-validation
//!   of the bound against integrated trajectories;
//! * [`families`] — closed-form certificate designers (exponential, power,
//!   and shifted-inverse-power bounds; data-dependent decay rates; envelope
//!   conditions for mixed damping) with named feasibility diagnostics;
//! * [`ode`] — an adaptive embedded Runge-Kutta 5(4) integrator for the
//!   evolution systems and the scalar comparison equation, finite-time
//!   blow-up detection with escape-time estimation, closed-form blow-up
//!   oracles, a comparison-property checker, and the local existence
//!   interval formulas;
//! * [`discrete`] — the discrete analog: worst-case recursion, per-step
//!   certificate verification, and the inductive-step residual identity.
//!
//! Batch evaluations (slack profiles, sampled checks, trial suites) are
//! data-parallel under the `parallel` feature (on by default) and fall back
//! to sequential loops without it; results are bit-identical either way.

// Negated float comparisons (`!(x > 0.0)`) are deliberate throughout: they
// reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod discrete;
pub mod error;
pub mod families;
pub mod nonlinearity;
pub mod ode;
pub mod par;
pub mod timefn;

pub use certificate::{
    bound_at, check_trajectory_bound, slack_at, slack_profile, tail_reduction,
    verify_certificate, BoundCheck, CertificateReport, Coverage, GridSpacing, GridSpec,
    InequalityProblem, Majorant, Verdict,
};
pub use discrete::{
    inductive_step_residual, run_recursion, slack_sequence, step_slack,
    verify_discrete_certificate, DiscreteCertificate, DiscreteProblem, DiscreteReport,
    RecursionResult,
};
pub use error::{Error, Result};
pub use families::{
    check_mixed_envelopes, check_data_dependent_rate, design_exponential_rate, design_power_rate, design_forced_power_rate, design_bounded_orbit,
    forced_budget, forced_minimal_budget, forced_optimal_amplitude, Condition, DecayRate, Design, MixedEnvelopeCertificate,
    ExponentialRateDesign, PowerRateDesign, ForcedPowerRateDesign, BoundedOrbitDesign, Violation,
};
pub use nonlinearity::{MonotoneViolation, Nonlinearity, NonlinearityKind};
pub use ode::blowup::{
    blowup_oracle_cubic, blowup_oracle_quadratic_lower, cubic_blowup_time,
    quadratic_blowup_time,
};
pub use ode::comparison::{
    check_comparison, integrate_comparison, integrate_scalar, ComparisonVerdict, ScalarIVP,
};
pub use ode::{
    integrate_system, lipschitz_interval, peano_interval, DissipativityCheck, EvolutionSystem,
    IntegrateOpts, Trajectory, TrajectoryKind, TrajectoryStatus,
};
pub use timefn::{LimitBehavior, TimeFunction};
