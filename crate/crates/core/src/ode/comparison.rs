//! The scalar comparison equation and the comparison property check.
//!
//! The worst case of the inequality `g' <= -gamma g + alpha(t, g) + beta` is
//! the equality equation
//!
//! ```text
//! phi' = -gamma(t) phi + alpha(t, phi) + beta(t),   phi(0) = phi0,
//! ```
//!
//! whose solution dominates every admissible `g` with `g(0) <= phi0`. The
//! solution is *not* clamped at zero: with negative forcing it may cross
//! below zero, and it is reported as-is, because the certified bound is
//! one-sided from above and silently clamping would mask modeling errors.

use std::sync::Arc;

use nalgebra::DVector;

use crate::certificate::InequalityProblem;
use crate::error::{Error, Result};
use crate::par;

use super::{integrate_raw, IntegrateOpts, Trajectory, TrajectoryKind, TrajectoryStatus};

/// A scalar initial value problem `x' = f(t, x)`, `x(t0) = x0`.
#[derive(Clone)]
pub struct ScalarIVP {
    pub f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub x0: f64,
    pub t0: f64,
    pub horizon: f64,
}

impl ScalarIVP {
    pub fn new<F>(f: F, x0: f64, t0: f64, horizon: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        ScalarIVP {
            f: Arc::new(f),
            x0,
            t0,
            horizon,
        }
    }
}

/// Integrates a scalar IVP; the trajectory keeps the signed value.
pub fn integrate_scalar(ivp: &ScalarIVP, opts: &IntegrateOpts) -> Result<Trajectory> {
    if !(ivp.horizon > ivp.t0) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: format!("horizon {} must exceed t0 {}", ivp.horizon, ivp.t0),
        });
    }
    opts.validate()?;
    let f = ivp.f.clone();
    Ok(integrate_raw(
        move |t, y: &DVector<f64>| DVector::from_vec(vec![f(t, y[0])]),
        ivp.t0,
        ivp.horizon,
        &DVector::from_vec(vec![ivp.x0]),
        opts,
        TrajectoryKind::Comparison,
    ))
}

/// Integrates the worst-case equality equation of `problem` from `phi0`.
pub fn integrate_comparison(
    problem: &InequalityProblem,
    phi0: f64,
    horizon: f64,
    opts: &IntegrateOpts,
) -> Result<Trajectory> {
    if !(phi0 >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "phi0",
            reason: format!("initial value must be >= 0, got {phi0}"),
        });
    }
    problem.validate_domain(horizon)?;
    let gamma = problem.gamma.clone();
    let alpha = problem.alpha.clone();
    let beta = problem.beta.clone();
    let ivp = ScalarIVP::new(
        move |t, x| -gamma.eval_saturating(t) * x + alpha.eval(t, x) + beta.eval_saturating(t),
        phi0,
        0.0,
        horizon,
    );
    integrate_scalar(&ivp, opts)
}

/// Verdict of the comparison check: does the solution below stay below?
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonVerdict {
    pub holds: bool,
    /// Maximum over shared samples of `phi(t) - psi(t)`.
    pub max_gap_violation: f64,
    /// Tolerance the gap was compared against.
    pub tolerance: f64,
}

/// Integrates `phi' = f(t, phi)` and `psi' = g(t, psi)` on a shared adaptive
/// time base (as one coupled system, so both see identical accepted steps)
/// and checks `phi <= psi` at every sample.
///
/// The hypotheses `psi0 >= phi0` and `f <= g` are the caller's claims; the
/// first is validated exactly, the second is spot-checked by sampling
/// `f - g` on a 101 x 101 grid over the integration tube (time range times
/// the visited state range, widened by a margin). A sampled `f > g` is
/// reported as [`Error::HypothesisViolated`] rather than silently accepted.
///
/// Both right-hand sides are assumed locally Lipschitz in the state, so
/// each problem has a unique solution; non-Lipschitz inputs (where the
/// dominating solution would have to be the maximal one) are unsupported.
pub fn check_comparison<F, G>(
    f: F,
    g: G,
    phi0: f64,
    psi0: f64,
    horizon: f64,
    opts: &IntegrateOpts,
) -> Result<ComparisonVerdict>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
    G: Fn(f64, f64) -> f64 + Send + Sync,
{
    if !(psi0 >= phi0) {
        return Err(Error::InvalidParameter {
            name: "psi0",
            reason: format!("need psi0 >= phi0, got phi0 = {phi0}, psi0 = {psi0}"),
        });
    }
    if !(horizon > 0.0) {
        return Err(Error::NonPositive {
            name: "horizon",
            value: horizon,
        });
    }
    opts.validate()?;

    let traj = integrate_raw(
        |t, y: &DVector<f64>| DVector::from_vec(vec![f(t, y[0]), g(t, y[1])]),
        0.0,
        horizon,
        &DVector::from_vec(vec![phi0, psi0]),
        opts,
        TrajectoryKind::System,
    );
    match &traj.status {
        TrajectoryStatus::Completed => {}
        TrajectoryStatus::BlowUp { tb_estimate } => {
            return Err(Error::StepFailure {
                t: *tb_estimate,
                reason: "comparison pair escaped in finite time".into(),
            })
        }
        TrajectoryStatus::StepFailure { t, reason } => {
            return Err(Error::StepFailure {
                t: *t,
                reason: reason.clone(),
            })
        }
    }

    // Hypothesis sampling over the integration tube.
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &traj.states {
        x_lo = x_lo.min(s[0]).min(s[1]);
        x_hi = x_hi.max(s[0]).max(s[1]);
    }
    let margin = 0.05 * (x_hi - x_lo) + 1e-6;
    let (x_lo, x_hi) = (x_lo - margin, x_hi + margin);
    const TUBE: usize = 101;
    let worst = par::map_range(TUBE * TUBE, |idx| {
        let i = idx / TUBE;
        let j = idx % TUBE;
        let t = horizon * i as f64 / (TUBE - 1) as f64;
        let x = x_lo + (x_hi - x_lo) * j as f64 / (TUBE - 1) as f64;
        (f(t, x) - g(t, x), t, x)
    })
    .into_iter()
    .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
    .unwrap();
    if worst.0 > 0.0 {
        let (_, t, x) = worst;
        return Err(Error::HypothesisViolated {
            t,
            x,
            f_value: f(t, x),
            g_value: g(t, x),
        });
    }

    let mut max_gap = f64::NEG_INFINITY;
    let mut scale: f64 = 1.0;
    for s in &traj.states {
        max_gap = max_gap.max(s[0] - s[1]);
        scale = scale.max(s[0].abs()).max(s[1].abs());
    }
    let tolerance = 100.0 * (opts.atol + opts.rtol * scale);
    Ok(ComparisonVerdict {
        holds: max_gap <= tolerance,
        max_gap_violation: max_gap,
        tolerance,
    })
}
