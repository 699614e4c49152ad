//! Majorant certificates for the scalar differential inequality
//! `g'(t) <= -gamma(t) g + alpha(t, g) + beta(t)`, `g(0) = g0`, `g >= 0`.
//!
//! A certificate is a positive C^1 function `mu(t)` satisfying
//!
//! ```text
//! alpha(t, 1/mu) + beta(t) <= (1/mu) * (gamma(t) - mu'(t)/mu(t))    for all t
//! mu(0) * g0 <= 1
//! ```
//!
//! Whenever both hold, every admissible `g` exists globally and obeys
//! `0 <= g(t) <= 1/mu(t)` (strictly, when the initial condition is strict).
//! Verification evaluates the slack
//!
//! ```text
//! s(t) = (1/mu)(gamma - mu'/mu) - alpha(t, 1/mu) - beta(t)
//! ```
//!
//! on a finite grid, and additionally closes the gap to "all t" with an exact
//! tail argument when the data fall in the parametric families for which the
//! pointwise condition reduces to a single inequality at `t = 0`.

use crate::error::{Error, Result};
use crate::nonlinearity::{Nonlinearity, NonlinearityKind};
use crate::ode::{Trajectory, TrajectoryKind};
use crate::par;
use crate::timefn::{LimitBehavior, TimeFunction};

/// Parametric majorant `mu(t)`.
#[derive(Debug, Clone)]
pub enum Majorant {
    /// `lambda * e^{b t}`
    Exponential { lambda: f64, b: f64 },
    /// `lambda * (1+t)^nu`
    Power { lambda: f64, nu: f64 },
    /// `d + lambda * (1+t)^{-n}`
    ShiftedInversePower { d: f64, lambda: f64, n: f64 },
    /// Arbitrary core with an optional explicit derivative; when the
    /// derivative is absent it is derived in closed form if possible.
    Custom {
        mu: TimeFunction,
        mu_dot: Option<TimeFunction>,
    },
}

impl Majorant {
    pub fn exponential(lambda: f64, b: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        Ok(Majorant::Exponential { lambda, b })
    }

    pub fn power(lambda: f64, nu: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        Ok(Majorant::Power { lambda, nu })
    }

    pub fn shifted_inverse_power(d: f64, lambda: f64, n: f64) -> Result<Self> {
        require_positive("d", d)?;
        require_positive("lambda", lambda)?;
        Ok(Majorant::ShiftedInversePower { d, lambda, n })
    }

    /// Custom majorant; the derivative is derived in closed form, which fails
    /// for cores containing tabulated data.
    pub fn custom(mu: TimeFunction) -> Result<Self> {
        match mu.derivative() {
            Some(mu_dot) => Ok(Majorant::Custom {
                mu,
                mu_dot: Some(mu_dot),
            }),
            None => Err(Error::MissingDerivative),
        }
    }

    /// Custom majorant with an explicitly supplied derivative.
    pub fn custom_with_derivative(mu: TimeFunction, mu_dot: TimeFunction) -> Self {
        Majorant::Custom {
            mu,
            mu_dot: Some(mu_dot),
        }
    }

    /// `mu(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Majorant::Exponential { lambda, b } => Ok(lambda * (b * t).exp()),
            Majorant::Power { lambda, nu } => {
                if 1.0 + t <= 0.0 {
                    return Err(Error::EvaluationDomain {
                        t,
                        lo: -1.0,
                        hi: f64::INFINITY,
                    });
                }
                Ok(lambda * (1.0 + t).powf(*nu))
            }
            Majorant::ShiftedInversePower { d, lambda, n } => {
                if 1.0 + t <= 0.0 {
                    return Err(Error::EvaluationDomain {
                        t,
                        lo: -1.0,
                        hi: f64::INFINITY,
                    });
                }
                Ok(d + lambda * (1.0 + t).powf(-n))
            }
            Majorant::Custom { mu, .. } => mu.eval(t),
        }
    }

    /// `mu'(t)`, closed form for the named families.
    pub fn derivative_at(&self, t: f64) -> Result<f64> {
        match self {
            Majorant::Exponential { lambda, b } => Ok(lambda * b * (b * t).exp()),
            Majorant::Power { lambda, nu } => Ok(lambda * nu * (1.0 + t).powf(nu - 1.0)),
            Majorant::ShiftedInversePower { lambda, n, .. } => {
                Ok(-lambda * n * (1.0 + t).powf(-n - 1.0))
            }
            Majorant::Custom { mu, mu_dot } => match mu_dot {
                Some(d) => d.eval(t),
                None => match mu.derivative() {
                    Some(d) => d.eval(t),
                    None => Err(Error::MissingDerivative),
                },
            },
        }
    }

    /// `mu'(t)/mu(t)` in closed form where the family allows it. The slack
    /// formula uses this instead of the quotient of separately rounded
    /// evaluations so that analytically zero slack comes out exactly zero
    /// (e.g. the linear case `gamma = b` with an exponential majorant).
    pub fn log_derivative_at(&self, t: f64) -> Result<f64> {
        match self {
            Majorant::Exponential { b, .. } => Ok(*b),
            Majorant::Power { nu, .. } => Ok(nu / (1.0 + t)),
            Majorant::ShiftedInversePower { d, lambda, n } => {
                let decay = lambda * (1.0 + t).powf(-n);
                Ok(-n * decay / ((1.0 + t) * (d + decay)))
            }
            Majorant::Custom { .. } => Ok(self.derivative_at(t)? / self.eval(t)?),
        }
    }

    /// True when `mu(t) -> infinity` is established for this majorant: by the
    /// parameter sign for the exponential and power families, and by
    /// structural limit analysis of the core for custom majorants.
    pub fn established_divergence(&self) -> bool {
        match self {
            Majorant::Exponential { b, .. } => *b > 0.0,
            Majorant::Power { nu, .. } => *nu > 0.0,
            Majorant::ShiftedInversePower { .. } => false,
            Majorant::Custom { mu, .. } => mu.limit_at_infinity() == LimitBehavior::PlusInfinity,
        }
    }

    /// Human-readable rendering of the guaranteed bound `1/mu(t)`.
    pub fn bound_expr(&self) -> String {
        match self {
            Majorant::Exponential { lambda, b } => {
                if *b == 0.0 {
                    format!("{}", 1.0 / lambda)
                } else if *lambda == 1.0 {
                    format!("e^({})", crate::timefn::rate_term(-b))
                } else {
                    format!("e^({})/{lambda}", crate::timefn::rate_term(-b))
                }
            }
            Majorant::Power { lambda, nu } => {
                let core = if *nu == 1.0 {
                    "(1+t)".to_string()
                } else {
                    format!("(1+t)^{nu}")
                };
                if *nu == 0.0 {
                    format!("{}", 1.0 / lambda)
                } else if *lambda == 1.0 {
                    format!("1/{core}")
                } else {
                    format!("1/({lambda} {core})")
                }
            }
            Majorant::ShiftedInversePower { d, lambda, n } => {
                format!("1/({d} + {lambda} (1+t)^(-{n}))")
            }
            Majorant::Custom { mu, .. } => {
                let core = mu.to_string();
                if core.starts_with('(') && core.ends_with(')') {
                    format!("1/{core}")
                } else {
                    format!("1/({core})")
                }
            }
        }
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// The scalar inequality data: `g' <= -gamma g + alpha(t, g) + beta`,
/// `g(0) = g0`, over `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct InequalityProblem {
    pub gamma: TimeFunction,
    pub alpha: Nonlinearity,
    pub beta: TimeFunction,
    pub g0: f64,
    pub horizon: f64,
}

impl InequalityProblem {
    pub fn new(
        gamma: TimeFunction,
        alpha: Nonlinearity,
        beta: TimeFunction,
        g0: f64,
        horizon: f64,
    ) -> Result<Self> {
        if !(g0 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "g0",
                reason: format!("initial value must be >= 0, got {g0}"),
            });
        }
        require_positive("horizon", horizon)?;
        Ok(InequalityProblem {
            gamma,
            alpha,
            beta,
            g0,
            horizon,
        })
    }

    /// Checks that `gamma` and `beta` are evaluable across `[0, horizon]`
    /// (catches tabulated data that does not cover the window).
    pub fn validate_domain(&self, horizon: f64) -> Result<()> {
        for i in 0..=16 {
            let t = horizon * i as f64 / 16.0;
            self.gamma.eval(t)?;
            self.beta.eval(t)?;
        }
        Ok(())
    }
}

/// Verification grid over `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub points: usize,
    pub spacing: GridSpacing,
    /// Slack below `-slack_tolerance` fails verification. The default is 0:
    /// numerical grace is flagged in the report, not silently applied.
    pub slack_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpacing {
    Uniform,
    /// Geometric in `1 + t`; suited to long horizons.
    Log,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 2001,
            spacing: GridSpacing::Uniform,
            slack_tolerance: 0.0,
        }
    }
}

impl GridSpec {
    pub fn uniform(points: usize) -> Self {
        GridSpec {
            points,
            ..GridSpec::default()
        }
    }

    /// Materializes the grid; first point 0, last point exactly `horizon`.
    pub fn build(&self, horizon: f64) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::InvalidParameter {
                name: "grid points",
                reason: format!("need at least 2 points, got {}", self.points),
            });
        }
        require_positive("horizon", horizon)?;
        let n = self.points;
        let mut grid: Vec<f64> = match self.spacing {
            GridSpacing::Uniform => (0..n)
                .map(|i| horizon * i as f64 / (n - 1) as f64)
                .collect(),
            GridSpacing::Log => {
                let top = (1.0 + horizon).ln();
                (0..n)
                    .map(|i| (top * i as f64 / (n - 1) as f64).exp() - 1.0)
                    .collect()
            }
        };
        grid[0] = 0.0;
        grid[n - 1] = horizon;
        Ok(grid)
    }
}

/// How much of the time axis the verdict covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Slack checked on the grid over `[0, horizon]` only.
    Grid,
    /// Grid check plus an exact reduction that extends the pointwise
    /// condition to all `t >= 0`.
    GridAndTail,
}

/// Verification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Certificate holds and the bound `1/mu` tends to zero.
    CertifiedDecaying,
    /// Certificate holds; the bound stays finite but need not vanish.
    CertifiedBounded,
    NotCertified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::CertifiedDecaying => "CertifiedDecaying",
            Verdict::CertifiedBounded => "CertifiedBounded",
            Verdict::NotCertified => "NotCertified",
        };
        f.write_str(s)
    }
}

/// Outcome of [`verify_certificate`].
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub verified: bool,
    /// `mu(0) * g0 <= 1`
    pub initial_ok: bool,
    /// `mu(0) * g0 < 1`
    pub strict_initial: bool,
    /// Verified, but with minimum slack below 1e-9.
    pub marginal: bool,
    pub grid: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub slack: Vec<f64>,
    pub min_slack: f64,
    /// Index of the grid point attaining `min_slack`.
    pub min_slack_index: usize,
    pub bound: Majorant,
    pub asymptotic_decay: bool,
    pub coverage: Coverage,
    pub verdict: Verdict,
}

impl CertificateReport {
    /// `1/mu(horizon)`.
    pub fn bound_at_horizon(&self) -> f64 {
        1.0 / *self.mu_values.last().unwrap()
    }

    /// Flat `key: value` lines describing the verdict.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        kv.push(("verified".into(), self.verified.to_string()));
        kv.push(("verdict".into(), self.verdict.to_string()));
        kv.push(("initial_ok".into(), self.initial_ok.to_string()));
        kv.push(("strict_initial".into(), self.strict_initial.to_string()));
        kv.push(("marginal".into(), self.marginal.to_string()));
        kv.push(("min_slack".into(), format!("{}", self.min_slack)));
        kv.push((
            "min_slack_t".into(),
            format!("{}", self.grid[self.min_slack_index]),
        ));
        kv.push((
            "coverage".into(),
            match self.coverage {
                Coverage::Grid => "grid".into(),
                Coverage::GridAndTail => "grid+tail".into(),
            },
        ));
        kv.push((
            "asymptotic_decay".into(),
            self.asymptotic_decay.to_string(),
        ));
        kv.push(("bound".into(), self.bound.bound_expr()));
        kv.push((
            "bound_at_horizon".into(),
            format!("{}", self.bound_at_horizon()),
        ));
        kv.push(("grid_points".into(), self.grid.len().to_string()));
        kv
    }

    /// Writes the slack table as CSV with columns `t,mu,inv_mu,slack`.
    pub fn write_slack_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,mu,inv_mu,slack")?;
        for ((t, mu), s) in self
            .grid
            .iter()
            .zip(self.mu_values.iter())
            .zip(self.slack.iter())
        {
            writeln!(w, "{},{},{},{}", t, mu, 1.0 / mu, s)?;
        }
        Ok(())
    }
}

/// The pointwise slack `s(t) = (1/mu)(gamma - mu'/mu) - alpha(t, 1/mu) - beta`.
pub fn slack_at(problem: &InequalityProblem, mu: &Majorant, t: f64) -> Result<f64> {
    let m = mu.eval(t)?;
    if !(m > 0.0) {
        return Err(Error::NonPositiveMajorant { t, mu: m });
    }
    let log_deriv = mu.log_derivative_at(t)?;
    let inv = 1.0 / m;
    let gamma = problem.gamma.eval(t)?;
    let beta = problem.beta.eval(t)?;
    Ok(inv * (gamma - log_deriv) - problem.alpha.eval(t, inv) - beta)
}

/// Slack evaluated at every grid point (data-parallel).
pub fn slack_profile(
    problem: &InequalityProblem,
    mu: &Majorant,
    grid: &[f64],
) -> Result<Vec<f64>> {
    par::try_map_range(grid.len(), |i| slack_at(problem, mu, grid[i]))
}

/// Verifies the certificate conditions for `mu` against `problem` on the
/// given grid, applying the exact tail reduction when the data are in the
/// parametric families that admit one.
pub fn verify_certificate(
    problem: &InequalityProblem,
    mu: &Majorant,
    spec: &GridSpec,
) -> Result<CertificateReport> {
    let grid = spec.build(problem.horizon)?;
    // Fail early on a custom majorant without any derivative.
    mu.derivative_at(0.0)?;

    let mu_values = par::try_map_range(grid.len(), |i| {
        let m = mu.eval(grid[i])?;
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveMajorant { t: grid[i], mu: m });
        }
        Ok(m)
    })?;

    let slack = slack_profile(problem, mu, &grid)?;
    let (min_slack_index, min_slack) = slack
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();

    let mu0_g0 = mu_values[0] * problem.g0;
    let initial_ok = mu0_g0 <= 1.0;
    let strict_initial = mu0_g0 < 1.0;
    let verified = initial_ok && min_slack >= -spec.slack_tolerance;
    let marginal = verified && min_slack < 1e-9;

    let coverage = match tail_reduction(problem, mu) {
        Some(r) if r.holds => Coverage::GridAndTail,
        _ => Coverage::Grid,
    };

    let asymptotic_decay = match mu {
        Majorant::Custom { .. } => {
            mu.established_divergence() && tail_monotone_nondecreasing(&mu_values)
        }
        _ => mu.established_divergence(),
    };

    let verdict = if !verified {
        Verdict::NotCertified
    } else if asymptotic_decay {
        Verdict::CertifiedDecaying
    } else {
        Verdict::CertifiedBounded
    };

    Ok(CertificateReport {
        verified,
        initial_ok,
        strict_initial,
        marginal,
        grid,
        mu_values,
        slack,
        min_slack,
        min_slack_index,
        bound: mu.clone(),
        asymptotic_decay,
        coverage,
        verdict,
    })
}

fn tail_monotone_nondecreasing(mu_values: &[f64]) -> bool {
    let start = mu_values.len() - (mu_values.len() / 4).max(2);
    mu_values[start..].windows(2).all(|w| w[1] >= w[0])
}

/// The exact tail argument closing a grid check to all `t >= 0`.
#[derive(Debug, Clone)]
pub struct TailReduction {
    /// Left side of the single reduced inequality (worst case over `t`).
    pub lhs: f64,
    /// Right side of the reduced inequality.
    pub rhs: f64,
    pub holds: bool,
    pub description: String,
}

/// Attempts the family-specific reduction of the pointwise certificate
/// condition to a single inequality at `t = 0`.
///
/// Two patterns reduce:
///
/// * exponential `mu = lambda e^{bt}` with `b >= 0`, constant `gamma = k`,
///   zero `beta`, and `alpha` zero or a power law: the condition decreases in
///   `t`, so it holds everywhere iff `c0 lambda^{1-p} + b <= k`;
/// * power `mu = lambda (1+t)^nu` with `nu > 0`, `gamma = c1/(1+t)^{q1}` with
///   `q1 <= 1`, `alpha` zero or a power law with `(p-1) nu >= q1`, and `beta`
///   zero or `c2/(1+t)^{q2}` with `c2 >= 0`, `q2 - nu >= q1`: every term is
///   then worst at `t = 0` and the condition reduces to
///   `c0 lambda^{1-p} + lambda c2 + nu <= c1`.
pub fn tail_reduction(problem: &InequalityProblem, mu: &Majorant) -> Option<TailReduction> {
    let (c0, p) = match problem.alpha.kind() {
        NonlinearityKind::Zero => (0.0, 2.0),
        NonlinearityKind::PowerLaw { c0, p } => (*c0, *p),
        _ => return None,
    };

    match mu {
        Majorant::Exponential { lambda, b } => {
            if *b < 0.0 || !problem.beta.is_zero() {
                return None;
            }
            let (k, q) = problem.gamma.as_power_decay()?;
            if q != 0.0 {
                return None;
            }
            let lhs = c0 * lambda.powf(1.0 - p) + b;
            Some(TailReduction {
                lhs,
                rhs: k,
                holds: lhs <= k,
                description: format!("c0/lambda^(p-1) + b <= k ({lhs} <= {k})"),
            })
        }
        Majorant::Power { lambda, nu } => {
            if !(*nu > 0.0) {
                return None;
            }
            let (c1, q1) = problem.gamma.as_power_decay()?;
            if q1 > 1.0 {
                return None;
            }
            if c0 > 0.0 && (p - 1.0) * nu < q1 {
                return None;
            }
            let (c2, q2) = if problem.beta.is_zero() {
                (0.0, q1 + nu)
            } else {
                problem.beta.as_power_decay()?
            };
            if c2 < 0.0 || q2 - nu < q1 {
                return None;
            }
            let lhs = c0 * lambda.powf(1.0 - p) + lambda * c2 + nu;
            Some(TailReduction {
                lhs,
                rhs: c1,
                holds: lhs <= c1,
                description: format!(
                    "c0/lambda^(p-1) + lambda*c2 + nu <= c1 ({lhs} <= {c1})"
                ),
            })
        }
        _ => None,
    }
}

/// `1/mu(t)`, the guaranteed bound.
pub fn bound_at(mu: &Majorant, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::EvaluationDomain {
            t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let m = mu.eval(t)?;
    if !(m > 0.0) {
        return Err(Error::NonPositiveMajorant { t, mu: m });
    }
    Ok(1.0 / m)
}

/// Result of checking an integrated trajectory against `1/mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub pass: bool,
    /// Maximum over samples of `value - 1/mu(t)`.
    pub max_violation: f64,
    pub first_violation_time: Option<f64>,
}

/// Cross-validates a trajectory against the bound `1/mu`.
///
/// System trajectories compare the Euclidean norm; scalar comparison
/// trajectories compare the signed value, since the certificate bounds the
/// comparison solution from above only (it may go negative under negative
/// forcing, and that never violates the one-sided bound).
pub fn check_trajectory_bound(
    trajectory: &Trajectory,
    mu: &Majorant,
    tol: f64,
) -> Result<BoundCheck> {
    if trajectory.times.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let n = trajectory.times.len();
    let violations = par::try_map_range(n, |i| {
        let value = match trajectory.kind {
            TrajectoryKind::Comparison => trajectory.states[i][0],
            TrajectoryKind::System => trajectory.norms[i],
        };
        Ok(value - bound_at(mu, trajectory.times[i])?)
    })?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut first_violation_time = None;
    for (i, v) in violations.iter().enumerate() {
        if *v > max_violation {
            max_violation = *v;
        }
        if first_violation_time.is_none() && *v > tol {
            first_violation_time = Some(trajectory.times[i]);
        }
    }
    Ok(BoundCheck {
        pass: max_violation <= tol,
        max_violation,
        first_violation_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quadratic_damping_problem(horizon: f64) -> InequalityProblem {
        // g' <= t g - (1+t)^2 g^2 - 2 (1+t)^{-2}, written canonically with
        // gamma = -t, alpha = -(1+t)^2 g^2, beta = -2/(1+t)^2.
        let gamma = TimeFunction::Sum(vec![
            TimeFunction::Constant(1.0),
            TimeFunction::PowerDecay { c: -1.0, q: -1.0 },
        ]);
        let alpha = Nonlinearity::time_scaled_power(-1.0, -2.0, 2.0).unwrap();
        let beta = TimeFunction::PowerDecay { c: -2.0, q: 2.0 };
        InequalityProblem::new(gamma, alpha, beta, 1.0, horizon).unwrap()
    }

    #[test]
    fn bound_at_examples() {
        let power = Majorant::power(1.0, 1.0).unwrap();
        assert_relative_eq!(bound_at(&power, 0.0).unwrap(), 1.0);

        let custom =
            Majorant::custom(TimeFunction::PowerDecay { c: 1.0, q: -1.0 }).unwrap();
        assert_relative_eq!(bound_at(&custom, 9.0).unwrap(), 0.1);

        let exp = Majorant::exponential(2.0, 0.5).unwrap();
        assert_relative_eq!(
            bound_at(&exp, 2.0).unwrap(),
            1.0 / (2.0 * std::f64::consts::E),
            epsilon = 1e-15
        );
        assert_relative_eq!(bound_at(&exp, 2.0).unwrap(), 0.18393972, epsilon = 1e-7);
    }

    #[test]
    fn bound_at_rejects_negative_time() {
        let power = Majorant::power(1.0, 1.0).unwrap();
        assert!(matches!(
            bound_at(&power, -0.5),
            Err(Error::EvaluationDomain { .. })
        ));
    }

    #[test]
    fn quadratic_damping_certificate_verifies_and_decays() {
        let problem = quadratic_damping_problem(50.0);
        // mu = 1 + t as a custom majorant with mu' = 1.
        let mu = Majorant::custom_with_derivative(
            TimeFunction::PowerDecay { c: 1.0, q: -1.0 },
            TimeFunction::Constant(1.0),
        );
        let report = verify_certificate(&problem, &mu, &GridSpec::default()).unwrap();
        assert!(report.verified);
        assert!(report.initial_ok);
        assert!(!report.strict_initial); // mu(0) g0 = 1 exactly
        assert!(report.min_slack >= 0.0);
        // slack = 1/(1+t) + 1/(1+t)^2, minimal at the horizon
        assert_relative_eq!(
            report.min_slack,
            1.0 / 51.0 + 1.0 / (51.0 * 51.0),
            epsilon = 1e-12
        );
        assert_eq!(report.verdict, Verdict::CertifiedDecaying);
        assert!(report.asymptotic_decay);
        assert_eq!(report.coverage, Coverage::Grid);
    }

    #[test]
    fn quadratic_damping_power_family_matches_custom() {
        let problem = quadratic_damping_problem(50.0);
        let mu = Majorant::power(1.0, 1.0).unwrap();
        let report = verify_certificate(&problem, &mu, &GridSpec::default()).unwrap();
        assert!(report.verified);
        assert_eq!(report.verdict, Verdict::CertifiedDecaying);
        assert_eq!(report.bound.bound_expr(), "1/(1+t)");
    }

    #[test]
    fn linear_homogeneous_slack_identically_zero() {
        // gamma = k constant, alpha = beta = 0, mu = e^{kt}/g0: slack == 0.
        let k = 0.7;
        let g0 = 0.4;
        let problem = InequalityProblem::new(
            TimeFunction::Constant(k),
            Nonlinearity::zero(),
            TimeFunction::zero(),
            g0,
            20.0,
        )
        .unwrap();
        let mu = Majorant::exponential(1.0 / g0, k).unwrap();
        let report = verify_certificate(&problem, &mu, &GridSpec::default()).unwrap();
        assert!(report.verified);
        for s in &report.slack {
            assert!(s.abs() <= 1e-12, "slack {s} not identically zero");
        }
        assert_eq!(report.coverage, Coverage::GridAndTail);
    }

    #[test]
    fn exponential_family_accept_and_reject() {
        // gamma = 1, alpha = g^2, beta = 0.
        let problem = |g0: f64| {
            InequalityProblem::new(
                TimeFunction::Constant(1.0),
                Nonlinearity::power_law(1.0, 2.0).unwrap(),
                TimeFunction::zero(),
                g0,
                30.0,
            )
            .unwrap()
        };

        // lambda = 2, b = 0.5: 1/lambda + b = 1 <= k, verified with zero
        // slack at t = 0 and an exact tail.
        let ok = verify_certificate(
            &problem(0.5),
            &Majorant::exponential(2.0, 0.5).unwrap(),
            &GridSpec::default(),
        )
        .unwrap();
        assert!(ok.verified);
        assert!(ok.min_slack.abs() <= 1e-15);
        assert_eq!(ok.coverage, Coverage::GridAndTail);
        assert_eq!(ok.verdict, Verdict::CertifiedDecaying);

        // lambda = 1.5: 1/1.5 + 0.5 > 1, slack at t = 0 is negative.
        let bad = verify_certificate(
            &problem(0.5),
            &Majorant::exponential(1.5, 0.5).unwrap(),
            &GridSpec::default(),
        )
        .unwrap();
        assert!(!bad.verified);
        assert_eq!(bad.verdict, Verdict::NotCertified);
        assert!(bad.slack[0] < 0.0);
        assert_eq!(bad.min_slack_index, 0);
    }

    #[test]
    fn family_derivatives_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(20260810);
        let families: Vec<Majorant> = vec![
            Majorant::exponential(2.0, 0.35).unwrap(),
            Majorant::power(1.7, 1.3).unwrap(),
            Majorant::shifted_inverse_power(1.0, 1.0, 2.0).unwrap(),
        ];
        for mu in &families {
            for _ in 0..100 {
                let t: f64 = rng.gen_range(0.0..40.0);
                let h = 1e-5 * (1.0 + t);
                let fd =
                    (mu.eval(t + h).unwrap() - mu.eval(t - h).unwrap()) / (2.0 * h);
                let exact = mu.derivative_at(t).unwrap();
                let denom = exact.abs().max(1e-12);
                assert!(
                    ((exact - fd) / denom).abs() <= 1e-6,
                    "derivative mismatch at t={t}: exact {exact}, fd {fd}"
                );
            }
        }
    }

    #[test]
    fn custom_without_derivative_is_rejected() {
        let tab = TimeFunction::tabulated(vec![0.0, 10.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(Majorant::custom(tab.clone()), Err(Error::MissingDerivative)));

        let mu = Majorant::Custom {
            mu: tab,
            mu_dot: None,
        };
        let problem = quadratic_damping_problem(5.0);
        assert!(matches!(
            verify_certificate(&problem, &mu, &GridSpec::default()),
            Err(Error::MissingDerivative)
        ));
    }

    #[test]
    fn nonpositive_majorant_detected() {
        let mu = Majorant::custom_with_derivative(
            TimeFunction::Sum(vec![
                TimeFunction::Constant(1.0),
                TimeFunction::PowerDecay { c: -0.5, q: -1.0 },
            ]),
            TimeFunction::Constant(-0.5),
        );
        // 1 - 0.5 (1+t) crosses zero at t = 1.
        let problem = quadratic_damping_problem(5.0);
        assert!(matches!(
            verify_certificate(&problem, &mu, &GridSpec::default()),
            Err(Error::NonPositiveMajorant { .. })
        ));
    }

    #[test]
    fn zero_trajectory_passes_any_positive_bound() {
        use crate::ode::{integrate_system, EvolutionSystem, IntegrateOpts};
        use nalgebra::{DMatrix, DVector};
        let sys = EvolutionSystem::linear(
            DMatrix::zeros(2, 2),
            DVector::zeros(2),
        )
        .unwrap();
        let traj = integrate_system(&sys, 10.0, &IntegrateOpts::default()).unwrap();
        let mu = Majorant::power(2.0, 1.0).unwrap();
        let check = check_trajectory_bound(&traj, &mu, 0.0).unwrap();
        assert!(check.pass);
        // max violation is -min(1/mu) over the samples; 1/mu is smallest at
        // the horizon, so this is -1/(2 * 11)
        assert_relative_eq!(check.max_violation, -1.0 / 22.0, epsilon = 1e-12);
        assert!(check.first_violation_time.is_none());
    }

    #[test]
    fn linearized_system_trajectory_violates_the_bound() {
        // Dropping the quadratic damping leaves u' = t u - 2/(1+t)^2, whose
        // norm escapes; as a system trajectory the bound check fails.
        use crate::ode::{integrate_system, EvolutionSystem, IntegrateOpts};
        use nalgebra::{DMatrix, DVector};
        let sys = EvolutionSystem::new(
            1,
            |t| DMatrix::from_row_slice(1, 1, &[t]),
            |_, u: &nalgebra::DVector<f64>| DVector::zeros(u.len()),
            |t| DVector::from_vec(vec![-2.0 / ((1.0 + t) * (1.0 + t))]),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        let traj = integrate_system(&sys, 8.0, &IntegrateOpts::default()).unwrap();
        let mu = Majorant::power(1.0, 1.0).unwrap();
        let check = check_trajectory_bound(&traj, &mu, 1e-9).unwrap();
        assert!(!check.pass);
        assert!(check.max_violation > 1e6);
        assert!(check.first_violation_time.is_some());
    }

    #[test]
    fn log_grid_covers_endpoints() {
        let spec = GridSpec {
            points: 101,
            spacing: GridSpacing::Log,
            slack_tolerance: 0.0,
        };
        let grid = spec.build(1000.0).unwrap();
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[100], 1000.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        // Log spacing concentrates points near the origin.
        assert!(grid[50] < 50.0);
    }

    #[test]
    fn log_grid_verification_agrees_with_uniform() {
        let problem = quadratic_damping_problem(1000.0);
        let mu = Majorant::power(1.0, 1.0).unwrap();
        let log_spec = GridSpec {
            points: 2001,
            spacing: GridSpacing::Log,
            slack_tolerance: 0.0,
        };
        let uniform = verify_certificate(&problem, &mu, &GridSpec::default()).unwrap();
        let log = verify_certificate(&problem, &mu, &log_spec).unwrap();
        assert!(uniform.verified && log.verified);
        assert_eq!(uniform.verdict, log.verdict);
        // both grids end at the horizon, where the slack is minimal
        assert_relative_eq!(uniform.min_slack, log.min_slack, max_relative = 1e-12);
    }

    #[test]
    fn report_tail_decreasing_when_decaying() {
        let problem = quadratic_damping_problem(50.0);
        let mu = Majorant::power(1.0, 1.0).unwrap();
        let report = verify_certificate(&problem, &mu, &GridSpec::default()).unwrap();
        assert_eq!(report.verdict, Verdict::CertifiedDecaying);
        let tail: Vec<f64> = report
            .grid
            .iter()
            .rev()
            .take(10)
            .map(|t| bound_at(&report.bound, *t).unwrap())
            .collect();
        // reversed order: bound increases backwards <=> decreases forwards
        assert!(tail.windows(2).all(|w| w[1] >= w[0]));
    }
}
