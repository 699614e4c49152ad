//! The discrete analog of the certificate machinery.
//!
//! Sequences `g_n >= 0` obeying
//!
//! ```text
//! g_{n+1} <= (1 - h_n gamma_n) g_n + h_n alpha(n, g_n) + h_n beta_n,
//! 0 < h_n gamma_n < 1,  alpha >= 0 and monotone in g,
//! ```
//!
//! are bounded by `1/mu_n` whenever the certificate sequence `mu_n > 0`
//! satisfies the per-step condition
//!
//! ```text
//! alpha(n, 1/mu_n) + beta_n <= (1/mu_n) (gamma_n - (mu_{n+1} - mu_n)/(h_n mu_n))
//! ```
//!
//! together with `mu_0 g_0 <= 1`. The certificate carries `N + 1` values, one
//! more than the number of steps, because the per-step condition looks ahead
//! to `mu_{n+1}` — the off-by-one lives in the type, not in the caller.
//!
//! The nonlinearity is sampled at the accumulated time `t_n = sum h_i`, so a
//! refinement `h -> h/2` of the same data converges to the continuous bound.

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::par;

/// Discrete recursion data for `N` steps.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    h: Vec<f64>,
    gamma: Vec<f64>,
    beta: Vec<f64>,
    alpha: Nonlinearity,
    g0: f64,
}

impl DiscreteProblem {
    pub fn new(
        h: Vec<f64>,
        gamma: Vec<f64>,
        beta: Vec<f64>,
        alpha: Nonlinearity,
        g0: f64,
    ) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: "need at least one step".into(),
            });
        }
        if gamma.len() != n {
            return Err(Error::LengthMismatch {
                what: "gamma",
                expected: n,
                got: gamma.len(),
            });
        }
        if beta.len() != n {
            return Err(Error::LengthMismatch {
                what: "beta",
                expected: n,
                got: beta.len(),
            });
        }
        if !(g0 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "g0",
                reason: format!("initial value must be >= 0, got {g0}"),
            });
        }
        if !alpha.monotone_in_g() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "the discrete bound requires a nonlinearity monotone in g".into(),
            });
        }
        for (i, (hi, gi)) in h.iter().zip(gamma.iter()).enumerate() {
            let hg = hi * gi;
            if !(*hi > 0.0) || !(hg > 0.0 && hg < 1.0) {
                return Err(Error::StepConstraint {
                    index: i,
                    h_gamma: hg,
                });
            }
        }
        Ok(DiscreteProblem {
            h,
            gamma,
            beta,
            alpha,
            g0,
        })
    }

    pub fn steps(&self) -> usize {
        self.h.len()
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn alpha(&self) -> &Nonlinearity {
        &self.alpha
    }

    /// Accumulated times `t_0 = 0, t_{n+1} = t_n + h_n` (length `N + 1`).
    pub fn times(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.h.len() + 1);
        t.push(0.0);
        let mut acc = 0.0;
        for h in &self.h {
            acc += h;
            t.push(acc);
        }
        t
    }
}

/// Certificate sequence `mu_n > 0`, length `N + 1`.
#[derive(Debug, Clone)]
pub struct DiscreteCertificate {
    mu: Vec<f64>,
}

impl DiscreteCertificate {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        for (i, m) in mu.iter().enumerate() {
            if !(*m > 0.0) || !m.is_finite() {
                return Err(Error::NonPositiveMu {
                    index: i,
                    value: *m,
                });
            }
        }
        Ok(DiscreteCertificate { mu })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

/// Equality realization of the recursion.
#[derive(Debug, Clone)]
pub struct RecursionResult {
    /// `g_0 .. g_N` (truncated after the first non-finite value, if any).
    pub g: Vec<f64>,
    /// Index of the first non-finite iterate.
    pub overflow_at: Option<usize>,
}

/// Runs the worst-case (equality) recursion
/// `g_{n+1} = (1 - h_n gamma_n) g_n + h_n alpha(t_n, g_n) + h_n beta_n`.
///
/// Rejects a nonlinearity that samples negative along the run, since the
/// discrete bound assumes `alpha >= 0`.
pub fn run_recursion(problem: &DiscreteProblem) -> Result<RecursionResult> {
    let n = problem.steps();
    let times = problem.times();
    let mut g = Vec::with_capacity(n + 1);
    g.push(problem.g0);
    for i in 0..n {
        let gi = g[i];
        let a = problem.alpha.eval(times[i], gi);
        if a < 0.0 {
            return Err(Error::NegativeAlpha { index: i, value: a });
        }
        let next =
            (1.0 - problem.h[i] * problem.gamma[i]) * gi + problem.h[i] * a + problem.h[i] * problem.beta[i];
        if !next.is_finite() {
            return Ok(RecursionResult {
                g,
                overflow_at: Some(i + 1),
            });
        }
        g.push(next);
    }
    Ok(RecursionResult {
        g,
        overflow_at: None,
    })
}

/// Per-step certificate slack
/// `(1/mu_n)(gamma_n - (mu_{n+1} - mu_n)/(h_n mu_n)) - alpha(t_n, 1/mu_n) - beta_n`.
pub fn step_slack(problem: &DiscreteProblem, cert: &DiscreteCertificate, n: usize) -> f64 {
    let mu_n = cert.mu[n];
    let mu_next = cert.mu[n + 1];
    let inv = 1.0 / mu_n;
    let t_n: f64 = problem.h[..n].iter().sum();
    inv * (problem.gamma[n] - (mu_next - mu_n) / (problem.h[n] * mu_n))
        - problem.alpha.eval(t_n, inv)
        - problem.beta[n]
}

/// Slack at every step (data-parallel).
pub fn slack_sequence(
    problem: &DiscreteProblem,
    cert: &DiscreteCertificate,
) -> Result<Vec<f64>> {
    if cert.mu.len() != problem.steps() + 1 {
        return Err(Error::LengthMismatch {
            what: "mu",
            expected: problem.steps() + 1,
            got: cert.mu.len(),
        });
    }
    // Prefix sums once; step_slack recomputes them, which is fine for single
    // queries but quadratic across a whole sequence.
    let times = problem.times();
    Ok(par::map_range(problem.steps(), |n| {
        let mu_n = cert.mu[n];
        let mu_next = cert.mu[n + 1];
        let inv = 1.0 / mu_n;
        inv * (problem.gamma[n] - (mu_next - mu_n) / (problem.h[n] * mu_n))
            - problem.alpha.eval(times[n], inv)
            - problem.beta[n]
    }))
}

/// Outcome of [`verify_discrete_certificate`].
#[derive(Debug, Clone)]
pub struct DiscreteReport {
    pub verified: bool,
    /// `mu_0 g_0 <= 1`
    pub initial_ok: bool,
    pub slack: Vec<f64>,
    pub min_slack: f64,
    /// Worst-case recursion iterates `g_0 .. g_N`.
    pub g: Vec<f64>,
    pub mu: Vec<f64>,
    /// Whether `g_n <= 1/mu_n` held elementwise (always expected when
    /// verified; recorded rather than assumed).
    pub bound_holds: bool,
    /// Maximum over `n` of `g_n - 1/mu_n`.
    pub max_bound_violation: f64,
}

impl DiscreteReport {
    /// CSV with columns `n,g_n,mu_n,inv_mu_n,slack_n`; the last row has no
    /// slack entry (the per-step condition pairs `mu_n` with `mu_{n+1}`).
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,g_n,mu_n,inv_mu_n,slack_n")?;
        for i in 0..self.mu.len() {
            let g = self
                .g
                .get(i)
                .map(|v| v.to_string())
                .unwrap_or_default();
            let slack = self
                .slack
                .get(i)
                .map(|v| v.to_string())
                .unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", i, g, self.mu[i], 1.0 / self.mu[i], slack)?;
        }
        Ok(())
    }
}

/// Relative tolerance used when asserting the discrete bound numerically.
pub const BOUND_TOLERANCE: f64 = 1e-12;

/// Checks the per-step certificate conditions and, when they hold, asserts
/// the inductive bound `g_n <= 1/mu_n` against the worst-case recursion.
pub fn verify_discrete_certificate(
    problem: &DiscreteProblem,
    cert: &DiscreteCertificate,
) -> Result<DiscreteReport> {
    let slack = slack_sequence(problem, cert)?;
    let min_slack = slack.iter().copied().fold(f64::INFINITY, f64::min);
    let initial_ok = cert.mu[0] * problem.g0 <= 1.0;
    let verified = initial_ok && min_slack >= 0.0;

    let recursion = run_recursion(problem)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut bound_holds = recursion.overflow_at.is_none();
    for (g, mu) in recursion.g.iter().zip(cert.mu.iter()) {
        let inv = 1.0 / mu;
        let v = g - inv;
        max_violation = max_violation.max(v);
        if v > BOUND_TOLERANCE * (1.0 + inv) {
            bound_holds = false;
        }
    }

    Ok(DiscreteReport {
        verified,
        initial_ok,
        slack,
        min_slack,
        g: recursion.g,
        mu: cert.mu.clone(),
        bound_holds,
        max_bound_violation: max_violation,
    })
}

/// The algebraic residual of the inductive step,
/// `1/mu_{m+1} - [1/mu_m - (mu_{m+1} - mu_m)/mu_m^2]
///  = (mu_m - mu_{m+1})^2 / (mu_m^2 mu_{m+1})`,
/// computed in the right-hand closed form so it is nonnegative by
/// construction for positive arguments.
pub fn inductive_step_residual(mu_m: f64, mu_next: f64) -> f64 {
    let d = mu_m - mu_next;
    d * d / (mu_m * mu_m * mu_next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant_problem(
        n: usize,
        h: f64,
        gamma: f64,
        beta: f64,
        alpha: Nonlinearity,
        g0: f64,
    ) -> DiscreteProblem {
        DiscreteProblem::new(vec![h; n], vec![gamma; n], vec![beta; n], alpha, g0).unwrap()
    }

    #[test]
    fn geometric_decay_in_the_linear_case() {
        let p = constant_problem(50, 0.1, 1.0, 0.0, Nonlinearity::zero(), 2.0);
        let r = run_recursion(&p).unwrap();
        for (n, g) in r.g.iter().enumerate() {
            assert_relative_eq!(*g, 2.0 * 0.9f64.powi(n as i32), max_relative = 1e-12);
        }
    }

    #[test]
    fn single_step_hand_values() {
        let quad = Nonlinearity::power_law(1.0, 2.0).unwrap();
        let p = constant_problem(1, 0.1, 1.0, 0.0, quad.clone(), 0.5);
        assert_relative_eq!(run_recursion(&p).unwrap().g[1], 0.475);

        let p = constant_problem(1, 0.1, 1.0, 0.01, quad, 0.5);
        assert_relative_eq!(run_recursion(&p).unwrap().g[1], 0.476);
    }

    #[test]
    fn step_constraint_enforced() {
        let err = DiscreteProblem::new(
            vec![2.0],
            vec![1.0],
            vec![0.0],
            Nonlinearity::zero(),
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepConstraint { index: 0, .. }));
    }

    #[test]
    fn negative_alpha_rejected_at_runtime() {
        let bad = Nonlinearity::custom(|_, g| g - 1.0, true);
        let p = constant_problem(3, 0.1, 1.0, 0.0, bad, 0.5);
        assert!(matches!(
            run_recursion(&p),
            Err(Error::NegativeAlpha { .. })
        ));
    }

    #[test]
    fn geometric_bound_is_tight() {
        // mu_n = mu_0 (1 - h gamma)^{-n} tracks the linear recursion exactly:
        // g_n mu_n stays constant, so the bound holds with equality when
        // mu_0 g_0 = 1. (Its per-step slack is negative — the reciprocal of
        // the recursion is not itself a zero-slack certificate.)
        let n = 100;
        let (h, gamma) = (0.05, 0.8);
        let g0 = 0.5;
        let p = constant_problem(n, h, gamma, 0.0, Nonlinearity::zero(), g0);
        let mu0 = 1.0 / g0;
        let mu: Vec<f64> = (0..=n)
            .map(|i| mu0 / (1.0 - h * gamma).powi(i as i32))
            .collect();
        let report =
            verify_discrete_certificate(&p, &DiscreteCertificate::new(mu).unwrap()).unwrap();
        assert!(report.bound_holds);
        for (g, mu) in report.g.iter().zip(report.mu.iter()) {
            assert_relative_eq!(g * mu, g0 * mu0, max_relative = 1e-12);
        }
        assert!(report.min_slack < 0.0);
    }

    #[test]
    fn geometric_certificate_zero_slack() {
        // mu_{n+1} = mu_n (1 + h gamma) meets the per-step condition with
        // equality. Dyadic parameters keep every quantity exact in binary,
        // so the computed slack is exactly zero.
        let n = 10;
        let (h, gamma) = (0.25, 0.5);
        let g0 = 0.5;
        let p = constant_problem(n, h, gamma, 0.0, Nonlinearity::zero(), g0);
        let mut mu = vec![2.0];
        for i in 0..n {
            mu.push(mu[i] * (1.0 + h * gamma));
        }
        let report =
            verify_discrete_certificate(&p, &DiscreteCertificate::new(mu).unwrap()).unwrap();
        assert!(report.verified);
        assert!(report.bound_holds);
        for s in &report.slack {
            assert_eq!(*s, 0.0);
        }
    }

    #[test]
    fn discretized_exponential_certificate() {
        // Continuous design gamma = 1, alpha = g^2, bound e^{-0.5 t}/lambda.
        // At the boundary amplitude lambda = 2 the discrete slack dips just
        // below zero at n = 0 (the forward difference of the convex mu
        // exceeds its log-derivative), yet the recursion still respects the
        // bound elementwise. A slightly larger amplitude restores a verified
        // certificate.
        let n = 10_000;
        let h = 0.01;
        let quad = Nonlinearity::power_law(1.0, 2.0).unwrap();

        let boundary = constant_problem(n, h, 1.0, 0.0, quad.clone(), 0.5);
        let mu: Vec<f64> = (0..=n).map(|i| 2.0 * (0.5 * i as f64 * h).exp()).collect();
        let report = verify_discrete_certificate(
            &boundary,
            &DiscreteCertificate::new(mu).unwrap(),
        )
        .unwrap();
        assert!(!report.verified);
        assert!(report.min_slack > -1e-3);
        assert!(report.bound_holds, "violation {}", report.max_bound_violation);

        let lambda = 2.05;
        let margin = constant_problem(n, h, 1.0, 0.0, quad, 1.0 / lambda);
        let mu: Vec<f64> = (0..=n)
            .map(|i| lambda * (0.5 * i as f64 * h).exp())
            .collect();
        let report =
            verify_discrete_certificate(&margin, &DiscreteCertificate::new(mu).unwrap())
                .unwrap();
        assert!(report.verified, "min slack {}", report.min_slack);
        assert!(report.bound_holds, "violation {}", report.max_bound_violation);
    }

    #[test]
    fn overgrown_certificate_fails_at_the_first_step() {
        let n = 100;
        let h = 0.01;
        let p = constant_problem(
            n,
            h,
            1.0,
            0.0,
            Nonlinearity::power_law(1.0, 2.0).unwrap(),
            0.5,
        );
        let mu: Vec<f64> = (0..=n).map(|i| 2.0 * (2.0 * i as f64 * h).exp()).collect();
        let report =
            verify_discrete_certificate(&p, &DiscreteCertificate::new(mu).unwrap()).unwrap();
        assert!(!report.verified);
        assert!(report.slack[0] < 0.0);
    }

    #[test]
    fn inductive_residual_examples() {
        assert_eq!(inductive_step_residual(1.0, 1.0), 0.0);
        assert_relative_eq!(inductive_step_residual(1.0, 2.0), 0.5);
        assert_relative_eq!(inductive_step_residual(2.0, 1.0), 0.25);
    }

    #[test]
    fn certificate_length_checked() {
        let p = constant_problem(10, 0.1, 1.0, 0.0, Nonlinearity::zero(), 1.0);
        let cert = DiscreteCertificate::new(vec![1.0; 10]).unwrap();
        assert!(matches!(
            verify_discrete_certificate(&p, &cert),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn csv_last_row_has_empty_slack() {
        let p = constant_problem(2, 0.1, 1.0, 0.0, Nonlinearity::zero(), 1.0);
        let cert = DiscreteCertificate::new(vec![1.0, 1.05, 1.1]).unwrap();
        let report = verify_discrete_certificate(&p, &cert).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.trim_end().lines().last().unwrap();
        assert!(last.ends_with(','), "last row should carry no slack: {last}");
    }
}
