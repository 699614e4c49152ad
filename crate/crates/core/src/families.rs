//! Closed-form certificate designers.
//!
//! Each designer takes problem constants, picks majorant parameters in closed
//! form, and checks the sufficient inequalities that make the certificate
//! valid for all `t >= 0`. A designer's output converts directly into an
//! `(InequalityProblem, Majorant)` pair whose verified slack is nonnegative —
//! the closed-form conditions are exactly the `t = 0` reductions of the
//! pointwise certificate condition.
//!
//! Infeasibility is an answer, not an error: it names the first violated
//! condition with both sides evaluated, so a caller can see how far off the
//! constants are.

use crate::certificate::{InequalityProblem, Majorant};
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::timefn::TimeFunction;

/// Outcome of a designer: a usable design, or the first violated condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Design<T> {
    Feasible(T),
    Infeasible(Violation),
}

impl<T> Design<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Design::Feasible(_))
    }

    pub fn feasible(self) -> Option<T> {
        match self {
            Design::Feasible(t) => Some(t),
            Design::Infeasible(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Design::Feasible(_) => None,
            Design::Infeasible(v) => Some(v),
        }
    }
}

/// A named sufficient condition together with the evaluated sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    /// Value that must not exceed (or must stay strictly below) `limit`.
    pub value: f64,
    pub limit: f64,
    /// Strict inequality required?
    pub strict: bool,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rel = if self.strict { "<" } else { "<=" };
        write!(
            f,
            "{} requires {} {rel} {}, got {} vs {}",
            self.condition.name(),
            self.condition.lhs(),
            self.condition.rhs(),
            self.value,
            self.limit
        )
    }
}

/// The sufficient conditions the designers check, named by content.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `q1 <= 1`: the linear decay rate must not fall off faster than `1/(1+t)`.
    GammaDecayLimit,
    /// `(p-1) nu >= q1`: the nonlinear term must decay fast enough along the bound.
    NonlinearDecayBalance,
    /// `q2 - nu >= q1`: the forcing must decay fast enough relative to the bound.
    ForcingDecayBalance,
    /// `c0/lambda^{p-1} + lambda c2 + nu <= c1`: the combined budget at `t = 0`.
    RateBudget,
    /// `min(m1, m2) > 1`: room for a positive bound exponent.
    DecayHeadroom,
    /// `c1 + c2 d^{1-p} <= n`: smallness of the destabilizing constants.
    SmallnessBudget,
    /// `c0 g0^{p-1} < k`: initial amplitude small against the decay rate.
    InitialAmplitude,
    /// `alpha0/lambda < (gamma - k)/2`: initial nonlinearity envelope.
    InitialNonlinearity,
    /// `lambda nu_beta <= (gamma - k)/2`: forcing amplitude envelope.
    ForcingAmplitude,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::GammaDecayLimit => "gamma-decay-limit",
            Condition::NonlinearDecayBalance => "nonlinear-decay-balance",
            Condition::ForcingDecayBalance => "forcing-decay-balance",
            Condition::RateBudget => "rate-budget",
            Condition::DecayHeadroom => "decay-headroom",
            Condition::SmallnessBudget => "smallness-budget",
            Condition::InitialAmplitude => "initial-amplitude",
            Condition::InitialNonlinearity => "initial-nonlinearity",
            Condition::ForcingAmplitude => "forcing-amplitude",
        }
    }

    pub fn lhs(&self) -> &'static str {
        match self {
            Condition::GammaDecayLimit => "q1",
            Condition::NonlinearDecayBalance => "q1",
            Condition::ForcingDecayBalance => "q1",
            Condition::RateBudget => "c0/lambda^(p-1) + lambda*c2 + nu",
            Condition::DecayHeadroom => "1",
            Condition::SmallnessBudget => "c1 + c2*d^(1-p)",
            Condition::InitialAmplitude => "c0*g0^(p-1)",
            Condition::InitialNonlinearity => "alpha0/lambda",
            Condition::ForcingAmplitude => "lambda*nu_beta",
        }
    }

    pub fn rhs(&self) -> &'static str {
        match self {
            Condition::GammaDecayLimit => "1",
            Condition::NonlinearDecayBalance => "(p-1)*nu",
            Condition::ForcingDecayBalance => "q2 - nu",
            Condition::RateBudget => "c1",
            Condition::DecayHeadroom => "min(m1, m2)",
            Condition::SmallnessBudget => "n",
            Condition::InitialAmplitude => "k",
            Condition::InitialNonlinearity => "(gamma - k)/2",
            Condition::ForcingAmplitude => "(gamma - k)/2",
        }
    }
}

fn check(condition: Condition, value: f64, limit: f64, strict: bool) -> Option<Violation> {
    let ok = if strict { value < limit } else { value <= limit };
    if ok {
        None
    } else {
        Some(Violation {
            condition,
            value,
            limit,
            strict,
        })
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

// ---------------------------------------------------------------------------
// Constant dissipation, exponential bound
// ---------------------------------------------------------------------------

/// Exponential-decay design for constant dissipation rate `k` and a power
/// nonlinearity `c0 g^p`: trades a rate sacrifice `epsilon` for an admissible
/// data radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialRateDesign {
    pub k: f64,
    pub c0: f64,
    pub p: f64,
    pub epsilon: f64,
    /// Smallest admissible amplitude, `(c0/epsilon)^{1/(p-1)}`.
    pub lambda: f64,
    /// Certified decay rate `k - epsilon`.
    pub b: f64,
    /// Largest certified initial norm, `1/lambda`.
    pub u0_radius: f64,
}

impl ExponentialRateDesign {
    pub fn majorant(&self) -> Majorant {
        Majorant::Exponential {
            lambda: self.lambda,
            b: self.b,
        }
    }

    /// The scalar inequality the design certifies, at the boundary initial
    /// value `g0 = u0_radius`.
    pub fn worst_case_problem(&self, horizon: f64) -> Result<InequalityProblem> {
        InequalityProblem::new(
            TimeFunction::Constant(self.k),
            Nonlinearity::power_law(self.c0, self.p)?,
            TimeFunction::zero(),
            self.u0_radius,
            horizon,
        )
    }

    /// Certified bound `e^{-b t} / lambda`.
    pub fn bound_at(&self, t: f64) -> f64 {
        (-self.b * t).exp() / self.lambda
    }
}

/// Designs the exponential certificate: `lambda = (c0/epsilon)^{1/(p-1)}`
/// (the smallest admissible value, maximizing the data radius) and decay rate
/// `b = k - epsilon`. Always feasible for valid inputs.
pub fn design_exponential_rate(k: f64, c0: f64, p: f64, epsilon: f64) -> Result<ExponentialRateDesign> {
    require_positive("k", k)?;
    require_positive("c0", c0)?;
    if !(p > 1.0) {
        return Err(Error::BadExponent { p });
    }
    if !(epsilon > 0.0 && epsilon < k) {
        return Err(Error::BadEpsilon { epsilon, limit: k });
    }
    let lambda = (c0 / epsilon).powf(1.0 / (p - 1.0));
    Ok(ExponentialRateDesign {
        k,
        c0,
        p,
        epsilon,
        lambda,
        b: k - epsilon,
        u0_radius: 1.0 / lambda,
    })
}

/// Data-dependent decay rate: for `c0 |u0|^{p-1} < k` the solution obeys
/// `|u(t)| <= |u0| e^{-rate t}` with `rate = k - c0 |u0|^{p-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRate {
    pub rate: f64,
    /// Amplitude of the certified envelope (the initial norm).
    pub amplitude: f64,
}

impl DecayRate {
    pub fn bound_at(&self, t: f64) -> f64 {
        self.amplitude * (-self.rate * t).exp()
    }
}

pub fn check_data_dependent_rate(c0: f64, p: f64, u0_norm: f64, k: f64) -> Result<Design<DecayRate>> {
    require_positive("c0", c0)?;
    require_positive("k", k)?;
    if !(p > 1.0) {
        return Err(Error::BadExponent { p });
    }
    if !(u0_norm >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "u0_norm",
            reason: format!("norm must be >= 0, got {u0_norm}"),
        });
    }
    let pressure = c0 * u0_norm.powf(p - 1.0);
    if let Some(v) = check(Condition::InitialAmplitude, pressure, k, true) {
        return Ok(Design::Infeasible(v));
    }
    Ok(Design::Feasible(DecayRate {
        rate: k - pressure,
        amplitude: u0_norm,
    }))
}

// ---------------------------------------------------------------------------
// Algebraically decaying dissipation, power bound
// ---------------------------------------------------------------------------

/// Power-decay design for `gamma = c1/(1+t)^{q1}` without forcing.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRateDesign {
    pub c1: f64,
    pub q1: f64,
    pub c0: f64,
    pub p: f64,
    pub epsilon: f64,
    pub lambda: f64,
    /// Certified decay exponent `c1 - epsilon`.
    pub nu: f64,
    pub u0_radius: f64,
}

impl PowerRateDesign {
    pub fn majorant(&self) -> Majorant {
        Majorant::Power {
            lambda: self.lambda,
            nu: self.nu,
        }
    }

    pub fn worst_case_problem(&self, horizon: f64) -> Result<InequalityProblem> {
        InequalityProblem::new(
            TimeFunction::PowerDecay {
                c: self.c1,
                q: self.q1,
            },
            Nonlinearity::power_law(self.c0, self.p)?,
            TimeFunction::zero(),
            self.u0_radius,
            horizon,
        )
    }

    /// Certified bound `1/(lambda (1+t)^nu)`.
    pub fn bound_at(&self, t: f64) -> f64 {
        1.0 / (self.lambda * (1.0 + t).powf(self.nu))
    }
}

pub fn design_power_rate(c1: f64, q1: f64, c0: f64, p: f64, epsilon: f64) -> Result<Design<PowerRateDesign>> {
    require_positive("c1", c1)?;
    require_positive("q1", q1)?;
    require_positive("c0", c0)?;
    if !(p > 1.0) {
        return Err(Error::BadExponent { p });
    }
    if !(epsilon > 0.0 && epsilon < c1) {
        return Err(Error::BadEpsilon { epsilon, limit: c1 });
    }
    let nu = c1 - epsilon;
    if let Some(v) = check(Condition::GammaDecayLimit, q1, 1.0, false) {
        return Ok(Design::Infeasible(v));
    }
    if let Some(v) = check(Condition::NonlinearDecayBalance, q1, (p - 1.0) * nu, false) {
        return Ok(Design::Infeasible(v));
    }
    let lambda = (c0 / epsilon).powf(1.0 / (p - 1.0));
    Ok(Design::Feasible(PowerRateDesign {
        c1,
        q1,
        c0,
        p,
        epsilon,
        lambda,
        nu,
        u0_radius: 1.0 / lambda,
    }))
}

// ---------------------------------------------------------------------------
// Persistent forcing, optimal amplitude
// ---------------------------------------------------------------------------

/// Power-decay design with persistent forcing `beta <= c2/(1+t)^{q2}`; the
/// amplitude `lambda0` minimizes `h(lambda) = c0 lambda^{1-p} + lambda c2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedPowerRateDesign {
    pub c0: f64,
    pub p: f64,
    pub c1: f64,
    pub c2: f64,
    pub q1: f64,
    pub q2: f64,
    pub nu: f64,
    /// Minimizer `((p-1) c0 / c2)^{1/p}`.
    pub lambda0: f64,
    /// Minimal value of `h`, `c0^{1/p} c2^{1-1/p} (p-1)^{1/p} p/(p-1)`.
    pub hmin: f64,
    pub u0_radius: f64,
}

impl ForcedPowerRateDesign {
    pub fn majorant(&self) -> Majorant {
        Majorant::Power {
            lambda: self.lambda0,
            nu: self.nu,
        }
    }

    pub fn worst_case_problem(&self, horizon: f64) -> Result<InequalityProblem> {
        InequalityProblem::new(
            TimeFunction::PowerDecay {
                c: self.c1,
                q: self.q1,
            },
            Nonlinearity::power_law(self.c0, self.p)?,
            TimeFunction::PowerDecay {
                c: self.c2,
                q: self.q2,
            },
            self.u0_radius,
            horizon,
        )
    }

    pub fn bound_at(&self, t: f64) -> f64 {
        1.0 / (self.lambda0 * (1.0 + t).powf(self.nu))
    }
}

/// `h(lambda) = c0 lambda^{1-p} + lambda c2`, the `t = 0` budget as a
/// function of the amplitude.
pub fn forced_budget(c0: f64, c2: f64, p: f64, lambda: f64) -> f64 {
    c0 * lambda.powf(1.0 - p) + lambda * c2
}

/// Closed-form minimizer of [`forced_budget`].
pub fn forced_optimal_amplitude(c0: f64, c2: f64, p: f64) -> f64 {
    ((p - 1.0) * c0 / c2).powf(1.0 / p)
}

/// Closed-form minimum of [`forced_budget`].
pub fn forced_minimal_budget(c0: f64, c2: f64, p: f64) -> f64 {
    c0.powf(1.0 / p) * c2.powf(1.0 - 1.0 / p) * (p - 1.0).powf(1.0 / p) * p / (p - 1.0)
}

pub fn design_forced_power_rate(
    c0: f64,
    c2: f64,
    p: f64,
    q1: f64,
    q2: f64,
    nu: f64,
    c1: f64,
) -> Result<Design<ForcedPowerRateDesign>> {
    for (name, v) in [("c0", c0), ("c2", c2), ("q1", q1), ("q2", q2), ("nu", nu), ("c1", c1)] {
        require_positive(name, v)?;
    }
    if !(p > 1.0) {
        return Err(Error::BadExponent { p });
    }
    if let Some(v) = check(Condition::GammaDecayLimit, q1, 1.0, false) {
        return Ok(Design::Infeasible(v));
    }
    if let Some(v) = check(Condition::ForcingDecayBalance, q1, q2 - nu, false) {
        return Ok(Design::Infeasible(v));
    }
    if let Some(v) = check(Condition::NonlinearDecayBalance, q1, nu * (p - 1.0), false) {
        return Ok(Design::Infeasible(v));
    }
    let lambda0 = forced_optimal_amplitude(c0, c2, p);
    let hmin = forced_minimal_budget(c0, c2, p);
    if let Some(v) = check(Condition::RateBudget, hmin + nu, c1, false) {
        return Ok(Design::Infeasible(v));
    }
    Ok(Design::Feasible(ForcedPowerRateDesign {
        c0,
        p,
        c1,
        c2,
        q1,
        q2,
        nu,
        lambda0,
        hmin,
        u0_radius: 1.0 / lambda0,
    }))
}

// ---------------------------------------------------------------------------
// Destabilizing linear part, bounded regime
// ---------------------------------------------------------------------------

/// Bounded-orbit design for the regime where the linear part pushes outward:
/// `gamma = -c1/(1+t)^{m1}` (destabilizing sign in the canonical inequality)
/// and `alpha = c2 (1+t)^{-m2} g^p`. The majorant `d + lambda (1+t)^{-n}`
/// certifies the global sup bound `1/d = 2 g0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedOrbitDesign {
    pub c1: f64,
    pub c2: f64,
    pub m1: f64,
    pub m2: f64,
    pub p: f64,
    pub g0: f64,
    /// `1/(2 g0)`.
    pub d: f64,
    /// Chosen equal to `d`.
    pub lambda: f64,
    /// Largest exponent with `n + 1 <= min(m1, m2)`.
    pub n: f64,
    /// Margin `n - c1 - c2 d^{1-p}` of the smallness budget.
    pub residual: f64,
    /// Guaranteed `sup g = 1/d = 2 g0`.
    pub sup_bound: f64,
}

impl BoundedOrbitDesign {
    pub fn majorant(&self) -> Majorant {
        Majorant::ShiftedInversePower {
            d: self.d,
            lambda: self.lambda,
            n: self.n,
        }
    }

    /// The canonical inequality with the destabilizing sign:
    /// `gamma(t) = -c1 (1+t)^{-m1}`.
    pub fn worst_case_problem(&self, horizon: f64) -> Result<InequalityProblem> {
        InequalityProblem::new(
            TimeFunction::PowerDecay {
                c: -self.c1,
                q: self.m1,
            },
            Nonlinearity::time_scaled_power(self.c2, self.m2, self.p)?,
            TimeFunction::zero(),
            self.g0,
            horizon,
        )
    }

    pub fn bound_at(&self, t: f64) -> f64 {
        1.0 / (self.d + self.lambda * (1.0 + t).powf(-self.n))
    }
}

pub fn design_bounded_orbit(
    c1: f64,
    c2: f64,
    m1: f64,
    m2: f64,
    p: f64,
    g0: f64,
) -> Result<Design<BoundedOrbitDesign>> {
    for (name, v) in [("c1", c1), ("c2", c2), ("m1", m1), ("m2", m2), ("g0", g0)] {
        require_positive(name, v)?;
    }
    if !(p > 1.0) {
        return Err(Error::BadExponent { p });
    }
    let d = 1.0 / (2.0 * g0);
    let lambda = d;
    let n = m1.min(m2) - 1.0;
    if let Some(v) = check(Condition::DecayHeadroom, 1.0, m1.min(m2), true) {
        return Ok(Design::Infeasible(v));
    }
    let budget = c1 + c2 * d.powf(1.0 - p);
    if let Some(v) = check(Condition::SmallnessBudget, budget, n * lambda / d, false) {
        return Ok(Design::Infeasible(v));
    }
    Ok(Design::Feasible(BoundedOrbitDesign {
        c1,
        c2,
        m1,
        m2,
        p,
        g0,
        d,
        lambda,
        n,
        residual: n - budget,
        sup_bound: 1.0 / d,
    }))
}

// ---------------------------------------------------------------------------
// Mixed damping with decaying envelopes
// ---------------------------------------------------------------------------

/// Exponential certificate for constant dissipation `gamma`, a quadratic
/// nonlinearity with a monotone-decreasing envelope `alpha(t) <= alpha0`, and
/// forcing `beta(t) <= nu_beta e^{-kprime t}` with `kprime > k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnvelopeCertificate {
    pub alpha0: f64,
    pub lambda: f64,
    /// Certified decay rate of the bound `e^{-k t}/lambda`.
    pub k: f64,
    pub kprime: f64,
    pub nu_beta: f64,
    pub gamma: f64,
    /// Largest certified initial norm, `1/lambda`.
    pub max_initial: f64,
}

impl MixedEnvelopeCertificate {
    pub fn majorant(&self) -> Majorant {
        Majorant::Exponential {
            lambda: self.lambda,
            b: self.k,
        }
    }

    /// Worst-case shapes compatible with the envelopes: the nonlinearity
    /// frozen at its initial envelope `alpha0 g^2`, the forcing at equality
    /// `nu_beta e^{-kprime t}`.
    pub fn worst_case_problem(&self, horizon: f64) -> Result<InequalityProblem> {
        InequalityProblem::new(
            TimeFunction::Constant(self.gamma),
            Nonlinearity::time_scaled_power(self.alpha0, 0.0, 2.0)?,
            TimeFunction::Exponential {
                c: self.nu_beta,
                k: self.kprime,
            },
            self.max_initial,
            horizon,
        )
    }

    pub fn bound_at(&self, t: f64) -> f64 {
        (-self.k * t).exp() / self.lambda
    }
}

/// Checks the two envelope conditions that yield exponential decay at rate
/// `k`: `alpha0/lambda < (gamma - k)/2` (strict) and
/// `lambda nu_beta <= (gamma - k)/2`.
pub fn check_mixed_envelopes(
    alpha0: f64,
    lambda: f64,
    k: f64,
    kprime: f64,
    nu_beta: f64,
    gamma: f64,
) -> Result<Design<MixedEnvelopeCertificate>> {
    require_positive("lambda", lambda)?;
    if !(alpha0 >= 0.0) || !(nu_beta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "envelopes",
            reason: format!("alpha0 and nu_beta must be >= 0 (got {alpha0}, {nu_beta})"),
        });
    }
    if !(k > 0.0 && k < gamma) || !(kprime > k) {
        return Err(Error::BadRates { k, kprime, gamma });
    }
    let half_margin = (gamma - k) / 2.0;
    if let Some(v) = check(Condition::InitialNonlinearity, alpha0 / lambda, half_margin, true) {
        return Ok(Design::Infeasible(v));
    }
    if let Some(v) = check(Condition::ForcingAmplitude, lambda * nu_beta, half_margin, false) {
        return Ok(Design::Infeasible(v));
    }
    Ok(Design::Feasible(MixedEnvelopeCertificate {
        alpha0,
        lambda,
        k,
        kprime,
        nu_beta,
        gamma,
        max_initial: 1.0 / lambda,
    }))
}
