//! The nonlinear term `alpha(t, g)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Shape of the nonlinearity.
#[derive(Clone)]
pub enum NonlinearityKind {
    /// `alpha(t, g) = 0`
    Zero,
    /// `alpha(t, g) = c0 * g^p`, `c0 > 0`, `p > 1`.
    PowerLaw { c0: f64, p: f64 },
    /// `alpha(t, g) = c * (1+t)^{-m} * g^p`. Sign of `c` is free, so this
    /// kind also expresses damping terms entered with a minus sign.
    TimeScaledPower { c: f64, m: f64, p: f64 },
    /// Arbitrary callable.
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for NonlinearityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NonlinearityKind::Zero => write!(f, "Zero"),
            NonlinearityKind::PowerLaw { c0, p } => write!(f, "PowerLaw {{ c0: {c0}, p: {p} }}"),
            NonlinearityKind::TimeScaledPower { c, m, p } => {
                write!(f, "TimeScaledPower {{ c: {c}, m: {m}, p: {p} }}")
            }
            NonlinearityKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// The map `(t, g) -> alpha(t, g)` together with the metadata the
/// verification and recursion routines rely on.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    monotone_in_g: bool,
}

/// A sampled counterexample to declared monotonicity in `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneViolation {
    pub t: f64,
    pub g_lo: f64,
    pub g_hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
}

impl Nonlinearity {
    /// The zero nonlinearity.
    pub fn zero() -> Self {
        Nonlinearity {
            kind: NonlinearityKind::Zero,
            monotone_in_g: true,
        }
    }

    /// `c0 * g^p` with the superlinear-growth constraints `c0 > 0`, `p > 1`.
    pub fn power_law(c0: f64, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::BadExponent { p });
        }
        if !(c0 > 0.0) {
            return Err(Error::NonPositive {
                name: "c0",
                value: c0,
            });
        }
        Ok(Nonlinearity {
            kind: NonlinearityKind::PowerLaw { c0, p },
            monotone_in_g: true,
        })
    }

    /// `c * (1+t)^{-m} * g^p`. Monotone in `g` (for `g >= 0`) exactly when
    /// `c >= 0`.
    pub fn time_scaled_power(c: f64, m: f64, p: f64) -> Result<Self> {
        if !p.is_finite() || !c.is_finite() || !m.is_finite() {
            return Err(Error::InvalidParameter {
                name: "time_scaled_power",
                reason: "parameters must be finite".into(),
            });
        }
        Ok(Nonlinearity {
            kind: NonlinearityKind::TimeScaledPower { c, m, p },
            monotone_in_g: c >= 0.0,
        })
    }

    /// Arbitrary callable with a caller-declared monotonicity flag.
    pub fn custom<F>(f: F, monotone_in_g: bool) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Nonlinearity {
            kind: NonlinearityKind::Custom(Arc::new(f)),
            monotone_in_g,
        }
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn monotone_in_g(&self) -> bool {
        self.monotone_in_g
    }

    /// Evaluates `alpha(t, g)`.
    ///
    /// Powers are exact for integer exponents (so `g^2` keeps its parity for
    /// negative `g`, which matters when comparison solutions cross zero);
    /// non-integer exponents use the odd extension `sign(g) |g|^p` so that
    /// slight undershoots below zero inside an integrator stage stay finite.
    pub fn eval(&self, t: f64, g: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::PowerLaw { c0, p } => c0 * signed_power(g, *p),
            NonlinearityKind::TimeScaledPower { c, m, p } => {
                c * (1.0 + t).powf(-m) * signed_power(g, *p)
            }
            NonlinearityKind::Custom(f) => f(t, g),
        }
    }

    /// Structurally zero?
    pub fn is_zero(&self) -> bool {
        matches!(self.kind, NonlinearityKind::Zero)
    }

    /// Estimates the Lipschitz constant `L(T, M)` of `g -> alpha(t, g)` over
    /// `t in [0, T]`, `g in [0, M]` by the steepest sampled secant slope on a
    /// grid, refined with short-range difference quotients.
    pub fn lipschitz_estimate(&self, horizon: f64, m: f64) -> f64 {
        let nt = 41;
        let ng = 201;
        let mut worst: f64 = 0.0;
        let delta = 1e-6 * m.max(1e-6);
        for i in 0..nt {
            let t = horizon * i as f64 / (nt - 1) as f64;
            let mut prev_g = 0.0;
            let mut prev_v = self.eval(t, 0.0);
            for j in 1..ng {
                let g = m * j as f64 / (ng - 1) as f64;
                let v = self.eval(t, g);
                worst = worst.max(((v - prev_v) / (g - prev_g)).abs());
                // Local difference quotient picks up slope peaks the coarse
                // secant can miss.
                if g >= delta {
                    let local = (v - self.eval(t, g - delta)) / delta;
                    worst = worst.max(local.abs());
                }
                prev_g = g;
                prev_v = v;
            }
        }
        worst
    }

    /// Spot-checks the declared monotonicity on `[0, horizon] x [0, m]` with
    /// `trials` random pairs and returns the first violation found, if any.
    pub fn sampled_monotone_violation(
        &self,
        horizon: f64,
        m: f64,
        trials: usize,
        seed: u64,
    ) -> Option<MonotoneViolation> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let t = rng.gen_range(0.0..=horizon);
            let a = rng.gen_range(0.0..=m);
            let b = rng.gen_range(0.0..=m);
            let (g_lo, g_hi) = if a <= b { (a, b) } else { (b, a) };
            let value_lo = self.eval(t, g_lo);
            let value_hi = self.eval(t, g_hi);
            if value_hi < value_lo - 1e-12 * (1.0 + value_lo.abs()) {
                return Some(MonotoneViolation {
                    t,
                    g_lo,
                    g_hi,
                    value_lo,
                    value_hi,
                });
            }
        }
        None
    }
}

fn signed_power(g: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        g.powi(p as i32)
    } else {
        g.signum() * g.abs().powf(p)
    }
}
