//! Scalar functions of time.
//!
//! [`TimeFunction`] is a small closed family of evaluable functions: constants,
//! algebraic decay `c/(1+t)^q`, exponentials `c e^{-kt}`, tabulated data with
//! linear interpolation, and sums/products of those. It covers every
//! coefficient function the rest of the crate needs (decay rates, forcing
//! envelopes, majorant cores) while staying serializable-by-parameters: there
//! is no expression language, only named kinds with numbers.
//!
//! Exponents may be negative, so `c/(1+t)^q` with `q < 0` doubles as
//! polynomial growth; `1 + t` is `Sum[Constant(1), PowerDecay{c: 1, q: -1}]`
//! minus the constant, i.e. `PowerDecay { c: 1.0, q: -1.0 }` alone.

use crate::error::{Error, Result};

/// An evaluable scalar function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeFunction {
    /// `c`
    Constant(f64),
    /// `c / (1+t)^q`; negative `q` gives growth.
    PowerDecay { c: f64, q: f64 },
    /// `c * e^{-k t}`; negative `k` gives growth.
    Exponential { c: f64, k: f64 },
    /// Piecewise-linear interpolation of `(knots, values)`.
    /// Evaluation outside the knot range is a domain error.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
    /// Sum of the terms.
    Sum(Vec<TimeFunction>),
    /// Product of the factors.
    Product(Vec<TimeFunction>),
}

/// Structural behavior of a [`TimeFunction`] as `t -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitBehavior {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Unknown,
}

impl TimeFunction {
    /// The zero function.
    pub fn zero() -> Self {
        TimeFunction::Constant(0.0)
    }

    /// Builds a tabulated function, validating that the knots are strictly
    /// increasing and match the values in length.
    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "tabulated knots/values",
                expected: knots.len(),
                got: values.len(),
            });
        }
        if knots.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "tabulated knots",
                reason: "need at least two knots".into(),
            });
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter {
                name: "tabulated knots",
                reason: "knots must be strictly increasing".into(),
            });
        }
        if !knots.iter().chain(values.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tabulated data",
                reason: "knots and values must be finite".into(),
            });
        }
        Ok(TimeFunction::Tabulated { knots, values })
    }

    /// Evaluates the function at `t`.
    ///
    /// Errors with [`Error::EvaluationDomain`] when `t` falls outside a
    /// tabulated range (with a small relative slack for endpoint rounding)
    /// or at the `1 + t <= 0` pole of the algebraic kinds.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            TimeFunction::Constant(c) => Ok(*c),
            TimeFunction::PowerDecay { c, q } => {
                let base = 1.0 + t;
                if base <= 0.0 {
                    return Err(Error::EvaluationDomain {
                        t,
                        lo: -1.0,
                        hi: f64::INFINITY,
                    });
                }
                Ok(c * base.powf(-q))
            }
            TimeFunction::Exponential { c, k } => Ok(c * (-k * t).exp()),
            TimeFunction::Tabulated { knots, values } => {
                let lo = knots[0];
                let hi = *knots.last().unwrap();
                let slack = 1e-9 * (hi - lo).abs().max(1.0);
                if t < lo - slack || t > hi + slack {
                    return Err(Error::EvaluationDomain { t, lo, hi });
                }
                let t = t.clamp(lo, hi);
                // Index of the left knot of the bracketing interval.
                let i = match knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
                    Ok(i) => return Ok(values[i]),
                    Err(i) => i.saturating_sub(1).min(knots.len() - 2),
                };
                let w = (t - knots[i]) / (knots[i + 1] - knots[i]);
                Ok(values[i] * (1.0 - w) + values[i + 1] * w)
            }
            TimeFunction::Sum(terms) => {
                let mut acc = 0.0;
                for term in terms {
                    acc += term.eval(t)?;
                }
                Ok(acc)
            }
            TimeFunction::Product(factors) => {
                let mut acc = 1.0;
                for factor in factors {
                    acc *= factor.eval(t)?;
                }
                Ok(acc)
            }
        }
    }

    /// Evaluation for use inside integrator right-hand sides, where a plain
    /// `f64` is required: tabulated functions saturate to their end values
    /// outside the knot range, and any other domain failure yields NaN (which
    /// the step controller then rejects).
    pub fn eval_saturating(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Tabulated { knots, .. } => {
                let t = t.clamp(knots[0], *knots.last().unwrap());
                self.eval(t).unwrap_or(f64::NAN)
            }
            TimeFunction::Sum(terms) => terms.iter().map(|f| f.eval_saturating(t)).sum(),
            TimeFunction::Product(factors) => {
                factors.iter().map(|f| f.eval_saturating(t)).product()
            }
            _ => self.eval(t).unwrap_or(f64::NAN),
        }
    }

    /// Closed-form derivative, when one exists for every piece.
    /// Tabulated functions have none.
    pub fn derivative(&self) -> Option<TimeFunction> {
        match self {
            TimeFunction::Constant(_) => Some(TimeFunction::Constant(0.0)),
            TimeFunction::PowerDecay { c, q } => Some(TimeFunction::PowerDecay {
                c: -c * q,
                q: q + 1.0,
            }),
            TimeFunction::Exponential { c, k } => Some(TimeFunction::Exponential { c: -c * k, k: *k }),
            TimeFunction::Tabulated { .. } => None,
            TimeFunction::Sum(terms) => {
                let ds: Option<Vec<_>> = terms.iter().map(|f| f.derivative()).collect();
                Some(TimeFunction::Sum(ds?))
            }
            TimeFunction::Product(factors) => {
                // Product rule: sum over i of f_i' * prod_{j != i} f_j.
                let mut terms = Vec::with_capacity(factors.len());
                for (i, fi) in factors.iter().enumerate() {
                    let di = fi.derivative()?;
                    let mut parts = vec![di];
                    for (j, fj) in factors.iter().enumerate() {
                        if j != i {
                            parts.push(fj.clone());
                        }
                    }
                    terms.push(TimeFunction::Product(parts));
                }
                Some(TimeFunction::Sum(terms))
            }
        }
    }

    /// Structurally the zero function?
    pub fn is_zero(&self) -> bool {
        match self {
            TimeFunction::Constant(c) => *c == 0.0,
            TimeFunction::PowerDecay { c, .. } | TimeFunction::Exponential { c, .. } => *c == 0.0,
            TimeFunction::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
            TimeFunction::Sum(terms) => terms.iter().all(|f| f.is_zero()),
            TimeFunction::Product(factors) => factors.iter().any(|f| f.is_zero()),
        }
    }

    /// Views the function as `c / (1+t)^q` when it is structurally of that
    /// shape (constants count, with `q = 0`).
    pub fn as_power_decay(&self) -> Option<(f64, f64)> {
        match self {
            TimeFunction::Constant(c) => Some((*c, 0.0)),
            TimeFunction::PowerDecay { c, q } => Some((*c, *q)),
            _ => None,
        }
    }

    /// Structural limit as `t -> infinity`.
    pub fn limit_at_infinity(&self) -> LimitBehavior {
        use LimitBehavior::*;
        match self {
            TimeFunction::Constant(c) => Finite(*c),
            TimeFunction::PowerDecay { c, q } => {
                if *c == 0.0 || *q > 0.0 {
                    Finite(if *q == 0.0 { *c } else { 0.0 })
                } else if *q == 0.0 {
                    Finite(*c)
                } else if *c > 0.0 {
                    PlusInfinity
                } else {
                    MinusInfinity
                }
            }
            TimeFunction::Exponential { c, k } => {
                if *c == 0.0 || *k > 0.0 {
                    Finite(if *k == 0.0 { *c } else { 0.0 })
                } else if *k == 0.0 {
                    Finite(*c)
                } else if *c > 0.0 {
                    PlusInfinity
                } else {
                    MinusInfinity
                }
            }
            TimeFunction::Tabulated { .. } => Unknown,
            TimeFunction::Sum(terms) => {
                let mut finite_sum = 0.0;
                let mut plus = false;
                let mut minus = false;
                for term in terms {
                    match term.limit_at_infinity() {
                        Finite(v) => finite_sum += v,
                        PlusInfinity => plus = true,
                        MinusInfinity => minus = true,
                        Unknown => return Unknown,
                    }
                }
                match (plus, minus) {
                    (false, false) => Finite(finite_sum),
                    (true, false) => PlusInfinity,
                    (false, true) => MinusInfinity,
                    (true, true) => Unknown,
                }
            }
            TimeFunction::Product(factors) => {
                let mut sign = 1.0f64;
                let mut finite_prod = 1.0;
                let mut infinite = false;
                for factor in factors {
                    match factor.limit_at_infinity() {
                        Finite(v) => {
                            if v == 0.0 {
                                // 0 * infinity is indeterminate here.
                                if infinite {
                                    return Unknown;
                                }
                                finite_prod = 0.0;
                            }
                            sign *= v.signum();
                            finite_prod *= v;
                        }
                        PlusInfinity => infinite = true,
                        MinusInfinity => {
                            infinite = true;
                            sign = -sign;
                        }
                        Unknown => return Unknown,
                    }
                }
                if !infinite {
                    Finite(finite_prod)
                } else if finite_prod == 0.0 {
                    Unknown
                } else if sign > 0.0 {
                    PlusInfinity
                } else {
                    MinusInfinity
                }
            }
        }
    }
}

/// Renders a rate coefficient times `t`, folding unit coefficients.
pub(crate) fn rate_term(rate: f64) -> String {
    if rate == 1.0 {
        "t".to_string()
    } else if rate == -1.0 {
        "-t".to_string()
    } else {
        format!("{rate}t")
    }
}

impl std::fmt::Display for TimeFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeFunction::Constant(c) => write!(f, "{c}"),
            TimeFunction::PowerDecay { c, q } => {
                if *q == 0.0 {
                    write!(f, "{c}")
                } else if *q == -1.0 && *c == 1.0 {
                    write!(f, "(1+t)")
                } else if *q < 0.0 {
                    if *c == 1.0 {
                        write!(f, "(1+t)^{}", -q)
                    } else {
                        write!(f, "{c} (1+t)^{}", -q)
                    }
                } else if *c == 1.0 && *q == 1.0 {
                    write!(f, "1/(1+t)")
                } else if *q == 1.0 {
                    write!(f, "{c}/(1+t)")
                } else {
                    write!(f, "{c}/(1+t)^{q}")
                }
            }
            TimeFunction::Exponential { c, k } => {
                if *k == 0.0 {
                    write!(f, "{c}")
                } else if *c == 1.0 {
                    write!(f, "e^({})", rate_term(-k))
                } else {
                    write!(f, "{c} e^({})", rate_term(-k))
                }
            }
            TimeFunction::Tabulated { knots, .. } => {
                write!(f, "tabulated[{}, {}]", knots[0], knots.last().unwrap())
            }
            TimeFunction::Sum(terms) => {
                let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            TimeFunction::Product(factors) => {
                let parts: Vec<String> = factors.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(" * "))
            }
        }
    }
}
