//! Closed-form blow-up oracles used to cross-check the integrator.

use crate::error::{Error, Result};

/// Exact solution of `u' = c u^3`: `u(t) = sign(u0) [u0^{-2} - 2ct]^{-1/2}`.
///
/// For `c > 0` the solution escapes at `t_b = 1/(2 c u0^2)`; evaluation at or
/// past `t_b` is an error. For `c < 0` the solution decays to zero and the
/// formula is valid for all `t >= 0`.
pub fn blowup_oracle_cubic(c: f64, u0: f64, t: f64) -> Result<f64> {
    if u0 == 0.0 {
        return Err(Error::InvalidParameter {
            name: "u0",
            reason: "the cubic oracle needs u0 != 0 (u = 0 is the equilibrium)".into(),
        });
    }
    let radicand = u0.powi(-2) - 2.0 * c * t;
    if radicand <= 0.0 {
        return Err(Error::PastBlowup {
            t,
            t_b: cubic_blowup_time(c, u0)?,
        });
    }
    Ok(u0.signum() * radicand.powf(-0.5))
}

/// Escape time `t_b = [2 c u0^2]^{-1}` of `u' = c u^3` for `c > 0`.
pub fn cubic_blowup_time(c: f64, u0: f64) -> Result<f64> {
    if u0 == 0.0 {
        return Err(Error::InvalidParameter {
            name: "u0",
            reason: "u0 must be nonzero".into(),
        });
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("no finite escape for c <= 0 (got {c})"),
        });
    }
    Ok(1.0 / (2.0 * c * u0 * u0))
}

/// Lower envelope `[1/g0 - c t]^{-1}` for `g' >= g^2 / (1/c)`-type growth
/// with `g(0) = g0 > 0`; valid for `t < t_b = 1/(c g0)`.
pub fn blowup_oracle_quadratic_lower(g0: f64, c: f64, t: f64) -> Result<f64> {
    if !(g0 > 0.0) {
        return Err(Error::NonPositive {
            name: "g0",
            value: g0,
        });
    }
    if !(c > 0.0) {
        return Err(Error::NonPositive { name: "c", value: c });
    }
    let denom = 1.0 / g0 - c * t;
    if denom <= 0.0 {
        return Err(Error::PastBlowup {
            t,
            t_b: quadratic_blowup_time(g0, c)?,
        });
    }
    Ok(1.0 / denom)
}

/// Escape time `t_b = 1/(c g0)` of the quadratic lower envelope.
pub fn quadratic_blowup_time(g0: f64, c: f64) -> Result<f64> {
    if !(g0 > 0.0) {
        return Err(Error::NonPositive {
            name: "g0",
            value: g0,
        });
    }
    if !(c > 0.0) {
        return Err(Error::NonPositive { name: "c", value: c });
    }
    Ok(1.0 / (c * g0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_oracle_values() {
        // (1 - 0.75)^{-1/2} = 2
        assert_relative_eq!(blowup_oracle_cubic(1.0, 1.0, 0.375).unwrap(), 2.0);
        assert_relative_eq!(cubic_blowup_time(1.0, 1.0).unwrap(), 0.5);
        // stable branch decays toward zero
        let far = blowup_oracle_cubic(-1.0, 1.0, 1e6).unwrap();
        assert!(far > 0.0 && far < 1e-2);
        // sign follows u0
        assert!(blowup_oracle_cubic(-1.0, -1.0, 2.0).unwrap() < 0.0);
    }

    #[test]
    fn cubic_oracle_domain() {
        assert!(matches!(
            blowup_oracle_cubic(1.0, 1.0, 0.5),
            Err(Error::PastBlowup { .. })
        ));
        assert!(blowup_oracle_cubic(1.0, 0.0, 0.1).is_err());
        assert!(cubic_blowup_time(-1.0, 1.0).is_err());
    }

    #[test]
    fn quadratic_lower_values() {
        assert_relative_eq!(blowup_oracle_quadratic_lower(1.0, 1.0, 0.5).unwrap(), 2.0);
        assert_relative_eq!(blowup_oracle_quadratic_lower(0.7, 2.0, 0.0).unwrap(), 0.7);
        assert_relative_eq!(quadratic_blowup_time(1.0, 1.0).unwrap(), 1.0);
        assert!(matches!(
            blowup_oracle_quadratic_lower(1.0, 1.0, 1.0),
            Err(Error::PastBlowup { .. })
        ));
    }
}
