//! Scenario configuration: a sectioned TOML file with named kinds and
//! numeric parameters only — no expression language. Each scenario names
//! exactly one kind; the blocks that kind needs must be present and are
//! validated against the library preconditions before dispatch.

use std::path::Path;

use serde::Deserialize;

use majorant::{Majorant, Nonlinearity, TimeFunction};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: Kind,
    pub problem: Option<ProblemBlock>,
    pub system: Option<SystemBlock>,
    pub design: Option<DesignBlock>,
    pub discrete: Option<DiscreteBlock>,
    pub certificate: Option<CertificateBlock>,
    pub compare: Option<CompareBlock>,
    pub blowup: Option<BlowupBlock>,
    pub majorant: Option<MajorantConfig>,
    pub sweep: Option<SweepBlock>,
    pub numerics: NumericsBlock,
    pub output: Option<OutputBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Certify,
    Simulate,
    Design,
    Discrete,
    Compare,
    Blowup,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Certify => "certify",
            Kind::Simulate => "simulate",
            Kind::Design => "design",
            Kind::Discrete => "discrete",
            Kind::Compare => "compare",
            Kind::Blowup => "blowup",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsBlock {
    /// Mandatory seed for every randomized check, for reproducibility.
    pub seed: u64,
    pub horizon: Option<f64>,
    pub grid: Option<usize>,
    pub grid_spacing: Option<GridSpacingConfig>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub slack_tolerance: Option<f64>,
    /// Allowed trajectory-vs-bound violation in cross checks.
    pub cross_tolerance: Option<f64>,
    /// Allowed |detected - oracle| escape-time gap in blowup scenarios.
    pub blowup_tolerance: Option<f64>,
    /// Sample count for dissipativity spot checks.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridSpacingConfig {
    Uniform,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub gamma: TimeFnConfig,
    pub alpha: NonlinearityConfig,
    pub beta: TimeFnConfig,
    pub g0: f64,
}

/// Time functions by named kind.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeFnConfig {
    Zero,
    Constant { c: f64 },
    /// `c / (1+t)^q`
    PowerDecay { c: f64, q: f64 },
    /// `c e^{-k t}`
    Exponential { c: f64, k: f64 },
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
    Sum { terms: Vec<TimeFnConfig> },
    Product { terms: Vec<TimeFnConfig> },
}

impl TimeFnConfig {
    pub fn build(&self) -> Result<TimeFunction, CliError> {
        Ok(match self {
            TimeFnConfig::Zero => TimeFunction::zero(),
            TimeFnConfig::Constant { c } => TimeFunction::Constant(*c),
            TimeFnConfig::PowerDecay { c, q } => TimeFunction::PowerDecay { c: *c, q: *q },
            TimeFnConfig::Exponential { c, k } => TimeFunction::Exponential { c: *c, k: *k },
            TimeFnConfig::Tabulated { knots, values } => {
                TimeFunction::tabulated(knots.clone(), values.clone())?
            }
            TimeFnConfig::Sum { terms } => TimeFunction::Sum(
                terms.iter().map(|t| t.build()).collect::<Result<_, _>>()?,
            ),
            TimeFnConfig::Product { terms } => TimeFunction::Product(
                terms.iter().map(|t| t.build()).collect::<Result<_, _>>()?,
            ),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    Zero,
    /// `c0 g^p`, `c0 > 0`, `p > 1`
    PowerLaw { c0: f64, p: f64 },
    /// `c (1+t)^{-m} g^p`
    TimeScaledPower { c: f64, m: f64, p: f64 },
}

impl NonlinearityConfig {
    pub fn build(&self) -> Result<Nonlinearity, CliError> {
        Ok(match self {
            NonlinearityConfig::Zero => Nonlinearity::zero(),
            NonlinearityConfig::PowerLaw { c0, p } => Nonlinearity::power_law(*c0, *p)?,
            NonlinearityConfig::TimeScaledPower { c, m, p } => {
                Nonlinearity::time_scaled_power(*c, *m, *p)?
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MajorantConfig {
    /// `lambda e^{b t}`
    Exponential { lambda: f64, b: f64 },
    /// `lambda (1+t)^nu`
    Power { lambda: f64, nu: f64 },
    /// `d + lambda (1+t)^{-n}`
    ShiftedInversePower { d: f64, lambda: f64, n: f64 },
    /// Custom core; the derivative is derived in closed form.
    Custom { mu: TimeFnConfig },
}

impl MajorantConfig {
    pub fn build(&self) -> Result<Majorant, CliError> {
        Ok(match self {
            MajorantConfig::Exponential { lambda, b } => Majorant::exponential(*lambda, *b)?,
            MajorantConfig::Power { lambda, nu } => Majorant::power(*lambda, *nu)?,
            MajorantConfig::ShiftedInversePower { d, lambda, n } => {
                Majorant::shifted_inverse_power(*d, *lambda, *n)?
            }
            MajorantConfig::Custom { mu } => Majorant::custom(mu.build()?)?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub dim: usize,
    /// Constant matrix, one row per entry.
    pub a: Vec<Vec<f64>>,
    pub f: SystemNonlinConfig,
    pub b: ForcingConfig,
    pub u0: Vec<f64>,
    /// Declared dissipativity rate, spot-checked by sampling.
    pub gamma: Option<TimeFnConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemNonlinConfig {
    Zero,
    /// `c |u|^{p-1} u` (norm bound `c |u|^p`)
    NormPower { c: f64, p: f64 },
    /// One-dimensional `c u^p` with integer parity.
    ScalarPower { c: f64, p: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingConfig {
    Zero,
    Constant { values: Vec<f64> },
    /// `values * e^{-k t}`
    ExpDecay { values: Vec<f64>, k: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    pub theorem: Theorem,
    pub k: Option<f64>,
    pub c0: Option<f64>,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub nu: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub g0: Option<f64>,
    pub u0_norm: Option<f64>,
    pub alpha0: Option<f64>,
    pub lambda: Option<f64>,
    pub kprime: Option<f64>,
    pub nu_beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    ExponentialRate,
    DataDependentRate,
    PowerRate,
    ForcedPowerRate,
    BoundedOrbit,
    MixedEnvelopes,
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Theorem::ExponentialRate => "exponential-rate",
            Theorem::DataDependentRate => "data-dependent-rate",
            Theorem::PowerRate => "power-rate",
            Theorem::ForcedPowerRate => "forced-power-rate",
            Theorem::BoundedOrbit => "bounded-orbit",
            Theorem::MixedEnvelopes => "mixed-envelopes",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteBlock {
    pub steps: Option<usize>,
    pub h: SeqConfig,
    pub gamma: SeqConfig,
    pub beta: SeqConfig,
    pub alpha: NonlinearityConfig,
    pub g0: f64,
}

/// A per-step sequence: one number for all steps, an explicit list, or a
/// time function sampled at the accumulated step times.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeqConfig {
    Scalar(f64),
    List(Vec<f64>),
    Fn(TimeFnConfig),
}

impl SeqConfig {
    /// Expands to `n` values, sampling time functions at `times[0..n]`.
    pub fn expand(&self, n: usize, times: &[f64], what: &str) -> Result<Vec<f64>, CliError> {
        match self {
            SeqConfig::Scalar(v) => Ok(vec![*v; n]),
            SeqConfig::List(vs) => {
                if vs.len() != n {
                    return Err(CliError::Validation {
                        field: what.to_string(),
                        message: format!("expected {n} entries, got {}", vs.len()),
                    });
                }
                Ok(vs.clone())
            }
            SeqConfig::Fn(f) => {
                let tf = f.build()?;
                (0..n)
                    .map(|i| tf.eval(times[i]).map_err(CliError::from))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateBlock {
    pub mu: MuConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MuConfig {
    Values { values: Vec<f64> },
    Family(MajorantConfig),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    pub f: ScalarRhsConfig,
    pub g: ScalarRhsConfig,
    pub phi0: f64,
    pub psi0: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalarRhsConfig {
    /// `a x + b`
    Linear { a: f64, b: f64 },
    /// `amp sin(t) + a x + b`
    SinForced { amp: f64, a: f64, b: f64 },
}

impl ScalarRhsConfig {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            ScalarRhsConfig::Linear { a, b } => a * x + b,
            ScalarRhsConfig::SinForced { amp, a, b } => amp * t.sin() + a * x + b,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupBlock {
    /// `u' = c u^3`
    pub c: f64,
    pub u0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let config: ScenarioConfig = toml::from_str(&text).map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Structural validation: the blocks the kind needs are present, and the
    /// simple numeric preconditions hold, each reported with the violated
    /// condition spelled out.
    pub fn validate(&self) -> Result<(), CliError> {
        let need = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::Validation {
                    field: field.to_string(),
                    message: format!("required for kind \"{}\"", self.kind),
                })
            }
        };
        match self.kind {
            Kind::Certify => {
                need(self.problem.is_some(), "problem")?;
                need(self.majorant.is_some(), "majorant")?;
                need(self.numerics.horizon.is_some(), "numerics.horizon")?;
            }
            Kind::Simulate => {
                need(self.system.is_some(), "system")?;
                need(self.numerics.horizon.is_some(), "numerics.horizon")?;
            }
            Kind::Design => need(self.design.is_some(), "design")?,
            Kind::Discrete => {
                need(self.discrete.is_some(), "discrete")?;
                need(self.certificate.is_some(), "certificate")?;
            }
            Kind::Compare => {
                need(self.compare.is_some(), "compare")?;
                need(self.numerics.horizon.is_some(), "numerics.horizon")?;
            }
            Kind::Blowup => {
                need(self.blowup.is_some(), "blowup")?;
                need(self.numerics.horizon.is_some(), "numerics.horizon")?;
            }
        }

        if let Some(h) = self.numerics.horizon {
            if !(h > 0.0) {
                return Err(CliError::Validation {
                    field: "numerics.horizon".into(),
                    message: format!("must satisfy horizon > 0, got {h}"),
                });
            }
        }
        if let Some(g) = self.numerics.grid {
            if g < 2 {
                return Err(CliError::Validation {
                    field: "numerics.grid".into(),
                    message: format!("grid needs at least 2 points, got {g}"),
                });
            }
        }
        if let Some(p) = &self.problem {
            if !(p.g0 >= 0.0) {
                return Err(CliError::Validation {
                    field: "problem.g0".into(),
                    message: format!("must satisfy g0 >= 0, got {}", p.g0),
                });
            }
        }
        if let Some(s) = &self.system {
            if s.u0.len() != s.dim {
                return Err(CliError::Validation {
                    field: "system.u0".into(),
                    message: format!("expected {} entries, got {}", s.dim, s.u0.len()),
                });
            }
            if s.a.len() != s.dim || s.a.iter().any(|row| row.len() != s.dim) {
                return Err(CliError::Validation {
                    field: "system.a".into(),
                    message: format!("expected a {0} x {0} matrix", s.dim),
                });
            }
        }
        if let Some(c) = &self.compare {
            if !(c.psi0 >= c.phi0) {
                return Err(CliError::Validation {
                    field: "compare.psi0".into(),
                    message: format!(
                        "must satisfy psi0 >= phi0, got phi0 = {}, psi0 = {}",
                        c.phi0, c.psi0
                    ),
                });
            }
        }
        if let Some(b) = &self.blowup {
            if b.u0 == 0.0 {
                return Err(CliError::Validation {
                    field: "blowup.u0".into(),
                    message: "must satisfy u0 != 0".into(),
                });
            }
        }
        Ok(())
    }
}
