//! Adaptive numerical integration of finite-dimensional evolution systems
//! `u' = A(t) u + F(t, u) + b(t)` and of the scalar comparison equation, with
//! finite-time blow-up detection, closed-form blow-up oracles, and the local
//! existence interval formulas.

mod dopri;

pub mod blowup;
pub mod comparison;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::timefn::TimeFunction;

/// Controls for the adaptive integrator.
#[derive(Debug, Clone)]
pub struct IntegrateOpts {
    pub rtol: f64,
    pub atol: f64,
    /// Cap on accepted plus rejected steps.
    pub max_steps: usize,
    /// When set, the trajectory is sampled at exactly these (sorted,
    /// nonnegative) times via dense output instead of at the accepted steps.
    pub sample_times: Option<Vec<f64>>,
    /// Norm level above which a collapsing step size is read as blow-up.
    ///
    /// The discriminating signal is the step collapse, not the level: a
    /// large-but-global solution keeps healthy steps under relative error
    /// control at any norm, while an algebraic singularity drives the step
    /// toward the floor. The level mostly guards against misreading a
    /// merely stiff spot. It cannot be set much above ~1e5: following a
    /// `(tb - t)^{-1/2}` profile further requires steps below the f64
    /// resolution of `t` itself.
    pub blowup_threshold: f64,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        IntegrateOpts {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 5_000_000,
            sample_times: None,
            blowup_threshold: 1e4,
        }
    }
}

impl IntegrateOpts {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        IntegrateOpts {
            rtol,
            atol,
            ..IntegrateOpts::default()
        }
    }

    pub fn sampled_at(mut self, times: Vec<f64>) -> Self {
        self.sample_times = Some(times);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tolerances",
                reason: format!("rtol and atol must be positive (rtol={}, atol={})", self.rtol, self.atol),
            });
        }
        if let Some(times) = &self.sample_times {
            if !times.windows(2).all(|w| w[0] <= w[1]) {
                return Err(Error::InvalidParameter {
                    name: "sample_times",
                    reason: "requested sample times must be sorted".into(),
                });
            }
            if times.first().is_some_and(|t| *t < 0.0) {
                return Err(Error::InvalidParameter {
                    name: "sample_times",
                    reason: "requested sample times must be nonnegative".into(),
                });
            }
        }
        Ok(())
    }
}

/// How an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// Finite-time escape; `tb_estimate` extrapolates the escape time from
    /// the last accepted steps.
    BlowUp { tb_estimate: f64 },
    StepFailure { t: f64, reason: String },
}

impl std::fmt::Display for TrajectoryStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrajectoryStatus::Completed => write!(f, "Completed"),
            TrajectoryStatus::BlowUp { tb_estimate } => {
                write!(f, "BlowUp(tb_estimate={tb_estimate})")
            }
            TrajectoryStatus::StepFailure { t, reason } => {
                write!(f, "StepFailure(t={t}, {reason})")
            }
        }
    }
}

/// What the trajectory samples represent, which decides how bound checks
/// read it: systems by norm, scalar comparison solutions by signed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Comparison,
    System,
}

/// An integrated solution: sample times, states, Euclidean norms, and the
/// termination status.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub norms: Vec<f64>,
    pub status: TrajectoryStatus,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }

    /// The state at the sample closest to `t` (samples are sorted).
    pub fn state_at_closest(&self, t: f64) -> Option<(f64, &DVector<f64>)> {
        if self.times.is_empty() {
            return None;
        }
        let i = match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.times.len() => i - 1,
            Err(i) => {
                if (self.times[i] - t).abs() < (t - self.times[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        Some((self.times[i], &self.states[i]))
    }

    /// CSV with columns `t,u1..un,norm` and the status in a trailing
    /// comment line.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.states.first().map_or(0, |s| s.len());
        write!(w, "t")?;
        for i in 1..=dim {
            write!(w, ",u{i}")?;
        }
        writeln!(w, ",norm")?;
        for ((t, state), norm) in self.times.iter().zip(&self.states).zip(&self.norms) {
            write!(w, "{t}")?;
            for v in state.iter() {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{norm}")?;
        }
        writeln!(w, "# status: {}", self.status)?;
        Ok(())
    }
}

/// Time-dependent matrix coefficient.
pub type MatrixFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;
/// State-dependent vector field.
pub type VectorFieldFn = Arc<dyn Fn(f64, &DVector<f64>) -> DVector<f64> + Send + Sync>;
/// Time-dependent forcing vector.
pub type ForcingFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// The evolution system `u' = A(t) u + F(t, u) + b(t)`, `u(0) = u0`, on R^n.
#[derive(Clone)]
pub struct EvolutionSystem {
    pub dim: usize,
    pub a: MatrixFn,
    pub f: VectorFieldFn,
    pub b: ForcingFn,
    pub u0: DVector<f64>,
    /// Declared dissipativity rate: `<A(t)u, u> <= -gamma(t) |u|^2`.
    /// Checked by sampling, not assumed.
    pub declared_gamma: Option<TimeFunction>,
}

impl std::fmt::Debug for EvolutionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolutionSystem")
            .field("dim", &self.dim)
            .field("u0", &self.u0)
            .field("declared_gamma", &self.declared_gamma)
            .finish_non_exhaustive()
    }
}

impl EvolutionSystem {
    pub fn new<Fa, Ff, Fb>(dim: usize, a: Fa, f: Ff, b: Fb, u0: DVector<f64>) -> Result<Self>
    where
        Fa: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
        Ff: Fn(f64, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        Fb: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "state dimension must be at least 1".into(),
            });
        }
        if u0.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "u0",
                expected: dim,
                got: u0.len(),
            });
        }
        let a0 = a(0.0);
        if a0.nrows() != dim || a0.ncols() != dim {
            return Err(Error::DimensionMismatch {
                what: "A(t)",
                expected: dim,
                got: a0.nrows().max(a0.ncols()),
            });
        }
        Ok(EvolutionSystem {
            dim,
            a: Arc::new(a),
            f: Arc::new(f),
            b: Arc::new(b),
            u0,
            declared_gamma: None,
        })
    }

    /// Constant-coefficient linear part, no nonlinearity, no forcing.
    pub fn linear(a: DMatrix<f64>, u0: DVector<f64>) -> Result<Self> {
        let dim = u0.len();
        let zero_f = move |_: f64, u: &DVector<f64>| DVector::zeros(u.len());
        let zero_b = move |_: f64| DVector::zeros(dim);
        Self::new(dim, move |_| a.clone(), zero_f, zero_b, u0)
    }

    pub fn with_declared_gamma(mut self, gamma: TimeFunction) -> Self {
        self.declared_gamma = Some(gamma);
        self
    }

    fn rhs(&self, t: f64, u: &DVector<f64>) -> DVector<f64> {
        let mut du = (self.a)(t) * u;
        du += (self.f)(t, u);
        du += (self.b)(t);
        du
    }

    /// Samples the declared dissipativity condition at `samples` random
    /// `(t, unit vector)` pairs and reports the worst residual
    /// `<A(t)u, u> + gamma(t)` (nonpositive when the declaration holds).
    pub fn sample_dissipativity(
        &self,
        horizon: f64,
        samples: usize,
        seed: u64,
    ) -> Result<DissipativityCheck> {
        let gamma = self.declared_gamma.as_ref().ok_or(Error::InvalidParameter {
            name: "declared_gamma",
            reason: "no dissipativity rate declared on this system".into(),
        })?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut draws = Vec::with_capacity(samples);
        for _ in 0..samples {
            let t = rng.gen_range(0.0..=horizon);
            let mut u = DVector::from_fn(self.dim, |_, _| {
                // Box-Muller standard normals give a rotation-invariant
                // direction after normalization.
                let a: f64 = rng.gen_range(f64::EPSILON..1.0);
                let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * a.ln()).sqrt() * b.cos()
            });
            if u.norm() < 1e-12 {
                u = DVector::from_element(self.dim, 1.0);
            }
            u /= u.norm();
            draws.push((t, u));
        }
        let residuals = par::try_map_range(draws.len(), |i| {
            let (t, u) = &draws[i];
            let quad = u.dot(&((self.a)(*t) * u));
            Ok::<f64, Error>(quad + gamma.eval(*t)?)
        })?;
        let (worst_index, max_residual) = residuals
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        Ok(DissipativityCheck {
            samples,
            max_residual,
            worst_t: draws[worst_index].0,
        })
    }
}

/// Result of sampling a declared dissipativity rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipativityCheck {
    pub samples: usize,
    /// Worst sampled `<A(t)u, u> + gamma(t)` over unit vectors `u`.
    pub max_residual: f64,
    pub worst_t: f64,
}

impl DissipativityCheck {
    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// Integrates the evolution system over `[0, horizon]`.
pub fn integrate_system(
    system: &EvolutionSystem,
    horizon: f64,
    opts: &IntegrateOpts,
) -> Result<Trajectory> {
    if !(horizon > 0.0) {
        return Err(Error::NonPositive {
            name: "horizon",
            value: horizon,
        });
    }
    opts.validate()?;
    Ok(dopri::integrate(
        |t, u| system.rhs(t, u),
        0.0,
        horizon,
        &system.u0,
        opts,
        TrajectoryKind::System,
    ))
}

pub(crate) fn integrate_raw<F>(
    rhs: F,
    t0: f64,
    t_end: f64,
    y0: &DVector<f64>,
    opts: &IntegrateOpts,
    kind: TrajectoryKind,
) -> Trajectory
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    dopri::integrate(rhs, t0, t_end, y0, opts, kind)
}

/// Guaranteed local existence interval length for a continuous right-hand
/// side bounded by `bound` on the tube of radius `radius`: `min(horizon,
/// radius/bound)`.
pub fn peano_interval(horizon: f64, radius: f64, bound: f64) -> Result<f64> {
    for (name, v) in [("horizon", horizon), ("radius", radius), ("bound", bound)] {
        if !(v > 0.0) {
            return Err(Error::NonPositive { name, value: v });
        }
    }
    Ok(horizon.min(radius / bound))
}

/// Local existence-and-uniqueness interval length under a bound `m` and a
/// Lipschitz constant `l` on the ball of radius `r`: `min(r/m, l)`.
pub fn lipschitz_interval(r: f64, m: f64, l: f64) -> Result<f64> {
    for (name, v) in [("r", r), ("m", m), ("l", l)] {
        if !(v > 0.0) {
            return Err(Error::NonPositive { name, value: v });
        }
    }
    Ok((r / m).min(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_trajectory() {
        let sys = EvolutionSystem::new(
            2,
            |_| DMatrix::zeros(2, 2),
            |_, u| DVector::zeros(u.len()),
            |_| DVector::zeros(2),
            DVector::from_vec(vec![3.0, 4.0]),
        )
        .unwrap();
        let traj = integrate_system(&sys, 10.0, &IntegrateOpts::default()).unwrap();
        assert!(traj.is_completed());
        for n in &traj.norms {
            assert_relative_eq!(*n, 5.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn linear_decay_matches_exponential() {
        let sys = EvolutionSystem::linear(
            DMatrix::from_row_slice(1, 1, &[-1.0]),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        let opts = IntegrateOpts::default().sampled_at(vec![0.0, 0.5, 1.0]);
        let traj = integrate_system(&sys, 1.0, &opts).unwrap();
        assert!(traj.is_completed());
        assert_eq!(traj.times, vec![0.0, 0.5, 1.0]);
        let got = traj.states[2][0];
        assert_relative_eq!(got, (-1.0f64).exp(), max_relative = 1e-8);
    }

    #[test]
    fn norm_crossing_zero_stays_continuous() {
        // u' = b constant with u0 = -b: crosses the origin at t = 1.
        let sys = EvolutionSystem::new(
            1,
            |_| DMatrix::zeros(1, 1),
            |_, u| DVector::zeros(u.len()),
            |_| DVector::from_vec(vec![1.0]),
            DVector::from_vec(vec![-1.0]),
        )
        .unwrap();
        let opts = IntegrateOpts::default()
            .sampled_at((0..=200).map(|i| i as f64 / 100.0).collect());
        let traj = integrate_system(&sys, 2.0, &opts).unwrap();
        assert!(traj.is_completed());
        assert!(traj.norms.iter().all(|n| *n >= 0.0));
        // continuity: successive norms differ by at most |u'| * dt + slack
        for w in traj.norms.windows(2) {
            assert!((w[1] - w[0]).abs() <= 0.0101);
        }
        let (t, u) = traj.state_at_closest(1.0).unwrap();
        assert_relative_eq!(t, 1.0);
        assert!(u[0].abs() < 1e-9);
    }

    #[test]
    fn large_but_global_solution_is_not_blowup() {
        // u' = u reaches 1e8 near t = 18.4 but has no finite-time escape.
        let sys = EvolutionSystem::linear(
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        let traj = integrate_system(&sys, 21.0, &IntegrateOpts::default()).unwrap();
        assert!(traj.is_completed(), "status = {}", traj.status);
        assert!(*traj.norms.last().unwrap() > 1e8);
    }

    #[test]
    fn dissipativity_sampling_damped_rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 5.0, -5.0, -1.0]);
        let sys = EvolutionSystem::linear(a, DVector::from_vec(vec![0.3, 0.0]))
            .unwrap()
            .with_declared_gamma(TimeFunction::Constant(1.0));
        let check = sys.sample_dissipativity(30.0, 1000, 42).unwrap();
        assert!(check.pass(1e-9), "max residual {}", check.max_residual);

        // An over-claimed rate fails.
        let sys_bad = EvolutionSystem::linear(
            DMatrix::from_row_slice(2, 2, &[-1.0, 5.0, -5.0, -1.0]),
            DVector::from_vec(vec![0.3, 0.0]),
        )
        .unwrap()
        .with_declared_gamma(TimeFunction::Constant(1.5));
        let check = sys_bad.sample_dissipativity(30.0, 1000, 42).unwrap();
        assert!(!check.pass(1e-9));
    }

    #[test]
    fn local_existence_formulas() {
        assert_relative_eq!(peano_interval(10.0, 1.0, 4.0).unwrap(), 0.25);
        assert_relative_eq!(peano_interval(0.1, 1.0, 4.0).unwrap(), 0.1);
        assert_relative_eq!(peano_interval(10.0, 2.0, 1.0).unwrap(), 2.0);
        assert!(peano_interval(0.0, 1.0, 1.0).is_err());

        assert_relative_eq!(lipschitz_interval(1.0, 2.0, 3.0).unwrap(), 0.5);
        assert_relative_eq!(lipschitz_interval(2.0, 2.0, 0.3).unwrap(), 0.3);
        assert_relative_eq!(lipschitz_interval(4.0, 1.0, 0.1).unwrap(), 0.1);
        assert!(lipschitz_interval(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn trajectory_csv_has_status_line() {
        let sys = EvolutionSystem::linear(
            DMatrix::from_row_slice(1, 1, &[-1.0]),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        let traj = integrate_system(&sys, 1.0, &IntegrateOpts::default()).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,u1,norm\n"));
        assert!(text.trim_end().ends_with("# status: Completed"));
    }
}
