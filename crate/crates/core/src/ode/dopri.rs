//! Embedded Dormand–Prince 5(4) step with PI step-size control.
//!
//! The propagated solution is 5th order; the embedded 4th-order solution
//! drives the error estimate. The first stage is reused from the last stage
//! of the previous step (FSAL). Dense output between accepted steps is cubic
//! Hermite on the stored endpoint derivatives.
//!
//! Finite-time escape is detected conjunctively: the norm must exceed the
//! blow-up threshold *and* the controller must have collapsed the step below
//! 1000x the step floor. A norm threshold alone cannot distinguish a genuine
//! finite-time singularity from a large but global solution; the step
//! collapse is the singularity signature.

use nalgebra::DVector;

use super::{IntegrateOpts, Trajectory, TrajectoryKind, TrajectoryStatus};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

#[rustfmt::skip]
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    // Row of the 5th-order solution weights; stage 7 is evaluated there (FSAL).
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 10.0;
/// PI controller exponents (Lund stabilization).
const PI_EXPO: f64 = 0.17;
const PI_BETA: f64 = 0.04;
/// Step floor as a fraction of the integration span.
const STEP_FLOOR_FACTOR: f64 = 1e-12;
/// Step collapse factor for the blow-up signature.
const BLOWUP_STEP_FACTOR: f64 = 1e3;

pub(crate) fn integrate<F>(
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
    let span = t_end - t0;
    let hmin = STEP_FLOOR_FACTOR * span;
    let dim = y0.len();

    let mut times = Vec::new();
    let mut states = Vec::new();
    let push_sample = |t: f64, y: &DVector<f64>, times: &mut Vec<f64>, states: &mut Vec<DVector<f64>>| {
        times.push(t);
        states.push(y.clone());
    };

    // Requested output times, already validated sorted and within range.
    let sample_times = opts.sample_times.clone();
    let mut next_sample = 0usize;

    let mut t = t0;
    let mut y = y0.clone();

    match &sample_times {
        None => push_sample(t, &y, &mut times, &mut states),
        Some(req) => {
            while next_sample < req.len() && req[next_sample] <= t0 {
                push_sample(req[next_sample], &y, &mut times, &mut states);
                next_sample += 1;
            }
        }
    }

    let mut k: Vec<DVector<f64>> = (0..7).map(|_| DVector::zeros(dim)).collect();
    k[0] = rhs(t, &y);

    let mut h = initial_step(&rhs, t, t_end, &y, &k[0], opts);
    let mut err_old: f64 = 1e-4;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    // Last accepted (t, norm) pairs for blow-up time extrapolation.
    let mut history: Vec<(f64, f64)> = vec![(t, y.norm())];

    let status = loop {
        if t >= t_end {
            break TrajectoryStatus::Completed;
        }
        if accepted + rejected >= opts.max_steps {
            break TrajectoryStatus::StepFailure {
                t,
                reason: "maximum step count exceeded".into(),
            };
        }
        if h < hmin {
            break if y.norm() > opts.blowup_threshold {
                TrajectoryStatus::BlowUp {
                    tb_estimate: extrapolate_blowup_time(&history),
                }
            } else {
                TrajectoryStatus::StepFailure {
                    t,
                    reason: "step size underflow".into(),
                }
            };
        }
        let h_step = h.min(t_end - t);

        // Stages 2..6 plus the solution stage.
        let mut y_new = DVector::zeros(dim);
        for i in 1..7 {
            let mut stage = y.clone();
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = A[i][j];
                if a != 0.0 {
                    stage.axpy(h_step * a, kj, 1.0);
                }
            }
            if i == 6 {
                y_new = stage.clone();
            }
            k[i] = rhs(t + C[i] * h_step, &stage);
        }

        let err = error_norm(&y, &y_new, &k, h_step, opts);

        if err <= 1.0 {
            accepted += 1;
            let t_new = if t_end - (t + h_step) < hmin {
                t_end
            } else {
                t + h_step
            };

            match &sample_times {
                None => push_sample(t_new, &y_new, &mut times, &mut states),
                Some(req) => {
                    let cushion = 1e-12 * span.abs().max(1.0);
                    while next_sample < req.len() && req[next_sample] <= t_new + cushion {
                        let s = req[next_sample].min(t_new);
                        let ys = hermite(t, &y, &k[0], t_new, &y_new, &k[6], s);
                        push_sample(s, &ys, &mut times, &mut states);
                        next_sample += 1;
                    }
                }
            }

            let norm_new = y_new.norm();
            history.push((t_new, norm_new));
            if history.len() > 3 {
                history.remove(0);
            }

            if norm_new > opts.blowup_threshold && h_step < BLOWUP_STEP_FACTOR * hmin {
                break TrajectoryStatus::BlowUp {
                    tb_estimate: extrapolate_blowup_time(&history),
                };
            }

            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            let k6 = k[6].clone();
            k[0] = k6;

            let scale = if err == 0.0 {
                MAX_SCALE
            } else {
                (SAFETY * err.powf(-PI_EXPO) * err_old.powf(PI_BETA))
                    .clamp(MIN_SCALE, MAX_SCALE)
            };
            err_old = err.max(1e-4);
            h = h_step * scale;
        } else {
            rejected += 1;
            let scale = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 1.0)
            } else {
                MIN_SCALE
            };
            h = h_step * scale;
        }
    };

    let norms = times
        .iter()
        .zip(states.iter())
        .map(|(_, s)| s.norm())
        .collect();

    Trajectory {
        kind,
        times,
        states,
        norms,
        status,
        steps_accepted: accepted,
        steps_rejected: rejected,
    }
}

/// Scaled RMS error of the embedded pair.
fn error_norm(
    y: &DVector<f64>,
    y_new: &DVector<f64>,
    k: &[DVector<f64>],
    h: f64,
    opts: &IntegrateOpts,
) -> f64 {
    let n = y.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut e = 0.0;
        for (j, ej) in E.iter().enumerate() {
            e += ej * k[j][i];
        }
        e *= h;
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        let r = e / sc;
        acc += r * r;
    }
    let err = (acc / n as f64).sqrt();
    if err.is_nan() {
        f64::INFINITY
    } else {
        err
    }
}

/// Standard two-probe starting step size heuristic.
fn initial_step<F>(
    rhs: &F,
    t0: f64,
    t_end: f64,
    y0: &DVector<f64>,
    f0: &DVector<f64>,
    opts: &IntegrateOpts,
) -> f64
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let span = t_end - t0;
    let scaled_norm = |v: &DVector<f64>| {
        let mut acc = 0.0;
        for i in 0..v.len() {
            let sc = opts.atol + opts.rtol * y0[i].abs();
            let r = v[i] / sc;
            acc += r * r;
        }
        (acc / v.len() as f64).sqrt()
    };
    let d0 = scaled_norm(y0);
    let d1 = scaled_norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    }
    .min(span);

    let y1 = y0 + f0 * h0;
    let f1 = rhs(t0 + h0, &y1);
    let d2 = scaled_norm(&(&f1 - f0)) / h0;

    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Cubic Hermite interpolation within one accepted step.
fn hermite(
    t0: f64,
    y0: &DVector<f64>,
    f0: &DVector<f64>,
    t1: f64,
    y1: &DVector<f64>,
    f1: &DVector<f64>,
    s: f64,
) -> DVector<f64> {
    let h = t1 - t0;
    if h == 0.0 {
        return y1.clone();
    }
    let x = ((s - t0) / h).clamp(0.0, 1.0);
    let x2 = x * x;
    let x3 = x2 * x;
    let h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
    let h10 = x3 - 2.0 * x2 + x;
    let h01 = -2.0 * x3 + 3.0 * x2;
    let h11 = x3 - x2;
    y0 * h00 + f0 * (h10 * h) + y1 * h01 + f1 * (h11 * h)
}

/// Extrapolates the escape time from the last accepted `(t, norm)` pairs by
/// following `1/norm^2` to its zero crossing: linearly from the last two
/// points, refined by the quadratic through three when it is consistent.
/// Algebraic blow-up profiles `norm ~ (tb - t)^{-1/2}` make the linear fit
/// exact; `norm ~ (tb - t)^{-1}` profiles are captured by the quadratic.
fn extrapolate_blowup_time(history: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .map(|(t, n)| (*t, if n.is_finite() && *n > 0.0 { 1.0 / (n * n) } else { 0.0 }))
        .collect();
    let (t_last, y_last) = *pts.last().unwrap();

    let linear = if pts.len() >= 2 {
        let (t_prev, y_prev) = pts[pts.len() - 2];
        let dy = y_prev - y_last;
        if dy > 0.0 && t_last > t_prev {
            Some(t_last + y_last * (t_last - t_prev) / dy)
        } else {
            None
        }
    } else {
        None
    };

    let quadratic = if pts.len() >= 3 {
        quad_root_after(pts[pts.len() - 3], pts[pts.len() - 2], pts[pts.len() - 1])
    } else {
        None
    };

    match (quadratic, linear) {
        (Some(q), Some(l)) => {
            let excess = (l - t_last).max(0.0);
            if q >= t_last && q <= t_last + 2.0 * excess + 1e-12 {
                q
            } else {
                l
            }
        }
        (Some(q), None) if q >= t_last => q,
        (_, Some(l)) => l,
        _ => t_last,
    }
}

/// Smallest root `>= t3` of the quadratic through three points, if any.
fn quad_root_after(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64)) -> Option<f64> {
    let (t1, y1) = p1;
    let (t2, y2) = p2;
    let (t3, y3) = p3;
    // Newton divided differences around t3 for conditioning.
    let d12 = (y2 - y1) / (t2 - t1);
    let d23 = (y3 - y2) / (t3 - t2);
    let c2 = (d23 - d12) / (t3 - t1);
    let c1 = d23 + c2 * (t3 - t2);
    let c0 = y3;
    // p(t) = c0 + c1 (t - t3) + c2 (t - t3)^2
    let eps = 1e-30;
    if c2.abs() < eps {
        if c1 < 0.0 {
            return Some(t3 - c0 / c1);
        }
        return None;
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let r1 = t3 + (-c1 - sq) / (2.0 * c2);
    let r2 = t3 + (-c1 + sq) / (2.0 * c2);
    let mut best = None;
    for r in [r1, r2] {
        if r >= t3 - 1e-12 * t3.abs().max(1.0) {
            best = Some(match best {
                None => r,
                Some(b) => r.min(b),
            });
        }
    }
    best
}
