//! Parallel-vs-sequential throughput on the data-parallel kernels.
//!
//! The parallel entries go through the public API, which fans out on rayon
//! when the `parallel` feature (default) is on. The sequential entries run
//! the same per-element kernel through a plain loop, so the comparison
//! isolates the fan-out cost/benefit. With `--no-default-features` both
//! entries are sequential and should coincide.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use majorant::*;
use nalgebra::DVector;

fn forced_fixture() -> (InequalityProblem, Majorant) {
    let problem = InequalityProblem::new(
        TimeFunction::PowerDecay { c: 3.0, q: 0.5 },
        Nonlinearity::power_law(1.0, 2.0).unwrap(),
        TimeFunction::PowerDecay { c: 1.0, q: 1.5 },
        0.5,
        100.0,
    )
    .unwrap();
    let mu = Majorant::power(1.0, 0.5).unwrap();
    (problem, mu)
}

fn bench_slack_profile(c: &mut Criterion) {
    let (problem, mu) = forced_fixture();
    let mut group = c.benchmark_group("slack_profile");
    for points in [20_000usize, 200_000] {
        let grid = GridSpec::uniform(points).build(problem.horizon).unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", points), &grid, |b, grid| {
            b.iter(|| slack_profile(black_box(&problem), black_box(&mu), grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", points), &grid, |b, grid| {
            b.iter(|| {
                par::map_range_seq(grid.len(), |i| {
                    slack_at(black_box(&problem), black_box(&mu), grid[i]).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn discrete_fixture(n: usize) -> (DiscreteProblem, DiscreteCertificate) {
    let h = 0.01;
    let problem = DiscreteProblem::new(
        vec![h; n],
        vec![1.0; n],
        vec![0.0; n],
        Nonlinearity::power_law(1.0, 2.0).unwrap(),
        0.4,
    )
    .unwrap();
    // Total certificate growth e^10 regardless of n, so mu stays finite.
    let step_growth = 1.0 + 10.0 / n as f64;
    let mut mu = vec![2.5];
    for i in 0..n {
        mu.push(mu[i] * step_growth);
    }
    (problem, DiscreteCertificate::new(mu).unwrap())
}

fn bench_discrete_slack(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrete_slack");
    for n in [20_000usize, 200_000] {
        let (problem, cert) = discrete_fixture(n);
        group.bench_function(BenchmarkId::new("parallel", n), |b| {
            b.iter(|| slack_sequence(black_box(&problem), black_box(&cert)).unwrap())
        });
        group.bench_function(BenchmarkId::new("sequential", n), |b| {
            let times: Vec<f64> = problem.times();
            b.iter(|| {
                par::map_range_seq(problem.steps(), |i| {
                    let mu_n = cert.mu()[i];
                    let inv = 1.0 / mu_n;
                    inv * (problem.gamma()[i]
                        - (cert.mu()[i + 1] - mu_n) / (problem.h()[i] * mu_n))
                        - problem.alpha().eval(times[i], inv)
                        - problem.beta()[i]
                })
            })
        });
    }
    group.finish();
}

fn bench_bound_check(c: &mut Criterion) {
    let n = 500_000usize;
    let times: Vec<f64> = (0..n).map(|i| 100.0 * i as f64 / (n - 1) as f64).collect();
    let states: Vec<DVector<f64>> = times
        .iter()
        .map(|t| DVector::from_vec(vec![0.4 / (1.0 + t)]))
        .collect();
    let norms: Vec<f64> = states.iter().map(|s| s.norm()).collect();
    let trajectory = Trajectory {
        kind: TrajectoryKind::Comparison,
        times,
        states,
        norms,
        status: TrajectoryStatus::Completed,
        steps_accepted: n,
        steps_rejected: 0,
    };
    let mu = Majorant::power(1.0, 1.0).unwrap();

    let mut group = c.benchmark_group("bound_check");
    group.bench_function("parallel", |b| {
        b.iter(|| check_trajectory_bound(black_box(&trajectory), black_box(&mu), 1e-9).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let mut max_violation = f64::NEG_INFINITY;
            for (t, s) in trajectory.times.iter().zip(trajectory.states.iter()) {
                let v = s[0] - bound_at(black_box(&mu), *t).unwrap();
                max_violation = max_violation.max(v);
            }
            max_violation
        })
    });
    group.finish();
}

fn config() -> Criterion {
    Criterion::default().sample_size(10)
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_slack_profile, bench_discrete_slack, bench_bound_check
}
criterion_main!(benches);
