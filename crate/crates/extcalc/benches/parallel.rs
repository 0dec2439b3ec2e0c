//! Sequential vs rayon-parallel timings for the data-parallel cores:
//! per-degree kernel computation in a resolution step, May vanishing
//! scans, the d1 coherence sweep, and the chart upper-bound check.
//!
//! Run with `cargo bench -p extcalc`. With `--no-default-features` the
//! parallel mode degrades to sequential and the pairs should coincide.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use extcalc::amodules::sphere_module;
use extcalc::exec::ExecMode;
use extcalc::may::{d1, d1_sum, monomials_up_to_t, upper_bound_check, vanishing_scan, MayContext};
use extcalc::milnor::Algebra;
use extcalc::resolution::minimal_resolve_with;

const MODES: [(&str, ExecMode); 2] = [
    ("sequential", ExecMode::Sequential),
    ("parallel", ExecMode::Parallel),
];

fn bench_resolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolve_sphere_s3_t60");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let alg = Arc::new(Algebra::new(5));
                let sphere = Arc::new(sphere_module(&alg));
                minimal_resolve_with(alg, sphere, 3, 60, mode)
            })
        });
    }
    group.finish();
}

fn bench_may_scan(c: &mut Criterion) {
    let ctx = MayContext::new(5);
    let targets: Vec<(Option<i64>, i64)> = (3..=12)
        .map(|n| (Some(n), 5i64.pow(n as u32) * 8 + 56))
        .collect();
    let mut group = c.benchmark_group("may_scan_s5_n3_to_12");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| vanishing_scan(&ctx, 5, &targets, mode))
        });
    }
    group.finish();
}

fn bench_d1_sweep(c: &mut Criterion) {
    let ctx = MayContext::new(5);
    let monomials = monomials_up_to_t(&ctx, 250);
    let mut group = c.benchmark_group(format!("d1_squared_sweep_{}_monomials", monomials.len()));
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let bad: usize = extcalc::exec::map_slice(mode, &monomials, |m| {
                    usize::from(!d1_sum(&ctx, &d1(&ctx, m)).is_empty())
                })
                .into_iter()
                .sum();
                assert_eq!(bad, 0);
            })
        });
    }
    group.finish();
}

fn bench_upper_bound(c: &mut Criterion) {
    let alg = Arc::new(Algebra::new(5));
    let sphere = Arc::new(sphere_module(&alg));
    let chart = minimal_resolve_with(alg, sphere, 2, 120, ExecMode::Sequential).ext_chart();
    let ctx = MayContext::new(5);
    let mut group = c.benchmark_group("upper_bound_check_s2_t120");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let report = upper_bound_check(&ctx, &chart, mode);
                assert!(report.passed());
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_resolution,
    bench_may_scan,
    bench_d1_sweep,
    bench_upper_bound
);
criterion_main!(benches);
