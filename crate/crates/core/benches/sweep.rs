use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kproper::alpha::{alpha_oracle_with, GroupMode, SymmetryContext};
use kproper::exact::Rational;
use kproper::properness::{sweep_lambda, ParametricFamily, SweepConfig};
use kproper::toric::{Fan, ToricDivisor};

fn sweep(c: &mut Criterion) {
    let family = ParametricFamily::dp6();
    let cfg = SweepConfig { refine_tol: Rational::new(1, 10_000), ..SweepConfig::dp6() };
    let mut g = c.benchmark_group("dp6_sweep");
    g.sample_size(10);
    for parallel in [false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        g.bench_with_input(BenchmarkId::from_parameter(label), &parallel, |b, &p| {
            b.iter(|| sweep_lambda(&family, black_box(&cfg), p).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let fan = Arc::new(Fan::dp6());
    let (one, l) = (Rational::one(), Rational::new(3, 2));
    let coeffs = vec![one.clone(), l.clone(), one.clone(), l.clone(), one, l];
    let ctx = SymmetryContext::new(ToricDivisor::new(fan, coeffs).unwrap(), GroupMode::Torus).unwrap();
    let mut g = c.benchmark_group("alpha_oracle");
    g.sample_size(10);
    for parallel in [false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        g.bench_with_input(BenchmarkId::from_parameter(label), &parallel, |b, &p| {
            b.iter(|| alpha_oracle_with(&ctx, black_box(10), p).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, oracle);
criterion_main!(benches);
