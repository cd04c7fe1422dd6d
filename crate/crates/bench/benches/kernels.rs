use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gle_bench::{distinct_limit, staircase, staircase_spec};
use gle_core::exact::{count_avoid_lgv, fixed_time_pmf};
use gle_core::limit::{normalizing_constant_closed_form, LimitDensity};
use gle_core::sampling::{GlauberChain, SequentialSampler};
use gle_core::RngHandle;

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("lgv_count");
    for &(k, t) in &[(2usize, 100i64), (4, 100), (4, 400)] {
        let (x, y) = staircase(k, t);
        g.bench_with_input(BenchmarkId::from_parameter(format!("k{k}_T{t}")), &(x, y), |b, (x, y)| {
            b.iter(|| count_avoid_lgv(black_box(x), black_box(y), t))
        });
    }
    g.finish();
    let (x, y) = staircase(2, 40);
    c.bench_function("fixed_time_pmf_k2_T40", |b| {
        b.iter(|| fixed_time_pmf(black_box(&x), black_box(&y), 40, 20).unwrap())
    });
}

fn samplers(c: &mut Criterion) {
    let mut g = c.benchmark_group("sequential_column");
    for &(k, t) in &[(1usize, 400i64), (2, 400), (3, 200)] {
        let (x, y) = staircase(k, t);
        let mut sampler = SequentialSampler::new(x, y, t).unwrap();
        let mut rng = RngHandle::new(1, 0).rng();
        // warm the transition cache so the steady-state cost is measured
        for _ in 0..2000 {
            sampler.sample_column(&mut rng, t / 2);
        }
        g.bench_function(BenchmarkId::from_parameter(format!("k{k}_T{t}")), |b| {
            b.iter(|| sampler.sample_column(&mut rng, t / 2))
        });
    }
    g.finish();

    let mut chain = GlauberChain::new(staircase_spec(3, 60), None).unwrap();
    let mut rng = RngHandle::new(2, 0).rng();
    c.bench_function("glauber_10k_moves_k3_T60", |b| b.iter(|| chain.run(&mut rng, 10_000)));
}

fn density(c: &mut Criterion) {
    for k in [2usize, 3] {
        let spec = distinct_limit(k);
        c.bench_function(&format!("zc_closed_form_k{k}"), |b| {
            b.iter(|| normalizing_constant_closed_form(black_box(&spec)).unwrap())
        });
        let d = LimitDensity::new(spec).unwrap();
        let z: Vec<f64> = (0..k).map(|i| 0.6 - 0.5 * i as f64).collect();
        c.bench_function(&format!("rho_eval_k{k}"), |b| b.iter(|| d.rho(black_box(&z))));
    }
}

criterion_group!(benches, exact, samplers, density);
criterion_main!(benches);
