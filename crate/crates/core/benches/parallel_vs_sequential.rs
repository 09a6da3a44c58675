//! Data-parallel vs. sequential batch evaluation on two representative
//! verification workloads: a cheap per-sample identity residual and the
//! eigendecomposition-heavy duality roundtrip.
//!
//! Run with `cargo bench -p dualpair-core`; the `batch::max_residual` path
//! uses rayon only when the default `parallel` feature is enabled, so
//! benching with `--no-default-features` collapses both groups onto the
//! sequential implementation.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dualpair_core::batch;
use dualpair_core::duality::{dual_invert, dual_transform};
use dualpair_core::phase::{Coupling, SutherlandPoint};
use dualpair_core::reduction::eval_v;
use dualpair_core::verify::sample_suite_inputs;

fn identity_residual(phat: &[f64], c: &Coupling) -> f64 {
    let v = eval_v(phat, c).expect("interior point");
    let mut worst = 0.0_f64;
    for b in 0..c.n {
        let s: f64 = (0..c.n)
            .map(|a| c.x / (phat[b] - phat[a] + c.x) * v[a] * v[a])
            .sum();
        worst = worst.max((s - 1.0).abs());
    }
    worst
}

fn roundtrip_residual(pt: &SutherlandPoint, c: &Coupling) -> f64 {
    dual_transform(pt, c)
        .and_then(|z| dual_invert(&z, c))
        .map(|back| {
            pt.q
                .iter()
                .zip(back.q.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::INFINITY)
}

fn bench_batches(criterion: &mut Criterion) {
    let c = Coupling::new(5, 1.0).expect("valid coupling");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (chamber_points, position_points) = sample_suite_inputs(&mut rng, &c, 4000, 400);

    let mut group = criterion.benchmark_group("identity-residuals");
    group.bench_with_input(
        BenchmarkId::new("batch", chamber_points.len()),
        &chamber_points,
        |bench, pts| bench.iter(|| batch::max_residual(pts, |p| identity_residual(p, &c))),
    );
    group.bench_with_input(
        BenchmarkId::new("sequential", chamber_points.len()),
        &chamber_points,
        |bench, pts| {
            bench.iter(|| batch::max_residual_sequential(pts, |p| identity_residual(p, &c)))
        },
    );
    group.finish();

    let mut group = criterion.benchmark_group("duality-roundtrips");
    group.sample_size(20);
    group.bench_with_input(
        BenchmarkId::new("batch", position_points.len()),
        &position_points,
        |bench, pts| bench.iter(|| batch::max_residual(pts, |p| roundtrip_residual(p, &c))),
    );
    group.bench_with_input(
        BenchmarkId::new("sequential", position_points.len()),
        &position_points,
        |bench, pts| {
            bench.iter(|| batch::max_residual_sequential(pts, |p| roundtrip_residual(p, &c)))
        },
    );
    group.finish();
}

criterion_group!(benches, bench_batches);
criterion_main!(benches);
