use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fieldprobe::lift::all_points_with;
use fieldprobe::mpoly::{random_dense, Homogeneity, PolySystem};
use fieldprobe::par::Execution;
use fieldprobe::scan::{find_k, run_scan, MembershipPredicate, SampleConfig, ScanOptions, SearchConfig};
use fieldprobe::PrimeField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, usize); 2] = [("sequential", 1), ("parallel", 0)];

fn product_system() -> PolySystem {
    let field = PrimeField::new(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_dense(2, 6, field, Homogeneity::Inhomogeneous, &mut rng);
    let g = random_dense(6, 6, field, Homogeneity::Inhomogeneous, &mut rng);
    let h = random_dense(7, 6, field, Homogeneity::Inhomogeneous, &mut rng);
    PolySystem::new(6, vec![&f * &g, &f * &h]).unwrap()
}

fn tangent_scan(c: &mut Criterion) {
    let pred = MembershipPredicate::Vanishing(product_system());
    let mut group = c.benchmark_group("tangent_scan_700");
    group.sample_size(10);
    for (name, workers) in MODES {
        let cfg = SampleConfig::new(7, 700, 1).unwrap().with_workers(workers);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| run_scan(black_box(&pred), cfg, ScanOptions { ranks: true, values: false }).unwrap())
        });
    }
    group.finish();
}

fn quadric_search(c: &mut Criterion) {
    let pred = MembershipPredicate::quadric_rank_at_most(2);
    let mut group = c.benchmark_group("find_k_quadric_rank2_p7");
    group.sample_size(10);
    for (name, workers) in MODES {
        let cfg = SearchConfig::new(7, 20, 3).with_workers(workers);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| find_k(black_box(&pred), cfg).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let sys = PolySystem::parse(&["x^2 + y^2 + z^2 - 1", "x*y*z - 2"], &names).unwrap();
    let mut group = c.benchmark_group("all_points_p101_n3");
    group.sample_size(10);
    for (name, workers) in MODES {
        let exec = Execution::from_workers(workers);
        group.bench_function(name, |b| {
            b.iter(|| all_points_with(black_box(&sys), 101, 10_000_000, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, tangent_scan, quadric_search, enumeration);
criterion_main!(benches);
