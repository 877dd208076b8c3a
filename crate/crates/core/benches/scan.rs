use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sp4_higgs::exec::{self, Mode};
use sp4_higgs::liegroup::{random_sl2, rho13};
use sp4_higgs::matalg::{is_symplectic, j13};
use sp4_higgs::moduli::{f2_image_scan, ScanMode};

const MODES: [(&str, Mode); 2] = [("parallel", Mode::Auto), ("sequential", Mode::Sequential)];

fn f2_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("f2_scan");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "g3-exhaustive"), &mode, |b, &m| {
            b.iter(|| f2_image_scan(black_box(3), ScanMode::Exhaustive, m).unwrap())
        });
        let sampled = ScanMode::Sampled {
            samples: 200_000,
            seed: 1,
        };
        group.bench_with_input(BenchmarkId::new(name, "g4-sampled"), &mode, |b, &m| {
            b.iter(|| f2_image_scan(black_box(4), sampled, m).unwrap())
        });
    }
    group.finish();
}

fn symplectic_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gs: Vec<_> = (0..64).map(|_| random_sl2(&mut rng, 1000)).collect();
    let form = j13();
    let mut group = c.benchmark_group("rho13_symplectic");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| exec::all(mode, &gs, |g| is_symplectic(&rho13(g), &form)))
        });
    }
    group.finish();
}

criterion_group!(benches, f2_scan, symplectic_batch);
criterion_main!(benches);
