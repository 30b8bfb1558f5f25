use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use rngforge_core::pcg::{build_pcg_rtl, PcgConfig, PcgGolden};
use rngforge_core::sim::Simulation;
use rngforge_core::wishbone::build_rng_with_wishbone;

fn golden_model(c: &mut Criterion) {
    let mut group = c.benchmark_group("golden");
    for n in [100_000u64, 1_000_000] {
        group.throughput(Throughput::Elements(n));
        group.bench_with_input(BenchmarkId::new("words", n), &n, |b, &n| {
            b.iter(|| {
                let mut gen = PcgGolden::new(PcgConfig::with_seed(42));
                let mut acc = 0u32;
                for _ in 0..n {
                    acc = acc.wrapping_add(gen.next_word());
                }
                acc
            });
        });
    }
    group.finish();
}

fn rtl_simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("sim");
    group.sample_size(10);

    let cfg = PcgConfig::with_seed(42);
    let (datapath, dh) = build_pcg_rtl(&cfg).unwrap();
    group.throughput(Throughput::Elements(100_000));
    group.bench_function("datapath_100k_cycles", |b| {
        b.iter(|| {
            let mut sim = Simulation::new(&datapath).unwrap();
            let mut acc = 0u64;
            for _ in 0..100_000 {
                sim.settle();
                acc = acc.wrapping_add(sim.value(dh.output));
                sim.step_clock();
            }
            acc
        });
    });

    let (peripheral, wh) = build_rng_with_wishbone(&cfg).unwrap();
    group.bench_function("peripheral_100k_cycles", |b| {
        b.iter(|| {
            let mut sim = Simulation::new(&peripheral).unwrap();
            let mut acc = 0u64;
            for _ in 0..100_000 {
                sim.settle();
                acc = acc.wrapping_add(sim.value(wh.output));
                sim.step_clock();
            }
            acc
        });
    });
    group.finish();
}

criterion_group!(benches, golden_model, rtl_simulation);
criterion_main!(benches);
