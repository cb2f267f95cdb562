use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hyperell::bounds::{DegreePolicy, Instance};
use hyperell::fq::{collect_hd, FieldSpec};
use hyperell::par::{self, Exec};
use hyperell::scan::{ensemble_scan, ScanConfig};
use hyperell::symbol::Character;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn enumeration(c: &mut Criterion) {
    let f = FieldSpec::new(3).unwrap();
    let mut g = c.benchmark_group("collect_hd_q3_d9");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| collect_hd(f, 9, exec).unwrap().len())
        });
    }
    g.finish();
}

fn zeros(c: &mut Criterion) {
    let f = FieldSpec::new(3).unwrap();
    let polys = collect_hd(f, 7, Exec::Sequential).unwrap();
    let mut g = c.benchmark_group("lpoly_zeros_q3_d7");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::map(exec, &polys, |d| {
                    Instance::new(&Character::new(d.clone()).unwrap(), 4).unwrap().zeros.len()
                })
                .into_iter()
                .sum::<usize>()
            })
        });
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let mut cfg = ScanConfig::new(3, 5);
    cfg.policies = vec![DegreePolicy::Formula, DegreePolicy::Exhaustive { cap: 8 }];
    // warm the shared extremal cache outside the timed region
    ensemble_scan(&cfg).unwrap();
    let mut g = c.benchmark_group("scan_q3_d5");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = ScanConfig { exec, ..cfg.clone() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ensemble_scan(&cfg).unwrap().rows.len())
        });
    }
    g.finish();
}

criterion_group!(benches, enumeration, zeros, scan);
criterion_main!(benches);
