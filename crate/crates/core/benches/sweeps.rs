//! Parallel versus sequential sweep drivers on the same work lists.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use padestep::exec;
use padestep::metrics::L2Form;
use padestep::models::SdofCase;
use padestep::studies::{peae_point, sdof_error, Method, SDOF_STEPS_PER_PERIOD, SDOF_T_END};

fn sdof_ladder(c: &mut Criterion) {
    let case = SdofCase::table(5).unwrap();
    let jobs: Vec<(usize, f64)> = (1..=4)
        .flat_map(|m| SDOF_STEPS_PER_PERIOD.iter().map(move |&n| (m, case.period() / n as f64)))
        .collect();
    let work = |&(m, dt): &(usize, f64)| sdof_error(&case, Method::Pade(m), dt, SDOF_T_END, L2Form::Root).unwrap();
    let mut g = c.benchmark_group("sdof_ladder");
    g.bench_function(BenchmarkId::new("map", jobs.len()), |b| b.iter(|| exec::map(&jobs, work)));
    g.bench_function(BenchmarkId::new("map_seq", jobs.len()), |b| b.iter(|| exec::map_seq(&jobs, work)));
    g.finish();
}

fn peae_points(c: &mut Criterion) {
    let jobs: Vec<(usize, f64)> = (1..=4).flat_map(|m| [0.1, 0.05, 0.01].map(|r| (m, r))).collect();
    let work = |&(m, r): &(usize, f64)| peae_point(Method::Pade(m), r, 200).unwrap().ae_pct;
    let mut g = c.benchmark_group("peae_points");
    g.sample_size(20);
    g.bench_function(BenchmarkId::new("map", jobs.len()), |b| b.iter(|| exec::map(&jobs, work)));
    g.bench_function(BenchmarkId::new("map_seq", jobs.len()), |b| b.iter(|| exec::map_seq(&jobs, work)));
    g.finish();
}

criterion_group!(benches, sdof_ladder, peae_points);
criterion_main!(benches);
