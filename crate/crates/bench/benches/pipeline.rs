use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mirrorbench::algo;
use mirrorbench::analysis::{analyze, AnalysisConfig};
use mirrorbench::bench::{build_low_level, build_subcircuit, simulate_proxies, snip, ShapeSpec};
use mirrorbench::mirror::{make_proxy, MirrorKind, SamplingParams};
use mirrorbench::rng::rng_from_seed;
use mirrorbench::sim::{fake_uniform_shots, sample_shots, NoiseModel};
use mirrorbench::transpile::{decompose_to_basis, transpile, TranspileConfig};
use mirrorbench::CouplingGraph;
use mirrorbench_bench::brickwork;

fn proxies(c: &mut Criterion) {
    let mut g = c.benchmark_group("proxy");
    for n in [100, 400] {
        let parent = brickwork(n);
        for kind in [MirrorKind::M1, MirrorKind::M2, MirrorKind::M3] {
            g.bench_with_input(BenchmarkId::new(kind.as_str(), n), &parent, |b, p| {
                b.iter(|| make_proxy(black_box(p), kind, 0, 1).unwrap())
            });
        }
    }
    g.finish();
}

fn low_level_generation(c: &mut Criterion) {
    let mut g = c.benchmark_group("low_level_fake_pipeline");
    g.sample_size(10);
    for n in [250, 500] {
        let parent = brickwork(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &parent, |b, p| {
            b.iter(|| {
                let suite = build_low_level(std::slice::from_ref(p), SamplingParams::uniform(10, 3), 1024).unwrap();
                let mut tables = Vec::new();
                let m = suite
                    .generate(16, |m| {
                        tables.push(fake_uniform_shots(m.circuit.id.clone(), m.circuit.n(), 1024, m.seed)?);
                        Ok(())
                    })
                    .unwrap();
                analyze(&m, &tables, &AnalysisConfig::default()).unwrap()
            })
        });
    }
    g.finish();
}

fn subcircuits(c: &mut Criterion) {
    let mut g = c.benchmark_group("subcircuit");
    let parent = brickwork(500);
    g.bench_function("snip_6x32", |b| {
        let mut rng = rng_from_seed(5);
        b.iter(|| snip(black_box(&parent), 6, 32, &mut rng).unwrap())
    });
    let shapes = ShapeSpec::grid(&[2, 4, 6], &[2, 8, 32, 128], 3).unwrap();
    g.sample_size(10);
    g.bench_function("build_grid_n500", |b| {
        b.iter(|| build_subcircuit(std::slice::from_ref(&parent), &shapes, SamplingParams::uniform(10, 3), 1024).unwrap())
    });
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    let nm = NoiseModel::combined();
    for n in [4, 6] {
        let parent = algo::brickwork_u3_cz(n, 16, 2);
        let m = make_proxy(&parent, MirrorKind::M1, 0, 1).unwrap();
        g.bench_with_input(BenchmarkId::new("sample_1000", n), &m.circuit, |b, circ| {
            b.iter(|| sample_shots(black_box(circ), &nm, 1000, 9).unwrap())
        });
    }
    g.finish();
}

fn analysis(c: &mut Criterion) {
    let parent = algo::brickwork_u3_cz(5, 16, 2);
    let suite = build_low_level(std::slice::from_ref(&parent), SamplingParams::uniform(30, 4), 1000).unwrap();
    let (manifest, ps) = suite.collect().unwrap();
    let tables = simulate_proxies(&ps, &NoiseModel::combined(), 1000, 4).unwrap();
    let mut g = c.benchmark_group("analysis");
    g.sample_size(20);
    g.bench_function("bootstrap_200_m30", |b| {
        b.iter(|| analyze(&manifest, black_box(&tables), &AnalysisConfig::default()).unwrap())
    });
    g.finish();
}

fn compilation(c: &mut Criterion) {
    let mut g = c.benchmark_group("transpile");
    let qft = algo::qft_circuit(8);
    g.bench_function("decompose_qft8", |b| b.iter(|| decompose_to_basis(black_box(&qft)).unwrap()));
    let cfg = TranspileConfig::new(CouplingGraph::line(8), 0.999, 11).unwrap();
    g.bench_function("route_qft8_line", |b| b.iter(|| transpile(black_box(&qft), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, proxies, low_level_generation, subcircuits, simulation, analysis, compilation);
criterion_main!(benches);
