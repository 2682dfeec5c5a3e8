use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ssrp::graph::WeightFunction;
use ssrp::minplus::{minplus_direct, minplus_via_ssrp, FixedRational, MinPlusMatrix};
use ssrp::oracle::ssrp_oracle;
use ssrp::random::gnm_reachable;
use ssrp::rp::{replacement_paths_exact, replacement_paths_rz};
use ssrp::tree::build_bfs_tree;
use ssrp::{solve_ssrp, SolveConfig};

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for &n in &[256usize, 1024] {
        let g = gnm_reachable(n, 4 * n, 7).unwrap();
        group.bench_with_input(BenchmarkId::new("ssrp", n), &g, |b, g| {
            b.iter(|| solve_ssrp(g, 0, &SolveConfig::default()).unwrap())
        });
    }
    // Exact per-edge recomputation for scale contrast.
    let g = gnm_reachable(256, 1024, 7).unwrap();
    let tree = build_bfs_tree(&g, 0).unwrap();
    let edges: Vec<(u32, u32)> = tree.edges().collect();
    let w = WeightFunction::infinite(0, g.n());
    group.bench_function("oracle/256", |b| b.iter(|| ssrp_oracle(&g, &w, &edges)));
    group.finish();
}

#[cfg(feature = "parallel")]
fn bench_thread_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_threads");
    group.sample_size(10);
    let n = 1024;
    let g = gnm_reachable(n, 4 * n, 7).unwrap();
    for threads in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        group.bench_with_input(BenchmarkId::new("threads", threads), &g, |b, g| {
            b.iter(|| pool.install(|| solve_ssrp(g, 0, &SolveConfig::default()).unwrap()))
        });
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench_thread_scaling(_c: &mut Criterion) {}

fn bench_rp(c: &mut Criterion) {
    let mut group = c.benchmark_group("rp");
    group.sample_size(10);
    let g = ssrp::random::path_with_chords(400, 300, 200, 5).unwrap();
    let tree = build_bfs_tree(&g, 0).unwrap();
    let t = (0..g.n() as u32)
        .max_by_key(|&v| tree.depth[v as usize])
        .unwrap();
    let mut path = vec![t];
    let mut v = t;
    while v != 0 {
        v = tree.parent[v as usize];
        path.push(v);
    }
    path.reverse();
    group.bench_function("exact", |b| {
        b.iter(|| replacement_paths_exact(&g, &path).unwrap())
    });
    group.bench_function("sampled", |b| {
        b.iter(|| replacement_paths_rz(&g, &path, 3, 3).unwrap())
    });
    group.finish();
}

fn bench_minplus(c: &mut Criterion) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let vals = ["1", "1.25", "1.5", "1.75"];
    let n = 16;
    let rand_m = |rng: &mut rand_chacha::ChaCha8Rng| {
        MinPlusMatrix::from_rows(
            (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.3) {
                                FixedRational::INFINITY
                            } else {
                                FixedRational::parse(vals[rng.gen_range(0..4)]).unwrap()
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    };
    let x = rand_m(&mut rng);
    let y = rand_m(&mut rng);
    let mut group = c.benchmark_group("minplus16");
    group.bench_function("direct", |b| b.iter(|| minplus_direct(&x, &y).unwrap()));
    group.bench_function("via_ssrp", |b| b.iter(|| minplus_via_ssrp(&x, &y).unwrap()));
    group.finish();
}

criterion_group!(
    benches,
    bench_solve,
    bench_thread_scaling,
    bench_rp,
    bench_minplus
);
criterion_main!(benches);
