use typgraph::graph::Graph;
use typgraph::graphon::{model_inhomogeneous, sample_inhomogeneous, Kernel, KernelKind};
use typgraph::linalg::SymmetricMatrix;
use typgraph::random_graphs::{
    deviation_experiment, model_erdos_renyi, model_percolation, percolation_gap_experiment,
    sample_graph, EdgeProbabilityModel, MatrixKind,
};
use typgraph::rng::derive_seed;

fn edge_frequencies(model: &EdgeProbabilityModel, trials: usize, seed: u64) -> SymmetricMatrix {
    let n = model.order();
    let mut counts = SymmetricMatrix::zeros(n);
    for t in 0..trials {
        let g = sample_graph(model, derive_seed(seed, t as u64));
        for (i, j) in g.edges() {
            counts.set(i, j, counts.get(i, j) + 1.0);
        }
    }
    counts.scale(1.0 / trials as f64)
}

#[test]
fn edge_frequencies_converge_to_probabilities() {
    let trials = 10_000;
    let tol = 5.0 / (trials as f64).sqrt();
    let prob = SymmetricMatrix::from_fn(6, |i, j| {
        if i == j {
            0.0
        } else {
            0.1 + 0.8 * ((i * j) % 5) as f64 / 4.0
        }
    });
    let model = EdgeProbabilityModel::new(prob).unwrap();
    let freq = edge_frequencies(&model, trials, 7);
    for i in 0..6 {
        for j in 0..6 {
            let gap = (freq.get(i, j) - model.prob(i, j)).abs();
            assert!(
                gap <= tol,
                "({i}, {j}): {} vs {}",
                freq.get(i, j),
                model.prob(i, j)
            );
        }
    }
}

#[test]
fn percolation_keeps_only_base_edges() {
    let base = Graph::cycle(8);
    let model = model_percolation(&base, 0.4).unwrap();
    let freq = edge_frequencies(&model, 10_000, 11);
    for i in 0..8 {
        for j in 0..8 {
            let expect = if base.has_edge(i, j) { 0.4 } else { 0.0 };
            assert!((freq.get(i, j) - expect).abs() <= 0.05, "({i}, {j})");
        }
    }
}

#[test]
fn failure_fraction_above_threshold() {
    let (delta, trials) = (0.1, 100);
    let allowed = delta + 3.0 * (delta / trials as f64).sqrt();
    let model = model_erdos_renyi(150, 0.9).unwrap();
    for kind in [MatrixKind::Adjacency, MatrixKind::Laplacian] {
        let s = deviation_experiment(&model, delta, trials, 3, kind).unwrap();
        assert!(s.above_threshold, "{kind:?}");
        assert!(
            s.failure_fraction() <= allowed,
            "{kind:?}: {}",
            s.failure_fraction()
        );
    }
}

#[test]
fn inhomogeneous_laplacian_deviation() {
    let kernel = Kernel::new(KernelKind::Block(vec![vec![1.0, 0.6], vec![0.6, 1.0]])).unwrap();
    let (pts, _) = sample_inhomogeneous(&kernel, 200, 0.8, 5).unwrap();
    let model = model_inhomogeneous(&kernel, &pts, 0.8).unwrap();
    let s = deviation_experiment(&model, 0.1, 50, 9, MatrixKind::Laplacian).unwrap();
    assert!(s.failure_fraction() <= 0.1 + 3.0 * (0.1f64 / 50.0).sqrt());
}

#[test]
fn spectral_gap_difference() {
    let delta = 0.1;
    let trials = 40;
    let gaps = percolation_gap_experiment(&Graph::complete(120), 0.5, delta, trials, 21).unwrap();
    let ok = gaps
        .iter()
        .filter(|g| g.abs_diff() <= 2.0 * g.bound)
        .count();
    assert!(
        ok as f64 >= (1.0 - delta) * trials as f64,
        "{ok} of {trials}"
    );
    for g in &gaps {
        assert!(g.abs_diff() <= g.laplacian_deviation + 1e-9);
    }
}

#[test]
fn erdos_renyi_edge_count_concentrates() {
    let (n, p) = (1000usize, 0.3);
    let pairs = (n * (n - 1) / 2) as f64;
    let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
    let model = model_erdos_renyi(n, p).unwrap();
    for seed in 0..100 {
        let m = sample_graph(&model, derive_seed(1, seed)).edge_count() as f64;
        assert!((m - mean).abs() <= 4.0 * sd, "seed {seed}: {m} edges");
    }
}
