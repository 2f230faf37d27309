//! Random instances that satisfy the hypotheses of the perturbation checks.

use rand::Rng;
use typgraph::linalg::{eig_sym, spectral_norm, SymmetricMatrix};
use typgraph::perturbation::IntervalSet;
use typgraph::rng::rng_from_seed;

/// Symmetric matrix with entries uniform on `[−1, 1]`.
pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, rng.random_range(-1.0..=1.0));
        }
    }
    m
}

/// `Q diag(values) Qᵀ` for a random orthogonal `Q`.
pub fn with_spectrum<R: Rng>(values: &[f64], rng: &mut R) -> SymmetricMatrix {
    let basis = eig_sym(&random_symmetric(values.len(), rng)).expect("finite input");
    basis.weighted_sum(values)
}

/// Random symmetric matrix rescaled to spectral norm `norm`.
pub fn perturbation<R: Rng>(n: usize, norm: f64, rng: &mut R) -> SymmetricMatrix {
    let e = random_symmetric(n, rng);
    let s = spectral_norm(&e).expect("finite input");
    if s == 0.0 { e } else { e.scale(norm / s) }
}

#[derive(Clone, Debug)]
pub struct MultiplicityInstance {
    pub v: SymmetricMatrix,
    pub w: SymmetricMatrix,
    pub set: IntervalSet,
}

/// `V` with repeated eigenvalues, `W = V + E` with `‖E‖ ≤ 0.2`, and one or
/// two intervals whose distance from 0 exceeds `2‖E‖`.
pub fn multiplicity_instance(max_order: usize, seed: u64) -> MultiplicityInstance {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=max_order);
    let levels: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
    let values: Vec<f64> = (0..n).map(|_| levels[rng.random_range(0..levels.len())]).collect();
    let v = with_spectrum(&values, &mut rng);
    let eps = rng.random_range(0.0..0.2);
    let w = &v + &perturbation(n, eps, &mut rng);
    let margin = 2.0 * eps + 0.01;
    let mut pieces = Vec::new();
    for _ in 0..rng.random_range(1..=2) {
        let lo = rng.random_range(margin..2.2);
        let hi = lo + rng.random_range(0.0..0.8);
        pieces.push(if rng.random_bool(0.5) { (lo, hi) } else { (-hi, -lo) });
    }
    let set = IntervalSet::new(pieces).expect("ordered endpoints");
    MultiplicityInstance { v, w, set }
}

#[derive(Clone, Debug)]
pub struct ProjectorInstance {
    pub v: SymmetricMatrix,
    pub w: SymmetricMatrix,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

/// Eigenvalues of `V` stay at least `γ` away from `a` and `b`, and
/// `‖W − V‖ < γ`.
pub fn projector_instance(max_order: usize, seed: u64) -> ProjectorInstance {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=max_order);
    let a = rng.random_range(-1.0..0.0);
    let b = a + rng.random_range(0.6..1.6);
    let gamma = rng.random_range(0.05..0.25);
    let values: Vec<f64> = (0..n)
        .map(|_| loop {
            let l: f64 = rng.random_range(-2.0..2.0);
            // The margin keeps reconstructed eigenvalues outside the windows.
            if (l - a).abs() >= 1.01 * gamma && (l - b).abs() >= 1.01 * gamma {
                break l;
            }
        })
        .collect();
    let v = with_spectrum(&values, &mut rng);
    let eps = gamma * rng.random_range(0.0..0.95);
    let w = &v + &perturbation(n, eps, &mut rng);
    ProjectorInstance { v, w, a, b, gamma }
}

#[derive(Clone, Debug)]
pub struct ContourInstance {
    pub m: SymmetricMatrix,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

/// Spectrum in `[−1.5, 1.5]` with no eigenvalue within `γ = 0.15` of `a`
/// or `b`, so `γ ≥ 0.1‖M‖`.
pub fn contour_instance(max_order: usize, seed: u64) -> ContourInstance {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=max_order);
    let gamma = 0.15;
    let a = rng.random_range(-1.2..0.0);
    let b = a + rng.random_range(0.5..1.2);
    let values: Vec<f64> = (0..n)
        .map(|_| loop {
            let l: f64 = rng.random_range(-1.5..1.5);
            if (l - a).abs() >= gamma && (l - b).abs() >= gamma {
                break l;
            }
        })
        .collect();
    ContourInstance { m: with_spectrum(&values, &mut rng), a, b, gamma }
}
