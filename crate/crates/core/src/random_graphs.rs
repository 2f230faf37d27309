//! Random graphs with independent edges and their typical matrices.
//!
//! A model assigns each unordered pair `{i, j}` (loops included) an edge
//! probability. Its typical adjacency matrix is the probability matrix
//! itself and its typical Laplacian is the normalized Laplacian of the
//! weighted graph with those weights. Sampled matrices concentrate around
//! the typical ones at the rates given by [`adjacency_bound`] and
//! [`laplacian_bound`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{normalized_laplacian, Graph};
use crate::linalg::{eigenvalues, spectral_norm, SymmetricMatrix};
use crate::rng::{derive_seed, rng_from_seed};

/// Symmetric edge probability map on `n` vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProbabilityModel {
    prob: SymmetricMatrix,
}

impl EdgeProbabilityModel {
    pub fn new(prob: SymmetricMatrix) -> Result<Self> {
        if prob.order() == 0 {
            return Err(Error::InvalidParameter("model needs at least one vertex".into()));
        }
        if let Some(&v) = prob.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!("edge probability {v} outside [0, 1]")));
        }
        Ok(Self { prob })
    }

    pub fn order(&self) -> usize {
        self.prob.order()
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.prob.get(i, j)
    }

    pub fn prob_matrix(&self) -> &SymmetricMatrix {
        &self.prob
    }

    /// Expected degrees `Σ_j p(i, j)`.
    pub fn typical_degrees(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.prob.row(i).iter().sum()).collect()
    }

    /// Minimum typical degree `d`.
    pub fn d_min(&self) -> f64 {
        self.typical_degrees().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Maximum typical degree `Δ`.
    pub fn d_max(&self) -> f64 {
        self.typical_degrees().into_iter().fold(0.0, f64::max)
    }
}

fn check_open_unit(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {p}")))
    }
}

/// `G(n, p)` without loops.
pub fn model_erdos_renyi(n: usize, p: f64) -> Result<EdgeProbabilityModel> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    check_open_unit("p", p)?;
    EdgeProbabilityModel::new(SymmetricMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { p }))
}

/// Bond percolation: each edge of `g` survives independently with probability `p`.
pub fn model_percolation(g: &Graph, p: f64) -> Result<EdgeProbabilityModel> {
    check_open_unit("p", p)?;
    EdgeProbabilityModel::new(g.adjacency().scale(p))
}

/// Draws one graph. Pairs `i <= j` are visited in row-major order, each
/// consuming exactly one uniform draw, so the seed fixes the graph.
pub fn sample_graph(model: &EdgeProbabilityModel, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    sample_graph_with(model, &mut rng)
}

pub fn sample_graph_with<R: Rng>(model: &EdgeProbabilityModel, rng: &mut R) -> Graph {
    let n = model.order();
    let mut g = Graph::new(n);
    for i in 0..n {
        let row = model.prob.row(i);
        for (j, &p) in row.iter().enumerate().skip(i) {
            if rng.random::<f64>() < p {
                g.add_edge(i, j).expect("indices in range");
            }
        }
    }
    g
}

pub fn typical_adjacency(model: &EdgeProbabilityModel) -> SymmetricMatrix {
    model.prob.clone()
}

/// Normalized Laplacian of the weighted graph with weights `p(i, j)`.
///
/// The weights are first divided by their maximum. The Laplacian is
/// invariant under that scaling, and for a percolation model the rescaled
/// weights are exactly 0/1, so the result equals `laplacian(G)` bit for bit.
pub fn typical_laplacian(model: &EdgeProbabilityModel) -> Result<SymmetricMatrix> {
    if let Some(i) = model.typical_degrees().iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    let top = model.prob.max_abs();
    // Divide rather than multiply by 1/top: p / p is exactly 1, p * (1/p) need not be.
    let weights = SymmetricMatrix::from_fn(model.order(), |i, j| model.prob.get(i, j) / top);
    let scale: Vec<f64> = (0..model.order())
        .map(|i| 1.0 / weights.row(i).iter().sum::<f64>().sqrt())
        .collect();
    Ok(normalized_laplacian(&weights, &scale))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delta must lie in (0, 1/2], got {delta}")))
    }
}

/// `4 √(Δ ln(n/δ))`: with probability at least `1 − δ`,
/// `‖A − A_typ‖` stays below this value.
pub fn adjacency_bound(max_degree: f64, n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(max_degree > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need max degree > 0 and n >= 1, got {max_degree} and {n}"
        )));
    }
    Ok(4.0 * (max_degree * (n as f64 / delta).ln()).sqrt())
}

/// `14 √(ln(4n/δ)/d)`: with probability at least `1 − δ`,
/// `‖L − L_typ‖` stays below this value.
pub fn laplacian_bound(min_degree: f64, n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(min_degree > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need min degree > 0 and n >= 1, got {min_degree} and {n}"
        )));
    }
    Ok(14.0 * ((4.0 * n as f64 / delta).ln() / min_degree).sqrt())
}

/// Degree threshold `20 ln n` standing in for the unspecified constant in
/// the concentration theorem; below it bound violations are reported but
/// not unexpected.
pub fn degree_threshold(n: usize) -> f64 {
    20.0 * (n as f64).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Adjacency,
    Laplacian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationReport {
    pub n: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub delta: f64,
    pub observed: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationSummary {
    pub kind: MatrixKind,
    pub reports: Vec<DeviationReport>,
    /// Whether the relevant typical degree clears [`degree_threshold`].
    pub above_threshold: bool,
}

impl DeviationSummary {
    pub fn failure_fraction(&self) -> f64 {
        let failures = self.reports.iter().filter(|r| !r.within_bound).count();
        failures as f64 / self.reports.len() as f64
    }
}

/// Repeatedly samples the model and measures `‖M − M_typ‖` against the
/// matching bound. Trial `t` uses seed `derive_seed(seed, t)`.
pub fn deviation_experiment(
    model: &EdgeProbabilityModel,
    delta: f64,
    trials: usize,
    seed: u64,
    kind: MatrixKind,
) -> Result<DeviationSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let n = model.order();
    let (d_min, d_max) = (model.d_min(), model.d_max());
    let (typical, bound, degree) = match kind {
        MatrixKind::Adjacency => (typical_adjacency(model), adjacency_bound(d_max, n, delta)?, d_max),
        MatrixKind::Laplacian => {
            let l = typical_laplacian(model)?;
            (l, laplacian_bound(d_min, n, delta)?, d_min)
        }
    };
    let mut reports = Vec::with_capacity(trials);
    for trial in 0..trials {
        let g = sample_graph(model, derive_seed(seed, trial as u64));
        let sampled = match kind {
            MatrixKind::Adjacency => g.adjacency(),
            MatrixKind::Laplacian => g.laplacian(),
        };
        let observed = spectral_norm(&(&sampled - &typical))?;
        reports.push(DeviationReport {
            n,
            d_min,
            d_max,
            delta,
            observed,
            bound,
            within_bound: observed <= bound,
        });
    }
    Ok(DeviationSummary {
        kind,
        reports,
        above_threshold: degree >= degree_threshold(n),
    })
}

/// `min{λ_1(L), 2 − λ_{n−1}(L)}` for the normalized Laplacian.
pub fn spectral_gap(g: &Graph) -> Result<f64> {
    let n = g.order();
    if n < 2 {
        return Err(Error::InvalidParameter("spectral gap needs >= 2 vertices".into()));
    }
    let vals = eigenvalues(&g.laplacian())?;
    Ok(vals[1].min(2.0 - vals[n - 1]))
}

/// Reference percolation gap bound
/// `c1 √(ln n/(p d_G)) + c2 (ln n)^{3/2} / (p d_G (ln ln n)^{3/2})`,
/// with the caller choosing the constants.
pub fn chung_horn_reference(n: usize, p: f64, min_degree: f64, c1: f64, c2: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be >= 3, got {n}")));
    }
    let pd = p * min_degree;
    if !(pd > 0.0) {
        return Err(Error::InvalidParameter(format!("p * d_G must be positive, got {pd}")));
    }
    let ln_n = (n as f64).ln();
    let lnln = ln_n.ln();
    Ok(c1 * (ln_n / pd).sqrt() + c2 * ln_n.powf(1.5) / (pd * lnln.powf(1.5)))
}

/// Rate of the percolation spectral-gap stability bound, `√(ln n/(p d_G))`,
/// with unit constant.
pub fn percolation_gap_rate(n: usize, p: f64, min_degree: f64) -> Result<f64> {
    let pd = p * min_degree;
    if n < 2 || !(pd > 0.0) {
        return Err(Error::InvalidParameter(format!("need n >= 2 and p * d_G > 0, got {n}, {pd}")));
    }
    Ok(((n as f64).ln() / pd).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapTrial {
    pub gap_base: f64,
    pub gap_sample: f64,
    /// `‖L_G − L_{G_p}‖`, which dominates the gap difference.
    pub laplacian_deviation: f64,
    pub bound: f64,
}

impl GapTrial {
    pub fn abs_diff(&self) -> f64 {
        (self.gap_base - self.gap_sample).abs()
    }

    pub fn within(&self) -> bool {
        self.abs_diff() <= self.bound
    }
}

/// Spectral gap of `g` against that of percolated copies, bounded by
/// `laplacian_bound(p · d_G, n, δ)`.
pub fn percolation_gap_experiment(
    g: &Graph,
    p: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<GapTrial>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let model = model_percolation(g, p)?;
    let min_degree = g.min_degree() as f64;
    let bound = laplacian_bound(p * min_degree, g.order(), delta)?;
    let base_l = g.laplacian();
    let gap_base = spectral_gap(g)?;
    (0..trials)
        .map(|trial| {
            let sample = sample_graph(&model, derive_seed(seed, trial as u64));
            Ok(GapTrial {
                gap_base,
                gap_sample: spectral_gap(&sample)?,
                laplacian_deviation: spectral_norm(&(&base_l - &sample.laplacian()))?,
                bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_sym;

    #[test]
    fn erdos_renyi_model() {
        let m = model_erdos_renyi(3, 0.5).unwrap();
        assert_eq!(m.d_max(), 1.0);
        assert_eq!(m.d_min(), 1.0);
        let n = 6;
        let p = 0.3;
        let m = model_erdos_renyi(n, p).unwrap();
        let expected = SymmetricMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { p });
        assert_eq!(typical_adjacency(&m), expected);
        // Without loops the weighted-graph Laplacian is I − (J − I)/(n − 1),
        // which sits at distance 1/(n − 1) from I − J/n.
        let l = typical_laplacian(&m).unwrap();
        let exact = SymmetricMatrix::from_fn(n, |i, j| {
            if i == j { 1.0 } else { -1.0 / (n - 1) as f64 }
        });
        assert!((&l - &exact).max_abs() < 1e-15);
        let rank_one = SymmetricMatrix::from_fn(n, |i, j| (i == j) as u8 as f64 - 1.0 / n as f64);
        let gap = spectral_norm(&(&l - &rank_one)).unwrap();
        assert!((gap - 1.0 / (n - 1) as f64).abs() < 1e-14);
        assert!(model_erdos_renyi(1, 0.5).is_err());
        assert!(model_erdos_renyi(5, 1.0).is_err());
    }

    #[test]
    fn percolation_model() {
        let tri = Graph::complete(3);
        let m = model_percolation(&tri, 0.4).unwrap();
        assert!(typical_adjacency(&m).as_slice().iter().all(|&v| v == 0.0 || v == 0.4));
        assert_eq!(typical_adjacency(&m), tri.adjacency().scale(0.4));
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let m = model_percolation(&g, 0.37).unwrap();
        // Scale invariance holds entrywise, bit for bit.
        assert_eq!(typical_laplacian(&m).unwrap(), g.laplacian());
        assert!((m.d_min() - 0.37 * g.min_degree() as f64).abs() < 1e-15);
        assert!((m.d_max() - 0.37 * g.max_degree() as f64).abs() < 1e-15);
        let empty = model_percolation(&Graph::new(4), 0.5).unwrap();
        assert_eq!(empty.prob_matrix(), &SymmetricMatrix::zeros(4));
        assert_eq!(typical_laplacian(&empty), Err(Error::ZeroDegree(0)));
    }

    #[test]
    fn uniform_model_with_loops() {
        let q = 0.25;
        let m = EdgeProbabilityModel::new(SymmetricMatrix::from_fn(2, |_, _| q)).unwrap();
        assert_eq!(m.typical_degrees(), vec![2.0 * q, 2.0 * q]);
    }

    #[test]
    fn degenerate_models_sample_deterministically() {
        let zero = EdgeProbabilityModel::new(SymmetricMatrix::zeros(6)).unwrap();
        assert_eq!(sample_graph(&zero, 3).edge_count(), 0);
        let one = EdgeProbabilityModel::new(SymmetricMatrix::from_fn(6, |_, _| 1.0)).unwrap();
        let g = sample_graph(&one, 3);
        assert_eq!(g.edge_count(), 21);
        assert!(g.has_loops());
        assert_eq!(sample_graph(&model_erdos_renyi(30, 0.3).unwrap(), 9), sample_graph(&model_erdos_renyi(30, 0.3).unwrap(), 9));
    }

    #[test]
    fn deterministic_model_has_zero_deviation() {
        let model = EdgeProbabilityModel::new(SymmetricMatrix::from_fn(8, |i, j| {
            if (i + j) % 3 == 0 { 1.0 } else { 0.0 }
        }))
        .unwrap();
        for kind in [MatrixKind::Adjacency, MatrixKind::Laplacian] {
            let summary = deviation_experiment(&model, 0.1, 5, 1, kind).unwrap();
            assert!(summary.reports.iter().all(|r| r.observed == 0.0 && r.within_bound));
        }
    }

    #[test]
    fn bound_formulas() {
        // n/δ = e gives ln(n/δ) = 1.
        let delta = (-1.0f64).exp();
        assert!((adjacency_bound(100.0, 1, delta).unwrap() - 40.0).abs() < 1e-12);
        let (n, delta) = (50, 0.1);
        let d = 196.0 * (4.0 * n as f64 / delta).ln();
        assert!((laplacian_bound(d, n, delta).unwrap() - 1.0).abs() < 1e-14);
        for k in 1..40 {
            let (a, b) = (k as f64, k as f64 + 1.0);
            assert!(laplacian_bound(b, 100, 0.1).unwrap() < laplacian_bound(a, 100, 0.1).unwrap());
            assert!(adjacency_bound(b, 100, 0.1).unwrap() > adjacency_bound(a, 100, 0.1).unwrap());
        }
        assert!(adjacency_bound(10.0, 10, 0.9).is_err());
        assert!(laplacian_bound(0.0, 10, 0.1).is_err());
    }

    #[test]
    fn spectral_gap_examples() {
        assert!((spectral_gap(&Graph::complete(4)).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let two_triangles =
            Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(spectral_gap(&two_triangles).unwrap().abs() < 1e-12);
        assert!(spectral_gap(&Graph::from_edges(2, [(0, 1)]).unwrap()).unwrap().abs() < 1e-12);
        assert!(spectral_gap(&Graph::new(1)).is_err());
    }

    #[test]
    fn laplacian_spectrum_lies_in_unit_band() {
        for seed in 0..10 {
            let g = sample_graph(&model_erdos_renyi(40, 0.1).unwrap(), seed);
            let eig = eig_sym(&g.laplacian()).unwrap();
            assert!(eig.min() >= -1e-12 && eig.max() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn chung_horn_examples() {
        assert_eq!(chung_horn_reference(100, 0.5, 10.0, 0.0, 0.0).unwrap(), 0.0);
        let n = 200;
        let ln_n = (n as f64).ln();
        // At p·d_G = ln n the second term exceeds one, so the bound is vacuous.
        let ch = chung_horn_reference(n, 1.0, ln_n, 1.0, 1.0).unwrap();
        assert!(ch > 1.0);
        assert!(percolation_gap_rate(n, 1.0, ln_n).unwrap() < ch);
        let mut prev = f64::INFINITY;
        for k in 1..30 {
            let v = chung_horn_reference(n, 0.5, k as f64, 1.0, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(chung_horn_reference(2, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(chung_horn_reference(10, 0.5, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn percolation_gap_difference_is_dominated_by_laplacian_deviation() {
        let trials = percolation_gap_experiment(&Graph::complete(40), 0.5, 0.1, 10, 4).unwrap();
        for t in &trials {
            assert!(t.abs_diff() <= t.laplacian_deviation + 1e-12);
        }
    }
}
