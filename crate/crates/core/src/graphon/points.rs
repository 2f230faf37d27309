use rand::Rng;

use super::kernel::Kernel;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::SymmetricMatrix;
use crate::random_graphs::{sample_graph, EdgeProbabilityModel};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Latent positions `X_i` with their order statistics.
///
/// `sigma[i]` is the 0-based rank of `X_i`, so `raw[i] == sorted[sigma[i]]`
/// and vertex `i` owns the grid cell `(sigma[i]/n, (sigma[i]+1)/n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSample {
    raw: Vec<f64>,
    sorted: Vec<f64>,
    sigma: Vec<usize>,
}

impl PointSample {
    /// Orders the points; ties go to the smaller original index.
    pub fn from_raw(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidParameter("need at least one point".into()));
        }
        if let Some(x) = raw.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("point {x} outside [0, 1]")));
        }
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]).then(a.cmp(&b)));
        let mut sigma = vec![0; raw.len()];
        for (rank, &i) in order.iter().enumerate() {
            sigma[i] = rank;
        }
        let sorted = order.iter().map(|&i| raw[i]).collect();
        Ok(Self { raw, sorted, sigma })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `max_i |X̄_i − i/n|` with 1-based `i`.
    pub fn max_order_deviation(&self) -> f64 {
        let n = self.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (r, &x)| m.max((x - (r + 1) as f64 / n).abs()))
    }
}

/// `n` i.i.d. uniform points on `[0, 1)`.
pub fn sample_points(n: usize, seed: u64) -> Result<PointSample> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let mut rng = rng_from_seed(seed);
    PointSample::from_raw((0..n).map(|_| rng.random::<f64>()).collect())
}

/// `p(i, j) = min(p·κ(X_i, X_j), 1)`, loops included.
pub fn model_inhomogeneous(kernel: &Kernel, pts: &PointSample, p: f64) -> Result<EdgeProbabilityModel> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    let x = pts.raw();
    EdgeProbabilityModel::new(SymmetricMatrix::from_fn(pts.len(), |i, j| {
        (p * kernel.eval(x[i], x[j])).min(1.0)
    }))
}

/// Latent points and graph for one draw of the inhomogeneous model. The
/// points and the edges use independent child streams of `seed`.
pub fn sample_inhomogeneous(kernel: &Kernel, n: usize, p: f64, seed: u64) -> Result<(PointSample, Graph)> {
    let pts = sample_points(n, derive_seed(seed, stream::POINTS))?;
    let model = model_inhomogeneous(kernel, &pts, p)?;
    let g = sample_graph(&model, derive_seed(seed, stream::EDGES));
    Ok((pts, g))
}
