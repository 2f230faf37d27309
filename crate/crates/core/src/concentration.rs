//! Matrix martingale tail bounds and a simulator to check them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_tolerance, eigenvalues, lambda_max, lambda_min, matrix_exp, psd_dominates, spectral_norm,
    SymmetricMatrix,
};
use crate::rng::{derive_seed, rng_from_seed};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_common(d: usize, t: f64, sigma2: f64, m: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold t must be >= 0, got {t}")));
    }
    check_positive("sigma2", sigma2)?;
    check_positive("M", m)
}

/// Matrix Freedman tail bound `d · exp(−t² / (8σ² + 4Mt))` for
/// `P(λ_max(Z_n) ≥ t, λ_max(W_n) ≤ σ²)`.
pub fn freedman_bound(d: usize, t: f64, sigma2: f64, m: f64) -> Result<f64> {
    check_common(d, t, sigma2, m)?;
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok(d as f64 * (-(t * t) / (8.0 * sigma2 + 4.0 * m * t)).exp())
}

/// Two-sided bound on `P(‖Σ X_i‖ ≥ t)` for independent sums. Not clamped to 1.
pub fn freedman_bound_two_sided(d: usize, t: f64, sigma2: f64, m: f64) -> Result<f64> {
    Ok(2.0 * freedman_bound(d, t, sigma2, m)?)
}

/// Relative entropy `H_r(x) = x ln(x/r) + (1−x) ln((1−x)/(1−r))`.
pub fn bernoulli_relative_entropy(r: f64, x: f64) -> f64 {
    x * (x / r).ln() + (1.0 - x) * ((1.0 - x) / (1.0 - r)).ln()
}

/// Matrix Hoeffding-type bound `d · exp(−n H_{R/n}((R+t)/n))` where
/// `r_sum = R = Σ r_i`.
pub fn cm_hoeffding_bound(d: usize, t: f64, n: usize, r_sum: f64) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("d and n must be >= 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold t must be >= 0, got {t}")));
    }
    let nf = n as f64;
    let r = r_sum / nf;
    let x = (r_sum + t) / nf;
    for (name, v) in [("R/n", r), ("(R+t)/n", x)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::DomainError(format!("{name} = {v} is outside (0, 1)")));
        }
    }
    Ok(d as f64 * (-nf * bernoulli_relative_entropy(r, x)).exp())
}

/// `λ_max(Σ E[X_i²])` from the per-step second moments.
pub fn independent_sum_sigma2(second_moments: &[SymmetricMatrix]) -> Result<f64> {
    let first = second_moments
        .first()
        .ok_or_else(|| Error::InvalidParameter("no second moments supplied".into()))?;
    let mut sum = SymmetricMatrix::zeros(first.order());
    for (index, m) in second_moments.iter().enumerate() {
        first.check_same_order(m)?;
        let min_eigenvalue = lambda_min(m)?;
        if min_eigenvalue < -eig_tolerance(m) {
            return Err(Error::NotPsd { index, min_eigenvalue });
        }
        sum = &sum + m;
    }
    lambda_max(&sum)
}

#[derive(Clone, Debug, PartialEq)]
pub enum IncrementKind {
    /// `diag(ε_1, …, ε_d)` with independent fair signs.
    DiagonalRademacher { d: usize },
    /// `ε · u uᵀ` for a fixed unit vector `u` drawn once from `vector_seed`.
    RankOneSign { d: usize, vector_seed: u64 },
    /// `(I − q) · A_e` cycling through `edges`, with `I ~ Bernoulli(q)` and
    /// `A_e` the adjacency matrix of the single edge `e`.
    BernoulliCenteredEdge {
        d: usize,
        edges: Vec<(usize, usize)>,
        prob: f64,
    },
}

/// Source of mean-zero increments with `‖X‖ ≤ scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementGenerator {
    kind: IncrementKind,
    scale: f64,
    unit: Vec<f64>,
}

impl IncrementGenerator {
    pub fn new(kind: IncrementKind, scale: f64) -> Result<Self> {
        check_positive("scale", scale)?;
        let d = kind.dimension();
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let mut unit = Vec::new();
        match &kind {
            IncrementKind::DiagonalRademacher { .. } => {}
            IncrementKind::RankOneSign { vector_seed, .. } => {
                let mut rng = rng_from_seed(*vector_seed);
                loop {
                    unit = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let norm = unit.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
                    if norm > 1e-3 {
                        unit.iter_mut().for_each(|x| *x /= norm);
                        break;
                    }
                }
            }
            IncrementKind::BernoulliCenteredEdge { edges, prob, .. } => {
                if edges.is_empty() {
                    return Err(Error::InvalidParameter("edge list is empty".into()));
                }
                if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= d || j >= d) {
                    return Err(Error::InvalidParameter(format!(
                        "edge ({i}, {j}) out of range for dimension {d}"
                    )));
                }
                if !(*prob > 0.0 && *prob < 1.0) {
                    return Err(Error::InvalidParameter(format!("prob must lie in (0, 1), got {prob}")));
                }
            }
        }
        Ok(Self { kind, scale, unit })
    }

    pub fn kind(&self) -> &IncrementKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    /// Almost-sure bound `M` on `‖X_i‖`.
    pub fn bound_m(&self) -> f64 {
        self.scale
    }

    /// Draws increment number `step` (0-based).
    pub fn sample<R: Rng>(&self, step: usize, rng: &mut R) -> SymmetricMatrix {
        let s = self.scale;
        match &self.kind {
            IncrementKind::DiagonalRademacher { d } => {
                let diag: Vec<f64> = (0..*d)
                    .map(|_| if rng.random::<bool>() { s } else { -s })
                    .collect();
                SymmetricMatrix::from_diagonal(&diag)
            }
            IncrementKind::RankOneSign { .. } => {
                let sign = if rng.random::<bool>() { s } else { -s };
                SymmetricMatrix::outer(&self.unit).scale(sign)
            }
            IncrementKind::BernoulliCenteredEdge { d, edges, prob } => {
                let (i, j) = edges[step % edges.len()];
                let hit = if rng.random::<f64>() < *prob { 1.0 } else { 0.0 };
                let mut x = SymmetricMatrix::zeros(*d);
                x.set(i, j, s * (hit - prob));
                x
            }
        }
    }

    /// Exact `E[X_step²]`.
    pub fn second_moment(&self, step: usize) -> SymmetricMatrix {
        let s2 = self.scale * self.scale;
        match &self.kind {
            IncrementKind::DiagonalRademacher { d } => SymmetricMatrix::identity(*d).scale(s2),
            IncrementKind::RankOneSign { .. } => SymmetricMatrix::outer(&self.unit).scale(s2),
            IncrementKind::BernoulliCenteredEdge { d, edges, prob } => {
                let (i, j) = edges[step % edges.len()];
                let var = s2 * prob * (1.0 - prob);
                let mut m = SymmetricMatrix::zeros(*d);
                m.set(i, i, var);
                m.set(j, j, var);
                m
            }
        }
    }

    /// Predictable quadratic variation `W_n = Σ_{i<n} E[X_i²]`.
    pub fn quad_variation(&self, n_steps: usize) -> SymmetricMatrix {
        let d = self.dimension();
        (0..n_steps).fold(SymmetricMatrix::zeros(d), |acc, i| &acc + &self.second_moment(i))
    }
}

impl IncrementKind {
    pub fn dimension(&self) -> usize {
        match self {
            IncrementKind::DiagonalRademacher { d }
            | IncrementKind::RankOneSign { d, .. }
            | IncrementKind::BernoulliCenteredEdge { d, .. } => *d,
        }
    }
}

/// One realized matrix martingale.
#[derive(Clone, Debug)]
pub struct MartingaleTrace {
    pub dimension: usize,
    pub increments: Vec<SymmetricMatrix>,
    /// `Z_0 = 0, Z_1, …, Z_n`.
    pub partial_sums: Vec<SymmetricMatrix>,
    pub quad_variation: SymmetricMatrix,
    pub bound_m: f64,
}

impl MartingaleTrace {
    pub fn final_sum(&self) -> &SymmetricMatrix {
        self.partial_sums.last().expect("Z_0 is always present")
    }
}

pub fn simulate_martingale(
    gen: &IncrementGenerator,
    n_steps: usize,
    seed: u64,
) -> Result<MartingaleTrace> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be >= 1".into()));
    }
    let d = gen.dimension();
    let mut rng = rng_from_seed(seed);
    let mut increments = Vec::with_capacity(n_steps);
    let mut partial_sums = Vec::with_capacity(n_steps + 1);
    partial_sums.push(SymmetricMatrix::zeros(d));
    for step in 0..n_steps {
        let x = gen.sample(step, &mut rng);
        let z = partial_sums.last().unwrap() + &x;
        increments.push(x);
        partial_sums.push(z);
    }
    Ok(MartingaleTrace {
        dimension: d,
        increments,
        partial_sums,
        quad_variation: gen.quad_variation(n_steps),
        bound_m: gen.bound_m(),
    })
}

/// `λ_max(Z_n)` for one run, without keeping the trace.
pub fn final_lambda_max(gen: &IncrementGenerator, n_steps: usize, seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let mut z = SymmetricMatrix::zeros(gen.dimension());
    for step in 0..n_steps {
        z = &z + &gen.sample(step, &mut rng);
    }
    lambda_max(&z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailRow {
    pub t: f64,
    pub empirical_prob: f64,
    pub freedman_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub sigma2: f64,
    pub bound_m: f64,
    pub trials: usize,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    /// Monte Carlo slack `3 √(b(1−b)/trials)` at the bound value `b`
    /// (clipped to a probability).
    pub fn slack(&self, row: &TailRow) -> f64 {
        let b = row.freedman_value.clamp(0.0, 1.0);
        3.0 * (b * (1.0 - b) / self.trials as f64).sqrt()
    }
}

/// Empirical `P(λ_max(Z_n) ≥ t)` over independent runs, alongside the
/// Freedman bound at `σ² = λ_max(W_n)` (exact for these generators).
/// Trial `i` uses seed `derive_seed(seed, i)`.
pub fn empirical_tail(
    gen: &IncrementGenerator,
    n_steps: usize,
    trials: usize,
    thresholds: &[f64],
    seed: u64,
) -> Result<TailReport> {
    if trials == 0 || n_steps == 0 {
        return Err(Error::InvalidParameter("trials and n_steps must be >= 1".into()));
    }
    let sigma2 = lambda_max(&gen.quad_variation(n_steps))?;
    let m = gen.bound_m();
    let mut maxima = Vec::with_capacity(trials);
    for trial in 0..trials {
        maxima.push(final_lambda_max(gen, n_steps, derive_seed(seed, trial as u64))?);
    }
    let rows = thresholds
        .iter()
        .map(|&t| {
            let hits = maxima.iter().filter(|&&l| l >= t).count();
            Ok(TailRow {
                t,
                empirical_prob: hits as f64 / trials as f64,
                freedman_value: freedman_bound(gen.dimension(), t, sigma2, m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TailReport {
        sigma2,
        bound_m: m,
        trials,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceCheck {
    pub holds: bool,
    /// `λ_min(I + C + C² − e^C)`.
    pub slack: f64,
}

/// Checks `e^C ⪯ I + C + C²` for `‖C‖ ≤ 1`.
pub fn exp_quadratic_dominance_check(c: &SymmetricMatrix) -> Result<DominanceCheck> {
    let norm = spectral_norm(c)?;
    if norm > 1.0 + 1e-12 {
        return Err(Error::NormTooLarge(norm));
    }
    let n = c.order();
    let c2 = c.matmul(c).symmetric_part();
    let quadratic = &(&SymmetricMatrix::identity(n) + c) + &c2;
    let exp = matrix_exp(c)?;
    let tol = eig_tolerance(&quadratic);
    let slack = eigenvalues(&(&quadratic - &exp))?[0];
    Ok(DominanceCheck {
        holds: psd_dominates(&exp, &quadratic, tol)?,
        slack,
    })
}
