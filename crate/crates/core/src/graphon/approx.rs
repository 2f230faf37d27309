//! Finite-sample checks of how well `A/pn` for an inhomogeneous random
//! graph approximates the kernel operator `T_κ`.

use std::f64::consts::PI;

use super::kernel::{Kernel, Multiplicity, SpectralPoint};
use super::points::{sample_inhomogeneous, PointSample};
use super::step::{discretization_remainder, embed_from_grid, kernel_step_kernel};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, eigen_range_projector, eigenvalues, spectral_norm, SymmetricMatrix};
use crate::perturbation::{multiplicity_count, IntervalSet};
use crate::rng::derive_seed;

/// `θ = 2ε + c(L + K)(ln n / n)^{1/4} + √(K ln n / (pn))`.
///
/// `n` is real so that limits and spot values are easy to probe.
pub fn theta_bound(eps: f64, lipschitz: f64, sup_bound: f64, n: f64, p: f64, c_const: f64) -> Result<f64> {
    let ok = eps >= 0.0
        && lipschitz >= 0.0
        && sup_bound > 0.0
        && n > 1.0
        && p > 0.0
        && p <= 1.0
        && c_const >= 0.0
        && [eps, lipschitz, sup_bound, n, c_const].iter().all(|v| v.is_finite());
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "theta needs eps, L, c >= 0, K > 0, n > 1 and p in (0, 1]; got eps = {eps}, L = {lipschitz}, \
             K = {sup_bound}, n = {n}, p = {p}, c = {c_const}"
        )));
    }
    let ln = n.ln();
    Ok(2.0 * eps + c_const * (lipschitz + sup_bound) * (ln / n).powf(0.25) + (sup_bound * ln / (p * n)).sqrt())
}

/// Inputs to [`thm6_assertion_check`] beyond the model itself.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxOptions {
    /// Universal constant `c` used in the formula value of `θ`.
    pub c_const: f64,
    /// `L²` distance `ε` to a Lipschitz approximant (0 when `κ` is Lipschitz).
    pub eps: f64,
    /// Lipschitz constant of the approximant; defaults to the kernel's.
    pub lipschitz: Option<f64>,
    /// Sets `S` for the multiplicity comparison; `None` uses a window
    /// around each nonzero eigenvalue and the tail `|x| ≥ 2θ`.
    pub interval_sets: Option<Vec<IntervalSet>>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self { c_const: 1.0, eps: 0.0, lipschitz: None, interval_sets: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityOutcome {
    pub set: IntervalSet,
    /// `m_{A/pn}(S)`, `m_T(S^θ)`, `m_T(S)`, `m_{A/pn}(S^θ)`.
    pub counts: [usize; 4],
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorOutcome {
    pub alpha: f64,
    pub gamma: f64,
    /// `‖Π_{(α±γ)pn}(A) − E_n P_α H_n‖`.
    pub lhs: f64,
    /// `4θ / (π(γ − θ))`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxTrial {
    pub trial: usize,
    /// `‖A/pn − E_n T_κ H_n‖`.
    pub matrix_deviation: f64,
    /// `‖κ − κ̄_n‖_{L²}`.
    pub remainder: f64,
    /// Upper bound on `‖T_𝒢 − T_κ‖`: deviation plus remainder.
    pub operator_bound: f64,
    /// Leading eigenvalues of `A/pn` in decreasing order.
    pub leading: Vec<f64>,
    /// Multiplicity transfer with `θ = operator_bound`; sets that touch
    /// `[−θ, θ]` are skipped.
    pub multiplicity: Vec<MultiplicityOutcome>,
    /// Projector comparisons for each nonzero `α` with `γ > θ`.
    pub projectors: Vec<ProjectorOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxReport {
    pub n: usize,
    pub p: f64,
    /// `θ` from the formula with the options' constant, when `L` is known.
    pub theta_formula: Option<f64>,
    pub spectrum: Vec<SpectralPoint>,
    pub trials: Vec<ApproxTrial>,
}

impl ApproxReport {
    pub fn median_deviation(&self) -> f64 {
        let mut v: Vec<f64> = self.trials.iter().map(|t| t.matrix_deviation).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        let m = v.len();
        if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) }
    }
}

fn reference_count(spectrum: &[SpectralPoint], s: &IntervalSet) -> usize {
    spectrum
        .iter()
        .filter(|pt| s.contains(pt.value))
        .map(|pt| match pt.multiplicity {
            Multiplicity::Finite(m) => m,
            // Only reached when S meets 0, which the callers exclude.
            Multiplicity::Infinite => usize::MAX,
        })
        .fold(0usize, usize::saturating_add)
}

/// Half the distance from `alpha` to the nearest other point of the spectrum
/// (0 included), so `(α − 2γ, α + 2γ)` isolates `alpha`.
fn isolation_radius(spectrum: &[SpectralPoint], alpha: f64) -> f64 {
    spectrum
        .iter()
        .filter(|pt| pt.value != alpha)
        .map(|pt| (pt.value - alpha).abs())
        .fold(alpha.abs(), f64::min)
        / 2.0
}

/// Matrix of `E_n P_α H_n`: `Σ_φ (E_n φ)(E_n φ)ᵀ` over an orthonormal basis
/// of the eigenspace, with `(E_n φ)_i = √n ∫_{cell σ(i)} φ`.
fn embedded_projector(kernel: &Kernel, pts: &PointSample, alpha: f64) -> Result<SymmetricMatrix> {
    let n = pts.len();
    let root = (n as f64).sqrt();
    let mut out = SymmetricMatrix::zeros(n);
    for phi in kernel.eigenfunction_integrals(alpha)? {
        let by_cell: Vec<f64> = (0..n)
            .map(|r| root * phi(r as f64 / n as f64, (r + 1) as f64 / n as f64))
            .collect();
        let v: Vec<f64> = pts.sigma().iter().map(|&r| by_cell[r]).collect();
        out = &out + &SymmetricMatrix::outer(&v);
    }
    Ok(out)
}

fn default_sets(spectrum: &[SpectralPoint], theta: f64) -> Vec<IntervalSet> {
    let mut sets = Vec::new();
    for pt in spectrum {
        if pt.multiplicity == Multiplicity::Infinite {
            continue;
        }
        let r = isolation_radius(spectrum, pt.value);
        sets.push(IntervalSet::interval(pt.value - r, pt.value + r).expect("ordered endpoints"));
    }
    if theta > 0.0 {
        sets.push(
            IntervalSet::new([(f64::NEG_INFINITY, -2.0 * theta), (2.0 * theta, f64::INFINITY)])
                .expect("ordered endpoints"),
        );
    }
    sets
}

/// Samples `trials` graphs from the model and evaluates the four
/// approximation statements for each, using the observed operator bound
/// as `θ` for the multiplicity and projector comparisons.
pub fn thm6_assertion_check(
    kernel: &Kernel,
    p: f64,
    n: usize,
    trials: usize,
    seed: u64,
    options: &ApproxOptions,
) -> Result<ApproxReport> {
    let spectrum = kernel.reference_spectrum()?;
    let k = kernel.sup_bound();
    if !(p > 0.0 && p <= 1.0) || p * k > 1.0 {
        return Err(Error::InvalidParameter(format!("need 0 < p <= 1/K, got p = {p}, K = {k}")));
    }
    if n < 2 || trials == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and trials >= 1, got {n} and {trials}")));
    }
    let theta_formula = match options.lipschitz.or(kernel.lipschitz()) {
        Some(l) => Some(theta_bound(options.eps, l, k, n as f64, p, options.c_const)?),
        None => None,
    };
    let grid = kernel_step_kernel(kernel, n)?;
    let remainder = discretization_remainder(kernel, &grid)?;
    let pn = p * n as f64;
    let nonzero: Vec<f64> = spectrum
        .iter()
        .filter(|pt| pt.multiplicity != Multiplicity::Infinite)
        .map(|pt| pt.value)
        .collect();

    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (pts, g) = sample_inhomogeneous(kernel, n, p, derive_seed(seed, trial as u64))?;
        let a = g.adjacency();
        let scaled = a.scale(1.0 / pn);
        let embed = embed_from_grid(&grid, &pts);
        let matrix_deviation = spectral_norm(&(&scaled - &embed))?;
        let theta = matrix_deviation + remainder;

        let eig = eig_sym(&a)?;
        let spec_scaled: Vec<f64> = eig.values().iter().map(|v| v / pn).collect();
        let lead = nonzero.len().max(2).min(n);
        let leading: Vec<f64> = spec_scaled.iter().rev().take(lead).copied().collect();

        let sets = match &options.interval_sets {
            Some(s) => s.clone(),
            None => default_sets(&spectrum, theta),
        };
        let mut multiplicity = Vec::new();
        for set in sets {
            if !(set.inf_abs() > theta) {
                continue;
            }
            let dilated = set.dilate(theta)?;
            let counts = [
                multiplicity_count(&spec_scaled, &set),
                reference_count(&spectrum, &dilated),
                reference_count(&spectrum, &set),
                multiplicity_count(&spec_scaled, &dilated),
            ];
            multiplicity.push(MultiplicityOutcome {
                set,
                counts,
                holds: counts[0] <= counts[1] && counts[2] <= counts[3],
            });
        }

        let mut projectors = Vec::new();
        for &alpha in &nonzero {
            let gamma = isolation_radius(&spectrum, alpha);
            if !(gamma > theta) {
                continue;
            }
            let (lo, hi) = ((alpha - gamma) * pn, (alpha + gamma) * pn);
            let weights: Vec<f64> =
                eig.values().iter().map(|&l| if lo <= l && l <= hi { 1.0 } else { 0.0 }).collect();
            let pi = eig.weighted_sum(&weights);
            let target = embedded_projector(kernel, &pts, alpha)?;
            let lhs = spectral_norm(&(&pi - &target))?;
            let rhs = 4.0 * theta / (PI * (gamma - theta));
            projectors.push(ProjectorOutcome { alpha, gamma, lhs, rhs, holds: lhs <= rhs + 1e-9 });
        }

        out.push(ApproxTrial {
            trial,
            matrix_deviation,
            remainder,
            operator_bound: theta,
            leading,
            multiplicity,
            projectors,
        });
    }
    Ok(ApproxReport { n, p, theta_formula, spectrum, trials: out })
}

/// Top `count` eigenvalues of `A/pn` (decreasing) for one draw of the
/// model. Cheaper than [`thm6_assertion_check`]: no eigenvectors.
pub fn leading_eigenvalues(kernel: &Kernel, n: usize, p: f64, seed: u64, count: usize) -> Result<Vec<f64>> {
    let (_, g) = sample_inhomogeneous(kernel, n, p, seed)?;
    let pn = p * n as f64;
    Ok(eigenvalues(&g.adjacency())?.iter().rev().take(count).map(|v| v / pn).collect())
}

/// Projector onto the eigenvalues of `A` in `[(α − γ)pn, (α + γ)pn]`.
pub fn scaled_window_projector(a: &SymmetricMatrix, alpha: f64, gamma: f64, pn: f64) -> Result<SymmetricMatrix> {
    Ok(eigen_range_projector(a, (alpha - gamma) * pn, (alpha + gamma) * pn)?.matrix)
}

#[cfg(test)]
mod tests {
    use super::super::kernel::KernelKind;
    use super::*;

    #[test]
    fn theta_examples() {
        let e = std::f64::consts::E;
        let zero_c = theta_bound(0.1, 0.0, 1.0, e, 1.0 / e, 0.0).unwrap();
        assert!((zero_c - 1.2).abs() < 1e-15);
        let unit_c = theta_bound(0.1, 0.0, 1.0, e, 1.0 / e, 1.0).unwrap();
        assert!((unit_c - (1.2 + (-0.25f64).exp())).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for n in [1e2, 1e4, 1e6, 1e8, 1e10] {
            let t = theta_bound(0.0, 1.0, 1.0, n, 0.5, 1.0).unwrap();
            assert!(t < prev);
            prev = t;
        }
        let t = theta_bound(0.05, 2.0, 1.0, 1e30, 1.0, 1.0).unwrap();
        assert!(t - 0.1 < 0.1 * t);
        assert!(theta_bound(0.1, 0.0, 0.0, 10.0, 0.5, 1.0).is_err());
        assert!(theta_bound(0.1, 0.0, 1.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn constant_kernel_assertions() {
        let k = Kernel::new(KernelKind::Constant(1.0)).unwrap();
        let r = thm6_assertion_check(&k, 0.5, 400, 2, 3, &ApproxOptions::default()).unwrap();
        for t in &r.trials {
            assert!(t.remainder < 1e-7);
            assert!((t.leading[0] - 1.0).abs() <= t.operator_bound, "{t:?}");
            assert!(t.leading[1].abs() <= t.operator_bound);
            assert!(t.multiplicity.iter().all(|m| m.holds), "{t:?}");
            assert!(!t.projectors.is_empty() && t.projectors.iter().all(|p| p.holds), "{t:?}");
        }
    }

    #[test]
    fn block_kernel_assertions() {
        let k = Kernel::new(KernelKind::Block(vec![vec![0.8, 0.2], vec![0.2, 0.8]])).unwrap();
        let r = thm6_assertion_check(&k, 0.5, 400, 2, 5, &ApproxOptions::default()).unwrap();
        assert!(r.theta_formula.is_none());
        for t in &r.trials {
            assert!((t.leading[0] - 0.5).abs() < 0.06 && (t.leading[1] - 0.3).abs() < 0.06, "{t:?}");
            assert!(t.multiplicity.iter().all(|m| m.holds));
            assert!(t.projectors.iter().all(|p| p.holds));
        }
    }

    #[test]
    fn rejects_dense_regime_and_smooth_kernels() {
        let k = Kernel::new(KernelKind::RankOneProduct { coef: 4.0, exponent: 1.0 }).unwrap();
        assert!(thm6_assertion_check(&k, 0.5, 50, 1, 0, &ApproxOptions::default()).is_err());
        let s = Kernel::new(KernelKind::Smooth(super::super::kernel::SmoothKind::Cosine { scale: 1.0 })).unwrap();
        assert!(matches!(
            thm6_assertion_check(&s, 0.5, 50, 1, 0, &ApproxOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn deviation_shrinks_with_n() {
        let k = Kernel::new(KernelKind::RankOneProduct { coef: 4.0, exponent: 1.0 }).unwrap();
        let med = |n| thm6_assertion_check(&k, 0.25, n, 3, 17, &ApproxOptions::default()).unwrap().median_deviation();
        let (a, b, c) = (med(250), med(500), med(1000));
        assert!(a >= b && b >= c, "{a} {b} {c}");
    }
}
