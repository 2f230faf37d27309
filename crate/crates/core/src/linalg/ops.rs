use crate::error::{Error, Result};
use crate::linalg::eigen::{eig_sym, eig_tolerance, eigenvalues};
use crate::linalg::matrix::{dot, SymmetricMatrix};

/// `‖A‖ = max_i |λ_i(A)|`.
pub fn spectral_norm(a: &SymmetricMatrix) -> Result<f64> {
    let vals = eigenvalues(a)?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

pub fn lambda_max(a: &SymmetricMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.last().copied().unwrap_or(0.0))
}

pub fn lambda_min(a: &SymmetricMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.first().copied().unwrap_or(0.0))
}

/// `A ⪯ B` up to `tol`: true iff `λ_min(B − A) ≥ −tol`.
pub fn psd_dominates(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Result<bool> {
    a.check_same_order(b)?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be >= 0, got {tol}")));
    }
    Ok(lambda_min(&(b - a))? >= -tol)
}

pub fn matrix_exp(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = eig_sym(a)?;
    if eig.values().iter().any(|l| !l.exp().is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(eig.map(f64::exp))
}

/// Orthogonal projector together with its rank.
#[derive(Clone, Debug)]
pub struct Projector {
    pub matrix: SymmetricMatrix,
    pub rank: usize,
}

/// Projector onto the eigenvectors of `a` whose eigenvalues lie in the
/// closed interval `[lo, hi]`. Membership uses exact comparison.
pub fn eigen_range_projector(a: &SymmetricMatrix, lo: f64, hi: f64) -> Result<Projector> {
    if !(lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "projector interval [{lo}, {hi}] is empty"
        )));
    }
    let eig = eig_sym(a)?;
    let weights: Vec<f64> = eig
        .values()
        .iter()
        .map(|&l| if lo <= l && l <= hi { 1.0 } else { 0.0 })
        .collect();
    let rank = weights.iter().filter(|&&w| w == 1.0).count();
    Ok(Projector {
        matrix: eig.weighted_sum(&weights),
        rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interlacing {
    /// `max_i |λ_i(B1) − λ_i(B2)|` over ascending spectra.
    pub max_eigen_gap: f64,
    /// `‖B1 − B2‖`.
    pub norm_gap: f64,
}

pub fn interlacing_report(b1: &SymmetricMatrix, b2: &SymmetricMatrix) -> Result<Interlacing> {
    b1.check_same_order(b2)?;
    let s1 = eigenvalues(b1)?;
    let s2 = eigenvalues(b2)?;
    let max_eigen_gap = s1
        .iter()
        .zip(&s2)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(Interlacing {
        max_eigen_gap,
        norm_gap: spectral_norm(&(b1 - b2))?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenThompson {
    /// `Tr e^{A+B}`.
    pub lhs: f64,
    /// `Tr(e^A e^B)`.
    pub rhs: f64,
}

pub fn golden_thompson_report(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<GoldenThompson> {
    a.check_same_order(b)?;
    let sum_vals = eigenvalues(&(a + b))?;
    let lhs: f64 = sum_vals.iter().map(|l| l.exp()).sum();
    let ea = matrix_exp(a)?;
    let eb = matrix_exp(b)?;
    // Tr(XY) = Σ_ij X_ij Y_ji and both factors are symmetric.
    let rhs = dot(ea.as_slice(), eb.as_slice());
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(GoldenThompson { lhs, rhs })
}

impl Projector {
    /// `‖P² − P‖_max`, `trace(P) − rank`.
    pub fn defects(&self) -> (f64, f64) {
        let sq = self.matrix.matmul(&self.matrix);
        let n = self.matrix.order();
        let mut idem: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                idem = idem.max((sq.get(i, j) - self.matrix.get(i, j)).abs());
            }
        }
        (idem, (self.matrix.trace() - self.rank as f64).abs())
    }

    pub fn tolerance(&self) -> f64 {
        eig_tolerance(&self.matrix)
    }
}
