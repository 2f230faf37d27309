//! Eigenvalue multiplicity transfer and spectral projector perturbation
//! for symmetric matrices, plus a contour-integral projector.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, eig_tolerance, eigen_range_projector, eigenvalues, spectral_norm};
use crate::linalg::SymmetricMatrix;

/// Finite union of closed intervals, kept sorted and disjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Normalizes by sorting and merging intervals that overlap or touch.
    /// Endpoints may be infinite.
    pub fn new(intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut items: Vec<(f64, f64)> = intervals.into_iter().collect();
        for &(a, b) in &items {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
            }
        }
        items.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(items.len());
        for (a, b) in items {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new([(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// `S^ε = {x : |x − s| ≤ ε for some s ∈ S}`.
    pub fn dilate(&self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("dilation must be >= 0, got {eps}")));
        }
        Self::new(self.intervals.iter().map(|&(a, b)| (a - eps, b + eps)))
    }

    /// `inf_{s ∈ S} |s|`; infinite for the empty set.
    pub fn inf_abs(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| if a <= 0.0 && 0.0 <= b { 0.0 } else { a.abs().min(b.abs()) })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Number of entries of `spectrum` lying in `s` (closed intervals, exact comparison).
pub fn multiplicity_count(spectrum: &[f64], s: &IntervalSet) -> usize {
    spectrum.iter().filter(|&&l| s.contains(l)).count()
}

pub fn dilate(s: &IntervalSet, eps: f64) -> Result<IntervalSet> {
    s.dilate(eps)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplicityCheck {
    /// `‖V − W‖`.
    pub eps: f64,
    pub m_v: usize,
    pub m_w_dilated: usize,
    pub m_w: usize,
    pub m_v_dilated: usize,
    /// `m_V(S) ≤ m_W(S^ε)`.
    pub holds_forward: bool,
    /// `m_W(S) ≤ m_V(S^ε)`.
    pub holds_backward: bool,
}

/// Checks multiplicity transfer in both directions with `ε = ‖V − W‖`.
///
/// The dilation uses `ε` plus the eigenvalue tolerance of the larger
/// matrix, so rounding in the computed spectra cannot flip a boundary case.
pub fn multiplicity_lemma_check(
    v: &SymmetricMatrix,
    w: &SymmetricMatrix,
    s: &IntervalSet,
) -> Result<MultiplicityCheck> {
    v.check_same_order(w)?;
    let eps = spectral_norm(&(v - w))?;
    let margin = s.inf_abs();
    if !(margin > eps) {
        return Err(Error::HypothesisViolated(format!(
            "inf |s| over S is {margin}, not above ||V - W|| = {eps}"
        )));
    }
    let tol = eig_tolerance(v).max(eig_tolerance(w));
    let dilated = s.dilate(eps + tol)?;
    let sv = eigenvalues(v)?;
    let sw = eigenvalues(w)?;
    let m_v = multiplicity_count(&sv, s);
    let m_w = multiplicity_count(&sw, s);
    let m_w_dilated = multiplicity_count(&sw, &dilated);
    let m_v_dilated = multiplicity_count(&sv, &dilated);
    Ok(MultiplicityCheck {
        eps,
        m_v,
        m_w_dilated,
        m_w,
        m_v_dilated,
        holds_forward: m_v <= m_w_dilated,
        holds_backward: m_w <= m_v_dilated,
    })
}

/// `(b − a + 2γ) ε / (π (γ² − γ ε))`.
pub fn projector_perturbation_bound(a: f64, b: f64, gamma: f64, eps: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("need a < b, got a = {a}, b = {b}")));
    }
    if !(eps >= 0.0) || !(gamma > eps) {
        return Err(Error::InvalidParameter(format!(
            "need gamma > eps >= 0, got gamma = {gamma}, eps = {eps}"
        )));
    }
    if !(a + gamma < b - gamma) {
        return Err(Error::InvalidParameter(format!(
            "need a + gamma < b - gamma, got a = {a}, b = {b}, gamma = {gamma}"
        )));
    }
    Ok((b - a + 2.0 * gamma) * eps / (PI * (gamma * gamma - gamma * eps)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorCheck {
    /// `‖Π_{a,b}(V) − Π_{a,b}(W)‖`.
    pub lhs: f64,
    pub rhs: f64,
    pub eps: f64,
    pub holds: bool,
}

/// Absolute slack allowed on `lhs ≤ rhs`.
pub const PROJECTOR_CHECK_TOL: f64 = 1e-9;

/// Compares the projector difference with [`projector_perturbation_bound`]
/// after verifying that `V` has no eigenvalue within `γ` of `a` or `b`
/// and that `‖V − W‖ < γ`.
pub fn projector_lemma_check(
    v: &SymmetricMatrix,
    w: &SymmetricMatrix,
    a: f64,
    b: f64,
    gamma: f64,
) -> Result<ProjectorCheck> {
    v.check_same_order(w)?;
    if !(a + gamma < b - gamma) || !(gamma > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "need gamma > 0 and a + gamma < b - gamma, got a = {a}, b = {b}, gamma = {gamma}"
        )));
    }
    let sv = eigenvalues(v)?;
    if let Some(l) = sv
        .iter()
        .find(|&&l| (l - a).abs() < gamma || (l - b).abs() < gamma)
    {
        return Err(Error::HypothesisViolated(format!(
            "eigenvalue {l} of V lies within gamma = {gamma} of an endpoint"
        )));
    }
    let eps = spectral_norm(&(v - w))?;
    if !(eps < gamma) {
        return Err(Error::HypothesisViolated(format!(
            "||V - W|| = {eps} is not below gamma = {gamma}"
        )));
    }
    let pv = eigen_range_projector(v, a, b)?;
    let pw = eigen_range_projector(w, a, b)?;
    let lhs = spectral_norm(&(&pv.matrix - &pw.matrix))?;
    let rhs = projector_perturbation_bound(a, b, gamma, eps)?;
    Ok(ProjectorCheck {
        lhs,
        rhs,
        eps,
        holds: lhs <= rhs + PROJECTOR_CHECK_TOL,
    })
}

/// Distance below which a quadrature node counts as hitting an eigenvalue.
const SINGULAR_DISTANCE: f64 = 1e-8;

/// Nodes of the rectangle through `a ± iγ`, `b ± iγ` with trapezoid
/// weights `dz`, traversed counterclockwise. `quad_points` is the mean
/// number of nodes per side; the `4·quad_points` total is split in
/// proportion to side length with at least 16 per side.
fn rectangle_nodes(a: f64, b: f64, gamma: f64, quad_points: usize) -> Vec<((f64, f64), (f64, f64))> {
    let width = b - a;
    let height = 2.0 * gamma;
    let perimeter = 2.0 * (width + height);
    let total = 4 * quad_points;
    let count = |len: f64| ((total as f64 * len / perimeter).round() as usize).max(16);
    let (nw, nh) = (count(width), count(height));
    // Corners in counterclockwise order starting at the lower-left one.
    let corners = [(a, -gamma), (b, -gamma), (b, gamma), (a, gamma)];
    let counts = [nw, nh, nw, nh];
    let mut nodes = Vec::with_capacity(2 * (nw + nh));
    for side in 0..4 {
        let (x0, y0) = corners[side];
        let (x1, y1) = corners[(side + 1) % 4];
        let m = counts[side];
        let (dx, dy) = ((x1 - x0) / m as f64, (y1 - y0) / m as f64);
        for k in 0..=m {
            let half = if k == 0 || k == m { 0.5 } else { 1.0 };
            let z = (x0 + k as f64 * dx, y0 + k as f64 * dy);
            nodes.push((z, (half * dx, half * dy)));
        }
    }
    nodes
}

/// Spectral projector of `m` onto eigenvalues in `(a, b)`, computed as the
/// trapezoid-rule value of `(1/2πi) ∮ (zI − M)⁻¹ dz` over the rectangle
/// through `a ± iγ`, `b ± iγ`. The resolvent is applied through the
/// eigendecomposition, so each eigenvalue contributes a scalar integral.
pub fn contour_projector(
    m: &SymmetricMatrix,
    a: f64,
    b: f64,
    gamma: f64,
    quad_points: usize,
) -> Result<SymmetricMatrix> {
    if !(a < b) || !(gamma > 0.0) || !gamma.is_finite() || !(b - a).is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need a < b and gamma > 0, got a = {a}, b = {b}, gamma = {gamma}"
        )));
    }
    if quad_points < 16 {
        return Err(Error::InvalidParameter(format!(
            "need at least 16 quadrature points per side, got {quad_points}"
        )));
    }
    let eig = eig_sym(m)?;
    let nodes = rectangle_nodes(a, b, gamma, quad_points);
    let mut weights = Vec::with_capacity(eig.order());
    for &l in eig.values() {
        // Σ dz/(z − λ) accumulated in complex arithmetic; the result is
        // divided by 2πi, so only the imaginary part survives.
        let mut im = 0.0;
        for &((x, y), (dx, dy)) in &nodes {
            let (re, imz) = (x - l, y);
            let r2 = re * re + imz * imz;
            if r2.sqrt() < SINGULAR_DISTANCE {
                return Err(Error::SingularResolvent(l));
            }
            // (dx + i dy) / (re + i imz) = ((dx re + dy imz) + i(dy re − dx imz)) / r2
            im += (dy * re - dx * imz) / r2;
        }
        weights.push(im / (2.0 * PI));
    }
    Ok(eig.weighted_sum(&weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;

    fn diag(v: &[f64]) -> SymmetricMatrix {
        SymmetricMatrix::from_diagonal(v)
    }

    fn set(items: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::new(items.iter().copied()).unwrap()
    }

    #[test]
    fn multiplicity_count_examples() {
        assert_eq!(multiplicity_count(&[1.0, 1.0, 0.0], &set(&[(0.9, 1.1)])), 2);
        let everything = set(&[(f64::NEG_INFINITY, f64::INFINITY)]);
        assert_eq!(multiplicity_count(&[3.0, -7.0, 0.0, 1e300], &everything), 4);
        assert_eq!(multiplicity_count(&[-1.0, 0.0, 1.0], &set(&[(0.5, 2.0), (-2.0, -0.5)])), 2);
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(set(&[(0.0, 1.0)]).dilate(0.5).unwrap(), set(&[(-0.5, 1.5)]));
        let merged = set(&[(0.0, 1.0), (1.2, 2.0)]).dilate(0.2).unwrap();
        assert_eq!(merged.intervals().len(), 1);
        assert!((merged.intervals()[0].0 + 0.2).abs() < 1e-15);
        assert!((merged.intervals()[0].1 - 2.2).abs() < 1e-15);
        let s = set(&[(0.0, 1.0), (3.0, 4.0)]);
        assert_eq!(s.dilate(0.0).unwrap(), s);
        assert!(s.dilate(-1.0).is_err());
    }

    #[test]
    fn interval_set_normalizes() {
        let s = set(&[(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(s.intervals(), &[(0.0, 2.0), (3.0, 4.0)]);
        assert!(IntervalSet::new([(1.0, 0.0)]).is_err());
        assert_eq!(s.inf_abs(), 0.0);
        assert_eq!(set(&[(-3.0, -2.0), (1.5, 4.0)]).inf_abs(), 1.5);
        assert_eq!(IntervalSet::empty().inf_abs(), f64::INFINITY);
    }

    #[test]
    fn multiplicity_lemma_examples() {
        let v = diag(&[1.0, 1.0, 0.0]);
        let w = diag(&[1.05, 0.95, 0.0]);
        let s = set(&[(0.99, 1.01)]);
        let c = multiplicity_lemma_check(&v, &w, &s).unwrap();
        assert!((c.eps - 0.05).abs() < 1e-15);
        assert_eq!((c.m_v, c.m_w_dilated), (2, 2));
        assert!(c.holds_forward && c.holds_backward);

        let same = multiplicity_lemma_check(&v, &v, &s).unwrap();
        assert_eq!(same.eps, 0.0);
        assert_eq!(same.m_v, same.m_w_dilated);

        let near_zero = set(&[(0.01, 1.0)]);
        assert!(matches!(
            multiplicity_lemma_check(&v, &w, &near_zero),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn projector_bound_examples() {
        assert_eq!(projector_perturbation_bound(0.0, 1.0, 0.2, 0.0).unwrap(), 0.0);
        let v = projector_perturbation_bound(0.0, 1.0, 0.2, 0.1).unwrap();
        assert!((v - 0.14 / (0.02 * PI)).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..100 {
            let e = 0.2 * k as f64 / 100.0;
            let cur = projector_perturbation_bound(0.0, 1.0, 0.2, e).unwrap();
            assert!(cur > prev);
            prev = cur;
        }
        assert!(prev > 100.0);
        assert!(projector_perturbation_bound(0.0, 1.0, 0.2, 0.2).is_err());
        assert!(projector_perturbation_bound(0.0, 0.3, 0.2, 0.1).is_err());
    }

    #[test]
    fn projector_lemma_examples() {
        let v = diag(&[0.0, 1.0]);
        let same = projector_lemma_check(&v, &v, 0.5, 1.5, 0.4).unwrap();
        assert_eq!(same.lhs, 0.0);
        let w = diag(&[0.05, 1.0]);
        let c = projector_lemma_check(&v, &w, 0.5, 1.5, 0.4).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.rhs > 0.0 && c.holds);
        assert!(matches!(
            projector_lemma_check(&v, &w, 0.7, 1.7, 0.4),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn contour_projector_examples() {
        let m = diag(&[1.0, 3.0]);
        let p = contour_projector(&m, 0.5, 1.5, 0.4, 2000).unwrap();
        assert!((&p - &diag(&[1.0, 0.0])).max_abs() < 1e-6);

        let full = contour_projector(&m, 0.0, 4.0, 0.5, 2000).unwrap();
        assert!((&full - &SymmetricMatrix::identity(2)).max_abs() < 1e-6);

        let none = contour_projector(&m, 1.5, 2.5, 0.3, 2000).unwrap();
        assert!(none.max_abs() < 1e-6);
    }

    #[test]
    fn contour_projector_rejects_eigenvalue_on_contour() {
        let m = diag(&[1.0, 3.0]);
        assert!(matches!(
            contour_projector(&m, 1.0, 2.0, 0.5, 16),
            Err(Error::SingularResolvent(_))
        ));
    }

    #[test]
    fn contour_error_shrinks_with_nodes() {
        let m = SymmetricMatrix::from_rows(&[
            vec![1.0, 0.2, 0.0],
            vec![0.2, 2.0, 0.1],
            vec![0.0, 0.1, 4.0],
        ])
        .unwrap();
        let exact = eigen_range_projector(&m, 0.0, 2.5).unwrap().matrix;
        let err = |q| (&contour_projector(&m, 0.0, 2.5, 0.3, q).unwrap() - &exact).max_abs();
        let (coarse, fine) = (err(100), err(200));
        assert!(fine <= 0.5 * coarse, "{coarse} -> {fine}");
    }
}
