//! `H_n` and `E_n` written in coordinates.
//!
//! Step functions on the uniform grid with `n·k` fine cells are
//! represented in the orthonormal basis `φ_c = √(nk) 1_{cell c}`. Every
//! function in the range of `H_n` and every kernel operator built from a
//! step kernel of resolution `n` lives in this space, so the identities
//! between `H_n`, `E_n`, `A` and `T_𝒢` become finite matrix identities.
//! With `k = 4` all entries of `H_n` and `E_n` are exactly `1/2`.

use super::points::PointSample;
use super::step::graph_step_kernel;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{eig_sym, eigenvalues, SymmetricMatrix};

/// Dense row-major rectangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Rect {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_symmetric(m: &SymmetricMatrix) -> Self {
        Self { rows: m.order(), cols: m.order(), data: m.as_slice().to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Rect) -> Result<Rect> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { left: self.cols, right: other.rows });
        }
        let mut out = Rect::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[l * other.cols..(l + 1) * other.cols];
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += a * s);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Rect {
        let mut out = Rect::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Rect {
        Rect { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `max |self − other|`.
    pub fn max_abs_diff(&self, other: &Rect) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn identity(n: usize) -> Rect {
        let mut out = Rect::zeros(n, n);
        for i in 0..n {
            out.set(i, i, 1.0);
        }
        out
    }

    /// `Σ_ij self_ij other_ij`.
    pub fn frobenius_dot(&self, other: &Rect) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Symmetric matrix from a square `Rect` that is symmetric up to rounding.
    fn symmetrized(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.rows, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }
}

/// `H_n` and `E_n` for a point sample, on a grid refined `k` times.
#[derive(Clone, Debug)]
pub struct StepEmbedding {
    sigma: Vec<usize>,
    refinement: usize,
}

impl StepEmbedding {
    pub fn new(pts: &PointSample, refinement: usize) -> Result<Self> {
        if refinement == 0 {
            return Err(Error::InvalidParameter("refinement must be >= 1".into()));
        }
        Ok(Self { sigma: pts.sigma().to_vec(), refinement })
    }

    pub fn order(&self) -> usize {
        self.sigma.len()
    }

    pub fn fine_dimension(&self) -> usize {
        self.sigma.len() * self.refinement
    }

    /// `H_n e_i = √n 1_{cell σ(i)} = k^{−1/2} Σ_{c ⊂ cell σ(i)} φ_c`.
    pub fn h_matrix(&self) -> Rect {
        let k = self.refinement;
        let w = 1.0 / (k as f64).sqrt();
        let mut h = Rect::zeros(self.fine_dimension(), self.order());
        for (i, &cell) in self.sigma.iter().enumerate() {
            for c in cell * k..(cell + 1) * k {
                h.set(c, i, w);
            }
        }
        h
    }

    /// `(E_n f)_i = √n ∫_{cell σ(i)} f`; on the basis `φ_c` the integral
    /// of `φ_c` over its own cell is `(nk)^{−1/2}`.
    pub fn e_matrix(&self) -> Rect {
        let (n, k) = (self.order() as f64, self.refinement);
        let w = n.sqrt() / (n * k as f64).sqrt();
        let mut e = Rect::zeros(self.order(), self.fine_dimension());
        for (i, &cell) in self.sigma.iter().enumerate() {
            for c in cell * k..(cell + 1) * k {
                e.set(i, c, w);
            }
        }
        e
    }

    /// Matrix of the integral operator of a step kernel of resolution `n`:
    /// `⟨φ_c, T φ_d⟩ = values(c/k, d/k) / (nk)`.
    pub fn operator_matrix(&self, values: &SymmetricMatrix) -> Result<Rect> {
        if values.order() != self.order() {
            return Err(Error::DimensionMismatch { left: values.order(), right: self.order() });
        }
        let (k, dim) = (self.refinement, self.fine_dimension());
        let mut t = Rect::zeros(dim, dim);
        for c in 0..dim {
            for d in 0..dim {
                t.set(c, d, values.get(c / k, d / k) / dim as f64);
            }
        }
        Ok(t)
    }
}

/// Refinement used by the algebra checks; it makes `H_n` and `E_n` exact.
pub const DEFAULT_REFINEMENT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeAlgebraReport {
    /// `max |E_n H_n − I|`.
    pub identity_defect: f64,
    /// `max |(H_n E_n)² − H_n E_n|`.
    pub projector_defect: f64,
    /// `max |H_n E_n − (H_n E_n)ᵀ|`.
    pub projector_asymmetry: f64,
    /// `max |T_𝒢 − H_n A E_n / pn|` with `T_𝒢` built from the step kernel.
    pub operator_defect: f64,
    /// Number of distinct eigenvalues of `A`.
    pub eigenspaces: usize,
    /// `max_α |Q_α² − Q_α|` for `Q_α = H_n Π_α E_n`.
    pub family_idempotence: f64,
    /// `max_α |Q_α − Q_αᵀ|`.
    pub family_asymmetry: f64,
    /// `max_{α≠β} |Tr(Q_α Q_β)|`, the squared Frobenius norm of `Q_α Q_β`
    /// when both are orthogonal projectors.
    pub family_overlap: f64,
    /// Sorted-spectrum distance between `values(𝒢)/n` and `A/pn`.
    pub grid_spectrum_gap: f64,
    /// Sorted-spectrum distance between `T_𝒢` (padded spectrum of `A/pn`
    /// with `n(k − 1)` zeros) and the fine-grid operator matrix.
    pub operator_spectrum_gap: f64,
}

fn max_sorted_gap(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Realizes `H_n`, `E_n`, `T_𝒢` and the eigenspace family `H_n Π_α E_n`
/// of a sampled graph, and measures how far each identity is from exact.
pub fn he_algebra_check(g: &Graph, pts: &PointSample, p: f64, refinement: usize) -> Result<HeAlgebraReport> {
    let emb = StepEmbedding::new(pts, refinement)?;
    let n = emb.order();
    let sk = graph_step_kernel(g, pts, p)?;
    let h = emb.h_matrix();
    let e = emb.e_matrix();

    let eh = e.mul(&h)?;
    let identity_defect = eh.max_abs_diff(&Rect::identity(n));
    let he = h.mul(&e)?;
    let projector_defect = he.mul(&he)?.max_abs_diff(&he);
    let projector_asymmetry = he.max_abs_diff(&he.transpose());

    let a = g.adjacency();
    let pn = p * n as f64;
    let t_graph = emb.operator_matrix(sk.values())?;
    let t_from_a = h.mul(&Rect::from_symmetric(&a))?.mul(&e)?.scale(1.0 / pn);
    let operator_defect = t_graph.max_abs_diff(&t_from_a);

    // Eigenspaces of A, grouping eigenvalues that agree to rounding.
    let eig = eig_sym(&a)?;
    let vals = eig.values();
    let tol = 1e-9 * vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (idx, &l) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(grp) if (l - vals[*grp.last().expect("nonempty")]).abs() <= tol => grp.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    let projectors: Vec<Rect> = groups
        .iter()
        .map(|grp| {
            let mut pi = Rect::zeros(n, n);
            for &idx in grp {
                let v = eig.vector(idx);
                for i in 0..n {
                    for j in 0..n {
                        pi.data[i * n + j] += v[i] * v[j];
                    }
                }
            }
            pi
        })
        .collect();
    let mut family_idempotence: f64 = 0.0;
    let mut family_asymmetry: f64 = 0.0;
    let mut family = Vec::with_capacity(projectors.len());
    for pi in &projectors {
        let q = h.mul(pi)?.mul(&e)?;
        // (H Π E)(H Π E) evaluated as H (Π (E H) Π) E.
        let q2 = h.mul(&pi.mul(&eh)?.mul(pi)?)?.mul(&e)?;
        family_idempotence = family_idempotence.max(q2.max_abs_diff(&q));
        family_asymmetry = family_asymmetry.max(q.max_abs_diff(&q.transpose()));
        family.push(q);
    }
    let mut family_overlap: f64 = 0.0;
    for x in 0..family.len() {
        for y in x + 1..family.len() {
            family_overlap = family_overlap.max(family[x].frobenius_dot(&family[y]).abs());
        }
    }

    let mut scaled: Vec<f64> = vals.iter().map(|v| v / pn).collect();
    let mut grid: Vec<f64> = eigenvalues(sk.values())?.iter().map(|v| v / n as f64).collect();
    let grid_spectrum_gap = max_sorted_gap(&mut scaled, &mut grid);
    let mut padded = scaled.clone();
    padded.resize(emb.fine_dimension(), 0.0);
    let mut fine = eigenvalues(&t_graph.symmetrized())?;
    let operator_spectrum_gap = max_sorted_gap(&mut padded, &mut fine);

    Ok(HeAlgebraReport {
        identity_defect,
        projector_defect,
        projector_asymmetry,
        operator_defect,
        eigenspaces: groups.len(),
        family_idempotence,
        family_asymmetry,
        family_overlap,
        grid_spectrum_gap,
        operator_spectrum_gap,
    })
}
