//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicitly shifted QL iterations.
//!
//! The reduction works on the lower triangle of a row-major copy so that
//! every inner loop (the symmetric matrix-vector product and the rank-two
//! update) runs over contiguous memory. Eigenvectors are optional; the
//! eigenvalue-only path never forms the orthogonal factor.

use crate::error::{Error, Result};
use crate::linalg::matrix::{axpy, dot, SymmetricMatrix};

/// Ascending eigenvalues with orthonormal eigenvectors.
///
/// Eigenvector `k` is stored as row `k` of `vectors`, so `A v_k = λ_k v_k`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    n: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `Σ_k w_k v_k v_kᵀ`; terms with zero weight are skipped.
    pub fn weighted_sum(&self, weights: &[f64]) -> SymmetricMatrix {
        assert_eq!(weights.len(), self.n);
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                let a = w * v[i];
                if a != 0.0 {
                    axpy(a, &v[i..], &mut data[i * n + i..(i + 1) * n]);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        SymmetricMatrix::from_row_major(n, data).expect("finite weighted spectral sum")
    }

    /// `f(A) = Σ_k f(λ_k) v_k v_kᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let w: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.weighted_sum(&w)
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.weighted_sum(&self.values.clone())
    }

    /// `‖VᵀV − I‖_max`, a cheap orthonormality diagnostic.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.n {
            for b in a..self.n {
                let g = dot(self.vector(a), self.vector(b));
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Eigenvalue tolerance used by invariant checks: `1e-10 · max(1, ‖A‖_F)`.
pub fn eig_tolerance(a: &SymmetricMatrix) -> f64 {
    1e-10 * a.frobenius_norm().max(1.0)
}

pub fn eig_sym(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    a.check_finite()?;
    let n = a.order();
    let reduced = tridiagonalize(a, true);
    let mut vt = reduced.orthogonal_factor_transposed();
    let mut d = reduced.diag;
    let mut e = reduced.off;
    ql_implicit(&mut d, &mut e, Some((&mut vt, n)))?;

    let order = ascending_order(&d);
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend_from_slice(&vt[k * n..(k + 1) * n]);
    }
    Ok(SpectralDecomposition { n, values, vectors })
}

/// Ascending eigenvalues only. Much cheaper than [`eig_sym`] for large `n`.
pub fn eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    a.check_finite()?;
    let reduced = tridiagonalize(a, false);
    let mut d = reduced.diag;
    let mut e = reduced.off;
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    idx
}

struct Reflector {
    // Acts on coordinates `start..n` as `I − beta v vᵀ`.
    start: usize,
    beta: f64,
    v: Vec<f64>,
}

struct Tridiagonal {
    n: usize,
    diag: Vec<f64>,
    // off[i] couples i and i+1; off[n-1] is unused and zero.
    off: Vec<f64>,
    reflectors: Vec<Reflector>,
}

impl Tridiagonal {
    /// `Qᵀ = H_{m}⋯H_0` where `A = Q T Qᵀ`.
    fn orthogonal_factor_transposed(&self) -> Vec<f64> {
        let n = self.n;
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        let mut r = vec![0.0; n];
        for h in &self.reflectors {
            r.iter_mut().for_each(|x| *x = 0.0);
            for (t, &vt) in h.v.iter().enumerate() {
                let row = h.start + t;
                axpy(vt, &q[row * n..(row + 1) * n], &mut r);
            }
            for (t, &vt) in h.v.iter().enumerate() {
                let row = h.start + t;
                axpy(-h.beta * vt, &r, &mut q[row * n..(row + 1) * n]);
            }
        }
        q
    }
}

fn tridiagonalize(a: &SymmetricMatrix, keep_reflectors: bool) -> Tridiagonal {
    let n = a.order();
    let mut w = a.as_slice().to_vec();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut reflectors = Vec::new();

    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let m = n - start;
        let v = &mut v[..m];
        let p = &mut p[..m];
        for t in 0..m {
            v[t] = w[(start + t) * n + k];
        }
        let norm = v.iter().fold(0.0f64, |acc, x| acc.hypot(*x));
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let beta = 2.0 / dot(v, v);
        off[k] = alpha;

        // p = beta · B v over the trailing block, using its lower triangle.
        p.iter_mut().for_each(|x| *x = 0.0);
        for t in 0..m {
            let row = &w[(start + t) * n + start..(start + t) * n + start + t + 1];
            let (strict, last) = row.split_at(t);
            p[t] += dot(strict, &v[..t]) + last[0] * v[t];
            axpy(v[t], strict, &mut p[..t]);
        }
        p.iter_mut().for_each(|x| *x *= beta);
        let kfac = 0.5 * beta * dot(p, v);
        for t in 0..m {
            p[t] -= kfac * v[t];
        }
        // B -= v pᵀ + p vᵀ on the lower triangle.
        for t in 0..m {
            let (vt, pt) = (v[t], p[t]);
            let row = &mut w[(start + t) * n + start..(start + t) * n + start + t + 1];
            for ((b, &vs), &ps) in row.iter_mut().zip(&v[..=t]).zip(&p[..=t]) {
                *b -= vt * ps + pt * vs;
            }
        }
        if keep_reflectors {
            reflectors.push(Reflector {
                start,
                beta,
                v: v.to_vec(),
            });
        }
    }
    for i in 0..n {
        diag[i] = w[i * n + i];
    }
    if n >= 2 {
        off[n - 2] = w[(n - 1) * n + n - 2];
    }
    Tridiagonal {
        n,
        diag,
        off,
        reflectors,
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. When `vt` is given, the
/// rotations are applied to its rows (row `k` tracks eigenvector `k`).
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut vt: Option<(&mut Vec<f64>, usize)>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let cap = 64 * n.max(1);
    let mut iterations = 0usize;
    e[n - 1] = 0.0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > cap {
                return Err(Error::ConvergenceFailure(cap));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some((ref mut z, nz)) = vt {
                    let (head, tail) = z.split_at_mut((i + 1) * nz);
                    let row_i = &mut head[i * nz..];
                    let row_next = &mut tail[..nz];
                    for (zi, zn) in row_i.iter_mut().zip(row_next.iter_mut()) {
                        let f = *zn;
                        *zn = s * *zi + c * f;
                        *zi = c * *zi - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
