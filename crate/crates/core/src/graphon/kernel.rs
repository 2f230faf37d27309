use crate::error::{Error, Result};
use crate::linalg::{eig_sym, SymmetricMatrix};

/// Kernels with a closed-form expression whose integrals are computed by
/// quadrature.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothKind {
    /// `exp(−(x − y)² / 2h²)`.
    Gaussian { bandwidth: f64 },
    /// `scale · (1 + cos π(x − y)) / 2`.
    Cosine { scale: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelKind {
    Constant(f64),
    /// `coef · x^exponent · y^exponent`.
    RankOneProduct { coef: f64, exponent: f64 },
    /// Value `values[r][s]` on `(r/k, (r+1)/k] × (s/k, (s+1)/k]`.
    Block(Vec<Vec<f64>>),
    Smooth(SmoothKind),
}

/// Symmetric bounded nonnegative kernel on `[0, 1]²` with its sup bound `K`
/// and, when known, a Lipschitz constant for the Euclidean metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    sup_bound: f64,
    lipschitz: Option<f64>,
}

/// One point of the spectrum of `T_κ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub value: f64,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(usize),
    Infinite,
}

/// Side of the evaluation grid used to validate `0 ≤ κ ≤ K`.
pub const VALIDATION_GRID: usize = 1000;

// Gauss–Legendre nodes and weights of order 8 on [−1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Order-8 Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub(crate) fn gauss_legendre(a: f64, b: f64) -> [(f64, f64); 8] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 8];
    for k in 0..4 {
        out[2 * k] = (mid - half * GL_NODES[k], half * GL_WEIGHTS[k]);
        out[2 * k + 1] = (mid + half * GL_NODES[k], half * GL_WEIGHTS[k]);
    }
    out
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

impl Kernel {
    /// Builds a kernel with its analytic sup bound and Lipschitz constant.
    pub fn new(kind: KernelKind) -> Result<Self> {
        let (sup_bound, lipschitz) = match &kind {
            KernelKind::Constant(c) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(invalid(format!("constant kernel needs c >= 0, got {c}")));
                }
                (*c, Some(0.0))
            }
            KernelKind::RankOneProduct { coef, exponent } => {
                if !(coef.is_finite() && *coef >= 0.0) || !(exponent.is_finite() && *exponent >= 0.0) {
                    return Err(invalid(format!(
                        "rank-one kernel needs coef >= 0 and exponent >= 0, got {coef} and {exponent}"
                    )));
                }
                // The gradient is largest at (1, 1) when exponent >= 1 and
                // unbounded near the axes when 0 < exponent < 1.
                let lip = if *exponent == 0.0 || *coef == 0.0 {
                    Some(0.0)
                } else if *exponent >= 1.0 {
                    Some(coef * exponent * std::f64::consts::SQRT_2)
                } else {
                    None
                };
                (*coef, lip)
            }
            KernelKind::Block(rows) => {
                let k = rows.len();
                if k == 0 || rows.iter().any(|r| r.len() != k) {
                    return Err(invalid("block kernel needs a nonempty square matrix".into()));
                }
                let mut top: f64 = 0.0;
                for (r, row) in rows.iter().enumerate() {
                    for (s, &v) in row.iter().enumerate() {
                        if !(v.is_finite() && v >= 0.0) {
                            return Err(invalid(format!("block value ({r}, {s}) = {v} must be finite and >= 0")));
                        }
                        if v != rows[s][r] {
                            return Err(Error::NotSymmetric { row: r, col: s });
                        }
                        top = top.max(v);
                    }
                }
                let flat = rows.iter().flatten().all(|&v| v == rows[0][0]);
                (top, if flat { Some(0.0) } else { None })
            }
            KernelKind::Smooth(SmoothKind::Gaussian { bandwidth }) => {
                if !(bandwidth.is_finite() && *bandwidth > 0.0) {
                    return Err(invalid(format!("gaussian bandwidth must be > 0, got {bandwidth}")));
                }
                // |∂κ/∂x| peaks at |x − y| = h with value e^{−1/2}/h.
                (1.0, Some(std::f64::consts::SQRT_2 * (-0.5f64).exp() / bandwidth))
            }
            KernelKind::Smooth(SmoothKind::Cosine { scale }) => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return Err(invalid(format!("cosine scale must be >= 0, got {scale}")));
                }
                (*scale, Some(std::f64::consts::SQRT_2 * std::f64::consts::PI * scale / 2.0))
            }
        };
        let kernel = Self { kind, sup_bound, lipschitz };
        kernel.validate_on_grid(sup_bound)?;
        Ok(kernel)
    }

    /// Like [`Kernel::new`] with caller-supplied `K` and optional `L`.
    /// `K` must dominate the kernel on the validation grid.
    pub fn with_bounds(kind: KernelKind, sup_bound: f64, lipschitz: Option<f64>) -> Result<Self> {
        if !(sup_bound.is_finite() && sup_bound >= 0.0) {
            return Err(invalid(format!("sup bound must be finite and >= 0, got {sup_bound}")));
        }
        if let Some(l) = lipschitz {
            if !(l.is_finite() && l >= 0.0) {
                return Err(invalid(format!("lipschitz constant must be finite and >= 0, got {l}")));
            }
        }
        let mut kernel = Self::new(kind)?;
        kernel.validate_on_grid(sup_bound)?;
        kernel.sup_bound = sup_bound;
        if lipschitz.is_some() {
            kernel.lipschitz = lipschitz;
        }
        Ok(kernel)
    }

    fn validate_on_grid(&self, sup_bound: f64) -> Result<()> {
        let m = VALIDATION_GRID;
        let step = 1.0 / (m - 1) as f64;
        for i in 0..m {
            let x = i as f64 * step;
            for j in i..m {
                let v = self.eval(x, j as f64 * step);
                if !(v >= 0.0 && v <= sup_bound) {
                    return Err(invalid(format!(
                        "kernel value {v} at ({x}, {}) outside [0, {sup_bound}]",
                        j as f64 * step
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    /// `K = sup κ`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            KernelKind::Constant(c) => *c,
            KernelKind::RankOneProduct { coef, exponent } => coef * x.powf(*exponent) * y.powf(*exponent),
            KernelKind::Block(rows) => {
                let k = rows.len();
                rows[block_index(x, k)][block_index(y, k)]
            }
            KernelKind::Smooth(SmoothKind::Gaussian { bandwidth }) => {
                let d = (x - y) / bandwidth;
                (-0.5 * d * d).exp()
            }
            KernelKind::Smooth(SmoothKind::Cosine { scale }) => {
                scale * (1.0 + (std::f64::consts::PI * (x - y)).cos()) / 2.0
            }
        }
    }

    /// `∫_{x0}^{x1} ∫_{y0}^{y1} κ`; closed form where available, otherwise
    /// order-8 Gauss–Legendre in each axis.
    pub fn integrate(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
        match &self.kind {
            KernelKind::Constant(c) => Ok(c * (x1 - x0) * (y1 - y0)),
            KernelKind::RankOneProduct { coef, exponent } => {
                let e = exponent + 1.0;
                let prim = |a: f64, b: f64| (b.powf(e) - a.powf(e)) / e;
                Ok(coef * prim(x0, x1) * prim(y0, y1))
            }
            KernelKind::Block(rows) => {
                let k = rows.len();
                let wx = block_overlaps(x0, x1, k);
                let wy = block_overlaps(y0, y1, k);
                let mut total = 0.0;
                for (r, &a) in wx.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for (s, &b) in wy.iter().enumerate() {
                        if b != 0.0 {
                            total += rows[r][s] * a * b;
                        }
                    }
                }
                Ok(total)
            }
            KernelKind::Smooth(_) => self.integrate_quadrature(x0, x1, y0, y1),
        }
    }

    /// Average of `κ` over the rectangle. For block kernels on cells that
    /// sit inside one block this is exactly that block's value.
    pub fn cell_average(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
        if let KernelKind::Block(rows) = &self.kind {
            let k = rows.len();
            let wx = block_overlaps(x0, x1, k);
            let wy = block_overlaps(y0, y1, k);
            let (dx, dy) = (x1 - x0, y1 - y0);
            let mut total = 0.0;
            for (r, &a) in wx.iter().enumerate() {
                for (s, &b) in wy.iter().enumerate() {
                    if a != 0.0 && b != 0.0 {
                        total += rows[r][s] * (a / dx) * (b / dy);
                    }
                }
            }
            return Ok(total);
        }
        Ok(self.integrate(x0, x1, y0, y1)? / ((x1 - x0) * (y1 - y0)))
    }

    /// Tensor Gauss–Legendre of order 8 on the rectangle.
    pub fn integrate_quadrature(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
        let gx = gauss_legendre(x0, x1);
        let gy = gauss_legendre(y0, y1);
        let mut total = 0.0;
        for &(x, wx) in &gx {
            for &(y, wy) in &gy {
                let v = self.eval(x, y);
                if !v.is_finite() {
                    return Err(Error::QuadratureFailure { x, y });
                }
                total += wx * wy * v;
            }
        }
        Ok(total)
    }

    /// `∫∫ κ²`.
    pub fn l2_norm_squared(&self) -> Result<f64> {
        match &self.kind {
            KernelKind::Constant(c) => Ok(c * c),
            KernelKind::RankOneProduct { coef, exponent } => {
                let m = 2.0 * exponent + 1.0;
                Ok(coef * coef / (m * m))
            }
            KernelKind::Block(rows) => {
                let k = rows.len() as f64;
                Ok(rows.iter().flatten().map(|v| v * v).sum::<f64>() / (k * k))
            }
            KernelKind::Smooth(_) => {
                let cells = 64;
                let h = 1.0 / cells as f64;
                let mut total = 0.0;
                for i in 0..cells {
                    for j in 0..cells {
                        let gx = gauss_legendre(i as f64 * h, (i + 1) as f64 * h);
                        let gy = gauss_legendre(j as f64 * h, (j + 1) as f64 * h);
                        for &(x, wx) in &gx {
                            for &(y, wy) in &gy {
                                let v = self.eval(x, y);
                                if !v.is_finite() {
                                    return Err(Error::QuadratureFailure { x, y });
                                }
                                total += wx * wy * v * v;
                            }
                        }
                    }
                }
                Ok(total)
            }
        }
    }

    /// Spectrum of `T_κ` for the closed-form families. Nonzero eigenvalues
    /// come first in decreasing order, followed by `0` with infinite
    /// multiplicity.
    pub fn reference_spectrum(&self) -> Result<Vec<SpectralPoint>> {
        let mut points = Vec::new();
        match &self.kind {
            KernelKind::Constant(c) => {
                if *c != 0.0 {
                    points.push(SpectralPoint { value: *c, multiplicity: Multiplicity::Finite(1) });
                }
            }
            KernelKind::RankOneProduct { coef, exponent } => {
                if *coef != 0.0 {
                    points.push(SpectralPoint {
                        value: coef / (2.0 * exponent + 1.0),
                        multiplicity: Multiplicity::Finite(1),
                    });
                }
            }
            KernelKind::Block(_) => {
                for (value, vectors) in self.block_eigenspaces()? {
                    points.push(SpectralPoint { value, multiplicity: Multiplicity::Finite(vectors.len()) });
                }
            }
            KernelKind::Smooth(_) => {
                return Err(Error::Unsupported("no closed-form spectrum for smooth kernels".into()));
            }
        }
        points.sort_by(|a, b| b.value.total_cmp(&a.value));
        points.push(SpectralPoint { value: 0.0, multiplicity: Multiplicity::Infinite });
        Ok(points)
    }

    /// Nonzero eigenvalues of `M/k` grouped with their orthonormal
    /// eigenvectors in `ℝ^k`.
    pub(crate) fn block_eigenspaces(&self) -> Result<Vec<(f64, Vec<Vec<f64>>)>> {
        let KernelKind::Block(rows) = &self.kind else {
            return Err(Error::Unsupported("not a block kernel".into()));
        };
        let k = rows.len();
        let m = SymmetricMatrix::from_rows(rows)?.scale(1.0 / k as f64);
        let eig = eig_sym(&m)?;
        let tol = 1e-12 * m.max_abs().max(1.0);
        let mut groups: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
        for (idx, &l) in eig.values().iter().enumerate() {
            if l.abs() <= tol {
                continue;
            }
            match groups.last_mut() {
                Some((v, vecs)) if (l - *v).abs() <= tol => vecs.push(eig.vector(idx).to_vec()),
                _ => groups.push((l, vec![eig.vector(idx).to_vec()])),
            }
        }
        Ok(groups)
    }

    /// `∫_{x0}^{x1} φ` for an orthonormal basis `φ` of the eigenspace of the
    /// nonzero reference eigenvalue `alpha` (matched within `1e-9`).
    pub(crate) fn eigenfunction_integrals(&self, alpha: f64) -> Result<Vec<Box<dyn Fn(f64, f64) -> f64 + '_>>> {
        let close = |v: f64| (v - alpha).abs() <= 1e-9 * alpha.abs().max(1.0);
        match &self.kind {
            KernelKind::Constant(c) if *c != 0.0 && close(*c) => Ok(vec![Box::new(|a: f64, b: f64| b - a)]),
            KernelKind::RankOneProduct { coef, exponent } if *coef != 0.0 && close(coef / (2.0 * exponent + 1.0)) => {
                // φ(x) = √(2a + 1) x^a.
                let e = exponent + 1.0;
                let norm = (2.0 * exponent + 1.0).sqrt();
                Ok(vec![Box::new(move |a: f64, b: f64| norm * (b.powf(e) - a.powf(e)) / e)])
            }
            KernelKind::Block(rows) => {
                let k = rows.len();
                let space = self
                    .block_eigenspaces()?
                    .into_iter()
                    .find(|(v, _)| close(*v))
                    .ok_or_else(|| invalid(format!("{alpha} is not an eigenvalue of the kernel")))?;
                let root = (k as f64).sqrt();
                Ok(space
                    .1
                    .into_iter()
                    .map(|u| {
                        // φ = Σ_r u_r √k 1_{block r}.
                        Box::new(move |a: f64, b: f64| {
                            block_overlaps(a, b, k).iter().zip(&u).map(|(w, ur)| ur * root * w).sum()
                        }) as Box<dyn Fn(f64, f64) -> f64>
                    })
                    .collect())
            }
            KernelKind::Smooth(_) => Err(Error::Unsupported("no closed-form eigenfunctions for smooth kernels".into())),
            _ => Err(invalid(format!("{alpha} is not a nonzero eigenvalue of the kernel"))),
        }
    }
}

fn block_index(x: f64, k: usize) -> usize {
    // Blocks are left-open, so x = r/k belongs to block r − 1.
    let scaled = x * k as f64;
    let idx = scaled.ceil() as usize;
    idx.clamp(1, k) - 1
}

/// `|[x0, x1] ∩ [r/k, (r+1)/k]|` for each block `r`.
fn block_overlaps(x0: f64, x1: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|r| {
            let lo = x0.max(r as f64 / k as f64);
            let hi = x1.min((r + 1) as f64 / k as f64);
            (hi - lo).max(0.0)
        })
        .collect()
}
