use super::kernel::Kernel;
use super::points::PointSample;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{spectral_norm, SymmetricMatrix};

/// Function on `[0, 1]²` constant on the cells of the uniform `n × n` grid;
/// `values(r, s)` is its value on `(r/n, (r+1)/n] × (s/n, (s+1)/n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepKernel {
    values: SymmetricMatrix,
}

/// Largest resolution accepted by [`cut_norm_step`].
pub const CUT_NORM_MAX_ORDER: usize = 24;

impl StepKernel {
    pub fn new(values: SymmetricMatrix) -> Self {
        Self { values }
    }

    pub fn resolution(&self) -> usize {
        self.values.order()
    }

    pub fn values(&self) -> &SymmetricMatrix {
        &self.values
    }

    /// `∫∫ η² = mean of squared values`.
    pub fn l2_norm_squared(&self) -> f64 {
        let n = self.resolution() as f64;
        self.values.as_slice().iter().map(|v| v * v).sum::<f64>() / (n * n)
    }

    /// `∫∫ |η|`.
    pub fn l1_norm(&self) -> f64 {
        let n = self.resolution() as f64;
        self.values.as_slice().iter().map(|v| v.abs()).sum::<f64>() / (n * n)
    }
}

/// Grid with `1/p` on the cells `(σ(i), σ(j))` of edges `ij`, else `0`.
pub fn graph_step_kernel(g: &Graph, pts: &PointSample, p: f64) -> Result<StepKernel> {
    if g.order() != pts.len() {
        return Err(Error::DimensionMismatch { left: g.order(), right: pts.len() });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    let sigma = pts.sigma();
    let mut values = SymmetricMatrix::zeros(g.order());
    let weight = 1.0 / p;
    for (i, j) in g.edges() {
        values.set(sigma[i], sigma[j], weight);
    }
    Ok(StepKernel { values })
}

/// Cell averages of `κ` on the uniform `n × n` grid (the orthogonal
/// projection of `κ` onto step functions).
pub fn kernel_step_kernel(kernel: &Kernel, n: usize) -> Result<StepKernel> {
    if n == 0 {
        return Err(Error::InvalidParameter("resolution must be >= 1".into()));
    }
    let edges: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mut values = SymmetricMatrix::zeros(n);
    for r in 0..n {
        for s in r..n {
            let v = kernel.cell_average(edges[r], edges[r + 1], edges[s], edges[s + 1])?;
            values.set(r, s, v);
        }
    }
    Ok(StepKernel { values })
}

/// `‖T_η‖_{L²→L²}` of a step kernel, equal to `‖values‖ / n`.
pub fn step_operator_norm(sk: &StepKernel) -> Result<f64> {
    Ok(spectral_norm(&sk.values)? / sk.resolution() as f64)
}

/// Matrix of `E_n T_κ H_n`: entry `(i, j)` is `n ∫∫` of `κ` over the cells
/// of `σ(i)` and `σ(j)`, which is the cell average divided by `n`.
pub fn embed_matrix(kernel: &Kernel, pts: &PointSample) -> Result<SymmetricMatrix> {
    let grid = kernel_step_kernel(kernel, pts.len())?;
    Ok(embed_from_grid(&grid, pts))
}

/// `values(σ(i), σ(j)) / n` in the original vertex labels.
pub fn embed_from_grid(grid: &StepKernel, pts: &PointSample) -> SymmetricMatrix {
    let n = grid.resolution();
    let sigma = pts.sigma();
    SymmetricMatrix::from_fn(n, |i, j| grid.values.get(sigma[i], sigma[j]) / n as f64)
}

/// `‖κ − κ̄_n‖_{L²}` where `κ̄_n` is the grid average of `κ`, from
/// `‖κ‖² − ‖κ̄_n‖²` (Pythagoras for the orthogonal projection).
pub fn discretization_remainder(kernel: &Kernel, grid: &StepKernel) -> Result<f64> {
    Ok((kernel.l2_norm_squared()? - grid.l2_norm_squared()).max(0.0).sqrt())
}

/// `‖η‖_{cut,2} = sup_{A,B} |∫_{A×B} η|`, exactly, by enumerating row sets
/// `S` in Gray-code order; for fixed `S` the best column set keeps the
/// columns whose sum over `S` has the wanted sign.
pub fn cut_norm_step(sk: &StepKernel) -> Result<f64> {
    let n = sk.resolution();
    if n > CUT_NORM_MAX_ORDER {
        return Err(Error::TooLarge { size: n, limit: CUT_NORM_MAX_ORDER });
    }
    let mut columns = vec![0.0; n];
    let mut members: u32 = 0;
    let mut best: f64 = 0.0;
    for step in 1u32..(1u32 << n) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u32 << v;
        let row = sk.values.row(v);
        if members & bit == 0 {
            members |= bit;
            columns.iter_mut().zip(row).for_each(|(c, x)| *c += x);
        } else {
            members &= !bit;
            columns.iter_mut().zip(row).for_each(|(c, x)| *c -= x);
        }
        let (pos, neg) = columns.iter().fold((0.0, 0.0), |(p, q), &c| {
            if c > 0.0 {
                (p + c, q)
            } else {
                (p, q - c)
            }
        });
        best = best.max(pos).max(neg);
    }
    let nn = (n * n) as f64;
    Ok(best / nn)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSandwich {
    /// `‖η‖_{cut,2}`.
    pub cut2: f64,
    /// Interval `[cut2, 4·cut2]` known to contain `‖η‖_cut`.
    pub cut_bounds: (f64, f64),
    /// `‖T_η‖_{L²→L²}`.
    pub op: f64,
    /// `op ≥ cut2` up to `1e-12·max(1, op)`.
    pub op_dominates: bool,
}

pub fn norm_sandwich_check(sk: &StepKernel) -> Result<NormSandwich> {
    let cut2 = cut_norm_step(sk)?;
    let op = step_operator_norm(sk)?;
    Ok(NormSandwich {
        cut2,
        cut_bounds: (cut2, 4.0 * cut2),
        op,
        op_dominates: op >= cut2 - 1e-12 * op.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::super::kernel::KernelKind;
    use super::super::points::sample_points;
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn grid(rows: &[Vec<f64>]) -> StepKernel {
        StepKernel::new(SymmetricMatrix::from_rows(rows).unwrap())
    }

    fn random_grid(rng: &mut SmallRng, n: usize, pm_one: bool) -> StepKernel {
        StepKernel::new(SymmetricMatrix::from_fn(n, |_, _| {
            if pm_one {
                if rng.random::<bool>() { 1.0 } else { -1.0 }
            } else {
                rng.random_range(-3i32..=3) as f64
            }
        }))
    }

    /// Definitional maximum over all row and column subsets.
    fn brute_cut(sk: &StepKernel) -> f64 {
        let n = sk.resolution();
        let v = sk.values();
        let mut best: f64 = 0.0;
        for s in 0u32..(1 << n) {
            for w in 0u32..(1 << n) {
                let mut total = 0.0;
                for i in (0..n).filter(|i| s >> i & 1 == 1) {
                    for j in (0..n).filter(|j| w >> j & 1 == 1) {
                        total += v.get(i, j);
                    }
                }
                best = best.max(total.abs());
            }
        }
        best / (n * n) as f64
    }

    #[test]
    fn graph_step_kernel_examples() {
        let pts = sample_points(4, 5).unwrap();
        let empty = graph_step_kernel(&Graph::new(4), &pts, 0.5).unwrap();
        assert_eq!(empty.values().max_abs(), 0.0);

        let mut full = Graph::complete(4);
        for i in 0..4 {
            full.add_edge(i, i).unwrap();
        }
        let all = graph_step_kernel(&full, &pts, 0.25).unwrap();
        assert!(all.values().as_slice().iter().all(|&v| v == 4.0));

        let ordered = PointSample::from_raw(vec![0.1, 0.6]).unwrap();
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        let sk = graph_step_kernel(&edge, &ordered, 0.5).unwrap();
        assert_eq!(sk.values(), &SymmetricMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap());

        assert!(matches!(
            graph_step_kernel(&edge, &pts, 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((step_operator_norm(&grid(&[vec![1.0; 3], vec![1.0; 3], vec![1.0; 3]])).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(step_operator_norm(&StepKernel::new(SymmetricMatrix::zeros(5))).unwrap(), 0.0);
        let mut rng = SmallRng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.random_range(1..30);
            let sk = StepKernel::new(SymmetricMatrix::from_fn(n, |_, _| rng.random::<f64>() * 4.0 - 2.0));
            let op = step_operator_norm(&sk).unwrap();
            assert!(op * op <= sk.l2_norm_squared() + 1e-12);
        }
    }

    #[test]
    fn embed_constant_is_c_over_n() {
        let k = Kernel::new(KernelKind::Constant(0.6)).unwrap();
        let pts = sample_points(7, 1).unwrap();
        let e = embed_matrix(&k, &pts).unwrap();
        for &v in e.as_slice() {
            assert!((v - 0.6 / 7.0).abs() < 1e-16);
        }
    }

    #[test]
    fn embed_rank_one_closed_form() {
        // n = 2, κ = 4xy: cell averages 4·(1/4)(1/4), 4·(1/4)(3/4), 4·(3/4)(3/4).
        let k = Kernel::new(KernelKind::RankOneProduct { coef: 4.0, exponent: 1.0 }).unwrap();
        let pts = PointSample::from_raw(vec![0.9, 0.2]).unwrap();
        let e = embed_matrix(&k, &pts).unwrap();
        assert!((e.get(1, 1) - 0.25 / 2.0).abs() < 1e-15);
        assert!((e.get(0, 1) - 0.75 / 2.0).abs() < 1e-15);
        assert!((e.get(0, 0) - 2.25 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn aligned_block_kernel_is_reproduced_exactly() {
        let m = vec![vec![0.8, 0.2, 0.1], vec![0.2, 0.7, 0.3], vec![0.1, 0.3, 0.9]];
        let k = Kernel::new(KernelKind::Block(m.clone())).unwrap();
        for n in [3, 6, 9, 12, 30, 48] {
            let g = kernel_step_kernel(&k, n).unwrap();
            for r in 0..n {
                for s in 0..n {
                    assert_eq!(g.values().get(r, s), m[r * 3 / n][s * 3 / n], "n = {n}");
                }
            }
            assert!(discretization_remainder(&k, &g).unwrap() < 1e-7);
        }
    }

    #[test]
    fn remainder_shrinks_for_smooth_kernels() {
        let k = Kernel::new(KernelKind::RankOneProduct { coef: 4.0, exponent: 1.0 }).unwrap();
        let r = |n| discretization_remainder(&k, &kernel_step_kernel(&k, n).unwrap()).unwrap();
        let (a, b) = (r(10), r(20));
        assert!(b < 0.6 * a && a > 0.0, "{a} {b}");
    }

    #[test]
    fn cut_norm_examples() {
        let c = 0.7;
        assert!((cut_norm_step(&grid(&[vec![c; 4], vec![c; 4], vec![c; 4], vec![c; 4]])).unwrap() - c).abs() < 1e-15);
        assert_eq!(cut_norm_step(&grid(&[vec![1.0, -1.0], vec![-1.0, 1.0]])).unwrap(), 0.25);
        assert!(matches!(
            cut_norm_step(&StepKernel::new(SymmetricMatrix::zeros(25))),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn cut_norm_matches_brute_force() {
        let mut rng = SmallRng::seed_from_u64(8);
        for _ in 0..40 {
            let n = rng.random_range(1..=7);
            let sk = random_grid(&mut rng, n, false);
            let cut = cut_norm_step(&sk).unwrap();
            assert_eq!(cut, brute_cut(&sk));
            assert!(cut <= sk.l1_norm());
        }
    }

    #[test]
    fn sandwich_examples() {
        let zero = norm_sandwich_check(&StepKernel::new(SymmetricMatrix::zeros(3))).unwrap();
        assert_eq!((zero.cut2, zero.cut_bounds, zero.op), (0.0, (0.0, 0.0), 0.0));
        let ones = norm_sandwich_check(&grid(&[vec![1.0; 2], vec![1.0; 2]])).unwrap();
        assert_eq!((ones.cut2, ones.cut_bounds), (1.0, (1.0, 4.0)));
        assert!((ones.op - 1.0).abs() < 1e-15 && ones.op_dominates);
        let mut rng = SmallRng::seed_from_u64(10);
        for _ in 0..100 {
            assert!(norm_sandwich_check(&random_grid(&mut rng, 10, true)).unwrap().op_dominates);
        }
    }
}
