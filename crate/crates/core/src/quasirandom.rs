//! Finite-size checks of quasi-randomness properties for dense graphs.
//!
//! Asymptotic `o(1)` and `o(n)` conditions are replaced by an explicit
//! `slack`, and every check reports the quantities it compared.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{eig_tolerance, eigenvalues, spectral_norm, SymmetricMatrix};

/// Largest `n` accepted by [`q4_discrepancy`].
pub const Q4_MAX_ORDER: usize = 20;

fn check_density(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")))
    }
}

/// Ordered 4-tuples of distinct vertices `(v0, v1, v2, v3)` with
/// `v0v1, v1v2, v2v3, v3v0` all edges, via
/// `Tr(A⁴) − 2 Σ_v deg(v)² + 2|E|`. Integer arithmetic throughout.
pub fn labeled_c4_count(g: &Graph) -> Result<u64> {
    if g.has_loops() {
        return Err(Error::LoopsUnsupported);
    }
    let n = g.order();
    let mut nbrs = vec![Vec::new(); n];
    for (i, j) in g.edges() {
        nbrs[i].push(j);
        nbrs[j].push(i);
    }
    // Tr(A⁴) = Σ_{u,w} (A²)_{uw}², with (A²)_{uw} the number of common neighbours.
    let mut trace4: u128 = 0;
    let mut walks = vec![0u64; n];
    for u in 0..n {
        walks.iter_mut().for_each(|c| *c = 0);
        for &v in &nbrs[u] {
            for &w in &nbrs[v] {
                walks[w] += 1;
            }
        }
        trace4 += walks.iter().map(|&c| c as u128 * c as u128).sum::<u128>();
    }
    let deg_sq: u128 = nbrs.iter().map(|a| (a.len() as u128).pow(2)).sum();
    let count = trace4 + 2 * g.edge_count() as u128 - 2 * deg_sq;
    u64::try_from(count).map_err(|_| Error::Overflow)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Q3Check {
    pub edges_ok: bool,
    pub top_eigen_ok: bool,
    pub bulk_ok: bool,
    pub edge_count: usize,
    pub lambda_max: f64,
    /// `max_{i < n−1} |λ_i|`.
    pub bulk_max: f64,
}

fn top_and_bulk(a: &SymmetricMatrix) -> Result<(f64, f64)> {
    let vals = eigenvalues(a)?;
    let (top, rest) = vals.split_last().expect("graphs have at least one vertex");
    Ok((*top, rest.iter().fold(0.0f64, |m, v| m.max(v.abs()))))
}

/// `|E| ≥ (1 − slack) p n²/2`, `|λ_max − pn| ≤ slack·n`, and
/// `max_{i<n−1} |λ_i| ≤ slack·n`.
pub fn q3_check(g: &Graph, p: f64, slack: f64) -> Result<Q3Check> {
    check_density(p)?;
    if !(slack >= 0.0) {
        return Err(Error::InvalidParameter(format!("slack must be >= 0, got {slack}")));
    }
    let n = g.order() as f64;
    let (lambda_max, bulk_max) = top_and_bulk(&g.adjacency())?;
    let edge_count = g.edge_count();
    Ok(Q3Check {
        edges_ok: edge_count as f64 >= (1.0 - slack) * p * n * n / 2.0,
        top_eigen_ok: (lambda_max - p * n).abs() <= slack * n,
        bulk_ok: bulk_max <= slack * n,
        edge_count,
        lambda_max,
        bulk_max,
    })
}

/// `p(𝟙𝟙ᵀ − I)`.
pub fn typical_er_adjacency(n: usize, p: f64) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { p })
}

/// `‖A_G − p(𝟙𝟙ᵀ − I)‖`.
pub fn p1_deviation(g: &Graph, p: f64) -> Result<f64> {
    check_density(p)?;
    spectral_norm(&(&g.adjacency() - &typical_er_adjacency(g.order(), p)))
}

/// `max_{S ⊆ V} |e(S) − p|S|²/2|` by enumerating all subsets in Gray-code
/// order, where `e(S)` counts edges (loops included) inside `S`.
pub fn q4_discrepancy(g: &Graph, p: f64) -> Result<f64> {
    let n = g.order();
    if n > Q4_MAX_ORDER {
        return Err(Error::TooLarge { size: n, limit: Q4_MAX_ORDER });
    }
    let mut nbr_mask = vec![0u32; n];
    let mut has_loop = vec![false; n];
    for (i, j) in g.edges() {
        if i == j {
            has_loop[i] = true;
        } else {
            nbr_mask[i] |= 1 << j;
            nbr_mask[j] |= 1 << i;
        }
    }
    let mut members: u32 = 0;
    let mut size: i64 = 0;
    let mut inside: i64 = 0;
    // The empty set contributes 0.
    let mut best: f64 = 0.0;
    for step in 1u32..(1u32 << n) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u32 << v;
        let delta = (nbr_mask[v] & members).count_ones() as i64 + has_loop[v] as i64;
        if members & bit == 0 {
            members |= bit;
            size += 1;
            inside += delta;
        } else {
            members &= !bit;
            size -= 1;
            inside -= delta;
        }
        let s = size as f64;
        best = best.max((inside as f64 - p * s * s / 2.0).abs());
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleChainCheck {
    /// `‖A − A_typ‖ ≤ slack·n`.
    pub premise: bool,
    pub top_ok: bool,
    pub bulk_ok: bool,
    pub edges_ok: bool,
    /// `premise ⇒ (top_ok ∧ bulk_ok ∧ edges_ok)`.
    pub holds: bool,
    pub deviation: f64,
}

/// Numerically traces the implication from a small deviation
/// `‖A − p(𝟙𝟙ᵀ − I)‖ ≤ slack·n` to the spectral and edge-count conclusions.
///
/// The typical matrix has eigenvalues `p(n − 1)` (once) and `−p`, so Weyl's
/// inequality gives `|λ_max − pn| ≤ slack·n + p` and `|λ_i| ≤ slack·n + p`
/// for the rest; `𝟙ᵀ(A − A_typ)𝟙 ≥ −n·‖A − A_typ‖` gives
/// `|E| ≥ pn²/2 − pn/2 − slack·n²/2`.
pub fn prop42_forward_check(g: &Graph, p: f64, slack: f64) -> Result<CycleChainCheck> {
    check_density(p)?;
    if !(slack >= 0.0) {
        return Err(Error::InvalidParameter(format!("slack must be >= 0, got {slack}")));
    }
    let n = g.order() as f64;
    let a = g.adjacency();
    let diff = &a - &typical_er_adjacency(g.order(), p);
    let deviation = spectral_norm(&diff)?;
    let tol = eig_tolerance(&a);
    let (top, bulk) = top_and_bulk(&a)?;
    let premise = deviation <= slack * n;
    let top_ok = (top - p * n).abs() <= slack * n + p + tol;
    let bulk_ok = bulk <= slack * n + p + tol;
    let edges_ok = g.edge_count() as f64 >= p * n * n / 2.0 - p * n / 2.0 - slack * n * n / 2.0;
    Ok(CycleChainCheck {
        premise,
        top_ok,
        bulk_ok,
        edges_ok,
        holds: !premise || (top_ok && bulk_ok && edges_ok),
        deviation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasirandomReport {
    pub n: usize,
    pub edge_count: usize,
    pub labeled_c4_count: u64,
    pub lambda_max: f64,
    pub second_eigen_absmax: f64,
    pub p1_deviation: f64,
    pub q4_discrepancy: Option<f64>,
}

/// Collects every statistic; the Q4 discrepancy only when `n ≤ 20`.
pub fn quasirandom_report(g: &Graph, p: f64) -> Result<QuasirandomReport> {
    let (lambda_max, second_eigen_absmax) = top_and_bulk(&g.adjacency())?;
    Ok(QuasirandomReport {
        n: g.order(),
        edge_count: g.edge_count(),
        labeled_c4_count: labeled_c4_count(g)?,
        lambda_max,
        second_eigen_absmax,
        p1_deviation: p1_deviation(g, p)?,
        q4_discrepancy: if g.order() <= Q4_MAX_ORDER { Some(q4_discrepancy(g, p)?) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_graphs::{model_erdos_renyi, sample_graph};
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn brute_c4(g: &Graph) -> u64 {
        let n = g.order();
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                        if distinct
                            && g.has_edge(a, b)
                            && g.has_edge(b, c)
                            && g.has_edge(c, d)
                            && g.has_edge(d, a)
                        {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    fn random_graph(rng: &mut SmallRng, n: usize, p: f64) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn c4_examples() {
        assert_eq!(labeled_c4_count(&Graph::cycle(4)).unwrap(), 8);
        assert_eq!(labeled_c4_count(&Graph::complete(4)).unwrap(), 24);
        assert_eq!(labeled_c4_count(&Graph::star(7)).unwrap(), 0);
        assert_eq!(labeled_c4_count(&Graph::path(9)).unwrap(), 0);
        let looped = Graph::from_edges(3, [(0, 0)]).unwrap();
        assert_eq!(labeled_c4_count(&looped), Err(Error::LoopsUnsupported));
    }

    #[test]
    fn c4_matches_brute_force() {
        let mut rng = SmallRng::seed_from_u64(4);
        for _ in 0..60 {
            let n = rng.random_range(1..=9);
            let p = rng.random::<f64>();
            let g = random_graph(&mut rng, n, p);
            assert_eq!(labeled_c4_count(&g).unwrap(), brute_c4(&g));
        }
    }

    #[test]
    fn q3_examples() {
        let er = model_erdos_renyi(300, 0.5).unwrap();
        let c = q3_check(&sample_graph(&er, 11), 0.5, 0.1).unwrap();
        assert!(c.edges_ok && c.top_eigen_ok && c.bulk_ok, "{c:?}");
        assert!(!q3_check(&Graph::new(10), 0.5, 0.1).unwrap().edges_ok);
        let n = 12;
        let k = q3_check(&Graph::complete(n), 1.0 - 1.0 / n as f64, 0.0).unwrap();
        assert!((k.lambda_max - (n - 1) as f64).abs() < 1e-12);
        assert!(k.edges_ok && !k.bulk_ok);
    }

    #[test]
    fn p1_examples() {
        let (n, p) = (15, 0.3);
        let full = p1_deviation(&Graph::complete(n), p).unwrap();
        assert!((full - (1.0 - p) * (n - 1) as f64).abs() < 1e-12);
        let empty = p1_deviation(&Graph::new(n), p).unwrap();
        assert!((empty - p * (n - 1) as f64).abs() < 1e-12);
    }

    fn q4_recount(g: &Graph, p: f64) -> f64 {
        let n = g.order();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let mut best: f64 = 0.0;
        for mask in 0u32..(1 << n) {
            let inside = |v: usize| mask >> v & 1 == 1;
            let e = edges.iter().filter(|&&(i, j)| inside(i) && inside(j)).count() as f64;
            let s = mask.count_ones() as f64;
            best = best.max((e - p * s * s / 2.0).abs());
        }
        best
    }

    #[test]
    fn q4_examples() {
        // Subsets of a single edge at p = 1/2: ∅ → 0, singletons → |0 − 1/4|, both → |1 − 1|.
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(q4_discrepancy(&edge, 0.5).unwrap(), 0.25);
        assert_eq!(q4_discrepancy(&Graph::complete(4), 1.0).unwrap(), 2.0);
        assert!(q4_discrepancy(&Graph::new(6), 1e-9).unwrap() < 1e-7);
        assert!(matches!(q4_discrepancy(&Graph::new(21), 0.5), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn q4_matches_recount() {
        let mut rng = SmallRng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.random_range(1..=10);
            let p = rng.random::<f64>();
            let mut g = random_graph(&mut rng, n, p);
            if rng.random::<bool>() {
                g.add_edge(0, 0).unwrap();
            }
            assert_eq!(q4_discrepancy(&g, p).unwrap(), q4_recount(&g, p));
        }
    }

    #[test]
    fn typical_spectrum() {
        let (n, p) = (9, 0.4);
        let vals = eigenvalues(&typical_er_adjacency(n, p)).unwrap();
        for v in &vals[..n - 1] {
            assert!((v + p).abs() < 1e-13);
        }
        assert!((vals[n - 1] - p * (n - 1) as f64).abs() < 1e-13);
    }

    #[test]
    fn p1_chain_examples() {
        let er = model_erdos_renyi(200, 0.5).unwrap();
        for seed in 0..5 {
            let c = prop42_forward_check(&sample_graph(&er, seed), 0.5, 0.2).unwrap();
            assert!(c.premise && c.holds, "{c:?}");
        }
        let half = 10;
        let mut two_cliques = Graph::new(2 * half);
        for block in 0..2 {
            for i in 0..half {
                for j in i + 1..half {
                    two_cliques.add_edge(block * half + i, block * half + j).unwrap();
                }
            }
        }
        let c = prop42_forward_check(&two_cliques, 0.5, 0.1).unwrap();
        assert!(!c.premise && c.holds);
    }

    #[test]
    fn report_fields() {
        let r = quasirandom_report(&Graph::cycle(4), 0.5).unwrap();
        assert_eq!((r.n, r.edge_count, r.labeled_c4_count), (4, 4, 8));
        assert!((r.lambda_max - 2.0).abs() < 1e-12);
        assert!((r.second_eigen_absmax - 2.0).abs() < 1e-12);
        assert!(r.q4_discrepancy.is_some());
    }
}
