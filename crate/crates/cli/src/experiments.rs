//! The six experiments. Trial `t` always draws from
//! `derive_seed(master_seed, t)`, and rows are emitted in trial order.

use typgraph::concentration::{empirical_tail, IncrementGenerator, IncrementKind};
use typgraph::graph::Graph;
use typgraph::graphon::{kernel_step_kernel, leading_eigenvalues, Kernel, KernelKind, Multiplicity};
use typgraph::linalg::{eigen_range_projector, eigenvalues, spectral_norm};
use typgraph::perturbation::{contour_projector, multiplicity_lemma_check, projector_lemma_check};
use typgraph::quasirandom::{prop42_forward_check, q3_check, quasirandom_report, Q4_MAX_ORDER};
use typgraph::random_graphs::{
    chung_horn_reference, deviation_experiment, model_erdos_renyi, model_percolation, percolation_gap_experiment,
    percolation_gap_rate, sample_graph, MatrixKind,
};
use typgraph::rng::derive_seed;

use crate::config::{
    ConfigError, Diagnostic, ExperimentConfig, ExperimentKind, IncrementFamily, MatrixChoice, ModelChoice, Severity,
    DEFAULT_MAX_ORDER, DEFAULT_QUAD_POINTS, DEFAULT_SLACK, DEFAULT_THRESHOLDS, DEFAULT_TOLERANCE,
};
use crate::instances::{contour_instance, multiplicity_instance, projector_instance};
use crate::report::{Cell, CsvReport};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Library(#[from] typgraph::Error),
}

/// Grid resolution used for the reference spectrum of smooth kernels.
pub const SMOOTH_REFERENCE_GRID: usize = 512;

/// Errors below this size count as converged in the contour halving test.
pub const CONTOUR_FLOOR: f64 = 1e-12;

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = xs.into_iter().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    sum / count as f64
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn column_mean(rows: &[Vec<Cell>], j: usize) -> f64 {
    mean(rows.iter().map(|r| r[j].as_f64()))
}

fn column_max(rows: &[Vec<Cell>], j: usize) -> f64 {
    max(rows.iter().map(|r| r[j].as_f64()))
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Runs a config that has already passed validation.
pub fn run(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let errors: Vec<Diagnostic> = cfg.validate().into_iter().filter(|d| d.severity == Severity::Error).collect();
    if !errors.is_empty() {
        return Err(ConfigError::Invalid(errors).into());
    }
    match cfg.experiment {
        ExperimentKind::Deviation => deviation(cfg),
        ExperimentKind::FreedmanTail => freedman_tail(cfg),
        ExperimentKind::PercolationGap => percolation_gap(cfg),
        ExperimentKind::GraphonSpectrum => graphon_spectrum(cfg),
        ExperimentKind::Quasirandom => quasirandom(cfg),
        ExperimentKind::PerturbationSuite => perturbation_suite(cfg),
    }
}

fn graph_without_isolated(cfg: &ExperimentConfig) -> Result<Graph, RunError> {
    let g = cfg.base_graph()?;
    if g.min_degree() == 0 {
        let key = if cfg.graph_file.is_some() { "graph_file" } else { "graph" };
        return Err(ConfigError::Invalid(vec![Diagnostic {
            severity: Severity::Error,
            key: key.into(),
            message: "base graph has an isolated vertex, so the Laplacian bound is undefined".into(),
        }])
        .into());
    }
    Ok(g)
}

fn deviation(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let p = cfg.p.expect("validated");
    let model = match cfg.model.unwrap_or(ModelChoice::ErdosRenyi) {
        ModelChoice::ErdosRenyi => model_erdos_renyi(cfg.n.expect("validated"), p)?,
        ModelChoice::Percolation => model_percolation(&graph_without_isolated(cfg)?, p)?,
    };
    let kind = match cfg.matrix.unwrap_or(MatrixChoice::Adjacency) {
        MatrixChoice::Adjacency => MatrixKind::Adjacency,
        MatrixChoice::Laplacian => MatrixKind::Laplacian,
    };
    let summary = deviation_experiment(&model, cfg.delta(), cfg.trial_count(), cfg.master_seed, kind)?;
    let rows: Vec<Vec<Cell>> = summary
        .reports
        .iter()
        .enumerate()
        .map(|(t, r)| vec![t.into(), r.observed.into(), r.bound.into(), r.within_bound.into()])
        .collect();
    let bound = summary.reports[0].bound;
    let notes = vec![
        format!("failure fraction {:.4} at delta {}", summary.failure_fraction(), cfg.delta()),
        format!(
            "typical degree {} the 20 ln n threshold",
            if summary.above_threshold { "clears" } else { "is below" }
        ),
    ];
    Ok(CsvReport {
        experiment: "deviation",
        columns: columns(&["trial", "observed", "bound", "within"]),
        summary: vec![column_mean(&rows, 1).into(), bound.into(), summary.failure_fraction().into()],
        rows,
        notes,
    })
}

fn freedman_tail(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let spec = cfg.increment.as_ref().expect("validated");
    let kind = match spec.kind {
        IncrementFamily::DiagonalRademacher => IncrementKind::DiagonalRademacher { d: spec.d },
        IncrementFamily::RankOneSign => {
            IncrementKind::RankOneSign { d: spec.d, vector_seed: spec.vector_seed.unwrap_or(0) }
        }
    };
    let gen = IncrementGenerator::new(kind, spec.scale.unwrap_or(1.0))?;
    let thresholds = cfg.thresholds.clone().unwrap_or_else(|| DEFAULT_THRESHOLDS.to_vec());
    let steps = cfg.steps.expect("validated");
    let report = empirical_tail(&gen, steps, cfg.trial_count(), &thresholds, cfg.master_seed)?;
    let rows: Vec<Vec<Cell>> = report
        .rows
        .iter()
        .map(|r| {
            let slack = report.slack(r);
            vec![
                r.t.into(),
                r.empirical_prob.into(),
                r.freedman_value.into(),
                slack.into(),
                (r.empirical_prob <= r.freedman_value + slack).into(),
            ]
        })
        .collect();
    let all_within = rows.iter().all(|r| r[4] == Cell::Bool(true));
    Ok(CsvReport {
        experiment: "freedman-tail",
        columns: columns(&["threshold", "empirical_tail", "freedman_bound", "mc_slack", "within"]),
        summary: vec![report.sigma2.into(), report.bound_m.into(), report.trials.into(), all_within.into()],
        rows,
        notes: vec![format!("sigma^2 = {}, M = {}", report.sigma2, report.bound_m)],
    })
}

fn percolation_gap(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let g = graph_without_isolated(cfg)?;
    let p = cfg.p.expect("validated");
    let trials = percolation_gap_experiment(&g, p, cfg.delta(), cfg.trial_count(), cfg.master_seed)?;
    let d = g.min_degree() as f64;
    let rate = percolation_gap_rate(g.order(), p, d)?;
    let reference = chung_horn_reference(g.order(), p, d, cfg.c1.unwrap_or(1.0), cfg.c2.unwrap_or(1.0))?;
    let rows: Vec<Vec<Cell>> = trials
        .iter()
        .enumerate()
        .map(|(t, r)| {
            vec![
                t.into(),
                r.gap_base.into(),
                r.gap_sample.into(),
                r.abs_diff().into(),
                r.laplacian_deviation.into(),
                r.bound.into(),
                r.within().into(),
                rate.into(),
                reference.into(),
            ]
        })
        .collect();
    let summary = vec![
        trials[0].gap_base.into(),
        column_mean(&rows, 2).into(),
        column_mean(&rows, 3).into(),
        column_mean(&rows, 4).into(),
        trials[0].bound.into(),
        column_mean(&rows, 6).into(),
        rate.into(),
        reference.into(),
    ];
    Ok(CsvReport {
        experiment: "percolation-gap",
        columns: columns(&[
            "trial",
            "gap_base",
            "gap_sample",
            "abs_diff",
            "laplacian_deviation",
            "bound",
            "within",
            "rate",
            "chung_horn",
        ]),
        notes: vec![format!(
            "within fraction {:.4}; rate {rate:.4} vs reference {reference:.4}",
            column_mean(&rows, 6)
        )],
        rows,
        summary,
    })
}

/// Leading eigenvalues of `T_κ` in decreasing order: closed form where
/// available, otherwise the spectrum of the `512 × 512` cell-average grid.
pub fn reference_leading(kernel: &Kernel, count: usize) -> Result<Vec<f64>, typgraph::Error> {
    if let KernelKind::Smooth(_) = kernel.kind() {
        let grid = kernel_step_kernel(kernel, SMOOTH_REFERENCE_GRID)?;
        let vals = eigenvalues(grid.values())?;
        return Ok(vals.iter().rev().take(count).map(|v| v / SMOOTH_REFERENCE_GRID as f64).collect());
    }
    let mut vals: Vec<f64> = Vec::new();
    for pt in kernel.reference_spectrum()? {
        match pt.multiplicity {
            Multiplicity::Finite(m) => vals.extend(std::iter::repeat_n(pt.value, m)),
            Multiplicity::Infinite => vals.push(0.0),
        }
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.resize(count.max(vals.len()), 0.0);
    vals.truncate(count);
    Ok(vals)
}

fn default_leading(kernel: &Kernel) -> usize {
    match kernel.reference_spectrum() {
        Ok(spec) => spec
            .iter()
            .filter_map(|pt| match pt.multiplicity {
                Multiplicity::Finite(m) if pt.value > 0.0 => Some(m),
                _ => None,
            })
            .sum::<usize>()
            .clamp(1, 4),
        Err(_) => 1,
    }
}

fn graphon_spectrum(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let kernel = cfg.kernel.as_ref().expect("validated").build().expect("validated");
    let (n, p) = (cfg.n.expect("validated"), cfg.p.expect("validated"));
    let count = cfg.leading.unwrap_or_else(|| default_leading(&kernel)).min(n);
    let tol = cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let reference = reference_leading(&kernel, count)?;
    let mut names = vec!["trial".to_string()];
    for r in 1..=count {
        names.push(format!("lambda_{r}"));
        names.push(format!("error_{r}"));
    }
    names.push("within".into());
    let mut rows = Vec::with_capacity(cfg.trial_count());
    for t in 0..cfg.trial_count() {
        let observed = leading_eigenvalues(&kernel, n, p, derive_seed(cfg.master_seed, t as u64), count)?;
        let mut row: Vec<Cell> = vec![t.into()];
        let mut ok = true;
        for (o, r) in observed.iter().zip(&reference) {
            let err = (o - r).abs();
            ok &= err <= tol;
            row.push((*o).into());
            row.push(err.into());
        }
        row.push(ok.into());
        rows.push(row);
    }
    let mut summary: Vec<Cell> = Vec::new();
    for (r, value) in reference.iter().enumerate() {
        summary.push((*value).into());
        summary.push(column_mean(&rows, 2 + 2 * r).into());
    }
    let within_col = names.len() - 1;
    summary.push(column_mean(&rows, within_col).into());
    let mut notes = vec![format!(
        "reference {:?}; within-{tol} fraction {:.4}",
        reference,
        column_mean(&rows, within_col)
    )];
    if p * kernel.sup_bound() > 1.0 {
        notes.push("p exceeds 1/K; edge probabilities were clipped".into());
    }
    Ok(CsvReport { experiment: "graphon-spectrum", columns: names, rows, summary, notes })
}

fn quasirandom(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let (n, p) = (cfg.n.expect("validated"), cfg.p.expect("validated"));
    let slack = cfg.slack.unwrap_or(DEFAULT_SLACK);
    let model = model_erdos_renyi(n, p)?;
    let with_q4 = n <= Q4_MAX_ORDER;
    let mut names = columns(&[
        "trial",
        "edge_count",
        "labeled_c4",
        "lambda_max",
        "second_eigen_absmax",
        "p1_deviation",
        "q3_holds",
        "p1_chain_premise",
        "p1_chain_holds",
    ]);
    if with_q4 {
        names.push("q4_discrepancy".into());
    }
    let mut rows = Vec::with_capacity(cfg.trial_count());
    for t in 0..cfg.trial_count() {
        let g = sample_graph(&model, derive_seed(cfg.master_seed, t as u64));
        let rep = quasirandom_report(&g, p)?;
        let q3 = q3_check(&g, p, slack)?;
        let prop = prop42_forward_check(&g, p, slack)?;
        let mut row: Vec<Cell> = vec![
            t.into(),
            rep.edge_count.into(),
            rep.labeled_c4_count.into(),
            rep.lambda_max.into(),
            rep.second_eigen_absmax.into(),
            rep.p1_deviation.into(),
            (q3.edges_ok && q3.top_eigen_ok && q3.bulk_ok).into(),
            prop.premise.into(),
            prop.holds.into(),
        ];
        if let Some(q4) = rep.q4_discrepancy {
            row.push(q4.into());
        }
        rows.push(row);
    }
    let summary: Vec<Cell> = (1..names.len()).map(|j| column_mean(&rows, j).into()).collect();
    Ok(CsvReport {
        experiment: "quasirandom",
        notes: vec![format!("P1 chain holds in {:.4} of trials", column_mean(&rows, 8))],
        columns: names,
        rows,
        summary,
    })
}

/// Contour error at `quad_points` and at half as many nodes.
pub fn contour_errors(seed: u64, max_order: usize, quad_points: usize) -> Result<(usize, f64, f64), typgraph::Error> {
    let c = contour_instance(max_order, seed);
    let direct = eigen_range_projector(&c.m, c.a, c.b)?.matrix;
    let err = |q| -> Result<f64, typgraph::Error> {
        spectral_norm(&(&contour_projector(&c.m, c.a, c.b, c.gamma, q)? - &direct))
    };
    Ok((c.m.order(), err(quad_points)?, err(quad_points / 2)?))
}

fn perturbation_suite(cfg: &ExperimentConfig) -> Result<CsvReport, RunError> {
    let max_order = cfg.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    let quad_points = cfg.quad_points.unwrap_or(DEFAULT_QUAD_POINTS);
    let mut rows = Vec::with_capacity(cfg.trial_count());
    for t in 0..cfg.trial_count() {
        let seed = derive_seed(cfg.master_seed, t as u64);
        let mi = multiplicity_instance(max_order, derive_seed(seed, 0));
        let mc = multiplicity_lemma_check(&mi.v, &mi.w, &mi.set)?;
        let pi = projector_instance(max_order, derive_seed(seed, 1));
        let pc = projector_lemma_check(&pi.v, &pi.w, pi.a, pi.b, pi.gamma)?;
        let (order, err, err_half) = contour_errors(derive_seed(seed, 2), max_order, quad_points)?;
        let halving = err <= CONTOUR_FLOOR || err <= err_half / 2.0;
        rows.push(vec![
            t.into(),
            mi.v.order().into(),
            mc.eps.into(),
            mc.holds_forward.into(),
            mc.holds_backward.into(),
            pi.v.order().into(),
            pc.eps.into(),
            pc.lhs.into(),
            pc.rhs.into(),
            pc.holds.into(),
            order.into(),
            err.into(),
            err_half.into(),
            halving.into(),
        ]);
    }
    let names = columns(&[
        "trial",
        "mult_order",
        "mult_eps",
        "mult_forward",
        "mult_backward",
        "proj_order",
        "proj_eps",
        "proj_lhs",
        "proj_rhs",
        "proj_holds",
        "contour_order",
        "contour_error",
        "contour_error_half",
        "contour_halving",
    ]);
    let summary: Vec<Cell> = (1..names.len())
        .map(|j| match names[j].as_str() {
            "mult_eps" | "proj_eps" | "proj_lhs" | "contour_error" | "contour_error_half" => column_max(&rows, j),
            _ => column_mean(&rows, j),
        })
        .map(Cell::from)
        .collect();
    Ok(CsvReport {
        experiment: "perturbation-suite",
        notes: vec![format!(
            "multiplicity {:.4}/{:.4}, projector {:.4}, max contour error {:.3e}",
            column_mean(&rows, 3),
            column_mean(&rows, 4),
            column_mean(&rows, 9),
            column_max(&rows, 11)
        )],
        columns: names,
        rows,
        summary,
    })
}

/// Column documentation shown by `--help`.
pub const CSV_COLUMNS_HELP: &str = "\
CSV columns (numbers use 12 significant digits, booleans are 1/0; the last
row starts with #summary and holds the aggregate named in brackets):

  deviation           trial, observed [mean], bound [bound], within
                      [failure fraction]
  freedman-tail       threshold, empirical_tail [sigma^2],
                      freedman_bound [M], mc_slack [trials],
                      within [all within]
  percolation-gap     trial, gap_base [gap_base], gap_sample [mean],
                      abs_diff [mean], laplacian_deviation [mean],
                      bound [bound], within [fraction], rate [rate],
                      chung_horn [chung_horn]
  graphon-spectrum    trial, then lambda_r [reference eigenvalue] and
                      error_r [mean] for r = 1..leading, within [fraction]
  quasirandom         trial, edge_count, labeled_c4, lambda_max,
                      second_eigen_absmax, p1_deviation, q3_holds,
                      p1_chain_premise, p1_chain_holds, and q4_discrepancy
                      when n <= 20 [all means]
  perturbation-suite  trial, mult_order, mult_eps [max], mult_forward,
                      mult_backward, proj_order, proj_eps [max],
                      proj_lhs [max], proj_rhs, proj_holds, contour_order,
                      contour_error [max], contour_error_half [max],
                      contour_halving [other columns: means]
";
