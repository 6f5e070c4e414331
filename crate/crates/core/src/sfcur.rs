//! CUR through convex optimization: bisection on `λ` until the solver keeps
//! exactly the requested number of columns, then the same for rows given the
//! chosen columns, then `U = C⁺XR⁺`.

use serde::{Deserialize, Serialize};

use crate::decomposition::{build_u, CountStatus, CurDecomposition, CurMethod, MethodParams};
use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;
use crate::numerics::spectral_norm;
use crate::solver::{critical_lambda_from_cross, cross_term, PenaltyAxis, SfConfig, SfProblem, SfState};

/// One solve during bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub lambda: f64,
    pub count: usize,
}

/// Record of a bisection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionTrace {
    pub steps: Vec<BisectionStep>,
    /// Upper end of the search interval, the critical `λ`.
    pub lambda_max: f64,
    /// `λ` whose selection was returned.
    pub accepted_lambda: f64,
    pub iterations: usize,
    pub status: CountStatus,
    /// Whether the tight-tolerance solve at the accepted `λ` confirmed the count.
    pub final_solve_agreed: bool,
}

impl BisectionTrace {
    /// Pairs of consecutive steps (sorted by `λ`) whose counts increase with `λ`.
    pub fn monotonicity_violations(&self) -> usize {
        let mut s = self.steps.clone();
        s.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        s.windows(2).filter(|w| w[1].count > w[0].count).count()
    }
}

/// `2 · max_i ‖(XᵀXXᵀ)(i,:)‖₁`
pub fn critical_lambda_cols(x: &DenseMatrix) -> f64 {
    critical_lambda_from_cross(&cross_term(x, x, x), PenaltyAxis::Rows, Default::default())
}

/// `2 · max_j ‖(CᵀXXᵀ)(:,j)‖₁`
pub fn critical_lambda_rows(x: &DenseMatrix, c: &DenseMatrix) -> Result<f64> {
    if c.rows() != x.rows() {
        return Err(CurError::ShapeMismatch(format!(
            "C has {} rows, X has {}",
            c.rows(),
            x.rows()
        )));
    }
    Ok(critical_lambda_from_cross(
        &cross_term(c, x, x),
        PenaltyAxis::Cols,
        Default::default(),
    ))
}

fn check_count(target: usize, available: usize, what: &str) -> Result<()> {
    if target == 0 || target > available {
        return Err(CurError::Config(format!(
            "{what} count {target} outside 1..={available}"
        )));
    }
    Ok(())
}

/// Columns kept by the bisection, ascending.
pub fn select_columns(x: &DenseMatrix, c: usize, cfg: &SfConfig) -> Result<(Vec<usize>, BisectionTrace)> {
    check_count(c, x.cols(), "column")?;
    let mut problem = SfProblem::columns(x, cfg)?;
    bisect(&mut problem, c, cfg)
}

/// Rows kept by the bisection on the row problem with fixed `C`, ascending.
pub fn select_rows(x: &DenseMatrix, c: &DenseMatrix, r: usize, cfg: &SfConfig) -> Result<(Vec<usize>, BisectionTrace)> {
    check_count(r, x.rows(), "row")?;
    let mut problem = SfProblem::rows(x, c, cfg)?;
    bisect(&mut problem, r, cfg)
}

/// Solves at a fixed `λ` and reports the surviving groups.
pub fn select_at_lambda(problem: &mut SfProblem, lambda: f64, cfg: &SfConfig) -> Result<(Vec<usize>, SfState)> {
    problem.set_lambda(lambda)?;
    let st = problem.solve(cfg)?;
    Ok((problem.selected(&st.w, cfg.zero_threshold), st))
}

struct Candidate {
    set: Vec<usize>,
    lambda: f64,
    w: DenseMatrix,
}

fn closer(count: usize, best: usize, target: usize) -> bool {
    let d = count.abs_diff(target);
    let db = best.abs_diff(target);
    d < db || (d == db && count > best)
}

/// Bisection on `λ ∈ [0, λ*]` for a problem whose products are already cached.
pub fn bisect(problem: &mut SfProblem, target: usize, cfg: &SfConfig) -> Result<(Vec<usize>, BisectionTrace)> {
    cfg.validate()?;
    let lambda_max = problem.critical_lambda();
    let mut steps = Vec::new();
    let (mut lo, mut hi) = (0.0, lambda_max);
    let mut best: Option<Candidate> = None;
    let mut hit = false;
    let mut warm: Option<DenseMatrix> = None;

    for _ in 0..cfg.bisection_max_iter {
        let lambda = 0.5 * (lo + hi);
        problem.set_lambda(lambda)?;
        let st = match (cfg.warm_start, warm.take()) {
            (true, Some(w0)) => problem.solve_from(cfg, w0)?,
            _ => problem.solve(cfg)?,
        };
        let set = problem.selected(&st.w, cfg.zero_threshold);
        let count = set.len();
        steps.push(BisectionStep { lambda, count });
        if best.as_ref().is_none_or(|b| closer(count, b.set.len(), target)) {
            best = Some(Candidate {
                set,
                lambda,
                w: st.w.clone(),
            });
        }
        if cfg.warm_start {
            warm = Some(st.w);
        }
        if count == target {
            hit = true;
            break;
        }
        if count > target {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }

    let best = best.expect("at least one bisection step");
    let iterations = steps.len();
    if !hit {
        let achieved = best.set.len();
        if cfg.strict_count || achieved == 0 {
            return Err(CurError::CountUnreachable { target, achieved });
        }
        let trace = BisectionTrace {
            steps,
            lambda_max,
            accepted_lambda: best.lambda,
            iterations,
            status: CountStatus::Nearest { target, achieved },
            final_solve_agreed: false,
        };
        return Ok((best.set, trace));
    }

    // Re-solve at the accepted λ with a tight tolerance; its support replaces
    // the truncated one only when the count is unchanged.
    problem.set_lambda(best.lambda)?;
    let tight = SfConfig {
        max_iter: cfg.final_max_iter.max(cfg.max_iter),
        tol: cfg.final_tol,
        ..cfg.clone()
    };
    let st = problem.solve_from(&tight, best.w)?;
    let refined = problem.selected(&st.w, cfg.zero_threshold);
    let agreed = refined.len() == target;
    let set = if agreed { refined } else { best.set };
    let trace = BisectionTrace {
        steps,
        lambda_max,
        accepted_lambda: best.lambda,
        iterations,
        status: CountStatus::Exact,
        final_solve_agreed: agreed,
    };
    Ok((set, trace))
}

/// Result of [`sf_cur_traced`]: the decomposition plus both bisection traces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SfCurOutcome {
    pub decomposition: CurDecomposition,
    pub col_trace: Option<BisectionTrace>,
    pub row_trace: Option<BisectionTrace>,
}

/// Optional fixed weights that bypass bisection for either stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LambdaOverride {
    pub cols: Option<f64>,
    pub rows: Option<f64>,
}

/// Columns, then rows, then `U = C⁺XR⁺`.
pub fn sf_cur(x: &DenseMatrix, c: usize, r: usize, cfg: &SfConfig) -> Result<CurDecomposition> {
    Ok(sf_cur_traced(x, c, r, cfg, LambdaOverride::default())?.decomposition)
}

/// [`sf_cur`] keeping the bisection traces, with optional fixed weights.
pub fn sf_cur_traced(
    x: &DenseMatrix,
    c: usize,
    r: usize,
    cfg: &SfConfig,
    fixed: LambdaOverride,
) -> Result<SfCurOutcome> {
    check_count(c, x.cols(), "column")?;
    check_count(r, x.rows(), "row")?;
    cfg.validate()?;
    // ‖X‖₂ serves both stages.
    let x_norm = spectral_norm(x);

    let mut col_problem = SfProblem::columns_with_norm(x, cfg, x_norm)?;
    let (cols, col_trace, col_status) = stage(&mut col_problem, c, cfg, fixed.cols)?;
    let cmat = x.select_columns(&cols);

    let mut row_problem = SfProblem::rows_with_norm(x, &cmat, cfg, x_norm)?;
    let (rows, row_trace, row_status) = stage(&mut row_problem, r, cfg, fixed.rows)?;

    let u = build_u(x, &cols, &rows, cfg.rank_tol)?;
    let params = MethodParams {
        c,
        r,
        lambda_c: Some(col_trace.as_ref().map_or(col_problem.lambda(), |t| t.accepted_lambda)),
        lambda_r: Some(row_trace.as_ref().map_or(row_problem.lambda(), |t| t.accepted_lambda)),
        ..MethodParams::default()
    };
    let decomposition = CurDecomposition {
        col_indices: cols,
        row_indices: rows,
        u,
        method: CurMethod::Sf,
        params,
        col_status,
        row_status,
    };
    Ok(SfCurOutcome {
        decomposition,
        col_trace,
        row_trace,
    })
}

type Stage = (Vec<usize>, Option<BisectionTrace>, CountStatus);

fn stage(problem: &mut SfProblem, target: usize, cfg: &SfConfig, fixed: Option<f64>) -> Result<Stage> {
    match fixed {
        Some(lambda) => {
            let (set, _) = select_at_lambda(problem, lambda, cfg)?;
            if set.is_empty() {
                return Err(CurError::CountUnreachable { target, achieved: 0 });
            }
            let status = if set.len() == target {
                CountStatus::Exact
            } else {
                CountStatus::Nearest {
                    target,
                    achieved: set.len(),
                }
            };
            Ok((set, None, status))
        }
        None => {
            let (set, trace) = bisect(problem, target, cfg)?;
            let status = trace.status;
            Ok((set, Some(trace), status))
        }
    }
}
