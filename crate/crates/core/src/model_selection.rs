//! Choosing the number of columns with AIC/BIC over a pairwise-difference
//! matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{bernoulli_sample, deim_select, leverage_scores, Axis, LeverageScores};
use crate::decomposition::{CountStatus, CurDecomposition, CurMethod, MethodParams};
use crate::error::{CurError, Result};
use crate::evaluation::MethodOptions;
use crate::matrix::DenseMatrix;
use crate::numerics::{default_rank_tol, pivoted_qr, pseudoinverse, truncated_svd};
use crate::sfcur::select_columns;

/// Rows `i·b + j` (0-based) hold `A_i − B_j`.
pub fn difference_matrix(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols() != b.cols() {
        return Err(CurError::ShapeMismatch(format!(
            "vectors of length {} and {}",
            a.cols(),
            b.cols()
        )));
    }
    let (na, nb, d) = (a.rows(), b.rows(), a.cols());
    let mut out = DenseMatrix::zeros(na * nb, d);
    for i in 0..na {
        for j in 0..nb {
            for ((o, x), y) in out.row_mut(i * nb + j).iter_mut().zip(a.row(i)).zip(b.row(j)) {
                *o = x - y;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
    Both,
}

impl std::str::FromStr for Criterion {
    type Err = CurError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            "both" => Ok(Criterion::Both),
            other => Err(CurError::Config(format!("unknown criterion {other:?}"))),
        }
    }
}

/// Information criteria for one candidate column count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub k: usize,
    /// `−∞` when the fit is exact.
    pub aic: f64,
    pub bic: f64,
    pub residual_sq: f64,
    pub exact_fit: bool,
}

/// `AIC = 2(mc+3) + nm·ln(res/(nm))`, `BIC = (mc+3)·ln(nm) + nm·ln(res/(nm))`
/// for an `m × n` matrix approximated with `c` columns.
pub fn aic_bic(m: usize, n: usize, c: usize, residual_sq: f64) -> Result<ModelScore> {
    if m == 0 || n == 0 || c == 0 {
        return Err(CurError::Config(format!(
            "AIC/BIC need m, n, c >= 1 (got {m}, {n}, {c})"
        )));
    }
    if residual_sq.is_nan() || residual_sq < 0.0 {
        return Err(CurError::InvalidInput(format!(
            "residual {residual_sq} is negative or NaN"
        )));
    }
    if residual_sq == 0.0 {
        return Ok(ModelScore {
            k: c,
            aic: f64::NEG_INFINITY,
            bic: f64::NEG_INFINITY,
            residual_sq,
            exact_fit: true,
        });
    }
    let params = (m * c + 3) as f64;
    let nm = (n * m) as f64;
    let fit = nm * (residual_sq / nm).ln();
    Ok(ModelScore {
        k: c,
        aic: 2.0 * params + fit,
        bic: params * nm.ln() + fit,
        residual_sq,
        exact_fit: false,
    })
}

/// One candidate `k` of an automatic selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEntry {
    pub k: usize,
    pub col_indices: Vec<usize>,
    pub score: Option<ModelScore>,
    /// Why `k` was not scored.
    pub skipped: Option<String>,
}

/// The full score curve and the decompositions picked by each criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutoSelection {
    pub entries: Vec<KEntry>,
    pub by_aic: Option<CurDecomposition>,
    pub by_bic: Option<CurDecomposition>,
}

impl AutoSelection {
    pub fn scores(&self) -> Vec<ModelScore> {
        self.entries.iter().filter_map(|e| e.score).collect()
    }
}

/// Column rank parameter used by the leverage-score methods when none is given.
pub fn default_rank_k(x: &DenseMatrix) -> usize {
    x.rows().min(x.cols()).min(10)
}

enum Prepared {
    Sf,
    Leverage(LeverageScores),
    Qr(Vec<usize>),
    Deim,
}

fn prepare(d: &DenseMatrix, method: CurMethod, opts: &MethodOptions) -> Result<Prepared> {
    Ok(match method {
        CurMethod::Sf => Prepared::Sf,
        CurMethod::LsDeterministic | CurMethod::LsRandomized => {
            let k = opts.rank_k.unwrap_or_else(|| default_rank_k(d));
            Prepared::Leverage(leverage_scores(d, k, Axis::Cols)?)
        }
        CurMethod::Qr => Prepared::Qr(pivoted_qr(d).pivot_order),
        CurMethod::Deim => Prepared::Deim,
    })
}

fn columns_for_k(
    d: &DenseMatrix,
    k: usize,
    method: CurMethod,
    prep: &Prepared,
    opts: &MethodOptions,
) -> Result<Vec<usize>, String> {
    match (method, prep) {
        (_, Prepared::Sf) => match select_columns(d, k, &opts.sf) {
            Ok((set, trace)) if trace.status == CountStatus::Exact => Ok(set),
            Ok((set, _)) => Err(format!("bisection reached {} columns", set.len())),
            Err(CurError::CountUnreachable { achieved, .. }) => Err(format!("bisection reached {achieved} columns")),
            Err(e) => Err(e.to_string()),
        },
        (CurMethod::LsRandomized, Prepared::Leverage(s)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let set = bernoulli_sample(&s.scores, k, &mut rng);
            if set.len() == k {
                Ok(set)
            } else {
                Err(format!("sampled {} columns", set.len()))
            }
        }
        (_, Prepared::Leverage(s)) => Ok(s.ranking()[..k].to_vec()),
        (_, Prepared::Qr(order)) => Ok(order[..k].to_vec()),
        (_, Prepared::Deim) => {
            if k > d.rows().min(d.cols()) {
                return Err(format!("DEIM needs k <= {}", d.rows().min(d.cols())));
            }
            let dec = truncated_svd(d, k).map_err(|e| e.to_string())?;
            deim_select(&dec.v, k).map_err(|e| e.to_string())
        }
    }
}

/// Fits `D ≈ C · (C⁺ D D⁺) · D` for every `k = 1..=n` and scores each fit.
///
/// Counts the method cannot produce are skipped and recorded. Residuals at
/// rounding level (`≤ (16ε)²‖D‖_F²`) count as exact fits, so a noiseless
/// low-rank `D` is not decided by rounding noise. Ties go to the smallest `k`.
pub fn auto_select_columns(
    d: &DenseMatrix,
    method: CurMethod,
    criterion: Criterion,
    opts: &MethodOptions,
) -> Result<AutoSelection> {
    let (m, n) = d.shape();
    if m == 0 || n == 0 {
        return Err(CurError::InvalidInput("empty matrix".into()));
    }
    let prep = prepare(d, method, opts)?;
    let d_pinv = pseudoinverse(d, default_rank_tol(d));
    let dd_pinv = d.matmul(&d_pinv);
    let floor = (16.0 * f64::EPSILON).powi(2) * d.frobenius_norm_sq();

    let entries: Vec<KEntry> = (1..=n)
        .into_par_iter()
        .map(|k| match columns_for_k(d, k, method, &prep, opts) {
            Err(reason) => KEntry {
                k,
                col_indices: Vec::new(),
                score: None,
                skipped: Some(reason),
            },
            Ok(cols) => {
                let c = d.select_columns(&cols);
                let u = pseudoinverse(&c, default_rank_tol(&c)).matmul(&dd_pinv);
                let mut res = d.sub(&c.matmul(&u).matmul(d)).frobenius_norm_sq();
                if res <= floor {
                    res = 0.0;
                }
                match aic_bic(m, n, k, res) {
                    Ok(score) => KEntry {
                        k,
                        col_indices: cols,
                        score: Some(score),
                        skipped: None,
                    },
                    Err(e) => KEntry {
                        k,
                        col_indices: cols,
                        score: None,
                        skipped: Some(e.to_string()),
                    },
                }
            }
        })
        .collect();

    if entries.iter().all(|e| e.score.is_none()) {
        return Err(CurError::Numerical(format!(
            "no feasible column count for method {method}"
        )));
    }
    let pick = |key: fn(&ModelScore) -> f64| -> Result<Option<CurDecomposition>> {
        let best =
            entries
                .iter()
                .filter_map(|e| e.score.map(|s| (e, key(&s))))
                .fold(None::<(&KEntry, f64)>, |acc, (e, v)| match acc {
                    Some((_, b)) if b <= v => acc,
                    _ => Some((e, v)),
                });
        let Some((entry, _)) = best else { return Ok(None) };
        let params = MethodParams {
            c: entry.k,
            r: m,
            rank_k: opts.rank_k,
            seed: (method == CurMethod::LsRandomized).then_some(opts.seed),
            ..MethodParams::default()
        };
        CurDecomposition::from_indices(d, entry.col_indices.clone(), (0..m).collect(), method, params, None).map(Some)
    };
    let by_aic = if criterion != Criterion::Bic {
        pick(|s| s.aic)?
    } else {
        None
    };
    let by_bic = if criterion != Criterion::Aic {
        pick(|s| s.bic)?
    } else {
        None
    };
    Ok(AutoSelection {
        entries,
        by_aic,
        by_bic,
    })
}
