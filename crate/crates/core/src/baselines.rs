//! Comparison selectors: leverage scores (deterministic and sampled), DEIM,
//! pivoted QR, and correlation with the leading principal components.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::{CountStatus, CurDecomposition, CurMethod, MethodParams};
use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;
use crate::numerics::{pivoted_qr, truncated_svd};

/// Draws allowed before an empty leverage-score sample is reported.
pub const LS_MAX_DRAWS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Cols,
    Rows,
}

/// Normalized leverage scores along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeverageScores {
    pub scores: Vec<f64>,
    pub k: usize,
}

impl LeverageScores {
    /// Indices by decreasing score; equal scores keep ascending index order.
    pub fn ranking(&self) -> Vec<usize> {
        rank_descending(&self.scores)
    }
}

pub(crate) fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

fn check_rank(x: &DenseMatrix, k: usize) -> Result<()> {
    let max_k = x.rows().min(x.cols());
    if k == 0 || k > max_k {
        return Err(CurError::Config(format!("rank parameter {k} outside 1..={max_k}")));
    }
    Ok(())
}

fn check_count(n: usize, available: usize, what: &str) -> Result<()> {
    if n == 0 || n > available {
        return Err(CurError::Config(format!("{what} count {n} outside 1..={available}")));
    }
    Ok(())
}

/// `score_j = (1/k) Σ_{t<k} V(j,t)²` over the leading right singular vectors
/// (left ones for rows), rescaled to sum to one.
pub fn leverage_scores(x: &DenseMatrix, k: usize, axis: Axis) -> Result<LeverageScores> {
    check_rank(x, k)?;
    let dec = truncated_svd(x, k)?;
    let basis = match axis {
        Axis::Cols => &dec.v,
        Axis::Rows => &dec.u,
    };
    Ok(LeverageScores {
        scores: scores_from_basis(basis),
        k,
    })
}

pub(crate) fn scores_from_basis(basis: &DenseMatrix) -> Vec<f64> {
    let k = basis.cols() as f64;
    let raw: Vec<f64> = (0..basis.rows())
        .map(|j| basis.row(j).iter().map(|v| v * v).sum::<f64>() / k)
        .collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|s| s / total).collect()
    } else {
        vec![1.0 / raw.len() as f64; raw.len()]
    }
}

/// Top `c` columns and top `r` rows by leverage score, listed in rank order.
pub fn ls_deterministic_cur(x: &DenseMatrix, c: usize, r: usize, k: usize) -> Result<CurDecomposition> {
    check_count(c, x.cols(), "column")?;
    check_count(r, x.rows(), "row")?;
    let cols = leverage_scores(x, k, Axis::Cols)?.ranking()[..c].to_vec();
    let rows = leverage_scores(x, k, Axis::Rows)?.ranking()[..r].to_vec();
    let params = MethodParams {
        c,
        r,
        rank_k: Some(k),
        ..MethodParams::default()
    };
    CurDecomposition::from_indices(x, cols, rows, CurMethod::LsDeterministic, params, None)
}

/// Independent inclusion of each index with probability `min(1, count · score)`.
pub fn bernoulli_sample<R: Rng>(scores: &[f64], count: usize, rng: &mut R) -> Vec<usize> {
    scores
        .iter()
        .enumerate()
        .filter_map(|(j, &s)| {
            let p = (count as f64 * s).min(1.0);
            (rng.random::<f64>() < p).then_some(j)
        })
        .collect()
}

fn sample_nonempty<R: Rng>(scores: &[f64], count: usize, rng: &mut R, what: &str) -> Result<Vec<usize>> {
    for _ in 0..LS_MAX_DRAWS {
        let picked = bernoulli_sample(scores, count, rng);
        if !picked.is_empty() {
            return Ok(picked);
        }
    }
    Err(CurError::Numerical(format!(
        "leverage-score sampling drew no {what}s in {LS_MAX_DRAWS} attempts"
    )))
}

/// Leverage-score sampling: columns first, then rows, from one seeded stream.
/// The realized counts vary around `c` and `r`.
pub fn ls_randomized_cur(x: &DenseMatrix, c: usize, r: usize, k: usize, seed: u64) -> Result<CurDecomposition> {
    check_count(c, x.cols(), "column")?;
    check_count(r, x.rows(), "row")?;
    let col_scores = leverage_scores(x, k, Axis::Cols)?;
    let row_scores = leverage_scores(x, k, Axis::Rows)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = sample_nonempty(&col_scores.scores, c, &mut rng, "column")?;
    let rows = sample_nonempty(&row_scores.scores, r, &mut rng, "row")?;
    let params = MethodParams {
        c,
        r,
        rank_k: Some(k),
        seed: Some(seed),
        ..MethodParams::default()
    };
    let mut dec = CurDecomposition::from_indices(x, cols, rows, CurMethod::LsRandomized, params, None)?;
    dec.col_status = CountStatus::Sampled {
        target: c,
        achieved: dec.c(),
    };
    dec.row_status = CountStatus::Sampled {
        target: r,
        achieved: dec.r(),
    };
    Ok(dec)
}

fn first_argmax(values: impl Iterator<Item = f64>, skip: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if skip.contains(&i) {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Solves the square system `a · x = b` by Gaussian elimination with partial pivoting.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let (top, rest) = a.split_at_mut(i);
            let (pivot_row, row) = (&top[col], &mut rest[0]);
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|t| a[i][t] * x[t]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// DEIM point selection on the first `k` columns of `v`.
///
/// `p₁ = argmax |v(:,1)|`; each further index maximizes the residual of
/// interpolating the next basis vector at the indices chosen so far. The first
/// maximal entry wins ties.
pub fn deim_select(v: &DenseMatrix, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > v.cols() || k > v.rows() {
        return Err(CurError::Config(format!(
            "DEIM needs 1 <= k <= {}, got {k}",
            v.cols().min(v.rows())
        )));
    }
    let n = v.rows();
    let mut picked = vec![first_argmax((0..n).map(|i| v[(i, 0)].abs()), &[]).expect("non-empty basis")];
    for j in 1..k {
        let a: Vec<Vec<f64>> = picked.iter().map(|&p| (0..j).map(|t| v[(p, t)]).collect()).collect();
        let b: Vec<f64> = picked.iter().map(|&p| v[(p, j)]).collect();
        let coef = solve_small(a, b)
            .ok_or_else(|| CurError::Numerical(format!("singular DEIM interpolation system at step {}", j + 1)))?;
        let resid = (0..n).map(|i| (v[(i, j)] - (0..j).map(|t| v[(i, t)] * coef[t]).sum::<f64>()).abs());
        // Residuals vanish at chosen indices; excluding them guards against rounding.
        picked.push(first_argmax(resid, &picked).expect("k <= rows"));
    }
    Ok(picked)
}

/// DEIM on the leading `k` right (columns) and left (rows) singular vectors.
pub fn deim_cur(x: &DenseMatrix, k: usize) -> Result<CurDecomposition> {
    check_rank(x, k)?;
    let dec = truncated_svd(x, k)?;
    let cols = deim_select(&dec.v, k)?;
    let rows = deim_select(&dec.u, k)?;
    let params = MethodParams {
        c: k,
        r: k,
        rank_k: Some(k),
        ..MethodParams::default()
    };
    CurDecomposition::from_indices(x, cols, rows, CurMethod::Deim, params, None)
}

/// First `c` pivots of the pivoted QR of `X`, then the first `r` pivots of the
/// pivoted QR of `Cᵀ`.
pub fn qr_cur(x: &DenseMatrix, c: usize, r: usize) -> Result<CurDecomposition> {
    check_count(c, x.cols(), "column")?;
    check_count(r, x.rows(), "row")?;
    let cols = pivoted_qr(x).pivot_order[..c].to_vec();
    let ct = x.select_columns(&cols).transpose();
    let rows = pivoted_qr(&ct).pivot_order[..r].to_vec();
    let params = MethodParams {
        c,
        r,
        ..MethodParams::default()
    };
    CurDecomposition::from_indices(x, cols, rows, CurMethod::Qr, params, None)
}

/// Pearson correlation; zero when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa.sqrt() * sbb.sqrt())
    }
}

/// `max(|corr(X(:,j), pc₁)|, |corr(X(:,j), pc₂)|)` per column, with `pc_t = σ_t·U(:,t)`.
pub fn pca_correlation_scores(x: &DenseMatrix) -> Result<Vec<f64>> {
    let k = x.rows().min(x.cols()).min(2);
    if k == 0 {
        return Err(CurError::InvalidInput("empty matrix".into()));
    }
    let dec = truncated_svd(x, k)?;
    let pcs: Vec<Vec<f64>> = (0..k)
        .map(|t| dec.u.col(t).iter().map(|u| u * dec.s[t]).collect())
        .collect();
    Ok((0..x.cols())
        .map(|j| {
            let col = x.col(j);
            pcs.iter().map(|pc| pearson(&col, pc).abs()).fold(0.0, f64::max)
        })
        .collect())
}

/// The `c` columns most correlated with either leading principal component,
/// in decreasing order of correlation.
pub fn pca_correlation_select(x: &DenseMatrix, c: usize) -> Result<Vec<usize>> {
    check_count(c, x.cols(), "column")?;
    let scores = pca_correlation_scores(x)?;
    Ok(rank_descending(&scores)[..c].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut s = seed;
        DenseMatrix::from_fn(rows, cols, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
    }

    fn orthonormal(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let q = pivoted_qr(&lcg_matrix(rows, cols, seed)).q;
        q.select_columns(&(0..cols).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_scores() {
        let x = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let s = leverage_scores(&x, 2, Axis::Cols).unwrap();
        let expected = [0.5, 0.5, 0.0];
        for (a, b) in s.scores.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let dec = ls_deterministic_cur(&x, 2, 2, 2).unwrap();
        assert_eq!(dec.col_indices, vec![0, 1]);
        assert_eq!(dec.row_indices, vec![0, 1]);
    }

    #[test]
    fn orthogonal_matrix_has_uniform_scores() {
        let q = orthonormal(4, 4, 3);
        let s = leverage_scores(&q, 4, Axis::Cols).unwrap();
        assert!(s.scores.iter().all(|v| (v - 0.25).abs() < 1e-12));
        assert!((s.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_full_selection_is_score_order() {
        let x = lcg_matrix(5, 4, 12);
        let dec = ls_deterministic_cur(&x, 4, 5, 2).unwrap();
        let scores = leverage_scores(&x, 2, Axis::Cols).unwrap().scores;
        assert!(dec.col_indices.windows(2).all(|w| scores[w[0]] >= scores[w[1]]));
        assert_eq!(dec, ls_deterministic_cur(&x, 4, 5, 2).unwrap());
    }

    #[test]
    fn certain_column_always_sampled() {
        let scores = [1.0, 0.0, 0.0];
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(bernoulli_sample(&scores, 1, &mut rng), vec![0]);
        }
    }

    #[test]
    fn randomized_is_seed_deterministic() {
        let x = lcg_matrix(7, 6, 5);
        let a = ls_randomized_cur(&x, 3, 3, 2, 7).unwrap();
        assert_eq!(a, ls_randomized_cur(&x, 3, 3, 2, 7).unwrap());
        a.validate(x.shape()).unwrap();
        assert!(matches!(a.col_status, CountStatus::Sampled { target: 3, .. }));
    }

    #[test]
    fn deim_small_cases() {
        let v = DenseMatrix::from_rows(&[[0.6], [0.8], [0.0]]).unwrap();
        assert_eq!(deim_select(&v, 1).unwrap(), vec![1]);
        let e = DenseMatrix::identity(5).select_columns(&[0, 1, 2]);
        assert_eq!(deim_select(&e, 3).unwrap(), vec![0, 1, 2]);
    }

    // Independent recurrence using explicit inverses from nalgebra.
    fn deim_reference(v: &DenseMatrix, k: usize) -> Vec<usize> {
        let n = v.rows();
        let vm = nalgebra::DMatrix::from_fn(n, v.cols(), |i, j| v[(i, j)]);
        let mut p: Vec<usize> = Vec::new();
        for j in 0..k {
            let r = if j == 0 {
                vm.column(0).into_owned()
            } else {
                let basis = vm.columns(0, j).into_owned();
                let pt_basis = nalgebra::DMatrix::from_fn(j, j, |a, b| basis[(p[a], b)]);
                let rhs = nalgebra::DVector::from_fn(j, |a, _| vm[(p[a], j)]);
                let c = pt_basis.try_inverse().unwrap() * rhs;
                vm.column(j) - basis * c
            };
            let mut best = 0;
            for i in 0..n {
                if r[i].abs() > r[best].abs() {
                    best = i;
                }
            }
            p.push(best);
        }
        p
    }

    #[test]
    fn deim_matches_reference() {
        for seed in 0..10 {
            let v = orthonormal(6, 3, seed);
            let got = deim_select(&v, 3).unwrap();
            assert_eq!(got, deim_reference(&v, 3));
            let mut sorted = got.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 3);
        }
    }

    #[test]
    fn deim_ignores_sign_flips() {
        let v = orthonormal(7, 3, 4);
        let flipped = DenseMatrix::from_fn(7, 3, |i, j| if j == 1 { -v[(i, j)] } else { v[(i, j)] });
        assert_eq!(deim_select(&v, 3).unwrap(), deim_select(&flipped, 3).unwrap());
    }

    #[test]
    fn deim_on_diagonal() {
        let x = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let dec = deim_cur(&x, 2).unwrap();
        assert_eq!(dec.col_indices, vec![0, 1]);
        assert_eq!(dec.row_indices, vec![0, 1]);
    }

    #[test]
    fn qr_picks_by_norm() {
        let x = DenseMatrix::from_diag(&[1.0, 2.0, 3.0]);
        let dec = qr_cur(&x, 2, 2).unwrap();
        assert_eq!(dec.col_indices, vec![2, 1]);
    }

    #[test]
    fn spanning_baselines_reconstruct() {
        for seed in 0..5 {
            let x = lcg_matrix(8, 3, seed).matmul(&lcg_matrix(3, 6, seed + 100));
            for dec in [deim_cur(&x, 3).unwrap(), qr_cur(&x, 3, 3).unwrap()] {
                let err = dec.reconstruct(&x).unwrap().sub(&x).frobenius_norm() / x.frobenius_norm();
                assert!(err <= 1e-8, "{:?} {err}", dec.method);
            }
        }
    }

    #[test]
    fn pca_prefers_principal_direction() {
        let mut x = lcg_matrix(10, 5, 6);
        // Make the first principal score vector available as a column.
        let dec = truncated_svd(&x, 1).unwrap();
        for i in 0..10 {
            x[(i, 3)] = dec.u[(i, 0)] * dec.s[0] * 10.0;
        }
        for i in 0..10 {
            x[(i, 1)] = 0.0;
        }
        let order = pca_correlation_select(&x, 5).unwrap();
        assert_eq!(order[0], 3);
        assert_eq!(order[4], 1);
    }

    #[test]
    fn pca_matches_brute_force() {
        let x = lcg_matrix(10, 6, 19);
        let dec = truncated_svd(&x, 2).unwrap();
        let corr = |a: &[f64], b: &[f64]| {
            let n = a.len() as f64;
            let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
            let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
            let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
            let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
            cov / (va * vb).sqrt()
        };
        let pc: Vec<Vec<f64>> = (0..2)
            .map(|t| (0..10).map(|i| dec.u[(i, t)] * dec.s[t]).collect())
            .collect();
        let mut brute: Vec<(f64, usize)> = (0..6)
            .map(|j| (corr(&x.col(j), &pc[0]).abs().max(corr(&x.col(j), &pc[1]).abs()), j))
            .collect();
        brute.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let expected: Vec<usize> = brute.iter().map(|p| p.1).collect();
        assert_eq!(pca_correlation_select(&x, 6).unwrap(), expected);
    }
}
