//! Dense linear-algebra kernels: SVD, spectral norm, pseudoinverse and
//! column-pivoted QR.

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;

/// Thin singular value decomposition `M ≈ U · diag(S) · Vᵀ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvdResult {
    /// Left singular vectors, `m × k`.
    pub u: DenseMatrix,
    /// Singular values, non-increasing.
    pub s: Vec<f64>,
    /// Right singular vectors, `n × k`.
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `U · diag(S) · Vᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (t, v) in us.row_mut(i).iter_mut().enumerate() {
                *v *= self.s[t];
            }
        }
        us.matmul_t(&self.v)
    }
}

/// Full thin SVD with `min(m, n)` singular triplets, sorted by decreasing
/// singular value.
pub fn svd(m: &DenseMatrix) -> SvdResult {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return SvdResult {
            u: DenseMatrix::zeros(rows, 0),
            s: Vec::new(),
            v: DenseMatrix::zeros(cols, 0),
        };
    }
    let dec = m.to_nalgebra().svd(true, true);
    let u = dec.u.expect("left singular vectors requested");
    let vt = dec.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..k).collect();
    // Stable sort keeps the factorization's own order among equal values.
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let s = order.iter().map(|&t| dec.singular_values[t].max(0.0)).collect();
    let u = DenseMatrix::from_fn(rows, k, |i, t| u[(i, order[t])]);
    let v = DenseMatrix::from_fn(cols, k, |j, t| vt[(order[t], j)]);
    SvdResult { u, s, v }
}

/// Leading `k` singular triplets.
pub fn truncated_svd(m: &DenseMatrix, k: usize) -> Result<SvdResult> {
    let max_k = m.rows().min(m.cols());
    if k == 0 || k > max_k {
        return Err(CurError::Config(format!("rank {k} outside 1..={max_k}")));
    }
    let full = svd(m);
    let cols: Vec<usize> = (0..k).collect();
    Ok(SvdResult {
        u: full.u.select_columns(&cols),
        s: full.s[..k].to_vec(),
        v: full.v.select_columns(&cols),
    })
}

/// Singular values only, non-increasing.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    if m.rows().min(m.cols()) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().map(|v| v.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    if m.max_abs() == 0.0 {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Default relative cutoff for [`pseudoinverse`]: `max(m, n) · ε`.
pub fn default_rank_tol(m: &DenseMatrix) -> f64 {
    m.rows().max(m.cols()) as f64 * f64::EPSILON
}

/// Moore–Penrose pseudoinverse. Singular values at or below
/// `rank_tol · σ_max` are treated as zero.
pub fn pseudoinverse(m: &DenseMatrix, rank_tol: f64) -> DenseMatrix {
    let (rows, cols) = m.shape();
    let dec = svd(m);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let cutoff = rank_tol * smax;
    // V · S⁺ · Uᵀ, skipping the discarded triplets.
    let kept: Vec<usize> = (0..dec.rank())
        .filter(|&t| dec.s[t] > cutoff && dec.s[t] > 0.0)
        .collect();
    if kept.is_empty() {
        return DenseMatrix::zeros(cols, rows);
    }
    let mut v = dec.v.select_columns(&kept);
    for j in 0..v.rows() {
        for (t, x) in v.row_mut(j).iter_mut().enumerate() {
            *x /= dec.s[kept[t]];
        }
    }
    v.matmul_t(&dec.u.select_columns(&kept))
}

/// Column-pivoted QR factorization `M · P = Q · R`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PivotedQr {
    /// `pivot_order[k]` is the original index of the `k`-th factored column.
    pub pivot_order: Vec<usize>,
    /// `m × min(m, n)` with orthonormal columns.
    pub q: DenseMatrix,
    /// `min(m, n) × n` upper trapezoidal, columns in pivot order.
    pub r: DenseMatrix,
}

// Residual norms within this relative margin count as tied.
const PIVOT_TIE_RTOL: f64 = 1e-12;

/// Householder QR with Businger–Golub column pivoting.
///
/// At each step the remaining column with the largest residual norm is
/// moved to the front; ties go to the lowest original column index. Columns
/// left over once the factorization is exhausted keep ascending index order.
pub fn pivoted_qr(m: &DenseMatrix) -> PivotedQr {
    let (rows, cols) = m.shape();
    let steps = rows.min(cols);
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(steps);

    for k in 0..steps {
        // Residual norms are recomputed rather than downdated so that
        // cancellation never decides a pivot.
        let resid = |a: &DenseMatrix, j: usize| (k..rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt();
        let mut best = k;
        let mut best_norm = resid(&a, k);
        for j in k + 1..cols {
            let nj = resid(&a, j);
            let tied = (nj - best_norm).abs() <= PIVOT_TIE_RTOL * nj.max(best_norm);
            let better = if tied { perm[j] < perm[best] } else { nj > best_norm };
            if better {
                best = j;
                best_norm = nj;
            }
        }
        if best != k {
            for i in 0..rows {
                let row = a.row_mut(i);
                row.swap(k, best);
            }
            perm.swap(k, best);
        }

        // Householder vector for a[k.., k].
        let mut v: Vec<f64> = (k..rows).map(|i| a[(i, k)]).collect();
        let alpha = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if alpha == 0.0 {
            reflectors.push((v, 0.0));
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vnorm_sq;
        for j in k..cols {
            let dot: f64 = (k..rows).map(|i| v[i - k] * a[(i, j)]).sum();
            let f = beta * dot;
            for i in k..rows {
                a[(i, j)] -= f * v[i - k];
            }
        }
        for i in k + 1..rows {
            a[(i, k)] = 0.0;
        }
        reflectors.push((v, beta));
    }

    // Restore index order among the columns never used as pivots.
    if steps < cols {
        let mut tail: Vec<usize> = (steps..cols).collect();
        tail.sort_by_key(|&j| perm[j]);
        let old = a.clone();
        let old_perm = perm.clone();
        for (slot, &src) in (steps..cols).zip(&tail) {
            perm[slot] = old_perm[src];
            for i in 0..rows {
                a[(i, slot)] = old[(i, src)];
            }
        }
    }

    let mut q = DenseMatrix::zeros(rows, steps);
    for t in 0..steps {
        q[(t, t)] = 1.0;
    }
    for (k, (v, beta)) in reflectors.iter().enumerate().rev() {
        if *beta == 0.0 {
            continue;
        }
        for j in 0..steps {
            let dot: f64 = (k..rows).map(|i| v[i - k] * q[(i, j)]).sum();
            let f = beta * dot;
            for i in k..rows {
                q[(i, j)] -= f * v[i - k];
            }
        }
    }
    let r = DenseMatrix::from_fn(steps, cols, |i, j| if j >= i { a[(i, j)] } else { 0.0 });
    PivotedQr {
        pivot_order: perm,
        q,
        r,
    }
}
