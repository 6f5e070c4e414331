//! The CUR factorization record shared by every selection method.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;
use crate::numerics::{default_rank_tol, pseudoinverse};

/// Selection method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurMethod {
    #[serde(rename = "sf")]
    Sf,
    #[serde(rename = "ls-d")]
    LsDeterministic,
    #[serde(rename = "ls-r")]
    LsRandomized,
    #[serde(rename = "deim")]
    Deim,
    #[serde(rename = "qr")]
    Qr,
}

impl CurMethod {
    pub const ALL: [CurMethod; 5] = [
        CurMethod::Sf,
        CurMethod::LsDeterministic,
        CurMethod::LsRandomized,
        CurMethod::Deim,
        CurMethod::Qr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CurMethod::Sf => "sf",
            CurMethod::LsDeterministic => "ls-d",
            CurMethod::LsRandomized => "ls-r",
            CurMethod::Deim => "deim",
            CurMethod::Qr => "qr",
        }
    }
}

impl fmt::Display for CurMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurMethod {
    type Err = CurError;

    fn from_str(s: &str) -> Result<Self> {
        CurMethod::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CurError::Config(format!("unknown CUR method {s:?}")))
    }
}

/// Whether a requested index count was met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CountStatus {
    Exact,
    /// Bisection ran out of steps; the closest count seen was kept.
    Nearest {
        target: usize,
        achieved: usize,
    },
    /// The method draws a random number of indices by design.
    Sampled {
        target: usize,
        achieved: usize,
    },
}

impl CountStatus {
    pub fn is_exact(self) -> bool {
        matches!(self, CountStatus::Exact)
    }
}

/// Parameters a decomposition was produced with.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodParams {
    pub c: usize,
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_r: Option<f64>,
}

/// `X ≈ C · U · R` with `C = X(:, I_C)` and `R = X(I_R, :)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurDecomposition {
    pub col_indices: Vec<usize>,
    pub row_indices: Vec<usize>,
    /// `|I_C| × |I_R|`
    pub u: DenseMatrix,
    pub method: CurMethod,
    pub params: MethodParams,
    pub col_status: CountStatus,
    pub row_status: CountStatus,
}

impl CurDecomposition {
    /// Assembles a decomposition with `U = C⁺ X R⁺`.
    pub fn from_indices(
        x: &DenseMatrix,
        col_indices: Vec<usize>,
        row_indices: Vec<usize>,
        method: CurMethod,
        params: MethodParams,
        rank_tol: Option<f64>,
    ) -> Result<Self> {
        let u = build_u(x, &col_indices, &row_indices, rank_tol)?;
        Ok(Self {
            col_indices,
            row_indices,
            u,
            method,
            params,
            col_status: CountStatus::Exact,
            row_status: CountStatus::Exact,
        })
    }

    pub fn c(&self) -> usize {
        self.col_indices.len()
    }

    pub fn r(&self) -> usize {
        self.row_indices.len()
    }

    pub fn is_exact(&self) -> bool {
        self.col_status.is_exact() && self.row_status.is_exact()
    }

    pub fn columns(&self, x: &DenseMatrix) -> DenseMatrix {
        x.select_columns(&self.col_indices)
    }

    pub fn rows(&self, x: &DenseMatrix) -> DenseMatrix {
        x.select_rows(&self.row_indices)
    }

    /// `C · U · R`
    pub fn reconstruct(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.validate(x.shape())?;
        Ok(self.columns(x).matmul(&self.u).matmul(&self.rows(x)))
    }

    /// Checks index ranges, uniqueness and the shape of `U`.
    pub fn validate(&self, shape: (usize, usize)) -> Result<()> {
        check_indices(&self.col_indices, shape.1, "column")?;
        check_indices(&self.row_indices, shape.0, "row")?;
        if self.u.shape() != (self.c(), self.r()) {
            return Err(CurError::ShapeMismatch(format!(
                "U is {:?}, expected ({}, {})",
                self.u.shape(),
                self.c(),
                self.r()
            )));
        }
        Ok(())
    }
}

fn check_indices(idx: &[usize], bound: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; bound];
    for &i in idx {
        if i >= bound {
            return Err(CurError::InvalidInput(format!(
                "{what} index {i} out of range 0..{bound}"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(CurError::InvalidInput(format!("{what} index {i} repeated")));
        }
    }
    Ok(())
}

/// `U = C⁺ · X · R⁺`, the Frobenius-optimal link for fixed `C` and `R`.
///
/// `rank_tol` is relative to the largest singular value of each factor and
/// defaults to `max(rows, cols) · ε` of that factor.
pub fn build_u(
    x: &DenseMatrix,
    col_indices: &[usize],
    row_indices: &[usize],
    rank_tol: Option<f64>,
) -> Result<DenseMatrix> {
    check_indices(col_indices, x.cols(), "column")?;
    check_indices(row_indices, x.rows(), "row")?;
    let c = x.select_columns(col_indices);
    let r = x.select_rows(row_indices);
    let c_pinv = pseudoinverse(&c, rank_tol.unwrap_or_else(|| default_rank_tol(&c)));
    let r_pinv = pseudoinverse(&r, rank_tol.unwrap_or_else(|| default_rank_tol(&r)));
    Ok(c_pinv.matmul(x).matmul(&r_pinv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_two() -> DenseMatrix {
        let a = DenseMatrix::from_rows(&[[1.0, 0.5], [-2.0, 1.0], [0.3, 0.7], [1.5, -0.4]]).unwrap();
        let b = DenseMatrix::from_rows(&[[0.2, 1.0], [1.1, -0.3], [-0.7, 0.9], [0.4, 0.4], [2.0, 0.1]]).unwrap();
        a.matmul_t(&b)
    }

    #[test]
    fn full_selection_of_invertible_matrix_is_exact() {
        let x = DenseMatrix::from_rows(&[[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]).unwrap();
        let dec = CurDecomposition::from_indices(
            &x,
            vec![0, 1, 2],
            vec![0, 1, 2],
            CurMethod::Qr,
            MethodParams::default(),
            None,
        )
        .unwrap();
        assert!(dec.reconstruct(&x).unwrap().sub(&x).max_abs() < 1e-12);
    }

    #[test]
    fn spanning_selection_of_rank_two() {
        let x = rank_two();
        let u = build_u(&x, &[0, 2], &[1, 3], None).unwrap();
        let approx = x.select_columns(&[0, 2]).matmul(&u).matmul(&x.select_rows(&[1, 3]));
        assert!(approx.sub(&x).frobenius_norm() <= 1e-9 * x.frobenius_norm());
    }

    #[test]
    fn zero_matrix_gives_zero_link() {
        let u = build_u(&DenseMatrix::zeros(3, 4), &[0, 1], &[2], None).unwrap();
        assert_eq!(u, DenseMatrix::zeros(2, 1));
    }

    #[test]
    fn link_beats_random_alternatives() {
        let x = DenseMatrix::from_fn(5, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.7 + 0.1 * j as f64);
        let (ic, ir) = (vec![1, 3], vec![0, 2, 4]);
        let u = build_u(&x, &ic, &ir, None).unwrap();
        let c = x.select_columns(&ic);
        let r = x.select_rows(&ir);
        let best = x.sub(&c.matmul(&u).matmul(&r)).frobenius_norm();
        let mut s = 17u64;
        for _ in 0..20 {
            let v = DenseMatrix::from_fn(2, 3, |i, j| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                u[(i, j)] + ((s >> 33) as f64 / (1u64 << 31) as f64 - 0.5)
            });
            assert!(best <= x.sub(&c.matmul(&v).matmul(&r)).frobenius_norm());
        }
    }

    #[test]
    fn rejects_bad_indices() {
        let x = rank_two();
        assert!(build_u(&x, &[0, 0], &[1], None).is_err());
        assert!(build_u(&x, &[7], &[1], None).is_err());
    }

    #[test]
    fn method_tags_round_trip() {
        for m in CurMethod::ALL {
            assert_eq!(m.as_str().parse::<CurMethod>().unwrap(), m);
        }
        assert!("pca".parse::<CurMethod>().is_err());
    }
}
