//! CUR matrix approximation.
//!
//! The central method picks columns and rows of `X` by solving convex,
//! group-sparse regression problems with a surrogate-functional iteration and
//! bisecting on the regularization weight until the requested number of groups
//! survives. Leverage-score, DEIM and pivoted-QR selections are provided as
//! baselines, together with AIC/BIC choice of the column count and the error and
//! feature-separation metrics used to compare methods.
//!
//! ```
//! use curkit::{DenseMatrix, SfConfig};
//!
//! let x = DenseMatrix::identity(3);
//! let dec = curkit::sf_cur(&x, 3, 3, &SfConfig::default()).unwrap();
//! assert_eq!(dec.col_indices.len(), 3);
//! assert_eq!(dec.u.shape(), (3, 3));
//! ```

pub mod baselines;
pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod matrix;
pub mod model_selection;
pub mod numerics;
pub mod prox;
pub mod sfcur;
pub mod solver;

pub use baselines::{
    deim_cur, deim_select, leverage_scores, ls_deterministic_cur, ls_randomized_cur, pca_correlation_select, qr_cur,
    Axis, LeverageScores,
};
pub use decomposition::{build_u, CountStatus, CurDecomposition, CurMethod, MethodParams};
pub use error::{CurError, ErrorKind, Result};
pub use evaluation::{
    relative_error, run_method, selection_report, separation_counts, svd_relative_error, sweep_error_curve, ErrorCurve,
    MethodOptions, MethodRun, SelectionReport, StdKind, SweepConfig,
};
pub use io::{CsvOptions, LabelMode, LabeledMatrix, MatrixFormat};
pub use matrix::DenseMatrix;
pub use model_selection::{aic_bic, auto_select_columns, difference_matrix, AutoSelection, Criterion, ModelScore};
pub use prox::PenaltyKind;
pub use sfcur::{
    critical_lambda_cols, critical_lambda_rows, select_columns, select_rows, sf_cur, sf_cur_traced, BisectionStep,
    BisectionTrace, LambdaOverride, SfCurOutcome,
};
pub use solver::{PenaltyAxis, SfConfig, SfProblem, SfState};
