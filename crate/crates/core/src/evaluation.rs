//! Error metrics, class-separation statistics for selected features, and
//! error/time sweeps over `c = r`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{deim_cur, ls_deterministic_cur, ls_randomized_cur, qr_cur};
use crate::decomposition::{CountStatus, CurDecomposition, CurMethod};
use crate::error::{CurError, Result};
use crate::io::LabeledMatrix;
use crate::matrix::DenseMatrix;
use crate::model_selection::default_rank_k;
use crate::numerics::singular_values;
use crate::sfcur::{sf_cur_traced, BisectionTrace, LambdaOverride};
use crate::solver::SfConfig;

/// Knobs shared by every method dispatch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodOptions {
    pub sf: SfConfig,
    /// Singular-vector count for the leverage-score methods.
    pub rank_k: Option<usize>,
    pub seed: u64,
    pub lambda: LambdaOverride,
}

/// A decomposition together with the bisection traces when the method has them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodRun {
    pub decomposition: CurDecomposition,
    pub col_trace: Option<BisectionTrace>,
    pub row_trace: Option<BisectionTrace>,
}

/// Runs one CUR method with `c` columns and `r` rows.
pub fn run_method(x: &DenseMatrix, method: CurMethod, c: usize, r: usize, opts: &MethodOptions) -> Result<MethodRun> {
    let rank_k = || opts.rank_k.unwrap_or_else(|| default_rank_k(x));
    let plain = |decomposition| MethodRun {
        decomposition,
        col_trace: None,
        row_trace: None,
    };
    Ok(match method {
        CurMethod::Sf => {
            let out = sf_cur_traced(x, c, r, &opts.sf, opts.lambda)?;
            MethodRun {
                decomposition: out.decomposition,
                col_trace: out.col_trace,
                row_trace: out.row_trace,
            }
        }
        CurMethod::LsDeterministic => plain(ls_deterministic_cur(x, c, r, rank_k())?),
        CurMethod::LsRandomized => plain(ls_randomized_cur(x, c, r, rank_k(), opts.seed)?),
        CurMethod::Deim => {
            if c != r {
                return Err(CurError::Config(format!(
                    "DEIM selects k = c = r, got c = {c}, r = {r}"
                )));
            }
            plain(deim_cur(x, c)?)
        }
        CurMethod::Qr => plain(qr_cur(x, c, r)?),
    })
}

/// `‖X − C·U·R‖_F / ‖X‖_F`
pub fn relative_error(x: &DenseMatrix, dec: &CurDecomposition) -> Result<f64> {
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Err(CurError::InvalidInput(
            "relative error of a zero matrix is undefined".into(),
        ));
    }
    Ok(x.sub(&dec.reconstruct(x)?).frobenius_norm() / norm)
}

/// Relative error of the best rank-`k` approximation, from the discarded
/// singular values.
pub fn svd_relative_error(x: &DenseMatrix, k: usize) -> Result<f64> {
    let s = singular_values(x);
    let total: f64 = s.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Err(CurError::InvalidInput(
            "relative error of a zero matrix is undefined".into(),
        ));
    }
    let tail: f64 = s.iter().skip(k).map(|v| v * v).sum();
    Ok((tail / total).sqrt())
}

fn two_classes(x: &LabeledMatrix) -> Result<&[usize]> {
    let classes = x
        .class_of_row
        .as_deref()
        .ok_or_else(|| CurError::Config("class labels are required for separation counts".into()))?;
    if x.class_names.len() != 2 {
        return Err(CurError::Config(format!(
            "separation needs exactly two classes, found {}",
            x.class_names.len()
        )));
    }
    Ok(classes)
}

/// Rows of each class whose entry in `feature` exceeds `threshold`. The first
/// class is the one whose name sorts first.
pub fn separation_counts(x: &LabeledMatrix, feature: usize, threshold: f64) -> Result<(usize, usize)> {
    let classes = two_classes(x)?;
    if feature >= x.matrix.cols() {
        return Err(CurError::InvalidInput(format!("feature {feature} out of range")));
    }
    let mut counts = (0, 0);
    for (i, &class) in classes.iter().enumerate() {
        if x.matrix[(i, feature)] > threshold {
            if class == 0 {
                counts.0 += 1;
            } else {
                counts.1 += 1;
            }
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdKind {
    /// Divides by `n − 1`.
    #[default]
    Sample,
    /// Divides by `n`.
    Population,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSeparation {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub count_a: usize,
    pub count_b: usize,
    pub abs_diff: usize,
}

/// Separation statistics over a list of selected features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub selected: Vec<usize>,
    pub class_a: String,
    pub class_b: String,
    pub threshold: f64,
    pub per_feature: Vec<FeatureSeparation>,
    pub median_diff: f64,
    pub mean_diff: f64,
    pub std_diff: f64,
    pub std_kind: StdKind,
    /// False when the standard deviation has too few samples and was set to 0.
    pub std_defined: bool,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard deviation, or `None` when the estimator is undefined.
pub fn std_dev(values: &[f64], kind: StdKind) -> Option<f64> {
    let n = values.len();
    let denom = match kind {
        StdKind::Sample if n >= 2 => (n - 1) as f64,
        StdKind::Population if n >= 1 => n as f64,
        _ => return None,
    };
    let m = mean(values);
    Some((values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / denom).sqrt())
}

pub fn selection_report(
    x: &LabeledMatrix,
    selected: &[usize],
    threshold: f64,
    std_kind: StdKind,
) -> Result<SelectionReport> {
    two_classes(x)?;
    if selected.is_empty() {
        return Err(CurError::InvalidInput("selection is empty".into()));
    }
    let per_feature = selected
        .iter()
        .map(|&j| {
            let (a, b) = separation_counts(x, j, threshold)?;
            Ok(FeatureSeparation {
                index: j,
                label: x.col_labels.as_ref().map(|l| l[j].clone()),
                count_a: a,
                count_b: b,
                abs_diff: a.abs_diff(b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let diffs: Vec<f64> = per_feature.iter().map(|f| f.abs_diff as f64).collect();
    let sd = std_dev(&diffs, std_kind);
    Ok(SelectionReport {
        selected: selected.to_vec(),
        class_a: x.class_names[0].clone(),
        class_b: x.class_names[1].clone(),
        threshold,
        per_feature,
        median_diff: median(&diffs),
        mean_diff: mean(&diffs),
        std_diff: sd.unwrap_or(0.0),
        std_kind,
        std_defined: sd.is_some(),
    })
}

/// Repeats used for the randomized leverage-score method at each grid point.
pub const LS_R_REPEATS: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub methods: Vec<CurMethod>,
    /// Values of `c = r`.
    pub grid: Vec<usize>,
    pub options: MethodOptions,
    /// Add the rank-`k` truncated SVD as a reference curve.
    pub with_svd: bool,
    /// Record wall times; off gives reproducible output.
    pub timing: bool,
}

/// One realized decomposition at a grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub c: usize,
    pub r: usize,
    pub relative_error: f64,
    pub exact_count: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Method tag, or `svd` for the reference curve.
    pub method: String,
    pub k: usize,
    /// Mean over `samples`.
    pub relative_error: f64,
    /// Spread across seeds for the randomized method.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_std: Option<f64>,
    /// Seconds, averaged over samples.
    pub wall_time: f64,
    pub samples: Vec<RunSample>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<CurvePoint>,
}

impl ErrorCurve {
    pub fn for_method<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a CurvePoint> + 'a {
        self.points.iter().filter(move |p| p.method == method)
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn sweep_point(x: &DenseMatrix, method: Option<CurMethod>, k: usize, cfg: &SweepConfig) -> Result<CurvePoint> {
    let Some(method) = method else {
        let (err, t) = timed(|| svd_relative_error(x, k))?;
        return Ok(CurvePoint {
            method: "svd".into(),
            k,
            relative_error: err,
            error_std: None,
            wall_time: if cfg.timing { t } else { 0.0 },
            samples: vec![RunSample {
                seed: None,
                c: k,
                r: k,
                relative_error: err,
                exact_count: true,
            }],
        });
    };
    let seeds: Vec<Option<u64>> = if method == CurMethod::LsRandomized {
        (0..LS_R_REPEATS)
            .map(|i| Some(cfg.options.seed.wrapping_add(i)))
            .collect()
    } else {
        vec![None]
    };
    let mut samples = Vec::with_capacity(seeds.len());
    let mut total_time = 0.0;
    for seed in seeds {
        let opts = MethodOptions {
            seed: seed.unwrap_or(cfg.options.seed),
            ..cfg.options.clone()
        };
        let (run, t) = timed(|| run_method(x, method, k, k, &opts))?;
        total_time += t;
        let dec = run.decomposition;
        let exact_count = !matches!(dec.col_status, CountStatus::Nearest { .. })
            && !matches!(dec.row_status, CountStatus::Nearest { .. })
            && dec.c() == k
            && dec.r() == k;
        samples.push(RunSample {
            seed,
            c: dec.c(),
            r: dec.r(),
            relative_error: relative_error(x, &dec)?,
            exact_count,
        });
    }
    let errors: Vec<f64> = samples.iter().map(|s| s.relative_error).collect();
    Ok(CurvePoint {
        method: method.as_str().into(),
        k,
        relative_error: mean(&errors),
        error_std: (method == CurMethod::LsRandomized).then(|| std_dev(&errors, StdKind::Sample).unwrap_or(0.0)),
        wall_time: if cfg.timing {
            total_time / samples.len() as f64
        } else {
            0.0
        },
        samples,
    })
}

/// Relative error and wall time for every method at every `c = r` in the grid.
/// Points are computed in parallel and returned in (method, grid) order.
pub fn sweep_error_curve(x: &DenseMatrix, cfg: &SweepConfig) -> Result<ErrorCurve> {
    let max_k = x.rows().min(x.cols());
    if cfg.grid.is_empty() {
        return Err(CurError::Config("grid is empty".into()));
    }
    if let Some(&bad) = cfg.grid.iter().find(|&&k| k == 0 || k > max_k) {
        return Err(CurError::Config(format!("grid value {bad} outside 1..={max_k}")));
    }
    if x.frobenius_norm() == 0.0 {
        return Err(CurError::InvalidInput(
            "relative error of a zero matrix is undefined".into(),
        ));
    }
    let mut jobs: Vec<(Option<CurMethod>, usize)> = Vec::new();
    for &m in &cfg.methods {
        jobs.extend(cfg.grid.iter().map(|&k| (Some(m), k)));
    }
    if cfg.with_svd {
        jobs.extend(cfg.grid.iter().map(|&k| (None, k)));
    }
    let points = jobs
        .par_iter()
        .map(|&(m, k)| sweep_point(x, m, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::MethodParams;

    fn labeled(values: &[f64], classes: &[&str]) -> LabeledMatrix {
        let m = DenseMatrix::new(values.len(), 1, values.to_vec()).unwrap();
        LabeledMatrix::unlabeled(m).with_classes(classes).unwrap()
    }

    #[test]
    fn error_extremes() {
        let x = DenseMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let exact =
            CurDecomposition::from_indices(&x, vec![0, 1], vec![0, 1], CurMethod::Qr, MethodParams::default(), None)
                .unwrap();
        assert!(relative_error(&x, &exact).unwrap() < 1e-15);
        let zero_u = CurDecomposition {
            u: DenseMatrix::zeros(2, 2),
            ..exact.clone()
        };
        assert_eq!(relative_error(&x, &zero_u).unwrap(), 1.0);
        assert!(relative_error(&DenseMatrix::zeros(2, 2), &exact).is_err());
    }

    #[test]
    fn counts_per_class() {
        let x = labeled(&[2.0, 0.0, 2.0, 2.0], &["A", "A", "B", "B"]);
        assert_eq!(separation_counts(&x, 0, 1.0).unwrap(), (1, 2));
        let low = labeled(&[1.0, 0.5, -3.0, 1.0], &["A", "A", "B", "B"]);
        assert_eq!(separation_counts(&low, 0, 1.0).unwrap(), (0, 0));
        let three = labeled(&[1.0, 2.0, 3.0], &["A", "B", "C"]);
        assert!(matches!(separation_counts(&three, 0, 1.0), Err(CurError::Config(_))));
        let none = LabeledMatrix::unlabeled(DenseMatrix::zeros(2, 1));
        assert!(separation_counts(&none, 0, 1.0).is_err());
    }

    #[test]
    fn summary_statistics() {
        let diffs = [
            43.0, 42.0, 43.0, 48.0, 43.0, 45.0, 46.0, 38.0, 38.0, 42.0, 36.0, 44.0, 44.0, 39.0, 39.0,
        ];
        assert_eq!(median(&diffs), 43.0);
        assert_eq!(mean(&diffs), 42.0);
        let s = std_dev(&diffs, StdKind::Sample).unwrap();
        assert_eq!(format!("{s:.2}"), "3.36");
        let p = std_dev(&diffs, StdKind::Population).unwrap();
        assert_eq!(format!("{p:.2}"), "3.25");
        assert_eq!(median(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(std_dev(&[4.0], StdKind::Sample), None);
    }

    #[test]
    fn report_for_single_feature() {
        // 43 rows of class A above the threshold and none of class B.
        let mut values = vec![2.0; 43];
        values.extend([0.0; 5]);
        let mut classes = vec!["A"; 43];
        classes.extend(["B"; 5]);
        let x = labeled(&values, &classes);
        let rep = selection_report(&x, &[0], 1.0, StdKind::Sample).unwrap();
        assert_eq!((rep.median_diff, rep.mean_diff, rep.std_diff), (43.0, 43.0, 0.0));
        assert!(!rep.std_defined);
        assert_eq!(rep.per_feature[0].abs_diff, 43);
        assert!(selection_report(&x, &[], 1.0, StdKind::Sample).is_err());
    }

    #[test]
    fn sweep_shapes_and_ordering() {
        let a = DenseMatrix::from_fn(8, 3, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0 + 0.1 * (i * j) as f64);
        let b = DenseMatrix::from_fn(3, 6, |i, j| ((i * 2 + j) % 5) as f64 - 2.0 + 0.05 * j as f64);
        let x = a.matmul(&b);
        let cfg = SweepConfig {
            methods: CurMethod::ALL.to_vec(),
            grid: vec![1, 2, 3],
            options: MethodOptions {
                rank_k: Some(3),
                ..MethodOptions::default()
            },
            with_svd: true,
            timing: false,
        };
        let curve = sweep_error_curve(&x, &cfg).unwrap();
        for m in CurMethod::ALL {
            assert_eq!(curve.for_method(m.as_str()).count(), 3);
        }
        let svd: Vec<f64> = curve.for_method("svd").map(|p| p.relative_error).collect();
        assert!(svd[2] < 1e-12);
        for m in [CurMethod::Deim, CurMethod::Qr] {
            let at_rank = curve.for_method(m.as_str()).find(|p| p.k == 3).unwrap();
            assert!(at_rank.relative_error <= 1e-8);
        }
        let lsr = curve.for_method("ls-r").next().unwrap();
        assert_eq!(lsr.samples.len(), 5);
        assert!(lsr.error_std.is_some());
        assert_eq!(curve, sweep_error_curve(&x, &cfg).unwrap());
    }

    #[test]
    fn deim_requires_equal_counts() {
        let x = DenseMatrix::identity(4);
        let err = run_method(&x, CurMethod::Deim, 2, 3, &MethodOptions::default()).unwrap_err();
        assert!(matches!(err, CurError::Config(_)));
    }
}
