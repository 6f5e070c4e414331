use std::fs;
use std::path::Path;
use std::time::Instant;

use curkit::baselines::{deim_select, leverage_scores, pca_correlation_select, Axis};
use curkit::evaluation::median;
use curkit::io::{
    fill_missing_by_class_mean, load_class_labels, mean_center_rows, min_max_normalize_cols, read_csv,
    read_matrix_market, save_csv,
};
use curkit::model_selection::default_rank_k;
use curkit::numerics::{pivoted_qr, truncated_svd};
use curkit::{
    auto_select_columns, run_method, select_columns, selection_report, svd_relative_error, sweep_error_curve,
    BisectionTrace, CountStatus, Criterion, CsvOptions, CurMethod, DenseMatrix, LabeledMatrix, LambdaOverride,
    MethodOptions, MethodParams, ModelScore, SelectionReport, SfConfig, StdKind, SweepConfig,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{ApproxArgs, AutokArgs, CriterionArg, Format, InputArgs, Method, SelectArgs, SolverArgs, SweepArgs};
use crate::error::CliError;
use crate::report::{emit, fmt_f64, to_json, write_text, CsvTable, Envelope, InputInfo, SCHEMA_VERSION};

pub struct Loaded {
    pub data: LabeledMatrix,
    pub info: InputInfo,
}

fn infer_format(path: &Path) -> Format {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("mtx") | Some("mm") => Format::Mtx,
        _ => Format::Csv,
    }
}

/// Applies `f` to the matrix in its stored orientation.
fn in_stored_orientation(m: &DenseMatrix, transposed: bool, f: impl Fn(&DenseMatrix) -> DenseMatrix) -> DenseMatrix {
    if transposed {
        f(&m.transpose()).transpose()
    } else {
        f(m)
    }
}

pub fn load(args: &InputArgs) -> Result<Loaded, CliError> {
    let bytes = fs::read(&args.input).map_err(|e| CliError::io(format!("reading {}", args.input.display()), e))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let opts = CsvOptions {
        missing_markers: args.missing_markers.clone(),
        allow_missing: args.fill_missing,
        ..CsvOptions::default()
    };
    let mut data = match args.format.unwrap_or_else(|| infer_format(&args.input)) {
        Format::Csv => read_csv(bytes.as_slice(), &opts)?,
        Format::Mtx => LabeledMatrix::unlabeled(read_matrix_market(bytes.as_slice())?),
    };
    if args.transpose {
        data = data.transposed();
    }
    if let Some(path) = &args.classes {
        data = data.with_classes(&load_class_labels(path)?)?;
    }
    if args.fill_missing {
        if data.class_of_row.is_none() {
            return Err(CliError::Config("--fill-missing needs --classes".into()));
        }
        data = fill_missing_by_class_mean(&data)?;
    }
    if !data.matrix.is_finite() {
        return Err(curkit::CurError::InvalidInput("matrix has missing or non-finite entries".into()).into());
    }
    if args.center_rows {
        data.matrix = in_stored_orientation(&data.matrix, args.transpose, mean_center_rows);
    }
    if args.minmax_cols {
        data.matrix = in_stored_orientation(&data.matrix, args.transpose, min_max_normalize_cols);
    }
    if data.matrix.is_empty() {
        return Err(curkit::CurError::InvalidInput("matrix is empty".into()).into());
    }
    let info = InputInfo {
        path: args.input.clone(),
        sha256,
        rows: data.matrix.rows(),
        cols: data.matrix.cols(),
    };
    Ok(Loaded { data, info })
}

pub fn sf_config(s: &SolverArgs) -> Result<SfConfig, CliError> {
    let cfg = SfConfig {
        zero_threshold: s.zero_threshold,
        mu_scale: s.mu_scale,
        strict_count: s.strict_count,
        max_iter: s.max_iter,
        bisection_max_iter: s.bisection_max_iter,
        warm_start: s.warm_start,
        ..SfConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn method_options(s: &SolverArgs, lambda: LambdaOverride) -> Result<MethodOptions, CliError> {
    Ok(MethodOptions {
        sf: sf_config(s)?,
        rank_k: s.rank_k,
        seed: s.seed,
        lambda,
    })
}

fn cur_method(m: Method) -> Result<CurMethod, CliError> {
    match m {
        Method::Sf => Ok(CurMethod::Sf),
        Method::LsD => Ok(CurMethod::LsDeterministic),
        Method::LsR => Ok(CurMethod::LsRandomized),
        Method::Deim => Ok(CurMethod::Deim),
        Method::Qr => Ok(CurMethod::Qr),
        Method::Pca | Method::Svd => Err(CliError::Config(format!("{} is not a CUR method here", m.as_str()))),
    }
}

fn labels_of(labels: &Option<Vec<String>>, idx: &[usize]) -> Option<Vec<String>> {
    labels.as_ref().map(|l| idx.iter().map(|&i| l[i].clone()).collect())
}

#[derive(Serialize)]
struct ApproxResult {
    method: &'static str,
    c: usize,
    r: usize,
    col_indices: Vec<usize>,
    row_indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    col_labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    row_labels: Option<Vec<String>>,
    relative_error: f64,
    wall_time: Option<f64>,
    col_status: CountStatus,
    row_status: CountStatus,
    params: MethodParams,
    col_trace: Option<BisectionTrace>,
    row_trace: Option<BisectionTrace>,
}

#[derive(Serialize)]
struct SvdResult {
    method: &'static str,
    k: usize,
    relative_error: f64,
    wall_time: Option<f64>,
}

pub fn approx(args: &ApproxArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let x = &loaded.data.matrix;
    let timing = !args.output.no_timing;
    let text = if args.method == Method::Svd {
        if args.c != args.r {
            return Err(CliError::Config("the SVD reference needs c = r (its rank)".into()));
        }
        let max_k = x.rows().min(x.cols());
        if args.c == 0 || args.c > max_k {
            return Err(CliError::Config(format!("rank {} outside 1..={max_k}", args.c)));
        }
        let start = Instant::now();
        let err = svd_relative_error(x, args.c)?;
        let wall = start.elapsed().as_secs_f64();
        let result = SvdResult {
            method: "svd",
            k: args.c,
            relative_error: err,
            wall_time: timing.then_some(wall),
        };
        to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            command: "approx",
            config: args,
            input: &loaded.info,
            result,
        })?
    } else {
        let method = cur_method(args.method)?;
        let opts = method_options(
            &args.solver,
            LambdaOverride {
                cols: args.lambda_c,
                rows: args.lambda_r,
            },
        )?;
        let start = Instant::now();
        let run = run_method(x, method, args.c, args.r, &opts)?;
        let wall = start.elapsed().as_secs_f64();
        let dec = run.decomposition;
        if let Some(dir) = &args.factors {
            write_factors(dir, &loaded.data, &dec.col_indices, &dec.row_indices, &dec.u)?;
        }
        let result = ApproxResult {
            method: method.as_str(),
            c: args.c,
            r: args.r,
            col_labels: labels_of(&loaded.data.col_labels, &dec.col_indices),
            row_labels: labels_of(&loaded.data.row_labels, &dec.row_indices),
            relative_error: curkit::relative_error(x, &dec)?,
            wall_time: timing.then_some(wall),
            col_status: dec.col_status,
            row_status: dec.row_status,
            params: dec.params,
            col_indices: dec.col_indices,
            row_indices: dec.row_indices,
            col_trace: run.col_trace,
            row_trace: run.row_trace,
        };
        to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            command: "approx",
            config: args,
            input: &loaded.info,
            result,
        })?
    };
    emit(args.output.out.as_deref(), &text)
}

fn write_factors(
    dir: &Path,
    data: &LabeledMatrix,
    cols: &[usize],
    rows: &[usize],
    u: &DenseMatrix,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let x = &data.matrix;
    let c = LabeledMatrix {
        matrix: x.select_columns(cols),
        row_labels: data.row_labels.clone(),
        col_labels: labels_of(&data.col_labels, cols),
        class_of_row: None,
        class_names: Vec::new(),
    };
    let r = LabeledMatrix {
        matrix: x.select_rows(rows),
        row_labels: labels_of(&data.row_labels, rows),
        col_labels: data.col_labels.clone(),
        class_of_row: None,
        class_names: Vec::new(),
    };
    save_csv(dir.join("C.csv"), &c)?;
    save_csv(dir.join("U.csv"), &LabeledMatrix::unlabeled(u.clone()))?;
    save_csv(dir.join("R.csv"), &r)?;
    Ok(())
}

#[derive(Serialize)]
struct SelectResult {
    method: &'static str,
    c: usize,
    selected: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<BisectionTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    separation: Option<SelectionReport>,
    wall_time: Option<f64>,
}

pub fn select(args: &SelectArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    if args.separation && loaded.data.class_of_row.is_none() {
        return Err(CliError::Config("--separation needs --classes".into()));
    }
    let x = &loaded.data.matrix;
    let c = args.c;
    if c == 0 || c > x.cols() {
        return Err(CliError::Config(format!("column count {c} outside 1..={}", x.cols())));
    }
    let start = Instant::now();
    let mut trace = None;
    let selected = match args.method {
        Method::Sf => {
            let (set, t) = select_columns(x, c, &sf_config(&args.solver)?)?;
            trace = Some(t);
            set
        }
        Method::LsD => {
            let k = args.solver.rank_k.unwrap_or_else(|| default_rank_k(x));
            leverage_scores(x, k, Axis::Cols)?.ranking()[..c].to_vec()
        }
        Method::Deim => {
            let max_k = x.rows().min(x.cols());
            if c > max_k {
                return Err(CliError::Config(format!("DEIM selects at most {max_k} columns")));
            }
            deim_select(&truncated_svd(x, c)?.v, c)?
        }
        Method::Qr => pivoted_qr(x).pivot_order[..c].to_vec(),
        Method::Pca => pca_correlation_select(x, c)?,
        Method::LsR | Method::Svd => {
            return Err(CliError::Config(format!(
                "{} does not produce a deterministic ranking",
                args.method.as_str()
            )))
        }
    };
    let wall = start.elapsed().as_secs_f64();
    let separation = if args.separation {
        let kind = if args.population_std {
            StdKind::Population
        } else {
            StdKind::Sample
        };
        Some(selection_report(&loaded.data, &selected, args.threshold, kind)?)
    } else {
        None
    };
    let result = SelectResult {
        method: args.method.as_str(),
        c,
        labels: labels_of(&loaded.data.col_labels, &selected),
        selected,
        trace,
        separation,
        wall_time: (!args.output.no_timing).then_some(wall),
    };
    let text = to_json(&Envelope {
        schema_version: SCHEMA_VERSION,
        command: "select",
        config: args,
        input: &loaded.info,
        result,
    })?;
    emit(args.output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct Choice {
    criterion: &'static str,
    k: usize,
    col_indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    col_labels: Option<Vec<String>>,
    score: Option<ModelScore>,
    relative_error: f64,
}

#[derive(Serialize)]
struct AutokResult {
    method: &'static str,
    criterion: CriterionArg,
    entries: Vec<curkit::model_selection::KEntry>,
    choices: Vec<Choice>,
    wall_time: Option<f64>,
}

pub fn autok(args: &AutokArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let d = &loaded.data.matrix;
    let method = cur_method(args.method)?;
    let criterion = match args.criterion {
        CriterionArg::Aic => Criterion::Aic,
        CriterionArg::Bic => Criterion::Bic,
        CriterionArg::Both => Criterion::Both,
    };
    let opts = method_options(&args.solver, LambdaOverride::default())?;
    let start = Instant::now();
    let sel = auto_select_columns(d, method, criterion, &opts)?;
    let wall = start.elapsed().as_secs_f64();

    let mut choices = Vec::new();
    for (name, dec) in [("aic", &sel.by_aic), ("bic", &sel.by_bic)] {
        if let Some(dec) = dec {
            choices.push(Choice {
                criterion: name,
                k: dec.c(),
                col_labels: labels_of(&loaded.data.col_labels, &dec.col_indices),
                col_indices: dec.col_indices.clone(),
                score: sel.entries.iter().find(|e| e.k == dec.c()).and_then(|e| e.score),
                relative_error: curkit::relative_error(d, dec)?,
            });
        }
    }
    let mut table = CsvTable::new(&["k", "feasible", "aic", "bic", "residual_sq", "exact_fit", "skipped"]);
    for e in &sel.entries {
        let (aic, bic, res, exact) = match e.score {
            Some(s) => (
                fmt_f64(s.aic),
                fmt_f64(s.bic),
                fmt_f64(s.residual_sq),
                s.exact_fit.to_string(),
            ),
            None => Default::default(),
        };
        table.row(&[
            e.k.to_string(),
            e.score.is_some().to_string(),
            aic,
            bic,
            res,
            exact,
            e.skipped.clone().unwrap_or_default(),
        ]);
    }
    let result = AutokResult {
        method: method.as_str(),
        criterion: args.criterion,
        entries: sel.entries,
        choices,
        wall_time: (!args.output.no_timing).then_some(wall),
    };
    let json = to_json(&Envelope {
        schema_version: SCHEMA_VERSION,
        command: "autok",
        config: args,
        input: &loaded.info,
        result,
    })?;
    match &args.output.out {
        Some(dir) => {
            write_text(&dir.join("report.json"), &json)?;
            write_text(&dir.join("scores.csv"), &table.into_string())
        }
        None => emit(None, &json),
    }
}

/// `1,2,3` or `start:end[:step]` (inclusive).
pub fn parse_grid(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("invalid grid {text:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, s] => (num(a)?, num(b)?, num(s)?),
            _ => return Err(bad()),
        };
        if step == 0 || start > end {
            return Err(bad());
        }
        (start..=end).step_by(step).collect()
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Serialize)]
struct SweepResult {
    grid: Vec<usize>,
    curve: curkit::ErrorCurve,
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let x = &loaded.data.matrix;
    let grid = parse_grid(&args.grid)?;
    let mut with_svd = args.with_svd;
    let mut methods = Vec::new();
    for &m in &args.method {
        if m == Method::Svd {
            with_svd = true;
        } else {
            let cm = cur_method(m)?;
            if !methods.contains(&cm) {
                methods.push(cm);
            }
        }
    }
    if args.method.is_empty() {
        methods = CurMethod::ALL.to_vec();
    }
    let cfg = SweepConfig {
        methods,
        grid: grid.clone(),
        options: method_options(&args.solver, LambdaOverride::default())?,
        with_svd,
        timing: !args.output.no_timing,
    };
    let curve = sweep_error_curve(x, &cfg)?;

    let mut errors = CsvTable::new(&[
        "method",
        "k",
        "relative_error",
        "error_std",
        "min_error",
        "max_error",
        "median_error",
        "samples",
    ]);
    let mut timing = CsvTable::new(&["method", "k", "wall_time"]);
    for p in &curve.points {
        let errs: Vec<f64> = p.samples.iter().map(|s| s.relative_error).collect();
        errors.row(&[
            p.method.clone(),
            p.k.to_string(),
            fmt_f64(p.relative_error),
            p.error_std.map(fmt_f64).unwrap_or_default(),
            fmt_f64(errs.iter().copied().fold(f64::INFINITY, f64::min)),
            fmt_f64(errs.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            fmt_f64(median(&errs)),
            p.samples.len().to_string(),
        ]);
        timing.row(&[p.method.clone(), p.k.to_string(), fmt_f64(p.wall_time)]);
    }
    let result = SweepResult { grid, curve };
    let json = to_json(&Envelope {
        schema_version: SCHEMA_VERSION,
        command: "sweep",
        config: args,
        input: &loaded.info,
        result,
    })?;
    match &args.output.out {
        Some(dir) => {
            write_text(&dir.join("report.json"), &json)?;
            write_text(&dir.join("errors.csv"), &errors.into_string())?;
            write_text(&dir.join("timing.csv"), &timing.into_string())
        }
        None => emit(None, &json),
    }
}
