//! Surrogate-functional iteration for the group-sparse selection problems
//!
//! ```text
//! minimize_W  ‖T − A·W·B‖_F² + λ Σ_s ‖W_s‖
//! ```
//!
//! where the slices `W_s` are the rows of `W` (column selection, `A = B = T = X`)
//! or its columns (row selection, `A = C`, `B = T = X`). Each step replaces the
//! smooth term by a separable upper bound with curvature `μ > ‖A‖₂²‖B‖₂²` and
//! minimizes it exactly:
//!
//! ```text
//! Lᵀ   = μ·Z + Aᵀ·T·Bᵀ − (AᵀA)·Z·(BBᵀ)
//! W_s  = prox_{λ/(2μ)}(Lᵀ_s / μ)  =  prox_{λ/2}(Lᵀ_s) / μ
//! ```
//!
//! The prox is evaluated in the second, unscaled form so that a slice is set to
//! exact zero by the same comparison used to compute the critical `λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;
use crate::numerics::spectral_norm;
use crate::prox::PenaltyKind;

/// Which slices of `W` carry the penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyAxis {
    /// One group per row of `W`; nonzero rows select columns of `X`.
    Rows,
    /// One group per column of `W`; nonzero columns select rows of `X`.
    Cols,
}

/// Solver and bisection settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfConfig {
    /// `μ = mu_scale · ‖A‖₂²‖B‖₂²` unless `mu` is given. Must exceed 1.
    pub mu_scale: f64,
    /// Explicit `μ`, overriding `mu_scale`.
    pub mu: Option<f64>,
    /// Inner iteration cap.
    pub max_iter: usize,
    /// Relative step tolerance: stop once `‖Wᵏ − Wᵏ⁻¹‖_F ≤ tol · max(1, ‖Wᵏ⁻¹‖_F)`.
    pub tol: f64,
    /// A slice counts as selected when its sup-norm exceeds this.
    pub zero_threshold: f64,
    pub bisection_max_iter: usize,
    /// Cap for the stabilizing solve at the accepted `λ`.
    pub final_max_iter: usize,
    pub final_tol: f64,
    /// Fail instead of returning the nearest achievable count.
    pub strict_count: bool,
    /// Start each bisection solve from the previous iterate.
    pub warm_start: bool,
    /// Record `J(Wᵏ)` on every iteration.
    pub track_objective: bool,
    pub penalty: PenaltyKind,
    /// Relative singular value cutoff for the pseudoinverses in `U`.
    pub rank_tol: Option<f64>,
}

impl Default for SfConfig {
    fn default() -> Self {
        Self {
            mu_scale: 1.01,
            mu: None,
            max_iter: 20,
            tol: 1e-8,
            zero_threshold: 0.0,
            bisection_max_iter: 60,
            final_max_iter: 200,
            final_tol: 1e-10,
            strict_count: false,
            warm_start: false,
            track_objective: true,
            penalty: PenaltyKind::Linf,
            rank_tol: None,
        }
    }
}

impl SfConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(mu) = self.mu {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(CurError::Config(format!("mu must be positive and finite, got {mu}")));
            }
        } else if !(self.mu_scale.is_finite() && self.mu_scale > 1.0) {
            return Err(CurError::Config(format!(
                "mu scale must exceed 1, got {}",
                self.mu_scale
            )));
        }
        if !(self.tol >= 0.0 && self.final_tol >= 0.0) {
            return Err(CurError::Config("tolerances must be non-negative".into()));
        }
        if self.zero_threshold.is_nan() || self.zero_threshold < 0.0 {
            return Err(CurError::Config("zero threshold must be non-negative".into()));
        }
        if self.max_iter == 0 || self.bisection_max_iter == 0 {
            return Err(CurError::Config("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

/// Application of `AᵀA`, either from the cached Gram matrix or through `A`
/// itself when the Gram matrix would be larger than the factored product.
#[derive(Debug, Clone)]
enum Gram {
    Explicit(DenseMatrix),
    Factored(DenseMatrix),
}

impl Gram {
    fn of(a: &DenseMatrix) -> Self {
        // AᵀA·Z costs p²q explicitly versus 2mpq factored (A is m×p).
        if a.cols() <= 2 * a.rows() {
            Gram::Explicit(a.t_matmul(a))
        } else {
            Gram::Factored(a.clone())
        }
    }

    fn apply(&self, z: &DenseMatrix) -> DenseMatrix {
        match self {
            Gram::Explicit(g) => g.matmul(z),
            Gram::Factored(a) => a.t_matmul(&a.matmul(z)),
        }
    }
}

#[cfg(test)]
thread_local! {
    static PRECOMPUTES: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
}

#[cfg(test)]
pub(crate) fn precompute_count() -> usize {
    PRECOMPUTES.with(|c| c.get())
}

/// `Aᵀ · (T · Bᵀ)`, the gradient of the smooth term at `W = 0` up to a factor −2.
pub fn cross_term(left: &DenseMatrix, target: &DenseMatrix, right: &DenseMatrix) -> DenseMatrix {
    left.t_matmul(&target.matmul_t(right))
}

/// `2 · max_s ‖M_s‖_*` over the penalized slices of `M`, with `‖·‖_*` dual to
/// the penalty norm: the smallest `λ` whose minimizer is `W = 0`.
pub fn critical_lambda_from_cross(cross: &DenseMatrix, axis: PenaltyAxis, kind: PenaltyKind) -> f64 {
    let worst = match axis {
        PenaltyAxis::Rows => (0..cross.rows())
            .map(|i| kind.dual_norm(cross.row(i)))
            .fold(0.0, f64::max),
        PenaltyAxis::Cols => {
            let t = cross.transpose();
            (0..t.rows()).map(|j| kind.dual_norm(t.row(j))).fold(0.0, f64::max)
        }
    };
    2.0 * worst
}

/// One instance of the selection problem with its cached products.
#[derive(Debug, Clone)]
pub struct SfProblem {
    left: DenseMatrix,
    right: DenseMatrix,
    target: DenseMatrix,
    lambda: f64,
    mu: f64,
    mu_bound: f64,
    axis: PenaltyAxis,
    kind: PenaltyKind,
    cross: DenseMatrix,
    left_gram: Gram,
    right_gram: DenseMatrix,
    target_norm_sq: f64,
}

/// Iterate returned by [`SfProblem::solve`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SfState {
    pub w: DenseMatrix,
    pub iteration: usize,
    /// `J(W)` evaluated from its definition.
    pub objective: f64,
    /// `‖Wᵏ − Wᵏ⁻¹‖_F` of the last step.
    pub delta: f64,
    pub converged: bool,
    /// `J(W⁰), J(W¹), …` when objective tracking is on.
    pub objective_history: Vec<f64>,
    pub delta_history: Vec<f64>,
    /// Steps with `J(Wᵏ) > J(Wᵏ⁻¹) + 1e-12·J(W⁰)`.
    pub descent_violations: usize,
}

impl SfProblem {
    /// General constructor. `norms` may carry precomputed `(‖A‖₂, ‖B‖₂)`.
    pub fn new(
        left: DenseMatrix,
        right: DenseMatrix,
        target: DenseMatrix,
        axis: PenaltyAxis,
        cfg: &SfConfig,
        norms: Option<(f64, f64)>,
    ) -> Result<Self> {
        cfg.validate()?;
        if left.rows() != target.rows() || right.cols() != target.cols() {
            return Err(CurError::ShapeMismatch(format!(
                "A {:?}, B {:?} incompatible with target {:?}",
                left.shape(),
                right.shape(),
                target.shape()
            )));
        }
        let (na, nb) = norms.unwrap_or_else(|| (spectral_norm(&left), spectral_norm(&right)));
        let mu_bound = (na * nb).powi(2);
        let mu = match cfg.mu {
            Some(mu) => mu,
            None if mu_bound > 0.0 => cfg.mu_scale * mu_bound,
            None => 1.0,
        };
        #[cfg(test)]
        PRECOMPUTES.with(|c| c.set(c.get() + 1));
        let cross = cross_term(&left, &target, &right);
        let left_gram = Gram::of(&left);
        let right_gram = right.matmul_t(&right);
        let target_norm_sq = target.frobenius_norm_sq();
        Ok(Self {
            left,
            right,
            target,
            lambda: 0.0,
            mu,
            mu_bound,
            axis,
            kind: cfg.penalty,
            cross,
            left_gram,
            right_gram,
            target_norm_sq,
        })
    }

    /// Column selection: `‖X − X·W·X‖_F² + λ Σᵢ ‖W(i,:)‖`, `W ∈ ℝ^{n×m}`.
    pub fn columns(x: &DenseMatrix, cfg: &SfConfig) -> Result<Self> {
        let nx = spectral_norm(x);
        Self::columns_with_norm(x, cfg, nx)
    }

    pub(crate) fn columns_with_norm(x: &DenseMatrix, cfg: &SfConfig, x_norm: f64) -> Result<Self> {
        Self::new(
            x.clone(),
            x.clone(),
            x.clone(),
            PenaltyAxis::Rows,
            cfg,
            Some((x_norm, x_norm)),
        )
    }

    /// Row selection given chosen columns `C`: `‖X − C·W·X‖_F² + λ Σⱼ ‖W(:,j)‖`,
    /// `W ∈ ℝ^{c×m}`.
    pub fn rows(x: &DenseMatrix, c: &DenseMatrix, cfg: &SfConfig) -> Result<Self> {
        let nx = spectral_norm(x);
        Self::rows_with_norm(x, c, cfg, nx)
    }

    pub(crate) fn rows_with_norm(x: &DenseMatrix, c: &DenseMatrix, cfg: &SfConfig, x_norm: f64) -> Result<Self> {
        let nc = spectral_norm(c);
        Self::new(
            c.clone(),
            x.clone(),
            x.clone(),
            PenaltyAxis::Cols,
            cfg,
            Some((nc, x_norm)),
        )
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set_lambda(&mut self, lambda: f64) -> Result<()> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(CurError::Config(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        self.lambda = lambda;
        Ok(())
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.set_lambda(lambda)?;
        Ok(self)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `‖A‖₂²‖B‖₂²`; `μ` must strictly exceed it.
    pub fn mu_bound(&self) -> f64 {
        self.mu_bound
    }

    pub fn set_mu(&mut self, mu: f64) {
        self.mu = mu;
    }

    pub fn axis(&self) -> PenaltyAxis {
        self.axis
    }

    pub fn penalty(&self) -> PenaltyKind {
        self.kind
    }

    pub fn left(&self) -> &DenseMatrix {
        &self.left
    }

    pub fn right(&self) -> &DenseMatrix {
        &self.right
    }

    pub fn target(&self) -> &DenseMatrix {
        &self.target
    }

    /// `Aᵀ·T·Bᵀ` as cached for the iteration.
    pub fn cross(&self) -> &DenseMatrix {
        &self.cross
    }

    /// Shape of `W`.
    pub fn coef_shape(&self) -> (usize, usize) {
        (self.left.cols(), self.right.rows())
    }

    pub fn critical_lambda(&self) -> f64 {
        critical_lambda_from_cross(&self.cross, self.axis, self.kind)
    }

    fn check_shape(&self, w: &DenseMatrix) -> Result<()> {
        if w.shape() != self.coef_shape() {
            return Err(CurError::ShapeMismatch(format!(
                "coefficients are {:?}, expected {:?}",
                w.shape(),
                self.coef_shape()
            )));
        }
        Ok(())
    }

    fn check_mu(&self) -> Result<()> {
        let ok = self.mu.is_finite() && self.mu > self.mu_bound && self.mu > 0.0;
        if ok {
            Ok(())
        } else {
            Err(CurError::MuBound {
                mu: self.mu,
                bound: self.mu_bound,
            })
        }
    }

    /// Sum of the penalty norms over the penalized slices of `w`.
    pub fn penalty_value(&self, w: &DenseMatrix) -> f64 {
        match self.axis {
            PenaltyAxis::Rows => (0..w.rows()).map(|i| self.kind.norm(w.row(i))).sum(),
            PenaltyAxis::Cols => {
                let t = w.transpose();
                (0..t.rows()).map(|j| self.kind.norm(t.row(j))).sum()
            }
        }
    }

    /// `J(W)` from its definition.
    pub fn objective(&self, w: &DenseMatrix) -> Result<f64> {
        self.check_shape(w)?;
        let fit = self
            .target
            .sub(&self.left.matmul(w).matmul(&self.right))
            .frobenius_norm_sq();
        Ok(fit + self.lambda * self.penalty_value(w))
    }

    /// Gradient of the smooth term, `−2·Aᵀ(T − A·W·B)·Bᵀ`.
    pub fn smooth_gradient(&self, w: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_shape(w)?;
        let resid = self.target.sub(&self.left.matmul(w).matmul(&self.right));
        Ok(self.left.t_matmul(&resid).matmul_t(&self.right).scaled(-2.0))
    }

    fn sandwich(&self, z: &DenseMatrix) -> DenseMatrix {
        self.left_gram.apply(z).matmul(&self.right_gram)
    }

    /// One application of the surrogate map `Z ↦ T(Z)`.
    pub fn apply_t(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_shape(z)?;
        let gzg = self.sandwich(z);
        Ok(self.step(z, &gzg))
    }

    fn step(&self, z: &DenseMatrix, gzg: &DenseMatrix) -> DenseMatrix {
        let (p, q) = z.shape();
        let mu = self.mu;
        let data: Vec<f64> = z
            .data()
            .iter()
            .zip(self.cross.data())
            .zip(gzg.data())
            .map(|((zv, cv), gv)| mu * zv + cv - gv)
            .collect();
        let mut lt = DenseMatrix::new(p, q, data).expect("shape preserved");
        let threshold = self.lambda / 2.0;
        let kind = self.kind;
        let prox_rows = |m: &mut DenseMatrix| {
            let width = m.cols().max(1);
            let body = |row: &mut [f64]| {
                kind.prox_in_place(row, threshold);
                row.iter_mut().for_each(|v| *v /= mu);
            };
            if m.data().len() >= 1 << 14 {
                m.data_mut().par_chunks_mut(width).for_each(body);
            } else {
                m.data_mut().chunks_mut(width).for_each(body);
            }
        };
        match self.axis {
            PenaltyAxis::Rows => {
                prox_rows(&mut lt);
                lt
            }
            PenaltyAxis::Cols => {
                let mut t = lt.transpose();
                prox_rows(&mut t);
                t.transpose()
            }
        }
    }

    /// Runs the iteration from `W⁰ = 0`.
    pub fn solve(&self, cfg: &SfConfig) -> Result<SfState> {
        let (p, q) = self.coef_shape();
        self.solve_from(cfg, DenseMatrix::zeros(p, q))
    }

    /// Runs the iteration from a given starting point.
    pub fn solve_from(&self, cfg: &SfConfig, w0: DenseMatrix) -> Result<SfState> {
        self.check_shape(&w0)?;
        self.check_mu()?;
        let mut w = w0;
        let mut gwg = self.sandwich(&w);
        // J(W) = ‖T‖² − 2⟨W, AᵀTBᵀ⟩ + ⟨W, AᵀA·W·BBᵀ⟩ + λ·penalty, reusing the
        // product the next step needs anyway.
        let quick_objective = |w: &DenseMatrix, gwg: &DenseMatrix| {
            let lin: f64 = w.data().iter().zip(self.cross.data()).map(|(a, b)| a * b).sum();
            let quad: f64 = w.data().iter().zip(gwg.data()).map(|(a, b)| a * b).sum();
            (self.target_norm_sq - 2.0 * lin + quad).max(0.0) + self.lambda * self.penalty_value(w)
        };

        let mut objective_history = Vec::new();
        let mut delta_history = Vec::new();
        if cfg.track_objective {
            objective_history.push(quick_objective(&w, &gwg));
        }
        let slack = 1e-12 * objective_history.first().copied().unwrap_or(0.0);
        let mut descent_violations = 0;
        let mut iteration = 0;
        let mut delta = f64::INFINITY;
        let mut converged = false;

        while iteration < cfg.max_iter {
            let next = self.step(&w, &gwg);
            iteration += 1;
            delta = next.sub(&w).frobenius_norm();
            let prev_norm = w.frobenius_norm();
            w = next;
            gwg = self.sandwich(&w);
            delta_history.push(delta);
            if cfg.track_objective {
                let j = quick_objective(&w, &gwg);
                if j > objective_history.last().copied().unwrap_or(f64::INFINITY) + slack {
                    descent_violations += 1;
                }
                objective_history.push(j);
            }
            if delta <= cfg.tol * prev_norm.max(1.0) {
                converged = true;
                break;
            }
        }
        let objective = self.objective(&w)?;
        Ok(SfState {
            w,
            iteration,
            objective,
            delta,
            converged,
            objective_history,
            delta_history,
            descent_violations,
        })
    }

    /// Indices of slices whose sup-norm exceeds `threshold`, ascending.
    pub fn selected(&self, w: &DenseMatrix, threshold: f64) -> Vec<usize> {
        match self.axis {
            PenaltyAxis::Rows => (0..w.rows())
                .filter(|&i| w.row(i).iter().any(|v| v.abs() > threshold))
                .collect(),
            PenaltyAxis::Cols => (0..w.cols())
                .filter(|&j| (0..w.rows()).any(|i| w[(i, j)].abs() > threshold))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> DenseMatrix {
        DenseMatrix::from_rows(&[[v]]).unwrap()
    }

    fn pseudo_random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut s = seed.wrapping_add(0x9E3779B97F4A7C15);
        DenseMatrix::from_fn(rows, cols, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % 20_000) as f64 / 10_000.0 - 1.0
        })
    }

    #[test]
    fn objective_examples() {
        let cfg = SfConfig::default();
        let x = pseudo_random(3, 4, 1);
        let p = SfProblem::columns(&x, &cfg).unwrap();
        assert_eq!(p.objective(&DenseMatrix::zeros(4, 3)).unwrap(), x.frobenius_norm_sq());

        let i2 = DenseMatrix::identity(2);
        let p = SfProblem::columns(&i2, &cfg).unwrap();
        assert_eq!(p.objective(&i2).unwrap(), 0.0);

        let p = SfProblem::columns(&scalar(2.0), &cfg)
            .unwrap()
            .with_lambda(4.0)
            .unwrap();
        assert_eq!(p.objective(&scalar(0.5)).unwrap(), 2.0);
        assert!(p.objective(&DenseMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn identity_map_without_penalty() {
        // λ = 0, X = I: T(Z) = Z + (I − Z)/μ.
        let cfg = SfConfig::default();
        let p = SfProblem::columns(&DenseMatrix::identity(3), &cfg).unwrap();
        let z = pseudo_random(3, 3, 5);
        let tz = p.apply_t(&z).unwrap();
        let expected = z.add(&DenseMatrix::identity(3).sub(&z).scaled(1.0 / p.mu()));
        assert!(tz.sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn identity_converges_to_identity() {
        let cfg = SfConfig {
            max_iter: 5000,
            tol: 1e-14,
            ..SfConfig::default()
        };
        let p = SfProblem::columns(&DenseMatrix::identity(2), &cfg).unwrap();
        let st = p.solve(&cfg).unwrap();
        assert!(st.w.sub(&DenseMatrix::identity(2)).max_abs() < 1e-9);
        assert!(st.objective < 1e-16);
        assert_eq!(st.descent_violations, 0);
    }

    #[test]
    fn mu_below_bound_is_refused() {
        let cfg = SfConfig::default();
        let mut p = SfProblem::columns(&scalar(2.0), &cfg).unwrap();
        assert_eq!(p.mu_bound(), 16.0);
        p.set_mu(16.0);
        assert!(matches!(p.solve(&cfg), Err(CurError::MuBound { .. })));
        let bad = SfConfig {
            mu_scale: 1.0,
            ..SfConfig::default()
        };
        assert!(matches!(
            SfProblem::columns(&scalar(2.0), &bad),
            Err(CurError::Config(_))
        ));
    }

    #[test]
    fn scalar_critical_lambda() {
        let cfg = SfConfig::default();
        let p = SfProblem::columns(&scalar(2.0), &cfg).unwrap();
        assert_eq!(p.critical_lambda(), 16.0);
        let st = p.clone().with_lambda(16.0).unwrap().solve(&cfg).unwrap();
        assert_eq!(st.w[(0, 0)], 0.0);
        let st = p.with_lambda(15.0).unwrap().solve(&cfg).unwrap();
        assert!(st.w[(0, 0)] > 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = SfConfig::default();
        for (axis_rows, seed) in [(true, 3u64), (false, 4u64)] {
            let x = pseudo_random(3, 3, seed);
            let p = if axis_rows {
                SfProblem::columns(&x, &cfg).unwrap()
            } else {
                SfProblem::rows(&x, &x.select_columns(&[0, 2]), &cfg).unwrap()
            };
            let (r, c) = p.coef_shape();
            let w = pseudo_random(r, c, seed + 10);
            let g = p.smooth_gradient(&w).unwrap();
            let h = 1e-6;
            for i in 0..r {
                for j in 0..c {
                    let mut wp = w.clone();
                    wp[(i, j)] += h;
                    let mut wm = w.clone();
                    wm[(i, j)] -= h;
                    let fd = (p.objective(&wp).unwrap() - p.objective(&wm).unwrap()) / (2.0 * h);
                    assert!(
                        (fd - g[(i, j)]).abs() < 1e-6 * (1.0 + fd.abs()),
                        "{fd} vs {}",
                        g[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn row_problem_uses_c_and_x_products() {
        // Lᵀ = μZ + CᵀXXᵀ − CᵀC·Z·XXᵀ
        let cfg = SfConfig::default();
        let x = pseudo_random(4, 3, 8);
        let c = x.select_columns(&[1, 2]);
        let p = SfProblem::rows(&x, &c, &cfg).unwrap();
        let z = pseudo_random(2, 4, 9);
        let xxt = x.matmul_t(&x);
        let lt = z
            .scaled(p.mu())
            .add(&c.t_matmul(&xxt))
            .sub(&c.t_matmul(&c).matmul(&z).matmul(&xxt));
        let expected = lt.scaled(1.0 / p.mu());
        assert!(p.apply_t(&z).unwrap().sub(&expected).max_abs() < 1e-12);
    }

    #[test]
    fn factored_gram_matches_explicit() {
        let cfg = SfConfig::default();
        let x = pseudo_random(2, 7, 11);
        let p = SfProblem::columns(&x, &cfg).unwrap();
        assert!(matches!(p.left_gram, Gram::Factored(_)));
        let z = pseudo_random(7, 2, 12);
        let explicit = x.t_matmul(&x).matmul(&z).matmul(&x.matmul_t(&x));
        assert!(p.sandwich(&z).sub(&explicit).max_abs() < 1e-12);
    }

    #[test]
    fn solve_reuses_precomputed_products() {
        let cfg = SfConfig::default();
        let x = pseudo_random(4, 5, 2);
        let before = precompute_count();
        let mut p = SfProblem::columns(&x, &cfg).unwrap();
        for lambda in [0.1, 1.0, 3.0] {
            p.set_lambda(lambda).unwrap();
            p.solve(&cfg).unwrap();
        }
        assert_eq!(precompute_count() - before, 1);
    }

    #[test]
    fn quick_objective_tracks_definition() {
        let cfg = SfConfig {
            max_iter: 50,
            ..SfConfig::default()
        };
        let x = pseudo_random(5, 4, 21);
        let p = SfProblem::columns(&x, &cfg).unwrap();
        let p = p.clone().with_lambda(0.2 * p.critical_lambda()).unwrap();
        let st = p.solve(&cfg).unwrap();
        let last = *st.objective_history.last().unwrap();
        assert!((last - st.objective).abs() <= 1e-10 * st.objective);
    }
}
