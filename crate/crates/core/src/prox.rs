//! Proximal operators of the row/column penalties.
//!
//! `prox_{α‖·‖}(x) = argmin_y ½‖y − x‖₂² + α‖y‖`. The ℓ∞ case is obtained
//! from the Euclidean projection onto the ℓ1 ball through the Moreau
//! decomposition `prox_{α‖·‖∞}(x) = x − Π_{‖·‖₁ ≤ α}(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};

/// Non-negative prox threshold.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ProxParam(f64);

impl ProxParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha >= 0.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(CurError::Config(format!(
                "prox threshold must be finite and >= 0, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// Norm applied to each penalized row (or column) of the coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    #[default]
    Linf,
    L1,
    L2,
}

impl PenaltyKind {
    pub fn norm(self, x: &[f64]) -> f64 {
        match self {
            PenaltyKind::Linf => linf_norm(x),
            PenaltyKind::L1 => l1_norm(x),
            PenaltyKind::L2 => l2_norm(x),
        }
    }

    /// Norm dual to [`PenaltyKind::norm`].
    pub fn dual_norm(self, x: &[f64]) -> f64 {
        match self {
            PenaltyKind::Linf => l1_norm(x),
            PenaltyKind::L1 => linf_norm(x),
            PenaltyKind::L2 => l2_norm(x),
        }
    }

    /// Overwrites `x` with `prox_{α‖·‖}(x)`.
    pub fn prox_in_place(self, x: &mut [f64], alpha: f64) {
        match self {
            PenaltyKind::Linf => prox_linf_in_place(x, alpha),
            PenaltyKind::L1 => prox_l1_in_place(x, alpha),
            PenaltyKind::L2 => prox_l2_in_place(x, alpha),
        }
    }
}

/// Compensated (Neumaier) sum.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// ℓ1 norm with compensated summation.
///
/// The ℓ∞ prox tests `l1_norm(x) <= α` to decide whether to return zero, and
/// critical penalty weights are computed with this same routine, so the two
/// sides of that comparison always agree bit for bit.
pub fn l1_norm(x: &[f64]) -> f64 {
    neumaier_sum(x.iter().map(|v| v.abs()))
}

pub fn l2_norm(x: &[f64]) -> f64 {
    neumaier_sum(x.iter().map(|v| v * v)).sqrt()
}

pub fn linf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Soft-threshold level θ ≥ 0 with `Σ max(|x_i| − θ, 0) = radius`.
/// Only meaningful when `‖x‖₁ > radius`.
fn l1_ball_threshold(x: &[f64], radius: f64) -> f64 {
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut theta = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        let t = sum + u;
        if sum.abs() >= u {
            comp += (sum - t) + u;
        } else {
            comp += (u - t) + sum;
        }
        sum = t;
        let candidate = (sum + comp - radius) / (j + 1) as f64;
        if u > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    theta.max(0.0)
}

/// Euclidean projection of `x` onto `{y : ‖y‖₁ ≤ radius}`.
pub fn project_l1_ball(x: &[f64], radius: f64) -> Vec<f64> {
    assert!(radius >= 0.0, "radius must be non-negative");
    if l1_norm(x) <= radius {
        return x.to_vec();
    }
    if radius == 0.0 {
        return vec![0.0; x.len()];
    }
    let theta = l1_ball_threshold(x, radius);
    x.iter().map(|&v| v.signum() * (v.abs() - theta).max(0.0)).collect()
}

/// `prox_{α‖·‖∞}(x)`. Returns the exact zero vector whenever `‖x‖₁ ≤ α`.
pub fn prox_linf(x: &[f64], alpha: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    prox_linf_in_place(&mut y, alpha);
    y
}

pub fn prox_linf_in_place(x: &mut [f64], alpha: f64) {
    debug_assert!(alpha >= 0.0);
    if alpha == 0.0 {
        return;
    }
    if l1_norm(x) <= alpha {
        x.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    // x − Π(x) clips every entry to [−θ, θ].
    let theta = l1_ball_threshold(x, alpha);
    x.iter_mut().for_each(|v| *v = v.clamp(-theta, theta));
}

/// Componentwise soft thresholding.
pub fn prox_l1(x: &[f64], alpha: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    prox_l1_in_place(&mut y, alpha);
    y
}

pub fn prox_l1_in_place(x: &mut [f64], alpha: f64) {
    x.iter_mut().for_each(|v| {
        *v = if v.abs() <= alpha {
            0.0
        } else {
            v.signum() * (v.abs() - alpha)
        }
    });
}

/// Block soft thresholding `max(0, 1 − α/‖x‖₂) · x`.
pub fn prox_l2(x: &[f64], alpha: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    prox_l2_in_place(&mut y, alpha);
    y
}

pub fn prox_l2_in_place(x: &mut [f64], alpha: f64) {
    let norm = l2_norm(x);
    if norm <= alpha {
        x.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let factor = 1.0 - alpha / norm;
    x.iter_mut().for_each(|v| *v *= factor);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_examples() {
        assert_eq!(project_l1_ball(&[3.0, 1.0], 1.0), vec![1.0, 0.0]);
        assert_eq!(project_l1_ball(&[0.2, -0.3], 1.0), vec![0.2, -0.3]);
        assert_eq!(project_l1_ball(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
        assert_eq!(project_l1_ball(&[-2.0, 4.0], 0.0), vec![0.0, 0.0]);
    }

    #[test]
    fn projection_matches_grid_search() {
        // θ = 2 solves Σ max(|x_i| − θ, 0) = 1 for x = [3, 1]; confirm that no
        // point of the ball on a fine grid is closer to x.
        let x = [3.0, 1.0];
        let p = project_l1_ball(&x, 1.0);
        let d_p = (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
        let steps = 2000;
        for a in 0..=steps {
            let y0 = -1.0 + 2.0 * a as f64 / steps as f64;
            let room = 1.0 - y0.abs();
            for b in 0..=steps {
                let y1 = -room + 2.0 * room * b as f64 / steps as f64;
                let d = (y0 - x[0]).powi(2) + (y1 - x[1]).powi(2);
                assert!(d >= d_p - 1e-12);
            }
        }
    }

    #[test]
    fn linf_prox_examples() {
        assert_eq!(prox_linf(&[3.0, -1.0], 0.0), vec![3.0, -1.0]);
        assert_eq!(prox_linf(&[0.5, -0.25], 0.75), vec![0.0, 0.0]);
        assert_eq!(prox_linf(&[3.0, 1.0], 1.0), vec![2.0, 1.0]);
        assert_eq!(prox_linf(&[-3.0, 1.0], 1.0), vec![-2.0, 1.0]);
    }

    #[test]
    fn linf_prox_zero_is_bitwise_zero() {
        let x = [0.1, 0.2, 0.3, -0.4];
        let y = prox_linf(&x, l1_norm(&x));
        assert!(y.iter().all(|v| v.to_bits() == 0));
    }

    #[test]
    fn l1_prox_examples() {
        assert_eq!(prox_l1(&[3.0, -1.0], 1.0), vec![2.0, 0.0]);
        assert_eq!(prox_l1(&[3.0, -1.0], 0.0), vec![3.0, -1.0]);
        assert_eq!(prox_l1(&[0.5], 1.0), vec![0.0]);
    }

    #[test]
    fn l2_prox_examples() {
        assert_eq!(prox_l2(&[3.0, 4.0], 5.0), vec![0.0, 0.0]);
        assert_eq!(prox_l2(&[3.0, 4.0], 2.5), vec![1.5, 2.0]);
        assert_eq!(prox_l2(&[3.0, 4.0], 0.0), vec![3.0, 4.0]);
    }

    #[test]
    fn linf_optimality_condition() {
        // y = prox(x) iff (x − y)/α ∈ ∂‖y‖∞: ‖x − y‖₁ = α and every nonzero
        // residual sits on an entry attaining ‖y‖∞ with matching sign.
        let x = [3.0, -1.5, 0.25, 2.5];
        let alpha = 1.2;
        let y = prox_linf(&x, alpha);
        let r: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert!((l1_norm(&r) - alpha).abs() < 1e-12);
        let ymax = linf_norm(&y);
        for (ri, yi) in r.iter().zip(&y) {
            if ri.abs() > 1e-15 {
                assert!((yi.abs() - ymax).abs() < 1e-12 && ri.signum() == yi.signum());
            }
        }
    }

    #[test]
    fn param_validation() {
        assert!(ProxParam::new(-1.0).is_err());
        assert!(ProxParam::new(f64::NAN).is_err());
        assert_eq!(ProxParam::new(0.5).unwrap().alpha(), 0.5);
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    proptest! {
        #[test]
        fn linf_prox_is_nonexpansive(
            x in prop::collection::vec(-10.0f64..10.0, 1..12),
            dx in prop::collection::vec(-3.0f64..3.0, 12),
            alpha in 0.0f64..20.0,
        ) {
            let x2: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
            let d = dist(&prox_linf(&x, alpha), &prox_linf(&x2, alpha));
            prop_assert!(d <= dist(&x, &x2) * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn linf_prox_shrinks_sup_norm(x in prop::collection::vec(-10.0f64..10.0, 1..12), alpha in 0.0f64..20.0) {
            prop_assert!(linf_norm(&prox_linf(&x, alpha)) <= linf_norm(&x));
        }

        #[test]
        fn projection_lands_on_min_radius(x in prop::collection::vec(-10.0f64..10.0, 1..12), radius in 0.0f64..40.0) {
            let p = project_l1_ball(&x, radius);
            let expected = radius.min(l1_norm(&x));
            prop_assert!((l1_norm(&p) - expected).abs() <= 1e-10 * (1.0 + expected));
        }

        #[test]
        fn moreau_decomposition(x in prop::collection::vec(-10.0f64..10.0, 1..12), alpha in 0.001f64..20.0) {
            let y = prox_linf(&x, alpha);
            let p = project_l1_ball(&x, alpha);
            for ((xi, yi), pi) in x.iter().zip(&y).zip(&p) {
                prop_assert!((xi - yi - pi).abs() <= 1e-12 * (1.0 + xi.abs()));
            }
        }

        #[test]
        fn exact_zero_inside_dual_ball(x in prop::collection::vec(-10.0f64..10.0, 1..40), slack in 1.0f64..2.0) {
            let alpha = l1_norm(&x) * slack;
            prop_assert!(prox_linf(&x, alpha).iter().all(|v| v.to_bits() == 0));
        }
    }
}
