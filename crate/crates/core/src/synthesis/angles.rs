//! Bearing constructions for a single snapshot of weighted UAVs.
//!
//! In two dimensions `Σ w_i g_i g_iᵀ = ½ (Σ w_i) I` holds exactly when the
//! vectors of length `w_i` at the doubled angles `2β_i` sum to zero, because
//! `g gᵀ = ½ I + ½ [−cos 2β, sin 2β; sin 2β, cos 2β]`. Such a closed polygon
//! exists iff no side is longer than half of the perimeter.

use std::f64::consts::{FRAC_PI_2, PI};

use super::SynthesisError;
use crate::model::normalize_angle;

/// Norm of `Σ w_i (cos 2β_i, sin 2β_i)`; zero iff the bearings form a tight frame.
pub fn closure_residual(weights: &[f64], betas: &[f64]) -> f64 {
    let (x, y) = weights
        .iter()
        .zip(betas)
        .fold((0.0, 0.0), |(x, y), (&w, &b)| {
            let (s, c) = (2.0 * b).sin_cos();
            (x + w * c, y + w * s)
        });
    x.hypot(y)
}

/// Bearings satisfying the tight-frame condition for a regular weight set,
/// with the first bearing pinned to 0.
///
/// The doubled-angle polygon is built head to tail. Each new side is turned so
/// that the open gap `|P|` after placing it is as small as the remaining sides
/// still allow closing: `max(0, 2·max_rest − Σ_rest) ≤ |P| ≤ Σ_rest`. Sides
/// turn clockwise, which reproduces the grid optima reported for the
/// three-UAV cases (e.g. ≈[0°, 103°, 72°] for σ² = {8, 12, 16} dB).
pub fn regular_angles(weights: &[f64]) -> Result<Vec<f64>, SynthesisError> {
    if let Some((index, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(**w >= 0.0 && w.is_finite()))
    {
        return Err(crate::fim::FimError::InvalidWeight { index, value }.into());
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(SynthesisError::AllZeroWeights);
    }
    let max = weights.iter().copied().fold(0.0, f64::max);
    if max > 0.5 * total {
        return Err(SynthesisError::InfeasibleClosure {
            max,
            half_total: 0.5 * total,
        });
    }

    let n = weights.len();
    // sum and max of the sides still to be placed after index i
    let mut rest_sum = vec![0.0f64; n];
    let mut rest_max = vec![0.0f64; n];
    for i in (0..n.saturating_sub(1)).rev() {
        rest_sum[i] = rest_sum[i + 1] + weights[i + 1];
        rest_max[i] = rest_max[i + 1].max(weights[i + 1]);
    }

    let (mut px, mut py) = (0.0f64, 0.0f64);
    let mut betas = Vec::with_capacity(n);
    for (i, &w) in weights.iter().enumerate() {
        let gap = px.hypot(py);
        let heading = if gap > 0.0 { py.atan2(px) } else { 0.0 };
        let theta = if gap == 0.0 || w == 0.0 {
            heading
        } else {
            let lower = (2.0 * rest_max[i] - rest_sum[i]).max(0.0);
            let upper = rest_sum[i];
            let target = (gap - w).abs().clamp(lower, upper.max(lower));
            if target == 0.0 {
                // acos loses ~1e-8 rad near −1; point straight back instead
                heading + PI
            } else {
                let cos_turn =
                    ((target * target - gap * gap - w * w) / (2.0 * gap * w)).clamp(-1.0, 1.0);
                heading - cos_turn.acos()
            }
        };
        let (s, c) = theta.sin_cos();
        px += w * c;
        py += w * s;
        betas.push(normalize_angle(theta) / 2.0);
    }
    Ok(betas)
}

/// Dominant UAV `k` at bearing 0, every other UAV at 90°.
///
/// # Panics
///
/// If `k >= n`.
pub fn irregular_angles(n: usize, k: usize) -> Vec<f64> {
    assert!(k < n, "dominant index {k} out of range for {n} UAVs");
    (0..n)
        .map(|i| if i == k { 0.0 } else { FRAC_PI_2 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(betas: &[f64]) -> Vec<f64> {
        betas.iter().map(|b| b.to_degrees()).collect()
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn equal_triplet_is_sixty_degrees_apart() {
        let b = regular_angles(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(b[0], 0.0);
        let d = sorted(degrees(&b));
        for (got, want) in d.iter().zip([0.0, 60.0, 120.0]) {
            assert!((got - want).abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn equal_pair_is_orthogonal() {
        let d = degrees(&regular_angles(&[2.0, 2.0]).unwrap());
        assert!(d[0].abs() < 1e-12 && (d[1] - 90.0).abs() < 1e-9, "{d:?}");
    }

    #[test]
    fn unequal_triplet_near_reported_optimum() {
        // σ² = {8, 12, 16} dB
        let w = [1.0 / 8.0, 1.0 / 12.0, 1.0 / 16.0];
        let b = regular_angles(&w).unwrap();
        let d = degrees(&b);
        assert_eq!(d[0], 0.0);
        assert!(
            (d[1] - 103.0).abs() < 2.0 && (d[2] - 72.0).abs() < 2.0,
            "{d:?}"
        );
        assert!(closure_residual(&w, &b) < 1e-15);
    }

    #[test]
    fn irregular_sets_are_rejected() {
        let w = [0.5, 0.125, 0.0625];
        assert!(matches!(
            regular_angles(&w),
            Err(SynthesisError::InfeasibleClosure { .. })
        ));
        assert_eq!(
            regular_angles(&[0.0, 0.0]),
            Err(SynthesisError::AllZeroWeights)
        );
        assert!(regular_angles(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn partial_closure_and_zero_weights() {
        for w in [
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![3.0, 0.0, 1.0, 2.0],
        ] {
            let b = regular_angles(&w).unwrap();
            assert!(closure_residual(&w, &b) <= 1e-12, "{w:?}");
        }
    }

    #[test]
    fn irregular_construction() {
        let d = degrees(&irregular_angles(3, 0));
        assert_eq!(d, vec![0.0, 90.0, 90.0]);
        assert_eq!(degrees(&irregular_angles(2, 0)), vec![0.0, 90.0]);
        assert_eq!(degrees(&irregular_angles(3, 2)), vec![90.0, 90.0, 0.0]);
    }

    mod props {
        use super::*;
        use proptest::collection::vec;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn regular_sets_close(w in vec(0.01..10.0f64, 2..50)) {
                let total: f64 = w.iter().sum();
                let max = w.iter().copied().fold(0.0, f64::max);
                prop_assume!(max <= 0.5 * total);
                let b = regular_angles(&w).unwrap();
                prop_assert_eq!(b[0], 0.0);
                prop_assert!(closure_residual(&w, &b) <= 1e-9 * total);
            }
        }
    }
}
