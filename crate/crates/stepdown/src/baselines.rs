//! Marginal p-value procedures used as comparison baselines.
//!
//! All operate on two-sided p-values `p_i = 2 Phi(-|x_i|)` from the standard
//! normal marginals; none of them look at the correlation structure.
//! `alpha` is accepted on the closed interval `[0, 1]` so degenerate
//! configurations (reject nothing / reject everything) remain expressible.

use crate::error::{Error, Result};
use crate::normal::two_sided_p;
use crate::trace::DecisionVector;

/// Two-sided standard normal p-values: `2 Phi(-|x_i|) = erfc(|x_i| / sqrt 2)`.
pub fn p_values(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&xi| two_sided_p(xi)).collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_p_values(pv: &[f64]) -> Result<()> {
    for (i, &p) in pv.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!(
                "p-value {p} at index {i} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

/// Bonferroni correction: reject `i` iff `pv_i <= alpha / m`.
pub fn bonferroni(pv: &[f64], alpha: f64) -> Result<DecisionVector> {
    check_alpha(alpha)?;
    check_p_values(pv)?;
    let threshold = alpha / pv.len() as f64;
    Ok(DecisionVector::new(
        pv.iter().map(|&p| p <= threshold).collect(),
    ))
}

/// Step-up scan at slope `alpha_eff / m`: finds the largest `k` with
/// `p_(k) <= k alpha_eff / m` and rejects everything at or below `p_(k)`.
fn step_up(pv: &[f64], alpha_eff: f64) -> DecisionVector {
    let m = pv.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pv[a].total_cmp(&pv[b]));
    let mut cutoff = None;
    for (rank, &idx) in order.iter().enumerate() {
        if pv[idx] <= (rank + 1) as f64 * alpha_eff / m as f64 {
            cutoff = Some(pv[idx]);
        }
    }
    match cutoff {
        None => DecisionVector::new(vec![false; m]),
        Some(c) => DecisionVector::new(pv.iter().map(|&p| p <= c).collect()),
    }
}

/// Benjamini-Hochberg step-up procedure at level `alpha`.
///
/// ```
/// use stepdown::baselines::bh_step_up;
/// let decisions = bh_step_up(&[0.001, 0.02, 0.9], 0.05).unwrap();
/// assert_eq!(decisions.n_rejections(), 2);
/// ```
pub fn bh_step_up(pv: &[f64], alpha: f64) -> Result<DecisionVector> {
    check_alpha(alpha)?;
    check_p_values(pv)?;
    Ok(step_up(pv, alpha))
}

/// Benjamini-Yekutieli: BH at level `alpha / H_m`, valid under arbitrary
/// dependence.
pub fn by_step_up(pv: &[f64], alpha: f64) -> Result<DecisionVector> {
    check_alpha(alpha)?;
    check_p_values(pv)?;
    let h: f64 = (1..=pv.len()).map(|i| 1.0 / i as f64).sum();
    Ok(step_up(pv, alpha / h))
}

/// Adaptive BH: thresholds inflated to `k alpha / (m (1 - p_hat))` by a
/// plug-in estimate of the signal proportion.
pub fn adaptive_bh(pv: &[f64], alpha: f64, p_hat: f64) -> Result<DecisionVector> {
    check_alpha(alpha)?;
    check_p_values(pv)?;
    if !(0.0..1.0).contains(&p_hat) {
        return Err(Error::domain(format!(
            "estimated proportion {p_hat} must lie in [0, 1)"
        )));
    }
    Ok(step_up(pv, alpha / (1.0 - p_hat)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn p_value_mapping_is_standard_normal() {
        let pv = p_values(&[0.0, 1.959963984540054, -1.959963984540054]);
        assert_eq!(pv[0], 1.0);
        assert_relative_eq!(pv[1], 0.05, epsilon = 1e-12);
        assert_relative_eq!(pv[1], pv[2], epsilon = 1e-15);
        // monotone decreasing in |x|
        let pv = p_values(&[0.5, 1.0, 2.0]);
        assert!(pv[0] > pv[1] && pv[1] > pv[2]);
    }

    #[test]
    fn bonferroni_hand_cases() {
        let d = bonferroni(&[1.0, 1.0, 1.0], 0.05).unwrap();
        assert_eq!(d.n_rejections(), 0);
        let d = bonferroni(&[0.01, 0.02, 0.9], 0.05).unwrap();
        assert!(d.rejected(0) && !d.rejected(1) && !d.rejected(2));
        let d = bonferroni(&[0.3, 0.33, 0.2], 1.0).unwrap();
        assert_eq!(d.n_rejections(), 3);
    }

    #[test]
    fn bh_hand_cases() {
        let d = bh_step_up(&[0.001, 0.02, 0.9], 0.05).unwrap();
        assert!(d.rejected(0) && d.rejected(1) && !d.rejected(2));
        assert_eq!(bh_step_up(&[1.0; 4], 0.05).unwrap().n_rejections(), 0);
        assert_eq!(bh_step_up(&[0.0; 4], 0.05).unwrap().n_rejections(), 4);
    }

    #[test]
    fn by_hand_cases() {
        // m = 1: identical to BH
        let d_by = by_step_up(&[0.04], 0.05).unwrap();
        let d_bh = bh_step_up(&[0.04], 0.05).unwrap();
        assert_eq!(d_by, d_bh);
        // harmonic correction knocks out the second rejection
        let d = by_step_up(&[0.001, 0.02, 0.9], 0.05).unwrap();
        assert!(d.rejected(0) && !d.rejected(1) && !d.rejected(2));
    }

    #[test]
    fn adaptive_hand_cases() {
        let pv = [0.02, 0.03, 0.9];
        // p_hat = 0 is plain BH
        assert_eq!(
            adaptive_bh(&pv, 0.05, 0.0).unwrap(),
            bh_step_up(&pv, 0.05).unwrap()
        );
        // p_hat = 0.5 doubles the effective level
        assert_eq!(
            adaptive_bh(&pv, 0.05, 0.5).unwrap(),
            bh_step_up(&pv, 0.10).unwrap()
        );
        let d = adaptive_bh(&pv, 0.05, 0.4).unwrap();
        assert!(d.rejected(0) && d.rejected(1) && !d.rejected(2));
        assert!(adaptive_bh(&pv, 0.05, 1.0).is_err());
    }

    #[test]
    fn alpha_and_p_value_domains() {
        assert!(bh_step_up(&[0.5], 1.5).is_err());
        assert!(bh_step_up(&[0.5], -0.1).is_err());
        assert!(bh_step_up(&[1.5], 0.05).is_err());
        assert!(bonferroni(&[0.2], 0.0).unwrap().n_rejections() == 0);
    }

    #[test]
    fn nesting_and_permutation_fuzz() {
        let mut rng = replicate_rng(99, 0);
        for case in 0..500 {
            let m = 1 + rng.random_range(0..10);
            let pv: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let alpha = 0.01 + 0.2 * rng.random::<f64>();
            let p_hat = 0.5 * rng.random::<f64>();
            let bonf = bonferroni(&pv, alpha).unwrap();
            let bh = bh_step_up(&pv, alpha).unwrap();
            let by = by_step_up(&pv, alpha).unwrap();
            let abh = adaptive_bh(&pv, alpha, p_hat).unwrap();
            for i in 0..m {
                assert!(
                    !bonf.rejected(i) || bh.rejected(i),
                    "case {case}: bonf in bh"
                );
                assert!(!by.rejected(i) || bh.rejected(i), "case {case}: by in bh");
                assert!(!bh.rejected(i) || abh.rejected(i), "case {case}: bh in abh");
            }
            // permutation equivariance: reverse the vector
            let rev: Vec<f64> = pv.iter().rev().copied().collect();
            let bh_rev = bh_step_up(&rev, alpha).unwrap();
            for i in 0..m {
                assert_eq!(bh.rejected(i), bh_rev.rejected(m - 1 - i), "case {case}");
            }
        }
    }
}
