//! Summary statistics over trial metrics: mean, sample std, Student-t
//! confidence half-widths, and Welch's unequal-variance t-test.

use crate::error::{Result, TsError};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
    pub n: usize,
}

pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(TsError::InsufficientSamples(0));
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(TsError::InsufficientSamples(xs.len()));
    }
    let m = mean(xs)?;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    Ok(var.sqrt())
}

/// 95% confidence half-width of the mean, t_{0.975, n-1} * std / sqrt(n).
pub fn ci95_half_width(xs: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 2 {
        return Err(TsError::InsufficientSamples(n));
    }
    let s = sample_std(xs)?;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map_err(|e| TsError::InvalidParams(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(t * s / (n as f64).sqrt())
}

pub fn summarize(xs: &[f64]) -> Result<Summary> {
    Ok(Summary {
        mean: mean(xs)?,
        std: sample_std(xs)?,
        ci95: ci95_half_width(xs)?,
        n: xs.len(),
    })
}

/// Two-sided Welch t-test p-value for a difference in means. Degenerate
/// zero-variance inputs resolve by direct comparison of the means.
pub fn welch_p_value(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(TsError::InsufficientSamples(a.len().min(b.len())));
    }
    let (ma, mb) = (mean(a)?, mean(b)?);
    let (va, vb) = (sample_std(a)?.powi(2), sample_std(b)?.powi(2));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| TsError::InvalidParams(e.to_string()))?;
    Ok(2.0 * dist.cdf(-t.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ci_half_width_matches_t_table() {
        // {1,2,3}: std = 1, t_{0.975,2} = 4.3027, half-width = 4.3027/sqrt(3)
        let xs = [1.0, 2.0, 3.0];
        let s = summarize(&xs).unwrap();
        assert_abs_diff_eq!(s.mean, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.std, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ci95, 4.302652729911275 / 3.0_f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn welch_known_case() {
        // hand-checked: var = 2.5 each, t = 5 / sqrt(2 * 2.5/5) = 5,
        // df = 8, two-sided p = 0.001053
        let a = [10.0, 11.0, 12.0, 13.0, 14.0];
        let b = [5.0, 6.0, 7.0, 8.0, 9.0];
        let p = welch_p_value(&a, &b).unwrap();
        assert_abs_diff_eq!(p, 0.001053, epsilon = 1e-5);
    }

    #[test]
    fn welch_identical_groups_is_one() {
        let a = [2.0, 2.0, 2.0];
        assert_eq!(welch_p_value(&a, &a).unwrap(), 1.0);
        let b = [3.0, 3.0, 3.0];
        assert_eq!(welch_p_value(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn welch_same_distribution_large_p() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [1.1, 1.9, 3.1, 3.9];
        assert!(welch_p_value(&a, &b).unwrap() > 0.9);
    }

    #[test]
    fn insufficient_samples_error() {
        assert!(summarize(&[1.0]).is_err());
        assert!(welch_p_value(&[1.0], &[1.0, 2.0]).is_err());
    }
}
