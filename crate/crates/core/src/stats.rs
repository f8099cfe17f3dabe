//! Elementary statistics used across modules.

use serde::{Deserialize, Serialize};

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

pub fn mean_stderr(xs: &[f64]) -> MeanEstimate {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return MeanEstimate {
            mean: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return MeanEstimate { mean, stderr: 0.0 };
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    MeanEstimate {
        mean,
        stderr: (var / n).sqrt(),
    }
}

/// Sample variance (unbiased).
pub fn variance(xs: &[f64]) -> f64 {
    mean_stderr(xs).stderr.powi(2) * xs.len() as f64
}

/// Empirical quantile (lower order statistic, `⌊q (n−1)⌋`) of already sorted data.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).floor() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

pub fn sort_floats(xs: &mut [f64]) {
    xs.sort_by(|a, b| a.total_cmp(b));
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_x − F_y|`.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> f64 {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    sort_floats(&mut xs);
    sort_floats(&mut ys);
    ks_sorted(&xs, &ys)
}

pub fn ks_sorted(xs: &[f64], ys: &[f64]) -> f64 {
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`:
/// `c(α) √((n+m)/(n m))` with `c(α) = √(−ln(α/2)/2)`.
pub fn ks_critical(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Batch-means standard error of the mean of an autocorrelated series.
pub fn batch_means(xs: &[f64], batches: usize) -> MeanEstimate {
    let batches = batches.clamp(1, xs.len().max(1));
    let size = xs.len() / batches;
    if size == 0 {
        return mean_stderr(xs);
    }
    let means: Vec<f64> = xs
        .chunks(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let overall = xs[..size * batches].iter().sum::<f64>() / (size * batches) as f64;
    MeanEstimate {
        mean: overall,
        stderr: mean_stderr(&means).stderr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_and_disjoint() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert_eq!(ks_two_sample(&a, &[4.0, 5.0]), 1.0);
    }

    #[test]
    fn ks_handles_ties() {
        // F_x jumps to 1 at 2; F_y is 0.5 at 2
        assert!((ks_two_sample(&[2.0, 2.0], &[2.0, 3.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_critical_value_matches_table() {
        // c(0.001) = 1.9495
        let c = ks_critical(0.001, 1, 1) / 2f64.sqrt();
        assert!((c - 1.94947).abs() < 1e-4);
    }

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(sorted_quantile(&s, 0.0), 1.0);
        assert_eq!(sorted_quantile(&s, 0.5), 3.0);
        assert_eq!(sorted_quantile(&s, 1.0), 5.0);
    }

    #[test]
    fn mean_and_stderr() {
        let e = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (1.25f64 * 4.0 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
