//! Small statistics helpers shared by the experiment drivers and tests.

/// Standard error of a Bernoulli proportion estimated from `trials` draws.
pub fn proportion_stderr(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / trials as f64).max(0.0).sqrt()
}

/// Total variation distance between two distributions over the same support.
///
/// Missing trailing entries of the shorter slice count as zero mass.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let l1: f64 = (0..len)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs())
        .sum();
    0.5 * l1
}

/// Normalises integer counts into a probability vector.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against the uniform
/// law on `[lo, hi)`.
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> f64 {
    let mut xs: Vec<f64> = samples.iter().map(|&x| (x - lo) / (hi - lo)).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = (i as f64 + 1.0) / n - x;
            let below = x - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tvd_basics() {
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((total_variation(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((total_variation(&[1.0], &[0.5, 0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_of_grid_is_small() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_uniform(&xs, 0.0, 1.0) <= 0.0005 + 1e-12);
        let skewed: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&skewed, 0.0, 1.0) > 0.2);
    }

    #[test]
    fn stderr_bounded_by_half_over_root_n() {
        for &p in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!(proportion_stderr(p, 400) <= 0.5 / 20.0 + 1e-15);
        }
    }
}
