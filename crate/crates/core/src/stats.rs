//! Small Monte Carlo statistics helpers: means with standard errors, the
//! two-sample Kolmogorov–Smirnov test, and a chi-square goodness-of-fit
//! test against a Poisson law.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Sample mean and its standard error (`sd / sqrt(n)`, unbiased variance).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Pearson correlation; `NaN` when either sample is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

pub fn is_constant(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// `Q((√n_e + 0.12 + 0.11/√n_e) D)`, `n_e = n m / (n + m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = n * m / (n + m);
    let sq = ne.sqrt();
    KsResult { statistic: d, p_value: kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square goodness of fit of integer counts against `Poisson(mean)`.
///
/// Bins are grown from zero until each expects at least five observations; the
/// last bin absorbs the upper tail.
pub fn chi_square_poisson(counts: &[usize], mean: f64) -> Option<ChiSquareResult> {
    let n = counts.len() as f64;
    if counts.is_empty() || !(mean > 0.0) {
        return None;
    }
    let law = Poisson::new(mean).ok()?;
    let kmax = counts.iter().copied().max().unwrap_or(0).max((mean + 10.0 * mean.sqrt()) as usize + 1);
    // (upper edge inclusive, expected)
    let mut bins: Vec<(usize, f64)> = Vec::new();
    let mut acc = 0.0;
    let mut cumulative = 0.0;
    for k in 0..=kmax {
        let p = law.pmf(k as u64);
        acc += p * n;
        cumulative += p;
        if acc >= 5.0 {
            bins.push((k, acc));
            acc = 0.0;
        }
        if (1.0 - cumulative) * n < 5.0 && !bins.is_empty() {
            break;
        }
    }
    // open upper tail goes into the last bin
    let last_edge = bins.last()?.0;
    let tail_expected: f64 = n - bins.iter().map(|b| b.1).sum::<f64>();
    bins.last_mut()?.1 += tail_expected.max(0.0);
    if bins.len() < 2 {
        return None;
    }
    let mut observed = vec![0usize; bins.len()];
    for &c in counts {
        let idx = if c > last_edge { bins.len() - 1 } else { bins.iter().position(|b| c <= b.0).unwrap() };
        observed[idx] += 1;
    }
    let statistic: f64 = observed
        .iter()
        .zip(&bins)
        .map(|(&o, &(_, e))| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64).ok()?.sf(statistic);
    Some(ChiSquareResult { statistic, dof, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn kolmogorov_reference_values() {
        // reference values of the Kolmogorov survival function
        assert_relative_eq!(kolmogorov_survival(1.0), 0.26999967167735456, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_survival(0.5), 0.9639452436648751, max_relative = 1e-9);
        assert_relative_eq!(kolmogorov_survival(1.5), 0.022217962616525127, max_relative = 1e-12);
    }

    #[test]
    fn ks_statistic_brute_force() {
        let a = [0.1, 0.4, 0.7, 0.2, 0.9];
        let b = [0.3, 0.5, 0.8, 1.2, 1.5, 0.05];
        // brute force: evaluate both ECDFs at every pooled point
        let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        let brute = a.iter().chain(&b).map(|&x| (ecdf(&a, x) - ecdf(&b, x)).abs()).fold(0.0, f64::max);
        let r = ks_two_sample(&a, &b);
        assert_relative_eq!(r.statistic, brute, epsilon = 1e-15);
        assert_relative_eq!(r.statistic, 1.0 / 3.0, epsilon = 1e-15);
        let same = ks_two_sample(&a, &a);
        assert_eq!(same.statistic, 0.0);
        assert_eq!(same.p_value, 1.0);
        let apart = ks_two_sample(&[0.0; 50], &[1.0; 50]);
        assert_eq!(apart.statistic, 1.0);
        assert!(apart.p_value < 1e-10);
    }

    #[test]
    fn ks_accepts_same_law_rejects_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = Normal::new(0.0, 1.0).unwrap();
        let a: Vec<f64> = (0..4000).map(|_| n.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..4000).map(|_| n.sample(&mut rng)).collect();
        let c: Vec<f64> = b.iter().map(|x| x + 0.2).collect();
        assert!(ks_two_sample(&a, &b).p_value > 0.01);
        assert!(ks_two_sample(&a, &c).p_value < 1e-6);
    }

    #[test]
    fn chi_square_poisson_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let law = rand_distr::Poisson::new(6.0).unwrap();
        let counts: Vec<usize> = (0..10_000).map(|_| law.sample(&mut rng) as usize).collect();
        let r = chi_square_poisson(&counts, 6.0).unwrap();
        assert!(r.p_value > 0.01, "{r:?}");
        assert!(r.dof >= 8);
        let wrong = chi_square_poisson(&counts, 6.5).unwrap();
        assert!(wrong.p_value < 1e-6);
        assert!(chi_square_poisson(&[], 1.0).is_none());
    }

    #[test]
    fn mean_stderr_and_correlation() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert_relative_eq!(s, (5.0f64 / 3.0 / 4.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]), 1.0, max_relative = 1e-15);
        assert!(correlation(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }
}
