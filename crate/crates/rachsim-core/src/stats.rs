//! Small statistics helpers for the simulation estimators and the
//! distributional validation tests.

/// Sample mean and 95% normal-approximation confidence half-width.
/// Returns `None` for fewer than two samples.
pub fn mean_ci95(samples: &[f64]) -> Option<(f64, f64)> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Some((mean, 1.96 * (var / n).sqrt()))
}

/// One-sample Kolmogorov-Smirnov test against Exp(mean): returns the KS
/// statistic D and the asymptotic p-value (Stephens' finite-sample scaling).
pub fn ks_test_exponential(samples: &[f64], mean: f64) -> (f64, f64) {
    assert!(!samples.is_empty() && mean > 0.0);
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = -(-x / mean).exp_m1();
        let hi = (i as f64 + 1.0) / n - cdf;
        let lo = cdf - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_sf(t))
}

/// Survival function of the Kolmogorov distribution,
/// P[K > t] = 2·Σ_{j≥1} (−1)^{j−1}·exp(−2·j²·t²).
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut total = 0.0;
    for j in 1..=100u32 {
        let term = (-2.0 * (j as f64) * (j as f64) * t * t).exp();
        total += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Two-sided two-proportion z-test p-value for success counts s1/n1 vs s2/n2.
pub fn two_proportion_p(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    assert!(n1 > 0 && n2 > 0);
    let p1 = s1 as f64 / n1 as f64;
    let p2 = s2 as f64 / n2 as f64;
    let pooled = (s1 + s2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return 1.0;
    }
    let z = ((p1 - p2) / se).abs();
    2.0 * normal_sf(z)
}

/// Standard normal survival function via the Abramowitz-Stegun 7.1.26
/// erfc approximation (|error| < 1.5e-7, ample for test thresholds).
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    let sign_neg = x < 0.0;
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let e = poly * (-x * x).exp();
    if sign_neg {
        2.0 - e
    } else {
        e
    }
}
