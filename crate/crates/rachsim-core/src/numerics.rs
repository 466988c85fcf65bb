//! Numeric helpers: compensated summation and Poisson machinery.

/// Neumaier-compensated accumulator. Keeps the analytic sums reproducible to
/// ~1e-10 relative across platforms and term orderings.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums an iterator with Neumaier compensation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// ln(n!) by direct summation. Exact enough for the Poisson tails used here
/// and free of special-function dependencies.
pub fn ln_factorial(n: u32) -> f64 {
    let mut acc = NeumaierSum::new();
    for k in 2..=n as u64 {
        acc.add((k as f64).ln());
    }
    acc.total()
}

/// Poisson probability mass e^{-mean}·mean^n/n!, computed in log space so
/// large `n` cannot overflow the factorial.
pub fn poisson_pmf(n: u32, mean: f64) -> f64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_p = -mean + n as f64 * mean.ln() - ln_factorial(n);
    ln_p.exp()
}

/// Truncation cap for Poisson-weighted series: max(64, ⌈mean + 12·√mean⌉).
pub fn poisson_truncation_cap(mean: f64) -> u32 {
    let bound = (mean + 12.0 * mean.sqrt()).ceil();
    (bound as u32).max(64)
}

/// Σ_n pois(n; mean)·f(n), accumulating n from 0 until the remaining Poisson
/// tail mass is below 1e-12, with the hard cap from
/// [`poisson_truncation_cap`]. Terms are compensated-summed.
pub fn poisson_mixture(mean: f64, mut term: impl FnMut(u32) -> f64) -> f64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean <= 0.0 {
        return term(0);
    }
    let cap = poisson_truncation_cap(mean);
    let mut acc = NeumaierSum::new();
    let mut mass = NeumaierSum::new();
    // exp(-mean) underflows only for mean > ~708, far beyond the cap budget;
    // fall back to the log form there so the recurrence still starts sanely.
    let mut pmf = if mean < 700.0 { (-mean).exp() } else { poisson_pmf(0, mean) };
    for n in 0..=cap {
        acc.add(pmf * term(n));
        mass.add(pmf);
        if 1.0 - mass.total() < 1e-12 {
            break;
        }
        pmf *= mean / (n as f64 + 1.0);
    }
    acc.total()
}
