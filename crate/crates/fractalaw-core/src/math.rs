//! Float helpers for the `no_std` kernels.
//!
//! All transcendental calls route through `libm` so results are bit-stable
//! across platforms; long reductions use compensated summation so totals stay
//! within a few ulp regardless of length.

/// `x^y` with exact fast paths for the exponents the metrics use constantly.
#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    if y == 1.0 {
        x
    } else if y == 2.0 {
        x * x
    } else if y == 0.5 {
        libm::sqrt(x)
    } else {
        libm::pow(x, y)
    }
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Mean and standard error of the mean; `(value, 0)` for a single sample.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let mean = sum(values.iter().copied()) / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = sum(values.iter().map(|v| {
        let d = v - mean;
        d * d
    })) / (m as f64 - 1.0);
    (mean, sqrt(var / m as f64))
}
