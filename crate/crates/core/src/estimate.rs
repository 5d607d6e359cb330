//! Point estimates with standard errors and confidence intervals.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum IntervalMethod {
    /// Wilson score interval for a binomial proportion.
    Wilson,
    /// `value ± z·stderr` from the sample standard deviation.
    Normal,
    /// Standard error from batch means of a derived quantity.
    Batch,
    /// Exact value; the interval is degenerate.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub method: IntervalMethod,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    /// Proportion `successes / replicas` with the Wilson 95% interval.
    /// The standard error is the plug-in binomial one, `√(p̂(1-p̂)/R)`.
    pub fn proportion(successes: u64, replicas: u64) -> Self {
        if replicas == 0 {
            return Estimate { value: 0.0, stderr: 0.0, replicas, method: IntervalMethod::Wilson, ci_low: 0.0, ci_high: 1.0 };
        }
        let r = replicas as f64;
        let ph = successes as f64 / r;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / r;
        let centre = (ph + z2 / (2.0 * r)) / denom;
        let half = Z95 * libm::sqrt(ph * (1.0 - ph) / r + z2 / (4.0 * r * r)) / denom;
        Estimate {
            value: ph,
            stderr: libm::sqrt(ph * (1.0 - ph) / r),
            replicas,
            method: IntervalMethod::Wilson,
            ci_low: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
            ci_high: if successes == replicas { 1.0 } else { (centre + half).min(1.0) },
        }
    }

    /// Sample mean with standard error `sd/√R`. The interval is clamped
    /// to `[lo, hi]`.
    pub fn mean(values: &[f64], lo: f64, hi: f64) -> Self {
        let n = values.len();
        if n == 0 {
            return Estimate { value: 0.0, stderr: 0.0, replicas: 0, method: IntervalMethod::Normal, ci_low: lo, ci_high: hi };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let stderr = libm::sqrt(var / n as f64);
        Self::normal(mean, stderr, n as u64, lo, hi)
    }

    /// `value ± z·stderr`, clamped to `[lo, hi]`.
    pub fn normal(value: f64, stderr: f64, replicas: u64, lo: f64, hi: f64) -> Self {
        Estimate {
            value,
            stderr,
            replicas,
            method: IntervalMethod::Normal,
            ci_low: (value - Z95 * stderr).max(lo),
            ci_high: (value + Z95 * stderr).min(hi),
        }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0, replicas: 0, method: IntervalMethod::Exact, ci_low: value, ci_high: value }
    }

    pub fn with_method(mut self, method: IntervalMethod) -> Self {
        self.method = method;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval() {
        let e = Estimate::proportion(50, 100);
        assert_eq!(e.value, 0.5);
        assert!((e.stderr - 0.05).abs() < 1e-15);
        // Reference values from the closed form.
        assert!((e.ci_low - 0.403_831_530_365_995_6).abs() < 1e-12);
        assert!((e.ci_high - 0.596_168_469_634_004_4).abs() < 1e-12);
        let zero = Estimate::proportion(0, 100);
        assert_eq!(zero.ci_low, 0.0);
        assert!(zero.ci_high > 0.0 && zero.ci_high < 0.05);
        let all = Estimate::proportion(100, 100);
        assert_eq!(all.ci_high, 1.0);
    }

    #[test]
    fn mean_and_stderr() {
        let e = Estimate::mean(&[1.0, 2.0, 3.0, 4.0], 0.0, f64::INFINITY);
        assert_eq!(e.value, 2.5);
        assert!((e.stderr - libm::sqrt(5.0 / 3.0 / 4.0)).abs() < 1e-15);
        let one = Estimate::mean(&[7.0], 0.0, 10.0);
        assert_eq!(one.stderr, 0.0);
        assert_eq!((one.ci_low, one.ci_high), (7.0, 7.0));
    }
}
