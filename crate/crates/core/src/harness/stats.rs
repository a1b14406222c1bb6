//! Order-fixed summary statistics.

/// Neumaier-compensated sum in slice order.
pub fn ordered_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error (sample std / √n). The standard error is
/// NaN for a single sample.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = ordered_sum(values) / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = ordered_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;
