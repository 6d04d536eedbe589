//! Small fitting helpers shared by the validation reports and tests.

/// Least-squares slope of `ln y` against `ln x`, ignoring points with
/// `y <= 0`. Returns `None` when fewer than two usable points remain.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in &logs {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    if var == 0.0 {
        return None;
    }
    Some(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powi(2)))
            .collect();
        let s = log_log_slope(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ignores_zero_errors() {
        assert!(log_log_slope(&[(1.0, 0.0), (2.0, 0.0)]).is_none());
        let s = log_log_slope(&[(1.0, 1.0), (2.0, 2.0), (4.0, 0.0)]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
