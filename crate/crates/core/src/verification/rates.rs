use crate::{Error, Result};

pub const DEFAULT_RATE_WINDOW: usize = 4;

/// Least-squares slope of `log(value)` against `log(n)` over the last
/// [`DEFAULT_RATE_WINDOW`] points.
pub fn rate_fit(series: &[(f64, f64)]) -> Result<f64> {
    rate_fit_window(series, DEFAULT_RATE_WINDOW)
}

/// As [`rate_fit`] with an explicit trailing window (at least 2 points).
pub fn rate_fit_window(series: &[(f64, f64)], window: usize) -> Result<f64> {
    if window < 2 || series.len() < window {
        return Err(Error::InvalidArgument(format!(
            "rate fit needs a window of at least 2 points, have {} of {window}",
            series.len()
        )));
    }
    let tail = &series[series.len() - window..];
    if tail.iter().any(|&(n, v)| !(n > 0.0 && v > 0.0)) {
        return Err(Error::InvalidArgument("rate fit needs positive data".into()));
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("rate fit needs distinct sizes".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        [8.0, 32.0, 128.0, 512.0, 2048.0].iter().map(|&n| (n, f(n))).collect()
    }

    #[test]
    fn power_laws() {
        assert!((rate_fit(&series(|n| 3.0 / n)).unwrap() + 1.0).abs() < 1e-12);
        assert!(rate_fit(&series(|_| 2.5)).unwrap().abs() < 1e-12);
        assert!((rate_fit(&series(|n| 0.1 / n.sqrt())).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn uses_trailing_window() {
        let mut s = series(|n| 1.0 / n);
        s[0].1 = 1e6;
        assert!((rate_fit(&s).unwrap() + 1.0).abs() < 1e-12);
        assert!(rate_fit_window(&s, 5).unwrap() < -1.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rate_fit(&series(|n| n)[..3]).is_err());
        assert!(rate_fit(&series(|_| 0.0)).is_err());
        assert!(rate_fit_window(&series(|n| n), 1).is_err());
    }
}
