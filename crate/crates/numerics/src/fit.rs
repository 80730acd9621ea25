//! Least-squares line fits, used for convergence-order estimates.

/// Result of an ordinary least-squares straight-line fit y = a + b x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope. Zero when only two points are given.
    pub slope_se: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len();
    assert_eq!(n, y.len());
    assert!(n >= 2, "need at least two points");
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    assert!(sxx > 0.0, "abscissae are all equal");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let mut ss_res = 0.0;
        for i in 0..n {
            let r = y[i] - intercept - slope * x[i];
            ss_res += r * r;
        }
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit { slope, intercept, slope_se }
}

/// Fit y = C x^p through log-log regression. All inputs must be positive.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> LineFit {
    assert!(
        x.iter().chain(y.iter()).all(|&v| v > 0.0 && v.is_finite()),
        "power-law fit needs positive finite data"
    );
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let x = [1.0, 2.0, 3.0, 5.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 3.5 * v - 1.25).collect();
        let f = fit_line(&x, &y);
        assert!((f.slope - 3.5).abs() < 1e-12);
        assert!((f.intercept + 1.25).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
    }

    #[test]
    fn power_law_exponent_recovered() {
        let x = [0.1f64, 0.05, 0.025, 0.0125];
        let y: Vec<f64> = x.iter().map(|&v| 7.0 * v.powf(2.5)).collect();
        let f = fit_power_law(&x, &y);
        assert!((f.slope - 2.5).abs() < 1e-10);
        assert!((f.intercept.exp() - 7.0).abs() < 1e-8);
    }

    #[test]
    fn slope_error_reflects_noise() {
        // Deterministic +-d perturbation around a slope-2 line.
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 2.0 * v + if i % 2 == 0 { 0.3 } else { -0.3 })
            .collect();
        let f = fit_line(&x, &y);
        assert!((f.slope - 2.0).abs() < 0.02);
        assert!(f.slope_se > 0.0 && f.slope_se < 0.05);
    }
}
