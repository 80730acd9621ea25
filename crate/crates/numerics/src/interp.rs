//! Monotone cubic (PCHIP, Fritsch-Carlson) interpolation.

/// Piecewise cubic Hermite interpolant whose slopes are limited so the
/// interpolant is monotone wherever the data are.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// `x` strictly increasing, at least two points.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 2, "pchip needs at least two points");
        assert!(
            x.windows(2).all(|w| w[1] > w[0]),
            "pchip abscissae must be strictly increasing"
        );
        let n = x.len();
        let mut d = vec![0.0; n];
        if n == 2 {
            let s = (y[1] - y[0]) / (x[1] - x[0]);
            d[0] = s;
            d[1] = s;
            return Pchip { x, y, d };
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        for i in 1..n - 1 {
            if del[i - 1] * del[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        d[0] = edge_slope(h[0], h[1], del[0], del[1]);
        d[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        Pchip { x, y, d }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    /// Evaluate; extrapolates with the boundary cubic outside the range.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[i]
            + (s3 - 2.0 * s2 + s) * h * self.d[i]
            + (-2.0 * s3 + 3.0 * s2) * self.y[i + 1]
            + (s3 - s2) * h * self.d[i + 1]
    }

    pub fn eval_deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * (self.y[i] - self.y[i + 1]) / h)
            + (3.0 * s2 - 4.0 * s + 1.0) * self.d[i]
            + (3.0 * s2 - 2.0 * s) * self.d[i + 1]
    }
}

/// Non-centered three-point end slope, clipped to preserve monotonicity
/// (the standard PCHIP boundary rule).
fn edge_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        d = 0.0;
    } else if del0 * del1 < 0.0 && d.abs() > 3.0 * del0.abs() {
        d = 3.0 * del0;
    }
    d
}
