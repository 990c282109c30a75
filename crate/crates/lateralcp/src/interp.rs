//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson PCHIP).
//!
//! Shape-preserving: the interpolant never overshoots the data, which is the
//! property we need when caching a steeply decaying, sign-definite response
//! on a coarse grid.

use crate::error::{LcpError, Result};

#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Node derivatives chosen by the Fritsch–Carlson rules.
    d: Vec<f64>,
}

impl Pchip {
    /// Builds the interpolant. `x` must be strictly increasing, with at least
    /// two points, and all values finite.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(LcpError::InvalidParameter(
                "interpolation abscissae and ordinates differ in length".into(),
            ));
        }
        if x.len() < 2 {
            return Err(LcpError::InvalidParameter(
                "interpolation needs at least two points".into(),
            ));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "interpolation data must be finite".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LcpError::InvalidParameter(
                "interpolation abscissae must be strictly increasing".into(),
            ));
        }

        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= 0.0 {
                    d[i] = 0.0;
                } else {
                    // Weighted harmonic mean of neighbouring secants.
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = edge_derivative(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = edge_derivative(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }

        Ok(Pchip { x, y, d })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Evaluates the interpolant. Queries outside the node span are a range
    /// error — this cache never extrapolates.
    pub fn eval(&self, xq: f64) -> Result<f64> {
        if !(xq >= self.x_min() && xq <= self.x_max()) {
            return Err(LcpError::Range(format!(
                "interpolation query {xq:e} outside [{:e}, {:e}]",
                self.x_min(),
                self.x_max()
            )));
        }
        // Index of the segment containing xq.
        let idx = match self.x.partition_point(|&xi| xi <= xq) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        };
        let h = self.x[idx + 1] - self.x[idx];
        let t = (xq - self.x[idx]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.y[idx]
            + h10 * h * self.d[idx]
            + h01 * self.y[idx + 1]
            + h11 * h * self.d[idx + 1])
    }
}

/// Three-point one-sided derivative with the Fritsch–Carlson monotonicity
/// clamps. `h0`, `delta0` belong to the boundary segment.
fn edge_derivative(h0: f64, h1: f64, delta0: f64, delta1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * delta0 - h0 * delta1) / (h0 + h1);
    if d * delta0 <= 0.0 {
        d = 0.0;
    } else if delta0 * delta1 <= 0.0 && d.abs() > 3.0 * delta0.abs() {
        d = 3.0 * delta0;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_linear_data_exactly() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.0 * v - 1.0).collect();
        let p = Pchip::new(x, y).unwrap();
        for i in 0..90 {
            let xq = 0.1 * i as f64;
            assert_relative_eq!(p.eval(xq).unwrap(), 3.0 * xq - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolates_node_values() {
        let x = vec![0.0, 0.3, 1.0, 2.5, 4.0];
        let y = vec![1.0, -0.5, 2.0, 2.0, -3.0];
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_relative_eq!(p.eval(*xi).unwrap(), *yi, epsilon = 1e-14);
        }
    }

    #[test]
    fn preserves_monotonicity_without_overshoot() {
        // Steep power-law decay, the shape this cache exists for.
        let x: Vec<f64> = (0..30).map(|i| 1.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| -v.powi(-5)).collect();
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        let mut prev = p.eval(x[0]).unwrap();
        for i in 1..=290 {
            let xq = 1.0 + 0.01 * i as f64;
            let cur = p.eval(xq).unwrap();
            assert!(cur >= prev - 1e-15, "monotonicity violated at {xq}");
            assert!(
                (y[0]..=*y.last().unwrap()).contains(&cur),
                "overshoot at {xq}: {cur}"
            );
            prev = cur;
        }
    }

    #[test]
    fn accuracy_on_smooth_decay() {
        // 200 geometric nodes over a factor-2 span resolve z^-5 to ~1e-9.
        let n = 200;
        let ratio = (2.0f64).powf(1.0 / (n as f64 - 1.0));
        let x: Vec<f64> = (0..n).map(|i| 1.0 * ratio.powi(i as i32)).collect();
        let y: Vec<f64> = x.iter().map(|&v| v.powi(-5)).collect();
        let p = Pchip::new(x, y).unwrap();
        for i in 0..50 {
            let xq = 1.01 + (1.97 - 1.01) * i as f64 / 49.0;
            let want = xq.powi(-5);
            assert_relative_eq!(p.eval(xq).unwrap(), want, max_relative = 1e-7);
        }
    }

    #[test]
    fn rejects_bad_input_and_out_of_range_queries() {
        assert!(Pchip::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(Pchip::new(vec![0.0], vec![1.0]).is_err());
        assert!(Pchip::new(vec![0.0, f64::NAN], vec![1.0, 2.0]).is_err());
        let p = Pchip::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(p.eval(-0.1).is_err());
        assert!(p.eval(1.1).is_err());
        assert!(p.eval(1.0).is_ok());
    }

    #[test]
    fn two_point_case_is_linear() {
        let p = Pchip::new(vec![1.0, 3.0], vec![2.0, 8.0]).unwrap();
        assert_relative_eq!(p.eval(2.0).unwrap(), 5.0, epsilon = 1e-14);
    }
}
