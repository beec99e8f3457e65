//! Natural cubic spline on strictly increasing knots.
//!
//! Second derivatives are solved once with the Thomas algorithm; evaluation is
//! a binary search followed by the usual cubic Hermite form. Values outside
//! the knot range are reported as `None` so callers decide the extension.

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    uniform_step: Option<f64>,
}

impl CubicSpline {
    /// Knots must be strictly increasing with at least two points; the caller
    /// validates this.
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        debug_assert!(n >= 2 && y.len() == n);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives, m[0] = m[n-1] = 0.
            let k = n - 2;
            let mut c_prime = vec![0.0; k];
            let mut d_prime = vec![0.0; k];
            for i in 0..k {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                let a = h0;
                let b = 2.0 * (h0 + h1);
                let c = h1;
                let d = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
                if i == 0 {
                    c_prime[i] = c / b;
                    d_prime[i] = d / b;
                } else {
                    let denom = b - a * c_prime[i - 1];
                    c_prime[i] = c / denom;
                    d_prime[i] = (d - a * d_prime[i - 1]) / denom;
                }
            }
            m[k] = d_prime[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d_prime[i] - c_prime[i] * m[i + 2];
            }
        }
        let uniform_step = uniform_step(&x);
        CubicSpline { x, y, m, uniform_step }
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn start(&self) -> f64 {
        self.x[0]
    }

    pub fn end(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let n = self.x.len();
        if !(t >= self.x[0] && t <= self.x[n - 1]) {
            return None;
        }
        if let Some(h) = self.uniform_step {
            let guess = (((t - self.x[0]) / h) as usize).min(n - 2);
            // Guard against rounding at knot boundaries.
            let mut i = guess;
            while i > 0 && t < self.x[i] {
                i -= 1;
            }
            while i < n - 2 && t >= self.x[i + 1] {
                i += 1;
            }
            return Some(i);
        }
        let i = self.x.partition_point(|&xi| xi <= t);
        Some(i.saturating_sub(1).min(n - 2))
    }

    pub fn value(&self, t: f64) -> Option<f64> {
        let i = self.segment(t)?;
        Some(self.eval_in(i, t))
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        let i = self.segment(t)?;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        Some(
            (self.y[i + 1] - self.y[i]) / h
                + h / 6.0 * ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]),
        )
    }

    fn eval_in(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// Integral of the squared interpolant over `[x_i, t]` within segment `i`.
    ///
    /// Four-point Gauss-Legendre is exact for the degree-6 integrand.
    pub(crate) fn squared_integral_in(&self, i: usize, t: f64) -> f64 {
        const NODES: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const WEIGHTS: [f64; 4] = [
            0.347_854_845_137_453_9,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
        ];
        let lo = self.x[i];
        let half = 0.5 * (t - lo);
        let mid = lo + half;
        let mut acc = 0.0;
        for (node, weight) in NODES.iter().zip(WEIGHTS) {
            let v = self.eval_in(i, mid + half * node);
            acc += weight * v * v;
        }
        acc * half
    }

    /// Prefix sums of the squared interpolant integrated over each segment.
    pub(crate) fn squared_prefix(&self) -> Vec<f64> {
        let mut prefix = Vec::with_capacity(self.x.len());
        let mut total = 0.0;
        prefix.push(0.0);
        for i in 0..self.x.len() - 1 {
            total += self.squared_integral_in(i, self.x[i + 1]);
            prefix.push(total);
        }
        prefix
    }

    pub(crate) fn segment_of(&self, t: f64) -> Option<usize> {
        self.segment(t)
    }
}

fn uniform_step(x: &[f64]) -> Option<f64> {
    let n = x.len();
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    uniform.then_some(h)
}
