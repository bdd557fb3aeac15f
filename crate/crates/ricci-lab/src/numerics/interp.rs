//! Piecewise quintic Hermite interpolation (C² on the whole range).

/// Interpolant through values, first and second derivatives at the nodes.
#[derive(Debug, Clone)]
pub struct QuinticHermite {
    x: Vec<f64>,
    f: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl QuinticHermite {
    /// Nodes must be strictly increasing; all slices share one length ≥ 2.
    pub fn new(x: Vec<f64>, f: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Self {
        assert!(x.len() >= 2 && x.len() == f.len() && f.len() == d1.len() && d1.len() == d2.len());
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]));
        QuinticHermite { x, f, d1, d2 }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn first(&self) -> &[f64] {
        &self.d1
    }

    pub fn second(&self) -> &[f64] {
        &self.d2
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    /// Index `i` with `x[i] ≤ x ≤ x[i+1]`, clamped to the end intervals.
    pub fn interval(&self, x: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// `(f, f', f'')` at `x`. Outside the node range the end polynomial
    /// is extrapolated.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let i = self.interval(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        // basis, first and second t-derivatives
        let b = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
        ];
        let b1 = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4,
        ];
        let b2 = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            3.0 * t - 12.0 * t2 + 10.0 * t3,
        ];
        let c = [
            self.f[i],
            h * self.d1[i],
            h * h * self.d2[i],
            self.f[i + 1],
            h * self.d1[i + 1],
            h * h * self.d2[i + 1],
        ];
        let mut out = (0.0, 0.0, 0.0);
        for k in 0..6 {
            out.0 += c[k] * b[k];
            out.1 += c[k] * b1[k];
            out.2 += c[k] * b2[k];
        }
        (out.0, out.1 / h, out.2 / (h * h))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval3(x).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_quintics_exactly() {
        let p = |x: f64| (1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.1 * x.powi(5), -2.0 + 1.5 * x * x - 0.5 * x.powi(4), 3.0 * x - 2.0 * x.powi(3));
        let x: Vec<f64> = vec![0.0, 0.3, 1.1, 2.0];
        let f = x.iter().map(|&t| p(t).0).collect();
        let d1 = x.iter().map(|&t| p(t).1).collect();
        let d2 = x.iter().map(|&t| p(t).2).collect();
        let q = QuinticHermite::new(x, f, d1, d2);
        for k in 0..50 {
            let t = 2.0 * k as f64 / 49.0;
            let (a, b, c) = q.eval3(t);
            let e = p(t);
            assert!((a - e.0).abs() < 1e-12 && (b - e.1).abs() < 1e-11 && (c - e.2).abs() < 1e-10);
        }
    }
}
