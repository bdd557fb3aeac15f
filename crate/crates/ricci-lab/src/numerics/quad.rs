//! Gauss–Legendre quadrature, fixed order and adaptive.

use std::f64::consts::PI;

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the `n`-point rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(m + h * x)).sum::<f64>() * h
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn nodes_weights(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        (self.nodes.iter().map(|x| m + h * x).collect(), self.weights.iter().map(|w| w * h).collect())
    }

    /// Composite rule over consecutive breakpoints.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> f64 {
        breaks.windows(2).map(|w| self.integrate(&mut f, w[0], w[1])).sum()
    }
}

/// Adaptive bisection with a 15-point rule; `tol` is an absolute target.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let gl = GaussLegendre::new(15);
    let whole = gl.integrate(&mut f, a, b);
    adaptive_rec(&gl, &mut f, a, b, whole, tol, 0)
}

fn adaptive_rec<F: FnMut(f64) -> f64>(gl: &GaussLegendre, f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl.integrate(&mut *f, a, m);
    let right = gl.integrate(&mut *f, m, b);
    if (left + right - whole).abs() <= tol || depth >= 40 {
        return left + right;
    }
    adaptive_rec(gl, f, a, m, left, 0.5 * tol, depth + 1) + adaptive_rec(gl, f, m, b, right, 0.5 * tol, depth + 1)
}
