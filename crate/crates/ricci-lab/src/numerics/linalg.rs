//! Banded and tridiagonal solvers.

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    // row-major, row i stores columns i-kl ..= i+ku
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku {
            return None;
        }
        Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` at `(i, j)`; panics if outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j).expect("entry outside band");
        self.data[k] += v;
    }

    pub fn set_row_identity(&mut self, i: usize) {
        let w = self.kl + self.ku + 1;
        for k in 0..w {
            self.data[i * w + k] = 0.0;
        }
        self.add(i, i, 1.0);
    }

    /// Gaussian elimination without pivoting, in place; returns `None` on
    /// a vanishing pivot. Adequate for the diagonally dominant systems of
    /// implicit diffusion steps.
    pub fn solve(mut self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut b = rhs.to_vec();
        // elimination can fill up to ku above the diagonal only
        for k in 0..n {
            let piv = self.get(k, k);
            if piv.abs() < 1e-300 || !piv.is_finite() {
                return None;
            }
            let i_end = (k + self.kl).min(n - 1);
            let j_end = (k + self.ku).min(n - 1);
            for i in k + 1..=i_end {
                let l = self.get(i, k) / piv;
                if l == 0.0 {
                    continue;
                }
                for j in k..=j_end {
                    let v = self.get(k, j);
                    if let Some(idx) = self.idx(i, j) {
                        self.data[idx] -= l * v;
                    }
                }
                b[i] -= l * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let j_end = (i + self.ku).min(n - 1);
            let mut s = b[i];
            for j in i + 1..=j_end {
                s -= self.get(i, j) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        Some(x)
    }
}

/// Thomas algorithm for `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i`.
pub fn tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = if i + 1 < n { c[i] / m } else { 0.0 };
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}
