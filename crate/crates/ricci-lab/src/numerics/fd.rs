//! Finite-difference weights on arbitrary node sets.

/// Fornberg's algorithm: weights `w[k][j]` such that
/// `f^{(k)}(x0) ≈ Σ_j w[k][j] f(xs[j])` for `k = 0..=m`.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Precomputed first and second derivative stencils on a fixed grid.
///
/// Every node uses the five nearest nodes. With `even_tip` the grid starts
/// at `r = 0` and values are mirrored, `f(-r) = f(r)`, so nodes near the
/// tip get centered stencils.
#[derive(Debug, Clone)]
pub struct Stencils {
    /// For node `i`: list of `(source node, w1, w2)`.
    entries: Vec<Vec<(usize, f64, f64)>>,
}

impl Stencils {
    pub fn new(grid: &[f64], even_tip: bool) -> Self {
        Self::with_shifts(grid, even_tip, &vec![0; grid.len()])
    }

    /// Like [`Stencils::new`], but the five-node window of node `i` is moved
    /// by `shifts[i]` nodes (clamped to the grid), e.g. `+1` for a stencil
    /// biased towards larger indices.
    pub fn with_shifts(grid: &[f64], even_tip: bool, shifts: &[i8]) -> Self {
        let n = grid.len();
        assert_eq!(shifts.len(), n);
        assert!(n >= 5, "stencils need at least five nodes");
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            // (position, source index) pairs of the stencil
            let pts: Vec<(f64, usize)> = if even_tip && i < 2 {
                let mut p = Vec::with_capacity(5);
                for k in -2i64..=2 {
                    let j = i as i64 + k;
                    if j < 0 {
                        let m = (-j) as usize;
                        p.push((-grid[m], m));
                    } else {
                        p.push((grid[j as usize], j as usize));
                    }
                }
                p
            } else {
                let lo = (i as i64 - 2 + shifts[i] as i64).clamp(0, n as i64 - 5) as usize;
                (lo..lo + 5).map(|j| (grid[j], j)).collect()
            };
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let w = fornberg_weights(grid[i], &xs, 2);
            let mut row: Vec<(usize, f64, f64)> = Vec::with_capacity(5);
            for (k, &(_, j)) in pts.iter().enumerate() {
                if let Some(e) = row.iter_mut().find(|e| e.0 == j) {
                    e.1 += w[1][k];
                    e.2 += w[2][k];
                } else {
                    row.push((j, w[1][k], w[2][k]));
                }
            }
            entries.push(row);
        }
        Stencils { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(f', f'')` at node `i`.
    pub fn derivs(&self, f: &[f64], i: usize) -> (f64, f64) {
        self.entries[i]
            .iter()
            .fold((0.0, 0.0), |(a, b), &(j, w1, w2)| (a + w1 * f[j], b + w2 * f[j]))
    }

    /// Stencil row of node `i` as `(source, w1, w2)` triples.
    pub fn row(&self, i: usize) -> &[(usize, f64, f64)] {
        &self.entries[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_five_point_weights() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for k in 0..5 {
            assert!((w[1][k] - d1[k]).abs() < 1e-14);
            assert!((w[2][k] - d2[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_on_quartics_nonuniform() {
        let grid: Vec<f64> = (0..12).map(|i| 0.1 * (i as f64).powf(1.3)).collect();
        let f: Vec<f64> = grid.iter().map(|x| 1.0 - 2.0 * x * x + 0.5 * x.powi(4)).collect();
        let st = Stencils::new(&grid, true);
        for (i, &x) in grid.iter().enumerate() {
            let (d1, d2) = st.derivs(&f, i);
            assert!((d1 - (-4.0 * x + 2.0 * x.powi(3))).abs() < 1e-9, "i={i}");
            assert!((d2 - (-4.0 + 6.0 * x * x)).abs() < 1e-8, "i={i}");
        }
    }
}
