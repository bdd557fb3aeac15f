//! Small least-squares fits.

use nalgebra::{DMatrix, DVector};

/// Least-squares coefficients of `y ≈ Σ_k c_k basis_k(x)`, solved by SVD.
pub fn linear_least_squares(xs: &[f64], ys: &[f64], basis: &[&dyn Fn(f64) -> f64]) -> Option<Vec<f64>> {
    let m = xs.len();
    let n = basis.len();
    if m < n {
        return None;
    }
    let a = DMatrix::from_fn(m, n, |i, j| basis[j](xs[i]));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).ok()?;
    Some(x.iter().copied().collect())
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Observed convergence orders `log2(e_k / e_{k+1})` for successive halvings.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + 2.0 / (x * x)).collect();
        let c = linear_least_squares(&xs, &ys, &[&|_| 1.0, &|x| 1.0 / (x * x)]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
        assert!((log_log_slope(&[1.0, 2.0, 4.0], &[1.0, 0.25, 0.0625]) + 2.0).abs() < 1e-12);
    }
}
