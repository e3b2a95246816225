//! Dense least squares by Householder QR, sized for a handful of columns and
//! up to a few thousand rows.

use crate::{Error, Result};

/// Columns whose QR diagonal falls below this fraction of the column's own
/// norm are treated as linear combinations of earlier columns.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// `(X'X)^{-1}`, row-major `k x k`.
    pub xtx_inv: Vec<f64>,
    /// Ratio of the largest to smallest |R_jj| after column equilibration.
    pub condition: f64,
}

impl LeastSquares {
    pub fn cov_entry(&self, i: usize, j: usize) -> f64 {
        self.xtx_inv[i * self.coefficients.len() + j]
    }
}

/// Solves `min |y - X b|` for `X` given as columns. `names` label the columns
/// in rank-deficiency errors.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64], names: &[&str]) -> Result<LeastSquares> {
    let k = columns.len();
    let n = y.len();
    if k == 0 || columns.iter().any(|c| c.len() != n) {
        return Err(Error::Input("design columns must match the response length".into()));
    }
    if n < k {
        return Err(Error::Input(format!("{n} observations for {k} coefficients")));
    }

    // Equilibrate columns so the rank test and condition estimate are scale-free.
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut a: Vec<Vec<f64>> = columns
        .iter()
        .zip(&scales)
        .map(|(c, &s)| {
            let s = if s > 0.0 { s } else { 1.0 };
            c.iter().map(|v| v / s).collect()
        })
        .collect();
    let mut qty = y.to_vec();
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if scales[j] == 0.0 || norm < RANK_TOLERANCE {
            let label = |i: usize| names.get(i).copied().unwrap_or("?").to_string();
            let with = if j == 0 {
                "nothing (all zero)".to_string()
            } else {
                (0..j).map(label).collect::<Vec<_>>().join(", ")
            };
            return Err(Error::RankDeficient {
                column: label(j),
                with,
            });
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let apply = |target: &mut [f64]| {
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (t, vi) in target.iter_mut().zip(&v) {
                *t -= f * vi;
            }
        };
        for col in a.iter_mut().skip(j) {
            apply(&mut col[j..]);
        }
        apply(&mut qty[j..]);
        diag[j] = a[j][j];
    }

    // Back substitution on R (upper triangle, column-stored in `a`).
    let mut scaled = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for j in i + 1..k {
            s -= a[j][i] * scaled[j];
        }
        scaled[i] = s / a[i][i];
    }
    let coefficients: Vec<f64> = scaled.iter().zip(&scales).map(|(b, s)| b / s).collect();

    // R^{-1} by back substitution, then (X'X)^{-1} = D^{-1} R^{-1} R^{-T} D^{-1}.
    let mut rinv = vec![0.0; k * k];
    for col in 0..k {
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in i + 1..=col {
                s -= a[j][i] * rinv[j * k + col];
            }
            rinv[i * k + col] = s / a[i][i];
        }
    }
    let mut xtx_inv = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let s: f64 = (i.max(j)..k).map(|m| rinv[i * k + m] * rinv[j * k + m]).sum();
            xtx_inv[i * k + j] = s / (scales[i] * scales[j]);
        }
    }

    let mut residuals = y.to_vec();
    for (col, b) in columns.iter().zip(&coefficients) {
        for (r, x) in residuals.iter_mut().zip(col) {
            *r -= x * b;
        }
    }
    let rss = residuals.iter().map(|r| r * r).sum();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
        (lo.min(d.abs()), hi.max(d.abs()))
    });

    Ok(LeastSquares {
        coefficients,
        residuals,
        rss,
        xtx_inv,
        condition: hi / lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_of_a_line() {
        let x0 = vec![1.0; 5];
        let x1: Vec<f64> = (1..=5).map(f64::from).collect();
        let y: Vec<f64> = x1.iter().map(|t| 2.0 + 3.0 * t).collect();
        let fit = least_squares(&[x0, x1], &y, &["c", "t"]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-12);
        assert!(fit.rss < 1e-20);
        // (X'X)^{-1} for t = 1..5: X'X = [[5, 15], [15, 55]], det 50
        assert!((fit.cov_entry(0, 0) - 55.0 / 50.0).abs() < 1e-12);
        assert!((fit.cov_entry(0, 1) + 15.0 / 50.0).abs() < 1e-12);
        assert!((fit.cov_entry(1, 1) - 5.0 / 50.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_are_named() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let err = least_squares(&[vec![1.0; 4], a, b], &[1.0, 0.0, 1.0, 0.0], &["c", "a", "b"])
            .unwrap_err();
        match err {
            Error::RankDeficient { column, with } => {
                assert_eq!(column, "b");
                assert_eq!(with, "c, a");
            }
            other => panic!("{other:?}"),
        }
    }
}
