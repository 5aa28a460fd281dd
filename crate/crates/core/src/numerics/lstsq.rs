//! Dense linear least squares with column equilibration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of an overdetermined least-squares problem.
#[derive(Debug, Clone)]
pub struct LstsqFit {
    pub coeffs: Vec<f64>,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    /// 2-norm condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

/// Minimise `‖A c − y‖₂`. Columns are scaled to unit norm before the SVD so
/// that the reported condition number reflects genuine collinearity rather
/// than disparate column magnitudes. Fails if that condition exceeds `max_cond`.
pub fn lstsq(design: &DMatrix<f64>, rhs: &[f64], max_cond: f64) -> Result<LstsqFit> {
    let (m, n) = design.shape();
    if m < n || rhs.len() != m {
        return Err(Error::Numeric(format!(
            "least squares needs rows >= cols and matching rhs (got {m}x{n}, rhs {})",
            rhs.len()
        )));
    }
    let mut scaled = design.clone();
    let mut scales = vec![1.0; n];
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = scaled.column(j).norm();
        if norm == 0.0 {
            return Err(Error::Numeric(format!("design column {j} is identically zero")));
        }
        *scale = norm;
        scaled.column_mut(j).scale_mut(1.0 / norm);
    }
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > max_cond {
        return Err(Error::Numeric(format!(
            "design matrix condition number {condition:e} exceeds {max_cond:e}"
        )));
    }
    let y = DVector::from_column_slice(rhs);
    let z = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Numeric(format!("SVD solve failed: {e}")))?;
    let coeffs: Vec<f64> = z.iter().zip(&scales).map(|(c, s)| c / s).collect();
    let resid = &scaled * &z - &y;
    let rms_residual = (resid.norm_squared() / m as f64).sqrt();
    Ok(LstsqFit {
        coeffs,
        rms_residual,
        condition,
    })
}
