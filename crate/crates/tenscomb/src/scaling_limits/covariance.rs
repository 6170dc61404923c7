use nalgebra::{DMatrix, DVector};

use super::ScalingError;

/// Operators on `d` Hermitian `N x N` matrices, in the orthonormal real
/// basis of each factor (diagonal units, then symmetric and antisymmetric
/// off-diagonal pairs).
#[derive(Debug, Clone)]
pub struct CovarianceOperator {
    pub d: usize,
    pub n: usize,
    pub alpha_sq: f64,
    pub v: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub projectors: Vec<DMatrix<f64>>,
    pub p: DMatrix<f64>,
    /// `|| V V^-1 - I ||_max` for the projector-derived inverse.
    pub residual: f64,
    /// Same for the variant with `d alpha^2 / (N (1 - alpha^2))` on `P`.
    pub variant_residual: f64,
    /// Agreement with a numerical LU inverse.
    pub numeric_gap: f64,
}

fn identity_direction(d: usize, n: usize, c: usize) -> DVector<f64> {
    let dim = n * n;
    let mut u = DVector::zeros(d * dim);
    for i in 0..n {
        u[c * dim + i] = 1.0 / (n as f64).sqrt();
    }
    u
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn covariance_operator(d: usize, n: usize, alpha_sq: f64) -> Result<CovarianceOperator, ScalingError> {
    if d == 0 || n == 0 {
        return Err(ScalingError::OutsideDomain("d and N must be positive".into()));
    }
    let (nf, df) = (n as f64, d as f64);
    if (1.0 - alpha_sq).abs() < 1e-14 || (1.0 - df * alpha_sq).abs() < 1e-14 {
        return Err(ScalingError::SingularCovariance(format!("alpha^2 = {alpha_sq}")));
    }
    let dim = d * n * n;
    let id = DMatrix::<f64>::identity(dim, dim);
    let us: Vec<DVector<f64>> = (0..d).map(|c| identity_direction(d, n, c)).collect();
    let projectors: Vec<DMatrix<f64>> = us.iter().map(|u| u * u.transpose()).collect();
    let w = us.iter().fold(DVector::zeros(dim), |a, u| a + u) / df.sqrt();
    let p = &w * w.transpose();
    let sum_pc = projectors.iter().fold(DMatrix::zeros(dim, dim), |a, m| a + m);

    for (i, a) in projectors.iter().enumerate() {
        for (j, b) in projectors.iter().enumerate() {
            let expect = if i == j { a.clone() } else { DMatrix::zeros(dim, dim) };
            assert!(max_abs(&(a * b - expect)) < 1e-12, "projectors are not orthogonal");
        }
    }
    assert!(max_abs(&(&p * &p - &p)) < 1e-12, "P is not idempotent");

    let v = &id * (nf * (1.0 - alpha_sq)) + (&sum_pc - &p * df) * (nf * alpha_sq);
    let decomposed = (&id - &sum_pc) * (nf * (1.0 - alpha_sq)) + (&sum_pc - &p) * nf + &p * (nf * (1.0 - df * alpha_sq));
    assert!(max_abs(&(&v - decomposed)) < 1e-12 * nf, "spectral decomposition mismatch");

    let inverse = &id / (nf * (1.0 - alpha_sq)) - &sum_pc * (alpha_sq / (nf * (1.0 - alpha_sq)))
        + &p * (df * alpha_sq / (nf * (1.0 - df * alpha_sq)));
    let variant = &id / (nf * (1.0 - alpha_sq)) - &sum_pc * (alpha_sq / (nf * (1.0 - alpha_sq)))
        + &p * (df * alpha_sq / (nf * (1.0 - alpha_sq)));
    let residual = max_abs(&(&v * &inverse - &id));
    let variant_residual = max_abs(&(&v * &variant - &id));
    let numeric = v.clone().lu().try_inverse().ok_or_else(|| ScalingError::SingularCovariance("LU failed".into()))?;
    let numeric_gap = max_abs(&(numeric - &inverse));
    Ok(CovarianceOperator { d, n, alpha_sq, v, inverse, projectors, p, residual, variant_residual, numeric_gap })
}

impl CovarianceOperator {
    /// Sorted eigenvalues with multiplicities, grouped to 1e-9.
    pub fn spectrum(&self) -> Vec<(f64, usize)> {
        let mut eig: Vec<f64> = self.v.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let mut out: Vec<(f64, usize)> = Vec::new();
        for e in eig {
            match out.last_mut() {
                Some((x, k)) if (e - *x).abs() < 1e-9 => *k += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_spectrum() {
        let op = covariance_operator(3, 2, -0.1).unwrap();
        assert!(op.residual < 1e-12);
        assert!(op.numeric_gap < 1e-12);
        assert!(op.variant_residual > 1e-3);
        let spec = op.spectrum();
        assert_eq!(spec.len(), 3);
        let (n, a2, d) = (2.0, -0.1, 3.0);
        assert!((spec[0].0 - n).abs() < 1e-9 && spec[0].1 == 2);
        assert!((spec[1].0 - n * (1.0 - a2)).abs() < 1e-9 && spec[1].1 == 12 - 3);
        assert!((spec[2].0 - n * (1.0 - d * a2)).abs() < 1e-9 && spec[2].1 == 1);
    }

    #[test]
    fn free_case() {
        let op = covariance_operator(2, 3, 0.0).unwrap();
        assert!(max_abs(&(&op.v - DMatrix::identity(18, 18) * 3.0)) < 1e-14);
        assert!(max_abs(&(&op.inverse - DMatrix::identity(18, 18) / 3.0)) < 1e-14);
    }

    #[test]
    fn singular() {
        assert!(matches!(covariance_operator(3, 2, 1.0), Err(ScalingError::SingularCovariance(_))));
        assert!(matches!(covariance_operator(3, 2, 1.0 / 3.0), Err(ScalingError::SingularCovariance(_))));
    }
}
