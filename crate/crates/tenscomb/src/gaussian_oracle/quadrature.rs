use num_complex::Complex64;

use super::hermite::{eval_f64, hermite_basis};
use super::OracleError;

/// Half-width of the integration box; the Gaussian tail beyond it is below 1e-17.
const RADIUS: f64 = 9.0;
const START_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1.0 / 16.0;
const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub discrepancy: f64,
    /// Tensor side under the weight `exp(-|T|^2 - 3 lambda |T|^4 / 4)`.
    pub lhs_alternative: Complex64,
}

/// Halves the step of a trapezoid rule until two successive values agree.
fn refine(mut rule: impl FnMut(f64) -> Complex64, what: &str) -> Result<Complex64, OracleError> {
    let mut h = START_STEP;
    let mut prev = rule(h);
    while h > MIN_STEP {
        h /= 2.0;
        let next = rule(h);
        if (next - prev).norm() <= TOLERANCE * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(OracleError::QuadratureNotConverged(what.to_string()))
}

fn grid(h: f64) -> Vec<f64> {
    let m = (RADIUS / h).round() as i64;
    (-m..=m).map(|i| i as f64 * h).collect()
}

/// `<|T|^{2p}>` over `T` in C with weight `exp(-a |T|^2 - b |T|^4)`.
fn tensor_side(p: u32, a: f64, b: f64) -> Result<Complex64, OracleError> {
    let ratio = |h: f64| {
        let xs = grid(h);
        let (mut num, mut den) = (0.0, 0.0);
        for &u in &xs {
            for &v in &xs {
                let r2 = u * u + v * v;
                let w = (-a * r2 - b * r2 * r2).exp();
                num += r2.powi(p as i32) * w;
                den += w;
            }
        }
        Complex64::new(num / den, 0.0)
    };
    refine(ratio, "tensor side")
}

/// `(2i sqrt2 / sqrt(lambda))^p <H_p(M_1)>` over `M` in R^3 with weight
/// `exp(-|M|^2/2) / (1 + i sqrt(lambda/2) (M_1+M_2+M_3))`.
fn matrix_side(p: u32, lambda: f64) -> Result<Complex64, OracleError> {
    let hp = hermite_basis(p as usize)?;
    let a = (lambda / 2.0).sqrt();
    let ratio = |h: f64| {
        let xs = grid(h);
        let g: Vec<f64> = xs.iter().map(|x| (-0.5 * x * x).exp()).collect();
        let hv: Vec<f64> = xs.iter().map(|&x| eval_f64(&hp, x)).collect();
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                let gij = g[i] * g[j];
                for k in 0..xs.len() {
                    let w = gij * g[k] / Complex64::new(1.0, a * (xs[i] + xs[j] + xs[k]));
                    num += w * hv[i];
                    den += w;
                }
            }
        }
        num / den
    };
    let prefactor = Complex64::new(0.0, 2.0 * 2f64.sqrt() / lambda.sqrt()).powu(p);
    Ok(prefactor * refine(ratio, "matrix side")?)
}

/// Compares the tensor moment `<|T|^{2p}>` at rank 3, size 1, with the
/// matrix-side Hermite expectation.
pub fn hermite_relation_quadrature(p: u32, lambda: f64) -> Result<QuadratureCheck, OracleError> {
    if p > 3 {
        return Err(OracleError::TooLarge(format!("p = {p} > 3")));
    }
    if !(lambda > 0.0 && lambda <= 2.0) {
        return Err(OracleError::InvalidArgument(format!("lambda = {lambda} outside (0, 2]")));
    }
    let lhs = tensor_side(p, 0.5, 3.0 * lambda / 16.0)?;
    let rhs = matrix_side(p, lambda)?;
    let lhs_alternative = tensor_side(p, 1.0, 3.0 * lambda / 4.0)?;
    Ok(QuadratureCheck { lhs, rhs, discrepancy: (lhs - rhs).norm(), lhs_alternative })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sides_agree() {
        for (p, expect) in [(0, 1.0), (1, 1.14474), (2, 2.28070)] {
            let c = hermite_relation_quadrature(p, 0.5).unwrap();
            assert!(c.discrepancy < 1e-6, "p={p}: {c:?}");
            assert!((c.lhs.re - expect).abs() < 1e-4, "p={p}: {c:?}");
        }
    }

    #[test]
    fn alternative_weight_is_off_by_powers_of_two() {
        for p in 1..=3 {
            let c = hermite_relation_quadrature(p, 0.5).unwrap();
            assert!((c.lhs_alternative - c.rhs).norm() > 1e-2);
            assert!((c.lhs_alternative.re * 2f64.powi(p as i32) - c.lhs.re).abs() < 1e-8);
        }
    }
}
