use super::ScalingError;
use crate::melonic_series::{catalan, tree_function_scaled};
use num_traits::ToPrimitive;

pub fn z_critical(d: usize) -> f64 {
    1.0 / (4.0 * d as f64)
}

pub fn x_critical(d: usize) -> f64 {
    1.0 / (4.0 * (d as f64 - 1.0))
}

/// `z = z_c - x N^(2-d)`.
pub fn rescaled_z(d: usize, x: f64, n: f64) -> f64 {
    z_critical(d) - x * n.powf(2.0 - d as f64)
}

fn check_rank(d: usize) -> Result<(), ScalingError> {
    if !(3..=5).contains(&d) {
        return Err(ScalingError::OutsideDomain(format!("d = {d} outside 3..=5")));
    }
    Ok(())
}

fn catalan_f64(k: usize) -> f64 {
    catalan(k as u64).to_f64().expect("finite Catalan number")
}

/// Sum over cherry trees with `l` loops.
pub fn cherry_amplitude(d: usize, l: usize, z: f64, n: f64) -> Result<f64, ScalingError> {
    check_rank(d)?;
    let df = d as f64;
    if !(z > 0.0 && z < z_critical(d)) || !(n > 0.0) {
        return Err(ScalingError::OutsideDomain(format!("z = {z}, N = {n}")));
    }
    let t = tree_function_scaled(d, z)?;
    if l == 0 {
        return Ok(t);
    }
    let li = l as i32;
    let num = n.powf(-(df - 2.0) * l as f64)
        * catalan_f64(l - 1)
        * z.powi(5 * li - 2)
        * df.powi(3 * li - 1)
        * (df - 1.0).powi(2 * li - 1)
        * t.powi(8 * li - 2);
    let den = (1.0 - z * t * t).powi(3 * li - 1) * (1.0 - 4.0 * df * z).powf(l as f64 - 0.5);
    Ok(num / den)
}

/// Terms `1..=terms` of [`cherry_limit`], built by the ratio
/// `C_L / C_{L-1} = 2 (2L - 1) / (L + 1)` so large `L` neither overflows nor
/// underflows early.
fn cherry_limit_terms(d: usize, x: f64, terms: usize) -> Result<Vec<f64>, ScalingError> {
    check_rank(d)?;
    if terms == 0 || !(x > 0.0) {
        return Err(ScalingError::OutsideDomain(format!("L = {terms}, x = {x}")));
    }
    let df = d as f64;
    let step = 16.0 * (df - 1.0) * x;
    let mut a = 8.0 * df.sqrt() / step * x.sqrt();
    let mut out = Vec::with_capacity(terms);
    for l in 1..=terms {
        out.push(a);
        let lf = l as f64;
        a *= 2.0 * (2.0 * lf - 1.0) / (lf + 1.0) / step;
    }
    Ok(out)
}

/// `8 sqrt(d) C_{L-1} / (16 (d-1))^L x^(1/2 - L)`.
pub fn cherry_limit(d: usize, l: usize, x: f64) -> Result<f64, ScalingError> {
    if l == 0 {
        return Err(ScalingError::OutsideDomain("L = 0".into()));
    }
    Ok(*cherry_limit_terms(d, x, l)?.last().expect("l >= 1"))
}

/// Partial sum of [`cherry_limit`] over `1..=terms`.
pub fn cherry_sum_limit(d: usize, x: f64, terms: usize) -> Result<f64, ScalingError> {
    Ok(cherry_limit_terms(d, x, terms)?.iter().sum())
}

/// Melonic part at `z(x, N)` plus the resummed cherries, for `x > x_c`.
pub fn double_scaled_two_point(d: usize, x: f64, n: f64) -> Result<f64, ScalingError> {
    check_rank(d)?;
    let df = d as f64;
    if !(x > x_critical(d)) || !(n > 0.0) {
        return Err(ScalingError::OutsideDomain(format!("x = {x} must exceed x_c = {}", x_critical(d))));
    }
    let y = df * x * n.powf(2.0 - df);
    if 4.0 * y >= 1.0 {
        return Err(ScalingError::OutsideDomain(format!("4 d x N^(2-d) = {} >= 1", 4.0 * y)));
    }
    let melonic = 2.0 * (1.0 - 2.0 * y.sqrt()) / (1.0 - 4.0 * y);
    let t = tree_function_scaled(d, rescaled_z(d, x, n))?;
    // T(dz) loses about eps / sqrt(y) to the cancellation in 1 - 4 d z
    let tol = 1e-10 * t + 16.0 * f64::EPSILON / y.sqrt();
    assert!((melonic - t).abs() <= tol, "melonic part disagrees with T(dz)");
    Ok(melonic + 4.0 * df.sqrt() * n.powf(1.0 - df / 2.0) * (x.sqrt() - (x - x_critical(d)).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_loops_is_melonic() {
        let z = 0.05;
        assert_eq!(cherry_amplitude(3, 0, z, 100.0).unwrap(), tree_function_scaled(3, z).unwrap());
    }

    #[test]
    fn rescaled_limit() {
        for d in 3..=5 {
            for l in 1..=3 {
                let x = 0.4;
                let n = 10f64.powf(12.0 / (d as f64 - 2.0));
                let z = rescaled_z(d, x, n);
                let scaled = n.powf(d as f64 / 2.0 - 1.0) * cherry_amplitude(d, l, z, n).unwrap();
                let lim = cherry_limit(d, l, x).unwrap();
                assert!(((scaled - lim) / lim).abs() < 1e-3, "d={d} L={l}: {scaled} vs {lim}");
            }
        }
    }

    #[test]
    fn resummation() {
        for d in 3..=5 {
            let x = 1.5 * x_critical(d);
            let sum = cherry_sum_limit(d, x, 200).unwrap();
            let closed = 4.0 * (d as f64).sqrt() * (x.sqrt() - (x - x_critical(d)).sqrt());
            assert!((sum - closed).abs() < 1e-10, "{sum} vs {closed}");
        }
    }

    #[test]
    fn domain() {
        assert!(double_scaled_two_point(3, 0.1, 1e3).is_err());
        assert!(double_scaled_two_point(6, 1.0, 1e3).is_err());
        assert!(double_scaled_two_point(3, 0.2, 1e3).unwrap() > 0.0);
    }
}
