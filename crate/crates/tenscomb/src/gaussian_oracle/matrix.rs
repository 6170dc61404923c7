use num_bigint::BigInt;
use num_rational::BigRational;

use super::laurent::{int, LaurentPoly};
use super::OracleError;

pub const MATRIX_POWER_LIMIT: u32 = 12;

/// Number of cycles of `gamma . sigma` with `gamma` the cyclic shift.
fn cycles_after_shift(sigma: &[usize]) -> usize {
    let p = sigma.len();
    let mut seen = vec![false; p];
    let mut count = 0;
    for s in 0..p {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = (sigma[i] + 1) % p;
        }
    }
    count
}

fn pairings(p: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(sigma: &mut Vec<usize>, free: &mut Vec<bool>, visit: &mut impl FnMut(&[usize])) {
        let Some(i) = free.iter().position(|&f| f) else {
            visit(sigma);
            return;
        };
        free[i] = false;
        for j in i + 1..sigma.len() {
            if free[j] {
                free[j] = false;
                sigma[i] = j;
                sigma[j] = i;
                go(sigma, free, visit);
                free[j] = true;
            }
        }
        free[i] = true;
    }
    go(&mut vec![0; p], &mut vec![true; p], visit);
}

/// `<Tr M^p>` for the weight `exp(-(N/2) Tr M^2)`, symbolic in N.
pub fn matrix_gaussian_moment_poly(p: u32) -> Result<LaurentPoly, OracleError> {
    if p % 2 == 1 {
        return Err(OracleError::OddPower(p));
    }
    if p > MATRIX_POWER_LIMIT {
        return Err(OracleError::TooLarge(format!("power {p} > {MATRIX_POWER_LIMIT}")));
    }
    if p == 0 {
        return Ok(LaurentPoly::monomial(1, int(1)));
    }
    let half = (p / 2) as i64;
    let mut poly = LaurentPoly::zero();
    pairings(p as usize, &mut |sigma| {
        poly.add_term(cycles_after_shift(sigma) as i64 - half, int(1));
    });
    Ok(poly)
}

pub fn matrix_gaussian_moment(n: u64, p: u32) -> Result<BigRational, OracleError> {
    if n == 0 {
        return Err(OracleError::InvalidArgument("N must be positive".into()));
    }
    Ok(matrix_gaussian_moment_poly(p)?.eval(&BigRational::from_integer(BigInt::from(n))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melonic_series::catalan;

    #[test]
    fn small_moments() {
        assert_eq!(matrix_gaussian_moment(5, 2).unwrap(), int(5));
        let p4 = matrix_gaussian_moment_poly(4).unwrap();
        assert_eq!(p4.coeff(1), int(2));
        assert_eq!(p4.coeff(-1), int(1));
        let p6 = matrix_gaussian_moment_poly(6).unwrap();
        assert_eq!((p6.coeff(1), p6.coeff(-1)), (int(5), int(10)));
        assert!(matches!(matrix_gaussian_moment(3, 3), Err(OracleError::OddPower(3))));
    }

    #[test]
    fn planar_count_is_catalan() {
        for k in 1..=6u32 {
            let poly = matrix_gaussian_moment_poly(2 * k).unwrap();
            assert_eq!(poly.max_exp(), Some(1));
            assert_eq!(poly.coeff(1), BigRational::from_integer(catalan(k as u64)));
        }
    }
}
