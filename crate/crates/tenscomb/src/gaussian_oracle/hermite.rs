use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::laurent::int;
use super::OracleError;

pub const HERMITE_DEGREE_LIMIT: usize = 20;

/// Dense polynomial in x, lowest degree first.
pub type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn check_degree(n: usize) -> Result<(), OracleError> {
    if n > HERMITE_DEGREE_LIMIT {
        return Err(OracleError::TooLarge(format!("degree {n} > {HERMITE_DEGREE_LIMIT}")));
    }
    Ok(())
}

/// `H_n(x) = (-1)^n e^{x^2/2} d^n/dx^n e^{-x^2/2}`, built from the
/// prefactor recursion `D_{n+1} = D_n' - x D_n`.
pub fn hermite_basis(n: usize) -> Result<Poly, OracleError> {
    check_degree(n)?;
    let mut d: Poly = vec![BigRational::one()];
    for _ in 0..n {
        let mut next = vec![BigRational::zero(); d.len() + 1];
        for (k, c) in d.iter().enumerate() {
            if k > 0 {
                next[k - 1] += c * int(k as i64);
            }
            next[k + 1] -= c;
        }
        d = next;
    }
    if n % 2 == 1 {
        d.iter_mut().for_each(|c| *c = -c.clone());
    }
    Ok(trim(d))
}

/// `c_{n,k}` with `x^n = sum_k c_{n,k} H_{n-2k}(x)`, by back substitution
/// against [`hermite_basis`].
pub fn monomial_expansion(n: usize) -> Result<Vec<BigRational>, OracleError> {
    check_degree(n)?;
    let basis: Vec<Poly> = (0..=n).map(hermite_basis).collect::<Result<_, _>>()?;
    let mut rest: Poly = vec![BigRational::zero(); n + 1];
    rest[n] = BigRational::one();
    let mut out = Vec::new();
    for k in 0..=n / 2 {
        let deg = n - 2 * k;
        let c = rest[deg].clone();
        for (i, b) in basis[deg].iter().enumerate() {
            rest[i] -= &c * b;
        }
        out.push(c);
    }
    debug_assert!(rest.iter().all(Zero::is_zero));
    Ok(out)
}

/// Closed form of [`monomial_expansion`]: `n! / ((n-2k)! k! 2^k)`.
pub fn expansion_closed_form(n: usize, k: usize) -> BigRational {
    inverse_coefficient(n, k, 2)
}

/// The variant with `4^k`, which does not invert [`hermite_basis`].
pub fn quarter_inverse_coefficient(n: usize, k: usize) -> BigRational {
    inverse_coefficient(n, k, 4)
}

fn inverse_coefficient(n: usize, k: usize, base: u64) -> BigRational {
    let f = |m: usize| (1..=m as u64).fold(BigInt::one(), |a, b| a * b);
    BigRational::new(f(n), f(n - 2 * k) * f(k) * num_traits::pow(BigInt::from(base), k))
}

/// Expands `sum_k coeffs[k] H_{n-2k}` back to monomials.
pub fn recombine(n: usize, coeffs: &[BigRational]) -> Result<Poly, OracleError> {
    let mut out: Poly = vec![BigRational::zero(); n + 1];
    for (k, c) in coeffs.iter().enumerate() {
        for (i, b) in hermite_basis(n - 2 * k)?.iter().enumerate() {
            out[i] += c * b;
        }
    }
    Ok(trim(out))
}

/// Whether the `4^k` coefficients reproduce `x^n`.
pub fn quarter_inverse_is_consistent(n: usize) -> Result<bool, OracleError> {
    let coeffs: Vec<_> = (0..=n / 2).map(|k| quarter_inverse_coefficient(n, k)).collect();
    let mut target: Poly = vec![BigRational::zero(); n + 1];
    target[n] = BigRational::one();
    Ok(recombine(n, &coeffs)? == trim(target))
}

pub fn eval_f64(p: &Poly, x: f64) -> f64 {
    use num_traits::ToPrimitive;
    p.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melonic_series::rat;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite_basis(0).unwrap(), vec![int(1)]);
        assert_eq!(hermite_basis(1).unwrap(), vec![int(0), int(1)]);
        assert_eq!(hermite_basis(2).unwrap(), vec![int(-1), int(0), int(1)]);
        assert_eq!(hermite_basis(3).unwrap(), vec![int(0), int(-3), int(0), int(1)]);
        assert_eq!(monomial_expansion(2).unwrap(), vec![int(1), int(1)]);
    }

    #[test]
    fn inverse_round_trip() {
        for n in 0..=HERMITE_DEGREE_LIMIT {
            let c = monomial_expansion(n).unwrap();
            for (k, ck) in c.iter().enumerate() {
                assert_eq!(*ck, expansion_closed_form(n, k));
            }
            let mut xn = vec![BigRational::zero(); n + 1];
            xn[n] = BigRational::one();
            assert_eq!(recombine(n, &c).unwrap(), xn);
        }
    }

    #[test]
    fn four_to_the_k_fails() {
        assert_eq!(quarter_inverse_coefficient(2, 1), rat(1, 2));
        assert!(!quarter_inverse_is_consistent(2).unwrap());
        assert!(quarter_inverse_is_consistent(1).unwrap());
    }

    #[test]
    fn limit() {
        assert!(hermite_basis(21).is_err());
    }
}
