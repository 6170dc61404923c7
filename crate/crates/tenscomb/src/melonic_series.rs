//! Exact truncated power series and the melonic generating functions.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("the recursion is not triangular: term {0} has no positive power of z")]
    NoFormalSolution(usize),
    #[error("need at least {needed} coefficients, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error("constant term must be 1, got {0}")]
    NonUnitConstantTerm(String),
    #[error("point {0} outside the domain")]
    OutsideDomain(String),
    #[error("constant term vanishes, no reciprocal")]
    NotInvertible,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Coefficients `a_0..=a_order` of a series truncated at `z^(order+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `z` truncated at `order`.
    pub fn var(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, BigRational::zero());
        PowerSeries { coeffs: c }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Multiplies by `z^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut c = vec![BigRational::zero(); n];
        if k < n {
            c[k..].clone_from_slice(&self.coeffs[..n - k]);
        }
        PowerSeries { coeffs: c }
    }

    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let n = self.coeffs.len();
        let inv0 = a0.recip();
        let mut b: Vec<BigRational> = Vec::with_capacity(n);
        b.push(inv0.clone());
        for k in 1..n {
            let mut s = BigRational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &b[k - j];
                }
            }
            b.push(-s * &inv0);
        }
        Ok(PowerSeries { coeffs: b })
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::constant(BigRational::one(), self.order());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Evaluates the truncated polynomial at a float point.
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, o: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().min(o.coeffs.len());
        PowerSeries { coeffs: (0..n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect() }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, o: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().min(o.coeffs.len());
        PowerSeries { coeffs: (0..n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect() }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, o: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut c = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs: c }
    }
}

/// One term `coef * z^z_pow * G^g_pow` of a fixed-point equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coef: BigRational,
    pub z_pow: usize,
    pub g_pow: usize,
}

/// `G = constant + sum of terms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointEquation {
    pub constant: BigRational,
    pub terms: Vec<Term>,
}

impl FixedPointEquation {
    /// `G = 1 + z G^(d+1)`.
    pub fn melonic(d: usize) -> Self {
        FixedPointEquation {
            constant: BigRational::one(),
            terms: vec![Term { coef: BigRational::one(), z_pow: 1, g_pow: d + 1 }],
        }
    }

    /// `G = 1 + lambda^2 G^4`, the multi-orientable leading order.
    pub fn mo_leading() -> Self {
        FixedPointEquation {
            constant: BigRational::one(),
            terms: vec![Term { coef: BigRational::one(), z_pow: 2, g_pow: 4 }],
        }
    }
}

/// Solves the equation coefficient by coefficient. Every term must carry a
/// positive power of `z`, which makes `a_k` depend only on lower coefficients.
pub fn series_fixed_point(eq: &FixedPointEquation, order: usize) -> Result<PowerSeries, SeriesError> {
    if let Some(i) = eq.terms.iter().position(|t| t.z_pow == 0) {
        return Err(SeriesError::NoFormalSolution(i));
    }
    let max_pow = eq.terms.iter().map(|t| t.g_pow).max().unwrap_or(0);
    let n = order + 1;
    let mut a = vec![BigRational::zero(); n];
    // powers[m][k] = [z^k] G^m, filled as soon as a_k is known
    let mut powers: Vec<Vec<BigRational>> = vec![Vec::with_capacity(n); max_pow + 1];
    for k in 0..n {
        let mut ak = if k == 0 { eq.constant.clone() } else { BigRational::zero() };
        for t in &eq.terms {
            if t.z_pow <= k {
                let idx = k - t.z_pow;
                ak += &t.coef * &powers[t.g_pow][idx];
            }
        }
        a[k] = ak;
        powers[0].push(if k == 0 { BigRational::one() } else { BigRational::zero() });
        for m in 1..=max_pow {
            let mut s = BigRational::zero();
            for j in 0..=k {
                if !a[j].is_zero() && !powers[m - 1][k - j].is_zero() {
                    s += &a[j] * &powers[m - 1][k - j];
                }
            }
            powers[m].push(s);
        }
    }
    Ok(PowerSeries::new(a))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `binom((d+1)p, p) / (dp+1)`.
pub fn fuss_catalan(d: u64, p: u64) -> BigRational {
    BigRational::new(binomial((d + 1) * p, p), BigInt::from(d * p + 1))
}

pub fn catalan(k: u64) -> BigInt {
    fuss_catalan(1, k).to_integer()
}

/// Melonic series checked coefficientwise against the closed form.
pub fn melonic_series(d: usize, order: usize) -> Result<PowerSeries, SeriesError> {
    let s = series_fixed_point(&FixedPointEquation::melonic(d), order)?;
    for (p, c) in s.coeffs().iter().enumerate() {
        assert_eq!(*c, fuss_catalan(d as u64, p as u64), "fixed point disagrees with closed form at p={p}");
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData {
    pub d: usize,
    pub z_c: BigRational,
    pub g_c: BigRational,
    pub exponent: Option<(f64, f64)>,
}

fn rpow(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// `z_c = d^d / (d+1)^(d+1)` and `G_c = (d+1)/d`; the fixed-point relation
/// is asserted exactly.
pub fn melonic_critical(d: usize) -> CriticalData {
    let di = BigInt::from(d);
    let d1 = BigInt::from(d + 1);
    let z_c = BigRational::new(num_traits::pow(di.clone(), d), num_traits::pow(d1.clone(), d + 1));
    let g_c = BigRational::new(d1, di);
    assert_eq!(g_c, BigRational::one() + &z_c * rpow(&g_c, d + 1));
    CriticalData { d, z_c, g_c, exponent: None }
}

pub const MIN_COEFFICIENTS: usize = 100;

fn solve_small(mut m: Vec<Vec<f64>>, mut v: Vec<f64>) -> Vec<f64> {
    let n = v.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = v[r];
        for c in r + 1..n {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    x
}

/// Least-squares fit of `s_p = s + c_1/p + ... + c_m/p^m` over the points.
fn fit_inverse_powers(points: &[(f64, f64)], m: usize) -> f64 {
    let k = m + 1;
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for &(p, s) in points {
        let row: Vec<f64> = (0..k).map(|j| p.powi(-(j as i32))).collect();
        for a in 0..k {
            for b in 0..k {
                ata[a][b] += row[a] * row[b];
            }
            atb[a] += row[a] * s;
        }
    }
    solve_small(ata, atb)[0]
}

/// Estimates `s` in `a_p ~ C z_c^(-p) p^(-s-1)` from the ratio sequence
/// `s_p = p (1 - z_c a_p / a_(p-1)) - 1`, extrapolated in `1/p`. Returns the
/// estimate and the spread between extrapolation orders as an error bar.
pub fn exponent_estimate(series: &PowerSeries, z_c: &BigRational) -> Result<(f64, f64), SeriesError> {
    let c = series.coeffs();
    let nonzero = c.iter().filter(|x| !x.is_zero()).count();
    if c.len() < MIN_COEFFICIENTS || nonzero < MIN_COEFFICIENTS {
        return Err(SeriesError::TooFewCoefficients { needed: MIN_COEFFICIENTS, got: nonzero.min(c.len()) });
    }
    let n = c.len() - 1;
    let lo = n / 2;
    let mut pts = Vec::new();
    for p in lo..=n {
        if c[p - 1].is_zero() {
            continue;
        }
        let r = (z_c * &c[p] / &c[p - 1]).to_f64().unwrap_or(f64::NAN);
        pts.push((p as f64, p as f64 * (1.0 - r) - 1.0));
    }
    let est: Vec<f64> = (1..=3).map(|m| fit_inverse_powers(&pts, m)).collect();
    let spread = est.windows(2).map(|w| (w[0] - w[1]).abs()).fold(0.0, f64::max);
    Ok((est[2], spread))
}

/// Leading and next-to-leading series in `z` for the colored model.
#[derive(Debug, Clone, PartialEq)]
pub struct NloSeries {
    pub d: usize,
    pub leading: PowerSeries,
    /// Standard: denominator `(G0 - 2)(1 - d z G0)`.
    pub standard: PowerSeries,
    /// With `(1 - d z G0^2)` in place of `(1 - d z G0)`.
    pub variant: PowerSeries,
    /// `1 - d z_c G_c` and `1 - d z_c G_c^2`.
    pub standard_denominator_at_critical: BigRational,
    pub variant_denominator_at_critical: BigRational,
    pub g0_minus_two_at_critical: BigRational,
}

pub fn nlo_gf(d: usize, order: usize) -> Result<NloSeries, SeriesError> {
    if d < 3 {
        return Err(SeriesError::OutsideDomain(format!("d = {d} < 3")));
    }
    let g0 = melonic_series(d, order)?;
    let z = PowerSeries::var(order);
    let dz = z.scale(&int(d as i64));
    let one = PowerSeries::constant(BigRational::one(), order);
    let pref = int((d * (d + 1) / 2) as i64);
    let num = g0.pow(2 * d + 2).shift(2).scale(&pref);
    let g0m2 = &g0 - &PowerSeries::constant(int(2), order);
    let den_standard = &g0m2 * &(&one - &(&dz * &g0));
    let den_variant = &g0m2 * &(&one - &(&dz * &g0.pow(2)));
    let standard = &num * &den_standard.reciprocal()?;
    let variant = &num * &den_variant.reciprocal()?;
    let crit = melonic_critical(d);
    let dd = int(d as i64);
    Ok(NloSeries {
        d,
        leading: g0,
        standard,
        variant,
        standard_denominator_at_critical: BigRational::one() - &dd * &crit.z_c * &crit.g_c,
        variant_denominator_at_critical: BigRational::one() - &dd * &crit.z_c * rpow(&crit.g_c, 2),
        g0_minus_two_at_critical: &crit.g_c - int(2),
    })
}

/// Multi-orientable NLO series in `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoNloSeries {
    pub leading: PowerSeries,
    pub half: PowerSeries,
    pub lambda_c_squared: BigRational,
    pub g_c: BigRational,
    pub denominator_at_critical: BigRational,
}

/// `lambda G0^3 / (1 - 3 lambda^2 G0^4)` with `G0 = 1 + lambda^2 G0^4`.
pub fn mo_nlo_gf(order: usize) -> Result<MoNloSeries, SeriesError> {
    if order < 1 {
        return Err(SeriesError::OutsideDomain("order must be at least 1".into()));
    }
    let g0 = series_fixed_point(&FixedPointEquation::mo_leading(), order)?;
    let one = PowerSeries::constant(BigRational::one(), order);
    let den = &one - &g0.pow(4).shift(2).scale(&int(3));
    let half = &g0.pow(3).shift(1) * &den.reciprocal()?;
    let lc2 = rat(27, 256);
    let gc = rat(4, 3);
    let dc = BigRational::one() - int(3) * &lc2 * rpow(&gc, 4);
    assert_eq!(gc, BigRational::one() + &lc2 * rpow(&gc, 4));
    Ok(MoNloSeries { leading: g0, half, lambda_c_squared: lc2, g_c: gc, denominator_at_critical: dc })
}

/// Catalan series `T = 1 + z T^2`.
pub fn tree_series(order: usize) -> PowerSeries {
    series_fixed_point(&FixedPointEquation::melonic(1), order).expect("triangular")
}

/// `T(dz)` as a series in `z`, with the identities
/// `1 - d z T^2 = 2 - T` and `(2 - T)^2 = T^2 (1 - 4 d z)` asserted.
pub fn tree_series_scaled(d: usize, order: usize) -> PowerSeries {
    let t = tree_series(order);
    let mut scaled = Vec::with_capacity(order + 1);
    let mut dp = BigRational::one();
    for c in t.coeffs() {
        scaled.push(c * &dp);
        dp *= int(d as i64);
    }
    let t = PowerSeries::new(scaled);
    let one = PowerSeries::constant(BigRational::one(), order);
    let dz = PowerSeries::var(order).scale(&int(d as i64));
    let lhs = &one - &(&dz * &t.pow(2));
    let two_minus_t = &PowerSeries::constant(int(2), order) - &t;
    assert_eq!(lhs, two_minus_t);
    let rhs = &t.pow(2) * &(&one - &dz.scale(&int(4)));
    assert_eq!(two_minus_t.pow(2), rhs);
    t
}

/// `T(z) = (1 - sqrt(1 - 4z)) / (2z)`, defined for `z <= 1/4`.
pub fn tree_function(z: f64) -> Result<f64, SeriesError> {
    if !(z <= 0.25) {
        return Err(SeriesError::OutsideDomain(format!("{z}")));
    }
    if z.abs() < 1e-300 {
        return Ok(1.0);
    }
    // 2 / (1 + sqrt(1 - 4z)) avoids the cancellation near z = 0
    Ok(2.0 / (1.0 + (1.0 - 4.0 * z).sqrt()))
}

/// Exact value where the square root is rational, e.g. `T(1/4) = 2`.
pub fn tree_function_exact(z: &BigRational) -> Result<Option<BigRational>, SeriesError> {
    let quarter = rat(1, 4);
    if *z > quarter {
        return Err(SeriesError::OutsideDomain(z.to_string()));
    }
    if z.is_zero() {
        return Ok(Some(BigRational::one()));
    }
    let disc = BigRational::one() - int(4) * z;
    let (n, d) = (disc.numer().clone(), disc.denom().clone());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn != n || &rd * &rd != d {
        return Ok(None);
    }
    let root = BigRational::new(rn, rd);
    Ok(Some((BigRational::one() - root) / (int(2) * z)))
}

/// `T(dz)` with `1 - d z T^2 = T sqrt(1 - 4dz)` checked to 1e-12.
pub fn tree_function_scaled(d: usize, z: f64) -> Result<f64, SeriesError> {
    let dz = d as f64 * z;
    let t = tree_function(dz)?;
    let lhs = 1.0 - dz * t * t;
    let rhs = t * (1.0 - 4.0 * dz).max(0.0).sqrt();
    assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "tree identity fails at z={z}");
    Ok(t)
}

/// One-particle-irreducible part `Sigma = 1 - 1/G`, with the round trip
/// `(1 - Sigma)^(-1) = G` asserted.
pub fn one_pi_relation(g: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    if !g.coeff(0).is_one() {
        return Err(SeriesError::NonUnitConstantTerm(g.coeff(0).to_string()));
    }
    let one = PowerSeries::constant(BigRational::one(), g.order());
    let sigma = &one - &g.reciprocal()?;
    let back = (&one - &sigma).reciprocal()?;
    assert_eq!(&back, g);
    Ok(sigma)
}

pub fn is_positive_integer(c: &BigRational) -> bool {
    c.is_integer() && c.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn catalan_fixed_point() {
        let s = series_fixed_point(&FixedPointEquation::melonic(1), 5).unwrap();
        assert_eq!(ints(&s), vec![1, 1, 2, 5, 14, 42]);
        let s3 = series_fixed_point(&FixedPointEquation::melonic(3), 4).unwrap();
        assert_eq!(s3.coeff(0), int(1));
        assert_eq!(s3.coeff(1), int(1));
        assert_eq!(s3.coeff(2), int(4));
    }

    #[test]
    fn fuss_catalan_values() {
        assert_eq!(fuss_catalan(1, 3), int(5));
        assert_eq!(fuss_catalan(3, 2), int(4));
        assert_eq!(fuss_catalan(7, 0), int(1));
    }

    #[test]
    fn non_triangular_is_rejected() {
        let eq = FixedPointEquation {
            constant: int(1),
            terms: vec![Term { coef: int(1), z_pow: 0, g_pow: 2 }],
        };
        assert_eq!(series_fixed_point(&eq, 3), Err(SeriesError::NoFormalSolution(0)));
    }

    #[test]
    fn critical_values() {
        let c1 = melonic_critical(1);
        assert_eq!((c1.z_c, c1.g_c), (rat(1, 4), int(2)));
        let c3 = melonic_critical(3);
        assert_eq!((c3.z_c, c3.g_c), (rat(27, 256), rat(4, 3)));
        let c2 = melonic_critical(2);
        assert_eq!((c2.z_c, c2.g_c), (rat(4, 27), rat(3, 2)));
    }

    #[test]
    fn exponents() {
        let cat = tree_series(200);
        let (s, err) = exponent_estimate(&cat, &rat(1, 4)).unwrap();
        assert!((s - 0.5).abs() < 0.05, "{s} {err}");
        let geo = PowerSeries::new((0..200).map(|k| BigRational::from_integer(BigInt::from(4).pow(k))).collect());
        let (s, _) = exponent_estimate(&geo, &rat(1, 4)).unwrap();
        assert!((s + 1.0).abs() < 0.05, "{s}");
        assert!(matches!(exponent_estimate(&tree_series(20), &rat(1, 4)), Err(SeriesError::TooFewCoefficients { .. })));
    }

    #[test]
    fn nlo_head() {
        let nlo = nlo_gf(3, 6).unwrap();
        assert!(nlo.standard.coeff(0).is_zero() && nlo.standard.coeff(1).is_zero());
        assert_eq!(nlo.standard.coeff(2).abs(), int(6));
        assert!(!nlo.variant_denominator_at_critical.is_zero());
    }

    #[test]
    fn mo_nlo_head() {
        let mo = mo_nlo_gf(8).unwrap();
        assert!(mo.half.coeff(0).is_zero());
        assert_eq!(mo.half.coeff(1), int(1));
        assert!(mo.denominator_at_critical.is_zero());
    }

    #[test]
    fn tree_values() {
        assert_eq!(tree_function(0.0).unwrap(), 1.0);
        assert_eq!(tree_function(0.25).unwrap(), 2.0);
        assert_eq!(tree_function_exact(&rat(1, 4)).unwrap(), Some(int(2)));
        assert_eq!(tree_series(3).coeff(3), int(5));
        assert!(matches!(tree_function(0.3), Err(SeriesError::OutsideDomain(_))));
        tree_series_scaled(3, 30);
    }

    #[test]
    fn one_pi() {
        let order = 50;
        let geo = PowerSeries::new(vec![int(1); order + 1]);
        let sigma = one_pi_relation(&geo).unwrap();
        assert_eq!(sigma, PowerSeries::var(order));
        let g0 = melonic_series(3, order).unwrap();
        let s0 = one_pi_relation(&g0).unwrap();
        assert_eq!(s0.coeff(1), g0.coeff(1));
        assert_eq!(s0.coeff(1), int(1));
        let bad = PowerSeries::constant(int(2), 3);
        assert!(matches!(one_pi_relation(&bad), Err(SeriesError::NonUnitConstantTerm(_))));
    }
}
