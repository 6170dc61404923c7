use num_complex::Complex64;

use super::ScalingError;

/// Quartic melonic model at coupling `lambda`, rank `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleContext {
    pub d: usize,
    pub lambda: f64,
}

impl SaddleContext {
    pub fn new(d: usize, lambda: f64) -> Result<Self, ScalingError> {
        if d < 3 {
            return Err(ScalingError::OutsideDomain(format!("d = {d} < 3")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ScalingError::OutsideDomain(format!("lambda = {lambda} must be positive")));
        }
        Ok(SaddleContext { d, lambda })
    }

    /// `sqrt(1 + 2 d lambda)`.
    pub fn s(&self) -> f64 {
        (1.0 + 2.0 * self.d as f64 * self.lambda).sqrt()
    }

    /// `s - 1` without cancellation at small coupling.
    pub fn s_minus_one(&self) -> f64 {
        2.0 * self.d as f64 * self.lambda / (self.s() + 1.0)
    }

    /// `alpha^2 = -(s-1)^2 / (2 d^2 lambda)`, real and negative.
    pub fn alpha_sq(&self) -> f64 {
        let d = self.d as f64;
        -self.s_minus_one().powi(2) / (2.0 * d * d * self.lambda)
    }

    /// The `+` root.
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(0.0, -(-self.alpha_sq()).sqrt())
    }
}

/// Both roots `(-1 +- s) / (2 i d sqrt(lambda/2))`; their product is `1/d`.
pub fn saddle_alpha(ctx: &SaddleContext) -> (Complex64, Complex64) {
    let d = ctx.d as f64;
    let s = ctx.s();
    let plus = ctx.alpha();
    let minus = Complex64::new(0.0, (s + 1.0) / (2.0 * d * (ctx.lambda / 2.0).sqrt()));
    let direct = Complex64::new(ctx.s_minus_one(), 0.0) / Complex64::new(0.0, 2.0 * d * (ctx.lambda / 2.0).sqrt());
    assert!((direct - plus).norm() <= 1e-12 * (1.0 + plus.norm()), "alpha+ forms disagree");
    assert!((plus * minus - 1.0 / d).norm() <= 1e-12, "product of roots is not 1/d");
    (plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoObservables {
    pub alpha: Complex64,
    pub g2: f64,
    pub g2_from_alpha: Complex64,
    /// Density with the extra `+1` inside the bracket.
    pub free_energy_density: f64,
    /// `-log Z / N^d` from the saddle value of Z.
    pub free_energy_density_from_z: f64,
}

pub fn lo_observables(ctx: &SaddleContext) -> LoObservables {
    let (d, l, s) = (ctx.d as f64, ctx.lambda, ctx.s());
    let g2 = 2.0 * ctx.s_minus_one() / (d * l);
    assert!((g2 - (2.0 - d * l / 4.0 * g2 * g2)).abs() <= 1e-12 * (1.0 + g2.abs()), "G2 self-consistency fails");
    let alpha = ctx.alpha();
    let g2_from_alpha = Complex64::new(0.0, 2.0 * 2f64.sqrt() / l.sqrt()) * alpha;
    let log_term = 0.5 * (1.0 + 2.0 * d * l).ln();
    LoObservables {
        alpha,
        g2,
        g2_from_alpha,
        free_energy_density: (1.0 + 2.0 * d * l - 2.0 * s + 1.0) / (4.0 * d * l) - log_term,
        free_energy_density_from_z: (1.0 + 2.0 * d * l - 2.0 * s) / (4.0 * d * l) - log_term,
    }
}

/// Rank-3 NNLO closed form in `s = sqrt(1 + 6 lambda)`.
pub fn nnlo_closed_form(lambda: f64) -> Result<f64, ScalingError> {
    let s = (1.0 + 6.0 * lambda).sqrt();
    let den = (-18.0 * lambda + s - 1.0) * (-24.0 * lambda + 5.0 * s - 5.0);
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if den.abs() < 1e-300 {
        return Err(ScalingError::PoleHit(format!("lambda = {lambda}")));
    }
    Ok(-9.0 * (s - 1.0).powi(3) / den)
}

/// Half-order `<Tr M_1 / N>` coefficient pushed through the linear
/// dictionary `<Tr Theta> = (2 i sqrt2 / sqrt lambda) <Tr M>`.
pub fn nnlo_via_dictionary(lambda: f64) -> Result<f64, ScalingError> {
    let ctx = SaddleContext::new(3, lambda)?;
    let a = ctx.alpha();
    let a2 = ctx.alpha_sq();
    let den = (1.0 - a2) * (1.0 - 5.0 * a2);
    if den.abs() < 1e-300 {
        return Err(ScalingError::PoleHit(format!("lambda = {lambda}")));
    }
    let coefficient = 3.0 * a.powu(3) / den;
    let value = Complex64::new(0.0, 2.0 * 2f64.sqrt() / lambda.sqrt()) * coefficient;
    Ok(value.re)
}

/// Both routes; the caller decides what to do with a disagreement.
pub fn nnlo_two_point_d3(lambda: f64) -> Result<(f64, f64), ScalingError> {
    if !(lambda > 0.0) {
        return Err(ScalingError::OutsideDomain(format!("lambda = {lambda}")));
    }
    Ok((nnlo_closed_form(lambda)?, nnlo_via_dictionary(lambda)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_at_reference_point() {
        let ctx = SaddleContext::new(3, 4.0).unwrap();
        let (plus, _) = saddle_alpha(&ctx);
        assert_eq!(crate::report::float_string(plus.im), "-0.47140452079103168");
        assert!(plus.re == 0.0);
        let lo = lo_observables(&ctx);
        assert!((lo.g2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((lo.g2_from_alpha.re - lo.g2).abs() < 1e-12 && lo.g2_from_alpha.im.abs() < 1e-12);
    }

    #[test]
    fn small_coupling_limits() {
        let ctx = SaddleContext::new(4, 1e-10).unwrap();
        assert!(ctx.alpha().norm() < 1e-4);
        assert!((lo_observables(&ctx).g2 - 2.0).abs() < 1e-8);
    }

    #[test]
    fn nnlo_heads() {
        let l = 1e-6;
        assert!((nnlo_closed_form(l).unwrap() / l + 1.8).abs() < 1e-4);
        assert!((nnlo_via_dictionary(l).unwrap() / l + 3.0).abs() < 1e-4);
    }

    #[test]
    fn nnlo_simplified_forms() {
        for l in [0.1f64, 0.5, 1.0] {
            let s: f64 = (1.0 + 6.0 * l).sqrt();
            let expect = -9.0 * (s - 1.0) / ((3.0 * s + 2.0) * (4.0 * s - 1.0));
            let dict = -9.0 * (s - 1.0) / ((2.0 * s + 1.0) * (4.0 * s - 1.0));
            assert!((nnlo_closed_form(l).unwrap() - expect).abs() < 1e-12);
            assert!((nnlo_via_dictionary(l).unwrap() - dict).abs() < 1e-12);
        }
    }
}
