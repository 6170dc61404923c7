//! Resolvents of the shifted intermediate-field matrix model.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoopError {
    #[error("point {0} lies on the cut")]
    OnCut(String),
    #[error("pole at {0}")]
    PoleHit(String),
    #[error("outside the domain: {0}")]
    OutsideDomain(String),
    #[error("independent routes disagree: {0}")]
    MismatchedRoutes(String),
}

impl LoopError {
    pub fn is_internal(&self) -> bool {
        matches!(self, LoopError::MismatchedRoutes(_))
    }
}

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

/// Cut `[-a, a]` with `a = 2 / sqrt(1 - alpha^2)` and the Zhukovsky map
/// `x(z) = (a/2)(z + 1/z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFrame {
    pub alpha: C,
}

impl SpectralFrame {
    pub fn new(alpha: C) -> Result<Self, LoopError> {
        let s = c(1.0) - alpha * alpha;
        if s.norm() < 1e-14 {
            return Err(LoopError::OutsideDomain("1 - alpha^2 vanishes".into()));
        }
        Ok(SpectralFrame { alpha })
    }

    /// Frame with a real `alpha^2`; negative values give an imaginary `alpha`
    /// on the lower half axis, as at the saddle.
    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self, LoopError> {
        let alpha = if alpha_sq < 0.0 { C::new(0.0, -(-alpha_sq).sqrt()) } else { c(alpha_sq.sqrt()) };
        SpectralFrame::new(alpha)
    }

    pub fn alpha_sq(&self) -> C {
        self.alpha * self.alpha
    }

    /// `1 - alpha^2`.
    pub fn s(&self) -> C {
        c(1.0) - self.alpha_sq()
    }

    pub fn a(&self) -> C {
        2.0 / self.s().sqrt()
    }

    pub fn x_of_z(&self, z: C) -> C {
        self.a() / 2.0 * (z + 1.0 / z)
    }

    pub fn dx_dz(&self, z: C) -> C {
        self.a() / 2.0 * (c(1.0) - 1.0 / (z * z))
    }

    /// `sqrt((x - a)(x + a))` on the sheet where it behaves like `x`.
    pub fn sqrt_sigma(&self, x: C) -> C {
        let a = self.a();
        (x - a).sqrt() * (x + a).sqrt()
    }

    /// Physical branch `|z| > 1`.
    pub fn z_of_x(&self, x: C) -> Result<C, LoopError> {
        self.off_cut(x)?;
        Ok((x + self.sqrt_sigma(x)) / self.a())
    }

    fn off_cut(&self, x: C) -> Result<(), LoopError> {
        let a = self.a();
        let on = x.im.abs() < 1e-14 && a.im.abs() < 1e-14 && x.re.abs() <= a.re;
        if on {
            return Err(LoopError::OnCut(format!("x = {x}")));
        }
        Ok(())
    }
}

/// Leading resolvent in both variables, `(s/2)(x - sqrt(sigma))` and
/// `sqrt(s) / z`, checked equal through the map.
pub fn resolvent_lo(frame: &SpectralFrame, x: C) -> Result<(C, C), LoopError> {
    let z = frame.z_of_x(x)?;
    // (s/2)(x - sqrt(sigma)) with the difference rationalized
    let wx = 2.0 / (x + frame.sqrt_sigma(x));
    let wz = frame.s().sqrt() / z;
    if !close(frame.x_of_z(z), x, 1e-12) {
        return Err(LoopError::MismatchedRoutes(format!("x(z(x)) = {} for x = {x}", frame.x_of_z(z))));
    }
    if !close(wx, wz, 1e-12) {
        return Err(LoopError::MismatchedRoutes(format!("W(x) = {wx} vs W(z) = {wz}")));
    }
    Ok((wx, wz))
}

/// `|W^2 - s x W + s|` for a given value of W.
pub fn disc_equation(frame: &SpectralFrame, x: C, w: C) -> f64 {
    let s = frame.s();
    (w * w - s * x * w + s).norm()
}

/// Largest residual of the leading disc equation over the samples.
pub fn disc_residual(frame: &SpectralFrame, samples: &[C]) -> Result<f64, LoopError> {
    let mut worst: f64 = 0.0;
    for &x in samples {
        let (w, _) = resolvent_lo(frame, x)?;
        worst = worst.max(disc_equation(frame, x, w));
    }
    Ok(worst)
}

/// `alpha^2 (d-1) / (d(2 alpha^2 - alpha^4) + alpha^4 - alpha^2 - 1)`.
pub fn cylinder_coefficient(frame: &SpectralFrame, d: usize) -> C {
    let a2 = frame.alpha_sq();
    let a4 = a2 * a2;
    let df = d as f64;
    a2 * (df - 1.0) / (df * (2.0 * a2 - a4) + a4 - a2 - 1.0)
}

/// Coefficient of `dz1 dz2` in the leading two-point form; the universal
/// part is recomputed as minus the Bergman kernel pulled back by `z2 -> 1/z2`.
pub fn two_point_resolvent_lo(frame: &SpectralFrame, d: usize, z1: C, z2: C) -> Result<C, LoopError> {
    if z1.norm() < 1e-300 || z2.norm() < 1e-300 || (z1 * z2 - 1.0).norm() < 1e-14 {
        return Err(LoopError::PoleHit(format!("(z1, z2) = ({z1}, {z2})")));
    }
    let universal = 1.0 / ((z1 * z2 - 1.0) * (z1 * z2 - 1.0));
    let w = 1.0 / z2;
    let dw = -1.0 / (z2 * z2);
    let bergman = dw / ((z1 - w) * (z1 - w));
    if !close(universal, -bergman, 1e-12) {
        return Err(LoopError::MismatchedRoutes("Bergman pullback".into()));
    }
    Ok(universal - cylinder_coefficient(frame, d) / (z1 * z1 * z2 * z2))
}

/// Predicted `1/x^2` tail of the half-order resolvent at rank 3.
pub fn half_tail_coefficient(frame: &SpectralFrame) -> Result<C, LoopError> {
    let a2 = frame.alpha_sq();
    let den = frame.s() * (1.0 - 5.0 * a2);
    if den.norm() < 1e-14 {
        return Err(LoopError::PoleHit("1 - 5 alpha^2 = 0".into()));
    }
    Ok(3.0 * a2 * frame.alpha / den)
}

/// Half-order resolvent at rank 3 in the x variable.
pub fn resolvent_half_d3(frame: &SpectralFrame, x: C) -> Result<C, LoopError> {
    frame.off_cut(x)?;
    let (al, s) = (frame.alpha, frame.s());
    let a2 = al * al;
    let a3 = a2 * al;
    let den = s * (1.0 - 5.0 * a2);
    if den.norm() < 1e-14 {
        return Err(LoopError::PoleHit("1 - 5 alpha^2 = 0".into()));
    }
    let k = 12.0 * a3 * a2 / den;
    let (w0, _) = resolvent_lo(frame, x)?;
    let sigma = frame.sqrt_sigma(x);
    Ok(((k + a3 * x * x + 2.0 * a3 / s) * w0 - a3 * x) / (s * sigma))
}

/// `W^{1/2}(x(z)) dx/dz`, composed from the x form.
pub fn omega_half_d3(frame: &SpectralFrame, z: C) -> Result<C, LoopError> {
    let x = frame.x_of_z(z);
    let w = resolvent_half_d3(frame, x)?;
    Ok(w * frame.dx_dz(z))
}

/// The same form simplified in z: `alpha^3 s^{-3/2} (3 s / (1 - 5 alpha^2) z^-2 + z^-4)`.
pub fn omega_half_d3_simplified(frame: &SpectralFrame, z: C) -> C {
    let (al, s) = (frame.alpha, frame.s());
    let a2 = al * al;
    al * a2 / (s * s.sqrt()) * (3.0 * s / (1.0 - 5.0 * a2) / (z * z) + 1.0 / (z * z * z * z))
}

/// Direct z form, compared against the pulled-back x form.
pub fn omega_half_d3_direct(frame: &SpectralFrame, z: C) -> C {
    let (al, s) = (frame.alpha, frame.s());
    let a2 = al * al;
    a2 / s * (3.0 * (4.0 + al - 5.0 * a2 * al) / (1.0 - 5.0 * a2) + a2 * al / (z * z)) / (z * z)
}

/// `1/x^2` coefficient of the half-order resolvent as the contour integral
/// of `x W dx` around `|z| = radius`, by the periodic trapezoid rule.
pub fn half_tail_by_contour(frame: &SpectralFrame, radius: f64, nodes: usize) -> Result<C, LoopError> {
    let mut acc = c(0.0);
    for k in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
        let z = C::from_polar(radius, theta);
        let x = frame.x_of_z(z);
        // dz = i z dtheta; the 2 pi i cancels against the mean
        acc += x * omega_half_d3(frame, z)? * z;
    }
    Ok(acc / nodes as f64)
}

/// `omega^{1/2}` at `z = sign (1 + eps)` for shrinking `eps`, beside the
/// simplified value at `z = sign`; bounded values mean no pole there.
pub fn branch_point_values(frame: &SpectralFrame, sign: f64) -> Result<(Vec<C>, C), LoopError> {
    let values = [1e-4, 1e-5, 1e-6]
        .iter()
        .map(|e| omega_half_d3(frame, c(sign * (1.0 + e))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((values, omega_half_d3_simplified(frame, c(sign))))
}

/// Coefficient of dz in the rank-6 first-order form.
pub fn omega1_d6(frame: &SpectralFrame, z: C) -> Result<C, LoopError> {
    if z.norm() < 1e-300 || (z * z - 1.0).norm() < 1e-300 {
        return Err(LoopError::PoleHit(format!("z = {z}")));
    }
    let (al, s) = (frame.alpha, frame.s());
    let a2 = al * al;
    let a3 = a2 * al;
    let a4 = a2 * a2;
    let q = 11.0 * a2 - 5.0 * a4 - 1.0;
    let s32 = s * s.sqrt();
    let zi = 1.0 / z;
    let z2m1 = z * z - 1.0;
    let first = z / ((z - zi) * (z - zi)) * (1.0 / (z2m1 * z2m1) - 5.0 * a2 / q * zi.powu(4));
    let rest = 5.0 * a2 / (s32 * (1.0 - 11.0 * a2)) * zi * zi + a3 / s32 * (z + zi) * (z + zi) * zi * zi
        - a3 / s32 * (z + zi) * zi
        - a2 * s.sqrt() / q * zi * zi;
    Ok(first + rest)
}

/// Three-point log-log slopes of `|f(1 + eps)|` over the given epsilons.
pub fn divergence_slopes(f: impl Fn(C) -> Result<C, LoopError>, eps: &[f64]) -> Result<Vec<f64>, LoopError> {
    let mut logs = Vec::with_capacity(eps.len());
    for &e in eps {
        logs.push((e.ln(), f(c(1.0 + e))?.norm().ln()));
    }
    Ok(logs.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(a2: f64) -> SpectralFrame {
        SpectralFrame::from_alpha_sq(a2).unwrap()
    }

    #[test]
    fn lo_resolvent() {
        let f = frame(-0.5);
        let x = f.x_of_z(c(2.0));
        let (w, _) = resolvent_lo(&f, x).unwrap();
        assert!((w - c(1.5f64.sqrt() / 2.0)).norm() < 1e-14);
        let far = c(1e6);
        assert!((resolvent_lo(&f, far).unwrap().0 * far - 1.0).norm() < 1e-6);
        let g = frame(0.0);
        let x = c(3.0);
        let semicircle = (x - (x * x - 4.0).sqrt()) / 2.0;
        assert!((resolvent_lo(&g, x).unwrap().0 - semicircle).norm() < 1e-14);
        assert!(matches!(resolvent_lo(&g, c(1.0)), Err(LoopError::OnCut(_))));
    }

    #[test]
    fn disc_equation_holds() {
        let f = frame(-0.3);
        let samples: Vec<C> = (0..50).map(|k| C::from_polar(3.0 + k as f64 * 0.1, 0.3 * k as f64)).collect();
        assert!(disc_residual(&f, &samples).unwrap() < 1e-12);
        let x = c(4.0);
        let (w, _) = resolvent_lo(&f, x).unwrap();
        let eps = 1e-7;
        let expect = (2.0 * w - f.s() * x).norm() * eps;
        assert!((disc_equation(&f, x, w + eps) - expect).abs() < 1e-3 * expect);
    }

    #[test]
    fn two_point() {
        let f = frame(-0.4);
        let v = two_point_resolvent_lo(&frame(0.0), 3, c(2.0), c(3.0)).unwrap();
        assert!((v - c(1.0 / 25.0)).norm() < 1e-15);
        let (z1, z2) = (C::new(1.5, 0.3), C::new(-2.0, 0.7));
        let a = two_point_resolvent_lo(&f, 4, z1, z2).unwrap();
        let b = two_point_resolvent_lo(&f, 4, z2, z1).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert!(two_point_resolvent_lo(&f, 3, c(2.0), c(0.5)).is_err());
    }

    #[test]
    fn half_order() {
        let f = frame(-0.3);
        let tail = half_tail_by_contour(&f, 2.0, 256).unwrap();
        assert!((tail - half_tail_coefficient(&f).unwrap()).norm() < 1e-12);
        for z in [C::new(1.3, 0.4), c(-2.5), C::new(0.2, 1.9)] {
            assert!((omega_half_d3(&f, z).unwrap() - omega_half_d3_simplified(&f, z)).norm() < 1e-12);
        }
        for sign in [1.0, -1.0] {
            let (values, limit) = branch_point_values(&f, sign).unwrap();
            assert!(values.iter().all(|v| (v - limit).norm() < 1e-3 * limit.norm()), "{values:?} vs {limit}");
        }
        assert!(resolvent_half_d3(&frame(-1e-12), c(3.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn d6_form() {
        let f = frame(-0.2);
        let big = omega1_d6(&f, c(1e4)).unwrap().norm();
        assert!(big < 1e-6);
        let slopes = divergence_slopes(|z| omega1_d6(&f, z), &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(slopes.iter().all(|s| (s + 4.0).abs() < 0.1), "{slopes:?}");
    }
}
