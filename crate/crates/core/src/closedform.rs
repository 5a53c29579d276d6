//! Closed-form costs for the phase damping family under the uniform prior
//! on `[0, π/2]`, used as an oracle for the numerical pipeline.
//!
//! All costs are in radians².

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matlin::ComplexMatrix;
use crate::scalar::Real;

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma.to_f64_lossy(),
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(())
}

/// Minimum cost on `B`: `π²/48 − γ(1−γ)(π−4)²/(π²−4)`.
pub fn cb_min<T: Real>(gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let pi = T::PI();
    let p2 = pi * pi;
    let d = pi - T::lit(4.0);
    Ok(p2 / T::lit(48.0) - gamma * (T::one() - gamma) * d * d / (p2 - T::lit(4.0)))
}

/// The rational form `[π²(π+2) − 48γ(1−γ)(π−2)] / [48(π+2)]` as commonly
/// quoted. It agrees with [`cb_min`] only at `γ ∈ {0, 1}`.
pub fn cb_min_as_printed<T: Real>(gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let pi = T::PI();
    let two = T::lit(2.0);
    let g = gamma * (T::one() - gamma);
    Ok((pi * pi * (pi + two) - T::lit(48.0) * g * (pi - two)) / (T::lit(48.0) * (pi + two)))
}

/// Minimum cost on `F`.
pub fn cf_min<T: Real>(gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let pi = T::PI();
    let p2 = pi * pi;
    let p4 = p2 * p2;
    let p6 = p4 * p2;
    let one = T::one();
    let q = one - gamma;
    let num = (T::lit(48.0) * p2 + T::lit(4.0) * p4 - T::lit(192.0) * q * q) * q - p6 * (one + gamma);
    let den = T::lit(48.0) * p2 * (T::lit(4.0) - p2 - T::lit(4.0) * gamma - p2 * gamma);
    Ok(num / den)
}

/// Unclamped `C̄_F − C̄_B` in factored form.
pub fn pe_difference<T: Real>(gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let pi = T::PI();
    let p = |k: i32| pi.powi(k);
    let l = T::lit;
    let g = gamma;
    let pref = (T::one() - g) / (p(2) * (p(2) - l(4.0)) * (p(2) * g + l(4.0) * g + p(2) - l(4.0)));
    let c2 = p(6) - l(8.0) * p(5) + l(20.0) * p(4) - l(32.0) * p(3) + l(68.0) * p(2) - l(16.0);
    let c1 = p(6) - l(8.0) * p(5) + l(12.0) * p(4) + l(32.0) * p(3) - l(72.0) * p(2) + l(32.0);
    let c0 = p(4) - l(8.0) * p(2) + l(16.0);
    Ok(pref * (c2 * g * g + c1 * g - c0))
}

/// Privacy `max{C̄_F − C̄_B, 0}`.
pub fn pe<T: Real>(gamma: T) -> Result<T> {
    Ok(pe_difference(gamma)?.max(T::zero()))
}

/// Lower end of the privacy interval `(γ₀, 1)`.
pub fn gamma0<T: Real>() -> T {
    let pi = T::PI();
    let p = |k: i32| pi.powi(k);
    let l = T::lit;
    let d = pi - l(4.0);
    let root = (p(2) * (p(2) - l(8.0) * pi + l(20.0)) * d * d + l(16.0)).sqrt();
    let num = pi * root - d * d * p(2) + l(8.0);
    let den = l(2.0) * p(2) * (p(4) - l(8.0) * p(3) + l(20.0) * p(2) - l(32.0) * pi + l(68.0)) - l(32.0);
    (p(2) - l(4.0)) * num / den
}

/// Cubic coefficients `(a, b, c, d)` of the stationarity condition of the privacy.
pub fn gamma_star_coefficients<T: Real>() -> (T, T, T, T) {
    let pi = T::PI();
    let p = |k: i32| pi.powi(k);
    let l = T::lit;
    let a =
        l(2.0) * (p(2) + l(4.0)) * (l(-16.0) + l(68.0) * p(2) - l(32.0) * p(3) + l(20.0) * p(4) - l(8.0) * p(5) + p(6));
    let b = l(384.0) - l(1376.0) * p(2) + l(640.0) * p(3) - l(208.0) * p(4) + l(64.0) * p(5) + l(40.0) * p(6)
        - l(24.0) * p(7)
        + l(3.0) * p(8);
    let c = l(8.0) * (p(2) - l(4.0)) * (l(12.0) - l(35.0) * p(2) + l(16.0) * p(3) - l(2.0) * p(4));
    let d = (p(2) - l(4.0)).powi(2) * (l(8.0) - l(18.0) * p(2) + l(8.0) * p(3) - p(4));
    (a, b, c, d)
}

/// `Θ`, using the real cube root.
pub fn theta<T: Real>() -> T {
    let (a, b, c, d) = gamma_star_coefficients::<T>();
    let l = T::lit;
    let q = l(27.0) * a * a * d - l(9.0) * a * b * c + l(2.0) * b * b * b;
    let disc = b * b - l(3.0) * a * c;
    let radicand = q * q - l(4.0) * disc * disc * disc;
    (radicand.max(T::zero()).sqrt() - q).cbrt()
}

/// Maximizer of the privacy on `[0, 1]`.
pub fn gamma_star<T: Real>() -> T {
    let (a, b, c, _) = gamma_star_coefficients::<T>();
    let t = theta::<T>();
    let l = T::lit;
    let c1 = l(2.0).cbrt();
    let c2 = c1 * c1;
    (t * t - c1 * b * t + c2 * (b * b - l(3.0) * a * c)) / (c1 * l(3.0) * a * t)
}

/// Cooperative minimum at `γ = 0`: `(π⁴ − 48)/(48π²)`.
pub fn coop_min_at_zero<T: Real>() -> T {
    let p2 = T::PI() * T::PI();
    (p2 * p2 - T::lit(48.0)) / (T::lit(48.0) * p2)
}

/// Optimal estimator on `B` at phase `φ = 0`.
pub fn sb_opt<T: Real>(gamma: T) -> Result<ComplexMatrix<T>> {
    check_gamma(gamma)?;
    let pi = T::PI();
    let l = T::lit;
    let p3 = pi * pi * pi;
    let scale = T::one() / (l(4.0) * (pi * pi - l(4.0)));
    let slope = l(32.0) - l(8.0) * pi;
    let d0 = l(32.0) + p3 - l(12.0) * pi - slope * gamma;
    let d1 = p3 - l(4.0) * pi + slope * gamma;
    let off = l(4.0) * pi * (pi - l(4.0)) * ((T::one() - gamma) * gamma).sqrt();
    Ok(ComplexMatrix::from_real(2, 2, &[d0, off, off, d1])
        .expect("finite entries")
        .scale_complex(Complex::new(scale, T::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn endpoint_values() {
        assert_relative_eq!(cb_min(0.0).unwrap(), PI * PI / 48.0, epsilon = 1e-15);
        assert_relative_eq!(cb_min(1.0).unwrap(), PI * PI / 48.0, epsilon = 1e-15);
        assert_relative_eq!(cf_min(0.0).unwrap(), 0.104295574713690, epsilon = 1e-14);
        assert_relative_eq!(cf_min(1.0).unwrap(), PI * PI / 48.0, epsilon = 1e-15);
        assert_relative_eq!(cb_min_as_printed(0.5).unwrap(), 0.150109023180200, epsilon = 1e-14);
        assert_relative_eq!(coop_min_at_zero::<f64>(), cf_min(0.0).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn cb_symmetric_and_minimal_at_half() {
        for k in 0..=100 {
            let g = k as f64 / 100.0;
            assert_relative_eq!(cb_min(g).unwrap(), cb_min(1.0 - g).unwrap(), epsilon = 1e-15);
            assert!(cb_min(g).unwrap() >= cb_min(0.5).unwrap());
        }
    }

    #[test]
    fn factored_privacy_matches_difference() {
        for k in 0..=100 {
            let g = k as f64 / 100.0;
            let diff = cf_min(g).unwrap() - cb_min(g).unwrap();
            assert!((pe_difference(g).unwrap() - diff).abs() < 1e-12, "gamma {g}");
        }
    }

    #[test]
    fn gamma0_and_gamma_star() {
        let g0 = gamma0::<f64>();
        let gs = gamma_star::<f64>();
        assert!((g0 - 0.54).abs() < 0.005);
        assert!((gs - 0.77).abs() < 0.005);
        assert!(pe_difference(g0).unwrap().abs() < 1e-12);
        assert!(pe(g0 + 1e-6).unwrap() > 0.0);
        let h = 1e-5;
        let slope = (pe(gs + h).unwrap() - pe(gs - h).unwrap()) / (2.0 * h);
        assert!(slope.abs() < 1e-8);
    }

    #[test]
    fn cf_monotone() {
        let mut prev = cf_min(0.0).unwrap();
        for k in 1..=100 {
            let v = cf_min(k as f64 / 100.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn sb_opt_at_half() {
        let s = sb_opt(0.5).unwrap();
        let diag = (16.0 - 8.0 * PI + PI.powi(3)) / (4.0 * (PI * PI - 4.0));
        assert_relative_eq!(s[(0, 0)].re, diag, epsilon = 1e-14);
        assert_relative_eq!(s[(1, 1)].re, diag, epsilon = 1e-14);
        assert_relative_eq!(s[(0, 1)].re, (PI - 4.0) * PI / (2.0 * (PI * PI - 4.0)), epsilon = 1e-14);
        assert_eq!(s.hermitian_check(0.0).max_asymmetry, 0.0);
    }

    #[test]
    fn gamma_out_of_range() {
        assert!(cb_min(-0.1).is_err());
        assert!(cf_min(1.5).is_err());
        assert!(pe(f64::NAN).is_err());
        assert!(sb_opt(2.0).is_err());
    }

    #[test]
    fn f32_evaluation() {
        assert!((cb_min(0.5f32).unwrap() - 0.174232).abs() < 1e-5);
        assert!((gamma0::<f32>() - 0.5438).abs() < 1e-3);
    }
}
