//! Scalar special functions of the relativistic TFW functional.
//!
//! All arguments are dimensionless Fermi momenta (units of `mc`); energies
//! are in units of `mc²`.
//!
//! | symbol | function |
//! |--------|----------|
//! | `f(t)` | [`weizsacker_factor`] |
//! | `F(t) = ∫₀ᵗ f` | [`chi_of_p`] (tabulated), [`chi_of_p_direct`] (quadrature) |
//! | `F⁻¹(y)` | [`p_of_chi`] |
//! | `t^TF(s)` | [`tf_kinetic`] |
//! | `H(s) = F(s)/(s f(s))` | [`h_ratio`] |
//! | `g(s)` | [`g_function`] |

mod appendix;
mod h_analysis;
mod table;

pub use appendix::{appendix_bounds_report, phase_space_report, AppendixReport, InequalityTally};
pub use h_analysis::{min_g, minimize_h, minimize_h_with, GMinimum, HAnalysisResult};
pub use table::{table, SpecialFunctionTable, TableConfig, CACHE_DIR_ENV};

use crate::error::{check_nonneg, check_pos, Result};
use crate::quadrature::{integrate, QuadOptions};

/// `f(t) = sqrt(t/√(t²+1) + 2t²/(t²+1)·arsinh t)`, the factor multiplying
/// `|∇p|` in the Weizsäcker term.
pub fn weizsacker_factor(t: f64) -> Result<f64> {
    check_nonneg("weizsacker_factor", t)?;
    Ok(weizsacker_factor_unchecked(t))
}

#[inline]
pub(crate) fn weizsacker_factor_unchecked(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let ratio = t / t.hypot(1.0);
    (ratio + 2.0 * ratio * ratio * t.asinh()).sqrt()
}

// Below this momentum F and F' come from their power series.
pub(crate) const SERIES_LIMIT: f64 = 1e-4;

/// `F(t)` for small `t`: `(2/3)t^{3/2} + (3/14)t^{7/2} − (11/48)t^{11/2}`.
#[inline]
pub(crate) fn chi_series(t: f64) -> f64 {
    let t2 = t * t;
    t * t.sqrt() * (2.0 / 3.0 + t2 * (3.0 / 14.0 - t2 * (11.0 / 48.0)))
}

/// `f(t)` from the same series, `√t(1 + (3/4)t² − (121/96)t⁴)`.
#[inline]
pub(crate) fn factor_series(t: f64) -> f64 {
    let t2 = t * t;
    t.sqrt() * (1.0 + t2 * (0.75 - t2 * (121.0 / 96.0)))
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-14,
        max_intervals: 4000,
    }
}

/// `∫ₐᵇ f(s) ds` for `0 < a ≤ b`, integrated in `ln s`.
pub(crate) fn integrate_factor_log(a: f64, b: f64) -> Result<f64> {
    let (la, lb) = (a.ln(), b.ln());
    Ok(integrate(
        |v| {
            let s = v.exp();
            s * weizsacker_factor_unchecked(s)
        },
        la,
        lb,
        quad_opts(),
    )?
    .value)
}

/// `∫ₐᵇ f(s) ds` for `0 ≤ a ≤ b ≤ 1`, integrated in `u = √s` where the
/// integrand `2u·f(u²)` is analytic.
pub(crate) fn integrate_factor_sqrt(a: f64, b: f64) -> Result<f64> {
    Ok(integrate(
        |u| 2.0 * u * weizsacker_factor_unchecked(u * u),
        a.sqrt(),
        b.sqrt(),
        quad_opts(),
    )?
    .value)
}

/// `F(t)` by adaptive Gauss–Kronrod quadrature, independent of the table.
pub fn chi_of_p_direct(t: f64) -> Result<f64> {
    check_nonneg("chi_of_p_direct", t)?;
    if t <= 1.0 {
        integrate_factor_sqrt(0.0, t)
    } else {
        Ok(integrate_factor_sqrt(0.0, 1.0)? + integrate_factor_log(1.0, t)?)
    }
}

/// `F(t) = ∫₀ᵗ f(s) ds` via the cached table. Maps the Fermi momentum `p`
/// to the field variable `χ = F(p)`.
pub fn chi_of_p(t: f64) -> Result<f64> {
    check_nonneg("chi_of_p", t)?;
    Ok(table().eval(t))
}

/// `F⁻¹(y)`: the Fermi momentum whose `χ` value is `y`.
pub fn p_of_chi(y: f64) -> Result<f64> {
    check_nonneg("p_of_chi", y)?;
    Ok(table().inverse(y))
}

/// Upper bound on `F⁻¹(y)` from `F > G`: `2y^{2/3}(y+1)^{1/3}`.
pub fn inverse_upper_bound(y: f64) -> f64 {
    2.0 * y.powf(2.0 / 3.0) * (y + 1.0).cbrt()
}

// Switch point between the power series and the closed form of t^TF. The
// closed form loses about log10(1/s⁴) digits, so the series covers s < 0.5.
const TF_SERIES_LIMIT: f64 = 0.5;

/// Relativistic Thomas–Fermi kinetic energy density (rest mass removed),
/// `t^TF(s) = s(s²+1)^{3/2} + s³(s²+1)^{1/2} − arsinh s − (8/3)s³`.
pub fn tf_kinetic(s: f64) -> Result<f64> {
    check_nonneg("tf_kinetic", s)?;
    Ok(tf_kinetic_unchecked(s))
}

#[inline]
pub(crate) fn tf_kinetic_unchecked(s: f64) -> f64 {
    if s < TF_SERIES_LIMIT {
        tf_kinetic_series(s)
    } else {
        let q = s.hypot(1.0);
        s * q * (2.0 * s * s + 1.0) - s.asinh() - (8.0 / 3.0) * s * s * s
    }
}

/// `t^TF(s) = 8 Σ_{k≥1} binom(1/2, k) s^{2k+3}/(2k+3)`, the integral of the
/// expansion of `8u²(√(u²+1) − 1)`.
fn tf_kinetic_series(s: f64) -> f64 {
    let s2 = s * s;
    let mut binom = 0.5;
    let mut power = s2 * s2 * s;
    let mut sum = 0.0;
    for k in 1..200 {
        let term = binom * power / (2 * k + 3) as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        power *= s2;
    }
    8.0 * sum
}

/// `dt^TF/ds = 8s²(√(s²+1) − 1) = 8s⁴/(√(s²+1) + 1)`.
pub fn tf_kinetic_derivative(s: f64) -> Result<f64> {
    check_nonneg("tf_kinetic_derivative", s)?;
    Ok(tf_kinetic_derivative_unchecked(s))
}

#[inline]
pub(crate) fn tf_kinetic_derivative_unchecked(s: f64) -> f64 {
    let s2 = s * s;
    8.0 * s2 * s2 / (s.hypot(1.0) + 1.0)
}

/// `H(s) = F(s)/(s·f(s))`; takes values in `(0, 1)`.
pub fn h_ratio(s: f64) -> Result<f64> {
    check_pos("h_ratio", s)?;
    Ok(table().eval(s) / (s * weizsacker_factor_unchecked(s)))
}

/// `(f(s)/s²)'` in closed form:
/// `−((2s²+3)√(s²+1) + 4(2s²+1)s·arsinh s) / (2s^{5/2}(s²+1)^{3/2}√(√(s²+1) + 2s·arsinh s))`.
pub fn factor_over_square_derivative(s: f64) -> Result<f64> {
    check_pos("factor_over_square_derivative", s)?;
    let q = s.hypot(1.0);
    let a = s.asinh();
    let s2 = s * s;
    let num = (2.0 * s2 + 3.0) * q + 4.0 * (2.0 * s2 + 1.0) * s * a;
    let den = 2.0 * s2 * s.sqrt() * q * q * q * (q + 2.0 * s * a).sqrt();
    Ok(-num / den)
}

/// `g(s) = −(f/s²)'·f / (f²/s²)²`, positive with `g(0⁺) = 3/2` and
/// `g(s) → ∞` as `s → ∞`.
pub fn g_function(s: f64) -> Result<f64> {
    check_pos("g_function", s)?;
    let f = weizsacker_factor_unchecked(s);
    let d = factor_over_square_derivative(s)?;
    let f2_over_s2 = f * f / (s * s);
    Ok(-d * f / (f2_over_s2 * f2_over_s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factor_reference_values() {
        assert_eq!(weizsacker_factor(0.0).unwrap(), 0.0);
        // f(1)² = 1/√2 + ln(1+√2)
        let oracle = (std::f64::consts::FRAC_1_SQRT_2 + (1.0 + 2f64.sqrt()).ln()).sqrt();
        assert!(rel(weizsacker_factor(1.0).unwrap(), oracle) < 1e-15);
        assert!((weizsacker_factor(1.0).unwrap() - 1.260_349_304).abs() < 5e-10);
        for t in [0.1, 1.0, 10.0, 100.0] {
            assert!(weizsacker_factor(t).unwrap() >= t.asinh().sqrt());
        }
    }

    #[test]
    fn domain_errors() {
        assert!(weizsacker_factor(-1.0).is_err());
        assert!(weizsacker_factor(f64::NAN).is_err());
        assert!(chi_of_p(-1e-3).is_err());
        assert!(p_of_chi(-2.0).is_err());
        assert!(tf_kinetic(-0.5).is_err());
        assert!(h_ratio(0.0).is_err());
        assert!(g_function(-1.0).is_err());
    }

    #[test]
    fn series_match_quadrature_below_switch() {
        for t in [1e-7, 1e-5, SERIES_LIMIT] {
            let direct = integrate_factor_sqrt(0.0, t).unwrap();
            assert!(rel(chi_series(t), direct) < 1e-14, "t = {t}");
            assert!(rel(factor_series(t), weizsacker_factor_unchecked(t)) < 1e-14);
        }
    }

    #[test]
    fn chi_reference_bounds() {
        let v = chi_of_p(1.0).unwrap();
        assert!(v > 0.5 * 1f64.asinh().sqrt() && v < weizsacker_factor(1.0).unwrap());
        assert_eq!(chi_of_p(0.0).unwrap(), 0.0);
        for t in [1e-3, 1.0, 1e3] {
            assert!(chi_of_p(t).unwrap() > t.powf(1.5) / (2.0 * (1.0 + t).sqrt()));
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p_of_chi(0.0).unwrap(), 0.0);
        let y = chi_of_p(2.5).unwrap();
        assert!(rel(p_of_chi(y).unwrap(), 2.5) < 1e-9);
        for y in [0.01, 1.0, 100.0] {
            assert!(p_of_chi(y).unwrap() < inverse_upper_bound(y));
        }
    }

    #[test]
    fn tf_kinetic_reference_values() {
        assert_eq!(tf_kinetic(0.0).unwrap(), 0.0);
        let oracle = 3.0 * 2f64.sqrt() - (1.0 + 2f64.sqrt()).ln() - 8.0 / 3.0;
        assert!(rel(tf_kinetic(1.0).unwrap(), oracle) < 1e-14);
        assert!((tf_kinetic(1.0).unwrap() - 0.694_600).abs() < 5e-7);
        let s = 1e-3;
        assert!(rel(tf_kinetic(s).unwrap() / s.powi(5), 0.8) < 1e-4);
    }

    #[test]
    fn tf_series_and_closed_form_agree_at_switch() {
        let s = TF_SERIES_LIMIT;
        let q = s.hypot(1.0);
        let closed = s * q * (2.0 * s * s + 1.0) - s.asinh() - (8.0 / 3.0) * s * s * s;
        assert!(rel(tf_kinetic_series(s), closed) < 1e-13);
        let s: f64 = 0.3;
        let q = s.hypot(1.0);
        let closed = s * q * (2.0 * s * s + 1.0) - s.asinh() - (8.0 / 3.0) * s * s * s;
        assert!(rel(tf_kinetic_series(s), closed) < 1e-12);
    }

    #[test]
    fn tf_derivative_matches_central_difference() {
        for s in [0.05_f64, 0.4, 0.5, 0.9, 3.0, 40.0] {
            let h = 1e-5 * s;
            let fd = (tf_kinetic_unchecked(s + h) - tf_kinetic_unchecked(s - h)) / (2.0 * h);
            assert!(rel(fd, tf_kinetic_derivative_unchecked(s)) < 1e-7, "s = {s}");
        }
    }

    #[test]
    fn h_limits() {
        assert!((h_ratio(1e-6).unwrap() - 2.0 / 3.0).abs() < 1e-3);
        for s in [0.1, 1.0, 10.0] {
            let h = h_ratio(s).unwrap();
            assert!(h > 0.0 && h < 1.0);
        }
        // 1 − H(s) ≈ 1/f(s)² for large s, so H tends to 1 only logarithmically.
        let s = 1e8;
        let f = weizsacker_factor_unchecked(s);
        let h = h_ratio(s).unwrap();
        assert!(h > 0.97 && h < 1.0);
        assert!(rel(1.0 - h, 1.0 / (f * f)) < 0.05);
    }

    #[test]
    fn closed_form_derivative_matches_finite_difference() {
        let ratio = |s: f64| weizsacker_factor_unchecked(s) / (s * s);
        for s in [1e-3, 0.2, 1.0, 7.0, 300.0] {
            let h = 1e-6 * s;
            let fd = (ratio(s + h) - ratio(s - h)) / (2.0 * h);
            let exact = factor_over_square_derivative(s).unwrap();
            assert!(rel(fd, exact) < 1e-6, "s = {s}: {fd} vs {exact}");
        }
    }

    #[test]
    fn g_limits_and_simplified_form() {
        assert!((g_function(1e-6).unwrap() - 1.5).abs() < 1e-3);
        assert!(g_function(1e6).unwrap() > 10.0);
        // Simplified algebraic form: ((2s²+3)q + 4s(2s²+1)A) / (2(q + 2sA)²).
        for s in [1e-4, 0.3, 2.0, 50.0] {
            let q = f64::hypot(s, 1.0);
            let a = s.asinh();
            let alt = ((2.0 * s * s + 3.0) * q + 4.0 * s * (2.0 * s * s + 1.0) * a)
                / (2.0 * (q + 2.0 * s * a).powi(2));
            assert!(rel(g_function(s).unwrap(), alt) < 1e-12);
        }
    }
}
