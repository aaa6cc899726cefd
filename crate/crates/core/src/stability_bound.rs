//! Explicit lower bound `inf E ≥ −N − C(A)` on the relativistic TFW energy.
//!
//! The chain: TF lower bound (Teller constant `A`), Sobolev inequality for
//! the Weizsäcker term, splitting of `∫p⁵` at the cutoff radius `R_β`, and
//! minimization of `aT − b√T`. The selected radius grows like
//! `exp(c·A^{2/3})`, so all large quantities are carried as logarithms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_pos, domain, Result};
use crate::special_functions::minimize_h;
use crate::thomas_fermi_atom::e_tf;

/// Sharp Sobolev constant in `‖∇u‖₂² ≥ c_s‖u‖₆²` on R³, `3(π/2)^{4/3}`.
pub fn sobolev_constant() -> f64 {
    3.0 * (PI / 2.0).powf(4.0 / 3.0)
}

/// Coefficient of `T(p) = ∫p⁴` in the massless TF lower bound, `1/(4π²)`.
pub fn kinetic_coefficient() -> f64 {
    1.0 / (4.0 * PI * PI)
}

/// `(A, e_TF)` with `A = e_TF·Σ Z_k^{7/3}`.
pub fn teller_constant(z_list: &[f64]) -> Result<(f64, f64)> {
    if let Some(z) = z_list.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
        return Err(domain("teller_constant", format!("nuclear charges must be finite and >= 0, got {z}")));
    }
    let e = e_tf()?;
    let sum: f64 = z_list.iter().map(|z| z.powf(7.0 / 3.0)).sum();
    Ok((e * sum, e))
}

/// The left side of the β condition, `min{λc_s/(8π²), 1/π²}`.
pub fn coupling_level(lambda: f64) -> f64 {
    (lambda * sobolev_constant() / (8.0 * PI * PI)).min(1.0 / (PI * PI))
}

/// Chosen `β` and its radius `R_β`, with logarithms for overflow-free use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSelection {
    /// `min{λc_s/(8π²), 1/π²}`.
    pub level: f64,
    pub arsinh_r_beta: f64,
    pub ln_r_beta: f64,
    pub ln_beta: f64,
    /// `exp(ln_r_beta)`; may be `+∞` for large `A`.
    pub r_beta: f64,
    pub beta: f64,
    /// Relative residual of `level = √(3A/(5√(2·arsinh(R_β)³)))`.
    pub residual: f64,
}

/// `ln sinh(a)` for `a > 0` without overflow.
fn ln_sinh(a: f64) -> f64 {
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-(-2.0 * a).exp()).ln_1p()
    } else {
        a.sinh().ln()
    }
}

/// `ln √(1+R²)` from `ln R`.
fn ln_hypot_one(ln_r: f64) -> f64 {
    if ln_r > 20.0 {
        ln_r + 0.5 * (-2.0 * ln_r).exp()
    } else {
        0.5 * (2.0 * ln_r).exp().ln_1p()
    }
}

/// Solves `min{λc_s/(8π²), 1/π²} = √(3A/(5√(2·arsinh(R_β)³)))`.
///
/// The right side is a strictly decreasing function of `arsinh(R_β)` alone,
/// so the equation is solved in closed form,
/// `arsinh(R_β)³ = (3A/(5L²))²/2`; `β` follows from `F_β'(R_β) = 0`, i.e.
/// `1/β = 1/(R²a³) + 3/(R a⁴ √(1+R²))`.
pub fn select_beta(lambda: f64, a_teller: f64) -> Result<BetaSelection> {
    check_pos("select_beta", lambda)?;
    check_pos("select_beta", a_teller)?;
    let level = coupling_level(lambda);
    let ratio = 3.0 * a_teller / (5.0 * level * level);
    let a = (0.5 * ratio * ratio).cbrt();
    let ln_r = ln_sinh(a);
    let ln_q = ln_hypot_one(ln_r);
    // ln(1/β) = ln(1 + 3R/(a q)) − 2 ln R − 3 ln a
    let r_over_q = (ln_r - ln_q).exp();
    let ln_inv_beta = (3.0 * r_over_q / a).ln_1p() - 2.0 * ln_r - 3.0 * a.ln();
    let rhs = (3.0 * a_teller / (5.0 * (2.0 * a * a * a).sqrt())).sqrt();
    Ok(BetaSelection {
        level,
        arsinh_r_beta: a,
        ln_r_beta: ln_r,
        ln_beta: -ln_inv_beta,
        r_beta: ln_r.exp(),
        beta: (-ln_inv_beta).exp(),
        residual: ((rhs - level) / level).abs(),
    })
}

/// Corollary form of the bound, uniform in `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformBound {
    /// `e_TF·Z_∞^{7/3}·K`, the largest Teller constant allowed.
    pub a_max: f64,
    /// Largest particle number a minimizer can carry, `(2/√a)·Z_∞·K`.
    pub n_max: f64,
    pub c_of_a_max: f64,
    pub log10_c_of_a_max: f64,
    /// `d = n_max + C(a_max)`; `inf E ≥ −d` for every `N`.
    pub d: f64,
    pub log10_d: f64,
}

/// All constants of the stability chain for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub lambda: f64,
    pub alpha_s: f64,
    pub particle_number: f64,
    #[serde(rename = "A")]
    pub a_teller: f64,
    pub e_tf: f64,
    pub c_s: f64,
    /// `None` when `A = 0` (no attraction; `C = 0`).
    pub beta: Option<BetaSelection>,
    /// Coefficients of `W^{1/3}` and `T` in the first case after inserting
    /// the attraction bound; both are nonnegative for `α_S ≤ 1/2`.
    pub case1_w_coefficient: f64,
    pub case1_t_coefficient: f64,
    /// Coefficient of `T` in the second case.
    pub c_t: f64,
    /// Coefficient of `√T` in the second case.
    pub sqrt_coefficient: f64,
    pub log10_sqrt_coefficient: f64,
    /// `C(A) = b²/(4c_T)`; `+∞` once it exceeds the floating-point range.
    pub c_of_a: f64,
    pub log10_c_of_a: f64,
    /// `−N − C(A)`.
    pub lower_bound: f64,
    pub uniform: Option<UniformBound>,
}

/// `ln C(A)` and `ln b` for a given `β` selection (`A > 0`).
fn log_constant(alpha_s: f64, a_teller: f64, sel: &BetaSelection) -> (f64, f64) {
    // b = 2α_S·√((3/2)·A·4^{-4/5}·(β R³/arsinh(R)³)^{1/5})
    let a = sel.arsinh_r_beta;
    let ln_ratio = sel.ln_beta + 3.0 * sel.ln_r_beta - 3.0 * a.ln();
    let ln_b = (2.0 * alpha_s).ln() + 0.5 * (1.5f64.ln() + a_teller.ln() - 0.8 * 4f64.ln() + 0.2 * ln_ratio);
    let ln_c = 2.0 * ln_b - (4.0 * kinetic_coefficient()).ln();
    (ln_c, ln_b)
}

/// `C(A)` at coupling `λ` and fine-structure constant `α_S`, as `(C, log10 C)`.
pub fn constant_of_a(lambda: f64, alpha_s: f64, a_teller: f64) -> Result<(f64, f64)> {
    check_pos("constant_of_a", alpha_s)?;
    if a_teller == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    let sel = select_beta(lambda, a_teller)?;
    let (ln_c, _) = log_constant(alpha_s, a_teller, &sel);
    Ok((ln_c.exp(), ln_c / std::f64::consts::LN_10))
}

/// Assembles the bound for charges `z_list` and particle number `n`; with
/// `uniform = Some((z_inf, k))` also the `N`-independent corollary constant.
pub fn stability_constant(
    lambda: f64,
    alpha_s: f64,
    z_list: &[f64],
    n: f64,
    uniform: Option<(f64, usize)>,
) -> Result<StabilityReport> {
    check_pos("stability_constant", lambda)?;
    check_pos("stability_constant", alpha_s)?;
    if !(n.is_finite() && n >= 0.0) {
        return Err(domain("stability_constant", format!("particle number must be >= 0, got {n}")));
    }
    let (a_teller, e) = teller_constant(z_list)?;
    let c_s = sobolev_constant();
    let c_t = kinetic_coefficient();
    let level = coupling_level(lambda);
    let case1_w_coefficient = 3.0 * lambda * c_s / (32.0 * PI * PI) - 1.5 * alpha_s * level;
    let case1_t_coefficient = c_t - 0.5 * alpha_s * level;

    let (beta, ln_c, ln_b) = if a_teller > 0.0 {
        let sel = select_beta(lambda, a_teller)?;
        let (ln_c, ln_b) = log_constant(alpha_s, a_teller, &sel);
        (Some(sel), ln_c, ln_b)
    } else {
        (None, f64::NEG_INFINITY, f64::NEG_INFINITY)
    };
    let c_of_a = ln_c.exp();

    let uniform = match uniform {
        None => None,
        Some((z_inf, k)) => {
            check_pos("stability_constant", z_inf)?;
            if k == 0 {
                return Err(domain("stability_constant", "number of nuclei must be >= 1"));
            }
            if let Some(z) = z_list.iter().find(|z| **z > z_inf) {
                return Err(domain("stability_constant", format!("charge {z} exceeds Z_inf = {z_inf}")));
            }
            let a_max = e * z_inf.powf(7.0 / 3.0) * k as f64;
            let (c_max, log10_c_max) = constant_of_a(lambda, alpha_s, a_max)?;
            let coefficient = 2.0 / minimize_h().a.sqrt();
            let n_max = coefficient * z_inf * k as f64;
            let d = n_max + c_max;
            let log10_d = if c_max.is_finite() {
                d.log10()
            } else {
                log10_c_max
            };
            Some(UniformBound {
                a_max,
                n_max,
                c_of_a_max: c_max,
                log10_c_of_a_max: log10_c_max,
                d,
                log10_d,
            })
        }
    };

    Ok(StabilityReport {
        lambda,
        alpha_s,
        particle_number: n,
        a_teller,
        e_tf: e,
        c_s,
        beta,
        case1_w_coefficient,
        case1_t_coefficient,
        c_t,
        sqrt_coefficient: ln_b.exp(),
        log10_sqrt_coefficient: ln_b / std::f64::consts::LN_10,
        c_of_a,
        log10_c_of_a: ln_c / std::f64::consts::LN_10,
        lower_bound: -n - c_of_a,
        uniform,
    })
}
