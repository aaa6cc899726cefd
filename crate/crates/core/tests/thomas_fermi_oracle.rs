//! Cross-check of the grid TF atom against an independent shooting solution
//! of the dimensionless equation `φ'' = φ^{3/2}/√x`, `φ(0) = 1`, `φ(∞) = 0`.

use rtfw_core::thomas_fermi_atom::{e_tf, solve_tf_atom, TfGridConfig};

/// Integrates in `u = √x`, where the system `φ_u = 2u·φ'`, `φ'_u = 2φ^{3/2}`
/// is smooth at the origin. Returns `Some(true)` if `φ` crosses zero (slope
/// too steep), `Some(false)` if `φ'` turns positive (too shallow).
fn overshoots(slope: f64) -> Option<bool> {
    let h = 1e-3;
    let rhs = |u: f64, y: [f64; 2]| [2.0 * u * y[1], 2.0 * y[0].max(0.0).powf(1.5)];
    let mut y = [1.0, slope];
    let mut u = 0.0;
    while u < 60.0 {
        let k1 = rhs(u, y);
        let k2 = rhs(u + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(u + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(u + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        u += h;
        if y[0] < 0.0 {
            return Some(true);
        }
        if y[1] > 0.0 {
            return Some(false);
        }
    }
    None
}

fn shooting_slope() -> f64 {
    let (mut lo, mut hi) = (-2.0, -1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match overshoots(mid) {
            Some(true) => lo = mid,
            Some(false) => hi = mid,
            None => break,
        }
    }
    0.5 * (lo + hi)
}

/// `e_TF(γ=1, Z=1) = (12/7)(2π²)^{1/3}|φ'(0)|` from the scaling of the TF equation.
fn shooting_e_tf() -> f64 {
    let two_pi_sq = 2.0 * std::f64::consts::PI.powi(2);
    12.0 / 7.0 * two_pi_sq.cbrt() * shooting_slope().abs()
}

#[test]
fn shooting_slope_is_classical() {
    let b = shooting_slope();
    assert!((b + 1.588_071).abs() < 1e-6, "slope {b}");
}

#[test]
fn grid_minimum_matches_shooting() {
    let grid = e_tf().unwrap();
    let oracle = shooting_e_tf();
    assert!(((grid - oracle) / oracle).abs() < 1e-6, "grid {grid}, shooting {oracle}");
}

#[test]
fn slope_at_nucleus_matches_shooting() {
    // w(r) = φ(r/b) with b = (4π·2^{3/2})^{-2/3}, so w'(0) = φ'(0)/b.
    let b = (4.0 * std::f64::consts::PI * 2f64.powf(1.5)).powf(-2.0 / 3.0);
    let s = solve_tf_atom(TfGridConfig::default()).unwrap();
    let oracle = shooting_slope() / b;
    assert!(((s.slope_at_origin - oracle) / oracle).abs() < 1e-3);
}
