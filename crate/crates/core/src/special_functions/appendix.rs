//! Pointwise verification of the bounds on `F`, `f`, `t^TF` and `F⁻¹`.
//!
//! Each inequality is checked through a margin (`lhs − rhs`, expected
//! positive) written in a form free of catastrophic cancellation, so that a
//! true strict inequality is never reported as violated by rounding.

use serde::{Deserialize, Serialize};

use super::{inverse_upper_bound, table, tf_kinetic_unchecked, weizsacker_factor_unchecked};

/// Pass/fail tally for one inequality over a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityTally {
    pub name: String,
    pub statement: String,
    pub points: usize,
    pub failures: usize,
    /// Smallest margin relative to the size of the compared quantities.
    pub worst_relative_margin: f64,
    pub worst_at: f64,
}

impl InequalityTally {
    fn new(name: &str, statement: &str) -> Self {
        Self {
            name: name.to_string(),
            statement: statement.to_string(),
            points: 0,
            failures: 0,
            worst_relative_margin: f64::INFINITY,
            worst_at: f64::NAN,
        }
    }

    fn record(&mut self, at: f64, margin: f64, scale: f64) {
        self.points += 1;
        let relative = margin / scale.abs().max(f64::MIN_POSITIVE);
        if !(margin > 0.0) {
            self.failures += 1;
        }
        if !(relative >= self.worst_relative_margin) {
            self.worst_relative_margin = relative;
            self.worst_at = at;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.points > 0
    }
}

/// Outcome of [`appendix_bounds_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub samples: usize,
    pub inequalities: Vec<InequalityTally>,
    pub total_failures: usize,
}

impl AppendixReport {
    pub fn all_passed(&self) -> bool {
        self.total_failures == 0 && self.inequalities.iter().all(InequalityTally::passed)
    }

    pub fn get(&self, name: &str) -> Option<&InequalityTally> {
        self.inequalities.iter().find(|t| t.name == name)
    }
}

/// `s√(1+s²) − (1−s²)arsinh s`, which has the sign of `f(s)² − arsinh s`.
fn factor_margin_numerator(s: f64) -> f64 {
    if s < 1e-3 {
        let s2 = s * s;
        s2 * s * (5.0 / 3.0 - s2 * (11.0 / 30.0))
    } else {
        s * s.hypot(1.0) - (1.0 - s * s) * s.asinh()
    }
}

/// Lower phase-space margin `t^TF(s) − 2s⁴ + (8/3)s³ ≥ 0`.
pub(crate) fn massless_lower_margin(s: f64) -> f64 {
    if s < 1.0 {
        tf_kinetic_unchecked(s) + s * s * s * (8.0 / 3.0 - 2.0 * s)
    } else {
        // s√(s²+1)(2s²+1) − 2s⁴ = s(8s⁴+5s²+1)/((2s²+1)√(s²+1) + 2s³)
        let s2 = s * s;
        let q = s.hypot(1.0);
        s * (8.0 * s2 * s2 + 5.0 * s2 + 1.0) / ((2.0 * s2 + 1.0) * q + 2.0 * s2 * s) - s.asinh()
    }
}

/// Upper phase-space margin `2s⁴ − t^TF(s) ≥ 0`.
pub(crate) fn massless_upper_margin(s: f64) -> f64 {
    if s < 1.0 {
        2.0 * s.powi(4) - tf_kinetic_unchecked(s)
    } else {
        let s2 = s * s;
        let q = s.hypot(1.0);
        (8.0 / 3.0) * s2 * s + s.asinh()
            - s * (8.0 * s2 * s2 + 5.0 * s2 + 1.0) / ((2.0 * s2 + 1.0) * q + 2.0 * s2 * s)
    }
}

/// Evaluates, at every sample point `s > 0` (also used as `y` for the
/// inverse bound):
///
/// * `a1`: `F(s) > s√(arsinh s)/2`
/// * `a2`: `f(s) > √(arsinh s)`
/// * `a3`: `t^TF(s) > s⁴/(1 + 5/(4s))`
/// * `G`: `s√(arsinh s)/2 > s^{3/2}/(2√(1+s))`
/// * `Ginverse`: `G(2y^{2/3}(y+1)^{1/3}) > y` and `F⁻¹(y) < 2y^{2/3}(y+1)^{1/3}`
/// * `sqrt_arsinh_increasing` / `sqrt_arsinh_concave`: sign of the first and
///   second derivative of `√(arsinh s)`, plus discrete slopes along the sample.
pub fn appendix_bounds_report(sample: &[f64]) -> AppendixReport {
    let mut a1 = InequalityTally::new("a1", "F(s) > s*sqrt(arsinh s)/2");
    let mut a2 = InequalityTally::new("a2", "f(s) > sqrt(arsinh s)");
    let mut a3 = InequalityTally::new("a3", "t_TF(s) > s^4/(1 + 5/(4s))");
    let mut g = InequalityTally::new("G", "s*sqrt(arsinh s)/2 > s^(3/2)/(2*sqrt(1+s))");
    let mut ginv = InequalityTally::new(
        "Ginverse",
        "G(2y^(2/3)(y+1)^(1/3)) > y and F^-1(y) < 2y^(2/3)(y+1)^(1/3)",
    );
    let mut incr = InequalityTally::new("sqrt_arsinh_increasing", "d/ds sqrt(arsinh s) > 0");
    let mut conc = InequalityTally::new("sqrt_arsinh_concave", "d2/ds2 sqrt(arsinh s) < 0");
    let table = table();
    let tilde = |s: f64| s.asinh().sqrt();

    let mut sorted: Vec<f64> = sample.iter().copied().filter(|s| s.is_finite() && *s > 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    for &s in &sorted {
        let asinh = s.asinh();
        let lower = s * asinh.sqrt() / 2.0;
        let chi = table.eval(s);
        a1.record(s, chi - lower, chi);

        let q2 = 1.0 + s * s;
        let f = weizsacker_factor_unchecked(s);
        a2.record(s, factor_margin_numerator(s) / q2, f * f);

        let t = tf_kinetic_unchecked(s);
        let bound = 0.8 * s.powi(5) / (1.0 + 0.8 * s);
        a3.record(s, t - bound, t);

        // s√A/2 > s^{3/2}/(2√(1+s))  ⟺  arsinh s > s/(1+s)
        g.record(s, asinh - s / (1.0 + s), asinh);

        let y = s;
        let x = inverse_upper_bound(y);
        let g_at_x = x * x.sqrt() / (2.0 * (1.0 + x).sqrt());
        let inv = table.inverse(y);
        let margin = (g_at_x - y).min(x - inv);
        ginv.record(y, margin, x.max(y));

        let d1 = 1.0 / (2.0 * (q2 * asinh).sqrt());
        incr.record(s, d1, d1);
        let d2 = -s / (2.0 * (q2 * q2 * q2 * asinh).sqrt()) - 1.0 / (4.0 * q2 * asinh * asinh.sqrt());
        conc.record(s, -d2, d2);
    }

    // Discrete checks along the ordered sample: increasing values and
    // decreasing secant slopes.
    for w in sorted.windows(3) {
        let (y0, y1, y2) = (tilde(w[0]), tilde(w[1]), tilde(w[2]));
        incr.record(w[1], y1 - y0, y1);
        let s01 = (y1 - y0) / (w[1] - w[0]);
        let s12 = (y2 - y1) / (w[2] - w[1]);
        conc.record(w[1], s01 - s12, s01);
    }

    let inequalities = vec![a1, a2, a3, g, ginv, incr, conc];
    let total_failures = inequalities.iter().map(|t| t.failures).sum();
    AppendixReport {
        samples: sorted.len(),
        inequalities,
        total_failures,
    }
}

/// Pointwise phase-space sandwich `2p⁴ ≥ t^TF(p) ≥ 2p⁴ − (8/3)p³`.
pub fn phase_space_report(sample: &[f64]) -> AppendixReport {
    let mut upper = InequalityTally::new("massless_upper", "2p^4 >= t_TF(p)");
    let mut lower = InequalityTally::new("massless_lower", "t_TF(p) >= 2p^4 - (8/3)p^3");
    let mut count = 0;
    for &p in sample.iter().filter(|p| p.is_finite() && **p > 0.0) {
        count += 1;
        let scale = 2.0 * p.powi(4);
        upper.record(p, massless_upper_margin(p), scale);
        lower.record(p, massless_lower_margin(p), scale);
    }
    let inequalities = vec![upper, lower];
    let total_failures = inequalities.iter().map(|t| t.failures).sum();
    AppendixReport {
        samples: count,
        inequalities,
        total_failures,
    }
}
