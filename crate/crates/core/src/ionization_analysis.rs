//! Analytic upper bound on the number of electrons an atom can bind, and
//! the multi-center weight used in its derivation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special_functions::{minimize_h, HAnalysisResult};

/// The bound `N < (2/√a)·Z` together with an optional solver estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonizationBoundReport {
    pub a: f64,
    pub b: f64,
    pub s_star: f64,
    /// `2/√a`.
    pub bound_coefficient: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    /// `bound_coefficient·Z`.
    pub analytic_upper: f64,
    #[serde(rename = "solver_N_max")]
    pub solver_n_max: Option<f64>,
}

impl IonizationBoundReport {
    pub fn from_h(h: &HAnalysisResult, z: f64) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(domain("ionization_bound", format!("Z must be > 0, got {z}")));
        }
        let bound_coefficient = 2.0 / h.a.sqrt();
        Ok(Self {
            a: h.a,
            b: h.b,
            s_star: h.s_star,
            bound_coefficient,
            z,
            analytic_upper: bound_coefficient * z,
            solver_n_max: None,
        })
    }

    pub fn with_solver_n_max(self, n_max: f64) -> Self {
        Self {
            solver_n_max: Some(n_max),
            ..self
        }
    }

    /// `Z·(1 − tol) ≤ N_max < analytic_upper`, if a solver value is attached.
    pub fn bracket_holds(&self, tol: f64) -> Option<bool> {
        self.solver_n_max
            .map(|n| n >= self.z * (1.0 - tol) && n < self.analytic_upper)
    }
}

/// Runs the `H` analysis and scales the bound to charge `z`.
pub fn ionization_bound(z: f64) -> Result<IonizationBoundReport> {
    IonizationBoundReport::from_h(&minimize_h(), z)
}

fn distance(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

fn check_centers(func: &'static str, kappa: &[f64], centers: &[[f64; 3]]) -> Result<()> {
    if kappa.len() != centers.len() || kappa.is_empty() {
        return Err(domain(func, "need one positive weight per center"));
    }
    if let Some(k) = kappa.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(domain(func, format!("weights must be > 0, got {k}")));
    }
    Ok(())
}

fn distances(func: &'static str, x: &[f64; 3], centers: &[[f64; 3]]) -> Result<Vec<f64>> {
    let d: Vec<f64> = centers.iter().map(|c| distance(x, c)).collect();
    if d.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(domain(func, "point coincides with a center or is not finite"));
    }
    Ok(d)
}

/// `φ(x) = Σ κ_k/|x − R_k|`.
pub fn weight_phi(x: &[f64; 3], kappa: &[f64], centers: &[[f64; 3]]) -> Result<f64> {
    check_centers("weight_phi", kappa, centers)?;
    let d = distances("weight_phi", x, centers)?;
    Ok(kappa.iter().zip(&d).map(|(k, d)| k / d).sum())
}

/// Both sides of `(φ(x)⁻¹ + φ(y)⁻¹)/|x − y| ≥ Σ κ_k g_k(x) g_k(y)` with
/// `g_k(x) = (φ(x)|x − R_k|)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelComparison {
    pub lhs: f64,
    pub rhs: f64,
}

impl KernelComparison {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs * (1.0 - 4.0 * f64::EPSILON)
    }
}

pub fn triangle_kernel(x: &[f64; 3], y: &[f64; 3], kappa: &[f64], centers: &[[f64; 3]]) -> Result<KernelComparison> {
    let func = "triangle_kernel_check";
    check_centers(func, kappa, centers)?;
    let dx = distances(func, x, centers)?;
    let dy = distances(func, y, centers)?;
    let dxy = distance(x, y);
    if !(dxy > 0.0) {
        return Err(domain(func, "x and y must be distinct"));
    }
    let phi_x: f64 = kappa.iter().zip(&dx).map(|(k, d)| k / d).sum();
    let phi_y: f64 = kappa.iter().zip(&dy).map(|(k, d)| k / d).sum();
    let lhs = (1.0 / phi_x + 1.0 / phi_y) / dxy;
    let rhs = kappa
        .iter()
        .zip(dx.iter().zip(&dy))
        .map(|(k, (a, b))| k / (phi_x * a * phi_y * b))
        .sum();
    Ok(KernelComparison { lhs, rhs })
}

/// Whether the kernel inequality holds at `(x, y)`.
pub fn triangle_kernel_check(x: &[f64; 3], y: &[f64; 3], kappa: &[f64], centers: &[[f64; 3]]) -> Result<bool> {
    Ok(triangle_kernel(x, y, kappa, centers)?.holds())
}
