//! Constrained minimization of the atomic relativistic TFW functional over
//! spherically symmetric fields `χ = F∘p ≥ 0`.
//!
//! Units: energies in `mc²`, momenta in `mc`, lengths in `ħ/mc`. One Bohr
//! radius is `1/α_S`, so atomic energies are of order `(α_S Z)²`.

mod energy;
mod grid;
mod ionization;
mod minimize;

pub use energy::{coulomb_form, density_of, energy_gradient, evaluate_energy, hartree_potential, EnergyBreakdown};
pub use grid::{GridOptions, RadialGrid};
pub use ionization::{find_max_ionization, BisectionStep, IonizationScan};
pub use minimize::{
    euler_residual, initial_chi, minimize, minimize_from, preconditioned_residual, MinimizeOptions, MinimizeResult,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Momenta below this are treated as zero when masking the Euler residual.
pub const P_FLOOR: f64 = 1e-12;

/// Couplings, nuclei and particle-number constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Weizsäcker coefficient `λ`.
    pub lambda: f64,
    /// Fine-structure constant `α_S`.
    pub alpha_s: f64,
    /// Nuclear charges `Z_k`.
    pub z_list: Vec<f64>,
    /// Nuclear positions `R_k` in `ħ/mc`.
    pub r_list: Vec<[f64; 3]>,
    /// Upper bound `N` on `∫ρ`.
    pub n: f64,
}

impl PhysicalParams {
    /// A single nucleus of charge `z` at the origin.
    pub fn atom(z: f64, n: f64, lambda: f64, alpha_s: f64) -> Self {
        Self {
            lambda,
            alpha_s,
            z_list: vec![z],
            r_list: vec![[0.0; 3]],
            n,
        }
    }

    pub fn with_n(&self, n: f64) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let func = "PhysicalParams::validate";
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(domain(func, format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.alpha_s.is_finite() && self.alpha_s > 0.0) {
            return Err(domain(func, format!("alpha_s must be > 0, got {}", self.alpha_s)));
        }
        if !(self.n.is_finite() && self.n >= 0.0) {
            return Err(domain(func, format!("N must be >= 0, got {}", self.n)));
        }
        if let Some(z) = self.z_list.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
            return Err(domain(func, format!("nuclear charges must be >= 0, got {z}")));
        }
        if self.z_list.len() != self.r_list.len() {
            return Err(domain(func, "z_list and r_list differ in length"));
        }
        for (k, a) in self.r_list.iter().enumerate() {
            if a.iter().any(|c| !c.is_finite()) {
                return Err(domain(func, "nuclear positions must be finite"));
            }
            if self.r_list[..k].contains(a) {
                return Err(domain(func, "nuclear positions must be pairwise distinct"));
            }
        }
        Ok(())
    }

    /// Total nuclear charge seen by the atomic solver, which needs at most
    /// one nucleus, located at the origin.
    pub fn atomic_charge(&self) -> Result<f64> {
        match (self.z_list.as_slice(), self.r_list.as_slice()) {
            ([], []) => Ok(0.0),
            ([z], [r]) if *r == [0.0; 3] => Ok(*z),
            _ => Err(domain(
                "PhysicalParams::atomic_charge",
                "the radial solver needs a single nucleus at the origin",
            )),
        }
    }

    /// `Σ_{k<l} α_S Z_k Z_l/|R_k − R_l|`.
    pub fn nuclear_repulsion(&self) -> f64 {
        let mut total = 0.0;
        for k in 0..self.z_list.len() {
            for l in k + 1..self.z_list.len() {
                let (a, b) = (self.r_list[k], self.r_list[l]);
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                total += self.alpha_s * self.z_list[k] * self.z_list[l] / d;
            }
        }
        total
    }
}
