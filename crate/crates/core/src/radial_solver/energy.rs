use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{PhysicalParams, RadialGrid};
use crate::error::{domain, numeric, Result};
use crate::special_functions::{table, tf_kinetic_derivative_unchecked, tf_kinetic_unchecked, SpecialFunctionTable};

/// The five terms of the energy (units of `mc²`) and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `(3λ/8π²)∫|∇χ|²`
    pub weizsacker: f64,
    /// `(1/8π²)∫t^TF(p)`
    pub thomas_fermi: f64,
    /// `−α_S Z ∫ρ/|x|`
    pub external: f64,
    /// `α_S D[ρ]`
    pub hartree: f64,
    /// `Σ_{k<l} α_S Z_k Z_l/|R_k − R_l|`
    pub nuclear: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn from_parts(weizsacker: f64, thomas_fermi: f64, external: f64, hartree: f64, nuclear: f64) -> Self {
        Self {
            weizsacker,
            thomas_fermi,
            external,
            hartree,
            nuclear,
            total: weizsacker + thomas_fermi + external + hartree + nuclear,
        }
    }

    /// Sum of the magnitudes of all terms; the scale against which
    /// cancellation in `total` is judged.
    pub fn magnitude(&self) -> f64 {
        self.weizsacker.abs() + self.thomas_fermi.abs() + self.external.abs() + self.hartree.abs() + self.nuclear.abs()
    }
}

/// `Φ_i = Σ_j q_j / max(r_i, r_j)` for shell charges `q`.
pub(crate) fn shell_potential(r: &[f64], charges: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut outer = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        outer[j] = acc;
        acc += charges[j] / r[j];
    }
    let mut inner = 0.0;
    let mut phi = vec![0.0; n];
    for i in 0..n {
        inner += charges[i];
        phi[i] = inner / r[i] + outer[i];
    }
    phi
}

/// Electrostatic potential `∫ρ(y)/|x−y| dy` of the spherical density with
/// nodal values `rho`.
pub fn hartree_potential(grid: &RadialGrid, rho: &[f64]) -> Vec<f64> {
    let charges: Vec<f64> = rho.iter().zip(grid.weights()).map(|(r, w)| r * w).collect();
    shell_potential(grid.r(), &charges)
}

/// The Coulomb form `D(ρ, σ) = ½∬ρ(x)σ(y)/|x−y|` for spherical densities.
pub fn coulomb_form(grid: &RadialGrid, rho: &[f64], sigma: &[f64]) -> f64 {
    let phi = hartree_potential(grid, sigma);
    0.5 * rho.iter().zip(grid.weights()).zip(&phi).map(|((r, w), p)| r * w * p).sum::<f64>()
}

/// Nodal quantities derived from `χ` through `p = F⁻¹(|χ|)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct LocalFields {
    pub p: Vec<f64>,
    pub rho: Vec<f64>,
    /// `dρ/dχ`
    pub drho: Vec<f64>,
    /// `t^TF(p)`
    pub t: Vec<f64>,
    /// `d t^TF(p)/dχ`
    pub dt: Vec<f64>,
}

/// Result of one evaluation of the Lagrangian `E + μN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Evaluation {
    pub energy: EnergyBreakdown,
    pub particle_number: f64,
    pub lagrangian: f64,
}

/// Energy and gradient evaluator for a fixed grid and parameter set.
///
/// The energy is extended to `χ < 0` as an even function of each nodal
/// value; its minimizers can be taken nonnegative.
pub(crate) struct Evaluator<'a> {
    grid: &'a RadialGrid,
    table: &'static SpecialFunctionTable,
    lambda: f64,
    alpha_s: f64,
    charge: f64,
    nuclear: f64,
    pub fields: LocalFields,
    phi: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(grid: &'a RadialGrid, params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        let charge = params.atomic_charge()?;
        let n = grid.len();
        Ok(Self {
            grid,
            table: table(),
            lambda: params.lambda,
            alpha_s: params.alpha_s,
            charge,
            nuclear: params.nuclear_repulsion(),
            fields: LocalFields {
                p: vec![0.0; n],
                rho: vec![0.0; n],
                drho: vec![0.0; n],
                t: vec![0.0; n],
                dt: vec![0.0; n],
            },
            phi: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.grid
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha_s(&self) -> f64 {
        self.alpha_s
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    fn update_fields(&mut self, chi: &[f64]) {
        let f = &mut self.fields;
        for (i, &c) in chi.iter().enumerate() {
            let y = c.abs();
            let sign = c.signum();
            let p = self.table.inverse_with_guess(y, f.p[i]);
            f.p[i] = p;
            f.rho[i] = p * p * p / (3.0 * PI * PI);
            f.t[i] = tf_kinetic_unchecked(p);
            if p > 0.0 {
                let slope = self.table.eval_with_derivative(p).1;
                f.drho[i] = sign * p * p / (PI * PI * slope);
                f.dt[i] = sign * tf_kinetic_derivative_unchecked(p) / slope;
            } else {
                f.drho[i] = 0.0;
                f.dt[i] = 0.0;
            }
        }
    }

    /// Evaluates `E + μN` at `chi`; when `grad` is given it receives the
    /// Euclidean gradient with respect to the nodal values (zero at the
    /// Dirichlet node).
    pub fn evaluate(&mut self, chi: &[f64], mu: f64, grad: Option<&mut [f64]>) -> Result<Evaluation> {
        let n = self.grid.len();
        if chi.len() != n {
            return Err(domain("radial_solver::evaluate", format!("field has {} nodes, grid has {n}", chi.len())));
        }
        self.update_fields(chi);
        let grid = self.grid;
        let w = grid.weights();
        let cw = grid.coulomb_weights();
        let s = grid.stiffness();
        let f = &self.fields;

        let w_coef = 3.0 * self.lambda / (8.0 * PI * PI);
        let weizsacker = w_coef * grid.dirichlet_integral(chi);
        let tf_coef = 1.0 / (8.0 * PI * PI);
        let mut thomas_fermi = 0.0;
        let mut attraction = 0.0;
        let mut particle_number = 0.0;
        let mut charges = vec![0.0; n];
        for i in 0..n {
            thomas_fermi += w[i] * f.t[i];
            attraction += cw[i] * f.rho[i];
            charges[i] = w[i] * f.rho[i];
            particle_number += charges[i];
        }
        thomas_fermi *= tf_coef;
        let external = -self.alpha_s * self.charge * attraction;
        self.phi = shell_potential(grid.r(), &charges);
        let hartree = 0.5 * self.alpha_s * charges.iter().zip(&self.phi).map(|(q, p)| q * p).sum::<f64>();
        let energy = EnergyBreakdown::from_parts(weizsacker, thomas_fermi, external, hartree, self.nuclear);
        let lagrangian = energy.total + mu * particle_number;
        if !lagrangian.is_finite() {
            return Err(numeric("radial_solver::evaluate", "non-finite energy"));
        }

        if let Some(g) = grad {
            let stiff = 2.0 * w_coef;
            for i in 0..n {
                let mut gi = 0.0;
                if i > 0 {
                    gi += stiff * s[i - 1] * (chi[i] - chi[i - 1]);
                }
                if i + 1 < n {
                    gi -= stiff * s[i] * (chi[i + 1] - chi[i]);
                }
                gi += tf_coef * w[i] * f.dt[i];
                gi += (self.alpha_s * (self.phi[i] * w[i]) - self.alpha_s * self.charge * cw[i] + mu * w[i]) * f.drho[i];
                g[i] = gi;
            }
            g[n - 1] = 0.0;
        }
        Ok(Evaluation {
            energy,
            particle_number,
            lagrangian,
        })
    }
}

fn check_field(chi: &[f64]) -> Result<()> {
    if let Some(c) = chi.iter().find(|c| !c.is_finite()) {
        return Err(numeric("radial_solver", format!("non-finite field value {c}")));
    }
    if let Some(c) = chi.iter().find(|c| **c < 0.0) {
        return Err(domain("radial_solver", format!("field must be nonnegative, got {c}")));
    }
    Ok(())
}

/// Energy terms of the field `chi` (nodal values of `F∘p`).
pub fn evaluate_energy(chi: &[f64], grid: &RadialGrid, params: &PhysicalParams) -> Result<EnergyBreakdown> {
    check_field(chi)?;
    Ok(Evaluator::new(grid, params)?.evaluate(chi, 0.0, None)?.energy)
}

/// Gradient of the total energy in the `L²(grid)` inner product
/// `⟨u, v⟩ = Σ wᵢuᵢvᵢ`, i.e. the Euclidean gradient divided by the weights.
/// The Dirichlet node carries a zero gradient.
pub fn energy_gradient(chi: &[f64], grid: &RadialGrid, params: &PhysicalParams) -> Result<Vec<f64>> {
    check_field(chi)?;
    let mut g = vec![0.0; grid.len()];
    Evaluator::new(grid, params)?.evaluate(chi, 0.0, Some(&mut g))?;
    for (gi, wi) in g.iter_mut().zip(grid.weights()) {
        *gi /= wi;
    }
    Ok(g)
}

/// Density `ρ = p³/(3π²)` and momentum `p` for each node of `chi`.
pub fn density_of(chi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_field(chi)?;
    let t = table();
    let p: Vec<f64> = chi.iter().map(|&c| t.inverse(c)).collect();
    let rho = p.iter().map(|p| p * p * p / (3.0 * PI * PI)).collect();
    Ok((p, rho))
}
