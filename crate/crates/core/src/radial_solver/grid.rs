use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Layout of a logarithmic radial grid (lengths in reduced Compton
/// wavelengths `ħ/mc`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

impl GridOptions {
    /// Default layout for coupling `α_S`: `[1e-5, 60]` Bohr radii with 2000
    /// nodes. One Bohr radius is `1/α_S` in reduced Compton wavelengths.
    pub fn for_coupling(alpha_s: f64) -> Self {
        Self {
            r_min: 1e-5 / alpha_s,
            r_max: 60.0 / alpha_s,
            n: 2000,
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        Self { n, ..self }
    }
}

/// Nodes `r_i = r_min·e^{ih}` with the field linear in `ln r` on each cell
/// and constant on the ball `|x| < r_min`.
///
/// The weights are exact integrals of the nodal hat functions:
/// `volume[i] = ∫ φ_i 4πr² dr`, `coulomb[i] = ∫ φ_i 4πr dr`, and
/// `stiffness[i] = ∫_{cell i} |φ_i'|² 4πr² dr` for the cell `[r_i, r_{i+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r: Vec<f64>,
    volume: Vec<f64>,
    coulomb: Vec<f64>,
    stiffness: Vec<f64>,
    h: f64,
}

/// `∫₀¹ e^{at}(1−t) dt` and `∫₀¹ e^{at} t dt`.
fn hat_moments(a: f64) -> (f64, f64) {
    let em1 = a.exp_m1();
    let left = (em1 - a) / (a * a);
    let right = (a * a.exp() - em1) / (a * a);
    (left, right)
}

impl RadialGrid {
    pub fn new(options: GridOptions) -> Result<Self> {
        let GridOptions { r_min, r_max, n } = options;
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || n < 3 {
            return Err(domain("RadialGrid::new", format!("invalid grid layout {options:?}")));
        }
        let h = (r_max / r_min).ln() / (n - 1) as f64;
        let r: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { r_max } else { r_min * (h * i as f64).exp() })
            .collect();
        let mut volume = vec![0.0; n];
        let mut coulomb = vec![0.0; n];
        let mut stiffness = vec![0.0; n - 1];
        let (v_left, v_right) = hat_moments(3.0 * h);
        let (c_left, c_right) = hat_moments(2.0 * h);
        for i in 0..n - 1 {
            let ri = r[i];
            let v = 4.0 * PI * ri * ri * ri * h;
            volume[i] += v * v_left;
            volume[i + 1] += v * v_right;
            let c = 4.0 * PI * ri * ri * h;
            coulomb[i] += c * c_left;
            coulomb[i + 1] += c * c_right;
            // |dφ/dr|² r² dr = (1/h²)·r dx on the cell
            stiffness[i] = 4.0 * PI * (r[i + 1] - ri) / (h * h);
        }
        volume[0] += 4.0 / 3.0 * PI * r_min * r_min * r_min;
        coulomb[0] += 2.0 * PI * r_min * r_min;
        Ok(Self {
            r,
            volume,
            coulomb,
            stiffness,
            h,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Weights for `∫ g dx = ∫ g 4πr² dr`.
    pub fn weights(&self) -> &[f64] {
        &self.volume
    }

    /// Weights for `∫ g/|x| dx`.
    pub fn coulomb_weights(&self) -> &[f64] {
        &self.coulomb
    }

    /// Per-cell coefficients with `∫|∇χ|² dx = Σ_i stiffness[i]·(χ_{i+1} − χ_i)²`.
    pub fn stiffness(&self) -> &[f64] {
        &self.stiffness
    }

    pub fn log_step(&self) -> f64 {
        self.h
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// `∫ g dx` for nodal values `g`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.volume).map(|(g, w)| g * w).sum()
    }

    /// `∫|∇χ|² dx` for the piecewise-linear field with nodal values `chi`.
    pub fn dirichlet_integral(&self, chi: &[f64]) -> f64 {
        chi.windows(2)
            .zip(&self.stiffness)
            .map(|(c, s)| s * (c[1] - c[0]) * (c[1] - c[0]))
            .sum()
    }
}
