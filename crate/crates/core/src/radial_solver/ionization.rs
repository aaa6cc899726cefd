use serde::{Deserialize, Serialize};

use super::energy::Evaluator;
use super::minimize::{initial_chi, inner_solve, solve_with_free, MinimizeOptions, MinimizeResult};
use super::{PhysicalParams, RadialGrid};
use crate::error::{domain, Result};

/// One probe of the bisection on `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub n: f64,
    pub particle_number: f64,
    pub multiplier: f64,
    pub energy: f64,
    /// The minimizer under `∫ρ ≤ N` holds (up to tolerance) all `N` electrons.
    pub bound: bool,
    pub converged: bool,
}

/// Largest `N` for which the constrained minimizer saturates the constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IonizationScan {
    pub z: f64,
    pub lambda: f64,
    pub alpha_s: f64,
    /// Estimate of the maximal bound electron number (last bound probe).
    pub n_max: f64,
    /// Smallest probed unbound `N`, or `None` if every probe was bound.
    pub first_unbound: Option<f64>,
    /// Particle number of the unconstrained minimizer.
    pub free_particle_number: f64,
    pub free_energy: f64,
    pub steps: Vec<BisectionStep>,
    /// Every probe converged.
    pub converged: bool,
}

/// Bisection on `N ∈ [Z, 4Z]` (or `[0, Z]` if `N = Z` is already unbound)
/// to a resolution of `10⁻³·Z`. A probe counts as bound when
/// `∫ρ ≥ N − 10⁻⁴·Z`.
///
/// The unconstrained minimizer is computed once; each probe continues from
/// it in the chemical potential. Probes that fail to converge are repeated
/// once with a tighter stationarity tolerance.
pub fn find_max_ionization(
    z: f64,
    lambda: f64,
    alpha_s: f64,
    grid: &RadialGrid,
    opts: &MinimizeOptions,
) -> Result<IonizationScan> {
    if !(z.is_finite() && z > 0.0) {
        return Err(domain("find_max_ionization", format!("Z must be > 0, got {z}")));
    }
    let params = PhysicalParams::atom(z, 4.0 * z, lambda, alpha_s);
    params.validate()?;
    let mut ev = Evaluator::new(grid, &params)?;
    let start = initial_chi(&params.with_n(z), grid);
    let free = inner_solve(&mut ev, &start, 0.0, opts)?;
    let bind_tol = 1e-4 * z;
    let mut steps = Vec::new();

    let probe = |n: f64, ev: &mut Evaluator| -> Result<BisectionStep> {
        let mut res: MinimizeResult = solve_with_free(ev, n, &free, opts)?;
        if !res.converged {
            let tight = MinimizeOptions {
                tol: opts.tol * 0.3,
                ..*opts
            };
            res = solve_with_free(ev, n, &free, &tight)?;
        }
        Ok(BisectionStep {
            n,
            particle_number: res.particle_number,
            multiplier: res.multiplier,
            energy: res.energy.total,
            bound: res.particle_number >= n - bind_tol,
            converged: res.converged,
        })
    };

    let (mut lo, mut hi) = (z, 4.0 * z);
    let at_z = probe(z, &mut ev)?;
    let z_bound = at_z.bound;
    steps.push(at_z);
    let mut first_unbound = None;
    if z_bound {
        let top = probe(hi, &mut ev)?;
        let top_bound = top.bound;
        steps.push(top);
        if top_bound {
            lo = hi;
        } else {
            first_unbound = Some(hi);
        }
    } else {
        hi = z;
        lo = 0.0;
        first_unbound = Some(z);
    }
    if first_unbound.is_some() {
        while hi - lo > 1e-3 * z {
            let mid = 0.5 * (lo + hi);
            let step = probe(mid, &mut ev)?;
            if step.bound {
                lo = mid;
            } else {
                hi = mid;
                first_unbound = Some(mid);
            }
            steps.push(step);
        }
    }
    let converged = free.converged && steps.iter().all(|s| s.converged);
    Ok(IonizationScan {
        z,
        lambda,
        alpha_s,
        n_max: lo,
        first_unbound,
        free_particle_number: free.eval.particle_number,
        free_energy: free.eval.energy.total,
        steps,
        converged,
    })
}
