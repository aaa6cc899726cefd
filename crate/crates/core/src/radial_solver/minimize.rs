use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::energy::{EnergyBreakdown, Evaluation, Evaluator};
use super::{PhysicalParams, RadialGrid, P_FLOOR};
use crate::error::{domain, numeric, Error, Result};
use crate::special_functions::table;
use crate::thomas_fermi_atom::solve_tridiagonal;

/// Stopping rules for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Relative stationarity tolerance: an inner solve stops once
    /// `√(gᵀP⁻¹g / S) ≤ tol`, where `g` is the gradient, `P` the
    /// preconditioner and `S` the sum of magnitudes of the energy terms.
    pub tol: f64,
    /// Relative tolerance on the particle number when the constraint binds.
    pub particle_tol: f64,
    /// Iteration cap per inner solve.
    pub max_iterations: usize,
    /// Cap on inner solves in the multiplier search.
    pub max_outer: usize,
    /// Number of stored L-BFGS pairs.
    pub memory: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            particle_tol: 1e-6,
            max_iterations: 20_000,
            max_outer: 80,
            memory: 12,
        }
    }
}

impl MinimizeOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.tol.is_finite()
            && self.particle_tol > 0.0
            && self.particle_tol.is_finite()
            && self.max_iterations > 0
            && self.max_outer > 0;
        if ok {
            Ok(())
        } else {
            Err(domain("MinimizeOptions", format!("invalid options {self:?}")))
        }
    }
}

/// Outcome of a constrained minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    /// Nodal values of `χ = F∘p`, nonnegative, zero at `r_max`.
    pub chi: Vec<f64>,
    pub energy: EnergyBreakdown,
    pub particle_number: f64,
    pub target_particle_number: f64,
    /// Chemical potential `μ ≥ 0`; zero when the constraint is inactive.
    pub multiplier: f64,
    pub constraint_active: bool,
    /// See [`euler_residual`].
    pub euler_residual: f64,
    /// See [`preconditioned_residual`].
    pub preconditioned_residual: f64,
    pub iterations: usize,
    pub outer_iterations: usize,
    pub converged: bool,
    /// Every accepted step lowered (or kept) `E + μN`.
    pub monotone_descent: bool,
    /// `E + μN` after each accepted step of the final inner solve.
    #[serde(skip)]
    pub lagrangian_trace: Vec<f64>,
}

/// Tridiagonal approximation `(3λ/4π²)·S + diag(w)·σ` of the Hessian, where
/// `S` is the Dirichlet stiffness matrix and `σ` a hydrogenic energy shift.
struct Preconditioner {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Preconditioner {
    fn new(grid: &RadialGrid, lambda: f64, shift: f64) -> Self {
        let n = grid.len();
        let k = 3.0 * lambda / (4.0 * PI * PI);
        let s = grid.stiffness();
        let w = grid.weights();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n - 1 {
            diag[i] = w[i] * shift + k * s[i];
            if i > 0 {
                diag[i] += k * s[i - 1];
                sub[i] = -k * s[i - 1];
            }
            if i + 2 < n {
                sup[i] = -k * s[i];
            }
        }
        diag[n - 1] = 1.0;
        Self { sub, diag, sup }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = solve_tridiagonal(&self.sub, &self.diag, &self.sup, rhs);
        let n = x.len();
        x[n - 1] = 0.0;
        x
    }
}

fn shift(lambda: f64, alpha_s: f64, charge: f64, mu: f64) -> f64 {
    let binding = (alpha_s * charge.max(1.0)).powi(2) / (2.0 * lambda);
    3.0 / (2.0 * PI * PI) * (binding + mu)
}

const STALL_WINDOW: usize = 100;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean gradient of `∫ρ` at the most recently evaluated field.
fn particle_gradient(ev: &Evaluator) -> Vec<f64> {
    let mut dn: Vec<f64> = ev.grid().weights().iter().zip(&ev.fields.drho).map(|(w, d)| w * d).collect();
    let n = dn.len();
    dn[n - 1] = 0.0;
    dn
}

#[derive(Debug, Clone)]
pub(crate) struct InnerSolution {
    pub chi: Vec<f64>,
    pub eval: Evaluation,
    pub mu: f64,
    pub decrement: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    pub trace: Vec<f64>,
}

fn lbfgs_direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, pre: &Preconditioner) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    let mut r = pre.solve(&q);
    if let Some((s, y, _)) = history.back() {
        let py = pre.solve(y);
        let gamma = dot(s, y) / dot(y, &py);
        if gamma.is_finite() && gamma > 0.0 {
            r.iter_mut().for_each(|x| *x *= gamma);
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &r);
        for (ri, si) in r.iter_mut().zip(s) {
            *ri += (a - b) * si;
        }
    }
    r.iter_mut().for_each(|x| *x = -*x);
    r
}

/// Minimizes `E + μN` over `χ ≥ 0` with `χ(r_max) = 0`.
pub(crate) fn inner_solve(ev: &mut Evaluator, start: &[f64], mu: f64, opts: &MinimizeOptions) -> Result<InnerSolution> {
    let n = start.len();
    let mut chi: Vec<f64> = start.iter().map(|c| c.abs()).collect();
    chi[n - 1] = 0.0;
    let pre = Preconditioner::new(ev.grid(), ev.lambda(), shift(ev.lambda(), ev.alpha_s(), ev.charge(), mu));
    let mut g = vec![0.0; n];
    let mut cur = ev.evaluate(&chi, mu, Some(&mut g))?;
    let mut dn = particle_gradient(ev);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory + 1);
    let mut trace = vec![cur.lagrangian];
    let mut monotone = true;
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![0.0; n];
    let mut trial_g = vec![0.0; n];
    let tol2 = opts.tol * opts.tol;
    let decrement = loop {
        let pg = pre.solve(&g);
        let decrement = dot(&g, &pg);
        let scale = cur.energy.magnitude() + (mu * cur.particle_number).abs();
        // First-order change of N under one more preconditioned step.
        let n_shift = dot(&dn, &pg).abs();
        if decrement <= tol2 * scale && n_shift <= 0.1 * opts.particle_tol * cur.particle_number {
            converged = true;
            break decrement;
        }
        if iterations >= opts.max_iterations {
            break decrement;
        }
        // Progress over the last window lost in rounding.
        if trace.len() > STALL_WINDOW && trace[trace.len() - 1 - STALL_WINDOW] - cur.lagrangian <= 16.0 * f64::EPSILON * scale {
            converged = decrement <= 1e4 * f64::EPSILON * scale;
            break decrement;
        }
        iterations += 1;
        let mut d = lbfgs_direction(&g, &history, &pre);
        if !(dot(&g, &d) < 0.0) {
            history.clear();
            d = pg.iter().map(|x| -x).collect();
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = (chi[i] + step * d[i]).abs();
            }
            trial[n - 1] = 0.0;
            let predicted = dot(&g, &trial) - dot(&g, &chi);
            match ev.evaluate(&trial, mu, Some(&mut trial_g)) {
                Ok(e) if e.lagrangian <= cur.lagrangian + 1e-4 * predicted.min(0.0) => {
                    accepted = Some(e);
                    break;
                }
                Ok(_) | Err(Error::Numeric { .. }) => step *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some(next) = accepted else {
            if history.is_empty() {
                // No descent left at working precision.
                converged = decrement <= 1e4 * f64::EPSILON * scale;
                break decrement;
            }
            history.clear();
            continue;
        };
        let s: Vec<f64> = trial.iter().zip(&chi).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = trial_g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            history.push_back((s, y, 1.0 / sy));
            if history.len() > opts.memory {
                history.pop_front();
            }
        }
        if next.lagrangian > cur.lagrangian {
            monotone = false;
        }
        std::mem::swap(&mut chi, &mut trial);
        std::mem::swap(&mut g, &mut trial_g);
        cur = next;
        dn = particle_gradient(ev);
        trace.push(cur.lagrangian);
    };
    Ok(InnerSolution {
        chi,
        eval: cur,
        mu,
        decrement,
        iterations,
        converged,
        monotone,
        trace,
    })
}

/// Hydrogenic starting field: `ρ₀ = N k³/π·e^{−2kr}` with `k = α_S Z/λ`,
/// mapped through `p = (3π²ρ)^{1/3}` and `χ = F(p)`.
pub fn initial_chi(params: &PhysicalParams, grid: &RadialGrid) -> Vec<f64> {
    let z = params.atomic_charge().unwrap_or(0.0);
    let mut chi = vec![0.0; grid.len()];
    if z == 0.0 || params.n == 0.0 {
        return chi;
    }
    let k = params.alpha_s * z / params.lambda;
    let t = table();
    for (c, &r) in chi.iter_mut().zip(grid.r()) {
        let rho = params.n * k * k * k / PI * (-2.0 * k * r).exp();
        *c = t.eval((3.0 * PI * PI * rho).cbrt());
    }
    let n = chi.len();
    chi[n - 1] = 0.0;
    chi
}

fn masked_residual(ev: &Evaluator, grad: &[f64]) -> f64 {
    let w = ev.grid().weights();
    let p = &ev.fields.p;
    let n = grad.len();
    (0..n - 1)
        .filter(|&i| p[i] > P_FLOOR)
        .map(|i| grad[i] * grad[i] / w[i])
        .sum::<f64>()
        .sqrt()
}

fn finish(ev: &mut Evaluator, sol: InnerSolution, target: f64, iterations: usize, outer: usize, opts: &MinimizeOptions, monotone: bool) -> Result<MinimizeResult> {
    let tol_n = opts.particle_tol * target;
    let mu = sol.mu;
    let n_now = sol.eval.particle_number;
    let constraint_ok = if mu > 0.0 {
        (n_now - target).abs() <= tol_n
    } else {
        n_now <= target + tol_n
    };
    // Refresh the nodal fields at the returned point.
    let mut g = vec![0.0; sol.chi.len()];
    ev.evaluate(&sol.chi, mu, Some(&mut g))?;
    let euler = masked_residual(ev, &g);
    Ok(MinimizeResult {
        energy: sol.eval.energy,
        particle_number: n_now,
        target_particle_number: target,
        multiplier: mu,
        constraint_active: mu > 0.0 || n_now >= target - tol_n,
        euler_residual: euler,
        preconditioned_residual: sol.decrement.max(0.0).sqrt(),
        iterations,
        outer_iterations: outer,
        converged: sol.converged && constraint_ok,
        monotone_descent: monotone && sol.monotone,
        lagrangian_trace: sol.trace,
        chi: sol.chi,
    })
}

/// Continues from the unconstrained (`μ = 0`) minimizer `free` to the
/// minimizer under `∫ρ ≤ target`.
pub(crate) fn solve_with_free(
    ev: &mut Evaluator,
    target: f64,
    free: &InnerSolution,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let tol_n = opts.particle_tol * target;
    let n_free = free.eval.particle_number;
    if n_free <= target + tol_n {
        return finish(ev, free.clone(), target, free.iterations, 0, opts, free.monotone);
    }
    if target == 0.0 {
        let zero = vec![0.0; free.chi.len()];
        let sol = inner_solve(ev, &zero, 0.0, opts)?;
        return finish(ev, sol, target, free.iterations, 1, opts, free.monotone);
    }
    let mut iterations = free.iterations;
    let mut monotone = free.monotone;
    let mut outer = 0;
    // N(μ) is nonincreasing; bracket the root of N(μ) − target.
    let mut lo = (0.0, n_free);
    let mut hi: Option<(f64, f64)> = None;
    let base = shift(ev.lambda(), ev.alpha_s(), ev.charge(), 0.0) * 2.0 * PI * PI / 3.0;
    let mut mu = 0.05 * base;
    let mut start = free.chi.clone();
    let mut last = free.clone();
    while hi.is_none() {
        outer += 1;
        if outer > opts.max_outer {
            return finish(ev, last, target, iterations, outer, opts, false);
        }
        let sol = inner_solve(ev, &start, mu, opts)?;
        iterations += sol.iterations;
        monotone &= sol.monotone;
        let n_now = sol.eval.particle_number;
        if (n_now - target).abs() <= tol_n {
            return finish(ev, sol, target, iterations, outer, opts, monotone);
        }
        if n_now < target {
            hi = Some((mu, n_now));
        } else {
            lo = (mu, n_now);
            mu *= 4.0;
        }
        start = sol.chi.clone();
        last = sol;
    }
    let mut hi = hi.expect("bracket closed above");
    let mut side = 0i8;
    loop {
        outer += 1;
        let (mu_lo, n_lo) = lo;
        let (mu_hi, n_hi) = hi;
        let mut mu = mu_lo + (n_lo - target) * (mu_hi - mu_lo) / (n_lo - n_hi);
        if !(mu > mu_lo && mu < mu_hi) {
            mu = 0.5 * (mu_lo + mu_hi);
        }
        let sol = inner_solve(ev, &last.chi, mu, opts)?;
        iterations += sol.iterations;
        monotone &= sol.monotone;
        let n_now = sol.eval.particle_number;
        let done = (n_now - target).abs() <= tol_n || outer >= opts.max_outer || mu_hi - mu_lo <= 1e-15 * mu_hi;
        if done {
            return finish(ev, sol, target, iterations, outer, opts, monotone);
        }
        if n_now > target {
            lo = (mu, n_now);
            if side == 1 {
                hi.1 = target + 0.5 * (hi.1 - target);
            }
            side = 1;
        } else {
            hi = (mu, n_now);
            if side == -1 {
                lo.1 = target + 0.5 * (lo.1 - target);
            }
            side = -1;
        }
        last = sol;
    }
}

fn run(params: &PhysicalParams, grid: &RadialGrid, opts: &MinimizeOptions, start: Vec<f64>) -> Result<MinimizeResult> {
    opts.validate()?;
    let mut ev = Evaluator::new(grid, params)?;
    if start.len() != grid.len() {
        return Err(domain("minimize", format!("initial field has {} nodes, grid has {}", start.len(), grid.len())));
    }
    if start.iter().any(|c| !c.is_finite()) {
        return Err(numeric("minimize", "initial field is not finite"));
    }
    let free = inner_solve(&mut ev, &start, 0.0, opts)?;
    solve_with_free(&mut ev, params.n, &free, opts)
}

/// Minimizes the atomic energy under `∫ρ ≤ N`, starting from [`initial_chi`].
///
/// First the unconstrained problem is solved; if its particle number
/// exceeds `N`, a chemical potential `μ > 0` is added (`E + μN`) and tuned by
/// a bracketed secant search until `∫ρ = N`.
pub fn minimize(params: &PhysicalParams, grid: &RadialGrid, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    params.validate()?;
    run(params, grid, opts, initial_chi(params, grid))
}

/// As [`minimize`], starting from `initial`.
pub fn minimize_from(
    params: &PhysicalParams,
    grid: &RadialGrid,
    opts: &MinimizeOptions,
    initial: &[f64],
) -> Result<MinimizeResult> {
    run(params, grid, opts, initial.to_vec())
}

fn residual_gradient(result: &MinimizeResult, grid: &RadialGrid, params: &PhysicalParams) -> Result<(Vec<f64>, f64)> {
    let mut ev = Evaluator::new(grid, params)?;
    let mut g = vec![0.0; grid.len()];
    ev.evaluate(&result.chi, result.multiplier, Some(&mut g))?;
    let r = masked_residual(&ev, &g);
    Ok((g, r))
}

/// Norm of the stationarity residual of `E + μN` in `L²(grid)`:
/// `(Σ wᵢ·(gᵢ/wᵢ)²)^{1/2}` over the interior nodes with `p > P_FLOOR`, where
/// `g` is the Euclidean gradient.
pub fn euler_residual(result: &MinimizeResult, grid: &RadialGrid, params: &PhysicalParams) -> Result<f64> {
    Ok(residual_gradient(result, grid, params)?.1)
}

/// `√(gᵀP⁻¹g)` with the solver's preconditioner `P`: the residual measured
/// in the dual of the energy norm (units of `√(mc²)`).
pub fn preconditioned_residual(result: &MinimizeResult, grid: &RadialGrid, params: &PhysicalParams) -> Result<f64> {
    let (g, _) = residual_gradient(result, grid, params)?;
    let pre = Preconditioner::new(grid, params.lambda, shift(params.lambda, params.alpha_s, params.atomic_charge()?, result.multiplier));
    Ok(dot(&g, &pre.solve(&g)).max(0.0).sqrt())
}
