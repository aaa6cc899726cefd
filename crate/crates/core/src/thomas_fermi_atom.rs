//! Neutral nonrelativistic Thomas–Fermi atom with `γ = 1`, `Z = 1`.
//!
//! The functional `∫ (3/10)ρ^{5/3} − ∫ ρ/|x| + D[ρ]` is convex; its minimizer
//! satisfies `ρ = (2V)^{3/2}` with `V = 1/r − ρ * 1/|x|`. Writing
//! `w(r) = r·V(r)` turns this into `w'' = 4π·2^{3/2}·w^{3/2}/√r` with
//! `w(0) = 1`, `w(∞) = 0`, which is solved by Newton's method on a
//! logarithmic grid. The energy is then evaluated from the functional itself.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{numeric, Error, Result};
use crate::special_functions::CACHE_DIR_ENV;

const SCHEMA: &str = "rtfw.thomas-fermi-atom/1";
const CACHE_FILE: &str = "thomas_fermi_atom_v1.json";

/// Discretization of the radial TF problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfGridConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for TfGridConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-10,
            r_max: 1e4,
            points: 4000,
        }
    }
}

/// Energy terms of the converged TF atom (`γ = 1`, `Z = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfAtomSolution {
    pub kinetic: f64,
    pub attraction: f64,
    pub repulsion: f64,
    pub energy: f64,
    pub particle_number: f64,
    /// `w'(0)`, the slope of `rV` at the nucleus.
    pub slope_at_origin: f64,
    pub newton_iterations: usize,
}

fn coupling() -> f64 {
    4.0 * PI * 2f64.powf(1.5)
}

/// Solves the TF equation on `config` and evaluates the functional.
pub fn solve_tf_atom(config: TfGridConfig) -> Result<TfAtomSolution> {
    let TfGridConfig { r_min, r_max, points: n } = config;
    if !(r_min > 0.0 && r_max > r_min && n >= 16) {
        return Err(crate::error::domain("solve_tf_atom", format!("invalid grid {config:?}")));
    }
    let (x0, x1) = (r_min.ln(), r_max.ln());
    let h = (x1 - x0) / (n - 1) as f64;
    let r: Vec<f64> = (0..n).map(|i| (x0 + h * i as f64).exp()).collect();
    let c = coupling();
    // Length scale of the solution, (4π·2^{3/2})^{-2/3}.
    let b = c.powf(-2.0 / 3.0);

    // Sommerfeld's approximate screening function as the starting point.
    let mut w: Vec<f64> = r
        .iter()
        .map(|&ri| {
            let xi = ri / b;
            (1.0 + (xi * xi * xi / 144.0).powf(0.772)).powf(-1.544)
        })
        .collect();
    w[0] = 1.0;
    w[n - 1] = 0.0;

    let source: Vec<f64> = r.iter().map(|&ri| c * ri.powf(1.5)).collect();
    let residual = |w: &[f64], out: &mut [f64]| {
        for i in 1..n - 1 {
            let wp = w[i].max(0.0);
            out[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h) - (w[i + 1] - w[i - 1]) / (2.0 * h)
                - source[i] * wp * wp.sqrt();
        }
        out[0] = 0.0;
        out[n - 1] = 0.0;
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut res = vec![0.0; n];
    residual(&w, &mut res);
    let mut res_norm = norm(&res);
    let lower = 1.0 / (h * h) + 0.5 / h;
    let upper = 1.0 / (h * h) - 0.5 / h;
    let mut iterations = 0;
    let mut converged = false;
    let (mut sub, mut diag, mut sup, mut rhs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut trial = vec![0.0; n];
    let mut trial_res = vec![0.0; n];
    for _ in 0..100 {
        iterations += 1;
        for i in 1..n - 1 {
            let wp = w[i].max(0.0);
            sub[i] = lower;
            sup[i] = upper;
            diag[i] = -2.0 / (h * h) - 1.5 * source[i] * wp.sqrt();
            rhs[i] = -res[i];
        }
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        sup[0] = 0.0;
        sub[n - 1] = 0.0;
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        let step = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        let mut t = 1.0;
        loop {
            for i in 0..n {
                trial[i] = w[i] + t * step[i];
            }
            residual(&trial, &mut trial_res);
            let trial_norm = norm(&trial_res);
            if trial_norm < res_norm || t < 1e-6 {
                std::mem::swap(&mut w, &mut trial);
                std::mem::swap(&mut res, &mut trial_res);
                res_norm = trial_norm;
                break;
            }
            t *= 0.5;
        }
        let step_norm = step.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        if t == 1.0 && step_norm < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(numeric("solve_tf_atom", format!("Newton did not converge, residual {res_norm:e}")));
    }

    // Trapezoid rule in ln r for ∫ g dV = ∫ 4π r³ g dx.
    let (mut kinetic, mut attraction, mut repulsion, mut number) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let ri = r[i];
        let v = w[i].max(0.0) / ri;
        let rho = (2.0 * v).powf(1.5);
        let phi_electrons = (1.0 - w[i]) / ri;
        let weight = 4.0 * PI * ri * ri * ri * h * if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        kinetic += weight * 0.3 * rho.powf(5.0 / 3.0);
        attraction -= weight * rho / ri;
        repulsion += weight * 0.5 * rho * phi_electrons;
        number += weight * rho;
    }
    // Inside r_min, ρ ≈ (2w(0)/r)^{3/2}: the kinetic and attraction integrals
    // pick up contributions of order √r_min that are added analytically.
    let core = 8.0 * PI * r_min.sqrt();
    let w0 = w[0];
    kinetic += 0.3 * (2.0 * w0).powf(2.5) * core;
    attraction -= (2.0 * w0).powf(1.5) * core;
    let slope_at_origin = (w[1] - w[0]) / (r[1] - r[0]);
    Ok(TfAtomSolution {
        kinetic,
        attraction,
        repulsion,
        energy: kinetic + attraction + repulsion,
        particle_number: number,
        slope_at_origin,
        newton_iterations: iterations,
    })
}

/// Thomas algorithm for a tridiagonal system (no pivoting; the systems
/// solved here are diagonally dominant).
pub(crate) fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// `e_TF` with Richardson extrapolation over two grid resolutions.
pub fn compute_e_tf() -> Result<f64> {
    let coarse = TfGridConfig::default();
    let fine = TfGridConfig {
        points: 2 * coarse.points - 1,
        ..coarse
    };
    let e1 = solve_tf_atom(coarse)?.energy;
    let e2 = solve_tf_atom(fine)?.energy;
    let e = -(4.0 * e2 - e1) / 3.0;
    if !(e.is_finite() && e > 0.0) {
        return Err(numeric("compute_e_tf", format!("unphysical value {e}")));
    }
    Ok(e)
}

#[derive(Serialize, Deserialize)]
struct CachedValue {
    schema: String,
    config: TfGridConfig,
    e_tf: f64,
}

fn cache_path() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(|dir| PathBuf::from(dir).join(CACHE_FILE))
}

fn load_cached() -> Option<f64> {
    let text = std::fs::read_to_string(cache_path()?).ok()?;
    let cached: CachedValue = serde_json::from_str(&text).ok()?;
    (cached.schema == SCHEMA && cached.config == TfGridConfig::default() && cached.e_tf > 0.0).then_some(cached.e_tf)
}

fn store_cached(e_tf: f64) {
    let Some(path) = cache_path() else { return };
    let record = CachedValue {
        schema: SCHEMA.to_string(),
        config: TfGridConfig::default(),
        e_tf,
    };
    if let (Some(dir), Ok(text)) = (path.parent(), serde_json::to_string(&record)) {
        let _ = std::fs::create_dir_all(dir);
        let _ = std::fs::write(&path, text);
    }
}

/// Magnitude of the infimum of the TF functional at `γ = 1`, `Z = 1`;
/// computed once per process (and cached under `$RTFW_CACHE_DIR`).
pub fn e_tf() -> Result<f64> {
    static VALUE: OnceLock<std::result::Result<f64, Error>> = OnceLock::new();
    VALUE
        .get_or_init(|| {
            if let Some(v) = load_cached() {
                return Ok(v);
            }
            let v = compute_e_tf()?;
            store_cached(v);
            Ok(v)
        })
        .clone()
}
