use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rtfw_core::cutoff_radii::{derivative_jump, r_of_beta, TildeObjective};
use rtfw_core::ionization_analysis::{ionization_bound, IonizationBoundReport};
use rtfw_core::radial_solver::{
    density_of, find_max_ionization, hartree_potential, minimize, GridOptions, IonizationScan, MinimizeOptions,
    PhysicalParams, RadialGrid,
};
use rtfw_core::solve1d::log_space;
use rtfw_core::special_functions::{
    appendix_bounds_report, chi_of_p, g_function, h_ratio, min_g, minimize_h, phase_space_report, tf_kinetic,
    weizsacker_factor,
};
use rtfw_core::stability_bound::{sobolev_constant, stability_constant};
use rtfw_core::thomas_fermi_atom::e_tf;
use rtfw_core::Error;

use crate::args::{
    Command, CutoffArgs, Format, IonizeArgs, RunConfig, SolveArgs, SolverArgs, StabilityArgs, TableArgs, VerifyArgs,
};

/// Why a command did not succeed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 1.
    Validation(String),
    /// Numerical failure or non-convergence: exit 2.
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

/// Rendered output plus an optional failure to report after writing it.
pub struct Outcome {
    pub text: String,
    pub failure: Option<Failure>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn document(schema: &str, cfg: &RunConfig, result: impl Serialize) -> Result<String, Failure> {
    let doc = json!({ "schema": schema, "config": cfg, "result": result });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Numeric(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Validation(msg.into()))
    }
}

/// Checks that are not already enforced by the numerical routines.
pub fn validate(cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.format == Format::Csv {
        require(matches!(cfg.command, Command::Table(_)), "CSV output is only available for `table`")?;
    }
    match &cfg.command {
        Command::Table(a) => {
            require(a.points >= 2, "--points must be at least 2")?;
            require(a.t_min > 0.0 && a.t_max > a.t_min && a.t_max.is_finite(), "need 0 < t-min < t-max")?;
        }
        Command::VerifyBounds(a) => {
            require(a.samples >= 2, "--samples must be at least 2")?;
            require(a.s_min > 0.0 && a.s_max > a.s_min && a.s_max.is_finite(), "need 0 < s-min < s-max")?;
        }
        Command::StabilityBound(a) => {
            require(a.k.is_none() || a.z_inf.is_some(), "--K requires --Z-inf")?;
            require(a.k != Some(0), "--K must be at least 1")?;
        }
        Command::SolveAtom(a) => {
            check_solver(&a.solver)?;
            require(a.z.is_finite() && a.z >= 0.0, "--Z must be >= 0")?;
            require(a.n.is_finite() && a.n >= 0.0, "--N must be >= 0")?;
        }
        Command::Ionize(a) => {
            check_solver(&a.solver)?;
            require(a.z.iter().all(|z| z.is_finite() && *z > 0.0), "--Z values must be > 0")?;
        }
        Command::Constants | Command::Cutoff(_) => {}
    }
    Ok(())
}

fn check_solver(s: &SolverArgs) -> Result<(), Failure> {
    require(s.lambda.is_finite() && s.lambda > 0.0, "--lambda must be > 0")?;
    require(s.alpha_s.is_finite() && s.alpha_s > 0.0, "--alpha-s must be > 0")?;
    require(s.grid_n >= 3, "--grid-n must be at least 3")?;
    require(
        s.grid_rmin > 0.0 && s.grid_rmax > s.grid_rmin && s.grid_rmax.is_finite(),
        "need 0 < grid-rmin < grid-rmax",
    )?;
    require(s.tol > 0.0 && s.particle_tol > 0.0 && s.max_iter > 0, "tolerances and --max-iter must be positive")?;
    Ok(())
}

pub fn dispatch(cfg: &RunConfig) -> Result<Outcome, Failure> {
    validate(cfg)?;
    match &cfg.command {
        Command::Constants => constants(cfg),
        Command::Table(a) => table(cfg, a),
        Command::VerifyBounds(a) => verify_bounds(cfg, a),
        Command::Cutoff(a) => cutoff(cfg, a),
        Command::StabilityBound(a) => stability(cfg, a),
        Command::SolveAtom(a) => solve_atom(cfg, a),
        Command::Ionize(a) => ionize(cfg, a),
    }
}

fn constants(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let h = minimize_h();
    let g = min_g();
    let result = json!({
        "a": h.a,
        "b": h.b,
        "s_star": h.s_star,
        "h_scan_sup": h.scan_sup,
        "bound_coefficient": 2.0 / h.a.sqrt(),
        "c_g": g.c_g,
        "s_g": g.s_min,
        "g_near_zero": g_function(1e-6)?,
        "e_tf": e_tf()?,
        "c_s": sobolev_constant(),
    });
    Ok(Outcome::ok(document("rtfw.constants/1", cfg, result)?))
}

#[derive(Serialize)]
struct TableRow {
    t: f64,
    f: f64,
    #[serde(rename = "F")]
    big_f: f64,
    #[serde(rename = "H")]
    h: f64,
    t_tf: f64,
    g: f64,
}

fn table(cfg: &RunConfig, a: &TableArgs) -> Result<Outcome, Failure> {
    let rows = log_space(a.t_min, a.t_max, a.points)
        .into_iter()
        .map(|t| {
            Ok(TableRow {
                t,
                f: weizsacker_factor(t)?,
                big_f: chi_of_p(t)?,
                h: h_ratio(t)?,
                t_tf: tf_kinetic(t)?,
                g: g_function(t)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let text = match cfg.format {
        Format::Json => document("rtfw.table/1", cfg, &rows)?,
        Format::Csv => csv_text(&rows)?,
    };
    Ok(Outcome::ok(text))
}

fn csv_text<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Numeric(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Numeric(e.to_string()))
}

fn verify_bounds(cfg: &RunConfig, a: &VerifyArgs) -> Result<Outcome, Failure> {
    let mut sample = log_space(a.s_min, a.s_max, a.samples);
    if a.random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let (lo, hi) = (a.s_min.ln(), a.s_max.ln());
        sample.extend((0..a.random).map(|_| rng.random_range(lo..hi).exp()));
        sample.sort_by(f64::total_cmp);
        sample.dedup();
    }
    let elementary = appendix_bounds_report(&sample);
    let phase_space = phase_space_report(&sample);
    let failures = elementary.total_failures + phase_space.total_failures;
    let result = json!({
        "samples": sample.len(),
        "total_failures": failures,
        "elementary": elementary,
        "phase_space": phase_space,
    });
    let text = document("rtfw.verify-bounds/1", cfg, result)?;
    let failure = (failures > 0).then(|| Failure::Numeric(format!("{failures} inequality checks failed")));
    Ok(Outcome { text, failure })
}

fn cutoff(cfg: &RunConfig, a: &CutoffArgs) -> Result<Outcome, Failure> {
    let plain = r_of_beta(a.beta)?;
    let tilde = match a.alpha {
        Some(alpha) => {
            let (res, branch) = TildeObjective::new(alpha, a.beta)?.minimize()?;
            Some(json!({ "result": res, "branch": branch }))
        }
        None => None,
    };
    let result = json!({
        "r_beta": plain,
        "derivative_jump": derivative_jump(plain.r_min),
        "tilde": tilde,
    });
    Ok(Outcome::ok(document("rtfw.cutoff/1", cfg, result)?))
}

fn stability(cfg: &RunConfig, a: &StabilityArgs) -> Result<Outcome, Failure> {
    let uniform = a.z_inf.map(|z_inf| (z_inf, a.k.unwrap_or(a.z.len().max(1))));
    let report = stability_constant(a.lambda, a.alpha_s, &a.z, a.n, uniform)?;
    Ok(Outcome::ok(document("rtfw.stability-bound/1", cfg, report)?))
}

fn grid_of(s: &SolverArgs) -> Result<RadialGrid, Failure> {
    let bohr = 1.0 / s.alpha_s;
    Ok(RadialGrid::new(GridOptions {
        r_min: s.grid_rmin * bohr,
        r_max: s.grid_rmax * bohr,
        n: s.grid_n,
    })?)
}

fn options_of(s: &SolverArgs) -> MinimizeOptions {
    MinimizeOptions {
        tol: s.tol,
        particle_tol: s.particle_tol,
        max_iterations: s.max_iter,
        ..MinimizeOptions::default()
    }
}

#[derive(Serialize)]
struct ProfileRow {
    r: f64,
    chi: f64,
    p: f64,
    rho: f64,
    hartree_potential: f64,
}

fn write_profile(path: &Path, grid: &RadialGrid, chi: &[f64]) -> Result<(), Failure> {
    let (p, rho) = density_of(chi)?;
    let phi = hartree_potential(grid, &rho);
    let rows: Vec<ProfileRow> = (0..grid.len())
        .map(|i| ProfileRow {
            r: grid.r()[i],
            chi: chi[i],
            p: p[i],
            rho: rho[i],
            hartree_potential: phi[i],
        })
        .collect();
    std::fs::write(path, csv_text(&rows)?)
        .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
}

fn solve_atom(cfg: &RunConfig, a: &SolveArgs) -> Result<Outcome, Failure> {
    let s = &a.solver;
    let grid = grid_of(s)?;
    let params = PhysicalParams::atom(a.z, a.n, s.lambda, s.alpha_s);
    let res = minimize(&params, &grid, &options_of(s))?;
    if let Some(path) = &a.profile {
        write_profile(path, &grid, &res.chi)?;
    }
    let bound = stability_constant(s.lambda, s.alpha_s, &[a.z], a.n, None)?;
    let mut value = serde_json::to_value(&res).map_err(|e| Failure::Numeric(e.to_string()))?;
    if !a.include_field {
        if let Value::Object(map) = &mut value {
            map.remove("chi");
        }
    }
    let result = json!({
        "minimization": value,
        "grid": { "n": grid.len(), "r_min": grid.r_min(), "r_max": grid.r_max() },
        "stability": {
            "lower_bound": bound.lower_bound,
            "log10_c_of_a": bound.log10_c_of_a,
            "respected": res.energy.total >= bound.lower_bound,
        },
    });
    let text = document("rtfw.solve-atom/1", cfg, result)?;
    let failure = (!res.converged).then(|| Failure::Numeric("minimization did not converge".into()));
    Ok(Outcome { text, failure })
}

#[derive(Serialize)]
struct IonizeEntry {
    scan: IonizationScan,
    bound: IonizationBoundReport,
    bracket_holds: Option<bool>,
}

fn ionize(cfg: &RunConfig, a: &IonizeArgs) -> Result<Outcome, Failure> {
    if a.analytic {
        let reports = a.z.iter().map(|&z| ionization_bound(z)).collect::<Result<Vec<_>, _>>()?;
        return Ok(Outcome::ok(document("rtfw.ionize-analytic/1", cfg, reports)?));
    }
    let s = &a.solver;
    let grid = grid_of(s)?;
    let opts = options_of(s);
    let h = minimize_h();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Numeric(e.to_string()))?;
    // Collected in input order regardless of scheduling.
    let scans: Vec<Result<IonizationScan, Error>> = pool.install(|| {
        a.z.par_iter()
            .map(|&z| find_max_ionization(z, s.lambda, s.alpha_s, &grid, &opts))
            .collect()
    });
    let mut entries = Vec::with_capacity(scans.len());
    for scan in scans {
        let scan = scan?;
        let bound = IonizationBoundReport::from_h(&h, scan.z)?.with_solver_n_max(scan.n_max);
        entries.push(IonizeEntry {
            bracket_holds: bound.bracket_holds(1e-3),
            scan,
            bound,
        });
    }
    let unconverged = entries.iter().filter(|e| !e.scan.converged).count();
    let text = document("rtfw.ionize/1", cfg, &entries)?;
    let failure = (unconverged > 0).then(|| Failure::Numeric(format!("{unconverged} scans did not converge")));
    Ok(Outcome { text, failure })
}
