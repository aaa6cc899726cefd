//! End-to-end acceptance checks; prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rtfw_core::cutoff_radii::{derivative_jump, r_of_beta, r_tilde, TildeObjective};
use rtfw_core::radial_solver::{
    energy_gradient, evaluate_energy, find_max_ionization, minimize, GridOptions, MinimizeOptions, PhysicalParams,
    RadialGrid,
};
use rtfw_core::solve1d::log_space;
use rtfw_core::special_functions::{
    appendix_bounds_report, g_function, h_ratio, min_g, minimize_h, phase_space_report,
};
use rtfw_core::stability_bound::{constant_of_a, stability_constant, teller_constant};

const A_REF: f64 = 0.6116832747;
const COEFF_REF: f64 = 2.557211758;
const ALPHA: f64 = 1.0 / 137.0;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, format!("took {elapsed:.2?}, limit {limit_s} s"))
}

fn ionization_constant() -> Check {
    let t = Instant::now();
    let h = minimize_h();
    let coeff = 2.0 / h.a.sqrt();
    within(t.elapsed(), 1.0)?;
    ensure((h.a - A_REF).abs() <= 1e-8, format!("a = {:.12}", h.a))?;
    ensure((coeff - COEFF_REF).abs() <= 1e-8, format!("2/√a = {coeff:.12}"))?;
    ensure(((2.0 / A_REF.sqrt()) - COEFF_REF).abs() <= 1e-9, "reference values inconsistent")?;
    Ok(format!("a = {:.12}, 2/√a = {coeff:.12}, s* = {:.6}", h.a, h.s_star))
}

fn h_range() -> Check {
    let t = Instant::now();
    let h = minimize_h();
    ensure((h.b - 1.0).abs() <= 1e-6, format!("b = {}", h.b))?;
    let grid = log_space(1e-8, 1e8, 10_000);
    let mut outside = 0;
    for &s in &grid {
        let v = h_ratio(s).map_err(|e| e.to_string())?;
        if !(v > 0.0 && v < 1.0) {
            outside += 1;
        }
    }
    ensure(outside == 0, format!("{outside} grid points outside (0, 1)"))?;
    // H increases towards its supremum at the top of the range.
    let tail: Vec<f64> = [1e4, 1e6, 1e8].iter().map(|&s| h_ratio(s).unwrap()).collect();
    ensure(tail.windows(2).all(|w| w[1] > w[0]), "H not increasing at large s")?;
    let small = h_ratio(1e-6).map_err(|e| e.to_string())?;
    ensure((small - 2.0 / 3.0).abs() <= 1e-3, format!("H(1e-6) = {small}"))?;
    within(t.elapsed(), 1.0)?;
    Ok(format!(
        "b = {} (limit s → ∞; largest sampled H = {:.6}), H(1e-6) = {small:.9}, 10⁴ points in (0, 1)",
        h.b, h.scan_sup
    ))
}

fn elementary_inequalities() -> Check {
    let t = Instant::now();
    let report = appendix_bounds_report(&log_space(1e-8, 1e8, 10_000));
    within(t.elapsed(), 5.0)?;
    let names: Vec<&str> = report.inequalities.iter().map(|i| i.name.as_str()).collect();
    ensure(report.inequalities.len() == 7, format!("expected 7 checks, got {names:?}"))?;
    ensure(report.all_passed(), format!("{} failures", report.total_failures))?;
    Ok(format!("{} checks × {} points, 0 failures", report.inequalities.len(), report.samples))
}

fn phase_space_sandwich() -> Check {
    let report = phase_space_report(&log_space(1e-8, 1e8, 10_000));
    ensure(report.all_passed(), format!("{} failures", report.total_failures))?;
    Ok(format!("{} checks × {} points, 0 failures", report.inequalities.len(), report.samples))
}

fn brute_force_argmin(f: impl Fn(f64) -> f64) -> f64 {
    let grid = log_space(1e-6, 1e6, 1_000_000);
    let mut best = (f64::INFINITY, 0.0);
    for r in grid {
        let v = f(r);
        if v < best.0 {
            best = (v, r);
        }
    }
    best.1
}

fn cutoff_radii() -> Check {
    let t = Instant::now();
    let mut worst_diag: f64 = 0.0;
    for beta in log_space(1e-3, 1e3, 100) {
        let plain = r_of_beta(beta).map_err(|e| e.to_string())?.r_min;
        let tilde = r_tilde(beta, beta).map_err(|e| e.to_string())?.r_min;
        worst_diag = worst_diag.max(((plain - tilde) / plain).abs());
    }
    ensure(worst_diag <= 1e-10, format!("diagonal identity off by {worst_diag:e}"))?;

    let mut worst_jump: f64 = 0.0;
    for beta in [0.05, 0.3, 1.0, 4.0, 20.0] {
        let obj = TildeObjective::new(1.0, beta).map_err(|e| e.to_string())?;
        let rb = obj.r_beta;
        let h = 1e-4 * rb;
        let f = |r| obj.eval(r);
        // Second-order one-sided differences.
        let right = (-3.0 * f(rb) + 4.0 * f(rb + h) - f(rb + 2.0 * h)) / (2.0 * h);
        let left = (3.0 * f(rb - 1e-15 * rb) - 4.0 * f(rb - h) + f(rb - 2.0 * h)) / (2.0 * h);
        let expected = 3.0 / (rb * rb * rb.asinh().powi(3));
        ensure((derivative_jump(rb) - expected).abs() <= 1e-14 * expected, "closed-form jump mismatch")?;
        worst_jump = worst_jump.max(((right - left - expected) / expected).abs());
    }
    ensure(worst_jump <= 1e-6, format!("derivative jump off by {worst_jump:e}"))?;

    let pairs = [
        (0.5, 1.0),
        (2.0, 1.0),
        (1.0, 1.0),
        (10.0, 1.0),
        (0.1, 0.1),
        (5.0, 2.0),
        (0.05, 3.0),
        (100.0, 10.0),
        (0.3, 0.01),
        (1e3, 50.0),
    ];
    let mut worst_brute: f64 = 0.0;
    for (alpha, beta) in pairs {
        let obj = TildeObjective::new(alpha, beta).map_err(|e| e.to_string())?;
        let r = obj.minimize().map_err(|e| e.to_string())?.0.r_min;
        let brute = brute_force_argmin(|x| obj.eval(x));
        worst_brute = worst_brute.max(((brute - r) / r).abs());
    }
    ensure(worst_brute <= 1e-4, format!("brute-force mismatch {worst_brute:e}"))?;
    within(t.elapsed(), 10.0)?;
    Ok(format!(
        "diagonal {worst_diag:.1e}, jump {worst_jump:.1e}, brute force {worst_brute:.1e} (10 pairs)"
    ))
}

fn g_function_limits() -> Check {
    let g = g_function(1e-6).map_err(|e| e.to_string())?;
    ensure((g - 1.5).abs() <= 1e-3, format!("g(1e-6) = {g}"))?;
    let m = min_g();
    ensure(m.c_g > 0.0, format!("c_g = {}", m.c_g))?;
    Ok(format!("g(1e-6) = {g:.9}, c_g = {:.9} at s = {:.6}", m.c_g, m.s_min))
}

fn smooth_field(rng: &mut ChaCha8Rng, grid: &RadialGrid) -> Vec<f64> {
    let terms: Vec<(f64, f64)> = (0..3)
        .map(|_| (10f64.powf(rng.random_range(-3.0..0.0)), ALPHA * 10f64.powf(rng.random_range(-1.0..1.0))))
        .collect();
    let r_max = grid.r_max();
    grid.r()
        .iter()
        .map(|&r| terms.iter().map(|(a, b)| a * ((-b * r).exp() - (-b * r_max).exp())).sum())
        .collect()
}

fn gradient_correctness() -> Check {
    let t = Instant::now();
    let grid = RadialGrid::new(GridOptions::for_coupling(ALPHA).with_n(500)).map_err(|e| e.to_string())?;
    let params = PhysicalParams::atom(2.0, 2.0, 1.0, ALPHA);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let chi = smooth_field(&mut rng, &grid);
        let (k, phase) = (rng.random_range(0.5..3.0), rng.random_range(0.0..std::f64::consts::PI));
        let dir: Vec<f64> = chi
            .iter()
            .zip(grid.r())
            .map(|(c, r)| c * (k * (ALPHA * r).ln() + phase).sin())
            .collect();
        let g = energy_gradient(&chi, &grid, &params).map_err(|e| e.to_string())?;
        let analytic: f64 = g.iter().zip(&dir).zip(grid.weights()).map(|((g, d), w)| g * d * w).sum();
        let e = |s: f64| {
            let f: Vec<f64> = chi.iter().zip(&dir).map(|(c, d)| c + s * d).collect();
            evaluate_energy(&f, &grid, &params).unwrap().total
        };
        let h = 1e-4;
        let d1 = (e(h) - e(-h)) / (2.0 * h);
        let d2 = (e(h / 2.0) - e(-h / 2.0)) / h;
        let numeric = (4.0 * d2 - d1) / 3.0;
        worst = worst.max(((numeric - analytic) / analytic).abs());
    }
    within(t.elapsed(), 30.0)?;
    ensure(worst <= 1e-6, format!("worst relative mismatch {worst:e}"))?;
    Ok(format!("20 fields at n = 500, worst relative mismatch {worst:.1e}"))
}

/// `(Z, N, energy)` of converged solves, for the soundness check.
type Solves = Vec<(f64, f64, f64)>;

fn binding(solves: &mut Solves) -> Check {
    let grid = RadialGrid::new(GridOptions::for_coupling(ALPHA)).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    for z in [1.0, 10.0] {
        let res = minimize(&PhysicalParams::atom(z, z, 1.0, ALPHA), &grid, &MinimizeOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(res.converged, format!("Z = {z} did not converge"))?;
        let rel = ((res.particle_number - z) / z).abs();
        ensure(rel <= 1e-4, format!("Z = {z}: particle number {}", res.particle_number))?;
        ensure(res.multiplier >= 0.0, format!("Z = {z}: multiplier {}", res.multiplier))?;
        solves.push((z, z, res.energy.total));
        details.push(format!(
            "Z = {z}: N = {:.8}, μ = {:.3e}, E = {:.9e}, residual {:.1e}",
            res.particle_number, res.multiplier, res.energy.total, res.euler_residual
        ));
    }
    Ok(format!("n = 2000; {}", details.join("; ")))
}

fn excess_charge(solves: &mut Solves) -> Check {
    let mut details = Vec::new();
    for n in [600, 2000] {
        let grid = RadialGrid::new(GridOptions::for_coupling(ALPHA).with_n(n)).map_err(|e| e.to_string())?;
        let mut row = Vec::new();
        for z in [1.0, 2.0, 5.0] {
            let scan = find_max_ionization(z, 1.0, ALPHA, &grid, &MinimizeOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(scan.converged, format!("n = {n}, Z = {z}: scan did not converge"))?;
            ensure(
                scan.n_max >= z - 1e-3 * z && scan.n_max < COEFF_REF * z,
                format!("n = {n}, Z = {z}: N_max = {}", scan.n_max),
            )?;
            solves.extend(scan.steps.iter().filter(|s| s.converged).map(|s| (z, s.n, s.energy)));
            row.push(format!("{:.4}", scan.n_max));
        }
        details.push(format!("n = {n}: N_max(1, 2, 5) = {}", row.join(", ")));
    }
    Ok(details.join("; "))
}

fn stability_soundness(solves: &Solves) -> Check {
    ensure(!solves.is_empty(), "no converged solves recorded")?;
    let mut min_gap = f64::INFINITY;
    for &(z, n, energy) in solves {
        let bound = stability_constant(1.0, ALPHA, &[z], n, None).map_err(|e| e.to_string())?;
        ensure(energy >= bound.lower_bound, format!("Z = {z}, N = {n}: E = {energy} < {}", bound.lower_bound))?;
        min_gap = min_gap.min(energy - bound.lower_bound);
    }
    let grid = log_space(1e-3, 1e4, 200);
    let mut prev = f64::NEG_INFINITY;
    for a in grid {
        let (_, log10_c) = constant_of_a(1.0, ALPHA, a).map_err(|e| e.to_string())?;
        ensure(log10_c > prev, format!("C(A) not increasing at A = {a}"))?;
        prev = log10_c;
    }
    Ok(format!("{} solves above the bound (smallest gap {min_gap:.3e}); C(A) increasing on 200 A values", solves.len()))
}

fn vacuum_cases() -> Check {
    let grid = RadialGrid::new(GridOptions::for_coupling(ALPHA).with_n(400)).map_err(|e| e.to_string())?;
    let res = minimize(&PhysicalParams::atom(0.0, 1.0, 1.0, ALPHA), &grid, &MinimizeOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(res.chi.iter().all(|&c| c == 0.0), "Z = 0 field not identically zero")?;
    ensure(res.energy.total == 0.0, format!("Z = 0 energy {}", res.energy.total))?;
    let (a, _) = teller_constant(&[]).map_err(|e| e.to_string())?;
    ensure(a == 0.0, format!("A = {a}"))?;
    let report = stability_constant(1.0, ALPHA, &[], 3.0, None).map_err(|e| e.to_string())?;
    ensure(report.lower_bound == -3.0, format!("bound {}", report.lower_bound))?;
    Ok("Z = 0: χ ≡ 0, E = 0; no nuclei: A = 0, bound = −N".into())
}

fn determinism() -> Check {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let conf = dir.join("solve.conf");
    std::fs::write(&conf, "Z = 1\nN = 1\nlambda = 1\ngrid-n = 2000\n").map_err(|e| e.to_string())?;
    let conf = conf.to_str().unwrap().to_string();
    let runs: [&[&str]; 2] = [&["constants"], &["--config", &conf, "solve-atom"]];
    for args in runs {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                let out = Command::new(env!("CARGO_BIN_EXE_rtfw")).args(args).output().unwrap();
                assert!(out.status.success(), "{args:?} failed");
                out.stdout
            })
            .collect();
        ensure(outputs[0] == outputs[1], format!("{args:?} output differs between runs"))?;
        serde_json::from_slice::<serde_json::Value>(&outputs[0]).map_err(|e| e.to_string())?;
    }
    Ok("constants and solve-atom byte-identical across runs".into())
}

fn main() {
    let mut solves = Solves::new();
    let mut results: Vec<(u32, &str, Check, Duration)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        results.push((id, name, r, t.elapsed()));
    };
    run(1, "ionization constant", &mut ionization_constant);
    run(2, "H range", &mut h_range);
    run(3, "elementary inequalities", &mut elementary_inequalities);
    run(4, "phase-space sandwich", &mut phase_space_sandwich);
    run(5, "cutoff radii", &mut cutoff_radii);
    run(6, "g function", &mut g_function_limits);
    run(7, "gradient correctness", &mut gradient_correctness);
    run(8, "binding at N = Z", &mut || binding(&mut solves));
    run(9, "excess-charge bracket", &mut || excess_charge(&mut solves));
    run(10, "stability soundness", &mut || stability_soundness(&solves));
    run(11, "vacuum cases", &mut vacuum_cases);
    run(12, "determinism", &mut determinism);

    let mut failed = 0;
    for (id, name, result, elapsed) in &results {
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} [{elapsed:.2?}]: {detail}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name} [{elapsed:.2?}]: {msg}");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
