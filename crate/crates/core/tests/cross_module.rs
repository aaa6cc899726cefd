use rtfw_core::ionization_analysis::ionization_bound;
use rtfw_core::radial_solver::*;
use rtfw_core::stability_bound::stability_constant;

fn grid(alpha_s: f64, n: usize) -> RadialGrid {
    RadialGrid::new(GridOptions::for_coupling(alpha_s).with_n(n)).unwrap()
}

#[test]
fn achieved_energies_respect_the_lower_bound() {
    for (z, n, lambda, alpha_s) in [
        (1.0, 1.0, 1.0, 1.0 / 137.0),
        (1.0, 2.0, 0.5, 1.0 / 137.0),
        (3.0, 2.0, 1.0, 0.05),
        (6.0, 6.0, 0.5, 0.05),
    ] {
        let params = PhysicalParams::atom(z, n, lambda, alpha_s);
        let res = minimize(&params, &grid(alpha_s, 600), &MinimizeOptions::default()).unwrap();
        assert!(res.converged, "Z={z} N={n}");
        let bound = stability_constant(lambda, alpha_s, &[z], n, None).unwrap();
        // C(A) exceeds the floating-point range for larger charges; the bound is then −∞.
        if z == 1.0 {
            assert!(bound.lower_bound.is_finite());
        }
        assert!(bound.log10_c_of_a.is_finite());
        assert!(res.energy.total >= bound.lower_bound, "Z={z}: {} < {}", res.energy.total, bound.lower_bound);
        assert!(bound.case1_w_coefficient >= 0.0 && bound.case1_t_coefficient >= 0.0);
    }
}

#[test]
fn stability_bound_is_reproducible() {
    let a = stability_constant(1.0, 1.0 / 137.0, &[1.0], 1.0, None).unwrap();
    let b = stability_constant(1.0, 1.0 / 137.0, &[1.0], 1.0, None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn solver_n_max_stays_below_the_analytic_bound() {
    let opts = MinimizeOptions::default();
    for alpha_s in [1.0 / 137.0, 0.05] {
        let g = grid(alpha_s, 400);
        for lambda in [0.5, 1.0] {
            let mut previous = 0.0;
            for z in [1.0, 2.0, 5.0, 10.0] {
                let scan = find_max_ionization(z, lambda, alpha_s, &g, &opts).unwrap();
                let report = ionization_bound(z).unwrap().with_solver_n_max(scan.n_max);
                assert_eq!(report.bracket_holds(1e-3), Some(true), "Z={z} λ={lambda} α={alpha_s}: {}", scan.n_max);
                assert!(scan.n_max >= previous);
                previous = scan.n_max;
            }
        }
    }
}
