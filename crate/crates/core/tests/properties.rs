mod common;

use std::f64::consts::TAU;

use common::{g, grid, max_on, random_stable, sign_changes};
use hinf_core::pencil::{boundary_eigenvalues, build_pencil, DEFAULT_BAND_TOL};
use hinf_core::{hinf_approx_local, hinf_norm, AlgoConfig, Domain, StateSpaceSystem, Variant};
use proptest::prelude::*;

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Continuous), Just(Domain::Discrete)]
}

fn system() -> impl Strategy<Value = StateSpaceSystem> {
    (any::<u64>(), 2usize..=8, 1usize..=3, 1usize..=3, domain()).prop_map(|(seed, n, m, p, d)| random_stable(seed, n, m, p, d))
}

fn crossings(sys: &StateSpaceSystem, gamma: f64) -> Vec<f64> {
    let pencil = build_pencil(sys, gamma).unwrap();
    let mut out: Vec<f64> = boundary_eigenvalues(&pencil, DEFAULT_BAND_TOL, false).unwrap().iter().map(|c| c.frequency.value).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn close(domain: Domain, a: f64, b: f64, tol: f64) -> bool {
    match domain {
        Domain::Continuous => (a - b).abs() <= tol * a.abs().max(1.0),
        Domain::Discrete => {
            let d = (a - b).rem_euclid(TAU);
            d.min(TAU - d) <= tol
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn level_set_matches_sampled_sign_changes(sys in system(), t in 0.1f64..0.9) {
        let pts = grid(sys.domain(), 40_000);
        let top = max_on(&sys, &pts);
        let low = g(&sys, pts[pts.len() / 3]);
        let gamma = low + t * (top - low);
        // the pencil is undefined where γ is a singular value of D
        prop_assume!(hinf_core::linalg::Svd::compute(sys.d()).s.iter().all(|&s| (s - gamma).abs() > 1e-3 * gamma));
        let oracle = sign_changes(&sys, &pts, gamma);
        let found = crossings(&sys, gamma);
        // every pencil crossing is a level crossing of g
        for &w in &found {
            prop_assert!((g(&sys, w) - gamma).abs() <= 1e-6 * gamma, "γ = {gamma}, g({w}) = {}", g(&sys, w));
        }
        for &w in &oracle {
            prop_assert!(found.iter().any(|&f| close(sys.domain(), w, f, 1e-6)), "missing {w}: {found:?}");
        }
    }

    #[test]
    fn continuous_crossings_are_symmetric(seed in any::<u64>(), n in 2usize..=8, t in 0.1f64..0.9) {
        let sys = random_stable(seed, n, 2, 2, Domain::Continuous);
        let top = max_on(&sys, &grid(Domain::Continuous, 4000));
        let gamma = top * (0.5 + 0.5 * t);
        prop_assume!(hinf_core::linalg::Svd::compute(sys.d()).s.iter().all(|&s| (s - gamma).abs() > 1e-3 * gamma));
        let found = crossings(&sys, gamma);
        for &w in &found {
            prop_assert!(found.iter().any(|&f| (f + w).abs() <= 1e-8 * w.abs().max(1.0)), "{w} has no mirror in {found:?}");
        }
    }

    #[test]
    fn no_crossings_above_the_norm(sys in system()) {
        let norm = hinf_norm(&sys, &AlgoConfig::default()).unwrap().gamma;
        for k in 1..=5 {
            let gamma = norm * (1.0 + 1e-6 * 10f64.powi(k));
            let found = crossings(&sys, gamma);
            prop_assert!(found.is_empty(), "crossings {found:?} at {gamma} > {norm}");
        }
    }

    #[test]
    fn certified_norm_bounds_a_fine_sweep(sys in system()) {
        let r = hinf_norm(&sys, &AlgoConfig::default()).unwrap();
        prop_assert!(r.certified_global);
        let sweep = max_on(&sys, &grid(sys.domain(), 300_000));
        prop_assert!(sweep <= r.gamma * (1.0 + 1e-8), "sweep {sweep} > γ {}", r.gamma);
    }

    #[test]
    fn hybrid_dominates_midpoint_and_local(sys in system()) {
        let bbbs = hinf_norm(&sys, &AlgoConfig::with_variant(Variant::BBBS)).unwrap().gamma;
        for v in Variant::EXACT {
            let r = hinf_norm(&sys, &AlgoConfig::with_variant(v)).unwrap();
            prop_assert!(r.gamma >= bbbs - 1e-12 * bbbs, "{}: {} < {bbbs}", v.name(), r.gamma);
            prop_assert!(r.history.windows(2).all(|w| w[1].1 > w[0].1), "{}: {:?}", v.name(), r.history);
        }
        let local = hinf_approx_local(&sys, &AlgoConfig::default()).unwrap().gamma;
        prop_assert!(local <= bbbs * (1.0 + 1e-12));
    }

    #[test]
    fn real_continuous_gain_is_even(seed in any::<u64>(), n in 1usize..=8, w in 0.0f64..50.0) {
        let sys = random_stable(seed, n, 2, 3, Domain::Continuous);
        let (plus, minus) = (g(&sys, w), g(&sys, -w));
        prop_assert!((plus - minus).abs() <= 1e-12 * plus);
    }
}

/// Systems whose peak sits above `‖D‖₂` while every seed sits below it, or
/// whose best seed is a local minimum of the gain.
#[test]
fn feedthrough_dominated_seeds() {
    for seed in [39u64, 90, 105, 117] {
        let n = 2 + seed as usize % 7;
        let sys = random_stable(seed, n, 1 + seed as usize % 3, 1 + (seed as usize / 3) % 3, Domain::Continuous);
        let sweep = max_on(&sys, &grid(Domain::Continuous, 20_000));
        assert!(sweep > sys.d_norm());
        for v in Variant::EXACT {
            let r = hinf_norm(&sys, &AlgoConfig::with_variant(v)).unwrap();
            assert!(r.certified_global && !r.frequency.at_infinity, "seed {seed} {}: {r:?}", v.name());
            assert!(sweep <= r.gamma * (1.0 + 1e-12), "seed {seed} {}: {} < {sweep}", v.name(), r.gamma);
        }
    }
}
