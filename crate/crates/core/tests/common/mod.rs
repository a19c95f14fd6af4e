//! Small random stable systems and grid oracles shared by the property tests.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use hinf_core::linalg::{eigenvalues, CMat, C64};
use hinf_core::transfer::gain;
use hinf_core::{Domain, Frequency, StateSpaceSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Real stable system with standard normal data. Continuous systems get
/// `A` shifted left of `Re = -0.5`, discrete ones scaled to spectral radius 0.9.
pub fn random_stable(seed: u64, n: usize, m: usize, p: usize, domain: Domain) -> StateSpaceSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |r: usize, c: usize| CMat::from_fn(r, c, |_, _| C64::new(rng.sample(StandardNormal), 0.0));
    let mut a = draw(n, n);
    let (b, c, d) = (draw(n, m), draw(p, n), draw(p, m));
    let eigs = eigenvalues(&a).unwrap();
    match domain {
        Domain::Continuous => {
            let shift = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) + 0.5;
            for i in 0..n {
                a[(i, i)] -= C64::new(shift, 0.0);
            }
        }
        Domain::Discrete => {
            let rho = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            a = a.scale_real(0.9 / rho);
        }
    }
    StateSpaceSystem::new(a, b, c, d, None, domain).unwrap()
}

pub fn g(sys: &StateSpaceSystem, x: f64) -> f64 {
    gain(sys, Frequency::new(sys.domain(), x)).unwrap()
}

/// Sample frequencies: `ω = tan(φ)` on a uniform `φ` grid for continuous
/// time, a uniform angle grid for discrete time.
pub fn grid(domain: Domain, points: usize) -> Vec<f64> {
    match domain {
        Domain::Continuous => (1..points).map(|j| (-FRAC_PI_2 + j as f64 * std::f64::consts::PI / points as f64).tan()).collect(),
        Domain::Discrete => (0..=points).map(|j| j as f64 * TAU / points as f64).collect(),
    }
}

/// Sign changes of `g - γ` on `points`, refined by bisection.
pub fn sign_changes(sys: &StateSpaceSystem, points: &[f64], gamma: f64) -> Vec<f64> {
    let vals: Vec<f64> = points.iter().map(|&x| g(sys, x) - gamma).collect();
    let mut out = Vec::new();
    for j in 0..points.len() - 1 {
        if (vals[j] > 0.0) != (vals[j + 1] > 0.0) {
            let (mut lo, mut hi) = (points[j], points[j + 1]);
            let up = vals[j] > 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if (g(sys, mid) - gamma > 0.0) == up {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    out
}

pub fn max_on(sys: &StateSpaceSystem, points: &[f64]) -> f64 {
    points.iter().map(|&x| g(sys, x)).fold(0.0, f64::max)
}
