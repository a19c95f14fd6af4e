//! Reproducible random stable systems.

use hinf_core::linalg::{eigenvalues, generalized_eigenvalues, CMat, CscMatrix, C64};
use hinf_core::system::INFINITE_EIG_TOL;
use hinf_core::{Domain, Error, Result, StateSpaceSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    /// Fraction of nonzero entries in `A` (1 for a full matrix).
    pub density: f64,
    pub domain: Domain,
    /// Draw a random invertible `E = I + 0.3·N` instead of `E = I`.
    pub descriptor: bool,
    /// Keep `A` and `E` in sparse storage.
    pub sparse: bool,
}

impl RandomSpec {
    pub fn dense(n: usize, m: usize, p: usize, domain: Domain) -> Self {
        Self { n, m, p, density: 1.0, domain, descriptor: false, sparse: false }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn normal_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    let data = (0..r * c).map(|_| C64::new(normal(rng), 0.0)).collect();
    CMat::from_col_major(r, c, data)
}

/// One system from `rng`: standard normal entries, then `A` is shifted to
/// `A - (α_max + 0.5)E` (continuous) or scaled to spectral radius 0.9
/// (discrete), using the finite spectrum of `(A, E)`.
pub fn random_system(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Result<StateSpaceSystem> {
    let RandomSpec { n, m, p, density, domain, descriptor, sparse } = *spec;
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::EmptySystem);
    }
    if !(0.0..=1.0).contains(&density) || density == 0.0 {
        return Err(Error::InvalidConfig(format!("density {density} outside (0, 1]")));
    }
    let mut a = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            // the diagonal is always drawn so that A keeps full structural rank
            if i == j || density >= 1.0 || rng.random::<f64>() < density {
                a[(i, j)] = C64::new(normal(rng), 0.0);
            }
        }
    }
    let b = normal_matrix(rng, n, m);
    let c = normal_matrix(rng, p, n);
    let d = normal_matrix(rng, p, m);
    let e = descriptor.then(|| {
        let mut e = normal_matrix(rng, n, n).scale_real(0.3);
        for i in 0..n {
            e[(i, i)] += C64::new(1.0, 0.0);
        }
        e
    });

    let spectrum: Vec<C64> = match &e {
        None => eigenvalues(&a).map_err(|_| Error::EigensolveFailure)?,
        Some(e) => generalized_eigenvalues(&a, e)
            .map_err(|_| Error::EigensolveFailure)?
            .into_iter()
            .filter(|g| !g.is_infinite(INFINITE_EIG_TOL))
            .map(|g| g.value())
            .collect(),
    };
    let eye = CMat::identity(n);
    let e_ref = e.as_ref().unwrap_or(&eye);
    match domain {
        Domain::Continuous => {
            let alpha = spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            a = a.sub(&e_ref.scale_real(alpha + 0.5));
        }
        Domain::Discrete => {
            let rho = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if rho > 0.0 {
                a = a.scale_real(0.9 / rho);
            }
        }
    }
    if sparse {
        let drop_zeros = |m: &CMat| {
            let t: Vec<(usize, usize, C64)> =
                CscMatrix::from_dense(m).triplets().into_iter().filter(|&(_, _, v)| v != C64::new(0.0, 0.0)).collect();
            CscMatrix::from_triplets(m.rows(), m.cols(), &t)
        };
        StateSpaceSystem::new_sparse(drop_zeros(&a), b, c, d, e.as_ref().map(drop_zeros), domain)
    } else {
        StateSpaceSystem::new(a, b, c, d, e, domain)
    }
}

/// `count` systems from a single stream seeded with `seed`.
pub fn random_systems(seed: u64, count: usize, spec: &RandomSpec) -> Result<Vec<StateSpaceSystem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_system(&mut rng, spec)).collect()
}
