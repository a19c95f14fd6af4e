//! Level-set pencils and their boundary eigenvalues.
//!
//! For a level `γ` the continuous pencil `(M_γ, N)` has an eigenvalue `iω`
//! exactly when `γ` is a singular value of `G(iω)`; the discrete pencil
//! `(S_γ, T_γ)` has an eigenvalue `e^{iθ}` exactly when `γ` is a singular
//! value of `G(e^{iθ})`.

use core::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{self, dotc, norm2, smallest_singular_value, CMat, Lu, C64};
use crate::prelude::*;
use crate::system::{reduce_angle, Domain, Frequency, StateSpaceSystem};

/// Relative guard: `γ` must satisfy `min σ(R), min σ(S) > GAMMA_GUARD · γ²`.
pub const GAMMA_GUARD: f64 = 1e-10;

/// Multiplicative perturbation applied when `γ` trips the guard.
pub const GAMMA_PERTURBATION: f64 = 1e-8;

/// Default half-width of the band around the imaginary axis / unit circle.
pub const DEFAULT_BAND_TOL: f64 = 1e-8;

/// Eigenvalues with `|β| ≤ tol · max(1, |α|)` are treated as infinite.
const INFINITE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PencilPair {
    /// `M_γ` or `S_γ`.
    pub left: CMat,
    /// `N` or `T_γ`.
    pub right: CMat,
    pub gamma: f64,
    pub domain: Domain,
    /// Smallest singular value of `R = DᴴD - γ²I`.
    pub r_min_sv: f64,
    /// Smallest singular value of `S = DDᴴ - γ²I`.
    pub s_min_sv: f64,
    /// `right` is the identity (continuous time with `E = I`).
    pub right_is_identity: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCrossing {
    pub frequency: Frequency,
    pub raw_eigenvalue: C64,
    pub distance_to_boundary: f64,
    /// Level of the pencil the crossing came from.
    pub gamma: f64,
    pub eigvec_q: Option<Vec<C64>>,
    pub eigvec_s: Option<Vec<C64>>,
}

/// Factorizations of `R` and `S` for a level `γ`.
struct LevelGuards {
    r: Lu,
    s: Lu,
    r_min_sv: f64,
    s_min_sv: f64,
}

fn level_guards(d: &CMat, gamma: f64) -> Result<LevelGuards> {
    let (p, m) = d.shape();
    let g2 = C64::new(gamma * gamma, 0.0);
    let mut r = d.adjoint_matmul(d);
    for i in 0..m {
        r[(i, i)] -= g2;
    }
    let mut s = d.matmul(&d.adjoint());
    for i in 0..p {
        s[(i, i)] -= g2;
    }
    let r_min_sv = smallest_singular_value(&r);
    let s_min_sv = smallest_singular_value(&s);
    let guard = GAMMA_GUARD * gamma * gamma;
    if !(gamma > 0.0) || r_min_sv <= guard || s_min_sv <= guard {
        return Err(Error::GammaNearSingularValueOfD(gamma));
    }
    let r = Lu::factor(&r).ok_or(Error::GammaNearSingularValueOfD(gamma))?;
    let s = Lu::factor(&s).ok_or(Error::GammaNearSingularValueOfD(gamma))?;
    Ok(LevelGuards { r, s, r_min_sv, s_min_sv })
}

/// Assembles the level-set pencil at `gamma`.
pub fn build_pencil(sys: &StateSpaceSystem, gamma: f64) -> Result<PencilPair> {
    let a = sys.a_dense()?;
    let n = sys.n();
    let (b, c, d) = (sys.b(), sys.c(), sys.d());
    let guards = level_guards(d, gamma)?;

    // R⁻¹DᴴC and R⁻¹Bᴴ (m × n), S⁻¹C (p × n)
    let rinv_dc = guards.r.solve(&d.adjoint().matmul(c));
    let rinv_bh = guards.r.solve(&b.adjoint());
    let sinv_c = guards.s.solve(c);

    let f = a.sub(&b.matmul(&rinv_dc));
    let upper_right = b.matmul(&rinv_bh).scale_real(-gamma);
    let lower_left = c.adjoint().matmul(&sinv_c).scale_real(gamma);
    let e = sys.e_dense()?;

    let mut left = CMat::zeros(2 * n, 2 * n);
    let mut right = CMat::zeros(2 * n, 2 * n);
    left.set_block(0, 0, &f);
    left.set_block(0, n, &upper_right);
    right.set_block(0, 0, &e);
    match sys.domain() {
        Domain::Continuous => {
            left.set_block(n, 0, &lower_left);
            left.set_block(n, n, &f.adjoint().scale_real(-1.0));
            right.set_block(n, n, &e.adjoint());
        }
        Domain::Discrete => {
            left.set_block(n, n, &e.adjoint());
            right.set_block(n, 0, &lower_left.scale_real(-1.0));
            right.set_block(n, n, &f.adjoint());
        }
    }
    Ok(PencilPair {
        left,
        right,
        gamma,
        domain: sys.domain(),
        r_min_sv: guards.r_min_sv,
        s_min_sv: guards.s_min_sv,
        right_is_identity: sys.domain() == Domain::Continuous && sys.e_is_identity(),
    })
}

/// [`build_pencil`], nudging `gamma` up by `(1 + 1e-8)` while it sits on a
/// singular value of `D`.
pub fn build_pencil_guarded(sys: &StateSpaceSystem, gamma: f64) -> Result<PencilPair> {
    let mut g = gamma;
    for _ in 0..8 {
        match build_pencil(sys, g) {
            Err(Error::GammaNearSingularValueOfD(_)) => g *= 1.0 + GAMMA_PERTURBATION,
            other => return other,
        }
    }
    build_pencil(sys, g)
}

/// Eigenvalues of the pencil within `band_tol` of the imaginary axis (or the
/// unit circle), as sorted, deduplicated frequencies.
pub fn boundary_eigenvalues(pencil: &PencilPair, band_tol: f64, want_eigvecs: bool) -> Result<Vec<BoundaryCrossing>> {
    let eigs: Vec<C64> = if pencil.right_is_identity {
        linalg::eigenvalues(&pencil.left).map_err(|_| Error::EigensolveFailure)?
    } else {
        linalg::generalized_eigenvalues(&pencil.left, &pencil.right)
            .map_err(|_| Error::EigensolveFailure)?
            .into_iter()
            .filter(|g| !g.is_infinite(INFINITE_TOL))
            .map(|g| g.value())
            .collect()
    };

    let mut raw: Vec<(f64, C64, f64)> = Vec::new();
    for lam in eigs {
        if !(lam.re.is_finite() && lam.im.is_finite()) {
            continue;
        }
        let (dist, freq) = match pencil.domain {
            Domain::Continuous => (lam.re.abs(), lam.im),
            Domain::Discrete => ((lam.norm() - 1.0).abs(), reduce_angle(lam.arg())),
        };
        if dist <= band_tol {
            raw.push((freq, lam, dist));
        }
    }
    raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));

    let merged = merge_close(raw, pencil.domain);
    let n = pencil.left.rows() / 2;
    let mut out = Vec::with_capacity(merged.len());
    for (freq, lam, dist) in merged {
        let (q, s) = if want_eigvecs {
            let right = if pencil.right_is_identity { None } else { Some(&pencil.right) };
            let (x, _) = linalg::inverse_iteration(&pencil.left, right, lam);
            (Some(x[..n].to_vec()), Some(x[n..].to_vec()))
        } else {
            (None, None)
        };
        out.push(BoundaryCrossing {
            frequency: Frequency::new(pencil.domain, freq),
            raw_eigenvalue: lam,
            distance_to_boundary: dist,
            gamma: pencil.gamma,
            eigvec_q: q,
            eigvec_s: s,
        });
    }
    Ok(out)
}

/// Merges sorted crossings closer than `1e-10 · max(1, span)` into their mean.
fn merge_close(sorted: Vec<(f64, C64, f64)>, domain: Domain) -> Vec<(f64, C64, f64)> {
    if sorted.len() < 2 {
        return sorted;
    }
    let span = sorted.last().unwrap().0 - sorted[0].0;
    let tol = 1e-10 * span.max(1.0);
    let mut groups: Vec<Vec<(f64, C64, f64)>> = Vec::new();
    for item in sorted {
        match groups.last_mut() {
            Some(g) if item.0 - g.last().unwrap().0 <= tol => g.push(item),
            _ => groups.push(vec![item]),
        }
    }
    if domain == Domain::Discrete && groups.len() > 1 {
        let first = groups[0][0].0;
        let last = groups.last().unwrap().last().unwrap().0;
        if first + TAU - last <= tol {
            // the seam group joins the first one, in unwrapped coordinates
            let tail = groups.pop().unwrap();
            let head = &mut groups[0];
            let mut joined: Vec<(f64, C64, f64)> = tail.into_iter().map(|(f, l, d)| (f - TAU, l, d)).collect();
            joined.append(head);
            *head = joined;
        }
    }
    let mut out: Vec<(f64, C64, f64)> = groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|x| x.0).sum::<f64>() / g.len() as f64;
            let best = g.iter().min_by(|x, y| x.2.partial_cmp(&y.2).unwrap_or(core::cmp::Ordering::Equal)).unwrap();
            let f = if domain == Domain::Discrete { reduce_angle(mean) } else { mean };
            (f, best.1, best.2)
        })
        .collect();
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
    out
}

/// `g'` at a crossing, from the pencil eigenvector alone: after recovering the
/// singular vectors `(v, u)` from `(q, s)` and rescaling,
/// `g' = -Re(i sᴴEq)` (continuous) or `-Re(i e^{iθ} sᴴEq)` (discrete).
pub fn derivative_from_eigenvector(crossing: &BoundaryCrossing, sys: &StateSpaceSystem) -> Result<f64> {
    let (q, s) = match (&crossing.eigvec_q, &crossing.eigvec_s) {
        (Some(q), Some(s)) => (q, s),
        _ => return Err(Error::MissingEigenvectors),
    };
    let gamma = crossing.gamma;
    let guards = level_guards(sys.d(), gamma)?;
    let d = sys.d();
    let cq = sys.c().mul_vec(q);
    let bs = sys.b().adjoint_mul_vec(s);

    // [v; u] = [[-R⁻¹Dᴴ, -γR⁻¹], [-γS⁻¹, -DR⁻¹]] [Cq; Bᴴs]
    let mut v_rhs: Vec<C64> = d.adjoint_mul_vec(&cq).iter().zip(&bs).map(|(x, y)| -(x + y * gamma)).collect();
    guards.r.solve_in_place(&mut v_rhs);
    let v = v_rhs;
    let mut rinv_bs = bs.clone();
    guards.r.solve_in_place(&mut rinv_bs);
    let mut sinv_cq = cq.clone();
    guards.s.solve_in_place(&mut sinv_cq);
    let d_rinv_bs = d.mul_vec(&rinv_bs);
    let u: Vec<C64> = sinv_cq.iter().zip(&d_rinv_bs).map(|(x, y)| -(x * gamma) - y).collect();

    let kappa2 = norm2(&u) * norm2(&v);
    if !(kappa2 > 0.0) {
        return Err(Error::MissingEigenvectors);
    }
    let seq = dotc(s, &sys.apply_e(q));
    let factor = match sys.domain() {
        Domain::Continuous => C64::new(0.0, 1.0),
        Domain::Discrete => C64::new(0.0, 1.0) * C64::from_polar(1.0, crossing.frequency.value),
    };
    Ok(-(factor * seq).re / kappa2)
}
