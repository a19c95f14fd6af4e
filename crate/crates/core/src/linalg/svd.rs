//! Singular value decompositions of small dense complex matrices.
//!
//! The full decomposition uses one-sided (Hestenes) Jacobi rotations, which
//! deliver singular values with high relative accuracy and orthonormal
//! singular vectors. For wide matrices the adjoint is decomposed instead.

use crate::prelude::*;

use super::{dotc, norm2, normalize, CMat, C64};

/// `A = U diag(s) V^H` with `s` sorted in descending order.
///
/// `u` is `rows × rows` and `v` is `cols × cols`; the trailing columns past
/// `min(rows, cols)` complete the bases of the respective spaces.
#[derive(Clone, Debug)]
pub struct Svd {
    pub s: Vec<f64>,
    pub u: CMat,
    pub v: CMat,
}

const MAX_SWEEPS: usize = 80;

impl Svd {
    pub fn compute(a: &CMat) -> Svd {
        let (p, m) = a.shape();
        if p >= m {
            let (s, u, v) = jacobi_tall(a);
            Svd { s, u, v }
        } else {
            let (s, v, u) = jacobi_tall(&a.adjoint());
            Svd { s, u, v }
        }
    }

    pub fn rank_dim(&self) -> usize {
        self.s.len()
    }
}

/// One-sided Jacobi on a tall (or square) matrix. Returns `(s, U_full, V)`.
fn jacobi_tall(a: &CMat) -> (Vec<f64>, CMat, CMat) {
    let (p, m) = a.shape();
    let mut w = a.clone();
    let mut v = CMat::identity(m);
    let tol = f64::EPSILON * (p as f64).sqrt().max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..m {
            for j in i + 1..m {
                let alpha = norm2(w.col(i)).powi(2);
                let beta = norm2(w.col(j)).powi(2);
                let gamma = dotc(w.col(i), w.col(j));
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g; // e^{i phi}
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = phase.conj();
                rotate_pair(&mut w, i, j, c, s, e);
                rotate_pair(&mut v, i, j, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<(f64, usize)> = (0..m).map(|k| (norm2(w.col(k)), k)).collect();
    sv.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(core::cmp::Ordering::Equal));
    let order: Vec<usize> = sv.iter().map(|x| x.1).collect();
    let s: Vec<f64> = sv.iter().map(|x| x.0).collect();
    let v = v.columns(&order);

    let smax = s.first().copied().unwrap_or(0.0);
    let mut u = CMat::zeros(p, p);
    let mut filled = 0;
    for (k, &src) in order.iter().enumerate() {
        if s[k] > smax * f64::EPSILON * (p.max(m) as f64) && s[k] > 0.0 {
            let col = w.col(src).to_vec();
            u.col_mut(k).copy_from_slice(&col);
            normalize(u.col_mut(k));
            filled = k + 1;
        } else {
            break;
        }
    }
    // Complete U (null directions and the p > m tail) with Gram-Schmidt on
    // the canonical basis, repeated twice for orthogonality.
    let mut next = filled;
    let mut e = 0;
    while next < p && e < p {
        let mut cand = vec![C64::new(0.0, 0.0); p];
        cand[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for k in 0..next {
                let proj = dotc(u.col(k), &cand);
                for (ci, uk) in cand.iter_mut().zip(u.col(k)) {
                    *ci -= uk * proj;
                }
            }
        }
        let nrm = normalize(&mut cand);
        if nrm > 0.5 {
            u.col_mut(next).copy_from_slice(&cand);
            next += 1;
        }
        e += 1;
    }
    (s, u, v)
}

/// Right-multiplies columns `i`, `j` by the unitary
/// `[[c, s], [-s e, c e]]` where `e` is a unit-modulus phase.
fn rotate_pair(w: &mut CMat, i: usize, j: usize, c: f64, s: f64, e: C64) {
    let (ci, cj) = w.two_cols_mut(i, j);
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let yi = *y * e;
        let xi = *x;
        *x = xi * c - yi * s;
        *y = xi * s + yi * c;
    }
}

/// Largest singular triplet `(σ₁, u₁, v₁)` by power iteration on `A^H A`.
///
/// Falls back to the full Jacobi decomposition when the iteration stalls
/// (clustered leading singular values).
pub fn largest_triplet(a: &CMat) -> (f64, Vec<C64>, Vec<C64>) {
    let (p, m) = a.shape();
    let mut v: Vec<C64> = (0..m).map(|k| C64::new(1.0 + 0.1 * (k as f64 % 7.0), 0.05 * (k % 3) as f64)).collect();
    normalize(&mut v);
    let mut sigma_prev = 0.0;
    for _ in 0..2000 {
        let mut u = a.mul_vec(&v);
        let sigma = normalize(&mut u);
        if sigma == 0.0 {
            break;
        }
        let mut vn = a.adjoint_mul_vec(&u);
        let sigma2 = normalize(&mut vn);
        v = vn;
        if (sigma2 - sigma_prev).abs() <= 4.0 * f64::EPSILON * sigma2 {
            let mut u = a.mul_vec(&v);
            let s = normalize(&mut u);
            return (s, u, v);
        }
        sigma_prev = sigma2;
    }
    let svd = Svd::compute(a);
    let _ = p;
    (svd.s[0], svd.u.col(0).to_vec(), svd.v.col(0).to_vec())
}

/// Spectral norm of a dense matrix.
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    Svd::compute(a).s[0]
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(a: &CMat) -> f64 {
    if a.rows() == 0 {
        return f64::INFINITY;
    }
    *Svd::compute(a).s.last().unwrap()
}
