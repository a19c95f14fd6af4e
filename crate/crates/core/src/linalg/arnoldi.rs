use crate::prelude::*;

use super::{dotc, eigenvalues, normalize, CMat, CscMatrix, SparseLu, C64};

/// Up to `count` eigenvalues of the pencil `(a, e)` closest to `shift`,
/// approximated by the Ritz values of a single (unrestarted) Arnoldi run on
/// `(a - shift e)^{-1} e`. `e = None` means the identity.
///
/// Returns `None` when `a - shift e` cannot be factored.
pub fn shift_invert_ritz_values(a: &CscMatrix, e: Option<&CscMatrix>, shift: C64, count: usize) -> Option<Vec<C64>> {
    let n = a.rows();
    if n == 0 || count == 0 {
        return Some(Vec::new());
    }
    let ident;
    let e = match e {
        Some(e) => e,
        None => {
            ident = CscMatrix::identity(n);
            &ident
        }
    };
    let shifted = a.lincomb(C64::new(1.0, 0.0), e, -shift);
    let lu = SparseLu::factor(&shifted)?;
    let k = n.min((2 * count).max(count + 20));

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k + 1);
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.5 * ((i as f64) * 0.7).sin(), 0.1 * ((i as f64) * 1.3).cos())).collect();
    normalize(&mut v);
    basis.push(v);
    let mut h = CMat::zeros(k, k);
    let mut dim = k;
    for j in 0..k {
        let mut w = e.mul_vec(&basis[j]);
        lu.solve_in_place(&mut w);
        let wnorm = super::norm2(&w);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c = dotc(q, &w);
                h[(i, j)] += c;
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * c;
                }
            }
        }
        let beta = normalize(&mut w);
        if j + 1 == k {
            break;
        }
        if beta <= 1e-13 * wnorm.max(f64::MIN_POSITIVE) {
            dim = j + 1;
            break;
        }
        h[(j + 1, j)] = C64::new(beta, 0.0);
        basis.push(w);
    }
    let h = h.submatrix(0, 0, dim, dim);
    let mu = eigenvalues(&h).ok()?;
    let mumax = mu.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut finite: Vec<C64> = mu.into_iter().filter(|z| z.norm() > 1e-12 * mumax.max(f64::MIN_POSITIVE)).collect();
    finite.sort_by(|x, y| y.norm().partial_cmp(&x.norm()).unwrap_or(core::cmp::Ordering::Equal));
    finite.truncate(count);
    Some(finite.into_iter().map(|z| shift + z.inv()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_eigenvalues_nearest_the_shift() {
        // diagonal pencil with known spectrum
        let n = 60;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, C64::new(-(i as f64) - 1.0, (i % 4) as f64)));
        }
        let a = CscMatrix::from_triplets(n, n, &t);
        let ritz = shift_invert_ritz_values(&a, None, C64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(ritz.len(), 5);
        for (k, z) in ritz.iter().enumerate() {
            let want = C64::new(-(k as f64) - 1.0, (k % 4) as f64);
            assert!((z - want).norm() < 1e-8, "{z} vs {want}");
        }
    }
}
