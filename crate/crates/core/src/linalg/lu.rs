use crate::prelude::*;

use super::{abs1, CMat, C64};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    min_pivot: f64,
    norm_one: f64,
}

impl Lu {
    /// Factors `a`. Returns `None` when a pivot is exactly zero.
    pub fn factor(a: &CMat) -> Option<Self> {
        let lu = Self::factor_impl(a, None);
        if lu.min_pivot == 0.0 {
            None
        } else {
            Some(lu)
        }
    }

    /// Factors `a`, replacing tiny pivots by `eps * ‖a‖₁`. Used by inverse
    /// iteration, where the shift is an eigenvalue on purpose.
    pub fn factor_regularized(a: &CMat) -> Self {
        let floor = f64::EPSILON * a.norm_one().max(f64::MIN_POSITIVE);
        Self::factor_impl(a, Some(floor))
    }

    fn factor_impl(a: &CMat, pivot_floor: Option<f64>) -> Self {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows();
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut p = k;
            let mut best = abs1(lu[(k, k)]);
            for i in k + 1..n {
                let v = abs1(lu[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let mut pivot = lu[(k, k)];
            if let Some(floor) = pivot_floor {
                if pivot.norm() < floor {
                    pivot = if pivot == C64::new(0.0, 0.0) { C64::new(floor, 0.0) } else { pivot * (floor / pivot.norm()) };
                    lu[(k, k)] = pivot;
                }
            }
            min_pivot = min_pivot.min(pivot.norm());
            if pivot == C64::new(0.0, 0.0) {
                continue;
            }
            let inv = pivot.inv();
            for i in k + 1..n {
                lu[(i, k)] *= inv;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == C64::new(0.0, 0.0) {
                    continue;
                }
                let (left, right) = lu.two_cols_mut(k, j);
                for i in k + 1..n {
                    right[i] -= left[i] * ukj;
                }
            }
        }
        if n == 0 {
            min_pivot = 0.0;
        }
        Self { lu, perm, min_pivot, norm_one }
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Smallest pivot magnitude relative to `‖A‖₁`: a cheap singularity indicator.
    pub fn relative_min_pivot(&self) -> f64 {
        if self.norm_one == 0.0 {
            0.0
        } else {
            self.min_pivot / self.norm_one
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.lu.col(j);
            for i in j + 1..n {
                x[i] -= col[i] * xj;
            }
        }
        for j in (0..n).rev() {
            let col = self.lu.col(j);
            x[j] /= col[j];
            let xj = x[j];
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..j {
                x[i] -= col[i] * xj;
            }
        }
        b.copy_from_slice(&x);
    }

    /// Solves `A^H x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // A^H = U^H L^H P, so solve U^H y = b, L^H z = y, x = P^T z.
        let mut y = b.to_vec();
        for j in 0..n {
            let col = self.lu.col(j);
            let mut s = y[j];
            for i in 0..j {
                s -= col[i].conj() * y[i];
            }
            y[j] = s / col[j].conj();
        }
        for j in (0..n).rev() {
            let col = self.lu.col(j);
            let mut s = y[j];
            for i in j + 1..n {
                s -= col[i].conj() * y[i];
            }
            y[j] = s;
        }
        for (k, &p) in self.perm.iter().enumerate() {
            b[p] = y[k];
        }
    }

    pub fn solve(&self, b: &CMat) -> CMat {
        let mut x = b.clone();
        for j in 0..x.cols() {
            self.solve_in_place(x.col_mut(j));
        }
        x
    }

    pub fn solve_adjoint(&self, b: &CMat) -> CMat {
        let mut x = b.clone();
        for j in 0..x.cols() {
            self.solve_adjoint_in_place(x.col_mut(j));
        }
        x
    }

    pub fn determinant(&self) -> C64 {
        let n = self.dim();
        let mut det = C64::new(1.0, 0.0);
        for i in 0..n {
            det *= self.lu[(i, i)];
        }
        // sign of the permutation
        let mut seen = vec![false; n];
        let mut sign = 1.0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        det * sign
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    fn test_matrix() -> CMat {
        CMat::from_fn(4, 4, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0) + if i == j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) }
        })
    }

    #[test]
    fn solve_and_adjoint_solve_have_small_residuals() {
        let a = test_matrix();
        let lu = Lu::factor(&a).unwrap();
        let b: Vec<C64> = (0..4).map(|k| C64::new(k as f64 + 1.0, -(k as f64))).collect();
        let mut x = b.clone();
        lu.solve_in_place(&mut x);
        let r: Vec<C64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) < 1e-12 * a.norm_fro() * norm2(&x));

        let mut y = b.clone();
        lu.solve_adjoint_in_place(&mut y);
        let r: Vec<C64> = a.adjoint_mul_vec(&y).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) < 1e-12 * a.norm_fro() * norm2(&y));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CMat::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(Lu::factor(&a).is_none());
        let reg = Lu::factor_regularized(&a);
        assert!(reg.relative_min_pivot() < 1e-14);
    }

    #[test]
    fn determinant_of_permuted_diagonal() {
        let a = CMat::from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]);
        let d = Lu::factor(&a).unwrap().determinant();
        assert!((d - C64::new(-6.0, 0.0)).norm() < 1e-14);
    }
}
