use crate::prelude::*;

use super::{CMat, C64};

const CZERO: C64 = C64::new(0.0, 0.0);

/// Compressed sparse column matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    rows: usize,
    cols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<C64>,
}

impl CscMatrix {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed,
    /// explicit zeros are kept. Panics on out-of-range indices.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut counts = vec![0usize; cols + 1];
        for &(i, j, _) in triplets {
            assert!(i < rows && j < cols, "triplet ({i}, {j}) out of range for {rows}x{cols}");
            counts[j + 1] += 1;
        }
        for j in 0..cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rowidx = vec![0usize; triplets.len()];
        let mut values = vec![CZERO; triplets.len()];
        for &(i, j, v) in triplets {
            rowidx[next[j]] = i;
            values[next[j]] = v;
            next[j] += 1;
        }
        // sort each column by row and sum duplicates
        let mut colptr = vec![0usize; cols + 1];
        let mut out_r = Vec::with_capacity(rowidx.len());
        let mut out_v = Vec::with_capacity(values.len());
        for j in 0..cols {
            let mut entries: Vec<(usize, C64)> = (counts[j]..counts[j + 1]).map(|k| (rowidx[k], values[k])).collect();
            entries.sort_by_key(|e| e.0);
            for (i, v) in entries {
                if out_r.len() > colptr[j] && *out_r.last().unwrap() == i {
                    *out_v.last_mut().unwrap() += v;
                } else {
                    out_r.push(i);
                    out_v.push(v);
                }
            }
            colptr[j + 1] = out_r.len();
        }
        Self { rows, cols, colptr, rowidx: out_r, values: out_v }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, colptr: (0..=n).collect(), rowidx: (0..n).collect(), values: vec![C64::new(1.0, 0.0); n] }
    }

    pub fn from_dense(a: &CMat) -> Self {
        let mut t = Vec::new();
        for j in 0..a.cols() {
            for i in 0..a.rows() {
                if a[(i, j)] != CZERO {
                    t.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(a.rows(), a.cols(), &t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[C64]) {
        let r = self.colptr[j]..self.colptr[j + 1];
        (&self.rowidx[r.clone()], &self.values[r])
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for j in 0..self.cols {
            let (ri, vi) = self.col(j);
            t.extend(ri.iter().zip(vi).map(|(&i, &v)| (i, j, v)));
        }
        t
    }

    pub fn to_dense(&self) -> CMat {
        let mut a = CMat::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            a[(i, j)] += v;
        }
        a
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![CZERO; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            let (ri, vi) = self.col(j);
            for (&i, &v) in ri.iter().zip(vi) {
                y[i] += v * xj;
            }
        }
        y
    }

    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                let (ri, vi) = self.col(j);
                ri.iter().zip(vi).map(|(&i, v)| v.conj() * x[i]).sum()
            })
            .collect()
    }

    /// `alpha * self + beta * rhs` with the union sparsity pattern.
    pub fn lincomb(&self, alpha: C64, rhs: &CscMatrix, beta: C64) -> CscMatrix {
        assert_eq!(self.shape(), rhs.shape());
        let mut t: Vec<(usize, usize, C64)> = self.triplets().into_iter().map(|(i, j, v)| (i, j, v * alpha)).collect();
        t.extend(rhs.triplets().into_iter().map(|(i, j, v)| (i, j, v * beta)));
        CscMatrix::from_triplets(self.rows, self.cols, &t)
    }

    pub fn norm_fro(&self) -> f64 {
        super::norm2(&self.values)
    }
}

/// Left-looking sparse LU with partial pivoting (Gilbert–Peierls), `P A = L U`.
///
/// Columns are taken in natural order.
// TODO: a fill-reducing column ordering (COLAMD) would help on large 2-D/3-D meshes.
#[derive(Clone, Debug)]
pub struct SparseLu {
    n: usize,
    l: CscMatrix,
    u: CscMatrix,
    pinv: Vec<usize>,
}

impl SparseLu {
    /// Returns `None` if a column has no nonzero pivot candidate.
    pub fn factor(a: &CscMatrix) -> Option<Self> {
        assert_eq!(a.rows, a.cols, "sparse LU of a non-square matrix");
        let n = a.rows;
        let mut pinv = vec![usize::MAX; n];
        let mut lp = vec![0usize; n + 1];
        let mut li: Vec<usize> = Vec::with_capacity(a.nnz() * 2 + n);
        let mut lx: Vec<C64> = Vec::with_capacity(a.nnz() * 2 + n);
        let mut up = vec![0usize; n + 1];
        let mut ui: Vec<usize> = Vec::with_capacity(a.nnz() * 2 + n);
        let mut ux: Vec<C64> = Vec::with_capacity(a.nnz() * 2 + n);

        let mut x = vec![CZERO; n];
        let mut mark = vec![usize::MAX; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for k in 0..n {
            lp[k] = li.len();
            up[k] = ui.len();
            let (ar, av) = a.col(k);

            // Reach of A(:, k) in the graph of L, in topological order.
            order.clear();
            for &start in ar {
                if mark[start] == k {
                    continue;
                }
                mark[start] = k;
                stack.push((start, 0));
                while let Some(&(node, child)) = stack.last() {
                    let top = stack.len() - 1;
                    let lcol = pinv[node];
                    let mut next = None;
                    if lcol != usize::MAX {
                        let mut p = lp[lcol] + 1 + child;
                        while p < lp[lcol + 1] {
                            let nb = li[p];
                            p += 1;
                            if mark[nb] != k {
                                next = Some(nb);
                                break;
                            }
                        }
                        stack[top].1 = p - lp[lcol] - 1;
                    }
                    match next {
                        Some(nb) => {
                            mark[nb] = k;
                            stack.push((nb, 0));
                        }
                        None => {
                            order.push(node);
                            stack.pop();
                        }
                    }
                }
            }
            order.reverse();

            for (&i, &v) in ar.iter().zip(av) {
                x[i] = v;
            }
            for &j in &order {
                let col = pinv[j];
                if col == usize::MAX {
                    continue;
                }
                let xj = x[j];
                if xj == CZERO {
                    continue;
                }
                for p in lp[col] + 1..lp[col + 1] {
                    x[li[p]] -= lx[p] * xj;
                }
            }

            let mut ipiv = usize::MAX;
            let mut best = -1.0f64;
            for &i in &order {
                if pinv[i] == usize::MAX {
                    let v = x[i].norm();
                    if v > best {
                        best = v;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == usize::MAX || best <= 0.0 {
                return None;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(C64::new(1.0, 0.0));
            for &i in &order {
                if pinv[i] == usize::MAX {
                    li.push(i);
                    lx.push(x[i] / pivot);
                }
                x[i] = CZERO;
            }
        }
        lp[n] = li.len();
        up[n] = ui.len();
        for r in li.iter_mut() {
            *r = pinv[*r];
        }
        let l = CscMatrix { rows: n, cols: n, colptr: lp, rowidx: li, values: lx };
        let u = CscMatrix { rows: n, cols: n, colptr: up, rowidx: ui, values: ux };
        Some(Self { n, l, u, pinv })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fill_nnz(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    /// Smallest |U(k,k)| relative to the largest; a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..self.n {
            let d = self.u.values[self.u.colptr[k + 1] - 1].norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = vec![CZERO; n];
        for i in 0..n {
            y[self.pinv[i]] = b[i];
        }
        for j in 0..n {
            let yj = y[j];
            if yj == CZERO {
                continue;
            }
            let (ri, vi) = self.l.col(j);
            for (&i, &v) in ri.iter().zip(vi).skip(1) {
                y[i] -= v * yj;
            }
        }
        for j in (0..n).rev() {
            let (ri, vi) = self.u.col(j);
            let last = ri.len() - 1;
            y[j] /= vi[last];
            let yj = y[j];
            if yj == CZERO {
                continue;
            }
            for (&i, &v) in ri[..last].iter().zip(&vi[..last]) {
                y[i] -= v * yj;
            }
        }
        b.copy_from_slice(&y);
    }

    /// Solves `A^H x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut z = b.to_vec();
        for j in 0..n {
            let (ri, vi) = self.u.col(j);
            let last = ri.len() - 1;
            let mut s = z[j];
            for (&i, v) in ri[..last].iter().zip(&vi[..last]) {
                s -= v.conj() * z[i];
            }
            z[j] = s / vi[last].conj();
        }
        for j in (0..n).rev() {
            let (ri, vi) = self.l.col(j);
            let mut s = z[j];
            for (&i, v) in ri.iter().zip(vi).skip(1) {
                s -= v.conj() * z[i];
            }
            z[j] = s;
        }
        for i in 0..n {
            b[i] = z[self.pinv[i]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    fn banded(n: usize) -> CscMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, C64::new(0.1 + (i % 3) as f64 * 0.01, 0.3)));
            if i + 1 < n {
                t.push((i + 1, i, C64::new(2.0, -0.5)));
                t.push((i, i + 1, C64::new(-1.0, 0.0)));
            }
            if i + 5 < n {
                t.push((i, i + 5, C64::new(0.25, 0.25)));
            }
        }
        CscMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let a = CscMatrix::from_triplets(2, 2, &[(1, 0, C64::new(1.0, 0.0)), (0, 0, C64::new(2.0, 0.0)), (1, 0, C64::new(3.0, 0.0))]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.col(0).0, &[0, 1]);
        assert_eq!(a.col(0).1[1], C64::new(4.0, 0.0));
    }

    #[test]
    fn sparse_lu_matches_dense_solution() {
        let a = banded(40);
        let lu = SparseLu::factor(&a).unwrap();
        let b: Vec<C64> = (0..40).map(|k| C64::new((k as f64).sin(), 1.0)).collect();
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
    fn pivoting_handles_zero_diagonal() {
        let a = CscMatrix::from_triplets(
            3,
            3,
            &[(1, 0, C64::new(1.0, 0.0)), (0, 1, C64::new(2.0, 0.0)), (2, 2, C64::new(3.0, 0.0)), (2, 0, C64::new(1.0, 0.0))],
        );
        let lu = SparseLu::factor(&a).unwrap();
        let mut x = vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(4.0, 0.0)];
        lu.solve_in_place(&mut x);
        assert!((x[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x[2] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn structurally_singular_is_rejected() {
        let a = CscMatrix::from_triplets(2, 2, &[(0, 0, C64::new(1.0, 0.0)), (1, 0, C64::new(1.0, 0.0))]);
        assert!(SparseLu::factor(&a).is_none());
    }
}
