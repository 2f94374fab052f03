//! Small linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::graph::WeightedGraph;

/// Dense combinatorial Laplacian with conductances `w`.
pub(crate) fn laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.x, e.x)] += e.w;
        l[(e.y, e.y)] += e.w;
        l[(e.x, e.y)] -= e.w;
        l[(e.y, e.x)] -= e.w;
    }
    l
}

/// Systems up to this size are factored densely.
const DENSE_LIMIT: usize = 48;

/// Solves `A x = b` for a symmetric positive definite `A` given as triplets
/// (both triangles, duplicates summed). `None` if factorization fails.
pub(crate) fn solve_spd_triplets(
    n: usize,
    triplets: &[(usize, usize, f64)],
    rhs: &[f64],
) -> Option<Vec<f64>> {
    if n == 0 {
        return Some(Vec::new());
    }
    if n <= DENSE_LIMIT {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j, v) in triplets {
            a[(i, j)] += v;
        }
        let chol = a.cholesky()?;
        let x = chol.solve(&DVector::from_column_slice(rhs));
        let out: Vec<f64> = x.iter().copied().collect();
        return out.iter().all(|v| v.is_finite()).then_some(out);
    }
    let mut coo = CooMatrix::new(n, n);
    for &(i, j, v) in triplets {
        coo.push(i, j, v);
    }
    let csc = CscMatrix::from(&coo);
    let chol = CscCholesky::factor(&csc).ok()?;
    let b = DVector::from_column_slice(rhs);
    let x = chol.solve(&b);
    let out: Vec<f64> = x.iter().copied().collect();
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Eigen-decomposition of the pencil `(A, diag(d))` for symmetric `A` and
/// positive `d`. Eigenvalues ascending; eigenvector columns are
/// `diag(d)`-orthonormal.
pub(crate) fn generalized_sym_eigen(a: &DMatrix<f64>, d: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let n = d.len();
    let inv_sqrt: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut c = a.clone();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    // symmetrize against rounding in the caller's assembly
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, k)] = eig.eigenvectors[(r, i)] * inv_sqrt[r];
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_solve_matches_dense() {
        // tridiagonal [2 -1 0; -1 2 -1; 0 -1 2]
        let t = [
            (0, 0, 2.0),
            (1, 1, 2.0),
            (2, 2, 2.0),
            (0, 1, -1.0),
            (1, 0, -1.0),
            (1, 2, -1.0),
            (2, 1, -1.0),
        ];
        let x = solve_spd_triplets(3, &t, &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        // same tridiagonal structure past the dense cutoff
        let n = 100;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let mut rhs = vec![0.0; n];
        rhs[0] = 1.0;
        rhs[n - 1] = 1.0;
        let x = solve_spd_triplets(n, &t, &rhs).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn pencil_eigenvalues() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let (vals, vecs) = generalized_sym_eigen(&a, &[1.0, 3.0]);
        assert!(vals[0].abs() < 1e-14);
        assert!((vals[1] - 4.0 / 3.0).abs() < 1e-14);
        let v = vecs.column(1);
        let m = v[0] * v[0] + 3.0 * v[1] * v[1];
        assert!((m - 1.0).abs() < 1e-14);
    }
}
