use crate::error::{Error, Result};

use super::{Matrix, SymMatrix};

/// Sweep budget of the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius mass, relative to `‖A‖_F`.
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// `A = Q · diag(eigenvalues) · Qᵀ` with eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// Columns are the eigenvectors.
    pub q: Matrix,
    pub eigenvalues: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_spectrum(&self.q, &self.eigenvalues).expect("orders agree by construction")
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Each sweep visits every off-diagonal pair once and applies the plane
/// rotation that zeroes it, accumulating the rotations into `Q`.
pub fn eig_sym(a: &SymMatrix) -> Result<SpectralDecomposition> {
    let n = a.order();
    let mut w = a.as_matrix().clone();
    let mut q = Matrix::identity(n);

    let norm = frobenius(&w);
    let threshold = OFF_DIAGONAL_TOL * norm;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&w) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut w, &mut q, p, r);
            }
        }
    }
    if !converged && off_diagonal(&w) > threshold {
        return Err(Error::Numeric(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(i, i).total_cmp(&w.get(j, j)));
    let eigenvalues = order.iter().map(|&i| w.get(i, i)).collect();
    let q = Matrix::from_fn(n, |row, col| q.get(row, order[col]));
    Ok(SpectralDecomposition { q, eigenvalues })
}

fn frobenius(m: &Matrix) -> f64 {
    m.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn off_diagonal(m: &Matrix) -> f64 {
    let n = m.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.get(i, j) * m.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Zeroes `w[p][r]` with a rotation in the `(p, r)` plane.
fn rotate(w: &mut Matrix, q: &mut Matrix, p: usize, r: usize) {
    let apr = w.get(p, r);
    if apr == 0.0 {
        return;
    }
    let n = w.n;
    let theta = (w.get(r, r) - w.get(p, p)) / (2.0 * apr);
    // smaller root of t² + 2θt − 1 = 0
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    for k in 0..n {
        let (wkp, wkr) = (w.get(k, p), w.get(k, r));
        w.set(k, p, c * wkp - s * wkr);
        w.set(k, r, s * wkp + c * wkr);
    }
    for k in 0..n {
        let (wpk, wrk) = (w.get(p, k), w.get(r, k));
        w.set(p, k, c * wpk - s * wrk);
        w.set(r, k, s * wpk + c * wrk);
    }
    w.set(p, r, 0.0);
    w.set(r, p, 0.0);

    for k in 0..n {
        let (qkp, qkr) = (q.get(k, p), q.get(k, r));
        q.set(k, p, c * qkp - s * qkr);
        q.set(k, r, s * qkp + c * qkr);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(a: &SymMatrix, dec: &SpectralDecomposition) {
        let n = a.order();
        let qtq = dec.q.transpose().matmul(&dec.q).unwrap();
        let err = Matrix::from_fn(n, |i, j| qtq.get(i, j) - if i == j { 1.0 } else { 0.0 }).max_abs();
        assert!(err <= 1e-10, "orthogonality error {err}");
        let rec = dec.reconstruct().max_abs_diff(a).unwrap();
        assert!(rec <= 1e-9 * (1.0 + a.max_abs()), "reconstruction error {rec}");
        assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_input() {
        let a = SymMatrix::diag(&[3.0, 2.0]);
        let dec = eig_sym(&a).unwrap();
        assert_eq!(dec.eigenvalues, vec![2.0, 3.0]);
        assert_eq!(dec.q.get(0, 1).abs(), 1.0);
        assert_eq!(dec.q.get(1, 0).abs(), 1.0);
        check_invariants(&a, &dec);
    }

    #[test]
    fn two_by_two() {
        let a = SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let dec = eig_sym(&a).unwrap();
        assert!((dec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1] - 3.0).abs() < 1e-14);
        check_invariants(&a, &dec);
    }

    #[test]
    fn identity() {
        for n in 1..6 {
            let dec = eig_sym(&SymMatrix::identity(n)).unwrap();
            assert!(dec.eigenvalues.iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn zero_matrix() {
        let dec = eig_sym(&SymMatrix::zeros(3)).unwrap();
        assert!(dec.eigenvalues.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dense_examples() {
        let a = SymMatrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let dec = eig_sym(&a).unwrap();
        check_invariants(&a, &dec);
        let sum: f64 = dec.eigenvalues.iter().sum();
        assert!((sum - a.trace()).abs() < 1e-12);
        let prod: f64 = dec.eigenvalues.iter().product();
        assert!((prod - a.as_matrix().determinant()).abs() < 1e-10);
    }

    #[test]
    fn repeated_eigenvalues() {
        // I + ones has eigenvalues (1, 1, 1, 5)
        let a = SymMatrix::new(Matrix::from_fn(4, |i, j| if i == j { 2.0 } else { 1.0 })).unwrap();
        let dec = eig_sym(&a).unwrap();
        check_invariants(&a, &dec);
        for (got, want) in dec.eigenvalues.iter().zip([1.0, 1.0, 1.0, 5.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sym(n: usize) -> impl Strategy<Value = SymMatrix> {
            proptest::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
                let m = Matrix::from_fn(n, |i, j| v[i * n + j]);
                SymMatrix::symmetrize(&m)
            })
        }

        proptest! {
            #[test]
            fn decomposition_invariants(a in (1usize..8).prop_flat_map(sym)) {
                let dec = eig_sym(&a).unwrap();
                check_invariants(&a, &dec);
            }
        }
    }
}
