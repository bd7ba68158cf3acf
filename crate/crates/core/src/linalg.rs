//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{MomentError, Result};

/// Relative eigenvalue cutoff for pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Smallest eigenvalue of a symmetric matrix (`+inf` for an empty matrix).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() == 1 {
        return m[(0, 0)];
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Result of evaluating `bᵀ C† b` for a symmetric positive semidefinite `C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinvQuadratic {
    /// `bᵀ C† b`.
    pub value: f64,
    /// `‖C C† b − b‖ / ‖b‖`, zero when `b = 0`.
    pub range_residual: f64,
}

/// Computes `bᵀ C† b` with a pseudo-inverse that discards eigenvalues below
/// `PINV_CUTOFF · λ_max` (negative ones included).
pub fn pinv_quadratic(c: &DMatrix<f64>, b: &DVector<f64>) -> PinvQuadratic {
    let bnorm = b.norm();
    if c.nrows() == 0 || bnorm == 0.0 {
        return PinvQuadratic { value: 0.0, range_residual: 0.0 };
    }
    let eig = SymmetricEigen::new(c.clone());
    let lmax = eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let cut = PINV_CUTOFF * lmax;
    let mut value = 0.0;
    let mut projected = DVector::zeros(b.len());
    let mut full_rank = true;
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            let v = eig.eigenvectors.column(i);
            let coef = v.dot(b);
            value += coef * coef / lam;
            projected += v * coef;
        } else {
            full_rank = false;
        }
    }
    // with nothing cut the range is everything; the residual would be rounding noise
    let range_residual = if full_rank { 0.0 } else { (projected - b).norm() / bnorm };
    PinvQuadratic { value, range_residual }
}

/// Roots of `c[0] + c[1] z + ... + c[d-1] z^{d-1} + z^d` (monic, leading
/// coefficient omitted) via companion-matrix eigenvalues.
pub fn monic_roots(c: &[f64]) -> Vec<Complex<f64>> {
    let d = c.len();
    match d {
        0 => Vec::new(),
        1 => vec![Complex::new(-c[0], 0.0)],
        _ => {
            let mut m = DMatrix::zeros(d, d);
            for i in 1..d {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..d {
                m[(i, d - 1)] = -c[i];
            }
            m.complex_eigenvalues().iter().copied().collect()
        }
    }
}

/// Solves `Σ_j w_j x_j^{p} = m_p` for `p = 0..n-1` (square Vandermonde system).
pub fn solve_vandermonde(nodes: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if rhs.len() != n {
        return Err(MomentError::Domain(format!(
            "Vandermonde system with {n} nodes and {} right-hand sides",
            rhs.len()
        )));
    }
    let m = DMatrix::from_fn(n, n, |p, j| nodes[j].powi(p as i32));
    let sol = m.lu().solve(&DVector::from_column_slice(rhs)).ok_or(MomentError::Singular("Vandermonde solve"))?;
    Ok(sol.iter().copied().collect())
}

/// `|A| = R |Λ| R⁻¹` for a real-diagonalizable matrix.
///
/// Symmetrizable tridiagonal matrices (positive off-diagonal products) are
/// handled through a symmetric eigenproblem; everything else goes through the
/// real Schur form with eigenvectors taken from the null space of `A − λI`.
pub fn abs_matrix(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(MomentError::Domain("abs_matrix needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(a.clone());
    }
    if let Some(m) = abs_symmetrizable_tridiagonal(a) {
        return Ok(m);
    }
    let eig = a.complex_eigenvalues();
    let scale = a.amax().max(1.0);
    let mut lambdas = Vec::with_capacity(n);
    for z in eig.iter() {
        if z.im.abs() > 1e-9 * scale {
            return Err(MomentError::Domain("flux matrix has complex eigenvalues".into()));
        }
        lambdas.push(z.re);
    }
    let mut r = DMatrix::zeros(n, n);
    for (k, &lam) in lambdas.iter().enumerate() {
        let shifted = a - DMatrix::identity(n, n) * lam;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.ok_or(MomentError::Singular("eigenvector SVD"))?;
        let (imin, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        r.set_column(k, &vt.row(imin).transpose());
    }
    let rinv = r.clone().try_inverse().ok_or(MomentError::Singular("eigenvector matrix"))?;
    let d = DMatrix::from_diagonal(&DVector::from_iterator(n, lambdas.iter().map(|l| l.abs())));
    Ok(&r * d * rinv)
}

fn abs_symmetrizable_tridiagonal(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && a[(i, j)] != 0.0 {
                return None;
            }
        }
    }
    // D A D⁻¹ symmetric with d_{i+1}/d_i = sqrt(a_{i,i+1} / a_{i+1,i}).
    let mut d = vec![1.0; n];
    for i in 0..n.saturating_sub(1) {
        let (up, lo) = (a[(i, i + 1)], a[(i + 1, i)]);
        if up * lo <= 0.0 {
            return None;
        }
        d[i + 1] = d[i] * (up / lo).sqrt();
    }
    let s = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[i] / d[j]);
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let q = &eig.eigenvectors;
    let abs_l = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::abs));
    let abs_s = q * abs_l * q.transpose();
    Some(DMatrix::from_fn(n, n, |i, j| abs_s[(i, j)] * d[j] / d[i]))
}
