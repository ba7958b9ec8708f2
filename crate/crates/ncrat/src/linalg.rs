//! Shared dense linear algebra helpers built on nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{real, Scalar};

/// Relative threshold below which a singular value counts as zero.
///
/// This is the module-wide floating-point model: a matrix is treated as
/// singular when its smallest singular value does not exceed
/// `INVERTIBILITY_REL_TOL` times its largest.
pub const INVERTIBILITY_REL_TOL: f64 = 1e-12;

/// Smallest singular value of `m`; infinity for an empty matrix.
pub fn smallest_singular_value<T: Scalar>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return real(f64::INFINITY);
    }
    let sv = m.clone().singular_values();
    let mut min = sv[0];
    for v in sv.iter() {
        if *v < min {
            min = *v;
        }
    }
    min
}

/// Largest singular value (spectral norm); zero for an empty matrix.
pub fn largest_singular_value<T: Scalar>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return T::zero();
    }
    let sv = m.clone().singular_values();
    let mut max = sv[0];
    for v in sv.iter() {
        if *v > max {
            max = *v;
        }
    }
    max
}

/// Outcome of [`invert`]: either the inverse or the offending smallest
/// singular value.
pub fn invert<T: Scalar>(m: &DMatrix<T>, rel_tol: f64) -> Result<DMatrix<T>, T> {
    assert_eq!(m.nrows(), m.ncols(), "invert requires a square matrix");
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let svd = m.clone().svd(true, true);
    let mut smin = svd.singular_values[0];
    let mut smax = svd.singular_values[0];
    for v in svd.singular_values.iter() {
        if *v < smin {
            smin = *v;
        }
        if *v > smax {
            smax = *v;
        }
    }
    if smin <= real::<T>(rel_tol) * smax {
        return Err(smin);
    }
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    // V * S^{-1} * U^T
    let mut sinv_ut = u.transpose();
    for (i, s) in svd.singular_values.iter().enumerate() {
        let inv = T::one() / *s;
        for j in 0..n {
            sinv_ut[(i, j)] *= inv;
        }
    }
    Ok(v_t.transpose() * sinv_ut)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> T {
    assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 0 {
        return real(f64::INFINITY);
    }
    let eig = m.clone().symmetric_eigen();
    let mut min = eig.eigenvalues[0];
    for v in eig.eigenvalues.iter() {
        if *v < min {
            min = *v;
        }
    }
    min
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_symmetric_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> T {
    assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 0 {
        return real(f64::NEG_INFINITY);
    }
    let eig = m.clone().symmetric_eigen();
    let mut max = eig.eigenvalues[0];
    for v in eig.eigenvalues.iter() {
        if *v > max {
            max = *v;
        }
    }
    max
}

/// Orthonormal basis for the column span of `m`, with singular values below
/// `rel_tol * smax` treated as zero. Returns a matrix whose columns form the
/// basis (possibly zero columns wide).
pub fn column_space_basis<T: Scalar>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd with u");
    let mut smax = T::zero();
    for v in svd.singular_values.iter() {
        if *v > smax {
            smax = *v;
        }
    }
    let cut = real::<T>(rel_tol) * smax;
    let rank = svd.singular_values.iter().filter(|v| **v > cut).count();
    u.columns(0, rank).into_owned()
}

/// Numerical rank with relative singular-value threshold.
pub fn rank<T: Scalar>(m: &DMatrix<T>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let mut smax = T::zero();
    for v in sv.iter() {
        if *v > smax {
            smax = *v;
        }
    }
    let cut = real::<T>(rel_tol) * smax;
    sv.iter().filter(|v| **v > cut).count()
}

/// Assembles a block-diagonal matrix from two blocks.
pub fn block_diag<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Stacks two matrices vertically.
pub fn vstack<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), 0), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Assembles a 2x2 block matrix.
pub fn block2x2<T: Scalar>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    c: &DMatrix<T>,
    d: &DMatrix<T>,
) -> DMatrix<T> {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(c.nrows(), d.nrows());
    assert_eq!(a.ncols(), c.ncols());
    assert_eq!(b.ncols(), d.ncols());
    let mut out = DMatrix::zeros(a.nrows() + c.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out.view_mut((a.nrows(), 0), (c.nrows(), c.ncols()))
        .copy_from(c);
    out.view_mut((a.nrows(), a.ncols()), (d.nrows(), d.ncols()))
        .copy_from(d);
    out
}

/// Maximum absolute entry; zero for empty matrices.
pub fn max_abs<T: Scalar>(m: &DMatrix<T>) -> T {
    let mut max = T::zero();
    for v in m.iter() {
        let a = v.abs();
        if a > max {
            max = a;
        }
    }
    max
}

/// Relative difference `|a - b| / (1 + |b|)` measured entrywise in max norm.
pub fn relative_gap<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape());
    max_abs(&(a - b)) / (T::one() + max_abs(b))
}

/// Perfect-shuffle permutation `S` with `S (A ⊗ B) S^T = B ⊗ A` for
/// `A` of size m×m and `B` of size n×n.
pub fn shuffle_permutation<T: Scalar>(m: usize, n: usize) -> DMatrix<T> {
    let mut s = DMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            // row index in B ⊗ A ordering, column index in A ⊗ B ordering
            s[(j * m + i, i * n + j)] = T::one();
        }
    }
    s
}

/// Solves the least-squares problem `m x = rhs` via SVD, returning the
/// minimum-norm solution.
pub fn least_squares<T: Scalar>(m: &DMatrix<T>, rhs: &DVector<T>) -> DVector<T> {
    let svd = m.clone().svd(true, true);
    let eps = real::<T>(INVERTIBILITY_REL_TOL);
    svd.solve(rhs, eps).expect("svd solve")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_rejects_singular() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(invert(&m, INVERTIBILITY_REL_TOL).is_err());
    }

    #[test]
    fn invert_matches_identity() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let inv = invert(&m, INVERTIBILITY_REL_TOL).unwrap();
        let prod = &m * &inv;
        assert!(max_abs(&(&prod - DMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn shuffle_swaps_kronecker_factors() {
        let a = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::<f64>::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 1.0, 1.0, 3.0]);
        let s = shuffle_permutation::<f64>(2, 3);
        let lhs = &s * a.kronecker(&b) * s.transpose();
        assert!(max_abs(&(lhs - b.kronecker(&a))) < 1e-14);
    }

    #[test]
    fn generic_scalar_f32() {
        let m = DMatrix::<f32>::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!((smallest_singular_value(&m) - 1.0).abs() < 1e-6);
    }
}
