//! Small dense helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Eigenvalues below this are treated as zero when taking square roots.
pub const EIGEN_CLIP: f64 = 1e-12;

/// Square root of a real symmetric PSD matrix via its eigendecomposition.
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let roots = eig
        .eigenvalues
        .map(|l| if l < EIGEN_CLIP { 0.0 } else { l.sqrt() });
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Square root of a Hermitian PSD matrix.
pub fn hermitian_psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let roots = eig
        .eigenvalues
        .map(|l| C64::new(if l < EIGEN_CLIP { 0.0 } else { l.sqrt() }, 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// `v^H M v` for Hermitian `M`, returned as a complex number.
pub fn quad_form(m: &DMatrix<C64>, v: &DVector<C64>) -> C64 {
    v.dotc(&(m * v))
}

/// LU factorisation with partial pivoting, returning `det(m)` and `m^{-1} rhs`.
///
/// Fails with a condition estimate (ratio of extreme pivots) when `m` is
/// numerically singular.
pub fn det_and_solve(m: DMatrix<C64>, rhs: &DVector<C64>) -> Result<(C64, DVector<C64>)> {
    let lu = m.lu();
    let u = lu.u();
    let pivots: Vec<f64> = u.diagonal().iter().map(|p| p.norm()).collect();
    let pmax = pivots.iter().cloned().fold(0.0, f64::max);
    let pmin = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(pmin > pmax * 1e-14) {
        return Err(Error::numerical(format!(
            "singular matrix (pivot ratio {:.3e}, condition estimate {:.3e})",
            pmin / pmax,
            pmax / pmin
        )));
    }
    let det = lu.determinant();
    let x = lu
        .solve(rhs)
        .ok_or_else(|| Error::numerical("LU solve failed"))?;
    Ok((det, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sqrt_squares_back() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.2, 0.1, 0.2, 0.7]);
        let r = psd_sqrt(&m);
        assert!((&r * &r - &m).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_singular_all_ones() {
        let m = DMatrix::from_element(3, 3, 1.0);
        let r = psd_sqrt(&m);
        assert!((&r * &r - &m).norm() < 1e-10);
    }

    #[test]
    fn hermitian_sqrt() {
        let a = DMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.3, (i as f64 - j as f64) * 0.2));
        let m = &a * a.adjoint() + DMatrix::identity(3, 3);
        let r = hermitian_psd_sqrt(&m);
        assert!((&r * &r - &m).norm() < 1e-10);
    }

    #[test]
    fn det_and_solve_small() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)]);
        let rhs = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let (det, x) = det_and_solve(m.clone(), &rhs).unwrap();
        assert_abs_diff_eq!(det.re, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(det.im, 0.0, epsilon = 1e-12);
        assert!((&m * x - rhs).norm() < 1e-12);
    }

    #[test]
    fn singular_is_reported() {
        let m = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        let rhs = DVector::from_element(2, C64::new(1.0, 0.0));
        let err = det_and_solve(m, &rhs).unwrap_err();
        assert!(err.to_string().contains("singular"));
    }
}
