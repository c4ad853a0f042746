//! MGF of the Gaussian quadratic form `omega^H A omega`, `omega ~ CN(mu, Sigma)`.

use nalgebra::{DMatrix, DVector};

use crate::channel::ChannelMoments;
use crate::linalg::det_and_solve;
use crate::{Error, Result, C64};

/// Largest tolerated imaginary residue of a value that is real analytically.
const IMAG_TOL: f64 = 1e-10;

/// `exp(t mu^H A (I - t Sigma A)^{-1} mu) / det(I - t Sigma A)`.
///
/// General dense path, `O((NM)^3)`. The bounds use [`PairForm`] instead.
pub fn mgf_gaussian_quadratic(
    t: f64,
    mu: &DVector<C64>,
    sigma: &DMatrix<C64>,
    a: &DMatrix<C64>,
) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    let d = mu.len();
    if sigma.shape() != (d, d) || a.shape() != (d, d) {
        return Err(Error::config("MGF: dimension mismatch"));
    }
    let tc = C64::new(t, 0.0);
    let m = DMatrix::<C64>::identity(d, d) - sigma * a * tc;
    let (det, y) = det_and_solve(m, mu)?;
    let quad = mu.dotc(&(a * y)) * tc;
    let value = quad.exp() / det;
    real_part(value)
}

fn real_part(v: C64) -> Result<f64> {
    if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
        return Err(Error::numerical(format!(
            "MGF has imaginary residue {:.3e} (real part {:.3e})",
            v.im, v.re
        )));
    }
    Ok(v.re)
}

/// The MGF of `||H delta||^2` reduced to `N x N`.
///
/// With `P = I_N kron delta`, `A = P P^H`; Sylvester's determinant identity
/// and the push-through identity give
/// `det(I - t Sigma A) = det(I - t K)` and
/// `mu^H A (I - t Sigma A)^{-1} mu = q^H (I - t K)^{-1} q`,
/// where `K = P^H Sigma P` and `q = P^H mu`. Diagonalising `K = U diag(l) U^H`
/// turns every evaluation into `O(N)`:
/// `M(t) = prod_k (1 - t l_k)^{-1} exp(t sum_k w_k / (1 - t l_k))`,
/// `w = |U^H q|^2`.
#[derive(Clone, Debug)]
pub struct PairForm {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl PairForm {
    /// `extra_var` adds `extra_var * I` to `Sigma` (imperfect CSI).
    pub fn new(moments: &ChannelMoments, delta: &[C64], extra_var: f64) -> Self {
        let n = moments.n_rx;
        let m = moments.n_tx;
        debug_assert_eq!(delta.len(), m);
        let d = DVector::from_column_slice(delta);
        let dn2 = d.norm_squared();
        let mut k = DMatrix::<C64>::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let block = moments.sigma.view((a * m, b * m), (m, m));
                let v = d.dotc(&(block * &d));
                k[(a, b)] = v;
                k[(b, a)] = v.conj();
            }
            k[(a, a)] = C64::new(k[(a, a)].re + extra_var * dn2, 0.0);
        }
        let q = DVector::from_fn(n, |a, _| d.dotc(&moments.mu.rows(a * m, m).into_owned()));
        let eig = k.symmetric_eigen();
        let proj = eig.eigenvectors.adjoint() * q;
        PairForm {
            eigenvalues: eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect(),
            weights: proj.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    /// `M(t)` for `t <= 0`.
    pub fn mgf(&self, t: f64) -> f64 {
        self.log_mgf(t).exp()
    }

    pub fn log_mgf(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (&l, &w) in self.eigenvalues.iter().zip(&self.weights) {
            let g = 1.0 - t * l;
            acc += t * w / g - g.ln();
        }
        acc
    }
}
