//! Correlated fading channels and the moments of their vec-stacked form.
//!
//! Stacking convention: `omega = vec_stack(H)` holds the conjugated rows of
//! `H` one after another, `omega[n * M + m] = conj(H[n, m])`. With this order
//! both identities used by the bounds hold exactly:
//!
//! * `omega^H (I_N kron d d^H) omega = ||H d||^2`, and
//! * `Cov(omega) = c (F kron G)` for `H = F^{1/2} D G^{1/2}` with i.i.d. `D`.
//!
//! Conjugation only flips the phase of a complex mean, which the bounds see
//! through `|.|` of scalar multiples of a real vector, so it is harmless.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{psd_sqrt, to_complex};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum FadingModel {
    Rayleigh,
    /// Rician with linear K-factor; the LoS matrix is all ones.
    Rician { k: f64 },
    /// Nakagami-m shape parameter.
    Nakagami { m: f64 },
}

/// Fading model, array sizes, Kronecker correlation and CSI error variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub model: FadingModel,
    /// Receive antennas `N`.
    pub n_rx: usize,
    /// Transmit antennas `M`.
    pub n_tx: usize,
    /// Receive correlation coefficient.
    pub rho: f64,
    /// Transmit correlation coefficient.
    pub tau: f64,
    /// Variance of each entry of the channel estimation error.
    pub csi_error_var: f64,
}

impl ChannelSpec {
    /// Uncorrelated channel with perfect CSI.
    pub fn new(model: FadingModel, n_rx: usize, n_tx: usize) -> Self {
        ChannelSpec {
            model,
            n_rx,
            n_tx,
            rho: 0.0,
            tau: 0.0,
            csi_error_var: 0.0,
        }
    }

    pub fn with_correlation(mut self, rho: f64, tau: f64) -> Self {
        self.rho = rho;
        self.tau = tau;
        self
    }

    pub fn with_csi_error(mut self, var: f64) -> Self {
        self.csi_error_var = var;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rx == 0 || self.n_tx == 0 {
            return Err(Error::config("antenna counts must be positive"));
        }
        for (name, v) in [("rho", self.rho), ("tau", self.tau)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(self.csi_error_var >= 0.0) || !self.csi_error_var.is_finite() {
            return Err(Error::config(format!(
                "CSI error variance must be >= 0, got {}",
                self.csi_error_var
            )));
        }
        match self.model {
            FadingModel::Rician { k } if !(k >= 0.0) => {
                Err(Error::config(format!("Rician K must be >= 0, got {k}")))
            }
            FadingModel::Nakagami { m } if !(m >= 0.5) || !m.is_finite() => {
                Err(Error::config(format!("Nakagami m must be >= 0.5, got {m}")))
            }
            _ => Ok(()),
        }
    }

    /// Receive correlation matrix `F`.
    pub fn rx_correlation(&self) -> Result<DMatrix<f64>> {
        correlation_matrix(self.n_rx, self.rho)
    }

    /// Transmit correlation matrix `G`.
    pub fn tx_correlation(&self) -> Result<DMatrix<f64>> {
        correlation_matrix(self.n_tx, self.tau)
    }

    /// Precompute square roots and distributions for repeated draws.
    pub fn sampler(&self) -> Result<ChannelSampler> {
        ChannelSampler::new(self)
    }
}

/// True channel and the receiver's estimate of it.
#[derive(Clone, Debug)]
pub struct ChannelDraw {
    pub h: DMatrix<C64>,
    pub h_hat: DMatrix<C64>,
}

/// Mean and covariance of `vec_stack(H)`.
#[derive(Clone, Debug)]
pub struct ChannelMoments {
    pub mu: DVector<C64>,
    pub sigma: DMatrix<C64>,
    pub n_rx: usize,
    pub n_tx: usize,
}

impl ChannelMoments {
    /// Zero-mean, identity covariance: i.i.d. Rayleigh.
    pub fn iid_rayleigh(n_rx: usize, n_tx: usize) -> Self {
        let d = n_rx * n_tx;
        ChannelMoments {
            mu: DVector::zeros(d),
            sigma: DMatrix::identity(d, d),
            n_rx,
            n_tx,
        }
    }
}

/// Exponential correlation matrix, entry `(l, k) = coef^|l - k|`.
pub fn correlation_matrix(size: usize, coef: f64) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&coef) {
        return Err(Error::config(format!(
            "correlation coefficient must lie in [0, 1], got {coef}"
        )));
    }
    Ok(DMatrix::from_fn(size, size, |l, k| {
        coef.powi((l as i32 - k as i32).abs())
    }))
}

/// `omega[n * M + m] = conj(H[n, m])`.
pub fn vec_stack(h: &DMatrix<C64>) -> DVector<C64> {
    let (n, m) = h.shape();
    DVector::from_fn(n * m, |idx, _| h[(idx / m, idx % m)].conj())
}

/// `A = I_N kron d d^H`, so that `omega^H A omega = ||H d||^2`.
pub fn quadratic_form_matrix(delta: &[C64], n_rx: usize) -> DMatrix<C64> {
    let d = DVector::from_column_slice(delta);
    let outer = &d * d.adjoint();
    DMatrix::<C64>::identity(n_rx, n_rx).kronecker(&outer)
}

fn nakagami_mean_amplitude(m: f64) -> f64 {
    // E[a] for a real Nakagami variate with shape m/2 and spread 1/2, times
    // sqrt(2); equals Gamma((m+1)/2) / (Gamma(m/2) sqrt(m/2)).
    (libm::lgamma((m + 1.0) / 2.0) - libm::lgamma(m / 2.0)).exp() / (m / 2.0).sqrt()
}

/// Per-entry mean and variance of the uncorrelated channel matrix `D`.
fn entry_moments(model: FadingModel) -> (C64, f64) {
    match model {
        FadingModel::Rayleigh => (C64::new(0.0, 0.0), 1.0),
        FadingModel::Rician { k } => {
            if k.is_infinite() {
                (C64::new(1.0, 0.0), 0.0)
            } else {
                (C64::new((k / (k + 1.0)).sqrt(), 0.0), 1.0 / (k + 1.0))
            }
        }
        FadingModel::Nakagami { m } => {
            let a = nakagami_mean_amplitude(m);
            (
                C64::from_polar(a, std::f64::consts::FRAC_PI_4),
                1.0 - a * a,
            )
        }
    }
}

/// Exact mean and covariance of `vec_stack(H)`.
///
/// Rician: `mu = sqrt(K/(K+1)) B^{1/2} 1`, `Sigma = B / (K+1)`. Nakagami:
/// `mu = conj(E[h]) B^{1/2} 1` with `E[h]` the Nakagami entry mean and
/// `Sigma = (1 - |E[h]|^2) B`. Rayleigh: `(0, B)`. Here `B = F kron G`.
pub fn moments(spec: &ChannelSpec) -> Result<ChannelMoments> {
    spec.validate()?;
    let f = spec.rx_correlation()?;
    let g = spec.tx_correlation()?;
    let b = f.kronecker(&g);
    let b_half = psd_sqrt(&f).kronecker(&psd_sqrt(&g));
    let (mean, var) = entry_moments(spec.model);
    let ones = DVector::<f64>::from_element(spec.n_rx * spec.n_tx, 1.0);
    let mu = (b_half * ones).map(|v| mean.conj() * v);
    let sigma = to_complex(&b).map(|v| v * var);
    Ok(ChannelMoments {
        mu,
        sigma,
        n_rx: spec.n_rx,
        n_tx: spec.n_tx,
    })
}

/// Draws `H = F^{1/2} D G^{1/2}` and `H_hat = H - eps`.
#[derive(Clone, Debug)]
pub struct ChannelSampler {
    spec: ChannelSpec,
    f_half: Option<DMatrix<C64>>,
    g_half: Option<DMatrix<C64>>,
    nakagami: Option<Gamma<f64>>,
}

impl ChannelSampler {
    pub fn new(spec: &ChannelSpec) -> Result<Self> {
        spec.validate()?;
        let half = |size: usize, coef: f64| -> Result<Option<DMatrix<C64>>> {
            if coef == 0.0 {
                Ok(None)
            } else {
                Ok(Some(to_complex(&psd_sqrt(&correlation_matrix(size, coef)?))))
            }
        };
        let nakagami = match spec.model {
            // a^2 ~ Gamma(shape m/2, scale 1/m) gives E[a^2] = 1/2.
            FadingModel::Nakagami { m } => Some(
                Gamma::new(m / 2.0, 1.0 / m)
                    .map_err(|e| Error::config(format!("Nakagami m={m}: {e}")))?,
            ),
            _ => None,
        };
        Ok(ChannelSampler {
            spec: spec.clone(),
            f_half: half(spec.n_rx, spec.rho)?,
            g_half: half(spec.n_tx, spec.tau)?,
            nakagami,
        })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    fn entry<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        match self.spec.model {
            FadingModel::Rayleigh => cscg(rng, 1.0),
            FadingModel::Rician { k } => {
                if k.is_infinite() {
                    C64::new(1.0, 0.0)
                } else {
                    let los = (k / (k + 1.0)).sqrt();
                    C64::new(los, 0.0) + cscg(rng, 1.0 / (k + 1.0))
                }
            }
            FadingModel::Nakagami { .. } => {
                let g = self.nakagami.as_ref().expect("built for Nakagami");
                C64::new(g.sample(rng).sqrt(), g.sample(rng).sqrt())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelDraw {
        let (n, m) = (self.spec.n_rx, self.spec.n_tx);
        let mut h = DMatrix::from_fn(n, m, |_, _| self.entry(rng));
        if let Some(f) = &self.f_half {
            h = f * h;
        }
        if let Some(g) = &self.g_half {
            h *= g;
        }
        let h_hat = if self.spec.csi_error_var > 0.0 {
            let var = self.spec.csi_error_var;
            h.map(|v| v - cscg(rng, var))
        } else {
            h.clone()
        };
        ChannelDraw { h, h_hat }
    }
}

/// One-shot draw; prefer [`ChannelSampler`] in loops.
pub fn sample<R: Rng + ?Sized>(spec: &ChannelSpec, rng: &mut R) -> Result<ChannelDraw> {
    Ok(spec.sampler()?.sample(rng))
}

/// Circularly symmetric complex Gaussian with variance `var`.
pub fn cscg<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, m, |_, _| cscg(rng, 1.0))
    }

    #[test]
    fn correlation_examples() {
        let f = correlation_matrix(2, 0.5).unwrap();
        assert_eq!(f, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        assert_eq!(correlation_matrix(4, 0.0).unwrap(), DMatrix::identity(4, 4));
        assert_eq!(correlation_matrix(3, 1.0).unwrap(), DMatrix::from_element(3, 3, 1.0));
        assert!(correlation_matrix(3, 1.2).is_err());
        assert!(correlation_matrix(3, -0.1).is_err());
    }

    #[test]
    fn quadratic_form_small_cases() {
        let a = quadratic_form_matrix(&[C64::new(0.0, 0.0); 3], 2);
        assert!(a.iter().all(|v| *v == C64::new(0.0, 0.0)));
        let a = quadratic_form_matrix(&[C64::new(2.0, 0.0)], 1);
        assert_eq!(a[(0, 0)], C64::new(4.0, 0.0));
    }

    #[test]
    fn quadratic_form_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_matrix(&mut rng, 3, 4);
        let delta: Vec<C64> = (0..4).map(|_| cscg(&mut rng, 1.0)).collect();
        let a = quadratic_form_matrix(&delta, 3);
        let w = vec_stack(&h);
        let lhs = crate::linalg::quad_form(&a, &w);
        let hd = &h * DVector::from_column_slice(&delta);
        let rhs = hd.norm_squared();
        assert!((lhs.re - rhs).abs() <= 1e-12 * rhs);
        assert!(lhs.im.abs() <= 1e-12 * rhs);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn quadratic_form_identity(n in 1usize..=8, m in 1usize..=8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_matrix(&mut rng, n, m);
            let delta: Vec<C64> = (0..m).map(|_| cscg(&mut rng, 1.0)).collect();
            let lhs = crate::linalg::quad_form(&quadratic_form_matrix(&delta, n), &vec_stack(&h)).re;
            let rhs = (&h * DVector::from_column_slice(&delta)).norm_squared();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
        }
    }

    #[test]
    fn rayleigh_moments_are_zero_identity() {
        let mo = moments(&ChannelSpec::new(FadingModel::Rayleigh, 2, 3)).unwrap();
        assert!(mo.mu.iter().all(|v| v.norm() == 0.0));
        assert!((mo.sigma.clone() - DMatrix::identity(6, 6)).norm() < 1e-15);
    }

    #[test]
    fn rician_k0_reduces_to_rayleigh() {
        let spec = ChannelSpec::new(FadingModel::Rician { k: 0.0 }, 2, 3).with_correlation(0.4, 0.7);
        let mo = moments(&spec).unwrap();
        let b = spec.rx_correlation().unwrap().kronecker(&spec.tx_correlation().unwrap());
        assert!(mo.mu.iter().all(|v| v.norm() == 0.0));
        assert!((mo.sigma - to_complex(&b)).norm() < 1e-14);
    }

    #[test]
    fn nakagami_diagonal_matches_closed_form() {
        for m in [0.5, 1.0, 2.0, 3.0, 8.0] {
            let mo = moments(&ChannelSpec::new(FadingModel::Nakagami { m }, 2, 2)).unwrap();
            let g = libm::tgamma((m + 1.0) / 2.0) / libm::tgamma(m / 2.0);
            let expect = 1.0 - 2.0 / m * g * g;
            for i in 0..4 {
                assert_abs_diff_eq!(mo.sigma[(i, i)].re, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn uncorrelated_sigma_is_diagonal() {
        for model in [
            FadingModel::Rayleigh,
            FadingModel::Rician { k: 4.0 },
            FadingModel::Nakagami { m: 2.0 },
        ] {
            let mo = moments(&ChannelSpec::new(model, 3, 4)).unwrap();
            for i in 0..12 {
                for j in 0..12 {
                    if i != j {
                        assert_eq!(mo.sigma[(i, j)].norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_csi_estimate_is_exact() {
        let spec = ChannelSpec::new(FadingModel::Rician { k: 3.0 }, 2, 4).with_correlation(0.3, 0.3);
        let sampler = spec.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let d = sampler.sample(&mut rng);
            assert_eq!(d.h, d.h_hat);
        }
    }

    #[test]
    fn rician_infinite_k_is_all_ones() {
        let spec = ChannelSpec::new(FadingModel::Rician { k: 1e12 }, 2, 3);
        let sampler = spec.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = sampler.sample(&mut rng);
        for v in d.h.iter() {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ChannelSpec::new(FadingModel::Rician { k: -1.0 }, 1, 1).validate().is_err());
        assert!(ChannelSpec::new(FadingModel::Nakagami { m: 0.4 }, 1, 1).validate().is_err());
        assert!(ChannelSpec::new(FadingModel::Rayleigh, 1, 1).with_correlation(1.5, 0.0).validate().is_err());
        assert!(ChannelSpec::new(FadingModel::Rayleigh, 1, 1).with_csi_error(-0.1).validate().is_err());
        assert!(ChannelSpec::new(FadingModel::Rayleigh, 0, 1).validate().is_err());
    }

    const DRAWS: usize = 1_000_000;

    #[test]
    fn rayleigh_entry_statistics() {
        let spec = ChannelSpec::new(FadingModel::Rayleigh, 1, 1);
        let sampler = spec.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (mut s, mut s2) = (C64::new(0.0, 0.0), 0.0);
        for _ in 0..DRAWS {
            let h = sampler.sample(&mut rng).h[(0, 0)];
            s += h;
            s2 += h.norm_sqr();
        }
        let mean = s / DRAWS as f64;
        let var = s2 / DRAWS as f64 - mean.norm_sqr();
        assert!(mean.norm() < 5e-3, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn nakagami_unit_shape_mean() {
        // Oracle: Gamma(1)/(Gamma(1/2) sqrt(1/2)) e^{i pi/4} = sqrt(2/pi) e^{i pi/4}.
        let oracle = C64::from_polar((2.0 / std::f64::consts::PI).sqrt(), std::f64::consts::FRAC_PI_4);
        let spec = ChannelSpec::new(FadingModel::Nakagami { m: 1.0 }, 1, 1);
        let sampler = spec.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut s = C64::new(0.0, 0.0);
        for _ in 0..DRAWS {
            s += sampler.sample(&mut rng).h[(0, 0)];
        }
        let mean = s / DRAWS as f64;
        assert!((mean - oracle).norm() < 0.01 * oracle.norm(), "{mean} vs {oracle}");
        let mo = moments(&spec).unwrap();
        assert!((mo.mu[0] - oracle.conj()).norm() < 1e-12);
    }

    #[test]
    fn csi_error_variance() {
        let gamma2 = 0.01;
        let spec = ChannelSpec::new(FadingModel::Rayleigh, 1, 1).with_csi_error(gamma2);
        let sampler = spec.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut s2 = 0.0;
        for _ in 0..DRAWS {
            let d = sampler.sample(&mut rng);
            s2 += (d.h[(0, 0)] - d.h_hat[(0, 0)]).norm_sqr();
        }
        let var = s2 / DRAWS as f64;
        assert!((var - gamma2).abs() < 0.01 * gamma2, "{var}");
    }
}
