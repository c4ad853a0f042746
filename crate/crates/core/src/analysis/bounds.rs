use std::f64::consts::{FRAC_PI_2, PI};

use super::mgf::PairForm;
use super::QuadratureRule;
use crate::channel::ChannelMoments;
use crate::signal_space::{label_distance, ScmAlphabet};
use crate::{Error, Result};

/// Relative change tolerated when the quadrature node count is doubled.
pub const QUAD_REL_TOL: f64 = 1e-6;

/// Everything a bound needs at one operating point.
#[derive(Clone, Copy, Debug)]
pub struct BoundInput<'a> {
    /// Noise variance `sigma^2` (linear).
    pub sigma2: f64,
    pub moments: &'a ChannelMoments,
    pub alphabet: &'a ScmAlphabet,
    /// CSI error variance; 0 for perfect CSI.
    pub gamma2: f64,
}

impl BoundInput<'_> {
    fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::config(format!("sigma2 must be > 0, got {}", self.sigma2)));
        }
        if !(self.gamma2 >= 0.0) {
            return Err(Error::config(format!("gamma2 must be >= 0, got {}", self.gamma2)));
        }
        if self.moments.n_tx != self.alphabet.n_tx() {
            return Err(Error::config(format!(
                "channel has {} transmit antennas but the alphabet needs {}",
                self.moments.n_tx,
                self.alphabet.n_tx()
            )));
        }
        Ok(())
    }
}

struct Pair {
    i: usize,
    j: usize,
    dist: u32,
    form: PairForm,
}

/// Per-pair reductions of the MGF, reusable across noise levels.
///
/// Perfect-CSI bounds are symmetric in `(i, j)` and only unordered pairs are
/// stored; the imperfect-CSI bound reuses the same forms with the per-symbol
/// effective noise `eta_i^2 = gamma^2 ||x_i||^2 + sigma^2`.
pub struct BoundEvaluator<'a> {
    alphabet: &'a ScmAlphabet,
    gamma2: f64,
    pairs: Vec<Pair>,
    norms2: Vec<f64>,
}

impl<'a> BoundEvaluator<'a> {
    pub fn new(moments: &ChannelMoments, alphabet: &'a ScmAlphabet, gamma2: f64) -> Result<Self> {
        BoundInput {
            sigma2: 1.0,
            moments,
            alphabet,
            gamma2,
        }
        .validate()?;
        let l = alphabet.len();
        let mut pairs = Vec::with_capacity(l * l.saturating_sub(1) / 2);
        for i in 0..l {
            for j in (i + 1)..l {
                pairs.push(Pair {
                    i,
                    j,
                    dist: label_distance(alphabet, i, j),
                    form: PairForm::new(moments, &alphabet.delta(i, j), gamma2),
                });
            }
        }
        let norms2 = alphabet
            .vectors()
            .iter()
            .map(|x| x.iter().map(|v| v.norm_sqr()).sum())
            .collect();
        Ok(BoundEvaluator {
            alphabet,
            gamma2,
            pairs,
            norms2,
        })
    }

    fn log_l(&self) -> f64 {
        (self.alphabet.len() as f64).log2()
    }

    /// `2 log L - log sum_ij M_ij(-1/(2 sigma^2))`, in bits.
    pub fn capacity_lower_bound(&self, sigma2: f64) -> Result<f64> {
        if self.gamma2 != 0.0 {
            return Err(Error::config(
                "the capacity lower bound assumes perfect CSI (gamma2 = 0)",
            ));
        }
        check_sigma2(sigma2)?;
        let l = self.alphabet.len() as f64;
        if self.alphabet.len() < 2 {
            return Ok(0.0);
        }
        let t = -1.0 / (2.0 * sigma2);
        let off: f64 = self.pairs.iter().map(|p| p.form.mgf(t)).sum();
        Ok(2.0 * l.log2() - (l + 2.0 * off).log2())
    }

    /// BER union bound. `sigma2` may be 0 when `gamma2 > 0` (the floor).
    pub fn ber_union_bound(&self, sigma2: f64, quad: &QuadratureRule) -> Result<f64> {
        if self.gamma2 == 0.0 {
            check_sigma2(sigma2)?;
        } else if !(sigma2 >= 0.0) {
            return Err(Error::config(format!("sigma2 must be >= 0, got {sigma2}")));
        }
        if self.alphabet.len() < 2 {
            return Ok(0.0);
        }
        let coarse = self.ber_with_rule(sigma2, quad);
        let fine = self.ber_with_rule(sigma2, &QuadratureRule::gauss_legendre(2 * quad.len())?);
        let rel = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
        if rel > QUAD_REL_TOL {
            return Err(Error::numerical(format!(
                "BER quadrature did not converge: {} vs {} nodes differ by {rel:.3e} relative",
                quad.len(),
                2 * quad.len()
            )));
        }
        Ok(coarse)
    }

    fn ber_with_rule(&self, sigma2: f64, quad: &QuadratureRule) -> f64 {
        // c(theta) = 1 / (4 sin^2 theta); t = -c / eta^2.
        let c: Vec<f64> = quad
            .nodes()
            .iter()
            .map(|&th| 1.0 / (4.0 * th.sin().powi(2)))
            .collect();
        let w = quad.weights();
        let integral = |form: &PairForm, eta2: f64| -> f64 {
            c.iter()
                .zip(w)
                .map(|(&ci, &wi)| wi * form.mgf(-ci / eta2))
                .sum::<f64>()
        };
        let mut total = 0.0;
        for p in &self.pairs {
            if p.dist == 0 {
                continue;
            }
            let eta_i = self.gamma2 * self.norms2[p.i] + sigma2;
            let eta_j = self.gamma2 * self.norms2[p.j] + sigma2;
            let both = if eta_i == eta_j {
                2.0 * integral(&p.form, eta_i)
            } else {
                integral(&p.form, eta_i) + integral(&p.form, eta_j)
            };
            total += p.dist as f64 * both;
        }
        total / (PI * self.alphabet.len() as f64 * self.log_l())
    }
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::config(format!("sigma2 must be > 0, got {sigma2}")));
    }
    Ok(())
}

/// MGF-based capacity lower bound in bits per channel use (perfect CSI).
pub fn capacity_lower_bound(input: &BoundInput) -> Result<f64> {
    input.validate()?;
    BoundEvaluator::new(input.moments, input.alphabet, input.gamma2)?
        .capacity_lower_bound(input.sigma2)
}

/// [`capacity_lower_bound`] minus `N log2(e/2)` bits.
///
/// The overlap integral of two Gaussians of variance `sigma^2` is
/// `(pi sigma^2 / 2)^N exp(-|d|^2 / (2 sigma^2))`; carrying that constant
/// through the Jensen step leaves this offset, which the short form drops.
/// The short form can therefore exceed the true capacity at high SNR, while
/// this one cannot (but never reaches `log L`).
pub fn capacity_lower_bound_strict(input: &BoundInput) -> Result<f64> {
    let n = input.moments.n_rx as f64;
    Ok(capacity_lower_bound(input)? - n * (std::f64::consts::E / 2.0).log2())
}

/// BER union bound with perfect CSI.
pub fn ber_union_bound(input: &BoundInput, quad: &QuadratureRule) -> Result<f64> {
    input.validate()?;
    if input.gamma2 != 0.0 {
        return Err(Error::config(
            "ber_union_bound assumes perfect CSI; use ber_union_bound_icsi",
        ));
    }
    BoundEvaluator::new(input.moments, input.alphabet, 0.0)?.ber_union_bound(input.sigma2, quad)
}

/// BER union bound with estimation error: `Sigma + gamma^2 I` and
/// per-symbol noise `eta_i^2 = gamma^2 ||x_i||^2 + sigma^2`.
pub fn ber_union_bound_icsi(input: &BoundInput, quad: &QuadratureRule) -> Result<f64> {
    input.validate()?;
    BoundEvaluator::new(input.moments, input.alphabet, input.gamma2)?
        .ber_union_bound(input.sigma2, quad)
}

/// The `sigma^2 -> 0` limit of [`ber_union_bound_icsi`]; requires `gamma2 > 0`.
pub fn ber_floor_icsi(
    moments: &ChannelMoments,
    alphabet: &ScmAlphabet,
    gamma2: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    if !(gamma2 > 0.0) {
        return Err(Error::config("the error floor needs gamma2 > 0"));
    }
    BoundEvaluator::new(moments, alphabet, gamma2)?.ber_union_bound(0.0, quad)
}

/// Closed-form i.i.d. Rayleigh bounds from the minimum distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayleighSimpleBounds {
    /// `log L - log(1 + (L-1) (1 + dmin2/(2 sigma^2))^{-N})`.
    pub capacity_lb: f64,
    /// As printed in the literature, with `(L-1)/2` in place of `L-1`.
    /// Not a valid bound when all pairwise distances are equal.
    pub capacity_lb_printed: f64,
    /// `(L-1) d_sum / (2 pi log L) * (pi/2) * (1 + dmin2/(4 sigma^2))^{-N}`.
    pub ber_ub: f64,
    /// As printed: `(L-1) d_sum / (2 pi log L) * (1 + dmin2/(8 sigma^4))^{-N}`.
    /// Drops the `pi/2` interval length and squares `sigma^2`; it falls
    /// below the union bound at high SNR.
    pub ber_ub_printed: f64,
}

pub fn rayleigh_simple_bounds(alphabet: &ScmAlphabet, sigma2: f64, n_rx: usize) -> RayleighSimpleBounds {
    let l = alphabet.len() as f64;
    let log_l = l.log2();
    let dmin2 = alphabet.min_sq_distance();
    let d_sum = alphabet.distance_sum() as f64;
    let n = n_rx as i32;
    let cap_term = (1.0 + dmin2 / (2.0 * sigma2)).powi(-n);
    let pre = (l - 1.0) * d_sum / (2.0 * PI * log_l);
    RayleighSimpleBounds {
        capacity_lb: log_l - (1.0 + (l - 1.0) * cap_term).log2(),
        capacity_lb_printed: log_l - (1.0 + (l - 1.0) / 2.0 * cap_term).log2(),
        ber_ub: pre * FRAC_PI_2 * (1.0 + dmin2 / (4.0 * sigma2)).powi(-n),
        ber_ub_printed: pre * (1.0 + dmin2 / (8.0 * sigma2 * sigma2)).powi(-n),
    }
}
