//! Two-photon coincidence analysis at a balanced beam splitter.
//!
//! Each photon is drawn from the equal mixture of the two branch
//! lifetimes, giving four equiprobable ordered pairs. Identical pairs
//! interfere perfectly and never produce a coincidence; the two mixed
//! pairs each produce one with probability `(1 - g^2)/2`, where
//! `g = <psi_tau0|psi_tau1> = 2 eps/(1 + eps^2)`, so
//! `P_c = (1 - g^2)/4`. Counting coincidences is a Bernoulli trial per
//! photon pair, and its Fisher information follows in closed form.
//!
//! Dephasing never enters here: the scheme is analyzed for spectrally
//! pure photons, where the overlap integral is elementary.

use crate::error::{CoreError, Result};
use crate::fisher::qfi_max_delta;

/// Per-pair coincidence observables at one epsilon.
#[derive(Debug, Clone, Copy)]
pub struct HomResult {
    pub epsilon: f64,
    pub overlap: f64,
    pub coincidence_prob: f64,
    pub cfi: f64,
    /// `cfi / (2 qfi_max_delta)`: the share of the two-photon quantum
    /// bound that coincidence counting recovers. Tends to 1/2 as
    /// `epsilon -> 1`.
    pub info_fraction: f64,
}

/// Collection and detection budget of the two competing schemes.
#[derive(Debug, Clone, Copy)]
pub struct LossModel {
    /// Probability that a two-photon trial is successfully collected.
    pub p: f64,
    /// Fraction of the per-photon information a realistic one-photon
    /// measurement retains.
    pub xi: f64,
}

impl LossModel {
    pub fn new(p: f64, xi: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("xi", xi)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(CoreError::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(Self { p, xi })
    }
}

/// Which measurement strategy wins under the given losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    OnePhoton,
    TwoPhoton,
    Tie,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

/// Overlap of the two branch wavepackets, `2 eps/(1 + eps^2)`.
pub fn hom_overlap(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(2.0 * epsilon / (1.0 + epsilon * epsilon))
}

/// `(1 - g^2)` without the cancellation near `eps = 1`: equals `u^2` with
/// `u = (eps - 1)(eps + 1)/(1 + eps^2)`.
fn one_minus_overlap_sq(epsilon: f64) -> f64 {
    let u = (epsilon - 1.0) * (epsilon + 1.0) / (1.0 + epsilon * epsilon);
    u * u
}

/// Coincidence probability `(1 - g^2)/4` over the four lifetime pairs.
pub fn hom_coincidence_prob(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(0.25 * one_minus_overlap_sq(epsilon))
}

/// Fisher information of coincidence counting,
/// `J = (dP_c/deps)^2 / [P_c (1 - P_c)]`.
///
/// With `u = (eps^2 - 1)/(1 + eps^2)` one has `P_c = u^2/4` and
/// `dP_c/deps = -g g'/2 = u g^2/eps`, so `u^2` cancels between numerator
/// and `P_c` and the 0/0 at `eps = 1` disappears:
///
/// ```text
/// J = 4 g^2 / [(1 + eps^2)^2 (1 - P_c)]
/// ```
///
/// which evaluates to the limit value 1 at `eps = 1` with no special
/// casing.
pub fn hom_cfi(epsilon: f64) -> Result<f64> {
    let g = hom_overlap(epsilon)?;
    let pc = 0.25 * one_minus_overlap_sq(epsilon);
    let s = 1.0 + epsilon * epsilon;
    Ok(4.0 * g * g / (s * s * (1.0 - pc)))
}

/// All coincidence observables plus the recovered information fraction.
pub fn hom_result(epsilon: f64) -> Result<HomResult> {
    let overlap = hom_overlap(epsilon)?;
    let coincidence_prob = hom_coincidence_prob(epsilon)?;
    let cfi = hom_cfi(epsilon)?;
    let info_fraction = cfi / (2.0 * qfi_max_delta(epsilon)?);
    Ok(HomResult {
        epsilon,
        overlap,
        coincidence_prob,
        cfi,
        info_fraction,
    })
}

/// One-photon with efficiency `xi` beats two-photon coincidences iff
/// `xi > p/2`: the coincidence scheme consumes two photons per trial and
/// recovers at most half the per-pair information, discounted by the
/// collection probability `p`.
pub fn scheme_compare(loss: &LossModel) -> Scheme {
    let threshold = 0.5 * loss.p;
    if loss.xi > threshold {
        Scheme::OnePhoton
    } else if loss.xi < threshold {
        Scheme::TwoPhoton
    } else {
        Scheme::Tie
    }
}
