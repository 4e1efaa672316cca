//! Physical parameterization and shared numerical conventions.
//!
//! The resolution parameter is the square-root lifetime ratio
//! `epsilon = sqrt(tau1/tau0)`; the geometric mean `tau_bar = sqrt(tau0*tau1)`
//! is assumed known and sets the global time unit. All downstream numerics
//! run in units of `tau_bar = 1`: a user-supplied `tau_bar` only rescales
//! the spectral width through the dimensionless product `sigma * tau_bar`,
//! and the Fisher information for the dimensionless `epsilon` needs no
//! rescaling at all.

use crate::error::{CoreError, Result};

/// Two-lifetime mixture parameterization.
///
/// `tau0 = tau_bar / epsilon` and `tau1 = tau_bar * epsilon`, so that
/// `sqrt(tau1/tau0) = epsilon` and `sqrt(tau0*tau1) = tau_bar` hold to
/// machine precision by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeModel {
    /// Geometric-mean lifetime, the global time unit.
    pub tau_bar: f64,
    /// Square-root lifetime ratio, > 0.
    pub epsilon: f64,
}

impl LifetimeModel {
    pub fn new(tau_bar: f64, epsilon: f64) -> Result<Self> {
        if !(tau_bar > 0.0) || !tau_bar.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "tau_bar must be positive and finite, got {tau_bar}"
            )));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { tau_bar, epsilon })
    }

    /// Model at the same epsilon in `tau_bar = 1` units.
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(1.0, epsilon)
    }
}

/// `(tau0, tau1) = (tau_bar/epsilon, tau_bar*epsilon)`.
pub fn lifetimes_from(model: &LifetimeModel) -> (f64, f64) {
    (model.tau_bar / model.epsilon, model.tau_bar * model.epsilon)
}

/// Line-shape of the dephasing average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    /// Lifetime-limited photons, `P0 = delta(omega)`.
    Delta,
    /// Gaussian broadening of width `sigma`.
    Gaussian,
}

/// Spectral density `P0` of the pure-dephasing average.
///
/// `omega0` is retained only to document lineshape-center invariance: the
/// basis phase cancels it from every matrix element, so no Fisher quantity
/// depends on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralModel {
    pub kind: SpectralKind,
    /// Spectral width (inverse time); ignored for `Delta`.
    pub sigma: f64,
    /// Center frequency (inverse time).
    pub omega0: f64,
}

impl SpectralModel {
    pub fn delta() -> Self {
        Self { kind: SpectralKind::Delta, sigma: 0.0, omega0: 0.0 }
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "sigma must be nonnegative and finite, got {sigma}"
            )));
        }
        Ok(Self { kind: SpectralKind::Gaussian, sigma, omega0: 0.0 })
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    /// Centered Gaussian density at `omega`; `sigma` must be > 0.
    pub(crate) fn gaussian_density(&self, omega: f64) -> f64 {
        let s = self.sigma;
        (-omega * omega / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// True when the density is (numerically) a delta line.
    pub(crate) fn is_delta(&self) -> bool {
        self.kind == SpectralKind::Delta || self.sigma == 0.0
    }
}

/// Decay-rate combinations `1/tau +- 1/tau_bar` entering every WL matrix
/// element. `gamma_plus > |gamma_minus|` for all positive lifetimes, which
/// is what keeps the rational base of the power factors inside the unit
/// circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// `(1/tau + 1/tau_bar, 1/tau - 1/tau_bar)`.
///
/// `gamma_minus` is exactly 0.0 for bitwise-equal inputs: both divisions
/// produce the identical value and the subtraction cancels exactly.
pub fn gamma_pair(tau: f64, tau_bar: f64) -> Result<GammaPair> {
    if !(tau > 0.0) || !(tau_bar > 0.0) || !tau.is_finite() || !tau_bar.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "lifetimes must be positive and finite, got tau={tau}, tau_bar={tau_bar}"
        )));
    }
    Ok(GammaPair {
        gamma_plus: 1.0 / tau + 1.0 / tau_bar,
        gamma_minus: 1.0 / tau - 1.0 / tau_bar,
    })
}

/// Numerical knobs shared by the whole pipeline.
///
/// Defaults reproduce the published truncation (`n_max = 100`) and are
/// converged for `sigma * tau_bar <= 1`; wider lines need both more modes
/// and more nodes (the convergence and truncation errors say which).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsConfig {
    /// WL truncation order; matrices have dimension `n_max + 1`.
    pub n_max: usize,
    /// Frequency-quadrature node budget (two-sided count).
    pub quad_nodes: usize,
    /// Half-width of the frequency window in units of `1/tau_bar`, used by
    /// the wide-line panel rule and the adaptive validation pass.
    pub quad_window: f64,
    /// Eigenvalues with `|value| <= eig_clamp` are floored to zero.
    pub eig_clamp: f64,
    /// Relative central-difference step in epsilon.
    pub fd_step: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            n_max: 100,
            quad_nodes: 1024,
            quad_window: 12.0,
            eig_clamp: 1e-12,
            fd_step: 1e-4,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(CoreError::InvalidParameter("n_max must be >= 1".into()));
        }
        if self.quad_nodes < 16 {
            return Err(CoreError::InvalidParameter("quad_nodes must be >= 16".into()));
        }
        if !(self.quad_window > 0.0) {
            return Err(CoreError::InvalidParameter("quad_window must be > 0".into()));
        }
        if !(self.eig_clamp > 0.0) {
            return Err(CoreError::InvalidParameter("eig_clamp must be > 0".into()));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 1e-2) {
            return Err(CoreError::InvalidParameter(
                "fd_step must lie in (0, 1e-2)".into(),
            ));
        }
        Ok(())
    }

    /// Key-value text form, one `key=value` per line.
    pub fn to_key_values(&self) -> String {
        format!(
            "n_max={}\nquad_nodes={}\nquad_window={:e}\neig_clamp={:e}\nfd_step={:e}\n",
            self.n_max, self.quad_nodes, self.quad_window, self.eig_clamp, self.fd_step
        )
    }

    /// Parses the `to_key_values` format; unknown keys are rejected, blank
    /// lines and `#` comments are skipped, missing keys keep defaults.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CoreError::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                CoreError::Parse(format!("line {}: bad value for {key}: {e}", lineno + 1))
            };
            match key {
                "n_max" => cfg.n_max = value.parse().map_err(|e| bad(&e))?,
                "quad_nodes" => cfg.quad_nodes = value.parse().map_err(|e| bad(&e))?,
                "quad_window" => cfg.quad_window = value.parse().map_err(|e| bad(&e))?,
                "eig_clamp" => cfg.eig_clamp = value.parse().map_err(|e| bad(&e))?,
                "fd_step" => cfg.fd_step = value.parse().map_err(|e| bad(&e))?,
                other => {
                    return Err(CoreError::Parse(format!(
                        "line {}: unknown key {other}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
