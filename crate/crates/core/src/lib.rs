//! Fisher-information bounds for resolving two close spontaneous-emission
//! lifetimes from single photons of varied spectral purity.
//!
//! The library builds the dephased two-lifetime photon state in a
//! weighted-Laguerre temporal-mode basis, computes the quantum Fisher
//! information for the square-root lifetime ratio via the symmetric
//! logarithmic derivative, and compares it against the classical Fisher
//! information of concrete measurements: arrival-time histograms (TCSPC),
//! mode-resolved photon counting, projection onto SLD eigenstates, and
//! two-photon Hong-Ou-Mandel coincidences. A brute-force time-grid
//! implementation of the same quantities ships as an in-library oracle.

pub mod error;
pub mod fisher;
pub mod hom;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod state;
pub mod wl;

pub use error::{CoreError, Result};
pub use model::{
    gamma_pair, lifetimes_from, GammaPair, LifetimeModel, NumericsConfig, SpectralKind,
    SpectralModel,
};
