//! Brute-force temporal-grid reference pipeline.
//!
//! The state has closed-form matrix elements between arrival-time kets,
//!
//! ```text
//! <t|rho_tau|t'> = H(t) H(t') / tau * exp(-(t+t')/2tau) * exp(-(t-t')^2 sigma^2 / 2),
//! ```
//!
//! so sampling the kernel on a uniform grid with trapezoid weights gives a
//! density matrix with no mode truncation and no frequency quadrature:
//! everything the main pipeline computes can be recomputed here from
//! first principles and compared. This is a validation path, not a
//! performance path; the dense eigendecompositions are accepted as slow.
//!
//! The carrier phase `exp(-i w0 (t-t'))` is a diagonal unitary
//! congruence and cannot change eigenvalues or any Fisher quantity, so
//! the kernel is kept real by dropping it.

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::fisher;
use crate::model::{lifetimes_from, LifetimeModel, NumericsConfig, SpectralModel};
use crate::state::{
    eigensystem, HermitianOperator, Provenance, TRUNCATION_TOLERANCE,
};

/// Mass of the exponential tails beyond the grid above which the grid
/// extent is rejected as too short.
pub const TAIL_MASS_TOLERANCE: f64 = 1e-6;

/// Uniform arrival-time grid, in units of the geometric-mean lifetime.
/// Nodes are `t_i = i * spacing` for `i = 0..=n_points`.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        // 40 lifetimes bounds the slow-branch tail below 1e-8 for eps <= 2
        Self { t_max: 40.0, n_points: 4000 }
    }
}

impl TimeGrid {
    pub fn spacing(&self) -> f64 {
        self.t_max / self.n_points as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "t_max must be positive and finite, got {}",
                self.t_max
            )));
        }
        if self.n_points < 2 {
            return Err(CoreError::InvalidParameter(format!(
                "n_points must be at least 2, got {}",
                self.n_points
            )));
        }
        Ok(())
    }
}

/// Trapezoid weights: `h` inside, `h/2` at both ends.
fn trapezoid_weights(grid: &TimeGrid) -> Vec<f64> {
    let h = grid.spacing();
    let n = grid.n_points;
    let mut w = vec![h; n + 1];
    w[0] = 0.5 * h;
    w[n] = 0.5 * h;
    w
}

/// Raw discretized mixture and its trace deficit, before renormalization.
/// Entries are `sqrt(w_i w_j) K(t_i, t_j)` so the matrix stays exactly
/// symmetric and positive semidefinite (a Schur product of a Gaussian
/// Toeplitz kernel with rank-one exponential terms).
fn kernel_raw(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    grid: &TimeGrid,
) -> Result<(Array2<f64>, f64)> {
    grid.validate()?;
    let unit = LifetimeModel::with_epsilon(model.epsilon)?;
    let (tau0, tau1) = lifetimes_from(&unit);
    let tail = 0.5 * ((-grid.t_max / tau0).exp() + (-grid.t_max / tau1).exp());
    if tail > TAIL_MASS_TOLERANCE {
        return Err(CoreError::TailMass { mass: tail, tol: TAIL_MASS_TOLERANCE });
    }

    let n = grid.n_points + 1;
    let h = grid.spacing();
    let sigma = spectral.sigma * model.tau_bar;
    let w = trapezoid_weights(grid);

    // branch amplitudes with the quadrature weight folded in:
    // a_i = sqrt(w_i / tau) exp(-t_i / 2 tau)
    let amp = |tau: f64| -> Vec<f64> {
        (0..n)
            .map(|i| (w[i] / tau).sqrt() * (-(i as f64) * h / (2.0 * tau)).exp())
            .collect()
    };
    let a0 = amp(tau0);
    let a1 = amp(tau1);
    // Toeplitz Gaussian damping, one value per |i - j|
    let damp: Vec<f64> = (0..n)
        .map(|d| {
            let dt = d as f64 * h;
            (-0.5 * dt * dt * sigma * sigma).exp()
        })
        .collect();

    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * damp[j - i] * (a0[i] * a0[j] + a1[i] * a1[j]);
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    let deficit = 1.0 - entries.diag().sum();
    Ok((entries, deficit))
}

fn grid_provenance(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    grid: &TimeGrid,
    trace_deficit: f64,
    renormalized: bool,
) -> Provenance {
    Provenance {
        epsilon: model.epsilon,
        sigma_tau_bar: spectral.sigma * model.tau_bar,
        spectral_kind: spectral.kind,
        n_max: grid.n_points,
        quad_nodes: grid.n_points,
        quad_window: grid.t_max,
        trace_deficit,
        renormalized,
    }
}

/// The mixed state sampled on the time grid, renormalized to unit trace.
/// The trapezoid trace bias is O(spacing^2); past `TRUNCATION_TOLERANCE`
/// the grid is rejected as too coarse.
pub fn rho_time_grid(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    grid: &TimeGrid,
) -> Result<HermitianOperator> {
    let (mut entries, deficit) = kernel_raw(model, spectral, grid)?;
    if deficit.abs() > TRUNCATION_TOLERANCE {
        return Err(CoreError::Truncation {
            deficit: deficit.abs(),
            tol: TRUNCATION_TOLERANCE,
        });
    }
    entries /= 1.0 - deficit;
    Ok(HermitianOperator {
        entries,
        provenance: grid_provenance(model, spectral, grid, deficit, true),
    })
}

/// QFI recomputed entirely on the time grid: central-difference
/// derivative of the raw kernel, eigendecomposition, retained-pair sum.
/// Basis independence means this must agree with the mode-basis pipeline
/// wherever both converge.
pub fn qfi_time_grid(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    grid: &TimeGrid,
    fd_step: f64,
) -> Result<f64> {
    if !(fd_step > 0.0 && fd_step < 1e-2) {
        return Err(CoreError::InvalidParameter(format!(
            "fd_step must lie in (0, 1e-2), got {fd_step}"
        )));
    }
    let rho = rho_time_grid(model, spectral, grid)?;
    let eig = eigensystem(&rho, NumericsConfig::default().eig_clamp)?;

    let h = fd_step * model.epsilon;
    let raw = |eps: f64| -> Result<Array2<f64>> {
        let m = LifetimeModel { tau_bar: model.tau_bar, epsilon: eps };
        Ok(kernel_raw(&m, spectral, grid)?.0)
    };
    let entries = (raw(model.epsilon + h)? - raw(model.epsilon - h)?) / (2.0 * h);
    let drho = HermitianOperator {
        entries,
        provenance: grid_provenance(model, spectral, grid, rho.provenance.trace_deficit, false),
    };
    fisher::qfi(&eig, &drho)
}

/// Projects a time-grid operator onto the first `n_max + 1` damped
/// Laguerre modes `phi_n(t) = exp(-t/2) L_n(t)` (orthonormal on the
/// half-line; lifetimes in geometric-mean units). Row `n` of the
/// returned matrix is mode `n`; entry `(n, m)` approximates the
/// mode-basis matrix element, converging at the trapezoid rate.
pub fn project_onto_modes(
    op: &HermitianOperator,
    grid: &TimeGrid,
    n_max: usize,
) -> Result<Array2<f64>> {
    grid.validate()?;
    let n_t = grid.n_points + 1;
    if op.dim() != n_t {
        return Err(CoreError::InvalidParameter(format!(
            "operator dimension {} does not match grid ({n_t} nodes)",
            op.dim()
        )));
    }
    let h = grid.spacing();
    let w = trapezoid_weights(grid);
    // b[(n, i)] = phi_n(t_i) sqrt(w_i); the kernel entries already carry
    // one sqrt(w) per side, so b m b^T is the double trapezoid sum
    let mut b = Array2::zeros((n_max + 1, n_t));
    for i in 0..n_t {
        let t = i as f64 * h;
        let scale = (-0.5 * t).exp() * w[i].sqrt();
        let mut prev = 1.0_f64; // L_0
        let mut cur = 1.0 - t; // L_1
        b[[0, i]] = scale * prev;
        if n_max >= 1 {
            b[[1, i]] = scale * cur;
        }
        for k in 1..n_max {
            let next = ((2 * k + 1) as f64 - t) * cur - (k as f64) * prev;
            let next = next / (k + 1) as f64;
            prev = cur;
            cur = next;
            b[[k + 1, i]] = scale * cur;
        }
    }
    Ok(b.dot(&op.entries).dot(&b.t()))
}
