//! Assembly of the mixed two-lifetime state, its epsilon-derivative, the
//! dephasing purity, and eigendecomposition with numerical hygiene.

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::model::{lifetimes_from, LifetimeModel, NumericsConfig, SpectralKind, SpectralModel};
use crate::quad::adaptive_simpson;
use crate::wl;

/// Trace deficits beyond this are treated as an unusable truncation.
pub const TRUNCATION_TOLERANCE: f64 = 1e-4;

/// Eigenvalues below this are an inconsistency, not roundoff.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// How an operator was produced; stored alongside the entries and carried
/// into the text serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub epsilon: f64,
    pub sigma_tau_bar: f64,
    pub spectral_kind: SpectralKind,
    pub n_max: usize,
    pub quad_nodes: usize,
    pub quad_window: f64,
    /// `1 - Tr` of the raw truncated matrix (before any renormalization).
    pub trace_deficit: f64,
    pub renormalized: bool,
}

/// Real symmetric operator in the WL basis with provenance metadata.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    pub entries: Array2<f64>,
    pub provenance: Provenance,
}

impl HermitianOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diag().sum()
    }

    /// Dense text form: provenance as `# key = value` comments, then the
    /// dimension, then one whitespace-separated row per line. Entries are
    /// printed with 17 significant digits so the round-trip is exact.
    pub fn to_text(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        out.push_str(&format!("# epsilon = {:.17e}\n", p.epsilon));
        out.push_str(&format!("# sigma_tau_bar = {:.17e}\n", p.sigma_tau_bar));
        out.push_str(&format!(
            "# spectral_kind = {}\n",
            match p.spectral_kind {
                SpectralKind::Delta => "delta",
                SpectralKind::Gaussian => "gaussian",
            }
        ));
        out.push_str(&format!("# n_max = {}\n", p.n_max));
        out.push_str(&format!("# quad_nodes = {}\n", p.quad_nodes));
        out.push_str(&format!("# quad_window = {:.17e}\n", p.quad_window));
        out.push_str(&format!("# trace_deficit = {:.17e}\n", p.trace_deficit));
        out.push_str(&format!("# renormalized = {}\n", p.renormalized));
        let dim = self.dim();
        out.push_str(&format!("dim {dim}\n"));
        for row in self.entries.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                out.push_str(&format!("{v:.17e}"));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut provenance = Provenance {
            epsilon: f64::NAN,
            sigma_tau_bar: f64::NAN,
            spectral_kind: SpectralKind::Delta,
            n_max: 0,
            quad_nodes: 0,
            quad_window: 0.0,
            trace_deficit: f64::NAN,
            renormalized: false,
        };
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.peek() {
            let line = line.trim();
            let Some(rest) = line.strip_prefix('#') else { break };
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| CoreError::Parse(format!("bad provenance line: {line}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| CoreError::Parse(format!("bad {what}: {value}"));
            match key {
                "epsilon" => provenance.epsilon = value.parse().map_err(|_| bad("epsilon"))?,
                "sigma_tau_bar" => {
                    provenance.sigma_tau_bar = value.parse().map_err(|_| bad("sigma_tau_bar"))?
                }
                "spectral_kind" => {
                    provenance.spectral_kind = match value {
                        "delta" => SpectralKind::Delta,
                        "gaussian" => SpectralKind::Gaussian,
                        _ => return Err(bad("spectral_kind")),
                    }
                }
                "n_max" => provenance.n_max = value.parse().map_err(|_| bad("n_max"))?,
                "quad_nodes" => provenance.quad_nodes = value.parse().map_err(|_| bad("quad_nodes"))?,
                "quad_window" => {
                    provenance.quad_window = value.parse().map_err(|_| bad("quad_window"))?
                }
                "trace_deficit" => {
                    provenance.trace_deficit = value.parse().map_err(|_| bad("trace_deficit"))?
                }
                "renormalized" => {
                    provenance.renormalized = value.parse().map_err(|_| bad("renormalized"))?
                }
                other => return Err(CoreError::Parse(format!("unknown provenance key {other}"))),
            }
            lines.next();
        }
        let dim_line = lines
            .next()
            .ok_or_else(|| CoreError::Parse("missing dim line".into()))?;
        let dim: usize = dim_line
            .trim()
            .strip_prefix("dim ")
            .ok_or_else(|| CoreError::Parse(format!("expected 'dim N', got {dim_line}")))?
            .parse()
            .map_err(|_| CoreError::Parse(format!("bad dimension in {dim_line}")))?;
        let mut entries = Array2::zeros((dim, dim));
        for i in 0..dim {
            let row = lines
                .next()
                .ok_or_else(|| CoreError::Parse(format!("missing matrix row {i}")))?;
            let mut count = 0;
            for (j, tok) in row.split_whitespace().enumerate() {
                if j >= dim {
                    return Err(CoreError::Parse(format!("row {i} has more than {dim} entries")));
                }
                entries[[i, j]] = tok
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad entry {tok} in row {i}")))?;
                count += 1;
            }
            if count != dim {
                return Err(CoreError::Parse(format!(
                    "row {i} has {count} entries, expected {dim}"
                )));
            }
        }
        Ok(Self { entries, provenance })
    }
}

/// Eigendecomposition of a positive-semidefinite operator.
///
/// `values` are sorted descending, `vectors` holds the matching
/// orthonormal eigenvectors as columns, and `clamp` records the floor
/// applied: eigenvalues in `[-NEGATIVITY_TOLERANCE, clamp]` were set to 0
/// (counted by `clamped_count`).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
    pub clamped_count: usize,
    pub clamp: f64,
}

/// Plain symmetric eigendecomposition, values ascending, no clamping.
/// Shared by the density-matrix path and the (indefinite) SLD spectrum.
pub(crate) fn sym_eig(matrix: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = matrix.nrows();
    let fm = faer::Mat::from_fn(n, n, |i, j| matrix[[i, j]]);
    let evd = fm.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = u[(row, src)];
        }
    }
    (values, vectors)
}

/// Decomposes `op`, flooring eigenvalues in `[-NEGATIVITY_TOLERANCE, clamp]`
/// to zero; anything below the negativity tolerance is an error because a
/// correctly assembled state is positive semidefinite to eigensolver noise.
pub fn eigensystem(op: &HermitianOperator, clamp: f64) -> Result<EigenSystem> {
    if !(clamp > 0.0) {
        return Err(CoreError::InvalidParameter("clamp must be > 0".into()));
    }
    let n = op.dim();
    if op.entries.ncols() != n {
        return Err(CoreError::InvalidParameter("operator must be square".into()));
    }
    let (asc_values, asc_vectors) = sym_eig(&op.entries);

    let min = asc_values.first().copied().unwrap_or(0.0);
    if min < -NEGATIVITY_TOLERANCE {
        return Err(CoreError::Negativity {
            min_eigenvalue: min,
            tol: NEGATIVITY_TOLERANCE,
        });
    }

    let mut values = Vec::with_capacity(n);
    let mut clamped_count = 0;
    for &v in asc_values.iter().rev() {
        if v <= clamp {
            values.push(0.0);
            clamped_count += 1;
        } else {
            values.push(v);
        }
    }
    let mut vectors = Array2::zeros((n, n));
    for col in 0..n {
        let src = n - 1 - col;
        for row in 0..n {
            vectors[[row, col]] = asc_vectors[[row, src]];
        }
    }
    Ok(EigenSystem { values, vectors, clamped_count, clamp })
}

fn sigma_in_tau_bar_units(model: &LifetimeModel, spectral: &SpectralModel) -> SpectralModel {
    let mut scaled = *spectral;
    scaled.sigma = spectral.sigma * model.tau_bar;
    scaled
}

/// Raw truncated mixture `(M(tau0) + M(tau1))/2` in `tau_bar = 1` units,
/// without renormalization, plus its trace deficit. Both the state and its
/// finite-difference derivative build on this.
fn assemble_raw(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<(Array2<f64>, f64)> {
    let scaled = sigma_in_tau_bar_units(model, spectral);
    let unit = LifetimeModel::with_epsilon(model.epsilon)?;
    let (tau0, tau1) = lifetimes_from(&unit);
    let m0 = wl::wl_matrix(tau0, &scaled, numerics)?;
    let m1 = wl::wl_matrix(tau1, &scaled, numerics)?;
    let mixed = 0.5 * (&m0 + &m1);
    let deficit = 1.0 - mixed.diag().sum();
    Ok((mixed, deficit))
}

fn provenance_for(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
    trace_deficit: f64,
    renormalized: bool,
) -> Provenance {
    Provenance {
        epsilon: model.epsilon,
        sigma_tau_bar: spectral.sigma * model.tau_bar,
        spectral_kind: spectral.kind,
        n_max: numerics.n_max,
        quad_nodes: numerics.quad_nodes,
        quad_window: numerics.quad_window,
        trace_deficit,
        renormalized,
    }
}

/// The mixed state `rho = (rho_tau0 + rho_tau1)/2`, renormalized to unit
/// trace; the pre-renormalization trace deficit is recorded in provenance
/// and rejected above `TRUNCATION_TOLERANCE`.
pub fn assemble_rho(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<HermitianOperator> {
    numerics.validate()?;
    let (mut entries, deficit) = assemble_raw(model, spectral, numerics)?;
    if deficit.abs() > TRUNCATION_TOLERANCE {
        return Err(CoreError::Truncation {
            deficit: deficit.abs(),
            tol: TRUNCATION_TOLERANCE,
        });
    }
    entries /= 1.0 - deficit;
    Ok(HermitianOperator {
        entries,
        provenance: provenance_for(model, spectral, numerics, deficit, true),
    })
}

/// Central-difference derivative of the state with respect to epsilon,
/// using un-renormalized matrices (renormalizing each branch separately
/// would contaminate the derivative with the deficit's epsilon-dependence).
///
/// The step is `h = fd_step * epsilon`; the result is checked against a
/// halved step and must agree to 1e-6 on the scale `max(1, |drho|_max)`,
/// which is the truncation-error bound away from machine-cancellation
/// territory (the third derivative does not vanish anywhere, so an
/// entrywise-relative reading of the bound is unachievable near zero
/// crossings).
pub fn d_rho_d_eps(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<HermitianOperator> {
    numerics.validate()?;
    let h = numerics.fd_step * model.epsilon;
    if !(model.epsilon - h > 0.0) {
        return Err(CoreError::InvalidParameter(
            "epsilon - fd_step*epsilon must stay positive".into(),
        ));
    }
    let branch = |eps: f64| -> Result<Array2<f64>> {
        let m = LifetimeModel { tau_bar: model.tau_bar, epsilon: eps };
        let (entries, deficit) = assemble_raw(&m, spectral, numerics)?;
        if deficit.abs() > TRUNCATION_TOLERANCE {
            return Err(CoreError::Truncation {
                deficit: deficit.abs(),
                tol: TRUNCATION_TOLERANCE,
            });
        }
        Ok(entries)
    };

    let full = (branch(model.epsilon + h)? - branch(model.epsilon - h)?) / (2.0 * h);
    let halved = (branch(model.epsilon + h / 2.0)? - branch(model.epsilon - h / 2.0)?) / h;

    let mut delta = 0.0_f64;
    let mut scale = 1.0_f64;
    for (a, b) in full.iter().zip(halved.iter()) {
        delta = delta.max((a - b).abs());
        scale = scale.max(a.abs());
    }
    if delta > 1e-6 * scale {
        return Err(CoreError::StepInstability { delta, tol: 1e-6 * scale });
    }

    let (_, deficit) = assemble_raw(model, spectral, numerics)?;
    Ok(HermitianOperator {
        entries: full,
        provenance: provenance_for(model, spectral, numerics, deficit, false),
    })
}

/// Purity of the limiting (epsilon = 1) dephased state,
/// `gamma = (1/sqrt(4 pi)) integral d Omega exp(-Omega^2/4) / (1 + (sigma tau_bar Omega)^2)`,
/// evaluated by adaptive quadrature converged to 1e-10.
pub fn purity_limit(sigma_tau_bar: f64) -> Result<f64> {
    if !(sigma_tau_bar >= 0.0) || !sigma_tau_bar.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "sigma_tau_bar must be nonnegative and finite, got {sigma_tau_bar}"
        )));
    }
    let s2 = sigma_tau_bar * sigma_tau_bar;
    let f = move |x: f64| (-x * x / 4.0).exp() / (1.0 + s2 * x * x);
    // even integrand; the Gaussian factor is below 1e-43 past x = 20
    let half = adaptive_simpson(&f, 0.0, 20.0, 1e-13);
    Ok(2.0 * half / (4.0 * std::f64::consts::PI).sqrt())
}
