//! Quantum Fisher information via the symmetric logarithmic derivative,
//! and the classical Fisher information of three concrete measurements:
//! arrival-time histograms (TCSPC), projective counting in the WL modes,
//! and projection onto SLD eigenstates designed at a fixed epsilon.
//!
//! With `rho = sum_k D_k |k><k|` and `A = <k| d rho |k'>`, the retained
//! pairs are those with `D_k + D_k' > clamp` and
//!
//! ```text
//! L   = sum_pairs [2 A_kk' / (D_k + D_k')] |k><k'|,
//! QFI = sum_pairs 2 A_kk'^2 / (D_k + D_k')  ( = Tr(L^2 rho) ).
//! ```
//!
//! The dephasing-free reference `qfi_max_delta` is evaluated in the exact
//! two-dimensional span of the two pure branch states, where every inner
//! product reduces to the closed-form overlap
//! `G(ta, tb) = 2 sqrt(ta tb)/(ta + tb)`; the component of the derivative
//! leaking out of the span enters through its Gram matrix, so the whole
//! computation is a handful of scalars with no quadrature or truncation.

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::model::{LifetimeModel, NumericsConfig, SpectralModel};
use crate::quad::adaptive_simpson;
use crate::state::{assemble_rho, d_rho_d_eps, eigensystem, sym_eig, EigenSystem, HermitianOperator};

/// The SLD in the WL basis plus the number of retained eigenvalue pairs.
#[derive(Debug, Clone)]
pub struct SldOperator {
    pub matrix: Array2<f64>,
    /// Unordered pairs (k <= k') with `D_k + D_k'` above the clamp.
    pub support_dim: usize,
}

/// Which bound or measurement a sampled curve describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Qfi,
    CfiTcspc,
    CfiWl,
    CfiSld,
    QfiMax,
}

/// One sampled information curve with the settings that produced it.
#[derive(Debug, Clone)]
pub struct FisherCurve {
    pub kind: CurveKind,
    /// `(epsilon, value)` pairs in grid order.
    pub samples: Vec<(f64, f64)>,
    pub spectral: SpectralModel,
    pub numerics: NumericsConfig,
}

/// Mode-resolved WL counting information: the total and the per-mode terms
/// `(d p_n)^2 / p_n` (zero where `p_n <= 1e-14` was dropped).
#[derive(Debug, Clone)]
pub struct CfiWl {
    pub total: f64,
    pub per_mode: Vec<f64>,
}

/// Outcome probabilities below this carry no information at double
/// precision and would otherwise produce 0/0 terms.
const PROBABILITY_FLOOR: f64 = 1e-14;

/// Symmetric logarithmic derivative `L` of `rho` at the decomposed point.
pub fn sld(rho_eigen: &EigenSystem, drho: &HermitianOperator) -> Result<SldOperator> {
    let n = rho_eigen.values.len();
    if drho.dim() != n {
        return Err(CoreError::InvalidParameter(format!(
            "dimension mismatch: eigensystem {n}, drho {}",
            drho.dim()
        )));
    }
    let v = &rho_eigen.vectors;
    let a = v.t().dot(&drho.entries).dot(v);
    let mut l_eig = Array2::<f64>::zeros((n, n));
    let mut support_dim = 0;
    for k in 0..n {
        for kp in 0..n {
            let s = rho_eigen.values[k] + rho_eigen.values[kp];
            if s > rho_eigen.clamp {
                l_eig[[k, kp]] = 2.0 * a[[k, kp]] / s;
                if k <= kp {
                    support_dim += 1;
                }
            }
        }
    }
    Ok(SldOperator {
        matrix: v.dot(&l_eig).dot(&v.t()),
        support_dim,
    })
}

/// QFI pair sum over the retained support.
pub fn qfi(rho_eigen: &EigenSystem, drho: &HermitianOperator) -> Result<f64> {
    let n = rho_eigen.values.len();
    if drho.dim() != n {
        return Err(CoreError::InvalidParameter(format!(
            "dimension mismatch: eigensystem {n}, drho {}",
            drho.dim()
        )));
    }
    let a = rho_eigen.vectors.t().dot(&drho.entries).dot(&rho_eigen.vectors);
    let mut total = 0.0;
    for k in 0..n {
        for kp in 0..n {
            let s = rho_eigen.values[k] + rho_eigen.values[kp];
            if s > rho_eigen.clamp {
                total += 2.0 * a[[k, kp]] * a[[k, kp]] / s;
            }
        }
    }
    Ok(total)
}

/// Pure-state overlap `<psi_ta|psi_tb> = 2 sqrt(ta tb)/(ta + tb)`.
fn branch_overlap(ta: f64, tb: f64) -> f64 {
    2.0 * (ta * tb).sqrt() / (ta + tb)
}

const QFI_MAX_FD_STEP: f64 = 1e-4;

/// Epsilon values this close to 1 return the exact limit: the two branch
/// states coincide there and the Loewdin orthonormalization loses all
/// precision in `1 - overlap ~ (eps-1)^2/2`.
const QFI_MAX_DEGENERATE: f64 = 1e-7;

/// Dephasing-free (delta-line) QFI, the upper edge of the information
/// sandwich. Exact two-dimensional construction; the limit at
/// `epsilon -> 1` is 1 (in units of the known geometric-mean lifetime).
pub fn qfi_max_delta(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    if (epsilon - 1.0).abs() <= QFI_MAX_DEGENERATE {
        return Ok(1.0);
    }
    let h = QFI_MAX_FD_STEP * epsilon;

    // raw vectors: branch lifetimes at eps-h, eps, eps+h
    let taus = [
        1.0 / (epsilon - h),
        epsilon - h,
        1.0 / epsilon,
        epsilon,
        1.0 / (epsilon + h),
        epsilon + h,
    ];
    let mut g = [[0.0_f64; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            g[i][j] = branch_overlap(taus[i], taus[j]);
        }
    }
    // coefficient rows over the raw vectors: the two central states and
    // the central difference of each branch
    let inv2h = 1.0 / (2.0 * h);
    let u = [[0.0, 0.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]];
    let c = [
        [-inv2h, 0.0, 0.0, 0.0, inv2h, 0.0],
        [0.0, -inv2h, 0.0, 0.0, 0.0, inv2h],
    ];

    // Loewdin frame of the central pair: W = G2^(-1/2) in closed form
    let overlap = g[2][3];
    let sp = 1.0 / (1.0 + overlap).sqrt();
    let sm = 1.0 / (1.0 - overlap).sqrt();
    let w = [
        [0.5 * (sp + sm), 0.5 * (sp - sm)],
        [0.5 * (sp - sm), 0.5 * (sp + sm)],
    ];

    // E[a] = coefficients of frame vector e_a; X[a][i] = <e_a|u_i>;
    // Y[a][i] = <e_a|du_i>
    let mut e = [[0.0_f64; 6]; 2];
    for a in 0..2 {
        for r in 0..6 {
            e[a][r] = w[0][a] * u[0][r] + w[1][a] * u[1][r];
        }
    }
    let dot_g = |x: &[f64; 6], y: &[f64; 6]| {
        let mut acc = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                acc += x[i] * g[i][j] * y[j];
            }
        }
        acc
    };
    let mut x = [[0.0_f64; 2]; 2]; // x[a][i]
    let mut y = [[0.0_f64; 2]; 2];
    for a in 0..2 {
        for i in 0..2 {
            x[a][i] = dot_g(&e[a], &u[i]);
            y[a][i] = dot_g(&e[a], &c[i]);
        }
    }

    // rho and drho in the frame
    let mut rho = [[0.0_f64; 2]; 2];
    let mut drho = [[0.0_f64; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..2 {
                rho[a][b] += 0.5 * x[a][i] * x[b][i];
                drho[a][b] += 0.5 * (y[a][i] * x[b][i] + x[a][i] * y[b][i]);
            }
        }
    }

    // closed-form 2x2 eigensystem of rho
    let half_tr = 0.5 * (rho[0][0] + rho[1][1]);
    let disc = (0.5 * (rho[0][0] - rho[1][1])).hypot(rho[0][1]);
    let d_vals = [half_tr + disc, half_tr - disc];
    let theta = 0.5 * (2.0 * rho[0][1]).atan2(rho[0][0] - rho[1][1]);
    let (s, co) = theta.sin_cos();
    let v = [[co, -s], [s, co]]; // columns are eigenvectors

    let mut a_mat = [[0.0_f64; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let mut acc = 0.0;
            for p in 0..2 {
                for q in 0..2 {
                    acc += v[p][k] * drho[p][q] * v[q][l];
                }
            }
            a_mat[k][l] = acc;
        }
    }

    const SUPPORT_FLOOR: f64 = 1e-15;
    let mut total = 0.0;
    for k in 0..2 {
        for l in 0..2 {
            let sum = d_vals[k] + d_vals[l];
            if sum > SUPPORT_FLOOR {
                total += 2.0 * a_mat[k][l] * a_mat[k][l] / sum;
            }
        }
    }

    // out-of-span leakage of the derivative: T_perp = <du|du> - Y^T Y
    let mut t_perp = [[0.0_f64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut t = dot_g(&c[i], &c[j]);
            for a in 0..2 {
                t -= y[a][i] * y[a][j];
            }
            t_perp[i][j] = t;
        }
    }
    for k in 0..2 {
        if d_vals[k] > SUPPORT_FLOOR {
            // <k|u_i> for the quadratic form
            let kv = [
                v[0][k] * x[0][0] + v[1][k] * x[1][0],
                v[0][k] * x[0][1] + v[1][k] * x[1][1],
            ];
            let mut quad_form = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    quad_form += kv[i] * t_perp[i][j] * kv[j];
                }
            }
            total += quad_form / d_vals[k];
        }
    }
    Ok(total)
}

/// Arrival-time histogram (TCSPC) information. The outcome density in
/// `tau_bar = 1` units is `p(t) = [eps exp(-eps t) + (1/eps) exp(-t/eps)]/2`;
/// the integrand uses the analytic derivative and is integrated adaptively
/// on `[0, 50]`, past which both exponentials are below 1e-21 for the
/// supported epsilon range. No spectral width enters: dephasing leaves the
/// temporal diagonal untouched.
pub fn cfi_tcspc(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let f = move |t: f64| {
        let e0 = (-epsilon * t).exp();
        let e1 = (-t / epsilon).exp();
        let p = 0.5 * (epsilon * e0 + e1 / epsilon);
        let dp = 0.5 * (e0 * (1.0 - epsilon * t) + e1 * (t / epsilon - 1.0) / (epsilon * epsilon));
        dp * dp / p
    };
    Ok(adaptive_simpson(&f, 0.0, 50.0, 1e-12))
}

/// Information of photon counting in the WL modes: `sum (d p_n)^2 / p_n`
/// over the diagonals of the state and its derivative.
pub fn cfi_wl(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<CfiWl> {
    let rho = assemble_rho(model, spectral, numerics)?;
    let drho = d_rho_d_eps(model, spectral, numerics)?;
    Ok(cfi_wl_from_parts(&rho, &drho))
}

fn cfi_wl_from_parts(rho: &HermitianOperator, drho: &HermitianOperator) -> CfiWl {
    let mut per_mode = vec![0.0; rho.dim()];
    let mut total = 0.0;
    for n in 0..rho.dim() {
        let p = rho.entries[[n, n]];
        if p > PROBABILITY_FLOOR {
            let dp = drho.entries[[n, n]];
            let term = dp * dp / p;
            per_mode[n] = term;
            total += term;
        }
    }
    CfiWl { total, per_mode }
}

/// Projective measurement fixed once at a design point: the columns are
/// the SLD eigenvectors there, expressed in the WL basis. Sweeping the
/// evaluation point reuses one basis.
#[derive(Debug, Clone)]
pub struct SldBasis {
    pub design_eps: f64,
    pub vectors: Array2<f64>,
}

/// Eigenbasis of the SLD at the design point.
pub fn sld_eigenbasis(
    design_eps: f64,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<SldBasis> {
    let design = LifetimeModel::with_epsilon(design_eps)?;
    let rho_d = assemble_rho(&design, spectral, numerics)?;
    let eig_d = eigensystem(&rho_d, numerics.eig_clamp)?;
    let drho_d = d_rho_d_eps(&design, spectral, numerics)?;
    let l = sld(&eig_d, &drho_d)?;
    let (_, vectors) = sym_eig(&l.matrix);
    Ok(SldBasis { design_eps, vectors })
}

/// Information of the fixed projective measurement at `eval_eps`:
/// outcome probabilities are `p_j = <l_j| rho(eval) |l_j>`,
/// differentiated by central differences of the renormalized state.
pub fn cfi_in_sld_basis(
    basis: &SldBasis,
    eval_eps: f64,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<f64> {
    let h = numerics.fd_step * eval_eps;
    let rho_at = |eps: f64| -> Result<Array2<f64>> {
        let m = LifetimeModel::with_epsilon(eps)?;
        Ok(assemble_rho(&m, spectral, numerics)?.entries)
    };
    let pe = projector_probabilities(&basis.vectors, &rho_at(eval_eps)?);
    let pp = projector_probabilities(&basis.vectors, &rho_at(eval_eps + h)?);
    let pm = projector_probabilities(&basis.vectors, &rho_at(eval_eps - h)?);

    let mut total = 0.0;
    for j in 0..pe.len() {
        if pe[j] > PROBABILITY_FLOOR {
            let dp = (pp[j] - pm[j]) / (2.0 * h);
            total += dp * dp / pe[j];
        }
    }
    Ok(total)
}

/// One-shot form of [`cfi_in_sld_basis`], rebuilding the design basis.
pub fn cfi_sld_eigenbasis(
    design_eps: f64,
    eval_eps: f64,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<f64> {
    let basis = sld_eigenbasis(design_eps, spectral, numerics)?;
    cfi_in_sld_basis(&basis, eval_eps, spectral, numerics)
}

/// `p_j = <b_j| M |b_j>` for every column `b_j`.
fn projector_probabilities(basis: &Array2<f64>, m: &Array2<f64>) -> Vec<f64> {
    let mb = m.dot(basis);
    (0..basis.ncols())
        .map(|j| basis.column(j).dot(&mb.column(j)))
        .collect()
}

/// All per-point quantities of the information sandwich, sharing one state
/// assembly per grid point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub sigma_tau_bar: f64,
    pub qfi_max: f64,
    pub qfi: f64,
    pub cfi_tcspc: f64,
    pub cfi_wl: f64,
}

/// Evaluates the sandwich at one `(epsilon, sigma)` point.
pub fn sweep_point(
    model: &LifetimeModel,
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<SweepPoint> {
    let rho = assemble_rho(model, spectral, numerics)?;
    let drho = d_rho_d_eps(model, spectral, numerics)?;
    let eig = eigensystem(&rho, numerics.eig_clamp)?;
    let wl = cfi_wl_from_parts(&rho, &drho);
    Ok(SweepPoint {
        epsilon: model.epsilon,
        sigma_tau_bar: spectral.sigma * model.tau_bar,
        qfi_max: qfi_max_delta(model.epsilon)?,
        qfi: qfi(&eig, &drho)?,
        cfi_tcspc: cfi_tcspc(model.epsilon)?,
        cfi_wl: wl.total,
    })
}

/// Samples the four sandwich curves over an epsilon grid at fixed spectral
/// settings, in grid order.
pub fn fisher_curves(
    epsilon_grid: &[f64],
    spectral: &SpectralModel,
    numerics: &NumericsConfig,
) -> Result<Vec<FisherCurve>> {
    if epsilon_grid.is_empty() {
        return Err(CoreError::InvalidParameter("empty epsilon grid".into()));
    }
    let mut points = Vec::with_capacity(epsilon_grid.len());
    for &eps in epsilon_grid {
        let model = LifetimeModel::with_epsilon(eps)?;
        points.push(sweep_point(&model, spectral, numerics)?);
    }
    let curve = |kind: CurveKind, extract: fn(&SweepPoint) -> f64| FisherCurve {
        kind,
        samples: points.iter().map(|p| (p.epsilon, extract(p))).collect(),
        spectral: *spectral,
        numerics: *numerics,
    };
    Ok(vec![
        curve(CurveKind::QfiMax, |p| p.qfi_max),
        curve(CurveKind::Qfi, |p| p.qfi),
        curve(CurveKind::CfiTcspc, |p| p.cfi_tcspc),
        curve(CurveKind::CfiWl, |p| p.cfi_wl),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpectralKind;
    use crate::state::Provenance;
    use approx::assert_relative_eq;

    fn pipeline(epsilon: f64, sigma: f64, numerics: &NumericsConfig) -> (EigenSystem, HermitianOperator) {
        let model = LifetimeModel::with_epsilon(epsilon).unwrap();
        let spectral = if sigma == 0.0 {
            SpectralModel::delta()
        } else {
            SpectralModel::gaussian(sigma).unwrap()
        };
        let rho = assemble_rho(&model, &spectral, numerics).unwrap();
        let drho = d_rho_d_eps(&model, &spectral, numerics).unwrap();
        (eigensystem(&rho, numerics.eig_clamp).unwrap(), drho)
    }

    #[test]
    fn sld_of_stationary_pure_state_is_zero() {
        let dim = 4;
        let mut entries = Array2::zeros((dim, dim));
        entries[[0, 0]] = 1.0;
        let prov = Provenance {
            epsilon: 1.0,
            sigma_tau_bar: 0.0,
            spectral_kind: SpectralKind::Delta,
            n_max: dim - 1,
            quad_nodes: 0,
            quad_window: 0.0,
            trace_deficit: 0.0,
            renormalized: false,
        };
        let rho = HermitianOperator { entries, provenance: prov.clone() };
        let drho = HermitianOperator { entries: Array2::zeros((dim, dim)), provenance: prov };
        let eig = eigensystem(&rho, 1e-12).unwrap();
        let l = sld(&eig, &drho).unwrap();
        assert!(l.matrix.iter().all(|&v| v == 0.0));
        assert_eq!(qfi(&eig, &drho).unwrap(), 0.0);
    }

    #[test]
    fn sld_defining_relation_residual() {
        let numerics = NumericsConfig::default();
        let (eig, drho) = pipeline(1.1, 0.1, &numerics);
        let l = sld(&eig, &drho).unwrap();
        assert!(l.support_dim > 0);

        // rebuild rho from the retained support only; the SLD cannot see
        // clamped directions
        let n = eig.values.len();
        let mut d = Array2::zeros((n, n));
        for k in 0..n {
            d[[k, k]] = eig.values[k];
        }
        let rho_support = eig.vectors.dot(&d).dot(&eig.vectors.t());
        let sym = 0.5 * (l.matrix.dot(&rho_support) + rho_support.dot(&l.matrix));

        // the defining relation holds on the support subspace; project both
        // sides there before comparing
        let mut proj = Array2::zeros((n, n));
        for k in 0..n {
            if eig.values[k] > 0.0 {
                proj[[k, k]] = 1.0;
            }
        }
        let p = eig.vectors.dot(&proj).dot(&eig.vectors.t());
        let sym_support = p.dot(&sym).dot(&p);
        let drho_support = p.dot(&drho.entries).dot(&p);
        let mut residual = 0.0_f64;
        for (a, b) in sym_support.iter().zip(drho_support.iter()) {
            residual = residual.max((a - b).abs());
        }
        assert!(residual < 1e-10, "SLD residual {residual}");
    }

    #[test]
    fn qfi_equals_trace_of_l_squared_rho() {
        let numerics = NumericsConfig::default();
        let (eig, drho) = pipeline(1.2, 0.1, &numerics);
        let k_pair = qfi(&eig, &drho).unwrap();
        let l = sld(&eig, &drho).unwrap();
        let n = eig.values.len();
        let mut d = Array2::zeros((n, n));
        for k in 0..n {
            d[[k, k]] = eig.values[k];
        }
        let rho = eig.vectors.dot(&d).dot(&eig.vectors.t());
        let k_trace = l.matrix.dot(&l.matrix).dot(&rho).diag().sum();
        assert_relative_eq!(k_pair, k_trace, max_relative = 1e-9);
    }

    #[test]
    fn qfi_max_closed_form_inverse_square() {
        // epsilon^2 * K is exactly 1 for the delta-line state; see the
        // rank-2 oracle in the integration suite for the independent
        // derivation
        for eps in [1.01, 1.1, 1.3, 1.7, 2.0, 3.0] {
            let k = qfi_max_delta(eps).unwrap();
            assert_relative_eq!(k * eps * eps, 1.0, max_relative = 1e-6);
        }
    }

    #[test]
    fn qfi_max_epsilon_inversion() {
        // relabeling the two lifetimes maps eps to 1/eps and rescales the
        // unit, so eps^2 K is invariant; the finite-difference floor near
        // eps = 1 limits the match to ~1e-7
        for eps in [1.05, 1.3, 2.0] {
            let a = qfi_max_delta(eps).unwrap() * eps * eps;
            let inv = 1.0 / eps;
            let b = qfi_max_delta(inv).unwrap() * inv * inv;
            assert_relative_eq!(a, b, max_relative = 1e-7);
        }
    }

    #[test]
    fn qfi_max_limit_grid() {
        // approach along 1 + 10^-k; the limit is 1
        for k in 2..=6 {
            let eps = 1.0 + 10f64.powi(-k);
            let v = qfi_max_delta(eps).unwrap();
            let tol = (3.0 * (eps - 1.0)).max(1e-4);
            assert!((v - 1.0).abs() <= tol, "K({eps}) = {v}");
        }
        assert_eq!(qfi_max_delta(1.0).unwrap(), 1.0);
    }

    #[test]
    fn cfi_tcspc_examples() {
        assert_eq!(cfi_tcspc(1.0).unwrap(), 0.0);
        // dense-trapezoid oracle lives in the integration suite; here only
        // the qualitative curse: information vanishes as eps -> 1
        assert!(cfi_tcspc(1.001).unwrap() < 1e-5);
        assert!(cfi_tcspc(1.5).unwrap() > 0.1);
    }

    #[test]
    fn delta_pipeline_matches_qfi_max() {
        // the WL pipeline at sigma = 0 must reproduce the exact span
        // construction (same quantity, different basis and machinery)
        let numerics = NumericsConfig::default();
        for eps in [1.2, 1.5, 2.0] {
            let (eig, drho) = pipeline(eps, 0.0, &numerics);
            let k = qfi(&eig, &drho).unwrap();
            let k_max = qfi_max_delta(eps).unwrap();
            assert_relative_eq!(k, k_max, max_relative = 1e-3);
        }
    }

    #[test]
    fn sandwich_at_spot_points() {
        let numerics = NumericsConfig::default();
        for (eps, sigma) in [(1.05, 0.1), (1.3, 0.25), (1.8, 0.01)] {
            let model = LifetimeModel::with_epsilon(eps).unwrap();
            let spectral = SpectralModel::gaussian(sigma).unwrap();
            let p = sweep_point(&model, &spectral, &numerics).unwrap();
            assert!(p.cfi_tcspc <= p.qfi + 1e-6, "tcspc > qfi at {eps}, {sigma}");
            assert!(p.qfi <= p.qfi_max + 1e-6, "qfi > qfi_max at {eps}, {sigma}");
            assert!(p.cfi_wl <= p.qfi + 1e-6, "wl > qfi at {eps}, {sigma}");
        }
    }

    #[test]
    fn sld_design_point_saturates_qfi() {
        let numerics = NumericsConfig::default();
        let spectral = SpectralModel::gaussian(0.25).unwrap();
        let design = 1.2;
        let j = cfi_sld_eigenbasis(design, design, &spectral, &numerics).unwrap();
        let (eig, drho) = pipeline(design, 0.25, &numerics);
        let k = qfi(&eig, &drho).unwrap();
        assert!((j - k).abs() <= 0.01 * k, "J = {j}, K = {k}");
    }

    #[test]
    fn sld_basis_away_from_design_stays_below_qfi() {
        let numerics = NumericsConfig::default();
        let spectral = SpectralModel::gaussian(0.25).unwrap();
        let j = cfi_sld_eigenbasis(1.01, 2.0, &spectral, &numerics).unwrap();
        let (eig, drho) = pipeline(2.0, 0.25, &numerics);
        let k = qfi(&eig, &drho).unwrap();
        assert!(j <= k + 1e-6, "J = {j} exceeds K = {k}");
    }

    #[test]
    fn fisher_curves_shape() {
        let numerics = NumericsConfig { n_max: 60, ..Default::default() };
        let spectral = SpectralModel::gaussian(0.1).unwrap();
        let grid = [1.05, 1.2, 1.5];
        let curves = fisher_curves(&grid, &spectral, &numerics).unwrap();
        assert_eq!(curves.len(), 4);
        for c in &curves {
            assert_eq!(c.samples.len(), grid.len());
            assert!(c.samples.iter().all(|&(_, v)| v >= 0.0));
            for (s, &e) in c.samples.iter().zip(grid.iter()) {
                assert_eq!(s.0, e);
            }
        }
    }
}
