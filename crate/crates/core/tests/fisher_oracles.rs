//! Independent oracles for the information quantities: a dense-grid
//! finite-difference recomputation of the arrival-time information, a
//! derivative-free recomputation of the dephasing-free bound from
//! closed-form mode coefficients, and a literal two-photon beam-splitter
//! output enumeration for the coincidence probability.

use lifetime_fisher::fisher::{cfi_tcspc, qfi, qfi_max_delta};
use lifetime_fisher::hom::{hom_cfi, hom_coincidence_prob};
use lifetime_fisher::model::{LifetimeModel, NumericsConfig, SpectralModel};
use lifetime_fisher::state::{assemble_rho, d_rho_d_eps, eigensystem, HermitianOperator};
use lifetime_fisher::wl::wl_pure_coefficient;
use ndarray::Array2;

fn arrival_density(epsilon: f64, t: f64) -> f64 {
    0.5 * (epsilon * (-epsilon * t).exp() + (-t / epsilon).exp() / epsilon)
}

#[test]
fn tcspc_information_matches_dense_numeric_recomputation() {
    // no shared code with the adaptive integral: derivative by central
    // difference in epsilon, integral by trapezoid on a million points
    let n = 1_000_000;
    let t_max = 60.0;
    let h_t = t_max / n as f64;
    let h_e = 1e-5;
    for eps in [1.05, 1.3, 2.0] {
        let mut acc = 0.0;
        for k in 0..=n {
            let t = k as f64 * h_t;
            let p = arrival_density(eps, t);
            let dp = (arrival_density(eps + h_e, t) - arrival_density(eps - h_e, t)) / (2.0 * h_e);
            let term = if p > 1e-300 { dp * dp / p } else { 0.0 };
            acc += if k == 0 || k == n { 0.5 * term } else { term };
        }
        let direct = acc * h_t;
        let produced = cfi_tcspc(eps).unwrap();
        assert!(
            (produced - direct).abs() <= 1e-6 * direct,
            "eps = {eps}: adaptive {produced}, dense {direct}"
        );
    }
}

/// Closed-form mode coefficients of one pure branch and their exact
/// epsilon-derivative via the chain rule; no finite differences anywhere.
fn delta_state_and_analytic_derivative(eps: f64, n_max: usize) -> (Array2<f64>, Array2<f64>) {
    let dc = |n: usize, tau: f64| -> f64 {
        let r = (1.0 - tau) / (1.0 + tau);
        let amp = (1.0 - tau) / (tau.sqrt() * (1.0 + tau).powi(2)) * r.powi(n as i32);
        let ratio = if n == 0 {
            0.0
        } else {
            2.0 * tau.sqrt() / (1.0 + tau) * n as f64 * r.powi(n as i32 - 1) * (-2.0)
                / (1.0 + tau).powi(2)
        };
        amp + ratio
    };
    let dim = n_max + 1;
    let mut rho = Array2::zeros((dim, dim));
    let mut drho = Array2::zeros((dim, dim));
    for (tau, dtau) in [(1.0 / eps, -1.0 / (eps * eps)), (eps, 1.0)] {
        let c: Vec<f64> = (0..dim)
            .map(|n| wl_pure_coefficient(n, tau, 1.0).unwrap())
            .collect();
        let d: Vec<f64> = (0..dim).map(|n| dc(n, tau)).collect();
        for i in 0..dim {
            for j in 0..dim {
                rho[[i, j]] += 0.5 * c[i] * c[j];
                drho[[i, j]] += 0.5 * dtau * (d[i] * c[j] + c[i] * d[j]);
            }
        }
    }
    (rho, drho)
}

#[test]
fn dephasing_free_bound_matches_derivative_free_pair_sum() {
    // rebuilds the rank-2 state from closed forms, differentiates it
    // exactly, and runs the generic pair sum; the span construction in
    // the library must agree to quadrature-free precision, and both must
    // sit on the 1/eps^2 law
    let n_max = 100;
    for eps in [1.1_f64, 1.3, 1.7, 2.2] {
        let (rho_entries, drho_entries) = delta_state_and_analytic_derivative(eps, n_max);
        let reference = assemble_rho(
            &LifetimeModel::with_epsilon(eps).unwrap(),
            &SpectralModel::delta(),
            &NumericsConfig { n_max, ..Default::default() },
        )
        .unwrap();
        let mut rho = reference.clone();
        rho.entries = rho_entries;
        let mut drho = reference;
        drho.entries = drho_entries;
        drho.provenance.renormalized = false;

        let eig = eigensystem(&rho, 1e-12).unwrap();
        let k = qfi(&eig, &drho).unwrap();
        let span = qfi_max_delta(eps).unwrap();
        assert!(
            (k - span).abs() <= 1e-7 * span,
            "eps = {eps}: pair sum {k}, span construction {span}"
        );
        assert!(
            (k * eps * eps - 1.0).abs() <= 1e-9,
            "eps = {eps}: eps^2 K = {}",
            k * eps * eps
        );
    }
}

#[test]
fn vanishing_linewidth_limit_of_full_pipeline() {
    // the Gaussian-line pipeline with a negligible width must land on the
    // dephasing-free bound
    let numerics = NumericsConfig::default();
    let spectral = SpectralModel::gaussian(1e-6).unwrap();
    for eps in [1.2, 1.6] {
        let model = LifetimeModel::with_epsilon(eps).unwrap();
        let rho = assemble_rho(&model, &spectral, &numerics).unwrap();
        let drho = d_rho_d_eps(&model, &spectral, &numerics).unwrap();
        let eig = eigensystem(&rho, numerics.eig_clamp).unwrap();
        let k = qfi(&eig, &drho).unwrap();
        let bound = qfi_max_delta(eps).unwrap();
        assert!(
            (k - bound).abs() <= 1e-3 * bound,
            "eps = {eps}: pipeline {k}, bound {bound}"
        );
    }
}

#[test]
fn coincidence_probability_matches_output_enumeration() {
    // literal two-photon interference bookkeeping: discretize each branch
    // wavepacket on a Simpson-weighted grid, apply the balanced
    // beam-splitter amplitudes, and sum coincidence amplitudes over all
    // ordered output mode pairs
    let eps = 1.1_f64;
    let n = 4000;
    let t_max = 60.0;
    let h = t_max / n as f64;
    let weights: Vec<f64> = (0..=n)
        .map(|k| {
            let c = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    let packet = |tau: f64| -> Vec<f64> {
        (0..=n)
            .map(|k| (-(k as f64) * h / (2.0 * tau)).exp() / tau.sqrt() * weights[k].sqrt())
            .collect()
    };
    let taus = [1.0 / eps, eps];
    let packets = [packet(taus[0]), packet(taus[1])];

    let mut p_c = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let (pa, pb) = (&packets[a], &packets[b]);
            let na: f64 = pa.iter().map(|v| v * v).sum();
            let nb: f64 = pb.iter().map(|v| v * v).sum();
            let mut pair = 0.0;
            for k in 0..=n {
                for l in 0..=n {
                    let amp = 0.5 * (pa[l] * pb[k] - pa[k] * pb[l]);
                    pair += amp * amp;
                }
            }
            // normalize the discretized packets to unit probability
            p_c += 0.25 * pair / (na * nb);
        }
    }
    let closed = hom_coincidence_prob(eps).unwrap();
    assert!(
        (p_c - closed).abs() <= 1e-8 * closed,
        "enumeration {p_c}, closed form {closed}"
    );
}

#[test]
fn coincidence_information_stays_between_zero_and_two_photon_bound() {
    let mut eps = 1.001;
    while eps < 3.0 {
        let j = hom_cfi(eps).unwrap();
        let bound = 2.0 * qfi_max_delta(eps).unwrap();
        assert!(j >= 0.0 && j <= bound * (1.0 + 1e-9), "eps = {eps}: J = {j}, bound = {bound}");
        eps *= 1.02;
    }
}
