//! Evaluation of the time-energy inequalities and structural claims on
//! simulated trajectories: fidelity bound, trace-distance bound, per-vector
//! inequality, Mandelstam-Tamm bound, support inclusion and clock back
//! action, with signed margins and pass flags.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{condition1_residual, ClockWaveFunction, ModelConfig};
use crate::propagator::{autocorrelation, free_clock_evolve, CompositeState};
use crate::statelib::{
    nonnegative_eigenbasis, positive_part_projector, support_projector, trace_distance,
    fidelity, herm_eig, HermitianOperator, PureSystemState, SystemDensityMatrix,
};

/// Default slack added to every inequality check on top of the propagation
/// error estimate.
pub const BOUND_SLACK: f64 = 1e-6;

/// Default support threshold for rank decisions.
pub const SUPPORT_EPS: f64 = 1e-8;

/// t <= pi hbar / (2 dHc); infinite for a dispersionless clock state.
pub fn speed_limit_window(energy_spread: f64, hbar: f64) -> f64 {
    if energy_spread > 0.0 {
        std::f64::consts::FRAC_PI_2 * hbar / energy_spread
    } else {
        f64::INFINITY
    }
}

fn in_window(t: f64, energy_spread: f64, hbar: f64) -> bool {
    t <= speed_limit_window(energy_spread, hbar) + 1e-12
}

/// margin = F - cos(dHc t / hbar); None outside the applicable window.
pub fn fidelity_bound_check(t: f64, energy_spread: f64, f: f64, hbar: f64) -> Option<f64> {
    in_window(t, energy_spread, hbar).then(|| f - (energy_spread * t / hbar).cos())
}

/// margin = t dHc - (pi hbar / 2)(1 - F); None outside the window.
pub fn corollary_check(t: f64, energy_spread: f64, f: f64, hbar: f64) -> Option<f64> {
    in_window(t, energy_spread, hbar)
        .then_some(t * energy_spread - std::f64::consts::FRAC_PI_2 * hbar * (1.0 - f))
}

/// margin = (1 - D/2) - cos^2(dHc t / hbar); None outside the window.
pub fn trace_bound_check(t: f64, energy_spread: f64, d: f64, hbar: f64) -> Option<f64> {
    in_window(t, energy_spread, hbar).then(|| {
        let c = (energy_spread * t / hbar).cos();
        (1.0 - d / 2.0) - c * c
    })
}

/// margin = (1 - D^2/4) - cos^2(dHc t / hbar); implied by the improved bound.
pub fn weak_trace_bound_check(t: f64, energy_spread: f64, d: f64, hbar: f64) -> Option<f64> {
    in_window(t, energy_spread, hbar).then(|| {
        let c = (energy_spread * t / hbar).cos();
        (1.0 - d * d / 4.0) - c * c
    })
}

/// margin = (xi, rho_pert xi) - cos^2(dHc t/hbar) (xi, rho_free xi).
pub fn vector_inequality_check(
    xi: &PureSystemState,
    rho_free: &SystemDensityMatrix,
    rho_pert: &SystemDensityMatrix,
    t: f64,
    energy_spread: f64,
    hbar: f64,
) -> f64 {
    let c = (energy_spread * t / hbar).cos();
    rho_pert.expectation(xi) - c * c * rho_free.expectation(xi)
}

/// Uniform pure states via normalized standard-normal components.
pub fn random_pure_states(dim: usize, count: usize, seed: u64) -> Vec<PureSystemState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(
                    sample_standard_normal(&mut rng),
                    sample_standard_normal(&mut rng),
                )
            })
            .collect();
        if let Ok(s) = PureSystemState::normalized(amps) {
            out.push(s);
        }
    }
    out
}

fn sample_standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; adequate here and keeps the dependency surface small.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Minimum per-vector margin over the eigenbasis family spanning E+ (the
/// nonnegative eigenspace of rho_free - rho_pert) plus `m_random` seeded
/// random states. None outside the window.
pub fn vector_inequality_suite(
    rho_free: &SystemDensityMatrix,
    rho_pert: &SystemDensityMatrix,
    t: f64,
    energy_spread: f64,
    hbar: f64,
    m_random: usize,
    seed: u64,
) -> Option<f64> {
    if !in_window(t, energy_spread, hbar) {
        return None;
    }
    let diff = HermitianOperator::new(rho_free.matrix() - rho_pert.matrix())
        .expect("difference of density matrices is Hermitian");
    let mut xis = nonnegative_eigenbasis(&diff);
    xis.extend(random_pure_states(rho_free.dim(), m_random, seed));
    let min = xis
        .iter()
        .map(|xi| vector_inequality_check(xi, rho_free, rho_pert, t, energy_spread, hbar))
        .fold(f64::INFINITY, f64::min);
    Some(min)
}

/// Margins of |(phi_c(t), phi_c(0))| >= cos(dHc t/hbar) over free evolution.
pub fn mandelstam_tamm_check(
    phi0: &ClockWaveFunction,
    energy_spread: f64,
    t_samples: &[f64],
    hbar: f64,
) -> Vec<(f64, f64)> {
    t_samples
        .iter()
        .filter(|&&t| in_window(t, energy_spread, hbar))
        .map(|&t| {
            let a = autocorrelation(phi0, t);
            (t, a - (energy_spread * t / hbar).cos())
        })
        .collect()
}

/// Support inclusion diagnostics at threshold eps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportReport {
    pub t: f64,
    pub rank_free: usize,
    pub rank_perturbed: usize,
    /// Operator norm of (1 - P_pert) P_free.
    pub inclusion_defect: f64,
    pub pass: bool,
}

pub fn support_inclusion_check(
    t: f64,
    rho_free: &SystemDensityMatrix,
    rho_pert: &SystemDensityMatrix,
    eps: f64,
) -> SupportReport {
    let p_free = support_projector(rho_free, eps);
    let p_pert = support_projector(rho_pert, eps);
    let dim = rho_free.dim();
    let complement =
        nalgebra::DMatrix::<Complex64>::identity(dim, dim) - p_pert.matrix();
    let prod = complement * p_free.matrix();
    // operator norm via the top singular value = sqrt of top eigenvalue of A† A
    let gram = prod.adjoint() * &prod;
    let (vals, _) = herm_eig(&gram);
    let defect = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    SupportReport {
        t,
        rank_free: (p_free.matrix().trace().re).round() as usize,
        rank_perturbed: (p_pert.matrix().trace().re).round() as usize,
        inclusion_defect: defect,
        pass: defect <= eps.sqrt(),
    }
}

/// Per-time-sample record of every inequality of the bound suite.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub t: f64,
    pub fidelity: f64,
    pub trace_distance: f64,
    pub energy_spread: f64,
    pub applicable: bool,
    /// cos(dHc t / hbar), the fidelity floor.
    pub bound_fidelity: f64,
    pub margin_fidelity: Option<f64>,
    pub margin_corollary: Option<f64>,
    pub margin_trace: Option<f64>,
    pub margin_weak_trace: Option<f64>,
    pub margin_vector_min: Option<f64>,
    /// Slack the pass decision allows: BOUND_SLACK + propagation error.
    pub tolerance: f64,
}

impl BoundReport {
    /// All applicable margins within tolerance.
    pub fn pass(&self) -> bool {
        self.margins().iter().all(|m| match m {
            Some(v) => *v >= -self.tolerance,
            None => true,
        })
    }

    pub fn margins(&self) -> [Option<f64>; 5] {
        [
            self.margin_fidelity,
            self.margin_corollary,
            self.margin_trace,
            self.margin_weak_trace,
            self.margin_vector_min,
        ]
    }
}

/// Evaluates the full bound suite at one time sample.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_bounds(
    t: f64,
    rho_free: &SystemDensityMatrix,
    rho_pert: &SystemDensityMatrix,
    energy_spread: f64,
    hbar: f64,
    tolerance: f64,
    m_random: usize,
    seed: u64,
) -> Result<BoundReport> {
    let f = fidelity(rho_free, rho_pert)?;
    let d = trace_distance(rho_free, rho_pert)?;
    Ok(BoundReport {
        t,
        fidelity: f,
        trace_distance: d,
        energy_spread,
        applicable: in_window(t, energy_spread, hbar),
        bound_fidelity: (energy_spread * t / hbar).cos(),
        margin_fidelity: fidelity_bound_check(t, energy_spread, f, hbar),
        margin_corollary: corollary_check(t, energy_spread, f, hbar),
        margin_trace: trace_bound_check(t, energy_spread, d, hbar),
        margin_weak_trace: weak_trace_bound_check(t, energy_spread, d, hbar),
        margin_vector_min: vector_inequality_suite(
            rho_free,
            rho_pert,
            t,
            energy_spread,
            hbar,
            m_random,
            seed,
        ),
        tolerance,
    })
}

/// First sampled time with F <= eps_f, if any.
pub fn minimal_full_deviation_time(reports: &[BoundReport], eps_f: f64) -> Option<f64> {
    reports
        .iter()
        .find(|r| r.fidelity <= eps_f)
        .map(|r| r.t)
}

/// Back action of the interaction on the clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackActionReport {
    pub clock_purity: f64,
    pub clock_fidelity_to_free: f64,
}

pub fn back_action_report(
    theta: &CompositeState,
    phi_free: &ClockWaveFunction,
) -> BackActionReport {
    BackActionReport {
        clock_purity: theta.clock_purity(),
        clock_fidelity_to_free: theta.clock_fidelity_to(phi_free),
    }
}

/// Max Condition-1 residual over t_samples <= 0 after projecting the initial
/// packet onto the `d_trunc` lowest-|k| momentum modes. Illustrates that a
/// clock with a truncated (bounded) Hamiltonian cannot keep the perturbation
/// switched off exactly.
pub fn truncated_clock_residual(
    d_trunc: usize,
    config: &ModelConfig,
    t_samples: &[f64],
) -> Result<f64> {
    let grid = config.grid();
    let n = grid.len();
    let phi0 = config.initial_packet()?;
    let phi_trunc = if d_trunc >= n {
        // no truncation: keep the strictly localized packet bitwise intact
        phi0
    } else {
        let fft = crate::fft::SpectralTransform::new(n);
        let mut hat = phi0.amplitudes().to_vec();
        fft.forward(&mut hat);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            grid.wavenumber(a)
                .abs()
                .partial_cmp(&grid.wavenumber(b).abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        for &j in order.iter().skip(d_trunc) {
            hat[j] = Complex64::new(0.0, 0.0);
        }
        fft.inverse(&mut hat);
        let norm_sq: f64 =
            hat.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.spacing();
        let inv = Complex64::from(1.0 / norm_sq.sqrt());
        for a in hat.iter_mut() {
            *a *= inv;
        }
        ClockWaveFunction::from_amplitudes(grid.clone(), hat)?
    };
    let omega = worst_case_state(config.coupling_op());
    let mut max_res = 0.0_f64;
    for &t in t_samples {
        debug_assert!(t <= 0.0);
        let phi_t = free_clock_evolve(&phi_trunc, t);
        let r = condition1_residual(&phi_t, &omega, config.profile(), config.coupling_op());
        max_res = max_res.max(r);
    }
    Ok(max_res)
}

/// Eigenvector of B with the largest |eigenvalue|: the system state that
/// maximizes ||B Omega||.
fn worst_case_state(b: &HermitianOperator) -> PureSystemState {
    let (vals, vecs) = b.eig();
    let idx = vals
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    PureSystemState::normalized(vecs.column(idx).iter().copied().collect())
        .expect("eigenvector is normalizable")
}

/// Condition-1 residual of the exact (untruncated) packet under free
/// evolution, evaluated at the given times.
pub fn condition1_scan(config: &ModelConfig, t_samples: &[f64]) -> Result<Vec<f64>> {
    let phi0 = config.initial_packet()?;
    let omega = worst_case_state(config.coupling_op());
    Ok(t_samples
        .iter()
        .map(|&t| {
            let phi_t = free_clock_evolve(&phi0, t);
            condition1_residual(&phi_t, &omega, config.profile(), config.coupling_op())
        })
        .collect())
}

/// E+ projector trace identity: tr((rho_free - rho_pert) E+) = D / 2.
/// Exposed for cross-checks.
pub fn positive_part_trace(
    rho_free: &SystemDensityMatrix,
    rho_pert: &SystemDensityMatrix,
) -> Result<f64> {
    let diff = HermitianOperator::new(rho_free.matrix() - rho_pert.matrix())?;
    let e_plus = positive_part_projector(&diff);
    Ok((diff.matrix() * e_plus.matrix()).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CouplingShape, Grid};
    use crate::statelib::density_from_pure;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn plus_rho() -> SystemDensityMatrix {
        let c = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        density_from_pure(&PureSystemState::normalized(vec![c, c]).unwrap())
    }

    #[test]
    fn margins_vanish_at_t_zero() {
        let rho = plus_rho();
        assert_abs_diff_eq!(
            fidelity_bound_check(0.0, 3.5, 1.0, 1.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            corollary_check(0.0, 3.5, 1.0, 1.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            trace_bound_check(0.0, 3.5, 0.0, 1.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let m = vector_inequality_suite(&rho, &rho, 0.0, 3.5, 1.0, 20, 7).unwrap();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn window_gating() {
        // window = pi/(2*3.5) ~ 0.4488
        assert!(fidelity_bound_check(1.0, 3.5, 0.9, 1.0).is_none());
        assert!(fidelity_bound_check(0.4, 3.5, 0.9, 1.0).is_some());
        // degenerate spread: window infinite
        assert!(fidelity_bound_check(100.0, 0.0, 1.0, 1.0).is_some());
    }

    #[test]
    fn improved_trace_bound_dominates_weak_form() {
        for d in [0.0, 0.5, 1.0, 1.5, 2.0] {
            for t in [0.0, 0.1, 0.3] {
                let imp = trace_bound_check(t, 3.5, d, 1.0).unwrap();
                let weak = weak_trace_bound_check(t, 3.5, d, 1.0).unwrap();
                assert!(weak >= imp - 1e-15, "d={d} t={t}");
            }
        }
        // D = 1: caps 1/2 (improved) vs 3/4 (weak)
        let imp = trace_bound_check(0.0, 3.5, 1.0, 1.0).unwrap();
        let weak = weak_trace_bound_check(0.0, 3.5, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(imp, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(weak, -0.25, epsilon = 1e-15);
    }

    #[test]
    fn vector_margin_nonnegative_for_orthogonal_xi() {
        // xi orthogonal to supp(rho_free): left side 0
        let rho_free = density_from_pure(&PureSystemState::basis(2, 0));
        let rho_pert = SystemDensityMatrix::maximally_mixed(2);
        let xi = PureSystemState::basis(2, 1);
        let m = vector_inequality_check(&xi, &rho_free, &rho_pert, 0.3, 3.5, 1.0);
        assert!(m >= 0.0);
    }

    #[test]
    fn support_report_trivial_cases() {
        let rho = plus_rho();
        let full = SystemDensityMatrix::maximally_mixed(2);
        let rep = support_inclusion_check(0.1, &rho, &full, SUPPORT_EPS);
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.inclusion_defect, 0.0, epsilon = 1e-10);
        assert_eq!(rep.rank_perturbed, 2);
        let same = support_inclusion_check(0.1, &rho, &rho, SUPPORT_EPS);
        assert!(same.pass);
        assert_eq!(same.rank_free, 1);
    }

    #[test]
    fn support_defect_positive_when_inclusion_fails() {
        let rho0 = density_from_pure(&PureSystemState::basis(2, 0));
        let rho1 = density_from_pure(&PureSystemState::basis(2, 1));
        let rep = support_inclusion_check(0.1, &rho0, &rho1, SUPPORT_EPS);
        assert!(!rep.pass);
        assert_abs_diff_eq!(rep.inclusion_defect, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn positive_part_trace_equals_half_distance() {
        let rho0 = plus_rho();
        let rho1 = SystemDensityMatrix::maximally_mixed(2);
        let d = trace_distance(&rho0, &rho1).unwrap();
        let tr = positive_part_trace(&rho0, &rho1).unwrap();
        assert_abs_diff_eq!(tr, d / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn minimal_deviation_time_scan() {
        let mk = |t: f64, f: f64| BoundReport {
            t,
            fidelity: f,
            trace_distance: 0.0,
            energy_spread: 3.5,
            applicable: true,
            bound_fidelity: 1.0,
            margin_fidelity: None,
            margin_corollary: None,
            margin_trace: None,
            margin_weak_trace: None,
            margin_vector_min: None,
            tolerance: 1e-6,
        };
        let reports = vec![mk(0.0, 1.0), mk(1.0, 0.5), mk(2.0, 5e-4), mk(3.0, 1e-5)];
        assert_eq!(minimal_full_deviation_time(&reports, 1e-3), Some(2.0));
        assert_eq!(minimal_full_deviation_time(&reports, 1e-9), None);
        // degenerate threshold: first sample
        assert_eq!(minimal_full_deviation_time(&reports, 1.0), Some(0.0));
    }

    fn config(n: usize) -> ModelConfig {
        ModelConfig::new(
            Grid::new(-4.0, 12.0, n).unwrap(),
            1.0,
            0.0,
            1.0,
            FRAC_PI_2,
            CouplingShape::Bump,
            HermitianOperator::zero(2),
            HermitianOperator::pauli_z(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn truncated_clock_residuals() {
        let cfg = config(1024);
        let h = cfg.grid().spacing();
        // lattice-aligned past times
        let samples: Vec<f64> = (0..=16).map(|i| -(i as f64) * 16.0 * h).collect();
        let full = truncated_clock_residual(1024, &cfg, &samples).unwrap();
        assert_eq!(full, 0.0);
        let r8 = truncated_clock_residual(1024 / 8, &cfg, &samples).unwrap();
        let r4 = truncated_clock_residual(1024 / 4, &cfg, &samples).unwrap();
        assert!(r8 > 0.0);
        assert!(r4 > 0.0);
        assert!(r4 <= r8, "r4 = {r4}, r8 = {r8}");
    }

    #[test]
    fn condition1_scan_is_zero_in_the_past() {
        let cfg = config(1024);
        let h = cfg.grid().spacing();
        let samples: Vec<f64> = (0..=8).map(|i| -(i as f64) * 32.0 * h).collect();
        let res = condition1_scan(&cfg, &samples).unwrap();
        assert!(res.iter().all(|&r| r == 0.0), "{res:?}");
    }

    #[test]
    fn mandelstam_tamm_margins_nonnegative() {
        let cfg = config(2048);
        let phi = cfg.initial_packet().unwrap();
        let stats = crate::model::clock_energy_stats(&phi, 1.0);
        let window = speed_limit_window(stats.spread, 1.0);
        let ts: Vec<f64> = (0..=50).map(|i| window * i as f64 / 50.0).collect();
        let margins = mandelstam_tamm_check(&phi, stats.spread, &ts, 1.0);
        assert_eq!(margins.len(), 51);
        for (t, m) in margins {
            assert!(m >= -1e-9, "t = {t}, margin = {m}");
        }
    }

    #[test]
    fn mandelstam_tamm_degenerate_spread() {
        // single Fourier mode: spread 0, window infinite, autocorr 1
        let g = Grid::new(-4.0, 12.0, 256).unwrap();
        let amp = 1.0 / (16.0_f64).sqrt();
        let k = g.wavenumber(3);
        let amps: Vec<Complex64> = g
            .positions()
            .map(|x| Complex64::from(amp) * Complex64::new(0.0, k * x).exp())
            .collect();
        let phi = ClockWaveFunction::from_amplitudes(g, amps).unwrap();
        let margins = mandelstam_tamm_check(&phi, 0.0, &[0.0, 5.0, 50.0], 1.0);
        for (_, m) in margins {
            assert_abs_diff_eq!(m, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn evaluate_bounds_assembles_report() {
        let rho_free = plus_rho();
        let rho_pert = SystemDensityMatrix::maximally_mixed(2);
        let rep = evaluate_bounds(0.2, &rho_free, &rho_pert, 3.5, 1.0, 1e-6, 50, 42).unwrap();
        assert!(rep.applicable);
        assert_abs_diff_eq!(
            rep.fidelity,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(rep.trace_distance, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.bound_fidelity, (3.5_f64 * 0.2).cos(), epsilon = 1e-12);
        // weak margin dominates improved margin
        assert!(rep.margin_weak_trace.unwrap() >= rep.margin_trace.unwrap());
    }

    #[test]
    fn random_states_are_deterministic_per_seed() {
        let a = random_pure_states(2, 5, 99);
        let b = random_pure_states(2, 5, 99);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.amplitudes(), y.amplitudes());
        }
        let c = random_pure_states(2, 5, 100);
        assert!(a[0].amplitudes() != c[0].amplitudes());
    }

    #[test]
    fn photon_box_threshold_respects_speed_limit() {
        // sigma_x coupling, int g = pi/2, system starts in |0>; by the time F
        // reaches ~0 the packet has fully crossed, so t* dHc >> pi/2.
        let cfg = ModelConfig::new(
            Grid::new(-4.0, 12.0, 1024).unwrap(),
            1.0,
            0.0,
            1.0,
            FRAC_PI_2,
            CouplingShape::Bump,
            HermitianOperator::zero(2),
            HermitianOperator::pauli_x(),
            1.0,
        )
        .unwrap();
        let phi = cfg.initial_packet().unwrap();
        let stats = crate::model::clock_energy_stats(&phi, 1.0);
        let omega = PureSystemState::basis(2, 0);
        let theta0 = CompositeState::product(&phi, &omega);
        let prop = crate::propagator::StrangPropagator::new(&cfg);
        let mut theta = theta0;
        let rho0 = density_from_pure(&omega);
        let ts: Vec<f64> = (1..=60).map(|i| i as f64 * 3.0 / 60.0).collect();
        let mut reports = Vec::new();
        let mut t_cur = 0.0;
        for &t in &ts {
            prop.evolve_in_place(&mut theta, t - t_cur, 2e-3);
            t_cur = t;
            let rho = theta.reduced_system().unwrap();
            reports.push(
                evaluate_bounds(t, &rho0, &rho, stats.spread, 1.0, 1e-5, 0, 1).unwrap(),
            );
        }
        let t_star = minimal_full_deviation_time(&reports, 1e-3)
            .expect("orthogonalizing run must reach F <= 1e-3");
        assert!(t_star * stats.spread >= FRAC_PI_2 - 1e-4 * stats.spread);
        assert!(t_star > 1.5 && t_star < PI, "t* = {t_star}");
    }
}
