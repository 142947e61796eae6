//! Time evolution: exact free clock translation, free system evolution,
//! Strang split-operator composite evolution and a dense brute-force oracle.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::SpectralTransform;
use crate::model::{validate_no_wrap, ClockWaveFunction, Grid, ModelConfig};
use crate::statelib::{
    herm_eig, unitary_exp, HermitianOperator, PureSystemState, SystemDensityMatrix,
};

/// Largest clock-times-system dimension the dense oracle accepts.
pub const DENSE_LIMIT: usize = 512;

/// Pure joint state of clock and system, amplitudes laid out as
/// `[j * d_s + a]`, normalized so h * sum |.|^2 = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    grid: Arc<Grid>,
    d_s: usize,
    amplitudes: Vec<Complex64>,
}

impl CompositeState {
    pub fn product(phi: &ClockWaveFunction, omega: &PureSystemState) -> Self {
        let d_s = omega.dim();
        let n = phi.grid().len();
        let mut amps = vec![Complex64::new(0.0, 0.0); n * d_s];
        for (j, &cj) in phi.amplitudes().iter().enumerate() {
            for a in 0..d_s {
                amps[j * d_s + a] = cj * omega.amplitudes()[a];
            }
        }
        Self {
            grid: phi.grid().clone(),
            d_s,
            amplitudes: amps,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn system_dim(&self) -> usize {
        self.d_s
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, j: usize, a: usize) -> Complex64 {
        self.amplitudes[j * self.d_s + a]
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        (self.grid.spacing() * s).sqrt()
    }

    /// L2 distance in the grid measure.
    pub fn distance(&self, other: &CompositeState) -> f64 {
        let s: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (self.grid.spacing() * s).sqrt()
    }

    /// Reduced system state rho[a,b] = h * sum_j theta[j,a] conj(theta[j,b]),
    /// renormalized by its trace to absorb norm drift of order 1e-9.
    pub fn reduced_system(&self) -> Result<SystemDensityMatrix> {
        let h = self.grid.spacing();
        let mut m = DMatrix::<Complex64>::zeros(self.d_s, self.d_s);
        for j in 0..self.grid.len() {
            let row = &self.amplitudes[j * self.d_s..(j + 1) * self.d_s];
            for a in 0..self.d_s {
                for b in 0..self.d_s {
                    m[(a, b)] += row[a] * row[b].conj();
                }
            }
        }
        m *= Complex64::from(h);
        let tr = m.trace().re;
        if tr <= 0.0 {
            return Err(Error::Validation("zero-trace reduced state".into()));
        }
        m /= Complex64::from(tr);
        SystemDensityMatrix::new(m)
    }

    /// Gram matrix M[a,b] = h <theta[:,a], theta[:,b]> of the clock-conditional
    /// vectors. Encodes the clock reduced state spectrum.
    pub fn clock_gram(&self) -> DMatrix<Complex64> {
        let h = self.grid.spacing();
        let mut m = DMatrix::<Complex64>::zeros(self.d_s, self.d_s);
        for j in 0..self.grid.len() {
            let row = &self.amplitudes[j * self.d_s..(j + 1) * self.d_s];
            for a in 0..self.d_s {
                for b in 0..self.d_s {
                    m[(a, b)] += row[a].conj() * row[b];
                }
            }
        }
        m * Complex64::from(h)
    }

    /// tr(rho_c^2) from the Gram matrix.
    pub fn clock_purity(&self) -> f64 {
        let m = self.clock_gram();
        let tr = m.trace().re;
        m.iter().map(|e| e.norm_sqr()).sum::<f64>() / (tr * tr)
    }

    /// sqrt(<phi| rho_c |phi>): fidelity of the clock reduced state to a pure
    /// reference clock state.
    pub fn clock_fidelity_to(&self, phi: &ClockWaveFunction) -> f64 {
        let h = self.grid.spacing();
        let mut s = 0.0;
        for a in 0..self.d_s {
            let mut ip = Complex64::new(0.0, 0.0);
            for (j, r) in phi.amplitudes().iter().enumerate() {
                ip += r.conj() * self.amplitudes[j * self.d_s + a];
            }
            s += (ip * h).norm_sqr();
        }
        s.max(0.0).sqrt().min(1.0)
    }

    /// Dense clock reduced state, feasible only for small grids.
    pub fn reduced_clock_dense(&self) -> Result<DMatrix<Complex64>> {
        let n = self.grid.len();
        if n > DENSE_LIMIT {
            return Err(Error::DenseTooLarge(n));
        }
        let h = self.grid.spacing();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            for l in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for a in 0..self.d_s {
                    s += self.amplitudes[j * self.d_s + a]
                        * self.amplitudes[l * self.d_s + a].conj();
                }
                m[(j, l)] = s * h;
            }
        }
        Ok(m)
    }
}

/// Reduced clock-state summary returned alongside the system state.
#[derive(Debug, Clone)]
pub struct ClockReduction {
    pub gram: DMatrix<Complex64>,
    pub purity: f64,
    pub dense: Option<DMatrix<Complex64>>,
}

/// Both partial traces of a composite state.
pub fn reduced_states(theta: &CompositeState) -> Result<(SystemDensityMatrix, ClockReduction)> {
    let rho_s = theta.reduced_system()?;
    let dense = if theta.grid().len() <= DENSE_LIMIT {
        Some(theta.reduced_clock_dense()?)
    } else {
        None
    };
    let clock = ClockReduction {
        gram: theta.clock_gram(),
        purity: theta.clock_purity(),
        dense,
    };
    Ok((rho_s, clock))
}

/// Exact free clock translation phi(x) -> phi(x - t). Lattice shifts are
/// realized as index rotations (bitwise exact); everything else goes through
/// the Fourier shift theorem.
pub fn free_clock_evolve(phi: &ClockWaveFunction, t: f64) -> ClockWaveFunction {
    let grid = phi.grid().clone();
    let n = grid.len();
    if let Some(m) = grid.is_lattice_shift(t) {
        let shift = m.rem_euclid(n as i64) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            out[(j + shift) % n] = phi.amplitudes()[j];
        }
        return ClockWaveFunction::from_amplitudes_unchecked(grid, out);
    }
    let fft = SpectralTransform::new(n);
    let mut hat = phi.amplitudes().to_vec();
    fft.forward(&mut hat);
    for (j, v) in hat.iter_mut().enumerate() {
        *v *= Complex64::new(0.0, -grid.wavenumber(j) * t).exp();
    }
    fft.inverse(&mut hat);
    ClockWaveFunction::from_amplitudes_unchecked(grid, hat)
}

/// rho_s0(t) = exp(-i H_s t / hbar) rho exp(+i H_s t / hbar).
pub fn free_system_evolve(
    rho: &SystemDensityMatrix,
    h_s: &HermitianOperator,
    t: f64,
    hbar: f64,
) -> Result<SystemDensityMatrix> {
    let u = unitary_exp(h_s, t, hbar);
    SystemDensityMatrix::new(&u * rho.matrix() * u.adjoint())
}

/// |<phi_c(t), phi_c(0)>| with the grid inner product.
pub fn autocorrelation(phi0: &ClockWaveFunction, t: f64) -> f64 {
    let phit = free_clock_evolve(phi0, t);
    phit.inner(phi0).norm().min(1.0)
}

/// Result of a Strang evolution, with an a-posteriori error estimate from
/// step halving.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub state: CompositeState,
    pub t: f64,
    pub dt_used: f64,
    pub step_halving_error: f64,
}

/// Strang split-operator propagator for H = H_c + H_s + V with H_c = p
/// treated exactly in Fourier space and V diagonal in position x
/// (B-eigenbasis).
pub struct StrangPropagator {
    grid: Arc<Grid>,
    d_s: usize,
    hbar: f64,
    g: Vec<f64>,
    b_vals: Vec<f64>,
    b_vecs: DMatrix<Complex64>,
    /// Set when B is diagonal in the computational basis.
    b_diag: Option<Vec<f64>>,
    h_s: HermitianOperator,
    h_s_is_zero: bool,
    k: Vec<f64>,
    fft: SpectralTransform,
}

impl StrangPropagator {
    pub fn new(config: &ModelConfig) -> Self {
        let grid = config.grid().clone();
        let (b_vals, b_vecs) = herm_eig(config.coupling_op().matrix());
        let d = config.system_dim();
        let b_mat = config.coupling_op().matrix();
        let off_diag_zero = (0..d)
            .flat_map(|r| (0..d).map(move |c| (r, c)))
            .all(|(r, c)| r == c || b_mat[(r, c)].norm() == 0.0);
        let b_diag = off_diag_zero.then(|| (0..d).map(|a| b_mat[(a, a)].re).collect());
        let h_s_is_zero = config
            .system_hamiltonian()
            .matrix()
            .iter()
            .all(|e| e.norm() == 0.0);
        let k = grid.wavenumbers();
        let n = grid.len();
        Self {
            grid,
            d_s: config.system_dim(),
            hbar: config.hbar(),
            g: config.profile().values().to_vec(),
            b_vals,
            b_vecs,
            b_diag,
            h_s: config.system_hamiltonian().clone(),
            h_s_is_zero,
            k,
            fft: SpectralTransform::new(n),
        }
    }

    /// One Strang step: half V, full kinetic (x) system, half V.
    fn step(&self, amps: &mut [Complex64], dt: f64, scratch: &mut Vec<Complex64>) {
        self.half_potential(amps, dt);
        self.kinetic_and_system(amps, dt, scratch);
        self.half_potential(amps, dt);
    }

    fn half_potential(&self, amps: &mut [Complex64], dt: f64) {
        let d = self.d_s;
        let factor = -dt / (2.0 * self.hbar);
        if let Some(diag) = &self.b_diag {
            for (j, &gj) in self.g.iter().enumerate() {
                if gj == 0.0 {
                    continue;
                }
                for a in 0..d {
                    let phase = Complex64::new(0.0, factor * gj * diag[a]).exp();
                    amps[j * d + a] *= phase;
                }
            }
        } else {
            let w = &self.b_vecs;
            let wd = w.adjoint();
            let mut v = DVector::<Complex64>::zeros(d);
            for (j, &gj) in self.g.iter().enumerate() {
                if gj == 0.0 {
                    continue;
                }
                for a in 0..d {
                    v[a] = amps[j * d + a];
                }
                let mut y = &wd * &v;
                for (a, &b) in self.b_vals.iter().enumerate() {
                    y[a] *= Complex64::new(0.0, factor * gj * b).exp();
                }
                let out = w * y;
                for a in 0..d {
                    amps[j * d + a] = out[a];
                }
            }
        }
    }

    fn kinetic_and_system(&self, amps: &mut [Complex64], dt: f64, scratch: &mut Vec<Complex64>) {
        let n = self.grid.len();
        let d = self.d_s;
        scratch.resize(n, Complex64::new(0.0, 0.0));
        // exp(-i p dt / hbar) with p = hbar k: the phase is exp(-i k dt).
        for a in 0..d {
            for j in 0..n {
                scratch[j] = amps[j * d + a];
            }
            self.fft.forward(scratch);
            for (j, v) in scratch.iter_mut().enumerate() {
                *v *= Complex64::new(0.0, -self.k[j] * dt).exp();
            }
            self.fft.inverse(scratch);
            for j in 0..n {
                amps[j * d + a] = scratch[j];
            }
        }
        if !self.h_s_is_zero {
            let u = unitary_exp(&self.h_s, dt, self.hbar);
            let mut v = DVector::<Complex64>::zeros(d);
            for j in 0..n {
                for a in 0..d {
                    v[a] = amps[j * d + a];
                }
                let out = &u * &v;
                for a in 0..d {
                    amps[j * d + a] = out[a];
                }
            }
        }
    }

    /// Evolve in place by `t` using steps of size `dt` plus one final partial
    /// step for the remainder.
    pub fn evolve_in_place(&self, state: &mut CompositeState, t: f64, dt: f64) {
        let mut scratch = Vec::new();
        let nst = (t / dt + 1e-9).floor() as u64;
        for _ in 0..nst {
            self.step(&mut state.amplitudes, dt, &mut scratch);
        }
        let rem = t - nst as f64 * dt;
        if rem > 1e-13 {
            self.step(&mut state.amplitudes, rem, &mut scratch);
        }
    }

    /// Evolve through an ascending list of sample times, invoking the callback
    /// at each sample.
    pub fn evolve_sampled(
        &self,
        state: &mut CompositeState,
        t_samples: &[f64],
        dt: f64,
        mut on_sample: impl FnMut(usize, f64, &CompositeState),
    ) {
        let mut t_cur = 0.0;
        for (i, &t) in t_samples.iter().enumerate() {
            let seg = t - t_cur;
            if seg > 0.0 {
                self.evolve_in_place(state, seg, dt);
            }
            t_cur = t;
            on_sample(i, t, state);
        }
    }
}

/// Strang evolution over [0, t] with a step-halving error estimate.
pub fn strang_evolve(
    theta0: &CompositeState,
    config: &ModelConfig,
    t: f64,
    dt: f64,
) -> Result<EvolutionResult> {
    if !(t >= 0.0) {
        return Err(Error::Validation("evolution time must be nonnegative".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Validation("dt must be positive".into()));
    }
    if dt > t && t > 0.0 {
        return Err(Error::Validation(format!("dt = {dt} exceeds t = {t}")));
    }
    validate_no_wrap(config, t)?;
    let prop = StrangPropagator::new(config);
    let mut coarse = theta0.clone();
    prop.evolve_in_place(&mut coarse, t, dt);
    let mut fine = theta0.clone();
    prop.evolve_in_place(&mut fine, t, dt / 2.0);
    let err = coarse.distance(&fine);
    Ok(EvolutionResult {
        state: coarse,
        t,
        dt_used: dt,
        step_halving_error: err,
    })
}

/// Brute-force propagator: builds the full (n*d_s)^2 Hermitian matrix
/// H = P (x) I + I (x) H_s + diag(g) (x) B and evolves by eigendecomposition.
pub fn dense_oracle_evolve(
    theta0: &CompositeState,
    config: &ModelConfig,
    t: f64,
) -> Result<CompositeState> {
    let n = config.grid().len();
    let d = config.system_dim();
    let dim = n * d;
    if dim > DENSE_LIMIT {
        return Err(Error::DenseTooLarge(dim));
    }
    let h = dense_hamiltonian(config);
    let (vals, vecs) = herm_eig(&h);
    let psi0 = DVector::from_column_slice(theta0.amplitudes());
    let coeff = vecs.adjoint() * &psi0;
    let mut psi = DVector::<Complex64>::zeros(dim);
    for (i, &l) in vals.iter().enumerate() {
        let phase = Complex64::new(0.0, -l * t / config.hbar()).exp();
        psi += vecs.column(i) * (coeff[i] * phase);
    }
    Ok(CompositeState {
        grid: theta0.grid().clone(),
        d_s: d,
        amplitudes: psi.as_slice().to_vec(),
    })
}

/// The dense spectral momentum matrix plus system and coupling terms.
pub fn dense_hamiltonian(config: &ModelConfig) -> DMatrix<Complex64> {
    let grid = config.grid();
    let n = grid.len();
    let d = config.system_dim();
    let hbar = config.hbar();
    // P[j,l] depends only on (j - l) mod n: inverse DFT of hbar * k.
    let fft = SpectralTransform::new(n);
    let mut pk: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from(hbar * grid.wavenumber(j)))
        .collect();
    fft.inverse(&mut pk);
    let dim = n * d;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let hs = config.system_hamiltonian().matrix();
    let b = config.coupling_op().matrix();
    let g = config.profile().values();
    for j in 0..n {
        for l in 0..n {
            let p = pk[(j + n - l) % n];
            for a in 0..d {
                h[(j * d + a, l * d + a)] += p;
            }
        }
        for a in 0..d {
            for bb in 0..d {
                h[(j * d + a, j * d + bb)] += hs[(a, bb)] + Complex64::from(g[j]) * b[(a, bb)];
            }
        }
    }
    h
}
