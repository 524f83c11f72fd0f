//! Exact integration of `iħ dψ/dt = (H₀ + W cos Ωt) ψ` on the truncated basis.
//!
//! No rotating-wave approximation is made. The integrator is classical
//! fixed-step RK4; `H₀` is diagonal and `W` is stored sparse, so each
//! derivative costs `O(n_max + nnz(W))`. The state is never renormalised:
//! norm drift is measured and checked against [`NORM_TOLERANCE`].

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cavity::{CavityBasis, CouplingOperator, DriveConfig};
use crate::error::{Error, Result};

pub mod measurement;

pub use measurement::{readout_factorization, sample_measurement, MeasurementResult, Readout};

/// Upper bound on `dt·(max|E_N| + λ)/ħ`.
pub const DT_GATE: f64 = 0.05;

/// Largest tolerated `|‖ψ‖² − 1|`.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Complex amplitudes over basis labels, indexed by `N - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    amplitudes: Vec<C64>,
}

impl WaveFunction {
    pub fn vacuum(dim: usize) -> Self { Self::basis_state(1, dim) }

    /// The pure state `ψ_N`.
    pub fn basis_state(label: u64, dim: usize) -> Self {
        assert!(label >= 1 && label as usize <= dim, "label {} outside basis of size {}", label, dim);
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[(label - 1) as usize] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Wraps raw amplitudes; they must already be normalised.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain("wave function needs at least one amplitude".into()));
        }
        let psi = Self { amplitudes };
        let drift = psi.norm_drift();
        if !(drift <= NORM_TOLERANCE) {
            return Err(Error::Domain(format!("amplitudes not normalised (|norm² − 1| = {:e})", drift)));
        }
        Ok(psi)
    }

    pub fn dim(&self) -> usize { self.amplitudes.len() }

    pub fn amplitudes(&self) -> &[C64] { &self.amplitudes }

    pub fn amplitude(&self, label: u64) -> C64 { self.amplitudes[(label - 1) as usize] }

    pub fn norm_sqr(&self) -> f64 { self.amplitudes.iter().map(|a| a.norm_sqr()).sum() }

    pub fn norm_drift(&self) -> f64 { (self.norm_sqr() - 1.0).abs() }
}

/// Born-rule probabilities `|c_N|²`, indexed by `N - 1`.
pub fn occupation_probabilities(psi: &WaveFunction) -> Vec<f64> {
    psi.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Largest time step admitted by [`DT_GATE`] for this Hamiltonian.
pub fn max_admissible_dt(basis: &CavityBasis, coupling: &CouplingOperator) -> f64 {
    let scale = basis.spectrum().max_energy().abs() + coupling.max_abs_element();
    DT_GATE * basis.units().hbar / scale
}

/// States sampled along a propagation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WaveFunction>,
    /// Step actually taken (`t_final` divided into whole steps).
    pub dt: f64,
    pub steps: usize,
    /// Largest `|‖ψ‖² − 1|` over the recorded samples.
    pub max_norm_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &WaveFunction { self.states.last().expect("trajectory has the initial state") }

    pub fn final_time(&self) -> f64 { *self.times.last().expect("trajectory has the initial time") }
}

/// Fixed-step RK4 integrator bound to one Hamiltonian and drive.
pub struct Propagator<'a> {
    energies: &'a [f64],
    coupling: &'a CouplingOperator,
    drive: DriveConfig,
    hbar: f64,
    dt: f64,
}

impl<'a> Propagator<'a> {
    /// Checks the step against [`DT_GATE`]; the error names the largest
    /// admissible step.
    pub fn new(basis: &'a CavityBasis, coupling: &'a CouplingOperator, drive: DriveConfig, dt: f64) -> Result<Self> {
        if coupling.dim() != basis.dim() {
            return Err(Error::Config(format!(
                "coupling dimension {} does not match basis dimension {}", coupling.dim(), basis.dim()
            )));
        }
        let dt_max = max_admissible_dt(basis, coupling);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive; maximum admissible dt is {:e}", dt_max)));
        }
        if dt > dt_max {
            return Err(Error::Config(format!(
                "dt = {:e} violates the accuracy gate; maximum admissible dt is {:e}", dt, dt_max
            )));
        }
        Ok(Self {
            energies: basis.hamiltonian_diagonal(),
            coupling,
            drive,
            hbar: basis.units().hbar,
            dt,
        })
    }

    /// `out = −(i/ħ)(H₀ + W cos Ωt) psi`.
    fn derivative(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let minus_i_over_hbar = C64::new(0.0, -1.0 / self.hbar);
        for ((o, &e), &a) in out.iter_mut().zip(self.energies).zip(psi) {
            *o = minus_i_over_hbar * e * a;
        }
        let c = (self.drive.frequency * t).cos();
        self.coupling.apply_add(psi, minus_i_over_hbar * c, out);
    }

    fn step_count(&self, t_final: f64) -> usize {
        if t_final == 0.0 { return 0; }
        ((t_final / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// Integrates from `t = 0` to `t_final`, recording every `stride`-th step
    /// and the final state.
    pub fn trajectory(&self, psi0: &WaveFunction, t_final: f64, stride: usize) -> Result<Trajectory> {
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::Config(format!("t_final must be non-negative, got {}", t_final)));
        }
        if psi0.dim() != self.energies.len() {
            return Err(Error::Config(format!(
                "state dimension {} does not match basis dimension {}", psi0.dim(), self.energies.len()
            )));
        }
        let initial_drift = psi0.norm_drift();
        if initial_drift > NORM_TOLERANCE {
            return Err(Error::Config(format!("initial state not normalised (drift {:e})", initial_drift)));
        }
        let stride = stride.max(1);
        let steps = self.step_count(t_final);
        let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
        let dim = psi0.dim();
        let zero = C64::new(0.0, 0.0);

        let mut psi = psi0.amplitudes.clone();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
        let mut tmp = vec![zero; dim];

        let mut times = vec![0.0];
        let mut states = vec![psi0.clone()];
        let mut max_norm_drift = initial_drift;

        for k in 0..steps {
            let t = k as f64 * h;
            self.derivative(t, &psi, &mut k1);
            for j in 0..dim { tmp[j] = psi[j] + k1[j] * (0.5 * h); }
            self.derivative(t + 0.5 * h, &tmp, &mut k2);
            for j in 0..dim { tmp[j] = psi[j] + k2[j] * (0.5 * h); }
            self.derivative(t + 0.5 * h, &tmp, &mut k3);
            for j in 0..dim { tmp[j] = psi[j] + k3[j] * h; }
            self.derivative(t + h, &tmp, &mut k4);
            for j in 0..dim {
                psi[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
            }
            if (k + 1) % stride == 0 || k + 1 == steps {
                let state = WaveFunction { amplitudes: psi.clone() };
                let time = (k + 1) as f64 * h;
                let drift = state.norm_drift();
                if !(drift <= NORM_TOLERANCE) {
                    return Err(Error::NormDrift { drift, tolerance: NORM_TOLERANCE, time });
                }
                max_norm_drift = max_norm_drift.max(drift);
                times.push(time);
                states.push(state);
            }
        }
        Ok(Trajectory { times, states, dt: h, steps, max_norm_drift })
    }

    /// Final state only.
    pub fn evolve(&self, psi0: &WaveFunction, t_final: f64) -> Result<WaveFunction> {
        let steps = self.step_count(t_final);
        let mut traj = self.trajectory(psi0, t_final, steps.max(1))?;
        Ok(traj.states.pop().expect("non-empty"))
    }
}

/// Integrates with step `dt` (rounded down to divide `t_final`), recording
/// every step.
pub fn propagate(
    psi0: &WaveFunction,
    basis: &CavityBasis,
    coupling: &CouplingOperator,
    drive: DriveConfig,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    Propagator::new(basis, coupling, drive, dt)?.trajectory(psi0, t_final, 1)
}
