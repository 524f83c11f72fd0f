//! Simulator of a cavity whose photon modes have frequencies `ω·ln q` for
//! primes `q`.
//!
//! The level with energy `ħω·ln N` is the Fock state whose photon numbers are
//! the prime exponents of `N`. Driving the vacuum at `Ω = ω·ln N` prepares
//! that level, and counting photons per mode reads the factorization back.
//! The crate models the encoding, the truncated Hamiltonian and its drive,
//! first-order excitation probabilities, exact driven dynamics with
//! measurement sampling, and the time and energy cost of preparation.

pub mod cavity;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod perturbation;
pub mod units;

pub use cavity::{build_basis, build_coupling, verify_reachability, CavityBasis, CouplingModel, CouplingOperator, DriveConfig};
pub use dynamics::{
    occupation_probabilities, propagate, readout_factorization, sample_measurement, MeasurementResult,
    Propagator, Readout, Trajectory, WaveFunction,
};
pub use encoding::{compose, factorize, level_energy, level_spacing, sieve_primes, Factorizer, OccupationVector, SpectrumTable};
pub use error::{Error, Result};
pub use perturbation::{discrimination_time, excitation_probability, offresonant_envelope, DiscriminationMode};
pub use units::Units;
