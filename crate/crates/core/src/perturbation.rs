//! First-order excitation probabilities out of the vacuum and the
//! discrimination time they imply.
//!
//! [`excitation_probability`] is the sinc-squared resonance law
//! `p_M(t) = (2/ħ²)|w|²·sin²(Δt/2)/Δ²`, `Δ = ω(ln M − ln N)`, with the drive
//! tuned to `Ω = ω ln N`. It keeps the rotating term only and carries a
//! prefactor of 2. For `W·cos(Ωt)` proper, the first-order amplitude has a
//! co-rotating and a counter-rotating part with `w/2` each; that full
//! expression is [`first_order_probability`], and it is what the exact
//! propagation converges to as `λ → 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cavity::{CavityBasis, CouplingModel, CouplingOperator};
use crate::error::{Error, Result};
use crate::units::Units;

/// First-order results are flagged once any predicted probability exceeds
/// this.
pub const FIRST_ORDER_LIMIT: f64 = 0.1;

/// Grid points per nearest-neighbour beat period in instantaneous mode.
pub const GRID_POINTS_PER_PERIOD: usize = 64;

/// `ln M − ln N`, computed as `±ln(1 + |M−N|/min(M,N))` so that it is exactly
/// antisymmetric.
pub fn log_ratio(m: u64, n: u64) -> f64 {
    if m >= n {
        ((m - n) as f64 / n as f64).ln_1p()
    } else {
        -((n - m) as f64 / m as f64).ln_1p()
    }
}

fn check_labels(m: u64, n: u64) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::Domain(format!("labels must be excited states (>= 2), got M = {}, N = {}", m, n)));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be finite and non-negative, got {}", t)));
    }
    Ok(())
}

fn sinc_squared_law(m: u64, n: u64, t: f64, w: f64, units: Units) -> f64 {
    let hbar2 = units.hbar * units.hbar;
    if m == n {
        return w * w * t * t / (2.0 * hbar2);
    }
    let delta = units.omega * log_ratio(m, n);
    let s = (0.5 * delta * t).sin();
    2.0 * w * w * s * s / (hbar2 * delta * delta)
}

/// Probability of finding level `M` excited after driving at resonance with
/// `N` for time `t`, with vacuum coupling magnitude `w = |⟨1|W|M⟩|`.
///
/// At `M = N` this is the analytic limit `w²t²/(2ħ²)`.
pub fn excitation_probability(m: u64, n: u64, t: f64, w: f64, units: Units) -> Result<f64> {
    check_labels(m, n)?;
    check_time(t)?;
    Ok(sinc_squared_law(m, n, t, w, units))
}

/// Time-independent upper bound `2w²/(ħ²Δ²)` of [`excitation_probability`]
/// for `M ≠ N`.
pub fn offresonant_envelope(m: u64, n: u64, w: f64, units: Units) -> Result<f64> {
    check_labels(m, n)?;
    if m == n {
        return Err(Error::Domain(format!("envelope is unbounded on resonance (M = N = {})", n)));
    }
    let delta = units.omega * log_ratio(m, n);
    Ok(2.0 * w * w / (units.hbar * units.hbar * delta * delta))
}

/// On-resonance probability `w²t²/(2ħ²)`.
pub fn resonant_probability(t: f64, w: f64, units: Units) -> f64 {
    w * w * t * t / (2.0 * units.hbar * units.hbar)
}

/// `∫₀ᵗ e^{ixs} ds`, written to stay accurate as `x → 0`.
fn phase_integral(x: f64, t: f64) -> C64 {
    if x == 0.0 {
        return C64::new(t, 0.0);
    }
    let half = 0.5 * x * t;
    C64::from_polar(1.0, half) * (2.0 * half.sin() / x)
}

/// First-order probability of level `M` under the full drive
/// `W·cos(Ωt)`, counter-rotating term included.
///
/// `c_M(t) = −(iw/2ħ)·[∫e^{i(ω_M−Ω)s}ds + ∫e^{i(ω_M+Ω)s}ds]` with
/// `ω_M = ω ln M`.
pub fn first_order_probability(m: u64, t: f64, w: f64, drive_frequency: f64, units: Units) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("label must be an excited state (>= 2), got {}", m)));
    }
    check_time(t)?;
    let omega_m = units.omega * (m as f64).ln();
    let amp = (phase_integral(omega_m - drive_frequency, t) + phase_integral(omega_m + drive_frequency, t))
        * (0.5 * w / units.hbar);
    Ok(amp.norm_sqr())
}

/// Strength `λ` at which the resonant probability of `target` reaches `p`
/// after time `t` under the given coupling model.
pub fn strength_for_probability(p: f64, t: f64, target: u64, model: CouplingModel, units: Units) -> Result<f64> {
    if !(p > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("need p > 0 and t > 0, got p = {}, t = {}", p, t)));
    }
    let w = units.hbar * (2.0 * p).sqrt() / t;
    let per_unit = model.vacuum_element(target, 1.0)
        .ok_or_else(|| Error::Config("custom couplings have no strength parameter".into()))?;
    Ok(w / per_unit)
}

/// Sinc-squared probabilities of every excited level at one instant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExcitationProfile {
    pub target: u64,
    pub time: f64,
    /// `(M, p_M)` for `M = 2..=n_max`.
    pub probabilities: Vec<(u64, f64)>,
    /// False once any `p_M` exceeds [`FIRST_ORDER_LIMIT`].
    pub first_order_valid: bool,
}

impl ExcitationProfile {
    pub fn probability(&self, m: u64) -> Option<f64> {
        self.probabilities.iter().find(|(l, _)| *l == m).map(|&(_, p)| p)
    }

    pub fn max_probability(&self) -> f64 {
        self.probabilities.iter().map(|&(_, p)| p).fold(0.0, f64::max)
    }
}

pub fn excitation_profile(
    basis: &CavityBasis,
    coupling: &CouplingOperator,
    target: u64,
    t: f64,
) -> Result<ExcitationProfile> {
    check_labels(target, target)?;
    check_time(t)?;
    if !basis.contains(target) {
        return Err(Error::Domain(format!("target {} outside basis of size {}", target, basis.n_max())));
    }
    let units = basis.units();
    let row = coupling.vacuum_row();
    let probabilities: Vec<(u64, f64)> = (2..=basis.n_max())
        .map(|m| (m, sinc_squared_law(m, target, t, row[(m - 1) as usize], units)))
        .collect();
    let first_order_valid = probabilities.iter().all(|&(_, p)| p <= FIRST_ORDER_LIMIT);
    Ok(ExcitationProfile { target, time: t, probabilities, first_order_valid })
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscriminationMode {
    /// Compare the target against the off-resonant envelopes.
    #[default]
    Envelope,
    /// Compare instantaneous probabilities on a time grid.
    Instantaneous,
}

impl fmt::Display for DiscriminationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscriminationMode::Envelope => "envelope",
            DiscriminationMode::Instantaneous => "instantaneous",
        })
    }
}

impl FromStr for DiscriminationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "envelope" => Ok(DiscriminationMode::Envelope),
            "instantaneous" => Ok(DiscriminationMode::Instantaneous),
            other => Err(Error::Config(format!(
                "unknown discrimination mode '{}' (expected envelope or instantaneous)", other
            ))),
        }
    }
}

/// Beat period `2π/(ω·ln((N+1)/N))` between the target and its upper
/// neighbour.
pub fn neighbour_period(target: u64, units: Units) -> f64 {
    2.0 * PI / (units.omega * (1.0 / target as f64).ln_1p())
}

/// Shortest drive time after which the target dominates every other
/// excited level by the factor `kappa`.
///
/// Envelope mode solves `p_N(t) = κ·max_M envelope(M, N)` in closed form;
/// for the uniform star this is `t = 2√κ/(ω·ln((N+1)/N))`. Instantaneous
/// mode returns the first grid time from which `p_N ≥ κ·max_M p_M` holds
/// for a full nearest-neighbour beat period.
pub fn discrimination_time(
    target: u64,
    basis: &CavityBasis,
    coupling: &CouplingOperator,
    kappa: f64,
    mode: DiscriminationMode,
) -> Result<f64> {
    if target < 2 || target + 1 > basis.n_max() {
        return Err(Error::Domain(format!(
            "target {} needs both neighbours in the basis (n_max = {})", target, basis.n_max()
        )));
    }
    if !(kappa.is_finite() && kappa >= 1.0) {
        return Err(Error::Domain(format!("kappa must be >= 1, got {}", kappa)));
    }
    let units = basis.units();
    let row = coupling.vacuum_row();
    let w_target = row[(target - 1) as usize];
    if w_target == 0.0 {
        return Err(Error::Domain(format!("target {} is not coupled to the vacuum", target)));
    }
    let competitors = || (2..=basis.n_max()).filter(move |&m| m != target);

    let max_envelope = competitors()
        .map(|m| offresonant_envelope(m, target, row[(m - 1) as usize], units))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let envelope_time = units.hbar * (2.0 * kappa * max_envelope).sqrt() / w_target;

    match mode {
        DiscriminationMode::Envelope => Ok(envelope_time),
        DiscriminationMode::Instantaneous => {
            let period = neighbour_period(target, units);
            let step = period / GRID_POINTS_PER_PERIOD as f64;
            let last = ((envelope_time + period) / step).ceil() as usize + GRID_POINTS_PER_PERIOD;
            let mut run_start: Option<usize> = None;
            for k in 1..=last {
                let t = k as f64 * step;
                let p_target = sinc_squared_law(target, target, t, w_target, units);
                let p_rival = competitors()
                    .map(|m| sinc_squared_law(m, target, t, row[(m - 1) as usize], units))
                    .fold(0.0, f64::max);
                if p_target >= kappa * p_rival {
                    let start = *run_start.get_or_insert(k);
                    if k - start >= GRID_POINTS_PER_PERIOD {
                        return Ok(start as f64 * step);
                    }
                } else {
                    run_start = None;
                }
            }
            Err(Error::Domain(format!("no sustained discrimination found for target {}", target)))
        }
    }
}
