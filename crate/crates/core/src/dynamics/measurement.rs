//! Photon-counting readout: Born-rule sampling and post-selected
//! factorization readout.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{occupation_probabilities, WaveFunction};
use crate::encoding::{factorize, OccupationVector};
use crate::error::{Error, Result};

/// What the photon counts say about the prepared label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Readout {
    /// The most frequent excited label and its photon content.
    Factorization { label: u64, occupation: OccupationVector },
    /// No shot left the vacuum.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementResult {
    pub shots: u64,
    /// Shots per label; labels never observed are absent.
    pub counts: BTreeMap<u64, u64>,
    pub readout: Readout,
    pub target: Option<u64>,
    /// Target counts over excited (non-vacuum) counts, when both exist.
    pub conditional_target_probability: Option<f64>,
}

impl MeasurementResult {
    /// Builds the readout from raw counts. The modal excited label wins; ties
    /// go to the smaller label.
    pub fn from_counts(counts: BTreeMap<u64, u64>, target: Option<u64>) -> Result<Self> {
        if counts.contains_key(&0) {
            return Err(Error::Domain("label 0 is not a basis state".into()));
        }
        let shots: u64 = counts.values().sum();
        if shots == 0 {
            return Err(Error::Domain("measurement needs at least one shot".into()));
        }
        let excited: u64 = counts.iter().filter(|(&l, _)| l != 1).map(|(_, &c)| c).sum();
        let modal = counts.iter()
            .filter(|(&l, &c)| l != 1 && c > 0)
            .fold(None, |best: Option<(u64, u64)>, (&l, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((l, c)),
            });
        let readout = match modal {
            Some((label, _)) => Readout::Factorization { label, occupation: factorize(label)? },
            None => Readout::Inconclusive,
        };
        let conditional_target_probability = match target {
            Some(t) if excited > 0 => Some(counts.get(&t).copied().unwrap_or(0) as f64 / excited as f64),
            _ => None,
        };
        Ok(Self { shots, counts, readout, target, conditional_target_probability })
    }

    pub fn is_inconclusive(&self) -> bool { self.readout == Readout::Inconclusive }

    pub fn excited_counts(&self) -> u64 {
        self.counts.iter().filter(|(&l, _)| l != 1).map(|(_, &c)| c).sum()
    }
}

/// Draws `shots` independent basis-label outcomes from `|c_N|²`.
///
/// The generator is ChaCha8 seeded from `seed`, so equal inputs give
/// identical counts.
pub fn sample_measurement(psi: &WaveFunction, shots: u64, seed: u64, target: Option<u64>) -> Result<MeasurementResult> {
    if shots == 0 {
        return Err(Error::Domain("measurement needs at least one shot".into()));
    }
    let probabilities = occupation_probabilities(psi);
    let dist = WeightedIndex::new(&probabilities)
        .map_err(|e| Error::Domain(format!("invalid outcome distribution: {}", e)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let label = dist.sample(&mut rng) as u64 + 1;
        *counts.entry(label).or_insert(0) += 1;
    }
    MeasurementResult::from_counts(counts, target)
}

/// The factorization read from the photon counts; vacuum-only results are
/// [`Error::Inconclusive`].
pub fn readout_factorization(result: &MeasurementResult) -> Result<OccupationVector> {
    match &result.readout {
        Readout::Factorization { occupation, .. } => Ok(occupation.clone()),
        Readout::Inconclusive => Err(Error::Inconclusive { shots: result.shots }),
    }
}
