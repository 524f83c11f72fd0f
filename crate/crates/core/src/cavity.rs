//! Truncated cavity Hilbert space, its diagonal Hamiltonian and the drive
//! coupling.
//!
//! Basis labels run over `1..=n_max`; label `N` is the Fock state whose
//! occupation vector is the factorization of `N`. Vectors and matrices over
//! the basis are indexed by `N - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::encoding::{Factorizer, OccupationVector, SpectrumTable};
use crate::error::{Error, Result};
use crate::units::Units;

#[derive(Clone, Debug)]
pub struct CavityBasis {
    n_max: u64,
    occupations: Vec<OccupationVector>,
    spectrum: SpectrumTable,
}

/// Builds the basis `1..=n_max` with occupations and energies.
pub fn build_basis(n_max: u64, units: Units) -> Result<CavityBasis> {
    if n_max < 2 {
        return Err(Error::Domain(format!("basis needs n_max >= 2, got {}", n_max)));
    }
    let spectrum = SpectrumTable::new(n_max, units)?;
    let factorizer = Factorizer::new(n_max);
    let occupations = (1..=n_max)
        .map(|n| factorizer.factorize(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(CavityBasis { n_max, occupations, spectrum })
}

impl CavityBasis {
    pub fn n_max(&self) -> u64 { self.n_max }

    pub fn dim(&self) -> usize { self.n_max as usize }

    pub fn units(&self) -> Units { self.spectrum.units() }

    pub fn spectrum(&self) -> &SpectrumTable { &self.spectrum }

    pub fn contains(&self, label: u64) -> bool { (1..=self.n_max).contains(&label) }

    pub fn occupation(&self, label: u64) -> Option<&OccupationVector> {
        if label == 0 { return None; }
        self.occupations.get((label - 1) as usize)
    }

    pub fn energy(&self, label: u64) -> Option<f64> { self.spectrum.energy(label) }

    /// Diagonal of `H₀` indexed by `N - 1`.
    pub fn hamiltonian_diagonal(&self) -> &[f64] { self.spectrum.energies() }

    /// Prime modes that carry photons anywhere in the basis.
    pub fn modes(&self) -> Vec<u64> {
        let mut modes: Vec<u64> = self.occupations.iter()
            .flat_map(|occ| occ.entries().iter().map(|&(q, _)| q))
            .collect();
        modes.sort_unstable();
        modes.dedup();
        modes
    }

    /// Writes `H₀` as a dense row-major CSV, each complex entry as `re,im`.
    pub fn write_hamiltonian_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = self.dim();
        let energies = self.hamiltonian_diagonal();
        for row in 0..dim {
            let cells: Vec<String> = (0..dim)
                .map(|col| {
                    let re = if row == col { energies[row] } else { 0.0 };
                    format!("{:e},{:e}", re, 0.0)
                })
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Named forms of the drive operator `W`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingModel {
    /// `⟨1|W|N⟩ = λ` for every excited `N`.
    StarUniform,
    /// `⟨1|W|N⟩ = λ/√N`.
    StarDecay,
    /// Hand-assembled entries.
    Custom,
}

impl CouplingModel {
    pub fn name(&self) -> &'static str {
        match self {
            CouplingModel::StarUniform => "star-uniform",
            CouplingModel::StarDecay => "star-decay",
            CouplingModel::Custom => "custom",
        }
    }

    /// Vacuum matrix element to label `n >= 2` at strength `lambda`.
    pub fn vacuum_element(&self, n: u64, lambda: f64) -> Option<f64> {
        match self {
            CouplingModel::StarUniform => Some(lambda),
            CouplingModel::StarDecay => Some(lambda / (n as f64).sqrt()),
            CouplingModel::Custom => None,
        }
    }
}

impl fmt::Display for CouplingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { f.write_str(self.name()) }
}

impl FromStr for CouplingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star-uniform" => Ok(CouplingModel::StarUniform),
            "star-decay" => Ok(CouplingModel::StarDecay),
            other => Err(Error::Config(format!(
                "unknown coupling model '{}' (expected star-uniform or star-decay)", other
            ))),
        }
    }
}

/// Hermitian, zero-diagonal transition operator over a basis.
///
/// Only the strict upper triangle is stored; the lower triangle is its
/// conjugate by construction, so Hermiticity is exact.
#[derive(Clone, Debug)]
pub struct CouplingOperator {
    model: CouplingModel,
    strength: f64,
    dim: usize,
    /// `(row, col, value)` with `row < col`, zero-based.
    upper: Vec<(usize, usize, C64)>,
}

/// Builds `W` for the given model at strength `lambda > 0`.
pub fn build_coupling(basis: &CavityBasis, model: CouplingModel, lambda: f64) -> Result<CouplingOperator> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Config(format!("coupling strength must be positive, got {}", lambda)));
    }
    let upper = (2..=basis.n_max())
        .map(|n| {
            let w = model.vacuum_element(n, lambda)
                .ok_or_else(|| Error::Config("custom coupling has no generator; use CouplingOperator::from_entries".into()))?;
            Ok((0, (n - 1) as usize, C64::new(w, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CouplingOperator { model, strength: lambda, dim: basis.dim(), upper })
}

impl CouplingOperator {
    /// Assembles a custom operator from `(M, N, ⟨M|W|N⟩)` label triples.
    ///
    /// Each pair is given once; its mirror is filled in as the conjugate.
    /// Diagonal entries, out-of-range labels and duplicate pairs are rejected.
    pub fn from_entries(dim: usize, entries: &[(u64, u64, C64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(m, n, v) in entries {
            if m == 0 || n == 0 || m as usize > dim || n as usize > dim {
                return Err(Error::Domain(format!("entry ({}, {}) outside basis of size {}", m, n, dim)));
            }
            if m == n {
                return Err(Error::Domain(format!("diagonal entry ({}, {}) not allowed", m, n)));
            }
            let (r, c, v) = if m < n { (m - 1, n - 1, v) } else { (n - 1, m - 1, v.conj()) };
            if map.insert((r as usize, c as usize), v).is_some() {
                return Err(Error::Domain(format!("duplicate entry for pair ({}, {})", m, n)));
            }
        }
        let upper: Vec<_> = map.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        let strength = upper.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max);
        Ok(Self { model: CouplingModel::Custom, strength, dim, upper })
    }

    pub fn model(&self) -> CouplingModel { self.model }

    /// The nominal strength λ; for custom operators, the largest `|entry|`.
    pub fn strength(&self) -> f64 { self.strength }

    pub fn dim(&self) -> usize { self.dim }

    pub fn max_abs_element(&self) -> f64 {
        self.upper.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// `⟨M|W|N⟩` by label.
    pub fn element(&self, m: u64, n: u64) -> C64 {
        if m == n || m == 0 || n == 0 { return C64::new(0.0, 0.0); }
        let (r, c, conj) = if m < n { (m - 1, n - 1, false) } else { (n - 1, m - 1, true) };
        let (r, c) = (r as usize, c as usize);
        self.upper.iter()
            .find(|&&(rr, cc, _)| rr == r && cc == c)
            .map_or(C64::new(0.0, 0.0), |&(_, _, v)| if conj { v.conj() } else { v })
    }

    /// `|⟨1|W|N⟩|`, the vacuum coupling magnitude.
    pub fn vacuum_coupling(&self, n: u64) -> f64 { self.element(1, n).norm() }

    /// `|⟨1|W|N⟩|` for every label, indexed by `N - 1` (zero at the vacuum).
    pub fn vacuum_row(&self) -> Vec<f64> {
        let mut row = vec![0.0; self.dim];
        for &(r, c, v) in &self.upper {
            if r == 0 { row[c] = v.norm(); }
        }
        row
    }

    /// `out += scale·W·psi`.
    pub fn apply_add(&self, psi: &[C64], scale: C64, out: &mut [C64]) {
        debug_assert_eq!(psi.len(), self.dim);
        for &(r, c, v) in &self.upper {
            out[r] += scale * v * psi[c];
            out[c] += scale * v.conj() * psi[r];
        }
    }

    /// The full matrix, row-major, indexed by `N - 1`.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut dense = vec![vec![C64::new(0.0, 0.0); self.dim]; self.dim];
        for &(r, c, v) in &self.upper {
            dense[r][c] = v;
            dense[c][r] = v.conj();
        }
        dense
    }

    /// Writes the dense matrix as row-major CSV, each complex entry as `re,im`.
    pub fn write_dense_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:e},{:e}", z.re, z.im)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// True iff `⟨1|W|N⟩ ≠ 0` for every `N` in `2..=n_max`.
pub fn verify_reachability(coupling: &CouplingOperator) -> bool {
    coupling.vacuum_row().iter().skip(1).all(|&w| w != 0.0)
}

/// Periodic drive `W·cos(Ωt)` aimed at one basis label.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub frequency: f64,
    pub target: u64,
}

impl DriveConfig {
    pub fn new(frequency: f64, target: u64, basis: &CavityBasis) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::Config(format!("drive frequency must be positive, got {}", frequency)));
        }
        if target < 2 || target > basis.n_max() {
            return Err(Error::Config(format!(
                "drive target {} outside [2, {}]", target, basis.n_max()
            )));
        }
        Ok(Self { frequency, target })
    }

    /// Drive tuned to resonance with the target, `Ω = ω·ln N`.
    pub fn resonant(target: u64, basis: &CavityBasis) -> Result<Self> {
        Self::new(basis.units().omega * (target as f64).ln(), target, basis)
    }
}
