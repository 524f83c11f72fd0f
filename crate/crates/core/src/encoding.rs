//! Integers as Fock occupations of prime-indexed modes.
//!
//! Mode `q` (a prime) has frequency `ω·ln q`. A basis state with `m_i` photons
//! in mode `q_i` carries energy `ħω·Σ m_i ln q_i = ħω·ln N` where
//! `N = Π q_i^m_i`, so the label `N` and the occupation vector determine each
//! other by unique factorization. The vacuum is `N = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Units;

/// All primes `<= limit`, ascending, by the sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!("no primes below {}", limit)));
    }
    let limit = usize::try_from(limit)
        .map_err(|_| Error::Domain(format!("sieve limit {} exceeds address space", limit)))?;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for n in 2..=limit {
        if composite[n] { continue; }
        primes.push(n as u64);
        let mut m = match n.checked_mul(n) {
            Some(m) => m,
            None => continue,
        };
        while m <= limit {
            composite[m] = true;
            m += n;
        }
    }
    Ok(primes)
}

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 { return false; }
    if n < 4 { return true; }
    if n % 2 == 0 || n % 3 == 0 { return false; }
    let mut d = 5u64;
    while d.checked_mul(d).map_or(false, |dd| dd <= n) {
        if n % d == 0 || n % (d + 2) == 0 { return false; }
        d += 6;
    }
    true
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |rr| rr > n) { r -= 1; }
    while (r + 1).checked_mul(r + 1).map_or(false, |rr| rr <= n) { r += 1; }
    r
}

/// Photon numbers per prime mode; equivalently a prime factorization.
///
/// Entries are `(prime, exponent)` with strictly increasing primes and
/// exponents of at least one. The empty vector is the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OccupationVector {
    entries: Vec<(u64, u32)>,
}

impl OccupationVector {
    pub fn vacuum() -> Self { Self::default() }

    /// Validates the entries and rejects any vector whose product overflows
    /// `u64`.
    pub fn new(entries: Vec<(u64, u32)>) -> Result<Self> {
        for (k, &(q, m)) in entries.iter().enumerate() {
            if !is_prime(q) {
                return Err(Error::Domain(format!("mode index {} is not prime", q)));
            }
            if m == 0 {
                return Err(Error::Domain(format!("zero exponent for prime {}", q)));
            }
            if k > 0 && entries[k - 1].0 >= q {
                return Err(Error::Domain("primes must be strictly increasing".into()));
            }
        }
        let occ = Self { entries };
        occ.compose()?;
        Ok(occ)
    }

    pub fn entries(&self) -> &[(u64, u32)] { &self.entries }

    pub fn is_vacuum(&self) -> bool { self.entries.is_empty() }

    /// Number of photons in mode `q`.
    pub fn photons(&self, q: u64) -> u32 {
        self.entries.iter().find(|(p, _)| *p == q).map_or(0, |&(_, m)| m)
    }

    pub fn total_photons(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m as u64).sum()
    }

    /// `Σ m_i ln q_i`, the energy in units of ħω computed mode by mode.
    pub fn log_weight(&self) -> f64 {
        self.entries.iter().map(|&(q, m)| m as f64 * (q as f64).ln()).sum()
    }

    /// The integer label `Π q_i^m_i`.
    pub fn compose(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for &(q, m) in &self.entries {
            let pow = q.checked_pow(m)
                .ok_or_else(|| Error::Overflow(format!("{}^{} does not fit in u64", q, m)))?;
            acc = acc.checked_mul(pow)
                .ok_or_else(|| Error::Overflow(format!("product exceeds u64 at {}^{}", q, m)))?;
        }
        Ok(acc)
    }
}

/// Formats as `2^2*3`; the vacuum prints as `1`.
impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        for (k, &(q, m)) in self.entries.iter().enumerate() {
            if k > 0 { write!(f, "*")?; }
            if m == 1 { write!(f, "{}", q)?; } else { write!(f, "{}^{}", q, m)?; }
        }
        Ok(())
    }
}

/// Trial division against a precomputed prime table.
///
/// Divisors past the table are tried as odd integers, so the factorization
/// is complete for any `u64`; it is fast while `sqrt(N)` stays within the
/// table.
#[derive(Clone, Debug)]
pub struct Factorizer {
    primes: Vec<u64>,
    bound: u64,
}

impl Factorizer {
    /// Tables primes up to `sqrt(max_n)`.
    pub fn new(max_n: u64) -> Self {
        let bound = isqrt(max_n).max(2);
        let primes = sieve_primes(bound).expect("bound is at least 2");
        Self { primes, bound }
    }

    pub fn factorize(&self, n: u64) -> Result<OccupationVector> {
        if n == 0 {
            return Err(Error::Domain("0 has no prime factorization".into()));
        }
        let mut rest = n;
        let mut entries = Vec::new();
        let mut divide_out = |d: u64, rest: &mut u64| {
            let mut m = 0u32;
            while *rest % d == 0 {
                *rest /= d;
                m += 1;
            }
            if m > 0 { entries.push((d, m)); }
        };
        for &q in &self.primes {
            if q * q > rest { break; }
            divide_out(q, &mut rest);
        }
        if rest > 1 && self.bound.saturating_mul(self.bound) < rest {
            let mut d = self.bound + 1 + (self.bound % 2);
            while d.checked_mul(d).map_or(false, |dd| dd <= rest) {
                divide_out(d, &mut rest);
                d += 2;
            }
        }
        if rest > 1 { entries.push((rest, 1)); }
        Ok(OccupationVector { entries })
    }
}

/// Prime factorization of `n >= 1`; `1` maps to the vacuum.
pub fn factorize(n: u64) -> Result<OccupationVector> {
    if n == 0 {
        return Err(Error::Domain("0 has no prime factorization".into()));
    }
    Factorizer::new(n.min(1 << 40)).factorize(n)
}

pub fn compose(occ: &OccupationVector) -> Result<u64> { occ.compose() }

/// `E_N = ħω·ln N`.
pub fn level_energy(n: u64, units: Units) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("level label must be at least 1".into()));
    }
    Ok(units.energy_scale() * (n as f64).ln())
}

/// Distance from `E_N` to its nearest neighbour, `ħω·ln((N+1)/N)`.
///
/// The upper gap is always the smaller one. `N·δE_N/ħω` lies in
/// `(1 - 1/N, 1)` and tends to one.
pub fn level_spacing(n: u64, units: Units) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("level {} has no lower neighbour", n)));
    }
    Ok(units.energy_scale() * (1.0 / n as f64).ln_1p())
}

/// Energies `E_1..E_{n_max}` of the truncated spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumTable {
    n_max: u64,
    units: Units,
    energies: Vec<f64>,
}

impl SpectrumTable {
    pub fn new(n_max: u64, units: Units) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Domain("spectrum needs n_max >= 1".into()));
        }
        units.validate()?;
        let energies = (1..=n_max)
            .map(|n| units.energy_scale() * (n as f64).ln())
            .collect();
        Ok(Self { n_max, units, energies })
    }

    pub fn n_max(&self) -> u64 { self.n_max }

    pub fn units(&self) -> Units { self.units }

    /// `E_N` for `1 <= N <= n_max`.
    pub fn energy(&self, n: u64) -> Option<f64> {
        if n == 0 { return None; }
        self.energies.get((n - 1) as usize).copied()
    }

    /// Energies indexed by `N - 1`.
    pub fn energies(&self) -> &[f64] { &self.energies }

    /// Gap `E_{N+1} - E_N`, evaluated without cancellation. Defined for all
    /// `N >= 1`, including the top of the table.
    pub fn upper_gap(&self, n: u64) -> f64 {
        self.units.energy_scale() * (1.0 / n as f64).ln_1p()
    }

    pub fn max_energy(&self) -> f64 { *self.energies.last().expect("non-empty") }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(13).unwrap(), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(100).unwrap().len(), 25);
        assert_eq!(sieve_primes(1000).unwrap(), trial_division_primes(1000));
    }

    #[test]
    fn sieve_rejects_empty_domain() {
        assert!(matches!(sieve_primes(1), Err(Error::EmptyDomain(_))));
        assert!(matches!(sieve_primes(0), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(360).unwrap().entries(), &[(2, 3), (3, 2), (5, 1)]);
        assert!(factorize(1).unwrap().is_vacuum());
        assert_eq!(factorize(97).unwrap().entries(), &[(97, 1)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_large_inputs() {
        // largest prime below 2^32 and a semiprime of two 32-bit primes
        assert_eq!(factorize(4_294_967_291).unwrap().entries(), &[(4_294_967_291, 1)]);
        let n = 65_521u64 * 65_537;
        assert_eq!(factorize(n).unwrap().entries(), &[(65_521, 1), (65_537, 1)]);
        assert_eq!(factorize(1 << 63).unwrap().entries(), &[(2, 63)]);
    }

    #[test]
    fn factorizer_past_its_table() {
        let f = Factorizer::new(100);
        assert_eq!(f.factorize(101 * 103).unwrap().entries(), &[(101, 1), (103, 1)]);
        assert_eq!(f.factorize(2 * 2 * 1009).unwrap().entries(), &[(2, 2), (1009, 1)]);
    }

    #[test]
    fn compose_examples() {
        assert_eq!(OccupationVector::vacuum().compose().unwrap(), 1);
        assert_eq!(OccupationVector::new(vec![(2, 2), (3, 1)]).unwrap().compose().unwrap(), 12);
    }

    #[test]
    fn occupation_construction_rejects_bad_entries() {
        assert!(OccupationVector::new(vec![(4, 1)]).is_err());
        assert!(OccupationVector::new(vec![(2, 0)]).is_err());
        assert!(OccupationVector::new(vec![(3, 1), (2, 1)]).is_err());
        assert!(matches!(OccupationVector::new(vec![(2, 64)]), Err(Error::Overflow(_))));
        assert!(matches!(
            OccupationVector::new(vec![(2, 40), (3, 20)]),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn display_format() {
        assert_eq!(factorize(12).unwrap().to_string(), "2^2*3");
        assert_eq!(factorize(1).unwrap().to_string(), "1");
        assert_eq!(factorize(360).unwrap().to_string(), "2^3*3^2*5");
    }

    #[test]
    fn photon_counts() {
        let occ = factorize(360).unwrap();
        assert_eq!(occ.photons(2), 3);
        assert_eq!(occ.photons(7), 0);
        assert_eq!(occ.total_photons(), 6);
    }

    #[test]
    fn energies_and_spacing() {
        let u = Units::default();
        assert_eq!(level_energy(1, u).unwrap(), 0.0);
        assert!((level_energy(2, u).unwrap() - 0.693_147_180_559_945_3).abs() < 1e-15);
        assert!(level_energy(0, u).is_err());
        // ln(1001/1000) and ln(3/2) to 16 digits
        assert!((level_spacing(1000, u).unwrap() - 9.995_003_330_835_332e-4).abs() < 1e-18);
        assert!((level_spacing(2, u).unwrap() - 0.405_465_108_108_164_4).abs() < 1e-15);
        assert!(level_spacing(1, u).is_err());
        for n in 2..=10_000u64 {
            let scaled = n as f64 * level_spacing(n, u).unwrap();
            assert!((scaled - 1.0).abs() <= 1.0 / n as f64);
            assert!(scaled < 1.0 && scaled > 1.0 - 1.0 / n as f64, "N = {}", n);
        }
    }

    #[test]
    fn occupation_energy_identity() {
        let f = Factorizer::new(10_000);
        for n in 2..=10_000u64 {
            let w = f.factorize(n).unwrap().log_weight();
            let ln = (n as f64).ln();
            assert!((w - ln).abs() <= 1e-12 * ln, "N = {}", n);
        }
    }

    #[test]
    fn spectrum_table() {
        let t = SpectrumTable::new(4, Units::default()).unwrap();
        assert_eq!(t.energy(1), Some(0.0));
        assert_eq!(t.energy(4), Some(4f64.ln()));
        assert_eq!(t.energy(5), None);
        assert!(t.energies().windows(2).all(|w| w[0] < w[1]));
        let scaled = SpectrumTable::new(4, Units::new(2.0, 3.0).unwrap()).unwrap();
        assert!((scaled.energy(3).unwrap() - 6.0 * 3f64.ln()).abs() < 1e-15);
    }
}
