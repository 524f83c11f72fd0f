use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{fmt_f64, write_csv_manifest};
use crate::encoding::{Factorizer, SpectrumTable};
use crate::error::{Error, Result};
use crate::units::Units;

/// One level of the spectrum. `gap` is the distance to the level above,
/// `ħω·ln((N+1)/N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub factors: String,
    pub energy: f64,
    pub gap: f64,
}

pub fn run_spectrum(n_max: u64, units: Units) -> Result<Vec<SpectrumRow>> {
    if n_max < 2 {
        return Err(Error::Domain(format!("spectrum needs n_max >= 2, got {}", n_max)));
    }
    let table = SpectrumTable::new(n_max, units)?;
    let factorizer = Factorizer::new(n_max);
    (1..=n_max)
        .map(|n| {
            Ok(SpectrumRow {
                n,
                factors: factorizer.factorize(n)?.to_string(),
                energy: table.energy(n).expect("label within table"),
                gap: table.upper_gap(n),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct SpectrumManifest {
    n_max: u64,
    units: Units,
}

/// Columns: `N,factors,energy,gap`.
pub fn write_spectrum_csv<W: Write>(mut out: W, rows: &[SpectrumRow], units: Units) -> Result<()> {
    let n_max = rows.last().map_or(0, |r| r.n);
    write_csv_manifest(&mut out, "spectrum", &SpectrumManifest { n_max, units })?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["N", "factors", "energy", "gap"])?;
    for r in rows {
        wtr.write_record([r.n.to_string(), r.factors.clone(), fmt_f64(r.energy), fmt_f64(r.gap)])?;
    }
    wtr.flush()?;
    Ok(())
}
