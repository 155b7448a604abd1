//! `surrogate`: shuffle replicates of an empirical dataset and report how the
//! spectra comply with the Wishart band.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xcorr_core::ingest::{load_prices, LeadingGapPolicy};
use xcorr_core::spectrum::shuffle_surrogate;
use xcorr_core::transform::{log_returns, normalize_dropping};

use crate::artifacts;
use crate::error::CliError;

pub struct SurrogateCmd {
    pub prices: PathBuf,
    pub dt: usize,
    pub leading_gap: LeadingGapPolicy,
    pub tol: f64,
    pub seed: u64,
    pub replicates: usize,
}

#[derive(Serialize)]
struct SurrogateDocument {
    seed: u64,
    replicates: usize,
    n: usize,
    t: usize,
    band_lo: f64,
    band_hi: f64,
    band_compliance: f64,
    replicates_fully_inside: usize,
}

pub fn run(cmd: &SurrogateCmd, out_dir: &Path) -> Result<(), CliError> {
    if cmd.dt == 0 {
        return Err(CliError::Usage("--dt must be at least 1".into()));
    }
    if cmd.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cmd.tol)));
    }
    let file = File::open(&cmd.prices)
        .map_err(|source| CliError::Io { path: cmd.prices.clone(), source })?;
    let table = load_prices(file, cmd.leading_gap)?;
    let raw = log_returns(&table, cmd.dt)?;
    let (rm, dropped) = normalize_dropping(&raw);
    for ticker in &dropped {
        eprintln!("warning: dropping {ticker}: constant price over the whole window");
    }
    if rm.n_stocks() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 stocks with non-degenerate returns, have {}",
            rm.n_stocks()
        )));
    }

    let spectra = shuffle_surrogate(&rm, cmd.seed, cmd.replicates)?;

    let (band_lo, band_hi) = match spectra.first() {
        Some(s) => s.bounds.surrogate_band(),
        None => {
            let b = xcorr_core::spectrum::mp_bounds(rm.n_stocks(), rm.n_steps())?;
            b.surrogate_band()
        }
    };
    let mut inside = 0usize;
    let mut total = 0usize;
    let mut fully_inside = 0usize;
    for s in &spectra {
        let mut all = true;
        for &l in &s.eigenvalues {
            total += 1;
            if l >= band_lo && l <= band_hi {
                inside += 1;
            } else {
                all = false;
            }
        }
        if all {
            fully_inside += 1;
        }
    }

    artifacts::ensure_dir(out_dir)?;
    artifacts::write_file(
        &artifacts::out_path(out_dir, "surrogate_spectra.csv"),
        &artifacts::surrogate_spectra_csv(&spectra),
    )?;
    let doc = SurrogateDocument {
        seed: cmd.seed,
        replicates: cmd.replicates,
        n: rm.n_stocks(),
        t: rm.n_steps(),
        band_lo,
        band_hi,
        band_compliance: if total == 0 { 1.0 } else { inside as f64 / total as f64 },
        replicates_fully_inside: fully_inside,
    };
    let json = serde_json::to_string_pretty(&doc).expect("summary serialization cannot fail");
    artifacts::write_file(&artifacts::out_path(out_dir, "surrogate_summary.json"), &(json + "\n"))?;
    println!(
        "surrogate: {} replicate(s), band [{:.4}, {:.4}], compliance {:.2}%",
        doc.replicates,
        band_lo,
        band_hi,
        doc.band_compliance * 100.0
    );
    Ok(())
}
