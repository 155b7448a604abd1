//! `analyze`: prices CSV -> full artifact set.

use std::fs::File;
use std::path::{Path, PathBuf};

use xcorr_core::ingest::{load_prices, load_sectors, LeadingGapPolicy, SectorMap};
use xcorr_core::transform::{log_returns, normalize_dropping};

use super::{run_analysis, AnalysisOptions, DatasetMeta};
use crate::artifacts;
use crate::error::CliError;

pub struct AnalyzeCmd {
    pub prices: PathBuf,
    pub sectors: Option<PathBuf>,
    pub dt: usize,
    pub leading_gap: LeadingGapPolicy,
    pub dump_table: Option<PathBuf>,
    pub opts: AnalysisOptions,
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn run(cmd: &AnalyzeCmd, out_dir: &Path) -> Result<(), CliError> {
    if cmd.dt == 0 {
        return Err(CliError::Usage("--dt must be at least 1".into()));
    }
    let table = load_prices(open(&cmd.prices)?, cmd.leading_gap)?;
    if let Some(path) = &cmd.dump_table {
        artifacts::write_file(path, &table.to_wide_csv())?;
    }
    let map = match &cmd.sectors {
        Some(path) => load_sectors(open(path)?)?,
        None => SectorMap::new(),
    };

    let raw = log_returns(&table, cmd.dt)?;
    let (rm, dropped) = normalize_dropping(&raw);
    for ticker in &dropped {
        eprintln!("warning: dropping {ticker}: constant price over the whole window");
    }

    let meta = DatasetMeta {
        source: "prices".to_owned(),
        dt: cmd.dt,
        period: Some((table.dates[0], *table.dates.last().expect("non-empty dates"))),
        dropped,
    };
    run_analysis(&rm, &map, meta, &cmd.opts, out_dir)?;
    Ok(())
}
