//! Plot-ready CSV artifacts.
//!
//! All computed values are written with 17 significant digits so artifacts
//! round-trip exactly; percentages in `composition.csv` are the one
//! human-formatted exception (two decimals, em dash for undefined).

use std::fs;
use std::path::{Path, PathBuf};

use xcorr_core::fmt::sig17;
use xcorr_core::hist::Histogram;
use xcorr_core::ingest::{Category, SectorMap};
use xcorr_core::sectors::{format_percent, CompositionReport};
use xcorr_core::spectrum::SpectrumResult;

use crate::error::CliError;

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// `rank,eigenvalue,deviating`
pub fn spectrum_csv(s: &SpectrumResult) -> String {
    let mut out = String::from("rank,eigenvalue,deviating\n");
    for (k, &l) in s.eigenvalues.iter().enumerate() {
        let dev = if s.deviating.contains(&k) { 1 } else { 0 };
        out.push_str(&format!("{k},{},{dev}\n", sig17(l)));
    }
    out
}

/// `ticker,mode_0,...` — row per stock, column per mode.
pub fn eigvecs_csv(s: &SpectrumResult) -> String {
    let n = s.order();
    let mut out = String::from("ticker");
    for k in 0..n {
        out.push_str(&format!(",mode_{k}"));
    }
    out.push('\n');
    for (i, ticker) in s.tickers.iter().enumerate() {
        out.push_str(ticker);
        for k in 0..n {
            out.push(',');
            out.push_str(&sig17(s.component(i, k)));
        }
        out.push('\n');
    }
    out
}

/// `bin_left,bin_right,count,density`
pub fn hist_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,count,density\n");
    for (k, density) in h.densities().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig17(h.edges[k]),
            sig17(h.edges[k + 1]),
            h.counts[k],
            sig17(*density)
        ));
    }
    out
}

/// `mode,u_c,label,percent,count,total` — three category rows, then one row
/// per sector present in the dominant set.
pub fn composition_csv(report: &CompositionReport) -> String {
    let mut out = String::from("mode,u_c,label,percent,count,total\n");
    for row in &report.rows {
        for cat in Category::ALL {
            let share = &row.by_category[&cat];
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.mode,
                row.u_c,
                cat.label(),
                format_percent(share.fraction),
                share.count,
                row.total
            ));
        }
        for (label, share) in &row.by_sector {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.mode,
                row.u_c,
                label,
                format_percent(share.fraction),
                share.count,
                row.total
            ));
        }
    }
    out
}

/// Per-stock component dump for the requested modes, ordered by business
/// sector (then ticker) with a marker on each sector's first row.
pub fn components_csv(s: &SpectrumResult, map: &SectorMap, modes: &[usize]) -> String {
    let mut order: Vec<usize> = (0..s.order()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (map.get(&s.tickers[a]), map.get(&s.tickers[b]));
        ia.business_sector
            .cmp(&ib.business_sector)
            .then_with(|| s.tickers[a].cmp(&s.tickers[b]))
    });

    let mut out = String::from("index,ticker,business_sector,category,sector_start");
    for &k in modes {
        out.push_str(&format!(",u_mode_{k}"));
    }
    out.push('\n');

    let mut previous_sector: Option<String> = None;
    for (pos, &i) in order.iter().enumerate() {
        let info = map.get(&s.tickers[i]);
        let start = previous_sector.as_deref() != Some(info.business_sector.as_str());
        out.push_str(&format!(
            "{pos},{},{},{},{}",
            s.tickers[i],
            info.business_sector,
            info.category.label(),
            u8::from(start)
        ));
        for &k in modes {
            out.push(',');
            out.push_str(&sig17(s.component(i, k)));
        }
        out.push('\n');
        previous_sector = Some(info.business_sector);
    }
    out
}

/// `replicate,rank,eigenvalue` for every surrogate spectrum.
pub fn surrogate_spectra_csv(spectra: &[SpectrumResult]) -> String {
    let mut out = String::from("replicate,rank,eigenvalue\n");
    for (rep, s) in spectra.iter().enumerate() {
        for (k, &l) in s.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{rep},{k},{}\n", sig17(l)));
        }
    }
    out
}
