//! `simulate`: factor-model config -> synthetic returns (+ optional analysis).

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xcorr_core::fmt::sig17;
use xcorr_core::ingest::{SectorInfo, SectorMap};
use xcorr_core::simulator::{simulate, FactorModelConfig, SimulatedMarket, StockTruth};

use super::{run_analysis, AnalysisOptions, DatasetMeta};
use crate::artifacts;
use crate::error::CliError;

pub struct SimulateCmd {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub shared_profit_factor: bool,
    pub analyze: bool,
    pub opts: AnalysisOptions,
}

#[derive(Serialize)]
struct TruthDocument<'a> {
    config: &'a FactorModelConfig,
    stocks: &'a [StockTruth],
}

fn returns_csv(market: &SimulatedMarket) -> String {
    let rm = &market.returns;
    let mut out = String::from("t");
    for ticker in &rm.tickers {
        out.push(',');
        out.push_str(ticker);
    }
    out.push('\n');
    for t in 0..rm.n_steps() {
        out.push_str(&t.to_string());
        for i in 0..rm.n_stocks() {
            out.push(',');
            out.push_str(&sig17(rm.returns[[i, t]]));
        }
        out.push('\n');
    }
    out
}

/// Sector labels for simulated stocks: `SEC<k>` from the truth table.
pub fn truth_sector_map(truth: &[StockTruth]) -> SectorMap {
    let mut map = SectorMap::new();
    for stock in truth {
        map.insert(
            stock.ticker.clone(),
            SectorInfo {
                business_sector: format!("SEC{}", stock.sector),
                category: stock.category,
            },
        );
    }
    map
}

pub fn run(cmd: &SimulateCmd, out_dir: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(&cmd.config)
        .map_err(|source| CliError::Io { path: cmd.config.clone(), source })?;
    let mut config: FactorModelConfig = serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: cmd.config.clone(),
        detail: e.to_string(),
    })?;
    if let Some(seed) = cmd.seed {
        config.seed = seed;
    }
    if cmd.shared_profit_factor {
        config.shared_profit_factor = true;
    }

    let market = simulate(&config)?;

    artifacts::ensure_dir(out_dir)?;
    artifacts::write_file(&artifacts::out_path(out_dir, "returns.csv"), &returns_csv(&market))?;
    let truth = TruthDocument { config: &config, stocks: &market.truth };
    let json = serde_json::to_string_pretty(&truth).expect("truth serialization cannot fail");
    artifacts::write_file(&artifacts::out_path(out_dir, "truth.json"), &(json + "\n"))?;
    println!(
        "simulated N={} T={} seed={} -> returns.csv, truth.json",
        config.n, config.t, config.seed
    );

    if cmd.analyze {
        let map = truth_sector_map(&market.truth);
        let meta = DatasetMeta {
            source: "simulation".to_owned(),
            dt: 1,
            period: None,
            dropped: Vec::new(),
        };
        let mut opts = cmd.opts.clone();
        opts.seed = config.seed;
        run_analysis(&market.returns, &map, meta, &opts, out_dir)?;
    }
    Ok(())
}
