//! Property suites for the pipeline invariants.

use chrono::NaiveDate;
use ndarray::Array2;
use proptest::prelude::*;

use xcorr_core::ingest::{forward_fill, load_prices, LeadingGapPolicy, SectorMap};
use xcorr_core::sectors::dominant_components;
use xcorr_core::simulator::{simulate, FactorModelConfig};
use xcorr_core::spectrum::{eigensolve, DEFAULT_TOL};
use xcorr_core::transform::{correlation, log_returns, normalize, RawReturns};

fn day(k: usize) -> NaiveDate {
    NaiveDate::from_num_days_from_ce_opt(737000 + k as i32).unwrap()
}

/// Observations: per ticker, a non-empty set of (date index, price).
fn observations() -> impl Strategy<Value = Vec<Vec<(usize, f64)>>> {
    let price = 0.01f64..10_000.0;
    let row = prop::collection::btree_map(0usize..8, price, 1..8)
        .prop_map(|m| m.into_iter().collect::<Vec<_>>());
    prop::collection::vec(row, 2..5)
}

fn to_long_csv(obs: &[Vec<(usize, f64)>]) -> String {
    let mut out = String::from("date,ticker,close\n");
    for (i, row) in obs.iter().enumerate() {
        for &(d, p) in row {
            out.push_str(&format!("{},T{i},{}\n", day(d), xcorr_core::fmt::sig17(p)));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn price_table_long_csv_round_trip(obs in observations()) {
        let date_count = obs.iter().flatten().map(|&(d, _)| d).collect::<std::collections::BTreeSet<_>>().len();
        prop_assume!(date_count >= 2);
        let table = load_prices(to_long_csv(&obs).as_bytes(), LeadingGapPolicy::Backfill).unwrap();
        let reloaded = load_prices(table.to_long_csv().as_bytes(), LeadingGapPolicy::Backfill).unwrap();
        prop_assert_eq!(table, reloaded);
    }

    #[test]
    fn fill_is_idempotent_on_complete_grids(
        rows in prop::collection::vec(prop::collection::vec(0.01f64..1e4, 4), 2..4)
    ) {
        let dates: Vec<NaiveDate> = (0..4).map(day).collect();
        let tickers: Vec<String> = (0..rows.len()).map(|i| format!("T{i}")).collect();
        let cells: Vec<Vec<Option<f64>>> =
            rows.iter().map(|r| r.iter().map(|&p| Some(p)).collect()).collect();
        let table = forward_fill(tickers, dates, &cells, LeadingGapPolicy::Backfill).unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (t, &p) in row.iter().enumerate() {
                prop_assert_eq!(table.prices[[i, t]], p);
                prop_assert!(!table.filled[[i, t]]);
            }
        }
    }

    #[test]
    fn normalized_returns_ignore_price_scale(
        prices in prop::collection::vec(1.0f64..500.0, 6..12),
        scale in 1e-3f64..1e3,
    ) {
        let dates: Vec<NaiveDate> = (0..prices.len()).map(day).collect();
        let other: Vec<Option<f64>> = (0..prices.len()).map(|k| Some(10.0 + k as f64)).collect();
        let build = |row: &[f64]| {
            let cells = vec![row.iter().map(|&p| Some(p)).collect::<Vec<_>>(), other.clone()];
            forward_fill(
                vec!["A".into(), "B".into()],
                dates.clone(),
                &cells,
                LeadingGapPolicy::Backfill,
            )
            .unwrap()
        };
        let scaled: Vec<f64> = prices.iter().map(|p| p * scale).collect();
        let raw_a = log_returns(&build(&prices), 1).unwrap();
        let raw_b = log_returns(&build(&scaled), 1).unwrap();
        let sigma_ok = {
            let row = raw_a.values.row(0);
            row.iter().any(|&x| (x - row[0]).abs() > 1e-9)
        };
        prop_assume!(sigma_ok);
        let rm_a = normalize(&raw_a).unwrap();
        let rm_b = normalize(&raw_b).unwrap();
        for t in 0..rm_a.n_steps() {
            prop_assert!((rm_a.returns[[0, t]] - rm_b.returns[[0, t]]).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_is_permutation_equivariant(
        flat in prop::collection::vec(-1.0f64..1.0, 5 * 24),
        perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let values = Array2::from_shape_vec((5, 24), flat).unwrap();
        let tickers: Vec<String> = (0..5).map(|i| format!("T{i}")).collect();
        let raw = RawReturns { tickers: tickers.clone(), values: values.clone(), interval: 1 };
        let Ok(rm) = normalize(&raw) else { return Ok(()) };
        let c = correlation(&rm);

        let mut permuted = Array2::zeros((5, 24));
        let mut permuted_tickers = vec![String::new(); 5];
        for (new_i, &old_i) in perm.iter().enumerate() {
            permuted.row_mut(new_i).assign(&values.row(old_i));
            permuted_tickers[new_i] = tickers[old_i].clone();
        }
        let rm_p = normalize(&RawReturns { tickers: permuted_tickers, values: permuted, interval: 1 }).unwrap();
        let c_p = correlation(&rm_p);
        for new_i in 0..5 {
            for new_j in 0..5 {
                // bit-exact: same pair, same accumulation order
                prop_assert_eq!(c_p.values[[new_i, new_j]], c.values[[perm[new_i], perm[new_j]]]);
            }
        }
    }

    #[test]
    fn correlation_entries_stay_bounded(
        flat in prop::collection::vec(-10.0f64..10.0, 4 * 16),
    ) {
        let values = Array2::from_shape_vec((4, 16), flat).unwrap();
        let raw = RawReturns {
            tickers: (0..4).map(|i| format!("T{i}")).collect(),
            values,
            interval: 1,
        };
        let Ok(rm) = normalize(&raw) else { return Ok(()) };
        let c = correlation(&rm);
        for i in 0..4 {
            prop_assert_eq!(c.values[[i, i]], 1.0);
            for j in 0..4 {
                prop_assert!((-1.0..=1.0).contains(&c.values[[i, j]]));
                prop_assert_eq!(c.values[[i, j]].to_bits(), c.values[[j, i]].to_bits());
            }
        }
        let stats = xcorr_core::transform::element_stats(&c, 0.02);
        prop_assert_eq!(stats.histogram.total(), 4 * 3 / 2);
    }
}

fn small_market_config(seed: u64) -> FactorModelConfig {
    FactorModelConfig {
        n: 24,
        t: 300,
        sector_sizes: vec![8, 8, 8],
        n_st: 5,
        n_bc: 5,
        gamma_sector: 0.2,
        gamma_profit_st: 0.55,
        gamma_profit_bc: 0.40,
        gamma_profit_general: 0.0,
        sigma: 0.3,
        delta: 0.05,
        seed,
        shared_profit_factor: false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dominant_sets_nest_under_rising_threshold(
        lo in 0.01f64..0.5,
        hi_gap in 0.01f64..0.5,
        mode in 0usize..4,
    ) {
        let market = simulate(&small_market_config(17)).unwrap();
        let s = eigensolve(&correlation(&market.returns), DEFAULT_TOL).unwrap();
        let map = SectorMap::new();
        let hi = (lo + hi_gap).min(1.0);
        let small = dominant_components(&s, &map, mode, lo).unwrap();
        let large = dominant_components(&s, &map, mode, hi).unwrap();
        let small_tickers: Vec<&str> = small.members.iter().map(|m| m.ticker.as_str()).collect();
        for member in &large.members {
            prop_assert!(small_tickers.contains(&member.ticker.as_str()));
        }
    }

    #[test]
    fn eigenvectors_are_oriented(seed in 0u64..32) {
        let market = simulate(&small_market_config(seed)).unwrap();
        let s = eigensolve(&correlation(&market.returns), DEFAULT_TOL).unwrap();
        for k in 0..s.order() {
            let col = s.eigenvectors.column(k);
            let mut best = 0;
            for (j, &v) in col.iter().enumerate() {
                if v.abs() > col[best].abs() {
                    best = j;
                }
            }
            prop_assert!(col[best] > 0.0, "mode {k} max-magnitude component must be positive");
        }
    }
}
