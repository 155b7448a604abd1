//! Log returns, per-stock normalization and the equal-time correlation matrix.
//!
//! Returns are `R_i(t) = ln P_i(t+dt) - ln P_i(t)` over calendar index steps,
//! normalized per stock to zero mean and unit population standard deviation,
//! so that `C_ij = (1/T) sum_t r_i(t) r_j(t)` has an exactly unit diagonal.

use ndarray::Array2;
use thiserror::Error;

use crate::hist::Histogram;
use crate::ingest::PriceTable;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("return interval {interval} is out of range for {n_dates} dates")]
    IntervalTooLarge { interval: usize, n_dates: usize },
    #[error("{ticker} has zero return variance over the window")]
    ZeroVariance { ticker: String },
}

/// Raw (un-normalized) log returns, N x T'.
#[derive(Debug, Clone, PartialEq)]
pub struct RawReturns {
    pub tickers: Vec<String>,
    pub values: Array2<f64>,
    /// Return interval in calendar-index steps.
    pub interval: usize,
}

/// N x T normalized returns.
///
/// Each row has zero sample mean and unit population standard deviation
/// (divide by T); the pre-normalization mean and sigma are kept per stock.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    pub tickers: Vec<String>,
    pub returns: Array2<f64>,
    pub raw_mean: Vec<f64>,
    pub raw_sigma: Vec<f64>,
    pub interval: usize,
}

impl ReturnMatrix {
    pub fn n_stocks(&self) -> usize {
        self.returns.nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.returns.ncols()
    }
}

/// N x N symmetric correlation matrix with entries clamped to [-1, 1] and an
/// exactly unit diagonal. `t_len` records the sample length behind it, which
/// fixes Q = T/N for the Wishart comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrMatrix {
    pub tickers: Vec<String>,
    pub values: Array2<f64>,
    pub t_len: usize,
}

impl CorrMatrix {
    pub fn order(&self) -> usize {
        self.values.nrows()
    }

    /// Serialize as CSV with a ticker header row and column, 17 significant
    /// digits per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ticker");
        for t in &self.tickers {
            out.push(',');
            out.push_str(t);
        }
        out.push('\n');
        for (i, t) in self.tickers.iter().enumerate() {
            out.push_str(t);
            for j in 0..self.order() {
                out.push(',');
                out.push_str(&crate::fmt::sig17(self.values[[i, j]]));
            }
            out.push('\n');
        }
        out
    }
}

/// Statistics of the off-diagonal correlation coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count_negative: usize,
    pub histogram: Histogram,
}

/// Logarithmic returns over `interval` calendar-index steps (overlapping
/// windows for interval > 1; imputed cells participate like observed ones).
pub fn log_returns(table: &PriceTable, interval: usize) -> Result<RawReturns, TransformError> {
    let n_dates = table.n_dates();
    if interval == 0 || interval >= n_dates {
        return Err(TransformError::IntervalTooLarge { interval, n_dates });
    }
    let n = table.n_stocks();
    let t_len = n_dates - interval;
    let mut values = Array2::zeros((n, t_len));
    for i in 0..n {
        for t in 0..t_len {
            values[[i, t]] = table.prices[[i, t + interval]].ln() - table.prices[[i, t]].ln();
        }
    }
    Ok(RawReturns { tickers: table.tickers.clone(), values, interval })
}

fn row_mean_sigma(row: &[f64]) -> (f64, f64) {
    let t = row.len() as f64;
    let mean = row.iter().sum::<f64>() / t;
    let var = row.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / t;
    (mean, var.sqrt())
}

/// Normalize each row to zero mean and unit population sigma.
///
/// Errors on the first stock with zero variance; use
/// [`normalize_dropping`] for the drop-and-warn policy.
pub fn normalize(raw: &RawReturns) -> Result<ReturnMatrix, TransformError> {
    let (n, t_len) = raw.values.dim();
    let mut returns = Array2::zeros((n, t_len));
    let mut raw_mean = Vec::with_capacity(n);
    let mut raw_sigma = Vec::with_capacity(n);
    for i in 0..n {
        let row = raw.values.row(i);
        let (mean, sigma) = row_mean_sigma(row.as_slice().expect("row-major"));
        if sigma == 0.0 || !sigma.is_finite() {
            return Err(TransformError::ZeroVariance { ticker: raw.tickers[i].clone() });
        }
        for t in 0..t_len {
            returns[[i, t]] = (row[t] - mean) / sigma;
        }
        raw_mean.push(mean);
        raw_sigma.push(sigma);
    }
    Ok(ReturnMatrix {
        tickers: raw.tickers.clone(),
        returns,
        raw_mean,
        raw_sigma,
        interval: raw.interval,
    })
}

/// Normalize, dropping zero-variance stocks instead of failing.
///
/// Returns the reduced matrix and the tickers that were dropped.
pub fn normalize_dropping(raw: &RawReturns) -> (ReturnMatrix, Vec<String>) {
    let (n, t_len) = raw.values.dim();
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..n {
        let row = raw.values.row(i);
        let (_, sigma) = row_mean_sigma(row.as_slice().expect("row-major"));
        if sigma == 0.0 || !sigma.is_finite() {
            dropped.push(raw.tickers[i].clone());
        } else {
            keep.push(i);
        }
    }
    let mut values = Array2::zeros((keep.len(), t_len));
    let mut tickers = Vec::with_capacity(keep.len());
    for (new_i, &i) in keep.iter().enumerate() {
        values.row_mut(new_i).assign(&raw.values.row(i));
        tickers.push(raw.tickers[i].clone());
    }
    let reduced = RawReturns { tickers, values, interval: raw.interval };
    let rm = normalize(&reduced).expect("zero-variance rows were dropped");
    (rm, dropped)
}

/// Equal-time correlation matrix `C_ij = (1/T) sum_t r_i(t) r_j(t)`.
///
/// The upper triangle is accumulated once, left to right, and mirrored; the
/// diagonal is set to exactly 1 and off-diagonals clamped to [-1, 1].
pub fn correlation(rm: &ReturnMatrix) -> CorrMatrix {
    let n = rm.n_stocks();
    let t_len = rm.n_steps();
    let inv_t = 1.0 / t_len as f64;
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        values[[i, i]] = 1.0;
        let ri = rm.returns.row(i);
        let ri = ri.as_slice().expect("row-major");
        for j in (i + 1)..n {
            let rj = rm.returns.row(j);
            let rj = rj.as_slice().expect("row-major");
            let mut acc = 0.0;
            for t in 0..t_len {
                acc += ri[t] * rj[t];
            }
            let c = (acc * inv_t).clamp(-1.0, 1.0);
            values[[i, j]] = c;
            values[[j, i]] = c;
        }
    }
    CorrMatrix { tickers: rm.tickers.clone(), values, t_len }
}

/// Statistics over the N(N-1)/2 off-diagonal entries of `c`.
///
/// The histogram covers [-1, 1] with left-closed, right-open bins (last bin
/// closed).
pub fn element_stats(c: &CorrMatrix, bin_width: f64) -> ElementStats {
    assert!(bin_width > 0.0 && bin_width <= 2.0, "bin width must be in (0, 2]");
    let n = c.order();
    let mut histogram = Histogram::with_range(-1.0, 1.0, bin_width);
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut count_negative = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = c.values[[i, j]];
            sum += v;
            min = min.min(v);
            max = max.max(v);
            if v < 0.0 {
                count_negative += 1;
            }
            histogram.insert(v);
        }
    }
    let pairs = n * (n - 1) / 2;
    ElementStats {
        mean: if pairs == 0 { 0.0 } else { sum / pairs as f64 },
        min,
        max,
        count_negative,
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{forward_fill, LeadingGapPolicy};
    use chrono::NaiveDate;
    use rand::Rng;

    const LN_1_1: f64 = 0.095_310_179_804_324_87;
    const LN_1_21: f64 = 0.190_620_359_608_649_73;

    fn table_from_rows(rows: &[(&str, Vec<f64>)]) -> PriceTable {
        let n_dates = rows[0].1.len();
        let dates: Vec<NaiveDate> = (0..n_dates)
            .map(|k| NaiveDate::from_num_days_from_ce_opt(737000 + k as i32).unwrap())
            .collect();
        let tickers: Vec<String> = rows.iter().map(|(t, _)| (*t).to_owned()).collect();
        let cells: Vec<Vec<Option<f64>>> =
            rows.iter().map(|(_, ps)| ps.iter().map(|&p| Some(p)).collect()).collect();
        forward_fill(tickers, dates, &cells, LeadingGapPolicy::Backfill).unwrap()
    }

    fn raw(rows: &[Vec<f64>]) -> RawReturns {
        let n = rows.len();
        let t = rows[0].len();
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        RawReturns {
            tickers: (0..n).map(|i| format!("S{i}")).collect(),
            values: Array2::from_shape_vec((n, t), flat).unwrap(),
            interval: 1,
        }
    }

    #[test]
    fn single_step_log_return() {
        let table = table_from_rows(&[("A", vec![100.0, 110.0]), ("B", vec![1.0, 1.0])]);
        let rr = log_returns(&table, 1).unwrap();
        assert!((rr.values[[0, 0]] - LN_1_1).abs() < 1e-15);
        assert_eq!(rr.values[[1, 0]], 0.0);
    }

    #[test]
    fn constant_series_gives_zero_returns() {
        let table = table_from_rows(&[("A", vec![5.0, 5.0, 5.0]), ("B", vec![2.0, 3.0, 4.0])]);
        let rr = log_returns(&table, 1).unwrap();
        assert_eq!(rr.values.row(0).to_vec(), vec![0.0, 0.0]);
    }

    #[test]
    fn two_step_interval_uses_sliding_windows() {
        let table = table_from_rows(&[("A", vec![100.0, 110.0, 121.0]), ("B", vec![1.0, 1.0, 1.0])]);
        let rr = log_returns(&table, 2).unwrap();
        assert_eq!(rr.values.ncols(), 1);
        assert!((rr.values[[0, 0]] - LN_1_21).abs() < 1e-15);
        // scalar oracle: each entry is ln(P(t+dt)) - ln(P(t))
        let oracle = (121.0f64).ln() - (100.0f64).ln();
        assert_eq!(rr.values[[0, 0]], oracle);
    }

    #[test]
    fn interval_out_of_range_is_rejected() {
        let table = table_from_rows(&[("A", vec![1.0, 2.0]), ("B", vec![1.0, 2.0])]);
        assert!(matches!(log_returns(&table, 2), Err(TransformError::IntervalTooLarge { .. })));
        assert!(matches!(log_returns(&table, 0), Err(TransformError::IntervalTooLarge { .. })));
    }

    #[test]
    fn normalize_fixed_point() {
        let rm = normalize(&raw(&[vec![1.0, -1.0]])).unwrap();
        assert_eq!(rm.returns.row(0).to_vec(), vec![1.0, -1.0]);
        assert_eq!(rm.raw_mean[0], 0.0);
        assert_eq!(rm.raw_sigma[0], 1.0);
    }

    #[test]
    fn normalize_two_points_is_forced() {
        let rm = normalize(&raw(&[vec![2.0, 4.0]])).unwrap();
        assert_eq!(rm.returns.row(0).to_vec(), vec![-1.0, 1.0]);
        assert_eq!(rm.raw_mean[0], 3.0);
        assert_eq!(rm.raw_sigma[0], 1.0);
    }

    #[test]
    fn normalize_rejects_zero_variance() {
        assert!(matches!(
            normalize(&raw(&[vec![0.0, 0.0, 0.0]])),
            Err(TransformError::ZeroVariance { .. })
        ));
    }

    #[test]
    fn normalize_dropping_keeps_the_rest() {
        let (rm, dropped) = normalize_dropping(&raw(&[vec![1.0, 2.0], vec![3.0, 3.0]]));
        assert_eq!(dropped, vec!["S1"]);
        assert_eq!(rm.tickers, vec!["S0"]);
        assert_eq!(rm.n_stocks(), 1);
    }

    #[test]
    fn normalized_rows_have_zero_mean_unit_sigma() {
        let rm = normalize(&raw(&[vec![0.3, -1.2, 4.5, 0.9, -2.2], vec![10.0, 11.0, 9.5, 12.0, 10.5]]))
            .unwrap();
        for i in 0..rm.n_stocks() {
            let row: Vec<f64> = rm.returns.row(i).to_vec();
            let (mean, sigma) = row_mean_sigma(&row);
            assert!(mean.abs() < 1e-10, "mean {mean}");
            assert!((sigma - 1.0).abs() < 1e-10, "sigma {sigma}");
        }
    }

    #[test]
    fn self_and_anti_correlation() {
        let rm = normalize(&raw(&[
            vec![1.0, -1.0, 2.0, -2.0],
            vec![1.0, -1.0, 2.0, -2.0],
            vec![-1.0, 1.0, -2.0, 2.0],
        ]))
        .unwrap();
        let c = correlation(&rm);
        assert!((c.values[[0, 1]] - 1.0).abs() < 1e-12);
        assert!((c.values[[0, 2]] + 1.0).abs() < 1e-12);
        assert_eq!(c.values[[0, 0]], 1.0);
        assert_eq!(c.values[[1, 1]], 1.0);
    }

    #[test]
    fn independent_series_decorrelate() {
        // oracle: direct summation of (1/T) sum r_i r_j; significance width 4/sqrt(T)
        let t_len = 100_000usize;
        let mut rng = crate::rng::substream(2024, "transform-test", &[0]);
        let a: Vec<f64> = (0..t_len).map(|_| rng.gen::<f64>() - 0.5).collect();
        let b: Vec<f64> = (0..t_len).map(|_| rng.gen::<f64>() - 0.5).collect();
        let rm = normalize(&raw(&[a, b])).unwrap();
        let c = correlation(&rm);

        let mut oracle = 0.0;
        for t in 0..t_len {
            oracle += rm.returns[[0, t]] * rm.returns[[1, t]];
        }
        oracle /= t_len as f64;
        assert!((c.values[[0, 1]] - oracle).abs() < 1e-12);
        assert!(c.values[[0, 1]].abs() < 0.02, "|C01| = {}", c.values[[0, 1]]);
        assert!(c.values[[0, 1]].abs() < 4.0 / (t_len as f64).sqrt());
    }

    #[test]
    fn element_stats_single_pair() {
        let rm = normalize(&raw(&[vec![1.0, -1.0, 2.0, -2.0], vec![1.0, -0.5, 1.5, -2.5]])).unwrap();
        let c = correlation(&rm);
        let stats = element_stats(&c, 0.02);
        assert_eq!(stats.mean, c.values[[0, 1]]);
        assert_eq!(stats.count_negative, 0);
        assert_eq!(stats.histogram.total(), 1);
    }

    #[test]
    fn element_stats_degenerate_maximum() {
        // all off-diagonal entries exactly 1: single occupied bin, mean 1
        let rm = normalize(&raw(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.5, 1.0, 1.5],
        ]))
        .unwrap();
        let c = correlation(&rm);
        let stats = element_stats(&c, 0.02);
        assert!((stats.mean - 1.0).abs() < 1e-12);
        assert_eq!(stats.count_negative, 0);
        let occupied: Vec<usize> =
            stats.histogram.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, _)| k).collect();
        assert_eq!(occupied.len(), 1);
        assert_eq!(stats.histogram.counts[occupied[0]], 3);
    }

    #[test]
    fn scale_invariance_of_normalized_returns() {
        let prices = vec![100.0, 104.0, 101.5, 99.0, 103.2, 108.0];
        let scaled: Vec<f64> = prices.iter().map(|p| p * 7.25).collect();
        let t1 = table_from_rows(&[("A", prices), ("B", vec![1.0, 2.0, 1.5, 1.8, 2.2, 2.0])]);
        let t2 = table_from_rows(&[("A", scaled), ("B", vec![1.0, 2.0, 1.5, 1.8, 2.2, 2.0])]);
        let r1 = normalize(&log_returns(&t1, 1).unwrap()).unwrap();
        let r2 = normalize(&log_returns(&t2, 1).unwrap()).unwrap();
        for t in 0..r1.n_steps() {
            assert!((r1.returns[[0, t]] - r2.returns[[0, t]]).abs() < 1e-12);
        }
    }
}
