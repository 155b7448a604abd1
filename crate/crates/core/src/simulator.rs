//! Synthetic market generator with market, sector and profit-category factors.
//!
//! Each stock's return is a fixed linear mix of a market factor shared by
//! everyone, a factor per business sector, a factor per profit category
//! (ST / Blue-chip / general) and idiosyncratic noise, all independent unit
//! Gaussians:
//!
//! ```text
//! r_i(t) = beta_i m(t) + gamma_i g_k(t) + gamma_p_i p_c(t) + sigma_i eta_i(t)
//! ```
//!
//! Couplings are drawn uniformly around configured means with total width
//! `delta`, and `beta_i` is fixed by the unit-variance constraint
//! `beta^2 + gamma^2 + gamma_p^2 + sigma^2 = 1`. Every ST stock must carry a
//! strictly larger profit coupling than every Blue-chip stock, which is what
//! splits the two categories into separate eigenmodes.
//!
//! By default each category has its own profit factor process; a literal
//! single shared process is available behind `shared_profit_factor` for
//! comparison (it correlates ST with Blue-chip stocks and blurs the two
//! modes).

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Category;
use crate::rng::substream;
use crate::transform::{normalize, RawReturns, ReturnMatrix, TransformError};

const MAX_ORDERING_ATTEMPTS: u64 = 100;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config infeasible: {reason}")]
    InfeasibleConfig { reason: String },
    #[error("ST/Blue-chip profit coupling ordering unsatisfiable: {reason}")]
    OrderingUnsatisfiable { reason: String },
    #[error("simulated returns could not be normalized: {0}")]
    Normalize(#[from] TransformError),
}

/// Full parameterization of one simulated market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorModelConfig {
    /// Number of stocks.
    pub n: usize,
    /// Number of time steps.
    pub t: usize,
    /// Stocks per business sector; must sum to `n`.
    pub sector_sizes: Vec<usize>,
    /// Stocks flagged ST / Blue-chip (selected uniformly at random).
    pub n_st: usize,
    pub n_bc: usize,
    /// Mean sector coupling.
    pub gamma_sector: f64,
    /// Mean profit coupling per category.
    pub gamma_profit_st: f64,
    pub gamma_profit_bc: f64,
    #[serde(default)]
    pub gamma_profit_general: f64,
    /// Mean idiosyncratic strength.
    pub sigma: f64,
    /// Total width of the uniform coupling distributions.
    pub delta: f64,
    pub seed: u64,
    /// Use one shared profit process for all three categories instead of one
    /// process per category.
    #[serde(default)]
    pub shared_profit_factor: bool,
}

impl FactorModelConfig {
    pub fn gamma_profit_mean(&self, category: Category) -> f64 {
        match category {
            Category::St => self.gamma_profit_st,
            Category::BlueChip => self.gamma_profit_bc,
            Category::General => self.gamma_profit_general,
        }
    }

    /// Mean-coupling beta for a category (exact sampled value when delta = 0).
    pub fn beta_mean(&self, category: Category) -> f64 {
        let g = self.gamma_sector;
        let p = self.gamma_profit_mean(category);
        let s = self.sigma;
        (1.0 - g * g - p * p - s * s).sqrt()
    }

    /// Validate invariants; errors name the offending field.
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |reason: String| Err(SimError::InfeasibleConfig { reason });
        if self.n < 2 {
            return fail(format!("n = {} must be at least 2", self.n));
        }
        if self.t < 2 {
            return fail(format!("t = {} must be at least 2", self.t));
        }
        if self.sector_sizes.is_empty() {
            return fail("sector_sizes must be non-empty".into());
        }
        if self.sector_sizes.contains(&0) {
            return fail("sector_sizes entries must be positive".into());
        }
        let total: usize = self.sector_sizes.iter().sum();
        if total != self.n {
            return fail(format!("sector_sizes sum to {total}, expected n = {}", self.n));
        }
        if self.n_st + self.n_bc > self.n {
            return fail(format!(
                "n_st + n_bc = {} exceeds n = {}",
                self.n_st + self.n_bc,
                self.n
            ));
        }
        for (name, value) in [
            ("gamma_sector", self.gamma_sector),
            ("gamma_profit_st", self.gamma_profit_st),
            ("gamma_profit_bc", self.gamma_profit_bc),
            ("gamma_profit_general", self.gamma_profit_general),
            ("sigma", self.sigma),
            ("delta", self.delta),
        ] {
            if !value.is_finite() || value < 0.0 {
                return fail(format!("{name} = {value} must be finite and non-negative"));
            }
        }
        // worst-case radicand of the unit-variance constraint must stay positive
        for cat in Category::ALL {
            let g = self.gamma_sector + self.delta / 2.0;
            let p = self.gamma_profit_mean(cat) + self.delta / 2.0;
            let s = self.sigma + self.delta / 2.0;
            if 1.0 - g * g - p * p - s * s <= 0.0 {
                return fail(format!(
                    "gamma_sector/gamma_profit/sigma + delta/2 leave no room for beta \
                     ({} category: {g}^2 + {p}^2 + {s}^2 >= 1)",
                    cat.label()
                ));
            }
        }
        let profit_inert = self.delta == 0.0
            && self.gamma_profit_st == 0.0
            && self.gamma_profit_bc == 0.0;
        if self.n_st > 0 && self.n_bc > 0 && !profit_inert {
            // ordering impossible when even the largest ST draw cannot exceed
            // the smallest Blue-chip draw
            if self.gamma_profit_st + self.delta / 2.0 <= self.gamma_profit_bc - self.delta / 2.0 {
                return Err(SimError::OrderingUnsatisfiable {
                    reason: format!(
                        "gamma_profit_st + delta/2 = {} never exceeds gamma_profit_bc - delta/2 = {}",
                        self.gamma_profit_st + self.delta / 2.0,
                        self.gamma_profit_bc - self.delta / 2.0
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Sector/category membership of one stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    pub sector: usize,
    pub category: Category,
}

/// Sampled ground truth for one stock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StockTruth {
    pub ticker: String,
    pub sector: usize,
    pub category: Category,
    pub beta: f64,
    pub gamma_sector: f64,
    pub gamma_profit: f64,
    pub sigma: f64,
}

impl StockTruth {
    pub fn membership(&self) -> Membership {
        Membership { sector: self.sector, category: self.category }
    }
}

/// Realized factor paths, kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPaths {
    pub market: Vec<f64>,
    pub sectors: Vec<Vec<f64>>,
    pub profit_st: Vec<f64>,
    pub profit_bc: Vec<f64>,
    pub profit_general: Vec<f64>,
}

/// One simulated market: normalized returns plus the generating truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedMarket {
    pub config: FactorModelConfig,
    pub returns: ReturnMatrix,
    pub truth: Vec<StockTruth>,
    pub factor_paths: FactorPaths,
}

impl SimulatedMarket {
    /// Analytic expectation of `C_ij` under the mean couplings.
    pub fn expected_correlation(&self, i: usize, j: usize) -> f64 {
        let members: Vec<Membership> = self.truth.iter().map(StockTruth::membership).collect();
        expected_correlation(&self.config, &members, i, j)
    }
}

fn ticker_name(i: usize, n: usize) -> String {
    let width = (n.saturating_sub(1)).to_string().len().max(3);
    format!("S{i:0width$}")
}

fn sector_of(sizes: &[usize], stock: usize) -> usize {
    let mut upto = 0;
    for (k, &size) in sizes.iter().enumerate() {
        upto += size;
        if stock < upto {
            return k;
        }
    }
    unreachable!("stock index within n")
}

/// Random ST / Blue-chip selection over all stocks, independent of sector.
pub fn assign_categories(cfg: &FactorModelConfig) -> Vec<Category> {
    let mut order: Vec<usize> = (0..cfg.n).collect();
    order.shuffle(&mut substream(cfg.seed, "assign", &[]));
    let mut categories = vec![Category::General; cfg.n];
    for &i in order.iter().take(cfg.n_st) {
        categories[i] = Category::St;
    }
    for &i in order.iter().skip(cfg.n_st).take(cfg.n_bc) {
        categories[i] = Category::BlueChip;
    }
    categories
}

fn draw_coupling(rng: &mut impl Rng, mean: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        mean
    } else {
        rng.gen_range((mean - delta / 2.0)..(mean + delta / 2.0))
    }
}

/// Draw the per-stock coupling table.
///
/// Couplings come from uniform distributions of total width `delta` centered
/// on the configured means (per-category mean for the profit coupling);
/// `beta` closes the unit-variance constraint. If a draw violates the
/// all-ST-above-all-Blue-chip ordering, the whole table is redrawn
/// (bounded retries).
pub fn sample_coefficients(cfg: &FactorModelConfig) -> Result<Vec<StockTruth>, SimError> {
    cfg.validate()?;
    let categories = assign_categories(cfg);

    for attempt in 0..MAX_ORDERING_ATTEMPTS {
        let mut truth = Vec::with_capacity(cfg.n);
        for (i, &category) in categories.iter().enumerate() {
            let mut rng = substream(cfg.seed, "coeff", &[attempt, i as u64]);
            let gamma_sector = draw_coupling(&mut rng, cfg.gamma_sector, cfg.delta);
            let sigma = draw_coupling(&mut rng, cfg.sigma, cfg.delta);
            let gamma_profit = draw_coupling(&mut rng, cfg.gamma_profit_mean(category), cfg.delta);
            let radicand =
                1.0 - gamma_sector * gamma_sector - gamma_profit * gamma_profit - sigma * sigma;
            debug_assert!(radicand > 0.0, "validate() bounds the radicand away from zero");
            truth.push(StockTruth {
                ticker: ticker_name(i, cfg.n),
                sector: sector_of(&cfg.sector_sizes, i),
                category,
                beta: radicand.sqrt(),
                gamma_sector,
                gamma_profit,
                sigma,
            });
        }

        let min_st = truth
            .iter()
            .filter(|s| s.category == Category::St)
            .map(|s| s.gamma_profit)
            .fold(f64::INFINITY, f64::min);
        let max_bc = truth
            .iter()
            .filter(|s| s.category == Category::BlueChip)
            .map(|s| s.gamma_profit)
            .fold(f64::NEG_INFINITY, f64::max);
        // an exactly zero coupling carries no profit interaction, so a
        // zero-vs-zero tie cannot blur the two categories
        let ordered = min_st > max_bc || (min_st == 0.0 && max_bc == 0.0);
        if cfg.n_st == 0 || cfg.n_bc == 0 || ordered {
            return Ok(truth);
        }
    }

    Err(SimError::OrderingUnsatisfiable {
        reason: format!(
            "ST and Blue-chip profit coupling ranges overlap; {MAX_ORDERING_ATTEMPTS} redraws \
             failed to separate them"
        ),
    })
}

fn gaussian_path(seed: u64, role: &str, indices: &[u64], len: usize) -> Vec<f64> {
    let mut rng = substream(seed, role, indices);
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Generate a market and empirically re-normalize the returns.
pub fn simulate(cfg: &FactorModelConfig) -> Result<SimulatedMarket, SimError> {
    let truth = sample_coefficients(cfg)?;

    let market = gaussian_path(cfg.seed, "market", &[], cfg.t);
    let sectors: Vec<Vec<f64>> = (0..cfg.sector_sizes.len())
        .map(|k| gaussian_path(cfg.seed, "sector", &[k as u64], cfg.t))
        .collect();
    let (profit_st, profit_bc, profit_general) = if cfg.shared_profit_factor {
        let shared = gaussian_path(cfg.seed, "profit", &[0], cfg.t);
        (shared.clone(), shared.clone(), shared)
    } else {
        (
            gaussian_path(cfg.seed, "profit", &[0], cfg.t),
            gaussian_path(cfg.seed, "profit", &[1], cfg.t),
            gaussian_path(cfg.seed, "profit", &[2], cfg.t),
        )
    };

    let mut values = Array2::zeros((cfg.n, cfg.t));
    for (i, stock) in truth.iter().enumerate() {
        let noise = gaussian_path(cfg.seed, "noise", &[i as u64], cfg.t);
        let sector = &sectors[stock.sector];
        let profit = match stock.category {
            Category::St => &profit_st,
            Category::BlueChip => &profit_bc,
            Category::General => &profit_general,
        };
        let mut row = values.row_mut(i);
        let row = row.as_slice_mut().expect("row-major");
        for t in 0..cfg.t {
            row[t] = stock.beta * market[t]
                + stock.gamma_sector * sector[t]
                + stock.gamma_profit * profit[t]
                + stock.sigma * noise[t];
        }
    }

    let raw = RawReturns {
        tickers: truth.iter().map(|s| s.ticker.clone()).collect(),
        values,
        interval: 1,
    };
    let returns = normalize(&raw)?;

    Ok(SimulatedMarket {
        config: cfg.clone(),
        returns,
        truth,
        factor_paths: FactorPaths { market, sectors, profit_st, profit_bc, profit_general },
    })
}

/// Analytic `E[C_ij]` from the mean couplings (exact for delta = 0, a
/// mean-coupling approximation otherwise):
///
/// `beta_i beta_j + gamma^2 [same sector] + gamma_p_i gamma_p_j [same category]`
///
/// With a shared profit factor the category indicator disappears.
pub fn expected_correlation(
    cfg: &FactorModelConfig,
    members: &[Membership],
    i: usize,
    j: usize,
) -> f64 {
    if i == j {
        return 1.0;
    }
    let (a, b) = (members[i], members[j]);
    let mut c = cfg.beta_mean(a.category) * cfg.beta_mean(b.category);
    if a.sector == b.sector {
        c += cfg.gamma_sector * cfg.gamma_sector;
    }
    if cfg.shared_profit_factor || a.category == b.category {
        c += cfg.gamma_profit_mean(a.category) * cfg.gamma_profit_mean(b.category);
    }
    c
}

/// The published operating point: 250 stocks over 2500 steps, five sectors
/// of 50, 40 ST and 40 Blue-chip stocks, couplings (0.2, 0.55/0.40, 0.3),
/// width 0.05.
pub fn reference_config(seed: u64) -> FactorModelConfig {
    FactorModelConfig {
        n: 250,
        t: 2500,
        sector_sizes: vec![50; 5],
        n_st: 40,
        n_bc: 40,
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

#[cfg(test)]
mod tests {
    use super::*;

    const BETA_ST: f64 = 0.753_325_958_665_968_2;
    const BETA_BC: f64 = 0.842_614_977_317_635_9;

    fn small_config(seed: u64) -> FactorModelConfig {
        FactorModelConfig {
            n: 20,
            t: 400,
            sector_sizes: vec![5, 5, 5, 5],
            n_st: 4,
            n_bc: 4,
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

    #[test]
    fn beta_matches_published_rounding() {
        let mut cfg = small_config(1);
        cfg.delta = 0.0;
        let truth = sample_coefficients(&cfg).unwrap();
        for stock in &truth {
            let expected = match stock.category {
                Category::St => BETA_ST,
                Category::BlueChip => BETA_BC,
                Category::General => (0.87f64).sqrt(),
            };
            assert!((stock.beta - expected).abs() < 1e-15);
        }
        assert!((BETA_ST - 0.75).abs() < 5e-3);
        assert!((BETA_BC - 0.84).abs() < 5e-3);
    }

    #[test]
    fn zero_couplings_give_pure_market_mode() {
        let mut cfg = small_config(2);
        cfg.delta = 0.0;
        cfg.gamma_sector = 0.0;
        cfg.gamma_profit_st = 0.0;
        cfg.gamma_profit_bc = 0.0;
        cfg.sigma = 0.0;
        let truth = sample_coefficients(&cfg).unwrap();
        assert!(truth.iter().all(|s| s.beta == 1.0));
    }

    #[test]
    fn unit_variance_identity_holds_exactly() {
        let truth = sample_coefficients(&small_config(3)).unwrap();
        for s in &truth {
            let sum = s.beta * s.beta
                + s.gamma_sector * s.gamma_sector
                + s.gamma_profit * s.gamma_profit
                + s.sigma * s.sigma;
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn st_couplings_exceed_blue_chip_couplings() {
        let truth = sample_coefficients(&small_config(4)).unwrap();
        let min_st = truth
            .iter()
            .filter(|s| s.category == Category::St)
            .map(|s| s.gamma_profit)
            .fold(f64::INFINITY, f64::min);
        let max_bc = truth
            .iter()
            .filter(|s| s.category == Category::BlueChip)
            .map(|s| s.gamma_profit)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min_st > max_bc);
    }

    #[test]
    fn category_counts_match_config() {
        let cfg = small_config(5);
        let cats = assign_categories(&cfg);
        assert_eq!(cats.iter().filter(|&&c| c == Category::St).count(), cfg.n_st);
        assert_eq!(cats.iter().filter(|&&c| c == Category::BlueChip).count(), cfg.n_bc);
        // deterministic under the same seed
        assert_eq!(cats, assign_categories(&cfg));
    }

    #[test]
    fn infeasible_configs_are_named() {
        let mut cfg = small_config(6);
        cfg.sector_sizes = vec![5, 5, 5, 4];
        match cfg.validate() {
            Err(SimError::InfeasibleConfig { reason }) => assert!(reason.contains("sector_sizes")),
            other => panic!("expected InfeasibleConfig, got {other:?}"),
        }

        let mut cfg = small_config(7);
        cfg.sigma = 0.9;
        cfg.gamma_profit_st = 0.5;
        assert!(matches!(cfg.validate(), Err(SimError::InfeasibleConfig { .. })));

        let mut cfg = small_config(8);
        cfg.gamma_profit_st = 0.30;
        cfg.gamma_profit_bc = 0.40;
        assert!(matches!(cfg.validate(), Err(SimError::OrderingUnsatisfiable { .. })));
    }

    #[test]
    fn simulate_is_deterministic() {
        let cfg = small_config(9);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a.returns.returns, b.returns.returns);
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.factor_paths, b.factor_paths);
        let c = simulate(&small_config(10)).unwrap();
        assert_ne!(a.returns.returns, c.returns.returns);
    }

    #[test]
    fn rank_one_limit_is_all_ones() {
        let mut cfg = small_config(11);
        cfg.delta = 0.0;
        cfg.gamma_sector = 0.0;
        cfg.gamma_profit_st = 0.0;
        cfg.gamma_profit_bc = 0.0;
        cfg.sigma = 0.0;
        let market = simulate(&cfg).unwrap();
        let c = crate::transform::correlation(&market.returns);
        for i in 0..cfg.n {
            for j in 0..cfg.n {
                assert!((c.values[[i, j]] - 1.0).abs() < 1e-12);
            }
        }
        let s = crate::spectrum::eigensolve(&c, crate::spectrum::DEFAULT_TOL).unwrap();
        assert!((s.eigenvalues[0] - cfg.n as f64).abs() < 1e-8);
        for k in 1..cfg.n {
            assert!(s.eigenvalues[k].abs() < 1e-8);
        }
    }

    #[test]
    fn expected_correlation_closed_form() {
        let mut cfg = small_config(12);
        cfg.delta = 0.0;
        let same_sector_st = [
            Membership { sector: 0, category: Category::St },
            Membership { sector: 0, category: Category::St },
        ];
        // beta_ST^2 + gamma^2 + gamma_p_ST^2 = 1 - sigma^2 = 0.91
        let c = expected_correlation(&cfg, &same_sector_st, 0, 1);
        assert!((c - 0.91).abs() < 1e-12);

        // nothing shared: market term only
        let unrelated = [
            Membership { sector: 0, category: Category::St },
            Membership { sector: 1, category: Category::General },
        ];
        let c = expected_correlation(&cfg, &unrelated, 0, 1);
        assert!((c - BETA_ST * (0.87f64).sqrt()).abs() < 1e-12);

        // i = j is the unit-variance identity
        assert_eq!(expected_correlation(&cfg, &unrelated, 1, 1), 1.0);

        // shared profit factor adds the cross-category term
        cfg.shared_profit_factor = true;
        let st_bc = [
            Membership { sector: 0, category: Category::St },
            Membership { sector: 1, category: Category::BlueChip },
        ];
        let c = expected_correlation(&cfg, &st_bc, 0, 1);
        assert!((c - (BETA_ST * BETA_BC + 0.55 * 0.40)).abs() < 1e-12);
    }

    #[test]
    fn empirical_correlation_approaches_expectation() {
        // delta = 0, moderate T: every pair within 5/sqrt(T) of the analytic value
        let mut cfg = small_config(13);
        cfg.delta = 0.0;
        cfg.t = 10_000;
        let market = simulate(&cfg).unwrap();
        let c = crate::transform::correlation(&market.returns);
        let tol = 5.0 / (cfg.t as f64).sqrt();
        let mut worst = 0.0f64;
        let mut outside = 0usize;
        for i in 0..cfg.n {
            for j in (i + 1)..cfg.n {
                let err = (c.values[[i, j]] - market.expected_correlation(i, j)).abs();
                worst = worst.max(err);
                if err > tol {
                    outside += 1;
                }
            }
        }
        let pairs = cfg.n * (cfg.n - 1) / 2;
        assert!(
            outside as f64 <= 0.01 * pairs as f64,
            "{outside}/{pairs} pairs off by more than {tol} (worst {worst})"
        );
    }
}
