//! Threshold-based eigenvector component analysis.
//!
//! A mode is attributed to a sector or category by keeping only the stocks
//! whose component magnitude reaches a threshold `u_c` and counting labels
//! among the survivors.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ingest::{Category, SectorMap};
use crate::spectrum::SpectrumResult;

#[derive(Debug, Error)]
pub enum SectorsError {
    #[error("mode {mode} out of range (N = {n})")]
    ModeOutOfRange { mode: usize, n: usize },
}

/// One surviving component of a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantComponent {
    pub ticker: String,
    pub component: f64,
}

/// Stocks dominating mode `mode` at threshold `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantSet {
    pub mode: usize,
    pub threshold: f64,
    /// Sorted by |component| descending (ties by stock index).
    pub members: Vec<DominantComponent>,
    pub by_sector: BTreeMap<String, usize>,
    pub by_category: BTreeMap<Category, usize>,
}

impl DominantSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Fraction of members carrying `category`; None for an empty set.
    pub fn category_fraction(&self, category: Category) -> Option<f64> {
        if self.members.is_empty() {
            return None;
        }
        let count = self.by_category.get(&category).copied().unwrap_or(0);
        Some(count as f64 / self.members.len() as f64)
    }
}

/// Label share within one (mode, threshold) row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelShare {
    pub count: usize,
    /// None when the dominant set itself is empty.
    pub fraction: Option<f64>,
}

/// One (mode, threshold) row of the composition table.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionRow {
    pub mode: usize,
    pub u_c: f64,
    pub total: usize,
    pub by_category: BTreeMap<Category, LabelShare>,
    pub by_sector: BTreeMap<String, LabelShare>,
}

/// Composition of the dominant sets over modes x thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionReport {
    pub rows: Vec<CompositionRow>,
}

/// Render a share as a percentage with two decimals (half-up); an undefined
/// share (empty dominant set) renders as an em dash.
pub fn format_percent(fraction: Option<f64>) -> String {
    match fraction {
        None => "\u{2014}".to_owned(),
        Some(f) => format!("{:.2}", (f * 100.0 * 100.0).round() / 100.0),
    }
}

fn build_set(
    s: &SpectrumResult,
    map: &SectorMap,
    mode: usize,
    threshold: f64,
) -> DominantSet {
    let n = s.order();
    let mut members: Vec<(usize, DominantComponent)> = (0..n)
        .filter(|&i| s.component(i, mode).abs() >= threshold)
        .map(|i| {
            (i, DominantComponent { ticker: s.tickers[i].clone(), component: s.component(i, mode) })
        })
        .collect();
    members.sort_by(|(ia, a), (ib, b)| {
        b.component.abs().total_cmp(&a.component.abs()).then(ia.cmp(ib))
    });

    let mut by_sector: BTreeMap<String, usize> = BTreeMap::new();
    let mut by_category: BTreeMap<Category, usize> = BTreeMap::new();
    for (_, m) in &members {
        let info = map.get(&m.ticker);
        *by_sector.entry(info.business_sector).or_insert(0) += 1;
        *by_category.entry(info.category).or_insert(0) += 1;
    }

    DominantSet {
        mode,
        threshold,
        members: members.into_iter().map(|(_, m)| m).collect(),
        by_sector,
        by_category,
    }
}

/// Stocks with `|u_i(lambda_mode)| >= u_c`, with label counts.
pub fn dominant_components(
    s: &SpectrumResult,
    map: &SectorMap,
    mode: usize,
    u_c: f64,
) -> Result<DominantSet, SectorsError> {
    if mode >= s.order() {
        return Err(SectorsError::ModeOutOfRange { mode, n: s.order() });
    }
    Ok(build_set(s, map, mode, u_c))
}

/// Rank-based cutoff: the dominant set at the threshold equal to the
/// `count`-th largest component magnitude of the mode.
pub fn top_components(
    s: &SpectrumResult,
    map: &SectorMap,
    mode: usize,
    count: usize,
) -> Result<DominantSet, SectorsError> {
    if mode >= s.order() {
        return Err(SectorsError::ModeOutOfRange { mode, n: s.order() });
    }
    if count == 0 {
        return Ok(build_set(s, map, mode, f64::INFINITY));
    }
    let mut mags: Vec<f64> = (0..s.order()).map(|i| s.component(i, mode).abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let threshold = mags[count.min(mags.len()) - 1];
    Ok(build_set(s, map, mode, threshold))
}

/// Composition table over `modes` x `thresholds`.
pub fn composition_report(
    s: &SpectrumResult,
    map: &SectorMap,
    modes: &[usize],
    thresholds: &[f64],
) -> Result<CompositionReport, SectorsError> {
    let mut rows = Vec::with_capacity(modes.len() * thresholds.len());
    for &mode in modes {
        for &u_c in thresholds {
            let set = dominant_components(s, map, mode, u_c)?;
            let total = set.len();
            let share = |count: usize| LabelShare {
                count,
                fraction: if total == 0 { None } else { Some(count as f64 / total as f64) },
            };
            let mut by_category = BTreeMap::new();
            for cat in Category::ALL {
                by_category.insert(cat, share(set.by_category.get(&cat).copied().unwrap_or(0)));
            }
            let by_sector =
                set.by_sector.iter().map(|(label, &count)| (label.clone(), share(count))).collect();
            rows.push(CompositionRow { mode, u_c, total, by_category, by_sector });
        }
    }
    Ok(CompositionReport { rows })
}

/// Proportion of `label` members at each threshold of an ascending grid;
/// None marks thresholds where the dominant set is empty.
pub fn monotonicity_scan(
    s: &SpectrumResult,
    map: &SectorMap,
    mode: usize,
    label: Category,
    u_grid: &[f64],
) -> Result<Vec<Option<f64>>, SectorsError> {
    u_grid
        .iter()
        .map(|&u_c| Ok(dominant_components(s, map, mode, u_c)?.category_fraction(label)))
        .collect()
}
