//! Fixed-width histograms for plot-ready CSV output.

/// Histogram over `[lo, hi]` with left-closed, right-open bins; the last bin
/// is closed so `hi` itself is counted.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Bin edges, length `n_bins + 1`. The last edge is exactly `hi`, so the
    /// final bin may be narrower than the requested width.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Bins of `bin_width` covering `[lo, hi]`.
    pub fn with_range(lo: f64, hi: f64, bin_width: f64) -> Self {
        assert!(hi > lo, "histogram range must be non-empty");
        assert!(bin_width > 0.0, "bin width must be positive");
        let span = hi - lo;
        // guard against 2.0/0.02 -> 100.0000...01 inflating the bin count
        let n_bins = (((span - span * 1e-12) / bin_width).floor() as usize) + 1;
        let mut edges: Vec<f64> = (0..n_bins).map(|k| lo + k as f64 * bin_width).collect();
        edges.push(hi);
        Histogram { edges, counts: vec![0; n_bins] }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    /// Count a value; out-of-range values land in the nearest end bin.
    pub fn insert(&mut self, value: f64) {
        let n = self.n_bins();
        let width = self.edges[1] - self.edges[0];
        let raw = ((value - self.lo()) / width).floor();
        let idx = if raw < 0.0 { 0 } else { (raw as usize).min(n - 1) };
        self.counts[idx] += 1;
    }

    pub fn insert_all<I: IntoIterator<Item = f64>>(&mut self, values: I) {
        for v in values {
            self.insert(v);
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Per-bin probability density: count / (total * bin width).
    pub fn densities(&self) -> Vec<f64> {
        let total = self.total();
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let width = self.edges[k + 1] - self.edges[k];
                if total == 0 || width == 0.0 {
                    0.0
                } else {
                    c as f64 / (total as f64 * width)
                }
            })
            .collect()
    }
}
