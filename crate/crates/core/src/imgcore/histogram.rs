/// Absolute slack applied when comparing accumulated mass against a target
/// fraction, so that e.g. 98 bins of mass 0.01 count as holding 98%.
pub const WINDOW_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bins: Vec<f64>,
    lo: f64,
    hi: f64,
    normalized: bool,
}

impl Histogram {
    /// Counts samples into `n_bins` uniform bins over `[lo, hi)`. Samples
    /// outside the range are ignored.
    pub fn from_samples(samples: impl IntoIterator<Item = f64>, n_bins: usize, lo: f64, hi: f64) -> Self {
        assert!(n_bins > 0 && hi > lo, "invalid histogram layout");
        let mut bins = vec![0.0; n_bins];
        let width = (hi - lo) / n_bins as f64;
        for s in samples {
            if s >= lo && s < hi {
                let idx = (((s - lo) / width) as usize).min(n_bins - 1);
                bins[idx] += 1.0;
            }
        }
        Histogram {
            bins,
            lo,
            hi,
            normalized: false,
        }
    }

    pub fn from_bins(bins: Vec<f64>, lo: f64, hi: f64) -> Self {
        Histogram {
            bins,
            lo,
            hi,
            normalized: false,
        }
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.bins.iter().copied().fold(0.0, f64::max)
    }

    /// Adds another histogram with the same layout bin by bin.
    pub fn accumulate(&mut self, other: &Histogram) {
        assert_eq!(self.bins.len(), other.bins.len(), "histogram layouts differ");
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.normalized = false;
    }

    /// Scales bins to unit mass. An empty histogram stays all-zero and is
    /// not marked normalized.
    pub fn normalize(mut self) -> Self {
        let total = self.total();
        if total > 0.0 {
            self.bins.iter_mut().for_each(|b| *b /= total);
            self.normalized = true;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MassWindow {
    pub start: usize,
    pub width: usize,
}

/// Smallest contiguous run of bins holding at least `fraction` of the total
/// mass. Ties in width are broken by closeness of the window center to the
/// mass median, then by leftmost start. Returns `None` when the total mass
/// is zero.
pub fn minimal_mass_window(masses: &[f64], fraction: f64) -> Option<MassWindow> {
    let n = masses.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &m in masses {
        acc += m;
        prefix.push(acc);
    }
    let total = acc;
    if !(total > 0.0) {
        return None;
    }
    let target = fraction * total - WINDOW_SLACK * total;
    let median = prefix[1..].iter().position(|&p| p >= 0.5 * total).unwrap_or(n - 1);

    let mut best: Option<(MassWindow, usize)> = None;
    let mut end = 0;
    for start in 0..n {
        end = end.max(start);
        while end < n && prefix[end + 1] - prefix[start] < target {
            end += 1;
        }
        if end == n {
            break;
        }
        let width = end - start + 1;
        // doubled center distance keeps the comparison in integers
        let offset = (2 * start + width - 1).abs_diff(2 * median);
        let candidate = MassWindow { start, width };
        best = match best {
            Some((b, d)) if b.width < width || (b.width == width && d <= offset) => Some((b, d)),
            _ => Some((candidate, offset)),
        };
    }
    best.map(|(w, _)| w)
}
