//! Output distributions and the statistics read off them.
//!
//! Positions sit on a half-integer grid centred on the lattice middle,
//! `x_j = j − (2M + 1)/2` for the one-based mode `j`, so the walker
//! injected symmetrically into the two central modes starts at mean 0.

use crate::error::{Error, Result};
use crate::walk::ModeState;

/// Accepted deviation of a distribution's sum from 1.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probabilities: Vec<f64>,
    step: usize,
}

impl Distribution {
    pub fn new(probabilities: Vec<f64>, step: usize) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("no modes".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("sums to {sum}")));
        }
        Ok(Self {
            probabilities,
            step,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// The distribution with the mode axis reversed.
    pub fn mirrored(&self) -> Self {
        let mut probabilities = self.probabilities.clone();
        probabilities.reverse();
        Self {
            probabilities,
            step: self.step,
        }
    }
}

/// Per-mode detection probabilities of `state`.
pub fn distribution(state: &ModeState, step: usize) -> Result<Distribution> {
    Distribution::new(state.probabilities(), step)
}

/// `(P_a + P_b) / 2`, the two-injection average.
pub fn average_pair(a: &Distribution, b: &Distribution) -> Result<Distribution> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} modes", a.len(), b.len())));
    }
    if a.step != b.step {
        return Err(Error::ShapeMismatch(format!("steps {} vs {}", a.step, b.step)));
    }
    let probabilities = a
        .probabilities
        .iter()
        .zip(&b.probabilities)
        .map(|(x, y)| 0.5 * (x + y))
        .collect();
    Ok(Distribution {
        probabilities,
        step: a.step,
    })
}

/// Position of every mode on the centred half-integer grid.
pub fn positions(sites: usize) -> Vec<f64> {
    let centre = (sites as f64 + 1.0) / 2.0;
    (1..=sites).map(|j| j as f64 - centre).collect()
}

/// Largest variance any distribution on `sites` modes can have: half the
/// weight on each edge mode.
pub fn max_variance(sites: usize) -> f64 {
    let half_width = (sites as f64 - 1.0) / 2.0;
    half_width * half_width
}

/// Mean and variance of `positions` weighted by `probabilities`.
pub fn moments(probabilities: &[f64], positions: &[f64]) -> (f64, f64) {
    let mean: f64 = probabilities.iter().zip(positions).map(|(p, x)| p * x).sum();
    let variance = probabilities
        .iter()
        .zip(positions)
        .map(|(p, x)| p * (x - mean) * (x - mean))
        .sum();
    (mean, variance)
}

/// Mean position and position variance on the centred grid.
pub fn mean_and_variance(dist: &Distribution) -> (f64, f64) {
    moments(&dist.probabilities, &positions(dist.len()))
}

/// σ²(n) and the mean position over consecutive steps.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceSeries {
    first_step: usize,
    values: Vec<f64>,
    means: Vec<f64>,
}

impl VarianceSeries {
    pub fn from_distributions(dists: &[Distribution]) -> Self {
        let (means, values) = dists.iter().map(mean_and_variance).unzip();
        Self {
            first_step: dists.first().map_or(0, Distribution::step),
            values,
            means,
        }
    }

    /// Series starting at `first_step`; `means` may hold placeholders.
    pub fn from_parts(first_step: usize, values: Vec<f64>, means: Vec<f64>) -> Self {
        assert_eq!(values.len(), means.len(), "one mean per variance");
        Self {
            first_step,
            values,
            means,
        }
    }

    /// Series from bare values, starting at step 0.
    pub fn from_values(values: Vec<f64>) -> Self {
        let means = vec![0.0; values.len()];
        Self::from_parts(0, values, means)
    }

    pub fn first_step(&self) -> usize {
        self.first_step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// σ² at `step`, if the series covers it.
    pub fn at(&self, step: usize) -> Option<f64> {
        step.checked_sub(self.first_step)
            .and_then(|i| self.values.get(i).copied())
    }

    /// Step with the smallest σ² in `lo..=hi`; ties go to the earliest.
    pub fn argmin_in(&self, lo: usize, hi: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for step in lo..=hi {
            let Some(v) = self.at(step) else { continue };
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((step, v));
            }
        }
        best.map(|(s, _)| s)
    }

    /// max − min of σ² over `lo..=hi`.
    pub fn peak_to_trough(&self, lo: usize, hi: usize) -> Option<f64> {
        let window: Vec<f64> = (lo..=hi).filter_map(|s| self.at(s)).collect();
        if window.is_empty() {
            return None;
        }
        let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = window.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max - min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_norm: f64,
}

/// Peaks of a variance series and, once fitted, the line through them.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakFit {
    pub steps: Vec<usize>,
    /// 1, 2, 3, … in step order.
    pub orders: Vec<usize>,
    pub fit: Option<LinearFit>,
}

/// Relative maxima of the series, endpoints excluded.
///
/// A step is a peak when it is strictly above both neighbours. A run of
/// exactly equal values strictly above the values on either side counts
/// once, at its earliest step.
pub fn find_peaks(series: &VarianceSeries) -> Result<PeakFit> {
    let v = &series.values;
    if v.len() < 3 {
        return Err(Error::SeriesTooShort {
            needed: 3,
            got: v.len(),
        });
    }
    let mut steps = Vec::new();
    let mut i = 1;
    while i < v.len() - 1 {
        if v[i] > v[i - 1] {
            let mut end = i;
            while end + 1 < v.len() && v[end + 1] == v[i] {
                end += 1;
            }
            if end + 1 < v.len() && v[end + 1] < v[i] {
                steps.push(series.first_step + i);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    let orders = (1..=steps.len()).collect();
    Ok(PeakFit {
        steps,
        orders,
        fit: None,
    })
}

/// Least-squares line of peak step against peak order.
pub fn fit_peaks_linear(peaks: &PeakFit) -> Result<LinearFit> {
    let k = peaks.steps.len();
    if k < 2 {
        return Err(Error::TooFewPeaks(k));
    }
    let xs: Vec<f64> = peaks.orders.iter().map(|&o| o as f64).collect();
    let ys: Vec<f64> = peaks.steps.iter().map(|&s| s as f64).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual_norm = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        residual_norm,
    })
}

impl PeakFit {
    /// Fits the peaks when there are at least two of them.
    pub fn with_fit(mut self) -> Self {
        self.fit = fit_peaks_linear(&self).ok();
        self
    }
}

/// Ordinary least-squares `(slope, intercept)`; needs two distinct xs.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `max_i |p_i − q_i|`, the comparison metric used against measured data.
///
/// This is the largest single-mode discrepancy, not half the L1 distance.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} modes", p.len(), q.len())));
    }
    Ok(p.probabilities
        .iter()
        .zip(&q.probabilities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
