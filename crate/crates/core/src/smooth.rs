//! Gaussian kernel denoising and matching-criterion bandwidth selection.

use rayon::prelude::*;

use crate::curves::{CurveBundle, Grid, SampledCurve};
use crate::error::{Error, Result};
use crate::pipeline::{structural_estimate, StructuralEstimate};

const MODULE: &str = "smooth";

/// How a candidate bandwidth is scored against the structural estimate
/// `f` it produces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MatchingCriterion {
    /// `sum_i sum_j |Y_i(k_ij) - f(t_j)|`, where `k_ij` is the sample of
    /// curve `i` registered to `t_j`: the observed curves, aligned by the
    /// pipeline, against the estimate.
    #[default]
    Registered,
    /// `sum_i sum_j |S_i(t_j) - f(t_j)|` with `S_i` the smoothed curves.
    /// This decreases as the curves are flattened, so it favours the
    /// largest bandwidth on the grid.
    Pointwise,
}

/// Candidate bandwidths, strictly positive and ascending, and the
/// criterion used to choose among them.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingConfig {
    bandwidths: Vec<f64>,
    criterion: MatchingCriterion,
}

impl SmoothingConfig {
    pub fn new(mut bandwidths: Vec<f64>) -> Result<Self> {
        if bandwidths.is_empty() {
            return Err(Error::InvalidInput("bandwidth grid is empty".into()));
        }
        if let Some(&bad) = bandwidths.iter().find(|nu| !(nu.is_finite() && **nu > 0.0)) {
            return Err(Error::InvalidBandwidth(bad));
        }
        bandwidths.sort_by(f64::total_cmp);
        bandwidths.dedup();
        Ok(SmoothingConfig {
            bandwidths,
            criterion: MatchingCriterion::default(),
        })
    }

    /// `count` log-spaced bandwidths from `min` to `max` inclusive.
    pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && max >= min && min.is_finite() && max.is_finite()) || count == 0 {
            return Err(Error::InvalidInput(format!(
                "bandwidth grid needs 0 < min <= max and count >= 1 (min={min}, max={max}, count={count})"
            )));
        }
        if count == 1 {
            return SmoothingConfig::new(vec![min]);
        }
        let (lmin, lmax) = (min.ln(), max.ln());
        let bw = (0..count)
            .map(|k| {
                if k == 0 {
                    min
                } else if k + 1 == count {
                    max
                } else {
                    (lmin + (lmax - lmin) * k as f64 / (count - 1) as f64).exp()
                }
            })
            .collect();
        SmoothingConfig::new(bw)
    }

    /// 20 log-spaced bandwidths from one grid gap to `(b - a) / 4`.
    pub fn default_for(grid: &Grid) -> Result<Self> {
        let gap = if grid.is_equispaced() {
            (grid.b() - grid.a()) / grid.intervals() as f64
        } else {
            grid.max_gap()
        };
        SmoothingConfig::log_spaced(gap, ((grid.b() - grid.a()) / 4.0).max(gap), 20)
    }

    pub fn with_criterion(mut self, criterion: MatchingCriterion) -> Self {
        self.criterion = criterion;
        self
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn criterion(&self) -> MatchingCriterion {
        self.criterion
    }
}

/// Nadaraya-Watson smoothing with an untruncated Gaussian kernel at the
/// interior samples; the two endpoint samples are replaced by the supplied
/// cross-curve means.
pub fn kernel_smooth(
    curve: &SampledCurve,
    endpoint_means: (f64, f64),
    nu: f64,
) -> Result<SampledCurve> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidBandwidth(nu));
    }
    let t = curve.times();
    let y = curve.values();
    let n = t.len();
    let mut out = Vec::with_capacity(n);
    out.push(endpoint_means.0);
    for j in 1..n - 1 {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..n {
            let u = (t[k] - t[j]) / nu;
            let w = (-0.5 * u * u).exp();
            num += w * y[k];
            den += w;
        }
        out.push(num / den);
    }
    if n > 1 {
        out.push(endpoint_means.1);
    }
    curve.with_values(out)
}

/// Smooths every curve with bandwidth `nu`, endpoints set to the bundle
/// means of the first and last samples.
pub fn smooth_bundle(bundle: &CurveBundle, nu: f64) -> Result<CurveBundle> {
    bundle.require_common_grid(MODULE)?;
    let m = bundle.m() as f64;
    let first = bundle.curves().iter().map(|c| c.values()[0]).sum::<f64>() / m;
    let last = bundle
        .curves()
        .iter()
        .map(|c| c.values()[c.len() - 1])
        .sum::<f64>()
        / m;
    bundle.map_curves(|c| kernel_smooth(c, (first, last), nu))
}

#[derive(Clone, Debug)]
pub struct BandwidthSelection {
    pub bandwidth: f64,
    pub smoothed: CurveBundle,
    pub estimate: StructuralEstimate,
    /// Criterion value per candidate, in grid order; `Err` text when the
    /// pipeline failed at that bandwidth.
    pub criteria: Vec<(f64, std::result::Result<f64, String>)>,
}

/// L1 matching criterion between a bundle and the structural estimate
/// computed from its smoothed version.
pub fn matching_criterion(
    criterion: MatchingCriterion,
    raw: &CurveBundle,
    smoothed: &CurveBundle,
    estimate: &StructuralEstimate,
) -> f64 {
    let reference = estimate.curve.values();
    match criterion {
        MatchingCriterion::Registered => raw
            .curves()
            .iter()
            .zip(&estimate.registration)
            .map(|(c, idx)| {
                idx.iter()
                    .zip(reference)
                    .map(|(&k, f)| (c.values()[k] - f).abs())
                    .sum::<f64>()
            })
            .sum(),
        MatchingCriterion::Pointwise => smoothed
            .curves()
            .iter()
            .map(|c| {
                c.values()
                    .iter()
                    .zip(reference)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
            })
            .sum(),
    }
}

/// Index of the smallest present value; ties go to the later index.
fn argmin_prefer_last(values: impl Iterator<Item = Option<f64>>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values.enumerate() {
        if let Some(v) = v {
            if best.is_none_or(|(_, b)| v <= b) {
                best = Some((k, v));
            }
        }
    }
    best.map(|(k, _)| k)
}

/// Picks the bandwidth minimizing the matching criterion; exact ties go
/// to the larger bandwidth.
pub fn select_bandwidth(
    bundle: &CurveBundle,
    config: &SmoothingConfig,
) -> Result<BandwidthSelection> {
    if bundle.m() < 2 {
        return Err(Error::InsufficientSample {
            module: MODULE,
            needed: 2,
            got: bundle.m(),
        });
    }
    bundle.require_common_grid(MODULE)?;
    let runs: Vec<Result<(CurveBundle, StructuralEstimate, f64)>> = config
        .bandwidths()
        .par_iter()
        .map(|&nu| {
            let smoothed = smooth_bundle(bundle, nu)?;
            let estimate = structural_estimate(&smoothed)?;
            let crit = matching_criterion(config.criterion(), bundle, &smoothed, &estimate);
            Ok((smoothed, estimate, crit))
        })
        .collect();

    let best = argmin_prefer_last(runs.iter().map(|r| r.as_ref().ok().map(|x| x.2)));
    let criteria: Vec<(f64, std::result::Result<f64, String>)> = config
        .bandwidths()
        .iter()
        .zip(&runs)
        .map(|(&nu, r)| (nu, r.as_ref().map(|x| x.2).map_err(|e| e.to_string())))
        .collect();
    let Some(k) = best else {
        return Err(Error::Selection(
            criteria
                .into_iter()
                .map(|(nu, r)| (nu, r.err().unwrap_or_default()))
                .collect(),
        ));
    };
    let bandwidth = config.bandwidths()[k];
    let (smoothed, estimate, _) = runs
        .into_iter()
        .nth(k)
        .expect("index in range")
        .expect("selected run succeeded");
    Ok(BandwidthSelection {
        bandwidth,
        smoothed,
        estimate,
        criteria,
    })
}
