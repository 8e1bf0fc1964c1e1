//! Monte Carlo experiments checking the estimators against known truth.
//!
//! Every experiment is seeded: replication `r` draws from
//! [`derive_seed`]`(seed, r)`, replications run in parallel and results are
//! reduced in replication order, so a summary depends only on its inputs.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curves::{CurveBundle, Grid, SampledCurve, ABS_TOL};
use crate::equity::homogeneity_test;
use crate::error::{Error, Result};
use crate::estimators::{
    band_inverse_se, band_warp, default_ordinates, inverse_se, oracle_inverse_se_continuous,
    warp_estimate,
};
use crate::io::SummaryRow;
use crate::monotonize::{
    monotonize_discrete, monotonize_exact, warp_estimate_nonmonotone, ChangePointSet,
};
use crate::pipeline::structural_estimate;
use crate::simulate::{
    derive_seed, make_bundle, simulate_warps, test_function_f, test_function_g,
    test_function_g_change_points, WarpSample, WarpSimConfig,
};
use crate::smooth::{select_bandwidth, smooth_bundle, SmoothingConfig};
use crate::stats::chi_square_cdf;

const EPS: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Sandwich,
    Decay,
    Coverage,
    Chisq,
    Centering,
    Spread,
    Monotonize,
    Denoise,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Sandwich,
        Suite::Decay,
        Suite::Coverage,
        Suite::Chisq,
        Suite::Centering,
        Suite::Spread,
        Suite::Monotonize,
        Suite::Denoise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sandwich => "sandwich",
            Suite::Decay => "decay",
            Suite::Coverage => "coverage",
            Suite::Chisq => "chisq",
            Suite::Centering => "centering",
            Suite::Spread => "spread",
            Suite::Monotonize => "monotonize",
            Suite::Denoise => "denoise",
        }
    }

    pub fn default_replications(self) -> usize {
        match self {
            Suite::Sandwich => 50,
            Suite::Decay => 10,
            Suite::Coverage => 200,
            Suite::Chisq => 2000,
            Suite::Centering => 500,
            Suite::Spread => 10,
            Suite::Monotonize => 1,
            Suite::Denoise => 20,
        }
    }

    pub fn run(self, replications: Option<usize>, seed: u64) -> Result<Vec<SummaryRow>> {
        let reps = replications.unwrap_or(self.default_replications());
        if reps == 0 {
            return Err(Error::InvalidInput(
                "replications must be at least 1".into(),
            ));
        }
        match self {
            Suite::Sandwich => sandwich(reps, seed),
            Suite::Decay => decay(reps, seed),
            Suite::Coverage => coverage(reps, seed),
            Suite::Chisq => chisq(reps, seed),
            Suite::Centering => centering(reps, seed),
            Suite::Spread => spread(reps, seed),
            Suite::Monotonize => monotonize_convergence(reps, seed),
            Suite::Denoise => denoise(reps, seed),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite `{s}`")))
    }
}

fn row(
    experiment: &str,
    metric: impl Into<String>,
    value: f64,
    threshold: impl Into<String>,
    pass: bool,
) -> SummaryRow {
    SummaryRow {
        experiment: experiment.to_string(),
        metric: metric.into(),
        value,
        threshold: threshold.into(),
        pass,
    }
}

fn info(experiment: &str, metric: impl Into<String>, value: f64) -> SummaryRow {
    row(experiment, metric, value, "-", true)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn warps(m: usize, iterations: usize, n: usize, seed: u64) -> Result<Vec<WarpSample>> {
    simulate_warps(&WarpSimConfig {
        m,
        iterations,
        eps: EPS,
        seed,
        n,
    })
}

fn sup_error(curve: &SampledCurve, truth: impl Fn(f64) -> f64) -> f64 {
    curve
        .times()
        .iter()
        .zip(curve.values())
        .map(|(&t, &v)| (v - truth(t)).abs())
        .fold(0.0, f64::max)
}

fn mean_abs_error(curve: &SampledCurve, truth: impl Fn(f64) -> f64) -> f64 {
    curve
        .times()
        .iter()
        .zip(curve.values())
        .map(|(&t, &v)| (v - truth(t)).abs())
        .sum::<f64>()
        / curve.len() as f64
}

/// Increasing test shapes on `[0, 1]` with closed-form inverses.
#[derive(Clone, Copy, Debug)]
enum Shape {
    Power(f64),
    Exp(f64),
}

impl Shape {
    fn eval(self, t: f64) -> f64 {
        match self {
            Shape::Power(p) => t.powf(p),
            Shape::Exp(c) => (c * t).exp_m1() / c.exp_m1(),
        }
    }

    fn inverse(self, y: f64) -> f64 {
        match self {
            Shape::Power(p) => y.powf(1.0 / p),
            Shape::Exp(c) => (y * c.exp_m1()).ln_1p() / c,
        }
    }
}

/// Largest excess of `|inverse_se - continuous oracle|` over `1/n`, across
/// random bundles with invertible shapes and simulated warps.
pub fn sandwich(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let excess: Vec<(f64, usize)> = (0..reps)
        .into_par_iter()
        .map(|r| -> Result<(f64, usize)> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
            let m = rng.random_range(2..=20);
            let n = if rng.random_bool(0.5) { 50 } else { 100 };
            let shape = if rng.random_bool(0.5) {
                Shape::Power(rng.random_range(0.4..3.0))
            } else {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                Shape::Exp(sign * rng.random_range(0.5..4.0))
            };
            let h = warps(m, 300, n, rng.random())?;
            let bundle = make_bundle(|t| shape.eval(t), &h, n, 0.0, 0)?;
            let (lo, hi) = bundle.common_range();
            let mut ys = default_ordinates(&bundle);
            ys.extend((0..=200).map(|k| lo + (hi - lo) * k as f64 / 200.0));
            let est = inverse_se(&bundle, &ys)?;
            let inverses: Vec<_> = h
                .iter()
                .map(|w| move |y: f64| w.eval(shape.inverse(y)))
                .collect();
            let oracle = oracle_inverse_se_continuous(&inverses, &ys);
            let bound = 1.0 / n as f64;
            let worst = est
                .values
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).abs() - bound)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((worst, ys.len()))
        })
        .collect::<Result<_>>()?;
    let worst = excess.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    let points: usize = excess.iter().map(|e| e.1).sum();
    Ok(vec![
        info("sandwich", "bundles", reps as f64),
        info("sandwich", "evaluated_ordinates", points as f64),
        row(
            "sandwich",
            "max_excess_over_1/n",
            worst,
            "<= 1e-12",
            worst <= ABS_TOL,
        ),
    ])
}

/// Median sup-norm errors of the structural and warp estimates at `m = 10`
/// and `m = 100` (`N = 300`, `n = 100`).
pub fn decay(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let n = 100;
    let per_m = |m: usize, stream: u64| -> Result<(Vec<f64>, Vec<f64>)> {
        let errs: Vec<(f64, f64)> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let s = derive_seed(derive_seed(seed, stream), r as u64);
                let h = warps(m, 300, n, s)?;
                let bundle = make_bundle(test_function_f, &h, n, 0.0, 0)?;
                let se = structural_estimate(&bundle)?;
                let grid = bundle.common_grid().expect("simulated grid");
                let w = warp_estimate(&bundle, 0, grid.points())?;
                let warp_err = w
                    .eval_times
                    .iter()
                    .zip(&w.warp_values)
                    .map(|(&t, &v)| (v - h[0].inverse(t)).abs())
                    .fold(0.0, f64::max);
                Ok((sup_error(&se.curve, test_function_f), warp_err))
            })
            .collect::<Result<_>>()?;
        Ok(errs.into_iter().unzip())
    };
    let (se10, w10) = per_m(10, 10)?;
    let (se100, w100) = per_m(100, 100)?;
    let (se10, se100, w10, w100) = (median(se10), median(se100), median(w10), median(w100));
    Ok(vec![
        info("decay", "se_median_sup_error_m10", se10),
        row(
            "decay",
            "se_median_sup_error_m100",
            se100,
            format!("< {se10}"),
            se100 < se10,
        ),
        info("decay", "warp_median_sup_error_m10", w10),
        row(
            "decay",
            "warp_median_sup_error_m100",
            w100,
            format!("< {w10}"),
            w100 < w10,
        ),
    ])
}

/// Empirical coverage of the 95% pointwise bands for the inverse structural
/// expectation at `y = f(1/2)` and for the warp of curve 0 at `t = 1/2`.
pub fn coverage(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let (m, n) = (50, 100);
    let hits: Vec<(bool, bool)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let h = warps(m, 300, n, derive_seed(seed, r as u64))?;
            let bundle = make_bundle(test_function_f, &h, n, 0.0, 0)?;
            let inv = inverse_se(&bundle, &[test_function_f(0.5)])?;
            let inv_hit = band_inverse_se(&inv, 0.05)?.contains(0, 0.5);
            let w = warp_estimate(&bundle, 0, &[0.5])?;
            let warp_hit = band_warp(&w, 0.05)?.contains(0, h[0].inverse(0.5));
            Ok((inv_hit, warp_hit))
        })
        .collect::<Result<_>>()?;
    let rate = |sel: fn(&(bool, bool)) -> bool| {
        hits.iter().filter(|h| sel(h)).count() as f64 / reps as f64
    };
    let (inv, warp) = (rate(|h| h.0), rate(|h| h.1));
    let ok = |c: f64| (0.88..=0.99).contains(&c);
    Ok(vec![
        row(
            "coverage",
            "inverse_se_coverage",
            inv,
            "[0.88, 0.99]",
            ok(inv),
        ),
        row("coverage", "warp_coverage", warp, "[0.88, 0.99]", ok(warp)),
    ])
}

/// Bin probabilities of the common score distribution used under H0; the
/// smallest is above 0.03 so every bin is populated at 400 draws.
pub fn calibration_distribution() -> Vec<f64> {
    let w: Vec<f64> = (0..=20).map(|k| f64::from(k + 20)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Homogeneity statistic under H0 (two groups of 200 draws from one 21-bin
/// law) against its chi-square reference, plus the identical-sample case.
pub fn chisq(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let law = WeightedIndex::new(calibration_distribution()).expect("valid weights");
    let draws: Vec<(f64, usize)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
            let mut sample =
                || -> Vec<u32> { (0..200).map(|_| law.sample(&mut rng) as u32).collect() };
            let (a, b) = (sample(), sample());
            let res = homogeneity_test(&a, &b)?;
            Ok((res.statistic, res.df))
        })
        .collect::<Result<_>>()?;
    let mut sorted = draws.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let stats: Vec<f64> = sorted.iter().map(|d| d.0).collect();
    // Reference: the mixture of chi-square laws over the realised dfs.
    let dfs: Vec<usize> = draws.iter().map(|d| d.1).collect();
    let reference =
        |x: f64| dfs.iter().map(|&df| chi_square_cdf(x, df)).sum::<f64>() / dfs.len() as f64;
    let ks = ks_distance(&stats, reference);

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let same: Vec<u32> = (0..200).map(|_| law.sample(&mut rng) as u32).collect();
    let d_same = homogeneity_test(&same, &same)?.statistic;
    let mean_df = dfs.iter().sum::<usize>() as f64 / dfs.len() as f64;
    Ok(vec![
        row(
            "chisq",
            "identical_samples_D_n",
            d_same,
            "== 0",
            d_same == 0.0,
        ),
        info("chisq", "mean_df", mean_df),
        row("chisq", "ks_distance", ks, "<= 0.08", ks <= 0.08),
    ])
}

/// Mean of simulated `H(t)` over `reps` runs of 30 warps with `N = 300`.
pub fn centering(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let ts = [0.25, 0.5, 0.75];
    let sums: Vec<[f64; 3]> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let h = warps(30, 300, 100, derive_seed(seed, r as u64))?;
            let mut s = [0.0; 3];
            for w in &h {
                for (acc, &t) in s.iter_mut().zip(&ts) {
                    *acc += w.eval(t);
                }
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let count = (reps * 30) as f64;
    Ok(ts
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mean = sums.iter().map(|s| s[k]).sum::<f64>() / count;
            let bias = (mean - t).abs();
            row(
                "centering",
                format!("abs_bias_t{t}"),
                bias,
                "<= 0.02",
                bias <= 0.02,
            )
        })
        .collect())
}

/// Range of `H(0.2)` pooled over `runs` independent sets of 30 warps with
/// the full `N = 3000` iterations.
pub fn spread(runs: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let values: Vec<Vec<f64>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let h = warps(30, 3000, 100, derive_seed(seed, r as u64))?;
            Ok(h.iter().map(|w| w.eval(0.2)).collect())
        })
        .collect::<Result<_>>()?;
    let all: Vec<f64> = values.into_iter().flatten().collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        info("spread", "warps", all.len() as f64),
        row("spread", "min_h_t0.2", lo, "<= 0.08", lo <= 0.08),
        row("spread", "max_h_t0.2", hi, ">= 0.32", hi >= 0.32),
    ])
}

/// Change-point structure of `g`: alternating extrema starting decreasing.
pub fn g_change_points() -> ChangePointSet {
    let mut times = vec![0.0];
    times.extend(test_function_g_change_points());
    times.push(1.0);
    let directions = (0..times.len() - 1)
        .map(|k| if k % 2 == 0 { -1 } else { 1 })
        .collect();
    ChangePointSet::new(times, directions).expect("g has alternating extrema")
}

pub const MONOTONIZE_GRID_SIZES: [usize; 4] = [50, 100, 200, 400];

/// Median over curves of `|Z~(1/2) - Z(1/2)|` for g-bundles sampled at
/// increasing `n`, with the exact transform `Z = G(H^{-1}(t), g)`; warps are
/// shared across `n`. Also checks that warp estimates from the discrete and
/// exact transforms coincide on integer-valued curves with change points on
/// the grid.
pub fn monotonize_convergence(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let cps = g_change_points();
    let sets: Vec<Vec<WarpSample>> = (0..reps)
        .into_par_iter()
        .map(|r| warps(30, 300, 100, derive_seed(seed, r as u64)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for n in MONOTONIZE_GRID_SIZES {
        let mut errs = Vec::new();
        for h in &sets {
            let bundle = make_bundle(test_function_g, h, n, 0.0, 0)?;
            for (i, c) in bundle.curves().iter().enumerate() {
                let z = monotonize_discrete(c, i).z_values[n / 2];
                let exact = monotonize_exact(test_function_g, &cps, h[i].inverse(0.5))?;
                errs.push((z - exact).abs());
            }
        }
        let med = median(errs);
        rows.push(info("monotonize", format!("median_abs_error_n{n}"), med));
        medians.push(med);
    }
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    rows.push(row(
        "monotonize",
        "median_error_strictly_decreasing",
        if decreasing { 1.0 } else { 0.0 },
        "== 1",
        decreasing,
    ));
    let mismatches = exactness_mismatches(50, derive_seed(seed, u64::MAX))?;
    rows.push(row(
        "monotonize",
        "warp_mismatches_discrete_vs_exact",
        mismatches as f64,
        "== 0",
        mismatches == 0,
    ));
    Ok(rows)
}

/// A random integer-valued piecewise-monotone curve on `0..=n / n` with
/// change points on the grid, together with its change-point set.
pub fn integer_zigzag<R: Rng>(rng: &mut R, n: usize) -> (Vec<f64>, ChangePointSet) {
    let mut values = vec![f64::from(rng.random_range(-5..=5))];
    let mut times = vec![0.0];
    let mut directions = Vec::new();
    let mut dir: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
    let mut j = 0;
    while j < n {
        let run = rng.random_range(1..=8).min(n - j);
        for _ in 0..run {
            let step = f64::from(rng.random_range(1..=4)) * f64::from(dir);
            values.push(values.last().expect("seeded") + step);
        }
        j += run;
        directions.push(dir);
        times.push(j as f64 / n as f64);
        dir = -dir;
    }
    *times.last_mut().expect("non-empty") = 1.0;
    (
        values,
        ChangePointSet::new(times, directions).expect("alternating by construction"),
    )
}

/// Number of `(bundle, t)` pairs where the warp estimate from the discrete
/// transform differs from the one computed on exactly transformed curves.
pub fn exactness_mismatches(reps: usize, seed: u64) -> Result<usize> {
    let counts: Vec<usize> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
            let n = rng.random_range(10..=60);
            let m = rng.random_range(2..=8);
            let grid = Grid::equispaced(0.0, 1.0, n)?;
            let (raw, cps): (Vec<Vec<f64>>, Vec<ChangePointSet>) =
                (0..m).map(|_| integer_zigzag(&mut rng, n)).unzip();
            let bundle = CurveBundle::from_values(&grid, raw)?;
            let exact = bundle
                .curves()
                .iter()
                .zip(&cps)
                .map(|(c, cp)| {
                    grid.points()
                        .iter()
                        .map(|&t| monotonize_exact(|s| c.interpolate(s), cp, t))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let exact = CurveBundle::from_values(&grid, exact)?;
            let i0 = rng.random_range(0..m);
            let a = warp_estimate_nonmonotone(&bundle, i0, grid.points())?;
            let b = warp_estimate(&exact, i0, grid.points())?;
            Ok(a.warp_values
                .iter()
                .zip(&b.warp_values)
                .filter(|(x, y)| x != y)
                .count())
        })
        .collect::<Result<_>>()?;
    Ok(counts.into_iter().sum())
}

/// Per-replication outcome of the denoising experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct DenoiseOutcome {
    pub bandwidth: f64,
    pub l1_selected: f64,
    pub l1_unsmoothed: f64,
    pub sup_selected: f64,
    pub sup_smallest: f64,
    pub sup_largest: f64,
}

pub const DENOISE_SIGMA: f64 = 0.05;

/// One noisy g-bundle (`m = 30`, `n = 100`, `N = 3000`) compared against
/// the true g with and without bandwidth selection.
pub fn denoise_replication(seed: u64) -> Result<DenoiseOutcome> {
    let n = 100;
    let h = warps(30, 3000, n, seed)?;
    let bundle = make_bundle(test_function_g, &h, n, DENOISE_SIGMA, derive_seed(seed, 1))?;
    let grid = bundle.common_grid().expect("simulated grid").clone();
    let config = SmoothingConfig::default_for(&grid)?;
    let selected = select_bandwidth(&bundle, &config)?;
    let raw = structural_estimate(&bundle)?;
    let at = |nu: f64| -> Result<f64> {
        let est = structural_estimate(&smooth_bundle(&bundle, nu)?)?;
        Ok(sup_error(&est.curve, test_function_g))
    };
    let bw = config.bandwidths();
    Ok(DenoiseOutcome {
        bandwidth: selected.bandwidth,
        l1_selected: mean_abs_error(&selected.estimate.curve, test_function_g),
        l1_unsmoothed: mean_abs_error(&raw.curve, test_function_g),
        sup_selected: sup_error(&selected.estimate.curve, test_function_g),
        sup_smallest: at(bw[0])?,
        sup_largest: at(bw[bw.len() - 1])?,
    })
}

/// Denoising benefit over `reps` seeded noisy g-bundles.
pub fn denoise(reps: usize, seed: u64) -> Result<Vec<SummaryRow>> {
    let outcomes: Vec<DenoiseOutcome> = (0..reps)
        .into_par_iter()
        .map(|r| denoise_replication(derive_seed(seed, r as u64)))
        .collect::<Result<_>>()?;
    let wins = outcomes
        .iter()
        .filter(|o| o.l1_selected < o.l1_unsmoothed)
        .count();
    let beats = outcomes
        .iter()
        .filter(|o| o.sup_selected < o.sup_smallest && o.sup_selected < o.sup_largest)
        .count();
    let need_wins = (reps * 3).div_ceil(4);
    Ok(vec![
        info(
            "denoise",
            "median_selected_bandwidth",
            median(outcomes.iter().map(|o| o.bandwidth).collect()),
        ),
        info(
            "denoise",
            "median_l1_selected",
            median(outcomes.iter().map(|o| o.l1_selected).collect()),
        ),
        info(
            "denoise",
            "median_l1_unsmoothed",
            median(outcomes.iter().map(|o| o.l1_unsmoothed).collect()),
        ),
        row(
            "denoise",
            "wins_vs_unsmoothed",
            wins as f64,
            format!(">= {need_wins}"),
            wins >= need_wins,
        ),
        row(
            "denoise",
            "selected_beats_extremes",
            beats as f64,
            format!("> {}", reps / 2),
            beats > reps / 2,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ks_distance_examples() {
        assert!((ks_distance(&[0.5], |x| x) - 0.5).abs() < 1e-15);
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_distance(&xs, |x| x) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn calibration_law_is_valid() {
        let p = calibration_distribution();
        assert_eq!(p.len(), 21);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.03));
    }

    #[test]
    fn zigzag_change_points_match_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (v, cps) = integer_zigzag(&mut rng, 30);
            assert_eq!(v.len(), 31);
            let t = cps.times();
            for (k, &d) in cps.directions().iter().enumerate() {
                let (j0, j1) = (
                    (t[k] * 30.0).round() as usize,
                    (t[k + 1] * 30.0).round() as usize,
                );
                for j in j0..j1 {
                    assert_eq!((v[j + 1] - v[j]).signum() as i8, d);
                }
            }
        }
    }

    #[test]
    fn g_change_point_directions() {
        let cps = g_change_points();
        assert_eq!(cps.directions(), &[-1, 1, -1, 1, -1, 1]);
        assert!((cps.interior()[0] * 6.0 * std::f64::consts::PI - 4.493409457909).abs() < 1e-9);
    }

    #[test]
    fn small_runs_are_deterministic() {
        let a = Suite::Coverage.run(Some(4), 9).unwrap();
        let b = Suite::Coverage.run(Some(4), 9).unwrap();
        assert_eq!(a, b);
    }
}
