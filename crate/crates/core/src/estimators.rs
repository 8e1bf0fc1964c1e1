//! Structural-expectation estimators.
//!
//! For strictly increasing curves `Y_i = f o h_i^{-1}` the inverse of the
//! structural expectation is estimated by averaging, over curves, the
//! sample time whose value is nearest to a given ordinate. The forward
//! estimate is the linear interpolant through the resulting step function.
//! Individual warps are estimated by matching each curve against a
//! reference curve `i0` on a common grid. Variances are plug-in second
//! moments minus squared means and feed pointwise normal bands.

use crate::curves::{
    nearest_index_sorted, CurveBundle, Grid, MonotoneInterpolant, SampledCurve, StepInverseEstimate,
};
use crate::error::{Error, Result};
use crate::stats::{mean, plug_in_variance, two_sided_critical};

const MODULE: &str = "estimators";

/// Monotonicity required of each input curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Monotonicity {
    #[default]
    Strict,
    /// Step-like curves such as empirical CDFs; flats resolve to the first index.
    NonDecreasing,
}

/// Inverse structural expectation: the full step function plus its values
/// and variance estimates at the requested ordinates.
#[derive(Clone, Debug)]
pub struct InverseSEResult {
    pub estimate: StepInverseEstimate,
    pub eval_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub variance: Vec<f64>,
    pub m: usize,
}

/// Estimate of `phi o h_{i0}^{-1}` at `eval_times`.
#[derive(Clone, Debug)]
pub struct WarpResult {
    pub i0: usize,
    pub eval_times: Vec<f64>,
    pub warp_values: Vec<f64>,
    pub variance: Vec<f64>,
    pub m: usize,
}

/// Pointwise band `center +/- u_{1-alpha/2} sqrt(variance / m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceBand {
    pub abscissae: Vec<f64>,
    pub center: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub variance: Vec<f64>,
    pub level: f64,
}

impl ConfidenceBand {
    pub fn from_variance(
        abscissae: &[f64],
        center: &[f64],
        variance: &[f64],
        m: usize,
        alpha: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if m < 2 {
            return Err(Error::InsufficientSample {
                module: MODULE,
                needed: 2,
                got: m,
            });
        }
        let z = two_sided_critical(alpha);
        let half: Vec<f64> = variance
            .iter()
            .map(|v| z * (v.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(ConfidenceBand {
            abscissae: abscissae.to_vec(),
            center: center.to_vec(),
            lower: center.iter().zip(&half).map(|(c, h)| c - h).collect(),
            upper: center.iter().zip(&half).map(|(c, h)| c + h).collect(),
            variance: variance.to_vec(),
            level: 1.0 - alpha,
        })
    }

    pub fn contains(&self, idx: usize, value: f64) -> bool {
        self.lower[idx] <= value && value <= self.upper[idx]
    }
}

fn check_monotone(bundle: &CurveBundle, mono: Monotonicity) -> Result<()> {
    for (i, c) in bundle.curves().iter().enumerate() {
        if c.is_constant() {
            return Err(Error::degenerate(MODULE, format!("curve {i} is constant")));
        }
        let ok = match mono {
            Monotonicity::Strict => c.is_strictly_increasing(),
            Monotonicity::NonDecreasing => c.is_nondecreasing(),
        };
        if !ok {
            return Err(Error::precondition(
                MODULE,
                format!(
                    "curve {i} is not {}",
                    match mono {
                        Monotonicity::Strict => "strictly increasing",
                        Monotonicity::NonDecreasing => "nondecreasing",
                    }
                ),
            ));
        }
    }
    Ok(())
}

/// `T_i(y)`: the time of the sample of `curve` whose value is nearest `y`.
fn nearest_time(curve: &SampledCurve, y: f64) -> f64 {
    curve.times()[nearest_index_sorted(curve.values(), y)]
}

/// Every observed value inside the common range, sorted and deduplicated.
pub fn default_ordinates(bundle: &CurveBundle) -> Vec<f64> {
    let (lo, hi) = bundle.common_range();
    let mut ys: Vec<f64> = bundle
        .curves()
        .iter()
        .flat_map(|c| c.values().iter().copied())
        .filter(|&y| y >= lo && y <= hi)
        .collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    ys
}

/// The step function `y -> (1/m) sum_i T_i(y)` over `[min Y, max Y]`.
///
/// For curve `i` the nearest sample switches from one distinct value to the
/// next at their midpoint; the jumps of the average are the union of all
/// such midpoints.
pub fn step_inverse(bundle: &CurveBundle, mono: Monotonicity) -> Result<StepInverseEstimate> {
    check_monotone(bundle, mono)?;
    let (v_min, v_max) = bundle.value_range();

    struct Track<'a> {
        times: &'a [f64],
        reps: Vec<usize>,
        mids: Vec<f64>,
        cursor: usize,
    }
    let mut tracks: Vec<Track> = bundle
        .curves()
        .iter()
        .map(|c| {
            let y = c.values();
            let reps: Vec<usize> = (0..y.len())
                .filter(|&j| j == 0 || y[j] != y[j - 1])
                .collect();
            let mids = reps.windows(2).map(|w| 0.5 * (y[w[0]] + y[w[1]])).collect();
            Track {
                times: c.times(),
                reps,
                mids,
                cursor: 0,
            }
        })
        .collect();

    let mut jumps: Vec<f64> = tracks
        .iter()
        .flat_map(|t| t.mids.iter().copied())
        .filter(|&v| v > v_min && v < v_max)
        .collect();
    jumps.sort_by(f64::total_cmp);
    jumps.dedup();

    let mut jump_values = Vec::with_capacity(jumps.len() + 2);
    jump_values.push(v_min);
    jump_values.extend_from_slice(&jumps);
    jump_values.push(v_max);

    let mut levels = Vec::with_capacity(jumps.len() + 1);
    let mut level_times = vec![0.0; tracks.len()];
    for &v in &jump_values[..jump_values.len() - 1] {
        for (slot, tr) in level_times.iter_mut().zip(tracks.iter_mut()) {
            while tr.cursor < tr.mids.len() && tr.mids[tr.cursor] <= v {
                tr.cursor += 1;
            }
            *slot = tr.times[tr.reps[tr.cursor]];
        }
        levels.push(mean(&level_times));
    }

    StepInverseEstimate::new(jump_values, levels)
        .map_err(|e| Error::degenerate(MODULE, format!("step inverse is not increasing: {e}")))
}

/// Inverse structural expectation of strictly increasing curves.
pub fn inverse_se(bundle: &CurveBundle, ys: &[f64]) -> Result<InverseSEResult> {
    inverse_se_with(bundle, ys, Monotonicity::Strict)
}

pub fn inverse_se_with(
    bundle: &CurveBundle,
    ys: &[f64],
    mono: Monotonicity,
) -> Result<InverseSEResult> {
    let estimate = step_inverse(bundle, mono)?;
    let (lo, hi) = bundle.common_range();
    let mut values = Vec::with_capacity(ys.len());
    let mut variance = Vec::with_capacity(ys.len());
    let mut ts = vec![0.0; bundle.m()];
    for &y in ys {
        if !(y >= lo && y <= hi) {
            return Err(Error::Domain { value: y, lo, hi });
        }
        for (t, c) in ts.iter_mut().zip(bundle.curves()) {
            *t = nearest_time(c, y);
        }
        values.push(mean(&ts));
        variance.push(plug_in_variance(&ts));
    }
    Ok(InverseSEResult {
        estimate,
        eval_grid: ys.to_vec(),
        values,
        variance,
        m: bundle.m(),
    })
}

/// Forward structural expectation: linear interpolation through `(u_k, v_k)`,
/// `k = 0..=K`, so that the value at `b` is the last jump `v_K`.
pub fn forward_se(inv: &InverseSEResult) -> Result<MonotoneInterpolant> {
    forward_from_step(&inv.estimate)
}

pub fn forward_from_step(step: &StepInverseEstimate) -> Result<MonotoneInterpolant> {
    if step.jumps() < 1 {
        return Err(Error::degenerate(
            MODULE,
            "inverse estimate has fewer than two distinct levels",
        ));
    }
    let knots = step
        .levels()
        .iter()
        .copied()
        .zip(step.jump_values().iter().copied())
        .collect();
    MonotoneInterpolant::new(knots)
}

/// Plug-in `var(G(y))`: `(1/m) sum T_i^2 - ((1/m) sum T_i)^2`, clamped at 0.
pub fn variance_inverse_se(bundle: &CurveBundle, ys: &[f64]) -> Result<Vec<f64>> {
    Ok(inverse_se(bundle, ys)?.variance)
}

pub fn band_inverse_se(result: &InverseSEResult, alpha: f64) -> Result<ConfidenceBand> {
    ConfidenceBand::from_variance(
        &result.eval_grid,
        &result.values,
        &result.variance,
        result.m,
        alpha,
    )
}

/// Warp estimate for reference curve `i0` on a common grid.
///
/// For each `t`, the reference value is `Y_{i0, j0(t)}` with `j0(t)` the
/// grid index nearest `t`; every other curve contributes the grid time of
/// its sample nearest that value. The estimate averages these times over
/// the `m - 1` other curves.
pub fn warp_estimate(bundle: &CurveBundle, i0: usize, ts: &[f64]) -> Result<WarpResult> {
    check_monotone(bundle, Monotonicity::Strict)?;
    let grid = bundle.require_common_grid(MODULE)?;
    let values: Vec<&[f64]> = bundle.curves().iter().map(|c| c.values()).collect();
    warp_scan(grid, &values, i0, ts)
}

/// Warp estimation core over nondecreasing value sequences sharing `grid`.
pub(crate) fn warp_scan(
    grid: &Grid,
    values: &[&[f64]],
    i0: usize,
    ts: &[f64],
) -> Result<WarpResult> {
    let m = values.len();
    if m < 2 {
        return Err(Error::InsufficientSample {
            module: MODULE,
            needed: 2,
            got: m,
        });
    }
    if i0 >= m {
        return Err(Error::InvalidInput(format!(
            "reference curve index {i0} out of range for {m} curves"
        )));
    }
    let (a, b) = (grid.a(), grid.b());
    let times = grid.points();
    let mut warp_values = Vec::with_capacity(ts.len());
    let mut variance = Vec::with_capacity(ts.len());
    let mut matched = Vec::with_capacity(m - 1);
    for &t in ts {
        if !(t >= a && t <= b) {
            return Err(Error::Domain {
                value: t,
                lo: a,
                hi: b,
            });
        }
        let target = values[i0][grid.nearest_index(t)];
        matched.clear();
        matched.extend(
            values
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != i0)
                .map(|(_, ys)| times[nearest_index_sorted(ys, target)]),
        );
        warp_values.push(mean(&matched));
        variance.push(plug_in_variance(&matched));
    }
    Ok(WarpResult {
        i0,
        eval_times: ts.to_vec(),
        warp_values,
        variance,
        m,
    })
}

/// Plug-in `var(Z(t))` over the `m - 1` matched times, clamped at 0.
pub fn variance_warp(bundle: &CurveBundle, i0: usize, ts: &[f64]) -> Result<Vec<f64>> {
    Ok(warp_estimate(bundle, i0, ts)?.variance)
}

pub fn band_warp(result: &WarpResult, alpha: f64) -> Result<ConfidenceBand> {
    ConfidenceBand::from_variance(
        &result.eval_times,
        &result.warp_values,
        &result.variance,
        result.m,
        alpha,
    )
}

/// Continuous-model estimator `(1/m) sum_i f_i^{-1}(y)` from analytic inverses.
///
/// The discrete estimator stays within one grid gap of this average.
pub fn oracle_inverse_se_continuous<F>(inverses: &[F], ys: &[f64]) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    ys.iter()
        .map(|&y| inverses.iter().map(|f| f(y)).sum::<f64>() / inverses.len() as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{eval_step_inverse, nearest_index};
    use proptest::prelude::*;

    fn grid3() -> Grid {
        Grid::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    fn two_curve_bundle() -> CurveBundle {
        CurveBundle::from_values(&grid3(), vec![vec![0.0, 0.25, 1.0], vec![0.0, 0.75, 1.0]])
            .unwrap()
    }

    /// Brute-force average of nearest-value times by exhaustive scan.
    fn brute_inverse(bundle: &CurveBundle, y: f64) -> f64 {
        let m = bundle.m() as f64;
        bundle
            .curves()
            .iter()
            .map(|c| c.times()[nearest_index(c.values(), y).unwrap()])
            .sum::<f64>()
            / m
    }

    #[test]
    fn inverse_identity_curve() {
        let b = CurveBundle::from_values(&grid3(), vec![vec![0.0, 0.5, 1.0]]).unwrap();
        let r = inverse_se(&b, &[0.5]).unwrap();
        assert_eq!(r.values, vec![0.5]);
        assert_eq!(r.variance, vec![0.0]);
    }

    #[test]
    fn inverse_two_curves() {
        let b = two_curve_bundle();
        assert_eq!(brute_inverse(&b, 0.5), 0.5);
        let r = inverse_se(&b, &[0.5]).unwrap();
        assert_eq!(r.values, vec![0.5]);
        assert_eq!(r.variance, vec![0.0]);
        assert_eq!(eval_step_inverse(&r.estimate, 0.5).unwrap(), 0.5);

        // jumps at the per-curve midpoints 0.125, 0.375, 0.625, 0.875
        assert_eq!(
            r.estimate.jump_values(),
            &[0.0, 0.125, 0.375, 0.625, 0.875, 1.0]
        );
        assert_eq!(r.estimate.levels(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(eval_step_inverse(&r.estimate, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn inverse_rejects_bad_input() {
        let b = CurveBundle::from_values(&grid3(), vec![vec![0.0, 1.0, 0.5]]).unwrap();
        assert!(matches!(
            inverse_se(&b, &[0.5]),
            Err(Error::Precondition { .. })
        ));
        let b = CurveBundle::from_values(&grid3(), vec![vec![0.0, 0.5, 1.0], vec![0.2, 0.5, 0.9]])
            .unwrap();
        assert!(matches!(inverse_se(&b, &[0.1]), Err(Error::Domain { .. })));
        assert!(matches!(inverse_se(&b, &[0.95]), Err(Error::Domain { .. })));
        let b = CurveBundle::from_values(&grid3(), vec![vec![0.3, 0.3, 0.3]]).unwrap();
        assert!(matches!(
            inverse_se_with(&b, &[0.3], Monotonicity::NonDecreasing),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn forward_examples() {
        let step = StepInverseEstimate::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.5, 1.0]).unwrap();
        let f = forward_from_step(&step).unwrap();
        assert_eq!(f.eval(0.25).unwrap(), 0.5);
        // value at b is v_K, not the maximum observed value
        assert_eq!(f.eval(1.0).unwrap(), 2.0);

        let single = StepInverseEstimate::new(vec![0.0, 1.0], vec![0.0]).unwrap();
        assert!(matches!(
            forward_from_step(&single),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn forward_identity_within_one_gap() {
        let n = 50;
        let g = Grid::equispaced(0.0, 1.0, n).unwrap();
        let b = CurveBundle::from_values(&g, vec![g.points().to_vec()]).unwrap();
        let r = inverse_se(&b, &default_ordinates(&b)).unwrap();
        let f = forward_se(&r).unwrap();
        for &t in g.points() {
            assert!((f.eval(t).unwrap() - t).abs() <= 1.0 / n as f64);
        }
    }

    #[test]
    fn forward_round_trips_knot_values() {
        let r = inverse_se(&two_curve_bundle(), &[0.5]).unwrap();
        let f = forward_se(&r).unwrap();
        let step = &r.estimate;
        for k in 0..=step.jumps() {
            let v = step.jump_values()[k];
            let u = eval_step_inverse(step, v).unwrap();
            assert_eq!(u, step.levels()[k]);
            assert_eq!(f.eval(u).unwrap(), v);
        }
    }

    #[test]
    fn band_examples() {
        let b = ConfidenceBand::from_variance(&[0.0], &[0.3], &[1.0], 100, 0.05).unwrap();
        assert!((b.upper[0] - b.center[0] - 0.195_996_4).abs() < 1e-7);
        let b = ConfidenceBand::from_variance(&[0.0], &[0.3], &[4.0], 100, 0.05).unwrap();
        assert!((b.upper[0] - 0.3 - 0.391_992_8).abs() < 1e-7);
        let b = ConfidenceBand::from_variance(&[0.0], &[0.3], &[1.0], 100, 0.32).unwrap();
        assert!((b.upper[0] - 0.3 - 0.099_445_8).abs() < 1e-7);
        let b = ConfidenceBand::from_variance(&[0.0], &[0.3], &[0.0], 10, 0.05).unwrap();
        assert_eq!((b.lower[0], b.upper[0]), (0.3, 0.3));
        assert!(ConfidenceBand::from_variance(&[0.0], &[0.3], &[1.0], 1, 0.05).is_err());
        assert!(ConfidenceBand::from_variance(&[0.0], &[0.3], &[1.0], 10, 1.0).is_err());
    }

    #[test]
    fn band_for_single_curve_is_rejected() {
        let b = CurveBundle::from_values(&grid3(), vec![vec![0.0, 0.5, 1.0]]).unwrap();
        let r = inverse_se(&b, &[0.5]).unwrap();
        assert!(matches!(
            band_inverse_se(&r, 0.05),
            Err(Error::InsufficientSample { .. })
        ));
    }

    #[test]
    fn warp_identical_curves_is_nearest_grid_time() {
        let n = 20;
        let g = Grid::equispaced(0.0, 1.0, n).unwrap();
        let y: Vec<f64> = g.points().iter().map(|t| t * t + t).collect();
        let b = CurveBundle::from_values(&g, vec![y.clone(), y.clone(), y]).unwrap();
        let ts: Vec<f64> = (0..=97).map(|k| k as f64 / 97.0).collect();
        let r = warp_estimate(&b, 1, &ts).unwrap();
        for (t, w) in ts.iter().zip(&r.warp_values) {
            assert!((w - t).abs() <= 1.0 / n as f64);
        }
        assert!(r.variance.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn warp_two_curves_matches_exhaustive_scan() {
        let g = Grid::equispaced(0.0, 1.0, 10).unwrap();
        let y1: Vec<f64> = g.points().iter().map(|t| t.powi(2)).collect();
        let y2: Vec<f64> = g.points().iter().map(|t| t.sqrt()).collect();
        let b = CurveBundle::from_values(&g, vec![y1.clone(), y2.clone()]).unwrap();
        let ts = g.points().to_vec();
        let r = warp_estimate(&b, 0, &ts).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let j0 = nearest_index(g.points(), t).unwrap();
            let want = g.points()[nearest_index(&y2, y1[j0]).unwrap()];
            assert_eq!(r.warp_values[k], want);
            // a single other curve has no dispersion
            assert_eq!(r.variance[k], 0.0);
        }
    }

    #[test]
    fn warp_variance_hand_computation() {
        let g = Grid::equispaced(0.0, 1.0, 4).unwrap();
        // reference, then two curves whose nearest samples to Y_0(0.5)=0.5
        // sit at t = 0.25 and t = 0.75
        let b = CurveBundle::from_values(
            &g,
            vec![
                vec![0.0, 0.25, 0.5, 0.75, 1.0],
                vec![0.0, 0.5, 0.6, 0.8, 1.0],
                vec![0.0, 0.1, 0.2, 0.5, 1.0],
            ],
        )
        .unwrap();
        let r = warp_estimate(&b, 0, &[0.5]).unwrap();
        assert_eq!(r.warp_values, vec![0.5]);
        // ((0.25^2 + 0.75^2) / 2) - 0.5^2
        assert!((r.variance[0] - 0.0625).abs() < 1e-15);
        let band = band_warp(&r, 0.05).unwrap();
        assert!(band.contains(0, 0.5));
    }

    #[test]
    fn warp_errors() {
        let g = Grid::equispaced(0.0, 1.0, 4).unwrap();
        let y = g.points().to_vec();
        let one = CurveBundle::from_values(&g, vec![y.clone()]).unwrap();
        assert!(matches!(
            warp_estimate(&one, 0, &[0.5]),
            Err(Error::InsufficientSample { .. })
        ));
        let two = CurveBundle::from_values(&g, vec![y.clone(), y.clone()]).unwrap();
        assert!(matches!(
            warp_estimate(&two, 2, &[0.5]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            warp_estimate(&two, 0, &[1.5]),
            Err(Error::Domain { .. })
        ));
        let c1 = SampledCurve::new(g.clone(), y.clone()).unwrap();
        let g2 = Grid::new(vec![0.0, 0.1, 0.5, 0.9, 1.0]).unwrap();
        let c2 = SampledCurve::new(g2, y).unwrap();
        let irregular = CurveBundle::new(vec![c1, c2]).unwrap();
        assert!(matches!(
            warp_estimate(&irregular, 0, &[0.5]),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn warp_endpoints_pinned() {
        let g = Grid::equispaced(0.0, 1.0, 30).unwrap();
        let curves: Vec<Vec<f64>> = [1.0, 1.5, 2.0, 3.0]
            .iter()
            .map(|p| g.points().iter().map(|t: &f64| t.powf(*p)).collect())
            .collect();
        let b = CurveBundle::from_values(&g, curves).unwrap();
        let r = warp_estimate(&b, 2, &[0.0, 1.0]).unwrap();
        assert_eq!(r.warp_values, vec![0.0, 1.0]);
        assert_eq!(r.variance, vec![0.0, 0.0]);
    }

    #[test]
    fn continuous_oracle_examples() {
        let id = |y: f64| y;
        assert_eq!(oracle_inverse_se_continuous(&[id], &[0.3]), vec![0.3]);
        let fs: Vec<Box<dyn Fn(f64) -> f64>> = vec![Box::new(|y| y), Box::new(|y| y * y)];
        assert_eq!(oracle_inverse_se_continuous(&fs, &[0.5]), vec![0.375]);
    }

    fn power_bundle(powers: &[f64], n: usize) -> CurveBundle {
        let g = Grid::equispaced(0.0, 1.0, n).unwrap();
        let curves = powers
            .iter()
            .map(|p| g.points().iter().map(|t| t.powf(*p)).collect())
            .collect();
        CurveBundle::from_values(&g, curves).unwrap()
    }

    proptest! {
        #[test]
        fn sandwich_against_continuous_oracle(
            powers in prop::collection::vec(0.3f64..3.0, 1..8),
            n in 5usize..60,
            ys in prop::collection::vec(0.0f64..=1.0, 1..20),
        ) {
            // curve i is t^p, so its inverse is y^(1/p)
            let b = power_bundle(&powers, n);
            let inverses: Vec<Box<dyn Fn(f64) -> f64>> = powers
                .iter()
                .map(|&p| Box::new(move |y: f64| y.powf(1.0 / p)) as Box<dyn Fn(f64) -> f64>)
                .collect();
            let est = inverse_se(&b, &ys).unwrap();
            let oracle = oracle_inverse_se_continuous(&inverses, &ys);
            for (e, o) in est.values.iter().zip(&oracle) {
                prop_assert!((e - o).abs() <= 1.0 / n as f64);
            }
        }

        #[test]
        fn inverse_is_monotone_and_in_range(
            powers in prop::collection::vec(0.3f64..3.0, 1..6),
            n in 3usize..40,
        ) {
            let b = power_bundle(&powers, n);
            let ys = default_ordinates(&b);
            let r = inverse_se(&b, &ys).unwrap();
            prop_assert!(r.values.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(r.values.iter().all(|&u| (0.0..=1.0).contains(&u)));
            prop_assert!(r.variance.iter().all(|&v| v >= 0.0));
            // the step structure agrees with direct evaluation off the jumps
            for (&y, &v) in ys.iter().zip(&r.values) {
                if !r.estimate.jump_values().contains(&y) {
                    prop_assert_eq!(eval_step_inverse(&r.estimate, y).unwrap(), v);
                }
            }
            prop_assert_eq!(r.estimate.levels()[0], 0.0);
            prop_assert_eq!(*r.estimate.levels().last().unwrap(), 1.0);
            let f = forward_se(&r).unwrap();
            let kv = f.knot_values();
            prop_assert!(kv.windows(2).all(|w| w[1] > w[0]));
        }

        #[test]
        fn identical_curves_have_zero_variance(p in 0.3f64..3.0, m in 1usize..6, n in 3usize..30) {
            let b = power_bundle(&vec![p; m], n);
            let ys = default_ordinates(&b);
            prop_assert!(variance_inverse_se(&b, &ys).unwrap().iter().all(|&v| v == 0.0));
        }
    }
}
