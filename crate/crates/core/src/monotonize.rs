//! Monotonizing transform for piecewise-monotone curves.
//!
//! Accumulating absolute variation turns `f o h^{-1}` into `G(f) o h^{-1}`
//! with `G(f)` increasing, so warps estimated from the transformed curves
//! are warps of the original ones.

use crate::curves::{nearest_index_sorted, CurveBundle, Grid, SampledCurve};
use crate::error::{Error, Result};
use crate::estimators::{warp_scan, WarpResult};

const MODULE: &str = "monotonize";

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonizedCurve {
    pub grid: Grid,
    pub z_values: Vec<f64>,
    pub source_id: usize,
}

impl MonotonizedCurve {
    pub fn to_curve(&self) -> SampledCurve {
        SampledCurve::new(self.grid.clone(), self.z_values.clone())
            .expect("monotonized values are finite and match the grid")
    }
}

/// Variational change points `a = s_0 < ... < s_{r+1} = b` and the
/// direction (+1 increasing, -1 decreasing) on each of the `r + 1` pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangePointSet {
    times: Vec<f64>,
    directions: Vec<i8>,
}

impl ChangePointSet {
    pub fn new(times: Vec<f64>, directions: Vec<i8>) -> Result<Self> {
        if times.len() < 2 || directions.len() + 1 != times.len() {
            return Err(Error::InvalidInput(format!(
                "{} change-point times need {} directions, got {}",
                times.len(),
                times.len().saturating_sub(1),
                directions.len()
            )));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput(
                "change points must be strictly increasing".into(),
            ));
        }
        if directions.iter().any(|&d| d != 1 && d != -1) {
            return Err(Error::InvalidInput("directions must be +1 or -1".into()));
        }
        if directions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(
                "adjacent directions must alternate".into(),
            ));
        }
        Ok(ChangePointSet { times, directions })
    }

    /// All change points including both endpoints.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn interior(&self) -> &[f64] {
        &self.times[1..self.times.len() - 1]
    }

    pub fn directions(&self) -> &[i8] {
        &self.directions
    }
}

/// `Z_0 = Y_0`, `Z_j = Z_{j-1} + |Y_j - Y_{j-1}|`.
pub fn monotonize_discrete(curve: &SampledCurve, source_id: usize) -> MonotonizedCurve {
    let y = curve.values();
    let mut z = Vec::with_capacity(y.len());
    z.push(y[0]);
    for w in y.windows(2) {
        let prev = z[z.len() - 1];
        z.push(prev + (w[1] - w[0]).abs());
    }
    MonotonizedCurve {
        grid: curve.grid().clone(),
        z_values: z,
        source_id,
    }
}

/// Monotonizes every curve of a bundle, keeping curve order and grids.
pub fn monotonize_bundle(bundle: &CurveBundle) -> CurveBundle {
    let curves = bundle
        .curves()
        .iter()
        .enumerate()
        .map(|(i, c)| monotonize_discrete(c, i).to_curve())
        .collect();
    CurveBundle::new(curves).expect("monotonizing keeps grids and interval")
}

/// Grid times where the sign of consecutive differences flips.
///
/// Differences with `|dY| <= flat_tol` carry the preceding direction
/// (leading flats take the first non-flat direction).
pub fn change_points(curve: &SampledCurve, flat_tol: f64) -> Result<ChangePointSet> {
    let y = curve.values();
    let t = curve.times();
    let mut signs: Vec<i8> = y
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d.abs() <= flat_tol {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let first = signs
        .iter()
        .copied()
        .find(|&s| s != 0)
        .ok_or(Error::NoVariation)?;
    let mut last = first;
    for s in signs.iter_mut() {
        if *s == 0 {
            *s = last;
        } else {
            last = *s;
        }
    }
    let mut times = vec![t[0]];
    let mut directions = vec![signs[0]];
    for j in 1..signs.len() {
        if signs[j] != signs[j - 1] {
            times.push(t[j]);
            directions.push(signs[j]);
        }
    }
    times.push(t[t.len() - 1]);
    ChangePointSet::new(times, directions)
}

/// Exact monotonizing operator `G(t, f)` given the change points of `f`.
///
/// On `(s_l, s_{l+1})` this is `pi_l (f(t) - f(s_l)) + f(a) +
/// sum_{k<=l} |f(s_{k-1}) - f(s_k)|`, and at `s_k` the accumulated
/// variation `f(a) + sum_{l<=k} |f(s_{l-1}) - f(s_l)|`.
pub fn monotonize_exact<F>(f: F, cps: &ChangePointSet, t: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let s = cps.times();
    let (a, b) = (s[0], s[s.len() - 1]);
    if !(t >= a && t <= b) {
        return Err(Error::Domain {
            value: t,
            lo: a,
            hi: b,
        });
    }
    let mut acc = f(a);
    for k in 0..s.len() {
        if t == s[k] {
            return Ok(acc);
        }
        if t < s[k + 1] {
            let pi = f64::from(cps.directions()[k]);
            return Ok(pi * (f(t) - f(s[k])) + acc);
        }
        acc += (f(s[k]) - f(s[k + 1])).abs();
    }
    unreachable!("t lies within [a, b]")
}

/// Warp estimate for curve `i0` of a non-monotone bundle, matching on the
/// monotonized values.
pub fn warp_estimate_nonmonotone(
    bundle: &CurveBundle,
    i0: usize,
    ts: &[f64],
) -> Result<WarpResult> {
    let grid = bundle.require_common_grid(MODULE)?;
    if bundle.curves().iter().any(SampledCurve::is_constant) {
        return Err(Error::NoVariation);
    }
    let z = monotonize_bundle(bundle);
    let values: Vec<&[f64]> = z.curves().iter().map(|c| c.values()).collect();
    warp_scan(grid, &values, i0, ts)
}

/// Value-space structural mean of a non-monotone bundle.
///
/// The structural expectation of the monotonized curves gives, at each grid
/// time, a structural level; each curve is read at the sample whose
/// monotonized value is nearest that level and the readings are averaged.
pub fn structural_mean_nonmonotone(bundle: &CurveBundle) -> Result<SampledCurve> {
    structural_mean_registered(bundle).map(|(curve, _)| curve)
}

/// [`structural_mean_nonmonotone`] together with the matched sample index
/// of every curve at every grid time, indexed `[i][j]`.
pub(crate) fn structural_mean_registered(
    bundle: &CurveBundle,
) -> Result<(SampledCurve, Vec<Vec<usize>>)> {
    let grid = bundle.require_common_grid(MODULE)?;
    if bundle.curves().iter().any(SampledCurve::is_constant) {
        return Err(Error::NoVariation);
    }
    let z = monotonize_bundle(bundle);
    let step = crate::estimators::step_inverse(&z, crate::estimators::Monotonicity::NonDecreasing)?;
    let forward = crate::estimators::forward_from_step(&step)?;
    let (lo, hi) = forward.domain();
    let levels = grid
        .points()
        .iter()
        .map(|&t| forward.eval(t.clamp(lo, hi)))
        .collect::<Result<Vec<f64>>>()?;
    let registration: Vec<Vec<usize>> = z
        .curves()
        .iter()
        .map(|zc| {
            levels
                .iter()
                .map(|&level| nearest_index_sorted(zc.values(), level))
                .collect()
        })
        .collect();
    let m = bundle.m() as f64;
    let values = (0..grid.len())
        .map(|j| {
            bundle
                .curves()
                .iter()
                .zip(&registration)
                .map(|(y, idx)| y.values()[idx[j]])
                .sum::<f64>()
                / m
        })
        .collect();
    Ok((SampledCurve::new(grid.clone(), values)?, registration))
}
