//! Sampled curves, bundles of curves, and the monotone step/interpolant
//! functions produced by the estimators.
//!
//! All types are immutable once constructed; constructors validate their
//! invariants and return [`Error::InvalidInput`] otherwise.

use crate::error::{Error, Result};

/// Absolute tolerance used by invariant checks.
pub const ABS_TOL: f64 = 1e-12;

/// Strictly increasing sample times covering `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("grid contains non-finite time".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "grid times not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Grid { points })
    }

    /// `intervals + 1` equidistant points `a + (b - a) j / intervals`.
    pub fn equispaced(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if intervals < 1 || !(b > a) {
            return Err(Error::InvalidInput(format!(
                "equispaced grid needs a < b and at least one interval (a={a}, b={b}, n={intervals})"
            )));
        }
        let n = intervals as f64;
        let mut points: Vec<f64> = (0..=intervals)
            .map(|j| a + (b - a) * (j as f64 / n))
            .collect();
        points[intervals] = b;
        Grid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Number of intervals between consecutive points.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn max_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Consecutive gaps equal within relative tolerance 1e-12.
    pub fn is_equispaced(&self) -> bool {
        let h = (self.b() - self.a()) / self.intervals() as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1.0))
    }

    /// Index of the grid time closest to `t`, smallest index on ties.
    pub fn nearest_index(&self, t: f64) -> usize {
        nearest_index_sorted(&self.points, t)
    }
}

/// One observed curve: values `Y_j` at the times of its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledCurve {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "curve has {} times but {} values",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput(
                "curve contains non-finite value".into(),
            ));
        }
        Ok(SampledCurve { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[1] == w[0])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linear interpolation between samples, clamped to `[a, b]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        lerp_lookup(
            self.grid.points(),
            &self.values,
            t.clamp(self.grid.a(), self.grid.b()),
        )
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        SampledCurve::new(self.grid.clone(), values)
    }
}

/// `m >= 1` curves observed over a common interval `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveBundle {
    curves: Vec<SampledCurve>,
    common_grid: Option<Grid>,
}

impl CurveBundle {
    /// Builds a bundle; the common grid is recorded when every curve has
    /// exactly the same grid.
    pub fn new(curves: Vec<SampledCurve>) -> Result<Self> {
        let first = curves
            .first()
            .ok_or_else(|| Error::InvalidInput("bundle needs at least one curve".into()))?;
        let (a, b) = (first.grid.a(), first.grid.b());
        for (i, c) in curves.iter().enumerate() {
            if c.grid.a() != a || c.grid.b() != b {
                return Err(Error::InvalidInput(format!(
                    "curve {i} spans [{}, {}], expected [{a}, {b}]",
                    c.grid.a(),
                    c.grid.b()
                )));
            }
        }
        let common_grid = curves
            .iter()
            .all(|c| c.grid == first.grid)
            .then(|| first.grid.clone());
        Ok(CurveBundle {
            curves,
            common_grid,
        })
    }

    /// All curves on one shared grid.
    pub fn from_values(grid: &Grid, values: Vec<Vec<f64>>) -> Result<Self> {
        let curves = values
            .into_iter()
            .map(|v| SampledCurve::new(grid.clone(), v))
            .collect::<Result<Vec<_>>>()?;
        CurveBundle::new(curves)
    }

    pub fn curves(&self) -> &[SampledCurve] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> Option<&SampledCurve> {
        self.curves.get(i)
    }

    pub fn m(&self) -> usize {
        self.curves.len()
    }

    pub fn common_grid(&self) -> Option<&Grid> {
        self.common_grid.as_ref()
    }

    pub(crate) fn require_common_grid(&self, module: &'static str) -> Result<&Grid> {
        self.common_grid
            .as_ref()
            .ok_or_else(|| Error::precondition(module, "curves must share a common grid"))
    }

    pub fn a(&self) -> f64 {
        self.curves[0].grid.a()
    }

    pub fn b(&self) -> f64 {
        self.curves[0].grid.b()
    }

    /// Largest grid gap over all curves.
    pub fn max_gap(&self) -> f64 {
        self.curves
            .iter()
            .map(|c| c.grid.max_gap())
            .fold(0.0, f64::max)
    }

    /// `[max_i min_j Y_ij, min_i max_j Y_ij]`, the ordinates every curve reaches.
    pub fn common_range(&self) -> (f64, f64) {
        let lo = self
            .curves
            .iter()
            .map(SampledCurve::min_value)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self
            .curves
            .iter()
            .map(SampledCurve::max_value)
            .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    /// Smallest and largest observed value over the whole bundle.
    pub fn value_range(&self) -> (f64, f64) {
        let lo = self
            .curves
            .iter()
            .map(SampledCurve::min_value)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .curves
            .iter()
            .map(SampledCurve::max_value)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Applies `f` to each curve, keeping order.
    pub fn map_curves<F>(&self, f: F) -> Result<CurveBundle>
    where
        F: FnMut(&SampledCurve) -> Result<SampledCurve>,
    {
        CurveBundle::new(self.curves.iter().map(f).collect::<Result<Vec<_>>>()?)
    }
}

/// `argmin_j |values_j - target|`, smallest index on ties.
pub fn nearest_index(values: &[f64], target: f64) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "nearest_index on empty sequence".into(),
        ));
    }
    let mut best = 0;
    let mut best_d = (values[0] - target).abs();
    for (j, v) in values.iter().enumerate().skip(1) {
        let d = (v - target).abs();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    Ok(best)
}

/// [`nearest_index`] for nondecreasing `values`, in `O(log n)`.
///
/// Returns exactly what the linear scan returns, including the
/// smallest-index rule inside flat runs.
pub(crate) fn nearest_index_sorted(values: &[f64], target: f64) -> usize {
    debug_assert!(!values.is_empty());
    let n = values.len();
    let p = values.partition_point(|&v| v < target);
    if p == 0 {
        return 0;
    }
    let first_of_run = |v: f64| values.partition_point(|&x| x < v);
    if p == n {
        return first_of_run(values[n - 1]);
    }
    let below = values[p - 1];
    let above = values[p];
    if (target - below).abs() <= (above - target).abs() {
        first_of_run(below)
    } else {
        p
    }
}

/// Increasing step function `y -> u_k` on `[v_k, v_{k+1})`, right-continuous,
/// with `u_K` also taken at the right endpoint `v_{K+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepInverseEstimate {
    jump_values: Vec<f64>,
    levels: Vec<f64>,
}

impl StepInverseEstimate {
    /// `jump_values` holds `v_0 < ... < v_{K+1}`, `levels` holds `u_0 < ... < u_K`.
    pub fn new(jump_values: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || jump_values.len() != levels.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "step function needs K+2 jump values for K+1 levels, got {} and {}",
                jump_values.len(),
                levels.len()
            )));
        }
        if jump_values.iter().chain(&levels).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "step function has non-finite entries".into(),
            ));
        }
        if !strictly_increasing(&jump_values) || !strictly_increasing(&levels) {
            return Err(Error::InvalidInput(
                "step function jumps and levels must be strictly increasing".into(),
            ));
        }
        Ok(StepInverseEstimate {
            jump_values,
            levels,
        })
    }

    pub fn jump_values(&self) -> &[f64] {
        &self.jump_values
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of interior jumps `K`.
    pub fn jumps(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (
            self.jump_values[0],
            self.jump_values[self.jump_values.len() - 1],
        )
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(y >= lo && y <= hi) {
            return Err(Error::Domain { value: y, lo, hi });
        }
        let k_max = self.levels.len() - 1;
        let k = self.jump_values[..=k_max].partition_point(|&v| v <= y) - 1;
        Ok(self.levels[k])
    }
}

/// Evaluates the step inverse at `y` (right-continuous at jumps).
pub fn eval_step_inverse(est: &StepInverseEstimate, y: f64) -> Result<f64> {
    est.eval(y)
}

/// Continuous, strictly increasing piecewise-linear function.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneInterpolant {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl MonotoneInterpolant {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let (times, values): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        if times.len() < 2 {
            return Err(Error::InvalidInput(
                "interpolant needs at least two knots".into(),
            ));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "interpolant has non-finite knot".into(),
            ));
        }
        if !strictly_increasing(&times) || !strictly_increasing(&values) {
            return Err(Error::InvalidInput(
                "interpolant knots must be strictly increasing in time and value".into(),
            ));
        }
        Ok(MonotoneInterpolant { times, values })
    }

    pub fn identity(a: f64, b: f64) -> Result<Self> {
        MonotoneInterpolant::new(vec![(a, a), (b, b)])
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.times
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.values
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    pub fn range(&self) -> (f64, f64) {
        (self.values[0], self.values[self.values.len() - 1])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain { value: t, lo, hi });
        }
        Ok(lerp_lookup(&self.times, &self.values, t))
    }
}

/// Piecewise-linear lookup of `x` in strictly increasing `xs`; exact at knots.
fn lerp_lookup(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let p = xs.partition_point(|&k| k <= x);
    if p == 0 {
        return ys[0];
    }
    let k = p - 1;
    if k + 1 == xs.len() || xs[k] == x {
        return ys[k];
    }
    let slope = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    ys[k] + slope * (x - xs[k])
}

/// `F^{-1}(t) = inf { y : F(y) >= t }` for a nondecreasing function `F`.
pub trait GeneralizedInverse {
    fn generalized_inverse(&self, t: f64) -> Result<f64>;
}

impl GeneralizedInverse for MonotoneInterpolant {
    fn generalized_inverse(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain { value: t, lo, hi });
        }
        Ok(lerp_lookup(&self.values, &self.times, t))
    }
}

impl GeneralizedInverse for StepInverseEstimate {
    fn generalized_inverse(&self, t: f64) -> Result<f64> {
        let lo = self.levels[0];
        let hi = self.levels[self.levels.len() - 1];
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain { value: t, lo, hi });
        }
        let k = self.levels.partition_point(|&u| u < t);
        Ok(self.jump_values[k])
    }
}

pub fn generalized_inverse<F: GeneralizedInverse + ?Sized>(f: &F, t: f64) -> Result<f64> {
    f.generalized_inverse(t)
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}
