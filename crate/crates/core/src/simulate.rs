//! Random warping processes and warped test bundles.
//!
//! Each warp starts as the identity on `[0, 1]` and is composed `N` times
//! with a two-piece linear map through `(U, V_i)`: one `U` is drawn per
//! iteration and shared by all curves, while `V_i` is drawn independently
//! per curve around `U`. Warps are kept as exact piecewise-linear knot
//! lists, so both `H` and `H^{-1}` evaluate without grid error.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; per iteration the
//! draw order is `U`, then `V_1 .. V_m`. Uniform draws are
//! `lo + (hi - lo) * u` with `u` the generator's standard `[0, 1)` f64.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curves::{CurveBundle, Grid};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct WarpSimConfig {
    /// Number of warps (curves).
    pub m: usize,
    /// Composition iterations.
    pub iterations: usize,
    /// Half-width of the `V_i` perturbation around `U`.
    pub eps: f64,
    pub seed: u64,
    /// Grid intervals for bundles built from these warps.
    pub n: usize,
}

impl Default for WarpSimConfig {
    fn default() -> Self {
        WarpSimConfig {
            m: 30,
            iterations: 3000,
            eps: 0.005,
            seed: 0,
            n: 100,
        }
    }
}

impl WarpSimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.05) {
            return Err(Error::InvalidInput(format!(
                "eps must lie in (0, 0.05), got {}",
                self.eps
            )));
        }
        if self.m < 1 || self.n < 2 {
            return Err(Error::InvalidInput(format!(
                "need m >= 1 and n >= 2, got m={} n={}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

/// Strictly increasing piecewise-linear map of `[0, 1]` onto itself.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl WarpSample {
    pub fn identity() -> Self {
        WarpSample {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, 1.0],
        }
    }

    /// From explicit knots; must start at (0, 0), end at (1, 1), and be
    /// strictly increasing in both coordinates.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        let ok = xs.len() >= 2
            && xs[0] == 0.0
            && ys[0] == 0.0
            && xs[xs.len() - 1] == 1.0
            && ys[ys.len() - 1] == 1.0
            && xs.windows(2).all(|w| w[1] > w[0])
            && ys.windows(2).all(|w| w[1] > w[0]);
        if !ok {
            return Err(Error::InvalidInput(
                "warp knots must run strictly increasing from (0,0) to (1,1)".into(),
            ));
        }
        Ok(WarpSample { xs, ys })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn knot_count(&self) -> usize {
        self.xs.len()
    }

    /// `H(t)` for `t` in `[0, 1]` (clamped outside).
    pub fn eval(&self, t: f64) -> f64 {
        lerp(&self.xs, &self.ys, t)
    }

    /// `H^{-1}(y)` for `y` in `[0, 1]` (clamped outside).
    pub fn inverse(&self, y: f64) -> f64 {
        lerp(&self.ys, &self.xs, y)
    }

    /// `W o H` where `W` is the two-piece linear map sending `u` to `v`.
    pub fn compose_two_piece(&self, u: f64, v: f64) -> WarpSample {
        let p = self.ys.partition_point(|&y| y < u);
        let mut xs = Vec::with_capacity(self.xs.len() + 1);
        let mut ys = Vec::with_capacity(self.xs.len() + 1);
        for k in 0..self.xs.len() {
            if k == p && k > 0 && self.ys[k] != u {
                let (x0, x1) = (self.xs[k - 1], self.xs[k]);
                let (y0, y1) = (self.ys[k - 1], self.ys[k]);
                let x = x0 + (u - y0) * (x1 - x0) / (y1 - y0);
                if x > x0 && x < x1 {
                    xs.push(x);
                    ys.push(v);
                }
            }
            let y = two_piece_map(u, v, self.ys[k]);
            // rounding must never break strict monotonicity
            if ys.last().is_none_or(|&last| y > last) {
                xs.push(self.xs[k]);
                ys.push(y);
            }
        }
        let last = xs.len() - 1;
        if xs[last] != 1.0 {
            // the final knot was dropped by the monotonicity guard
            xs.push(1.0);
            ys.push(1.0);
        }
        WarpSample { xs, ys }
    }

    /// Removes interior knots whose triangle with their neighbours has area
    /// at most `area_tol`.
    pub fn prune_collinear(&mut self, area_tol: f64) {
        if self.xs.len() <= 2 {
            return;
        }
        let mut xs = vec![self.xs[0]];
        let mut ys = vec![self.ys[0]];
        for k in 1..self.xs.len() - 1 {
            let (x0, y0) = (xs[xs.len() - 1], ys[ys.len() - 1]);
            let (x1, y1) = (self.xs[k], self.ys[k]);
            let (x2, y2) = (self.xs[k + 1], self.ys[k + 1]);
            let area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)).abs();
            if area > area_tol {
                xs.push(x1);
                ys.push(y1);
            }
        }
        xs.push(self.xs[self.xs.len() - 1]);
        ys.push(self.ys[self.ys.len() - 1]);
        self.xs = xs;
        self.ys = ys;
    }
}

/// The two-piece linear map `[0, 1] -> [0, 1]` through `(u, v)`; `0` and `1`
/// are fixed exactly.
pub fn two_piece_map(u: f64, v: f64, t: f64) -> f64 {
    if t <= u {
        v / u * t
    } else if t >= 1.0 {
        1.0
    } else {
        (1.0 - v) / (1.0 - u) * t + (v - u) / (1.0 - u)
    }
}

fn lerp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let x = x.clamp(xs[0], xs[xs.len() - 1]);
    let p = xs.partition_point(|&k| k <= x);
    let k = p - 1;
    if k + 1 == xs.len() || xs[k] == x {
        return ys[k];
    }
    ys[k] + (ys[k + 1] - ys[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
}

pub const PRUNE_AREA_TOL: f64 = 1e-12;

/// Simulates `m` warps with `iterations` compositions each.
pub fn simulate_warps(config: &WarpSimConfig) -> Result<Vec<WarpSample>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let eps = config.eps;
    let mut warps = vec![WarpSample::identity(); config.m];
    for _ in 0..config.iterations {
        let u = uniform(&mut rng, 10.0 * eps, 1.0 - 10.0 * eps);
        for w in warps.iter_mut() {
            let v = uniform(&mut rng, u - eps, u + eps);
            *w = w.compose_two_piece(u, v);
        }
    }
    for w in warps.iter_mut() {
        w.prune_collinear(PRUNE_AREA_TOL);
    }
    Ok(warps)
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Independent sub-seed for replication `stream` of a master seed (SplitMix64).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `f(t) = sin(3 pi t) + 3 pi t`, strictly increasing on `[0, 1]` with a
/// flat inflection at `t = 1/3`.
pub fn test_function_f(t: f64) -> f64 {
    (3.0 * PI * t).sin() + 3.0 * PI * t
}

/// `g(t) = sin(6 pi t) / (6 pi t)`, with `g(0) = 1`.
pub fn test_function_g(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (6.0 * PI * t).sin() / (6.0 * PI * t)
    }
}

/// Interior extrema of `g` on `(0, 1)`: the roots of `tan x = x` for
/// `x = 6 pi t` in `(k pi, k pi + pi/2)`, `k = 1..5`, found by bisection.
pub fn test_function_g_change_points() -> Vec<f64> {
    (1..=5)
        .map(|k| {
            let h = |x: f64| x * x.cos() - x.sin();
            let (mut lo, mut hi) = (k as f64 * PI + 1e-9, k as f64 * PI + PI / 2.0 - 1e-9);
            let s_lo = h(lo).signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid).signum() == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi) / (6.0 * PI)
        })
        .collect()
}

/// Named test functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    F,
    G,
}

impl TestFunction {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            TestFunction::F => test_function_f(t),
            TestFunction::G => test_function_g(t),
        }
    }
}

/// Samples `fun o H_i^{-1}` at `t_j = j / n`, `j = 0..=n`, adding i.i.d.
/// `N(0, noise_sigma^2)` noise (row by row from ChaCha8 seeded with `seed`)
/// when `noise_sigma > 0`.
pub fn make_bundle<F>(
    fun: F,
    warps: &[WarpSample],
    n: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<CurveBundle>
where
    F: Fn(f64) -> f64,
{
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise sigma must be finite and nonnegative, got {noise_sigma}"
        )));
    }
    let grid = Grid::equispaced(0.0, 1.0, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = warps
        .iter()
        .map(|h| {
            grid.points()
                .iter()
                .map(|&t| {
                    let clean = fun(h.inverse(t));
                    if noise_sigma > 0.0 {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        clean + noise_sigma * z
                    } else {
                        clean
                    }
                })
                .collect()
        })
        .collect();
    CurveBundle::from_values(&grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(m: usize, iterations: usize, seed: u64) -> WarpSimConfig {
        WarpSimConfig {
            m,
            iterations,
            eps: 0.005,
            seed,
            n: 100,
        }
    }

    #[test]
    fn zero_iterations_give_identity() {
        let ws = simulate_warps(&config(4, 0, 1)).unwrap();
        for w in ws {
            assert_eq!(w, WarpSample::identity());
            assert_eq!(w.eval(0.37), 0.37);
        }
    }

    #[test]
    fn two_piece_examples() {
        assert!((two_piece_map(0.5, 0.4, 0.25) - 0.2).abs() < 1e-15);
        assert!((two_piece_map(0.5, 0.4, 0.75) - 0.7).abs() < 1e-15);
        let w = WarpSample::identity().compose_two_piece(0.5, 0.4);
        assert_eq!(w.knot_count(), 3);
        assert!((w.eval(0.25) - 0.2).abs() < 1e-15);
        assert!((w.eval(0.75) - 0.7).abs() < 1e-15);
        assert_eq!(w.eval(0.5), 0.4);
        assert_eq!(w.eval(1.0), 1.0);
    }

    #[test]
    fn composition_matches_pointwise_application() {
        let w = WarpSample::identity()
            .compose_two_piece(0.3, 0.33)
            .compose_two_piece(0.6, 0.58);
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let want = two_piece_map(0.6, 0.58, two_piece_map(0.3, 0.33, t));
            assert!((w.eval(t) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_config() {
        let mut c = config(3, 5, 0);
        c.eps = 0.05;
        assert!(simulate_warps(&c).is_err());
        c.eps = 0.0;
        assert!(simulate_warps(&c).is_err());
        let mut c = config(0, 5, 0);
        assert!(simulate_warps(&c).is_err());
        c.m = 2;
        c.n = 1;
        assert!(simulate_warps(&c).is_err());
    }

    #[test]
    fn warps_are_pinned_and_increasing() {
        for w in simulate_warps(&config(5, 500, 42)).unwrap() {
            let knots: Vec<(f64, f64)> = w.knots().collect();
            assert_eq!(knots[0], (0.0, 0.0));
            assert_eq!(*knots.last().unwrap(), (1.0, 1.0));
            assert!(knots.windows(2).all(|p| p[1].0 > p[0].0 && p[1].1 > p[0].1));
            for (x, _) in &knots {
                assert!((w.inverse(w.eval(*x)) - x).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let a = simulate_warps(&config(3, 200, 9)).unwrap();
        let b = simulate_warps(&config(3, 200, 9)).unwrap();
        let c = simulate_warps(&config(3, 200, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn prune_removes_collinear_knots() {
        let mut w =
            WarpSample::from_knots(vec![(0.0, 0.0), (0.25, 0.25), (0.5, 0.6), (1.0, 1.0)]).unwrap();
        w.prune_collinear(1e-12);
        assert_eq!(w.knot_count(), 4);
        let mut w =
            WarpSample::from_knots(vec![(0.0, 0.0), (0.25, 0.25), (0.5, 0.5), (1.0, 1.0)]).unwrap();
        w.prune_collinear(1e-12);
        assert_eq!(w.knot_count(), 2);
    }

    #[test]
    fn test_function_values() {
        assert_eq!(test_function_f(0.0), 0.0);
        assert!((test_function_f(1.0) - 3.0 * PI).abs() < 1e-12);
        assert!((test_function_f(1.0 / 6.0) - (1.0 + PI / 2.0)).abs() < 1e-12);
        assert_eq!(test_function_g(0.0), 1.0);
        assert!(test_function_g(1e-9) > 0.999_999);
    }

    #[test]
    fn g_change_points_are_extrema() {
        let cps = test_function_g_change_points();
        assert_eq!(cps.len(), 5);
        assert!((cps[0] * 6.0 * PI - 4.493_409_457_909).abs() < 1e-9);
        for s in cps {
            let d = (test_function_g(s + 1e-6) - test_function_g(s - 1e-6)) / 2e-6;
            assert!(d.abs() < 1e-5, "g'({s}) = {d}");
        }
    }

    #[test]
    fn bundle_identity_warps_noise_free() {
        let ws = vec![WarpSample::identity(); 2];
        let b = make_bundle(test_function_f, &ws, 10, 0.0, 0).unwrap();
        for c in b.curves() {
            for (t, y) in c.times().iter().zip(c.values()) {
                assert_eq!(*y, test_function_f(*t));
            }
        }
    }

    #[test]
    fn bundle_increasing_and_reproducible() {
        let ws = simulate_warps(&config(6, 300, 3)).unwrap();
        let b = make_bundle(test_function_f, &ws, 100, 0.0, 0).unwrap();
        assert!(b.curves().iter().all(|c| c.is_strictly_increasing()));
        let n1 = make_bundle(test_function_g, &ws, 100, 0.05, 77).unwrap();
        let n2 = make_bundle(test_function_g, &ws, 100, 0.05, 77).unwrap();
        assert_eq!(n1, n2);
        assert!(make_bundle(test_function_g, &ws, 100, -1.0, 77).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|k| derive_seed(7, k)).collect();
        let mut d = s.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), s.len());
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
