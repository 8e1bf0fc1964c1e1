//! Small distribution helpers shared by the band and test code.

use statrs::distribution::{ChiSquared, ContinuousCDF};

// Acklam's rational approximation to the standard normal quantile.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

/// Quantile of the standard normal distribution, relative error below 1.2e-9.
///
/// Returns `-inf`/`+inf` at 0/1 and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Two-sided critical value `u_{1 - alpha/2}`.
pub fn two_sided_critical(alpha: f64) -> f64 {
    normal_quantile(1.0 - alpha / 2.0)
}

/// Upper tail `P(X > x)` of a chi-square variable with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    match ChiSquared::new(df as f64) {
        Ok(dist) => dist.sf(x).clamp(0.0, 1.0),
        Err(_) => f64::NAN,
    }
}

pub fn chi_square_cdf(x: f64, df: usize) -> f64 {
    1.0 - chi_square_sf(x, df)
}

/// Sequential mean; the summation order is part of the determinism contract.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Plug-in variance `mean(x^2) - mean(x)^2`, evaluated in centered form.
pub(crate) fn plug_in_variance(xs: &[f64]) -> f64 {
    // Identical samples are exactly zero, not a rounding residue.
    if xs.iter().all(|&x| x == xs[0]) {
        return 0.0;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Standard normal CDF by composite Simpson quadrature of the density
    /// on [0, |x|], independent of any closed-form erf.
    fn cdf_by_quadrature(x: f64) -> f64 {
        let n = 20_000;
        let h = x.abs() / n as f64;
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = phi(0.0) + phi(x.abs());
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * phi(k as f64 * h);
        }
        let half = s * h / 3.0;
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    fn quantile_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (-9.0, 9.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if cdf_by_quadrature(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_matches_bisection_oracle() {
        for &p in &[
            0.001, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.66, 0.84, 0.9, 0.975, 0.995, 0.9999,
        ] {
            let got = normal_quantile(p);
            let want = quantile_by_bisection(p);
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                "p={p}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn critical_values() {
        assert!((two_sided_critical(0.05) - 1.959_964).abs() < 1e-6);
        assert!((two_sided_critical(0.32) - 0.994_458).abs() < 1e-6);
        assert_eq!(normal_quantile(0.5), 0.0);
        assert!(normal_quantile(1.5).is_nan());
    }

    #[test]
    fn chi_square_tail() {
        // P(chi2_1 > 3.841459) = 0.05
        assert!((chi_square_sf(3.841_459, 1) - 0.05).abs() < 1e-6);
        assert_eq!(chi_square_sf(0.0, 3), 1.0);
        assert!(chi_square_sf(10.0, 2) < chi_square_sf(5.0, 2));
    }

    #[test]
    fn variance_is_clamped() {
        assert_eq!(plug_in_variance(&[0.3, 0.3, 0.3]), 0.0);
        assert!((plug_in_variance(&[0.0, 1.0]) - 0.25).abs() < 1e-15);
    }
}
