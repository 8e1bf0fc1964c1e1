//! Equalizing scores across examiner groups.
//!
//! Each group's empirical CDF on the integer scores `0..=20` is treated as
//! a warped version of a common structural CDF. Pairs of groups are tested
//! for homogeneity with a binned chi-square statistic, and every raw score
//! is mapped through its group CDF and back through the structural CDF.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::curves::CurveBundle;
use crate::curves::{GeneralizedInverse, Grid, SampledCurve};
use crate::error::{Error, Result};
use crate::estimators::{forward_from_step, step_inverse, Monotonicity};
use crate::stats::chi_square_sf;

const MODULE: &str = "equity";

pub const MAX_SCORE: u32 = 20;

/// Integer scores in `[0, 20]` per group, keyed by group id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreTable {
    groups: BTreeMap<String, Vec<u32>>,
}

impl ScoreTable {
    pub fn new(groups: BTreeMap<String, Vec<u32>>) -> Result<Self> {
        for (id, scores) in &groups {
            if scores.is_empty() {
                return Err(Error::InvalidInput(format!("group {id} has no scores")));
            }
            if let Some(s) = scores.iter().find(|&&s| s > MAX_SCORE) {
                return Err(Error::InvalidInput(format!(
                    "group {id} has score {s} outside [0, {MAX_SCORE}]"
                )));
            }
        }
        Ok(ScoreTable { groups })
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<u32>> {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneityResult {
    pub statistic: f64,
    pub bins_used: usize,
    pub df: usize,
    pub p_value: f64,
}

impl HomogeneityResult {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairTest {
    pub group_i: String,
    pub group_j: String,
    pub result: HomogeneityResult,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaledScore {
    pub raw: u32,
    pub structural: f64,
    /// `structural` rounded half-up.
    pub structural_int: u32,
}

fn score_grid() -> Grid {
    Grid::equispaced(0.0, f64::from(MAX_SCORE), MAX_SCORE as usize)
        .expect("fixed score grid is valid")
}

fn counts(scores: &[u32]) -> [usize; MAX_SCORE as usize + 1] {
    let mut c = [0; MAX_SCORE as usize + 1];
    for &s in scores {
        c[s as usize] += 1;
    }
    c
}

/// `F(k) = #{X <= k} / n` on the grid `0..=20`.
pub fn empirical_cdf(scores: &[u32]) -> Result<SampledCurve> {
    if scores.is_empty() {
        return Err(Error::InvalidInput(
            "empirical CDF of an empty group".into(),
        ));
    }
    if scores.iter().any(|&s| s > MAX_SCORE) {
        return Err(Error::InvalidInput(format!(
            "scores must lie in [0, {MAX_SCORE}]"
        )));
    }
    let n = scores.len() as f64;
    let mut acc = 0usize;
    let values = counts(scores)
        .iter()
        .map(|&c| {
            acc += c;
            acc as f64 / n
        })
        .collect();
    SampledCurve::new(score_grid(), values)
}

/// Binned chi-square homogeneity statistic `D = D^i + D^j`.
///
/// Expected counts are `d_k = n_i (n_k^i + n_k^j) / (n_i + n_j)` (and
/// likewise for `j`), which is `(n_k^i + n_k^j) / 2` for equal group sizes.
/// Bins empty in both groups are dropped; the reference law is chi-square
/// with `bins_used - 1` degrees of freedom.
pub fn homogeneity_test(group_i: &[u32], group_j: &[u32]) -> Result<HomogeneityResult> {
    if group_i.is_empty() || group_j.is_empty() {
        return Err(Error::InvalidInput(
            "homogeneity test needs two non-empty groups".into(),
        ));
    }
    if group_i.iter().chain(group_j).any(|&s| s > MAX_SCORE) {
        return Err(Error::InvalidInput(format!(
            "scores must lie in [0, {MAX_SCORE}]"
        )));
    }
    let (ci, cj) = (counts(group_i), counts(group_j));
    let (ni, nj) = (group_i.len() as f64, group_j.len() as f64);
    let mut statistic = 0.0;
    let mut bins_used = 0;
    for (&a, &b) in ci.iter().zip(&cj) {
        if a + b == 0 {
            continue;
        }
        bins_used += 1;
        // Multiply before dividing so identical groups give d == count exactly.
        let pooled = (a + b) as f64;
        let (di, dj) = (pooled * ni / (ni + nj), pooled * nj / (ni + nj));
        statistic += (di - a as f64).powi(2) / di + (dj - b as f64).powi(2) / dj;
    }
    if bins_used < 2 {
        return Err(Error::degenerate(
            MODULE,
            "fewer than two non-empty score bins",
        ));
    }
    let df = bins_used - 1;
    Ok(HomogeneityResult {
        statistic,
        bins_used,
        df,
        p_value: chi_square_sf(statistic, df),
    })
}

/// Homogeneity tests for every unordered pair of groups, in id order.
pub fn pairwise_tests(table: &ScoreTable) -> Result<Vec<PairTest>> {
    let ids: Vec<&String> = table.groups.keys().collect();
    let pairs: Vec<(usize, usize)> = (0..ids.len())
        .flat_map(|i| (i + 1..ids.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            Ok(PairTest {
                group_i: ids[i].clone(),
                group_j: ids[j].clone(),
                result: homogeneity_test(&table.groups[ids[i]], &table.groups[ids[j]])?,
            })
        })
        .collect()
}

/// Maps each raw score to its structural score.
///
/// The structural CDF is the forward structural expectation of the group
/// CDFs; a score `x` of group `i` becomes the generalized inverse of the
/// structural CDF at `F_i(x)`, clipped to the observed score range.
pub fn rescale_scores(table: &ScoreTable) -> Result<BTreeMap<String, Vec<RescaledScore>>> {
    if table.len() < 2 {
        return Err(Error::InsufficientSample {
            module: MODULE,
            needed: 2,
            got: table.len(),
        });
    }
    for (id, scores) in &table.groups {
        if scores.iter().all(|&s| s == scores[0]) {
            return Err(Error::degenerate(
                MODULE,
                format!("group {id} has a single distinct score"),
            ));
        }
    }
    let cdfs = table
        .groups
        .values()
        .map(|s| empirical_cdf(s))
        .collect::<Result<Vec<_>>>()?;
    let bundle = CurveBundle::new(cdfs.clone())?;
    let structural = forward_from_step(&step_inverse(&bundle, Monotonicity::NonDecreasing)?)?;
    let (lo_y, hi_y) = structural.range();

    let all = table.groups.values().flatten();
    let lo = f64::from(*all.clone().min().expect("non-empty table"));
    let hi = f64::from(*all.max().expect("non-empty table"));

    table
        .groups
        .iter()
        .zip(&cdfs)
        .map(|((id, scores), cdf)| {
            let mapped = scores
                .iter()
                .map(|&raw| {
                    let y = cdf.values()[raw as usize].clamp(lo_y, hi_y);
                    let s = structural.generalized_inverse(y)?.clamp(lo, hi);
                    Ok(RescaledScore {
                        raw,
                        structural: s,
                        structural_int: (s + 0.5).floor() as u32,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((id.clone(), mapped))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(groups: Vec<(&str, Vec<u32>)>) -> ScoreTable {
        ScoreTable::new(
            groups
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cdf_examples() {
        let f = empirical_cdf(&[10, 10, 10]).unwrap();
        assert!(f.values()[..10].iter().all(|&v| v == 0.0));
        assert!(f.values()[10..].iter().all(|&v| v == 1.0));

        let f = empirical_cdf(&[0, 20]).unwrap();
        assert!(f.values()[..20].iter().all(|&v| v == 0.5));
        assert_eq!(f.values()[20], 1.0);
        assert_eq!(f.len(), 21);

        assert_eq!(
            empirical_cdf(&[3, 5, 9]).unwrap(),
            empirical_cdf(&[9, 3, 5]).unwrap()
        );
        assert!(empirical_cdf(&[]).is_err());
        assert!(empirical_cdf(&[21]).is_err());
    }

    #[test]
    fn homogeneity_examples() {
        let r = homogeneity_test(&[3, 7, 7, 12], &[3, 7, 7, 12]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);

        let r = homogeneity_test(&[0, 0], &[20, 20]).unwrap();
        assert_eq!(r.statistic, 4.0);
        assert_eq!(r.bins_used, 2);
        assert_eq!(r.df, 1);
        assert!(r.p_value < 0.05);

        assert!(matches!(
            homogeneity_test(&[5, 5], &[5]),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn homogeneity_is_symmetric() {
        let a = [1, 4, 4, 9, 13, 13, 13, 20];
        let b = [2, 4, 9, 9, 10, 15, 17];
        let ab = homogeneity_test(&a, &b).unwrap();
        let ba = homogeneity_test(&b, &a).unwrap();
        assert!((ab.statistic - ba.statistic).abs() < 1e-12);
        assert_eq!(ab.df, ba.df);
    }

    #[test]
    fn rescale_identical_groups() {
        let s: Vec<u32> = (0..=20).chain(5..15).collect();
        let t = table(vec![("a", s.clone()), ("b", s.clone()), ("c", s)]);
        for scores in rescale_scores(&t).unwrap().values() {
            for r in scores {
                assert!((r.structural - f64::from(r.raw)).abs() <= 1.0, "{r:?}");
            }
        }
    }

    #[test]
    fn rescale_harsher_group_moves_up() {
        let g1: Vec<u32> = (2..=18).flat_map(|s| vec![s; 3]).collect();
        let g2: Vec<u32> = g1.iter().map(|s| s - 2).collect();
        let t = table(vec![("1", g1), ("2", g2)]);
        let out = rescale_scores(&t).unwrap();
        for r in &out["2"] {
            if r.raw > 0 && r.raw < 20 {
                assert!(r.structural >= f64::from(r.raw), "{r:?}");
            }
        }
        for r in &out["1"] {
            assert!(r.structural <= f64::from(r.raw) + 1.0, "{r:?}");
        }
        for scores in out.values() {
            let mut sorted = scores.clone();
            sorted.sort_by_key(|r| r.raw);
            assert!(sorted
                .windows(2)
                .all(|w| w[1].structural >= w[0].structural));
            assert!(scores.iter().all(|r| (0.0..=18.0).contains(&r.structural)));
        }
    }

    #[test]
    fn rescale_errors() {
        assert!(matches!(
            rescale_scores(&table(vec![("a", vec![1, 2])])),
            Err(Error::InsufficientSample { .. })
        ));
        assert!(matches!(
            rescale_scores(&table(vec![("a", vec![1, 2]), ("b", vec![4, 4])])),
            Err(Error::Degenerate { .. })
        ));
        let mut bad = BTreeMap::new();
        bad.insert("x".to_string(), vec![]);
        assert!(ScoreTable::new(bad).is_err());
    }

    #[test]
    fn pairwise_in_id_order() {
        let t = table(vec![
            ("b", vec![1, 2, 3]),
            ("a", vec![1, 2, 2]),
            ("c", vec![3, 3, 4]),
        ]);
        let tests = pairwise_tests(&t).unwrap();
        let pairs: Vec<(&str, &str)> = tests
            .iter()
            .map(|p| (p.group_i.as_str(), p.group_j.as_str()))
            .collect();
        assert_eq!(pairs, vec![("a", "b"), ("a", "c"), ("b", "c")]);
    }
}
