//! End-to-end structural expectation of a bundle on its common grid.

use crate::curves::{nearest_index_sorted, CurveBundle, MonotoneInterpolant, SampledCurve};
use crate::error::Result;
use crate::estimators::{default_ordinates, forward_se, inverse_se};
use crate::monotonize::structural_mean_registered;

#[derive(Clone, Debug)]
pub struct StructuralEstimate {
    /// Estimate on the common grid, in the units of the input values.
    pub curve: SampledCurve,
    /// Forward interpolant; `None` when the bundle went through monotonization.
    pub forward: Option<MonotoneInterpolant>,
    pub monotonized: bool,
    /// `registration[i][j]`: the sample of curve `i` matched to structural
    /// time `t_j`.
    pub registration: Vec<Vec<usize>>,
}

/// Strictly increasing bundles go through the inverse/forward estimators
/// directly; anything else is monotonized first and mapped back to values.
pub fn structural_estimate(bundle: &CurveBundle) -> Result<StructuralEstimate> {
    let grid = bundle.require_common_grid("pipeline")?;
    if bundle
        .curves()
        .iter()
        .all(SampledCurve::is_strictly_increasing)
    {
        let inv = inverse_se(bundle, &default_ordinates(bundle))?;
        let forward = forward_se(&inv)?;
        let values = grid
            .points()
            .iter()
            .map(|&t| forward.eval(t))
            .collect::<Result<Vec<_>>>()?;
        let registration = bundle
            .curves()
            .iter()
            .map(|c| {
                values
                    .iter()
                    .map(|&v| nearest_index_sorted(c.values(), v))
                    .collect()
            })
            .collect();
        Ok(StructuralEstimate {
            curve: SampledCurve::new(grid.clone(), values)?,
            forward: Some(forward),
            monotonized: false,
            registration,
        })
    } else {
        let (curve, registration) = structural_mean_registered(bundle)?;
        Ok(StructuralEstimate {
            curve,
            forward: None,
            monotonized: true,
            registration,
        })
    }
}
