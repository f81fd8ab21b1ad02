//! Mixed euclidean-overlap distance shared by the neighbourhood learners.

use crate::data::{Cell, Dataset, FeatureKind};

/// Per-training-set normalization state.
#[derive(Debug, Clone)]
pub(crate) struct DistanceContext {
    /// (min, max) of each numeric feature over the training set; None for
    /// nominal features or all-missing numeric columns.
    ranges: Vec<Option<(f64, f64)>>,
}

impl DistanceContext {
    pub fn fit(data: &Dataset) -> Self {
        let ranges = data
            .features
            .iter()
            .enumerate()
            .map(|(f, spec)| match spec.kind {
                FeatureKind::Nominal(_) => None,
                FeatureKind::Numeric => {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for inst in &data.instances {
                        if let Cell::Numeric(v) = inst.values[f] {
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    if lo.is_finite() {
                        Some((lo, hi))
                    } else {
                        None
                    }
                }
            })
            .collect();
        DistanceContext { ranges }
    }

    /// HEOM-style distance: per feature, overlap for nominal values,
    /// range-normalized absolute difference for numeric values, and 1.0
    /// when either cell is missing; aggregated as sqrt of squared sums.
    pub fn distance(&self, a: &[Cell], b: &[Cell]) -> f64 {
        let mut sum = 0.0;
        for (f, range) in self.ranges.iter().enumerate() {
            let d = match (&a[f], &b[f]) {
                (Cell::Missing, _) | (_, Cell::Missing) => 1.0,
                (Cell::Category(x), Cell::Category(y)) => {
                    if x == y {
                        0.0
                    } else {
                        1.0
                    }
                }
                (Cell::Numeric(x), Cell::Numeric(y)) => match range {
                    Some((lo, hi)) if hi > lo => (x - y).abs() / (hi - lo),
                    _ => {
                        if x == y {
                            0.0
                        } else {
                            1.0
                        }
                    }
                },
                // Mixed cell kinds cannot reach here on schema-checked probes.
                _ => 1.0,
            };
            sum += d * d;
        }
        sum.sqrt()
    }
}
