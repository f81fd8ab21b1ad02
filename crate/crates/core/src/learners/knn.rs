//! k-nearest neighbours with uniform or inverse-distance vote weighting.

use crate::data::{Cell, Dataset, Instance, InstanceId};
use crate::learners::distance::DistanceContext;
use crate::learners::Hyperparameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug)]
pub(crate) struct KnnModel {
    k: usize,
    weighting: Weighting,
    ctx: DistanceContext,
    train: Vec<(InstanceId, Vec<Cell>, usize)>,
    n_classes: usize,
}

pub(crate) fn fit(params: &Hyperparameters, data: &Dataset) -> KnnModel {
    let weighting = match params.get_choice("weighting") {
        "inverse-distance" => Weighting::InverseDistance,
        _ => Weighting::Uniform,
    };
    KnnModel {
        k: params.get_int("k") as usize,
        weighting,
        ctx: DistanceContext::fit(data),
        train: data
            .instances
            .iter()
            .map(|i| (i.id, i.values.clone(), i.label))
            .collect(),
        n_classes: data.classes.len(),
    }
}

impl KnnModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        // Sort by (distance, id) so equal-distance ties are stable under
        // any training-instance order.
        let mut neighbours: Vec<(f64, InstanceId, usize)> = self
            .train
            .iter()
            .map(|(id, values, label)| (self.ctx.distance(&instance.values, values), *id, *label))
            .collect();
        neighbours.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        neighbours.truncate(self.k.max(1));

        let mut votes = vec![0.0f64; self.n_classes];
        for (d, _, label) in &neighbours {
            let w = match self.weighting {
                Weighting::Uniform => 1.0,
                Weighting::InverseDistance => 1.0 / (d + 1e-12),
            };
            votes[*label] += w;
        }
        argmax_lowest_tie(&votes)
    }
}

/// Index of the maximum; ties resolve to the lower index.
pub(crate) fn argmax_lowest_tie(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}
