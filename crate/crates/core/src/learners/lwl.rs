//! Locally weighted voting: distance-weighted k-NN over a fixed-size
//! neighbourhood with a linear or inverse kernel.

use crate::data::{Cell, Dataset, Instance, InstanceId};
use crate::learners::distance::DistanceContext;
use crate::learners::knn::argmax_lowest_tie;
use crate::learners::Hyperparameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Linear,
    Inverse,
}

#[derive(Debug)]
pub(crate) struct LwlModel {
    neighborhood: usize,
    kernel: Kernel,
    ctx: DistanceContext,
    train: Vec<(InstanceId, Vec<Cell>, usize)>,
    n_classes: usize,
}

pub(crate) fn fit(params: &Hyperparameters, data: &Dataset) -> LwlModel {
    let kernel = match params.get_choice("kernel") {
        "inverse" => Kernel::Inverse,
        _ => Kernel::Linear,
    };
    LwlModel {
        neighborhood: params.get_int("neighborhood") as usize,
        kernel,
        ctx: DistanceContext::fit(data),
        train: data
            .instances
            .iter()
            .map(|i| (i.id, i.values.clone(), i.label))
            .collect(),
        n_classes: data.classes.len(),
    }
}

impl LwlModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        let mut neighbours: Vec<(f64, InstanceId, usize)> = self
            .train
            .iter()
            .map(|(id, values, label)| (self.ctx.distance(&instance.values, values), *id, *label))
            .collect();
        neighbours.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        neighbours.truncate(self.neighborhood.max(1));

        let d_max = neighbours.last().map(|(d, _, _)| *d).unwrap_or(0.0);
        let mut votes = vec![0.0f64; self.n_classes];
        for (d, _, label) in &neighbours {
            let w = match self.kernel {
                // Furthest neighbour gets weight 0, an exact match weight 1.
                Kernel::Linear => {
                    if d_max > 0.0 {
                        1.0 - d / d_max
                    } else {
                        1.0
                    }
                }
                Kernel::Inverse => 1.0 / (d + 1e-12),
            };
            votes[*label] += w;
        }
        argmax_lowest_tie(&votes)
    }
}
