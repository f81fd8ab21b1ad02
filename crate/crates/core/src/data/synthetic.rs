//! Synthetic two-cluster generator with planted detrimental instances.
//!
//! Two 2-D Gaussian clusters sit on the x axis, one per class. `overlap`
//! scales cluster spread relative to the fixed separation: at 0 the
//! clusters are ~20 standard deviations apart, at 1 they blend heavily.
//! Planted detrimental instances keep a class label but are drawn tightly
//! around the *opposing* cluster's centre, so they sit deep inside enemy
//! territory and drag any induced boundary toward it.

use rand_distr::{Distribution, Normal};

use crate::data::{Cell, Dataset, FeatureSpec, Instance, InstanceId};
use crate::error::{Error, Result};
use crate::seeds;

const SEPARATION: f64 = 8.0;
const BASE_SIGMA: f64 = 0.4;
const MAX_EXTRA_SIGMA: f64 = 3.6;
/// Planted points cluster this tightly around the enemy centre.
const PLANT_SIGMA_FACTOR: f64 = 1.0 / 3.0;

/// A generated dataset plus the ids of the planted detrimental instances.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDataset {
    pub dataset: Dataset,
    pub detrimental_ids: Vec<InstanceId>,
}

/// Generate `2 * n_per_class` instances; `n_detrimental` per class are
/// planted inside the opposing cluster (Figure-1 style noise).
pub fn generate_two_cluster(
    n_per_class: usize,
    overlap: f64,
    n_detrimental: usize,
    seed: u64,
) -> Result<GeneratedDataset> {
    if n_per_class < 1 {
        return Err(Error::InvalidArgument("n_per_class must be at least 1".into()));
    }
    if n_detrimental > n_per_class {
        return Err(Error::InvalidArgument(format!(
            "n_detrimental {n_detrimental} exceeds n_per_class {n_per_class}"
        )));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::InvalidArgument(format!(
            "overlap must lie in [0,1], got {overlap}"
        )));
    }

    let sigma = BASE_SIGMA + MAX_EXTRA_SIGMA * overlap;
    let plant_sigma = sigma * PLANT_SIGMA_FACTOR;
    let centers = [(-SEPARATION / 2.0, 0.0), (SEPARATION / 2.0, 0.0)];

    let mut rng = seeds::rng(seed);
    let mut instances = Vec::with_capacity(2 * n_per_class);
    let mut detrimental_ids = Vec::with_capacity(2 * n_detrimental);
    let mut next_id = 0u32;

    let sample = |rng: &mut rand_chacha::ChaCha8Rng, center: (f64, f64), s: f64| {
        let dist = Normal::new(0.0, s).expect("positive sigma");
        (center.0 + dist.sample(rng), center.1 + dist.sample(rng))
    };

    for class in 0..2usize {
        let own = centers[class];
        let enemy = centers[1 - class];
        for i in 0..n_per_class {
            let planted = i >= n_per_class - n_detrimental;
            let (x, y) = if planted {
                sample(&mut rng, enemy, plant_sigma)
            } else {
                sample(&mut rng, own, sigma)
            };
            let id = InstanceId(next_id);
            next_id += 1;
            if planted {
                detrimental_ids.push(id);
            }
            instances.push(Instance {
                id,
                values: vec![Cell::Numeric(x), Cell::Numeric(y)],
                label: class,
            });
        }
    }

    let dataset = Dataset::new(
        format!("two_cluster_n{n_per_class}_d{n_detrimental}_s{seed}"),
        vec![FeatureSpec::numeric("x"), FeatureSpec::numeric("y")],
        vec!["a".to_string(), "b".to_string()],
        instances,
    )?;
    Ok(GeneratedDataset {
        dataset,
        detrimental_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Leave-one-out 1-NN accuracy, used as an independent separability oracle.
    fn loo_1nn_accuracy(data: &Dataset) -> f64 {
        let points: Vec<(f64, f64, usize)> = data
            .instances
            .iter()
            .map(|i| match (&i.values[0], &i.values[1]) {
                (Cell::Numeric(x), Cell::Numeric(y)) => (*x, *y, i.label),
                _ => panic!("numeric cells expected"),
            })
            .collect();
        let mut correct = 0usize;
        for (i, (x, y, label)) in points.iter().enumerate() {
            let mut best = None;
            for (j, (ox, oy, olabel)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = (x - ox).powi(2) + (y - oy).powi(2);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, *olabel));
                }
            }
            if best.expect("n >= 2").1 == *label {
                correct += 1;
            }
        }
        correct as f64 / points.len() as f64
    }

    #[test]
    fn clean_separated_clusters_are_loo_perfect() {
        let gen = generate_two_cluster(50, 0.0, 0, 41).unwrap();
        assert_eq!(loo_1nn_accuracy(&gen.dataset), 1.0);
    }

    #[test]
    fn flags_exactly_the_planted_instances() {
        let gen = generate_two_cluster(50, 0.2, 5, 7).unwrap();
        assert_eq!(gen.detrimental_ids.len(), 10);
        assert_eq!(gen.dataset.len(), 100);
        // Planted instances sit nearer the enemy centre than their own.
        for id in &gen.detrimental_ids {
            let inst = gen.dataset.instance(*id).unwrap();
            let x = match inst.values[0] {
                Cell::Numeric(x) => x,
                _ => unreachable!(),
            };
            let own_center = if inst.label == 0 { -4.0 } else { 4.0 };
            assert!(
                (x - own_center).abs() > (x + own_center).abs(),
                "planted instance {id} is not in enemy territory"
            );
        }
    }

    #[test]
    fn same_seed_is_identical_different_seed_is_not() {
        let a = generate_two_cluster(20, 0.3, 2, 5).unwrap();
        let b = generate_two_cluster(20, 0.3, 2, 5).unwrap();
        let c = generate_two_cluster(20, 0.3, 2, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.dataset.instances, c.dataset.instances);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generate_two_cluster(0, 0.5, 0, 1).is_err());
        assert!(generate_two_cluster(5, 0.5, 6, 1).is_err());
        assert!(generate_two_cluster(5, 1.5, 1, 1).is_err());
    }
}
