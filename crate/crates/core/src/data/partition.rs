//! Stratified partitions for repeated k-fold cross-validation.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::data::{Dataset, InstanceId};
use crate::error::{Error, Result};
use crate::seeds;

/// Cross-validation protocol: `runs` repetitions of `folds`-fold CV, with
/// every stochastic choice derived from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Protocol {
    pub runs: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Protocol {
    pub fn new(runs: usize, folds: usize, seed: u64) -> Self {
        Protocol { runs, folds, seed }
    }

    pub fn partition(&self, dataset: &Dataset) -> Result<Partition> {
        stratified_partition(dataset, self.folds, self.runs, self.seed)
    }
}

/// Fold assignment for one run: `folds[f]` holds the test ids of fold `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFolds {
    pub folds: Vec<Vec<InstanceId>>,
}

impl RunFolds {
    pub fn test_ids(&self, fold: usize) -> &[InstanceId] {
        &self.folds[fold]
    }

    /// Ids outside `fold`, i.e. the training split.
    pub fn train_ids(&self, fold: usize) -> BTreeSet<InstanceId> {
        self.folds
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != fold)
            .flat_map(|(_, ids)| ids.iter().copied())
            .collect()
    }
}

/// Repeated stratified fold assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub k: usize,
    pub seed: u64,
    pub runs: Vec<RunFolds>,
}

/// Assigns every instance to exactly one of `k` folds, per run.
///
/// Per run, each class's ids are shuffled with the run's RNG stream and
/// dealt round-robin into folds; the dealer keeps its position across
/// classes so total fold sizes stay balanced. Per fold and class, the count
/// differs from the ideal proportional count by at most one.
pub fn stratified_partition(
    dataset: &Dataset,
    k: usize,
    runs: usize,
    seed: u64,
) -> Result<Partition> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if k > dataset.len() {
        return Err(Error::InvalidArgument(format!(
            "fold count {k} exceeds instance count {}",
            dataset.len()
        )));
    }
    if runs < 1 {
        return Err(Error::InvalidArgument("run count must be at least 1".into()));
    }

    let mut by_class: Vec<Vec<InstanceId>> = vec![Vec::new(); dataset.classes.len()];
    for inst in &dataset.instances {
        by_class[inst.label].push(inst.id);
    }

    let mut run_folds = Vec::with_capacity(runs);
    for run in 0..runs {
        let mut rng = seeds::rng(seeds::mix(seed, run as u64));
        let mut folds: Vec<Vec<InstanceId>> = vec![Vec::new(); k];
        let mut dealer = 0usize;
        for ids in &by_class {
            let mut shuffled = ids.clone();
            shuffled.shuffle(&mut rng);
            for id in shuffled {
                folds[dealer % k].push(id);
                dealer += 1;
            }
        }
        for fold in &mut folds {
            fold.sort_unstable();
        }
        run_folds.push(RunFolds { folds });
    }

    Ok(Partition {
        k,
        seed,
        runs: run_folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Cell, FeatureSpec, Instance};

    fn dataset_with_classes(counts: &[usize]) -> Dataset {
        let features = vec![FeatureSpec::numeric("x")];
        let classes = (0..counts.len().max(2))
            .map(|c| format!("c{c}"))
            .collect();
        let mut instances = Vec::new();
        let mut next = 0u32;
        for (label, n) in counts.iter().enumerate() {
            for _ in 0..*n {
                instances.push(Instance {
                    id: InstanceId(next),
                    values: vec![Cell::Numeric(f64::from(next))],
                    label,
                });
                next += 1;
            }
        }
        Dataset::new("synthetic", features, classes, instances).unwrap()
    }

    #[test]
    fn balanced_classes_force_one_per_fold() {
        let data = dataset_with_classes(&[5, 5]);
        let partition = stratified_partition(&data, 5, 1, 3).unwrap();
        for fold in &partition.runs[0].folds {
            assert_eq!(fold.len(), 2);
            let labels: Vec<usize> = fold
                .iter()
                .map(|id| data.instance(*id).unwrap().label)
                .collect();
            assert!(labels.contains(&0) && labels.contains(&1));
        }
    }

    #[test]
    fn folds_partition_the_id_set() {
        let data = dataset_with_classes(&[7, 11, 3]);
        let partition = stratified_partition(&data, 4, 3, 99).unwrap();
        for run in &partition.runs {
            let mut seen = BTreeSet::new();
            for fold in &run.folds {
                for id in fold {
                    assert!(seen.insert(*id), "id {id} appears in two folds");
                }
            }
            assert_eq!(seen, data.id_set());
        }
    }

    #[test]
    fn stratification_within_one_of_ideal() {
        let data = dataset_with_classes(&[23, 9, 5]);
        let k = 4;
        let partition = stratified_partition(&data, k, 2, 1).unwrap();
        let counts = data.class_counts();
        for run in &partition.runs {
            for fold in &run.folds {
                for (class, total) in counts.iter().enumerate() {
                    let in_fold = fold
                        .iter()
                        .filter(|id| data.instance(**id).unwrap().label == class)
                        .count() as f64;
                    let ideal = *total as f64 / k as f64;
                    assert!(
                        (in_fold - ideal.round()).abs() <= 1.0,
                        "class {class}: {in_fold} in fold vs ideal {ideal}"
                    );
                }
            }
        }
    }

    #[test]
    fn same_seed_reproduces_assignment() {
        let data = dataset_with_classes(&[10, 14]);
        let a = stratified_partition(&data, 5, 3, 77).unwrap();
        let b = stratified_partition(&data, 5, 3, 77).unwrap();
        assert_eq!(a, b);
        let c = stratified_partition(&data, 5, 3, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_more_folds_than_instances() {
        let data = dataset_with_classes(&[2, 2]);
        assert!(stratified_partition(&data, 5, 1, 0).is_err());
    }

    #[test]
    fn tiny_class_lands_in_some_folds_only() {
        let data = dataset_with_classes(&[12, 2]);
        let partition = stratified_partition(&data, 6, 1, 5).unwrap();
        let run = &partition.runs[0];
        let folds_with_minority = run
            .folds
            .iter()
            .filter(|fold| {
                fold.iter()
                    .any(|id| data.instance(*id).unwrap().label == 1)
            })
            .count();
        assert_eq!(folds_with_minority, 2);
    }

    #[test]
    fn train_ids_complement_test_ids() {
        let data = dataset_with_classes(&[8, 8]);
        let partition = stratified_partition(&data, 4, 1, 9).unwrap();
        let run = &partition.runs[0];
        for f in 0..4 {
            let train = run.train_ids(f);
            for id in run.test_ids(f) {
                assert!(!train.contains(id));
            }
            assert_eq!(train.len() + run.test_ids(f).len(), data.len());
        }
    }
}
