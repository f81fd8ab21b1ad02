//! Dataset representation and ingestion.
//!
//! A [`Dataset`] is an immutable table of [`Instance`]s over a fixed
//! feature schema with a fixed class list. Instance ids are assigned at
//! load time and are stable under filtering: a filtered dataset keeps the
//! original ids, so removed-instance reports stay meaningful across the
//! whole pipeline.
//!
//! Missing values are first-class cells, never imputed at load time; each
//! learner applies its own documented policy.

mod arff;
mod csv_io;
mod partition;
mod synthetic;

pub use arff::{load_arff, write_arff};
pub use csv_io::{load_csv, write_csv, ColumnKindHint, SchemaHints};
pub use partition::{stratified_partition, Partition, Protocol, RunFolds};
pub use synthetic::{generate_two_cluster, GeneratedDataset};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable identifier of an instance, preserved under filtering.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct InstanceId(pub u32);

impl std::fmt::Display for InstanceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Feature kind; nominal features carry their ordered category list.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureKind {
    Numeric,
    Nominal(Vec<String>),
}

impl FeatureKind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, FeatureKind::Numeric)
    }

    /// Category names for nominal features, empty slice for numeric ones.
    pub fn categories(&self) -> &[String] {
        match self {
            FeatureKind::Numeric => &[],
            FeatureKind::Nominal(cats) => cats,
        }
    }
}

/// Declared schema of one input column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Numeric,
        }
    }

    pub fn nominal(name: impl Into<String>, categories: Vec<String>) -> Result<Self> {
        let name = name.into();
        if categories.is_empty() {
            return Err(Error::InvalidDataset(format!(
                "nominal feature '{name}' has no categories"
            )));
        }
        let mut seen = BTreeSet::new();
        for c in &categories {
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "nominal feature '{name}' repeats category '{c}'"
                )));
            }
        }
        Ok(FeatureSpec {
            name,
            kind: FeatureKind::Nominal(categories),
        })
    }
}

/// One cell of an instance: a number, a category index, or missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Missing,
    Numeric(f64),
    Category(usize),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// A labelled instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: InstanceId,
    pub values: Vec<Cell>,
    /// Index into the dataset's class list.
    pub label: usize,
}

/// Immutable tabular dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<FeatureSpec>,
    /// Class names in first-appearance (or declared) order.
    pub classes: Vec<String>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Build a dataset, checking every structural invariant.
    pub fn new(
        name: impl Into<String>,
        features: Vec<FeatureSpec>,
        classes: Vec<String>,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let name = name.into();
        if classes.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "dataset '{name}' declares {} class(es); at least 2 required",
                classes.len()
            )));
        }
        let mut class_seen = BTreeSet::new();
        for c in &classes {
            if !class_seen.insert(c.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "dataset '{name}' repeats class '{c}'"
                )));
            }
        }
        let mut ids = BTreeSet::new();
        for inst in &instances {
            if !ids.insert(inst.id) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate instance id {}",
                    inst.id
                )));
            }
            if inst.values.len() != features.len() {
                return Err(Error::InvalidDataset(format!(
                    "instance {} has {} values, schema has {} features",
                    inst.id,
                    inst.values.len(),
                    features.len()
                )));
            }
            if inst.label >= classes.len() {
                return Err(Error::InvalidDataset(format!(
                    "instance {} label index {} out of range",
                    inst.id, inst.label
                )));
            }
            for (value, feature) in inst.values.iter().zip(&features) {
                match (value, &feature.kind) {
                    (Cell::Category(c), FeatureKind::Nominal(cats)) if *c >= cats.len() => {
                        return Err(Error::InvalidDataset(format!(
                            "instance {} category index {c} out of range for feature '{}'",
                            inst.id, feature.name
                        )));
                    }
                    (Cell::Category(_), FeatureKind::Numeric) => {
                        return Err(Error::InvalidDataset(format!(
                            "instance {} has a category cell in numeric feature '{}'",
                            inst.id, feature.name
                        )));
                    }
                    (Cell::Numeric(_), FeatureKind::Nominal(_)) => {
                        return Err(Error::InvalidDataset(format!(
                            "instance {} has a numeric cell in nominal feature '{}'",
                            inst.id, feature.name
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(Dataset {
            name,
            features,
            classes,
            instances,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = InstanceId> + '_ {
        self.instances.iter().map(|i| i.id)
    }

    pub fn id_set(&self) -> BTreeSet<InstanceId> {
        self.ids().collect()
    }

    /// Per-class instance counts, indexed like `classes`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.classes.len()];
        for inst in &self.instances {
            counts[inst.label] += 1;
        }
        counts
    }

    /// Most frequent class; ties resolve to the lower class index.
    pub fn majority_class(&self) -> usize {
        let counts = self.class_counts();
        let mut best = 0;
        for (c, n) in counts.iter().enumerate() {
            if *n > counts[best] {
                best = c;
            }
        }
        best
    }

    pub fn instance(&self, id: InstanceId) -> Option<&Instance> {
        self.instances.iter().find(|i| i.id == id)
    }

    /// Restrict to `keep_ids`, preserving original ids and instance order.
    pub fn subset(&self, keep_ids: &BTreeSet<InstanceId>) -> Result<Dataset> {
        let own: BTreeSet<InstanceId> = self.id_set();
        if let Some(unknown) = keep_ids.iter().find(|id| !own.contains(id)) {
            return Err(Error::InvalidArgument(format!(
                "subset refers to unknown instance id {unknown}"
            )));
        }
        Ok(Dataset {
            name: self.name.clone(),
            features: self.features.clone(),
            classes: self.classes.clone(),
            instances: self
                .instances
                .iter()
                .filter(|i| keep_ids.contains(&i.id))
                .cloned()
                .collect(),
        })
    }
}

/// Free-function form of [`Dataset::subset`].
pub fn subset(dataset: &Dataset, keep_ids: &BTreeSet<InstanceId>) -> Result<Dataset> {
    dataset.subset(keep_ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn toy_dataset() -> Dataset {
        let features = vec![
            FeatureSpec::numeric("x"),
            FeatureSpec::nominal("color", vec!["red".into(), "blue".into()]).unwrap(),
        ];
        let classes = vec!["a".to_string(), "b".to_string()];
        let instances = (0..6)
            .map(|i| Instance {
                id: InstanceId(i),
                values: vec![Cell::Numeric(f64::from(i)), Cell::Category((i % 2) as usize)],
                label: (i % 2) as usize,
            })
            .collect();
        Dataset::new("toy", features, classes, instances).unwrap()
    }

    #[test]
    fn new_rejects_single_class() {
        let err = Dataset::new(
            "bad",
            vec![FeatureSpec::numeric("x")],
            vec!["only".into()],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDataset(_)));
    }

    #[test]
    fn new_rejects_ragged_instance() {
        let err = Dataset::new(
            "bad",
            vec![FeatureSpec::numeric("x")],
            vec!["a".into(), "b".into()],
            vec![Instance {
                id: InstanceId(0),
                values: vec![Cell::Numeric(1.0), Cell::Numeric(2.0)],
                label: 0,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDataset(_)));
    }

    #[test]
    fn new_rejects_out_of_range_category() {
        let err = Dataset::new(
            "bad",
            vec![FeatureSpec::nominal("c", vec!["x".into()]).unwrap()],
            vec!["a".into(), "b".into()],
            vec![Instance {
                id: InstanceId(0),
                values: vec![Cell::Category(3)],
                label: 0,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDataset(_)));
    }

    #[test]
    fn subset_of_all_ids_is_identity() {
        let data = toy_dataset();
        let all = data.id_set();
        assert_eq!(data.subset(&all).unwrap(), data);
    }

    #[test]
    fn subset_to_empty_is_valid() {
        let data = toy_dataset();
        let empty = data.subset(&BTreeSet::new()).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.classes, data.classes);
        assert_eq!(empty.features, data.features);
    }

    #[test]
    fn subset_removing_one_id_keeps_the_rest() {
        let data = toy_dataset();
        let mut keep = data.id_set();
        keep.remove(&InstanceId(3));
        let sub = data.subset(&keep).unwrap();
        assert_eq!(sub.len(), data.len() - 1);
        assert_eq!(sub.id_set(), keep);
    }

    #[test]
    fn subset_rejects_unknown_id() {
        let data = toy_dataset();
        let mut keep = BTreeSet::new();
        keep.insert(InstanceId(999));
        assert!(data.subset(&keep).is_err());
    }

    proptest! {
        // subset(A) then subset(B) == subset(A ∩ B)
        #[test]
        fn subset_composes(a in proptest::collection::btree_set(0u32..6, 0..6),
                           b in proptest::collection::btree_set(0u32..6, 0..6)) {
            let data = toy_dataset();
            let a: BTreeSet<InstanceId> = a.into_iter().map(InstanceId).collect();
            let b: BTreeSet<InstanceId> = b.into_iter().map(InstanceId).collect();
            let ab: BTreeSet<InstanceId> = a.intersection(&b).copied().collect();
            let chained = data.subset(&a).unwrap().subset(&ab).unwrap();
            let direct = data.subset(&ab).unwrap();
            prop_assert_eq!(chained, direct);
        }
    }
}
