//! Decision tree with information-gain splits and pessimistic error
//! pruning, plus a bagged random forest built on the same tree grower.
//!
//! Split candidates are scanned in feature order with a strict-improvement
//! rule, so ties break toward the first-listed feature and, within a
//! numeric feature, toward the lower threshold. Missing values are routed
//! down the branch that received the most known training instances.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::{Cell, Dataset, FeatureKind, Instance};
use crate::learners::knn::argmax_lowest_tie;
use crate::learners::Hyperparameters;
use crate::seeds;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        kind: SplitKind,
        children: Vec<Node>,
        missing_child: usize,
    },
}

#[derive(Debug, Clone)]
enum SplitKind {
    /// Two children: values <= threshold go left.
    Numeric { threshold: f64 },
    /// One child per category index.
    Nominal,
}

struct Grower<'a> {
    data: &'a Dataset,
    n_classes: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    /// Number of candidate features per split; None considers all.
    m_features: Option<usize>,
}

impl<'a> Grower<'a> {
    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &r in rows {
            counts[self.data.instances[r].label] += 1;
        }
        counts
    }

    fn grow(&self, rows: &[usize], depth: usize, rng: &mut ChaCha8Rng) -> Node {
        let counts = self.class_counts(rows);
        let majority = argmax_usize(&counts);
        let pure = counts.iter().filter(|c| **c > 0).count() <= 1;
        let depth_capped = self.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < 2 * self.min_leaf {
            return Node::Leaf { class: majority };
        }

        let candidates = self.candidate_features(rng);
        let mut best: Option<(f64, usize, SplitKind)> = None;
        for f in candidates {
            let proposal = match self.data.features[f].kind {
                FeatureKind::Numeric => self.best_numeric_split(rows, f),
                FeatureKind::Nominal(_) => self.nominal_split_gain(rows, f),
            };
            if let Some((gain, kind)) = proposal {
                if best.as_ref().map_or(true, |(g, _, _)| gain > *g) {
                    best = Some((gain, f, kind));
                }
            }
        }

        let Some((gain, feature, kind)) = best else {
            return Node::Leaf { class: majority };
        };
        if gain <= MIN_GAIN {
            return Node::Leaf { class: majority };
        }

        let (routes, missing_child) = self.route(rows, feature, &kind);
        let children = routes
            .iter()
            .map(|child_rows| {
                if child_rows.is_empty() {
                    Node::Leaf { class: majority }
                } else {
                    self.grow(child_rows, depth + 1, rng)
                }
            })
            .collect();
        Node::Split {
            feature,
            kind,
            children,
            missing_child,
        }
    }

    fn candidate_features(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.data.features.len();
        match self.m_features {
            None => (0..n).collect(),
            Some(m) if m >= n => (0..n).collect(),
            Some(m) => {
                let mut all: Vec<usize> = (0..n).collect();
                let (sampled, _) = all.partial_shuffle(rng, m);
                let mut sampled = sampled.to_vec();
                sampled.sort_unstable();
                sampled
            }
        }
    }

    /// Best numeric threshold by information gain over known values,
    /// scaled by the known fraction. Returns None when no threshold keeps
    /// `min_leaf` known instances on both sides.
    fn best_numeric_split(&self, rows: &[usize], feature: usize) -> Option<(f64, SplitKind)> {
        let mut known: Vec<(f64, usize)> = rows
            .iter()
            .filter_map(|&r| {
                let inst = &self.data.instances[r];
                match inst.values[feature] {
                    Cell::Numeric(v) => Some((v, inst.label)),
                    _ => None,
                }
            })
            .collect();
        if known.len() < 2 * self.min_leaf {
            return None;
        }
        known.sort_by(|a, b| a.0.total_cmp(&b.0));

        let total: Vec<usize> = {
            let mut t = vec![0usize; self.n_classes];
            for (_, label) in &known {
                t[*label] += 1;
            }
            t
        };
        let h_known = entropy(&total);
        let known_frac = known.len() as f64 / rows.len() as f64;
        let n_known = known.len() as f64;

        let mut left = vec![0usize; self.n_classes];
        let mut best: Option<(f64, f64)> = None; // (gain, threshold)
        for i in 0..known.len() - 1 {
            left[known[i].1] += 1;
            if known[i].0 == known[i + 1].0 {
                continue;
            }
            let n_left = i + 1;
            let n_right = known.len() - n_left;
            if n_left < self.min_leaf || n_right < self.min_leaf {
                continue;
            }
            let right: Vec<usize> = total
                .iter()
                .zip(&left)
                .map(|(t, l)| t - l)
                .collect();
            let h_split = (n_left as f64 / n_known) * entropy(&left)
                + (n_right as f64 / n_known) * entropy(&right);
            let gain = (h_known - h_split) * known_frac;
            if best.map_or(true, |(g, _)| gain > g) {
                let threshold = (known[i].0 + known[i + 1].0) / 2.0;
                best = Some((gain, threshold));
            }
        }
        best.map(|(gain, threshold)| (gain, SplitKind::Numeric { threshold }))
    }

    /// Multiway nominal split gain; valid when at least two categories hold
    /// `min_leaf` known instances.
    fn nominal_split_gain(&self, rows: &[usize], feature: usize) -> Option<(f64, SplitKind)> {
        let n_cats = self.data.features[feature].kind.categories().len();
        let mut per_cat = vec![vec![0usize; self.n_classes]; n_cats];
        let mut n_known = 0usize;
        for &r in rows {
            let inst = &self.data.instances[r];
            if let Cell::Category(c) = inst.values[feature] {
                per_cat[c][inst.label] += 1;
                n_known += 1;
            }
        }
        let viable = per_cat
            .iter()
            .filter(|counts| counts.iter().sum::<usize>() >= self.min_leaf)
            .count();
        if viable < 2 || n_known == 0 {
            return None;
        }
        let total: Vec<usize> = (0..self.n_classes)
            .map(|class| per_cat.iter().map(|c| c[class]).sum())
            .collect();
        let h_known = entropy(&total);
        let mut h_split = 0.0;
        for counts in &per_cat {
            let n_cat: usize = counts.iter().sum();
            if n_cat > 0 {
                h_split += (n_cat as f64 / n_known as f64) * entropy(counts);
            }
        }
        let known_frac = n_known as f64 / rows.len() as f64;
        Some(((h_known - h_split) * known_frac, SplitKind::Nominal))
    }

    /// Partition rows among the split's children; missing values go to the
    /// child with the most known instances (ties toward the lower child).
    fn route(&self, rows: &[usize], feature: usize, kind: &SplitKind) -> (Vec<Vec<usize>>, usize) {
        let n_children = match kind {
            SplitKind::Numeric { .. } => 2,
            SplitKind::Nominal => self.data.features[feature].kind.categories().len(),
        };
        let mut routes: Vec<Vec<usize>> = vec![Vec::new(); n_children];
        let mut missing: Vec<usize> = Vec::new();
        for &r in rows {
            match (&self.data.instances[r].values[feature], kind) {
                (Cell::Numeric(v), SplitKind::Numeric { threshold }) => {
                    routes[usize::from(*v > *threshold)].push(r);
                }
                (Cell::Category(c), SplitKind::Nominal) => routes[*c].push(r),
                _ => missing.push(r),
            }
        }
        let sizes: Vec<f64> = routes.iter().map(|r| r.len() as f64).collect();
        let missing_child = argmax_lowest_tie(&sizes);
        routes[missing_child].extend(missing);
        (routes, missing_child)
    }
}

fn argmax_usize(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, c) in counts.iter().enumerate().skip(1) {
        if *c > counts[best] {
            best = i;
        }
    }
    best
}

fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.ln();
        }
    }
    h
}

/// Upper confidence bound on the error rate of a leaf that misclassifies
/// `e` of `n` training instances, at the given confidence level.
fn pessimistic_error_rate(e: f64, n: f64, z: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    let f = e / n;
    let z2 = z * z;
    let num = f + z2 / (2.0 * n) + z * (f / n - f * f / n + z2 / (4.0 * n * n)).max(0.0).sqrt();
    (num / (1.0 + z2 / n)).min(1.0)
}

struct Pruner<'a> {
    data: &'a Dataset,
    n_classes: usize,
    z: f64,
}

impl<'a> Pruner<'a> {
    /// Returns the pruned node and its pessimistic error count on `rows`.
    fn prune(&self, node: Node, rows: &[usize]) -> (Node, f64) {
        let mut counts = vec![0usize; self.n_classes];
        for &r in rows {
            counts[self.data.instances[r].label] += 1;
        }
        let n = rows.len() as f64;
        let majority = argmax_usize(&counts);
        let leaf_errors = (rows.len() - counts[majority]) as f64;
        let as_leaf = n * pessimistic_error_rate(leaf_errors, n, self.z);

        match node {
            Node::Leaf { class } => (Node::Leaf { class }, as_leaf.max(0.0)),
            Node::Split {
                feature,
                kind,
                children,
                missing_child,
            } => {
                // Re-route the training rows to evaluate each child on the
                // instances it actually received.
                let mut routes: Vec<Vec<usize>> = vec![Vec::new(); children.len()];
                for &r in rows {
                    match (&self.data.instances[r].values[feature], &kind) {
                        (Cell::Numeric(v), SplitKind::Numeric { threshold }) => {
                            routes[usize::from(*v > *threshold)].push(r);
                        }
                        (Cell::Category(c), SplitKind::Nominal) => routes[*c].push(r),
                        _ => routes[missing_child].push(r),
                    }
                }
                let mut subtree_error = 0.0;
                let pruned: Vec<Node> = children
                    .into_iter()
                    .zip(&routes)
                    .map(|(child, child_rows)| {
                        let (node, err) = self.prune(child, child_rows);
                        subtree_error += err;
                        node
                    })
                    .collect();
                if as_leaf <= subtree_error + 1e-9 {
                    (Node::Leaf { class: majority }, as_leaf)
                } else {
                    (
                        Node::Split {
                            feature,
                            kind,
                            children: pruned,
                            missing_child,
                        },
                        subtree_error,
                    )
                }
            }
        }
    }
}

fn predict_node(node: &Node, instance: &Instance) -> usize {
    match node {
        Node::Leaf { class } => *class,
        Node::Split {
            feature,
            kind,
            children,
            missing_child,
        } => {
            let child = match (&instance.values[*feature], kind) {
                (Cell::Numeric(v), SplitKind::Numeric { threshold }) => usize::from(*v > *threshold),
                (Cell::Category(c), SplitKind::Nominal) => *c,
                _ => *missing_child,
            };
            predict_node(&children[child], instance)
        }
    }
}

#[derive(Debug)]
pub(crate) struct TreeModel {
    root: Node,
}

impl TreeModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        predict_node(&self.root, instance)
    }
}

pub(crate) fn fit_tree(params: &Hyperparameters, data: &Dataset) -> TreeModel {
    let min_leaf = params.get_int("min_leaf") as usize;
    let confidence = params.get_real("confidence");
    let prune = params.get_choice("pruning") == "on";
    TreeModel {
        root: build_tree(data, min_leaf, None, None, prune.then_some(confidence), &mut seeds::rng(0)),
    }
}

fn build_tree(
    data: &Dataset,
    min_leaf: usize,
    max_depth: Option<usize>,
    m_features: Option<usize>,
    prune_confidence: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Node {
    let grower = Grower {
        data,
        n_classes: data.classes.len(),
        min_leaf,
        max_depth,
        m_features,
    };
    let rows: Vec<usize> = (0..data.len()).collect();
    let root = grower.grow(&rows, 0, rng);
    match prune_confidence {
        None => root,
        Some(confidence) => {
            let z = Normal::new(0.0, 1.0)
                .expect("unit normal")
                .inverse_cdf(1.0 - confidence);
            let pruner = Pruner {
                data,
                n_classes: data.classes.len(),
                z,
            };
            pruner.prune(root, &rows).0
        }
    }
}

#[derive(Debug)]
pub(crate) struct ForestModel {
    trees: Vec<Node>,
    n_classes: usize,
}

impl ForestModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        let mut votes = vec![0.0f64; self.n_classes];
        for tree in &self.trees {
            votes[predict_node(tree, instance)] += 1.0;
        }
        argmax_lowest_tie(&votes)
    }
}

/// `bootstrap` is always true through the public interface; the direct
/// call with `false` exists so tests can check the single-tree forest
/// against the plain decision tree.
pub(crate) fn fit_forest(
    params: &Hyperparameters,
    data: &Dataset,
    seed: u64,
    bootstrap: bool,
) -> ForestModel {
    let n_trees = params.get_int("trees") as usize;
    let n_features = data.features.len();
    let m = match params.get_choice("features_per_split") {
        "sqrt" => Some(((n_features as f64).sqrt().floor() as usize).max(1)),
        "log2" => Some(((n_features as f64).log2().floor() as usize).max(1)),
        _ => None,
    };
    let max_depth = match params.get_choice("unlimited_depth") {
        "on" => None,
        _ => Some(params.get_int("max_depth") as usize),
    };

    let tree_seeds: Vec<u64> = (0..n_trees).map(|t| seeds::mix(seed, t as u64)).collect();
    let trees: Vec<Node> = tree_seeds
        .par_iter()
        .map(|tree_seed| {
            let mut rng = seeds::rng(*tree_seed);
            let sample: Vec<usize> = if bootstrap {
                (0..data.len())
                    .map(|_| rng.gen_range(0..data.len()))
                    .collect()
            } else {
                (0..data.len()).collect()
            };
            let grower = Grower {
                data,
                n_classes: data.classes.len(),
                min_leaf: 1,
                max_depth,
                m_features: m,
            };
            grower.grow(&sample, 0, &mut rng)
        })
        .collect();

    ForestModel {
        trees,
        n_classes: data.classes.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSpec, InstanceId};
    use crate::learners::{default_hyperparameters, AlgorithmId};

    fn xor_like_dataset() -> Dataset {
        // label = (x > 0.5) xor (c == q); needs two levels of splits.
        let mut instances = Vec::new();
        for (i, (x, c)) in [
            (0.0, 0),
            (0.1, 0),
            (0.2, 0),
            (0.9, 0),
            (1.0, 0),
            (0.8, 0),
            (0.0, 1),
            (0.1, 1),
            (0.2, 1),
            (0.9, 1),
            (1.0, 1),
            (0.8, 1),
        ]
        .iter()
        .enumerate()
        {
            let label = usize::from((*x > 0.5) ^ (*c == 1));
            instances.push(Instance {
                id: InstanceId(i as u32),
                values: vec![Cell::Numeric(*x), Cell::Category(*c)],
                label,
            });
        }
        Dataset::new(
            "xor",
            vec![
                FeatureSpec::numeric("x"),
                FeatureSpec::nominal("c", vec!["p".into(), "q".into()]).unwrap(),
            ],
            vec!["n".into(), "y".into()],
            instances,
        )
        .unwrap()
    }

    #[test]
    fn learns_a_two_level_concept() {
        let data = xor_like_dataset();
        let params = default_hyperparameters(AlgorithmId::DecisionTree).int("min_leaf", 1);
        let model = fit_tree(&params, &data);
        for inst in &data.instances {
            assert_eq!(model.predict(inst), inst.label, "instance {}", inst.id);
        }
    }

    #[test]
    fn pruning_collapses_noise_splits() {
        // One contradictory instance inside an otherwise pure block: an
        // unpruned tree carves an exception, the pruned tree should not.
        let mut instances: Vec<Instance> = (0..20)
            .map(|i| Instance {
                id: InstanceId(i),
                values: vec![Cell::Numeric(f64::from(i))],
                label: usize::from(i >= 10),
            })
            .collect();
        instances[4].label = 1; // noise
        let data = Dataset::new(
            "noisy",
            vec![FeatureSpec::numeric("x")],
            vec!["a".into(), "b".into()],
            instances,
        )
        .unwrap();
        let pruned = fit_tree(
            &default_hyperparameters(AlgorithmId::DecisionTree)
                .int("min_leaf", 1)
                .real("confidence", 0.05),
            &data,
        );
        let probe = Instance {
            id: InstanceId(99),
            values: vec![Cell::Numeric(4.2)],
            label: 0,
        };
        assert_eq!(pruned.predict(&probe), 0);
    }

    #[test]
    fn missing_values_follow_majority_branch() {
        let data = xor_like_dataset();
        let params = default_hyperparameters(AlgorithmId::DecisionTree).int("min_leaf", 1);
        let model = fit_tree(&params, &data);
        let probe = Instance {
            id: InstanceId(99),
            values: vec![Cell::Missing, Cell::Missing],
            label: 0,
        };
        let class = model.predict(&probe);
        assert!(class < 2);
    }

    #[test]
    fn unbagged_all_feature_forest_matches_plain_tree() {
        // With bootstrap disabled and all features considered, every tree
        // in the forest is the same deterministic tree, so the vote must
        // agree with the plain unpruned decision tree on any probe.
        let data = xor_like_dataset();
        let forest_params = crate::learners::hyperparameter_space(AlgorithmId::RandomForest)
            .resolve(
                &default_hyperparameters(AlgorithmId::RandomForest)
                    .choice("features_per_split", "all"),
            )
            .unwrap();
        let forest = fit_forest(&forest_params, &data, 7, false);
        let tree = fit_tree(
            &default_hyperparameters(AlgorithmId::DecisionTree)
                .int("min_leaf", 1)
                .choice("pruning", "off"),
            &data,
        );
        for inst in &data.instances {
            assert_eq!(forest.predict(inst), tree.predict(inst));
        }
        let probe = Instance {
            id: InstanceId(99),
            values: vec![Cell::Numeric(0.45), Cell::Category(1)],
            label: 0,
        };
        assert_eq!(forest.predict(&probe), tree.predict(&probe));
    }

    #[test]
    fn forest_is_deterministic_per_seed() {
        let data = xor_like_dataset();
        let params = crate::learners::hyperparameter_space(AlgorithmId::RandomForest)
            .resolve(&default_hyperparameters(AlgorithmId::RandomForest).int("trees", 20))
            .unwrap();
        let a = fit_forest(&params, &data, 11, true);
        let b = fit_forest(&params, &data, 11, true);
        for inst in &data.instances {
            assert_eq!(a.predict(inst), b.predict(inst));
        }
    }

    #[test]
    fn pessimistic_bound_grows_with_confidence_strictness() {
        let z_loose = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - 0.5);
        let z_strict = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - 0.05);
        let loose = pessimistic_error_rate(2.0, 20.0, z_loose);
        let strict = pessimistic_error_rate(2.0, 20.0, z_strict);
        assert!(strict > loose);
        assert!(loose >= 2.0 / 20.0);
    }
}
