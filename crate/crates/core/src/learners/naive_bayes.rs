//! Naive Bayes with gaussian or 10-bin histogram numeric likelihoods.
//!
//! Missing cells are skipped in the likelihood product. Statistics
//! accumulate in instance-id order so that predictions are exactly
//! invariant under permutations of the training set.

use crate::data::{Cell, Dataset, FeatureKind, Instance};
use crate::learners::knn::argmax_lowest_tie;
use crate::learners::Hyperparameters;

const VAR_FLOOR: f64 = 1e-9;
const HIST_BINS: usize = 10;

#[derive(Debug)]
enum FeatureModel {
    /// Per class: (mean, population variance, known count).
    Gaussian(Vec<(f64, f64, usize)>),
    /// Shared bin edges, per-class bin counts over known values.
    Histogram {
        min: f64,
        width: f64,
        counts: Vec<[usize; HIST_BINS]>,
        known: Vec<usize>,
    },
    /// Per-class per-category counts over known values.
    Nominal {
        counts: Vec<Vec<usize>>,
        known: Vec<usize>,
    },
}

#[derive(Debug)]
pub(crate) struct NaiveBayesModel {
    class_counts: Vec<usize>,
    total: usize,
    features: Vec<FeatureModel>,
    laplace: f64,
}

pub(crate) fn fit(params: &Hyperparameters, data: &Dataset) -> NaiveBayesModel {
    let laplace = params.get_real("laplace");
    let gaussian = params.get_choice("numeric_model") == "gaussian";
    let n_classes = data.classes.len();

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by_key(|i| data.instances[*i].id);

    let mut class_counts = vec![0usize; n_classes];
    for &i in &order {
        class_counts[data.instances[i].label] += 1;
    }

    let features = data
        .features
        .iter()
        .enumerate()
        .map(|(f, spec)| match &spec.kind {
            FeatureKind::Nominal(cats) => {
                let mut counts = vec![vec![0usize; cats.len()]; n_classes];
                let mut known = vec![0usize; n_classes];
                for &i in &order {
                    let inst = &data.instances[i];
                    if let Cell::Category(c) = inst.values[f] {
                        counts[inst.label][c] += 1;
                        known[inst.label] += 1;
                    }
                }
                FeatureModel::Nominal { counts, known }
            }
            FeatureKind::Numeric if gaussian => {
                let mut stats = Vec::with_capacity(n_classes);
                for class in 0..n_classes {
                    let mut sum = 0.0;
                    let mut count = 0usize;
                    for &i in &order {
                        let inst = &data.instances[i];
                        if inst.label == class {
                            if let Cell::Numeric(v) = inst.values[f] {
                                sum += v;
                                count += 1;
                            }
                        }
                    }
                    let mean = if count > 0 { sum / count as f64 } else { 0.0 };
                    let mut ss = 0.0;
                    for &i in &order {
                        let inst = &data.instances[i];
                        if inst.label == class {
                            if let Cell::Numeric(v) = inst.values[f] {
                                ss += (v - mean) * (v - mean);
                            }
                        }
                    }
                    let var = if count > 0 { ss / count as f64 } else { 0.0 };
                    stats.push((mean, var, count));
                }
                FeatureModel::Gaussian(stats)
            }
            FeatureKind::Numeric => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &i in &order {
                    if let Cell::Numeric(v) = data.instances[i].values[f] {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                if !lo.is_finite() {
                    lo = 0.0;
                    hi = 0.0;
                }
                let width = if hi > lo {
                    (hi - lo) / HIST_BINS as f64
                } else {
                    1.0
                };
                let mut counts = vec![[0usize; HIST_BINS]; n_classes];
                let mut known = vec![0usize; n_classes];
                for &i in &order {
                    let inst = &data.instances[i];
                    if let Cell::Numeric(v) = inst.values[f] {
                        counts[inst.label][bin_of(v, lo, width)] += 1;
                        known[inst.label] += 1;
                    }
                }
                FeatureModel::Histogram {
                    min: lo,
                    width,
                    counts,
                    known,
                }
            }
        })
        .collect();

    NaiveBayesModel {
        class_counts,
        total: data.len(),
        features,
        laplace,
    }
}

fn bin_of(v: f64, min: f64, width: f64) -> usize {
    let raw = ((v - min) / width).floor();
    (raw.max(0.0) as usize).min(HIST_BINS - 1)
}

impl NaiveBayesModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        let n_classes = self.class_counts.len();
        let mut scores = vec![0.0f64; n_classes];
        for (class, score) in scores.iter_mut().enumerate() {
            let count = self.class_counts[class];
            if count == 0 {
                *score = f64::NEG_INFINITY;
                continue;
            }
            *score = (count as f64 / self.total as f64).ln();
            for (f, model) in self.features.iter().enumerate() {
                let cell = &instance.values[f];
                if cell.is_missing() {
                    continue;
                }
                *score += self.log_likelihood(model, class, cell);
            }
        }
        argmax_lowest_tie(&scores)
    }

    fn log_likelihood(&self, model: &FeatureModel, class: usize, cell: &Cell) -> f64 {
        match (model, cell) {
            (FeatureModel::Gaussian(stats), Cell::Numeric(v)) => {
                let (mean, var, count) = stats[class];
                if count == 0 {
                    return 0.0; // no evidence for this (class, feature)
                }
                let var = var.max(VAR_FLOOR);
                -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (v - mean).powi(2) / (2.0 * var)
            }
            (
                FeatureModel::Histogram {
                    min,
                    width,
                    counts,
                    known,
                },
                Cell::Numeric(v),
            ) => {
                let bin = bin_of(*v, *min, *width);
                let num = counts[class][bin] as f64 + self.laplace;
                let den = known[class] as f64 + self.laplace * HIST_BINS as f64;
                (num / den).ln()
            }
            (FeatureModel::Nominal { counts, known }, Cell::Category(c)) => {
                let cats = counts[class].len() as f64;
                let num = counts[class][*c] as f64 + self.laplace;
                let den = known[class] as f64 + self.laplace * cats;
                (num / den).ln()
            }
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSpec, InstanceId};
    use crate::learners::{default_hyperparameters, AlgorithmId};

    fn nb_params() -> Hyperparameters {
        default_hyperparameters(AlgorithmId::NaiveBayes)
    }

    /// Independent posterior computation for the two-instance case:
    /// equal priors, gaussian likelihood with the floored variance.
    fn hand_posterior_winner(x: f64, means: [f64; 2]) -> usize {
        let var = VAR_FLOOR;
        let log_pdf = |m: f64| -0.5 * (2.0 * std::f64::consts::PI * var).ln()
            - (x - m).powi(2) / (2.0 * var);
        let scores = [(0.5f64).ln() + log_pdf(means[0]), (0.5f64).ln() + log_pdf(means[1])];
        if scores[0] >= scores[1] {
            0
        } else {
            1
        }
    }

    #[test]
    fn two_instances_two_classes_memorized() {
        let data = Dataset::new(
            "pair",
            vec![FeatureSpec::numeric("x")],
            vec!["a".into(), "b".into()],
            vec![
                Instance {
                    id: InstanceId(0),
                    values: vec![Cell::Numeric(1.0)],
                    label: 0,
                },
                Instance {
                    id: InstanceId(1),
                    values: vec![Cell::Numeric(4.0)],
                    label: 1,
                },
            ],
        )
        .unwrap();
        let model = fit(&nb_params(), &data);
        for inst in &data.instances {
            assert_eq!(model.predict(inst), inst.label);
            // Cross-check against the hand-computed posterior comparison.
            let x = match inst.values[0] {
                Cell::Numeric(x) => x,
                _ => unreachable!(),
            };
            assert_eq!(model.predict(inst), hand_posterior_winner(x, [1.0, 4.0]));
        }
    }

    #[test]
    fn permuting_instances_leaves_predictions_unchanged() {
        let xs = [0.3, 1.2, 0.9, 4.1, 3.7, 4.4, 0.2, 3.9];
        let build = |order: &[usize]| {
            let instances = order
                .iter()
                .map(|&i| Instance {
                    id: InstanceId(i as u32),
                    values: vec![Cell::Numeric(xs[i])],
                    label: usize::from(xs[i] > 2.0),
                })
                .collect();
            Dataset::new(
                "perm",
                vec![FeatureSpec::numeric("x")],
                vec!["a".into(), "b".into()],
                instances,
            )
            .unwrap()
        };
        let forward = build(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let shuffled = build(&[5, 2, 7, 0, 3, 6, 1, 4]);
        let m1 = fit(&nb_params(), &forward);
        let m2 = fit(&nb_params(), &shuffled);
        for probe_x in [0.0, 1.0, 2.0, 3.0, 5.0, 2.05, 1.95] {
            let probe = Instance {
                id: InstanceId(100),
                values: vec![Cell::Numeric(probe_x)],
                label: 0,
            };
            assert_eq!(m1.predict(&probe), m2.predict(&probe));
        }
    }

    #[test]
    fn histogram_model_separates_ranges() {
        let instances = (0..20)
            .map(|i| Instance {
                id: InstanceId(i),
                values: vec![Cell::Numeric(f64::from(i))],
                label: usize::from(i >= 10),
            })
            .collect();
        let data = Dataset::new(
            "hist",
            vec![FeatureSpec::numeric("x")],
            vec!["lo".into(), "hi".into()],
            instances,
        )
        .unwrap();
        let params = nb_params().choice("numeric_model", "histogram-10bin");
        let model = fit(&params, &data);
        for inst in &data.instances {
            assert_eq!(model.predict(inst), inst.label);
        }
    }

    #[test]
    fn missing_cells_are_skipped() {
        let data = Dataset::new(
            "miss",
            vec![FeatureSpec::numeric("x"), FeatureSpec::numeric("y")],
            vec!["a".into(), "b".into()],
            vec![
                Instance {
                    id: InstanceId(0),
                    values: vec![Cell::Numeric(0.0), Cell::Missing],
                    label: 0,
                },
                Instance {
                    id: InstanceId(1),
                    values: vec![Cell::Numeric(5.0), Cell::Missing],
                    label: 1,
                },
            ],
        )
        .unwrap();
        let model = fit(&nb_params(), &data);
        let probe = Instance {
            id: InstanceId(9),
            values: vec![Cell::Numeric(0.1), Cell::Missing],
            label: 0,
        };
        assert_eq!(model.predict(&probe), 0);
    }
}
