//! Gradient-trained vector learners: a one-hidden-layer MLP and a softmax
//! logistic regression.
//!
//! Both work on an encoded view of the data: numeric features are
//! range-normalized to [0,1] (missing -> 0.5, the range midpoint), nominal
//! features become one-hot blocks (missing -> all zeros).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::{Cell, Dataset, FeatureKind, Instance};
use crate::learners::knn::argmax_lowest_tie;
use crate::learners::Hyperparameters;
use crate::seeds;

#[derive(Debug, Clone)]
enum FeatureEncoding {
    /// Slot offset and normalization range of a numeric feature.
    Numeric { offset: usize, lo: f64, hi: f64 },
    /// Offset of the one-hot block for a nominal feature.
    OneHot { offset: usize, len: usize },
}

#[derive(Debug, Clone)]
struct Encoder {
    encodings: Vec<FeatureEncoding>,
    dim: usize,
}

impl Encoder {
    fn fit(data: &Dataset) -> Self {
        let mut encodings = Vec::with_capacity(data.features.len());
        let mut dim = 0usize;
        for (f, spec) in data.features.iter().enumerate() {
            match &spec.kind {
                FeatureKind::Numeric => {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for inst in &data.instances {
                        if let Cell::Numeric(v) = inst.values[f] {
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    if !lo.is_finite() {
                        lo = 0.0;
                        hi = 0.0;
                    }
                    encodings.push(FeatureEncoding::Numeric { lo, hi });
                    dim += 1;
                }
                FeatureKind::Nominal(cats) => {
                    encodings.push(FeatureEncoding::OneHot {
                        offset: dim,
                        len: cats.len(),
                    });
                    dim += cats.len();
                }
            }
        }
        Encoder { encodings, dim }
    }

    fn encode(&self, values: &[Cell]) -> Vec<f64> {
        let mut x = vec![0.0f64; self.dim];
        let mut numeric_pos = 0usize;
        for (cell, enc) in values.iter().zip(&self.encodings) {
            match enc {
                FeatureEncoding::Numeric { lo, hi } => {
                    x[numeric_pos] = match cell {
                        Cell::Numeric(v) if hi > lo => (v - lo) / (hi - lo),
                        Cell::Numeric(_) => 0.5,
                        _ => 0.5,
                    };
                    numeric_pos += 1;
                }
                FeatureEncoding::OneHot { offset, len } => {
                    if let Cell::Category(c) = cell {
                        if *c < *len {
                            x[offset + c] = 1.0;
                        }
                    }
                    if numeric_pos < *offset + *len {
                        numeric_pos = offset + len;
                    }
                }
            }
        }
        x
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug)]
pub(crate) struct MlpModel {
    encoder: Encoder,
    /// Hidden weights: per hidden unit, dim inputs + bias.
    w1: Vec<Vec<f64>>,
    /// Output weights: per class, hidden + bias.
    w2: Vec<Vec<f64>>,
}

pub(crate) fn fit_mlp(params: &Hyperparameters, data: &Dataset, seed: u64) -> MlpModel {
    let hidden = params.get_int("hidden_units") as usize;
    let lr = params.get_real("learning_rate");
    let epochs = params.get_int("epochs") as usize;
    let momentum = params.get_real("momentum");

    let encoder = Encoder::fit(data);
    let dim = encoder.dim;
    let k = data.classes.len();
    let mut rng = seeds::rng(seed);

    let mut w1: Vec<Vec<f64>> = (0..hidden)
        .map(|_| (0..=dim).map(|_| rng.gen_range(-0.5..0.5)).collect())
        .collect();
    let mut w2: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..=hidden).map(|_| rng.gen_range(-0.5..0.5)).collect())
        .collect();
    let mut v1 = vec![vec![0.0f64; dim + 1]; hidden];
    let mut v2 = vec![vec![0.0f64; hidden + 1]; k];

    let encoded: Vec<(Vec<f64>, usize)> = data
        .instances
        .iter()
        .map(|i| (encoder.encode(&i.values), i.label))
        .collect();

    let mut order: Vec<usize> = (0..encoded.len()).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, label) = &encoded[i];

            // Forward.
            let mut h = vec![0.0f64; hidden];
            for (j, wj) in w1.iter().enumerate() {
                let mut z = wj[dim]; // bias
                for (d, xv) in x.iter().enumerate() {
                    z += wj[d] * xv;
                }
                h[j] = sigmoid(z);
            }
            let mut out = vec![0.0f64; k];
            for (c, wc) in w2.iter().enumerate() {
                let mut z = wc[hidden];
                for (j, hv) in h.iter().enumerate() {
                    z += wc[j] * hv;
                }
                out[c] = sigmoid(z);
            }

            // Backward: squared error on one-vs-rest sigmoid outputs.
            let mut delta_out = vec![0.0f64; k];
            for c in 0..k {
                let target = if c == *label { 1.0 } else { 0.0 };
                delta_out[c] = (out[c] - target) * out[c] * (1.0 - out[c]);
            }
            let mut delta_hidden = vec![0.0f64; hidden];
            for j in 0..hidden {
                let mut acc = 0.0;
                for c in 0..k {
                    acc += delta_out[c] * w2[c][j];
                }
                delta_hidden[j] = acc * h[j] * (1.0 - h[j]);
            }

            for c in 0..k {
                for j in 0..hidden {
                    v2[c][j] = momentum * v2[c][j] - lr * delta_out[c] * h[j];
                    w2[c][j] += v2[c][j];
                }
                v2[c][hidden] = momentum * v2[c][hidden] - lr * delta_out[c];
                w2[c][hidden] += v2[c][hidden];
            }
            for j in 0..hidden {
                for d in 0..dim {
                    v1[j][d] = momentum * v1[j][d] - lr * delta_hidden[j] * x[d];
                    w1[j][d] += v1[j][d];
                }
                v1[j][dim] = momentum * v1[j][dim] - lr * delta_hidden[j];
                w1[j][dim] += v1[j][dim];
            }
        }
    }

    MlpModel { encoder, w1, w2 }
}

impl MlpModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        let x = self.encoder.encode(&instance.values);
        let dim = self.encoder.dim;
        let hidden = self.w1.len();
        let mut h = vec![0.0f64; hidden];
        for (j, wj) in self.w1.iter().enumerate() {
            let mut z = wj[dim];
            for (d, xv) in x.iter().enumerate() {
                z += wj[d] * xv;
            }
            h[j] = sigmoid(z);
        }
        let scores: Vec<f64> = self
            .w2
            .iter()
            .map(|wc| {
                let mut z = wc[hidden];
                for (j, hv) in h.iter().enumerate() {
                    z += wc[j] * hv;
                }
                z
            })
            .collect();
        argmax_lowest_tie(&scores)
    }
}

#[derive(Debug)]
pub(crate) struct LogisticModel {
    encoder: Encoder,
    /// Per class: dim weights + bias.
    w: Vec<Vec<f64>>,
}

/// Full-batch softmax gradient descent with L2 on the non-bias weights.
/// No randomness is involved, so training is order- and seed-independent.
pub(crate) fn fit_logistic(params: &Hyperparameters, data: &Dataset) -> LogisticModel {
    let l2 = params.get_real("l2");
    let epochs = params.get_int("epochs") as usize;
    let lr = params.get_real("learning_rate");

    let encoder = Encoder::fit(data);
    let dim = encoder.dim;
    let k = data.classes.len();
    let n = data.len() as f64;

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by_key(|i| data.instances[*i].id);
    let encoded: Vec<(Vec<f64>, usize)> = order
        .iter()
        .map(|&i| {
            let inst = &data.instances[i];
            (encoder.encode(&inst.values), inst.label)
        })
        .collect();

    let mut w = vec![vec![0.0f64; dim + 1]; k];
    for _ in 0..epochs {
        let mut grad = vec![vec![0.0f64; dim + 1]; k];
        for (x, label) in &encoded {
            let mut z: Vec<f64> = w
                .iter()
                .map(|wc| {
                    let mut acc = wc[dim];
                    for (d, xv) in x.iter().enumerate() {
                        acc += wc[d] * xv;
                    }
                    acc
                })
                .collect();
            let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for zc in &mut z {
                *zc = (*zc - max).exp();
                denom += *zc;
            }
            for c in 0..k {
                let p = z[c] / denom;
                let err = p - if c == *label { 1.0 } else { 0.0 };
                for (d, xv) in x.iter().enumerate() {
                    grad[c][d] += err * xv;
                }
                grad[c][dim] += err;
            }
        }
        for c in 0..k {
            for d in 0..dim {
                w[c][d] -= lr * (grad[c][d] / n + l2 * w[c][d]);
            }
            w[c][dim] -= lr * grad[c][dim] / n;
        }
    }

    LogisticModel { encoder, w }
}

impl LogisticModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        let x = self.encoder.encode(&instance.values);
        let dim = self.encoder.dim;
        let scores: Vec<f64> = self
            .w
            .iter()
            .map(|wc| {
                let mut acc = wc[dim];
                for (d, xv) in x.iter().enumerate() {
                    acc += wc[d] * xv;
                }
                acc
            })
            .collect();
        argmax_lowest_tie(&scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSpec, InstanceId};
    use crate::learners::{default_hyperparameters, AlgorithmId};

    fn separable(n: usize) -> Dataset {
        let instances = (0..n)
            .map(|i| {
                let x = if i % 2 == 0 {
                    -1.0 - (i as f64 / n as f64)
                } else {
                    1.0 + (i as f64 / n as f64)
                };
                Instance {
                    id: InstanceId(i as u32),
                    values: vec![Cell::Numeric(x)],
                    label: i % 2,
                }
            })
            .collect();
        Dataset::new(
            "separable",
            vec![FeatureSpec::numeric("x")],
            vec!["neg".into(), "pos".into()],
            instances,
        )
        .unwrap()
    }

    #[test]
    fn logistic_separates_linear_data() {
        let data = separable(40);
        let model = fit_logistic(
            &crate::learners::hyperparameter_space(AlgorithmId::Logistic)
                .resolve(&default_hyperparameters(AlgorithmId::Logistic))
                .unwrap(),
            &data,
        );
        for inst in &data.instances {
            assert_eq!(model.predict(inst), inst.label);
        }
    }

    #[test]
    fn mlp_converges_on_linear_data() {
        let data = separable(40);
        let params = crate::learners::hyperparameter_space(AlgorithmId::Mlp)
            .resolve(&default_hyperparameters(AlgorithmId::Mlp))
            .unwrap();
        let model = fit_mlp(&params, &data, 3);
        let correct = data
            .instances
            .iter()
            .filter(|i| model.predict(i) == i.label)
            .count();
        assert!(correct >= 38, "mlp got {correct}/40");
    }

    #[test]
    fn mlp_is_seed_deterministic() {
        let data = separable(20);
        let params = crate::learners::hyperparameter_space(AlgorithmId::Mlp)
            .resolve(&default_hyperparameters(AlgorithmId::Mlp).int("epochs", 30))
            .unwrap();
        let a = fit_mlp(&params, &data, 5);
        let b = fit_mlp(&params, &data, 5);
        assert_eq!(a.w1, b.w1);
        assert_eq!(a.w2, b.w2);
    }

    #[test]
    fn one_hot_encoding_lays_out_blocks() {
        let data = Dataset::new(
            "enc",
            vec![
                FeatureSpec::numeric("x"),
                FeatureSpec::nominal("c", vec!["p".into(), "q".into(), "r".into()]).unwrap(),
            ],
            vec!["a".into(), "b".into()],
            vec![
                Instance {
                    id: InstanceId(0),
                    values: vec![Cell::Numeric(0.0), Cell::Category(1)],
                    label: 0,
                },
                Instance {
                    id: InstanceId(1),
                    values: vec![Cell::Numeric(2.0), Cell::Category(2)],
                    label: 1,
                },
            ],
        )
        .unwrap();
        let enc = Encoder::fit(&data);
        assert_eq!(enc.dim, 4);
        assert_eq!(enc.encode(&data.instances[0].values), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(
            enc.encode(&[Cell::Missing, Cell::Missing]),
            vec![0.5, 0.0, 0.0, 0.0]
        );
    }
}
