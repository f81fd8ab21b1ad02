//! Sequential-covering rule learner.
//!
//! Rules are grown per class (rarest class first) by greedily adding the
//! condition with the highest FOIL gain until the rule covers no
//! negatives, then optionally pruned by dropping trailing conditions while
//! the (p - n) / (p + n) metric does not degrade. Instances covered by an
//! accepted rule are removed before the next rule is grown. Optimization
//! passes delete rules whose removal does not hurt training accuracy.
//! Prediction takes the first matching rule; conditions on missing cells
//! never match; uncovered instances get the default class.

use crate::data::{Cell, Dataset, FeatureKind, Instance};
use crate::learners::Hyperparameters;

#[derive(Debug, Clone, PartialEq)]
enum CondTest {
    CatEq(usize),
    NumLe(f64),
    NumGt(f64),
}

#[derive(Debug, Clone, PartialEq)]
struct Cond {
    feature: usize,
    test: CondTest,
}

impl Cond {
    fn matches(&self, instance: &Instance) -> bool {
        match (&instance.values[self.feature], &self.test) {
            (Cell::Category(c), CondTest::CatEq(want)) => c == want,
            (Cell::Numeric(v), CondTest::NumLe(t)) => v <= t,
            (Cell::Numeric(v), CondTest::NumGt(t)) => v > t,
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
struct Rule {
    class: usize,
    conds: Vec<Cond>,
}

impl Rule {
    fn matches(&self, instance: &Instance) -> bool {
        self.conds.iter().all(|c| c.matches(instance))
    }
}

#[derive(Debug)]
pub(crate) struct RuleListModel {
    rules: Vec<Rule>,
    default_class: usize,
}

impl RuleListModel {
    pub fn predict(&self, instance: &Instance) -> usize {
        for rule in &self.rules {
            if rule.matches(instance) {
                return rule.class;
            }
        }
        self.default_class
    }
}

pub(crate) fn fit(params: &Hyperparameters, data: &Dataset) -> RuleListModel {
    let min_coverage = params.get_int("min_coverage") as usize;
    let prune = params.get_choice("pruning") == "on";
    let passes = params.get_int("optimization_passes") as usize;

    let counts = {
        let mut c = vec![0usize; data.classes.len()];
        for inst in &data.instances {
            c[inst.label] += 1;
        }
        c
    };
    // Rarest class first; the most frequent populated class gets no rules
    // and acts as the fallback.
    let mut class_order: Vec<usize> = (0..data.classes.len())
        .filter(|c| counts[*c] > 0)
        .collect();
    class_order.sort_by_key(|c| (counts[*c], *c));
    let default_class = class_order.pop().unwrap_or(0);

    let mut remaining: Vec<usize> = (0..data.len()).collect();
    let mut rules: Vec<Rule> = Vec::new();

    for class in class_order {
        loop {
            let positives = remaining
                .iter()
                .filter(|&&r| data.instances[r].label == class)
                .count();
            if positives < min_coverage.max(1) {
                break;
            }
            let Some(mut rule) = grow_rule(data, &remaining, class) else {
                break;
            };
            if prune {
                prune_rule(data, &remaining, &mut rule);
            }
            let (p, _n) = coverage(data, &remaining, &rule);
            if p < min_coverage.max(1) {
                break;
            }
            remaining.retain(|&r| !rule.matches(&data.instances[r]));
            rules.push(rule);
        }
    }

    let mut model = RuleListModel {
        rules,
        default_class,
    };
    for _ in 0..passes {
        optimize_pass(data, &mut model);
    }
    model
}

/// Positive / negative coverage of a rule over the listed rows.
fn coverage(data: &Dataset, rows: &[usize], rule: &Rule) -> (usize, usize) {
    let mut p = 0;
    let mut n = 0;
    for &r in rows {
        let inst = &data.instances[r];
        if rule.matches(inst) {
            if inst.label == rule.class {
                p += 1;
            } else {
                n += 1;
            }
        }
    }
    (p, n)
}

/// Greedy FOIL-gain growth; None when no condition has positive gain.
fn grow_rule(data: &Dataset, rows: &[usize], class: usize) -> Option<Rule> {
    let mut rule = Rule {
        class,
        conds: Vec::new(),
    };
    let mut covered: Vec<usize> = rows.to_vec();

    loop {
        let p0 = covered
            .iter()
            .filter(|&&r| data.instances[r].label == class)
            .count();
        let n0 = covered.len() - p0;
        if p0 == 0 {
            return None;
        }
        if n0 == 0 {
            break; // pure rule
        }
        let base_info = info(p0, n0);

        let mut best: Option<(f64, Cond)> = None;
        for (f, spec) in data.features.iter().enumerate() {
            match &spec.kind {
                FeatureKind::Nominal(cats) => {
                    for c in 0..cats.len() {
                        let cond = Cond {
                            feature: f,
                            test: CondTest::CatEq(c),
                        };
                        consider(data, &covered, class, base_info, cond, &mut best);
                    }
                }
                FeatureKind::Numeric => {
                    for threshold in numeric_thresholds(data, &covered, f) {
                        for test in [CondTest::NumLe(threshold), CondTest::NumGt(threshold)] {
                            let cond = Cond { feature: f, test };
                            consider(data, &covered, class, base_info, cond, &mut best);
                        }
                    }
                }
            }
        }

        match best {
            Some((gain, cond)) if gain > 1e-12 => {
                covered.retain(|&r| cond.matches(&data.instances[r]));
                rule.conds.push(cond);
            }
            _ => break, // no improving condition; accept the impure rule
        }
        if rule.conds.len() >= data.features.len() * 4 {
            break; // guard against threshold churn on adversarial data
        }
    }

    if rule.conds.is_empty() {
        None
    } else {
        Some(rule)
    }
}

fn consider(
    data: &Dataset,
    covered: &[usize],
    class: usize,
    base_info: f64,
    cond: Cond,
    best: &mut Option<(f64, Cond)>,
) {
    let mut p = 0usize;
    let mut n = 0usize;
    for &r in covered {
        let inst = &data.instances[r];
        if cond.matches(inst) {
            if inst.label == class {
                p += 1;
            } else {
                n += 1;
            }
        }
    }
    if p == 0 {
        return;
    }
    let gain = p as f64 * (info(p, n) - base_info);
    if best.as_ref().map_or(true, |(g, _)| gain > *g) {
        *best = Some((gain, cond));
    }
}

/// log2 of the positive fraction; FOIL's information content.
fn info(p: usize, n: usize) -> f64 {
    (p as f64 / (p + n) as f64).log2()
}

/// Midpoints between consecutive distinct known values.
fn numeric_thresholds(data: &Dataset, rows: &[usize], feature: usize) -> Vec<f64> {
    let mut values: Vec<f64> = rows
        .iter()
        .filter_map(|&r| match data.instances[r].values[feature] {
            Cell::Numeric(v) => Some(v),
            _ => None,
        })
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
}

/// Drop trailing conditions while (p - n) / (p + n) does not degrade.
fn prune_rule(data: &Dataset, rows: &[usize], rule: &mut Rule) {
    let metric = |rule: &Rule| {
        let (p, n) = coverage(data, rows, rule);
        if p + n == 0 {
            f64::NEG_INFINITY
        } else {
            (p as f64 - n as f64) / (p as f64 + n as f64)
        }
    };
    while rule.conds.len() > 1 {
        let full = metric(rule);
        let dropped = rule.conds.pop().expect("len > 1");
        if metric(rule) < full {
            rule.conds.push(dropped);
            break;
        }
    }
}

fn training_accuracy(data: &Dataset, model: &RuleListModel) -> usize {
    data.instances
        .iter()
        .filter(|inst| model.predict(inst) == inst.label)
        .count()
}

/// Delete rules whose removal does not reduce training accuracy.
fn optimize_pass(data: &Dataset, model: &mut RuleListModel) {
    let mut i = 0;
    while i < model.rules.len() {
        let current = training_accuracy(data, model);
        let removed = model.rules.remove(i);
        if training_accuracy(data, model) < current {
            model.rules.insert(i, removed);
            i += 1;
        }
    }
}
