//! Trees as binary64 summation schedules: evaluate a labeled tree over a
//! set of values, measure the rounding error against an exact rational
//! oracle and a compensated reference, and build the schedule that puts
//! the large terms into the small perfect blocks so they are combined
//! last.

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::fp::{f64_to_rational, round_rational_to_f64, ulp_distance};
use crate::mind::{binary_decomposition, mind_descending};
use crate::tree::{NodeKind, Tree};

#[derive(Debug, Error)]
pub enum SumError {
    #[error("a plan needs at least one value")]
    Empty,
    #[error("leaf {index} has no label")]
    UnlabeledLeaf { index: u32 },
    #[error("label {label:?} appears more than once")]
    DuplicateLabel { label: String },
    #[error("leaf label {label:?} has no value")]
    MissingValue { label: String },
    #[error("value label {label:?} is not on any leaf")]
    UnusedValue { label: String },
    #[error("value {label:?} is {value}; values must be finite")]
    NonFinite { label: String, value: f64 },
}

/// A reduction tree with labeled leaves plus the value behind each label,
/// kept in input order. Labels and leaves are checked to correspond one
/// to one at construction.
#[derive(Debug, Clone)]
pub struct SummationPlan {
    tree: Tree,
    values: Vec<(String, f64)>,
}

impl SummationPlan {
    pub fn new(tree: Tree, values: Vec<(String, f64)>) -> Result<SummationPlan, SumError> {
        let mut labels = HashSet::new();
        for (index, node) in tree.nodes().iter().enumerate() {
            if let NodeKind::Leaf { label } = node {
                let Some(label) = label.as_deref() else {
                    return Err(SumError::UnlabeledLeaf { index: index as u32 });
                };
                if !labels.insert(label) {
                    return Err(SumError::DuplicateLabel { label: label.to_owned() });
                }
            }
        }
        let mut supplied = HashSet::new();
        for (label, _) in &values {
            if !supplied.insert(label.as_str()) {
                return Err(SumError::DuplicateLabel { label: label.clone() });
            }
            if !labels.contains(label.as_str()) {
                return Err(SumError::UnusedValue { label: label.clone() });
            }
        }
        if let Some(missing) = labels.iter().find(|l| !supplied.contains(*l)) {
            return Err(SumError::MissingValue { label: (*missing).to_owned() });
        }
        Ok(SummationPlan { tree, values })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Label-value pairs in the order the values were supplied.
    pub fn values(&self) -> &[(String, f64)] {
        &self.values
    }
}

/// Everything worth knowing about one evaluation. `abs_error` and
/// `ulp_distance` are `None` when the evaluated result left the finite
/// range; `ulp_distance` is zero exactly when `evaluated` and
/// `correctly_rounded` are bit-identical.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub evaluated: f64,
    pub exact: BigRational,
    pub correctly_rounded: f64,
    pub abs_error: Option<BigRational>,
    pub ulp_distance: Option<i128>,
    pub kahan_result: f64,
    pub overflowed: bool,
}

/// Run the schedule: every internal node is one binary64 addition of its
/// children, bottom up. Overflow to infinity is a legitimate result;
/// non-finite inputs are not.
pub fn evaluate(plan: &SummationPlan) -> Result<f64, SumError> {
    for (label, value) in plan.values() {
        if !value.is_finite() {
            return Err(SumError::NonFinite { label: label.clone(), value: *value });
        }
    }
    let by_label: HashMap<&str, f64> = plan
        .values()
        .iter()
        .map(|(label, value)| (label.as_str(), *value))
        .collect();
    let tree = plan.tree();
    let mut sums = vec![0.0f64; tree.nodes().len()];
    // Children precede parents in the arena, so one pass suffices.
    for (i, node) in tree.nodes().iter().enumerate() {
        sums[i] = match node {
            NodeKind::Leaf { label } => {
                let label = label.as_deref().expect("plan leaves are labeled");
                by_label[label]
            }
            NodeKind::Internal { left, right } => {
                sums[*left as usize] + sums[*right as usize]
            }
        };
    }
    Ok(sums[tree.root() as usize])
}

/// True mathematical sum; binary64 operands are dyadic rationals, so the
/// result is exact.
pub fn exact_sum(values: &[f64]) -> Result<BigRational, SumError> {
    let mut total = BigRational::zero();
    for (i, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(SumError::NonFinite { label: format!("v{i}"), value });
        }
        total += f64_to_rational(value);
    }
    Ok(total)
}

/// Compensated accumulator: the classic two-term trick that carries the
/// low-order bits lost by each addition.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated sum in slice order.
pub fn kahan_sum(values: &[f64]) -> f64 {
    let mut acc = KahanSum::default();
    for &value in values {
        acc.add(value);
    }
    acc.value()
}

/// Evaluate the plan and compare against the exact sum, its correctly
/// rounded binary64 image, and the compensated reference (run in input
/// order).
pub fn error_report(plan: &SummationPlan) -> Result<ErrorReport, SumError> {
    let evaluated = evaluate(plan)?;
    let raw: Vec<f64> = plan.values().iter().map(|(_, v)| *v).collect();
    let exact = exact_sum(&raw)?;
    let correctly_rounded = round_rational_to_f64(&exact);
    let abs_error = evaluated
        .is_finite()
        .then(|| (f64_to_rational(evaluated) - &exact).abs());
    Ok(ErrorReport {
        evaluated,
        correctly_rounded,
        abs_error,
        ulp_distance: ulp_distance(evaluated, correctly_rounded),
        kahan_result: kahan_sum(&raw),
        overflowed: evaluated.is_infinite(),
        exact,
    })
}

/// Schedule the values onto the descending minimum-D tree: leaves are the
/// perfect blocks in ascending size left to right, values are sorted by
/// ascending magnitude (ties by input index), and the largest values go
/// into the smallest blocks. Small terms therefore combine inside the big
/// blocks first and the large terms enter last, near the root.
///
/// Labels are `v{i}` for input position `i`.
pub fn heuristic_mind_plan(values: &[f64]) -> Result<SummationPlan, SumError> {
    if values.is_empty() {
        return Err(SumError::Empty);
    }
    for (i, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(SumError::NonFinite { label: format!("v{i}"), value });
        }
    }
    let n = values.len() as u64;
    let tree = mind_descending(n).expect("n >= 1");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .abs()
            .total_cmp(&values[b].abs())
            .then(a.cmp(&b))
    });
    // Blocks in leaf order are the binary digits of n ascending; hand the
    // top of the sorted list to the smallest block, keeping each block's
    // slice ascending.
    let exponents = binary_decomposition(n).expect("n >= 1").exponents;
    let mut labels: Vec<String> = Vec::with_capacity(values.len());
    let mut end = values.len();
    for &exponent in exponents.iter().rev() {
        let size = 1usize << exponent;
        for &input in &order[end - size..end] {
            labels.push(format!("v{input}"));
        }
        end -= size;
    }
    debug_assert_eq!(end, 0);
    let tree = tree.with_leaf_labels(&labels).expect("label count matches leaves");
    let pairs = values
        .iter()
        .enumerate()
        .map(|(i, &value)| (format!("v{i}"), value))
        .collect();
    SummationPlan::new(tree, pairs)
}

/// Label a bare shape `v0..v{n-1}` left to right and pair it with the
/// values in input order.
pub fn plan_in_input_order(shape: &Tree, values: &[f64]) -> Result<SummationPlan, SumError> {
    if values.is_empty() {
        return Err(SumError::Empty);
    }
    let labels: Vec<String> = (0..values.len()).map(|i| format!("v{i}")).collect();
    let tree = shape.with_leaf_labels(&labels).expect("caller matches shape to values");
    let pairs = labels.into_iter().zip(values.iter().copied()).collect();
    SummationPlan::new(tree, pairs)
}
