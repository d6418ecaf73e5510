//! MinD trees: the full binary trees on `n` leaves attaining the minimum
//! possible number of D nodes, `weight(n) - 1`.
//!
//! Every MinD tree arises the same way: take the binary decomposition
//! `n = 2^e_1 + ... + 2^e_w` (distinct exponents), pick a base tree on `w`
//! leaves, and replace each base leaf with a perfect subtree of one of the
//! `2^e_i`. The base nodes join disjoint sets of distinct powers of two, so
//! they are all D; everything inside the perfect blocks is S. Up to
//! isomorphism the choice is exactly a leaf-labeled topology on `w` labels,
//! giving `(2w - 3)!!` classes.

use crate::formulas::weight;
use crate::tree::{make_ladder, make_perfect, CanonicalForm, NodeKind, Tree};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MindError {
    #[error("{name} requires n >= 1")]
    DomainTooSmall { name: &'static str },
    #[error("base tree has {got} leaves but the decomposition has {expected} blocks")]
    BaseLeafCount { expected: u32, got: u64 },
    #[error("assignment {got:?} is not a permutation of the exponents {expected:?}")]
    AssignmentNotPermutation { expected: Vec<u32>, got: Vec<u32> },
    #[error("enumeration supports weight(n) <= {max}, got weight {omega}")]
    EnumerationTooLarge { omega: u32, max: u32 },
}

/// `n` written as a sum of distinct powers of two, exponents strictly
/// decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDecomposition {
    pub n: u64,
    pub exponents: Vec<u32>,
}

impl BinaryDecomposition {
    /// Number of blocks (ones in the binary expansion).
    pub fn omega(&self) -> u32 {
        self.exponents.len() as u32
    }
}

pub fn binary_decomposition(n: u64) -> Result<BinaryDecomposition, MindError> {
    if n == 0 {
        return Err(MindError::DomainTooSmall { name: "binary_decomposition" });
    }
    let exponents = (0..64)
        .rev()
        .filter(|&e| (n >> e) & 1 == 1)
        .collect();
    Ok(BinaryDecomposition { n, exponents })
}

/// Recipe for one MinD tree: a decomposition, a base tree with one leaf per
/// block, and the exponent assigned to each base leaf in left-to-right
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinDSpec {
    pub decomposition: BinaryDecomposition,
    pub base: Tree,
    pub assignment: Vec<u32>,
}

/// Materialize a [`MinDSpec`]: base leaf `i` becomes a perfect tree on
/// `2^assignment[i]` leaves.
pub fn build_mind(spec: &MinDSpec) -> Result<Tree, MindError> {
    let omega = spec.decomposition.omega();
    if spec.base.leaves() != omega as u64 {
        return Err(MindError::BaseLeafCount {
            expected: omega,
            got: spec.base.leaves(),
        });
    }
    let mut sorted = spec.assignment.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    if sorted != spec.decomposition.exponents {
        return Err(MindError::AssignmentNotPermutation {
            expected: spec.decomposition.exponents.clone(),
            got: spec.assignment.clone(),
        });
    }
    let parts: Vec<Tree> = spec.assignment.iter().map(|&e| make_perfect(e)).collect();
    let tree = spec.base.substitute_leaves(&parts);
    debug_assert!(is_mind(&tree));
    Ok(tree)
}

/// The descending MinD arrangement: a ladder base whose rungs carry the
/// blocks in increasing size going down, so the largest block `2^e_w` sits
/// on the top rung. This is the MinD tree with the smallest Colless index
/// ([`crate::formulas::c_desc`]).
pub fn mind_descending(n: u64) -> Result<Tree, MindError> {
    let decomposition = binary_decomposition(n)?;
    let base = make_ladder(decomposition.omega() as u64);
    // Ladder leaves in left-to-right order run deepest first; the smallest
    // exponent goes deepest.
    let assignment: Vec<u32> = decomposition.exponents.iter().rev().copied().collect();
    build_mind(&MinDSpec { decomposition, base, assignment })
}

/// The ascending MinD arrangement: ladder base with the smallest block on
/// the top rung and the largest deepest. This is the MinD tree with the
/// largest Colless index ([`crate::formulas::c_asc`]).
pub fn mind_ascending(n: u64) -> Result<Tree, MindError> {
    let decomposition = binary_decomposition(n)?;
    let base = make_ladder(decomposition.omega() as u64);
    let assignment = decomposition.exponents.clone();
    build_mind(&MinDSpec { decomposition, base, assignment })
}

/// A tree is MinD when its D count hits the floor `weight(n) - 1`.
pub fn is_mind(tree: &Tree) -> bool {
    tree.sd_label().d_count == weight(tree.leaves()) as u64 - 1
}

/// Hard cap on `weight(n)` for [`enumerate_mind`]: the class count
/// `(2w - 3)!!` explodes past this.
pub const ENUMERATE_MAX_OMEGA: u32 = 10;

/// One representative per isomorphism class of MinD tree on `n` leaves,
/// `(2 weight(n) - 3)!!` trees in a deterministic order.
pub fn enumerate_mind(n: u64) -> Result<Vec<Tree>, MindError> {
    let decomposition = binary_decomposition(n)?;
    let omega = decomposition.omega();
    if omega > ENUMERATE_MAX_OMEGA {
        return Err(MindError::EnumerationTooLarge {
            omega,
            max: ENUMERATE_MAX_OMEGA,
        });
    }
    // Ascending exponents: the symmetry-breaking rule pins the smallest one.
    let ascending: Vec<u32> = decomposition.exponents.iter().rev().copied().collect();
    let mut out = Vec::new();
    for base in base_shapes(omega) {
        let counts = base.leaf_counts();
        let canon: Vec<CanonicalForm> = (0..base.nodes().len())
            .map(|i| base.subtree(i as u32).canonical_form())
            .collect();
        out.extend(assign_blocks(&base, base.root(), &ascending, &counts, &canon));
    }
    Ok(out)
}

// All full binary tree shapes on k leaves, one per isomorphism class
// (Wedderburn-Etherington many), built bottom-up with the larger child on
// the left and equal-size pairs taken unordered.
fn base_shapes(k: u32) -> Vec<Tree> {
    let mut by_count: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::leaf(None)]];
    for m in 2..=k as usize {
        let mut shapes = Vec::new();
        for j in 1..=(m - 1) / 2 {
            for left in &by_count[m - j] {
                for right in &by_count[j] {
                    shapes.push(left.join(right));
                }
            }
        }
        if m % 2 == 0 {
            let half = &by_count[m / 2];
            for (i, left) in half.iter().enumerate() {
                for right in &half[i..] {
                    shapes.push(left.join(right));
                }
            }
        }
        by_count.push(shapes);
    }
    by_count.swap_remove(k as usize)
}

// Distribute the available exponents over the base subtree rooted at
// `node`, yielding one tree per assignment class. When the two child
// subtrees are isomorphic, the smallest available exponent is pinned to the
// left child so each unordered choice appears exactly once.
fn assign_blocks(
    base: &Tree,
    node: u32,
    avail: &[u32],
    counts: &[u64],
    canon: &[CanonicalForm],
) -> Vec<Tree> {
    match &base.nodes()[node as usize] {
        NodeKind::Leaf { .. } => {
            debug_assert_eq!(avail.len(), 1);
            vec![make_perfect(avail[0])]
        }
        NodeKind::Internal { left, right } => {
            let (l, r) = (*left as usize, *right as usize);
            let want_left = counts[l] as u32;
            let symmetric = canon[l] == canon[r];
            let mut out = Vec::new();
            for mask in 0u32..(1 << avail.len()) {
                if mask.count_ones() != want_left {
                    continue;
                }
                if symmetric && mask & 1 == 0 {
                    continue;
                }
                let mut left_avail = Vec::with_capacity(want_left as usize);
                let mut right_avail = Vec::with_capacity(avail.len() - want_left as usize);
                for (i, &e) in avail.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        left_avail.push(e);
                    } else {
                        right_avail.push(e);
                    }
                }
                let lefts = assign_blocks(base, *left, &left_avail, counts, canon);
                let rights = assign_blocks(base, *right, &right_avail, counts, canon);
                for lt in &lefts {
                    for rt in &rights {
                        out.push(lt.join(rt));
                    }
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{c_asc, c_desc, CAscMethod};
    use crate::tree::{make_complete_full_binary, make_divide_and_conquer};
    use std::collections::HashSet;

    #[test]
    fn decomposition_of_27() {
        let d = binary_decomposition(27).unwrap();
        assert_eq!(d.exponents, vec![4, 3, 1, 0]);
        assert_eq!(d.omega(), 4);
        assert!(binary_decomposition(0).is_err());
    }

    #[test]
    fn build_mind_validates_inputs() {
        let decomposition = binary_decomposition(27).unwrap();
        let bad_base = MinDSpec {
            decomposition: decomposition.clone(),
            base: make_ladder(3),
            assignment: vec![4, 3, 1, 0],
        };
        assert!(matches!(
            build_mind(&bad_base),
            Err(MindError::BaseLeafCount { expected: 4, got: 3 })
        ));
        let bad_assignment = MinDSpec {
            decomposition,
            base: make_ladder(4),
            assignment: vec![4, 3, 1, 1],
        };
        assert!(matches!(
            build_mind(&bad_assignment),
            Err(MindError::AssignmentNotPermutation { .. })
        ));
    }

    #[test]
    fn arrangements_hit_their_formulas() {
        for n in 1..=(1u64 << 12) {
            let desc = mind_descending(n).unwrap();
            let asc = mind_ascending(n).unwrap();
            assert_eq!(desc.colless_index(), c_desc(n).unwrap(), "n={n}");
            assert_eq!(
                asc.colless_index(),
                c_asc(n, CAscMethod::Recurrence).unwrap(),
                "n={n}"
            );
            if n <= 512 {
                assert!(is_mind(&desc), "n={n}");
                assert!(is_mind(&asc), "n={n}");
            }
        }
    }

    #[test]
    fn mind_trees_have_expected_sd_split() {
        for n in 1..=512u64 {
            let t = mind_descending(n).unwrap();
            let labeling = t.sd_label();
            assert_eq!(labeling.d_count, weight(n) as u64 - 1, "n={n}");
            assert_eq!(labeling.s_count, n - weight(n) as u64, "n={n}");
        }
    }

    #[test]
    fn is_mind_recognizes_constructions() {
        // The complete-full-binary tree has floor(log2 d) D nodes for d the
        // odd part of n, so it is MinD exactly when d is a run of ones.
        for n in 1..=256u64 {
            let d = n >> n.trailing_zeros();
            let run_of_ones = d & (d + 1) == 0;
            assert_eq!(is_mind(&make_complete_full_binary(n)), run_of_ones, "n={n}");
        }
        assert!(!is_mind(&make_ladder(5)));
        assert!(!is_mind(&make_divide_and_conquer(6)));
        assert!(is_mind(&make_divide_and_conquer(4)));
    }

    fn double_factorial(x: i64) -> u64 {
        let mut acc = 1u64;
        let mut i = x;
        while i >= 2 {
            acc *= i as u64;
            i -= 2;
        }
        acc
    }

    #[test]
    fn enumeration_counts_match_double_factorial() {
        // Smallest n of each weight: n = 2^w - 1.
        for omega in 1..=5u32 {
            let n = (1u64 << omega) - 1;
            let trees = enumerate_mind(n).unwrap();
            assert_eq!(
                trees.len() as u64,
                double_factorial(2 * omega as i64 - 3),
                "omega={omega}"
            );
            let mut seen = HashSet::new();
            for t in &trees {
                assert_eq!(t.leaves(), n);
                assert!(is_mind(t));
                assert!(seen.insert(t.canonical_form()), "duplicate class for n={n}");
            }
        }
    }

    #[test]
    fn enumeration_of_27_spans_the_colless_range() {
        let trees = enumerate_mind(27).unwrap();
        assert_eq!(trees.len(), 15);
        let values: Vec<u64> = trees.iter().map(|t| t.colless_index()).collect();
        let lo = *values.iter().min().unwrap();
        let hi = *values.iter().max().unwrap();
        assert_eq!(lo, c_desc(27).unwrap());
        assert_eq!(hi, c_asc(27, CAscMethod::Recurrence).unwrap());
        let mut seen = HashSet::new();
        for t in &trees {
            assert!(is_mind(t));
            assert!(seen.insert(t.canonical_form()));
        }
    }

    #[test]
    fn enumeration_caps_at_max_omega() {
        let n = (1u64 << 11) - 1; // weight 11
        assert!(matches!(
            enumerate_mind(n),
            Err(MindError::EnumerationTooLarge { omega: 11, max: ENUMERATE_MAX_OMEGA })
        ));
    }

    #[test]
    fn descending_and_ascending_are_enumerated_classes() {
        let classes: HashSet<CanonicalForm> = enumerate_mind(27)
            .unwrap()
            .iter()
            .map(Tree::canonical_form)
            .collect();
        assert!(classes.contains(&mind_descending(27).unwrap().canonical_form()));
        assert!(classes.contains(&mind_ascending(27).unwrap().canonical_form()));
    }
}
