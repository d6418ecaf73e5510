//! Brute-force ground truth: exhaustive shape catalogs at small `n` and
//! machine-checkable reports pitting the counting formulas and extremal
//! claims against them.
//!
//! Catalogs follow the same composition convention as
//! [`crate::counting::alpha`]: the even split keeps both orders, so
//! mirror twins of distinct halves each get an entry (24 at n = 8 rather
//! than the 23 unordered shapes). Histograms and minimizer sets are what
//! the formulas predict under that convention.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::counting::{theta_table, BigCount, CountingError};
use crate::formulas::{c_max, delta, weight, DeltaMethod, FormulaError};
use crate::mind::{enumerate_mind, MindError};
use crate::tree::{
    make_complete_full_binary, make_divide_and_conquer, make_ladder, CanonicalForm, Tree,
};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{name} needs n >= 1, got {n}")]
    DomainTooSmall { name: &'static str, n: u64 },
    #[error("shape catalogs stop at n = {max}, got {n}")]
    CatalogTooLarge { n: u64, max: u64 },
    #[error(transparent)]
    Counting(#[from] CountingError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Mind(#[from] MindError),
}

/// Statistics for one catalog entry, aligned with [`ShapeCatalog::shapes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeStats {
    pub s_count: u64,
    pub d_count: u64,
    pub colless: u64,
}

/// Every full binary tree shape on `n` leaves, one entry per composition,
/// each stored in canonical (heavier-left) arena form.
#[derive(Debug, Clone)]
pub struct ShapeCatalog {
    pub n: u64,
    pub shapes: Vec<Tree>,
    pub stats: Vec<ShapeStats>,
}

impl ShapeCatalog {
    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// Shapes per S count; index `s` runs over `0..=n-1`, mirroring the
    /// layout of [`crate::counting::ThetaTable::row`].
    pub fn s_histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.n as usize];
        for stats in &self.stats {
            hist[stats.s_count as usize] += 1;
        }
        hist
    }

    /// Shapes per D count; entry `d` equals `s_histogram()[n-1-d]`.
    pub fn d_histogram(&self) -> Vec<u64> {
        let mut hist = self.s_histogram();
        hist.reverse();
        hist
    }
}

/// Catalogs stop here: sizes roughly double per step and reach 60958 at 18.
pub const ENUMERATE_SHAPES_MAX: u64 = 18;

/// Build the full catalog for `n` by composing catalogs of smaller sizes,
/// larger half on the left. Deterministic order; `1 <= n <= 18`.
pub fn enumerate_shapes(n: u64) -> Result<ShapeCatalog, OracleError> {
    if n == 0 {
        return Err(OracleError::DomainTooSmall { name: "enumerate_shapes", n });
    }
    if n > ENUMERATE_SHAPES_MAX {
        return Err(OracleError::CatalogTooLarge { n, max: ENUMERATE_SHAPES_MAX });
    }
    let mut levels: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::leaf(None)]];
    for m in 2..=n as usize {
        let mut shapes = Vec::new();
        for j in 1..=m / 2 {
            // At j = m/2 the halves range independently, so both orders of
            // distinct halves appear; that is the alpha convention.
            for a in &levels[m - j] {
                for b in &levels[j] {
                    shapes.push(a.join(b));
                }
            }
        }
        levels.push(shapes);
    }
    let shapes: Vec<Tree> = levels
        .pop()
        .expect("levels holds an entry for every size up to n")
        .par_iter()
        .map(Tree::canonicalize)
        .collect();
    let stats: Vec<ShapeStats> = shapes
        .par_iter()
        .map(|tree| {
            let sd = tree.sd_label();
            ShapeStats {
                s_count: sd.s_count,
                d_count: sd.d_count,
                colless: tree.colless_index(),
            }
        })
        .collect();
    Ok(ShapeCatalog { n, shapes, stats })
}

/// Verdict of one brute-force check, serializable as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: &'static str,
    pub n: u64,
    pub pass: bool,
    pub details: String,
}

fn form_string(form: &CanonicalForm) -> String {
    form.as_bytes().iter().map(|b| char::from(b'0' + b)).collect()
}

/// Check the catalog's S-count histogram against `theta(n, 0..n)` and the
/// D view against the reversed row.
pub fn verify_theta(n: u64) -> Result<Report, OracleError> {
    let catalog = enumerate_shapes(n)?;
    let table = theta_table(n)?;
    let row = table.row(n);
    let hist = catalog.s_histogram();
    let mut failures = Vec::new();
    for s in 0..n as usize {
        let counted = BigCount::from(hist[s]);
        if counted != row[s] {
            failures.push(format!("s={s}: catalog {counted}, formula {}", row[s]));
        }
    }
    let pass = failures.is_empty();
    let details = if pass {
        format!("S histogram over {} shapes matches the formula row", catalog.len())
    } else {
        failures.join("; ")
    };
    Ok(Report { check: "theta", n, pass, details })
}

/// Check that the minimum D count over all shapes is `weight(n) - 1` and
/// that the minimizers are exactly the enumerated MinD classes.
pub fn verify_mind(n: u64) -> Result<Report, OracleError> {
    let catalog = enumerate_shapes(n)?;
    let floor = weight(n) as u64 - 1;
    let min_d = catalog
        .stats
        .iter()
        .map(|stats| stats.d_count)
        .min()
        .expect("catalog is nonempty");
    if min_d != floor {
        return Ok(Report {
            check: "mind",
            n,
            pass: false,
            details: format!("minimum d-count {min_d}, expected {floor}"),
        });
    }
    let minimizers: BTreeSet<CanonicalForm> = catalog
        .shapes
        .iter()
        .zip(&catalog.stats)
        .filter(|(_, stats)| stats.d_count == min_d)
        .map(|(tree, _)| tree.canonical_form())
        .collect();
    let enumerated: BTreeSet<CanonicalForm> = enumerate_mind(n)?
        .iter()
        .map(Tree::canonical_form)
        .collect();
    if minimizers != enumerated {
        let offending = minimizers
            .symmetric_difference(&enumerated)
            .next()
            .expect("unequal sets differ somewhere");
        return Ok(Report {
            check: "mind",
            n,
            pass: false,
            details: format!(
                "{} minimizer classes vs {} enumerated; first disagreement {}",
                minimizers.len(),
                enumerated.len(),
                form_string(offending)
            ),
        });
    }
    Ok(Report {
        check: "mind",
        n,
        pass: true,
        details: format!("{} minimizer classes at d-count {min_d}", enumerated.len()),
    })
}

/// Check the Colless extremes over the catalog: maximum `(n-1)(n-2)/2`
/// attained by the ladder, minimum `delta(n)` attained by both the
/// divide-and-conquer and the complete-full-binary constructions.
pub fn verify_colless_extremes(n: u64) -> Result<Report, OracleError> {
    let catalog = enumerate_shapes(n)?;
    let max = catalog.stats.iter().map(|s| s.colless).max().expect("nonempty");
    let min = catalog.stats.iter().map(|s| s.colless).min().expect("nonempty");
    let expected_max = c_max(n)?;
    let expected_min = delta(n, DeltaMethod::Recursive)?;
    let mut failures = Vec::new();
    if max != expected_max {
        failures.push(format!("max {max}, expected {expected_max}"));
    }
    if min != expected_min {
        failures.push(format!("min {min}, expected {expected_min}"));
    }
    for (name, tree, expected) in [
        ("ladder", make_ladder(n), expected_max),
        ("divide-and-conquer", make_divide_and_conquer(n), expected_min),
        ("complete-full-binary", make_complete_full_binary(n), expected_min),
    ] {
        let got = tree.colless_index();
        if got != expected {
            failures.push(format!("{name} scores {got}, expected {expected}"));
        }
    }
    let pass = failures.is_empty();
    let details = if pass {
        format!("colless range [{min}, {max}], both extremes attained")
    } else {
        failures.join("; ")
    };
    Ok(Report { check: "colless-extremes", n, pass, details })
}

/// Run all three checks for every `n` up to `n_max`.
pub fn verify_all(n_max: u64) -> Result<Vec<Report>, OracleError> {
    let mut reports = Vec::new();
    for n in 1..=n_max {
        reports.push(verify_theta(n)?);
        reports.push(verify_mind(n)?);
        reports.push(verify_colless_extremes(n)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{alpha, products_for_form};
    use crate::formulas::{c_asc, c_desc, CAscMethod};
    use crate::mind::binary_decomposition;
    use crate::tree::NodeKind;
    use std::collections::{HashMap, HashSet};

    #[test]
    fn catalog_sizes_match_alpha() {
        for n in 1..=12u64 {
            let catalog = enumerate_shapes(n).unwrap();
            assert_eq!(BigCount::from(catalog.len() as u64), alpha(n).unwrap(), "n={n}");
        }
        assert_eq!(enumerate_shapes(1).unwrap().len(), 1);
        assert_eq!(enumerate_shapes(6).unwrap().len(), 6);
    }

    #[test]
    fn catalog_at_8_keeps_both_orders_of_the_even_split() {
        let catalog = enumerate_shapes(8).unwrap();
        assert_eq!(catalog.len(), 24);
        let distinct: HashSet<CanonicalForm> =
            catalog.shapes.iter().map(Tree::canonical_form).collect();
        // One pair of mirror twins collapses under isomorphism.
        assert_eq!(distinct.len(), 23);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            enumerate_shapes(0),
            Err(OracleError::DomainTooSmall { .. })
        ));
        assert!(matches!(
            enumerate_shapes(ENUMERATE_SHAPES_MAX + 1),
            Err(OracleError::CatalogTooLarge { .. })
        ));
    }

    #[test]
    fn histograms_match_theta_rows() {
        for n in 1..=12u64 {
            let report = verify_theta(n).unwrap();
            assert!(report.pass, "n={n}: {}", report.details);
        }
        // Frozen spot row: 47 shapes on 9 leaves split by S count.
        let hist = enumerate_shapes(9).unwrap().s_histogram();
        assert_eq!(hist, vec![0, 1, 9, 14, 13, 8, 1, 1, 0]);
    }

    #[test]
    fn d_histogram_is_the_reversed_s_histogram() {
        for n in [5u64, 9, 12] {
            let catalog = enumerate_shapes(n).unwrap();
            let s = catalog.s_histogram();
            let d = catalog.d_histogram();
            for i in 0..n as usize {
                assert_eq!(d[i], s[n as usize - 1 - i]);
            }
        }
    }

    #[test]
    fn all_s_shape_exists_only_at_powers_of_two() {
        for n in 1..=16u64 {
            let catalog = enumerate_shapes(n).unwrap();
            let all_s = catalog.stats.iter().filter(|s| s.d_count == 0).count();
            let expected = if n.is_power_of_two() { 1 } else { 0 };
            assert_eq!(all_s, expected, "n={n}");
        }
    }

    #[test]
    fn verify_mind_passes_with_expected_class_counts() {
        for n in 1..=12u64 {
            let report = verify_mind(n).unwrap();
            assert!(report.pass, "n={n}: {}", report.details);
        }
        // 12 = 8 + 4 has one minimizer class with a single D node.
        let catalog = enumerate_shapes(12).unwrap();
        let min_d = catalog.stats.iter().map(|s| s.d_count).min().unwrap();
        assert_eq!(min_d, 1);
    }

    #[test]
    fn verify_colless_extremes_passes() {
        for n in 1..=12u64 {
            let report = verify_colless_extremes(n).unwrap();
            assert!(report.pass, "n={n}: {}", report.details);
        }
        let report = verify_colless_extremes(6).unwrap();
        assert!(report.details.contains("[2, 10]"), "{}", report.details);
    }

    #[test]
    fn verify_all_covers_every_n() {
        let reports = verify_all(8).unwrap();
        assert_eq!(reports.len(), 24);
        assert!(reports.iter().all(|r| r.pass));
        let json = serde_json::to_string(&reports[0]).unwrap();
        assert!(json.contains("\"check\":\"theta\""));
        assert!(json.contains("\"pass\":true"));
    }

    #[test]
    fn labeled_products_per_shape_match_the_halving_formula() {
        // Distinct leaf-labeled products of a shape, counted by brute
        // force over all permutations modulo sibling swaps.
        for n in 1..=6u64 {
            let catalog = enumerate_shapes(n).unwrap();
            for (tree, stats) in catalog.shapes.iter().zip(&catalog.stats) {
                let mut seen: HashSet<Vec<u8>> = HashSet::new();
                let mut labels: Vec<u8> = (0..n as u8).collect();
                permute(&mut labels, 0, &mut |perm| {
                    seen.insert(labeled_key(tree, perm));
                });
                let expected = products_for_form(n, stats.s_count).unwrap();
                assert_eq!(BigCount::from(seen.len() as u64), expected, "n={n}");
            }
        }
    }

    fn permute(labels: &mut Vec<u8>, at: usize, visit: &mut impl FnMut(&[u8])) {
        if at == labels.len() {
            visit(labels);
            return;
        }
        for i in at..labels.len() {
            labels.swap(at, i);
            permute(labels, at + 1, visit);
            labels.swap(at, i);
        }
    }

    /// Order-insensitive encoding of a leaf-labeled tree: two labelings
    /// collide exactly when sibling swaps map one to the other.
    fn labeled_key(tree: &Tree, perm: &[u8]) -> Vec<u8> {
        let ranks: HashMap<u32, u8> = tree
            .leaf_indices()
            .into_iter()
            .zip(perm.iter().copied())
            .collect();
        let mut keys: Vec<Vec<u8>> = vec![Vec::new(); tree.nodes().len()];
        for (i, node) in tree.nodes().iter().enumerate() {
            keys[i] = match *node {
                NodeKind::Leaf { .. } => vec![b'a' + ranks[&(i as u32)]],
                NodeKind::Internal { left, right } => {
                    let (a, b) = (&keys[left as usize], &keys[right as usize]);
                    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                    let mut key = Vec::with_capacity(lo.len() + hi.len() + 3);
                    key.push(b'(');
                    key.extend_from_slice(lo);
                    key.push(b',');
                    key.extend_from_slice(hi);
                    key.push(b')');
                    key
                }
            };
        }
        keys.swap_remove(tree.root() as usize)
    }

    fn parents(tree: &Tree) -> Vec<u32> {
        let mut parent = vec![u32::MAX; tree.nodes().len()];
        for (i, node) in tree.nodes().iter().enumerate() {
            if let NodeKind::Internal { left, right } = *node {
                parent[left as usize] = i as u32;
                parent[right as usize] = i as u32;
            }
        }
        parent
    }

    fn rebuild_replacing(tree: &Tree, node: u32, cut: u32, graft: &Tree) -> Tree {
        if node == cut {
            return graft.clone();
        }
        match tree.nodes()[node as usize] {
            NodeKind::Leaf { .. } => Tree::leaf(None),
            NodeKind::Internal { left, right } => rebuild_replacing(tree, left, cut, graft)
                .join(&rebuild_replacing(tree, right, cut, graft)),
        }
    }

    #[test]
    fn detaching_the_smallest_block_recovers_the_colless_increment() {
        use crate::mind::is_mind;
        // Removing the perfect block of the lowest binary digit from a
        // minimum-D tree leaves a minimum-D tree, and the Colless change
        // is |T_1| + 2^r * sum(f) - 2^r over the off-path subtree sizes
        // t_1 (block sibling) .. t_j (under the root), where f(i) is -1
        // when t_i exceeds the partial sum before it and +1 otherwise.
        for n in 3..=14u64 {
            if n.is_power_of_two() {
                continue;
            }
            let rho1 = n.trailing_zeros();
            let block = 1u64 << rho1;
            for tree in enumerate_mind(n).unwrap() {
                let counts = tree.leaf_counts();
                let parent = parents(&tree);
                let mut located = None;
                for v in 0..tree.nodes().len() as u32 {
                    if v == tree.root() || counts[v as usize] != block {
                        continue;
                    }
                    let NodeKind::Internal { left, right } = tree.nodes()[parent[v as usize] as usize]
                    else {
                        unreachable!("parents are internal");
                    };
                    let sibling = if left == v { right } else { left };
                    if counts[sibling as usize] != block {
                        assert!(located.is_none(), "block node must be unique, n={n}");
                        located = Some((v, parent[v as usize], sibling));
                    }
                }
                let (block_node, cut, sibling) = located.expect("block node exists");
                assert_eq!(tree.subtree(block_node).sd_label().d_count, 0);

                let mut sizes = Vec::new();
                let mut at = block_node;
                while at != tree.root() {
                    let up = parent[at as usize];
                    let NodeKind::Internal { left, right } = tree.nodes()[up as usize] else {
                        unreachable!("parents are internal");
                    };
                    let off = if left == at { right } else { left };
                    sizes.push(counts[off as usize] as i128);
                    at = up;
                }
                assert_eq!(sizes[0], counts[sibling as usize] as i128);

                let reduced = rebuild_replacing(&tree, tree.root(), cut, &tree.subtree(sibling));
                assert_eq!(reduced.leaves(), n - block);
                assert!(is_mind(&reduced));

                let mut increment = sizes[0] - i128::from(block);
                let mut partial = sizes[0];
                for &t in &sizes[1..] {
                    assert_ne!(t, partial, "off-path sizes never tie the partial sum");
                    increment += i128::from(block) * if t > partial { -1 } else { 1 };
                    partial += t;
                }
                assert_eq!(
                    i128::from(tree.colless_index()),
                    i128::from(reduced.colless_index()) + increment,
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn block_removal_recurrences_for_the_extremal_arrangements() {
        // Specializing the increment to the two ladder arrangements gives
        // closed recurrences; check them against the direct formulas.
        for n in 3..=4096u64 {
            if n.is_power_of_two() {
                continue;
            }
            let decomposition = binary_decomposition(n).unwrap();
            let exponents = &decomposition.exponents;
            let omega = i128::from(decomposition.omega());
            let smallest = i128::from(1u64 << exponents[exponents.len() - 1]);
            let next_smallest = i128::from(1u64 << exponents[exponents.len() - 2]);
            let m = n - (1u64 << exponents[exponents.len() - 1]);
            let desc = i128::from(c_desc(m).unwrap()) + (next_smallest - smallest * (omega - 2))
                - smallest;
            assert_eq!(i128::from(c_desc(n).unwrap()), desc, "n={n}");
            let asc = i128::from(c_asc(m, CAscMethod::Recurrence).unwrap()) + i128::from(m)
                - smallest;
            assert_eq!(i128::from(c_asc(n, CAscMethod::Recurrence).unwrap()), asc, "n={n}");
        }
    }
}
