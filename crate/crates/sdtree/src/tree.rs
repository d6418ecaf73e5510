//! Arena-backed full binary trees with S/D labeling, Colless index,
//! canonical forms, the classic reduction-tree constructions, and
//! Newick/DOT/JSON text forms.
//!
//! Storage invariant: `nodes` is an arena where every internal node appears
//! after both of its children, so every bottom-up quantity is a single
//! forward pass and no routine here recurses on tree depth. Leaves appear in
//! arena order exactly in left-to-right tree order; constructors and the
//! parser both maintain this.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: &'static str },
    #[error("leaf label {label:?} has characters outside [A-Za-z0-9_.-]")]
    InvalidLabel { label: String },
    #[error("expected {expected} leaf labels, got {got}")]
    LabelCount { expected: usize, got: usize },
}

/// One arena slot: a leaf (optionally labeled) or an internal node holding
/// arena indices of its two children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Leaf { label: Option<Box<str>> },
    Internal { left: u32, right: u32 },
}

/// S marks an internal node whose children carry equal leaf counts,
/// D one whose children differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SdKind {
    S,
    D,
}

/// Per-node S/D classification plus the leaf count under every node.
/// `kinds[i]` is `None` exactly for leaves. A single leaf yields the empty
/// labeling: no internal nodes, both counts zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdLabeling {
    pub kinds: Vec<Option<SdKind>>,
    pub leaf_counts: Vec<u64>,
    pub s_count: u64,
    pub d_count: u64,
}

/// Shape fingerprint: equal exactly for isomorphic trees (labels ignored).
/// Total order and hashing make it usable as a dedup key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Immutable full binary tree. Construct through the provided builders or
/// the Newick parser; structural equality is arena equality, so compare
/// [`Tree::canonical_form`] values to test isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<NodeKind>,
    root: u32,
    leaves: u64,
}

impl Tree {
    pub fn leaf(label: Option<&str>) -> Tree {
        Tree {
            nodes: vec![NodeKind::Leaf {
                label: label.map(Into::into),
            }],
            root: 0,
            leaves: 1,
        }
    }

    fn from_parts(nodes: Vec<NodeKind>, root: u32) -> Tree {
        let leaves = nodes
            .iter()
            .filter(|n| matches!(n, NodeKind::Leaf { .. }))
            .count() as u64;
        Tree { nodes, root, leaves }
    }

    /// New tree whose root joins `self` (left) and `right`.
    pub fn join(&self, right: &Tree) -> Tree {
        let mut nodes = Vec::with_capacity(self.nodes.len() + right.nodes.len() + 1);
        nodes.extend_from_slice(&self.nodes);
        let offset = self.nodes.len() as u32;
        for node in &right.nodes {
            nodes.push(shift_node(node, offset));
        }
        nodes.push(NodeKind::Internal {
            left: self.root,
            right: offset + right.root,
        });
        let root = (nodes.len() - 1) as u32;
        Tree {
            nodes,
            root,
            leaves: self.leaves + right.leaves,
        }
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn leaves(&self) -> u64 {
        self.leaves
    }

    /// Leaf count under every node, indexed by arena slot.
    pub fn leaf_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            counts[i] = match node {
                NodeKind::Leaf { .. } => 1,
                NodeKind::Internal { left, right } => {
                    debug_assert!((*left as usize) < i && (*right as usize) < i);
                    counts[*left as usize] + counts[*right as usize]
                }
            };
        }
        counts
    }

    pub fn sd_label(&self) -> SdLabeling {
        let leaf_counts = self.leaf_counts();
        let mut kinds = vec![None; self.nodes.len()];
        let (mut s_count, mut d_count) = (0u64, 0u64);
        for (i, node) in self.nodes.iter().enumerate() {
            if let NodeKind::Internal { left, right } = node {
                let kind = if leaf_counts[*left as usize] == leaf_counts[*right as usize] {
                    s_count += 1;
                    SdKind::S
                } else {
                    d_count += 1;
                    SdKind::D
                };
                kinds[i] = Some(kind);
            }
        }
        SdLabeling {
            kinds,
            leaf_counts,
            s_count,
            d_count,
        }
    }

    /// Sum over internal nodes of |left leaves - right leaves|.
    pub fn colless_index(&self) -> u64 {
        let counts = self.leaf_counts();
        self.nodes
            .iter()
            .filter_map(|node| match node {
                NodeKind::Internal { left, right } => {
                    Some(counts[*left as usize].abs_diff(counts[*right as usize]))
                }
                NodeKind::Leaf { .. } => None,
            })
            .sum()
    }

    /// Shape fingerprint, invariant under any sequence of sibling swaps.
    pub fn canonical_form(&self) -> CanonicalForm {
        let (mut encodings, _) = self.canonical_encodings();
        CanonicalForm(std::mem::take(&mut encodings[self.root as usize]))
    }

    /// Same shape re-oriented into canonical form: at every internal node the
    /// heavier child sits on the left; equal-weight children are ordered by
    /// their encodings. Labels travel with their leaves.
    pub fn canonicalize(&self) -> Tree {
        let (_, swap) = self.canonical_encodings();
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| match node {
                NodeKind::Internal { left, right } if swap[i] => NodeKind::Internal {
                    left: *right,
                    right: *left,
                },
                other => other.clone(),
            })
            .collect();
        Tree {
            nodes,
            root: self.root,
            leaves: self.leaves,
        }
    }

    // Bottom-up canonical encodings: leaf is [0], internal is 1 followed by
    // the child encodings in canonical order (heavier first; ties broken by
    // lexicographically smaller encoding first). Child buffers are consumed
    // as they are absorbed, keeping memory linear in output size.
    fn canonical_encodings(&self) -> (Vec<Vec<u8>>, Vec<bool>) {
        let counts = self.leaf_counts();
        let mut enc: Vec<Vec<u8>> = vec![Vec::new(); self.nodes.len()];
        let mut swap = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                NodeKind::Leaf { .. } => enc[i] = vec![0u8],
                NodeKind::Internal { left, right } => {
                    let (l, r) = (*left as usize, *right as usize);
                    let el = std::mem::take(&mut enc[l]);
                    let er = std::mem::take(&mut enc[r]);
                    let keep = match counts[l].cmp(&counts[r]) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => el <= er,
                    };
                    swap[i] = !keep;
                    let (first, second) = if keep { (el, er) } else { (er, el) };
                    let mut bytes = Vec::with_capacity(1 + first.len() + second.len());
                    bytes.push(1u8);
                    bytes.extend_from_slice(&first);
                    bytes.extend_from_slice(&second);
                    enc[i] = bytes;
                }
            }
        }
        (enc, swap)
    }

    /// Arena indices of the leaves, in left-to-right tree order.
    pub fn leaf_indices(&self) -> Vec<u32> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| matches!(n, NodeKind::Leaf { .. }).then_some(i as u32))
            .collect()
    }

    /// Leaf labels in left-to-right tree order.
    pub fn leaf_labels(&self) -> Vec<Option<&str>> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                NodeKind::Leaf { label } => Some(label.as_deref()),
                NodeKind::Internal { .. } => None,
            })
            .collect()
    }

    /// Copy of the tree with leaves relabeled in left-to-right order.
    pub fn with_leaf_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Tree, TreeError> {
        if labels.len() as u64 != self.leaves {
            return Err(TreeError::LabelCount {
                expected: self.leaves as usize,
                got: labels.len(),
            });
        }
        let mut next = 0usize;
        let nodes = self
            .nodes
            .iter()
            .map(|node| match node {
                NodeKind::Leaf { .. } => {
                    let label = labels[next].as_ref();
                    next += 1;
                    NodeKind::Leaf {
                        label: Some(label.into()),
                    }
                }
                internal => internal.clone(),
            })
            .collect();
        Ok(Tree {
            nodes,
            root: self.root,
            leaves: self.leaves,
        })
    }

    /// Standalone copy of the subtree rooted at an arena index.
    ///
    /// # Panics
    /// Panics if `node` is out of bounds.
    pub fn subtree(&self, node: u32) -> Tree {
        let mut keep = vec![false; self.nodes.len()];
        let mut stack = vec![node];
        while let Some(i) = stack.pop() {
            keep[i as usize] = true;
            if let NodeKind::Internal { left, right } = &self.nodes[i as usize] {
                stack.push(*left);
                stack.push(*right);
            }
        }
        let mut map = vec![0u32; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            map[i] = nodes.len() as u32;
            nodes.push(match node {
                NodeKind::Leaf { label } => NodeKind::Leaf { label: label.clone() },
                NodeKind::Internal { left, right } => NodeKind::Internal {
                    left: map[*left as usize],
                    right: map[*right as usize],
                },
            });
        }
        Tree::from_parts(nodes, map[node as usize])
    }

    /// Replace the i-th leaf (left-to-right) with `parts[i]`.
    ///
    /// # Panics
    /// Panics unless `parts.len()` equals the leaf count.
    pub fn substitute_leaves(&self, parts: &[Tree]) -> Tree {
        assert_eq!(parts.len() as u64, self.leaves, "one part per leaf");
        let extra: usize = parts.iter().map(|p| p.nodes.len()).sum();
        let mut nodes = Vec::with_capacity(self.nodes.len() - parts.len() + extra);
        let mut map = vec![0u32; self.nodes.len()];
        let mut next = 0usize;
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                NodeKind::Leaf { .. } => {
                    let part = &parts[next];
                    next += 1;
                    let offset = nodes.len() as u32;
                    for pn in &part.nodes {
                        nodes.push(shift_node(pn, offset));
                    }
                    map[i] = offset + part.root;
                }
                NodeKind::Internal { left, right } => {
                    nodes.push(NodeKind::Internal {
                        left: map[*left as usize],
                        right: map[*right as usize],
                    });
                    map[i] = (nodes.len() - 1) as u32;
                }
            }
        }
        let root = map[self.root as usize];
        Tree::from_parts(nodes, root)
    }

    /// Newick text: leaves print their label (or nothing), internal nodes
    /// print `(left,right)`, and the tree ends with `;`. Labels must stay
    /// within `[A-Za-z0-9_.-]`.
    pub fn to_newick(&self) -> Result<String, TreeError> {
        enum Item {
            Node(u32),
            Byte(u8),
        }
        let mut out = String::with_capacity(self.nodes.len() * 2 + 1);
        let mut stack = vec![Item::Node(self.root)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Byte(b) => out.push(b as char),
                Item::Node(i) => match &self.nodes[i as usize] {
                    NodeKind::Leaf { label } => {
                        if let Some(text) = label.as_deref() {
                            if !text.bytes().all(is_label_byte) || text.is_empty() {
                                return Err(TreeError::InvalidLabel {
                                    label: text.to_string(),
                                });
                            }
                            out.push_str(text);
                        }
                    }
                    NodeKind::Internal { left, right } => {
                        stack.push(Item::Byte(b')'));
                        stack.push(Item::Node(*right));
                        stack.push(Item::Byte(b','));
                        stack.push(Item::Node(*left));
                        stack.push(Item::Byte(b'('));
                    }
                },
            }
        }
        out.push(';');
        Ok(out)
    }

    /// Graphviz DOT text. Internal nodes carry their S/D kind and leaf
    /// count; leaves are boxes carrying their label (if any).
    pub fn to_dot(&self) -> String {
        let labeling = self.sd_label();
        let mut out = String::from("digraph reduction_tree {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                NodeKind::Leaf { label } => {
                    let text = match label.as_deref() {
                        Some(t) => format!("{} n=1", dot_escape(t)),
                        None => "n=1".to_string(),
                    };
                    out.push_str(&format!("  n{i} [label=\"{text}\" shape=box];\n"));
                }
                NodeKind::Internal { .. } => {
                    let kind = match labeling.kinds[i] {
                        Some(SdKind::S) => "S",
                        Some(SdKind::D) => "D",
                        None => unreachable!("internal nodes are always labeled"),
                    };
                    out.push_str(&format!(
                        "  n{i} [label=\"{kind} n={}\"];\n",
                        labeling.leaf_counts[i]
                    ));
                }
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let NodeKind::Internal { left, right } = node {
                out.push_str(&format!("  n{i} -> n{left};\n"));
                out.push_str(&format!("  n{i} -> n{right};\n"));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Compact JSON: `{"leaves":..,"root":..,"nodes":[{"id","kind","left","right","label"},..]}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonNode<'a> {
            id: u32,
            kind: &'static str,
            left: Option<u32>,
            right: Option<u32>,
            label: Option<&'a str>,
        }
        #[derive(Serialize)]
        struct JsonTree<'a> {
            leaves: u64,
            root: u32,
            nodes: Vec<JsonNode<'a>>,
        }
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| match node {
                NodeKind::Leaf { label } => JsonNode {
                    id: i as u32,
                    kind: "leaf",
                    left: None,
                    right: None,
                    label: label.as_deref(),
                },
                NodeKind::Internal { left, right } => JsonNode {
                    id: i as u32,
                    kind: "internal",
                    left: Some(*left),
                    right: Some(*right),
                    label: None,
                },
            })
            .collect();
        let view = JsonTree {
            leaves: self.leaves,
            root: self.root,
            nodes,
        };
        serde_json::to_string(&view).expect("tree view serializes")
    }

    /// Strict Newick parser: `tree := subtree ";"`, `subtree := leaf |
    /// "(" subtree "," subtree ")"`, `leaf := [A-Za-z0-9_.-]*`. No
    /// whitespace, nothing after the `;`. `";"` alone is a single unlabeled
    /// leaf. Runs on an explicit stack, so arbitrarily deep inputs are fine.
    pub fn parse_newick(input: &str) -> Result<Tree, TreeError> {
        let bytes = input.as_bytes();
        let mut nodes: Vec<NodeKind> = Vec::new();
        // One frame per unclosed '(': the left child index once the ',' has
        // been consumed.
        let mut stack: Vec<Option<u32>> = Vec::new();
        let mut p = 0usize;
        'subtree: loop {
            if p < bytes.len() && bytes[p] == b'(' {
                stack.push(None);
                p += 1;
                continue 'subtree;
            }
            let start = p;
            while p < bytes.len() && is_label_byte(bytes[p]) {
                p += 1;
            }
            let label = (p > start).then(|| input[start..p].into());
            nodes.push(NodeKind::Leaf { label });
            let mut idx = (nodes.len() - 1) as u32;
            // Close as many frames as the input allows, then either continue
            // with a right sibling or finish at the ';'.
            loop {
                match stack.last_mut() {
                    None => {
                        if p >= bytes.len() || bytes[p] != b';' {
                            return Err(TreeError::Parse {
                                position: p,
                                message: "expected ';'",
                            });
                        }
                        p += 1;
                        if p != bytes.len() {
                            return Err(TreeError::Parse {
                                position: p,
                                message: "trailing bytes after ';'",
                            });
                        }
                        return Ok(Tree::from_parts(nodes, idx));
                    }
                    Some(slot) => match slot {
                        None => {
                            if p >= bytes.len() || bytes[p] != b',' {
                                return Err(TreeError::Parse {
                                    position: p,
                                    message: "expected ','",
                                });
                            }
                            *slot = Some(idx);
                            p += 1;
                            continue 'subtree;
                        }
                        Some(left) => {
                            if p >= bytes.len() || bytes[p] != b')' {
                                return Err(TreeError::Parse {
                                    position: p,
                                    message: "expected ')'",
                                });
                            }
                            let left = *left;
                            stack.pop();
                            p += 1;
                            nodes.push(NodeKind::Internal { left, right: idx });
                            idx = (nodes.len() - 1) as u32;
                        }
                    },
                }
            }
        }
    }
}

fn shift_node(node: &NodeKind, offset: u32) -> NodeKind {
    match node {
        NodeKind::Leaf { label } => NodeKind::Leaf {
            label: label.clone(),
        },
        NodeKind::Internal { left, right } => NodeKind::Internal {
            left: left + offset,
            right: right + offset,
        },
    }
}

fn is_label_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-'
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Left-deep caterpillar on `n` leaves: each new leaf joins as the right
/// child of a new root. Worst possible balance; Colless index
/// `(n-1)(n-2)/2`.
///
/// # Panics
/// Panics if `n == 0`.
pub fn make_ladder(n: u64) -> Tree {
    assert!(n >= 1, "a tree needs at least one leaf");
    let mut nodes = Vec::with_capacity(2 * n as usize - 1);
    nodes.push(NodeKind::Leaf { label: None });
    let mut top = 0u32;
    for _ in 1..n {
        nodes.push(NodeKind::Leaf { label: None });
        let leaf = (nodes.len() - 1) as u32;
        nodes.push(NodeKind::Internal { left: top, right: leaf });
        top = (nodes.len() - 1) as u32;
    }
    Tree {
        nodes,
        root: top,
        leaves: n,
    }
}

/// Halving divide and conquer: `n` splits into `ceil(n/2)` on the left and
/// `floor(n/2)` on the right.
///
/// # Panics
/// Panics if `n == 0`.
pub fn make_divide_and_conquer(n: u64) -> Tree {
    assert!(n >= 1, "a tree needs at least one leaf");
    if n == 1 {
        return Tree::leaf(None);
    }
    let left = make_divide_and_conquer(n.div_ceil(2));
    let right = make_divide_and_conquer(n / 2);
    left.join(&right)
}

/// Perfect tree on `2^k` leaves.
///
/// # Panics
/// Panics if `k > 28` (the arena would not fit in memory / u32 indices).
pub fn make_perfect(k: u32) -> Tree {
    assert!(k <= 28, "perfect tree of 2^{k} leaves is too large");
    let mut t = Tree::leaf(None);
    for _ in 0..k {
        t = t.join(&t);
    }
    t
}

/// Complete-full-binary construction: split off the largest possible
/// perfect subtree at every step. For `n = 2^k + r` with `0 < r <= 2^(k-1)`
/// the children are the complete tree on `2^(k-1) + r` leaves and a perfect
/// `2^(k-1)`; for larger `r` they are a perfect `2^k` and the complete tree
/// on `r` leaves. The heavier child always sits on the left.
///
/// # Panics
/// Panics if `n == 0`.
pub fn make_complete_full_binary(n: u64) -> Tree {
    assert!(n >= 1, "a tree needs at least one leaf");
    if n.is_power_of_two() {
        return make_perfect(n.trailing_zeros());
    }
    let k = 63 - n.leading_zeros();
    let r = n - (1u64 << k);
    let half = 1u64 << (k - 1);
    if r <= half {
        make_complete_full_binary(half + r).join(&make_perfect(k - 1))
    } else {
        make_perfect(k).join(&make_complete_full_binary(r))
    }
}
