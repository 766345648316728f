//! Monochromatic complete subtrees of leaf-colored branching trees.
//!
//! Given a complete tree of uniform leaf depth whose leaves carry colors,
//! [`mono_subtree`] extracts a complete `k`-branching subtree of full height
//! all of whose leaves share one color. It always succeeds when every
//! internal node has at least [`required_branching`]`(colors, k)` children:
//! a pigeonhole argument replayed level by level via the rank predicates of
//! [`rank_table`]. When the extraction fails, the returned refutation path
//! witnesses how the failure propagates from the root down to a node whose
//! child count is too small for the pigeonhole step.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::space::{Coloring, ColoringError};
use crate::treespace::TreeSpace;

/// A rooted tree with ordered children whose leaves all sit at the same
/// depth. Height 0 (a single node that is both root and leaf) is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingTree {
    names: Vec<String>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    height: usize,
}

/// Structural failure when assembling a branching tree.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BranchingTreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("node {node:?} references unknown parent {parent:?}")]
    UnknownParent { node: String, parent: String },
    #[error("tree has no root: every node has a parent")]
    NoRoot,
    #[error("tree has multiple roots: {first:?} and {second:?}")]
    MultipleRoots { first: String, second: String },
    #[error("node {0:?} is not reachable from the root")]
    Unreachable(String),
    #[error("leaf {leaf:?} sits at depth {depth}, expected {expected}")]
    NonUniformLeafDepth {
        leaf: String,
        depth: usize,
        expected: usize,
    },
}

impl BranchingTree {
    /// Builds and validates a tree from `(id, parent id)` pairs. Children
    /// keep their order of appearance; every leaf must sit at the same depth.
    pub fn new(nodes: Vec<(String, Option<String>)>) -> Result<Self, BranchingTreeError> {
        if nodes.is_empty() {
            return Err(BranchingTreeError::Empty);
        }
        let mut index = std::collections::BTreeMap::new();
        for (i, (name, _)) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(BranchingTreeError::DuplicateNode(name.clone()));
            }
        }
        let mut parent = vec![None; nodes.len()];
        let mut root = None;
        for (i, (name, parent_name)) in nodes.iter().enumerate() {
            match parent_name {
                Some(p) => {
                    parent[i] = Some(*index.get(p).ok_or_else(|| {
                        BranchingTreeError::UnknownParent {
                            node: name.clone(),
                            parent: p.clone(),
                        }
                    })?);
                }
                None => match root {
                    None => root = Some(i),
                    Some(r) => {
                        return Err(BranchingTreeError::MultipleRoots {
                            first: nodes[r].0.clone(),
                            second: name.clone(),
                        })
                    }
                },
            }
        }
        let root = root.ok_or(BranchingTreeError::NoRoot)?;
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, &p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p].push(i);
            }
        }
        let mut depth = vec![usize::MAX; nodes.len()];
        depth[root] = 0;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                stack.push(c);
            }
        }
        if let Some(i) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(BranchingTreeError::Unreachable(nodes[i].0.clone()));
        }
        let leaf_depths: Vec<usize> = (0..nodes.len())
            .filter(|&i| children[i].is_empty())
            .map(|i| depth[i])
            .collect();
        let height = *leaf_depths.iter().max().expect("a tree has leaves");
        for (i, (name, _)) in nodes.iter().enumerate() {
            if children[i].is_empty() && depth[i] != height {
                return Err(BranchingTreeError::NonUniformLeafDepth {
                    leaf: name.clone(),
                    depth: depth[i],
                    expected: height,
                });
            }
        }
        Ok(BranchingTree {
            names: nodes.into_iter().map(|(n, _)| n).collect(),
            parent,
            children,
            depth,
            height,
        })
    }

    /// The complete `b`-ary tree of the given height, nodes named by their
    /// root path (`"r"`, `"r.0"`, `"r.0.1"`, ...).
    pub fn complete(b: usize, height: usize) -> Self {
        assert!(b >= 1, "branching must be at least 1");
        let mut nodes = vec![("r".to_string(), None)];
        let mut frontier = vec!["r".to_string()];
        for _ in 0..height {
            let mut next = Vec::new();
            for name in frontier {
                for i in 0..b {
                    let child = format!("{name}.{i}");
                    nodes.push((child.clone(), Some(name.clone())));
                    next.push(child);
                }
            }
            frontier = next;
        }
        BranchingTree::new(nodes).expect("complete trees are uniform by construction")
    }

    /// Reads the shape of a tree space (levels are dropped; leaf depths must
    /// already be uniform).
    pub fn from_tree_space(tree: &TreeSpace) -> Result<Self, BranchingTreeError> {
        let nodes = preorder_nodes(tree);
        BranchingTree::new(nodes)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn root(&self) -> usize {
        self.parent.iter().position(Option::is_none).expect("validated root")
    }

    pub fn name_of(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    /// All leaf indices, ascending.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| self.is_leaf(i)).collect()
    }

    /// Leaf names, in ascending index order.
    pub fn leaf_names(&self) -> Vec<String> {
        self.leaves().iter().map(|&i| self.names[i].clone()).collect()
    }
}

fn preorder_nodes(tree: &TreeSpace) -> Vec<(String, Option<String>)> {
    let mut out = Vec::with_capacity(tree.node_count());
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        out.push((
            tree.name_of(v).to_string(),
            tree.parent(v).map(|p| tree.name_of(p).to_string()),
        ));
        for &c in tree.children(v).iter().rev() {
            stack.push(c);
        }
    }
    out
}

/// The branching that makes a monochromatic `k`-branching subtree
/// unavoidable for any `colors`-coloring: `colors * (k - 1) + 1`.
///
/// With that many children per node, at every level some color class keeps
/// at least `k` qualifying children (pigeonhole).
pub fn required_branching(colors: usize, k: usize) -> usize {
    assert!(colors >= 1, "at least one color");
    assert!(k >= 1, "target branching must be at least 1");
    colors * (k - 1) + 1
}

/// A monochromatic complete subtree: the union of the chosen root-to-leaf
/// paths, every internal node keeping exactly `k` children, every kept leaf
/// (a leaf of the host tree) colored `color`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoSubtreeCert {
    /// Kept node names in preorder.
    pub nodes: Vec<String>,
    pub color: usize,
    pub k: usize,
}

/// Result of [`mono_subtree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubtreeOutcome {
    Found(MonoSubtreeCert),
    /// No color admits a full-height `k`-branching subtree. The path
    /// descends from the root through nodes where every color fails,
    /// ending at a node with too few children for the pigeonhole step.
    NotFound { refutation_path: Vec<String> },
}

fn leaf_colors(
    tree: &BranchingTree,
    coloring: &Coloring,
) -> Result<Vec<Option<usize>>, ColoringError> {
    let mut colors = vec![None; tree.node_count()];
    for i in tree.leaves() {
        let name = tree.name_of(i);
        let c = coloring
            .color_of(name)
            .ok_or_else(|| ColoringError::UncoloredPoint(name.to_string()))?;
        colors[i] = Some(c);
    }
    Ok(colors)
}

/// Number of colors after restricting to the tree's leaves (colors assigned
/// to non-leaf ids are ignored).
pub fn leaf_color_count(tree: &BranchingTree, coloring: &Coloring) -> Result<usize, ColoringError> {
    let colors = leaf_colors(tree, coloring)?;
    Ok(colors.into_iter().flatten().map(|c| c + 1).max().unwrap_or(0))
}

/// The rank predicates, bottom-up: `table[node][col]` holds at a leaf iff
/// the leaf has color `col`, and at an internal node iff at least `k`
/// children satisfy it for `col`.
///
/// The coloring must cover every leaf; entries for non-leaf ids are ignored.
pub fn rank_table(
    tree: &BranchingTree,
    coloring: &Coloring,
    k: usize,
) -> Result<Vec<Vec<bool>>, ColoringError> {
    assert!(k >= 1, "target branching must be at least 1");
    let colors = leaf_colors(tree, coloring)?;
    let c = leaf_color_count(tree, coloring)?;
    let mut table = vec![vec![false; c]; tree.node_count()];
    // Deeper nodes first: sort indices by depth descending.
    let mut order: Vec<usize> = (0..tree.node_count()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(tree.depth(i)));
    for i in order {
        if tree.is_leaf(i) {
            if let Some(col) = colors[i] {
                table[i][col] = true;
            }
        } else {
            for col in 0..c {
                let qualifying = tree
                    .children(i)
                    .iter()
                    .filter(|&&ch| table[ch][col])
                    .count();
                table[i][col] = qualifying >= k;
            }
        }
    }
    Ok(table)
}

/// Extracts a monochromatic complete `k`-branching subtree of full height,
/// or reports a refutation path.
///
/// The smallest color whose rank predicate holds at the root wins; at every
/// kept node the first `k` qualifying children (in canonical order) are
/// kept. Certificates are re-verified before being returned. `NotFound` can
/// only occur when some node has fewer than
/// [`required_branching`]`(colors, k)` children.
pub fn mono_subtree(
    tree: &BranchingTree,
    coloring: &Coloring,
    k: usize,
) -> Result<SubtreeOutcome, ColoringError> {
    assert!(k >= 1, "target branching must be at least 1");
    let table = rank_table(tree, coloring, k)?;
    let c = leaf_color_count(tree, coloring)?;
    let root = tree.root();
    let winning = (0..c).find(|&col| table[root][col]);

    let Some(color) = winning else {
        // Descend through nodes where every color fails.
        let mut path = vec![root];
        let mut current = root;
        loop {
            let next = tree
                .children(current)
                .iter()
                .copied()
                .find(|&ch| !tree.is_leaf(ch) && (0..c).all(|col| !table[ch][col]));
            match next {
                Some(ch) => {
                    path.push(ch);
                    current = ch;
                }
                None => break,
            }
        }
        let refutation_path = path.into_iter().map(|i| tree.name_of(i).to_string()).collect();
        return Ok(SubtreeOutcome::NotFound { refutation_path });
    };

    // Top-down extraction: first k qualifying children at every kept node.
    let mut nodes = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        nodes.push(tree.name_of(v).to_string());
        if tree.is_leaf(v) {
            continue;
        }
        let chosen: Vec<usize> = tree
            .children(v)
            .iter()
            .copied()
            .filter(|&ch| table[ch][color])
            .take(k)
            .collect();
        assert_eq!(
            chosen.len(),
            k,
            "the rank predicate promised at least k qualifying children"
        );
        for &ch in chosen.iter().rev() {
            stack.push(ch);
        }
    }
    let cert = MonoSubtreeCert { nodes, color, k };
    assert!(
        verify_mono_subtree(tree, coloring, &cert),
        "extracted subtree must pass independent verification"
    );
    Ok(SubtreeOutcome::Found(cert))
}

/// Independent certificate check: the kept nodes exist and are distinct,
/// include the root, are closed under parents, branch exactly `k` wide at
/// every kept internal node, and every kept leaf is a host leaf of the
/// certificate color.
pub fn verify_mono_subtree(
    tree: &BranchingTree,
    coloring: &Coloring,
    cert: &MonoSubtreeCert,
) -> bool {
    let mut kept = BTreeSet::new();
    for name in &cert.nodes {
        let Some(i) = tree.index_of(name) else {
            return false;
        };
        if !kept.insert(i) {
            return false;
        }
    }
    if !kept.contains(&tree.root()) {
        return false;
    }
    for &i in &kept {
        match tree.parent(i) {
            Some(p) if !kept.contains(&p) => return false,
            _ => {}
        }
        if tree.is_leaf(i) {
            if coloring.color_of(tree.name_of(i)) != Some(cert.color) {
                return false;
            }
        } else {
            let kept_children = tree
                .children(i)
                .iter()
                .filter(|ch| kept.contains(ch))
                .count();
            if kept_children != cert.k {
                return false;
            }
        }
    }
    true
}
