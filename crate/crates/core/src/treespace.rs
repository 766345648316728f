//! Rational tree spaces, their leaf metric, and the conversion of a finite
//! ultrametric space into a regular branch representation.
//!
//! A [`TreeSpace`] is a rooted tree whose nodes carry nonnegative level values
//! `h`, nonincreasing from parent to child and strictly positive wherever two
//! distinct leaves meet. The induced leaf metric `d(x, y) = h(meet(x, y))` is
//! always an ultrametric.
//!
//! [`ultrametric_to_tree`] goes the other way. It orders the points by the
//! centrality relation `x <= y  iff  every other point is at least as far
//! from x as from y` ([`below_order`]), refines ties by canonical point
//! order, reads level values off the metric, and then repairs the remaining
//! incomparable pairs by inserting correction nodes, processed in decreasing
//! distance order. Finally every original point is re-hung as a leaf. The
//! result reproduces the input metric exactly — asserted on every run.
//!
//! [`regularize`] rebuilds any branch witness into the ball hierarchy of its
//! metric: one level per distance value, all mapped leaves at equal depth,
//! one strictly decreasing list of level values.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rational::Rational;
use crate::space::UltrametricSpace;

/// A rooted tree with nonincreasing nonnegative rational levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSpace {
    names: Vec<String>,
    parent: Vec<Option<usize>>,
    /// Children in canonical (input appearance) order.
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    h: Vec<Rational>,
    root: usize,
}

/// Structural or level-value failure when building or querying a tree space.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
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
    #[error("h({0}) is negative")]
    NegativeLevel(String),
    #[error("h({0}) must be positive: the node is a meet of two distinct leaves")]
    NonpositiveMeetLevel(String),
    #[error("h increases from {parent:?} to its child {child:?}")]
    IncreasingLevel { parent: String, child: String },
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("node {0:?} is not a leaf")]
    NotALeaf(String),
}

impl TreeSpace {
    /// Builds and validates a tree from `(id, parent id, h)` triples.
    ///
    /// Children keep the order in which they appear in `nodes`. Violations are
    /// reported in a fixed scan order: shape first (duplicates, unknown
    /// parents, root count, reachability), then levels (negative anywhere,
    /// nonpositive at any node with two or more children, increase along an
    /// edge), each scanning nodes in input order.
    pub fn new(nodes: Vec<(String, Option<String>, Rational)>) -> Result<Self, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for (i, (name, _, _)) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(TreeError::DuplicateNode(name.clone()));
            }
        }
        let mut parent = vec![None; nodes.len()];
        let mut root: Option<usize> = None;
        for (i, (name, parent_name, _)) in nodes.iter().enumerate() {
            match parent_name {
                Some(p) => {
                    let pi = *index.get(p).ok_or_else(|| TreeError::UnknownParent {
                        node: name.clone(),
                        parent: p.clone(),
                    })?;
                    parent[i] = Some(pi);
                }
                None => match root {
                    None => root = Some(i),
                    Some(r) => {
                        return Err(TreeError::MultipleRoots {
                            first: nodes[r].0.clone(),
                            second: name.clone(),
                        })
                    }
                },
            }
        }
        let root = root.ok_or(TreeError::NoRoot)?;
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, &p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p].push(i);
            }
        }
        let mut depth = vec![usize::MAX; nodes.len()];
        let mut queue = vec![root];
        depth[root] = 0;
        while let Some(v) = queue.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                queue.push(c);
            }
        }
        if let Some(i) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(TreeError::Unreachable(nodes[i].0.clone()));
        }
        let h: Vec<Rational> = nodes.iter().map(|(_, _, h)| h.clone()).collect();
        for (i, v) in h.iter().enumerate() {
            if v < &Rational::zero() {
                return Err(TreeError::NegativeLevel(nodes[i].0.clone()));
            }
        }
        for (i, v) in h.iter().enumerate() {
            if children[i].len() >= 2 && !v.is_positive() {
                return Err(TreeError::NonpositiveMeetLevel(nodes[i].0.clone()));
            }
        }
        for (i, &p) in parent.iter().enumerate() {
            if let Some(p) = p {
                if h[i] > h[p] {
                    return Err(TreeError::IncreasingLevel {
                        parent: nodes[p].0.clone(),
                        child: nodes[i].0.clone(),
                    });
                }
            }
        }
        Ok(TreeSpace {
            names: nodes.into_iter().map(|(n, _, _)| n).collect(),
            parent,
            children,
            depth,
            h,
            root,
        })
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    /// Root index.
    pub fn root(&self) -> usize {
        self.root
    }

    /// Node name at an index.
    pub fn name_of(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Index of a node name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parent index, `None` at the root.
    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Children in canonical order.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Cached depth (root = 0).
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// Level value of a node.
    pub fn level(&self, i: usize) -> &Rational {
        &self.h[i]
    }

    /// `true` when the node has no children.
    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    /// All leaf indices, ascending.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| self.is_leaf(i)).collect()
    }

    /// Largest child count over all nodes (0 for a single-node tree).
    pub fn max_child_count(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Deepest common ancestor; `meet(x, x) = x`.
    pub fn meet(&self, x: usize, y: usize) -> usize {
        let (mut a, mut b) = (x, y);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root node has a parent");
        }
        while a != b {
            a = self.parent[a].expect("nodes at equal depth above the root");
            b = self.parent[b].expect("nodes at equal depth above the root");
        }
        a
    }

    /// [`TreeSpace::meet`] by node names.
    pub fn meet_by_name(&self, x: &str, y: &str) -> Result<&str, TreeError> {
        let a = self
            .index_of(x)
            .ok_or_else(|| TreeError::UnknownNode(x.to_string()))?;
        let b = self
            .index_of(y)
            .ok_or_else(|| TreeError::UnknownNode(y.to_string()))?;
        Ok(self.name_of(self.meet(a, b)))
    }

    /// Leaf distance: `h(meet(x, y))`, or zero when `x = y`.
    pub fn tree_metric(&self, x: usize, y: usize) -> Result<Rational, TreeError> {
        for i in [x, y] {
            if !self.is_leaf(i) {
                return Err(TreeError::NotALeaf(self.name_of(i).to_string()));
            }
        }
        if x == y {
            return Ok(Rational::zero());
        }
        Ok(self.h[self.meet(x, y)].clone())
    }

    /// [`TreeSpace::tree_metric`] by node names.
    pub fn tree_metric_by_name(&self, x: &str, y: &str) -> Result<Rational, TreeError> {
        let a = self
            .index_of(x)
            .ok_or_else(|| TreeError::UnknownNode(x.to_string()))?;
        let b = self
            .index_of(y)
            .ok_or_else(|| TreeError::UnknownNode(y.to_string()))?;
        self.tree_metric(a, b)
    }

    /// The metric space on all leaves (always a valid ultrametric space).
    pub fn leaf_space(&self) -> UltrametricSpace {
        let leaves = self.leaves();
        let names: Vec<String> = leaves.iter().map(|&i| self.names[i].clone()).collect();
        let rows: Vec<Vec<Rational>> = leaves
            .iter()
            .map(|&a| {
                leaves
                    .iter()
                    .map(|&b| self.tree_metric(a, b).expect("leaf indices"))
                    .collect()
            })
            .collect();
        UltrametricSpace::from_rows(names, rows)
            .expect("the leaf metric of a valid tree space satisfies the strong inequality")
    }
}

/// An unknown point name passed to an order query.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown point {0:?}")]
pub struct UnknownPoint(pub String);

/// Decides the centrality order `x <= y`: every point other than `x` is at
/// least as far from `x` as from `y`. Reflexive; `true` for `x = y`.
pub fn below_order(space: &UltrametricSpace, x: &str, y: &str) -> Result<bool, UnknownPoint> {
    let i = space
        .index_of(x)
        .ok_or_else(|| UnknownPoint(x.to_string()))?;
    let j = space
        .index_of(y)
        .ok_or_else(|| UnknownPoint(y.to_string()))?;
    Ok(below_by_index(space, i, j))
}

fn below_by_index(space: &UltrametricSpace, i: usize, j: usize) -> bool {
    (0..space.len()).all(|z| z == i || space.dist(i, z) >= space.dist(j, z))
}

/// The full centrality relation as a matrix: `rel[i][j]` is `points[i] <= points[j]`.
pub fn below_relation(space: &UltrametricSpace) -> Vec<Vec<bool>> {
    let n = space.len();
    (0..n)
        .map(|i| (0..n).map(|j| below_by_index(space, i, j)).collect())
        .collect()
}

/// A tree space together with a map sending each source point to a leaf that
/// reproduces the source distances exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchWitness {
    pub tree: TreeSpace,
    /// Source point name -> leaf node name.
    pub leaf_map: BTreeMap<String, String>,
}

impl BranchWitness {
    /// The metric restricted to the mapped leaves, keyed by source point
    /// names in their map order.
    pub fn mapped_metric(&self) -> Result<UltrametricSpace, TreeError> {
        let entries: Vec<(&String, usize)> = self
            .leaf_map
            .iter()
            .map(|(point, node)| {
                let idx = self
                    .tree
                    .index_of(node)
                    .ok_or_else(|| TreeError::UnknownNode(node.clone()))?;
                Ok((point, idx))
            })
            .collect::<Result<_, TreeError>>()?;
        let names: Vec<String> = entries.iter().map(|(p, _)| (*p).clone()).collect();
        let rows: Vec<Vec<Rational>> = entries
            .iter()
            .map(|&(_, a)| {
                entries
                    .iter()
                    .map(|&(_, b)| self.tree.tree_metric(a, b))
                    .collect::<Result<_, TreeError>>()
            })
            .collect::<Result<_, TreeError>>()?;
        UltrametricSpace::from_rows(names, rows).map_err(|_| {
            TreeError::NotALeaf("mapped leaves do not induce an ultrametric".to_string())
        })
    }

    /// Checks that the witness reproduces `source` exactly: the map is an
    /// injection of all source points onto tree leaves, and every pairwise
    /// distance matches.
    pub fn verify_against(&self, source: &UltrametricSpace) -> bool {
        if self.leaf_map.len() != source.len() {
            return false;
        }
        let mut images = BTreeSet::new();
        for point in source.points() {
            let Some(node) = self.leaf_map.get(point) else {
                return false;
            };
            let Some(idx) = self.tree.index_of(node) else {
                return false;
            };
            if !self.tree.is_leaf(idx) || !images.insert(idx) {
                return false;
            }
        }
        for (i, a) in source.points().iter().enumerate() {
            for (j, b) in source.points().iter().enumerate().skip(i + 1) {
                let got = self
                    .tree
                    .tree_metric_by_name(&self.leaf_map[a], &self.leaf_map[b])
                    .expect("verified leaves");
                if &got != source.dist(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// A branch witness whose mapped leaves all sit at the same depth, with `h`
/// constant per level following one strictly decreasing value list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularWitness {
    pub tree: TreeSpace,
    pub leaf_map: BTreeMap<String, String>,
    /// `h` per depth, strictly decreasing; leaves sit at depth `level_values.len()`.
    pub level_values: Vec<Rational>,
}

impl RegularWitness {
    /// View as a plain branch witness.
    pub fn as_branch(&self) -> BranchWitness {
        BranchWitness {
            tree: self.tree.clone(),
            leaf_map: self.leaf_map.clone(),
        }
    }

    /// Checks the regularity invariants: strictly decreasing level values,
    /// every node's `h` equal to its depth's level value (zero at leaf
    /// depth), and all mapped leaves at depth `level_values.len()`.
    pub fn verify_regular(&self) -> bool {
        let m = self.level_values.len();
        for w in self.level_values.windows(2) {
            if w[0] <= w[1] {
                return false;
            }
        }
        for i in 0..self.tree.node_count() {
            let d = self.tree.depth(i);
            let expected = if d < m {
                self.level_values[d].clone()
            } else {
                Rational::zero()
            };
            if d > m || self.tree.level(i) != &expected {
                return false;
            }
        }
        self.leaf_map.values().all(|node| {
            self.tree
                .index_of(node)
                .is_some_and(|idx| self.tree.is_leaf(idx) && self.tree.depth(idx) == m)
        })
    }
}

/// Mutable scratch structure for building trees; not validated until frozen.
struct TreeBuilder {
    names: Vec<String>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    h: Vec<Rational>,
    used_names: BTreeSet<String>,
}

impl TreeBuilder {
    fn with_nodes(names: Vec<String>, parent: Vec<Option<usize>>, h: Vec<Rational>) -> Self {
        let mut children = vec![Vec::new(); names.len()];
        for (i, &p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p].push(i);
            }
        }
        let used_names = names.iter().cloned().collect();
        TreeBuilder {
            names,
            parent,
            children,
            h,
            used_names,
        }
    }

    fn fresh_name(&mut self, prefix: &str, counter: &mut usize) -> String {
        loop {
            let candidate = format!("{prefix}{counter}");
            *counter += 1;
            if !self.used_names.contains(&candidate) {
                self.used_names.insert(candidate.clone());
                return candidate;
            }
        }
    }

    fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    fn meet(&self, x: usize, y: usize) -> Option<usize> {
        let (mut a, mut b) = (x, y);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            a = self.parent[a]?;
            da -= 1;
        }
        while db > da {
            b = self.parent[b]?;
            db -= 1;
        }
        while a != b {
            a = self.parent[a]?;
            b = self.parent[b]?;
        }
        Some(a)
    }

    /// Tree distance between nodes; `None` across disconnected components.
    fn dist(&self, x: usize, y: usize) -> Option<Rational> {
        if x == y {
            return Some(Rational::zero());
        }
        self.meet(x, y).map(|m| self.h[m].clone())
    }

    fn root_of(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }

    /// The child of `ancestor` on the path down to `descendant`.
    fn child_toward(&self, ancestor: usize, descendant: usize) -> usize {
        let mut v = descendant;
        loop {
            let p = self.parent[v].expect("descendant lies below ancestor");
            if p == ancestor {
                return v;
            }
            v = p;
        }
    }

    fn add_node(&mut self, name: String, parent: Option<usize>, h: Rational) -> usize {
        let idx = self.names.len();
        self.names.push(name);
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.h.push(h);
        if let Some(p) = parent {
            self.children[p].push(idx);
        }
        idx
    }

    /// Moves `child` under `new_parent` (appending to its child list).
    fn reparent(&mut self, child: usize, new_parent: usize) {
        if let Some(old) = self.parent[child] {
            self.children[old].retain(|&c| c != child);
        }
        self.parent[child] = Some(new_parent);
        self.children[new_parent].push(child);
    }

    /// Emits nodes in preorder and freezes into a validated tree space.
    fn freeze(&self) -> TreeSpace {
        let roots: Vec<usize> = (0..self.names.len())
            .filter(|&i| self.parent[i].is_none())
            .collect();
        assert_eq!(roots.len(), 1, "builder must be a single tree to freeze");
        let mut order = Vec::with_capacity(self.names.len());
        let mut stack = vec![roots[0]];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in self.children[v].iter().rev() {
                stack.push(c);
            }
        }
        let nodes: Vec<(String, Option<String>, Rational)> = order
            .iter()
            .map(|&v| {
                (
                    self.names[v].clone(),
                    self.parent[v].map(|p| self.names[p].clone()),
                    self.h[v].clone(),
                )
            })
            .collect();
        TreeSpace::new(nodes).expect("constructed tree must satisfy the tree-space invariants")
    }
}

/// Collects the source points (indices below `n`) in the subtree rooted at
/// `v`, in child order.
fn points_under(children: &[Vec<usize>], n: usize, v: usize, out: &mut Vec<usize>) {
    if v < n {
        out.push(v);
    }
    for &c in &children[v] {
        points_under(children, n, c, out);
    }
}

/// Converts a finite ultrametric space into a branch witness whose leaf
/// metric reproduces the input exactly.
///
/// Phases: (1) centrality quasi-order, ties refined by canonical point order;
/// (2) levels `h(s) = max distance to the points above s`; (3) corrections
/// for incomparable pairs whose tree distance exceeds their true distance,
/// processed in decreasing distance order (ties by index pair), each
/// inserting one node below the current meet that adopts every maximal
/// fitting subtree of the pair's ball — across components the inserted node
/// instead becomes a new shared root; (4) every source point with
/// descendants is re-hung as a fresh leaf child (appended last) while its
/// internal node is renamed.
pub fn ultrametric_to_tree(x: &UltrametricSpace) -> BranchWitness {
    let n = x.len();
    let leq: Vec<Vec<bool>> = below_relation(x);
    // Strict refined order: i below j, breaking two-way ties by index.
    let strictly_below =
        |i: usize, j: usize| i != j && leq[i][j] && (!leq[j][i] || i < j);

    // Ancestor sets must be linear for the parent map to exist.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        let ancestors: Vec<usize> = (0..n).filter(|&i| strictly_below(i, j)).collect();
        for (a, &p) in ancestors.iter().enumerate() {
            for &q in ancestors.iter().skip(a + 1) {
                assert!(
                    strictly_below(p, q) || strictly_below(q, p),
                    "points below a common point must be linearly ordered"
                );
            }
        }
        parent[j] = ancestors
            .iter()
            .copied()
            .find(|&p| ancestors.iter().all(|&q| q == p || strictly_below(q, p)));
    }

    let h: Vec<Rational> = (0..n)
        .map(|s| {
            (0..n)
                .filter(|&t| t == s || strictly_below(s, t))
                .map(|t| x.dist(s, t).clone())
                .max()
                .expect("the set contains s itself")
        })
        .collect();

    let mut builder =
        TreeBuilder::with_nodes(x.points().to_vec(), parent, h);

    // Comparable pairs already match the metric.
    for i in 0..n {
        for j in 0..n {
            if strictly_below(i, j) {
                assert_eq!(
                    builder.dist(i, j).as_ref(),
                    Some(x.dist(i, j)),
                    "comparable pairs must already realize their distance"
                );
            }
        }
    }

    // Correction loop: fix incomparable pairs, largest distance first.
    let mut correction_counter = 0usize;
    let mut anon_counter = 0usize;
    let max_corrections = n * (n + 1) / 2 + 1;
    let mut insertions = 0usize;
    loop {
        let mut worst: Option<(Rational, usize, usize)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let actual = x.dist(i, j);
                let violating = match builder.dist(i, j) {
                    None => true,
                    Some(d) => &d > actual,
                };
                if violating {
                    let key = (actual.clone(), i, j);
                    let better = match &worst {
                        None => true,
                        Some((r, wi, wj)) => {
                            actual > r || (actual == r && (i, j) < (*wi, *wj))
                        }
                    };
                    if better {
                        worst = Some(key);
                    }
                }
            }
        }
        let Some((rho, i, j)) = worst else { break };
        insertions += 1;
        assert!(
            insertions <= max_corrections,
            "correction loop exceeded its pair bound"
        );

        let name = builder.fresh_name("p", &mut correction_counter);
        match builder.meet(i, j) {
            Some(m) => {
                assert!(rho < builder.h[m], "correction value must sit below the meet");
                assert!(
                    builder.h[i] <= rho && builder.h[j] <= rho,
                    "the endpoints' own levels never exceed the correction value"
                );
                // Everything within `rho` of the violating pair must end up
                // under the new node, and nothing else. Collect the maximal
                // subtrees below the meet whose level fits under `rho` and
                // whose points all lie in the closed `rho`-ball around i;
                // moving whole such subtrees keeps every settled pair
                // settled, because a subtree that mixes ball points with
                // outside points at a level strictly below the meet would
                // yield a violating pair of larger distance — contradicting
                // the choice of (i, j) as the largest violation.
                let mut grouped: Vec<usize> = Vec::new();
                let mut stack: Vec<usize> =
                    builder.children[m].iter().rev().copied().collect();
                while let Some(v) = stack.pop() {
                    let mut pts = Vec::new();
                    points_under(&builder.children, n, v, &mut pts);
                    let all_in = pts.iter().all(|&q| x.dist(q, i) <= &rho);
                    if builder.h[v] <= rho && all_in {
                        grouped.push(v);
                    } else if pts.iter().any(|&q| x.dist(q, i) <= &rho) {
                        for &c in builder.children[v].iter().rev() {
                            stack.push(c);
                        }
                    }
                }
                assert!(
                    grouped.len() >= 2,
                    "a violating pair always spans at least two grouped subtrees"
                );
                // The new node takes over the slot of the branch toward i.
                let slot = builder.children[m]
                    .iter()
                    .position(|&c| c == builder.child_toward(m, i))
                    .expect("the branch toward i is a child of m");
                let p = builder.add_node(name, None, rho.clone());
                for &v in &grouped {
                    let q = builder.parent[v].expect("grouped nodes hang below the meet");
                    builder.children[q].retain(|&c| c != v);
                    builder.parent[v] = Some(p);
                    builder.children[p].push(v);
                    // Inserted nodes left childless carry no point and are
                    // detached; the meet itself always keeps a branch.
                    let mut q = q;
                    while q != m && q >= n && builder.children[q].is_empty() {
                        let up = builder.parent[q].expect("a husk below the meet has a parent");
                        builder.children[up].retain(|&c| c != q);
                        builder.parent[q] = None;
                        q = up;
                    }
                }
                // The meet may keep other branches, or carry on as a unary
                // node above the correction (its own point, or pairs meeting
                // strictly above, still account for its level).
                builder.parent[p] = Some(m);
                let at = slot.min(builder.children[m].len());
                builder.children[m].insert(at, p);
                assert_eq!(
                    builder.dist(i, j),
                    Some(rho.clone()),
                    "the processed pair is exact after its correction"
                );
            }
            None => {
                let ra = builder.root_of(i);
                let rb = builder.root_of(j);
                assert!(
                    builder.h[ra] <= rho && builder.h[rb] <= rho,
                    "merged roots must not exceed the correction value"
                );
                let p = builder.add_node(name, None, rho.clone());
                builder.reparent(ra, p);
                builder.reparent(rb, p);
            }
        }

        // Loop invariant: the tree never undercuts the metric.
        for a in 0..n {
            for b in (a + 1)..n {
                if let Some(d) = builder.dist(a, b) {
                    assert!(
                        &d >= x.dist(a, b),
                        "tree distance must never drop below the metric"
                    );
                }
            }
        }
    }

    // Every pair is now exact.
    for i in 0..n {
        for j in (i + 1)..n {
            assert_eq!(
                builder.dist(i, j).as_ref(),
                Some(x.dist(i, j)),
                "correction loop must finish with exact distances"
            );
        }
    }

    // Re-hang source points that have descendants.
    for v in 0..n {
        if !builder.children[v].is_empty() {
            let original = builder.names[v].clone();
            let internal = builder.fresh_name("v", &mut anon_counter);
            builder.names[v] = internal;
            builder.add_node(original, Some(v), Rational::zero());
        }
    }

    let tree = builder.freeze();
    let leaf_map: BTreeMap<String, String> = x
        .points()
        .iter()
        .map(|p| (p.clone(), p.clone()))
        .collect();
    let witness = BranchWitness { tree, leaf_map };
    assert!(
        witness.verify_against(x),
        "branch witness must reproduce the source metric exactly"
    );
    witness
}

/// Rebuilds a branch witness into its ball hierarchy: level `L` groups mapped
/// points whose pairwise distance is at most the `L`-th largest distance
/// value, and all mapped leaves end up at depth `level_values.len()`.
///
/// The mapped-leaf metric is recomputed from the witness itself, so the
/// output depends only on the witness, and the restriction to mapped points
/// is unchanged — asserted before returning.
pub fn regularize(w: &BranchWitness) -> RegularWitness {
    let metric = w
        .mapped_metric()
        .expect("regularize requires a witness with valid mapped leaves");
    let points: Vec<String> = metric.points().to_vec();
    let level_values: Vec<Rational> = {
        let mut vals: Vec<Rational> = metric.distance_set().into_iter().collect();
        vals.reverse();
        vals
    };
    let m = level_values.len();

    let mut used: BTreeSet<String> = points.iter().cloned().collect();
    let mut nodes: Vec<(String, Option<String>, Rational)> = Vec::new();
    // class_of[p] = name of the current (previous level) class containing p.
    let mut class_of: Vec<String> = Vec::new();

    for level in 0..m {
        let threshold = &level_values[level];
        let mut assigned: Vec<Option<usize>> = vec![None; points.len()];
        let mut class_index = 0usize;
        for p in 0..points.len() {
            if assigned[p].is_some() {
                continue;
            }
            let mut name = format!("{level}.{class_index}");
            while used.contains(&name) {
                name.push('_');
            }
            used.insert(name.clone());
            let parent = if level == 0 {
                None
            } else {
                Some(class_of[p].clone())
            };
            nodes.push((name.clone(), parent, level_values[level].clone()));
            for q in p..points.len() {
                if assigned[q].is_none() && metric.dist(p, q) <= threshold {
                    assigned[q] = Some(nodes.len() - 1);
                }
            }
            class_index += 1;
        }
        class_of = assigned
            .into_iter()
            .map(|slot| nodes[slot.expect("every point is assigned a class")].0.clone())
            .collect();
    }

    for (p, point) in points.iter().enumerate() {
        let parent = if m == 0 { None } else { Some(class_of[p].clone()) };
        nodes.push((point.clone(), parent, Rational::zero()));
    }

    let tree = TreeSpace::new(nodes).expect("ball hierarchy is a valid tree space");
    let leaf_map: BTreeMap<String, String> =
        points.iter().map(|p| (p.clone(), p.clone())).collect();
    let witness = RegularWitness {
        tree,
        leaf_map,
        level_values,
    };
    assert!(
        witness.verify_regular(),
        "ball hierarchy must satisfy the regularity invariants"
    );
    assert!(
        witness.as_branch().verify_against(&metric),
        "regularization must preserve the mapped metric"
    );
    witness
}
