//! A universal leveled tree and monochromatic isometric copies inside it.
//!
//! [`build_universal_tree`] produces, for a finite palette `Q` of positive
//! rationals, a uniform-height tree in which every node offers
//! `multiplicity` children at every palette value below its own. Its leaf
//! metric therefore contains every small ultrametric space over `Q`, and it
//! keeps containing one in a single color class no matter how the leaves are
//! colored — provided `multiplicity` meets the pigeonhole bound of
//! [`required_branching`].
//!
//! [`find_mono_isometric_copy`] is the full pipeline: regularize the target
//! space into its ball hierarchy, cut the matching region out of the
//! universal tree ([`UniversalTree::match_subtree`]) plus one extra child
//! level for the bottom branching, extract a monochromatic subtree there,
//! and read off an exactly isometric embedding (scale factor 1).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::copysearch::FoundCopy;
use crate::rational::Rational;
use crate::space::{Coloring, ColoringError, ScaledCopyCert, UltrametricSpace};
use crate::treeramsey::{
    mono_subtree, required_branching, BranchingTree, MonoSubtreeCert, SubtreeOutcome,
};
use crate::treespace::{regularize, ultrametric_to_tree, RegularWitness, TreeSpace};

/// Hard cap on the number of nodes a build may produce.
const MAX_NODES: u64 = 10_000_000;

/// A uniform-height tree over a fixed palette: every node has exactly
/// `multiplicity` children at each palette value below its own level, the
/// root level is twice the palette maximum, and nodes at the palette minimum
/// are padded with same-level children so all leaves share depth `height`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalTree {
    tree: TreeSpace,
    palette: BTreeSet<Rational>,
    multiplicity: usize,
    height: usize,
}

/// Failures of the universal-tree builder and copy pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniversalError {
    #[error("palette must not be empty")]
    EmptyPalette,
    #[error("palette value {0} is not positive")]
    NonpositivePaletteValue(Rational),
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("height must be at least 1")]
    ZeroHeight,
    #[error("requested tree would have {estimated} nodes, exceeding {MAX_NODES}")]
    TooLarge { estimated: u64 },
    #[error("value {0} is outside the palette")]
    ValueOutsidePalette(Rational),
    #[error("level values must be strictly decreasing")]
    LevelsNotDecreasing,
    #[error("the pipeline needs height at least {needed}, the tree has {height}")]
    HeightTooSmall { needed: usize, height: usize },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Exact node count of the tree [`build_universal_tree`] would produce,
/// saturating at `u64::MAX`.
pub fn node_count_estimate(
    palette: &BTreeSet<Rational>,
    height: usize,
    multiplicity: usize,
) -> u64 {
    let Some(min) = palette.iter().next() else {
        return 0;
    };
    let max = palette.iter().next_back().expect("nonempty");
    let root_value = Rational::from_integer(2) * max;
    let mult = multiplicity as u64;
    let mut counts: BTreeMap<Rational, u64> = BTreeMap::from([(root_value, 1)]);
    let mut total: u64 = 1;
    for _ in 0..height {
        let mut next: BTreeMap<Rational, u64> = BTreeMap::new();
        for (value, count) in &counts {
            if value == min {
                // Padding children repeat the node's own value.
                let entry = next.entry(value.clone()).or_insert(0);
                *entry = entry.saturating_add(count.saturating_mul(mult));
            } else {
                for q in palette.iter().filter(|q| *q < value) {
                    let entry = next.entry(q.clone()).or_insert(0);
                    *entry = entry.saturating_add(count.saturating_mul(mult));
                }
            }
        }
        for c in next.values() {
            total = total.saturating_add(*c);
        }
        counts = next;
    }
    total
}

/// Builds the minimal universal tree for the palette: height `height`, root
/// level `2 * max(palette)`, exactly `multiplicity` children per node and
/// palette value below it, padded at the palette minimum. Nodes are named
/// `"{depth}.{index}"` in breadth-first order.
pub fn build_universal_tree(
    palette: &BTreeSet<Rational>,
    height: usize,
    multiplicity: usize,
) -> Result<UniversalTree, UniversalError> {
    if palette.is_empty() {
        return Err(UniversalError::EmptyPalette);
    }
    for q in palette {
        if !q.is_positive() {
            return Err(UniversalError::NonpositivePaletteValue(q.clone()));
        }
    }
    if multiplicity == 0 {
        return Err(UniversalError::ZeroMultiplicity);
    }
    if height == 0 {
        return Err(UniversalError::ZeroHeight);
    }
    let estimated = node_count_estimate(palette, height, multiplicity);
    if estimated > MAX_NODES {
        return Err(UniversalError::TooLarge { estimated });
    }

    let min = palette.iter().next().expect("nonempty").clone();
    let max = palette.iter().next_back().expect("nonempty").clone();
    let root_value = Rational::from_integer(2) * &max;
    let mut nodes: Vec<(String, Option<String>, Rational)> =
        vec![("0.0".to_string(), None, root_value.clone())];
    let mut frontier: Vec<(String, Rational)> = vec![("0.0".to_string(), root_value)];
    for depth in 1..=height {
        let mut next = Vec::new();
        let mut index = 0usize;
        for (parent_name, parent_value) in &frontier {
            let child_values: Vec<Rational> = if parent_value == &min {
                vec![min.clone(); multiplicity]
            } else {
                palette
                    .iter()
                    .filter(|q| *q < parent_value)
                    .flat_map(|q| std::iter::repeat(q.clone()).take(multiplicity))
                    .collect()
            };
            for value in child_values {
                let name = format!("{depth}.{index}");
                index += 1;
                nodes.push((name.clone(), Some(parent_name.clone()), value.clone()));
                next.push((name, value));
            }
        }
        frontier = next;
    }
    assert_eq!(nodes.len() as u64, estimated, "estimate must be exact");
    let tree =
        TreeSpace::new(nodes).expect("the universal construction yields a valid tree space");

    // Check the supply invariant and uniform leaf depth.
    for i in 0..tree.node_count() {
        if tree.is_leaf(i) {
            assert_eq!(tree.depth(i), height, "all leaves share the full depth");
            continue;
        }
        for q in palette.iter().filter(|q| *q < tree.level(i)) {
            let supply = tree
                .children(i)
                .iter()
                .filter(|&&c| tree.level(c) == q)
                .count();
            assert_eq!(supply, multiplicity, "every value below a node is fully supplied");
        }
    }

    Ok(UniversalTree {
        tree,
        palette: palette.clone(),
        multiplicity,
        height,
    })
}

impl UniversalTree {
    pub fn tree(&self) -> &TreeSpace {
        &self.tree
    }

    pub fn palette(&self) -> &BTreeSet<Rational> {
        &self.palette
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Names of all leaves, ascending by node index.
    pub fn leaf_names(&self) -> Vec<String> {
        self.tree
            .leaves()
            .into_iter()
            .map(|i| self.tree.name_of(i).to_string())
            .collect()
    }

    /// The subtree of nodes whose levels along the root path follow
    /// `level_values`, as a branching tree whose node names are names of
    /// this tree's nodes.
    ///
    /// `level_values` must be strictly decreasing palette values, at most
    /// `height` of them. The result is exactly `multiplicity`-branching of
    /// height `level_values.len()` (asserted).
    pub fn match_subtree(
        &self,
        level_values: &[Rational],
    ) -> Result<BranchingTree, UniversalError> {
        for v in level_values {
            if !self.palette.contains(v) {
                return Err(UniversalError::ValueOutsidePalette(v.clone()));
            }
        }
        if level_values.windows(2).any(|w| w[0] <= w[1]) {
            return Err(UniversalError::LevelsNotDecreasing);
        }
        if level_values.len() > self.height {
            return Err(UniversalError::HeightTooSmall {
                needed: level_values.len(),
                height: self.height,
            });
        }
        let root = self.tree.root();
        let mut nodes: Vec<(String, Option<String>)> =
            vec![(self.tree.name_of(root).to_string(), None)];
        let mut frontier = vec![root];
        for v in level_values {
            let mut next = Vec::new();
            for &node in &frontier {
                let matching: Vec<usize> = self
                    .tree
                    .children(node)
                    .iter()
                    .copied()
                    .filter(|&c| self.tree.level(c) == v)
                    .collect();
                assert_eq!(
                    matching.len(),
                    self.multiplicity,
                    "the supply invariant fixes the branching of the matched region"
                );
                for c in matching {
                    nodes.push((
                        self.tree.name_of(c).to_string(),
                        Some(self.tree.name_of(node).to_string()),
                    ));
                    next.push(c);
                }
            }
            frontier = next;
        }
        Ok(BranchingTree::new(nodes).expect("the matched region is a uniform tree"))
    }
}

/// Outcome of [`find_mono_isometric_copy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CopyOutcome {
    Found(FoundCopy),
    /// No monochromatic subtree wide enough exists; possible only when the
    /// tree's multiplicity is below the pigeonhole bound for this instance.
    NotFound { multiplicity: usize, required: usize },
}

fn leftmost_leaf(tree: &TreeSpace, mut idx: usize) -> usize {
    while let Some(&first) = tree.children(idx).first() {
        idx = first;
    }
    idx
}

/// Colors of all leaves, validated total; colors keyed by non-leaf names are
/// ignored. Returns (per-leaf color by node index, number of colors).
fn leaf_colors(
    tree: &TreeSpace,
    coloring: &Coloring,
) -> Result<(BTreeMap<usize, usize>, usize), ColoringError> {
    let mut map = BTreeMap::new();
    for i in tree.leaves() {
        let name = tree.name_of(i);
        let c = coloring
            .color_of(name)
            .ok_or_else(|| ColoringError::UncoloredPoint(name.to_string()))?;
        map.insert(i, c);
    }
    let count = map.values().map(|&c| c + 1).max().unwrap_or(0);
    Ok((map, count))
}

/// Finds a monochromatic exactly-isometric copy of `x` among the colored
/// leaves of the universal tree.
///
/// Pipeline: regularize `x` into its ball hierarchy with level values `lv`
/// (length `m`); cut the matched region for `lv` plus one extra child level
/// (the bottom branching lives one level below the last matched value, so
/// the tree height must be at least `m + 1`); collapse each bottom node to
/// the color of its leftmost descendant leaf; extract a monochromatic
/// `k`-branching subtree for `k` = the regular witness's maximal child
/// count; embed the witness into it one level down (the image of a witness
/// node of depth `L` sits at matched depth `L + 1`, so every pair of images
/// meets at the level carrying their exact distance). The returned embedding
/// is verified isometric with scale factor 1 before being returned.
pub fn find_mono_isometric_copy(
    m: &UniversalTree,
    coloring: &Coloring,
    x: &UltrametricSpace,
) -> Result<CopyOutcome, UniversalError> {
    let (leaf_color, color_count) = leaf_colors(&m.tree, coloring)?;
    for v in x.distance_set() {
        if !m.palette.contains(&v) {
            return Err(UniversalError::ValueOutsidePalette(v));
        }
    }

    if x.len() == 1 {
        let smallest = leaf_color
            .values()
            .copied()
            .min()
            .expect("a universal tree has leaves");
        let leaf = leaf_color
            .iter()
            .find(|&(_, &c)| c == smallest)
            .map(|(&i, _)| i)
            .expect("some leaf has the smallest color");
        let embedding =
            BTreeMap::from([(x.points()[0].clone(), m.tree.name_of(leaf).to_string())]);
        let found = FoundCopy {
            color: smallest,
            cert: ScaledCopyCert {
                embedding,
                factor: Rational::one(),
            },
        };
        assert!(verify_universal_copy(m, coloring, x, &found));
        return Ok(CopyOutcome::Found(found));
    }

    let witness = regularize(&ultrametric_to_tree(x));
    let lv = &witness.level_values;
    let depth = lv.len();
    if depth + 1 > m.height {
        return Err(UniversalError::HeightTooSmall {
            needed: depth + 1,
            height: m.height,
        });
    }

    let matched = m.match_subtree(lv)?;

    // Extend the matched region by one child level: the bottom branching.
    let mut extended: Vec<(String, Option<String>)> = (0..matched.node_count())
        .map(|i| {
            (
                matched.name_of(i).to_string(),
                matched.parent(i).map(|p| matched.name_of(p).to_string()),
            )
        })
        .collect();
    for leaf in matched.leaves() {
        let name = matched.name_of(leaf);
        let idx = m.tree.index_of(name).expect("matched nodes come from the tree");
        let supply = m.tree.children(idx);
        assert!(
            supply.len() >= m.multiplicity,
            "nodes above the leaf depth always carry at least multiplicity children"
        );
        for &c in supply.iter().take(m.multiplicity) {
            extended.push((m.tree.name_of(c).to_string(), Some(name.to_string())));
        }
    }
    let bottom = BranchingTree::new(extended).expect("extension keeps the tree uniform");

    // Collapse each bottom node to its leftmost descendant leaf's color.
    let representative: BTreeMap<String, usize> = bottom
        .leaves()
        .into_iter()
        .map(|i| {
            let name = bottom.name_of(i);
            let idx = m.tree.index_of(name).expect("bottom nodes come from the tree");
            (name.to_string(), leftmost_leaf(&m.tree, idx))
        })
        .collect();
    let collapsed = Coloring::new(
        representative
            .iter()
            .map(|(name, &leaf)| (name.clone(), leaf_color[&leaf]))
            .collect(),
    );

    let k = witness.tree.max_child_count();
    let cert = match mono_subtree(&bottom, &collapsed, k)
        .expect("the collapsed coloring is total on the bottom leaves")
    {
        SubtreeOutcome::Found(cert) => cert,
        SubtreeOutcome::NotFound { .. } => {
            return Ok(CopyOutcome::NotFound {
                multiplicity: m.multiplicity,
                required: required_branching(color_count, k),
            });
        }
    };

    let found = embed_witness(m, x, &witness, &bottom, &cert, &representative);
    assert!(
        verify_universal_copy(m, coloring, x, &found),
        "the pipeline must produce a verified monochromatic isometry"
    );
    Ok(CopyOutcome::Found(found))
}

/// Reads the embedding off a monochromatic subtree: witness depth `L` maps
/// to subtree depth `L + 1`, children in canonical order onto the first
/// qualifying subtree children; witness leaves land on bottom nodes, and
/// each source point takes the bottom node's representative leaf.
fn embed_witness(
    m: &UniversalTree,
    x: &UltrametricSpace,
    witness: &RegularWitness,
    bottom: &BranchingTree,
    cert: &MonoSubtreeCert,
    representative: &BTreeMap<String, usize>,
) -> FoundCopy {
    let kept: BTreeSet<usize> = cert
        .nodes
        .iter()
        .map(|n| bottom.index_of(n).expect("certificate nodes exist"))
        .collect();
    let kept_children = |i: usize| -> Vec<usize> {
        bottom
            .children(i)
            .iter()
            .copied()
            .filter(|c| kept.contains(c))
            .collect()
    };

    let wt = &witness.tree;
    let mut image: Vec<Option<usize>> = vec![None; wt.node_count()];
    let first = *kept_children(bottom.root())
        .first()
        .expect("the subtree keeps k >= 1 children at the root");
    image[wt.root()] = Some(first);
    let mut stack = vec![wt.root()];
    while let Some(u) = stack.pop() {
        let sigma = image[u].expect("parents are assigned before children");
        let slots = kept_children(sigma);
        let kids = wt.children(u);
        assert!(
            kids.len() <= slots.len(),
            "the subtree branching covers the witness branching"
        );
        for (w_child, &slot) in kids.iter().zip(&slots) {
            image[*w_child] = Some(slot);
            stack.push(*w_child);
        }
    }

    let embedding: BTreeMap<String, String> = x
        .points()
        .iter()
        .map(|p| {
            let leaf_name = &witness.leaf_map[p];
            let w_leaf = wt.index_of(leaf_name).expect("witness leaves exist");
            let bottom_node = image[w_leaf].expect("every witness leaf was embedded");
            let leaf = representative[bottom.name_of(bottom_node)];
            (p.clone(), m.tree.name_of(leaf).to_string())
        })
        .collect();

    FoundCopy {
        color: cert.color,
        cert: ScaledCopyCert {
            embedding,
            factor: Rational::one(),
        },
    }
}

/// Independent check of a pipeline result: the embedding covers exactly the
/// source points, lands injectively on leaves of one color (the reported
/// one), preserves every distance exactly, and the factor is 1.
pub fn verify_universal_copy(
    m: &UniversalTree,
    coloring: &Coloring,
    x: &UltrametricSpace,
    found: &FoundCopy,
) -> bool {
    if found.cert.factor != Rational::one() {
        return false;
    }
    if found.cert.embedding.len() != x.len() {
        return false;
    }
    let mut images = BTreeSet::new();
    for point in x.points() {
        let Some(leaf) = found.cert.embedding.get(point) else {
            return false;
        };
        let Some(idx) = m.tree.index_of(leaf) else {
            return false;
        };
        if !m.tree.is_leaf(idx) || !images.insert(idx) {
            return false;
        }
        if coloring.color_of(leaf) != Some(found.color) {
            return false;
        }
    }
    for (i, a) in x.points().iter().enumerate() {
        for (j, b) in x.points().iter().enumerate().skip(i + 1) {
            let got = m
                .tree
                .tree_metric_by_name(
                    &found.cert.embedding[a],
                    &found.cert.embedding[b],
                )
                .expect("images are leaves");
            if &got != x.dist(i, j) {
                return false;
            }
        }
    }
    true
}
