//! JSON document types for every value the tools read or write.
//!
//! All documents serialize with alphabetically ordered fields and
//! `BTreeMap`-backed objects, so the same value always renders to the same
//! bytes. [`json_string`] is the single entry point for rendering (pretty,
//! one trailing newline).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::copysearch::{FoundCopy, GreedyFailure, Obstruction};
use crate::katetov::{ExtensionRequest, KatetovFunction};
use crate::rational::Rational;
use crate::space::{Coloring, MetricSpace, MetricViolation, ScaledCopyCert};
use crate::treeramsey::MonoSubtreeCert;
use crate::treespace::{BranchWitness, RegularWitness, TreeError, TreeSpace};

/// Renders any document as pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

/// A metric space: `points` in order, `distances` as a full square matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub distances: Vec<Vec<Rational>>,
    pub points: Vec<String>,
}

impl SpaceDoc {
    pub fn from_space(space: &MetricSpace) -> Self {
        let n = space.len();
        SpaceDoc {
            distances: (0..n)
                .map(|i| (0..n).map(|j| space.dist(i, j).clone()).collect())
                .collect(),
            points: space.points().to_vec(),
        }
    }

    pub fn into_space(self) -> Result<MetricSpace, MetricViolation> {
        MetricSpace::new(self.points, self.distances)
    }
}

/// One tree node: its `id`, `parent` id (absent at the root), and level `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeNodeDoc {
    pub h: Rational,
    pub id: String,
    pub parent: Option<String>,
}

/// A leveled tree with an optional map from source points to leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    #[serde(default)]
    pub leaf_map: BTreeMap<String, String>,
    pub nodes: Vec<TreeNodeDoc>,
}

fn tree_nodes(tree: &TreeSpace) -> Vec<TreeNodeDoc> {
    (0..tree.node_count())
        .map(|i| TreeNodeDoc {
            h: tree.level(i).clone(),
            id: tree.name_of(i).to_string(),
            parent: tree.parent(i).map(|p| tree.name_of(p).to_string()),
        })
        .collect()
}

fn nodes_into_tree(nodes: Vec<TreeNodeDoc>) -> Result<TreeSpace, TreeError> {
    TreeSpace::new(
        nodes
            .into_iter()
            .map(|n| (n.id, n.parent, n.h))
            .collect(),
    )
}

impl TreeDoc {
    pub fn from_tree(tree: &TreeSpace) -> Self {
        TreeDoc {
            leaf_map: BTreeMap::new(),
            nodes: tree_nodes(tree),
        }
    }

    pub fn from_witness(witness: &BranchWitness) -> Self {
        TreeDoc {
            leaf_map: witness.leaf_map.clone(),
            nodes: tree_nodes(&witness.tree),
        }
    }

    pub fn into_tree(self) -> Result<TreeSpace, TreeError> {
        nodes_into_tree(self.nodes)
    }

    pub fn into_witness(self) -> Result<BranchWitness, TreeError> {
        let leaf_map = self.leaf_map;
        let tree = nodes_into_tree(self.nodes)?;
        Ok(BranchWitness { tree, leaf_map })
    }
}

/// A regular (uniform-depth) tree witness with its level value list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularDoc {
    pub leaf_map: BTreeMap<String, String>,
    pub level_values: Vec<Rational>,
    pub nodes: Vec<TreeNodeDoc>,
}

impl RegularDoc {
    pub fn from_witness(witness: &RegularWitness) -> Self {
        RegularDoc {
            leaf_map: witness.leaf_map.clone(),
            level_values: witness.level_values.clone(),
            nodes: tree_nodes(&witness.tree),
        }
    }

    pub fn into_witness(self) -> Result<RegularWitness, TreeError> {
        let leaf_map = self.leaf_map;
        let level_values = self.level_values;
        let tree = nodes_into_tree(self.nodes)?;
        Ok(RegularWitness {
            tree,
            leaf_map,
            level_values,
        })
    }
}

/// A coloring: point (or leaf) name to color index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringDoc {
    pub colors: BTreeMap<String, usize>,
}

impl ColoringDoc {
    pub fn from_coloring(coloring: &Coloring) -> Self {
        ColoringDoc {
            colors: coloring.assignment.clone(),
        }
    }

    pub fn into_coloring(self) -> Coloring {
        Coloring::new(self.colors)
    }
}

/// One extension request: the new point's `id`, its `support`, and the
/// prescribed distance `values` on the support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestDoc {
    pub id: String,
    pub support: Vec<String>,
    pub values: BTreeMap<String, Rational>,
}

impl RequestDoc {
    pub fn from_request(request: &ExtensionRequest) -> Self {
        RequestDoc {
            id: request.id.clone(),
            support: request.support.clone(),
            values: request.values.clone(),
        }
    }

    pub fn into_request(self) -> ExtensionRequest {
        ExtensionRequest {
            id: self.id,
            support: self.support,
            values: self.values,
        }
    }
}

/// A scaled-copy certificate: target point to host point, one `scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopyCertDoc {
    pub color: usize,
    pub embedding: BTreeMap<String, String>,
    pub scale: Rational,
}

impl CopyCertDoc {
    pub fn from_found(found: &FoundCopy) -> Self {
        CopyCertDoc {
            color: found.color,
            embedding: found.cert.embedding.clone(),
            scale: found.cert.factor.clone(),
        }
    }

    pub fn into_found(self) -> FoundCopy {
        FoundCopy {
            color: self.color,
            cert: ScaledCopyCert {
                embedding: self.embedding,
                factor: self.scale,
            },
        }
    }
}

/// Distance profile of a one-point extension, keyed by support point name.
pub fn profile_values(f: &KatetovFunction) -> BTreeMap<String, Rational> {
    f.entries()
        .map(|(i, v)| (f.base().points()[i].clone(), v.clone()))
        .collect()
}

/// One failed stage of a greedy search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub partial_copy: Vec<String>,
    pub scale: Rational,
    pub stage: usize,
    pub values: BTreeMap<String, Rational>,
}

/// A full greedy failure: every stage plus the accumulated profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureDoc {
    pub final_values: BTreeMap<String, Rational>,
    pub stages: Vec<StageDoc>,
}

impl FailureDoc {
    pub fn from_failure(failure: &GreedyFailure) -> Self {
        FailureDoc {
            final_values: profile_values(&failure.final_values),
            stages: failure.stages.iter().map(stage_doc).collect(),
        }
    }
}

fn stage_doc(o: &Obstruction) -> StageDoc {
    StageDoc {
        partial_copy: o.partial_copy.clone(),
        scale: o.scale.clone(),
        stage: o.stage,
        values: profile_values(&o.values),
    }
}

/// A monochromatic-subtree certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubtreeCertDoc {
    pub color: usize,
    pub k: usize,
    pub nodes: Vec<String>,
}

impl SubtreeCertDoc {
    pub fn from_cert(cert: &MonoSubtreeCert) -> Self {
        SubtreeCertDoc {
            color: cert.color,
            k: cert.k,
            nodes: cert.nodes.clone(),
        }
    }

    pub fn into_cert(self) -> MonoSubtreeCert {
        MonoSubtreeCert {
            nodes: self.nodes,
            color: self.color,
            k: self.k,
        }
    }
}
