//! Graphviz (DOT) rendering for trees and extracted subtrees.

use crate::space::Coloring;
use crate::treeramsey::{BranchingTree, MonoSubtreeCert};
use crate::treespace::TreeSpace;

/// Fill colors per color class, cycled when there are more classes.
const FILLS: [&str; 7] = [
    "lightblue",
    "lightcoral",
    "palegreen",
    "gold",
    "plum",
    "lightsalmon",
    "lightgray",
];

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders a leveled tree: every node labeled with its id and level, leaves
/// drawn as boxes. Nodes and edges appear in the tree's canonical order, so
/// the output is deterministic.
pub fn tree_to_dot(tree: &TreeSpace) -> String {
    let mut out = String::from("digraph tree {\n  rankdir=TB;\n");
    for i in 0..tree.node_count() {
        let id = escape(tree.name_of(i));
        let label = format!("{}\\nh={}", id, tree.level(i));
        if tree.is_leaf(i) {
            out.push_str(&format!("  \"{id}\" [label=\"{label}\", shape=box];\n"));
        } else {
            out.push_str(&format!("  \"{id}\" [label=\"{label}\"];\n"));
        }
    }
    for i in 0..tree.node_count() {
        for &c in tree.children(i) {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                escape(tree.name_of(i)),
                escape(tree.name_of(c))
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// Renders a branching tree with its leaf colors filled in and, when a
/// certificate is given, the kept subtree drawn with heavy borders.
pub fn subtree_dot(
    tree: &BranchingTree,
    coloring: &Coloring,
    cert: Option<&MonoSubtreeCert>,
) -> String {
    let kept: std::collections::BTreeSet<&str> = cert
        .map(|c| c.nodes.iter().map(String::as_str).collect())
        .unwrap_or_default();
    let mut out = String::from("digraph subtree {\n  rankdir=TB;\n");
    for i in 0..tree.node_count() {
        let name = tree.name_of(i);
        let id = escape(name);
        let mut attrs = vec![format!("label=\"{id}\"")];
        if tree.is_leaf(i) {
            attrs.push("shape=box".to_string());
            if let Some(color) = coloring.color_of(name) {
                attrs.push("style=filled".to_string());
                attrs.push(format!("fillcolor={}", FILLS[color % FILLS.len()]));
            }
        }
        if kept.contains(name) {
            attrs.push("penwidth=2.5".to_string());
        }
        out.push_str(&format!("  \"{id}\" [{}];\n", attrs.join(", ")));
    }
    for i in 0..tree.node_count() {
        for &c in tree.children(i) {
            let bold = kept.contains(tree.name_of(i)) && kept.contains(tree.name_of(c));
            let attrs = if bold { " [penwidth=2.5]" } else { "" };
            out.push_str(&format!(
                "  \"{}\" -> \"{}\"{};\n",
                escape(tree.name_of(i)),
                escape(tree.name_of(c)),
                attrs
            ));
        }
    }
    out.push_str("}\n");
    out
}
