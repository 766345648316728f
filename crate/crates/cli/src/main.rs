//! `ramsey`: exact command-line tools for finite metric and ultrametric
//! spaces — validation, one-point extensions, monochromatic copy search,
//! tree conversion, subtree extraction, universal-host runs, DOT export,
//! and seeded corpus generation.
//!
//! Every output is deterministic: JSON documents render with sorted keys
//! and rationals as exact `"p/q"` strings, and all randomness flows from an
//! explicit seed (the `RAMSEY_SEED` environment variable overrides any
//! `--seed` argument). Exit codes: 0 success/found, 1 not-found or
//! obstruction, 2 invalid input.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ramsey_core::copysearch::{greedy_find_copy, oracle_find_copy, FoundCopy, GreedyOutcome};
use ramsey_core::dot::{subtree_dot, tree_to_dot};
use ramsey_core::format::{
    json_string, ColoringDoc, CopyCertDoc, FailureDoc, RegularDoc, RequestDoc, SpaceDoc,
    SubtreeCertDoc, TreeDoc,
};
use ramsey_core::gen;
use ramsey_core::katetov::saturate;
use ramsey_core::treeramsey::{
    mono_subtree, required_branching, BranchingTree, SubtreeOutcome,
};
use ramsey_core::treespace::{regularize, ultrametric_to_tree, TreeSpace};
use ramsey_core::universal::{
    build_universal_tree, find_mono_isometric_copy, verify_universal_copy, CopyOutcome,
    UniversalTree,
};
use ramsey_core::{Coloring, MetricSpace, Rational, UltrametricSpace};

const GENERATOR_CAP: usize = 10_000;
const EXHAUSTIVE_CAP: u128 = 1 << 20;
const RANDOM_ADVERSARY_CASES: u64 = 100;

#[derive(Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Exact tools for finite ultrametric spaces, tree representations, and monochromatic copy search"
)]
struct Cli {
    /// Write the primary output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file against the metric axioms (exit 2 on violation).
    Validate {
        /// Space file: {"points": [...], "distances": [[...]]}.
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        /// Additionally require the strong triangle inequality.
        #[arg(long)]
        ultrametric: bool,
    },
    /// Classify a triple of an ultrametric space: base pair and apex.
    Isosceles {
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        /// Three point names, comma-separated.
        #[arg(long, value_name = "A,B,C")]
        points: String,
    },
    /// Convert an ultrametric space to a level-labeled tree that reproduces
    /// its distances exactly.
    ToTree {
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        /// Emit the regularized form: uniform leaf depth, one level value
        /// per depth.
        #[arg(long)]
        regular: bool,
    },
    /// Read a tree file and emit the metric its leaves carry.
    TreeMetric {
        /// Tree file: {"nodes": [{"id", "parent", "h"}], "leaf_map": {...}}.
        #[arg(long, value_name = "FILE")]
        tree: PathBuf,
        /// Two leaf node names, comma-separated: emit just their distance.
        #[arg(long, value_name = "X,Y")]
        pair: Option<String>,
    },
    /// Grow a space by one-point extensions described in a request file.
    Extend {
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        /// JSON list of {"id", "support", "values"} profiles.
        #[arg(long, value_name = "FILE")]
        requests: PathBuf,
    },
    /// Search a colored space for a monochromatic scaled copy of a target.
    FindCopy {
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        /// Coloring file: {"colors": {point: class}}.
        #[arg(long, value_name = "FILE")]
        coloring: PathBuf,
        /// Target space file.
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        /// greedy: one pass per color, obstruction report on failure.
        /// oracle: exhaustive backtracking, misses are conclusive.
        #[arg(long, value_enum)]
        mode: SearchMode,
        /// Restrict the oracle to these scale factors (comma-separated
        /// rationals; oracle mode only).
        #[arg(long, value_name = "Q,Q,...")]
        scales: Option<String>,
    },
    /// Extract a monochromatic complete subtree from a colored uniform tree.
    MonoSubtree {
        #[arg(long, value_name = "FILE")]
        tree: PathBuf,
        #[arg(long, value_name = "FILE")]
        coloring: PathBuf,
        /// Child count the extracted subtree must keep at every kept node.
        #[arg(long, value_name = "K")]
        branching: usize,
    },
    /// Build a universal host tree and find a monochromatic exactly
    /// isometric copy of the target under a coloring or an adversary sweep.
    Universal {
        /// Palette of allowed distances, comma-separated rationals.
        #[arg(long, value_name = "Q,Q,...")]
        distances: String,
        /// Height of the host tree.
        #[arg(long, value_name = "N")]
        height: usize,
        /// Number of color classes (drives `--multiplicity auto` and the
        /// adversary generators).
        #[arg(long, value_name = "C")]
        colors: usize,
        /// Children per (node, value) pair: a number, or `auto` to compute
        /// the pigeonhole bound from the target.
        #[arg(long, default_value = "auto", value_name = "auto|N")]
        multiplicity: String,
        /// Target ultrametric space file (distances must lie in the palette).
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        /// Coloring file for a single run.
        #[arg(long, value_name = "FILE", conflicts_with = "adversary")]
        coloring: Option<PathBuf>,
        /// Sweep colorings instead: `exhaustive` (over the matched region's
        /// leaf blocks) or `random:SEED`.
        #[arg(long, value_name = "exhaustive|random:SEED")]
        adversary: Option<String>,
        /// Also write the embedded copy's tree hull as DOT to this path
        /// (single-run mode only; skipped when nothing is found).
        #[arg(long, value_name = "PATH", requires = "coloring")]
        dot: Option<PathBuf>,
    },
    /// Render a tree file as Graphviz DOT, optionally coloring leaves and
    /// emphasizing a certificate's kept subtree.
    ExportDot {
        #[arg(long, value_name = "FILE")]
        tree: PathBuf,
        /// Subtree certificate to emphasize (requires --coloring).
        #[arg(long, value_name = "FILE", requires = "coloring")]
        cert: Option<PathBuf>,
        /// Coloring file used to fill leaf nodes.
        #[arg(long, value_name = "FILE")]
        coloring: Option<PathBuf>,
    },
    /// Emit seeded random inputs for the other subcommands.
    Generate {
        #[command(subcommand)]
        what: GenerateWhat,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SearchMode {
    Greedy,
    Oracle,
}

#[derive(Subcommand)]
enum GenerateWhat {
    /// A random ultrametric space (the leaf metric of a random tree).
    Ultrametric {
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,
        #[arg(long, value_name = "N")]
        count: usize,
        /// Comma-separated positive rationals to draw levels from.
        #[arg(long, value_name = "Q,Q,...")]
        palette: Option<String>,
    },
    /// A random metric space (shortest-path closure of random weights).
    Metric {
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,
        #[arg(long, value_name = "N")]
        count: usize,
    },
    /// A random total coloring of a space's points.
    Coloring {
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        #[arg(long, value_name = "C")]
        colors: usize,
    },
    /// A random level-labeled tree.
    Tree {
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,
        #[arg(long, value_name = "N")]
        leaves: usize,
        #[arg(long, value_name = "Q,Q,...")]
        palette: Option<String>,
    },
}

/// What a subcommand produced: the primary document, the exit code, and an
/// optional side file (the `universal --dot` output).
struct RunOutput {
    body: String,
    code: u8,
    side: Option<(PathBuf, String)>,
}

impl RunOutput {
    fn ok(body: String) -> Self {
        RunOutput {
            body,
            code: 0,
            side: None,
        }
    }

    fn miss(body: String) -> Self {
        RunOutput {
            body,
            code: 1,
            side: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(output) => {
            if let Some((path, text)) = &output.side {
                if let Err(e) = fs::write(path, text) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            match &out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &output.body) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", output.body),
            }
            ExitCode::from(output.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<RunOutput> {
    match cli.command {
        Command::Validate { space, ultrametric } => cmd_validate(&space, ultrametric),
        Command::Isosceles { space, points } => cmd_isosceles(&space, &points),
        Command::ToTree { space, regular } => cmd_to_tree(&space, regular),
        Command::TreeMetric { tree, pair } => cmd_tree_metric(&tree, pair.as_deref()),
        Command::Extend { space, requests } => cmd_extend(&space, &requests),
        Command::FindCopy {
            space,
            coloring,
            target,
            mode,
            scales,
        } => cmd_find_copy(&space, &coloring, &target, mode, scales.as_deref()),
        Command::MonoSubtree {
            tree,
            coloring,
            branching,
        } => cmd_mono_subtree(&tree, &coloring, branching),
        Command::Universal {
            distances,
            height,
            colors,
            multiplicity,
            target,
            coloring,
            adversary,
            dot,
        } => cmd_universal(
            &distances,
            height,
            colors,
            &multiplicity,
            &target,
            coloring.as_deref(),
            adversary.as_deref(),
            dot,
        ),
        Command::ExportDot {
            tree,
            cert,
            coloring,
        } => cmd_export_dot(&tree, cert.as_deref(), coloring.as_deref()),
        Command::Generate { what } => cmd_generate(what),
    }
}

// ---------------------------------------------------------------- loading

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_space(path: &Path) -> Result<MetricSpace> {
    let doc: SpaceDoc = read_json(path)?;
    doc.into_space()
        .with_context(|| format!("validating {}", path.display()))
}

fn load_ultrametric(path: &Path) -> Result<UltrametricSpace> {
    UltrametricSpace::new(load_space(path)?)
        .with_context(|| format!("validating {}", path.display()))
}

fn load_coloring(path: &Path) -> Result<Coloring> {
    let doc: ColoringDoc = read_json(path)?;
    Ok(doc.into_coloring())
}

fn load_tree(path: &Path) -> Result<TreeSpace> {
    let doc: TreeDoc = read_json(path)?;
    doc.into_tree()
        .with_context(|| format!("validating {}", path.display()))
}

fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<Rational>()
                .map_err(|e| anyhow!("invalid rational {tok:?}: {e}"))
        })
        .collect()
}

fn parse_positive_palette(s: &str) -> Result<Vec<Rational>> {
    let values = parse_rational_list(s)?;
    if values.is_empty() {
        bail!("the palette must hold at least one value");
    }
    for v in &values {
        if !v.is_positive() {
            bail!("palette values must be positive, got {v}");
        }
    }
    Ok(values)
}

/// `RAMSEY_SEED`, when set, overrides any seed given on the command line.
fn effective_seed(cli_seed: u64) -> Result<u64> {
    match std::env::var("RAMSEY_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| anyhow!("RAMSEY_SEED must be a 64-bit unsigned integer, got {v:?}")),
        Err(std::env::VarError::NotPresent) => Ok(cli_seed),
        Err(e) => Err(anyhow!("RAMSEY_SEED is not valid unicode: {e}")),
    }
}

fn check_count(count: usize, what: &str) -> Result<()> {
    if count == 0 {
        bail!("{what} must be at least 1");
    }
    if count > GENERATOR_CAP {
        bail!("{what} is capped at {GENERATOR_CAP}, got {count}");
    }
    Ok(())
}

// ------------------------------------------------------------ subcommands

fn cmd_validate(space: &Path, ultrametric: bool) -> Result<RunOutput> {
    let s = load_space(space)?;
    if ultrametric {
        UltrametricSpace::new(s.clone())
            .with_context(|| format!("validating {}", space.display()))?;
    }
    let body = json_string(&serde_json::json!({
        "points": s.len(),
        "status": "valid",
        "ultrametric": ultrametric,
    }));
    Ok(RunOutput::ok(body))
}

fn cmd_isosceles(space: &Path, points: &str) -> Result<RunOutput> {
    let s = load_ultrametric(space)?;
    let names: Vec<&str> = points.split(',').map(str::trim).collect();
    let [x, y, z] = names.as_slice() else {
        bail!("--points needs exactly three comma-separated names, got {points:?}");
    };
    let witness = s.isosceles(x, y, z)?;
    let base = s.dist_by_name(&witness.base.0, &witness.base.1).unwrap();
    let leg = s.dist_by_name(&witness.base.0, &witness.apex).unwrap();
    let body = json_string(&serde_json::json!({
        "apex": witness.apex,
        "base": [witness.base.0, witness.base.1],
        "base_distance": base,
        "leg_distance": leg,
    }));
    Ok(RunOutput::ok(body))
}

fn cmd_to_tree(space: &Path, regular: bool) -> Result<RunOutput> {
    let s = load_ultrametric(space)?;
    let witness = ultrametric_to_tree(&s);
    let body = if regular {
        json_string(&RegularDoc::from_witness(&regularize(&witness)))
    } else {
        json_string(&TreeDoc::from_witness(&witness))
    };
    Ok(RunOutput::ok(body))
}

fn cmd_tree_metric(tree: &Path, pair: Option<&str>) -> Result<RunOutput> {
    let t = load_tree(tree)?;
    match pair {
        Some(p) => {
            let names: Vec<&str> = p.split(',').map(str::trim).collect();
            let [x, y] = names.as_slice() else {
                bail!("--pair needs exactly two comma-separated names, got {p:?}");
            };
            let d = t.tree_metric_by_name(x, y)?;
            let body = json_string(&serde_json::json!({
                "distance": d,
                "x": x,
                "y": y,
            }));
            Ok(RunOutput::ok(body))
        }
        None => {
            let space = t.leaf_space();
            Ok(RunOutput::ok(json_string(&SpaceDoc::from_space(&space))))
        }
    }
}

fn cmd_extend(space: &Path, requests: &Path) -> Result<RunOutput> {
    let s = load_space(space)?;
    let docs: Vec<RequestDoc> = read_json(requests)?;
    let reqs: Vec<_> = docs.into_iter().map(RequestDoc::into_request).collect();
    let grown = saturate(&s, &reqs)?;
    Ok(RunOutput::ok(json_string(&SpaceDoc::from_space(&grown))))
}

fn cmd_find_copy(
    space: &Path,
    coloring: &Path,
    target: &Path,
    mode: SearchMode,
    scales: Option<&str>,
) -> Result<RunOutput> {
    let s = load_space(space)?;
    let c = load_coloring(coloring)?;
    let k = load_space(target)?;
    let scale_set: Option<BTreeSet<Rational>> = match (mode, scales) {
        (_, None) => None,
        (SearchMode::Oracle, Some(list)) => {
            Some(parse_rational_list(list)?.into_iter().collect())
        }
        (SearchMode::Greedy, Some(_)) => {
            bail!("--scales applies only to --mode oracle");
        }
    };
    match mode {
        SearchMode::Greedy => match greedy_find_copy(&s, &c, &k, None)? {
            GreedyOutcome::Found(found) => {
                Ok(RunOutput::ok(json_string(&CopyCertDoc::from_found(&found))))
            }
            GreedyOutcome::Obstructed(failure) => Ok(RunOutput::miss(json_string(
                &FailureDoc::from_failure(&failure),
            ))),
        },
        SearchMode::Oracle => match oracle_find_copy(&s, &c, &k, scale_set.as_ref())? {
            Some(found) => Ok(RunOutput::ok(json_string(&CopyCertDoc::from_found(&found)))),
            None => Ok(RunOutput::miss(json_string(&serde_json::json!({
                "result": "not-found",
            })))),
        },
    }
}

fn cmd_mono_subtree(tree: &Path, coloring: &Path, branching: usize) -> Result<RunOutput> {
    if branching == 0 {
        bail!("--branching must be at least 1");
    }
    let t = load_tree(tree)?;
    let shape = BranchingTree::from_tree_space(&t)
        .with_context(|| format!("reading the shape of {}", tree.display()))?;
    let c = load_coloring(coloring)?;
    match mono_subtree(&shape, &c, branching)? {
        SubtreeOutcome::Found(cert) => {
            Ok(RunOutput::ok(json_string(&SubtreeCertDoc::from_cert(&cert))))
        }
        SubtreeOutcome::NotFound { refutation_path } => {
            Ok(RunOutput::miss(json_string(&serde_json::json!({
                "refutation_path": refutation_path,
                "result": "not-found",
            }))))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_universal(
    distances: &str,
    height: usize,
    colors: usize,
    multiplicity: &str,
    target: &Path,
    coloring: Option<&Path>,
    adversary: Option<&str>,
    dot: Option<PathBuf>,
) -> Result<RunOutput> {
    if colors == 0 {
        bail!("--colors must be at least 1");
    }
    let palette: BTreeSet<Rational> = parse_positive_palette(distances)?.into_iter().collect();
    let x = load_ultrametric(target)?;
    let mult = match multiplicity {
        "auto" => {
            let witness = regularize(&ultrametric_to_tree(&x));
            let k = witness.tree.max_child_count().max(1);
            required_branching(colors, k)
        }
        s => s
            .parse::<usize>()
            .map_err(|_| anyhow!("--multiplicity must be `auto` or a positive integer, got {s:?}"))?,
    };
    let m = build_universal_tree(&palette, height, mult)?;

    match (coloring, adversary) {
        (Some(cpath), None) => {
            let c = load_coloring(cpath)?;
            match find_mono_isometric_copy(&m, &c, &x)? {
                CopyOutcome::Found(found) => {
                    let side = match dot {
                        Some(path) => Some((path, embedding_hull_dot(&m, &found)?)),
                        None => None,
                    };
                    Ok(RunOutput {
                        body: json_string(&CopyCertDoc::from_found(&found)),
                        code: 0,
                        side,
                    })
                }
                CopyOutcome::NotFound {
                    multiplicity,
                    required,
                } => Ok(RunOutput::miss(json_string(&serde_json::json!({
                    "multiplicity": multiplicity,
                    "required": required,
                    "result": "not-found",
                })))),
            }
        }
        (None, Some(spec)) => adversary_sweep(&m, &x, colors, spec),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        (None, None) => bail!("exactly one of --coloring or --adversary is required"),
    }
}

/// The ancestor closure of the embedding's image leaves, rendered as DOT.
fn embedding_hull_dot(m: &UniversalTree, found: &FoundCopy) -> Result<String> {
    let tree = m.tree();
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for leaf in found.cert.embedding.values() {
        let mut cur = tree
            .index_of(leaf)
            .ok_or_else(|| anyhow!("embedding image {leaf:?} is not a node of the host"))?;
        loop {
            if !keep.insert(cur) {
                break;
            }
            match tree.parent(cur) {
                Some(p) => cur = p,
                None => break,
            }
        }
    }
    let nodes: Vec<(String, Option<String>, Rational)> = keep
        .iter()
        .map(|&i| {
            (
                tree.name_of(i).to_string(),
                tree.parent(i).map(|p| tree.name_of(p).to_string()),
                tree.level(i).clone(),
            )
        })
        .collect();
    let hull = TreeSpace::new(nodes).expect("an ancestor closure is itself a tree");
    Ok(tree_to_dot(&hull))
}

/// Runs the pipeline against a family of colorings and reports a summary.
fn adversary_sweep(
    m: &UniversalTree,
    x: &UltrametricSpace,
    colors: usize,
    spec: &str,
) -> Result<RunOutput> {
    let leaves = m.leaf_names();
    let mut cases_run = 0u64;
    let mut outcome: Option<(u64, usize, usize)> = None; // failing case, multiplicity, required

    let kind;
    if spec == "exhaustive" {
        kind = "exhaustive";
        // Color whole leaf blocks under the matched region's bottom nodes;
        // everything outside the region stays in class 0.
        let lv: Vec<Rational> = x.distance_set().into_iter().rev().collect();
        let region = m.match_subtree(&lv)?;
        let blocks: Vec<Vec<String>> = region
            .leaf_names()
            .iter()
            .map(|name| descendant_leaves(m.tree(), name))
            .collect();
        let total = (colors as u128)
            .checked_pow(blocks.len() as u32)
            .ok_or_else(|| anyhow!("adversary case count overflows"))?;
        if total > EXHAUSTIVE_CAP {
            bail!(
                "exhaustive adversary would run {total} cases (cap {EXHAUSTIVE_CAP}); \
                 shrink the instance or use random:SEED"
            );
        }
        for case in 0..total {
            let mut map: BTreeMap<String, usize> =
                leaves.iter().map(|l| (l.clone(), 0usize)).collect();
            let mut digits = case;
            for block in &blocks {
                let class = (digits % colors as u128) as usize;
                digits /= colors as u128;
                for leaf in block {
                    map.insert(leaf.clone(), class);
                }
            }
            let c = Coloring::new(map);
            cases_run += 1;
            if let Some(fail) = run_case(m, &c, x)? {
                outcome = Some((cases_run - 1, fail.0, fail.1));
                break;
            }
        }
    } else if let Some(seed_text) = spec.strip_prefix("random:") {
        kind = "random";
        let base_seed = seed_text
            .trim()
            .parse::<u64>()
            .map_err(|_| anyhow!("adversary seed must be a 64-bit unsigned integer"))?;
        let base_seed = effective_seed(base_seed)?;
        for i in 0..RANDOM_ADVERSARY_CASES {
            let c = gen::random_coloring(base_seed.wrapping_add(i), &leaves, colors);
            cases_run += 1;
            if let Some(fail) = run_case(m, &c, x)? {
                outcome = Some((cases_run - 1, fail.0, fail.1));
                break;
            }
        }
    } else {
        bail!("--adversary must be `exhaustive` or `random:SEED`, got {spec:?}");
    }

    match outcome {
        None => Ok(RunOutput::ok(json_string(&serde_json::json!({
            "adversary": kind,
            "cases": cases_run,
            "colors": colors,
            "found": cases_run,
            "multiplicity": m.multiplicity(),
            "result": "all-found",
        })))),
        Some((failing, multiplicity, required)) => {
            Ok(RunOutput::miss(json_string(&serde_json::json!({
                "adversary": kind,
                "cases": cases_run,
                "colors": colors,
                "failing_case": failing,
                "multiplicity": multiplicity,
                "required": required,
                "result": "not-found",
            }))))
        }
    }
}

/// One adversary case: `None` when a verified copy is found, otherwise the
/// reported (multiplicity, required) bound.
fn run_case(
    m: &UniversalTree,
    coloring: &Coloring,
    x: &UltrametricSpace,
) -> Result<Option<(usize, usize)>> {
    match find_mono_isometric_copy(m, coloring, x)? {
        CopyOutcome::Found(found) => {
            if !verify_universal_copy(m, coloring, x, &found) {
                bail!("internal error: a returned certificate failed verification");
            }
            Ok(None)
        }
        CopyOutcome::NotFound {
            multiplicity,
            required,
        } => Ok(Some((multiplicity, required))),
    }
}

fn descendant_leaves(tree: &TreeSpace, name: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![tree
        .index_of(name)
        .expect("region nodes are nodes of the host")];
    while let Some(i) = stack.pop() {
        if tree.is_leaf(i) {
            out.push(tree.name_of(i).to_string());
        }
        for &c in tree.children(i) {
            stack.push(c);
        }
    }
    out
}

fn cmd_export_dot(
    tree: &Path,
    cert: Option<&Path>,
    coloring: Option<&Path>,
) -> Result<RunOutput> {
    let t = load_tree(tree)?;
    let body = match coloring {
        None => tree_to_dot(&t),
        Some(cpath) => {
            let shape = BranchingTree::from_tree_space(&t)
                .with_context(|| format!("reading the shape of {}", tree.display()))?;
            let c = load_coloring(cpath)?;
            let cert_value = match cert {
                Some(path) => {
                    let doc: SubtreeCertDoc = read_json(path)?;
                    Some(doc.into_cert())
                }
                None => None,
            };
            subtree_dot(&shape, &c, cert_value.as_ref())
        }
    };
    Ok(RunOutput::ok(body))
}

fn cmd_generate(what: GenerateWhat) -> Result<RunOutput> {
    match what {
        GenerateWhat::Ultrametric {
            seed,
            count,
            palette,
        } => {
            let seed = effective_seed(seed)?;
            check_count(count, "--count")?;
            let space = match palette {
                Some(p) => {
                    let values = parse_positive_palette(&p)?;
                    gen::random_ultrametric_with_palette(seed, count, &values)
                }
                None => gen::random_ultrametric(seed, count),
            };
            Ok(RunOutput::ok(json_string(&SpaceDoc::from_space(&space))))
        }
        GenerateWhat::Metric { seed, count } => {
            let seed = effective_seed(seed)?;
            check_count(count, "--count")?;
            let space = gen::random_metric(seed, count);
            Ok(RunOutput::ok(json_string(&SpaceDoc::from_space(&space))))
        }
        GenerateWhat::Coloring {
            seed,
            space,
            colors,
        } => {
            let seed = effective_seed(seed)?;
            if colors == 0 {
                bail!("--colors must be at least 1");
            }
            let s = load_space(&space)?;
            let c = gen::random_coloring(seed, &s.points().to_vec(), colors);
            Ok(RunOutput::ok(json_string(&ColoringDoc::from_coloring(&c))))
        }
        GenerateWhat::Tree {
            seed,
            leaves,
            palette,
        } => {
            let seed = effective_seed(seed)?;
            check_count(leaves, "--leaves")?;
            let values = match palette {
                Some(p) => parse_positive_palette(&p)?,
                None => gen::default_palette(),
            };
            let tree = gen::random_tree_space(seed, leaves, &values);
            Ok(RunOutput::ok(json_string(&TreeDoc::from_tree(&tree))))
        }
    }
}
