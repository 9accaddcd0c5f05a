//! Triple-vertex taxonomy and the recursive self-generation tree of the
//! communication field.
//!
//! A tree is grown from a seed vertex by substitution: each OPEN
//! communication edge is terminated by a new `WWW` vertex that consumes one
//! of its three slots for the parent edge and contributes two fresh OPEN
//! edges. Abelian (DH-mode) trees never grow: their communication field has
//! no self-interaction, so `grow` is the identity on them. Open edges stand
//! for virtual technologies awaiting adoption; exports label them as such.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FractalError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("malformed tree JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Vertex species: `CcA` couples two innovation lines to one Abelian
/// communication line, `CcW` two innovation lines to one non-Abelian line,
/// `Www` three non-Abelian communication lines (the self-interaction vertex).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    #[serde(rename = "CC_A")]
    CcA,
    #[serde(rename = "CC_W")]
    CcW,
    #[serde(rename = "WWW")]
    Www,
}

/// Edge species: innovation line `c`, Abelian communication line `A`,
/// non-Abelian communication line `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "c")]
    C,
    A,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HelixMode {
    #[serde(rename = "DH")]
    Dh,
    #[serde(rename = "TH")]
    Th,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: u32,
    pub kind: VertexKind,
    pub depth: u32,
}

/// An edge from a node to either another node or, when `to` is `None`, an
/// OPEN slot (a dangling line).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: u32,
    pub to: Option<u32>,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexTree {
    pub mode: HelixMode,
    pub depth: u32,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// Result of a growth attempt; `no_growth` is set when the tree's mode
/// cannot self-generate (DH).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowOutcome {
    pub tree: VertexTree,
    pub no_growth: bool,
}

/// Depth-0 tree: one vertex with three open slots. TH seeds carry the
/// self-interaction vertex (three W lines); DH seeds the innovation vertex
/// with edges typed (c, c, A).
pub fn seed_tree(mode: HelixMode) -> VertexTree {
    match mode {
        HelixMode::Th => VertexTree {
            mode,
            depth: 0,
            nodes: vec![Node {
                id: 0,
                kind: VertexKind::Www,
                depth: 0,
            }],
            edges: vec![
                Edge { from: 0, to: None, kind: EdgeKind::W },
                Edge { from: 0, to: None, kind: EdgeKind::W },
                Edge { from: 0, to: None, kind: EdgeKind::W },
            ],
        },
        HelixMode::Dh => VertexTree {
            mode,
            depth: 0,
            nodes: vec![Node {
                id: 0,
                kind: VertexKind::CcA,
                depth: 0,
            }],
            edges: vec![
                Edge { from: 0, to: None, kind: EdgeKind::C },
                Edge { from: 0, to: None, kind: EdgeKind::C },
                Edge { from: 0, to: None, kind: EdgeKind::A },
            ],
        },
    }
}

/// Grows the tree by `generations` substitution rounds. Each round
/// terminates every OPEN W-edge with a new `WWW` vertex carrying two new
/// OPEN W-edges; node ids are assigned breadth-first in edge order, so
/// repeated calls with equal inputs are byte-for-byte reproducible.
///
/// DH-mode trees are returned unchanged with `no_growth` set: the Abelian
/// communication field is not its own source.
pub fn grow(tree: &VertexTree, generations: u32) -> GrowOutcome {
    if tree.mode == HelixMode::Dh {
        return GrowOutcome {
            tree: tree.clone(),
            no_growth: true,
        };
    }
    let mut out = tree.clone();
    for _ in 0..generations {
        let open: Vec<usize> = (0..out.edges.len())
            .filter(|&k| out.edges[k].to.is_none() && out.edges[k].kind == EdgeKind::W)
            .collect();
        for k in open {
            let id = out.nodes.len() as u32;
            let parent_depth = {
                let from = out.edges[k].from;
                out.nodes[from as usize].depth
            };
            out.edges[k].to = Some(id);
            out.nodes.push(Node {
                id,
                kind: VertexKind::Www,
                depth: parent_depth + 1,
            });
            out.edges.push(Edge { from: id, to: None, kind: EdgeKind::W });
            out.edges.push(Edge { from: id, to: None, kind: EdgeKind::W });
        }
        out.depth += 1;
    }
    GrowOutcome {
        tree: out,
        no_growth: false,
    }
}

/// Aggregate counts of a tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub open_edges: usize,
    pub nodes_per_depth: Vec<usize>,
    /// Ratio of the two deepest layer populations; `None` below depth 1.
    pub branching_factor: Option<f64>,
}

pub fn tree_stats(tree: &VertexTree) -> TreeStats {
    let nodes = tree.nodes.len();
    let open_edges = tree.edges.iter().filter(|e| e.to.is_none()).count();
    let max_depth = tree.nodes.iter().map(|n| n.depth).max().unwrap_or(0);
    let mut nodes_per_depth = vec![0usize; max_depth as usize + 1];
    for n in &tree.nodes {
        nodes_per_depth[n.depth as usize] += 1;
    }
    let branching_factor = if nodes_per_depth.len() >= 2 {
        let last = nodes_per_depth[nodes_per_depth.len() - 1] as f64;
        let prev = nodes_per_depth[nodes_per_depth.len() - 2] as f64;
        Some(last / prev)
    } else {
        None
    };
    TreeStats {
        nodes,
        open_edges,
        nodes_per_depth,
        branching_factor,
    }
}

impl VertexTree {
    /// Checks the structural invariants: edges reference existing nodes,
    /// every node has exactly three incident slots, and the vertex and edge
    /// species match the mode (no `WWW`/W in DH trees, no `CC_A`/A in TH
    /// trees).
    pub fn validate(&self) -> Result<(), FractalError> {
        let n = self.nodes.len() as u32;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i as u32 {
                return Err(FractalError::InvalidTree(format!(
                    "node ids must be dense and ordered (slot {i} holds id {})",
                    node.id
                )));
            }
        }
        let mut slots = vec![0u32; self.nodes.len()];
        for e in &self.edges {
            if e.from >= n {
                return Err(FractalError::InvalidTree(format!(
                    "edge references missing node {}",
                    e.from
                )));
            }
            slots[e.from as usize] += 1;
            if let Some(to) = e.to {
                if to >= n {
                    return Err(FractalError::InvalidTree(format!(
                        "edge references missing node {to}"
                    )));
                }
                slots[to as usize] += 1;
            }
        }
        for (i, &count) in slots.iter().enumerate() {
            if count != 3 {
                return Err(FractalError::InvalidTree(format!(
                    "node {i} has {count} incident slots, expected 3"
                )));
            }
        }
        for node in &self.nodes {
            let ok = match self.mode {
                HelixMode::Dh => node.kind != VertexKind::Www,
                HelixMode::Th => node.kind != VertexKind::CcA,
            };
            if !ok {
                return Err(FractalError::InvalidTree(format!(
                    "vertex kind {:?} is not permitted in {:?}-mode trees",
                    node.kind, self.mode
                )));
            }
        }
        for e in &self.edges {
            let ok = match self.mode {
                HelixMode::Dh => e.kind != EdgeKind::W,
                HelixMode::Th => e.kind != EdgeKind::A,
            };
            if !ok {
                return Err(FractalError::InvalidTree(format!(
                    "edge kind {:?} is not permitted in {:?}-mode trees",
                    e.kind, self.mode
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<VertexTree, FractalError> {
        let tree: VertexTree = serde_json::from_str(text)?;
        tree.validate()?;
        Ok(tree)
    }

    /// DOT graph with vertex kind and depth as attributes. Open edges end in
    /// point-shaped placeholder nodes labeled `virtual` (virtual
    /// technologies awaiting adoption).
    pub fn to_dot(&self) -> String {
        let kind_name = |k: VertexKind| match k {
            VertexKind::CcA => "CC_A",
            VertexKind::CcW => "CC_W",
            VertexKind::Www => "WWW",
        };
        let edge_name = |k: EdgeKind| match k {
            EdgeKind::C => "c",
            EdgeKind::A => "A",
            EdgeKind::W => "W",
        };
        let mut out = String::from("graph vertex_tree {\n");
        for node in &self.nodes {
            out.push_str(&format!(
                "  n{} [label=\"{} d{}\", kind=\"{}\", depth={}];\n",
                node.id,
                kind_name(node.kind),
                node.depth,
                kind_name(node.kind),
                node.depth
            ));
        }
        let mut open_count = 0usize;
        for e in &self.edges {
            match e.to {
                Some(to) => {
                    out.push_str(&format!(
                        "  n{} -- n{} [label=\"{}\"];\n",
                        e.from,
                        to,
                        edge_name(e.kind)
                    ));
                }
                None => {
                    out.push_str(&format!(
                        "  v{open_count} [label=\"virtual\", shape=point];\n"
                    ));
                    out.push_str(&format!(
                        "  n{} -- v{} [label=\"{}\", style=dashed];\n",
                        e.from,
                        open_count,
                        edge_name(e.kind)
                    ));
                    open_count += 1;
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
