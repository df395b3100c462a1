//! Immutable simple undirected graphs.
//!
//! Nodes carry dense ids `0..node_count` and an external label (the token
//! that named them in the input file). Adjacency is stored in compressed
//! sparse row form with every neighbor list strictly increasing.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};

use thiserror::Error;

/// Dense node identifier.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two endpoint tokens, found {found}")]
    Parse { line: usize, found: usize },
    #[error("graph has no edges")]
    Empty,
    #[error("node id {id} out of range for graph with {node_count} nodes")]
    InvalidNode { id: NodeId, node_count: usize },
    #[error("{0}")]
    Argument(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Counts of input records dropped while normalizing an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadSummary {
    pub lines: usize,
    pub comments: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl Graph {
    /// Builds a graph from labels and an edge iterator over dense ids.
    ///
    /// Self-loops and repeated edges are dropped; the returned summary
    /// records how many.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<(Self, LoadSummary)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (id, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), id).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }

        let mut summary = LoadSummary::default();
        let mut lists: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::InvalidNode { id, node_count: n });
                }
            }
            if u == v {
                summary.self_loops += 1;
                continue;
            }
            lists[u].push(v);
            lists[v].push(u);
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            // each duplicate undirected edge shows up once in each endpoint's list
            summary.duplicate_edges += before - list.len();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        summary.duplicate_edges /= 2;

        Ok((
            Graph {
                offsets,
                targets,
                labels,
                index,
            },
            summary,
        ))
    }

    /// Builds a graph whose labels are the decimal dense ids.
    pub fn from_unlabeled<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::from_edges(labels, edges).map(|(g, _)| g)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id_of(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode {
                id: node,
                node_count: self.node_count(),
            })
        }
    }

    /// Edges as `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Checks symmetry, absence of self-loops, strictly increasing neighbor
    /// lists and the edge-count identity.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.offsets.len() != n + 1 || !self.targets.len().is_multiple_of(2) {
            return Err(GraphError::Invariant("malformed offsets".into()));
        }
        for u in 0..n {
            let list = self.neighbors(u);
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GraphError::Invariant(format!(
                    "neighbor list of {u} is not strictly increasing"
                )));
            }
            for &v in list {
                if v >= n {
                    return Err(GraphError::InvalidNode { id: v, node_count: n });
                }
                if v == u {
                    return Err(GraphError::Invariant(format!("self-loop at {u}")));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return Err(GraphError::Invariant(format!("edge {u}-{v} is not symmetric")));
                }
            }
        }
        for (label, &id) in &self.index {
            if self.labels.get(id) != Some(label) {
                return Err(GraphError::Invariant(format!("label map broken at {label:?}")));
            }
        }
        Ok(())
    }

    pub fn require_edges(&self) -> Result<()> {
        if self.edge_count() == 0 {
            Err(GraphError::Empty)
        } else {
            Ok(())
        }
    }

    /// Connected component index of every node, numbered in order of each
    /// component's smallest node id, together with the component sizes.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            comp[start] = c;
            queue.push_back(start);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = c;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (comp, sizes)
    }

    /// Subgraph induced by `keep`, with nodes renumbered in increasing old-id
    /// order. Returns the old → new id map.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, Vec<Option<NodeId>>) {
        let mut map = vec![None; self.node_count()];
        let mut labels = Vec::new();
        for (old, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            map[old] = Some(labels.len());
            labels.push(self.labels[old].clone());
        }
        let edges = self
            .edges()
            .filter_map(|(u, v)| Some((map[u]?, map[v]?)))
            .collect::<Vec<_>>();
        let (g, _) = Graph::from_edges(labels, edges).expect("labels of a valid graph are unique");
        (g, map)
    }

    /// Serializes as an edge list: one edge per line, endpoints and lines
    /// sorted by label order, so the output is byte-stable.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut rows: Vec<(&str, &str)> = self
            .edges()
            .map(|(u, v)| {
                let (a, b) = (self.label(u), self.label(v));
                if label_cmp(a, b) == Ordering::Greater {
                    (b, a)
                } else {
                    (a, b)
                }
            })
            .collect();
        rows.sort_by(|x, y| label_cmp(x.0, y.0).then_with(|| label_cmp(x.1, y.1)));
        for (a, b) in rows {
            writeln!(out, "{a} {b}")?;
        }
        Ok(())
    }
}

/// Orders labels numerically when both parse as integers, otherwise
/// lexicographically; integers sort before non-integers.
pub fn label_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<i128>(), b.parse::<i128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` are comments, tokens past the second are
/// ignored, and dense ids are assigned in first-seen order. A label that
/// only ever appears in a self-loop still becomes an (isolated) node.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    parse_edge_list(source).map(|(g, _)| g)
}

/// Like [`load_edge_list`], also reporting what was normalized away.
pub fn parse_edge_list<R: BufRead>(source: R) -> Result<(Graph, LoadSummary)> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut edges = Vec::new();
    let mut lines = 0;
    let mut comments = 0;

    let mut intern = |token: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&id) = index.get(token) {
            return id;
        }
        let id = labels.len();
        labels.push(token.to_owned());
        index.insert(token.to_owned(), id);
        id
    };

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            comments += 1;
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(GraphError::Parse {
                line: lineno + 1,
                found: 1,
            });
        };
        let u = intern(a, &mut labels);
        let v = intern(b, &mut labels);
        edges.push((u, v));
    }

    let (g, mut summary) = Graph::from_edges(labels, edges)?;
    summary.lines = lines;
    summary.comments = comments;
    if summary.self_loops + summary.duplicate_edges > 0 {
        log::info!(
            "edge list normalized: dropped {} self-loops and {} duplicate edges",
            summary.self_loops,
            summary.duplicate_edges
        );
    }
    Ok((g, summary))
}

/// Induced subgraph on the largest connected component plus the old → new
/// id map. Ties go to the component containing the smallest node id.
pub fn largest_component(g: &Graph) -> (Graph, Vec<Option<NodeId>>) {
    let (comp, sizes) = g.components();
    let Some(best) = largest_index(&sizes) else {
        return (g.clone(), Vec::new());
    };
    if sizes[best] == g.node_count() {
        return (g.clone(), (0..g.node_count()).map(Some).collect());
    }
    let keep: Vec<bool> = comp.iter().map(|&c| c == best).collect();
    g.induced_subgraph(&keep)
}

/// Index of the first maximum; components are numbered by smallest member
/// id, so this realizes the tie rule.
pub(crate) fn largest_index(sizes: &[usize]) -> Option<usize> {
    let max = *sizes.iter().max()?;
    sizes.iter().position(|&s| s == max)
}
