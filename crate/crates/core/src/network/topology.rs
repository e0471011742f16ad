//! Directed acyclic multigraph with a single source and sink, validated so
//! that the source's out-degree and the sink's in-degree both equal the
//! source-sink mincut C, and every edge lies on some source-to-sink path.
//!
//! The file format is line oriented: `source <node>`, `sink <node>`, then one
//! `tail head` pair per line; `#` starts a comment. The order of edge lines is
//! the tie-break for the global edge index, which in turn fixes the row-block
//! layout of noise matrices.

use crate::error::{Error, Result};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// Position of the edge in the input (file) order.
    pub file_idx: usize,
}

/// What to do when the source out-degree or sink in-degree differs from the
/// mincut: reject with a diagnostic (default), or splice in a super-source /
/// super-sink with C fresh edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepairPolicy {
    #[default]
    Reject,
    SuperNodes,
}

#[derive(Debug, Clone)]
pub struct Topology {
    node_names: Vec<String>,
    /// Edges in global order: sorted by topological rank of the tail node,
    /// ties broken by file order.
    edges: Vec<Edge>,
    source: usize,
    sink: usize,
    mincut: usize,
    topo_rank: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    source_edges: Vec<usize>,
    sink_edges: Vec<usize>,
}

impl Topology {
    pub fn parse(text: &str, repair: RepairPolicy) -> Result<Topology> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let intern = |name: &str, names: &mut Vec<String>, index: &mut HashMap<String, usize>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        let mut source = None;
        let mut sink = None;
        let mut raw_edges: Vec<(usize, usize)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap();
            match first {
                "source" => {
                    let n = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: missing source node", lineno + 1)))?;
                    source = Some(intern(n, &mut names, &mut index));
                }
                "sink" => {
                    let n = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: missing sink node", lineno + 1)))?;
                    sink = Some(intern(n, &mut names, &mut index));
                }
                tail => {
                    let head = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: edge needs tail and head", lineno + 1)))?;
                    let t = intern(tail, &mut names, &mut index);
                    let h = intern(head, &mut names, &mut index);
                    raw_edges.push((t, h));
                }
            }
            if parts.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing tokens", lineno + 1)));
            }
        }
        let source = source.ok_or_else(|| Error::Parse("missing 'source' line".into()))?;
        let sink = sink.ok_or_else(|| Error::Parse("missing 'sink' line".into()))?;
        Topology::build(names, raw_edges, source, sink, repair)
    }

    /// Build directly from interned node count and edge list (file order).
    pub fn from_edges(
        node_names: Vec<String>,
        raw_edges: Vec<(usize, usize)>,
        source: usize,
        sink: usize,
        repair: RepairPolicy,
    ) -> Result<Topology> {
        Topology::build(node_names, raw_edges, source, sink, repair)
    }

    fn build(
        mut names: Vec<String>,
        mut raw_edges: Vec<(usize, usize)>,
        mut source: usize,
        mut sink: usize,
        repair: RepairPolicy,
    ) -> Result<Topology> {
        if source == sink {
            return Err(Error::Topology("source equals sink".into()));
        }
        if raw_edges.is_empty() {
            return Err(Error::Topology("no edges".into()));
        }
        // Every edge must lie on some source->sink path.
        let n = names.len();
        let fwd = reachable(n, &raw_edges, source, |e| (e.0, e.1));
        let bwd = reachable(n, &raw_edges, sink, |e| (e.1, e.0));
        for &(t, h) in &raw_edges {
            if !(fwd[t] && bwd[h]) {
                return Err(Error::Topology(format!(
                    "edge {} -> {} lies on no source-sink path",
                    names[t], names[h]
                )));
            }
        }
        let mincut = max_flow_unit(n, &raw_edges, source, sink);
        if mincut == 0 {
            return Err(Error::Topology("sink unreachable from source".into()));
        }
        let out_deg = raw_edges.iter().filter(|e| e.0 == source).count();
        let in_deg = raw_edges.iter().filter(|e| e.1 == sink).count();
        if out_deg != mincut || in_deg != mincut {
            match repair {
                RepairPolicy::Reject => {
                    return Err(Error::Topology(format!(
                        "source out-degree {out_deg} / sink in-degree {in_deg} differ from mincut {mincut}; \
                         re-run with super-node repair to splice in C fresh edges"
                    )));
                }
                RepairPolicy::SuperNodes => {
                    if out_deg != mincut {
                        let super_source = names.len();
                        names.push("__super_source".into());
                        for _ in 0..mincut {
                            raw_edges.push((super_source, source));
                        }
                        source = super_source;
                    }
                    if in_deg != mincut {
                        let super_sink = names.len();
                        names.push("__super_sink".into());
                        for _ in 0..mincut {
                            raw_edges.push((sink, super_sink));
                        }
                        sink = super_sink;
                    }
                    // Re-validate from scratch with the spliced graph.
                    return Topology::build(names, raw_edges, source, sink, RepairPolicy::Reject);
                }
            }
        }
        let n = names.len();
        let topo_rank = topological_rank(n, &raw_edges)
            .ok_or_else(|| Error::Topology("graph contains a cycle".into()))?;
        // Global edge order: topological rank of tail, then file order.
        let mut edges: Vec<Edge> = raw_edges
            .iter()
            .enumerate()
            .map(|(i, &(t, h))| Edge { tail: t, head: h, file_idx: i })
            .collect();
        edges.sort_by_key(|e| (topo_rank[e.tail], e.file_idx));
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.tail].push(i);
            in_edges[e.head].push(i);
        }
        let source_edges = out_edges[source].clone();
        let sink_edges = in_edges[sink].clone();
        Ok(Topology {
            node_names: names,
            edges,
            source,
            sink,
            mincut,
            topo_rank,
            out_edges,
            in_edges,
            source_edges,
            sink_edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.node_names[i]
    }

    /// Edges in global order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// The mincut C from source to sink (unit capacities).
    pub fn mincut(&self) -> usize {
        self.mincut
    }

    pub fn topo_rank(&self, node: usize) -> usize {
        self.topo_rank[node]
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Global indices of the source's outgoing edges, ascending.
    pub fn source_edges(&self) -> &[usize] {
        &self.source_edges
    }

    /// Global indices of the sink's incoming edges, ascending; their order
    /// defines the row blocks of received matrices.
    pub fn sink_edges(&self) -> &[usize] {
        &self.sink_edges
    }

    /// Render back to the file format, edges in global order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("source {}\n", self.node_names[self.source]));
        s.push_str(&format!("sink {}\n", self.node_names[self.sink]));
        for e in &self.edges {
            s.push_str(&format!("{} {}\n", self.node_names[e.tail], self.node_names[e.head]));
        }
        s
    }
}

fn reachable(
    n: usize,
    edges: &[(usize, usize)],
    start: usize,
    orient: impl Fn(&(usize, usize)) -> (usize, usize),
) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        let (t, h) = orient(e);
        adj[t].push(h);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Kahn's algorithm; returns a rank per node or None if the graph has a cycle.
fn topological_rank(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for &(t, h) in edges {
        indeg[h] += 1;
        adj[t].push(h);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut rank = vec![0usize; n];
    let mut next = 0;
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        rank[v] = next;
        next += 1;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    (next == n).then_some(rank)
}

/// Max flow with unit edge capacities via BFS augmenting paths.
fn max_flow_unit(n: usize, edges: &[(usize, usize)], source: usize, sink: usize) -> usize {
    // residual: per directed arc a capacity; arcs stored in pairs (fwd, rev).
    let mut heads = Vec::with_capacity(edges.len() * 2);
    let mut cap = Vec::with_capacity(edges.len() * 2);
    let mut adj = vec![Vec::new(); n];
    for &(t, h) in edges {
        adj[t].push(heads.len());
        heads.push(h);
        cap.push(1i32);
        adj[h].push(heads.len());
        heads.push(t);
        cap.push(0i32);
    }
    let mut flow = 0;
    loop {
        let mut prev_arc = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[source] = true;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            if v == sink {
                break;
            }
            for &a in &adj[v] {
                let w = heads[a];
                if cap[a] > 0 && !seen[w] {
                    seen[w] = true;
                    prev_arc[w] = a;
                    queue.push_back(w);
                }
            }
        }
        if !seen[sink] {
            return flow;
        }
        let mut v = sink;
        while v != source {
            let a = prev_arc[v];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
            v = heads[a ^ 1];
        }
        flow += 1;
    }
}
