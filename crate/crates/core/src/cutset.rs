//! DFS cutsets of rooted graphs.
//!
//! The exploration keeps, per node, a list of unconsumed edges `(nbr, node)`
//! built from the node's neighbor list with self-loops dropped. The first
//! edge of the node on top of the stack is inspected; an unnumbered
//! neighbor becomes a tree child, a numbered one yields an inverse edge.
//! The cutset is the deduplicated list of inverse-edge heads, taken from
//! the inverse list in its newest-first order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    root: usize,
    directed: bool,
}

impl RootedGraph {
    /// Builds a graph from `(node, neighbors)` lines in input order.
    ///
    /// Every neighbor must itself appear as a node. Undirected graphs must
    /// list each edge at both endpoints.
    pub fn new<S: AsRef<str>>(root: &str, directed: bool, lines: &[(S, Vec<S>)]) -> Result<Self> {
        let mut names = Vec::with_capacity(lines.len());
        let mut index = HashMap::with_capacity(lines.len());
        for (node, _) in lines {
            let node = node.as_ref();
            if index.insert(node.to_string(), names.len()).is_some() {
                return Err(Error::Graph(format!("node {node:?} listed twice")));
            }
            names.push(node.to_string());
        }
        let mut adjacency = Vec::with_capacity(lines.len());
        for (node, nbrs) in lines {
            let mut list = Vec::with_capacity(nbrs.len());
            for nbr in nbrs {
                let nbr = nbr.as_ref();
                let idx = *index.get(nbr).ok_or_else(|| {
                    Error::Graph(format!("node {:?} has unknown neighbor {nbr:?}", node.as_ref()))
                })?;
                list.push(idx);
            }
            adjacency.push(list);
        }
        let root = *index
            .get(root)
            .ok_or_else(|| Error::Graph(format!("unknown root {root:?}")))?;
        if !directed {
            for (u, nbrs) in adjacency.iter().enumerate() {
                for &v in nbrs {
                    if !adjacency[v].contains(&u) {
                        return Err(Error::Graph(format!(
                            "undirected edge {} - {} is only listed at {}",
                            names[u], names[v], names[u]
                        )));
                    }
                }
            }
        }
        Ok(RootedGraph {
            names,
            index,
            adjacency,
            root,
            directed,
        })
    }

    pub fn root(&self) -> &str {
        &self.names[self.root]
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn neighbors(&self, node: &str) -> Option<impl Iterator<Item = &str>> {
        let idx = *self.index.get(node)?;
        Some(self.adjacency[idx].iter().map(|&j| self.names[j].as_str()))
    }

    /// Nodes reachable from the root, as indices.
    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

impl FromStr for RootedGraph {
    type Err = Error;

    /// Text format: `root <id>`, `directed true|false`, then `<id>: <nbr> ...`
    /// lines. Blank lines and lines starting with `#` are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut root = None;
        let mut directed = None;
        let mut lines: Vec<(&str, Vec<&str>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Graph(format!("line {}: {msg}", lineno + 1));
            if let Some((node, rest)) = line.split_once(':') {
                let node = node.trim();
                if node.is_empty() || node.contains(char::is_whitespace) {
                    return Err(bad("node id must be a single non-empty token"));
                }
                lines.push((node, rest.split_whitespace().collect()));
                continue;
            }
            let mut words = line.split_whitespace();
            match (words.next(), words.next(), words.next()) {
                (Some("root"), Some(id), None) => {
                    if root.replace(id).is_some() {
                        return Err(bad("duplicate root line"));
                    }
                }
                (Some("directed"), Some(flag), None) => {
                    let flag = match flag {
                        "true" => true,
                        "false" => false,
                        _ => return Err(bad("directed must be true or false")),
                    };
                    if directed.replace(flag).is_some() {
                        return Err(bad("duplicate directed line"));
                    }
                }
                _ => return Err(bad("expected `root <id>`, `directed true|false` or `<id>: ...`")),
            }
        }
        let root = root.ok_or_else(|| Error::Graph("missing `root <id>` line".into()))?;
        let directed = directed.ok_or_else(|| Error::Graph("missing `directed true|false` line".into()))?;
        RootedGraph::new(root, directed, &lines)
    }
}

impl fmt::Display for RootedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "root {}", self.root())?;
        writeln!(f, "directed {}", self.directed)?;
        for (name, nbrs) in self.names.iter().zip(&self.adjacency) {
            write!(f, "{name}:")?;
            for &j in nbrs {
                write!(f, " {}", self.names[j])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One step of the exploration, in the order it happened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum DfsEvent {
    Tree { from: String, to: String },
    Inverse { from: String, to: String },
    /// Directed only: arc to a numbered node that is not inverse.
    Skip { from: String, to: String },
    Pop { node: String },
}

/// Per-run exploration state; nothing is stored on the graph itself.
#[derive(Debug, Clone)]
pub struct DfsState {
    /// DFS number: 1 for the root, parent's number + 1 for tree children.
    pub df: Vec<Option<u32>>,
    pub stack: Vec<usize>,
    /// Inverse edges `(head, tail)`, newest first.
    pub inverse: Vec<(usize, usize)>,
    /// Unconsumed edges `(nbr, node)`; `None` until the node is numbered.
    edges: Vec<Option<Vec<(usize, usize)>>>,
    pub events: Vec<DfsEvent>,
}

impl DfsState {
    fn new(g: &RootedGraph) -> Self {
        let mut state = DfsState {
            df: vec![None; g.len()],
            stack: Vec::new(),
            inverse: Vec::new(),
            edges: vec![None; g.len()],
            events: Vec::new(),
        };
        state.df[g.root] = Some(1);
        state.edges[g.root] = Some(edge_list(g, g.root));
        state.stack.push(g.root);
        state
    }

    fn remove(&mut self, at: usize, edge: (usize, usize)) {
        if let Some(list) = self.edges[at].as_mut() {
            list.retain(|e| *e != edge);
        }
    }
}

/// `(nbr, v)` for each neighbor of v other than v itself.
fn edge_list(g: &RootedGraph, v: usize) -> Vec<(usize, usize)> {
    g.adjacency[v].iter().filter(|&&w| w != v).map(|&w| (w, v)).collect()
}

/// Keeps the first occurrence of each element.
fn dedup_stable(items: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutsetResult {
    pub cutset: Vec<String>,
    pub inverse_edges: Vec<[String; 2]>,
    pub df: BTreeMap<String, u32>,
    /// Nodes the exploration never reached.
    pub unreachable: Vec<String>,
    #[serde(skip)]
    pub events: Vec<DfsEvent>,
}

fn run(g: &RootedGraph, strict: bool) -> CutsetResult {
    let mut st = DfsState::new(g);
    let name = |i: usize| g.names[i].clone();
    while let Some(&v) = st.stack.last() {
        let first = st.edges[v].as_ref().and_then(|l| l.first().copied());
        let Some((sv, _)) = first else {
            st.stack.pop();
            st.events.push(DfsEvent::Pop { node: name(v) });
            continue;
        };
        match st.df[sv] {
            None => {
                st.df[sv] = Some(st.df[v].unwrap_or(0) + 1);
                st.edges[sv] = Some(edge_list(g, sv));
                st.remove(v, (sv, v));
                if !g.directed {
                    st.remove(sv, (v, sv));
                }
                st.stack.push(sv);
                st.events.push(DfsEvent::Tree { from: name(v), to: name(sv) });
            }
            Some(df_sv) => {
                let inverse = !g.directed || (st.df[v].unwrap_or(0) > df_sv && v != sv);
                if inverse {
                    st.inverse.insert(0, (sv, v));
                    st.events.push(DfsEvent::Inverse { from: name(v), to: name(sv) });
                } else {
                    st.events.push(DfsEvent::Skip { from: name(v), to: name(sv) });
                }
                st.remove(v, (sv, v));
                if !g.directed {
                    st.remove(sv, (v, sv));
                }
            }
        }
    }

    let mut heads: Vec<usize> = st.inverse.iter().map(|&(h, _)| h).collect();
    if strict {
        // self-loops of explored nodes, in input order
        heads.extend((0..g.len()).filter(|&v| st.df[v].is_some() && g.adjacency[v].contains(&v)));
    }
    let cutset = dedup_stable(heads);
    let unreachable: Vec<String> = (0..g.len()).filter(|&v| st.df[v].is_none()).map(name).collect();
    if !unreachable.is_empty() {
        log::info!("{} node(s) unreachable from root {}: {}", unreachable.len(), g.root(), unreachable.join(" "));
    }
    CutsetResult {
        cutset: cutset.into_iter().map(name).collect(),
        inverse_edges: st.inverse.iter().map(|&(h, t)| [name(h), name(t)]).collect(),
        df: (0..g.len()).filter_map(|v| st.df[v].map(|d| (name(v), d))).collect(),
        unreachable,
        events: st.events,
    }
}

/// Cutset of an undirected rooted graph.
pub fn cutset_undirected(g: &RootedGraph) -> Result<CutsetResult> {
    if g.directed {
        return Err(Error::Graph("cutset_undirected needs an undirected graph".into()));
    }
    Ok(run(g, false))
}

/// Cutset of a directed rooted graph. With `strict`, nodes carrying a
/// self-loop are added as well.
pub fn cutset_directed(g: &RootedGraph, strict: bool) -> Result<CutsetResult> {
    if !g.directed {
        return Err(Error::Graph("cutset_directed needs a directed graph".into()));
    }
    Ok(run(g, strict))
}

/// Dispatches on the graph's kind. `strict` also cuts self-loops of
/// undirected graphs.
pub fn cutset(g: &RootedGraph, strict: bool) -> CutsetResult {
    run(g, strict)
}

/// Reachable subgraph with `removed` nodes deleted: node indices and edges.
fn residual(g: &RootedGraph, removed: &[String]) -> (Vec<bool>, Vec<(usize, usize)>) {
    let mut keep = g.reachable();
    for r in removed {
        if let Some(&i) = g.index.get(r) {
            keep[i] = false;
        }
    }
    let mut edges = Vec::new();
    for (u, nbrs) in g.adjacency.iter().enumerate() {
        if keep[u] {
            edges.extend(nbrs.iter().filter(|&&v| keep[v]).map(|&v| (u, v)));
        }
    }
    (keep, edges)
}

/// True when the root-reachable part of `g` minus `removed` has no cycle.
/// Self-loops count as cycles only when `count_self_loops` is set.
pub fn is_acyclic_after_removal(g: &RootedGraph, removed: &[String], count_self_loops: bool) -> bool {
    let (keep, edges) = residual(g, removed);
    if count_self_loops && edges.iter().any(|&(u, v)| u == v) {
        return false;
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().filter(|&(u, v)| u != v).collect();
    if g.directed {
        // Kahn's algorithm
        let mut indeg = vec![0usize; g.len()];
        let mut out = vec![Vec::new(); g.len()];
        for &(u, v) in &edges {
            indeg[v] += 1;
            out[u].push(v);
        }
        let mut queue: Vec<usize> = (0..g.len()).filter(|&v| keep[v] && indeg[v] == 0).collect();
        let mut done = 0;
        while let Some(u) = queue.pop() {
            done += 1;
            for &v in &out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v);
                }
            }
        }
        done == keep.iter().filter(|&&k| k).count()
    } else {
        // forest test with union-find on the undirected simple edge set
        let mut parent: Vec<usize> = (0..g.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut simple: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        simple.sort_unstable();
        simple.dedup();
        for (u, v) in simple {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(text: &str) -> RootedGraph {
        text.parse().unwrap()
    }

    #[test]
    fn path_has_empty_cutset() {
        let g = graph("root a\ndirected false\na: b\nb: a c\nc: b\n");
        let r = cutset_undirected(&g).unwrap();
        assert!(r.cutset.is_empty());
        assert_eq!(r.df, BTreeMap::from([("a".into(), 1), ("b".into(), 2), ("c".into(), 3)]));
    }

    #[test]
    fn triangle_trace() {
        let g = graph("root a\ndirected false\na: b c\nb: a c\nc: a b\n");
        let r = cutset_undirected(&g).unwrap();
        assert_eq!(r.cutset, vec!["a"]);
        assert_eq!(r.inverse_edges, vec![["a".to_string(), "c".to_string()]]);
        assert_eq!(r.df["c"], 3);
        assert!(is_acyclic_after_removal(&g, &r.cutset, true));
        assert!(!is_acyclic_after_removal(&g, &[], true));
    }

    #[test]
    fn bowtie_cut_is_small() {
        let g = graph("root a\ndirected false\na: b c d e\nb: a c\nc: a b\nd: a e\ne: a d\n");
        let r = cutset_undirected(&g).unwrap();
        assert!(r.cutset.len() <= 2, "{:?}", r.cutset);
        assert!(is_acyclic_after_removal(&g, &r.cutset, true));
    }

    #[test]
    fn directed_three_cycle() {
        let g = graph("root a\ndirected true\na: b\nb: c\nc: a\n");
        let r = cutset_directed(&g, false).unwrap();
        assert_eq!(r.cutset, vec!["a"]);
        assert_eq!((r.df["a"], r.df["b"], r.df["c"]), (1, 2, 3));
        assert!(is_acyclic_after_removal(&g, &r.cutset, true));
    }

    #[test]
    fn directed_self_loop_modes() {
        let g = graph("root a\ndirected true\na: a b\nb:\n");
        assert!(cutset_directed(&g, false).unwrap().cutset.is_empty());
        assert_eq!(cutset_directed(&g, true).unwrap().cutset, vec!["a"]);
    }

    #[test]
    fn dag_diamond_is_empty() {
        let g = graph("root a\ndirected true\na: b c\nb: d\nc: d\nd:\n");
        let r = cutset_directed(&g, false).unwrap();
        assert!(r.cutset.is_empty());
        assert_eq!(r.events.iter().filter(|e| matches!(e, DfsEvent::Skip { .. })).count(), 1);
    }

    // The df test only compares depths, so a cross arc from a deep node into
    // a finished shallower one is collected even though no cycle passes it.
    #[test]
    fn dag_cross_arc_to_shallower_node_is_cut() {
        let g = graph("root a\ndirected true\na: b c\nb:\nc: d\nd: b\n");
        let r = cutset_directed(&g, false).unwrap();
        assert_eq!((r.df["b"], r.df["d"]), (2, 3));
        assert_eq!(r.cutset, vec!["b"]);
        assert!(is_acyclic_after_removal(&g, &[], true));
    }

    #[test]
    fn unreachable_nodes_are_reported() {
        let g = graph("root a\ndirected true\na: b\nb:\nc: a\n");
        let r = cutset_directed(&g, false).unwrap();
        assert_eq!(r.unreachable, vec!["c"]);
        assert!(!r.df.contains_key("c"));
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "directed false\na: b\nb: a\n",
            "root a\na:\n",
            "root z\ndirected true\na:\n",
            "root a\ndirected true\na: q\n",
            "root a\ndirected false\na: b\nb:\n",
            "root a\ndirected maybe\na:\n",
            "root a\ndirected true\na:\na:\n",
            "root a\ndirected true\nhello world\n",
        ] {
            assert!(bad.parse::<RootedGraph>().is_err(), "{bad:?}");
        }
        let g = graph("# comment\n\nroot a\ndirected true\na: b\nb:\n");
        assert_eq!(g.to_string().parse::<RootedGraph>().unwrap(), g);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let g = graph("root a\ndirected true\na:\n");
        assert!(cutset_undirected(&g).is_err());
        let g = graph("root a\ndirected false\na:\n");
        assert!(cutset_directed(&g, false).is_err());
    }

    fn arb_graph(directed: bool) -> impl Strategy<Value = RootedGraph> {
        (1usize..12).prop_flat_map(move |n| {
            proptest::collection::vec(proptest::collection::vec(0..n, 0..4), n).prop_map(move |raw| {
                let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
                for (u, nbrs) in raw.iter().enumerate() {
                    for &v in nbrs {
                        if directed {
                            if !adj[u].contains(&v) {
                                adj[u].push(v);
                            }
                        } else if u != v && !adj[u].contains(&v) {
                            adj[u].push(v);
                            adj[v].push(u);
                        }
                    }
                }
                let lines: Vec<(String, Vec<String>)> = adj
                    .iter()
                    .enumerate()
                    .map(|(u, nbrs)| (format!("n{u}"), nbrs.iter().map(|v| format!("n{v}")).collect()))
                    .collect();
                RootedGraph::new("n0", directed, &lines).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn undirected_soundness(g in arb_graph(false)) {
            let r = cutset_undirected(&g).unwrap();
            prop_assert!(is_acyclic_after_removal(&g, &r.cutset, true));
            prop_assert!(r.cutset.iter().all(|c| r.df.contains_key(c)));
        }

        #[test]
        fn directed_soundness(g in arb_graph(true)) {
            let faithful = cutset_directed(&g, false).unwrap();
            prop_assert!(is_acyclic_after_removal(&g, &faithful.cutset, false));
            let strict = cutset_directed(&g, true).unwrap();
            prop_assert!(is_acyclic_after_removal(&g, &strict.cutset, true));
        }

        #[test]
        fn runs_are_deterministic(g in arb_graph(true)) {
            let a = cutset(&g, false);
            let b = cutset(&g, false);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.events, b.events);
        }
    }
}
