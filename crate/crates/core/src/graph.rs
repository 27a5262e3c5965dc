//! Finite undirected multigraphs with loops and parallel edges.
//!
//! Vertices are dense indices `0..n`. The edge multiset is stored as a sorted
//! list of normalized pairs `(u, v)` with `u <= v`, so two graphs with the same
//! vertex count and the same edge multiset compare equal regardless of the
//! order edges were supplied in.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    // Derived from `edges`; loops are kept out of the neighbor lists.
    neighbors: Vec<Vec<(VertexId, u32)>>,
    loops: Vec<u32>,
}

impl Multigraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EndpointOutOfRange { u, v, n });
            }
            normalized.push(if u <= v { (u, v) } else { (v, u) });
        }
        normalized.sort_unstable();

        let mut loops = vec![0u32; n];
        let mut mult: Vec<BTreeMap<VertexId, u32>> = vec![BTreeMap::new(); n];
        for &(u, v) in &normalized {
            if u == v {
                loops[u] += 1;
            } else {
                *mult[u].entry(v).or_default() += 1;
                *mult[v].entry(u).or_default() += 1;
            }
        }
        let neighbors = mult.into_iter().map(|m| m.into_iter().collect()).collect();
        Ok(Multigraph { n, edges: normalized, neighbors, loops })
    }

    /// The graph with one vertex and no edges.
    pub fn single_vertex() -> Self {
        Multigraph::new(1, []).expect("valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edge multiset as normalized `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Distinct non-loop neighbors of `v` with edge multiplicities.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, u32)] {
        &self.neighbors[v]
    }

    pub fn loops_at(&self, v: VertexId) -> u32 {
        self.loops[v]
    }

    pub fn num_loops(&self) -> usize {
        self.loops.iter().map(|&l| l as usize).sum()
    }

    pub fn has_loops(&self) -> bool {
        self.loops.iter().any(|&l| l > 0)
    }

    /// Number of edges joining `u` and `v` (loops at `u` when `u == v`).
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        if u == v {
            return self.loops[u];
        }
        self.neighbors[u].binary_search_by_key(&v, |&(w, _)| w).map(|i| self.neighbors[u][i].1).unwrap_or(0)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { v, n: self.n })
        }
    }

    /// Number of edge endpoints at `v`; a loop contributes 2.
    pub fn degree(&self, v: VertexId) -> u32 {
        self.neighbors[v].iter().map(|&(_, m)| m).sum::<u32>() + 2 * self.loops[v]
    }

    /// Degree ignoring loops: the number of chips that leave `v` when it fires.
    pub fn valence(&self, v: VertexId) -> u32 {
        self.neighbors[v].iter().map(|&(_, m)| m).sum()
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        self.bfs_order(0).len() == self.n
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Breadth-first order of the component of `start`, neighbors visited by index.
    pub fn bfs_order(&self, start: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(u, _) in &self.neighbors[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        order
    }

    /// Breadth-first distances from `start`; `None` for unreachable vertices.
    pub fn distances(&self, start: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[start] = Some(0);
        for v in self.bfs_order(start) {
            let d = dist[v].expect("visited in bfs order");
            for &(u, _) in &self.neighbors[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                }
            }
        }
        dist
    }

    /// First Betti number `|E| - |V| + 1`; loops count as edges.
    pub fn genus(&self) -> Result<usize> {
        self.require_connected()?;
        Ok(self.edges.len() + 1 - self.n)
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loops() && self.neighbors.iter().flatten().all(|&(_, m)| m == 1)
    }

    /// True iff every vertex has degree 3 or a degree listed in `allowed_exceptions`.
    pub fn is_trivalent(&self, allowed_exceptions: &BTreeSet<u32>) -> bool {
        (0..self.n).all(|v| {
            let d = self.degree(v);
            d == 3 || allowed_exceptions.contains(&d)
        })
    }

    pub fn strip_loops(&self) -> Multigraph {
        Multigraph::new(self.n, self.edges.iter().copied().filter(|&(u, v)| u != v)).expect("valid")
    }

    /// Replaces each loop at `v` by a new vertex `w` joined to `v` by two
    /// parallel edges. New vertices are appended in the order the loops appear
    /// in the sorted edge list; original vertex indices are unchanged.
    pub fn subdivide_loops(&self) -> Multigraph {
        let mut n = self.n;
        let mut edges = Vec::with_capacity(self.edges.len() + self.num_loops());
        for &(u, v) in &self.edges {
            if u == v {
                edges.push((u, n));
                edges.push((u, n));
                n += 1;
            } else {
                edges.push((u, v));
            }
        }
        Multigraph::new(n, edges).expect("valid")
    }

    /// Same graph with vertices renamed by `perm` (vertex `v` becomes `perm[v]`).
    pub fn relabel(&self, perm: &[VertexId]) -> Result<Multigraph> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: perm.len() });
        }
        Multigraph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    pub fn with_edges(&self, extra: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Multigraph> {
        Multigraph::new(self.n, self.edges.iter().copied().chain(extra))
    }

    /// Removes one copy of the edge `(u, v)`, if present.
    pub fn without_edge(&self, u: VertexId, v: VertexId) -> Option<Multigraph> {
        let key = if u <= v { (u, v) } else { (v, u) };
        let pos = self.edges.iter().position(|&e| e == key)?;
        let mut edges = self.edges.clone();
        edges.remove(pos);
        Some(Multigraph::new(self.n, edges).expect("valid"))
    }

    /// Adds `k` isolated vertices at the end.
    pub fn with_extra_vertices(&self, k: usize) -> Multigraph {
        Multigraph::new(self.n + k, self.edges.iter().copied()).expect("valid")
    }

    /// Subgraph induced on `keep`, with vertices renumbered in the order given.
    pub fn induced(&self, keep: &[VertexId]) -> Multigraph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Multigraph::new(keep.len(), edges).expect("valid")
    }

    /// Vertices reachable from `start` without using vertex `blocked`.
    pub fn component_avoiding(&self, start: VertexId, blocked: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.n];
        seen[blocked] = true;
        seen[start] = true;
        let mut stack = vec![start];
        let mut out = vec![];
        while let Some(v) = stack.pop() {
            out.push(v);
            for &(u, _) in &self.neighbors[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Graphviz rendering: one statement per edge copy, loops as self-edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile { num_vertices: self.n, edges: self.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Multigraph> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_graph()
    }
}

/// On-disk graph document: `{"num_vertices": n, "edges": [[u, v], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub num_vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<Multigraph> {
        Multigraph::new(self.num_vertices, self.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

/// Disjoint union; the second graph's vertices are shifted by `g1.num_vertices()`.
pub fn disjoint_union(g1: &Multigraph, g2: &Multigraph) -> Multigraph {
    let off = g1.n;
    Multigraph::new(g1.n + g2.n, g1.edges.iter().copied().chain(g2.edges.iter().map(|&(u, v)| (u + off, v + off))))
        .expect("valid")
}

/// Fuses `v2` of `g2` into `v1` of `g1`. Returns the graph and the new index of
/// every vertex of `g2`; `g1` keeps its indices and the other vertices of `g2`
/// follow in their original order.
pub fn attach_identify_mapped(
    g1: &Multigraph,
    v1: VertexId,
    g2: &Multigraph,
    v2: VertexId,
) -> Result<(Multigraph, Vec<VertexId>)> {
    g1.check_vertex(v1)?;
    g2.check_vertex(v2)?;
    let mut map = Vec::with_capacity(g2.n);
    let mut next = g1.n;
    for w in 0..g2.n {
        if w == v2 {
            map.push(v1);
        } else {
            map.push(next);
            next += 1;
        }
    }
    let g = Multigraph::new(next, g1.edges.iter().copied().chain(g2.edges.iter().map(|&(u, v)| (map[u], map[v]))))?;
    Ok((g, map))
}

pub fn attach_identify(g1: &Multigraph, v1: VertexId, g2: &Multigraph, v2: VertexId) -> Result<Multigraph> {
    attach_identify_mapped(g1, v1, g2, v2).map(|(g, _)| g)
}

/// Disjoint union plus a bridge from `v1` to `v2`. Vertices of `g2` are shifted
/// by `g1.num_vertices()`.
pub fn attach_edge(g1: &Multigraph, v1: VertexId, g2: &Multigraph, v2: VertexId) -> Result<Multigraph> {
    g1.check_vertex(v1)?;
    g2.check_vertex(v2)?;
    disjoint_union(g1, g2).with_edges([(v1, g1.n + v2)])
}

/// Offsets of each piece inside a joined graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Joined {
    pub graph: Multigraph,
    /// Index of the core vertex each piece hangs from.
    pub hubs: Vec<VertexId>,
    /// Vertex offset of each piece.
    pub offsets: Vec<usize>,
}

fn append_pieces(core: Multigraph, hubs: Vec<VertexId>, pieces: &[(Multigraph, VertexId)]) -> Result<Joined> {
    let mut graph = core;
    let mut offsets = Vec::with_capacity(pieces.len());
    for (i, (piece, mark)) in pieces.iter().enumerate() {
        piece.check_vertex(*mark)?;
        offsets.push(graph.n);
        graph = attach_edge(&graph, hubs[i], piece, *mark)?;
    }
    Ok(Joined { graph, hubs, offsets })
}

/// Builds a cycle of length `cycle_len` on vertices `0..cycle_len` and joins
/// piece `i`'s marked vertex to cycle vertex `i` by an edge.
pub fn cycle_join(pieces: &[(Multigraph, VertexId)], cycle_len: usize) -> Result<Joined> {
    if cycle_len < 3 {
        return Err(Error::InvalidParameter(format!("cycle length {cycle_len} < 3")));
    }
    if cycle_len != pieces.len() {
        return Err(Error::InvalidParameter(format!(
            "cycle length {cycle_len} differs from piece count {}",
            pieces.len()
        )));
    }
    let core = Multigraph::new(cycle_len, (0..cycle_len).map(|i| (i, (i + 1) % cycle_len)))?;
    append_pieces(core, (0..cycle_len).collect(), pieces)
}

/// A new central vertex 0 joined by one edge to each piece's marked vertex.
pub fn star_join(pieces: &[(Multigraph, VertexId)]) -> Result<Joined> {
    append_pieces(Multigraph::single_vertex(), vec![0; pieces.len()], pieces)
}

/// Attaches pieces by edges to prescribed vertices of an arbitrary core graph.
pub fn core_join(core: &Multigraph, hubs: &[VertexId], pieces: &[(Multigraph, VertexId)]) -> Result<Joined> {
    if hubs.len() != pieces.len() {
        return Err(Error::InvalidParameter("one hub per piece required".into()));
    }
    for &h in hubs {
        core.check_vertex(h)?;
    }
    append_pieces(core.clone(), hubs.to_vec(), pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_vertex_example() -> Multigraph {
        Multigraph::new(4, [(0, 1), (1, 3), (0, 3), (2, 3), (1, 2)]).unwrap()
    }

    #[test]
    fn construction_and_equality() {
        let g = four_vertex_example();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 5);
        let h = Multigraph::new(4, [(1, 2), (3, 2), (3, 0), (3, 1), (1, 0)]).unwrap();
        assert_eq!(g, h);
        assert!(matches!(Multigraph::new(2, [(0, 2)]), Err(Error::EndpointOutOfRange { u: 0, v: 2, n: 2 })));
        let single = Multigraph::new(1, []).unwrap();
        assert_eq!(single.num_edges(), 0);
        assert_eq!(single.genus().unwrap(), 0);
    }

    #[test]
    fn banana_keeps_parallel_edges() {
        let g = Multigraph::new(2, [(0, 1), (0, 1)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.multiplicity(0, 1), 2);
        assert!(!g.is_simple());
    }

    #[test]
    fn degrees_and_genus() {
        let g = four_vertex_example();
        assert_eq!(g.degrees(), vec![2, 3, 2, 3]);
        assert_eq!(g.genus().unwrap(), 2);
        let looped = Multigraph::new(1, [(0, 0)]).unwrap();
        assert_eq!(looped.degree(0), 2);
        assert_eq!(looped.valence(0), 0);
        assert_eq!(looped.genus().unwrap(), 1);
        let split = Multigraph::new(3, [(0, 1)]).unwrap();
        assert_eq!(split.genus(), Err(Error::Disconnected));
    }

    #[test]
    fn subdivision_of_single_loop() {
        let looped = Multigraph::new(1, [(0, 0)]).unwrap();
        let sub = looped.subdivide_loops();
        assert_eq!(sub, Multigraph::new(2, [(0, 1), (0, 1)]).unwrap());
        assert_eq!(four_vertex_example().subdivide_loops(), four_vertex_example());
        assert_eq!(looped.strip_loops(), Multigraph::single_vertex());
    }

    #[test]
    fn attach_combinators() {
        let v = Multigraph::single_vertex();
        let path = attach_edge(&v, 0, &v, 0).unwrap();
        assert_eq!(path, Multigraph::new(2, [(0, 1)]).unwrap());
        let tri = Multigraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(attach_identify(&tri, 1, &v, 0).unwrap(), tri);
        assert!(attach_identify(&tri, 3, &v, 0).is_err());
        assert!(cycle_join(&[(v.clone(), 0), (v.clone(), 0)], 2).is_err());
        assert!(cycle_join(&[(v.clone(), 0), (v.clone(), 0), (v.clone(), 0)], 4).is_err());
        let star = star_join(&[(v.clone(), 0), (v.clone(), 0), (v.clone(), 0)]).unwrap();
        assert_eq!(star.graph.degrees(), vec![3, 1, 1, 1]);
    }

    #[test]
    fn json_and_dot() {
        let g = Multigraph::new(3, [(0, 1), (0, 1), (2, 2), (1, 2)]).unwrap();
        let back = Multigraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let dot = g.to_dot();
        assert_eq!(dot.matches("--").count(), 4);
        assert!(dot.contains("2 -- 2;"));
        assert!(Multigraph::from_json("{\"num_vertices\": 2, \"edges\": [[0, 5]]}").is_err());
        assert!(Multigraph::from_json("not json").is_err());
    }
}
