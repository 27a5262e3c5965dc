//! Generators for the trivalent graph families: the trees `T_n`, the loopful
//! graphs `C_g`, the loop-free multigraphs `C'_g`, the loop of loops, pinched
//! pieces and the trees of pinched pieces `A_m`/`B_m`, named small graphs, and
//! joins of pieces along small shapes.
//!
//! Every generator documents its labelling through `marks`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexId};
use crate::symmetry::are_isomorphic_rooted;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Multigraph,
    pub marks: BTreeMap<String, Vec<VertexId>>,
    pub flags: Vec<String>,
}

#[derive(Serialize)]
struct MarksDocument<'a> {
    marks: &'a BTreeMap<String, Vec<VertexId>>,
    flags: &'a [String],
}

impl LabeledGraph {
    pub fn unmarked(graph: Multigraph) -> Self {
        LabeledGraph { graph, marks: BTreeMap::new(), flags: Vec::new() }
    }

    /// Vertices carrying `label`; empty when the label is absent.
    pub fn mark(&self, label: &str) -> &[VertexId] {
        self.marks.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn genus(&self) -> Result<usize> {
        self.graph.genus()
    }

    /// `{"marks": {...}, "flags": [...]}`.
    pub fn marks_json(&self) -> String {
        serde_json::to_string_pretty(&MarksDocument { marks: &self.marks, flags: &self.flags }).expect("serializable")
    }
}

/// Mutable edge list used while assembling a family member.
#[derive(Debug, Clone, Default)]
struct Draft {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl Draft {
    fn from_graph(g: &Multigraph) -> Self {
        Draft { n: g.num_vertices(), edges: g.edges().to_vec() }
    }

    fn vertex(&mut self) -> VertexId {
        self.n += 1;
        self.n - 1
    }

    fn edge(&mut self, u: VertexId, v: VertexId) {
        self.edges.push((u, v));
    }

    fn remove_edge(&mut self, u: VertexId, v: VertexId) {
        let pos = self.edges.iter().position(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)).expect("edge present");
        self.edges.swap_remove(pos);
    }

    /// Non-loop neighbours of `v`, one entry per edge, sorted.
    fn incident(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, false) => Some(b),
                (false, true) => Some(a),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn reattach(&mut self, v: VertexId, other: VertexId, to: VertexId) {
        self.remove_edge(v, other);
        self.edge(to, other);
    }

    /// Appends `g`, fusing its vertex `at_g` with `at`. Returns the new index of every vertex of `g`.
    fn graft(&mut self, g: &Multigraph, at_g: VertexId, at: VertexId) -> Vec<VertexId> {
        let map: Vec<VertexId> = (0..g.num_vertices()).map(|w| if w == at_g { at } else { self.vertex() }).collect();
        for &(a, b) in g.edges() {
            self.edge(map[a], map[b]);
        }
        map
    }

    /// Appends `g` as a separate block; returns its vertex offset.
    fn append(&mut self, g: &Multigraph) -> usize {
        let off = self.n;
        self.n += g.num_vertices();
        for &(a, b) in g.edges() {
            self.edge(a + off, b + off);
        }
        off
    }

    /// Replaces trivalent `v` by a triangle `[v, t1, t2]`; its second and
    /// third edges move to `t1` and `t2`.
    fn expand_to_triangle(&mut self, v: VertexId) -> [VertexId; 3] {
        let around = self.incident(v);
        assert_eq!(around.len(), 3, "expansion needs three incident edges");
        let (t1, t2) = (self.vertex(), self.vertex());
        self.reattach(v, around[1], t1);
        self.reattach(v, around[2], t2);
        self.edge(v, t1);
        self.edge(t1, t2);
        self.edge(t2, v);
        [v, t1, t2]
    }

    /// Replaces trivalent `v` by a `K_{2,3}` whose bivalent side `[v, b1, b2]`
    /// takes over the three edges. Returns (bivalent, trivalent).
    fn expand_to_k23(&mut self, v: VertexId) -> ([VertexId; 3], [VertexId; 2]) {
        let around = self.incident(v);
        assert_eq!(around.len(), 3, "expansion needs three incident edges");
        let (b1, b2) = (self.vertex(), self.vertex());
        let (w0, w1) = (self.vertex(), self.vertex());
        self.reattach(v, around[1], b1);
        self.reattach(v, around[2], b2);
        for b in [v, b1, b2] {
            self.edge(b, w0);
            self.edge(b, w1);
        }
        ([v, b1, b2], [w0, w1])
    }

    /// Replaces `u - w` by `u - a = b - w` with `a = b` doubled.
    fn insert_double_edge(&mut self, u: VertexId, w: VertexId) -> [VertexId; 2] {
        self.remove_edge(u, w);
        let (a, b) = (self.vertex(), self.vertex());
        self.edge(u, a);
        self.edge(a, b);
        self.edge(a, b);
        self.edge(b, w);
        [a, b]
    }

    fn add_cone(&mut self, v: VertexId) {
        let (b, c) = (self.vertex(), self.vertex());
        self.edge(v, b);
        self.edge(v, c);
        self.edge(b, c);
        self.edge(b, c);
    }

    fn finish(self) -> Multigraph {
        Multigraph::new(self.n, self.edges).expect("generator produced valid endpoints")
    }
}

/// How the tree construction terminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ending {
    Point(VertexId),
    Edge(VertexId, VertexId),
    Star { hub: VertexId, branches: [VertexId; 3] },
    Root(VertexId),
}

struct Tree {
    graph: Multigraph,
    leaves: Vec<VertexId>,
    ending: Ending,
}

/// Level-by-level pairing. Leaves are `0..n`, internal vertices follow in
/// creation order. Two unpaired vertices are joined by an edge, three by a
/// new hub, and an odd vertex left over on one level pairs with an earlier
/// leftover under a new vertex on the next level.
fn build_tree(n: usize) -> Result<Tree> {
    if n == 0 {
        return Err(Error::InvalidParameter("a tree needs at least one leaf".into()));
    }
    let mut d = Draft { n, edges: Vec::new() };
    let leaves: Vec<VertexId> = (0..n).collect();
    if n == 1 {
        return Ok(Tree { graph: d.finish(), leaves, ending: Ending::Point(0) });
    }
    let mut level = leaves.clone();
    let mut older: Option<VertexId> = None;
    let ending = loop {
        let mut unpaired = level.clone();
        unpaired.extend(older);
        match unpaired.len() {
            2 => {
                d.edge(unpaired[0], unpaired[1]);
                break Ending::Edge(unpaired[0], unpaired[1]);
            }
            3 => {
                let hub = d.vertex();
                for &x in &unpaired {
                    d.edge(hub, x);
                }
                break Ending::Star { hub, branches: [unpaired[0], unpaired[1], unpaired[2]] };
            }
            _ => {}
        }
        let mut next = Vec::with_capacity(level.len() / 2 + 1);
        for pair in level.chunks_exact(2) {
            let p = d.vertex();
            d.edge(p, pair[0]);
            d.edge(p, pair[1]);
            next.push(p);
        }
        if level.len() % 2 == 1 {
            let x = *level.last().expect("non-empty level");
            match older.take() {
                Some(o) => {
                    let p = d.vertex();
                    d.edge(p, o);
                    d.edge(p, x);
                    next.push(p);
                }
                None => older = Some(x),
            }
        }
        level = next;
    };
    Ok(Tree { graph: d.finish(), leaves, ending })
}

/// Full binary tree over `n = 2^k` leaves with a bivalent root (the leaf itself when `n = 1`).
fn build_rooted_tree(n: usize) -> Result<Tree> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("rooted tree needs a power of two leaves, got {n}")));
    }
    let mut d = Draft { n, edges: Vec::new() };
    let leaves: Vec<VertexId> = (0..n).collect();
    let mut level = leaves.clone();
    while level.len() > 1 {
        level = level
            .chunks_exact(2)
            .map(|pair| {
                let p = d.vertex();
                d.edge(p, pair[0]);
                d.edge(p, pair[1]);
                p
            })
            .collect();
    }
    Ok(Tree { graph: d.finish(), leaves, ending: Ending::Root(level[0]) })
}

/// The tree `T_n`. Unrooted trees are trivalent away from their `n` leaves;
/// rooted trees (n a power of two) have a single bivalent root.
/// Marks: "leaves", plus "root", "star-center" or "final-edge" by how the
/// construction ended.
pub fn tree_t(n: usize, rooted: bool) -> Result<LabeledGraph> {
    let tree = if rooted { build_rooted_tree(n)? } else { build_tree(n)? };
    let mut out = LabeledGraph::unmarked(tree.graph);
    out.marks.insert("leaves".into(), tree.leaves);
    match tree.ending {
        Ending::Point(v) | Ending::Root(v) if rooted => {
            out.marks.insert("root".into(), vec![v]);
        }
        Ending::Edge(a, b) => {
            out.marks.insert("final-edge".into(), vec![a, b]);
        }
        Ending::Star { hub, .. } => {
            out.marks.insert("star-center".into(), vec![hub]);
        }
        _ => {}
    }
    Ok(out)
}

/// `Some(m)` with `m > 0` when `g = 3 * 2^m`.
fn three_times_power(g: usize) -> Option<u32> {
    (g.is_multiple_of(3) && g >= 6 && (g / 3).is_power_of_two()).then(|| (g / 3).trailing_zeros())
}

/// `Some((m, p))` when `g = 3(2^m + 2^p)` with `m > p`.
fn three_times_two_powers(g: usize) -> Option<(u32, u32)> {
    if !g.is_multiple_of(3) || g == 0 {
        return None;
    }
    let h = g / 3;
    (h.count_ones() == 2).then(|| (usize::BITS - 1 - h.leading_zeros(), h.trailing_zeros()))
}

fn require_genus(g: usize) -> Result<()> {
    if g < 3 {
        Err(Error::InvalidParameter(format!("genus {g} < 3")))
    } else {
        Ok(())
    }
}

/// Path `b1 - b2 - b3` with a rooted tree on `2^big` leaves grafted at `b1`
/// and one on `2^small` leaves at `b3`. Returns (`b2`, leaves).
fn line_piece(d: &mut Draft, big: u32, small: u32) -> Result<(VertexId, Vec<VertexId>)> {
    let (b1, b2, b3) = (d.vertex(), d.vertex(), d.vertex());
    d.edge(b1, b2);
    d.edge(b2, b3);
    let mut leaves = Vec::new();
    for (end, k) in [(b1, big), (b3, small)] {
        let t = build_rooted_tree(1 << k)?;
        let Ending::Root(r) = t.ending else { unreachable!("rooted build ends at a root") };
        let map = t.graft_into(d, r, end);
        leaves.extend(t.leaves.iter().map(|&l| map[l]));
    }
    Ok((b2, leaves))
}

impl Tree {
    fn graft_into(&self, d: &mut Draft, at_tree: VertexId, at: VertexId) -> Vec<VertexId> {
        d.graft(&self.graph, at_tree, at)
    }
}

/// Centre plus three line pieces. Returns (draft, centre, leaves).
fn three_line_pieces(big: u32, small: u32) -> Result<(Draft, VertexId, Vec<VertexId>)> {
    let mut d = Draft { n: 1, edges: Vec::new() };
    let mut leaves = Vec::new();
    for _ in 0..3 {
        let (b2, l) = line_piece(&mut d, big, small)?;
        d.edge(0, b2);
        leaves.extend(l);
    }
    Ok((d, 0, leaves))
}

/// The loopful graph `C_g`: loops on the leaves of a tree, with a central
/// triangle when `g = 3*2^m + 1` and three line pieces on a star when
/// `g = 3(2^m + 2^p)`, `m > p + 1`. The form `3(2^m + 2^{m-1})` falls back to
/// loops on `T_g` and is flagged "gap-case".
/// Marks: "leaves" (loop carriers), "central-triangle", "star-center".
pub fn graph_c(g: usize) -> Result<LabeledGraph> {
    require_genus(g)?;
    let mut marks = BTreeMap::new();
    let mut flags = Vec::new();
    let (mut d, leaves) = if three_times_power(g - 1).is_some() {
        let tree = build_tree(g - 1)?;
        let Ending::Star { hub, .. } = tree.ending else { unreachable!("T_{{3*2^m}} ends with a star") };
        let mut d = Draft::from_graph(&tree.graph);
        let tri = d.expand_to_triangle(hub);
        marks.insert("central-triangle".to_string(), tri.to_vec());
        (d, tree.leaves)
    } else if let Some((m, p)) = three_times_two_powers(g).filter(|&(m, p)| m > p + 1) {
        let (d, center, leaves) = three_line_pieces(m, p)?;
        marks.insert("star-center".to_string(), vec![center]);
        (d, leaves)
    } else {
        if matches!(three_times_two_powers(g), Some((m, p)) if m == p + 1) {
            flags.push("gap-case".to_string());
        }
        let tree = build_tree(g)?;
        if let Ending::Star { hub, .. } = tree.ending {
            marks.insert("star-center".to_string(), vec![hub]);
        }
        (Draft::from_graph(&tree.graph), tree.leaves)
    };
    for &l in &leaves {
        d.edge(l, l);
    }
    marks.insert("leaves".to_string(), leaves);
    Ok(LabeledGraph { graph: d.finish(), marks, flags })
}

fn cone_all(d: &mut Draft, apexes: &[VertexId]) {
    for &v in apexes {
        d.add_cone(v);
    }
}

/// `T_{g/2}` for `g = 3*2^m` with cones on the leaves. Returns (draft, centre, apexes).
fn coned_three_star(g: usize) -> Result<(Draft, VertexId, Vec<VertexId>)> {
    let tree = build_tree(g / 2)?;
    let Ending::Star { hub, .. } = tree.ending else { unreachable!("T_{{3*2^m}} ends with a star") };
    let mut d = Draft::from_graph(&tree.graph);
    cone_all(&mut d, &tree.leaves);
    Ok((d, hub, tree.leaves))
}

/// `Some(m)` with `m > 0` when `g = 3*2^m + c`.
fn three_power_plus(g: usize, c: usize) -> Option<u32> {
    g.checked_sub(c).and_then(three_times_power)
}

/// `(m, p)` with `p > 0`, `m > p + 1` when `g = 3(2^m + 2^p) + extra`.
fn wide_line_form(g: usize, extra: usize) -> Option<(u32, u32)> {
    g.checked_sub(extra).and_then(three_times_two_powers).filter(|&(m, p)| p > 0 && m > p + 1)
}

fn double_star_edges(d: &mut Draft, center: VertexId) -> Vec<VertexId> {
    let mut added = Vec::new();
    for w in d.incident(center) {
        added.extend(d.insert_double_edge(center, w));
    }
    added
}

/// The loop-free multigraph `C'_g`. Cones sit on tree leaves, their apex being
/// the attachment vertex. Genus 3 is the tetrahedron.
/// Marks: "cone-apex", and where present "star-center", "central-triangle",
/// "k23-bivalent", "k23-trivalent", "double-edges".
pub fn graph_c_prime(g: usize) -> Result<LabeledGraph> {
    require_genus(g)?;
    if g == 3 {
        return Ok(named(NamedGraph::Tetrahedron));
    }
    let mut marks: BTreeMap<String, Vec<VertexId>> = BTreeMap::new();
    let mut flags = Vec::new();
    let (d, apexes) = if three_times_power(g).is_some() {
        let (d, hub, apexes) = coned_three_star(g)?;
        marks.insert("star-center".into(), vec![hub]);
        (d, apexes)
    } else if three_power_plus(g, 1).is_some() {
        let (mut d, hub, apexes) = coned_three_star(g - 1)?;
        marks.insert("central-triangle".into(), d.expand_to_triangle(hub).to_vec());
        (d, apexes)
    } else if three_power_plus(g, 2).is_some() {
        let (mut d, hub, apexes) = coned_three_star(g - 2)?;
        let (bi, tri) = d.expand_to_k23(hub);
        marks.insert("k23-bivalent".into(), bi.to_vec());
        marks.insert("k23-trivalent".into(), tri.to_vec());
        (d, apexes)
    } else if three_power_plus(g, 3).filter(|&m| m > 1).is_some() {
        let (mut d, hub, apexes) = coned_three_star(g - 3)?;
        marks.insert("star-center".into(), vec![hub]);
        marks.insert("double-edges".into(), double_star_edges(&mut d, hub));
        (d, apexes)
    } else if let Some((m, p)) = wide_line_form(g, 0) {
        let (mut d, hub, apexes) = three_line_pieces(m - 1, p - 1)?;
        cone_all(&mut d, &apexes);
        marks.insert("star-center".into(), vec![hub]);
        (d, apexes)
    } else if let Some((m, p)) = wide_line_form(g, 3) {
        let (mut d, hub, apexes) = three_line_pieces(m - 1, p - 1)?;
        cone_all(&mut d, &apexes);
        marks.insert("star-center".into(), vec![hub]);
        marks.insert("double-edges".into(), double_star_edges(&mut d, hub));
        (d, apexes)
    } else if g.is_multiple_of(2) {
        let base = if g == 4 {
            let t = tree_t(2, false)?;
            let mut with_loops = Draft::from_graph(&t.graph);
            for &l in t.mark("leaves") {
                with_loops.edge(l, l);
            }
            LabeledGraph {
                graph: with_loops.finish(),
                marks: BTreeMap::from([("leaves".to_string(), t.mark("leaves").to_vec())]),
                flags: vec![],
            }
        } else {
            graph_c(g / 2)?
        };
        flags.extend(base.flags.iter().cloned());
        let apexes = base.mark("leaves").to_vec();
        let mut d = Draft::from_graph(&base.graph.strip_loops());
        cone_all(&mut d, &apexes);
        for (k, v) in &base.marks {
            if k != "leaves" {
                marks.insert(k.clone(), v.clone());
            }
        }
        (d, apexes)
    } else {
        let tree = build_tree(g / 2)?;
        let mut d = Draft::from_graph(&tree.graph);
        cone_all(&mut d, &tree.leaves);
        let (u, w) = match tree.ending {
            Ending::Edge(a, b) => (a, b),
            Ending::Star { hub, branches } => {
                let (pick, symmetric) = odd_branch(&tree.graph, hub, &branches);
                if symmetric {
                    flags.push("symmetric-star".into());
                }
                marks.insert("star-center".into(), vec![hub]);
                (hub, pick)
            }
            Ending::Point(_) | Ending::Root(_) => {
                unreachable!("T_n with n >= 2 ends in an edge or star")
            }
        };
        marks.insert("double-edges".into(), d.insert_double_edge(u, w).to_vec());
        (d, tree.leaves)
    };
    marks.insert("cone-apex".into(), apexes);
    Ok(LabeledGraph { graph: d.finish(), marks, flags })
}

/// The branch of a three-branch star whose rooted shape occurs once; the
/// smallest such branch, or the first branch when all three agree.
fn odd_branch(tree: &Multigraph, hub: VertexId, branches: &[VertexId; 3]) -> (VertexId, bool) {
    let shapes: Vec<(Multigraph, VertexId)> = branches
        .iter()
        .map(|&b| {
            let part = tree.component_avoiding(b, hub);
            let root = part.iter().position(|&x| x == b).expect("branch root in its part");
            (tree.induced(&part), root)
        })
        .collect();
    let same = |i: usize, j: usize| are_isomorphic_rooted(&shapes[i].0, shapes[i].1, &shapes[j].0, shapes[j].1);
    let unique: Vec<usize> = (0..3).filter(|&i| (0..3).all(|j| j == i || !same(i, j))).collect();
    match unique.iter().min_by_key(|&&i| (shapes[i].0.num_vertices(), branches[i])) {
        Some(&i) => (branches[i], false),
        None => (branches[0], true),
    }
}

/// The `2(g-1)`-gon with every other edge doubled, starting with `0 = 1`.
/// Marks: "doubled-pairs" lists the endpoints of each doubled edge in order.
pub fn loop_of_loops(g: usize) -> Result<LabeledGraph> {
    require_genus(g)?;
    let n = 2 * (g - 1);
    let mut edges = Vec::with_capacity(3 * (g - 1));
    for i in 0..n {
        let e = (i, (i + 1) % n);
        edges.push(e);
        if i % 2 == 0 {
            edges.push(e);
        }
    }
    let mut out = LabeledGraph::unmarked(Multigraph::new(n, edges)?);
    out.marks.insert("doubled-pairs".into(), (0..n).collect());
    Ok(out)
}

/// Triangle with one edge doubled; apex 0, doubled edge `1 = 2`.
pub fn cone() -> LabeledGraph {
    let g = Multigraph::new(3, [(0, 1), (0, 2), (1, 2), (1, 2)]).expect("valid");
    let mut out = LabeledGraph::unmarked(g);
    out.marks.insert("cone-apex".into(), vec![0]);
    out
}

/// `K_{2,3}` with trivalent side `{0, 1}` and bivalent side `{2, 3, 4}`.
pub fn k23() -> LabeledGraph {
    let g = Multigraph::new(5, (0..2).flat_map(|a| (2..5).map(move |b| (a, b)))).expect("valid");
    let mut out = LabeledGraph::unmarked(g);
    out.marks.insert("k23-trivalent".into(), vec![0, 1]);
    out.marks.insert("k23-bivalent".into(), vec![2, 3, 4]);
    out
}

/// Tetrahedron on `1..=4` with edge `1 - 2` subdivided by the pinch `0`.
pub fn pinched_tetrahedron() -> LabeledGraph {
    let g = Multigraph::new(5, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).expect("valid");
    let mut out = LabeledGraph::unmarked(g);
    out.marks.insert("pinch".into(), vec![0]);
    out
}

/// `K_{3,3}` on `{1,2,3} + {4,5,6}` with edge `1 - 4` subdivided by the pinch `0`.
pub fn pinched_k33() -> LabeledGraph {
    let mut edges = vec![(0, 1), (0, 4)];
    for a in 1..4 {
        for b in 4..7 {
            if (a, b) != (1, 4) {
                edges.push((a, b));
            }
        }
    }
    let mut out = LabeledGraph::unmarked(Multigraph::new(7, edges).expect("valid"));
    out.marks.insert("pinch".into(), vec![0]);
    out
}

/// Rooted tree on `2^k` leaves with a pinched piece fused onto every leaf.
/// Marks: "root", "tree", "pinch" (fused leaves), "pinched-<i>" (piece `i`).
fn tree_of_pieces(k: u32, piece: &LabeledGraph) -> Result<LabeledGraph> {
    let tree = build_rooted_tree(1 << k)?;
    let Ending::Root(root) = tree.ending else { unreachable!("rooted build ends at a root") };
    let mut d = Draft::from_graph(&tree.graph);
    let pinch = piece.mark("pinch")[0];
    let mut marks = BTreeMap::new();
    for (i, &leaf) in tree.leaves.iter().enumerate() {
        let map = d.graft(&piece.graph, pinch, leaf);
        let mut block = map.clone();
        block.sort_unstable();
        marks.insert(format!("pinched-{i}"), block);
    }
    marks.insert("root".to_string(), vec![root]);
    marks.insert("tree".to_string(), (0..tree.graph.num_vertices()).collect());
    marks.insert("pinch".to_string(), tree.leaves);
    Ok(LabeledGraph { graph: d.finish(), marks, flags: vec![] })
}

/// `A_m`: pinched tetrahedra on the leaves of the rooted tree on `2^m` leaves. Genus `3 * 2^m`.
pub fn a_graph(m: u32) -> Result<LabeledGraph> {
    if m > 16 {
        return Err(Error::InvalidParameter(format!("m = {m} is too large")));
    }
    tree_of_pieces(m, &pinched_tetrahedron())
}

/// `B_m` (m >= 2): pinched `K_{3,3}`s on the leaves of the rooted tree on `2^{m-2}` leaves. Genus `2^m`.
pub fn b_graph(m: u32) -> Result<LabeledGraph> {
    if !(2..=18).contains(&m) {
        return Err(Error::InvalidParameter(format!("b_graph needs 2 <= m <= 18, got {m}")));
    }
    tree_of_pieces(m - 2, &pinched_k33())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedGraph {
    Tetrahedron,
    K33,
    Cube,
    Petersen,
    Heawood,
    /// 12 vertices, 18 edges, genus 7.
    Genus7Max,
    /// Two adjacent vertices, each bridged to two pinched tetrahedra.
    C12DoublePrime,
}

impl NamedGraph {
    pub const ALL: [NamedGraph; 7] = [
        NamedGraph::Tetrahedron,
        NamedGraph::K33,
        NamedGraph::Cube,
        NamedGraph::Petersen,
        NamedGraph::Heawood,
        NamedGraph::Genus7Max,
        NamedGraph::C12DoublePrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedGraph::Tetrahedron => "tetrahedron",
            NamedGraph::K33 => "k33",
            NamedGraph::Cube => "cube",
            NamedGraph::Petersen => "petersen",
            NamedGraph::Heawood => "heawood",
            NamedGraph::Genus7Max => "genus7-max",
            NamedGraph::C12DoublePrime => "c12-double-prime",
        }
    }
}

pub fn named(which: NamedGraph) -> LabeledGraph {
    let simple =
        |n: usize, edges: Vec<(usize, usize)>| LabeledGraph::unmarked(Multigraph::new(n, edges).expect("valid"));
    match which {
        NamedGraph::Tetrahedron => simple(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        NamedGraph::K33 => simple(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect()),
        NamedGraph::Cube => simple(
            8,
            (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|&(u, v)| u < v).collect(),
        ),
        NamedGraph::Petersen => {
            simple(10, (0..5).flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)]).collect())
        }
        NamedGraph::Heawood => simple(
            14,
            (0..14).map(|i| (i, (i + 1) % 14)).chain((0..14).step_by(2).map(|i| (i, (i + 5) % 14))).collect(),
        ),
        NamedGraph::Genus7Max => {
            let mut edges: Vec<(usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
            edges.extend([(1, 8), (8, 9), (9, 4), (2, 9), (3, 8), (5, 10), (10, 11), (11, 0), (7, 10), (6, 11)]);
            simple(12, edges)
        }
        NamedGraph::C12DoublePrime => {
            let mut out = case_join(JoinShape::Path(2), &a_graph(0).expect("valid"), 4).expect("valid");
            out.marks.insert("x".into(), vec![0]);
            out.marks.insert("y".into(), vec![1]);
            out
        }
    }
}

/// Small shapes along which pieces with a "root" are joined by bridges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JoinShape {
    /// One new vertex adjacent to three roots.
    CommonRoot,
    /// Two roots joined directly.
    Edge,
    /// A path on `k >= 2` vertices; each end carries two pieces, each interior vertex one.
    Path(usize),
    /// The bivalent side of a `K_{2,3}`.
    K23Shape,
    Square,
    /// Two triangles sharing an edge; the two apexes carry the pieces.
    TwoTriangles,
    Triangle,
    Pentagon,
}

impl JoinShape {
    pub fn piece_count(self) -> usize {
        match self {
            JoinShape::CommonRoot | JoinShape::K23Shape | JoinShape::Triangle => 3,
            JoinShape::Edge | JoinShape::TwoTriangles => 2,
            JoinShape::Path(k) => k + 2,
            JoinShape::Square => 4,
            JoinShape::Pentagon => 5,
        }
    }

    /// Core graph and the core vertex each piece hangs from.
    fn core(self) -> (Multigraph, Vec<VertexId>) {
        let cycle = |k: usize| Multigraph::new(k, (0..k).map(|i| (i, (i + 1) % k))).expect("valid");
        match self {
            JoinShape::CommonRoot => (Multigraph::single_vertex(), vec![0, 0, 0]),
            JoinShape::Edge => (Multigraph::new(0, []).expect("valid"), vec![]),
            JoinShape::Path(k) => {
                let path = Multigraph::new(k, (1..k).map(|i| (i - 1, i))).expect("valid");
                let mut hubs = vec![0];
                hubs.extend(0..k);
                hubs.push(k - 1);
                (path, hubs)
            }
            JoinShape::K23Shape => (k23().graph, vec![2, 3, 4]),
            JoinShape::Square => (cycle(4), vec![0, 1, 2, 3]),
            JoinShape::TwoTriangles => {
                (Multigraph::new(4, [(2, 3), (0, 2), (0, 3), (1, 2), (1, 3)]).expect("valid"), vec![0, 1])
            }
            JoinShape::Triangle => (cycle(3), vec![0, 1, 2]),
            JoinShape::Pentagon => (cycle(5), vec![0, 1, 2, 3, 4]),
        }
    }

    fn shape_marks(self, core_n: usize) -> Vec<(&'static str, Vec<VertexId>)> {
        match self {
            JoinShape::CommonRoot => vec![("center", vec![0])],
            JoinShape::Edge => vec![],
            JoinShape::Path(_) => vec![("path", (0..core_n).collect())],
            JoinShape::K23Shape => vec![("k23-trivalent", vec![0, 1]), ("k23-bivalent", vec![2, 3, 4])],
            JoinShape::TwoTriangles => vec![("two-triangles-apex", vec![0, 1]), ("two-triangles-shared", vec![2, 3])],
            JoinShape::Triangle => vec![("triangle", vec![0, 1, 2]), ("cycle", vec![0, 1, 2])],
            JoinShape::Square | JoinShape::Pentagon => vec![("cycle", (0..core_n).collect())],
        }
    }
}

impl fmt::Display for JoinShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JoinShape::CommonRoot => write!(f, "common-root"),
            JoinShape::Edge => write!(f, "edge"),
            JoinShape::Path(k) => write!(f, "path-{k}"),
            JoinShape::K23Shape => write!(f, "k23"),
            JoinShape::Square => write!(f, "square"),
            JoinShape::TwoTriangles => write!(f, "two-triangles"),
            JoinShape::Triangle => write!(f, "triangle"),
            JoinShape::Pentagon => write!(f, "pentagon"),
        }
    }
}

impl FromStr for JoinShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "common-root" => JoinShape::CommonRoot,
            "edge" => JoinShape::Edge,
            "k23" => JoinShape::K23Shape,
            "square" => JoinShape::Square,
            "two-triangles" => JoinShape::TwoTriangles,
            "triangle" => JoinShape::Triangle,
            "pentagon" => JoinShape::Pentagon,
            other => match other.strip_prefix("path-").and_then(|k| k.parse().ok()) {
                Some(k) if k >= 2 => JoinShape::Path(k),
                _ => return Err(Error::Parse(format!("unknown join shape {other:?}"))),
            },
        })
    }
}

/// Copies of `piece` hung by bridges from the shape's attachment vertices.
/// The core occupies the first vertices; piece `i` follows as block
/// "piece-<i>". Piece marks "tree" and "pinch" are carried over and the piece
/// roots are marked "piece-root".
pub fn case_join(shape: JoinShape, piece: &LabeledGraph, count: usize) -> Result<LabeledGraph> {
    if count != shape.piece_count() {
        return Err(Error::InvalidParameter(format!(
            "shape {shape} takes {} pieces, got {count}",
            shape.piece_count()
        )));
    }
    let &[root] = piece.mark("root") else {
        return Err(Error::InvalidParameter("piece needs exactly one \"root\" vertex".into()));
    };
    let (core, hubs) = shape.core();
    let mut d = Draft::from_graph(&core);
    let mut marks: BTreeMap<String, Vec<VertexId>> = BTreeMap::new();
    let mut roots = Vec::new();
    for i in 0..count {
        let off = d.append(&piece.graph);
        roots.push(root + off);
        marks.insert(format!("piece-{i}"), (off..off + piece.graph.num_vertices()).collect());
        for label in ["tree", "pinch"] {
            marks.entry(label.to_string()).or_default().extend(piece.mark(label).iter().map(|&v| v + off));
        }
    }
    if shape == JoinShape::Edge {
        d.edge(roots[0], roots[1]);
    } else {
        for (&h, &r) in hubs.iter().zip(&roots) {
            d.edge(h, r);
        }
    }
    let mut attach = hubs.clone();
    attach.dedup();
    if shape == JoinShape::Edge {
        attach = roots.clone();
    }
    marks.insert("attach".into(), attach);
    marks.insert("piece-root".into(), roots);
    for (label, vs) in shape.shape_marks(core.num_vertices()) {
        marks.insert(label.to_string(), vs);
    }
    marks.retain(|_, v| !v.is_empty());
    Ok(LabeledGraph { graph: d.finish(), marks, flags: vec![] })
}

/// A family member named by a compact string, e.g. `c-prime:8`,
/// `rooted-tree:4`, `case-join:pentagon:5:a:0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Tree(usize),
    RootedTree(usize),
    C(usize),
    CPrime(usize),
    LoopOfLoops(usize),
    Cone,
    K23,
    PinchedTetrahedron,
    PinchedK33,
    A(u32),
    B(u32),
    Named(NamedGraph),
    CaseJoin { shape: JoinShape, count: usize, piece: Box<FamilySpec> },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<LabeledGraph> {
        match self {
            FamilySpec::Tree(n) => tree_t(*n, false),
            FamilySpec::RootedTree(n) => tree_t(*n, true),
            FamilySpec::C(g) => graph_c(*g),
            FamilySpec::CPrime(g) => graph_c_prime(*g),
            FamilySpec::LoopOfLoops(g) => loop_of_loops(*g),
            FamilySpec::Cone => Ok(cone()),
            FamilySpec::K23 => Ok(k23()),
            FamilySpec::PinchedTetrahedron => Ok(pinched_tetrahedron()),
            FamilySpec::PinchedK33 => Ok(pinched_k33()),
            FamilySpec::A(m) => a_graph(*m),
            FamilySpec::B(m) => b_graph(*m),
            FamilySpec::Named(n) => Ok(named(*n)),
            FamilySpec::CaseJoin { shape, count, piece } => case_join(*shape, &piece.generate()?, *count),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Tree(n) => write!(f, "tree:{n}"),
            FamilySpec::RootedTree(n) => write!(f, "rooted-tree:{n}"),
            FamilySpec::C(g) => write!(f, "c:{g}"),
            FamilySpec::CPrime(g) => write!(f, "c-prime:{g}"),
            FamilySpec::LoopOfLoops(g) => write!(f, "loop-of-loops:{g}"),
            FamilySpec::Cone => write!(f, "cone"),
            FamilySpec::K23 => write!(f, "k23"),
            FamilySpec::PinchedTetrahedron => write!(f, "pinched-tetrahedron"),
            FamilySpec::PinchedK33 => write!(f, "pinched-k33"),
            FamilySpec::A(m) => write!(f, "a:{m}"),
            FamilySpec::B(m) => write!(f, "b:{m}"),
            FamilySpec::Named(n) => write!(f, "{}", n.name()),
            FamilySpec::CaseJoin { shape, count, piece } => write!(f, "case-join:{shape}:{count}:{piece}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognised family {s:?}"));
        if let Some(named) = NamedGraph::ALL.iter().find(|n| n.name() == s) {
            return Ok(FamilySpec::Named(*named));
        }
        match s {
            "cone" => return Ok(FamilySpec::Cone),
            "k23" => return Ok(FamilySpec::K23),
            "pinched-tetrahedron" => return Ok(FamilySpec::PinchedTetrahedron),
            "pinched-k33" => return Ok(FamilySpec::PinchedK33),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("case-join:") {
            let mut parts = rest.splitn(3, ':');
            let shape: JoinShape = parts.next().ok_or_else(bad)?.parse()?;
            let count = parts.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            let piece = parts.next().ok_or_else(bad)?.parse()?;
            return Ok(FamilySpec::CaseJoin { shape, count, piece: Box::new(piece) });
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let num = || arg.parse::<usize>().map_err(|_| bad());
        let small = || arg.parse::<u32>().map_err(|_| bad());
        Ok(match kind {
            "tree" => FamilySpec::Tree(num()?),
            "rooted-tree" => FamilySpec::RootedTree(num()?),
            "c" => FamilySpec::C(num()?),
            "c-prime" => FamilySpec::CPrime(num()?),
            "loop-of-loops" => FamilySpec::LoopOfLoops(num()?),
            "a" => FamilySpec::A(small()?),
            "b" => FamilySpec::B(small()?),
            _ => return Err(bad()),
        })
    }
}
