//! Vertex automorphisms of multigraphs, involutions, and quotients.
//!
//! Automorphisms act on vertices only. A permutation is an automorphism when
//! it preserves every edge multiplicity, loops included; parallel edges are
//! never permuted among themselves, so `|Aut|` here counts vertex actions.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::graph::{disjoint_union, Multigraph, VertexId};

pub const DEFAULT_SIZE_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPermutation {
    image: Vec<VertexId>,
}

impl VertexPermutation {
    pub fn new(image: Vec<VertexId>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &w in &image {
            if w >= image.len() || seen[w] {
                return Err(Error::InvalidParameter("image is not a bijection".into()));
            }
            seen[w] = true;
        }
        Ok(VertexPermutation { image })
    }

    pub fn identity(n: usize) -> Self {
        VertexPermutation { image: (0..n).collect() }
    }

    pub fn image(&self) -> &[VertexId] {
        &self.image
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.image[v]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(v, &w)| v == w)
    }

    pub fn is_involution(&self) -> bool {
        self.image.iter().enumerate().all(|(v, &w)| self.image[w] == v)
    }

    pub fn is_automorphism_of(&self, g: &Multigraph) -> bool {
        if self.image.len() != g.num_vertices() {
            return false;
        }
        match g.relabel(&self.image) {
            Ok(h) => &h == g,
            Err(_) => false,
        }
    }
}

/// A vertex colour with the sorted colours and multiplicities around it.
type Signature = (usize, Vec<(usize, u32)>);

/// Colour refinement: start from (degree, loops) and split by the multiset of
/// (neighbour colour, multiplicity) until stable. Colours are canonical, so
/// refining a disjoint union gives comparable colours for both sides.
fn refine_colors(g: &Multigraph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut table: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for v in 0..n {
        table.insert((g.degree(v), g.loops_at(v)), 0);
    }
    for (i, slot) in table.values_mut().enumerate() {
        *slot = i;
    }
    let mut colors: Vec<usize> = (0..n).map(|v| table[&(g.degree(v), g.loops_at(v))]).collect();
    let mut classes = table.len();
    loop {
        let signatures: Vec<Signature> = (0..n)
            .map(|v| {
                let mut around: Vec<(usize, u32)> = g.neighbors(v).iter().map(|&(u, m)| (colors[u], m)).collect();
                around.sort_unstable();
                (colors[v], around)
            })
            .collect();
        let mut ids: BTreeMap<&Signature, usize> = BTreeMap::new();
        for s in &signatures {
            ids.insert(s, 0);
        }
        for (i, slot) in ids.values_mut().enumerate() {
            *slot = i;
        }
        let next: Vec<usize> = signatures.iter().map(|s| ids[s]).collect();
        let count = ids.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

/// Backtracking search for multiplicity-preserving bijections `g1 -> g2`.
struct Matcher<'a> {
    g1: &'a Multigraph,
    g2: &'a Multigraph,
    mult1: Vec<Vec<u32>>,
    mult2: Vec<Vec<u32>>,
    color1: Vec<usize>,
    color2: Vec<usize>,
    order: Vec<VertexId>,
    involution: bool,
}

fn multiplicity_matrix(g: &Multigraph) -> Vec<Vec<u32>> {
    let n = g.num_vertices();
    let mut m = vec![vec![0u32; n]; n];
    for &(u, v) in g.edges() {
        m[u][v] += 1;
        if u != v {
            m[v][u] += 1;
        }
    }
    m
}

impl<'a> Matcher<'a> {
    fn new(g1: &'a Multigraph, g2: &'a Multigraph, involution: bool) -> Self {
        let (color1, color2) = if std::ptr::eq(g1, g2) || g1 == g2 {
            let c = refine_colors(g1);
            (c.clone(), c)
        } else {
            let c = refine_colors(&disjoint_union(g1, g2));
            let n1 = g1.num_vertices();
            (c[..n1].to_vec(), c[n1..].to_vec())
        };
        let order = search_order(g1, &color1);
        Matcher {
            g1,
            g2,
            mult1: multiplicity_matrix(g1),
            mult2: multiplicity_matrix(g2),
            color1,
            color2,
            order,
            involution,
        }
    }

    fn consistent(&self, v: VertexId, w: VertexId, image: &[Option<VertexId>]) -> bool {
        if self.color1[v] != self.color2[w] || self.mult1[v][v] != self.mult2[w][w] {
            return false;
        }
        self.order.iter().all(|&u| match image[u] {
            Some(x) => self.mult1[v][u] == self.mult2[w][x],
            None => true,
        })
    }

    fn candidates(&self, v: VertexId, image: &[Option<VertexId>], used: &[bool]) -> Vec<VertexId> {
        // Anchor on a placed neighbour when there is one.
        let anchor = self.g1.neighbors(v).iter().find_map(|&(u, _)| image[u]);
        let pool: Vec<VertexId> = match anchor {
            Some(x) => self.g2.neighbors(x).iter().map(|&(w, _)| w).collect(),
            None => (0..self.g2.num_vertices()).collect(),
        };
        pool.into_iter().filter(|&w| !used[w] && self.color2[w] == self.color1[v]).collect()
    }

    fn search<F>(&self, fixed: &[(VertexId, VertexId)], visit: &mut F)
    where
        F: FnMut(&[VertexId]) -> ControlFlow<()>,
    {
        let n1 = self.g1.num_vertices();
        if n1 != self.g2.num_vertices() || self.g1.num_edges() != self.g2.num_edges() {
            return;
        }
        let mut image = vec![None; n1];
        let mut used = vec![false; n1];
        for &(v, w) in fixed {
            if image[v].is_some() || used[w] || !self.consistent(v, w, &image) {
                return;
            }
            image[v] = Some(w);
            used[w] = true;
            if self.involution && v != w {
                if image[w].is_some() || used[v] || !self.consistent(w, v, &image) {
                    return;
                }
                image[w] = Some(v);
                used[v] = true;
            }
        }
        let _ = self.extend(0, &mut image, &mut used, visit);
    }

    fn extend<F>(
        &self,
        pos: usize,
        image: &mut Vec<Option<VertexId>>,
        used: &mut Vec<bool>,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[VertexId]) -> ControlFlow<()>,
    {
        let Some(&v) = self.order[pos..].iter().find(|&&v| image[v].is_none()) else {
            let full: Vec<VertexId> = image.iter().map(|x| x.expect("complete")).collect();
            return visit(&full);
        };
        for w in self.candidates(v, image, used) {
            if !self.consistent(v, w, image) {
                continue;
            }
            image[v] = Some(w);
            used[w] = true;
            let mut paired = false;
            if self.involution && w != v {
                if image[w].is_some() || used[v] || !self.consistent(w, v, image) {
                    image[v] = None;
                    used[w] = false;
                    continue;
                }
                image[w] = Some(v);
                used[v] = true;
                paired = true;
            }
            let flow = self.extend(pos + 1, image, used, visit);
            if paired {
                image[w] = None;
                used[v] = false;
            }
            image[v] = None;
            used[w] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn exists(&self, fixed: &[(VertexId, VertexId)]) -> Option<Vec<VertexId>> {
        let mut found = None;
        self.search(fixed, &mut |img: &[VertexId]| {
            found = Some(img.to_vec());
            ControlFlow::Break(())
        });
        found
    }
}

/// Rarest colour first, then greedily the vertex with most placed neighbours.
fn search_order(g: &Multigraph, colors: &[usize]) -> Vec<VertexId> {
    let n = g.num_vertices();
    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in colors {
        *class_size.entry(c).or_default() += 1;
    }
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (std::cmp::Reverse(links[v]), class_size[&colors[v]], v))
            .expect("unplaced vertex");
        placed[v] = true;
        order.push(v);
        for &(u, _) in g.neighbors(v) {
            links[u] += 1;
        }
    }
    order
}

fn check_bound(g: &Multigraph, bound: usize) -> Result<()> {
    if g.num_vertices() > bound {
        Err(Error::SizeBound { n: g.num_vertices(), bound })
    } else {
        Ok(())
    }
}

/// `|Aut(G)|` by orbit-stabiliser along the search order: at level `i` count
/// the images of the `i`-th base vertex reachable by an automorphism fixing
/// the earlier base vertices, and multiply.
pub fn aut_order(g: &Multigraph) -> Result<u128> {
    aut_order_bounded(g, DEFAULT_SIZE_BOUND)
}

pub fn aut_order_bounded(g: &Multigraph, bound: usize) -> Result<u128> {
    check_bound(g, bound)?;
    g.require_connected()?;
    let matcher = Matcher::new(g, g, false);
    let mut order = 1u128;
    let mut fixed: Vec<(VertexId, VertexId)> = Vec::new();
    for &b in &matcher.order {
        let mut orbit = 0u128;
        for w in 0..g.num_vertices() {
            if matcher.color1[w] != matcher.color1[b] || fixed.iter().any(|&(_, x)| x == w) {
                continue;
            }
            let mut trial = fixed.clone();
            trial.push((b, w));
            if matcher.exists(&trial).is_some() {
                orbit += 1;
            }
        }
        order *= orbit;
        fixed.push((b, b));
    }
    Ok(order)
}

/// Visits every automorphism in search order.
pub fn for_each_automorphism<F>(g: &Multigraph, mut visit: F) -> Result<()>
where
    F: FnMut(&VertexPermutation) -> ControlFlow<()>,
{
    check_bound(g, DEFAULT_SIZE_BOUND)?;
    let matcher = Matcher::new(g, g, false);
    matcher.search(&[], &mut |img: &[VertexId]| visit(&VertexPermutation { image: img.to_vec() }));
    Ok(())
}

/// All automorphisms, sorted by image vector.
pub fn automorphisms(g: &Multigraph) -> Result<Vec<VertexPermutation>> {
    let mut out = Vec::new();
    for_each_automorphism(g, |p| {
        out.push(p.clone());
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// Visits every automorphism of order at most two, identity included.
pub fn for_each_involution<F>(g: &Multigraph, mut visit: F) -> Result<()>
where
    F: FnMut(&VertexPermutation) -> ControlFlow<()>,
{
    check_bound(g, DEFAULT_SIZE_BOUND)?;
    let matcher = Matcher::new(g, g, true);
    matcher.search(&[], &mut |img: &[VertexId]| visit(&VertexPermutation { image: img.to_vec() }));
    Ok(())
}

/// All involutions (and the identity), sorted by image vector.
pub fn involutions(g: &Multigraph) -> Result<Vec<VertexPermutation>> {
    let mut out = Vec::new();
    for_each_involution(g, |p| {
        out.push(p.clone());
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// An isomorphism `g1 -> g2` if one exists.
pub fn isomorphism(g1: &Multigraph, g2: &Multigraph) -> Option<VertexPermutation> {
    if g1.num_vertices() != g2.num_vertices() {
        return None;
    }
    Matcher::new(g1, g2, false).exists(&[]).map(|image| VertexPermutation { image })
}

pub fn are_isomorphic(g1: &Multigraph, g2: &Multigraph) -> bool {
    isomorphism(g1, g2).is_some()
}

/// Isomorphism test with `r1` forced onto `r2`.
pub fn are_isomorphic_rooted(g1: &Multigraph, r1: VertexId, g2: &Multigraph, r2: VertexId) -> bool {
    if g1.num_vertices() != g2.num_vertices() {
        return false;
    }
    // Mark the roots with a pendant path of unusual length so refinement keeps them apart.
    let tag = |g: &Multigraph, r: VertexId| {
        let n = g.num_vertices();
        let extra = 3;
        let mut edges = vec![(r, n)];
        edges.extend((0..extra - 1).map(|i| (n + i, n + i + 1)));
        g.with_extra_vertices(extra).with_edges(edges).expect("valid")
    };
    let (h1, h2) = (tag(g1, r1), tag(g2, r2));
    let n = g1.num_vertices();
    Matcher::new(&h1, &h2, false).exists(&[(r1, r2), (n, n), (n + 1, n + 1), (n + 2, n + 2)]).is_some()
}

/// How a quotient treats a bundle of parallel edges whose two endpoints are
/// both fixed by the involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParallelAction {
    /// Every such edge is fixed.
    #[default]
    Fix,
    /// Edges are swapped in pairs; an odd one out stays fixed.
    Swap,
}

/// `G / sigma`: vertices are vertex orbits (numbered by smallest member),
/// edges are edge orbits with both ends in distinct orbits. Edge orbits whose
/// endpoints fuse are dropped.
pub fn quotient(g: &Multigraph, sigma: &VertexPermutation, action: ParallelAction) -> Result<Multigraph> {
    if g.has_loops() {
        return Err(Error::LoopsPresent("quotient needs a loop-free graph"));
    }
    if !sigma.is_involution() {
        return Err(Error::NotInvolution("sigma squared is not the identity".into()));
    }
    if !sigma.is_automorphism_of(g) {
        return Err(Error::NotInvolution("sigma does not preserve the edge multiset".into()));
    }
    let n = g.num_vertices();
    let mut orbit = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if orbit[v] == usize::MAX {
            orbit[v] = count;
            orbit[sigma.apply(v)] = count;
            count += 1;
        }
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for &(v, m) in g.neighbors(u) {
            if v < u {
                continue;
            }
            let (su, sv) = (sigma.apply(u), sigma.apply(v));
            let partner = if su <= sv { (su, sv) } else { (sv, su) };
            if orbit[u] == orbit[v] {
                continue;
            }
            let copies = if partner == (u, v) {
                match action {
                    ParallelAction::Fix => m,
                    ParallelAction::Swap => m.div_ceil(2),
                }
            } else if partner < (u, v) {
                // Counted when the smaller bundle of the pair was visited.
                continue;
            } else {
                m
            };
            for _ in 0..copies {
                edges.push((orbit[u], orbit[v]));
            }
        }
    }
    Multigraph::new(count, edges)
}

/// An involution whose quotient (parallel bundles swapped where possible) is
/// a tree. Swapping minimises the quotient's edge count without
/// disconnecting it, so this covers every edge action.
pub fn find_tree_quotient_involution(g: &Multigraph) -> Result<Option<VertexPermutation>> {
    if g.has_loops() {
        return Err(Error::LoopsPresent("tree-quotient search needs a loop-free graph"));
    }
    let genus = g.genus()?;
    if genus < 2 {
        return Err(Error::InvalidParameter(format!("genus {genus} < 2")));
    }
    let mut found = None;
    for_each_involution(g, |sigma| {
        let q = quotient(g, sigma, ParallelAction::Swap).expect("valid involution");
        if q.is_connected() && q.num_edges() + 1 == q.num_vertices() {
            found = Some(sigma.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Multigraph {
        Multigraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn cone() -> Multigraph {
        Multigraph::new(3, [(0, 1), (0, 2), (1, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn small_orders() {
        let p3 = Multigraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(aut_order(&p3).unwrap(), 2);
        assert_eq!(aut_order(&k4()).unwrap(), 24);
        assert_eq!(aut_order(&cone()).unwrap(), 2);
        assert_eq!(automorphisms(&k4()).unwrap().len(), 24);
    }

    #[test]
    fn multiplicities_matter() {
        // Triangle with one doubled edge has fewer symmetries than the triangle.
        let tri = Multigraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(aut_order(&tri).unwrap(), 6);
        assert_eq!(aut_order(&cone()).unwrap(), 2);
        let looped = Multigraph::new(3, [(0, 1), (1, 2), (0, 0)]).unwrap();
        assert_eq!(aut_order(&looped).unwrap(), 1);
    }

    #[test]
    fn involutions_include_identity_and_cone_swap() {
        let invs = involutions(&cone()).unwrap();
        assert!(invs.contains(&VertexPermutation::identity(3)));
        assert!(invs.contains(&VertexPermutation::new(vec![0, 2, 1]).unwrap()));
        assert!(invs.iter().all(|s| s.is_involution() && s.is_automorphism_of(&cone())));
    }

    #[test]
    fn cone_quotient_is_a_path() {
        let swap = VertexPermutation::new(vec![0, 2, 1]).unwrap();
        let q = quotient(&cone(), &swap, ParallelAction::Fix).unwrap();
        assert_eq!(q, Multigraph::new(2, [(0, 1)]).unwrap());
    }

    #[test]
    fn identity_quotient_is_the_graph() {
        let q = quotient(&k4(), &VertexPermutation::identity(4), ParallelAction::Fix).unwrap();
        assert_eq!(q, k4());
        let banana = Multigraph::new(2, [(0, 1), (0, 1)]).unwrap();
        let fix = quotient(&banana, &VertexPermutation::identity(2), ParallelAction::Fix).unwrap();
        assert_eq!(fix, banana);
        let swap = quotient(&banana, &VertexPermutation::identity(2), ParallelAction::Swap).unwrap();
        assert_eq!(swap, Multigraph::new(2, [(0, 1)]).unwrap());
    }

    #[test]
    fn quotient_rejects_non_automorphisms() {
        let p = VertexPermutation::new(vec![1, 0, 2]).unwrap();
        assert!(matches!(quotient(&cone(), &p, ParallelAction::Fix), Err(Error::NotInvolution(_))));
        let cyc = VertexPermutation::new(vec![1, 2, 3, 0]).unwrap();
        assert!(matches!(quotient(&k4(), &cyc, ParallelAction::Fix), Err(Error::NotInvolution(_))));
    }

    #[test]
    fn tree_quotient_search() {
        let sigma = find_tree_quotient_involution(&cone().with_edges([]).unwrap()).unwrap();
        assert!(sigma.is_some());
        assert!(find_tree_quotient_involution(&k4()).unwrap().is_none());
    }

    #[test]
    fn isomorphism_checks() {
        let a = Multigraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = Multigraph::new(4, [(2, 0), (0, 3), (3, 1)]).unwrap();
        assert!(are_isomorphic(&a, &b));
        let star = Multigraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!are_isomorphic(&a, &star));
        assert!(are_isomorphic_rooted(&a, 0, &b, 2));
        assert!(!are_isomorphic_rooted(&a, 0, &b, 0));
    }

    #[test]
    fn size_bound_is_enforced() {
        let big = Multigraph::new(70, (1..70).map(|i| (i - 1, i))).unwrap();
        assert!(matches!(aut_order(&big), Err(Error::SizeBound { n: 70, bound: 64 })));
        assert_eq!(aut_order_bounded(&big, 80).unwrap(), 2);
    }
}
