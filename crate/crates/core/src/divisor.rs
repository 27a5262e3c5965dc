//! Divisors, chip-firing, Dhar burning, q-reduction and Baker-Norine rank.
//!
//! Loops never move chips: firing a vertex sends one chip along every non-loop
//! edge, so a loop at `v` loses and regains the same two chips. Rank and the
//! other linear-system queries run on the loop-subdivided graph by default
//! (see [`LoopConvention`]).

use std::ops::{Add, ControlFlow, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexId};

/// Integer chip counts, one per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Divisor {
    values: Vec<i64>,
}

impl Divisor {
    pub fn new(values: Vec<i64>) -> Self {
        Divisor { values }
    }

    pub fn zero(n: usize) -> Self {
        Divisor { values: vec![0; n] }
    }

    /// `k` chips on `v`, zero elsewhere.
    pub fn point(n: usize, v: VertexId, k: i64) -> Self {
        let mut d = Divisor::zero(n);
        d.values[v] = k;
        d
    }

    /// Sum of `k * v` terms.
    pub fn from_terms(n: usize, terms: &[(VertexId, i64)]) -> Self {
        let mut d = Divisor::zero(n);
        for &(v, k) in terms {
            d.values[v] += k;
        }
        d
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<i64> {
        self.values
    }

    pub fn deg(&self) -> i64 {
        self.values.iter().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.values.iter().all(|&x| x >= 0)
    }

    pub fn add_chips(&mut self, v: VertexId, k: i64) {
        self.values[v] += k;
    }

    /// Pads with zeros up to `n` entries (used when vertices are appended).
    pub fn extended(&self, n: usize) -> Divisor {
        let mut values = self.values.clone();
        values.resize(n.max(values.len()), 0);
        Divisor { values }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Divisor> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn check_len(&self, g: &Multigraph) -> Result<()> {
        if self.values.len() == g.num_vertices() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: g.num_vertices(), got: self.values.len() })
        }
    }
}

impl Index<VertexId> for Divisor {
    type Output = i64;
    fn index(&self, v: VertexId) -> &i64 {
        &self.values[v]
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        Divisor { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        Divisor { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect() }
    }
}

impl std::fmt::Display for Divisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Net number of times each vertex fires; negative entries are reverse firings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiringScript {
    counts: Vec<i64>,
}

impl FiringScript {
    pub fn new(counts: Vec<i64>) -> Self {
        FiringScript { counts }
    }

    pub fn zero(n: usize) -> Self {
        FiringScript { counts: vec![0; n] }
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// The same script shifted so the count at `base` is zero. Firing every
    /// vertex once is the identity, so the effect is unchanged.
    pub fn normalized(&self, base: VertexId) -> FiringScript {
        let shift = self.counts[base];
        FiringScript { counts: self.counts.iter().map(|c| c - shift).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<FiringScript> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A q-reduced representative of a divisor class with the script reaching it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    pub reduced: Divisor,
    pub script: FiringScript,
    pub base: VertexId,
}

/// How rank-type computations treat loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopConvention {
    /// Work on the graph with every loop subdivided (genus preserved).
    #[default]
    Subdivide,
    /// Use the graph as given; loops never carry chips.
    Inert,
}

/// Prepares the graph a rank-type query runs on and pads the divisor to match.
pub fn working_graph(g: &Multigraph, convention: LoopConvention) -> Multigraph {
    match convention {
        LoopConvention::Subdivide if g.has_loops() => g.subdivide_loops(),
        _ => g.clone(),
    }
}

/// Chip-firing operations on one connected graph.
///
/// Construction checks connectivity once so the hot loops in rank and class
/// enumeration do not repeat it.
#[derive(Debug, Clone)]
pub struct ChipFiring<'g> {
    graph: &'g Multigraph,
    n: usize,
    adjacency: Vec<Vec<(VertexId, i64)>>,
}

impl<'g> ChipFiring<'g> {
    pub fn new(graph: &'g Multigraph) -> Result<Self> {
        graph.require_connected()?;
        let adjacency = (0..graph.num_vertices())
            .map(|v| graph.neighbors(v).iter().map(|&(u, m)| (u, m as i64)).collect())
            .collect();
        Ok(ChipFiring { graph, n: graph.num_vertices(), adjacency })
    }

    pub fn graph(&self) -> &Multigraph {
        self.graph
    }

    fn check(&self, d: &Divisor) -> Result<()> {
        d.check_len(self.graph)
    }

    fn fire_in_place(&self, values: &mut [i64], v: VertexId, times: i64) {
        for &(u, m) in &self.adjacency[v] {
            values[v] -= times * m;
            values[u] += times * m;
        }
    }

    pub fn chip_fire(&self, d: &Divisor, v: VertexId) -> Result<Divisor> {
        self.check(d)?;
        self.graph.check_vertex(v)?;
        let mut values = d.values.clone();
        self.fire_in_place(&mut values, v, 1);
        Ok(Divisor { values })
    }

    /// Fires every vertex of `set` once.
    pub fn fire_set(&self, d: &Divisor, set: &[VertexId]) -> Result<Divisor> {
        self.check(d)?;
        let mut counts = vec![0; self.n];
        for &v in set {
            self.graph.check_vertex(v)?;
            counts[v] = 1;
        }
        self.apply_script(d, &FiringScript { counts })
    }

    pub fn apply_script(&self, d: &Divisor, script: &FiringScript) -> Result<Divisor> {
        self.check(d)?;
        if script.counts.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: script.counts.len() });
        }
        let mut values = d.values.clone();
        for (v, &c) in script.counts.iter().enumerate() {
            if c != 0 {
                self.fire_in_place(&mut values, v, c);
            }
        }
        Ok(Divisor { values })
    }

    /// Dhar's burning rule from `q`: a vertex catches fire once it has fewer
    /// chips than burning edges. Returns the mask of vertices left unburnt.
    fn unburnt_mask(&self, values: &[i64], q: VertexId) -> Vec<bool> {
        let mut burnt = vec![false; self.n];
        let mut exposure = vec![0i64; self.n];
        burnt[q] = true;
        let mut stack = vec![q];
        while let Some(v) = stack.pop() {
            for &(u, m) in &self.adjacency[v] {
                if !burnt[u] {
                    exposure[u] += m;
                    if values[u] < exposure[u] {
                        burnt[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        burnt.into_iter().map(|b| !b).collect()
    }

    /// The maximal vertex set avoiding `q` that can fire without any of its
    /// vertices going negative. Empty exactly when `d` is q-reduced.
    pub fn dhar_unburnt(&self, d: &Divisor, q: VertexId) -> Result<Vec<VertexId>> {
        self.check(d)?;
        self.graph.check_vertex(q)?;
        if let Some(v) = (0..self.n).find(|&v| v != q && d.values[v] < 0) {
            return Err(Error::NegativeOffBase(v));
        }
        let mask = self.unburnt_mask(&d.values, q);
        Ok((0..self.n).filter(|&v| mask[v]).collect())
    }

    /// Brings every vertex other than `q` to a nonnegative count by firing the
    /// ball of radius `k - 1` around `q`, for each distance level `k` from the
    /// outside in. Only levels closer to `q` lose chips at each step.
    fn make_nonnegative_off(&self, values: &mut [i64], counts: &mut [i64], q: VertexId) {
        if (0..self.n).all(|v| v == q || values[v] >= 0) {
            return;
        }
        let dist: Vec<usize> = self.graph.distances(q).into_iter().map(|d| d.expect("connected")).collect();
        let depth = dist.iter().copied().max().unwrap_or(0);
        for level in (1..=depth).rev() {
            let deficit = (0..self.n).filter(|&v| dist[v] == level).map(|v| -values[v]).max().unwrap_or(0);
            if deficit <= 0 {
                continue;
            }
            for u in 0..self.n {
                if dist[u] < level {
                    counts[u] += deficit;
                    for &(w, m) in &self.adjacency[u] {
                        if dist[w] == level {
                            values[u] -= deficit * m;
                            values[w] += deficit * m;
                        }
                    }
                }
            }
        }
    }

    /// Repeatedly fires the unburnt set as many times as it stays legal.
    fn settle(&self, values: &mut [i64], counts: &mut [i64], q: VertexId) {
        loop {
            let unburnt = self.unburnt_mask(values, q);
            let mut times = i64::MAX;
            let mut any = false;
            for v in 0..self.n {
                if !unburnt[v] {
                    continue;
                }
                any = true;
                let out: i64 = self.adjacency[v].iter().filter(|&&(u, _)| !unburnt[u]).map(|&(_, m)| m).sum();
                if out > 0 {
                    times = times.min(values[v] / out);
                }
            }
            if !any {
                return;
            }
            debug_assert!((1..i64::MAX).contains(&times));
            for v in 0..self.n {
                if unburnt[v] {
                    counts[v] += times;
                    for &(u, m) in &self.adjacency[v] {
                        if !unburnt[u] {
                            values[v] -= times * m;
                            values[u] += times * m;
                        }
                    }
                }
            }
        }
    }

    pub fn q_reduce(&self, d: &Divisor, q: VertexId) -> Result<ReductionResult> {
        self.check(d)?;
        self.graph.check_vertex(q)?;
        Ok(self.reduce_unchecked(d, q))
    }

    fn reduce_unchecked(&self, d: &Divisor, q: VertexId) -> ReductionResult {
        let mut values = d.values.clone();
        let mut counts = vec![0i64; self.n];
        self.make_nonnegative_off(&mut values, &mut counts, q);
        self.settle(&mut values, &mut counts, q);
        ReductionResult { reduced: Divisor { values }, script: FiringScript { counts }, base: q }
    }

    /// The q-reduced form only; skips the bookkeeping of the script.
    fn reduced_values(&self, values: &mut [i64], q: VertexId) {
        let mut scratch = vec![0i64; self.n];
        self.make_nonnegative_off(values, &mut scratch, q);
        self.settle(values, &mut scratch, q);
    }

    pub fn is_equivalent(&self, d1: &Divisor, d2: &Divisor) -> Result<bool> {
        self.check(d1)?;
        self.check(d2)?;
        if d1.deg() != d2.deg() {
            return Ok(false);
        }
        Ok(self.reduce_unchecked(d1, 0).reduced == self.reduce_unchecked(d2, 0).reduced)
    }

    /// An effective divisor equivalent to `d` with its script, if one exists.
    pub fn effective_representative(&self, d: &Divisor) -> Result<Option<ReductionResult>> {
        self.check(d)?;
        if d.deg() < 0 {
            return Ok(None);
        }
        let base = lowest_vertex(&d.values);
        let result = self.reduce_unchecked(d, base);
        Ok((result.reduced.values[base] >= 0).then_some(result))
    }

    pub fn has_effective_representative(&self, d: &Divisor) -> Result<bool> {
        Ok(self.effective_representative(d)?.is_some())
    }

    fn has_effective_values(&self, values: &mut [i64]) -> bool {
        if values.iter().sum::<i64>() < 0 {
            return false;
        }
        let base = lowest_vertex(values);
        self.reduced_values(values, base);
        values[base] >= 0
    }

    /// Whether `rank(d) >= r`.
    pub fn rank_at_least(&self, d: &Divisor, r: i64) -> Result<bool> {
        self.check(d)?;
        Ok(self.rank_at_least_unchecked(d, r))
    }

    fn rank_at_least_unchecked(&self, d: &Divisor, r: i64) -> bool {
        if r < 0 {
            return true;
        }
        let mut start = d.values.clone();
        if !self.has_effective_values(&mut start) {
            return false;
        }
        if r == 0 {
            return true;
        }
        if start.iter().sum::<i64>() < r {
            return false;
        }
        // Concentrated subtractions fail most often; try them before the sweep.
        for v in 0..self.n {
            let mut trial = start.clone();
            trial[v] -= r;
            if !self.has_effective_values(&mut trial) {
                return false;
            }
        }
        self.survives_all_removals(&start, 0, r)
    }

    /// `effective` is effective; checks that removing any multiset of `left`
    /// chips drawn from vertices `>= from` keeps an effective representative.
    fn survives_all_removals(&self, effective: &[i64], from: VertexId, left: i64) -> bool {
        for v in from..self.n {
            let mut next = effective.to_vec();
            next[v] -= 1;
            // Reducing at the vertex just debited keeps every other entry
            // nonnegative, so only the burning phase runs.
            self.reduced_values(&mut next, v);
            if next[v] < 0 {
                return false;
            }
            if left > 1 && !self.survives_all_removals(&next, v, left - 1) {
                return false;
            }
        }
        true
    }

    /// Baker-Norine rank of `d` on this graph, loops inert.
    pub fn rank(&self, d: &Divisor) -> Result<i64> {
        self.check(d)?;
        if !self.rank_at_least_unchecked(d, 0) {
            return Ok(-1);
        }
        let mut r = 0;
        while self.rank_at_least_unchecked(d, r + 1) {
            r += 1;
        }
        Ok(r)
    }

    /// Calls `visit` with the q-reduced form of every degree-`d` class that
    /// has an effective representative, each exactly once.
    ///
    /// The reduced forms are enumerated as superstable configurations off `q`
    /// with at most `d` chips. Superstability is closed under removing chips,
    /// so a depth-first search adding chips in nondecreasing vertex order
    /// reaches every configuration once and can prune at the first failure.
    /// Order: depth-first preorder, starting with `d * q`.
    pub fn for_each_class<F>(&self, d: i64, q: VertexId, mut visit: F) -> Result<()>
    where
        F: FnMut(&Divisor) -> ControlFlow<()>,
    {
        self.graph.check_vertex(q)?;
        if d < 0 {
            return Err(Error::InvalidParameter(format!("degree {d} < 0")));
        }
        let mut config = vec![0i64; self.n];
        let _ = self.class_dfs(&mut config, 0, 0, d, q, &mut visit);
        Ok(())
    }

    fn class_dfs<F>(
        &self,
        config: &mut Vec<i64>,
        total: i64,
        from: VertexId,
        d: i64,
        q: VertexId,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&Divisor) -> ControlFlow<()>,
    {
        let mut divisor = config.clone();
        divisor[q] = d - total;
        visit(&Divisor { values: divisor })?;
        if total == d {
            return ControlFlow::Continue(());
        }
        for v in from..self.n {
            if v == q {
                continue;
            }
            config[v] += 1;
            let superstable = self.unburnt_mask(config, q).iter().all(|&u| !u);
            if superstable {
                self.class_dfs(config, total + 1, v, d, q, visit)?;
            }
            config[v] -= 1;
        }
        ControlFlow::Continue(())
    }

    pub fn classes_with_effective(&self, d: i64, q: VertexId) -> Result<Vec<Divisor>> {
        let mut out = Vec::new();
        self.for_each_class(d, q, |div| {
            out.push(div.clone());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }
}

fn lowest_vertex(values: &[i64]) -> VertexId {
    let mut best = 0;
    for (v, &x) in values.iter().enumerate() {
        if x < values[best] {
            best = v;
        }
    }
    best
}

/// Effective divisors of degree `d` on `n` vertices, colexicographic in the
/// sorted multiset of vertex indices.
#[derive(Debug, Clone)]
pub struct EffectiveDivisors {
    n: usize,
    multiset: Vec<usize>,
    done: bool,
}

impl Iterator for EffectiveDivisors {
    type Item = Divisor;

    fn next(&mut self) -> Option<Divisor> {
        if self.done {
            return None;
        }
        let mut values = vec![0i64; self.n];
        for &v in &self.multiset {
            values[v] += 1;
        }
        let d = self.multiset.len();
        // Advance: bump the first position that can grow, reset those before it.
        let mut advanced = false;
        for i in 0..d {
            let cap = if i + 1 < d { self.multiset[i + 1] } else { self.n - 1 };
            if self.multiset[i] < cap {
                self.multiset[i] += 1;
                for slot in &mut self.multiset[..i] {
                    *slot = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(Divisor { values })
    }
}

pub fn enumerate_effective(g: &Multigraph, d: usize) -> EffectiveDivisors {
    EffectiveDivisors { n: g.num_vertices(), multiset: vec![0; d], done: g.num_vertices() == 0 }
}

pub fn enumerate_classes_with_effective(g: &Multigraph, d: i64, q: VertexId) -> Result<Vec<Divisor>> {
    ChipFiring::new(g)?.classes_with_effective(d, q)
}

pub fn chip_fire(g: &Multigraph, d: &Divisor, v: VertexId) -> Result<Divisor> {
    ChipFiring::new(g)?.chip_fire(d, v)
}

pub fn fire_set(g: &Multigraph, d: &Divisor, set: &[VertexId]) -> Result<Divisor> {
    ChipFiring::new(g)?.fire_set(d, set)
}

pub fn apply_script(g: &Multigraph, d: &Divisor, script: &FiringScript) -> Result<Divisor> {
    ChipFiring::new(g)?.apply_script(d, script)
}

pub fn dhar_unburnt(g: &Multigraph, d: &Divisor, q: VertexId) -> Result<Vec<VertexId>> {
    ChipFiring::new(g)?.dhar_unburnt(d, q)
}

pub fn q_reduce(g: &Multigraph, d: &Divisor, q: VertexId) -> Result<ReductionResult> {
    ChipFiring::new(g)?.q_reduce(d, q)
}

pub fn is_equivalent(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> Result<bool> {
    ChipFiring::new(g)?.is_equivalent(d1, d2)
}

pub fn effective_representative(g: &Multigraph, d: &Divisor) -> Result<Option<ReductionResult>> {
    ChipFiring::new(g)?.effective_representative(d)
}

pub fn has_effective_representative(g: &Multigraph, d: &Divisor) -> Result<bool> {
    ChipFiring::new(g)?.has_effective_representative(d)
}

/// Rank with loops subdivided first.
pub fn rank(g: &Multigraph, d: &Divisor) -> Result<i64> {
    rank_with(g, d, LoopConvention::Subdivide)
}

pub fn rank_with(g: &Multigraph, d: &Divisor, convention: LoopConvention) -> Result<i64> {
    d.check_len(g)?;
    let work = working_graph(g, convention);
    ChipFiring::new(&work)?.rank(&d.extended(work.num_vertices()))
}

pub fn rank_at_least(g: &Multigraph, d: &Divisor, r: i64, convention: LoopConvention) -> Result<bool> {
    d.check_len(g)?;
    let work = working_graph(g, convention);
    ChipFiring::new(&work)?.rank_at_least(&d.extended(work.num_vertices()), r)
}

/// `K = sum (deg(v) - 2) v`. Loop-free graphs only: callers decide whether to
/// strip or subdivide loops first.
pub fn canonical_divisor(g: &Multigraph) -> Result<Divisor> {
    if g.has_loops() {
        return Err(Error::LoopsPresent("canonical divisor needs a loop-free graph"));
    }
    g.require_connected()?;
    Ok(Divisor { values: g.degrees().into_iter().map(|d| d as i64 - 2).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_vertex_example() -> Multigraph {
        Multigraph::new(4, [(0, 1), (1, 3), (0, 3), (2, 3), (1, 2)]).unwrap()
    }

    fn path(n: usize) -> Multigraph {
        Multigraph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn degree_and_effectiveness() {
        let left = Divisor::new(vec![4, -1, 0, 5]);
        assert_eq!(left.deg(), 8);
        assert!(!left.is_effective());
        let right = Divisor::new(vec![5, 0, 1, 2]);
        assert_eq!(right.deg(), 8);
        assert!(right.is_effective());
        assert!(Divisor::zero(3).is_effective());
        assert_eq!(Divisor::zero(3).deg(), 0);
    }

    #[test]
    fn firing_vertex_three() {
        let g = four_vertex_example();
        let fired = chip_fire(&g, &Divisor::new(vec![4, -1, 0, 5]), 3).unwrap();
        assert_eq!(fired, Divisor::new(vec![5, 0, 1, 2]));
    }

    #[test]
    fn firing_is_inverted_by_the_complement() {
        let g = four_vertex_example();
        let d = Divisor::new(vec![4, -1, 0, 5]);
        for v in 0..4 {
            let fired = chip_fire(&g, &d, v).unwrap();
            let rest: Vec<_> = (0..4).filter(|&u| u != v).collect();
            assert_eq!(fire_set(&g, &fired, &rest).unwrap(), d);
        }
        assert_eq!(fire_set(&g, &d, &[0, 1, 2, 3]).unwrap(), d);
    }

    #[test]
    fn loop_firing_is_inert() {
        let g = Multigraph::new(1, [(0, 0)]).unwrap();
        assert_eq!(chip_fire(&g, &Divisor::new(vec![7]), 0).unwrap(), Divisor::new(vec![7]));
        let h = Multigraph::new(2, [(0, 0), (0, 1)]).unwrap();
        assert_eq!(chip_fire(&h, &Divisor::new(vec![3, 0]), 0).unwrap(), Divisor::new(vec![2, 1]));
    }

    #[test]
    fn bridge_moves_a_chip_across() {
        // Two triangles joined by the bridge 2-3.
        let g = Multigraph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
        let d = Divisor::point(6, 2, 1);
        assert_eq!(fire_set(&g, &d, &[0, 1, 2]).unwrap(), Divisor::point(6, 3, 1));
    }

    #[test]
    fn dhar_examples() {
        let p = path(2);
        assert_eq!(dhar_unburnt(&p, &Divisor::new(vec![0, 1]), 0).unwrap(), vec![1]);
        assert_eq!(dhar_unburnt(&p, &Divisor::new(vec![0, 0]), 0).unwrap(), Vec::<usize>::new());
        let g = four_vertex_example();
        // Brute force: the union of all legal sets avoiding 0 is the maximal one.
        let d = Divisor::new(vec![0, 0, 0, 3]);
        let mut union = vec![];
        for mask in 1u32..16 {
            if mask & 1 != 0 {
                continue;
            }
            let inside = |v: usize| mask & (1 << v) != 0;
            let legal = (0..4).filter(|&v| inside(v)).all(|v| {
                let out: u32 = g.neighbors(v).iter().filter(|&&(u, _)| !inside(u)).map(|&(_, m)| m).sum();
                d[v] >= out as i64
            });
            if legal {
                union.extend((0..4).filter(|&v| inside(v)));
            }
        }
        union.sort();
        union.dedup();
        assert_eq!(union, vec![3]);
        assert_eq!(dhar_unburnt(&g, &d, 0).unwrap(), union);
        assert_eq!(dhar_unburnt(&g, &Divisor::new(vec![0, -1, 0, 3]), 0), Err(Error::NegativeOffBase(1)));
    }

    #[test]
    fn reduction_of_reduced_is_trivial() {
        let g = four_vertex_example();
        let d = Divisor::new(vec![3, 1, 0, 0]);
        assert!(dhar_unburnt(&g, &d, 0).unwrap().is_empty());
        let red = q_reduce(&g, &d, 0).unwrap();
        assert_eq!(red.reduced, d);
        assert!(red.script.is_zero());
    }

    #[test]
    fn tree_vertices_are_equivalent() {
        let t = Multigraph::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let red = q_reduce(&t, &Divisor::point(5, 4, 1), 0).unwrap();
        assert_eq!(red.reduced, Divisor::point(5, 0, 1));
        assert_eq!(apply_script(&t, &Divisor::point(5, 4, 1), &red.script).unwrap(), red.reduced);
    }

    #[test]
    fn equivalence_basics() {
        let g = four_vertex_example();
        let d = Divisor::new(vec![2, -1, 3, 0]);
        let f = chip_fire(&g, &d, 2).unwrap();
        assert!(is_equivalent(&g, &d, &f).unwrap());
        assert!(!is_equivalent(&g, &d, &Divisor::new(vec![2, -1, 3, 1])).unwrap());
    }

    #[test]
    fn effective_representatives() {
        let g = four_vertex_example();
        assert!(has_effective_representative(&g, &Divisor::new(vec![0, 2, 0, 0])).unwrap());
        assert!(!has_effective_representative(&g, &Divisor::new(vec![0, 2, 0, -3])).unwrap());
        let w = effective_representative(&g, &Divisor::new(vec![4, -1, 0, 5])).unwrap().unwrap();
        assert!(w.reduced.is_effective());
    }

    #[test]
    fn rank_basics() {
        let g = four_vertex_example();
        assert_eq!(rank(&g, &Divisor::zero(4)).unwrap(), 0);
        assert_eq!(rank(&g, &Divisor::new(vec![0, 0, -1, 0])).unwrap(), -1);
        let k = canonical_divisor(&g).unwrap();
        assert_eq!(k, Divisor::new(vec![0, 1, 0, 1]));
        assert_eq!(rank(&g, &k).unwrap(), 1);
        // Degree above 2g - 2: rank is deg - g.
        assert_eq!(rank(&g, &Divisor::new(vec![3, 0, 0, 0])).unwrap(), 1);
        let t = path(4);
        assert_eq!(rank(&t, &Divisor::point(4, 2, 3)).unwrap(), 3);
    }

    #[test]
    fn canonical_divisor_rejects_loops() {
        let g = Multigraph::new(2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(matches!(canonical_divisor(&g), Err(Error::LoopsPresent(_))));
        let cubic = Multigraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let k = canonical_divisor(&cubic).unwrap();
        assert_eq!(k, Divisor::new(vec![1, 1, 1, 1]));
        assert_eq!(k.deg(), 2 * cubic.genus().unwrap() as i64 - 2);
    }

    #[test]
    fn effective_enumeration() {
        let g = four_vertex_example();
        let zero: Vec<_> = enumerate_effective(&g, 0).collect();
        assert_eq!(zero, vec![Divisor::zero(4)]);
        let deg2: Vec<_> = enumerate_effective(&g, 2).collect();
        assert_eq!(deg2.len(), 10);
        assert_eq!(deg2[0], Divisor::new(vec![2, 0, 0, 0]));
        assert_eq!(deg2[1], Divisor::new(vec![1, 1, 0, 0]));
        assert_eq!(deg2[2], Divisor::new(vec![0, 2, 0, 0]));
        assert_eq!(deg2[9], Divisor::new(vec![0, 0, 0, 2]));
        let mut sorted = deg2.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
    }

    #[test]
    fn banana_classes() {
        let banana = Multigraph::new(2, [(0, 1), (0, 1)]).unwrap();
        let effective: Vec<_> = enumerate_effective(&banana, 1).collect();
        assert_eq!(effective.len(), 2);
        let classes = enumerate_classes_with_effective(&banana, 1, 0).unwrap();
        assert_eq!(classes, vec![Divisor::new(vec![1, 0]), Divisor::new(vec![0, 1])]);
    }

    #[test]
    fn script_round_trips_through_json() {
        let s = FiringScript::new(vec![1, -2, 0]);
        assert_eq!(FiringScript::from_json(&s.to_json()).unwrap(), s);
        assert!(s.to_json().contains("\"counts\""));
        let d = Divisor::new(vec![3, -1]);
        assert!(d.to_json().contains("\"values\""));
        assert_eq!(Divisor::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = four_vertex_example();
        assert!(matches!(chip_fire(&g, &Divisor::zero(3), 0), Err(Error::LengthMismatch { expected: 4, got: 3 })));
        assert_eq!(q_reduce(&Multigraph::new(3, [(0, 1)]).unwrap(), &Divisor::zero(3), 0), Err(Error::Disconnected));
    }
}
