//! Brill-Noether numbers, searches for special divisors, hyperellipticity and
//! gonality.
//!
//! Searches walk the q-reduced effective classes at vertex 0 of the working
//! graph (loops subdivided), so every witness is reported q-reduced at 0 on
//! that graph. The genus is the original graph's; subdivision leaves it fixed.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::divisor::{ChipFiring, Divisor};
use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// `rho^r_d(g) = g - (r + 1)(g - d + r)`.
pub fn rho(g: i64, r: i64, d: i64) -> i64 {
    g - (r + 1) * (g - d + r)
}

/// Every `(r, d)` with `1 <= r <= d <= 2g - 2` and negative `rho`.
pub fn negative_pairs(g: usize) -> Vec<(i64, i64)> {
    let g = g as i64;
    let mut out = Vec::new();
    for d in 1..=(2 * g - 2) {
        for r in 1..=d {
            if rho(g, r, d) < 0 {
                out.push((r, d));
            }
        }
    }
    out.sort_unstable();
    out
}

/// The smallest set of `(r, d)` pairs whose checks decide generality.
///
/// Adding a chip keeps the rank, so for each `r` only the largest degree
/// `d <= g - 1` with negative `rho` matters, and a pair is dropped when a
/// smaller `r` already reaches a degree at least as large. Degrees above
/// `g - 1` mirror to lower ones through Riemann-Roch.
pub fn violating_pairs(g: usize) -> Vec<(i64, i64)> {
    let gi = g as i64;
    let mut out: Vec<(i64, i64)> = Vec::new();
    for r in 1..gi {
        let Some(d) = (r..gi).rev().find(|&d| rho(gi, r, d) < 0) else {
            continue;
        };
        if out.iter().all(|&(_, d0)| d0 < d) {
            out.push((r, d));
        }
    }
    out
}

/// Limits on a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Fail with `BudgetExceeded` after this many classes in one pair search.
    pub max_classes: Option<u64>,
}

/// Graph the searches run on: loops subdivided, connectivity checked.
fn prepare(g: &Multigraph) -> Result<Multigraph> {
    g.require_connected()?;
    Ok(if g.has_loops() { g.subdivide_loops() } else { g.clone() })
}

/// First q-reduced (at 0) class of degree `d` with rank at least `r`, and the
/// number of classes examined.
fn search(cf: &ChipFiring<'_>, d: i64, r: i64, opts: SearchOptions) -> Result<(Option<Divisor>, u64)> {
    let mut found = None;
    let mut scanned = 0u64;
    let mut over_budget = false;
    cf.for_each_class(d, 0, |class| {
        scanned += 1;
        if opts.max_classes.is_some_and(|limit| scanned > limit) {
            over_budget = true;
            return ControlFlow::Break(());
        }
        if cf.rank_at_least(class, r).expect("class fits the graph") {
            found = Some(class.clone());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    if over_budget {
        return Err(Error::BudgetExceeded(opts.max_classes.unwrap_or_default()));
    }
    Ok((found, scanned))
}

/// A degree-`d` divisor of rank at least `r`, q-reduced at vertex 0 of the
/// loop-subdivided graph, or `None` when no such class exists.
pub fn exists_rank_at_least(g: &Multigraph, d: i64, r: i64) -> Result<Option<Divisor>> {
    exists_rank_at_least_with(g, d, r, SearchOptions::default())
}

pub fn exists_rank_at_least_with(g: &Multigraph, d: i64, r: i64, opts: SearchOptions) -> Result<Option<Divisor>> {
    let work = prepare(g)?;
    let cf = ChipFiring::new(&work)?;
    Ok(search(&cf, d, r, opts)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Clean,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub r: i64,
    pub d: i64,
    pub rho: i64,
    pub verdict: Verdict,
    pub classes_scanned: u64,
    /// Present when violated: q-reduced at 0 on the working graph.
    pub witness: Option<Vec<i64>>,
    pub witness_rank: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BNReport {
    pub graph_id: String,
    pub genus: usize,
    /// Vertices of the graph the search ran on (more than the input when loops were subdivided).
    pub working_vertices: usize,
    pub exhaustive: bool,
    pub checks: Vec<PairCheck>,
    pub general: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl BNReport {
    pub fn violations(&self) -> impl Iterator<Item = &PairCheck> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Violated)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BNOptions {
    /// Check every negative pair up to degree `2g - 2` instead of the minimal set.
    pub exhaustive: bool,
    /// Stop after the first violated pair; later pairs are not reported.
    pub stop_at_first_violation: bool,
    pub search: SearchOptions,
}

/// Brill-Noether generality over the minimal check set.
pub fn is_bn_general(g: &Multigraph) -> Result<BNReport> {
    bn_report(g, "graph", &BNOptions::default())
}

pub fn bn_report(g: &Multigraph, graph_id: &str, opts: &BNOptions) -> Result<BNReport> {
    let start = Instant::now();
    let genus = g.genus()?;
    if genus < 2 {
        return Err(Error::InvalidParameter(format!("genus {genus} < 2")));
    }
    let work = prepare(g)?;
    let cf = ChipFiring::new(&work)?;
    let pairs = if opts.exhaustive { negative_pairs(genus) } else { violating_pairs(genus) };
    let mut checks = Vec::with_capacity(pairs.len());
    for (r, d) in pairs {
        let (witness, scanned) = search(&cf, d, r, opts.search)?;
        let witness_rank = witness.as_ref().map(|w| cf.rank(w)).transpose()?;
        checks.push(PairCheck {
            r,
            d,
            rho: rho(genus as i64, r, d),
            verdict: if witness.is_some() { Verdict::Violated } else { Verdict::Clean },
            classes_scanned: scanned,
            witness: witness.map(Divisor::into_values),
            witness_rank,
        });
        if opts.stop_at_first_violation && checks.last().is_some_and(|c| c.verdict == Verdict::Violated) {
            break;
        }
    }
    let general = checks.iter().all(|c| c.verdict == Verdict::Clean);
    Ok(BNReport {
        graph_id: graph_id.to_string(),
        genus,
        working_vertices: work.num_vertices(),
        exhaustive: opts.exhaustive,
        checks,
        general,
        elapsed: start.elapsed(),
    })
}

/// A degree-2 rank-1 divisor on the loop-subdivided graph, if any.
pub fn is_hyperelliptic(g: &Multigraph) -> Result<Option<Divisor>> {
    let genus = g.genus()?;
    if genus < 2 {
        return Err(Error::InvalidParameter(format!("genus {genus} < 2")));
    }
    exists_rank_at_least(g, 2, 1)
}

/// Smallest degree carrying a rank-1 divisor. At most `g + 1` by Riemann-Roch.
pub fn gonality(g: &Multigraph) -> Result<i64> {
    let work = prepare(g)?;
    let cf = ChipFiring::new(&work)?;
    let genus = g.genus()? as i64;
    for d in 1..=genus + 1 {
        if search(&cf, d, 1, SearchOptions::default())?.0.is_some() {
            return Ok(d);
        }
    }
    unreachable!("every divisor of degree g + 1 has rank at least 1")
}

/// Whether `rank(divisor) >= r`, loops subdivided.
pub fn verify_certificate(g: &Multigraph, divisor: &Divisor, r: i64) -> Result<bool> {
    crate::divisor::rank_at_least(g, divisor, r, crate::divisor::LoopConvention::Subdivide)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Multigraph {
        Multigraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(3, 1, 2), -1);
        assert_eq!(rho(8, 2, 7), -1);
        for g in 0..10 {
            for d in 0..=g {
                assert_eq!(rho(g, 0, d), d);
            }
        }
    }

    #[test]
    fn check_sets() {
        assert_eq!(violating_pairs(6), vec![(1, 3), (2, 5)]);
        assert_eq!(violating_pairs(8), vec![(1, 4), (2, 7)]);
        assert_eq!(violating_pairs(2), vec![(1, 1)]);
        for g in 2..30 {
            for (r, d) in violating_pairs(g) {
                assert!(rho(g as i64, r, d) < 0);
                assert!(d < g as i64);
            }
        }
    }

    #[test]
    fn tetrahedron_is_general() {
        let report = is_bn_general(&k4()).unwrap();
        assert!(report.general);
        assert_eq!(report.checks.len(), 1);
        assert!(is_hyperelliptic(&k4()).unwrap().is_none());
        assert_eq!(gonality(&k4()).unwrap(), 3);
    }

    #[test]
    fn banana_is_hyperelliptic() {
        let banana = Multigraph::new(2, [(0, 1), (0, 1), (0, 1)]).unwrap();
        let w = is_hyperelliptic(&banana).unwrap().unwrap();
        assert_eq!(w.deg(), 2);
        assert!(verify_certificate(&banana, &w, 1).unwrap());
        // Genus 2 has no negative pair above degree 1, so hyperelliptic is still general.
        assert!(is_bn_general(&banana).unwrap().general);
    }

    #[test]
    fn trees_have_gonality_one() {
        let path = Multigraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(gonality(&path).unwrap(), 1);
    }

    #[test]
    fn zero_divisor_is_not_rank_one() {
        assert!(!verify_certificate(&k4(), &Divisor::zero(4), 1).unwrap());
    }

    #[test]
    fn budget_hard_fails() {
        let opts = BNOptions { search: SearchOptions { max_classes: Some(1) }, ..Default::default() };
        assert!(matches!(bn_report(&k4(), "k4", &opts), Err(Error::BudgetExceeded(1))));
    }

    #[test]
    fn loops_are_subdivided_for_searches() {
        // Two loops on an edge: genus 2, hyperelliptic.
        let g = Multigraph::new(2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        let w = is_hyperelliptic(&g).unwrap().unwrap();
        assert_eq!(w.len(), 4);
    }
}
