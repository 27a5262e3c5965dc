//! Registry of reproducible statements about the graph families: each claim
//! regenerates its graph from a family spec and re-derives the verdict.

use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use crate::brillnoether::{bn_report, gonality, is_hyperelliptic, rho, verify_certificate, BNOptions};
use crate::divisor::{self, ChipFiring, Divisor, FiringScript};
use crate::error::Result;
use crate::families::{graph_c, graph_c_prime, FamilySpec, JoinShape, LabeledGraph, NamedGraph};
use crate::graph::{Multigraph, VertexId};

/// Outcome of one check: whether it held and a human-readable trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub passed: bool,
    pub detail: String,
}

impl Evidence {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Evidence { passed, detail: detail.into() }
    }
}

type Check = Box<dyn Fn() -> Result<Evidence> + Send + Sync>;

pub struct Claim {
    pub id: String,
    /// Genus of the graph the claim is about.
    pub genus: usize,
    pub family: String,
    pub statement: String,
    check: Check,
}

impl std::fmt::Debug for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Claim").field("id", &self.id).field("genus", &self.genus).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimResult {
    pub id: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Claim {
    fn new(
        id: impl Into<String>,
        genus: usize,
        family: impl Into<String>,
        statement: impl Into<String>,
        check: impl Fn() -> Result<Evidence> + Send + Sync + 'static,
    ) -> Self {
        Claim { id: id.into(), genus, family: family.into(), statement: statement.into(), check: Box::new(check) }
    }

    /// Runs the check; errors count as failures.
    pub fn run(&self) -> ClaimResult {
        let start = Instant::now();
        let (passed, detail) = match (self.check)() {
            Ok(e) => (e.passed, e.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        ClaimResult { id: self.id.clone(), passed, detail, elapsed: start.elapsed() }
    }
}

fn generate(spec: &str) -> Result<LabeledGraph> {
    spec.parse::<FamilySpec>()?.generate()
}

fn point(g: &Multigraph, v: VertexId, k: i64) -> Divisor {
    Divisor::point(g.num_vertices(), v, k)
}

fn fmt_div(d: &Divisor) -> String {
    d.to_string()
}

fn fire_example() -> Result<Evidence> {
    let g = Multigraph::new(4, [(0, 1), (1, 3), (0, 3), (2, 3), (1, 2)])?;
    let d = Divisor::new(vec![4, -1, 0, 5]);
    let fired = divisor::chip_fire(&g, &d, 3)?;
    let expected = Divisor::new(vec![5, 0, 1, 2]);
    Ok(Evidence::new(fired == expected, format!("fire v3 on {d} -> {fired}, expected {expected}")))
}

fn expect_general(spec: &'static str, general: bool) -> impl Fn() -> Result<Evidence> {
    move || {
        let lg = generate(spec)?;
        let report = bn_report(&lg.graph, spec, &BNOptions::default())?;
        let pairs: Vec<String> = report
            .checks
            .iter()
            .map(|c| match &c.witness {
                Some(w) => format!(
                    "({},{}) violated by {} rank {}",
                    c.r,
                    c.d,
                    Divisor::new(w.clone()),
                    c.witness_rank.unwrap_or(-1)
                ),
                None => format!("({},{}) clean", c.r, c.d),
            })
            .collect();
        let verdict = if report.general { "general" } else { "special" };
        Ok(Evidence::new(report.general == general, format!("g={} {verdict}: {}", report.genus, pairs.join(", "))))
    }
}

fn genus7_certificate() -> Result<Evidence> {
    let lg = generate("genus7-max")?;
    let g = &lg.graph;
    let d = Divisor::from_terms(g.num_vertices(), &[(11, 3), (1, 1)]);
    let ok = verify_certificate(g, &d, 1)?;
    let rho_val = rho(7, 1, d.deg());
    let report = bn_report(g, "genus7-max", &BNOptions::default())?;
    Ok(Evidence::new(
        ok && rho_val < 0 && !report.general,
        format!(
            "3*v11 + v1 = {} rank>=1: {ok}; rho^1_4(7) = {rho_val}; bn-check special: {}",
            fmt_div(&d),
            !report.general
        ),
    ))
}

fn heawood_rank_two() -> Result<Evidence> {
    let g = generate("heawood")?.graph;
    let d = point(&g, 0, 7);
    let r = divisor::rank(&g, &d)?;
    let report = bn_report(&g, "heawood", &BNOptions::default())?;
    Ok(Evidence::new(
        r == 2 && !report.general && rho(8, 2, 7) < 0,
        format!("rank(7 v0) = {r}; rho^2_7(8) = {}; bn-check special: {}", rho(8, 2, 7), !report.general),
    ))
}

fn heawood_gonality() -> Result<Evidence> {
    let g = generate("heawood")?.graph;
    let gon = gonality(&g)?;
    Ok(Evidence::new(gon == 5, format!("gonality = {gon}")))
}

/// Hyperelliptic witness, or the rank-1 degree-3 divisor at `v` when the
/// family has a central triangle or cones at the trivalent centre.
fn sweep_check(lg: &LabeledGraph, g: usize, special_vertex: Option<VertexId>) -> Result<Evidence> {
    let graph = &lg.graph;
    match special_vertex {
        None => {
            let w = is_hyperelliptic(graph)?;
            let rho_val = rho(g as i64, 1, 2);
            Ok(match w {
                Some(w) => {
                    Evidence::new(rho_val < 0, format!("hyperelliptic witness {}; rho^1_2 = {rho_val}", fmt_div(&w)))
                }
                None => Evidence::new(false, "no degree-2 rank-1 divisor"),
            })
        }
        Some(v) => {
            let d = point(graph, v, 3);
            let ok = verify_certificate(graph, &d, 1)?;
            let rho_val = rho(g as i64, 1, 3);
            let hyper = is_hyperelliptic(graph)?.is_some();
            Ok(Evidence::new(
                ok && rho_val < 0 && !hyper,
                format!("3*v{v} rank>=1: {ok}; rho^1_3 = {rho_val}; hyperelliptic: {hyper}"),
            ))
        }
    }
}

fn loopful_sweep(g: usize) -> Result<Evidence> {
    let lg = graph_c(g)?;
    let v = lg.mark("central-triangle").first().copied();
    sweep_check(&lg, g, v)
}

fn loopfree_sweep(g: usize) -> Result<Evidence> {
    let lg = graph_c_prime(g)?;
    let v = if lg.marks.contains_key("central-triangle") { lg.mark("cone-apex").first().copied() } else { None };
    sweep_check(&lg, g, v)
}

fn doubled_pair_witness(spec: &'static str) -> impl Fn() -> Result<Evidence> {
    move || {
        let lg = generate(spec)?;
        let g = &lg.graph;
        let genus = g.genus()?;
        let pair = lg.mark("doubled-pairs");
        let d = Divisor::from_terms(g.num_vertices(), &[(pair[0], 2), (pair[1], 2)]);
        let ok = verify_certificate(g, &d, 1)?;
        let rho_val = rho(genus as i64, 1, 4);
        Ok(Evidence::new(
            ok && rho_val < 0,
            format!("2v+2w = {} rank>=1: {ok}; rho^1_4({genus}) = {rho_val}", fmt_div(&d)),
        ))
    }
}

/// Rank-1 certificate for a divisor built from marks on a join. The negative
/// Brill-Noether number is required only above genus 6, where the case applies.
fn join_certificate(spec: String, build: fn(&LabeledGraph) -> Divisor) -> impl Fn() -> Result<Evidence> {
    move || {
        let lg = generate(&spec)?;
        let g = &lg.graph;
        let genus = g.genus()?;
        let d = build(&lg);
        let ok = verify_certificate(g, &d, 1)?;
        let rho_val = rho(genus as i64, 1, d.deg());
        let needs_rho = genus > 6;
        let rho_note = if needs_rho { "" } else { " (genus <= 6: not a violation, rank only)" };
        Ok(Evidence::new(
            ok && (!needs_rho || rho_val < 0),
            format!("g={genus} D={} rank>=1: {ok}; rho^1_{} = {rho_val}{rho_note}", fmt_div(&d), d.deg()),
        ))
    }
}

fn four_at_root(lg: &LabeledGraph) -> Divisor {
    point(&lg.graph, lg.mark("piece-root")[0], 4)
}

fn five_at_root(lg: &LabeledGraph) -> Divisor {
    point(&lg.graph, lg.mark("piece-root")[0], 5)
}

fn triangle_three_two(lg: &LabeledGraph) -> Divisor {
    let t = lg.mark("triangle");
    Divisor::from_terms(lg.graph.num_vertices(), &[(t[0], 3), (t[1], 2)])
}

fn four_at_x(lg: &LabeledGraph) -> Divisor {
    point(&lg.graph, lg.mark("x")[0], 4)
}

/// Multiples of single tree vertices are all equivalent, `n <= 3`.
fn tree_chips_move(spec: &'static str) -> impl Fn() -> Result<Evidence> {
    move || {
        let lg = generate(spec)?;
        let g = &lg.graph;
        let cf = ChipFiring::new(g)?;
        let tree = lg.mark("tree");
        let mut checked = 0;
        for n in 1..=3 {
            let first = point(g, tree[0], n);
            for &w in tree {
                if !cf.is_equivalent(&first, &point(g, w, n))? {
                    return Ok(Evidence::new(false, format!("{n}*v{} !~ {n}*v{w}", tree[0])));
                }
                checked += 1;
            }
        }
        Ok(Evidence::new(true, format!("{checked} pairs over {} tree vertices", tree.len())))
    }
}

/// `4v - w` has an effective representative for each junction `v` and every `w` in its piece.
fn pinch_absorbs(spec: &'static str) -> impl Fn() -> Result<Evidence> {
    move || {
        let lg = generate(spec)?;
        let g = &lg.graph;
        let cf = ChipFiring::new(g)?;
        let mut checked = 0;
        for (label, block) in lg.marks.iter().filter(|(k, _)| k.starts_with("pinched-")) {
            let v = *block.iter().find(|v| lg.mark("pinch").contains(v)).expect("block holds its junction");
            for &w in block {
                let mut d = point(g, v, 4);
                d.add_chips(w, -1);
                if !cf.has_effective_representative(&d)? {
                    return Ok(Evidence::new(false, format!("{label}: 4*v{v} - v{w} not effective")));
                }
                checked += 1;
            }
        }
        Ok(Evidence::new(checked > 0, format!("{checked} divisors 4v - w effective")))
    }
}

/// Firing cycle vertex `l` (1-based) together with its pendant piece
/// `2n - l + 1` times carries `n v_1` to `n v_n`.
fn cycle_script(shape: JoinShape, piece: &'static str) -> impl Fn() -> Result<Evidence> {
    move || {
        let n = shape.piece_count();
        let lg = generate(&format!("case-join:{shape}:{n}:{piece}"))?;
        let g = &lg.graph;
        let mut counts = vec![0i64; g.num_vertices()];
        for l in 1..=n {
            let times = (2 * n - l + 1) as i64;
            counts[l - 1] = times;
            for &u in lg.mark(&format!("piece-{}", l - 1)) {
                counts[u] = times;
            }
        }
        let start = point(g, 0, n as i64);
        let end = divisor::apply_script(g, &start, &FiringScript::new(counts))?;
        let expected = point(g, n - 1, n as i64);
        Ok(Evidence::new(end == expected, format!("n={n}: {start} -> {end}")))
    }
}

/// `(2n) v ~ (2n) w` for every pair in `label`, `n = 1, 2`.
fn even_multiples_swap(spec: String, label: &'static str) -> impl Fn() -> Result<Evidence> {
    move || {
        let lg = generate(&spec)?;
        let g = &lg.graph;
        let cf = ChipFiring::new(g)?;
        let vs = lg.mark(label);
        for n in [1, 2] {
            for &v in vs {
                for &w in vs {
                    if !cf.is_equivalent(&point(g, v, 2 * n), &point(g, w, 2 * n))? {
                        return Ok(Evidence::new(false, format!("{}v{v} !~ {}v{w}", 2 * n, 2 * n)));
                    }
                }
            }
        }
        Ok(Evidence::new(true, format!("2v ~ 2w and 4v ~ 4w on {label} {vs:?}")))
    }
}

fn genus_of(spec: &str) -> usize {
    generate(spec).and_then(|lg| lg.genus()).unwrap_or(0)
}

/// All claims, with the two family sweeps over `sweep` (clipped to where each family applies).
/// Chooses the certificate divisor on a join.
type Placement = fn(&LabeledGraph) -> Divisor;

pub fn registry(sweep: RangeInclusive<usize>) -> Vec<Claim> {
    let mut out = vec![Claim::new(
        "fire-example",
        2,
        "4 vertices, 5 edges",
        "firing v3 maps (4,-1,0,5) to (5,0,1,2)",
        fire_example,
    )];

    for (spec, general) in
        [("tetrahedron", true), ("k33", true), ("cube", true), ("petersen", true), ("loop-of-loops:5", true)]
    {
        out.push(Claim::new(
            format!("{}-general", spec.replace(':', "-")),
            genus_of(spec),
            spec,
            "Brill-Noether general",
            expect_general(spec, general),
        ));
    }
    out.push(Claim::new(
        "genus7-max-special",
        7,
        "genus7-max",
        "3 v11 + v1 has rank 1 and degree 4",
        genus7_certificate,
    ));
    out.push(Claim::new("heawood-rank-two", 8, "heawood", "7v has rank exactly 2", heawood_rank_two));
    out.push(Claim::new("heawood-gonality", 8, "heawood", "gonality is 5", heawood_gonality));

    for g in (*sweep.start()).max(3)..=*sweep.end() {
        out.push(Claim::new(
            format!("loopful-special-g{g}"),
            g,
            format!("c:{g}"),
            "hyperelliptic, or 3v on the central triangle has rank 1",
            move || loopful_sweep(g),
        ));
    }
    for g in (*sweep.start()).max(6)..=*sweep.end() {
        out.push(Claim::new(
            format!("loopfree-special-g{g}"),
            g,
            format!("c-prime:{g}"),
            "hyperelliptic, or 3v at a cone apex has rank 1",
            move || loopfree_sweep(g),
        ));
    }
    for spec in ["loop-of-loops:7", "loop-of-loops:9"] {
        out.push(Claim::new(
            format!("{}-special", spec.replace(':', "-")),
            genus_of(spec),
            spec,
            "2v + 2w on a doubled edge has rank 1",
            doubled_pair_witness(spec),
        ));
    }

    let joins: [(JoinShape, Placement, &str); 7] = [
        (JoinShape::Edge, four_at_root, "4v at a piece root"),
        (JoinShape::CommonRoot, four_at_root, "4v at a piece root"),
        (JoinShape::K23Shape, four_at_root, "4v at a piece root"),
        (JoinShape::Square, four_at_root, "4v at a piece root"),
        (JoinShape::TwoTriangles, four_at_root, "4v at a piece root"),
        (JoinShape::Triangle, triangle_three_two, "3v + 2w on the triangle"),
        (JoinShape::Pentagon, five_at_root, "5v at a piece root"),
    ];
    for (shape, build, what) in joins {
        for m in 0..=1 {
            let spec = format!("case-join:{shape}:{}:a:{m}", shape.piece_count());
            out.push(Claim::new(
                format!("join-{shape}-a{m}"),
                genus_of(&spec),
                spec.clone(),
                format!("{what} has rank 1"),
                join_certificate(spec, build),
            ));
        }
    }
    out.push(Claim::new(
        "c12-double-prime-special",
        12,
        NamedGraph::C12DoublePrime.name(),
        "4v at a path vertex has rank 1",
        join_certificate(NamedGraph::C12DoublePrime.name().to_string(), four_at_x),
    ));

    for spec in ["a:1", "a:2", "b:2", "b:3"] {
        out.push(Claim::new(
            format!("tree-chips-move-{}", spec.replace(':', "")),
            genus_of(spec),
            spec,
            "n v ~ n w for tree vertices v, w",
            tree_chips_move(spec),
        ));
    }
    for spec in ["a:0", "a:1", "b:2", "b:3"] {
        out.push(Claim::new(
            format!("pinch-absorbs-{}", spec.replace(':', "")),
            genus_of(spec),
            spec,
            "4v - w is equivalent to an effective divisor",
            pinch_absorbs(spec),
        ));
    }
    for shape in [JoinShape::Triangle, JoinShape::Square, JoinShape::Pentagon] {
        for piece in ["a:0", "b:2"] {
            let n = shape.piece_count();
            out.push(Claim::new(
                format!("cycle-script-n{n}-{}", piece.replace(':', "")),
                genus_of(&format!("case-join:{shape}:{n}:{piece}")),
                format!("case-join:{shape}:{n}:{piece}"),
                "firing v_l (2n - l + 1) times carries n v_1 to n v_n",
                cycle_script(shape, piece),
            ));
        }
    }
    for (shape, label) in [(JoinShape::K23Shape, "k23-bivalent"), (JoinShape::TwoTriangles, "two-triangles-apex")] {
        for piece in ["a:0", "a:1", "b:2"] {
            let spec = format!("case-join:{shape}:{}:{piece}", shape.piece_count());
            out.push(Claim::new(
                format!("{shape}-even-swap-{}", piece.replace(':', "")),
                genus_of(&spec),
                spec.clone(),
                "(2n) v ~ (2n) w for the attachment vertices",
                even_multiples_swap(spec, label),
            ));
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_sorted() {
        let claims = registry(3..=14);
        let ids: Vec<&str> = claims.iter().map(|c| c.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn quick_claims_pass() {
        for id in ["fire-example", "tetrahedron-general", "cycle-script-n3-a0", "pinch-absorbs-a0"] {
            let claims = registry(3..=3);
            let claim = claims.iter().find(|c| c.id == id).unwrap();
            let result = claim.run();
            assert!(result.passed, "{id}: {}", result.detail);
        }
    }
}
