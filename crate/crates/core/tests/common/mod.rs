//! Independent oracles shared by the integration tests. Nothing here calls
//! the reduction or rank code under test.
#![allow(dead_code)]

use chipfire::families::{self, graph_c, graph_c_prime, loop_of_loops, named, NamedGraph};
use chipfire::{Divisor, Multigraph};
use num_rational::Ratio;
use rand::Rng;

pub fn four_vertex_example() -> Multigraph {
    Multigraph::new(4, [(0, 1), (1, 3), (0, 3), (2, 3), (1, 2)]).unwrap()
}

/// Loop-free graphs used by the Riemann-Roch and equivalence suites.
pub fn loop_free_suite() -> Vec<(&'static str, Multigraph)> {
    vec![
        ("four-vertex", four_vertex_example()),
        ("tetrahedron", families::named(NamedGraph::Tetrahedron).graph),
        ("k33", families::named(NamedGraph::K33).graph),
        ("cube", families::named(NamedGraph::Cube).graph),
        ("loop-of-loops-5", families::loop_of_loops(5).unwrap().graph),
    ]
}

/// Laplacian with loops ignored.
pub fn laplacian(g: &Multigraph) -> Vec<Vec<i64>> {
    let n = g.num_vertices();
    let mut l = vec![vec![0i64; n]; n];
    for &(u, v) in g.edges() {
        if u != v {
            l[u][v] -= 1;
            l[v][u] -= 1;
            l[u][u] += 1;
            l[v][v] += 1;
        }
    }
    l
}

/// Solves `A x = b` over the rationals by Gauss-Jordan elimination; `A` invertible.
fn solve(mut a: Vec<Vec<Ratio<i128>>>, mut b: Vec<Ratio<i128>>) -> Vec<Ratio<i128>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != Ratio::from_integer(0)).expect("invertible");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        b[col] /= p;
        for r in 0..n {
            if r != col && a[r][col] != Ratio::from_integer(0) {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                let sub = f * b[col];
                b[r] -= sub;
            }
        }
    }
    b
}

/// `d1 ~ d2` iff `d1 - d2` lies in the image of the Laplacian: the reduced
/// system `L_0 x = b` has an integral solution.
pub fn lattice_equivalent(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> bool {
    let n = g.num_vertices();
    let diff: Vec<i64> = (0..n).map(|v| d1[v] - d2[v]).collect();
    if diff.iter().sum::<i64>() != 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let l = laplacian(g);
    let a: Vec<Vec<Ratio<i128>>> =
        (1..n).map(|i| (1..n).map(|j| Ratio::from_integer(l[i][j] as i128)).collect()).collect();
    let b: Vec<Ratio<i128>> = (1..n).map(|i| Ratio::from_integer(-diff[i] as i128)).collect();
    solve(a, b).iter().all(|x| x.is_integer())
}

/// Effective divisors of degree `d` on `n` vertices.
pub fn effective_of_degree(n: usize, d: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d >= 0 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Whether some effective divisor of the same degree is lattice-equivalent.
pub fn brute_has_effective(g: &Multigraph, d: &Divisor) -> bool {
    effective_of_degree(g.num_vertices(), d.deg()).into_iter().any(|e| lattice_equivalent(g, d, &Divisor::new(e)))
}

/// Rank straight from the definition, for tiny graphs and degrees.
pub fn brute_rank(g: &Multigraph, d: &Divisor) -> i64 {
    if !brute_has_effective(g, d) {
        return -1;
    }
    let mut r = 0;
    loop {
        let k = r + 1;
        let all = effective_of_degree(g.num_vertices(), k).into_iter().all(|e| {
            let diff = Divisor::new(d.values().iter().zip(&e).map(|(a, b)| a - b).collect());
            brute_has_effective(g, &diff)
        });
        if !all {
            return r;
        }
        r = k;
    }
}

pub fn random_divisor(rng: &mut impl Rng, n: usize, degree: i64, spread: i64) -> Divisor {
    let mut values: Vec<i64> = (0..n).map(|_| rng.gen_range(-spread..=spread)).collect();
    let fix = degree - values.iter().sum::<i64>();
    let v = rng.gen_range(0..n);
    values[v] += fix;
    Divisor::new(values)
}

/// All connected simple graphs on `n` labelled vertices.
pub fn connected_simple_graphs(n: usize) -> Vec<Multigraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let g = Multigraph::new(n, edges).unwrap();
            g.is_connected().then_some(g)
        })
        .collect()
}

/// `|Aut|` by filtering all `n!` permutations.
pub fn brute_aut_order(g: &Multigraph) -> u128 {
    let n = g.num_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0;
    permute(&mut perm, 0, &mut |p| {
        if &g.relabel(p).unwrap() == g {
            count += 1;
        }
    });
    count
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Small graphs for the symmetry checks, all with at most 8 vertices.
pub fn small_suite() -> Vec<(String, Multigraph)> {
    let mut out: Vec<(String, Multigraph)> = vec![
        ("four-vertex".into(), four_vertex_example()),
        ("cone".into(), families::cone().graph),
        ("k23".into(), families::k23().graph),
        ("pinched-tetrahedron".into(), families::pinched_tetrahedron().graph),
        ("pinched-k33".into(), families::pinched_k33().graph),
        ("banana".into(), Multigraph::new(2, [(0, 1), (0, 1), (0, 1)]).unwrap()),
        ("c3".into(), graph_c(3).unwrap().graph),
        ("c4".into(), graph_c(4).unwrap().graph),
        ("c-prime-4".into(), graph_c_prime(4).unwrap().graph),
        ("c-prime-5".into(), graph_c_prime(5).unwrap().graph),
    ];
    for n in ["tetrahedron", "k33", "cube"] {
        let which = NamedGraph::ALL.into_iter().find(|x| x.name() == n).unwrap();
        out.push((n.into(), named(which).graph));
    }
    for g in 3..=5 {
        out.push((format!("loop-of-loops-{g}"), loop_of_loops(g).unwrap().graph));
    }
    out
}

/// Loop-free graphs of genus at least 2 for the quotient cross-check.
pub fn cross_check_suite() -> Vec<(String, Multigraph)> {
    let mut out: Vec<(String, Multigraph)> =
        small_suite().into_iter().filter(|(_, g)| !g.has_loops() && g.genus().unwrap() >= 2).collect();
    for n in [NamedGraph::Petersen, NamedGraph::Genus7Max, NamedGraph::Heawood, NamedGraph::C12DoublePrime] {
        out.push((n.name().into(), named(n).graph));
    }
    for g in 3..=9 {
        out.push((format!("c{g}-subdivided"), graph_c(g).unwrap().graph.subdivide_loops()));
        out.push((format!("c-prime-{g}"), graph_c_prime(g).unwrap().graph));
    }
    for g in 6..=8 {
        out.push((format!("loop-of-loops-{g}"), loop_of_loops(g).unwrap().graph));
    }
    out
}
