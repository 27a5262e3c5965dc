use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chipfire::brillnoether::{self, bn_report, SearchOptions};
use chipfire::claims;
use chipfire::divisor::{self, LoopConvention};
use chipfire::symmetry;
use chipfire::{BNOptions, ChipFiring, Divisor, FamilySpec, FiringScript, Multigraph};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "chipfire", version, about = "Chip-firing, divisor rank and Brill-Noether checks on multigraphs")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Leave out the trailing timing section.
    #[arg(long, global = true)]
    no_timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Loops {
    Subdivide,
    Inert,
}

/// GRAPH arguments are a graph file, or `family:<spec>` to generate one
/// (for example `family:c-prime:6`). DIVISOR arguments are a divisor file or
/// an inline comma-separated list such as `4,-1,0,5`.
#[derive(Subcommand)]
enum Command {
    /// Generate a family member and write it as a graph file.
    Gen {
        spec: String,
        /// Output path; a `.marks.json` sidecar is written next to it.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fire a vertex, or apply a firing script.
    Fire {
        graph: String,
        divisor: String,
        /// Vertex to fire.
        #[arg(long, conflicts_with = "script")]
        vertex: Option<usize>,
        /// Firing script file, or inline comma-separated counts.
        #[arg(long)]
        script: Option<String>,
    },
    /// Reduce a divisor with respect to the base vertex.
    Reduce {
        graph: String,
        divisor: String,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Decide linear equivalence of two divisors.
    Equiv {
        graph: String,
        first: String,
        second: String,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Compute the rank of a divisor.
    Rank {
        graph: String,
        divisor: String,
        #[arg(long, value_enum, default_value_t = Loops::Subdivide)]
        loops: Loops,
    },
    /// Check that a divisor has rank at least R; exit 1 if not.
    Verify {
        graph: String,
        divisor: String,
        #[arg(long)]
        rank: i64,
    },
    /// Brill-Noether report.
    BnCheck {
        graph: String,
        /// Check every pair with negative rho instead of the minimal set.
        #[arg(long)]
        exhaustive: bool,
        /// Give up (exit 2) after visiting this many classes in one search.
        #[arg(long)]
        max_classes: Option<u64>,
    },
    /// Look for a degree 2 divisor of rank 1.
    Hyperelliptic { graph: String },
    /// Smallest degree of a rank 1 divisor.
    Gonality { graph: String },
    /// Vertex automorphism group order.
    Aut {
        graph: String,
        /// Print every automorphism.
        #[arg(long)]
        list: bool,
        /// Print the involutions and any whose quotient is a tree.
        #[arg(long)]
        involutions: bool,
    },
    /// Write the graph in DOT format.
    ExportDot {
        graph: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in claim suite.
    #[command(alias = "paper-verify")]
    VerifyClaims {
        /// Genus range for the family sweeps, as `a..b` (inclusive).
        #[arg(long, default_value = "3..14", value_parser = parse_range)]
        genus: RangeInclusive<usize>,
        /// Only run claims whose id contains this text.
        #[arg(long)]
        claim: Option<String>,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

/// Bad input, or a search over budget. Exits with status 2.
struct Failure(String);

impl From<chipfire::Error> for Failure {
    fn from(e: chipfire::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

/// Body lines for text mode, a value for machine mode, and whether the check held.
struct Report {
    lines: Vec<String>,
    value: Value,
    ok: bool,
    timings: Vec<(String, Duration)>,
}

impl Report {
    fn new(lines: Vec<String>, value: Value) -> Self {
        Report { lines, value, ok: true, timings: Vec::new() }
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))
}

fn load_graph(arg: &str) -> Result<Multigraph, Failure> {
    if let Some(spec) = arg.strip_prefix("family:") {
        return Ok(spec.parse::<FamilySpec>()?.generate()?.graph);
    }
    Ok(Multigraph::from_json(&read_text(arg)?)?)
}

fn inline_ints(arg: &str) -> Option<Vec<i64>> {
    if Path::new(arg).exists() {
        return None;
    }
    arg.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn load_divisor(arg: &str, g: &Multigraph) -> Result<Divisor, Failure> {
    let d = match inline_ints(arg) {
        Some(values) => Divisor::new(values),
        None => Divisor::from_json(&read_text(arg)?)?,
    };
    if d.len() != g.num_vertices() {
        return Err(chipfire::Error::LengthMismatch { expected: g.num_vertices(), got: d.len() }.into());
    }
    Ok(d)
}

fn load_script(arg: &str) -> Result<FiringScript, Failure> {
    match inline_ints(arg) {
        Some(counts) => Ok(FiringScript::new(counts)),
        None => Ok(FiringScript::from_json(&read_text(arg)?)?),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn sidecar(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.marks.json"))
}

fn gen(spec: &str, out: Option<&Path>) -> Outcome {
    let lg = spec.parse::<FamilySpec>()?.generate()?;
    let json = lg.graph.to_json();
    let genus = lg.genus()?;
    let summary = json!({
        "spec": spec,
        "vertices": lg.graph.num_vertices(),
        "edges": lg.graph.num_edges(),
        "genus": genus,
    });
    let mut lines =
        vec![format!("{spec}: {} vertices, {} edges, genus {genus}", lg.graph.num_vertices(), lg.graph.num_edges())];
    match out {
        Some(path) => {
            write_file(path, &json)?;
            let marks = sidecar(path);
            write_file(&marks, &lg.marks_json())?;
            lines.push(format!("wrote {} and {}", path.display(), marks.display()));
            Ok(Report::new(lines, summary))
        }
        None => {
            let graph: Value = serde_json::from_str(&json).expect("graph json");
            let marks: Value = serde_json::from_str(&lg.marks_json()).expect("marks json");
            Ok(Report::new(vec![json], json!({"summary": summary, "graph": graph, "labels": marks})))
        }
    }
}

fn fire(graph: &str, divisor: &str, vertex: Option<usize>, script: Option<&str>) -> Outcome {
    let g = load_graph(graph)?;
    let d = load_divisor(divisor, &g)?;
    let cf = ChipFiring::new(&g)?;
    let (how, result) = match (vertex, script) {
        (Some(v), None) => (format!("fire v{v}"), cf.chip_fire(&d, v)?),
        (None, Some(s)) => {
            let s = load_script(s)?;
            (format!("script {:?}", s.counts()), cf.apply_script(&d, &s)?)
        }
        _ => return Err(Failure("give exactly one of --vertex or --script".into())),
    };
    Ok(Report::new(vec![format!("{how}: {d} -> {result}")], json!({"input": d.values(), "result": result.values()})))
}

fn reduce(graph: &str, divisor: &str, base: usize) -> Outcome {
    let g = load_graph(graph)?;
    let d = load_divisor(divisor, &g)?;
    let r = ChipFiring::new(&g)?.q_reduce(&d, base)?;
    Ok(Report::new(
        vec![format!("reduced at v{base}: {}", r.reduced), format!("script: {:?}", r.script.counts())],
        json!({"base": base, "reduced": r.reduced.values(), "script": r.script.counts()}),
    ))
}

fn equiv(graph: &str, first: &str, second: &str, base: usize) -> Outcome {
    let g = load_graph(graph)?;
    let (d1, d2) = (load_divisor(first, &g)?, load_divisor(second, &g)?);
    let cf = ChipFiring::new(&g)?;
    g.check_vertex(base)?;
    let (r1, r2) = (cf.q_reduce(&d1, base)?, cf.q_reduce(&d2, base)?);
    let same = r1.reduced == r2.reduced;
    Ok(Report::new(
        vec![
            format!("{d1} reduces to {}", r1.reduced),
            format!("{d2} reduces to {}", r2.reduced),
            format!("equivalent: {same}"),
        ],
        json!({"equivalent": same, "reduced": [r1.reduced.values(), r2.reduced.values()]}),
    ))
}

fn rank(graph: &str, divisor: &str, loops: Loops) -> Outcome {
    let g = load_graph(graph)?;
    let d = load_divisor(divisor, &g)?;
    let conv = match loops {
        Loops::Subdivide => LoopConvention::Subdivide,
        Loops::Inert => LoopConvention::Inert,
    };
    let r = divisor::rank_with(&g, &d, conv)?;
    Ok(Report::new(vec![format!("rank {d} = {r}")], json!({"divisor": d.values(), "rank": r})))
}

fn verify(graph: &str, divisor: &str, r: i64) -> Outcome {
    let g = load_graph(graph)?;
    let d = load_divisor(divisor, &g)?;
    let ok = brillnoether::verify_certificate(&g, &d, r)?;
    let mut report = Report::new(
        vec![format!("rank {d} >= {r}: {}", if ok { "verified" } else { "refuted" })],
        json!({"divisor": d.values(), "rank_at_least": r, "verified": ok}),
    );
    report.ok = ok;
    Ok(report)
}

fn bn_check(graph: &str, exhaustive: bool, max_classes: Option<u64>) -> Outcome {
    let g = load_graph(graph)?;
    let opts = BNOptions { exhaustive, search: SearchOptions { max_classes }, ..Default::default() };
    let report = bn_report(&g, graph, &opts)?;
    let mut lines = vec![format!(
        "{}: genus {}, {}",
        report.graph_id,
        report.genus,
        if report.general { "general" } else { "not general" }
    )];
    for c in &report.checks {
        let tail = match &c.witness {
            Some(w) => {
                format!("violated, witness {} of rank {}", Divisor::new(w.clone()), c.witness_rank.unwrap_or(-1))
            }
            None => "clean".into(),
        };
        lines.push(format!("  r={} d={} rho={}: {tail} ({} classes)", c.r, c.d, c.rho, c.classes_scanned));
    }
    let value = serde_json::to_value(&report).expect("report json");
    let mut out = Report::new(lines, value);
    out.timings.push(("search".into(), report.elapsed));
    Ok(out)
}

fn hyperelliptic(graph: &str) -> Outcome {
    let g = load_graph(graph)?;
    let w = brillnoether::is_hyperelliptic(&g)?;
    let line = match &w {
        Some(d) => format!("hyperelliptic: degree 2 rank 1 witness {d}"),
        None => "not hyperelliptic".into(),
    };
    Ok(Report::new(vec![line], json!({"hyperelliptic": w.is_some(), "witness": w.map(|d| d.into_values())})))
}

fn gonality(graph: &str) -> Outcome {
    let g = load_graph(graph)?;
    let k = brillnoether::gonality(&g)?;
    Ok(Report::new(vec![format!("gonality {k}")], json!({"gonality": k})))
}

fn aut(graph: &str, list: bool, involutions: bool) -> Outcome {
    let g = load_graph(graph)?;
    let order = symmetry::aut_order(&g)?;
    let mut lines = vec![format!("|Aut| = {order}")];
    let mut value = json!({"order": order.to_string()});
    if list {
        let all = symmetry::automorphisms(&g)?;
        lines.extend(all.iter().map(|p| format!("  {:?}", p.image())));
        value["automorphisms"] = json!(all.iter().map(|p| p.image().to_vec()).collect::<Vec<_>>());
    }
    if involutions {
        let invs = symmetry::involutions(&g)?;
        lines.push(format!("involutions: {}", invs.len()));
        lines.extend(invs.iter().map(|p| format!("  {:?}", p.image())));
        value["involutions"] = json!(invs.iter().map(|p| p.image().to_vec()).collect::<Vec<_>>());
        if !g.has_loops() && g.genus()? >= 2 {
            let tree = symmetry::find_tree_quotient_involution(&g)?;
            lines.push(match &tree {
                Some(p) => format!("tree quotient under {:?}", p.image()),
                None => "no involution has a tree quotient".into(),
            });
            value["tree_quotient"] = json!(tree.map(|p| p.image().to_vec()));
        }
    }
    Ok(Report::new(lines, value))
}

fn export_dot(graph: &str, out: Option<&Path>) -> Outcome {
    let g = load_graph(graph)?;
    let dot = g.to_dot();
    match out {
        Some(path) => {
            write_file(path, &dot)?;
            Ok(Report::new(vec![format!("wrote {}", path.display())], json!({"path": path.display().to_string()})))
        }
        None => Ok(Report::new(vec![dot.trim_end().to_string()], json!({"dot": dot}))),
    }
}

fn verify_claims(genus: RangeInclusive<usize>, filter: Option<&str>) -> Outcome {
    let selected: Vec<_> =
        claims::registry(genus).into_iter().filter(|c| filter.is_none_or(|f| c.id.contains(f))).collect();
    if selected.is_empty() {
        return Err(Failure("no claim matches the filter".into()));
    }
    let results: Vec<_> = selected.iter().map(|c| (c, c.run())).collect();
    let width = results.iter().map(|(c, _)| c.id.len()).max().unwrap_or(0);
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (claim, r) in &results {
        let status = if r.passed { "pass" } else { "FAIL" };
        lines.push(format!("{status} {:width$}  {}", r.id, r.detail));
        rows.push(json!({
            "id": r.id, "family": claim.family, "genus": claim.genus,
            "statement": claim.statement, "passed": r.passed, "detail": r.detail,
        }));
        timings.push((r.id.clone(), r.elapsed));
    }
    let passed = results.iter().filter(|(_, r)| r.passed).count();
    lines.push(format!("{passed} of {} claims passed", results.len()));
    let mut report = Report::new(lines, json!({"claims": rows, "passed": passed, "total": results.len()}));
    report.ok = passed == results.len();
    report.timings = timings;
    Ok(report)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen { spec, out } => gen(spec, out.as_deref()),
        Command::Fire { graph, divisor, vertex, script } => fire(graph, divisor, *vertex, script.as_deref()),
        Command::Reduce { graph, divisor, base } => reduce(graph, divisor, *base),
        Command::Equiv { graph, first, second, base } => equiv(graph, first, second, *base),
        Command::Rank { graph, divisor, loops } => rank(graph, divisor, *loops),
        Command::Verify { graph, divisor, rank } => verify(graph, divisor, *rank),
        Command::BnCheck { graph, exhaustive, max_classes } => bn_check(graph, *exhaustive, *max_classes),
        Command::Hyperelliptic { graph } => hyperelliptic(graph),
        Command::Gonality { graph } => gonality(graph),
        Command::Aut { graph, list, involutions } => aut(graph, *list, *involutions),
        Command::ExportDot { graph, out } => export_dot(graph, out.as_deref()),
        Command::VerifyClaims { genus, claim } => verify_claims(genus.clone(), claim.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match run(&cli) {
        Ok(r) => r,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    report.timings.push(("total".into(), start.elapsed()));
    let ms = |d: &Duration| d.as_secs_f64() * 1e3;
    match cli.format {
        Format::Text => {
            for line in &report.lines {
                println!("{line}");
            }
            if !cli.no_timings {
                println!("--- timings");
                for (name, d) in &report.timings {
                    println!("{name}: {:.3} ms", ms(d));
                }
            }
        }
        Format::Machine => {
            let mut doc = json!({"result": report.value, "ok": report.ok});
            if !cli.no_timings {
                let t: serde_json::Map<String, Value> =
                    report.timings.iter().map(|(k, d)| (k.clone(), json!(ms(d)))).collect();
                doc["timings_ms"] = Value::Object(t);
            }
            println!("{doc}");
        }
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
