use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use splicekit::congruence::search_congruence;
use splicekit::equations::{build_generic_system, deformation_monomials, EquationSystem, WeightFilter};
use splicekit::graph::{parse_graph, validate, ResolutionGraph};
use splicekit::group::{
    action_generators, check_free_codim1, discriminant_action, lattice_invariant_factors, monomial_character,
    GroupError,
};
use splicekit::pipeline::{
    describe_failure, linking_summary, render_text, run_pipeline, PipelineOptions, SpliceSummary, DEFAULT_GROUP_LIMIT,
};
use splicekit::report::SCHEMA_VERSION;
use splicekit::scan::{scan, ScanError, ScanOptions, VerdictClass};
use splicekit::semigroup::{admissible_monomials, check_semigroup_condition, SemigroupError, DEFAULT_CAP};
use splicekit::splice::{linking_table, splice_from_resolution, LinkingTable, SpliceDiagram, SpliceError};

// Writes to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! out_raw {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_CONDITION: u8 = 4;

#[derive(Parser)]
#[command(name = "splicekit", version, about = "Splice diagrams and their semigroup and congruence conditions")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 4 when a semigroup or congruence condition fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Admissible monomials enumerated per (node, edge).
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the graph is a negative definite tree.
    Validate { file: PathBuf },
    /// Splice diagram, edge weights and linking weights.
    Splice { file: PathBuf },
    /// Semigroup condition at every node and edge.
    Semigroup { file: PathBuf },
    /// Admissible monomials at every node and edge.
    Monomials { file: PathBuf },
    /// Discriminant group generators, order and structure.
    Group { file: PathBuf },
    /// Splice-diagram equations, with deformation monomials up to a degree bound.
    Equations {
        file: PathBuf,
        #[arg(long)]
        degree_bound: Option<u64>,
    },
    /// Search for congruent admissible monomials.
    Congruence { file: PathBuf },
    /// Full analysis of one graph.
    Report { file: PathBuf },
    /// Tally verdicts over all small negative definite trees.
    Scan {
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        #[arg(long, default_value_t = -3, allow_negative_numbers = true)]
        weight_min: i64,
        /// Exemplar graphs listed per class.
        #[arg(long, default_value_t = 5)]
        exemplars: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self { code, message: message.to_string() }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(condition_failed) if condition_failed && cli.strict => ExitCode::from(EXIT_CONDITION),
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("splicekit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<ResolutionGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn diagram(g: &ResolutionGraph) -> Result<Option<(SpliceDiagram, LinkingTable)>, Failure> {
    match splice_from_resolution(g) {
        Ok(d) => {
            let lt = linking_table(&d);
            Ok(Some((d, lt)))
        }
        Err(SpliceError::NoNodes) => Ok(None),
        Err(SpliceError::Overflow) => Err(Failure::new(EXIT_RESOURCE, SpliceError::Overflow)),
        Err(e) => Err(Failure::new(EXIT_INPUT, e)),
    }
}

fn resource(e: SemigroupError) -> Failure {
    Failure::new(EXIT_RESOURCE, e)
}

fn emit<T: Serialize>(value: &T) {
    out!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

const NO_NODES: &str = "no nodes: splice system empty";

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { file } => cmd_validate(cli, file),
        Command::Splice { file } => cmd_splice(cli, file),
        Command::Semigroup { file } => cmd_semigroup(cli, file),
        Command::Monomials { file } => cmd_monomials(cli, file),
        Command::Group { file } => cmd_group(cli, file),
        Command::Equations { file, degree_bound } => cmd_equations(cli, file, *degree_bound),
        Command::Congruence { file } => cmd_congruence(cli, file),
        Command::Report { file } => cmd_report(cli, file),
        Command::Scan { max_vertices, weight_min, exemplars } => cmd_scan(cli, *max_vertices, *weight_min, *exemplars),
    }
}

fn cmd_validate(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    let report = validate(&g);
    if cli.json {
        emit(&json!({ "schema": SCHEMA_VERSION, "validation": report, "valid": report.passed() }));
    } else {
        out!("connected: {}\ntree: {}\nnegative definite: {}", report.connected, report.tree, report.negative_definite);
    }
    match g.require_valid() {
        Ok(()) => Ok(false),
        Err(e) => Err(Failure::new(EXIT_INPUT, e)),
    }
}

fn cmd_splice(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    g.require_valid().map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let Some((d, lt)) = diagram(&g)? else {
        if cli.json {
            emit(&json!({ "schema": SCHEMA_VERSION, "splice": null, "note": NO_NODES }));
        } else {
            out!("{NO_NODES}");
        }
        return Ok(false);
    };
    if cli.json {
        emit(&json!({
            "schema": SCHEMA_VERSION,
            "splice": SpliceSummary::new(&d),
            "linking": linking_summary(&d, &lt),
        }));
    } else {
        out_raw!("{}", d.serialize());
        for &v in d.nodes() {
            out!("d_{} = {}", d.id(v), lt.node_weight(v));
        }
    }
    Ok(false)
}

fn cmd_semigroup(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    g.require_valid().map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let Some((d, lt)) = diagram(&g)? else {
        out!("{NO_NODES}");
        return Ok(false);
    };
    let verdict = check_semigroup_condition(&d, &lt).map_err(resource)?;
    if cli.json {
        emit(&json!({ "schema": SCHEMA_VERSION, "semigroup": verdict }));
    } else {
        for c in &verdict.edges {
            let status = if c.holds() { "ok" } else { "FAIL" };
            out!(
                "{} → {}: d_ve = {} over ℓ′ {:?} [{}], d_v = {} over ℓ {:?} [{}]  {status}",
                c.node,
                c.toward,
                c.edge_weight,
                c.ell_prime,
                if c.edge_form.member { "member" } else { "not a member" },
                c.node_weight,
                c.ell,
                if c.node_form.member { "member" } else { "not a member" },
            );
        }
        match verdict.failures().next() {
            None => out!("semigroup condition holds"),
            Some(f) => out!("semigroup condition fails: {}", describe_failure(f)),
        }
    }
    Ok(!verdict.holds)
}

fn cmd_monomials(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    g.require_valid().map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let Some((d, lt)) = diagram(&g)? else {
        out!("{NO_NODES}");
        return Ok(false);
    };
    let mut sets = Vec::new();
    for &v in d.nodes() {
        for &e in d.incident(v) {
            sets.push(admissible_monomials(&d, &lt, v, e, cli.cap).map_err(resource)?);
        }
    }
    let empty = sets.iter().any(|s| s.is_empty());
    if cli.json {
        emit(&json!({ "schema": SCHEMA_VERSION, "variables": end_ids(&d), "admissible": sets }));
    } else {
        for s in &sets {
            let list: Vec<String> = s.monomials.iter().map(ToString::to_string).collect();
            let more = if s.truncated { ", …" } else { "" };
            out!("{} → {}: {{{}{more}}}", s.node, s.toward, list.join(", "));
        }
    }
    Ok(empty)
}

fn end_ids(d: &SpliceDiagram) -> Vec<String> {
    d.ends().iter().map(|&w| d.id(w).to_string()).collect()
}

fn group_failure(e: GroupError) -> Failure {
    match e {
        GroupError::Graph(e) => Failure::new(EXIT_INPUT, e),
        e => Failure::new(EXIT_RESOURCE, e),
    }
}

fn group_bound(g: &ResolutionGraph) -> Result<u64, Failure> {
    let gens = action_generators(g).map_err(group_failure)?;
    u64::try_from(&gens.determinant).ok().filter(|&n| n <= DEFAULT_GROUP_LIMIT).ok_or_else(|| {
        Failure::new(
            EXIT_RESOURCE,
            format!("group of order {} exceeds the enumeration limit {DEFAULT_GROUP_LIMIT}", gens.determinant),
        )
    })
}

fn cmd_group(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    let gens = action_generators(&g).map_err(group_failure)?;
    if gens.degenerate {
        let note = "no ends: the group acts on an empty set of variables";
        if cli.json {
            emit(&json!({ "schema": SCHEMA_VERSION, "ends": [], "generators": [], "degenerate": true, "note": note }));
        } else {
            out!("{note}");
        }
        return Ok(false);
    }
    let bound = group_bound(&g)?;
    let (gens, a) = discriminant_action(&g, bound).map_err(group_failure)?;
    let freeness = check_free_codim1(&a);
    let factors = a.invariant_factors();
    let lattice = lattice_invariant_factors(&gens.generators).map_err(group_failure)?;
    if cli.json {
        emit(&json!({
            "schema": SCHEMA_VERSION,
            "ends": gens.ends,
            "generators": gens.generators,
            "degenerate": false,
            "order": a.order(),
            "invariant_factors": factors,
            "lattice_invariant_factors": lattice,
            "free_codim1": freeness,
        }));
    } else {
        for (id, gen) in gens.ends.iter().zip(&gens.generators) {
            out!("{id}: {gen}");
        }
        out!("order {} = d(Γ), invariant factors {factors:?}", a.order());
        match &freeness.offender {
            None => out!("free in codimension 1"),
            Some(x) => out!("not free in codimension 1: {x} fixes a coordinate hyperplane"),
        }
    }
    Ok(false)
}

fn cmd_congruence(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    g.require_valid().map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let Some((d, lt)) = diagram(&g)? else {
        out!("{NO_NODES}");
        return Ok(false);
    };
    let gens = action_generators(&g).map_err(group_failure)?;
    let result = search_congruence(&d, &lt, &gens.generators, cli.cap).map_err(resource)?;
    if cli.json {
        emit(&json!({
            "schema": SCHEMA_VERSION,
            "verdict": result.verdict(),
            "variables": end_ids(&d),
            "congruence": result,
        }));
    } else {
        for n in &result.nodes {
            match &n.choice {
                Some(choice) => {
                    let ms: Vec<String> = choice.iter().map(ToString::to_string).collect();
                    out!("{}: {}  ({} character classes)", n.node, ms.join(", "), n.classes.len());
                }
                None if !n.empty_edges.is_empty() => {
                    out!("{}: no admissible monomial toward {}", n.node, n.empty_edges.join(", "))
                }
                None => out!("{}: no congruent choice", n.node),
            }
        }
        out!("{}", result.verdict());
    }
    Ok(!result.holds)
}

#[derive(Serialize)]
struct Deformations {
    node: String,
    equation: usize,
    monomials: Vec<splicekit::monomial::Monomial>,
}

fn cmd_equations(cli: &Cli, file: &Path, degree_bound: Option<u64>) -> Outcome {
    let g = load(file)?;
    g.require_valid().map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let Some((d, lt)) = diagram(&g)? else {
        out!("{NO_NODES}");
        return Ok(false);
    };
    let verdict = check_semigroup_condition(&d, &lt).map_err(resource)?;
    if let Some(f) = verdict.failures().next() {
        let note = format!("semigroup condition fails: {}", describe_failure(f));
        if cli.json {
            emit(&json!({ "schema": SCHEMA_VERSION, "system": null, "note": note }));
        } else {
            out!("{note}");
        }
        return Ok(true);
    }
    let gens = action_generators(&g).map_err(group_failure)?;
    let congruence = search_congruence(&d, &lt, &gens.generators, cli.cap).map_err(resource)?;
    let (choices, source) = match congruence.assignment() {
        Some(c) => (c, "congruence"),
        None => {
            let first = d
                .nodes()
                .iter()
                .map(|&v| {
                    d.incident(v)
                        .iter()
                        .map(|&e| Ok(admissible_monomials(&d, &lt, v, e, 1)?.monomials[0].clone()))
                        .collect::<Result<Vec<_>, SemigroupError>>()
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(resource)?;
            (first, "first-admissible")
        }
    };
    let system = build_generic_system(&d, &lt, &choices).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let deformations = match degree_bound {
        Some(bound) => deformations(&g, &d, &lt, &system, bound)?,
        None => Vec::new(),
    };
    if cli.json {
        emit(&json!({
            "schema": SCHEMA_VERSION,
            "source": source,
            "system": system,
            "text": system.render(),
            "deformations": deformations,
        }));
    } else {
        if source != "congruence" {
            out!("note: no congruent choice exists; using the first admissible monomial on each edge");
        }
        out_raw!("{}", system.render());
        for def in &deformations {
            let ms: Vec<String> = def.monomials.iter().map(ToString::to_string).collect();
            out!("deformations of equation {} ({}): {}", def.equation + 1, def.node, ms.join(", "));
        }
    }
    Ok(source != "congruence")
}

fn deformations(
    g: &ResolutionGraph,
    d: &SpliceDiagram,
    lt: &LinkingTable,
    system: &EquationSystem,
    bound: u64,
) -> Result<Vec<Deformations>, Failure> {
    let (_, a) = discriminant_action(g, group_bound(g)?).map_err(group_failure)?;
    Ok(system
        .equations
        .iter()
        .enumerate()
        .map(|(i, eq)| {
            let target = monomial_character(&a, &eq.terms[0].monomial);
            Deformations {
                node: eq.node.clone(),
                equation: i,
                monomials: deformation_monomials(d, lt, &a, &target, WeightFilter::Node(eq.node_index), bound),
            }
        })
        .collect())
}

fn cmd_report(cli: &Cli, file: &Path) -> Outcome {
    let g = load(file)?;
    let report = run_pipeline(&g, &PipelineOptions { cap: cli.cap, ..PipelineOptions::default() });
    if cli.json {
        out!("{}", report.to_json());
    } else {
        out_raw!("{}", render_text(&report));
    }
    if !report.validation.passed() {
        return Err(Failure::new(EXIT_INPUT, "graph is not a negative definite tree"));
    }
    if report.tripped_resource_guard() {
        return Err(Failure::new(EXIT_RESOURCE, "a resource limit stopped part of the analysis"));
    }
    Ok(report.condition_failed())
}

fn cmd_scan(cli: &Cli, max_vertices: usize, weight_min: i64, exemplars: usize) -> Outcome {
    let opts = ScanOptions { cap: cli.cap, exemplar_limit: Some(exemplars) };
    let summary = scan(max_vertices, weight_min, &opts).map_err(|e| match e {
        ScanError::TooManyVertices(_) => Failure::new(EXIT_RESOURCE, e),
        e => Failure::new(EXIT_USAGE, e),
    })?;
    if cli.json {
        emit(&summary);
    } else {
        out!("{} trees, at most {max_vertices} vertices, weights in [{weight_min}, -1]", summary.total);
        for class in VerdictClass::ALL {
            out!("  {:<16} {}", class.name(), summary.count(class));
        }
        for class in VerdictClass::ALL {
            for ex in &summary.exemplars[class.name()] {
                out!("{}: {}", class.name(), ex.code);
            }
        }
    }
    Ok(summary.count(VerdictClass::SemigroupFail) + summary.count(VerdictClass::CongruenceFail) > 0)
}
