//! End-to-end analysis of one resolution graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::congruence::{equation_semi_invariance, search_congruence, CongruenceResult};
use crate::equations::{brieskorn_form, build_generic_system, BrieskornData, EquationSystem};
use crate::graph::{
    discriminant_invariants, graph_determinant, parse_graph, validate, GraphError, ResolutionGraph, ValidationReport,
};
use crate::group::{
    action_generators, check_free_codim1, generate_group, lattice_invariant_factors, FreenessCheck, GroupError,
    PhaseVector,
};
use crate::report::SCHEMA_VERSION;
use crate::semigroup::{admissible_monomials, check_semigroup_condition, EdgeCondition, SemigroupVerdict, DEFAULT_CAP};
use crate::splice::{linking_table, splice_from_resolution, LinkingTable, SpliceDiagram, SpliceError};

/// Largest group the report will enumerate element by element.
pub const DEFAULT_GROUP_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Admissible monomials enumerated per (node, edge).
    pub cap: usize,
    pub group_limit: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, group_limit: DEFAULT_GROUP_LIMIT }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageErrorKind {
    /// A size limit stopped the stage.
    Resource,
    Validation,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageError {
    pub stage: &'static str,
    pub kind: StageErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub ends: Vec<String>,
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpliceNodeSummary {
    pub id: String,
    /// Edge weight at this node, keyed by the far endpoint.
    pub weights: BTreeMap<String, u64>,
    pub node_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpliceSummary {
    pub nodes: Vec<SpliceNodeSummary>,
    pub ends: Vec<String>,
    pub text: String,
}

impl SpliceSummary {
    pub fn new(d: &SpliceDiagram) -> Self {
        let nodes = d
            .nodes()
            .iter()
            .map(|&v| SpliceNodeSummary {
                id: d.id(v).to_string(),
                weights: d
                    .incident(v)
                    .iter()
                    .map(|&e| (d.id(d.edge(e).other(v)).to_string(), d.edge_weight(v, e)))
                    .collect(),
                node_weight: d.node_weight_at(v),
            })
            .collect();
        let ends = d.ends().iter().map(|&w| d.id(w).to_string()).collect();
        Self { nodes, ends, text: d.serialize() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinkPair {
    pub ell: u64,
    pub ell_prime: u64,
}

/// `node → end → (ℓ, ℓ′)`
pub fn linking_summary(d: &SpliceDiagram, lt: &LinkingTable) -> BTreeMap<String, BTreeMap<String, LinkPair>> {
    d.nodes()
        .iter()
        .map(|&v| {
            let row = d
                .ends()
                .iter()
                .enumerate()
                .map(|(w, &end)| (d.id(end).to_string(), LinkPair { ell: lt.ell(v, w), ell_prime: lt.ell_prime(v, w) }))
                .collect();
            (d.id(v).to_string(), row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleCount {
    pub node: String,
    pub toward: String,
    pub count: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    pub ends: Vec<String>,
    pub generators: Vec<PhaseVector>,
    pub degenerate: bool,
    /// Present when the group was enumerated.
    pub order: Option<u64>,
    pub invariant_factors: Option<Vec<u64>>,
    pub lattice_invariant_factors: Vec<u64>,
    pub free_codim1: Option<FreenessCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceSummary {
    pub verdict: &'static str,
    #[serde(flatten)]
    pub result: CongruenceResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub graph: GraphSummary,
    pub validation: ValidationReport,
    #[serde(serialize_with = "opt_string")]
    pub determinant: Option<num_bigint::BigInt>,
    pub discriminant_invariants: Option<Vec<String>>,
    pub splice: Option<SpliceSummary>,
    pub linking: Option<BTreeMap<String, BTreeMap<String, LinkPair>>>,
    pub semigroup: Option<SemigroupVerdict>,
    pub admissible: Vec<AdmissibleCount>,
    pub group: Option<GroupSummary>,
    pub congruence: Option<CongruenceSummary>,
    pub equations: Option<EquationSystem>,
    pub equations_text: Option<String>,
    pub brieskorn: Option<BrieskornData>,
    pub notes: Vec<String>,
    pub errors: Vec<StageError>,
}

fn opt_string<S: serde::Serializer>(x: &Option<num_bigint::BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

impl PipelineReport {
    pub fn tripped_resource_guard(&self) -> bool {
        self.errors.iter().any(|e| e.kind == StageErrorKind::Resource)
    }

    /// A condition (semigroup or congruence) was decided negatively.
    pub fn condition_failed(&self) -> bool {
        self.semigroup.as_ref().is_some_and(|s| !s.holds) || self.congruence.as_ref().is_some_and(|c| !c.result.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `"1 ∉ ⟨2, 3⟩"` for the edge form of a failed condition.
pub fn describe_failure(c: &EdgeCondition) -> String {
    let mut gens = c.ell_prime.clone();
    gens.sort_unstable();
    gens.dedup();
    let gens: Vec<String> = gens.iter().map(ToString::to_string).collect();
    format!("{} ∉ ⟨{}⟩", c.edge_weight, gens.join(", "))
}

pub fn run_pipeline_file(path: &Path, opts: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| PipelineError::Io { path: path.display().to_string(), source })?;
    Ok(run_pipeline(&parse_graph(&text)?, opts))
}

/// Runs every stage that can run; stage failures are recorded in the report.
pub fn run_pipeline(g: &ResolutionGraph, opts: &PipelineOptions) -> PipelineReport {
    let mut r = PipelineReport {
        schema: SCHEMA_VERSION,
        graph: GraphSummary {
            vertices: g.len(),
            edges: g.edges().len(),
            ends: g.ends().iter().map(|&v| g.id(v).to_string()).collect(),
            nodes: g.nodes().iter().map(|&v| g.id(v).to_string()).collect(),
        },
        validation: validate(g),
        determinant: None,
        discriminant_invariants: None,
        splice: None,
        linking: None,
        semigroup: None,
        admissible: Vec::new(),
        group: None,
        congruence: None,
        equations: None,
        equations_text: None,
        brieskorn: None,
        notes: Vec::new(),
        errors: Vec::new(),
    };
    if !r.validation.passed() {
        let message = match g.require_valid() {
            Err(e) => e.to_string(),
            Ok(()) => "invalid graph".to_string(),
        };
        r.errors.push(StageError { stage: "validate", kind: StageErrorKind::Validation, message });
        return r;
    }
    r.determinant = Some(graph_determinant(g).expect("validated"));
    r.discriminant_invariants =
        Some(discriminant_invariants(g).expect("validated").iter().map(ToString::to_string).collect());

    let generators = group_stage(g, opts, &mut r);

    let d = match splice_from_resolution(g) {
        Ok(d) => d,
        Err(SpliceError::NoNodes) => {
            r.notes.push("no nodes: splice system empty".to_string());
            return r;
        }
        Err(e) => {
            r.errors.push(StageError { stage: "splice", kind: StageErrorKind::Resource, message: e.to_string() });
            return r;
        }
    };
    let lt = linking_table(&d);
    r.splice = Some(SpliceSummary::new(&d));
    r.linking = Some(linking_summary(&d, &lt));
    if d.nodes().len() == 1 {
        r.brieskorn = brieskorn_form(&d).ok();
    }

    let verdict = match check_semigroup_condition(&d, &lt) {
        Ok(v) => v,
        Err(e) => {
            r.errors.push(StageError { stage: "semigroup", kind: StageErrorKind::Resource, message: e.to_string() });
            return r;
        }
    };
    for &v in d.nodes() {
        for &e in d.incident(v) {
            match admissible_monomials(&d, &lt, v, e, opts.cap) {
                Ok(set) => r.admissible.push(AdmissibleCount {
                    node: set.node,
                    toward: set.toward,
                    count: set.monomials.len(),
                    truncated: set.truncated,
                }),
                Err(err) => {
                    r.errors.push(StageError {
                        stage: "monomials",
                        kind: StageErrorKind::Resource,
                        message: err.to_string(),
                    });
                    return r;
                }
            }
        }
    }
    let failure = verdict.failures().next().map(|fail| {
        format!(
            "semigroup condition fails: {} (node {}, edge toward {})",
            describe_failure(fail),
            fail.node,
            fail.toward
        )
    });
    r.semigroup = Some(verdict);
    if let Some(note) = failure {
        r.notes.push(note);
        return r;
    }

    let Some(generators) = generators else {
        return r;
    };
    let result = match search_congruence(&d, &lt, &generators, opts.cap) {
        Ok(c) => c,
        Err(e) => {
            r.errors.push(StageError { stage: "congruence", kind: StageErrorKind::Resource, message: e.to_string() });
            return r;
        }
    };
    let assignment = result.assignment();
    r.congruence = Some(CongruenceSummary { verdict: result.verdict(), result });
    let Some(choices) = assignment else {
        return r;
    };
    match build_generic_system(&d, &lt, &choices) {
        Ok(sys) => {
            let semi = equation_semi_invariance(&sys, &generators).expect("same ends");
            if !semi.iter().all(|s| s.passes) {
                r.errors.push(StageError {
                    stage: "equations",
                    kind: StageErrorKind::Internal,
                    message: "congruent choice produced an equation that is not semi-invariant".to_string(),
                });
            }
            r.equations_text = Some(sys.render());
            r.equations = Some(sys);
        }
        Err(e) => {
            r.errors.push(StageError { stage: "equations", kind: StageErrorKind::Internal, message: e.to_string() })
        }
    }
    r
}

fn group_stage(g: &ResolutionGraph, opts: &PipelineOptions, r: &mut PipelineReport) -> Option<Vec<PhaseVector>> {
    let gens = match action_generators(g) {
        Ok(gens) => gens,
        Err(e) => {
            r.errors.push(StageError { stage: "group", kind: StageErrorKind::Resource, message: e.to_string() });
            return None;
        }
    };
    if gens.degenerate {
        r.notes.push("no ends: the group acts on an empty set of variables".to_string());
    }
    let lattice = lattice_invariant_factors(&gens.generators).expect("equal lengths");
    let mut summary = GroupSummary {
        ends: gens.ends.clone(),
        generators: gens.generators.clone(),
        degenerate: gens.degenerate,
        order: None,
        invariant_factors: None,
        lattice_invariant_factors: lattice,
        free_codim1: None,
    };
    match gens.determinant.to_u64().filter(|&n| n <= opts.group_limit) {
        _ if gens.degenerate => {}
        Some(bound) => match generate_group(&gens.generators, bound) {
            Ok(a) => {
                if !gens.degenerate && a.order() != bound {
                    r.errors.push(StageError {
                        stage: "group",
                        kind: StageErrorKind::Internal,
                        message: GroupError::NotFaithful { order: a.order(), determinant: gens.determinant.clone() }
                            .to_string(),
                    });
                }
                summary.order = Some(a.order());
                summary.invariant_factors = Some(a.invariant_factors());
                summary.free_codim1 = Some(check_free_codim1(&a));
            }
            Err(e) => {
                r.errors.push(StageError { stage: "group", kind: StageErrorKind::Internal, message: e.to_string() })
            }
        },
        None => {
            r.notes.push(format!("group of order {} not enumerated (limit {})", gens.determinant, opts.group_limit))
        }
    }
    r.group = Some(summary);
    Some(gens.generators)
}

/// Human-readable rendering of a report.
pub fn render_text(r: &PipelineReport) -> String {
    let mut out = String::new();
    let g = &r.graph;
    writeln!(
        out,
        "graph: {} vertices, {} edges, ends [{}], nodes [{}]",
        g.vertices,
        g.edges,
        g.ends.join(", "),
        g.nodes.join(", ")
    )
    .unwrap();
    let v = &r.validation;
    writeln!(
        out,
        "valid: {} (connected {}, tree {}, negative definite {})",
        v.passed(),
        v.connected,
        v.tree,
        v.negative_definite
    )
    .unwrap();
    if let Some(det) = &r.determinant {
        writeln!(out, "d(Γ) = {det}").unwrap();
    }
    if let Some(inv) = &r.discriminant_invariants {
        writeln!(out, "discriminant group invariant factors: [{}]", inv.join(", ")).unwrap();
    }
    if let Some(s) = &r.splice {
        writeln!(out, "splice diagram:").unwrap();
        for n in &s.nodes {
            let ws: Vec<String> = n.weights.iter().map(|(k, w)| format!("{k}:{w}")).collect();
            writeln!(out, "  node {} weights {} d_v = {}", n.id, ws.join(" "), n.node_weight).unwrap();
        }
    }
    if let Some(link) = &r.linking {
        writeln!(out, "linking weights (ℓ, ℓ′):").unwrap();
        for (node, row) in link {
            let cells: Vec<String> = row.iter().map(|(e, p)| format!("{e}:({}, {})", p.ell, p.ell_prime)).collect();
            writeln!(out, "  {node}: {}", cells.join(" ")).unwrap();
        }
    }
    if let Some(s) = &r.semigroup {
        writeln!(out, "semigroup condition: {}", if s.holds { "holds" } else { "fails" }).unwrap();
    }
    for a in &r.admissible {
        let more = if a.truncated { "+" } else { "" };
        writeln!(out, "  admissible at {} toward {}: {}{more}", a.node, a.toward, a.count).unwrap();
    }
    if let Some(gs) = &r.group {
        if let Some(order) = gs.order {
            writeln!(
                out,
                "group order {order}, invariant factors {:?}",
                gs.invariant_factors.as_deref().unwrap_or(&[])
            )
            .unwrap();
        }
        for (id, gen) in gs.ends.iter().zip(&gs.generators) {
            writeln!(out, "  generator {id}: {gen}").unwrap();
        }
        if let Some(f) = &gs.free_codim1 {
            writeln!(out, "  free in codimension 1: {}", f.free).unwrap();
        }
    }
    if let Some(c) = &r.congruence {
        writeln!(out, "{}", c.verdict).unwrap();
        for n in &c.result.nodes {
            if let Some(choice) = &n.choice {
                let ms: Vec<String> = choice.iter().map(ToString::to_string).collect();
                writeln!(out, "  {}: {}", n.node, ms.join(", ")).unwrap();
            } else {
                writeln!(out, "  {}: no congruent choice", n.node).unwrap();
            }
        }
    }
    if let Some(b) = &r.brieskorn {
        let ps: Vec<String> = b.exponents.iter().map(ToString::to_string).collect();
        writeln!(out, "Brieskorn exponents ({})", ps.join(", ")).unwrap();
    }
    if let Some(text) = &r.equations_text {
        writeln!(out, "equations:").unwrap();
        for line in text.lines() {
            writeln!(out, "  {line}").unwrap();
        }
    }
    for n in &r.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    for e in &r.errors {
        writeln!(out, "error [{}]: {}", e.stage, e.message).unwrap();
    }
    out
}
