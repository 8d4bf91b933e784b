//! Acceptance suite: one PASS/FAIL line per criterion. Every comparison is
//! exact (tolerance zero). Exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use splicekit::congruence::{search_congruence, CongruenceResult};
use splicekit::equations::{brieskorn_form, brieskorn_system, hamm_check};
use splicekit::graph::{discriminant_invariants, graph_determinant};
use splicekit::group::{action_generators, check_free_codim1, discriminant_action, generate_group, PhaseVector};
use splicekit::linalg::{determinant, IntMatrix, RationalMatrix};
use splicekit::scan::enumerate_trees;
use splicekit::semigroup::{admissible_monomials, check_semigroup_condition, semigroup_member, DEFAULT_CAP};
use splicekit::{linking_table, splice_from_resolution, Monomial, ResolutionGraph};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn z(e: [u64; 4]) -> Monomial {
    Monomial::new(e.to_vec())
}

/// Union over all congruent character classes of the monomials on one edge.
fn congruent_on_edge(r: &CongruenceResult, node: &str, toward: &str) -> BTreeSet<Monomial> {
    let n = r.nodes.iter().find(|n| n.node == node).expect("node present");
    let k = n.edges.iter().position(|e| e == toward).expect("edge present");
    n.classes.iter().flat_map(|c| c.monomials[k].iter().cloned()).collect()
}

fn main_example() -> Outcome {
    let g = fixture(MAIN);
    let d = splice_from_resolution(&g).map_err(err)?;
    let lt = linking_table(&d);
    for (node, expected) in [("v1", [("w1", 2), ("w2", 2), ("v2", 8)]), ("v2", [("v1", 8), ("w3", 2), ("w4", 2)])] {
        let v = d.node_index(node).map_err(err)?;
        for (toward, weight) in expected {
            let e = d.edge_toward(v, toward).map_err(err)?;
            ensure!(d.edge_weight(v, e) == weight, "weight at {node} toward {toward} is {}", d.edge_weight(v, e));
        }
    }
    ensure!(lt.ell_by_id(&d, "v1", "w1") == Some((16, 1)), "ℓ, ℓ′ for v1,w1: {:?}", lt.ell_by_id(&d, "v1", "w1"));
    ensure!(lt.ell_by_id(&d, "v1", "w3") == Some((8, 2)), "ℓ, ℓ′ for v1,w3: {:?}", lt.ell_by_id(&d, "v1", "w3"));

    let det = graph_determinant(&g).map_err(err)?;
    ensure!(det == BigInt::from(16) && cofactor_det(&negated_form(&g)) == det, "d(Γ) = {det}");

    let gens = action_generators(&g).map_err(err)?.generators;
    let rows = [
        [(0, 1), (1, 2), (1, 4), (1, 4)],
        [(1, 2), (0, 1), (1, 4), (1, 4)],
        [(1, 4), (1, 4), (0, 1), (1, 2)],
        [(1, 4), (1, 4), (1, 2), (0, 1)],
    ];
    let expected: Vec<PhaseVector> = rows.iter().map(|r| PhaseVector::from_fractions(r)).collect();
    ensure!(gens == expected, "generators {gens:?}");

    let v1 = d.node_index("v1").map_err(err)?;
    let admissible = |toward: &str| -> Result<Vec<Monomial>, String> {
        let e = d.edge_toward(v1, toward).map_err(err)?;
        Ok(admissible_monomials(&d, &lt, v1, e, DEFAULT_CAP).map_err(err)?.monomials)
    };
    ensure!(admissible("w1")? == [z([2, 0, 0, 0])], "v1 toward w1: {:?}", admissible("w1")?);
    ensure!(admissible("w2")? == [z([0, 2, 0, 0])], "v1 toward w2: {:?}", admissible("w2")?);
    let mixed: BTreeSet<Monomial> = admissible("v2")?.into_iter().collect();
    let all_alpha: BTreeSet<Monomial> = (0..=4).map(|a| z([0, 0, a, 4 - a])).collect();
    ensure!(mixed == all_alpha, "v1 toward v2: {mixed:?}");

    let r = search_congruence(&d, &lt, &gens, DEFAULT_CAP).map_err(err)?;
    ensure!(r.holds && r.exhaustive, "{}", r.verdict());
    let alpha = congruent_on_edge(&r, "v1", "v2");
    let beta = congruent_on_edge(&r, "v2", "v1");
    ensure!(alpha == BTreeSet::from([z([0, 0, 1, 3]), z([0, 0, 3, 1])]), "α witnesses {alpha:?}");
    ensure!(beta == BTreeSet::from([z([1, 3, 0, 0]), z([3, 1, 0, 0])]), "β witnesses {beta:?}");
    Ok("weights, ℓ, d = 16, generators, admissible sets, α, β ∈ {1, 3}".into())
}

fn first_counterexample() -> Outcome {
    let d = splice_from_resolution(&fixture(SEMIGROUP_FAIL)).map_err(err)?;
    let v = check_semigroup_condition(&d, &linking_table(&d)).map_err(err)?;
    let failures: Vec<_> = v.failures().collect();
    ensure!(!v.holds && failures.len() == 1, "{} failing pairs", failures.len());
    let c = failures[0];
    ensure!((c.node.as_str(), c.toward.as_str()) == ("u", "v"), "fails at ({}, {})", c.node, c.toward);
    let gens: BTreeSet<u64> = c.ell_prime.iter().copied().collect();
    ensure!(c.edge_weight == 1 && gens == BTreeSet::from([2, 3]), "target {} generators {gens:?}", c.edge_weight);
    ensure!(!c.edge_form.member && !c.node_form.member, "membership forms disagree");
    Ok("only (u, toward v) fails: 1 ∉ ⟨2, 3⟩".into())
}

fn second_counterexample() -> Outcome {
    let g = fixture(CONGRUENCE_FAIL);
    let d = splice_from_resolution(&g).map_err(err)?;
    let lt = linking_table(&d);
    let v = check_semigroup_condition(&d, &lt).map_err(err)?;
    ensure!(v.holds && v.edges.iter().all(|c| c.holds()), "semigroup condition fails");
    let gens = action_generators(&g).map_err(err)?.generators;
    let r = search_congruence(&d, &lt, &gens, DEFAULT_CAP).map_err(err)?;
    ensure!(!r.holds && r.exhaustive && r.assignment().is_none(), "{}", r.verdict());
    let det = graph_determinant(&g).map_err(err)?;
    let oracle = cofactor_det(&negated_form(&g));
    ensure!(det == BigInt::from(90) && oracle == det, "d(Γ) = {det}, oracle {oracle}");
    let (_, a) = discriminant_action(&g, 1 << 20).map_err(err)?;
    ensure!(a.order() == 90, "group order {}", a.order());
    Ok("semigroup holds, congruence fails exhaustively, d = |G| = 90".into())
}

fn star(arms: &[i64]) -> ResolutionGraph {
    let ids: Vec<String> = (0..arms.len()).map(|i| format!("a{i}")).collect();
    let vertices = std::iter::once(("c".to_string(), -2)).chain(ids.iter().cloned().zip(arms.iter().copied()));
    ResolutionGraph::new(vertices, ids.iter().map(|a| ("c".to_string(), a.clone()))).unwrap()
}

fn brieskorn() -> Outcome {
    let g = fixture(E8);
    let d = splice_from_resolution(&g).map_err(err)?;
    let b = brieskorn_form(&d).map_err(err)?;
    ensure!(b.exponents == [2, 3, 5], "exponents {:?}", b.exponents);
    ensure!(graph_determinant(&g).map_err(err)? == BigInt::from(1), "E8 determinant");
    ensure!(discriminant_invariants(&g).map_err(err)?.is_empty(), "E8 group nontrivial");
    let (_, a) = discriminant_action(&g, 1 << 20).map_err(err)?;
    ensure!(a.order() == 1, "E8 group order {}", a.order());
    let text = brieskorn_system(&d, &linking_table(&d)).map_err(err)?.render();
    ensure!(text == "z1^2 + z2^3 + z3^5 = 0\n", "E8 equation {text:?}");
    for n in 2..=12 {
        let s = star(&[-2, -2, -n]);
        let d = splice_from_resolution(&s).map_err(err)?;
        let mut e = brieskorn_form(&d).map_err(err)?.exponents;
        e.sort_unstable();
        ensure!(e == [2, 2, n as u64], "(2,2,{n}) star gives {e:?}");
    }
    Ok("E8 → z1^2 + z2^3 + z3^5, trivial group; (2,2,n) stars for n ≤ 12".into())
}

fn corpus_properties() -> Outcome {
    let corpus = enumerate_trees(7, -3).map_err(err)?;
    let mut violations = Vec::new();
    let mut with_nodes = 0;
    for g in &corpus {
        let code = g.canonical_code();
        if let Ok(d) = splice_from_resolution(g) {
            with_nodes += 1;
            let lt = linking_table(&d);
            let excess: usize = d.nodes().iter().map(|&v| d.valence(v) - 2).sum();
            if excess + 2 != d.num_ends() {
                violations.push(format!("{code}: Σ(δ−2) = {excess}"));
            }
            for &v in d.nodes() {
                for w in 0..d.num_ends() {
                    let e = lt.first_edge(v, w);
                    if lt.ell(v, w) * d.edge_weight(v, e) != lt.ell_prime(v, w) * lt.node_weight(v) {
                        violations.push(format!("{code}: ℓ identity at {} end {w}", d.id(v)));
                    }
                }
            }
            match check_semigroup_condition(&d, &lt) {
                Ok(s) => {
                    if let Some(c) = s.edges.iter().find(|c| !c.forms_agree()) {
                        violations.push(format!("{code}: forms disagree at {} toward {}", c.node, c.toward));
                    }
                }
                Err(e) => violations.push(format!("{code}: {e}")),
            }
        }
        let gens = action_generators(g).map_err(err)?;
        if gens.degenerate {
            continue;
        }
        let a = generate_group(&gens.generators, 1 << 20).map_err(err)?;
        let det = gens.determinant.to_u64().ok_or("determinant overflow")?;
        if a.order() != det {
            violations.push(format!("{code}: order {} ≠ d {det}", a.order()));
        }
        let smith: Vec<u64> = discriminant_invariants(g).map_err(err)?.iter().filter_map(|x| x.to_u64()).collect();
        if a.invariant_factors() != smith {
            violations.push(format!("{code}: factors {:?} vs Smith {smith:?}", a.invariant_factors()));
        }
        if let Some(x) = check_free_codim1(&a).offender {
            violations.push(format!("{code}: {x} fixes a coordinate hyperplane"));
        }
    }
    ensure!(violations.is_empty(), "{} violations, first: {}", violations.len(), violations[0]);
    Ok(format!("{} trees ({with_nodes} with nodes), no violations", corpus.len()))
}

fn oracle_equivalences() -> Outcome {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let matrices =
        (1usize..=6).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-9i64..=9, n), n));
    for _ in 0..500 {
        let m = matrices.new_tree(&mut runner).map_err(err)?.current();
        let ours =
            determinant(&IntMatrix::from_rows(m.iter().map(|r| r.iter().copied())).map_err(err)?).map_err(err)?;
        ensure!(ours == cofactor_det(&m), "determinant mismatch on {m:?}");
    }

    let mut sets: Vec<Vec<u64>> = Vec::new();
    for a in 1..=50 {
        sets.push(vec![a]);
        sets.extend((a..=50).map(|b| vec![a, b]));
    }
    let triples = proptest::collection::vec(1u64..=50, 3..=4);
    for _ in 0..400 {
        sets.push(triples.new_tree(&mut runner).map_err(err)?.current());
    }
    for gens in &sets {
        let reach = brute_reachable(200, gens);
        for t in 0..=200u64 {
            let m = semigroup_member(t, gens).map_err(err)?;
            ensure!(m.member == reach[t as usize], "{t} ∈ ⟨{gens:?}⟩ disagrees");
            if let Some(w) = m.witness {
                ensure!(w.iter().zip(gens).map(|(a, g)| a * g).sum::<u64>() == t, "bad witness for {t}");
            }
        }
    }

    let mut graphs: Vec<ResolutionGraph> = [MAIN, CONGRUENCE_FAIL, E8, STAR_2_2_5].map(fixture).to_vec();
    graphs.extend(
        enumerate_trees(6, -3).map_err(err)?.into_iter().filter(|g| !g.nodes().is_empty() && g.ends().len() <= 4),
    );
    let checks: usize = graphs.iter().map(|g| check_deformations(g, 6)).sum();
    Ok(format!(
        "500 determinants; {} generator sets × targets ≤ 200; {checks} deformation queries on {} diagrams",
        sets.len(),
        graphs.len()
    ))
}

fn hamm_grid() -> Outcome {
    let mut points = 0;
    let mut mismatches = Vec::new();
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            for c in -2i64..=2 {
                for d in -2i64..=2 {
                    let m = RationalMatrix::from_int_rows(&[&[a, b, 1, 0], &[c, d, 0, 1]]).map_err(err)?;
                    let ours = hamm_check(&m).map_err(err)?.nonsingular;
                    let expected = a * b != 0 && a * d - b * c != 0;
                    points += 1;
                    if ours != expected {
                        mismatches.push((a, b, c, d, ours));
                    }
                }
            }
        }
    }
    if let Some(&(a, b, c, d, ours)) = mismatches.first() {
        let only_cd =
            mismatches.iter().all(|&(a, b, c, d, ours)| !ours && a * b != 0 && a * d - b * c != 0 && c * d == 0);
        return Err(format!(
            "hamm_check and \"ab≠0 ∧ ad−bc≠0\" disagree at {} of {points} points, first (a,b,c,d) = ({a},{b},{c},{d}) \
             with hamm_check = {ours}; {}",
            mismatches.len(),
            if only_cd {
                "every disagreement has c = 0 or d = 0: the maximal minors of [[a,b,1,0],[c,d,0,1]] \
                 are ad−bc, −c, a, −d, b, 1, so the minor condition also needs cd ≠ 0"
            } else {
                "disagreements are not explained by the −c, −d minors"
            }
        ));
    }
    Ok(format!("{points} grid points agree"))
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 7] = [
        ("main example end to end", main_example),
        ("first counterexample: semigroup failure", first_counterexample),
        ("second counterexample: congruence failure", second_counterexample),
        ("Brieskorn one-node case", brieskorn),
        ("property suite over trees ≤ 7 vertices, weights in [−3, −1]", corpus_properties),
        ("oracle equivalences", oracle_equivalences),
        ("Hamm criterion on the 2×4 example", hamm_grid),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} [exact, {elapsed:.2}s] {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [exact, {elapsed:.2}s] {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
