//! The two-node quotient-cusp example, stage by stage.

use splicekit::congruence::{equation_semi_invariance, search_congruence};
use splicekit::equations::build_generic_system;
use splicekit::graph::{graph_determinant, parse_graph};
use splicekit::group::{action_generators, check_free_codim1, generate_group};
use splicekit::semigroup::{admissible_monomials, check_semigroup_condition, DEFAULT_CAP};
use splicekit::splice::{linking_table, splice_from_resolution};

fn main() {
    let g = parse_graph(include_str!("../graphs/main_example.sg")).expect("fixture parses");
    println!("d(Γ) = {}", graph_determinant(&g).expect("valid graph"));

    let d = splice_from_resolution(&g).expect("valid graph with nodes");
    let lt = linking_table(&d);
    println!("\nsplice diagram:\n{}", d.serialize());

    for &v in d.nodes() {
        for (w, &end) in d.ends().iter().enumerate() {
            println!("ℓ({}, {}) = {:>2}   ℓ′ = {}", d.id(v), d.id(end), lt.ell(v, w), lt.ell_prime(v, w));
        }
    }

    let verdict = check_semigroup_condition(&d, &lt).expect("small weights");
    println!("\nsemigroup condition holds: {}", verdict.holds);
    for &v in d.nodes() {
        for &e in d.incident(v) {
            let set = admissible_monomials(&d, &lt, v, e, DEFAULT_CAP).expect("small weights");
            let ms: Vec<String> = set.monomials.iter().map(ToString::to_string).collect();
            println!("  admissible at {} toward {}: {}", set.node, set.toward, ms.join(", "));
        }
    }

    let gens = action_generators(&g).expect("valid graph");
    let group = generate_group(&gens.generators, 16).expect("order 16");
    println!("\ngroup of order {} with invariant factors {:?}", group.order(), group.invariant_factors());
    for (id, gen) in gens.ends.iter().zip(&gens.generators) {
        println!("  {id}: {gen}");
    }
    println!("  free in codimension 1: {}", check_free_codim1(&group).free);

    let congruence = search_congruence(&d, &lt, &gens.generators, DEFAULT_CAP).expect("small weights");
    println!("\n{}", congruence.verdict());
    for node in &congruence.nodes {
        for class in &node.classes {
            let toward_other_node = node.edges.iter().position(|e| e.starts_with('v')).expect("connecting edge");
            let ms: Vec<String> = class.monomials[toward_other_node].iter().map(ToString::to_string).collect();
            println!("  {}: congruent choices toward the other node: {}", node.node, ms.join(", "));
        }
    }

    let choices = congruence.assignment().expect("congruence holds");
    let system = build_generic_system(&d, &lt, &choices).expect("admissible choices");
    println!("\nequations:\n{}", system.render());
    let semi = equation_semi_invariance(&system, &gens.generators).expect("same ends");
    println!("every equation transforms by a character: {}", semi.iter().all(|s| s.passes));
}
