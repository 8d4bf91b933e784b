//! Monomials that can be added to an equation without changing its
//! weights or its character.
//!
//! `cargo run --example deformations -- [degree-bound]`

use splicekit::congruence::search_congruence;
use splicekit::equations::{build_generic_system, deformation_monomials, WeightFilter};
use splicekit::graph::parse_graph;
use splicekit::group::{discriminant_action, monomial_character};
use splicekit::semigroup::DEFAULT_CAP;
use splicekit::splice::{linking_table, splice_from_resolution};

fn main() {
    let bound: u64 = std::env::args().nth(1).map_or(4, |a| a.parse().expect("degree bound"));
    let g = parse_graph(include_str!("../graphs/main_example.sg")).expect("fixture parses");
    let d = splice_from_resolution(&g).expect("valid graph with nodes");
    let lt = linking_table(&d);
    let (gens, group) = discriminant_action(&g, 16).expect("order 16");
    let choices = search_congruence(&d, &lt, &gens.generators, DEFAULT_CAP)
        .expect("small weights")
        .assignment()
        .expect("congruence holds");
    let system = build_generic_system(&d, &lt, &choices).expect("admissible choices");

    for eq in &system.equations {
        println!("{eq}");
        let target = monomial_character(&group, &eq.terms[0].monomial);
        for filter in [WeightFilter::Node(eq.node_index), WeightFilter::AllNodes] {
            let ms = deformation_monomials(&d, &lt, &group, &target, filter, bound);
            let ms: Vec<String> = ms.iter().map(ToString::to_string).collect();
            let label = match filter {
                WeightFilter::Node(_) => format!("weight ≥ d_{} at {}", eq.node, eq.node),
                WeightFilter::AllNodes => "weight ≥ d_v at every node".to_string(),
            };
            println!("  {label}, degree ≤ {bound}: {}", ms.join(", "));
        }
    }
}
