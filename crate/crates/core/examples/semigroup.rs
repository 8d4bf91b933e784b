//! Numerical semigroup membership and the semigroup condition.
//!
//! `cargo run --example semigroup -- [graph-file]`

use splicekit::graph::parse_graph;
use splicekit::semigroup::{check_semigroup_condition, semigroup_member};
use splicekit::splice::{linking_table, splice_from_resolution};

fn main() {
    for (target, gens) in [(1, vec![2, 3]), (57, vec![3, 3]), (23, vec![5, 7]), (24, vec![5, 7])] {
        let m = semigroup_member(target, &gens).expect("small target");
        let span: Vec<String> = gens.iter().map(ToString::to_string).collect();
        let span = span.join(", ");
        match m.witness {
            Some(w) => println!("{target} ∈ ⟨{span}⟩ with multipliers {w:?}"),
            None => println!("{target} ∉ ⟨{span}⟩"),
        }
    }

    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable graph file"),
        None => include_str!("../graphs/semigroup_fail.sg").to_string(),
    };
    let g = parse_graph(&text).expect("graph parses");
    let d = splice_from_resolution(&g).expect("valid graph with nodes");
    let lt = linking_table(&d);
    let verdict = check_semigroup_condition(&d, &lt).expect("small weights");
    println!();
    for c in &verdict.edges {
        println!(
            "{} toward {}: {} in ⟨ℓ′ = {:?}⟩? {}   {} in ⟨ℓ = {:?}⟩? {}",
            c.node, c.toward, c.edge_weight, c.ell_prime, c.edge_form.member, c.node_weight, c.ell, c.node_form.member
        );
    }
    println!("semigroup condition holds: {}", verdict.holds);
}
