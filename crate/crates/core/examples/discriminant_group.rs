//! The discriminant group acting diagonally on the end variables.
//!
//! `cargo run --example discriminant_group -- [graph-file]`

use splicekit::graph::{discriminant_invariants, parse_graph};
use splicekit::group::{
    action_generators, check_free_codim1, generate_group, lattice_invariant_factors, monomial_character,
};
use splicekit::monomial::monomials_up_to_degree;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable graph file"),
        None => include_str!("../graphs/congruence_fail.sg").to_string(),
    };
    let g = parse_graph(&text).expect("graph parses");
    let gens = action_generators(&g).expect("valid graph");
    println!("d(Γ) = {}", gens.determinant);
    for (id, gen) in gens.ends.iter().zip(&gens.generators) {
        println!("generator for {id}: {gen}");
    }

    let bound = u64::try_from(&gens.determinant).expect("small group");
    let group = generate_group(&gens.generators, bound).expect("order at most d(Γ)");
    println!("order {}", group.order());
    println!("invariant factors, counting element orders: {:?}", group.invariant_factors());
    println!("invariant factors, generator lattice:       {:?}", lattice_invariant_factors(&gens.generators).unwrap());
    let smith: Vec<String> = discriminant_invariants(&g).unwrap().iter().map(ToString::to_string).collect();
    println!("invariant factors, Smith form of A(Γ):      [{}]", smith.join(", "));
    println!("free in codimension 1: {}", check_free_codim1(&group).free);

    println!("\ninvariant monomials by degree:");
    let all = monomials_up_to_degree(gens.ends.len(), 6);
    for degree in 1..=6 {
        let fixed: Vec<String> = all
            .iter()
            .filter(|m| m.degree() == degree && monomial_character(&group, m).is_trivial())
            .map(ToString::to_string)
            .collect();
        println!("  {degree}: {}", if fixed.is_empty() { "none".to_string() } else { fixed.join(", ") });
    }
}
