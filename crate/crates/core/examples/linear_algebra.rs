//! Exact integer linear algebra: determinants, inverses and Smith form.

use splicekit::graph::parse_graph;
use splicekit::linalg::{determinant, inverse, is_negative_definite, smith_normal_form};

fn main() {
    let g = parse_graph(include_str!("../graphs/congruence_fail.sg")).expect("fixture parses");
    let a = g.intersection_matrix();
    println!("A(Γ) =\n{a}");
    println!("negative definite: {}", is_negative_definite(&a).unwrap());
    println!("det(−A) = {}", determinant(&a.neg()).unwrap());

    let snf = smith_normal_form(&a);
    let factors: Vec<String> = snf.invariant_factors.iter().map(ToString::to_string).collect();
    println!("Smith invariant factors: {}", factors.join(", "));
    let summands: Vec<String> = snf.nontrivial_factors().iter().map(|f| format!("Z/{f}")).collect();
    println!("coker A ≅ {}", summands.join(" ⊕ "));

    let inv = inverse(&a.neg()).unwrap();
    println!("(−A)⁻¹ restricted to the ends:");
    let ends = g.ends();
    for &i in &ends {
        let row: Vec<String> = ends.iter().map(|&j| inv.get(i, j).to_string()).collect();
        println!("  {}", row.join("  "));
    }
}
