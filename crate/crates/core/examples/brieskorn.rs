//! One-node diagrams give Brieskorn complete intersections.

use splicekit::equations::{brieskorn_form, brieskorn_system, hamm_check};
use splicekit::graph::{graph_determinant, ResolutionGraph};
use splicekit::splice::{linking_table, splice_from_resolution};

/// A central vertex with arms that are strings of −2 curves of the given
/// lengths; an arm of length `k` has determinant `k + 1`.
fn star(center: i64, arms: &[usize]) -> ResolutionGraph {
    let mut vertices = vec![("c".to_string(), center)];
    let mut edges = Vec::new();
    for (a, &len) in arms.iter().enumerate() {
        for i in 0..len {
            let id = format!("a{a}_{i}");
            let prev = if i == 0 { "c".to_string() } else { format!("a{a}_{}", i - 1) };
            vertices.push((id.clone(), -2));
            edges.push((prev, id));
        }
    }
    ResolutionGraph::new(vertices, edges).expect("well-formed star")
}

fn main() {
    for (center, arms) in [(-2, vec![1, 2, 4]), (-2, vec![1, 1, 5]), (-1, vec![1, 2, 6]), (-3, vec![1, 1, 1, 1])] {
        let g = star(center, &arms);
        let Ok(d) = splice_from_resolution(&g) else {
            println!("arms {arms:?} around {center}: not negative definite\n");
            continue;
        };
        let lt = linking_table(&d);
        let data = brieskorn_form(&d).expect("one node");
        println!("arms {arms:?} around {center}: d(Γ) = {}", graph_determinant(&g).expect("valid"));
        println!("  exponents {:?}", data.exponents);
        println!("  coefficients nonsingular: {}", hamm_check(&data.coefficients).expect("shape").nonsingular);
        for line in brieskorn_system(&d, &lt).expect("one node").render().lines() {
            println!("  {line}");
        }
        println!();
    }
}
