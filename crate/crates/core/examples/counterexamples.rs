//! Two graphs on which a condition fails: one violates the semigroup
//! condition, the other satisfies it but admits no congruent choice.

use splicekit::congruence::search_congruence;
use splicekit::graph::parse_graph;
use splicekit::group::action_generators;
use splicekit::pipeline::describe_failure;
use splicekit::semigroup::{check_semigroup_condition, DEFAULT_CAP};
use splicekit::splice::{linking_table, splice_from_resolution};

fn main() {
    for (name, text) in [
        ("semigroup_fail.sg", include_str!("../graphs/semigroup_fail.sg")),
        ("congruence_fail.sg", include_str!("../graphs/congruence_fail.sg")),
    ] {
        let g = parse_graph(text).expect("fixture parses");
        let d = splice_from_resolution(&g).expect("valid graph with nodes");
        let lt = linking_table(&d);
        println!("{name}\n{}", d.serialize());

        let verdict = check_semigroup_condition(&d, &lt).expect("small weights");
        if let Some(fail) = verdict.failures().next() {
            println!(
                "semigroup condition fails at node {} toward {}: {}\n",
                fail.node,
                fail.toward,
                describe_failure(fail)
            );
            continue;
        }
        println!("semigroup condition holds");

        let gens = action_generators(&g).expect("valid graph");
        let result = search_congruence(&d, &lt, &gens.generators, DEFAULT_CAP).expect("small weights");
        for node in &result.nodes {
            match &node.choice {
                Some(choice) => {
                    let ms: Vec<String> = choice.iter().map(ToString::to_string).collect();
                    println!("  {}: {}", node.node, ms.join(", "));
                }
                None => println!("  {}: no admissible monomials with a common character", node.node),
            }
        }
        println!("{} (exhaustive: {})\n", result.verdict(), result.exhaustive);
    }
}
