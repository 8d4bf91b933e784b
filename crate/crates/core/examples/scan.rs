//! Survey all small negative definite trees and tally their verdicts.
//!
//! `cargo run --example scan -- [max-vertices] [weight-min]`

use std::time::Instant;

use splicekit::graph::parse_graph;
use splicekit::scan::{scan, ScanOptions, VerdictClass};

fn main() {
    let mut args = std::env::args().skip(1);
    let max_vertices: usize = args.next().map_or(6, |a| a.parse().expect("max vertices"));
    let weight_min: i64 = args.next().map_or(-7, |a| a.parse().expect("weight min"));

    let start = Instant::now();
    let opts = ScanOptions { exemplar_limit: None, ..ScanOptions::default() };
    let summary = scan(max_vertices, weight_min, &opts).expect("parameters within limits");
    println!(
        "{} trees with at most {max_vertices} vertices, weights in [{weight_min}, -1] ({:.2?})",
        summary.total,
        start.elapsed()
    );
    for class in VerdictClass::ALL {
        println!("  {:<16} {}", class.name(), summary.count(class));
    }

    let known = [
        ("main example", include_str!("../graphs/main_example.sg")),
        ("congruence counterexample", include_str!("../graphs/congruence_fail.sg")),
        ("semigroup counterexample", include_str!("../graphs/semigroup_fail.sg")),
    ];
    for (name, text) in known {
        let code = parse_graph(text).expect("fixture parses").canonical_code();
        let class = VerdictClass::ALL.into_iter().find(|&c| summary.contains(c, &code));
        match class {
            Some(c) => println!("{name}: {}", c.name()),
            None => println!("{name}: outside the enumerated range"),
        }
    }
}
