//! Reading, validating and writing resolution graph files.

use splicekit::graph::{parse_graph, serialize_graph, validate};

fn main() {
    let text = "splicegraph 1
# vertices may come in any order; edges name them by id
vertex b -2
vertex a -3
edge b a
vertex c -2
edge c b
";
    let g = parse_graph(text).expect("well-formed");
    println!("canonical form:\n{}", serialize_graph(&g));
    println!("isomorphism code: {}", g.canonical_code());
    println!("validation: {:?}\n", validate(&g));

    let broken = [
        "vertex a -2\n",
        "splicegraph 1\nvertex a -2\nvertex a -3\n",
        "splicegraph 1\nvertex a -2\nedge a b\n",
        "splicegraph 1\nvertex a -2\nvertex b -2\nvertex c -2\nedge a b\nedge b c\nedge c a\n",
        "splicegraph 1\nvertex a -2\nvertex b x\n",
    ];
    for text in broken {
        println!("{:?}\n  → {}", text, parse_graph(text).expect_err("rejected"));
    }

    let indefinite = parse_graph("splicegraph 1\nvertex a -1\nvertex b -1\nedge a b\n").expect("a tree");
    println!("\n(-1)-(-1): {:?}", validate(&indefinite));
}
