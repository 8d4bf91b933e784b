//! Exact combinatorics of splice diagrams for normal surface singularities
//! whose links are rational homology spheres.
//!
//! Starting from a resolution graph (a negative definite weighted tree) the
//! crate computes the splice diagram and linking weights, decides the
//! semigroup condition, enumerates admissible monomials, builds the
//! discriminant group's diagonal action on the end variables, searches for
//! congruent monomial choices, and writes down splice-diagram equations.
//!
//! ```
//! use splicekit::graph::parse_graph;
//! use splicekit::pipeline::{run_pipeline, PipelineOptions};
//!
//! let g = parse_graph(
//!     "splicegraph 1\nvertex c -2\nvertex x -2\nvertex y -3\nvertex z -5\n\
//!      edge c x\nedge c y\nedge c z\n",
//! )
//! .unwrap();
//! let report = run_pipeline(&g, &PipelineOptions::default());
//! assert_eq!(report.brieskorn.unwrap().exponents, vec![2, 3, 5]);
//! ```

pub mod congruence;
pub mod equations;
pub mod graph;
pub mod group;
pub mod linalg;
pub mod monomial;
pub mod pipeline;
pub mod report;
pub mod scan;
pub mod semigroup;
pub mod splice;

pub use graph::{parse_graph, ResolutionGraph};
pub use monomial::Monomial;
pub use splice::{linking_table, splice_from_resolution, LinkingTable, SpliceDiagram};
