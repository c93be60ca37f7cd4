//! Anticommutation (frustration) graphs of the three minimal
//! uniform-weight string ensembles built from a repeated letter pattern:
//! XXY, XYXY, and XXXYY. Their graph structure — triangle, even cycles
//! only, or shortest odd cycle of length five — is what separates their
//! entanglement phases, not their operator count or range.
//!
//! ```bash
//! cargo run --release --example cycle_graphs
//! ```

use measonly::ensemble::EnsembleSpec;
use measonly::graph::build_graph;
use measonly::pauli::Pauli::{X, Y};
use measonly::Result;

fn main() -> Result<()> {
    let ring = 24;
    let models: [(&str, Vec<measonly::Pauli>); 3] = [
        ("XXY   (triangle class)", vec![X, X, Y]),
        ("XYXY  (bipartite class)", vec![X, Y, X, Y]),
        ("XXXYY (odd-pentagon class)", vec![X, X, X, Y, Y]),
    ];

    for (label, letters) in models {
        let spec = EnsembleSpec::fixed_string(ring, letters)?;
        let graph = build_graph(&spec)?;
        let report = graph.classify();
        println!("=== {label}, ring {ring} ===");
        println!("  operators (graph nodes)      {}", report.nodes);
        println!("  anticommuting pairs (edges)  {}", report.edges);
        println!("  bipartite                    {}", report.is_bipartite);
        println!("  contains a triangle          {}", report.has_triangle);
        println!(
            "  shortest odd cycle           {}",
            report
                .shortest_odd_cycle_length
                .map_or("none".to_string(), |l| l.to_string())
        );
        println!(
            "  mutually anticommuting set   >= {} operators",
            report.max_pairwise_anticommuting_clique_lower_bound
        );
        println!();
    }

    println!("The triangle class admits three mutually anticommuting operators and");
    println!("builds volume-law entanglement; the bipartite class has only even");
    println!("frustration loops and sits in a critical logarithmic phase; the");
    println!("odd-pentagon class is frustrated (non-bipartite) yet triangle-free,");
    println!("and still reaches a volume-law phase.");
    Ok(())
}
