//! Watch the half-chain entanglement entropy of a single measurement
//! trajectory at three points of the factorizable range-3 ensemble:
//! deep in the disentangled phase, just inside the area-law phase, and at
//! the maximally frustrated point where the entropy grows to a volume-law
//! plateau.
//!
//! ```bash
//! cargo run --release --example single_trajectory
//! ```

use measonly::dynamics::{Observable, RunConfig};
use measonly::ensemble::{EnsembleSpec, ProbPath, RangeDist};
use measonly::Result;

fn main() -> Result<()> {
    let ring = 64;
    let path = ProbPath::SymmetricLine;
    let points = [
        (0.0, "all-Z (commuting)"),
        (0.10, "area law"),
        (1.0 / 3.0, "maximal frustration"),
    ];

    let mut curves = Vec::new();
    for &(q, label) in &points {
        let spec =
            EnsembleSpec::factorizable(ring, path.probs_at(q)?, RangeDist::Fixed(3))?;
        let mut config = RunConfig::new(spec, 7);
        config.observables = vec![Observable::HalfChainSeries];
        config.trajectories = 1;
        let record = measonly::dynamics::run_trajectory(&config, 7)?;
        curves.push((label, q, record));
    }

    println!("half-chain entropy S(L/2) of one trajectory, ring of {ring} sites");
    println!("(one layer = {ring} random measurements; layer 0 = initial product state)\n");
    println!("{:>6} {:>22} {:>12} {:>22}", "layers", points[0].1, points[1].1, points[2].1);
    let series: Vec<&Vec<f64>> =
        curves.iter().map(|(_, _, r)| r.series.as_ref().unwrap()).collect();
    let total = series[0].len();
    for layer in (0..total).step_by(total / 16) {
        println!(
            "{:>6} {:>22} {:>12} {:>22}",
            layer, series[0][layer], series[1][layer], series[2][layer]
        );
    }

    println!();
    for (label, q, record) in &curves {
        println!(
            "q = {q:<8.4} steady S(L/2) = {:>6.2} bits   [{label}]",
            record.steady_half_chain
        );
    }
    println!("\nvolume-law ceiling at this size is L/2 = {} bits", ring / 2);
    Ok(())
}
