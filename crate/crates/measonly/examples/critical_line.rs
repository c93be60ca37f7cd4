//! The central quantitative result of the toolkit: evaluate the
//! non-commutativity index at the entanglement transition of fixed-range
//! factorizable ensembles and fit the critical index against the range.
//! The critical index is linear in the range, the fit quality is extreme,
//! and the line is independent of the direction along which probability
//! space is tuned — the same criterion also reproduces the transition of
//! the correlated uniform-string family.
//!
//! ```bash
//! cargo run --release --example critical_line
//! ```

use measonly::ensemble::ProbPath;
use measonly::index::critical_index_curve;
use measonly::scaling::{BoundaryLaw, PhaseBoundary};
use measonly::Result;

fn main() -> Result<()> {
    let ranges: Vec<usize> = (3..=8).collect();
    let ring = 256;

    let symmetric =
        PhaseBoundary::new(BoundaryLaw::factorizable(), ProbPath::SymmetricLine)?;
    let curve = critical_index_curve(&symmetric, &ranges, ring)?;

    println!("factorizable family, symmetric line, ring {ring}");
    println!("{:>6} {:>12} {:>12} {:>14}", "range", "delta_qc", "q_c", "index");
    for p in &curve.points {
        println!("{:>6} {:>12.6} {:>12.6} {:>14.8}", p.range, p.delta_qc, p.param, p.index);
    }
    println!(
        "\ncritical index = k*r + b with k = {:.8}, b = {:.8}, R^2 = {:.8}",
        curve.fit.slope, curve.fit.intercept, curve.fit.r_squared
    );

    // the whole curve carries the exact 1/L factor of the index itself
    let doubled = critical_index_curve(&symmetric, &ranges, 2 * ring)?;
    println!(
        "at ring {}: k and b halve exactly (k*2 = {:.8}, b*2 = {:.8})",
        2 * ring,
        2.0 * doubled.fit.slope,
        2.0 * doubled.fit.intercept
    );

    println!("\n--- tuning-path independence ---");
    // a ray ends at its anchor on the zero-Z edge, so the anchor must lie
    // farther from the symmetric point than the range-8 transition does;
    // that pins the anchors near the edge corners
    println!("{:>22} {:>12} {:>14}", "path", "k", "vs symmetric");
    println!(
        "{:>22} {:>12.8} {:>14}",
        "symmetric line", curve.fit.slope, "--"
    );
    for anchor_x in [0.0, 0.03, 0.05, 0.07] {
        let ray = PhaseBoundary::new(
            BoundaryLaw::factorizable(),
            ProbPath::AnchorRay { anchor_x },
        )?;
        let ray_curve = critical_index_curve(&ray, &ranges, ring)?;
        let rel = (ray_curve.fit.slope - curve.fit.slope) / curve.fit.slope;
        println!(
            "{:>22} {:>12.8} {:>13.4}%",
            format!("anchor ray x={anchor_x}"),
            ray_curve.fit.slope,
            100.0 * rel
        );
    }

    println!("\n--- the same line, correlated uniform-string family ---");
    let odd = PhaseBoundary::new(BoundaryLaw::xyz_odd(), ProbPath::SymmetricLine)?;
    let odd_ranges: Vec<usize> = (3..=15).step_by(2).collect();
    let odd_curve = critical_index_curve(&odd, &odd_ranges, ring)?;
    println!(
        "odd ranges 3..15:  k = {:.8}, b = {:.8}, R^2 = {:.8}",
        odd_curve.fit.slope, odd_curve.fit.intercept, odd_curve.fit.r_squared
    );
    println!(
        "slope agrees with the factorizable line within {:.2}%",
        100.0 * (odd_curve.fit.slope - curve.fit.slope).abs() / curve.fit.slope
    );
    Ok(())
}
