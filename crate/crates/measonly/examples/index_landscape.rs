//! Map the ensemble non-commutativity index over single-site probability
//! space. Two closed-form facts show up immediately: the index peaks at
//! the symmetric point (1/3, 1/3, 1/3) along the symmetric line, and at
//! (1/2, 1/2, 0) along the zero-Z edge; and at fixed content, the index is
//! exactly proportional to 1/L.
//!
//! ```bash
//! cargo run --release --example index_landscape
//! ```

use measonly::ensemble::ProbPath;
use measonly::index::index_closed_form_factorizable;
use measonly::Result;

fn scan(path: &ProbPath, r: usize, ring: usize, t_max: f64) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::MIN);
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "p_x", "p_z", "index");
    for k in 0..=20 {
        let t = t_max * k as f64 / 20.0;
        let probs = path.probs_at(t)?;
        let value = index_closed_form_factorizable(probs, r, r, ring)?;
        if value > best.1 {
            best = (t, value);
        }
        println!("{:>8.4} {:>14.6} {:>14.6} {:>14.8}", t, probs.x(), probs.z(), value);
    }
    Ok(best)
}

fn main() -> Result<()> {
    let (r, ring) = (4, 256);

    println!("non-commutativity index, factorizable ensemble, range {r}, ring {ring}\n");

    println!("--- symmetric line p_x = p_y = t, p_z = 1 - 2t ---");
    let best_line = scan(&ProbPath::SymmetricLine, r, ring, 1.0 / 3.0)?;
    println!("peak at t = {:.4} (expected 1/3 = {:.4})\n", best_line.0, 1.0 / 3.0);

    println!("--- zero-Z edge p_x = t, p_y = 1 - t, p_z = 0 ---");
    let best_edge = scan(&ProbPath::ZeroZEdge, r, ring, 1.0)?;
    println!("peak at t = {:.4} (expected 1/2)\n", best_edge.0);

    println!("--- exact 1/L scaling at the symmetric point ---");
    let probs = ProbPath::SymmetricLine.probs_at(1.0 / 3.0)?;
    let base = index_closed_form_factorizable(probs, r, r, 128)?;
    for ring in [128usize, 256, 512, 1024] {
        let value = index_closed_form_factorizable(probs, r, r, ring)?;
        println!(
            "L = {ring:>5}  index = {value:.10}  index*L = {:.10} (constant)",
            value * ring as f64
        );
        assert!((value * ring as f64 - base * 128.0).abs() < 1e-12);
    }
    Ok(())
}
