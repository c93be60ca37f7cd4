//! The ensemble non-commutativity index: the probability that two
//! independent draws from a measurement ensemble anticommute.
//!
//! Three evaluation routes that must agree: exhaustive enumeration over all
//! ordered operator pairs, Monte Carlo pair sampling, and closed forms that
//! reduce the double sum to a scan over relative offsets on the ring.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{EnsembleSpec, ProbPath, RangeDist, SiteProbs};
use crate::error::{Error, Result};
use crate::scaling::{fit_linear, LinearFit, PhaseBoundary};
use rand::Rng;

/// Default ring length on which indices are reported. The index scales as
/// 1/L at fixed ensemble content, so values on other rings follow by
/// rescaling.
pub const DEFAULT_INDEX_RING: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexMethod {
    Exact,
    ClosedForm,
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexResult {
    pub value: f64,
    /// Binomial standard error for Monte Carlo; 0 for the other methods
    /// (and for a Monte Carlo estimate that never saw an anticommuting
    /// pair).
    pub std_error: f64,
    pub method: IndexMethod,
    pub ring: usize,
}

/// Probability that an odd number of `overlap` independent site pairs
/// mismatch, each mismatching with probability `mismatch`.
pub fn parity_anticommute_prob(mismatch: f64, overlap: usize) -> f64 {
    if overlap == 0 {
        0.0
    } else {
        (1.0 - (1.0 - 2.0 * mismatch).powi(overlap as i32)) / 2.0
    }
}

/// Number of shared sites between a window of length r1 starting at 0 and a
/// window of length r2 starting at d, both wrapping on the ring.
pub fn overlap_on_ring(ring: usize, r1: usize, r2: usize, d: usize) -> usize {
    debug_assert!(r1 <= ring && r2 <= ring);
    let d = d % ring;
    (0..r2).filter(|k| (d + k) % ring < r1).count()
}

/// Number of relative offsets d ∈ [0, ring) at which two length-r windows
/// share an odd number of sites.
pub fn odd_overlap_count(ring: usize, r: usize) -> usize {
    (0..ring).filter(|&d| overlap_on_ring(ring, r, r, d) % 2 == 1).count()
}

/// Index of a factorizable pair with fixed ranges r1, r2: the offset
/// average of the odd-mismatch probability over the overlap.
pub fn index_closed_form_factorizable(
    probs: SiteProbs,
    r1: usize,
    r2: usize,
    ring: usize,
) -> Result<f64> {
    if r1 == 0 || r2 == 0 {
        return Err(Error::InvalidRange("ranges start at 1".into()));
    }
    if r1 > ring || r2 > ring {
        return Err(Error::InvalidRange(format!(
            "ranges ({r1}, {r2}) exceed ring length {ring}"
        )));
    }
    let c = probs.mismatch_rate();
    let total: f64 = (0..ring)
        .map(|d| parity_anticommute_prob(c, overlap_on_ring(ring, r1, r2, d)))
        .sum();
    Ok(total / ring as f64)
}

/// Index of a factorizable ensemble whose range is drawn from a
/// distribution: the weight-weighted double sum over range pairs.
pub fn index_closed_form_range_dist(
    probs: SiteProbs,
    range: &RangeDist,
    ring: usize,
) -> Result<f64> {
    range.validate()?;
    let weights = range.weights();
    let mut total = 0.0;
    for &(r1, w1) in &weights {
        for &(r2, w2) in &weights {
            total += w1 * w2 * index_closed_form_factorizable(probs, r1, r2, ring)?;
        }
    }
    Ok(total)
}

/// Index of a uniform-string ensemble: two draws anticommute iff their
/// letters differ and their windows share an odd number of sites.
pub fn index_closed_form_xyz(weights: SiteProbs, r: usize, ring: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidRange("ranges start at 1".into()));
    }
    if r > ring {
        return Err(Error::InvalidRange(format!("range {r} exceeds ring length {ring}")));
    }
    let (px, py, pz) = (weights.x(), weights.y(), weights.z());
    let p_diff = 2.0 * (px * py + py * pz + pz * px);
    Ok(odd_overlap_count(ring, r) as f64 * p_diff / ring as f64)
}

/// Exact index by exhaustive enumeration: the probability-weighted count of
/// anticommuting ordered pairs (equal pairs contribute zero).
pub fn index_exact(spec: &EnsembleSpec) -> Result<IndexResult> {
    let ops = spec.enumerate()?;
    let value: f64 = ops
        .par_iter()
        .map(|a| {
            let row: f64 = ops
                .iter()
                .filter(|b| a.op.anticommutes_raw(&b.op))
                .map(|b| b.prob)
                .sum();
            a.prob * row
        })
        .sum();
    Ok(IndexResult {
        value,
        std_error: 0.0,
        method: IndexMethod::Exact,
        ring: spec.ring(),
    })
}

/// Monte Carlo index from independent operator pairs, with the binomial
/// standard error.
pub fn index_monte_carlo(
    spec: &EnsembleSpec,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<IndexResult> {
    if samples < 2 {
        return Err(Error::Config(format!("{samples} samples; at least 2 required")));
    }
    let mut hits = 0usize;
    for _ in 0..samples {
        let a = spec.sample(rng);
        let b = spec.sample(rng);
        if a.anticommutes_raw(&b) {
            hits += 1;
        }
    }
    let value = hits as f64 / samples as f64;
    let std_error = (value * (1.0 - value) / samples as f64).sqrt();
    Ok(IndexResult {
        value,
        std_error,
        method: IndexMethod::MonteCarlo { samples },
        ring: spec.ring(),
    })
}

/// Closed-form index dispatched on the ensemble's family (factorizable or
/// uniform strings; fixed strings fall back to enumeration).
pub fn index_closed_form(spec: &EnsembleSpec) -> Result<IndexResult> {
    use crate::ensemble::EnsembleFamily::*;
    let value = match spec.family() {
        Factorizable { probs, range } => {
            index_closed_form_range_dist(*probs, range, spec.ring())?
        }
        Xyz { weights, range } => index_closed_form_xyz(*weights, *range, spec.ring())?,
        FixedString { .. } => return index_exact(spec),
    };
    Ok(IndexResult {
        value,
        std_error: 0.0,
        method: IndexMethod::ClosedForm,
        ring: spec.ring(),
    })
}

/// The index evaluated on the phase boundary at one range.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub range: usize,
    pub delta_qc: f64,
    /// Path parameter (q0 on the symmetric line) of the critical point.
    pub param: f64,
    pub index: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalCurve {
    pub ring: usize,
    pub points: Vec<CriticalPoint>,
    /// Least-squares line through (range, index).
    pub fit: LinearFit,
}

/// Evaluates the closed-form index at each range's critical point along the
/// boundary's path and fits a line through (r, index). Ranges at which the
/// law predicts no transition are skipped.
pub fn critical_index_curve(
    boundary: &PhaseBoundary,
    rs: &[usize],
    ring: usize,
) -> Result<CriticalCurve> {
    use crate::scaling::BoundaryLaw;
    let mut points = Vec::new();
    for &r in rs {
        let Some(dq) = boundary.law.delta_qc(r)? else { continue };
        let probs = boundary.path.point_at_delta_q(dq)?;
        let param = boundary.path.param_at_delta_q(dq)?;
        let index = match boundary.law {
            BoundaryLaw::FactorizableRange { .. } => {
                index_closed_form_factorizable(probs, r, r, ring)?
            }
            BoundaryLaw::XyzEmpirical { .. } => index_closed_form_xyz(probs, r, ring)?,
        };
        points.push(CriticalPoint { range: r, delta_qc: dq, param, index });
    }
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} ranges with a transition; the critical-index fit needs at least 2",
            points.len()
        )));
    }
    let fit = fit_linear(
        &points.iter().map(|p| (p.range as f64, p.index)).collect::<Vec<_>>(),
    )?;
    Ok(CriticalCurve { ring, points, fit })
}

/// Range-weighted non-commutativity per unit range of a mixed-range
/// ensemble: sum over r of p(r)·(I_r − b)/r, where I_r is the fixed-range
/// index at the mixed ensemble's transition point and b the critical-curve
/// intercept.
pub fn k_eff(
    range: &RangeDist,
    fit: &LinearFit,
    probs_at_transition: SiteProbs,
    ring: usize,
) -> Result<f64> {
    range.validate()?;
    let mut total = 0.0;
    for (r, w) in range.weights() {
        let i_r = index_closed_form_factorizable(probs_at_transition, r, r, ring)?;
        total += w * (i_r - fit.intercept) / r as f64;
    }
    Ok(total)
}

/// Range-weighted average of per-range critical parameters. A deliberately
/// naive transition estimate for mixed-range ensembles, provided to
/// quantify how far it lands from measured transitions.
pub fn naive_average_qc(range: &RangeDist, boundary: &PhaseBoundary) -> Result<f64> {
    range.validate()?;
    let mut total = 0.0;
    for (r, w) in range.weights() {
        match boundary.critical_param(r)? {
            Some(q) => total += w * q,
            None => {
                return Err(Error::InsufficientData(format!(
                    "no transition at range {r}; the naive average is undefined"
                )))
            }
        }
    }
    Ok(total)
}

/// Path parameter at which the fixed-range closed-form index crosses a
/// target value, by bisection on [t_lo, t_hi]. The index must straddle the
/// target across the bracket.
pub fn index_curve_intersection(
    path: &ProbPath,
    r: usize,
    ring: usize,
    target: f64,
    bracket: (f64, f64),
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Config(format!("bad bracket [{lo}, {hi}]")));
    }
    let eval = |t: f64| -> Result<f64> {
        Ok(index_closed_form_factorizable(path.probs_at(t)?, r, r, ring)? - target)
    };
    let (f_lo, f_hi) = (eval(lo)?, eval(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical(format!(
            "index minus target has the same sign at both bracket ends ({f_lo:.3e}, {f_hi:.3e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
