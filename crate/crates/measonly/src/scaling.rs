//! Phase-boundary formulas, curve crossings, least-squares fits, and
//! finite-size scaling collapse.

use serde::Serialize;

use crate::ensemble::ProbPath;
use crate::ensemble::SiteProbs;
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(r: usize) -> Parity {
        if r % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

pub const FACTORIZABLE_COUPLING: f64 = 1.16;
pub const XYZ_ODD_CONSTANTS: (f64, f64, f64) = (0.203, 1.924, 2.219);
pub const XYZ_EVEN_CONSTANTS: (f64, f64, f64) = (0.224, 1.375, 1.615);

/// Critical distance from the symmetric point as a function of the string
/// range r.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BoundaryLaw {
    /// delta_q_c(r) = sqrt(2/3 − coupling/r) for factorizable ensembles.
    /// No transition exists for r ≤ 2 (short strings cannot sustain a
    /// volume-law phase), so those ranges report no critical point even
    /// where the square root is real.
    FactorizableRange { coupling: f64 },
    /// delta_q_c(r) = amplitude − offset_coeff/r^exponent for uniform-string
    /// ensembles, with separate constants per range parity.
    XyzEmpirical { parity: Parity, amplitude: f64, offset_coeff: f64, exponent: f64 },
}

impl BoundaryLaw {
    pub fn factorizable() -> Self {
        BoundaryLaw::FactorizableRange { coupling: FACTORIZABLE_COUPLING }
    }

    pub fn xyz_odd() -> Self {
        let (amplitude, offset_coeff, exponent) = XYZ_ODD_CONSTANTS;
        BoundaryLaw::XyzEmpirical { parity: Parity::Odd, amplitude, offset_coeff, exponent }
    }

    pub fn xyz_even() -> Self {
        let (amplitude, offset_coeff, exponent) = XYZ_EVEN_CONSTANTS;
        BoundaryLaw::XyzEmpirical { parity: Parity::Even, amplitude, offset_coeff, exponent }
    }

    /// Critical delta_q at range r; `Ok(None)` when the law predicts no
    /// transition at that range.
    pub fn delta_qc(&self, r: usize) -> Result<Option<f64>> {
        if r == 0 {
            return Err(Error::InvalidRange("ranges start at 1".into()));
        }
        match *self {
            BoundaryLaw::FactorizableRange { coupling } => {
                if coupling <= 0.0 {
                    return Err(Error::Config(format!("coupling {coupling} must be > 0")));
                }
                if r <= 2 {
                    return Ok(None);
                }
                let arg = 2.0 / 3.0 - coupling / r as f64;
                Ok((arg > 0.0).then(|| arg.sqrt()))
            }
            BoundaryLaw::XyzEmpirical { parity, amplitude, offset_coeff, exponent } => {
                if Parity::of(r) != parity {
                    return Err(Error::Config(format!(
                        "range {r} has the wrong parity for this boundary law"
                    )));
                }
                let v = amplitude - offset_coeff / (r as f64).powf(exponent);
                Ok((v > 0.0).then_some(v))
            }
        }
    }

    /// Inverts delta_qc: the (fractional) range at which the boundary
    /// passes through the given delta_q.
    pub fn range_for(&self, delta_q: f64) -> Result<f64> {
        match *self {
            BoundaryLaw::FactorizableRange { coupling } => {
                let denom = 2.0 / 3.0 - delta_q * delta_q;
                if denom <= 0.0 {
                    return Err(Error::InvalidRange(format!(
                        "delta_q {delta_q} is at or beyond the infinite-range limit"
                    )));
                }
                Ok(coupling / denom)
            }
            BoundaryLaw::XyzEmpirical { amplitude, offset_coeff, exponent, .. } => {
                if delta_q >= amplitude {
                    return Err(Error::InvalidRange(format!(
                        "delta_q {delta_q} is at or beyond the infinite-range limit"
                    )));
                }
                Ok((offset_coeff / (amplitude - delta_q)).powf(1.0 / exponent))
            }
        }
    }
}

/// A boundary law combined with the probability-space path along which the
/// tuning parameter runs.
#[derive(Debug, Clone)]
pub struct PhaseBoundary {
    pub law: BoundaryLaw,
    pub path: ProbPath,
}

impl PhaseBoundary {
    pub fn new(law: BoundaryLaw, path: ProbPath) -> Result<Self> {
        path.validate()?;
        Ok(PhaseBoundary { law, path })
    }

    pub fn critical_delta_q(&self, r: usize) -> Result<Option<f64>> {
        self.law.delta_qc(r)
    }

    /// Path parameter (e.g. q0 on the symmetric line) at the range-r
    /// critical point.
    pub fn critical_param(&self, r: usize) -> Result<Option<f64>> {
        match self.law.delta_qc(r)? {
            None => Ok(None),
            Some(dq) => Ok(Some(self.path.param_at_delta_q(dq)?)),
        }
    }

    pub fn critical_probs(&self, r: usize) -> Result<Option<SiteProbs>> {
        match self.law.delta_qc(r)? {
            None => Ok(None),
            Some(dq) => Ok(Some(self.path.point_at_delta_q(dq)?)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares through (x, y) points.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} points for a linear fit")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 =
        points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LinearFit { slope, intercept, r_squared, points: points.to_vec() })
}

/// One system size's observable curve over the tuning parameter.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSeries {
    pub size: usize,
    /// (parameter, observable), sorted by parameter.
    pub points: Vec<(f64, f64)>,
}

impl SweepSeries {
    pub fn new(size: usize, mut points: Vec<(f64, f64)>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyRing);
        }
        if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
            return Err(Error::InsufficientData("non-finite sweep point".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(SweepSeries { size, points })
    }
}

/// Piecewise-linear interpolation on points sorted by x. None outside the
/// covered x-range. An exact hit on one or more samples returns their mean,
/// so curves merged from several sources evaluate the same regardless of
/// merge order.
fn interp_sorted(pts: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (pts.first()?, pts.last()?);
    if x < first.0 || x > last.0 {
        return None;
    }
    let hi = pts.partition_point(|p| p.0 < x);
    if hi < pts.len() && pts[hi].0 == x {
        let mut sum = 0.0;
        let mut n = 0.0;
        for &(px, py) in &pts[hi..] {
            if px != x {
                break;
            }
            sum += py;
            n += 1.0;
        }
        return Some(sum / n);
    }
    // x is strictly inside (pts[hi-1].0, pts[hi].0): x > first.0 forces
    // hi >= 1, and an exact hit on the last point was handled above.
    let (x0, y0) = pts[hi - 1];
    let (x1, y1) = pts[hi];
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Parameter value where the curves for different sizes intersect.
///
/// For every pair of sizes the difference of the two interpolated curves is
/// scanned for sign changes over the shared parameter range; the change
/// nearest the peak of the pair's mean curve wins (curves that touch again
/// far in the tails do not pull the estimate away). The crossing is the
/// median over all pairs.
pub fn crossing_point(series: &[SweepSeries]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} series; crossing extraction needs at least two sizes",
            series.len()
        )));
    }
    let mut crossings = Vec::new();
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            let (a, b) = (&series[i].points, &series[j].points);
            if a.len() < 2 || b.len() < 2 {
                continue;
            }
            let lo = a.first().unwrap().0.max(b.first().unwrap().0);
            let hi = a.last().unwrap().0.min(b.last().unwrap().0);
            if lo >= hi {
                continue;
            }
            let mut grid: Vec<f64> = a
                .iter()
                .chain(b.iter())
                .map(|p| p.0)
                .filter(|&t| t >= lo && t <= hi)
                .collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let diff: Vec<(f64, f64)> = grid
                .iter()
                .map(|&t| {
                    let ya = interp_sorted(a, t).unwrap();
                    let yb = interp_sorted(b, t).unwrap();
                    (t, ya - yb)
                })
                .collect();
            let peak = grid
                .iter()
                .map(|&t| {
                    (t, interp_sorted(a, t).unwrap() + interp_sorted(b, t).unwrap())
                })
                .max_by(|u, v| u.1.total_cmp(&v.1))
                .map(|(t, _)| t)
                .unwrap();
            let mut best: Option<(f64, f64)> = None; // (distance to peak, crossing)
            for w in diff.windows(2) {
                let ((t0, d0), (t1, d1)) = (w[0], w[1]);
                let t_cross = if d0 == 0.0 {
                    Some(t0)
                } else if d0 * d1 < 0.0 {
                    Some(t0 + (t1 - t0) * d0 / (d0 - d1))
                } else {
                    None
                };
                if let Some(tc) = t_cross {
                    let dist = (tc - peak).abs();
                    if best.map_or(true, |(bd, _)| dist < bd) {
                        best = Some((dist, tc));
                    }
                }
            }
            if let Some((_, tc)) = best {
                crossings.push(tc);
            }
        }
    }
    if crossings.is_empty() {
        return Err(Error::InsufficientData(
            "no sign change found in any pair of size curves".into(),
        ));
    }
    crossings.sort_by(f64::total_cmp);
    let n = crossings.len();
    Ok(if n % 2 == 1 {
        crossings[n / 2]
    } else {
        0.5 * (crossings[n / 2 - 1] + crossings[n / 2])
    })
}

#[derive(Debug, Clone)]
pub struct CollapseOptions {
    /// Divide each size's observable by its own peak before collapsing.
    pub normalize_peak: bool,
    /// Optional single (q_c, nu) initialization replacing the multi-start
    /// grid.
    pub init: Option<(f64, f64)>,
    /// Grid of nu starting values when `init` is absent.
    pub nu_starts: Vec<f64>,
    /// Number of q_c starting values spread over the parameter range when
    /// `init` is absent.
    pub qc_starts: usize,
    pub nm: NelderMeadOptions,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions {
            normalize_peak: false,
            init: None,
            nu_starts: vec![0.5, 1.0, 1.5, 2.0, 3.0],
            qc_starts: 5,
            nm: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseFit {
    pub qc: f64,
    pub nu: f64,
    pub shift: f64,
    pub objective: f64,
    /// Objective after the preliminary stage (shift held at zero).
    pub stage_one_objective: f64,
    pub normalize_peak: bool,
    /// Sizes of the series the fit was computed from.
    pub sizes: Vec<usize>,
    pub evals: usize,
    pub converged: bool,
}

/// x-coordinate of the scaling variable: (q − q_c(L))·L^(1/nu) with the
/// finite-size-shifted critical point q_c(L) = q_c + shift·L^(−nu).
pub fn scaling_x(q: f64, size: usize, qc: f64, nu: f64, shift: f64) -> f64 {
    let l = size as f64;
    (q - qc - shift * l.powf(-nu)) * l.powf(1.0 / nu)
}

/// Each series divided by its own maximum, so every size's curve attains the
/// same peak value of 1. Amplitudes that decay with size otherwise keep
/// curves of different sizes strictly ordered; after normalization the curves
/// intersect near the transition and [`crossing_point`] applies.
pub fn peak_normalized(series: &[SweepSeries]) -> Result<Vec<SweepSeries>> {
    series
        .iter()
        .map(|s| {
            let peak = s.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            if !(peak.is_finite() && peak > 0.0) {
                return Err(Error::InsufficientData(format!(
                    "size {} has no positive peak to normalize by",
                    s.size
                )));
            }
            Ok(SweepSeries {
                size: s.size,
                points: s.points.iter().map(|&(q, y)| (q, y / peak)).collect(),
            })
        })
        .collect()
}

/// Mean squared deviation of each size's mapped points from the
/// piecewise-linear master curve through all other sizes' mapped points.
/// Infinite when the mapped x-ranges do not overlap at all.
fn collapse_objective(series: &[SweepSeries], qc: f64, nu: f64, shift: f64) -> f64 {
    if !(0.05..=20.0).contains(&nu) {
        return f64::INFINITY;
    }
    let mapped: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            let mut pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .map(|&(q, y)| (scaling_x(q, s.size, qc, nu, shift), y))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts
        })
        .collect();
    let mut sq_sum = 0.0;
    let mut count = 0usize;
    for (i, own) in mapped.iter().enumerate() {
        let mut master: Vec<(f64, f64)> = mapped
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, pts)| pts.iter().copied())
            .collect();
        // tie-break equal x by y so the merged curve is canonical no matter
        // how the input series were ordered
        master.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        for &(x, y) in own {
            if let Some(m) = interp_sorted(&master, x) {
                sq_sum += (y - m) * (y - m);
                count += 1;
            }
        }
    }
    if count == 0 {
        f64::INFINITY
    } else {
        sq_sum / count as f64
    }
}

/// Two-stage finite-size scaling collapse: a preliminary fit of (q_c, nu)
/// with the shift amplitude pinned at zero, then a refinement over
/// (q_c, nu, shift). Multi-start; the winner is decided by (objective,
/// start index), so the result is deterministic.
pub fn collapse(series: &[SweepSeries], options: &CollapseOptions) -> Result<CollapseFit> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} system sizes; the collapse needs at least 3",
            series.len()
        )));
    }
    if let Some(s) = series.iter().find(|s| s.points.len() < 5) {
        return Err(Error::InsufficientData(format!(
            "size {} has {} parameter points; at least 5 required",
            s.size,
            s.points.len()
        )));
    }
    {
        let mut sizes: Vec<usize> = series.iter().map(|s| s.size).collect();
        sizes.sort_unstable();
        if sizes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InsufficientData("duplicate system size".into()));
        }
    }
    let working = if options.normalize_peak {
        peak_normalized(series)?
    } else {
        series.to_vec()
    };

    let q_lo = working
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(f64::INFINITY, f64::min);
    let q_hi = working
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let starts: Vec<(f64, f64)> = match options.init {
        Some(init) => vec![init],
        None => {
            let m = options.qc_starts.max(1);
            (0..m)
                .map(|k| q_lo + (q_hi - q_lo) * (k as f64 + 0.5) / m as f64)
                .flat_map(|qc| options.nu_starts.iter().map(move |&nu| (qc, nu)))
                .collect()
        }
    };
    if starts.is_empty() {
        return Err(Error::Config("empty start grid".into()));
    }

    let q_span = (q_hi - q_lo).max(1e-6);
    let mut total_evals = 0usize;
    let mut best_one: Option<(f64, Vec<f64>, bool)> = None; // (objective, [qc, nu], converged)
    for &(qc0, nu0) in &starts {
        let m = nelder_mead(
            |p| collapse_objective(&working, p[0], p[1], 0.0),
            &[qc0, nu0],
            &NelderMeadOptions {
                initial_step: vec![0.1 * q_span, 0.2 * nu0.abs().max(0.1)],
                ..options.nm.clone()
            },
        )?;
        total_evals += m.evals;
        if best_one.as_ref().map_or(true, |(v, _, _)| m.value < *v) {
            best_one = Some((m.value, m.point, m.converged));
        }
    }
    let (stage_one_objective, p1, conv1) = best_one.unwrap();
    if !stage_one_objective.is_finite() {
        return Err(Error::InsufficientData(
            "mapped x-ranges never overlapped; no master curve exists".into(),
        ));
    }

    let m2 = nelder_mead(
        |p| collapse_objective(&working, p[0], p[1], p[2]),
        &[p1[0], p1[1], 0.0],
        &NelderMeadOptions {
            initial_step: vec![0.02 * q_span, 0.05 * p1[1].abs().max(0.1), 0.1],
            ..options.nm.clone()
        },
    )?;
    total_evals += m2.evals;

    let (qc, nu, shift, objective, converged) = if m2.value <= stage_one_objective {
        (m2.point[0], m2.point[1], m2.point[2], m2.value, m2.converged)
    } else {
        (p1[0], p1[1], 0.0, stage_one_objective, conv1)
    };
    Ok(CollapseFit {
        qc,
        nu,
        shift,
        objective,
        stage_one_objective,
        normalize_peak: options.normalize_peak,
        sizes: series.iter().map(|s| s.size).collect(),
        evals: total_evals,
        converged,
    })
}

/// Mapped (size, x, y) triples under a fit, for plot-ready output.
pub fn collapsed_coordinates(
    series: &[SweepSeries],
    fit: &CollapseFit,
) -> Result<Vec<(usize, f64, f64)>> {
    let working = if fit.normalize_peak {
        peak_normalized(series)?
    } else {
        series.to_vec()
    };
    Ok(working
        .iter()
        .flat_map(|s| {
            s.points
                .iter()
                .map(move |&(q, y)| (s.size, scaling_x(q, s.size, fit.qc, fit.nu, fit.shift), y))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn factorizable_boundary_frozen_values() {
        let law = BoundaryLaw::factorizable();
        let dq3 = law.delta_qc(3).unwrap().unwrap();
        assert!((dq3 - 0.529150262212918).abs() < 1e-12);
        assert!(law.delta_qc(2).unwrap().is_none());
        assert!(law.delta_qc(1).unwrap().is_none());
        let dq_big = law.delta_qc(1_000_000).unwrap().unwrap();
        assert!((dq_big - (2.0f64 / 3.0).sqrt()).abs() < 1e-6);

        let boundary =
            PhaseBoundary::new(law, ProbPath::SymmetricLine).unwrap();
        let q0 = boundary.critical_param(3).unwrap().unwrap();
        assert!((q0 - 0.11730864338640465).abs() < 1e-12);
    }

    #[test]
    fn factorizable_inversion_round_trips() {
        let law = BoundaryLaw::factorizable();
        for r in 3..=12 {
            let dq = law.delta_qc(r).unwrap().unwrap();
            assert!((law.range_for(dq).unwrap() - r as f64).abs() < 1e-9);
        }
        assert!(law.range_for(0.9).is_err());
    }

    #[test]
    fn xyz_boundary_frozen_values() {
        let odd = BoundaryLaw::xyz_odd();
        let dq3 = odd.delta_qc(3).unwrap().unwrap();
        assert!((dq3 - 0.03493665487172343).abs() < 1e-12);
        let dq31 = odd.delta_qc(31).unwrap().unwrap();
        assert!((dq31 - 0.20205621413408917).abs() < 1e-12);
        assert!(odd.delta_qc(1).unwrap().is_none()); // formula negative

        let even = BoundaryLaw::xyz_even();
        let dq4 = even.delta_qc(4).unwrap().unwrap();
        assert!((dq4 - 0.07745337797738244).abs() < 1e-12);

        assert!(odd.delta_qc(4).is_err());
        assert!(even.delta_qc(3).is_err());

        let sym_odd = PhaseBoundary::new(odd, ProbPath::SymmetricLine).unwrap();
        let q0_3 = sym_odd.critical_param(3).unwrap().unwrap();
        assert!((q0_3 - 0.31907050370742623).abs() < 1e-12);
        let q0_31 = sym_odd.critical_param(31).unwrap().unwrap();
        assert!((q0_31 - 0.25084422933549116).abs() < 1e-12);
        let sym_even = PhaseBoundary::new(even, ProbPath::SymmetricLine).unwrap();
        let q0_4 = sym_even.critical_param(4).unwrap().unwrap();
        assert!((q0_4 - 0.3017131241834155).abs() < 1e-12);
    }

    #[test]
    fn boundaries_monotone_in_range() {
        let fact = BoundaryLaw::factorizable();
        let mut prev = 0.0;
        for r in 3..=20 {
            let dq = fact.delta_qc(r).unwrap().unwrap();
            assert!(dq > prev);
            prev = dq;
        }
        let odd = BoundaryLaw::xyz_odd();
        let mut prev = 0.0;
        for r in (3..=31).step_by(2) {
            let dq = odd.delta_qc(r).unwrap().unwrap();
            assert!(dq > prev);
            prev = dq;
        }
        for r in 3..=12 {
            let (a, b) = (fact.delta_qc(r).unwrap().unwrap(), fact.delta_qc(r + 1).unwrap().unwrap());
            let (ra, rb) = (law_round(&fact, a), law_round(&fact, b));
            assert!(ra < rb);
        }
    }

    fn law_round(law: &BoundaryLaw, dq: f64) -> f64 {
        law.range_for(dq).unwrap()
    }

    #[test]
    fn xyz_inversion_round_trips() {
        let even = BoundaryLaw::xyz_even();
        for r in [4usize, 6, 8, 30] {
            let dq = even.delta_qc(r).unwrap().unwrap();
            assert!((even.range_for(dq).unwrap() - r as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_fit_exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let fit = fit_linear(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit_linear(&pts[..1]).is_err());
        assert!(fit_linear(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn linear_fit_flat_data() {
        let fit = fit_linear(&[(0.0, 5.0), (1.0, 5.0), (2.0, 5.0)]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    fn fan_line(size: usize, center: f64) -> SweepSeries {
        // lines through (center, 1) with size-dependent slope, so every
        // pair crosses exactly at `center` with a genuine sign change
        let slope = size as f64 / 32.0;
        let points: Vec<(f64, f64)> = (0..21)
            .map(|k| {
                let q = 0.1 + 0.02 * k as f64;
                (q, 1.0 + slope * (center - q))
            })
            .collect();
        SweepSeries::new(size, points).unwrap()
    }

    #[test]
    fn crossing_of_planted_curves() {
        let series = vec![fan_line(32, 0.3), fan_line(64, 0.3), fan_line(128, 0.3)];
        let tc = crossing_point(&series).unwrap();
        assert!((tc - 0.3).abs() < 1e-9, "crossing {tc}");
        assert!(crossing_point(&series[..1]).is_err());
    }

    #[test]
    fn crossing_prefers_sign_change_nearest_peak() {
        // a tent against a tilted line: two genuine crossings (near 0.189
        // and 0.391); the mean curve peaks at 0.3, so the right-hand one is
        // closer and must be returned
        let grid = |k: usize| 0.05 * k as f64;
        let a = SweepSeries::new(
            32,
            (0..21).map(|k| (grid(k), 2.0 - 3.0 * (grid(k) - 0.3).abs())).collect(),
        )
        .unwrap();
        let b = SweepSeries::new(
            64,
            (0..21).map(|k| (grid(k), 1.7 + 0.3 * (grid(k) - 0.3))).collect(),
        )
        .unwrap();
        let tc = crossing_point(&[a, b]).unwrap();
        assert!((tc - 0.39090909090909).abs() < 1e-9, "crossing {tc}");
    }

    fn planted_dataset(
        qc: f64,
        nu: f64,
        shift: f64,
        sizes: &[usize],
        n_points: usize,
        noise: f64,
        seed: u64,
    ) -> Vec<SweepSeries> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let master = |x: f64| 1.0 / (1.0 + x * x);
        sizes
            .iter()
            .map(|&l| {
                let points: Vec<(f64, f64)> = (0..n_points)
                    .map(|k| {
                        let q = 0.15 + 0.20 * k as f64 / (n_points - 1) as f64;
                        let x = scaling_x(q, l, qc, nu, shift);
                        let eps: f64 = rng.gen_range(-1.0..1.0);
                        (q, master(x) * (1.0 + noise * eps))
                    })
                    .collect();
                SweepSeries::new(l, points).unwrap()
            })
            .collect()
    }

    #[test]
    fn collapse_recovers_planted_parameters() {
        let series = planted_dataset(0.25, 1.3, 0.0, &[32, 64, 128], 11, 0.01, 7);
        let fit = collapse(&series, &CollapseOptions::default()).unwrap();
        assert!((fit.qc - 0.25).abs() < 5e-3, "qc {}", fit.qc);
        assert!((fit.nu - 1.3).abs() < 0.07, "nu {}", fit.nu);
        assert!(fit.nu > 0.0);
        assert!(fit.objective >= 0.0);
        assert!(fit.objective <= fit.stage_one_objective + 1e-15);
    }

    #[test]
    fn collapse_recovers_planted_shift() {
        let series = planted_dataset(0.25, 1.3, 0.5, &[16, 32, 64], 15, 0.01, 11);
        let fit = collapse(&series, &CollapseOptions::default()).unwrap();
        assert!(
            fit.objective < fit.stage_one_objective,
            "refinement did not reduce the objective: {} vs {}",
            fit.objective,
            fit.stage_one_objective
        );
        assert!((fit.shift - 0.5).abs() < 0.15, "shift {}", fit.shift);
    }

    #[test]
    fn collapse_insufficient_data() {
        let series = planted_dataset(0.25, 1.3, 0.0, &[32, 64], 11, 0.0, 1);
        assert!(collapse(&series, &CollapseOptions::default()).is_err());
        let short = planted_dataset(0.25, 1.3, 0.0, &[32, 64, 128], 4, 0.0, 1);
        assert!(collapse(&short, &CollapseOptions::default()).is_err());
    }

    #[test]
    fn collapse_objective_invariances() {
        let series = planted_dataset(0.25, 1.3, 0.0, &[32, 64, 128], 11, 0.01, 3);
        let base = collapse_objective(&series, 0.25, 1.3, 0.0);
        // relabeling sizes (reordering the slice) changes nothing
        let mut reordered = series.clone();
        reordered.reverse();
        let swapped = collapse_objective(&reordered, 0.25, 1.3, 0.0);
        assert!((base - swapped).abs() < 1e-15);
        // uniform rescaling with peak normalization changes nothing
        let scaled: Vec<SweepSeries> = series
            .iter()
            .map(|s| SweepSeries {
                size: s.size,
                points: s.points.iter().map(|&(q, y)| (q, 7.5 * y)).collect(),
            })
            .collect();
        let n1 = collapse_objective(&peak_normalized(&series).unwrap(), 0.25, 1.3, 0.0);
        let n2 = collapse_objective(&peak_normalized(&scaled).unwrap(), 0.25, 1.3, 0.0);
        assert!((n1 - n2).abs() < 1e-15);
    }

    #[test]
    fn collapse_rejects_hopeless_initialization() {
        // pinned start far outside the admissible exponent bracket: the
        // objective is infinite everywhere the shrinking simplex can reach,
        // and the fit must surface an error rather than an infinite optimum
        let series = planted_dataset(0.25, 1.3, 0.0, &[32, 64, 128], 11, 0.01, 3);
        let options =
            CollapseOptions { init: Some((0.25, 80.0)), ..CollapseOptions::default() };
        assert!(collapse(&series, &options).is_err());
    }

    #[test]
    fn constant_curves_collapse_degenerately() {
        // disjoint parameter windows with constant observable: every point
        // interpolates onto the flat master curve, so the fit succeeds with
        // a zero objective instead of erroring
        let series: Vec<SweepSeries> = [32usize, 64, 128]
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let base = 10.0 * (i as f64 + 1.0);
                SweepSeries::new(
                    l,
                    (0..6).map(|k| (base + 0.001 * k as f64, 1.0)).collect(),
                )
                .unwrap()
            })
            .collect();
        let fit = collapse(&series, &CollapseOptions::default()).unwrap();
        assert_eq!(fit.objective, 0.0);
    }

    #[test]
    fn scaling_x_shift_direction() {
        // positive shift moves the finite-size pseudo-critical point up
        let x0 = scaling_x(0.25, 32, 0.25, 1.3, 0.0);
        let x1 = scaling_x(0.25, 32, 0.25, 1.3, 0.5);
        assert_eq!(x0, 0.0);
        assert!(x1 < 0.0);
    }

    #[test]
    fn peak_normalization_reveals_crossing_of_ordered_curves() {
        // Gaussian bumps whose amplitude decays and whose centre drifts with
        // size: the raw curves never intersect (larger size is lower
        // everywhere), but once each is scaled to unit peak the curves cross
        // between the per-size maxima.
        let bump = |q: f64, center: f64, width: f64, amp: f64| {
            amp * (-((q - center) / width).powi(2)).exp()
        };
        let series: Vec<SweepSeries> = [(32usize, 0.118, 1.0), (64, 0.125, 0.5), (128, 0.132, 0.25)]
            .iter()
            .map(|&(l, center, amp)| {
                let pts = (0..15)
                    .map(|k| {
                        let q = 0.08 + 0.008 * k as f64;
                        (q, bump(q, center, 0.03, amp))
                    })
                    .collect();
                SweepSeries::new(l, pts).unwrap()
            })
            .collect();
        assert!(crossing_point(&series).is_err());
        let normalized = peak_normalized(&series).unwrap();
        for s in &normalized {
            let peak = s.points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
            assert!((peak - 1.0).abs() < 1e-12);
        }
        let qx = crossing_point(&normalized).unwrap();
        assert!((0.118..=0.132).contains(&qx), "crossing {qx} outside the peak span");
    }
}
