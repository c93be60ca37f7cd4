//! Measurement-operator ensembles on a ring.
//!
//! Three families, all translation invariant by construction:
//! - `Factorizable`: range r drawn from a distribution, offset uniform,
//!   then r i.i.d. letters from per-site probabilities (p_x, p_y, p_z);
//! - `Xyz`: a single letter α drawn from weights (P_X, P_Y, P_Z), placed as
//!   the uniform string α⊗r at a uniform offset;
//! - `FixedString`: the translation orbit of one fixed letter sequence.
//!
//! `delta_q` measures the Euclidean distance of a probability triple from
//! the symmetric point (1/3, 1/3, 1/3); `ProbPath` parameterizes the lines
//! in probability space along which transitions are located.

use rand::Rng;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

pub const DEFAULT_EXPONENTIAL_RATE: f64 = 0.5;
pub const DEFAULT_POWER_EXPONENT: f64 = 2.0;
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

const SQRT6: f64 = 2.449489742783178;

/// Per-site letter probabilities (p_x, p_y, p_z); validated non-negative,
/// summing to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteProbs {
    x: f64,
    y: f64,
    z: f64,
}

impl SiteProbs {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        for (name, v) in [("p_x", x), ("p_y", y), ("p_z", z)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidProbabilities(format!("{name} = {v}")));
            }
        }
        if (x + y + z - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {} instead of 1",
                x + y + z
            )));
        }
        Ok(SiteProbs { x, y, z })
    }

    /// The symmetric-direction point (q0, q0, 1 − 2 q0).
    pub fn symmetric(q0: f64) -> Result<Self> {
        SiteProbs::new(q0, q0, 1.0 - 2.0 * q0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Euclidean distance from the symmetric point (1/3, 1/3, 1/3).
    pub fn delta_q(&self) -> f64 {
        let t = 1.0 / 3.0;
        ((self.x - t).powi(2) + (self.y - t).powi(2) + (self.z - t).powi(2)).sqrt()
    }

    /// Probability that two independent letters drawn from this triple
    /// differ: 1 − (p_x² + p_y² + p_z²). Controls pairwise anticommutation
    /// of factorizable strings site by site.
    pub fn mismatch_rate(&self) -> f64 {
        1.0 - (self.x * self.x + self.y * self.y + self.z * self.z)
    }

    pub fn sample_letter(&self, rng: &mut impl Rng) -> Pauli {
        let u: f64 = rng.gen();
        if u < self.x {
            Pauli::X
        } else if u < self.x + self.y {
            Pauli::Y
        } else {
            Pauli::Z
        }
    }
}

/// Distribution of the string range r, truncated to [min, max] and
/// renormalized.
#[derive(Debug, Clone, PartialEq)]
pub enum RangeDist {
    Fixed(usize),
    Uniform { min: usize, max: usize },
    /// p(r) ∝ exp(−rate · r) on [min, max].
    Exponential { rate: f64, min: usize, max: usize },
    /// p(r) ∝ r^(−exponent) on [min, max].
    PowerLaw { exponent: f64, min: usize, max: usize },
}

impl RangeDist {
    pub fn exponential(min: usize, max: usize) -> Self {
        RangeDist::Exponential { rate: DEFAULT_EXPONENTIAL_RATE, min, max }
    }

    pub fn power_law(min: usize, max: usize) -> Self {
        RangeDist::PowerLaw { exponent: DEFAULT_POWER_EXPONENT, min, max }
    }

    pub fn validate(&self) -> Result<()> {
        let (min, max) = self.bounds();
        if min == 0 {
            return Err(Error::InvalidRange("ranges start at 1".into()));
        }
        if min > max {
            return Err(Error::InvalidRange(format!("min {min} > max {max}")));
        }
        match *self {
            RangeDist::Exponential { rate, .. } if !(rate.is_finite() && rate > 0.0) => {
                Err(Error::InvalidRange(format!("exponential rate {rate} must be > 0")))
            }
            RangeDist::PowerLaw { exponent, .. }
                if !(exponent.is_finite() && exponent > 0.0) =>
            {
                Err(Error::InvalidRange(format!("power-law exponent {exponent} must be > 0")))
            }
            _ => Ok(()),
        }
    }

    pub fn bounds(&self) -> (usize, usize) {
        match *self {
            RangeDist::Fixed(r) => (r, r),
            RangeDist::Uniform { min, max }
            | RangeDist::Exponential { min, max, .. }
            | RangeDist::PowerLaw { min, max, .. } => (min, max),
        }
    }

    pub fn max_range(&self) -> usize {
        self.bounds().1
    }

    /// Normalized (r, p(r)) over the truncated support.
    pub fn weights(&self) -> Vec<(usize, f64)> {
        let (min, max) = self.bounds();
        let raw: Vec<(usize, f64)> = (min..=max)
            .map(|r| {
                let w = match *self {
                    RangeDist::Fixed(_) | RangeDist::Uniform { .. } => 1.0,
                    RangeDist::Exponential { rate, .. } => (-rate * r as f64).exp(),
                    RangeDist::PowerLaw { exponent, .. } => (r as f64).powf(-exponent),
                };
                (r, w)
            })
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        raw.into_iter().map(|(r, w)| (r, w / total)).collect()
    }
}

/// A line through (p_x, p_y, p_z) probability space along which ensembles
/// are tuned. Paths produce valid probability triples for every admissible
/// parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbPath {
    /// (t, t, 1 − 2t) for t in [0, 1/2]; passes through the symmetric point
    /// at t = 1/3 and reaches the Z corner at t = 0.
    SymmetricLine,
    /// The p_z = 0 edge, (t, 1 − t, 0) for t in [0, 1].
    ZeroZEdge,
    /// Ray from the symmetric point toward an anchor (a, 1 − a, 0) on the
    /// p_z = 0 edge, parameterized by s in [0, 1].
    AnchorRay { anchor_x: f64 },
}

impl ProbPath {
    pub fn validate(&self) -> Result<()> {
        if let ProbPath::AnchorRay { anchor_x } = *self {
            if !(0.0..=1.0).contains(&anchor_x) {
                return Err(Error::InvalidProbabilities(format!(
                    "anchor_x {anchor_x} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn probs_at(&self, t: f64) -> Result<SiteProbs> {
        self.validate()?;
        match *self {
            ProbPath::SymmetricLine => SiteProbs::symmetric(t),
            ProbPath::ZeroZEdge => SiteProbs::new(t, 1.0 - t, 0.0),
            ProbPath::AnchorRay { anchor_x } => {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::InvalidProbabilities(format!(
                        "ray parameter {t} outside [0, 1]"
                    )));
                }
                let third = 1.0 / 3.0;
                SiteProbs::new(
                    (1.0 - t) * third + t * anchor_x,
                    (1.0 - t) * third + t * (1.0 - anchor_x),
                    (1.0 - t) * third,
                )
            }
        }
    }

    pub fn delta_q_at(&self, t: f64) -> Result<f64> {
        Ok(self.probs_at(t)?.delta_q())
    }

    /// Path parameter at a given delta_q; same branch conventions as
    /// `point_at_delta_q`.
    pub fn param_at_delta_q(&self, dq: f64) -> Result<f64> {
        let probs = self.point_at_delta_q(dq)?;
        Ok(match *self {
            ProbPath::SymmetricLine => probs.x(),
            ProbPath::ZeroZEdge => probs.x(),
            ProbPath::AnchorRay { anchor_x } => {
                let anchor_dq = SiteProbs::new(anchor_x, 1.0 - anchor_x, 0.0)?.delta_q();
                (dq / anchor_dq).min(1.0)
            }
        })
    }

    /// Inverts delta_q along the path. Branch conventions: the symmetric
    /// line moves from the symmetric point toward the Z corner (t < 1/3);
    /// the p_z = 0 edge takes the X-rich branch (t ≥ 1/2).
    pub fn point_at_delta_q(&self, dq: f64) -> Result<SiteProbs> {
        self.validate()?;
        if !(dq.is_finite() && dq >= 0.0) {
            return Err(Error::InvalidProbabilities(format!("delta_q = {dq}")));
        }
        match *self {
            ProbPath::SymmetricLine => {
                let q0 = 1.0 / 3.0 - dq / SQRT6;
                if q0 < -1e-12 {
                    return Err(Error::InvalidProbabilities(format!(
                        "delta_q {dq} unreachable on the symmetric line"
                    )));
                }
                SiteProbs::symmetric(q0.max(0.0))
            }
            ProbPath::ZeroZEdge => {
                let disc = 2.0 * dq * dq - 1.0 / 3.0;
                if disc < -1e-12 {
                    return Err(Error::InvalidProbabilities(format!(
                        "delta_q {dq} below the p_z=0 edge minimum"
                    )));
                }
                let t = (1.0 + disc.max(0.0).sqrt()) / 2.0;
                if t > 1.0 + 1e-12 {
                    return Err(Error::InvalidProbabilities(format!(
                        "delta_q {dq} unreachable on the p_z=0 edge"
                    )));
                }
                SiteProbs::new(t.min(1.0), 1.0 - t.min(1.0), 0.0)
            }
            ProbPath::AnchorRay { anchor_x } => {
                let anchor_dq = SiteProbs::new(anchor_x, 1.0 - anchor_x, 0.0)?.delta_q();
                let s = dq / anchor_dq;
                if s > 1.0 + 1e-12 {
                    return Err(Error::InvalidProbabilities(format!(
                        "delta_q {dq} beyond the anchor point (anchor delta_q {anchor_dq})"
                    )));
                }
                self.probs_at(s.min(1.0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleFamily {
    Factorizable { probs: SiteProbs, range: RangeDist },
    Xyz { weights: SiteProbs, range: usize },
    FixedString { letters: Vec<Pauli> },
}

/// One operator of an enumerable ensemble with its draw probability.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WeightedOperator {
    pub op: PauliString,
    pub prob: f64,
}

/// A validated ensemble on a ring, with cached sampling tables.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    ring: usize,
    family: EnsembleFamily,
    range_cdf: Vec<(usize, f64)>,
}

impl EnsembleSpec {
    pub fn new(ring: usize, family: EnsembleFamily) -> Result<Self> {
        if ring == 0 {
            return Err(Error::EmptyRing);
        }
        let range_cdf = match &family {
            EnsembleFamily::Factorizable { probs, range } => {
                range.validate()?;
                // re-validate the triple (constructed values can only come
                // from SiteProbs::new, but the check is cheap)
                SiteProbs::new(probs.x, probs.y, probs.z)?;
                if range.max_range() > ring {
                    return Err(Error::InvalidRange(format!(
                        "max range {} exceeds ring length {ring}",
                        range.max_range()
                    )));
                }
                let mut acc = 0.0;
                range
                    .weights()
                    .into_iter()
                    .map(|(r, w)| {
                        acc += w;
                        (r, acc)
                    })
                    .collect()
            }
            EnsembleFamily::Xyz { weights, range } => {
                SiteProbs::new(weights.x, weights.y, weights.z)?;
                if *range == 0 {
                    return Err(Error::InvalidRange("ranges start at 1".into()));
                }
                if *range > ring {
                    return Err(Error::InvalidRange(format!(
                        "range {range} exceeds ring length {ring}"
                    )));
                }
                Vec::new()
            }
            EnsembleFamily::FixedString { letters } => {
                // constructs once to validate letters (non-empty, no identity)
                PauliString::from_letters(ring, 0, letters)?;
                Vec::new()
            }
        };
        Ok(EnsembleSpec { ring, family, range_cdf })
    }

    pub fn factorizable(ring: usize, probs: SiteProbs, range: RangeDist) -> Result<Self> {
        EnsembleSpec::new(ring, EnsembleFamily::Factorizable { probs, range })
    }

    pub fn xyz(ring: usize, weights: SiteProbs, range: usize) -> Result<Self> {
        EnsembleSpec::new(ring, EnsembleFamily::Xyz { weights, range })
    }

    pub fn fixed_string(ring: usize, letters: Vec<Pauli>) -> Result<Self> {
        EnsembleSpec::new(ring, EnsembleFamily::FixedString { letters })
    }

    pub fn ring(&self) -> usize {
        self.ring
    }

    pub fn family(&self) -> &EnsembleFamily {
        &self.family
    }

    pub fn max_range(&self) -> usize {
        match &self.family {
            EnsembleFamily::Factorizable { range, .. } => range.max_range(),
            EnsembleFamily::Xyz { range, .. } => *range,
            EnsembleFamily::FixedString { letters } => letters.len(),
        }
    }

    /// Draws one operator. Draw order (range, then offset, then letters) is
    /// fixed so that trajectories are reproducible across versions.
    pub fn sample(&self, rng: &mut impl Rng) -> PauliString {
        match &self.family {
            EnsembleFamily::Factorizable { probs, .. } => {
                let u: f64 = rng.gen();
                let r = self
                    .range_cdf
                    .iter()
                    .find(|(_, c)| u < *c)
                    .map(|(r, _)| *r)
                    .unwrap_or_else(|| self.range_cdf.last().unwrap().0);
                let offset = rng.gen_range(0..self.ring);
                let mut s = PauliString::identity(self.ring).unwrap();
                for k in 0..r {
                    s.set_letter((offset + k) % self.ring, probs.sample_letter(rng));
                }
                s
            }
            EnsembleFamily::Xyz { weights, range } => {
                let letter = weights.sample_letter(rng);
                let offset = rng.gen_range(0..self.ring);
                PauliString::from_letters(self.ring, offset, &vec![letter; *range]).unwrap()
            }
            EnsembleFamily::FixedString { letters } => {
                let offset = rng.gen_range(0..self.ring);
                PauliString::from_letters(self.ring, offset, letters).unwrap()
            }
        }
    }

    /// Number of (range, offset, letters) combinations the enumeration would
    /// emit, before merging duplicates.
    pub fn support_size(&self) -> u128 {
        match &self.family {
            EnsembleFamily::Factorizable { probs, range } => {
                let letters = [probs.x, probs.y, probs.z].iter().filter(|&&p| p > 0.0).count();
                range
                    .weights()
                    .iter()
                    .map(|(r, _)| {
                        (letters as u128).saturating_pow(*r as u32).saturating_mul(self.ring as u128)
                    })
                    .fold(0u128, u128::saturating_add)
            }
            EnsembleFamily::Xyz { weights, .. } => {
                let letters =
                    [weights.x, weights.y, weights.z].iter().filter(|&&p| p > 0.0).count();
                (letters * self.ring) as u128
            }
            EnsembleFamily::FixedString { .. } => self.ring as u128,
        }
    }

    pub fn enumerate(&self) -> Result<Vec<WeightedOperator>> {
        self.enumerate_capped(DEFAULT_ENUMERATION_CAP)
    }

    /// Explicit (operator, probability) list. Distinct draws producing the
    /// same operator are merged; the list is sorted letter-lexicographically
    /// so it is a canonical description of the distribution.
    pub fn enumerate_capped(&self, cap: u128) -> Result<Vec<WeightedOperator>> {
        let support = self.support_size();
        if support > cap {
            return Err(Error::SupportTooLarge { support, cap });
        }
        let mut merged: HashMap<PauliString, f64> = HashMap::new();
        let offset_prob = 1.0 / self.ring as f64;
        match &self.family {
            EnsembleFamily::Factorizable { probs, range } => {
                let letter_probs: Vec<(Pauli, f64)> =
                    [(Pauli::X, probs.x), (Pauli::Y, probs.y), (Pauli::Z, probs.z)]
                        .into_iter()
                        .filter(|(_, p)| *p > 0.0)
                        .collect();
                for (r, w) in range.weights() {
                    let mut idx = vec![0usize; r];
                    loop {
                        let letters: Vec<Pauli> =
                            idx.iter().map(|&i| letter_probs[i].0).collect();
                        let p_letters: f64 =
                            idx.iter().map(|&i| letter_probs[i].1).product();
                        for offset in 0..self.ring {
                            let op =
                                PauliString::from_letters(self.ring, offset, &letters).unwrap();
                            *merged.entry(op).or_insert(0.0) += w * offset_prob * p_letters;
                        }
                        // odometer over letter indices
                        let mut k = 0;
                        loop {
                            if k == r {
                                break;
                            }
                            idx[k] += 1;
                            if idx[k] < letter_probs.len() {
                                break;
                            }
                            idx[k] = 0;
                            k += 1;
                        }
                        if k == r {
                            break;
                        }
                    }
                }
            }
            EnsembleFamily::Xyz { weights, range } => {
                for (letter, w) in
                    [(Pauli::X, weights.x), (Pauli::Y, weights.y), (Pauli::Z, weights.z)]
                {
                    if w <= 0.0 {
                        continue;
                    }
                    for offset in 0..self.ring {
                        let op = PauliString::from_letters(
                            self.ring,
                            offset,
                            &vec![letter; *range],
                        )
                        .unwrap();
                        *merged.entry(op).or_insert(0.0) += w * offset_prob;
                    }
                }
            }
            EnsembleFamily::FixedString { letters } => {
                for offset in 0..self.ring {
                    let op = PauliString::from_letters(self.ring, offset, letters).unwrap();
                    *merged.entry(op).or_insert(0.0) += offset_prob;
                }
            }
        }
        let mut out: Vec<WeightedOperator> =
            merged.into_iter().map(|(op, prob)| WeightedOperator { op, prob }).collect();
        out.sort_by(|a, b| a.op.cmp_letters(&b.op));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_q_frozen_values() {
        let p = SiteProbs::new(0.5, 0.5, 0.0).unwrap();
        assert!((p.delta_q() - 0.408248290463863).abs() < 1e-12);
        let sym = SiteProbs::symmetric(0.117).unwrap();
        assert!((sym.delta_q() - 0.5299062810220941).abs() < 1e-12);
        assert!(SiteProbs::symmetric(1.0 / 3.0).unwrap().delta_q() < 1e-12);
    }

    #[test]
    fn probability_validation() {
        assert!(SiteProbs::new(0.4, 0.4, 0.4).is_err());
        assert!(SiteProbs::new(-0.1, 0.6, 0.5).is_err());
        assert!(SiteProbs::symmetric(0.6).is_err()); // p_z negative
        assert!(SiteProbs::new(0.25, 0.25, 0.5).is_ok());
    }

    #[test]
    fn range_weights_normalize() {
        for dist in [
            RangeDist::Fixed(3),
            RangeDist::Uniform { min: 1, max: 6 },
            RangeDist::exponential(3, 6),
            RangeDist::power_law(3, 6),
        ] {
            dist.validate().unwrap();
            let total: f64 = dist.weights().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12, "{dist:?}");
        }
        assert!(RangeDist::Uniform { min: 4, max: 2 }.validate().is_err());
        assert!(RangeDist::Fixed(0).validate().is_err());
        assert!(RangeDist::Exponential { rate: -1.0, min: 1, max: 3 }.validate().is_err());
    }

    #[test]
    fn exponential_weight_ratios() {
        let w = RangeDist::exponential(3, 6).weights();
        // successive ratios are exp(-rate)
        for pair in w.windows(2) {
            assert!((pair[1].1 / pair[0].1 - (-0.5f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn enumerate_counts_and_total_probability() {
        let ring = 6;
        let spec = EnsembleSpec::factorizable(
            ring,
            SiteProbs::new(0.5, 0.5, 0.0).unwrap(),
            RangeDist::Fixed(2),
        )
        .unwrap();
        let ops = spec.enumerate().unwrap();
        assert_eq!(ops.len(), 4 * ring); // 2^2 letter pairs, 6 offsets
        let total: f64 = ops.iter().map(|w| w.prob).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let xyz = EnsembleSpec::xyz(ring, SiteProbs::symmetric(1.0 / 3.0).unwrap(), 2).unwrap();
        let ops = xyz.enumerate().unwrap();
        assert_eq!(ops.len(), 3 * ring);
        let total: f64 = ops.iter().map(|w| w.prob).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let fixed =
            EnsembleSpec::fixed_string(ring, vec![Pauli::X, Pauli::X, Pauli::Y]).unwrap();
        let ops = fixed.enumerate().unwrap();
        assert_eq!(ops.len(), ring);
        assert!(ops.iter().all(|w| (w.prob - 1.0 / ring as f64).abs() < 1e-12));
    }

    #[test]
    fn enumerate_merges_full_ring_strings() {
        // X^L at any offset is the same operator: must merge to one entry
        let spec = EnsembleSpec::xyz(4, SiteProbs::symmetric(1.0 / 3.0).unwrap(), 4).unwrap();
        let ops = spec.enumerate().unwrap();
        assert_eq!(ops.len(), 3);
        for w in &ops {
            assert!((w.prob - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_cap_refuses() {
        let spec = EnsembleSpec::factorizable(
            64,
            SiteProbs::symmetric(1.0 / 3.0).unwrap(),
            RangeDist::Fixed(16),
        )
        .unwrap();
        assert!(matches!(spec.enumerate(), Err(Error::SupportTooLarge { .. })));
    }

    #[test]
    fn sampling_matches_enumeration() {
        // coarse chi-square-style check: every enumerated operator's empirical
        // frequency within 5 sigma of its probability
        let spec = EnsembleSpec::factorizable(
            5,
            SiteProbs::new(0.3, 0.3, 0.4).unwrap(),
            RangeDist::Uniform { min: 1, max: 2 },
        )
        .unwrap();
        let ops = spec.enumerate().unwrap();
        let mut counts: HashMap<String, usize> = HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000usize;
        for _ in 0..n {
            *counts.entry(spec.sample(&mut rng).to_string()).or_insert(0) += 1;
        }
        let enumerated: f64 = ops.iter().map(|w| w.prob).sum();
        assert!((enumerated - 1.0).abs() < 1e-12);
        for w in &ops {
            let observed = *counts.get(&w.op.to_string()).unwrap_or(&0) as f64 / n as f64;
            let sigma = (w.prob * (1.0 - w.prob) / n as f64).sqrt();
            assert!(
                (observed - w.prob).abs() < 5.0 * sigma + 1e-9,
                "{}: observed {observed}, expected {}",
                w.op,
                w.prob
            );
        }
        // and nothing outside the enumerated support was drawn
        let listed: std::collections::HashSet<String> =
            ops.iter().map(|w| w.op.to_string()).collect();
        assert!(counts.keys().all(|k| listed.contains(k)));
    }

    #[test]
    fn translation_invariance_of_enumeration() {
        let spec = EnsembleSpec::fixed_string(6, vec![Pauli::X, Pauli::Y]).unwrap();
        let ops = spec.enumerate().unwrap();
        // every operator appears at every offset with equal probability
        for w in &ops {
            assert!((w.prob - 1.0 / 6.0).abs() < 1e-12);
        }
        let supports: Vec<Vec<usize>> = ops.iter().map(|w| w.op.support()).collect();
        assert_eq!(supports.len(), 6);
    }

    #[test]
    fn path_round_trips() {
        for path in [
            ProbPath::SymmetricLine,
            ProbPath::ZeroZEdge,
            ProbPath::AnchorRay { anchor_x: 0.97 },
        ] {
            for dq in [0.45, 0.55, 0.65] {
                let probs = path.point_at_delta_q(dq).unwrap();
                assert!((probs.delta_q() - dq).abs() < 1e-9, "{path:?} dq={dq}");
            }
        }
        // symmetric line covers small delta_q too
        let p = ProbPath::SymmetricLine.point_at_delta_q(0.1).unwrap();
        assert!((p.delta_q() - 0.1).abs() < 1e-12);
        assert!(p.x() < 1.0 / 3.0, "branch moves toward the Z corner");
    }

    #[test]
    fn path_reachability_errors() {
        // p_z=0 edge never gets closer than 1/sqrt(6) to the symmetric point
        assert!(ProbPath::ZeroZEdge.point_at_delta_q(0.3).is_err());
        // anchor at the edge midpoint only reaches delta_q = 1/sqrt(6)
        let ray = ProbPath::AnchorRay { anchor_x: 0.5 };
        assert!(ray.point_at_delta_q(0.5).is_err());
        assert!(ray.point_at_delta_q(0.40).is_ok());
        assert!(ProbPath::SymmetricLine.point_at_delta_q(0.9).is_err());
        assert!(ProbPath::AnchorRay { anchor_x: 1.5 }.probs_at(0.5).is_err());
    }

    #[test]
    fn spec_validation() {
        let probs = SiteProbs::symmetric(1.0 / 3.0).unwrap();
        assert!(EnsembleSpec::factorizable(4, probs, RangeDist::Fixed(5)).is_err());
        assert!(EnsembleSpec::xyz(4, probs, 0).is_err());
        assert!(EnsembleSpec::fixed_string(4, vec![]).is_err());
        assert!(EnsembleSpec::fixed_string(4, vec![Pauli::I]).is_err());
        assert!(EnsembleSpec::fixed_string(2, vec![Pauli::X; 3]).is_err());
    }
}
