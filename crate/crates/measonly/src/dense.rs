//! Brute-force state-vector oracle for small rings (≤ 12 qubits).
//!
//! Implements projective Pauli measurements with genuine Born sampling and
//! exact von Neumann entanglement entropy via a Schmidt decomposition. Used
//! to cross-check the stabilizer engine: on stabilizer inputs every outcome
//! probability is 0, 1/2, or 1 and every entropy is an integer number of
//! bits, so the two engines must agree exactly.
//!
//! Site s maps to bit s of the amplitude index (site 0 = least significant).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ensemble::{EnsembleSpec, RangeDist, SiteProbs};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::stabilizer::{Region, StabilizerState};

pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone)]
pub struct DenseState {
    ring: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero_state(ring: usize) -> Result<Self> {
        if ring == 0 {
            return Err(Error::EmptyRing);
        }
        if ring > MAX_DENSE_QUBITS {
            return Err(Error::DenseTooLarge { got: ring, max: MAX_DENSE_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << ring];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { ring, amps })
    }

    pub fn ring(&self) -> usize {
        self.ring
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// M|ψ⟩ for a Pauli string M with the standard phase convention
    /// M = i^{#Y} · prod_j X^{x_j} Z^{z_j} (so M is Hermitian with ±1
    /// eigenvalues).
    fn apply_op(&self, op: &PauliString) -> Vec<Complex64> {
        let mut x_mask = 0usize;
        let mut y_count = 0u32;
        let mut z_mask = 0usize;
        for s in 0..self.ring {
            if op.x_bit(s) {
                x_mask |= 1 << s;
            }
            if op.z_bit(s) {
                z_mask |= 1 << s;
                if op.x_bit(s) {
                    y_count += 1;
                }
            }
        }
        let y_phase = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            // Z acts first: phase from z-bits of the source basis state
            let sign = if ((idx & z_mask).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            out[idx ^ x_mask] = a * y_phase * sign;
        }
        out
    }

    /// Re⟨ψ|M|ψ⟩ (the imaginary part vanishes for Hermitian M).
    pub fn expectation(&self, op: &PauliString) -> Result<f64> {
        if op.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, op.ring()));
        }
        let m_psi = self.apply_op(op);
        let val: Complex64 =
            self.amps.iter().zip(&m_psi).map(|(a, b)| a.conj() * b).sum();
        Ok(val.re)
    }

    /// Projectively measures M, collapsing onto (1 ± M)/2 |ψ⟩ with Born
    /// probabilities p± = (1 ± ⟨M⟩)/2. Returns the sampled outcome.
    pub fn measure(&mut self, op: &PauliString, rng: &mut impl Rng) -> Result<i8> {
        if op.is_identity() {
            return Err(Error::IdentityMeasurement);
        }
        let expect = self.expectation(op)?;
        let p_plus = ((1.0 + expect) / 2.0).clamp(0.0, 1.0);
        let outcome: i8 = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        let m_psi = self.apply_op(op);
        let sign = outcome as f64;
        for (a, m) in self.amps.iter_mut().zip(&m_psi) {
            *a = (*a + sign * m) / 2.0;
        }
        let n = self.norm();
        if n * n < 1e-12 {
            return Err(Error::Numerical(
                "projection onto a zero-norm branch was selected".into(),
            ));
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(outcome)
    }

    /// Exact von Neumann entropy of `region` in bits, via the singular values
    /// of the amplitude matrix reshaped to (region) x (complement).
    pub fn entropy(&self, region: &Region) -> Result<f64> {
        if region.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, region.ring()));
        }
        let a_sites = region.sites();
        let m = a_sites.len();
        if m == 0 || m == self.ring {
            return Ok(0.0);
        }
        let b_sites: Vec<usize> =
            (0..self.ring).filter(|s| !region.contains(*s)).collect();
        let mut mat = DMatrix::<Complex64>::zeros(1 << m, 1 << (self.ring - m));
        for (idx, &a) in self.amps.iter().enumerate() {
            let mut row = 0usize;
            for (k, &s) in a_sites.iter().enumerate() {
                row |= (idx >> s & 1) << k;
            }
            let mut col = 0usize;
            for (k, &s) in b_sites.iter().enumerate() {
                col |= (idx >> s & 1) << k;
            }
            mat[(row, col)] = a;
        }
        let sv = mat.singular_values();
        let mut entropy = 0.0;
        for &s in sv.iter() {
            let p = s * s;
            if p > 1e-12 {
                entropy -= p * p.log2();
            }
        }
        Ok(entropy)
    }
}

/// Result of a randomized stabilizer-vs-state-vector equivalence campaign.
#[derive(Debug, Clone, Serialize)]
pub struct OracleAudit {
    pub sequences: usize,
    pub measurements_per_sequence: usize,
    pub sizes: Vec<usize>,
    /// Entropy comparisons performed (every contiguous region after every
    /// measurement).
    pub comparisons: usize,
    pub max_abs_difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// A random ensemble on `ring` sites: family, parameters, and range are all
/// drawn from the RNG.
fn random_spec(ring: usize, rng: &mut ChaCha8Rng) -> EnsembleSpec {
    let triple = |rng: &mut ChaCha8Rng| {
        let (a, b) = (rng.gen::<f64>(), rng.gen::<f64>());
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        SiteProbs::new(lo, hi - lo, 1.0 - hi).unwrap()
    };
    let letter = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
        0 => Pauli::X,
        1 => Pauli::Y,
        _ => Pauli::Z,
    };
    match rng.gen_range(0..3) {
        0 => {
            let max = rng.gen_range(1..=ring);
            let min = rng.gen_range(1..=max);
            let range = match rng.gen_range(0..4) {
                0 => RangeDist::Fixed(max),
                1 => RangeDist::Uniform { min, max },
                2 => RangeDist::exponential(min, max),
                _ => RangeDist::power_law(min, max),
            };
            EnsembleSpec::factorizable(ring, triple(rng), range).unwrap()
        }
        1 => EnsembleSpec::xyz(ring, triple(rng), rng.gen_range(1..=ring)).unwrap(),
        _ => {
            let len = rng.gen_range(1..=ring);
            let letters: Vec<Pauli> = (0..len).map(|_| letter(rng)).collect();
            EnsembleSpec::fixed_string(ring, letters).unwrap()
        }
    }
}

/// Drive the stabilizer engine and the dense oracle through the same random
/// measurement sequences and compare the entanglement entropy of every
/// contiguous region after every measurement. Sequences cycle through
/// `sizes`; each draws a fresh random ensemble.
pub fn oracle_audit(
    sizes: &[usize],
    sequences: usize,
    measurements: usize,
    tolerance: f64,
    seed: u64,
) -> Result<OracleAudit> {
    if sizes.is_empty() {
        return Err(Error::Config("no ring sizes to audit".into()));
    }
    if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s > MAX_DENSE_QUBITS) {
        return Err(Error::Config(format!(
            "ring size {bad} outside the dense oracle's reach (1..={MAX_DENSE_QUBITS})"
        )));
    }
    if sequences == 0 || measurements == 0 {
        return Err(Error::Config("sequences and measurements must be positive".into()));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Config(format!("tolerance {tolerance} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comparisons = 0usize;
    let mut max_diff = 0.0f64;
    for k in 0..sequences {
        let ring = sizes[k % sizes.len()];
        let spec = random_spec(ring, &mut rng);
        let mut stab = StabilizerState::product_state(ring)?;
        let mut dense = DenseState::zero_state(ring)?;
        for _ in 0..measurements {
            let op = spec.sample(&mut rng);
            stab.measure(&op)?;
            dense.measure(&op, &mut rng)?;
            for start in 0..ring {
                for len in 1..ring {
                    let region = Region::arc(ring, start, len)?;
                    let exact = dense.entropy(&region)?;
                    let fast = stab.entanglement_entropy(&region)? as f64;
                    max_diff = max_diff.max((exact - fast).abs());
                    comparisons += 1;
                }
            }
        }
    }
    Ok(OracleAudit {
        sequences,
        measurements_per_sequence: measurements,
        sizes: sizes.to_vec(),
        comparisons,
        max_abs_difference: max_diff,
        tolerance,
        passed: max_diff <= tolerance,
    })
}
