//! Phase-free Pauli strings on a ring of qubits.
//!
//! Strings are stored as a pair of bit masks (x, z), packed 64 sites per
//! word. Signs are not tracked: anticommutation, GF(2) rank, and every
//! entanglement quantity built on them are insensitive to phases.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// (x, z) symplectic bits: X=(1,0), Y=(1,1), Z=(0,1).
    pub const fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub const fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub const fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("invalid Pauli letter '{other}'"))),
        }
    }

    /// Ordering rank used for canonical string comparison: I < X < Y < Z.
    pub(crate) const fn rank(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

fn words_for(ring: usize) -> usize {
    ring.div_ceil(64)
}

/// A Pauli string (modulo phase) on `ring` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ring: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    pub fn identity(ring: usize) -> Result<Self> {
        if ring == 0 {
            return Err(Error::EmptyRing);
        }
        let w = words_for(ring);
        Ok(PauliString { ring, x: vec![0; w], z: vec![0; w] })
    }

    /// Contiguous string of non-identity letters starting at `offset`
    /// (wrapping around the ring).
    pub fn from_letters(ring: usize, offset: usize, letters: &[Pauli]) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidOperator("empty letter sequence".into()));
        }
        if letters.len() > ring {
            return Err(Error::InvalidOperator(format!(
                "{} letters do not fit on a ring of {} sites",
                letters.len(),
                ring
            )));
        }
        if letters.contains(&Pauli::I) {
            return Err(Error::InvalidOperator(
                "identity letter inside a measurement string".into(),
            ));
        }
        let mut s = PauliString::identity(ring)?;
        for (k, &p) in letters.iter().enumerate() {
            s.set_letter((offset + k) % ring, p);
        }
        Ok(s)
    }

    pub fn ring(&self) -> usize {
        self.ring
    }

    pub fn letter(&self, site: usize) -> Pauli {
        assert!(site < self.ring, "site {site} out of range");
        let (w, b) = (site / 64, site % 64);
        Pauli::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    pub fn set_letter(&mut self, site: usize, p: Pauli) {
        assert!(site < self.ring, "site {site} out of range");
        let (w, b) = (site / 64, site % 64);
        let (px, pz) = p.bits();
        self.x[w] = self.x[w] & !(1 << b) | (px as u64) << b;
        self.z[w] = self.z[w] & !(1 << b) | (pz as u64) << b;
    }

    pub fn x_bit(&self, site: usize) -> bool {
        let (w, b) = (site / 64, site % 64);
        self.x[w] >> b & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        let (w, b) = (site / 64, site % 64);
        self.z[w] >> b & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&a, &b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.ring).filter(|&s| self.letter(s) != Pauli::I).collect()
    }

    /// True iff the two strings anticommute: the symplectic form
    /// |{i : x_a z_b}| + |{i : z_a x_b}| is odd.
    pub fn anticommutes(&self, other: &Self) -> Result<bool> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(self.anticommutes_raw(other))
    }

    pub(crate) fn anticommutes_raw(&self, other: &Self) -> bool {
        debug_assert_eq!(self.ring, other.ring);
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= (self.x[i] & other.z[i]).count_ones();
            parity ^= (self.z[i] & other.x[i]).count_ones();
        }
        parity & 1 == 1
    }

    /// Word indices where this string has support. Anticommutation against
    /// this operator is decided entirely within these words of the other
    /// operand, which the measurement hot loop exploits.
    pub(crate) fn active_words(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&w| self.x[w] | self.z[w] != 0).collect()
    }

    /// `anticommutes_raw` restricted to the given words; exact when `words`
    /// covers the support of `other`.
    pub(crate) fn anticommutes_raw_over(&self, other: &Self, words: &[usize]) -> bool {
        debug_assert_eq!(self.ring, other.ring);
        let mut parity = 0u32;
        for &w in words {
            parity ^= (self.x[w] & other.z[w]).count_ones();
            parity ^= (self.z[w] & other.x[w]).count_ones();
        }
        parity & 1 == 1
    }

    /// Phase-free product: letter-wise XOR of the symplectic bits.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let mut out = self.clone();
        out.mul_assign_raw(other);
        Ok(out)
    }

    pub(crate) fn mul_assign_raw(&mut self, other: &Self) {
        debug_assert_eq!(self.ring, other.ring);
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Total order by ring, then letter-lexicographic with I < X < Y < Z.
    pub fn cmp_letters(&self, other: &Self) -> Ordering {
        self.ring.cmp(&other.ring).then_with(|| {
            for s in 0..self.ring {
                let ord = self.letter(s).rank().cmp(&other.letter(s).rank());
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in 0..self.ring {
            write!(f, "{}", self.letter(s).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let mut out = PauliString::identity(s.chars().count())?;
        for (i, c) in s.chars().enumerate() {
            out.set_letter(i, Pauli::from_char(c)?);
        }
        Ok(out)
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
