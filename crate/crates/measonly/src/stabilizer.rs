//! Sign-free stabilizer states and projective Pauli measurements.
//!
//! A pure state on L qubits is held as L independent, mutually commuting
//! generators. Because every observable computed here (entanglement entropy,
//! mutual information) depends only on which subgroup is stabilized and not
//! on measurement outcomes, generator signs are never tracked and no
//! randomness enters the update rule.
//!
//! Entanglement entropy of a region A uses the rank identity
//! S_A = rank_GF2(G|_A) − |A|, where G|_A keeps the 2|A| symplectic columns
//! of the generator matrix belonging to A. Each query runs a fresh
//! elimination; no clipped/canonical gauge is maintained.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::pauli::{Pauli, PauliString};

/// What a measurement did to the stabilizer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureOutcome {
    /// The measured operator commuted with every generator: it is already in
    /// the group (up to sign) and the state is unchanged.
    Unchanged,
    /// At least one generator anticommuted; one was replaced by the measured
    /// operator.
    Replaced,
}

/// Which anticommuting generator a measurement replaces.
///
/// The stabilized subspace after the update is the same either way; the rule
/// exists so tests can verify that observables do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    #[default]
    Lowest,
    Highest,
}

/// A set of sites on the ring, stored as a bit mask.
#[derive(Clone, PartialEq, Eq)]
pub struct Region {
    ring: usize,
    words: Vec<u64>,
    count: usize,
}

impl Region {
    pub fn empty(ring: usize) -> Result<Self> {
        if ring == 0 {
            return Err(Error::EmptyRing);
        }
        Ok(Region { ring, words: vec![0; ring.div_ceil(64)], count: 0 })
    }

    /// Contiguous arc of `len` sites starting at `start`, wrapping around.
    pub fn arc(ring: usize, start: usize, len: usize) -> Result<Self> {
        if len > ring {
            return Err(Error::InvalidRegion(format!(
                "arc length {len} exceeds ring length {ring}"
            )));
        }
        let mut r = Region::empty(ring)?;
        for k in 0..len {
            r.insert((start + k) % ring);
        }
        Ok(r)
    }

    pub fn from_sites(ring: usize, sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut r = Region::empty(ring)?;
        for s in sites {
            if s >= ring {
                return Err(Error::InvalidRegion(format!("site {s} outside ring of {ring}")));
            }
            r.insert(s);
        }
        Ok(r)
    }

    fn insert(&mut self, site: usize) {
        let (w, b) = (site / 64, site % 64);
        if self.words[w] >> b & 1 == 0 {
            self.words[w] |= 1 << b;
            self.count += 1;
        }
    }

    pub fn ring(&self) -> usize {
        self.ring
    }

    /// Number of sites in the region.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, site: usize) -> bool {
        site < self.ring && self.words[site / 64] >> (site % 64) & 1 == 1
    }

    pub fn sites(&self) -> Vec<usize> {
        (0..self.ring).filter(|&s| self.contains(s)).collect()
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0)
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let words: Vec<u64> =
            self.words.iter().zip(&other.words).map(|(&a, &b)| a | b).collect();
        let count = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(Region { ring: self.ring, words, count })
    }

    pub fn complement(&self) -> Region {
        let mut out = Region::empty(self.ring).unwrap();
        for s in 0..self.ring {
            if !self.contains(s) {
                out.insert(s);
            }
        }
        out
    }

    pub fn translate(&self, shift: usize) -> Region {
        let mut out = Region::empty(self.ring).unwrap();
        for s in 0..self.ring {
            if self.contains(s) {
                out.insert((s + shift) % self.ring);
            }
        }
        out
    }
}

impl std::fmt::Debug for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Region({:?} of {})", self.sites(), self.ring)
    }
}

/// Pure stabilizer state: `ring` mutually commuting independent generators.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerState {
    ring: usize,
    gens: Vec<PauliString>,
}

impl StabilizerState {
    /// |00…0⟩: one Z per site.
    pub fn product_state(ring: usize) -> Result<Self> {
        if ring == 0 {
            return Err(Error::EmptyRing);
        }
        let gens = (0..ring)
            .map(|s| {
                let mut g = PauliString::identity(ring).unwrap();
                g.set_letter(s, Pauli::Z);
                g
            })
            .collect();
        Ok(StabilizerState { ring, gens })
    }

    /// Builds a state from explicit generators, checking mutual commutation
    /// and independence. Intended for tests and for reloading dumps.
    pub fn from_generators(gens: Vec<PauliString>) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Err(Error::EmptyRing);
        };
        let ring = first.ring();
        if gens.len() != ring {
            return Err(Error::InvalidOperator(format!(
                "need exactly {ring} generators, got {}",
                gens.len()
            )));
        }
        for g in &gens {
            if g.ring() != ring {
                return Err(Error::RingMismatch(ring, g.ring()));
            }
            if g.is_identity() {
                return Err(Error::InvalidOperator("identity generator".into()));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if gens[i].anticommutes_raw(&gens[j]) {
                    return Err(Error::InvalidOperator(format!(
                        "generators {i} and {j} anticommute"
                    )));
                }
            }
        }
        let state = StabilizerState { ring, gens };
        if state.symplectic_rank() != ring {
            return Err(Error::InvalidOperator("generators are not independent".into()));
        }
        Ok(state)
    }

    pub fn ring(&self) -> usize {
        self.ring
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    /// Measures the Pauli operator `op`, updating the stabilizer group.
    ///
    /// Let Q be the set of generators anticommuting with `op`. If Q is empty
    /// the group already fixes `op` up to sign and nothing changes. Otherwise
    /// the pivot g_j (lowest index in Q) is multiplied into every other
    /// member of Q and then replaced by `op`.
    pub fn measure(&mut self, op: &PauliString) -> Result<MeasureOutcome> {
        self.measure_with_pivot(op, PivotRule::Lowest)
    }

    pub fn measure_with_pivot(
        &mut self,
        op: &PauliString,
        rule: PivotRule,
    ) -> Result<MeasureOutcome> {
        if op.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, op.ring()));
        }
        if op.is_identity() {
            return Err(Error::IdentityMeasurement);
        }
        // `op` touches only a few words of the ring; the anticommutation test
        // against every generator only needs those words.
        let active = op.active_words();
        match rule {
            PivotRule::Lowest => {
                // single pass: first anticommuting generator becomes the pivot,
                // later ones are folded into it on the fly
                let mut pivot: Option<usize> = None;
                for i in 0..self.ring {
                    if self.gens[i].anticommutes_raw_over(op, &active) {
                        match pivot {
                            None => pivot = Some(i),
                            Some(p) => {
                                let (a, b) = self.gens.split_at_mut(i);
                                b[0].mul_assign_raw(&a[p]);
                            }
                        }
                    }
                }
                match pivot {
                    None => Ok(MeasureOutcome::Unchanged),
                    Some(p) => {
                        self.gens[p] = op.clone();
                        Ok(MeasureOutcome::Replaced)
                    }
                }
            }
            PivotRule::Highest => {
                let hits: Vec<usize> = (0..self.ring)
                    .filter(|&i| self.gens[i].anticommutes_raw_over(op, &active))
                    .collect();
                let Some(&p) = hits.last() else {
                    return Ok(MeasureOutcome::Unchanged);
                };
                let pivot = self.gens[p].clone();
                for &i in &hits[..hits.len() - 1] {
                    self.gens[i].mul_assign_raw(&pivot);
                }
                self.gens[p] = op.clone();
                Ok(MeasureOutcome::Replaced)
            }
        }
    }

    /// Rank of the generator matrix restricted to the x/z columns of `a`.
    fn restricted_rank(&self, a: &Region) -> usize {
        let sites = a.sites();
        let mut m = BitMatrix::zeros(self.ring, 2 * sites.len());
        for (row, g) in self.gens.iter().enumerate() {
            for (k, &s) in sites.iter().enumerate() {
                m.set(row, 2 * k, g.x_bit(s));
                m.set(row, 2 * k + 1, g.z_bit(s));
            }
        }
        m.rank()
    }

    /// Entanglement entropy of region `a` in bits (exact non-negative integer).
    pub fn entanglement_entropy(&self, a: &Region) -> Result<usize> {
        if a.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, a.ring()));
        }
        if a.is_empty() || a.len() == self.ring {
            return Ok(0);
        }
        let rank = self.restricted_rank(a);
        debug_assert!(rank >= a.len(), "pure-state rank bound violated");
        Ok(rank - a.len())
    }

    /// I(A:B) = S_A + S_B − S_AB for disjoint regions; non-negative.
    pub fn mutual_information(&self, a: &Region, b: &Region) -> Result<usize> {
        if !a.is_disjoint(b) {
            return Err(Error::OverlappingRegions);
        }
        let sa = self.entanglement_entropy(a)? as isize;
        let sb = self.entanglement_entropy(b)? as isize;
        let sab = self.entanglement_entropy(&a.union(b)?)? as isize;
        let i = sa + sb - sab;
        debug_assert!(i >= 0, "subadditivity violated");
        Ok(i as usize)
    }

    /// I3(A:B:C) = S_A+S_B+S_C − S_AB−S_BC−S_CA + S_ABC for pairwise disjoint
    /// regions. Can take either sign.
    pub fn tripartite_information(
        &self,
        a: &Region,
        b: &Region,
        c: &Region,
    ) -> Result<isize> {
        if !a.is_disjoint(b) || !b.is_disjoint(c) || !a.is_disjoint(c) {
            return Err(Error::OverlappingRegions);
        }
        let s = |r: &Region| -> Result<isize> { Ok(self.entanglement_entropy(r)? as isize) };
        let ab = a.union(b)?;
        let bc = b.union(c)?;
        let ca = c.union(a)?;
        let abc = ab.union(c)?;
        Ok(s(a)? + s(b)? + s(c)? - s(&ab)? - s(&bc)? - s(&ca)? + s(&abc)?)
    }

    /// Rank of the full L x 2L symplectic matrix; L for any valid state.
    pub fn symplectic_rank(&self) -> usize {
        self.restricted_rank(&Region::arc(self.ring, 0, self.ring).unwrap())
    }

    /// One generator per line, in generator order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.ring * (self.ring + 1));
        for g in &self.gens {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let gens: Vec<PauliString> = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse())
            .collect::<Result<_>>()?;
        StabilizerState::from_generators(gens)
    }
}

impl std::fmt::Debug for StabilizerState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StabilizerState[{}]", self.ring)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn product_state_is_unentangled() {
        let st = StabilizerState::product_state(6).unwrap();
        for len in 0..=6 {
            let a = Region::arc(6, 2, len).unwrap();
            assert_eq!(st.entanglement_entropy(&a).unwrap(), 0);
        }
    }

    #[test]
    fn bell_pair_from_one_measurement() {
        let mut st = StabilizerState::product_state(2).unwrap();
        let out = st.measure(&p("XX")).unwrap();
        assert_eq!(out, MeasureOutcome::Replaced);
        // pivot is g0, g1 folds to Z0Z1, g0 replaced by X0X1
        assert_eq!(st.generators()[0], p("XX"));
        assert_eq!(st.generators()[1], p("ZZ"));
        let a = Region::arc(2, 0, 1).unwrap();
        assert_eq!(st.entanglement_entropy(&a).unwrap(), 1);
        // measuring again changes nothing
        assert_eq!(st.measure(&p("XX")).unwrap(), MeasureOutcome::Unchanged);
        assert_eq!(st.entanglement_entropy(&a).unwrap(), 1);
        // a commuting operator from the group, up to sign: Z0Z1
        assert_eq!(st.measure(&p("ZZ")).unwrap(), MeasureOutcome::Unchanged);
    }

    #[test]
    fn ghz_entropies() {
        // chain of XX measurements on |000...0> builds a GHZ-class state
        let n = 8;
        let mut st = StabilizerState::product_state(n).unwrap();
        for i in 0..n - 1 {
            let mut s = PauliString::identity(n).unwrap();
            s.set_letter(i, Pauli::X);
            s.set_letter(i + 1, Pauli::X);
            st.measure(&s).unwrap();
        }
        // every contiguous proper cut has exactly 1 bit
        for start in 0..n {
            for len in 1..n {
                let a = Region::arc(n, start, len).unwrap();
                let expect = if len == n { 0 } else { 1 };
                assert_eq!(st.entanglement_entropy(&a).unwrap(), expect, "start {start} len {len}");
            }
        }
    }

    #[test]
    fn purity_complement_symmetry() {
        let mut st = StabilizerState::product_state(10).unwrap();
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            rng_state
        };
        for _ in 0..200 {
            let off = (next() % 10) as usize;
            let len = 1 + (next() % 3) as usize;
            let letters: Vec<Pauli> = (0..len)
                .map(|_| match next() % 3 {
                    0 => Pauli::X,
                    1 => Pauli::Y,
                    _ => Pauli::Z,
                })
                .collect();
            let op = PauliString::from_letters(10, off, &letters).unwrap();
            st.measure(&op).unwrap();
            let a = Region::arc(10, (next() % 10) as usize, (next() % 11) as usize).unwrap();
            assert_eq!(
                st.entanglement_entropy(&a).unwrap(),
                st.entanglement_entropy(&a.complement()).unwrap()
            );
            assert_eq!(st.symplectic_rank(), 10);
        }
    }

    #[test]
    fn pivot_rule_does_not_change_observables() {
        let ops = ["XXIIII", "IYYIII", "IIZZII", "IIXYZI", "YIIIIX", "ZZZZZZ", "IXXXXI"];
        let mut lo = StabilizerState::product_state(6).unwrap();
        let mut hi = StabilizerState::product_state(6).unwrap();
        for o in ops {
            lo.measure_with_pivot(&p(o), PivotRule::Lowest).unwrap();
            hi.measure_with_pivot(&p(o), PivotRule::Highest).unwrap();
            for start in 0..6 {
                for len in 0..=6 {
                    let a = Region::arc(6, start, len).unwrap();
                    assert_eq!(
                        lo.entanglement_entropy(&a).unwrap(),
                        hi.entanglement_entropy(&a).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn mutual_information_examples() {
        let mut st = StabilizerState::product_state(4).unwrap();
        st.measure(&p("XXII")).unwrap();
        let a = Region::arc(4, 0, 1).unwrap();
        let b = Region::arc(4, 1, 1).unwrap();
        let c = Region::arc(4, 2, 1).unwrap();
        assert_eq!(st.mutual_information(&a, &b).unwrap(), 2);
        assert_eq!(st.mutual_information(&a, &c).unwrap(), 0);
        assert!(st.mutual_information(&a, &a).is_err());
    }

    #[test]
    fn tripartite_information_signs() {
        // GHZ on 4 qubits: I3(A:B:C) with singleton regions = +1
        let mut st = StabilizerState::product_state(4).unwrap();
        for i in 0..3 {
            let mut s = PauliString::identity(4).unwrap();
            s.set_letter(i, Pauli::X);
            s.set_letter(i + 1, Pauli::X);
            st.measure(&s).unwrap();
        }
        let a = Region::arc(4, 0, 1).unwrap();
        let b = Region::arc(4, 1, 1).unwrap();
        let c = Region::arc(4, 2, 1).unwrap();
        assert_eq!(st.tripartite_information(&a, &b, &c).unwrap(), 1);
        // empty C degenerates to 0-added terms: I3(A:B:∅) = 0 iff I(A:B) cancels
        let e = Region::empty(4).unwrap();
        assert_eq!(
            st.tripartite_information(&a, &b, &e).unwrap(),
            0,
            "I3 with empty C must vanish: S terms cancel pairwise"
        );
    }

    #[test]
    fn text_dump_round_trip() {
        let mut st = StabilizerState::product_state(5).unwrap();
        st.measure(&p("XYIII")).unwrap();
        st.measure(&p("IIZXI")).unwrap();
        let text = st.to_text();
        let back = StabilizerState::from_text(&text).unwrap();
        assert_eq!(back.generators(), st.generators());
        assert!(StabilizerState::from_text("XX\nZZ\nII\n").is_err());
    }

    #[test]
    fn contract_violations() {
        let mut st = StabilizerState::product_state(4).unwrap();
        assert!(st.measure(&p("XX")).is_err());
        assert!(st.measure(&p("IIII")).is_err());
        let a = Region::arc(3, 0, 1).unwrap();
        assert!(st.entanglement_entropy(&a).is_err());
    }
}
