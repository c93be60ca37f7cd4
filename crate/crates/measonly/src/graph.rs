//! Anticommutation structure of an ensemble: nodes are the enumerated
//! operators, edges join pairs that anticommute. Bipartiteness, triangles,
//! and odd-cycle lengths of this graph separate the minimal ensemble
//! families from one another.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{EnsembleSpec, WeightedOperator};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_CAP: usize = 10_000;

#[derive(Debug, Clone)]
pub struct FrustrationGraph {
    ring: usize,
    nodes: Vec<WeightedOperator>,
    stride: usize,
    adj: Vec<u64>, // n rows of `stride` words each
    /// Ring length at least 2·max_range + 2, the declared threshold below
    /// which finite-ring wraparound can distort the cycle structure.
    wraparound_safe: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub nodes: usize,
    pub edges: usize,
    pub is_bipartite: bool,
    pub has_triangle: bool,
    pub shortest_odd_cycle_length: Option<usize>,
    pub max_pairwise_anticommuting_clique_lower_bound: usize,
    pub wraparound_safe: bool,
}

pub fn build_graph(spec: &EnsembleSpec) -> Result<FrustrationGraph> {
    build_graph_capped(spec, DEFAULT_NODE_CAP)
}

pub fn build_graph_capped(spec: &EnsembleSpec, node_cap: usize) -> Result<FrustrationGraph> {
    let nodes = spec.enumerate_capped(node_cap as u128)?;
    if nodes.len() > node_cap {
        return Err(Error::SupportTooLarge {
            support: nodes.len() as u128,
            cap: node_cap as u128,
        });
    }
    let wraparound_safe = spec.ring() >= 2 * spec.max_range() + 2;
    if !wraparound_safe {
        log::warn!(
            "ring length {} below 2*max_range+2 = {}; cycle classification may \
             include wraparound artifacts",
            spec.ring(),
            2 * spec.max_range() + 2
        );
    }
    let n = nodes.len();
    let stride = n.div_ceil(64);
    let adj: Vec<u64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut row = vec![0u64; stride];
            for (j, other) in nodes.iter().enumerate() {
                if i != j && nodes[i].op.anticommutes_raw(&other.op) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    Ok(FrustrationGraph { ring: spec.ring(), nodes, stride, adj, wraparound_safe })
}

impl FrustrationGraph {
    pub fn ring(&self) -> usize {
        self.ring
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[WeightedOperator] {
        &self.nodes
    }

    pub fn wraparound_safe(&self) -> bool {
        self.wraparound_safe
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.stride..(i + 1) * self.stride]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(i);
        (0..self.node_count()).filter(move |&j| row[j / 64] >> (j % 64) & 1 == 1)
    }

    /// Deletes one edge in both directions. No-op when absent; used to
    /// probe how the cycle structure responds to sparsification.
    pub fn remove_edge(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.adj[i * self.stride + j / 64] &= !(1u64 << (j % 64));
        self.adj[j * self.stride + i / 64] &= !(1u64 << (i % 64));
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for i in 0..self.node_count() {
            for j in self.neighbors(i) {
                if j > i {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// One "u v" line per edge.
    pub fn to_edge_text(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edge_list() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Two-coloring attempt; colors are None on failure.
    fn two_color(&self) -> Option<Vec<u8>> {
        let n = self.node_count();
        let mut color = vec![u8::MAX; n];
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    fn find_triangle(&self) -> Option<[usize; 3]> {
        for (u, v) in self.edge_list() {
            let common = self
                .row(u)
                .iter()
                .zip(self.row(v))
                .map(|(a, b)| a & b)
                .enumerate()
                .find_map(|(w, bits)| (bits != 0).then(|| w * 64 + bits.trailing_zeros() as usize));
            if let Some(t) = common {
                return Some([u, v, t]);
            }
        }
        None
    }

    /// Minimum length over odd cycles: breadth-first layering from every
    /// source; an edge inside one layer closes an odd walk of length
    /// 2·depth + 1, and the minimum over sources and edges is exact.
    fn shortest_odd_cycle(&self) -> Option<usize> {
        let n = self.node_count();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        for start in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            for (u, v) in self.edge_list() {
                if dist[u] != usize::MAX && dist[u] == dist[v] {
                    let len = 2 * dist[u] + 1;
                    if best.map_or(true, |b| len < b) {
                        best = Some(len);
                    }
                }
            }
        }
        best
    }

    /// Exact maximum clique size when it is ≤ 4; otherwise a greedy
    /// extension of a 4-clique, so always a valid lower bound.
    fn clique_lower_bound(&self) -> usize {
        let n = self.node_count();
        if n == 0 {
            return 0;
        }
        let edges = self.edge_list();
        if edges.is_empty() {
            return 1;
        }
        if self.find_triangle().is_none() {
            return 2;
        }
        // a 4-clique is an edge (u,v) plus an adjacent pair among their
        // common neighbors
        let mut four: Option<[usize; 4]> = None;
        'outer: for &(u, v) in &edges {
            let common: Vec<usize> = self
                .neighbors(u)
                .filter(|&w| self.has_edge(v, w))
                .collect();
            for (ai, &a) in common.iter().enumerate() {
                for &b in &common[ai + 1..] {
                    if self.has_edge(a, b) {
                        four = Some([u, v, a, b]);
                        break 'outer;
                    }
                }
            }
        }
        let Some(seed) = four else {
            return 3;
        };
        let mut clique = seed.to_vec();
        // greedy growth beyond 4
        loop {
            let next = (0..n).find(|&w| {
                !clique.contains(&w) && clique.iter().all(|&c| self.has_edge(w, c))
            });
            match next {
                Some(w) => clique.push(w),
                None => return clique.len(),
            }
        }
    }

    pub fn classify(&self) -> GraphReport {
        let coloring = self.two_color();
        let is_bipartite = coloring.is_some();
        let triangle = self.find_triangle();
        let shortest_odd = if is_bipartite { None } else { self.shortest_odd_cycle() };
        GraphReport {
            nodes: self.node_count(),
            edges: self.edge_count(),
            is_bipartite,
            has_triangle: triangle.is_some(),
            shortest_odd_cycle_length: shortest_odd,
            max_pairwise_anticommuting_clique_lower_bound: self.clique_lower_bound(),
            wraparound_safe: self.wraparound_safe,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::SiteProbs;
    use crate::pauli::Pauli;
    use Pauli::{X, Y};

    fn orbit(ring: usize, letters: &[Pauli]) -> FrustrationGraph {
        let spec = EnsembleSpec::fixed_string(ring, letters.to_vec()).unwrap();
        build_graph(&spec).unwrap()
    }

    /// Node index of the translate occupying sites {off, …, off+r−1}.
    /// Enumeration orders nodes canonically by letters, not by offset.
    fn node_at_offset(g: &FrustrationGraph, r: usize, off: usize) -> usize {
        let ring = g.ring();
        let want: std::collections::BTreeSet<usize> =
            (0..r).map(|k| (off + k) % ring).collect();
        g.nodes()
            .iter()
            .position(|w| w.op.support().into_iter().collect::<std::collections::BTreeSet<_>>() == want)
            .unwrap()
    }

    #[test]
    fn three_letter_string_edges() {
        // XXY orbit: overlapping translates anticommute at offsets ±1, ±2
        let g = orbit(8, &[X, X, Y]);
        assert_eq!(g.node_count(), 8);
        for off in 0..8 {
            let i = node_at_offset(&g, 3, off);
            let nbrs: std::collections::BTreeSet<usize> = g.neighbors(i).collect();
            let expect: std::collections::BTreeSet<usize> = [1usize, 2, 6, 7]
                .iter()
                .map(|&d| node_at_offset(&g, 3, (off + d) % 8))
                .collect();
            assert_eq!(nbrs, expect, "offset {off}");
        }
        let report = g.classify();
        assert!(!report.is_bipartite);
        assert!(report.has_triangle);
        assert_eq!(report.shortest_odd_cycle_length, Some(3));
        assert!(report.max_pairwise_anticommuting_clique_lower_bound >= 3);
    }

    #[test]
    fn alternating_string_is_bipartite() {
        let g = orbit(8, &[X, Y, X, Y]);
        for off in 0..8 {
            let i = node_at_offset(&g, 4, off);
            let nbrs: std::collections::BTreeSet<usize> = g.neighbors(i).collect();
            let expect: std::collections::BTreeSet<usize> = [1usize, 3, 5, 7]
                .iter()
                .map(|&d| node_at_offset(&g, 4, (off + d) % 8))
                .collect();
            assert_eq!(nbrs, expect, "offset {off}");
        }
        let report = g.classify();
        assert!(report.is_bipartite);
        assert!(!report.has_triangle);
        assert_eq!(report.shortest_odd_cycle_length, None);
        assert_eq!(report.max_pairwise_anticommuting_clique_lower_bound, 2);
    }

    #[test]
    fn five_letter_string_odd_cycle_five() {
        let g = orbit(15, &[X, X, X, Y, Y]);
        let report = g.classify();
        assert!(!report.is_bipartite);
        assert!(!report.has_triangle, "no triangle away from wraparound");
        assert_eq!(report.shortest_odd_cycle_length, Some(5));
        assert_eq!(report.max_pairwise_anticommuting_clique_lower_bound, 2);
        assert!(report.wraparound_safe);
    }

    #[test]
    fn five_letter_string_wraparound_artifact() {
        // at ring 12 the declared safety threshold (2*5+2 = 12) is met, yet
        // translates at offsets {0, 4, 8} pairwise anticommute through the
        // wraparound: a triangle that vanishes for ring ≥ 13. Analyses use
        // ring ≥ 13; this pins the artifact down.
        let g = orbit(12, &[X, X, X, Y, Y]);
        let report = g.classify();
        assert!(report.wraparound_safe, "threshold just met at ring 12");
        assert!(report.has_triangle, "wraparound triangle at offsets 0,4,8");
        let (a, b, c) = (
            node_at_offset(&g, 5, 0),
            node_at_offset(&g, 5, 4),
            node_at_offset(&g, 5, 8),
        );
        assert!(g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(c, a));
        let g13 = orbit(13, &[X, X, X, Y, Y]);
        assert!(!g13.classify().has_triangle);
    }

    #[test]
    fn commuting_ensemble_is_edgeless() {
        let spec = EnsembleSpec::factorizable(
            6,
            SiteProbs::new(0.0, 0.0, 1.0).unwrap(),
            crate::ensemble::RangeDist::Fixed(2),
        )
        .unwrap();
        let g = build_graph(&spec).unwrap();
        assert_eq!(g.edge_count(), 0);
        let report = g.classify();
        assert!(report.is_bipartite);
        assert_eq!(report.max_pairwise_anticommuting_clique_lower_bound, 1);
        assert_eq!(report.shortest_odd_cycle_length, None);
    }

    #[test]
    fn uniform_string_parity_controls_bipartiteness() {
        for r in 2..=6 {
            let ring = (4 * r).max(2 * r + 2);
            let spec =
                EnsembleSpec::xyz(ring, SiteProbs::symmetric(1.0 / 3.0).unwrap(), r).unwrap();
            let report = build_graph(&spec).unwrap().classify();
            assert_eq!(
                report.is_bipartite,
                r % 2 == 0,
                "range {r} on ring {ring}"
            );
        }
    }

    #[test]
    fn edge_removal_never_shrinks_odd_cycles() {
        let g = orbit(15, &[X, X, X, Y, Y]);
        let base = g.classify().shortest_odd_cycle_length.unwrap();
        for (u, v) in g.edge_list().into_iter().take(12) {
            let mut g2 = g.clone();
            g2.remove_edge(u, v);
            if let Some(after) = g2.classify().shortest_odd_cycle_length {
                assert!(after >= base, "edge ({u},{v}): {after} < {base}");
            }
        }
    }

    #[test]
    fn node_cap_enforced() {
        let spec = EnsembleSpec::factorizable(
            32,
            SiteProbs::symmetric(1.0 / 3.0).unwrap(),
            crate::ensemble::RangeDist::Fixed(6),
        )
        .unwrap();
        assert!(matches!(
            build_graph_capped(&spec, 100),
            Err(Error::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn edge_text_round_trip_shape() {
        let g = orbit(6, &[X, X, Y]);
        let text = g.to_edge_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), g.edge_count());
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it.next().unwrap().parse().unwrap();
            let v: usize = it.next().unwrap().parse().unwrap();
            assert!(g.has_edge(u, v));
        }
    }
}
