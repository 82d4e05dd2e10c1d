//! Directed graphs that may contain cycles (including 2-cycles), with the
//! ancestry, adjacency and skeleton queries used throughout the crate.
//!
//! Nodes are 0-based internally. Every text format in [`crate::io`] uses
//! 1-based labels.

use std::fmt;

use crate::error::{Error, Result};
use crate::nodeset::{NodeSet, MAX_NODES};

/// Largest `p` whose edge matrix fits in a `u64` code.
pub const MAX_CODE_NODES: usize = 8;

/// Integer encoding of an edge matrix. Bit `j*(p-1) + k'` is set for the
/// edge `j -> k`, where `k'` is `k` with the diagonal column skipped.
pub type GraphId = u64;

/// A directed graph on `p` nodes. Self-loops are rejected; both `j -> k`
/// and `k -> j` may be present.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dcg {
    p: usize,
    children: [u16; MAX_NODES],
    parents: [u16; MAX_NODES],
}

impl Dcg {
    /// Edgeless graph on `p` nodes, `2 <= p <= 16`.
    pub fn empty(p: usize) -> Result<Self> {
        if !(2..=MAX_NODES).contains(&p) {
            return Err(Error::arg(format!("node count must be in 2..=16, got {p}")));
        }
        Ok(Dcg {
            p,
            children: [0; MAX_NODES],
            parents: [0; MAX_NODES],
        })
    }

    /// Builds a graph from 0-based `(from, to)` pairs.
    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Dcg::empty(p)?;
        for &(j, k) in edges {
            g.add_edge(j, k)?;
        }
        Ok(g)
    }

    /// Complete graph with both directions on every pair.
    pub fn complete(p: usize) -> Result<Self> {
        let mut g = Dcg::empty(p)?;
        for j in 0..p {
            for k in 0..p {
                if j != k {
                    g.add_edge(j, k)?;
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.p {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, p: self.p })
        }
    }

    pub fn add_edge(&mut self, j: usize, k: usize) -> Result<()> {
        self.check_node(j)?;
        self.check_node(k)?;
        if j == k {
            return Err(Error::arg(format!("self-loop on node {}", j + 1)));
        }
        self.children[j] |= 1 << k;
        self.parents[k] |= 1 << j;
        Ok(())
    }

    pub fn remove_edge(&mut self, j: usize, k: usize) {
        if j < self.p && k < self.p {
            self.children[j] &= !(1 << k);
            self.parents[k] &= !(1 << j);
        }
    }

    #[inline]
    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        j < self.p && self.children[j] & (1 << k) != 0
    }

    #[inline]
    pub fn children(&self, j: usize) -> NodeSet {
        NodeSet::from_bits(self.children[j])
    }

    #[inline]
    pub fn parents(&self, k: usize) -> NodeSet {
        NodeSet::from_bits(self.parents[k])
    }

    /// Directed edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.p).flat_map(move |j| self.children(j).iter().map(move |k| (j, k)))
    }

    /// Number of directed edges; a 2-cycle counts twice.
    pub fn edge_count(&self) -> usize {
        self.children[..self.p]
            .iter()
            .map(|c| c.count_ones() as usize)
            .sum()
    }

    /// Graph with every edge reversed.
    pub fn reversed(&self) -> Dcg {
        Dcg {
            p: self.p,
            children: self.parents,
            parents: self.children,
        }
    }

    #[inline]
    fn code_bit(p: usize, j: usize, k: usize) -> u32 {
        (j * (p - 1) + if k > j { k - 1 } else { k }) as u32
    }

    /// Integer encoding of the edge matrix; `None` when `p > 8`.
    pub fn code(&self) -> Option<GraphId> {
        if self.p > MAX_CODE_NODES {
            return None;
        }
        let mut code = 0u64;
        for (j, k) in self.edges() {
            code |= 1 << Self::code_bit(self.p, j, k);
        }
        Some(code)
    }

    /// Inverse of [`Dcg::code`].
    pub fn from_code(p: usize, code: GraphId) -> Result<Self> {
        if p > MAX_CODE_NODES {
            return Err(Error::Capacity {
                what: "graph codes",
                limit: MAX_CODE_NODES,
                got: p,
            });
        }
        let bits = p * (p - 1);
        if bits < 64 && code >> bits != 0 {
            return Err(Error::arg(format!(
                "code {code} exceeds 2^{bits} for p = {p}"
            )));
        }
        let mut g = Dcg::empty(p)?;
        let mut rest = code;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let j = b / (p - 1);
            let kk = b % (p - 1);
            let k = if kk >= j { kk + 1 } else { kk };
            g.children[j] |= 1 << k;
            g.parents[k] |= 1 << j;
        }
        Ok(g)
    }

    /// Bit position of the edge `j -> k` in [`Dcg::code`].
    pub fn edge_code_bit(p: usize, j: usize, k: usize) -> u32 {
        Self::code_bit(p, j, k)
    }

    /// Strict descendants of every node: bit `k` of entry `j` is set iff a
    /// directed path of length >= 1 leads from `j` to `k`.
    pub fn descendant_masks(&self) -> [u16; MAX_NODES] {
        let mut reach = [0u16; MAX_NODES];
        for (j, slot) in reach.iter_mut().enumerate().take(self.p) {
            let mut seen = self.children[j];
            let mut frontier = seen;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.children[v] & !seen;
                seen |= fresh;
                frontier |= fresh;
            }
            *slot = seen;
        }
        reach
    }

    /// Strict ancestors of `j`: nodes with a directed path of length >= 1 to
    /// `j`. A node on a directed cycle is its own ancestor.
    pub fn ancestors(&self, j: usize) -> Result<NodeSet> {
        self.check_node(j)?;
        Ok(self.reversed().descendants_unchecked(j))
    }

    /// Strict descendants of `j`; the dual of [`Dcg::ancestors`].
    pub fn descendants(&self, j: usize) -> Result<NodeSet> {
        self.check_node(j)?;
        Ok(self.descendants_unchecked(j))
    }

    fn descendants_unchecked(&self, j: usize) -> NodeSet {
        let mut seen = self.children[j];
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.children[v] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        NodeSet::from_bits(seen)
    }

    /// `an(S)`: members of `S` together with all their ancestors.
    pub fn ancestral_closure(&self, set: NodeSet) -> NodeSet {
        let rev = self.reversed();
        set.iter()
            .fold(set, |acc, v| acc.union(rev.descendants_unchecked(v)))
    }

    /// True iff the graph has no directed cycle (Kahn's algorithm).
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: [u32; MAX_NODES] = [0; MAX_NODES];
        for (k, d) in indeg.iter_mut().enumerate().take(self.p) {
            *d = self.parents[k].count_ones();
        }
        let mut ready: u16 = 0;
        for (k, &d) in indeg.iter().enumerate().take(self.p) {
            if d == 0 {
                ready |= 1 << k;
            }
        }
        let mut removed = 0;
        while ready != 0 {
            let v = ready.trailing_zeros() as usize;
            ready &= ready - 1;
            removed += 1;
            for c in self.children(v).iter() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready |= 1 << c;
                }
            }
        }
        removed == self.p
    }

    /// Real and virtual adjacency of the pair `(j, k)`.
    pub fn adjacency(&self, j: usize, k: usize) -> Result<Adjacency> {
        self.check_node(j)?;
        self.check_node(k)?;
        if j == k {
            return Err(Error::arg("adjacency needs two distinct nodes"));
        }
        let desc = self.descendant_masks();
        Ok(self.adjacency_with(&desc, j, k))
    }

    fn adjacency_with(&self, desc: &[u16; MAX_NODES], j: usize, k: usize) -> Adjacency {
        let real = self.has_edge(j, k) || self.has_edge(k, j);
        let common = self.children[j] & self.children[k];
        // A common child that reaches back to j or k.
        let virt = NodeSet::from_bits(common)
            .iter()
            .any(|l| desc[l] & ((1 << j) | (1 << k)) != 0);
        Adjacency::from_flags(real, virt)
    }

    /// Skeleton (real-or-virtual adjacencies) and edge counts.
    pub fn skeleton(&self) -> Skeleton {
        let desc = self.descendant_masks();
        let mut pairs = PairSet::default();
        let mut real_edges = 0;
        for j in 0..self.p {
            for k in j + 1..self.p {
                let adj = self.adjacency_with(&desc, j, k);
                if adj.is_real() {
                    real_edges += 1;
                }
                if adj.is_adjacent() {
                    pairs.insert(j, k);
                }
            }
        }
        Skeleton {
            p: self.p,
            pairs,
            real_edges,
        }
    }

    /// Unshielded-triple classification with `m` as the middle node, using
    /// real-or-virtual adjacency throughout.
    pub fn classify_triple(&self, j: usize, m: usize, k: usize) -> Result<TripleClass> {
        self.classify_triple_with(j, m, k, TripleAdjacency::RealOrVirtual)
    }

    /// As [`Dcg::classify_triple`], choosing which adjacency notion decides
    /// whether the triple is unshielded.
    pub fn classify_triple_with(
        &self,
        j: usize,
        m: usize,
        k: usize,
        mode: TripleAdjacency,
    ) -> Result<TripleClass> {
        for v in [j, m, k] {
            self.check_node(v)?;
        }
        if j == m || m == k || j == k {
            return Err(Error::arg("triple needs three distinct nodes"));
        }
        let desc = self.descendant_masks();
        let adjacent = |a: usize, b: usize| {
            let adj = self.adjacency_with(&desc, a, b);
            match mode {
                TripleAdjacency::RealOrVirtual => adj.is_adjacent(),
                TripleAdjacency::RealOnly => adj.is_real(),
            }
        };
        if !(adjacent(j, m) && adjacent(k, m)) || adjacent(j, k) {
            return Ok(TripleClass::NotUnshielded);
        }
        let m_bit = 1u16 << m;
        if (desc[m] & ((1 << j) | (1 << k))) != 0 {
            return Ok(TripleClass::Conductor);
        }
        let common = self.children[j] & self.children[k];
        let perfect = NodeSet::from_bits(common)
            .iter()
            .any(|c| c == m || desc[c] & m_bit != 0);
        if perfect {
            Ok(TripleClass::PerfectNonConductor)
        } else {
            Ok(TripleClass::ImperfectNonConductor)
        }
    }

    /// True iff the directed edge set of `self` is a proper subset of `other`'s.
    pub fn is_real_subgraph(&self, other: &Dcg) -> Result<bool> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: other.p,
                got: self.p,
            });
        }
        let mut proper = false;
        for v in 0..self.p {
            if self.children[v] & !other.children[v] != 0 {
                return Ok(false);
            }
            proper |= self.children[v] != other.children[v];
        }
        Ok(proper)
    }
}

impl fmt::Debug for Dcg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dcg(p={}; ", self.p)?;
        for (i, (j, k)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", j + 1, k + 1)?;
        }
        write!(f, ")")
    }
}

/// Real and virtual adjacency flags for an unordered pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Adjacency {
    None,
    RealOnly,
    VirtualOnly,
    RealAndVirtual,
}

impl Adjacency {
    fn from_flags(real: bool, virt: bool) -> Self {
        match (real, virt) {
            (false, false) => Adjacency::None,
            (true, false) => Adjacency::RealOnly,
            (false, true) => Adjacency::VirtualOnly,
            (true, true) => Adjacency::RealAndVirtual,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Adjacency::RealOnly | Adjacency::RealAndVirtual)
    }

    pub fn is_virtual(self) -> bool {
        matches!(self, Adjacency::VirtualOnly | Adjacency::RealAndVirtual)
    }

    pub fn is_adjacent(self) -> bool {
        self != Adjacency::None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TripleClass {
    NotUnshielded,
    Conductor,
    PerfectNonConductor,
    ImperfectNonConductor,
}

/// Which adjacency decides whether a triple is unshielded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TripleAdjacency {
    #[default]
    RealOrVirtual,
    RealOnly,
}

/// Unordered node pairs `j < k`, packed into a `u128` (120 pairs at p = 16).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSet(u128);

impl PairSet {
    #[inline]
    fn bit(j: usize, k: usize) -> u32 {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        (b * (b - 1) / 2 + a) as u32
    }

    pub fn insert(&mut self, j: usize, k: usize) {
        self.0 |= 1 << Self::bit(j, k);
    }

    pub fn contains(&self, j: usize, k: usize) -> bool {
        j != k && self.0 & (1 << Self::bit(j, k)) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection_len(&self, other: &PairSet) -> usize {
        (self.0 & other.0).count_ones() as usize
    }

    /// Pairs `(j, k)` with `j < k`, ordered by `(j, k)`.
    pub fn pairs(&self, p: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..p {
            for k in j + 1..p {
                if self.contains(j, k) {
                    out.push((j, k));
                }
            }
        }
        out
    }
}

impl fmt::Debug for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.pairs(MAX_NODES);
        f.debug_set()
            .entries(pairs.iter().map(|(a, b)| (a + 1, b + 1)))
            .finish()
    }
}

/// Skeleton `S(G)`: the really-or-virtually adjacent pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Skeleton {
    pub p: usize,
    pub pairs: PairSet,
    /// Pairs with at least one real direction; a 2-cycle counts once.
    pub real_edges: usize,
}

impl Skeleton {
    /// `|S(G)|`, a bidirected pair counted once.
    pub fn total_edges(&self) -> usize {
        self.pairs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: usize, edges: &[(usize, usize)]) -> Dcg {
        let e: Vec<_> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Dcg::from_edges(p, &e).unwrap()
    }

    fn fig2() -> Dcg {
        g(4, &[(3, 1), (2, 3), (4, 2), (1, 2)])
    }

    fn set(nodes: &[usize]) -> NodeSet {
        nodes.iter().map(|v| v - 1).collect()
    }

    #[test]
    fn ancestors_through_cycle() {
        assert_eq!(fig2().ancestors(0).unwrap(), set(&[1, 2, 3, 4]));
        let chain = g(3, &[(1, 2), (2, 3)]);
        assert_eq!(chain.ancestors(2).unwrap(), set(&[1, 2]));
        assert_eq!(Dcg::empty(3).unwrap().ancestors(1).unwrap(), NodeSet::EMPTY);
        assert!(chain.ancestors(3).is_err());
    }

    #[test]
    fn fig2_virtual_edge() {
        let g = fig2();
        assert_eq!(g.adjacency(0, 3).unwrap(), Adjacency::VirtualOnly);
        assert_eq!(g.adjacency(0, 1).unwrap(), Adjacency::RealOnly);
        assert!(g.adjacency(1, 1).is_err());
    }

    #[test]
    fn fig2_triple_with_middle_two() {
        let g = fig2();
        // (1,4) is virtually adjacent, so the triple is shielded once virtual
        // adjacency counts; under real adjacency it is unshielded and 2 is an
        // ancestor of 1.
        assert_eq!(
            g.classify_triple(0, 1, 3).unwrap(),
            TripleClass::NotUnshielded
        );
        assert_eq!(
            g.classify_triple_with(0, 1, 3, TripleAdjacency::RealOnly)
                .unwrap(),
            TripleClass::Conductor
        );
        assert!(g.ancestors(0).unwrap().contains(1));
    }

    #[test]
    fn dag_collider_is_perfect_non_conductor() {
        let v = g(3, &[(1, 2), (3, 2)]);
        assert_eq!(
            v.classify_triple(0, 1, 2).unwrap(),
            TripleClass::PerfectNonConductor
        );
        let chain = g(3, &[(1, 2), (2, 3)]);
        assert_eq!(
            chain.classify_triple(0, 1, 2).unwrap(),
            TripleClass::Conductor
        );
        assert!(v.classify_triple(0, 0, 2).is_err());
    }

    #[test]
    fn subgraph_relation() {
        let e = Dcg::empty(2).unwrap();
        let one = g(2, &[(1, 2)]);
        let both = g(2, &[(1, 2), (2, 1)]);
        assert!(e.is_real_subgraph(&one).unwrap());
        assert!(!one.is_real_subgraph(&one).unwrap());
        assert!(one.is_real_subgraph(&both).unwrap());
        assert!(!both.is_real_subgraph(&one).unwrap());
        assert!(one.is_real_subgraph(&Dcg::empty(3).unwrap()).is_err());
    }

    #[test]
    fn code_round_trip_and_count() {
        let g = fig2();
        let c = g.code().unwrap();
        assert_eq!(Dcg::from_code(4, c).unwrap(), g);
        assert_eq!(Dcg::complete(3).unwrap().code(), Some(63));
        assert!(Dcg::from_code(3, 64).is_err());
        assert!(Dcg::empty(9).unwrap().code().is_none());
    }

    #[test]
    fn empty_skeleton() {
        let s = Dcg::empty(4).unwrap().skeleton();
        assert_eq!((s.total_edges(), s.real_edges), (0, 0));
        assert!(s.pairs.is_empty());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Dcg::from_edges(2, &[(0, 0)]).is_err());
        assert!(Dcg::from_edges(2, &[(0, 2)]).is_err());
        assert!(Dcg::empty(1).is_err());
        assert!(Dcg::empty(17).is_err());
    }

    #[test]
    fn acyclicity() {
        assert!(!fig2().is_acyclic());
        assert!(g(3, &[(1, 2), (2, 3), (1, 3)]).is_acyclic());
        assert!(!g(2, &[(1, 2), (2, 1)]).is_acyclic());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn graph() -> impl Strategy<Value = Dcg> {
        (2usize..=6).prop_flat_map(|p| {
            (0..1u64 << (p * (p - 1))).prop_map(move |c| Dcg::from_code(p, c).unwrap())
        })
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric(g in graph()) {
            for j in 0..g.p() {
                for k in 0..g.p() {
                    if j != k {
                        prop_assert_eq!(g.adjacency(j, k).unwrap(), g.adjacency(k, j).unwrap());
                    }
                }
            }
        }

        #[test]
        fn dags_have_no_virtual_edges(g in graph()) {
            if g.is_acyclic() {
                prop_assert_eq!(g.skeleton().total_edges(), g.skeleton().real_edges);
            }
        }

        #[test]
        fn ancestors_dual_to_descendants(g in graph()) {
            for j in 0..g.p() {
                let an = g.ancestors(j).unwrap();
                for k in 0..g.p() {
                    prop_assert_eq!(an.contains(k), g.descendants(k).unwrap().contains(j));
                }
            }
        }
    }
}
