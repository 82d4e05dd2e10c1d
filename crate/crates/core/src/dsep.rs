//! d-connection and d-separation for directed graphs with cycles.
//!
//! The production query is a reachability fixed point over
//! `(node, arrival side)` states: a walk may pass a non-collider outside the
//! conditioning set, and a collider whose reflexive descendants meet the
//! conditioning set. [`d_connected_oracle`] enumerates simple paths and
//! checks the definition clause by clause; it exists to cross-check the
//! fast route.

use crate::error::{Error, Result};
use crate::graph::Dcg;
use crate::nodeset::{NodeSet, MAX_NODES};
use crate::sepset::{compress, pair_index, SepSet, MAX_SEPSET_NODES};

/// Largest `p` accepted by the path-enumeration oracle.
pub const MAX_ORACLE_NODES: usize = 8;

/// A graph with its reflexive descendant sets precomputed, shared across
/// many queries.
#[derive(Clone, Debug)]
pub struct DsepGraph {
    g: Dcg,
    /// Bit `d` of entry `v` is set iff `d` is `v` or a descendant of `v`.
    desc_refl: [u16; MAX_NODES],
}

impl DsepGraph {
    pub fn new(g: &Dcg) -> Self {
        let mut desc_refl = g.descendant_masks();
        for (v, m) in desc_refl.iter_mut().enumerate().take(g.p()) {
            *m |= 1 << v;
        }
        DsepGraph { g: *g, desc_refl }
    }

    pub fn graph(&self) -> &Dcg {
        &self.g
    }

    /// `an(S)`: nodes with a reflexive descendant in `cond`.
    #[inline]
    pub fn ancestral(&self, cond: u16) -> u16 {
        let mut out = 0u16;
        for v in 0..self.g.p() {
            if self.desc_refl[v] & cond != 0 {
                out |= 1 << v;
            }
        }
        out
    }

    /// Nodes d-connected to `src` given `cond`, where `active` is `an(cond)`.
    #[inline]
    fn reach(&self, src: usize, cond: u16, active: u16) -> u16 {
        // `head`: entered along an edge pointing into the node.
        // `tail`: entered against an edge, i.e. moving from child to parent.
        let mut head: u16 = 0;
        let mut tail: u16 = 1 << src;
        let mut todo_head: u16 = 0;
        let mut todo_tail: u16 = 1 << src;
        while todo_head | todo_tail != 0 {
            if todo_tail != 0 {
                let v = todo_tail.trailing_zeros() as usize;
                todo_tail &= todo_tail - 1;
                if cond & (1 << v) == 0 {
                    let ch = self.g.children(v).bits() & !head;
                    head |= ch;
                    todo_head |= ch;
                    let pa = self.g.parents(v).bits() & !tail;
                    tail |= pa;
                    todo_tail |= pa;
                }
            } else {
                let v = todo_head.trailing_zeros() as usize;
                todo_head &= todo_head - 1;
                let bit = 1u16 << v;
                if cond & bit == 0 {
                    let ch = self.g.children(v).bits() & !head;
                    head |= ch;
                    todo_head |= ch;
                }
                if active & bit != 0 {
                    let pa = self.g.parents(v).bits() & !tail;
                    tail |= pa;
                    todo_tail |= pa;
                }
            }
        }
        head | tail
    }

    /// d-connection query; arguments must already be validated.
    #[inline]
    pub fn connected(&self, j: usize, k: usize, cond: NodeSet) -> bool {
        let c = cond.bits();
        self.reach(j, c, self.ancestral(c)) & (1 << k) != 0
    }

    /// Writes `D_sep(G)` into `out` (layout of [`SepSet`]). `out` must be
    /// zeroed and hold `SepSet::word_count(p)` words.
    pub(crate) fn fill_dsep_words(&self, out: &mut [u64]) {
        let p = self.g.p();
        let full: u16 = ((1u32 << p) - 1) as u16;
        let block_shift = p - 2;
        for cond in 0..=full {
            let active = self.ancestral(cond);
            let free = full & !cond;
            for j in NodeSet::from_bits(free).iter() {
                let later = free & !((2u32 << j) - 1) as u16;
                if later == 0 {
                    break;
                }
                let reached = self.reach(j, cond, active);
                let mut sep = later & !reached;
                while sep != 0 {
                    let k = sep.trailing_zeros() as usize;
                    sep &= sep - 1;
                    let idx = (pair_index(p, j, k) << block_shift) + compress(cond, j, k);
                    out[idx / 64] |= 1 << (idx % 64);
                }
            }
        }
    }
}

fn check_query(g: &Dcg, j: usize, k: usize, cond: NodeSet) -> Result<()> {
    g.check_node(j)?;
    g.check_node(k)?;
    if j == k {
        return Err(Error::arg("d-separation query needs two distinct nodes"));
    }
    if !cond.within(g.p()) {
        return Err(Error::arg(format!(
            "conditioning set {cond} exceeds p = {}",
            g.p()
        )));
    }
    if cond.contains(j) || cond.contains(k) {
        return Err(Error::arg("conditioning set contains an endpoint"));
    }
    Ok(())
}

/// True iff `j` and `k` are d-connected given `cond`.
pub fn d_connected(g: &Dcg, j: usize, k: usize, cond: NodeSet) -> Result<bool> {
    check_query(g, j, k, cond)?;
    Ok(DsepGraph::new(g).connected(j, k, cond))
}

/// Literal path-enumeration check of d-connection, for `p <= 8`.
///
/// Every simple undirected path is tried; where both `a -> b` and `b -> a`
/// exist, each orientation is a separate path. A path d-connects when every
/// collider has a reflexive descendant in `cond` and no non-collider is in
/// `cond`.
pub fn d_connected_oracle(g: &Dcg, j: usize, k: usize, cond: NodeSet) -> Result<bool> {
    if g.p() > MAX_ORACLE_NODES {
        return Err(Error::Capacity {
            what: "path-enumeration oracle (nodes)",
            limit: MAX_ORACLE_NODES,
            got: g.p(),
        });
    }
    check_query(g, j, k, cond)?;
    let desc = g.descendant_masks();
    let collider_ok = |b: usize| (desc[b] | (1 << b)) & cond.bits() != 0;

    // Stack frames: (node, arrived with an arrowhead at node, visited set).
    fn walk(
        g: &Dcg,
        v: usize,
        arrow_in: bool,
        visited: u16,
        target: usize,
        cond: NodeSet,
        collider_ok: &dyn Fn(usize) -> bool,
    ) -> bool {
        let steps = g
            .children(v)
            .iter()
            .map(|w| (w, true))
            .chain(g.parents(v).iter().map(|w| (w, false)));
        for (w, out_arrow_at_w) in steps {
            if visited & (1 << w) != 0 {
                continue;
            }
            // v is interior unless it is the start (arrow_in is meaningless
            // there; the caller passes visited == {start}).
            if visited.count_ones() > 1 {
                // Leaving v along v -> w puts a tail at v; along v <- w an
                // arrowhead at v.
                let head_at_v_next = !out_arrow_at_w;
                let collider = arrow_in && head_at_v_next;
                let pass = if collider {
                    collider_ok(v)
                } else {
                    !cond.contains(v)
                };
                if !pass {
                    continue;
                }
            }
            if w == target {
                return true;
            }
            if walk(
                g,
                w,
                out_arrow_at_w,
                visited | (1 << w),
                target,
                cond,
                collider_ok,
            ) {
                return true;
            }
        }
        false
    }

    Ok(walk(g, j, false, 1 << j, k, cond, &collider_ok))
}

fn check_sepset_capacity(g: &Dcg) -> Result<()> {
    if g.p() > MAX_SEPSET_NODES {
        Err(Error::Capacity {
            what: "d-separation enumeration (nodes)",
            limit: MAX_SEPSET_NODES,
            got: g.p(),
        })
    } else {
        Ok(())
    }
}

/// `D_sep(G)`: every statement `(j, k, S)` with `j` d-separated from `k`.
pub fn all_dsep(g: &Dcg) -> Result<SepSet> {
    check_sepset_capacity(g)?;
    let mut words = vec![0u64; SepSet::word_count(g.p())];
    DsepGraph::new(g).fill_dsep_words(&mut words);
    Ok(SepSet::from_words(g.p(), &words))
}

fn check_dims(g: &Dcg, ci: &SepSet) -> Result<()> {
    if g.p() == ci.p() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: ci.p(),
            got: g.p(),
        })
    }
}

/// Causal Markov condition: every entailed d-separation is in `ci`.
pub fn satisfies_cmc(g: &Dcg, ci: &SepSet) -> Result<bool> {
    check_dims(g, ci)?;
    all_dsep(g)?.is_subset(ci)
}

/// Faithfulness: the entailed d-separations are exactly `ci`.
pub fn satisfies_cfc(g: &Dcg, ci: &SepSet) -> Result<bool> {
    check_dims(g, ci)?;
    Ok(all_dsep(g)? == *ci)
}

/// Operational Markov equivalence: equal d-separation sets.
pub fn markov_equivalent(g1: &Dcg, g2: &Dcg) -> Result<bool> {
    if g1.p() != g2.p() {
        return Err(Error::DimensionMismatch {
            expected: g1.p(),
            got: g2.p(),
        });
    }
    Ok(all_dsep(g1)? == all_dsep(g2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sepset::{statement_count, SepStatement};

    fn g(p: usize, edges: &[(usize, usize)]) -> Dcg {
        let e: Vec<_> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Dcg::from_edges(p, &e).unwrap()
    }

    fn s(nodes: &[usize]) -> NodeSet {
        nodes.iter().map(|v| v - 1).collect()
    }

    fn st(j: usize, k: usize, cond: &[usize]) -> SepStatement {
        SepStatement::new(j - 1, k - 1, s(cond)).unwrap()
    }

    #[test]
    fn fig4_conductor_vs_imperfect() {
        let common = [(1, 2), (2, 3), (3, 2), (4, 3), (2, 5), (3, 5)];
        let mut e1 = common.to_vec();
        e1.push((5, 4));
        let mut e2 = common.to_vec();
        e2.push((4, 5));
        let (g1, g2) = (g(5, &e1), g(5, &e2));
        assert!(d_connected(&g1, 0, 3, NodeSet::EMPTY).unwrap());
        assert!(!d_connected(&g2, 0, 3, NodeSet::EMPTY).unwrap());
        assert!(!markov_equivalent(&g1, &g2).unwrap());
    }

    #[test]
    fn empty_and_complete() {
        let e = Dcg::empty(3).unwrap();
        assert_eq!(all_dsep(&e).unwrap().len(), statement_count(3));
        assert!(!d_connected(&e, 0, 2, s(&[2])).unwrap());
        assert!(all_dsep(&Dcg::complete(4).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn fig5_dsep_sets() {
        let g1 = g(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]);
        let g2 = g(4, &[(1, 3), (2, 4), (2, 3), (4, 3), (4, 1)]);
        let d1 = all_dsep(&g1).unwrap();
        let d2 = all_dsep(&g2).unwrap();
        assert_eq!(
            d1,
            SepSet::from_statements(4, [st(1, 3, &[2]), st(2, 4, &[1, 3])]).unwrap()
        );
        assert_eq!(d2, SepSet::from_statements(4, [st(1, 2, &[4])]).unwrap());
        for stmt in d1.iter() {
            assert!(!d_connected_oracle(&g1, stmt.j(), stmt.k(), stmt.cond()).unwrap());
        }
    }

    #[test]
    fn cmc_and_cfc_trivia() {
        let e = Dcg::empty(2).unwrap();
        let none = SepSet::new(2).unwrap();
        assert!(!satisfies_cmc(&e, &none).unwrap());
        let one = g(2, &[(1, 2)]);
        assert!(satisfies_cfc(&one, &none).unwrap());
        assert!(satisfies_cfc(&e, &all_dsep(&e).unwrap()).unwrap());
        assert!(satisfies_cmc(&e, &SepSet::new(3).unwrap()).is_err());
    }

    #[test]
    fn two_node_orientations_equivalent() {
        assert!(markov_equivalent(&g(2, &[(1, 2)]), &g(2, &[(2, 1)])).unwrap());
    }

    #[test]
    fn oracle_agrees_on_all_three_node_graphs() {
        for code in 0..64u64 {
            let g = Dcg::from_code(3, code).unwrap();
            let d = all_dsep(&g).unwrap();
            for idx in 0..statement_count(3) {
                let stmt = SepSet::statement_at(3, idx);
                let fast = d_connected(&g, stmt.j(), stmt.k(), stmt.cond()).unwrap();
                let slow = d_connected_oracle(&g, stmt.j(), stmt.k(), stmt.cond()).unwrap();
                assert_eq!(fast, slow, "{g:?} {stmt}");
                assert_eq!(!fast, d.contains_index(idx));
            }
        }
    }

    #[test]
    fn argument_errors() {
        let g = g(3, &[(1, 2)]);
        assert!(d_connected(&g, 0, 0, NodeSet::EMPTY).is_err());
        assert!(d_connected(&g, 0, 1, s(&[1])).is_err());
        assert!(d_connected(&g, 0, 3, NodeSet::EMPTY).is_err());
        assert!(all_dsep(&Dcg::empty(9).unwrap()).is_err());
        assert!(d_connected_oracle(&Dcg::empty(9).unwrap(), 0, 1, NodeSet::EMPTY).is_err());
        assert!(d_connected(&Dcg::empty(12).unwrap(), 0, 11, s(&[2, 3])).is_ok());
    }
}
