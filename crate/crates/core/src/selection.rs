//! Exhaustive search spaces, Markov-set scans, Markov-equivalence blocks and
//! the six identifiability-assumption selection rules.
//!
//! Scans go through a [`DsepTable`], which stores `D_sep(G)` for every graph
//! of a space once so that many CI sets can be screened against it cheaply.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::dsep::DsepGraph;
use crate::error::{Error, Result};
use crate::graph::{Dcg, GraphId, PairSet, MAX_CODE_NODES};
use crate::sepset::{words_subset, SepSet};

/// Default cap on `p` for exhaustive spaces.
pub const DEFAULT_SPACE_NODES: usize = 5;

const SCAN_CHUNK: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    AllDcgs,
    AllDags,
    Explicit,
}

impl SpaceKind {
    pub fn label(self) -> &'static str {
        match self {
            SpaceKind::AllDcgs => "dcg",
            SpaceKind::AllDags => "dag",
            SpaceKind::Explicit => "explicit",
        }
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dcg" | "dcgs" | "all-dcgs" => Ok(SpaceKind::AllDcgs),
            "dag" | "dags" | "all-dags" => Ok(SpaceKind::AllDags),
            "explicit" => Ok(SpaceKind::Explicit),
            other => Err(Error::arg(format!(
                "unknown space kind `{other}` (dcg|dag)"
            ))),
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A set of candidate graphs, iterated in ascending code order (explicit
/// lists keep their given order).
#[derive(Clone, Debug)]
pub struct SearchSpace {
    p: usize,
    kind: SpaceKind,
    explicit: Vec<Dcg>,
    allow_large: bool,
}

impl SearchSpace {
    pub fn all_dcgs(p: usize) -> Self {
        SearchSpace {
            p,
            kind: SpaceKind::AllDcgs,
            explicit: Vec::new(),
            allow_large: false,
        }
    }

    pub fn all_dags(p: usize) -> Self {
        SearchSpace {
            kind: SpaceKind::AllDags,
            ..SearchSpace::all_dcgs(p)
        }
    }

    pub fn of_kind(kind: SpaceKind, p: usize) -> Result<Self> {
        match kind {
            SpaceKind::AllDcgs => Ok(SearchSpace::all_dcgs(p)),
            SpaceKind::AllDags => Ok(SearchSpace::all_dags(p)),
            SpaceKind::Explicit => Err(Error::arg("explicit spaces need a graph list")),
        }
    }

    pub fn explicit(p: usize, graphs: Vec<Dcg>) -> Result<Self> {
        if let Some(g) = graphs.iter().find(|g| g.p() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: g.p(),
            });
        }
        Ok(SearchSpace {
            p,
            kind: SpaceKind::Explicit,
            explicit: graphs,
            allow_large: false,
        })
    }

    /// Lifts the default node cap (up to the code limit of 8 nodes).
    pub fn allow_large(mut self, allow: bool) -> Self {
        self.allow_large = allow;
        self
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn check(&self) -> Result<()> {
        if self.kind == SpaceKind::Explicit {
            return if self.p > MAX_CODE_NODES {
                Err(Error::Capacity {
                    what: "explicit search space (nodes)",
                    limit: MAX_CODE_NODES,
                    got: self.p,
                })
            } else {
                Ok(())
            };
        }
        if self.p < 2 {
            return Err(Error::arg("search spaces need p >= 2"));
        }
        let limit = if self.allow_large {
            MAX_CODE_NODES
        } else {
            DEFAULT_SPACE_NODES
        };
        if self.p > limit {
            return Err(Error::Capacity {
                what: "exhaustive search space (nodes)",
                limit,
                got: self.p,
            });
        }
        if self.p > DEFAULT_SPACE_NODES {
            warn!(
                "exhaustive space over p = {} has 2^{} candidate graphs",
                self.p,
                self.p * (self.p - 1)
            );
        }
        Ok(())
    }

    /// Number of edge-matrix codes: `2^(p(p-1))` (list length for explicit).
    pub fn code_count(&self) -> u64 {
        match self.kind {
            SpaceKind::Explicit => self.explicit.len() as u64,
            _ => 1u64 << (self.p * (self.p - 1)),
        }
    }

    /// Splits the code range into at most `parts` disjoint, ordered ranges.
    pub fn partitions(&self, parts: usize) -> Vec<Range<u64>> {
        let total = self.code_count();
        let parts = (parts.max(1) as u64).min(total.max(1));
        let step = total.div_ceil(parts);
        (0..parts)
            .map(|i| (i * step)..((i + 1) * step).min(total))
            .filter(|r| !r.is_empty())
            .collect()
    }

    /// Members whose position (code, or list index) lies in `range`.
    pub fn enumerate_range(&self, range: Range<u64>) -> Result<Box<dyn Iterator<Item = Dcg> + '_>> {
        self.check()?;
        let p = self.p;
        Ok(match self.kind {
            SpaceKind::AllDcgs => {
                Box::new(range.map(move |c| Dcg::from_code(p, c).expect("code in range")))
            }
            SpaceKind::AllDags => Box::new(
                range
                    .map(move |c| Dcg::from_code(p, c).expect("code in range"))
                    .filter(Dcg::is_acyclic),
            ),
            SpaceKind::Explicit => {
                let lo = range.start as usize;
                let hi = (range.end as usize).min(self.explicit.len());
                Box::new(self.explicit[lo.min(hi)..hi].iter().copied())
            }
        })
    }

    /// Every member exactly once, in deterministic order.
    pub fn enumerate(&self) -> Result<Box<dyn Iterator<Item = Dcg> + '_>> {
        self.enumerate_range(0..self.code_count())
    }
}

/// `D_sep(G)` for every graph of a search space, with per-graph edge and
/// separation counts.
#[derive(Clone, Debug)]
pub struct DsepTable {
    p: usize,
    kind: SpaceKind,
    stride: usize,
    ids: Vec<GraphId>,
    words: Vec<u64>,
    dsep_count: Vec<u32>,
    total_edges: Vec<u8>,
    /// `ids[i] == i` for every entry.
    dense: bool,
    /// `ids` strictly ascending.
    sorted: bool,
}

struct TableChunk {
    ids: Vec<GraphId>,
    words: Vec<u64>,
    dsep_count: Vec<u32>,
    total_edges: Vec<u8>,
}

impl TableChunk {
    fn build(graphs: impl Iterator<Item = Dcg>, stride: usize) -> Self {
        let mut chunk = TableChunk {
            ids: Vec::new(),
            words: Vec::new(),
            dsep_count: Vec::new(),
            total_edges: Vec::new(),
        };
        for g in graphs {
            let start = chunk.words.len();
            chunk.words.resize(start + stride, 0);
            DsepGraph::new(&g).fill_dsep_words(&mut chunk.words[start..]);
            let count = chunk.words[start..].iter().map(|w| w.count_ones()).sum();
            chunk.ids.push(g.code().expect("space graphs have codes"));
            chunk.dsep_count.push(count);
            chunk.total_edges.push(g.skeleton().total_edges() as u8);
        }
        chunk
    }
}

impl DsepTable {
    /// Computes the table, scanning disjoint code ranges in parallel and
    /// concatenating them in range order.
    pub fn build(space: &SearchSpace) -> Result<Self> {
        space.check()?;
        let p = space.p;
        let stride = SepSet::new(p).map(|s| s.words().len())?;
        let n_parts = space.code_count().div_ceil(SCAN_CHUNK).max(1) as usize;
        let ranges = space.partitions(n_parts);
        let chunks: Vec<TableChunk> = ranges
            .into_par_iter()
            .map(|r| {
                let it = space.enumerate_range(r).expect("space checked");
                TableChunk::build(it, stride)
            })
            .collect();
        let total: usize = chunks.iter().map(|c| c.ids.len()).sum();
        let mut table = DsepTable {
            p,
            kind: space.kind,
            stride,
            ids: Vec::with_capacity(total),
            words: Vec::with_capacity(total * stride),
            dsep_count: Vec::with_capacity(total),
            total_edges: Vec::with_capacity(total),
            dense: false,
            sorted: false,
        };
        for c in chunks {
            table.ids.extend(c.ids);
            table.words.extend(c.words);
            table.dsep_count.extend(c.dsep_count);
            table.total_edges.extend(c.total_edges);
        }
        table.dense = table.ids.iter().enumerate().all(|(i, &id)| id == i as u64);
        table.sorted = table.ids.windows(2).all(|w| w[0] < w[1]);
        Ok(table)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> GraphId {
        self.ids[i]
    }

    pub fn graph(&self, i: usize) -> Dcg {
        Dcg::from_code(self.p, self.ids[i]).expect("stored codes are valid")
    }

    pub fn dsep_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn dsep(&self, i: usize) -> SepSet {
        SepSet::from_words(self.p, self.dsep_words(i))
    }

    pub fn dsep_count(&self, i: usize) -> usize {
        self.dsep_count[i] as usize
    }

    pub fn total_edges(&self, i: usize) -> usize {
        self.total_edges[i] as usize
    }

    /// Table position of a graph id, if present.
    pub fn position(&self, id: GraphId) -> Option<usize> {
        if self.dense {
            return ((id as usize) < self.ids.len()).then_some(id as usize);
        }
        if self.sorted {
            return self.ids.binary_search(&id).ok();
        }
        self.ids.iter().position(|&x| x == id)
    }

    fn check_ci(&self, ci: &SepSet) -> Result<()> {
        if ci.p() == self.p {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.p,
                got: ci.p(),
            })
        }
    }

    /// Table positions of every graph satisfying the CMC for `ci`.
    pub fn markov_positions(&self, ci: &SepSet) -> Result<Vec<usize>> {
        self.check_ci(ci)?;
        let cw = ci.words();
        Ok((0..self.len())
            .filter(|&i| words_subset(self.dsep_words(i), cw))
            .collect())
    }
}

/// The identifiability assumptions that can drive selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    Cfc,
    Mdr,
    SmrIdentifiable,
    SmrWeak,
    PMin,
    SgsMin,
}

impl Assumption {
    pub const ALL: [Assumption; 6] = [
        Assumption::Cfc,
        Assumption::Mdr,
        Assumption::SmrIdentifiable,
        Assumption::SmrWeak,
        Assumption::PMin,
        Assumption::SgsMin,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Assumption::Cfc => "cfc",
            Assumption::Mdr => "mdr",
            Assumption::SmrIdentifiable => "smr_id",
            Assumption::SmrWeak => "smr_weak",
            Assumption::PMin => "pmin",
            Assumption::SgsMin => "sgsmin",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl FromStr for Assumption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Ok(match norm.as_str() {
            "cfc" => Assumption::Cfc,
            "mdr" => Assumption::Mdr,
            "smr" | "smr_id" | "smr_identifiable" => Assumption::SmrIdentifiable,
            "smr_weak" | "weak_smr" | "frugality" => Assumption::SmrWeak,
            "pmin" | "p_min" => Assumption::PMin,
            "sgsmin" | "sgs_min" | "sgs" => Assumption::SgsMin,
            _ => return Err(Error::arg(format!("unknown assumption `{s}`"))),
        })
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// How SGS-minimality looks for a Markov proper subgraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SgsMode {
    /// Walk single-edge deletions; sound because deleting edges never
    /// removes d-separations, so every subgraph chain stays Markov.
    #[default]
    SingleEdgeDeletion,
    /// Every proper subset of the edge set.
    Exhaustive,
}

/// Which Markov proper subgraphs disqualify a graph under SGS-minimality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SgsReading {
    /// Only subgraphs outside the graph's equivalence class count. On DAGs
    /// this agrees with [`SgsReading::Literal`], since a proper subgraph of a
    /// DAG always has a different skeleton.
    #[default]
    OutsideMec,
    /// Any Markov proper subgraph counts, including one that entails the
    /// same d-separations (e.g. dropping one arc of a 2-cycle).
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SelectOptions {
    pub sgs_mode: SgsMode,
    pub sgs_reading: SgsReading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkovRecord {
    pub id: GraphId,
    pub total_edges: usize,
    pub dsep_count: usize,
    pub mec: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssumptionOutcome {
    /// Indices into [`SelectionReport::markov`], ascending.
    pub members: Vec<usize>,
    /// The members form exactly one Markov-equivalence block.
    pub unique_mec: bool,
    /// The members are nonempty and share one skeleton.
    pub unique_skeleton: bool,
}

/// Markov set, equivalence blocks and per-assumption selections for one CI
/// set over one search space.
#[derive(Clone, Debug)]
pub struct SelectionReport {
    pub p: usize,
    pub space: SpaceKind,
    pub ci_digest: String,
    pub markov: Vec<MarkovRecord>,
    /// Blocks of indices into `markov`; block order is first appearance.
    pub mecs: Vec<Vec<usize>>,
    mec_sets: Vec<SepSet>,
    outcomes: [AssumptionOutcome; 6],
}

impl SelectionReport {
    /// Runs every selection rule for `ci` against a prebuilt table.
    pub fn analyze(ci: &SepSet, table: &DsepTable, opts: SelectOptions) -> Result<Self> {
        let positions = table.markov_positions(ci)?;
        let p = table.p();

        // Blocks by SepSet equality, in first-appearance order.
        let mut block_of: HashMap<&[u64], usize> = HashMap::new();
        let mut mecs: Vec<Vec<usize>> = Vec::new();
        let mut mec_sets: Vec<SepSet> = Vec::new();
        let mut markov = Vec::with_capacity(positions.len());
        for (mi, &ti) in positions.iter().enumerate() {
            let words = table.dsep_words(ti);
            let b = *block_of.entry(words).or_insert_with(|| {
                mecs.push(Vec::new());
                mec_sets.push(SepSet::from_words(p, words));
                mecs.len() - 1
            });
            mecs[b].push(mi);
            markov.push(MarkovRecord {
                id: table.id(ti),
                total_edges: table.total_edges(ti),
                dsep_count: table.dsep_count(ti),
                mec: b,
            });
        }
        let all_blocks = |blocks: &[usize]| -> Vec<usize> {
            let mut v: Vec<usize> = blocks
                .iter()
                .flat_map(|&b| mecs[b].iter().copied())
                .collect();
            v.sort_unstable();
            v
        };

        let cfc_blocks: Vec<usize> = (0..mecs.len()).filter(|&b| mec_sets[b] == *ci).collect();
        let cfc = all_blocks(&cfc_blocks);

        let mdr = match markov.iter().map(|r| r.dsep_count).max() {
            Some(best) => {
                let top: Vec<usize> = (0..mecs.len())
                    .filter(|&b| markov[mecs[b][0]].dsep_count == best)
                    .collect();
                if top.len() == 1 {
                    all_blocks(&top)
                } else {
                    Vec::new()
                }
            }
            None => Vec::new(),
        };

        let (smr_id, smr_weak) = match markov.iter().map(|r| r.total_edges).min() {
            Some(least) => {
                let weak: Vec<usize> = (0..markov.len())
                    .filter(|&i| markov[i].total_edges == least)
                    .collect();
                let b0 = weak.first().map(|&i| markov[i].mec);
                let one_block = weak.iter().all(|&i| Some(markov[i].mec) == b0)
                    && b0.is_some_and(|b| mecs[b].len() == weak.len());
                let id = if one_block { weak.clone() } else { Vec::new() };
                (id, weak)
            }
            None => (Vec::new(), Vec::new()),
        };

        // P-minimality: no block's set strictly contains this block's set.
        let card: Vec<usize> = mec_sets.iter().map(SepSet::len).collect();
        let undominated: Vec<usize> = (0..mecs.len())
            .filter(|&b| {
                !(0..mecs.len()).any(|c| {
                    card[c] > card[b] && words_subset(mec_sets[b].words(), mec_sets[c].words())
                })
            })
            .collect();
        let pmin = all_blocks(&undominated);

        let mut markov_flag = vec![false; table.len()];
        for &ti in &positions {
            markov_flag[ti] = true;
        }
        let lookup = |g: &Dcg| -> Option<Words> {
            let code = g.code().expect("space graphs have codes");
            match table.position(code) {
                Some(ti) => markov_flag[ti].then(|| Words::from_slice(table.dsep_words(ti))),
                None => {
                    let mut w = Words::from_elem(0, ci.words().len());
                    DsepGraph::new(g).fill_dsep_words(&mut w);
                    words_subset(&w, ci.words()).then_some(w)
                }
            }
        };
        let sgs: Vec<usize> = (0..markov.len())
            .filter(|&i| {
                let g = Dcg::from_code(p, markov[i].id).expect("valid code");
                !has_markov_proper_subgraph(&g, &mec_sets[markov[i].mec], opts, &lookup)
            })
            .collect();

        let sets = [cfc, mdr, smr_id, smr_weak, pmin, sgs];
        let outcomes = sets.map(|members| {
            let unique_mec = !members.is_empty()
                && members
                    .iter()
                    .all(|&i| markov[i].mec == markov[members[0]].mec)
                && mecs[markov[members[0]].mec].len() == members.len();
            let unique_skeleton = !members.is_empty() && {
                let first = skeleton_of(p, markov[members[0]].id);
                members
                    .iter()
                    .all(|&i| skeleton_of(p, markov[i].id) == first)
            };
            AssumptionOutcome {
                members,
                unique_mec,
                unique_skeleton,
            }
        });

        Ok(SelectionReport {
            p,
            space: table.kind(),
            ci_digest: ci.digest(),
            markov,
            mecs,
            mec_sets,
            outcomes,
        })
    }

    pub fn outcome(&self, a: Assumption) -> &AssumptionOutcome {
        &self.outcomes[a.slot()]
    }

    /// Graph ids selected under `a`, in table order.
    pub fn ids(&self, a: Assumption) -> Vec<GraphId> {
        self.outcome(a)
            .members
            .iter()
            .map(|&i| self.markov[i].id)
            .collect()
    }

    pub fn contains(&self, a: Assumption, id: GraphId) -> bool {
        self.outcome(a)
            .members
            .iter()
            .any(|&i| self.markov[i].id == id)
    }

    pub fn markov_count(&self) -> usize {
        self.markov.len()
    }

    pub fn markov_index(&self, id: GraphId) -> Option<usize> {
        self.markov.binary_search_by_key(&id, |r| r.id).ok()
    }

    /// Shared d-separation set of a block.
    pub fn mec_set(&self, block: usize) -> &SepSet {
        &self.mec_sets[block]
    }

    /// Ids of the block containing `id`, if `id` is Markov.
    pub fn mec_ids_of(&self, id: GraphId) -> Option<Vec<GraphId>> {
        let i = self.markov_index(id)?;
        Some(
            self.mecs[self.markov[i].mec]
                .iter()
                .map(|&m| self.markov[m].id)
                .collect(),
        )
    }
}

fn skeleton_of(p: usize, id: GraphId) -> PairSet {
    Dcg::from_code(p, id).expect("valid code").skeleton().pairs
}

type Words = SmallVec<[u64; 4]>;

/// `lookup` returns the d-separation words of a graph iff it is Markov.
fn has_markov_proper_subgraph(
    g: &Dcg,
    own: &SepSet,
    opts: SelectOptions,
    lookup: &dyn Fn(&Dcg) -> Option<Words>,
) -> bool {
    let disqualifies =
        |w: &Words| opts.sgs_reading == SgsReading::Literal || w.as_slice() != own.words();
    match opts.sgs_mode {
        SgsMode::SingleEdgeDeletion => {
            // Equivalent subgraphs are walked through: a non-equivalent
            // Markov subgraph below them also lies below `g`.
            let mut seen = HashSet::new();
            let mut stack = vec![*g];
            while let Some(h) = stack.pop() {
                for (j, k) in h.edges() {
                    let mut sub = h;
                    sub.remove_edge(j, k);
                    if let Some(w) = lookup(&sub) {
                        if disqualifies(&w) {
                            return true;
                        }
                        if seen.insert(sub) {
                            stack.push(sub);
                        }
                    }
                }
            }
            false
        }
        SgsMode::Exhaustive => {
            let edges: Vec<(usize, usize)> = g.edges().collect();
            let n = edges.len();
            let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let mut keep = full;
            while keep != 0 {
                keep = (keep - 1) & full;
                let mut sub = *g;
                for (b, &(j, k)) in edges.iter().enumerate() {
                    if keep & (1 << b) == 0 {
                        sub.remove_edge(j, k);
                    }
                }
                if lookup(&sub).is_some_and(|w| disqualifies(&w)) {
                    return true;
                }
            }
            false
        }
    }
}

/// Graphs of `space` satisfying the CMC for `ci`, with blocks and counts.
pub fn markov_set(ci: &SepSet, space: &SearchSpace) -> Result<SelectionReport> {
    let table = DsepTable::build(space)?;
    SelectionReport::analyze(ci, &table, SelectOptions::default())
}

/// Graph ids of `space` satisfying assumption `a` for `ci`.
pub fn select(ci: &SepSet, space: &SearchSpace, a: Assumption) -> Result<Vec<GraphId>> {
    Ok(markov_set(ci, space)?.ids(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodeset::NodeSet;
    use crate::sepset::SepStatement;

    fn ci2(stmts: &[(usize, usize)]) -> SepSet {
        SepSet::from_statements(
            2,
            stmts
                .iter()
                .map(|&(j, k)| SepStatement::new(j - 1, k - 1, NodeSet::EMPTY).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn space_sizes() {
        assert_eq!(SearchSpace::all_dcgs(3).enumerate().unwrap().count(), 64);
        assert_eq!(SearchSpace::all_dags(3).enumerate().unwrap().count(), 25);
        assert_eq!(SearchSpace::all_dcgs(5).code_count(), 1 << 20);
        assert!(SearchSpace::all_dcgs(6).enumerate().is_err());
        assert!(SearchSpace::all_dcgs(6)
            .allow_large(true)
            .enumerate()
            .is_ok());
    }

    #[test]
    fn partitions_cover_disjointly() {
        let s = SearchSpace::all_dcgs(3);
        let parts = s.partitions(5);
        let mut next = 0;
        for r in &parts {
            assert_eq!(r.start, next);
            next = r.end;
        }
        assert_eq!(next, 64);
        let dags: usize = parts
            .iter()
            .map(|r| {
                SearchSpace::all_dags(3)
                    .enumerate_range(r.clone())
                    .unwrap()
                    .count()
            })
            .sum();
        assert_eq!(dags, 25);
    }

    #[test]
    fn two_node_separated() {
        let ci = ci2(&[(1, 2)]);
        let r = markov_set(&ci, &SearchSpace::all_dcgs(2)).unwrap();
        assert_eq!(r.markov_count(), 4);
        assert_eq!(r.mecs, vec![vec![0], vec![1, 2, 3]]);
        for a in [
            Assumption::Cfc,
            Assumption::Mdr,
            Assumption::SmrIdentifiable,
            Assumption::PMin,
            Assumption::SgsMin,
        ] {
            assert_eq!(r.ids(a), vec![0], "{a}");
        }
    }

    #[test]
    fn two_node_dependent() {
        let ci = ci2(&[]);
        let r = markov_set(&ci, &SearchSpace::all_dcgs(2)).unwrap();
        assert_eq!(
            r.markov.iter().map(|m| m.id).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(r.mecs.len(), 1);
        assert_eq!(r.ids(Assumption::Cfc), vec![1, 2, 3]);
        assert!(r.outcome(Assumption::Mdr).unique_mec);
        assert_eq!(r.ids(Assumption::SgsMin), vec![1, 2, 3]);
        // Literally, the 2-cycle has a Markov proper subgraph.
        let table = DsepTable::build(&SearchSpace::all_dcgs(2)).unwrap();
        for sgs_mode in [SgsMode::SingleEdgeDeletion, SgsMode::Exhaustive] {
            let opts = SelectOptions {
                sgs_mode,
                sgs_reading: SgsReading::Literal,
            };
            let lit = SelectionReport::analyze(&ci, &table, opts).unwrap();
            assert_eq!(lit.ids(Assumption::SgsMin), vec![1, 2]);
        }
    }

    #[test]
    fn everything_markov_under_full_ci() {
        let ci = SepSet::full(3).unwrap();
        let r = markov_set(&ci, &SearchSpace::all_dcgs(3)).unwrap();
        assert_eq!(r.markov_count(), 64);
        assert_eq!(r.ids(Assumption::Cfc), vec![0]);
    }

    #[test]
    fn explicit_space_and_dimension_errors() {
        let g = Dcg::from_edges(2, &[(0, 1)]).unwrap();
        let s = SearchSpace::explicit(2, vec![g]).unwrap();
        let r = markov_set(&ci2(&[]), &s).unwrap();
        assert_eq!(r.ids(Assumption::SgsMin), vec![g.code().unwrap()]);
        assert!(markov_set(&SepSet::new(3).unwrap(), &s).is_err());
        assert!(SearchSpace::explicit(3, vec![g]).is_err());
    }

    fn sgs_modes_agree(ci: &SepSet, table: &DsepTable) {
        for sgs_reading in [SgsReading::OutsideMec, SgsReading::Literal] {
            let run = |sgs_mode| {
                let opts = SelectOptions {
                    sgs_mode,
                    sgs_reading,
                };
                SelectionReport::analyze(ci, table, opts)
                    .unwrap()
                    .ids(Assumption::SgsMin)
            };
            assert_eq!(
                run(SgsMode::SingleEdgeDeletion),
                run(SgsMode::Exhaustive),
                "{sgs_reading:?} on {}",
                ci.digest()
            );
        }
    }

    #[test]
    fn sgs_shortcut_matches_exhaustive() {
        let t3 = DsepTable::build(&SearchSpace::all_dcgs(3)).unwrap();
        for i in 0..t3.len() {
            sgs_modes_agree(&t3.dsep(i), &t3);
        }
        let t4 = DsepTable::build(&SearchSpace::all_dcgs(4)).unwrap();
        let eq1 = crate::io::parse_sepset(crate::experiments::fixtures::THREE_RULE_CI).unwrap();
        sgs_modes_agree(&eq1, &t4);
        sgs_modes_agree(&SepSet::full(4).unwrap(), &t4);
        for i in (0..t4.len()).step_by(409) {
            sgs_modes_agree(&t4.dsep(i), &t4);
        }
    }

    #[test]
    fn blocks_share_edges_and_separations() {
        let t4 = DsepTable::build(&SearchSpace::all_dcgs(4)).unwrap();
        let eq1 = crate::io::parse_sepset(crate::experiments::fixtures::THREE_RULE_CI).unwrap();
        let r = SelectionReport::analyze(&eq1, &t4, SelectOptions::default()).unwrap();
        for (b, block) in r.mecs.iter().enumerate() {
            let first = &r.markov[block[0]];
            for &i in block {
                let m = &r.markov[i];
                assert_eq!(
                    (m.total_edges, m.dsep_count, m.mec),
                    (first.total_edges, first.dsep_count, b)
                );
                let pos = t4.position(m.id).unwrap();
                assert_eq!(&t4.dsep(pos), r.mec_set(b));
            }
        }
        assert!(r.ids(Assumption::Cfc).is_empty());
        assert_eq!(r.ids(Assumption::Mdr).len(), 5);
    }

    #[test]
    fn assumption_names_round_trip() {
        for a in Assumption::ALL {
            assert_eq!(a.label().parse::<Assumption>().unwrap(), a);
        }
        assert!("bogus".parse::<Assumption>().is_err());
    }
}
