//! Separation statements `(j, k, S)` and packed sets of them.
//!
//! A [`SepSet`] holds either the d-separations entailed by a graph or the
//! conditional independencies of a distribution; both are sets of the same
//! triples. The bit layout is frozen:
//!
//! * pairs `j < k` in lexicographic order, each owning a block of
//!   `2^(p-2)` consecutive bits;
//! * inside a block, bit `t` is the conditioning set whose members are the
//!   nodes of `V \ {j, k}` selected by the binary digits of `t`, least
//!   significant digit first (so `t = 0` is the empty set and `t = 1` the
//!   smallest remaining node).

use std::fmt;

use sha2::{Digest, Sha256};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;

/// Largest `p` for which whole statement sets are materialized.
pub const MAX_SEPSET_NODES: usize = 8;

/// One statement: `j` and `k` separated (or independent) given `cond`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SepStatement {
    j: usize,
    k: usize,
    cond: NodeSet,
}

impl SepStatement {
    /// Canonicalizes the endpoint order; rejects `j == k` and conditioning
    /// sets that contain an endpoint.
    pub fn new(j: usize, k: usize, cond: NodeSet) -> Result<Self> {
        if j == k {
            return Err(Error::arg("statement endpoints must differ"));
        }
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        if cond.contains(j) || cond.contains(k) {
            return Err(Error::arg(format!(
                "conditioning set {cond} contains an endpoint of ({}, {})",
                j + 1,
                k + 1
            )));
        }
        Ok(SepStatement { j, k, cond })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cond(&self) -> NodeSet {
        self.cond
    }

    fn check(&self, p: usize) -> Result<()> {
        if self.k >= p {
            return Err(Error::NodeOutOfRange { node: self.k, p });
        }
        if !self.cond.within(p) {
            return Err(Error::arg(format!(
                "conditioning set {} exceeds p = {p}",
                self.cond
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for SepStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {} | ", self.j + 1, self.k + 1)?;
        if self.cond.is_empty() {
            write!(f, "-")
        } else {
            let labels: Vec<String> = self.cond.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "{}", labels.join(","))
        }
    }
}

impl fmt::Display for SepStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Number of statements for `p` nodes: `C(p,2) * 2^(p-2)`.
pub fn statement_count(p: usize) -> usize {
    p * (p - 1) / 2 * (1 << (p - 2))
}

#[inline]
pub(crate) fn pair_index(p: usize, j: usize, k: usize) -> usize {
    // Pairs before row j, then offset within the row.
    j * (2 * p - j - 1) / 2 + (k - j - 1)
}

/// Packs `cond` into the block index over `V \ {j, k}`.
#[inline]
pub(crate) fn compress(cond: u16, j: usize, k: usize) -> usize {
    let lo_mask = (1u32 << j) - 1;
    let c = cond as u32;
    // Remove bit j, then bit k (k > j, so it has shifted to k - 1).
    let without_j = (c & lo_mask) | ((c >> 1) & !lo_mask);
    let mid_mask = (1u32 << (k - 1)) - 1;
    ((without_j & mid_mask) | ((without_j >> 1) & !mid_mask)) as usize
}

#[inline]
fn expand(t: usize, j: usize, k: usize) -> u16 {
    let t = t as u32;
    let mid_mask = (1u32 << (k - 1)) - 1;
    let with_k = (t & mid_mask) | ((t & !mid_mask) << 1);
    let lo_mask = (1u32 << j) - 1;
    ((with_k & lo_mask) | ((with_k & !lo_mask) << 1)) as u16
}

/// A set of separation statements over a fixed `p`, stored as a bitset in
/// the layout documented at module level.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SepSet {
    p: usize,
    words: SmallVec<[u64; 2]>,
}

impl SepSet {
    /// Empty set for `2 <= p <= 8`.
    pub fn new(p: usize) -> Result<Self> {
        if !(2..=MAX_SEPSET_NODES).contains(&p) {
            return Err(Error::Capacity {
                what: "separation-set enumeration (nodes)",
                limit: MAX_SEPSET_NODES,
                got: p,
            });
        }
        Ok(SepSet {
            p,
            words: SmallVec::from_elem(0, Self::word_count(p)),
        })
    }

    /// Every statement for `p`.
    pub fn full(p: usize) -> Result<Self> {
        let mut s = SepSet::new(p)?;
        let n = statement_count(p);
        for (w, word) in s.words.iter_mut().enumerate() {
            let lo = w * 64;
            *word = if n >= lo + 64 {
                u64::MAX
            } else {
                (1u64 << (n - lo)) - 1
            };
        }
        Ok(s)
    }

    pub fn from_statements<I: IntoIterator<Item = SepStatement>>(
        p: usize,
        stmts: I,
    ) -> Result<Self> {
        let mut s = SepSet::new(p)?;
        for st in stmts {
            s.insert(st)?;
        }
        Ok(s)
    }

    pub fn word_count(p: usize) -> usize {
        statement_count(p).div_ceil(64)
    }

    pub(crate) fn from_words(p: usize, words: &[u64]) -> Self {
        debug_assert_eq!(words.len(), Self::word_count(p));
        SepSet {
            p,
            words: SmallVec::from_slice(words),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit position of `stmt`.
    pub fn index_of(p: usize, stmt: &SepStatement) -> usize {
        let block = 1usize << (p - 2);
        pair_index(p, stmt.j, stmt.k) * block + compress(stmt.cond.bits(), stmt.j, stmt.k)
    }

    /// Statement at bit position `idx`.
    pub fn statement_at(p: usize, idx: usize) -> SepStatement {
        let block = 1usize << (p - 2);
        let (mut pair, t) = (idx / block, idx % block);
        let mut j = 0;
        while pair >= p - 1 - j {
            pair -= p - 1 - j;
            j += 1;
        }
        let k = j + 1 + pair;
        SepStatement {
            j,
            k,
            cond: NodeSet::from_bits(expand(t, j, k)),
        }
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.words[idx / 64] & (1 << (idx % 64)) != 0
    }

    pub fn insert(&mut self, stmt: SepStatement) -> Result<()> {
        stmt.check(self.p)?;
        self.set_bit(Self::index_of(self.p, &stmt));
        Ok(())
    }

    pub fn remove(&mut self, stmt: &SepStatement) {
        if stmt.check(self.p).is_ok() {
            let idx = Self::index_of(self.p, stmt);
            self.words[idx / 64] &= !(1 << (idx % 64));
        }
    }

    pub fn contains(&self, stmt: &SepStatement) -> bool {
        stmt.check(self.p).is_ok() && self.contains_index(Self::index_of(self.p, stmt))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn same_p(&self, other: &SepSet) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.p,
                got: other.p,
            })
        }
    }

    pub fn is_subset(&self, other: &SepSet) -> Result<bool> {
        self.same_p(other)?;
        Ok(words_subset(&self.words, &other.words))
    }

    pub fn union(&self, other: &SepSet) -> Result<SepSet> {
        self.same_p(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(out)
    }

    pub fn difference(&self, other: &SepSet) -> Result<SepSet> {
        self.same_p(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        Ok(out)
    }

    /// Statements in bit-index order.
    pub fn iter(&self) -> impl Iterator<Item = SepStatement> + '_ {
        let p = self.p;
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(SepSet::statement_at(p, w * 64 + b))
                }
            })
        })
    }

    /// Hex SHA-256 over `p` and the packed words (little-endian).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update([self.p as u8]);
        for w in &self.words {
            h.update(w.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

impl fmt::Debug for SepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[inline]
pub(crate) fn words_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}
