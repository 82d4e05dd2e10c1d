//! Small node sets packed into a `u16` bitmask.

use std::fmt;

/// Maximum number of nodes any graph may carry.
pub const MAX_NODES: usize = 16;

/// A set of 0-based node indices below [`MAX_NODES`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u16);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    #[inline]
    pub const fn from_bits(bits: u16) -> Self {
        NodeSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u16 {
        self.0
    }

    /// All nodes `0..p`.
    #[inline]
    pub fn full(p: usize) -> Self {
        debug_assert!(p <= MAX_NODES);
        if p >= 16 {
            NodeSet(u16::MAX)
        } else {
            NodeSet((1u16 << p) - 1)
        }
    }

    #[inline]
    pub fn singleton(v: usize) -> Self {
        NodeSet(1 << v)
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        v < MAX_NODES && self.0 & (1 << v) != 0
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    #[inline]
    pub fn with(self, v: usize) -> Self {
        NodeSet(self.0 | (1 << v))
    }

    #[inline]
    pub fn without(self, v: usize) -> Self {
        NodeSet(self.0 & !(1 << v))
    }

    #[inline]
    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// True when every member lies in `0..p`.
    #[inline]
    pub fn within(self, p: usize) -> bool {
        self.is_subset(NodeSet::full(p))
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

/// Prints 1-based labels, e.g. `{1,3}`.
impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_is_ascending() {
        let s: NodeSet = [4, 0, 2].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 4]);
        assert_eq!(s.len(), 3);
        assert_eq!(format!("{s}"), "{1,3,5}");
    }

    #[test]
    fn full_set_bounds() {
        assert_eq!(NodeSet::full(0).len(), 0);
        assert_eq!(NodeSet::full(5).bits(), 0b11111);
        assert_eq!(NodeSet::full(16).len(), 16);
        assert!(NodeSet::singleton(3).within(4));
        assert!(!NodeSet::singleton(4).within(4));
    }
}
