use std::fmt;

/// Compact set of node ids (1-based, at most 31 nodes).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(u32);

impl NodeSet {
    pub const MAX_NODES: usize = 31;

    pub const fn empty() -> Self {
        NodeSet(0)
    }

    pub fn singleton(node: usize) -> Self {
        let mut s = NodeSet::empty();
        s.insert(node);
        s
    }

    pub fn from_bits(bits: u32) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn insert(&mut self, node: usize) {
        debug_assert!((1..=Self::MAX_NODES).contains(&node));
        self.0 |= 1 << node;
    }

    pub fn remove(&mut self, node: usize) {
        self.0 &= !(1 << node);
    }

    pub fn contains(self, node: usize) -> bool {
        node <= Self::MAX_NODES && self.0 & (1 << node) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    /// Nodes in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let n = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(n)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = NodeSet::empty();
        for n in iter {
            s.insert(n);
        }
        s
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}
