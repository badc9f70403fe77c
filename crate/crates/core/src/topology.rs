//! Single-relay topology components.
//!
//! Nodes are numbered `1..=n`; node `n` is the center (relay) and is adjacent
//! to every edge node. Every edge-to-edge flow has non-adjacent endpoints, so
//! all multi-hop traffic crosses the center.
//!
//! Two shapes are supported:
//!
//! * **Cross**: `n - 1` edge nodes (an even number) arranged around the
//!   center. Each edge node hears every other edge node except the one
//!   directly opposite, and sends its flow to that opposite node.
//! * **X**: the edge nodes are split into two fully connected sets `x1` and
//!   `x2` with no links between the sets. Flows go from one set to the other.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::node_set::NodeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Cross,
    X,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::Cross => f.write_str("cross"),
            ComponentKind::X => f.write_str("x"),
        }
    }
}

impl FromStr for ComponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cross" => Ok(ComponentKind::Cross),
            "x" => Ok(ComponentKind::X),
            other => Err(Error::InvalidParameter(format!("unknown topology '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyComponent {
    kind: ComponentKind,
    n: usize,
    /// `adjacency[i]` is the neighbour set of node `i`; index 0 is unused.
    adjacency: Vec<NodeSet>,
    x1: NodeSet,
    x2: NodeSet,
    /// `flow_map[i]` is the unicast destination of node `i`'s flow.
    flow_map: Vec<usize>,
}

impl TopologyComponent {
    /// Builds a component. `x1_size` is ignored for the cross kind.
    pub fn build(kind: ComponentKind, n: usize, x1_size: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 nodes, got {n}")));
        }
        if n > NodeSet::MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "at most {} nodes are supported, got {n}",
                NodeSet::MAX_NODES
            )));
        }
        let edges = n - 1;
        let center = n;
        let mut adjacency = vec![NodeSet::empty(); n + 1];
        let mut flow_map = vec![0; n + 1];
        let mut x1 = NodeSet::empty();
        let mut x2 = NodeSet::empty();

        let link = |a: usize, b: usize, adj: &mut Vec<NodeSet>| {
            adj[a].insert(b);
            adj[b].insert(a);
        };

        for e in 1..=edges {
            link(e, center, &mut adjacency);
        }

        match kind {
            ComponentKind::Cross => {
                if edges % 2 != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "cross component needs an even number of edge nodes, got {edges}"
                    )));
                }
                for i in 1..=edges {
                    let opp = cross_opposite(i, edges);
                    flow_map[i] = opp;
                    for j in (i + 1)..=edges {
                        if j != opp {
                            link(i, j, &mut adjacency);
                        }
                    }
                }
            }
            ComponentKind::X => {
                if x1_size < 1 || x1_size > n - 2 {
                    return Err(Error::InvalidParameter(format!(
                        "x1 size must lie in 1..={}, got {x1_size}",
                        n - 2
                    )));
                }
                let set1: Vec<usize> = (1..=x1_size).collect();
                let set2: Vec<usize> = (x1_size + 1..=edges).collect();
                for set in [&set1, &set2] {
                    for (a, &i) in set.iter().enumerate() {
                        for &j in &set[a + 1..] {
                            link(i, j, &mut adjacency);
                        }
                    }
                }
                for (k, &i) in set1.iter().enumerate() {
                    flow_map[i] = set2[k % set2.len()];
                }
                for (k, &i) in set2.iter().enumerate() {
                    flow_map[i] = set1[k % set1.len()];
                }
                x1 = set1.iter().copied().collect();
                x2 = set2.iter().copied().collect();
            }
        }
        flow_map[center] = 1;

        Ok(TopologyComponent {
            kind,
            n,
            adjacency,
            x1,
            x2,
            flow_map,
        })
    }

    /// The canonical 5-node cross component.
    pub fn cross5() -> Self {
        Self::build(ComponentKind::Cross, 5, 0).expect("valid")
    }

    /// The canonical 5-node "X" component with `x1 = {1, 2}`, `x2 = {3, 4}`.
    pub fn x5() -> Self {
        Self::build(ComponentKind::X, 5, 2).expect("valid")
    }

    pub fn kind(&self) -> ComponentKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.n - 1
    }

    pub fn is_center(&self, node: usize) -> bool {
        node == self.n
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    pub fn edge_nodes(&self) -> impl Iterator<Item = usize> {
        1..self.n
    }

    pub fn all_nodes(&self) -> NodeSet {
        self.nodes().collect()
    }

    pub fn x1(&self) -> NodeSet {
        self.x1
    }

    pub fn x2(&self) -> NodeSet {
        self.x2
    }

    /// `max(|X1|, |X2|)`; zero for the cross kind.
    pub fn max_set_size(&self) -> usize {
        self.x1.len().max(self.x2.len())
    }

    pub fn neighbors(&self, node: usize) -> Result<NodeSet> {
        self.check(node)?;
        Ok(self.adjacency[node])
    }

    pub fn flow_dest(&self, node: usize) -> Result<usize> {
        self.check(node)?;
        Ok(self.flow_map[node])
    }

    /// Unchecked neighbour lookup for hot loops; `node` must be in `1..=n`.
    pub(crate) fn nbrs(&self, node: usize) -> NodeSet {
        self.adjacency[node]
    }

    pub(crate) fn dest_of(&self, node: usize) -> usize {
        self.flow_map[node]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a <= self.n && self.adjacency[a].contains(b)
    }

    fn check(&self, node: usize) -> Result<()> {
        if node == 0 || node > self.n {
            Err(Error::UnknownNode { node, n: self.n })
        } else {
            Ok(())
        }
    }
}

fn cross_opposite(i: usize, edges: usize) -> usize {
    ((i - 1 + edges / 2) % edges) + 1
}
