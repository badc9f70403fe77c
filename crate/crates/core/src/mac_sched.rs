//! Channel access: which nodes transmit in a slot.
//!
//! Two fairness policies are modelled. `NodeFair` is the idealised 802.11
//! behaviour: every contending node gets the same number of transmission
//! opportunities (least-granted first, no collisions, no backoff).
//! `FlowFair` hands out slots in proportion to the flows a node carries, so
//! the relay gets enough of the channel to forward everything it receives.
//!
//! Multi-packet reception of order `m` lets up to `m` simultaneous
//! transmissions be received. For `m = 2` the edge nodes follow CSMA (a node
//! transmits only if none of its neighbours does); for `m >= 3` the transmit
//! set maximises the average number of transmissions received per receiving
//! node.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::coding::relays_per_round;
use crate::error::{Error, Result};
use crate::node_set::NodeSet;
use crate::topology::{ComponentKind, TopologyComponent};
use crate::traffic::TrafficType;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowFairFormula {
    /// The closed-form allocations exactly as published.
    Literal,
    /// Shares derived from the per-round schedule cycle.
    Generalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MacPolicy {
    NodeFair,
    FlowFair(FlowFairFormula),
}

impl fmt::Display for MacPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MacPolicy::NodeFair => f.write_str("node-fair"),
            MacPolicy::FlowFair(FlowFairFormula::Literal) => f.write_str("flow-fair-literal"),
            MacPolicy::FlowFair(FlowFairFormula::Generalized) => f.write_str("flow-fair-generalized"),
        }
    }
}

impl FromStr for MacPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node-fair" => Ok(MacPolicy::NodeFair),
            "flow-fair-literal" => Ok(MacPolicy::FlowFair(FlowFairFormula::Literal)),
            "flow-fair-generalized" | "flow-fair" => {
                Ok(MacPolicy::FlowFair(FlowFairFormula::Generalized))
            }
            other => Err(Error::InvalidParameter(format!("unknown MAC policy '{other}'"))),
        }
    }
}

/// Multi-packet reception settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MprConfig {
    /// Reception order: simultaneous transmissions a node can receive.
    pub m: usize,
    /// Limit simultaneous transmitters to two even when `m > 2`.
    pub cap2: bool,
}

impl MprConfig {
    pub fn new(m: usize) -> Self {
        MprConfig { m, cap2: false }
    }

    pub fn with_cap2(m: usize) -> Self {
        MprConfig { m, cap2: true }
    }

    /// Order that governs how many nodes may transmit together.
    pub fn effective_m(&self) -> usize {
        if self.cap2 {
            self.m.min(2)
        } else {
            self.m
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            Err(Error::InvalidParameter("MPR order m must be >= 1".into()))
        } else {
            Ok(())
        }
    }
}

/// Fraction of slots per edge node and for the center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShareVector {
    pub edge: Rational,
    pub center: Rational,
}

impl ShareVector {
    /// `sum_j s_j / m + s_R` for the given component and order.
    pub fn normalization(&self, component: &TopologyComponent, m: usize) -> Rational {
        self.edge * Rational::from_integer(component.edge_count() as i64)
            / Rational::from_integer(m as i64)
            + self.center
    }
}

fn ratio(a: usize, b: usize) -> Rational {
    Rational::new(a as i64, b as i64)
}

/// Flow-fair slot allocation.
pub fn flow_fair_shares(
    component: &TopologyComponent,
    nc_enabled: bool,
    mpr: MprConfig,
    traffic: TrafficType,
    formula: FlowFairFormula,
) -> Result<ShareVector> {
    mpr.validate()?;
    let n = component.n();
    let m = mpr.effective_m();
    let edge_slots = component.edge_count().div_ceil(m);
    match formula {
        FlowFairFormula::Literal => {
            let center_slots = if !nc_enabled {
                n
            } else {
                match component.kind() {
                    ComponentKind::Cross => m,
                    ComponentKind::X => {
                        let extra = if traffic == TrafficType::Broadcast && m == 4 { 2 } else { 1 };
                        component.max_set_size() + extra
                    }
                }
            };
            let den = edge_slots + center_slots;
            Ok(ShareVector {
                edge: ratio(1, den),
                center: ratio(center_slots, den),
            })
        }
        FlowFairFormula::Generalized => {
            let relays = relays_per_round(component, nc_enabled, m, traffic).ok_or_else(|| {
                Error::Unsupported(format!(
                    "no relay count for {} n={} nc={nc_enabled} m={m} {traffic}",
                    component.kind(),
                    n
                ))
            })?;
            let center_slots = if nc_enabled { relays.relays + 1 } else { n };
            let cycle = ratio(component.edge_count(), m) + Rational::from_integer(center_slots as i64);
            Ok(ShareVector {
                edge: cycle.recip(),
                center: Rational::from_integer(center_slots as i64) / cycle,
            })
        }
    }
}

/// Node-fair transmit set for one slot given per-node grant counts
/// (`grants[node]`, index 0 unused). Returns the empty set when nothing is
/// backlogged.
pub fn node_fair_transmit_set(
    component: &TopologyComponent,
    mpr: MprConfig,
    backlogged: NodeSet,
    grants: &[u64],
) -> NodeSet {
    let Some(anchor) = backlogged.iter().min_by_key(|&v| (grants[v], v)) else {
        return NodeSet::empty();
    };
    augment(component, mpr, backlogged, anchor, |a, b| {
        grants[a].cmp(&grants[b]).then(a.cmp(&b))
    })
}

/// Extends the anchor to a full transmit set. `prefer(a, b)` orders CSMA
/// partner candidates, `Less` meaning `a` goes first.
fn augment<F>(
    component: &TopologyComponent,
    mpr: MprConfig,
    backlogged: NodeSet,
    anchor: usize,
    prefer: F,
) -> NodeSet
where
    F: Fn(usize, usize) -> Ordering,
{
    let m = mpr.effective_m();
    let center = component.center();
    if m == 1 || anchor == center {
        return NodeSet::singleton(anchor);
    }
    let mut others = backlogged;
    others.remove(anchor);
    others.remove(center);
    if m == 2 {
        let free = others.difference(component.nbrs(anchor));
        let mut set = NodeSet::singleton(anchor);
        if let Some(partner) = free.iter().min_by(|&a, &b| prefer(a, b)) {
            set.insert(partner);
        }
        return set;
    }
    best_reception_set(component, mpr.m, m, others, anchor)
}

/// Exhaustive search over edge subsets containing `anchor`.
fn best_reception_set(
    component: &TopologyComponent,
    reception_order: usize,
    max_size: usize,
    others: NodeSet,
    anchor: usize,
) -> NodeSet {
    let pool = others.bits();
    let mut best = NodeSet::singleton(anchor);
    let mut best_score = reception_score(component, reception_order, best);
    // Iterate over every subset of `pool`.
    let mut sub = pool;
    loop {
        let extra = NodeSet::from_bits(sub);
        if extra.len() < max_size {
            let cand = extra.union(NodeSet::singleton(anchor));
            let score = reception_score(component, reception_order, cand);
            let better = match score.cmp_avg(&best_score) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => match score.total.cmp(&best_score.total) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => cand.to_vec() < best.to_vec(),
                },
            };
            if better {
                best = cand;
                best_score = score;
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & pool;
    }
    best
}

#[derive(Clone, Copy, Debug)]
struct ReceptionScore {
    total: usize,
    receivers: usize,
}

impl ReceptionScore {
    fn cmp_avg(&self, other: &Self) -> Ordering {
        // total/receivers, with 0/0 treated as 0.
        let lhs = self.total * other.receivers.max(1);
        let rhs = other.total * self.receivers.max(1);
        if self.receivers == 0 || other.receivers == 0 {
            let a = if self.receivers == 0 { 0 } else { 1 };
            let b = if other.receivers == 0 { 0 } else { 1 };
            if a != b {
                return a.cmp(&b);
            }
        }
        lhs.cmp(&rhs)
    }
}

fn reception_score(component: &TopologyComponent, order: usize, tx: NodeSet) -> ReceptionScore {
    let mut total = 0;
    let mut receivers = 0;
    for v in component.nodes() {
        if tx.contains(v) {
            continue;
        }
        let heard = component.nbrs(v).intersection(tx).len();
        if heard > 0 && heard <= order {
            total += heard;
            receivers += 1;
        }
    }
    ReceptionScore { total, receivers }
}

/// Per-run channel access state.
#[derive(Clone, Debug)]
pub struct MacScheduler {
    component: TopologyComponent,
    policy: MacPolicy,
    mpr: MprConfig,
    shares: Option<ShareVector>,
    grants: Vec<u64>,
    credits: Vec<Rational>,
}

impl MacScheduler {
    pub fn new(
        component: &TopologyComponent,
        policy: MacPolicy,
        mpr: MprConfig,
        nc_enabled: bool,
        traffic: TrafficType,
    ) -> Result<Self> {
        mpr.validate()?;
        let shares = match policy {
            MacPolicy::NodeFair => None,
            MacPolicy::FlowFair(formula) => {
                Some(flow_fair_shares(component, nc_enabled, mpr, traffic, formula)?)
            }
        };
        Ok(MacScheduler {
            component: component.clone(),
            policy,
            mpr,
            shares,
            grants: vec![0; component.n() + 1],
            credits: vec![Rational::zero(); component.n() + 1],
        })
    }

    pub fn shares(&self) -> Option<ShareVector> {
        self.shares
    }

    pub fn grants(&self) -> &[u64] {
        &self.grants
    }

    pub fn next_transmit_set(&mut self, backlogged: NodeSet) -> NodeSet {
        let set = match (self.policy, self.shares) {
            (MacPolicy::FlowFair(_), Some(shares)) => self.deficit_select(backlogged, shares),
            _ => node_fair_transmit_set(&self.component, self.mpr, backlogged, &self.grants),
        };
        for v in set.iter() {
            self.grants[v] += 1;
        }
        set
    }

    /// Weighted deficit selection: backlogged nodes accrue their share each
    /// slot, the richest transmits, and every granted node pays one slot.
    fn deficit_select(&mut self, backlogged: NodeSet, shares: ShareVector) -> NodeSet {
        let center = self.component.center();
        for v in self.component.nodes() {
            if backlogged.contains(v) {
                self.credits[v] += if v == center { shares.center } else { shares.edge };
            } else {
                self.credits[v] = Rational::zero();
            }
        }
        let credits = &self.credits;
        let richest = |a: usize, b: usize| credits[b].cmp(&credits[a]).then(a.cmp(&b));
        let Some(anchor) = backlogged.iter().min_by(|&a, &b| richest(a, b)) else {
            return NodeSet::empty();
        };
        let set = augment(&self.component, self.mpr, backlogged, anchor, richest);
        for v in set.iter() {
            self.credits[v] -= Rational::one();
        }
        set
    }
}
