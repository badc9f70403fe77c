//! COPE-style opportunistic XOR coding at the relay.
//!
//! Every node tracks what it can reconstruct from the channel as a GF(2)
//! system: natives it holds outright plus a row-reduced basis of XOR
//! combinations it has overheard but cannot yet resolve. A coded packet is
//! useful to a node exactly when it is innovative, i.e. outside the span of
//! what the node already holds.

use crate::topology::{ComponentKind, TopologyComponent};
use crate::traffic::{Packet, PacketId, TrafficType};

/// Maximum number of natives the relay may XOR together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodingBudget(pub usize);

impl CodingBudget {
    pub fn c(self) -> usize {
        self.0
    }
}

/// Coding budget for a component at (effective) MPR order `m`.
///
/// In the cross component an edge node overhears everyone except its
/// opposite as long as at most two edge nodes transmit at once, so a single
/// XOR of one packet per edge node serves all of them. With three or more
/// simultaneous edge transmitters the edge nodes hear nothing useful and only
/// opposite pairs can be combined. In the "X" component packets from the same
/// set share a next hop set, so at most one packet per set is combined.
pub fn max_code_size(component: &TopologyComponent, m: usize) -> CodingBudget {
    match component.kind() {
        ComponentKind::Cross if m <= 2 => CodingBudget(component.edge_count()),
        ComponentKind::Cross => CodingBudget(2),
        ComponentKind::X => CodingBudget(2),
    }
}

/// Relay transmissions the center needs per round of one packet from every
/// edge node, under symmetric load and the scheduler's edge grouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelayCount {
    pub relays: usize,
    /// Set when the count is extrapolated from the `m >= N-1` pattern rather
    /// than derived for the actual edge grouping.
    pub extrapolated: bool,
}

pub fn relays_per_round(
    component: &TopologyComponent,
    nc_enabled: bool,
    m_eff: usize,
    traffic: TrafficType,
) -> Option<RelayCount> {
    let edges = component.edge_count();
    if m_eff == 0 {
        return None;
    }
    if !nc_enabled {
        return Some(RelayCount { relays: edges, extrapolated: false });
    }
    let balanced = component.kind() == ComponentKind::Cross
        || component.x1().len() == component.x2().len();
    if !balanced {
        return None;
    }
    let relays = match (component.kind(), m_eff <= 2, traffic) {
        (ComponentKind::Cross, true, _) => 1,
        (ComponentKind::X, true, _) => component.max_set_size(),
        (ComponentKind::Cross, false, TrafficType::Unicast) => edges.div_ceil(2),
        (ComponentKind::X, false, TrafficType::Unicast) => component.max_set_size(),
        // Nobody overhears anything while all edges transmit, so every edge
        // node still needs one degree of freedom per foreign edge packet.
        (ComponentKind::Cross, false, TrafficType::Broadcast) => edges - 1,
        (ComponentKind::X, false, TrafficType::Broadcast) => component.max_set_size() + 1,
    };
    Some(RelayCount {
        relays,
        extrapolated: m_eff > 2 && m_eff < edges,
    })
}

/// What a node can reconstruct: natives plus a reduced basis of XOR rows.
#[derive(Clone, Debug, Default)]
pub struct DecoderState {
    known: Vec<u64>,
    known_count: usize,
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
struct Row {
    pivot: u32,
    cols: Vec<u32>,
}

impl DecoderState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_known<I: IntoIterator<Item = PacketId>>(ids: I) -> Self {
        let mut s = Self::new();
        for id in ids {
            s.set_known(id.0);
        }
        s
    }

    pub fn knows(&self, id: PacketId) -> bool {
        self.is_known(id.0)
    }

    pub fn known_count(&self) -> usize {
        self.known_count
    }

    /// Number of buffered, not yet resolvable XOR combinations.
    pub fn pending_rows(&self) -> usize {
        self.rows.len()
    }

    /// Degrees of freedom held: natives plus independent pending rows.
    pub fn rank(&self) -> usize {
        self.known_count + self.rows.len()
    }

    pub fn known_ids(&self) -> Vec<PacketId> {
        let mut out = Vec::with_capacity(self.known_count);
        for (w, &bits) in self.known.iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let t = b.trailing_zeros();
                out.push(PacketId(w as u32 * 64 + t));
                b &= b - 1;
            }
        }
        out
    }

    pub fn is_innovative(&self, payload: &[PacketId]) -> bool {
        !self.reduce(payload.iter().map(|p| p.0)).is_empty()
    }

    /// Whether receiving `payload` would leave this node holding `target`.
    pub fn would_decode(&self, payload: &[PacketId], target: PacketId) -> bool {
        if self.knows(target) {
            return true;
        }
        if payload.iter().all(|&p| p == target || self.knows(p)) {
            return payload.contains(&target);
        }
        let mut probe = self.clone();
        probe.receive(payload);
        probe.knows(target)
    }

    /// Absorbs a received payload (a native when it has one element, the
    /// XOR of its elements otherwise). Returns natives newly decoded.
    pub fn receive(&mut self, payload: &[PacketId]) -> Vec<PacketId> {
        let mut out = Vec::new();
        let mut pending = vec![payload.iter().map(|p| p.0).collect::<Vec<_>>()];
        while let Some(eq) = pending.pop() {
            let r = self.reduce(eq.into_iter());
            match r.len() {
                0 => {}
                1 => self.learn(r[0], &mut pending, &mut out),
                _ => {
                    let pivot = r[0];
                    let mut collapsed = Vec::new();
                    for row in self.rows.iter_mut() {
                        if row.cols.binary_search(&pivot).is_ok() {
                            row.cols = symdiff(&row.cols, &r);
                            if row.cols.len() == 1 {
                                collapsed.push(row.pivot);
                            }
                        }
                    }
                    self.rows.push(Row { pivot, cols: r });
                    for p in collapsed {
                        self.learn(p, &mut pending, &mut out);
                    }
                }
            }
        }
        out.sort();
        out.into_iter().map(PacketId).collect()
    }

    fn learn(&mut self, id: u32, pending: &mut Vec<Vec<u32>>, out: &mut Vec<u32>) {
        let mut natives = vec![id];
        while let Some(u) = natives.pop() {
            if self.is_known(u) {
                continue;
            }
            self.set_known(u);
            out.push(u);
            if let Some(i) = self.rows.iter().position(|r| r.pivot == u) {
                let row = self.rows.swap_remove(i);
                let rest: Vec<u32> = row.cols.into_iter().filter(|&c| c != u).collect();
                if !rest.is_empty() {
                    pending.push(rest);
                }
            }
            for row in self.rows.iter_mut() {
                if let Ok(pos) = row.cols.binary_search(&u) {
                    row.cols.remove(pos);
                    if row.cols.len() == 1 {
                        natives.push(row.pivot);
                    }
                }
            }
            self.rows.retain(|r| r.cols.len() > 1);
        }
    }

    /// Strips known natives and eliminates pivots. Rows never contain known
    /// natives or foreign pivots, so one pass suffices.
    fn reduce<I: Iterator<Item = u32>>(&self, eq: I) -> Vec<u32> {
        let mut v: Vec<u32> = eq.filter(|&u| !self.is_known(u)).collect();
        v.sort_unstable();
        // XOR semantics: duplicated ids cancel.
        let mut dedup = Vec::with_capacity(v.len());
        for u in v {
            if dedup.last() == Some(&u) {
                dedup.pop();
            } else {
                dedup.push(u);
            }
        }
        let mut v = dedup;
        let hits: Vec<usize> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| v.binary_search(&r.pivot).is_ok())
            .map(|(i, _)| i)
            .collect();
        for i in hits {
            v = symdiff(&v, &self.rows[i].cols);
        }
        v
    }

    fn is_known(&self, id: u32) -> bool {
        let w = (id / 64) as usize;
        w < self.known.len() && self.known[w] & (1 << (id % 64)) != 0
    }

    fn set_known(&mut self, id: u32) {
        let w = (id / 64) as usize;
        if w >= self.known.len() {
            self.known.resize(w + 1, 0);
        }
        if self.known[w] & (1 << (id % 64)) == 0 {
            self.known[w] |= 1 << (id % 64);
            self.known_count += 1;
        }
    }
}

fn symdiff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// One slot's transmission from a single sender.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transmission {
    pub sender: usize,
    /// Natives combined in this transmission, FIFO head first.
    pub payload: Vec<PacketId>,
}

impl Transmission {
    pub fn native(sender: usize, id: PacketId) -> Self {
        Transmission { sender, payload: vec![id] }
    }

    pub fn is_coded(&self) -> bool {
        self.payload.len() > 1
    }
}

/// Picks the relay's next payload from its queue of relayed packets.
///
/// The payload always carries the queue head, so transmissions are never
/// delayed waiting for a partner. Further packets are packed in FIFO order
/// when they have a distinct next hop and:
///
/// * unicast: every packet's destination can decode its packet on reception;
/// * broadcast: the combination stays innovative for every node still
///   missing one of its natives and serves strictly more such nodes.
///
/// `decoders` is indexed by node id (index 0 unused). `queue` must be
/// non-empty.
pub fn select_code_set(
    component: &TopologyComponent,
    queue: &[Packet],
    decoders: &[DecoderState],
    budget: CodingBudget,
    traffic: TrafficType,
) -> Transmission {
    let head = queue[0];
    let sender = component.center();
    let mut chosen = vec![head];
    let mut hops = vec![component.dest_of(head.origin)];
    let mut served = match traffic {
        TrafficType::Unicast => 0,
        TrafficType::Broadcast => broadcast_score(component, &ids(&chosen), decoders).unwrap_or(0),
    };

    for &cand in &queue[1..] {
        if chosen.len() >= budget.c() {
            break;
        }
        let hop = component.dest_of(cand.origin);
        if hops.contains(&hop) {
            continue;
        }
        chosen.push(cand);
        let payload = ids(&chosen);
        let accept = match traffic {
            TrafficType::Unicast => chosen
                .iter()
                .all(|p| decoders[component.dest_of(p.origin)].would_decode(&payload, p.id)),
            TrafficType::Broadcast => match broadcast_score(component, &payload, decoders) {
                Some(score) if score > served => {
                    served = score;
                    true
                }
                _ => false,
            },
        };
        if accept {
            hops.push(hop);
        } else {
            chosen.pop();
        }
    }

    Transmission {
        sender,
        payload: ids(&chosen),
    }
}

fn ids(packets: &[Packet]) -> Vec<PacketId> {
    packets.iter().map(|p| p.id).collect()
}

/// Number of nodes missing part of `payload`, or `None` when the payload is
/// not innovative for one of them.
fn broadcast_score(
    component: &TopologyComponent,
    payload: &[PacketId],
    decoders: &[DecoderState],
) -> Option<usize> {
    let mut needy = 0;
    for node in component.nodes() {
        let d = &decoders[node];
        if payload.iter().all(|&p| d.knows(p)) {
            continue;
        }
        if !d.is_innovative(payload) {
            return None;
        }
        needy += 1;
    }
    Some(needy)
}

/// Applies a reception to one node's decoder, returning newly decoded natives.
pub fn apply_reception(decoder: &mut DecoderState, transmission: &Transmission) -> Vec<PacketId> {
    decoder.receive(&transmission.payload)
}
