//! Slot-by-slot simulation over a fixed horizon and Monte Carlo sweeps.
//!
//! Every packet exists at slot 0. Throughput is `S = delivered / H` where
//! `H` is the measurement horizon, so a saturated component shows whatever
//! the channel allocation lets through in that window.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coding::{max_code_size, select_code_set, CodingBudget, DecoderState, Transmission};
use crate::error::{Error, Result};
use crate::mac_sched::{MacPolicy, MacScheduler, MprConfig};
use crate::node_set::NodeSet;
use crate::topology::{ComponentKind, TopologyComponent};
use crate::traffic::{draw_loads, make_packets, Dest, LoadVector, Packet, PacketId, TrafficType};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub kind: ComponentKind,
    pub n: usize,
    /// Size of the first edge set; ignored for the cross component.
    pub x1: usize,
    pub traffic: TrafficType,
    pub nc: bool,
    pub mpr: MprConfig,
    pub mac: MacPolicy,
    pub horizon: u32,
    pub g: u32,
    pub iterations: u32,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            kind: ComponentKind::Cross,
            n: 5,
            x1: 2,
            traffic: TrafficType::Unicast,
            nc: false,
            mpr: MprConfig::new(1),
            mac: MacPolicy::NodeFair,
            horizon: 100,
            g: 100,
            iterations: 1000,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn component(&self) -> Result<TopologyComponent> {
        TopologyComponent::build(self.kind, self.n, self.x1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be >= 1".into()));
        }
        if self.g == 0 {
            return Err(Error::InvalidParameter("g must be >= 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        self.mpr.validate()?;
        self.component().map(|_| ())
    }

    /// Short stable identifier used in CSV output.
    pub fn id(&self) -> String {
        let mut s = format!("{}{}", self.kind, self.n);
        if self.kind == ComponentKind::X {
            let _ = write!(s, "-x1_{}", self.x1);
        }
        s.push_str(if self.nc { "-nc" } else { "-routing" });
        let _ = write!(s, "-m{}", self.mpr.m);
        if self.mpr.cap2 {
            s.push_str("-cap2");
        }
        let _ = write!(s, "-{}-{}", self.mac, self.traffic);
        let _ = write!(s, "-g{}-h{}", self.g, self.horizon);
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub s: f64,
    pub delivered: u64,
    /// Delivered count per source node, index `i` for node `i + 1`.
    pub per_flow: Vec<u64>,
    /// Fraction of offered packets delivered (1 when nothing was offered).
    pub completion: f64,
    pub horizon: u32,
}

impl SimResult {
    /// `delivered / H` as an exact rational.
    pub fn s_exact(&self) -> Rational {
        Rational::new(self.delivered as i64, self.horizon as i64)
    }
}

/// One slot of a traced run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: u32,
    pub transmissions: Vec<Transmission>,
    /// `(receiver, sender)` pairs that were captured.
    pub receptions: Vec<(usize, usize)>,
    pub deliveries: Vec<PacketId>,
}

impl SlotRecord {
    pub const CSV_HEADER: &'static str = "slot,transmitters,payloads,receptions,deliveries";

    /// Lists are space separated; a coded payload is written `a^b^c`,
    /// a reception `receiver<sender`.
    pub fn csv_row(&self) -> String {
        let tx: Vec<String> = self.transmissions.iter().map(|t| t.sender.to_string()).collect();
        let payloads: Vec<String> = self
            .transmissions
            .iter()
            .map(|t| {
                t.payload
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join("^")
            })
            .collect();
        let rx: Vec<String> = self.receptions.iter().map(|(r, s)| format!("{r}<{s}")).collect();
        let del: Vec<String> = self.deliveries.iter().map(|p| p.to_string()).collect();
        format!(
            "{},{},{},{},{}",
            self.slot,
            tx.join(" "),
            payloads.join(" "),
            rx.join(" "),
            del.join(" ")
        )
    }
}

struct Simulation<'a> {
    config: &'a SimConfig,
    component: TopologyComponent,
    packets: Vec<Packet>,
    budget: CodingBudget,
    mac: MacScheduler,
    edge_queues: Vec<VecDeque<PacketId>>,
    own_center: VecDeque<PacketId>,
    relay: Vec<Packet>,
    decoders: Vec<DecoderState>,
    holders: Vec<u32>,
    done: Vec<bool>,
    delivered: u64,
    per_flow: Vec<u64>,
}

impl<'a> Simulation<'a> {
    fn new(config: &'a SimConfig, loads: &LoadVector) -> Result<Self> {
        config.validate()?;
        let component = config.component()?;
        let packets = make_packets(loads, &component, config.traffic)?;
        let n = component.n();
        let mut edge_queues = vec![VecDeque::new(); n + 1];
        let mut own_center = VecDeque::new();
        let mut decoders = vec![DecoderState::new(); n + 1];
        for p in &packets {
            if component.is_center(p.origin) {
                own_center.push_back(p.id);
            } else {
                edge_queues[p.origin].push_back(p.id);
            }
            decoders[p.origin].receive(&[p.id]);
        }
        let mac = MacScheduler::new(&component, config.mac, config.mpr, config.nc, config.traffic)?;
        Ok(Simulation {
            config,
            budget: max_code_size(&component, config.mpr.effective_m()),
            mac,
            edge_queues,
            own_center,
            relay: Vec::new(),
            decoders,
            holders: vec![1; packets.len()],
            done: vec![false; packets.len()],
            delivered: 0,
            per_flow: vec![0; n],
            packets,
            component,
        })
    }

    fn backlogged(&self) -> NodeSet {
        let mut set = NodeSet::empty();
        for v in self.component.edge_nodes() {
            if !self.edge_queues[v].is_empty() {
                set.insert(v);
            }
        }
        if !self.own_center.is_empty() || !self.relay.is_empty() {
            set.insert(self.component.center());
        }
        set
    }

    /// Center payload for this slot. Node-fair serves strictly by arrival, so
    /// its own slot-0 packets go first. Flow-fair serves relayed traffic
    /// first, except that with coding an uncoded relay yields to an own
    /// packet so the queue can collect coding partners.
    fn center_transmission(&mut self) -> Transmission {
        let center = self.component.center();
        let own_first = match self.config.mac {
            MacPolicy::NodeFair => true,
            MacPolicy::FlowFair(_) => self.relay.is_empty(),
        };
        if own_first {
            if let Some(id) = self.own_center.pop_front() {
                return Transmission::native(center, id);
            }
        }
        let t = if self.config.nc {
            let t = select_code_set(
                &self.component,
                &self.relay,
                &self.decoders,
                self.budget,
                self.config.traffic,
            );
            if !t.is_coded() {
                if let Some(id) = self.own_center.pop_front() {
                    return Transmission::native(center, id);
                }
            }
            t
        } else {
            Transmission::native(center, self.relay[0].id)
        };
        if self.config.traffic == TrafficType::Unicast {
            self.relay.retain(|p| !t.payload.contains(&p.id));
        }
        t
    }

    fn step(&mut self, slot: u32, trace: Option<&mut Vec<SlotRecord>>) {
        let backlogged = self.backlogged();
        let tx_set = self.mac.next_transmit_set(backlogged);
        let center = self.component.center();
        let mut transmissions = Vec::with_capacity(tx_set.len());
        for v in tx_set.iter() {
            if v == center {
                transmissions.push(self.center_transmission());
            } else if let Some(id) = self.edge_queues[v].pop_front() {
                transmissions.push(Transmission::native(v, id));
            }
        }

        let order = self.config.mpr.m;
        let mut receptions = Vec::new();
        let mut deliveries = Vec::new();
        for v in self.component.nodes() {
            if tx_set.contains(v) {
                continue;
            }
            let heard = self.component.nbrs(v).intersection(tx_set);
            if heard.is_empty() || heard.len() > order {
                continue;
            }
            for t in transmissions.iter().filter(|t| heard.contains(t.sender)) {
                receptions.push((v, t.sender));
                for id in self.decoders[v].receive(&t.payload) {
                    self.on_learn(v, id, &mut deliveries);
                }
            }
        }
        if self.config.traffic == TrafficType::Broadcast {
            let n = self.component.n() as u32;
            let holders = &self.holders;
            self.relay.retain(|p| holders[p.id.0 as usize] < n);
        }
        if let Some(trace) = trace {
            deliveries.sort();
            trace.push(SlotRecord {
                slot,
                transmissions,
                receptions,
                deliveries,
            });
        }
    }

    fn on_learn(&mut self, node: usize, id: PacketId, deliveries: &mut Vec<PacketId>) {
        let p = self.packets[id.0 as usize];
        let idx = id.0 as usize;
        self.holders[idx] += 1;
        if node == self.component.center() && p.origin != node {
            // Arrival order is the queue order: receptions are applied
            // slot by slot, senders in ascending id.
            self.relay.push(p);
        }
        let complete = match p.dest {
            Dest::Unicast(d) => d == node,
            Dest::Broadcast => self.holders[idx] == self.component.n() as u32,
        };
        if complete && !self.done[idx] {
            self.done[idx] = true;
            self.delivered += 1;
            self.per_flow[p.origin - 1] += 1;
            deliveries.push(id);
        }
    }

    fn finished(&self) -> bool {
        self.delivered == self.packets.len() as u64
    }

    fn result(self) -> SimResult {
        let total = self.packets.len() as u64;
        SimResult {
            s: self.delivered as f64 / self.config.horizon as f64,
            delivered: self.delivered,
            per_flow: self.per_flow,
            completion: if total == 0 { 1.0 } else { self.delivered as f64 / total as f64 },
            horizon: self.config.horizon,
        }
    }
}

/// Simulates one load vector for `config.horizon` slots.
pub fn run(config: &SimConfig, loads: &LoadVector) -> Result<SimResult> {
    let mut sim = Simulation::new(config, loads)?;
    for slot in 1..=config.horizon {
        if sim.finished() {
            break;
        }
        sim.step(slot, None);
    }
    Ok(sim.result())
}

/// Like [`run`], also returning a record of every active slot.
pub fn run_traced(config: &SimConfig, loads: &LoadVector) -> Result<(SimResult, Vec<SlotRecord>)> {
    let mut sim = Simulation::new(config, loads)?;
    let mut trace = Vec::new();
    for slot in 1..=config.horizon {
        if sim.finished() {
            break;
        }
        sim.step(slot, Some(&mut trace));
    }
    Ok((sim.result(), trace))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McPoint {
    pub p: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCurve {
    pub points: Vec<McPoint>,
}

impl SweepCurve {
    pub const CSV_HEADER: &'static str = "P,mean_S,std_S,config_id";

    /// Rows without header, one per point.
    pub fn csv_rows(&self, config_id: &str) -> String {
        let mut out = String::new();
        for pt in &self.points {
            let _ = writeln!(out, "{},{:.6},{:.6},{}", pt.p, pt.mean, pt.std, config_id);
        }
        out
    }

    pub fn to_csv(&self, config_id: &str) -> String {
        format!("{}\n{}", Self::CSV_HEADER, self.csv_rows(config_id))
    }

    pub fn peak(&self) -> Option<McPoint> {
        self.points
            .iter()
            .copied()
            .max_by(|a, b| a.mean.total_cmp(&b.mean))
    }
}

fn point_seed(master: u64, p: f64) -> u64 {
    // splitmix64 finaliser over the bit pattern of p.
    let mut z = p.to_bits().wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    master ^ z ^ (z >> 31)
}

/// Load vector drawn by Monte Carlo iteration `iteration` at offered load `p`.
pub fn iteration_loads(config: &SimConfig, p: f64, iteration: u32) -> Result<LoadVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(config.seed, p));
    rng.set_stream(iteration as u64);
    draw_loads(p, config.n, config.g, &mut rng)
}

/// Mean and sample standard deviation of `S` over `config.iterations`
/// random load draws at offered load `p`.
///
/// Iteration `i` draws from ChaCha8 stream `i` of a generator seeded from
/// the master seed and `p`, so every point is reproducible on its own.
pub fn monte_carlo(config: &SimConfig, p: f64) -> Result<McPoint> {
    config.validate()?;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    for i in 0..config.iterations {
        let loads = iteration_loads(config, p, i)?;
        let d = run(config, &loads)?.delivered as u128;
        sum += d;
        sum_sq += d * d;
    }
    let k = config.iterations as f64;
    let h = config.horizon as f64;
    let mean = sum as f64 / k / h;
    let std = if config.iterations > 1 {
        let it = config.iterations as u128;
        let num = (it * sum_sq - sum * sum) as f64;
        (num / (k * (k - 1.0))).sqrt() / h
    } else {
        0.0
    };
    Ok(McPoint { p, mean, std })
}

/// One Monte Carlo point per offered load.
pub fn sweep(config: &SimConfig, p_list: &[f64]) -> Result<SweepCurve> {
    if p_list.is_empty() {
        return Err(Error::InvalidParameter("load grid is empty".into()));
    }
    if p_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("load grid must be strictly increasing".into()));
    }
    let points = p_list
        .iter()
        .map(|&p| monte_carlo(config, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve { points })
}

/// Inclusive grid `start, start+step, ..., end`, snapped to 1e-9.
pub fn p_grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if !(start >= 0.0) || !end.is_finite() || end < start {
        return Err(Error::InvalidParameter(format!("bad load range {start}:{step}:{end}")));
    }
    if start == end {
        return Ok(vec![start]);
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("load step must be > 0, got {step}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}
