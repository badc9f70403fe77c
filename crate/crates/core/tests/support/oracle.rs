//! Brute-force slot scheduler for the 5-node components, written straight
//! from the model rules with no code shared with the library.
//!
//! Packets are bits of a `u32`, so every node's knowledge is a GF(2) span of
//! at most 15 dimensions, searched by plain Gaussian elimination.

#![allow(dead_code)]

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Cross,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mac {
    NodeFair,
    Literal,
    Generalized,
}

#[derive(Clone, Copy, Debug)]
pub struct Instance {
    pub kind: Kind,
    pub broadcast: bool,
    pub nc: bool,
    pub m: usize,
    pub cap2: bool,
    pub mac: Mac,
    pub k: [u32; 5],
    pub h: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub delivered: u64,
    pub per_flow: [u64; 5],
}

const CENTER: usize = 5;

fn adjacent(kind: Kind, a: usize, b: usize) -> bool {
    if a == b {
        return false;
    }
    if a == CENTER || b == CENTER {
        return true;
    }
    match kind {
        // 1-3 and 2-4 are the opposite pairs.
        Kind::Cross => (a + 2 - 1) % 4 + 1 != b,
        Kind::X => (a <= 2) == (b <= 2),
    }
}

fn flow_dest(kind: Kind, v: usize) -> usize {
    match (kind, v) {
        (_, 5) => 1,
        (Kind::Cross, v) | (Kind::X, v) => [0, 3, 4, 1, 2][v],
    }
}

/// GF(2) span with a basis kept by leading bit.
#[derive(Clone, Default)]
struct Span {
    basis: [u32; 32],
}

impl Span {
    fn reduce(&self, mut v: u32) -> u32 {
        for bit in (0..32).rev() {
            if v >> bit & 1 == 1 && self.basis[bit] != 0 {
                v ^= self.basis[bit];
            }
        }
        v
    }

    fn add(&mut self, v: u32) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.basis[31 - r.leading_zeros() as usize] = r;
        true
    }

    fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }
}

#[derive(Clone, Copy)]
struct Pkt {
    bit: u32,
    origin: usize,
}

fn effective_m(inst: &Instance) -> usize {
    if inst.cap2 {
        inst.m.min(2)
    } else {
        inst.m
    }
}

/// Edge and center shares over a common denominator.
fn shares(inst: &Instance) -> (i64, i64, i64) {
    let m = effective_m(inst) as i64;
    match inst.mac {
        Mac::NodeFair => (0, 0, 1),
        Mac::Literal => {
            let e = (4 + m - 1) / m;
            let cs = if !inst.nc {
                5
            } else {
                match inst.kind {
                    Kind::Cross => m,
                    Kind::X if inst.broadcast && m == 4 => 4,
                    Kind::X => 3,
                }
            };
            (1, cs, e + cs)
        }
        Mac::Generalized => {
            let relays = if !inst.nc {
                4
            } else if m <= 2 {
                match inst.kind {
                    Kind::Cross => 1,
                    Kind::X => 2,
                }
            } else {
                match (inst.kind, inst.broadcast) {
                    (Kind::Cross, false) => 2,
                    (Kind::X, false) => 2,
                    (Kind::Cross, true) => 3,
                    (Kind::X, true) => 3,
                }
            };
            let cs = if inst.nc { relays + 1 } else { 5 };
            // 1/(4/m + cs) = m/(4 + cs*m)
            (m, cs * m, 4 + cs * m)
        }
    }
}

fn pick_set(inst: &Instance, backlogged: &[usize], anchor: usize, partner_key: &dyn Fn(usize) -> (i64, usize)) -> Vec<usize> {
    let m = effective_m(inst);
    if m == 1 || anchor == CENTER {
        return vec![anchor];
    }
    let others: Vec<usize> = backlogged
        .iter()
        .copied()
        .filter(|&v| v != anchor && v != CENTER)
        .collect();
    if m == 2 {
        let partner = others
            .iter()
            .copied()
            .filter(|&v| !adjacent(inst.kind, v, anchor))
            .min_by_key(|&v| partner_key(v));
        let mut set = vec![anchor];
        set.extend(partner);
        set.sort();
        return set;
    }
    let mut best: Option<(Vec<usize>, u64, u64)> = None;
    for mask in 0u32..(1 << others.len()) {
        let mut set: Vec<usize> = (0..others.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| others[i])
            .collect();
        if set.len() + 1 > m {
            continue;
        }
        set.push(anchor);
        set.sort();
        let (mut total, mut receivers) = (0u64, 0u64);
        for v in 1..=5 {
            if set.contains(&v) {
                continue;
            }
            let heard = set.iter().filter(|&&t| adjacent(inst.kind, v, t)).count();
            if heard >= 1 && heard <= inst.m {
                total += heard as u64;
                receivers += 1;
            }
        }
        let better = match &best {
            None => true,
            Some((bset, btot, brec)) => {
                let avg_new = if receivers == 0 { 0 } else { total * brec.max(&1) };
                let avg_old = if *brec == 0 { 0 } else { btot * receivers.max(1) };
                let cmp_avg = if receivers == 0 && *brec == 0 {
                    std::cmp::Ordering::Equal
                } else if receivers == 0 {
                    std::cmp::Ordering::Less
                } else if *brec == 0 {
                    std::cmp::Ordering::Greater
                } else {
                    avg_new.cmp(&avg_old)
                };
                match cmp_avg {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => {
                        total > *btot || (total == *btot && set < *bset)
                    }
                }
            }
        };
        if better {
            best = Some((set, total, receivers));
        }
    }
    best.unwrap().0
}

pub fn simulate(inst: &Instance) -> Outcome {
    let kind = inst.kind;
    let mut pkts = Vec::new();
    let mut queues: Vec<Vec<u32>> = vec![Vec::new(); 6];
    let mut spans: Vec<Span> = vec![Span::default(); 6];
    for v in 1..=5 {
        for _ in 0..inst.k[v - 1] {
            let bit = 1u32 << pkts.len();
            pkts.push(Pkt { bit, origin: v });
            queues[v].push(bit);
            spans[v].add(bit);
        }
    }
    let total = pkts.len();
    let mut relay: Vec<Pkt> = Vec::new();
    let mut done = vec![false; total];
    let mut out = Outcome { delivered: 0, per_flow: [0; 5] };
    let mut grants = [0i64; 6];
    let mut credit = [0i64; 6];
    let (s_edge, s_center, denom) = shares(inst);
    let budget = match (kind, effective_m(inst) <= 2) {
        (Kind::Cross, true) => 4,
        _ => 2,
    };

    let holds = |span: &Span, bit: u32| span.contains(bit);

    for _slot in 1..=inst.h {
        if out.delivered as usize == total {
            break;
        }
        let backlogged: Vec<usize> = (1..=5)
            .filter(|&v| {
                if v == CENTER {
                    !queues[CENTER].is_empty() || !relay.is_empty()
                } else {
                    !queues[v].is_empty()
                }
            })
            .collect();
        if backlogged.is_empty() {
            continue;
        }

        let tx: Vec<usize> = if inst.mac == Mac::NodeFair {
            let anchor = *backlogged.iter().min_by_key(|&&v| (grants[v], v)).unwrap();
            let g = grants;
            pick_set(inst, &backlogged, anchor, &|v| (g[v], v))
        } else {
            for v in 1..=5 {
                if backlogged.contains(&v) {
                    credit[v] += if v == CENTER { s_center } else { s_edge };
                } else {
                    credit[v] = 0;
                }
            }
            let anchor = *backlogged.iter().min_by_key(|&&v| (-credit[v], v)).unwrap();
            let c = credit;
            let set = pick_set(inst, &backlogged, anchor, &|v| (-c[v], v));
            for &v in &set {
                credit[v] -= denom;
            }
            set
        };
        for &v in &tx {
            grants[v] += 1;
        }

        // Payloads as XOR masks.
        let mut sent: Vec<(usize, u32)> = Vec::new();
        for &v in &tx {
            if v != CENTER {
                let b = queues[v].remove(0);
                sent.push((v, b));
                continue;
            }
            let own_first = inst.mac == Mac::NodeFair || relay.is_empty();
            if own_first && !queues[CENTER].is_empty() {
                let b = queues[CENTER].remove(0);
                sent.push((v, b));
                continue;
            }
            let mut payload = relay[0].bit;
            if inst.nc {
                let mut count = 1;
                let mut hops = vec![flow_dest(kind, relay[0].origin)];
                let mut members = vec![relay[0]];
                let needy = |mask: u32| -> Option<usize> {
                    let mut n = 0;
                    for u in 1..=5 {
                        let all_known = (0..total).all(|i| mask >> i & 1 == 0 || holds(&spans[u], 1 << i));
                        if all_known {
                            continue;
                        }
                        if spans[u].contains(mask) {
                            return None;
                        }
                        n += 1;
                    }
                    Some(n)
                };
                let mut served = if inst.broadcast { needy(payload).unwrap_or(0) } else { 0 };
                for cand in relay.iter().skip(1) {
                    if count >= budget {
                        break;
                    }
                    let hop = flow_dest(kind, cand.origin);
                    if hops.contains(&hop) {
                        continue;
                    }
                    let trial = payload ^ cand.bit;
                    let ok = if inst.broadcast {
                        match needy(trial) {
                            Some(s) if s > served => {
                                served = s;
                                true
                            }
                            _ => false,
                        }
                    } else {
                        members.iter().chain(std::iter::once(cand)).all(|p| {
                            let d = flow_dest(kind, p.origin);
                            let mut probe = spans[d].clone();
                            probe.add(trial);
                            probe.contains(p.bit)
                        })
                    };
                    if ok {
                        payload = trial;
                        hops.push(hop);
                        members.push(*cand);
                        count += 1;
                    }
                }
            }
            if inst.nc && payload.count_ones() == 1 && !queues[CENTER].is_empty() {
                // An uncoded relay gives way to the center's own traffic.
                let b = queues[CENTER].remove(0);
                sent.push((v, b));
                continue;
            }
            if !inst.broadcast {
                relay.retain(|p| payload & p.bit == 0);
            }
            sent.push((v, payload));
        }

        for u in 1..=5 {
            if tx.contains(&u) {
                continue;
            }
            let heard: Vec<&(usize, u32)> = sent.iter().filter(|(s, _)| adjacent(kind, u, *s)).collect();
            if heard.is_empty() || heard.len() > inst.m {
                continue;
            }
            for &&(_, mask) in &heard {
                let before: Vec<bool> = (0..total).map(|i| holds(&spans[u], 1 << i)).collect();
                spans[u].add(mask);
                for i in 0..total {
                    if before[i] || !holds(&spans[u], 1 << i) {
                        continue;
                    }
                    let p = pkts[i];
                    if u == CENTER && p.origin != CENTER {
                        relay.push(p);
                    }
                    let complete = if inst.broadcast {
                        (1..=5).all(|w| holds(&spans[w], p.bit))
                    } else {
                        flow_dest(kind, p.origin) == u
                    };
                    if complete && !done[i] {
                        done[i] = true;
                        out.delivered += 1;
                        out.per_flow[p.origin - 1] += 1;
                    }
                }
            }
        }
        if inst.broadcast {
            relay.retain(|p| !(1..=5).all(|w| holds(&spans[w], p.bit)));
        }
    }
    out
}
