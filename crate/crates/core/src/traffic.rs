//! Offered load generation and packet materialisation.
//!
//! A node's load `rho_i = k_i / g` is the fraction of slots it needs to push
//! its `k_i` packets one hop; the total offered load is `P = sum(rho_i)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::topology::TopologyComponent;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrafficType {
    Unicast,
    Broadcast,
}

impl fmt::Display for TrafficType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrafficType::Unicast => f.write_str("unicast"),
            TrafficType::Broadcast => f.write_str("broadcast"),
        }
    }
}

impl FromStr for TrafficType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unicast" => Ok(TrafficType::Unicast),
            "broadcast" => Ok(TrafficType::Broadcast),
            other => Err(Error::InvalidParameter(format!("unknown traffic type '{other}'"))),
        }
    }
}

/// Per-node packet counts for one experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadVector {
    g: u32,
    k: Vec<u32>,
}

impl LoadVector {
    /// `k[i]` is the packet count of node `i + 1`.
    pub fn from_counts(g: u32, k: Vec<u32>) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParameter("granularity g must be >= 1".into()));
        }
        Ok(LoadVector { g, k })
    }

    pub fn zeros(n: usize, g: u32) -> Self {
        LoadVector { g, k: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn counts(&self) -> &[u32] {
        &self.k
    }

    /// Packet count of `node` (1-based).
    pub fn count(&self, node: usize) -> u32 {
        self.k[node - 1]
    }

    /// Total packet count `K`.
    pub fn total(&self) -> u64 {
        self.k.iter().map(|&k| k as u64).sum()
    }

    /// Exact offered load `K / g`.
    pub fn p(&self) -> Rational {
        Rational::new(self.total() as i64, self.g as i64)
    }

    /// Exact per-node load `rho_i = k_i / g`.
    pub fn rho(&self, node: usize) -> Rational {
        Rational::new(self.count(node) as i64, self.g as i64)
    }
}

/// `round(p * g)` with halves rounded up.
pub fn packet_total(p: f64, g: u32) -> u64 {
    // The epsilon absorbs representation error in grid values such as 0.35*100.
    (p * g as f64 + 0.5 + 1e-9).floor() as u64
}

/// Draws per-node counts whose joint law is Multinomial(round(p*g), uniform).
///
/// Node `i` receives a Binomial(remaining, 1/(n-i+1)) share of what is left;
/// the last node takes the remainder.
pub fn draw_loads<R: Rng + ?Sized>(p: f64, n: usize, g: u32, rng: &mut R) -> Result<LoadVector> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("offered load must be >= 0, got {p}")));
    }
    if n == 0 || g == 0 {
        return Err(Error::InvalidParameter("n and g must be >= 1".into()));
    }
    let total = packet_total(p, g);
    let mut remaining = total;
    let mut k = Vec::with_capacity(n);
    for i in 1..=n {
        let share = if i == n || remaining == 0 {
            remaining
        } else {
            let prob = 1.0 / (n - i + 1) as f64;
            Binomial::new(remaining, prob)
                .expect("probability in (0, 1]")
                .sample(rng)
        };
        remaining -= share;
        k.push(share as u32);
    }
    Ok(LoadVector { g, k })
}

/// Equal counts `p*g/n` for every node.
pub fn symmetric_loads(p: Rational, n: usize, g: u32) -> Result<LoadVector> {
    if n == 0 || g == 0 {
        return Err(Error::InvalidParameter("n and g must be >= 1".into()));
    }
    if p < Rational::from_integer(0) {
        return Err(Error::InvalidParameter(format!("offered load must be >= 0, got {p}")));
    }
    let per_node = p * Rational::from_integer(g as i64) / Rational::from_integer(n as i64);
    if !per_node.is_integer() {
        return Err(Error::Indivisible {
            p_times_g: (p * Rational::from_integer(g as i64)).to_string(),
            n,
        });
    }
    Ok(LoadVector {
        g,
        k: vec![per_node.to_integer() as u32; n],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId(pub u32);

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dest {
    Unicast(usize),
    Broadcast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Packet {
    pub id: PacketId,
    pub origin: usize,
    pub dest: Dest,
}

/// Materialises the packets of a load vector. Ids are assigned node by node,
/// so every packet of node `i` has a smaller id than any packet of node `i+1`.
pub fn make_packets(
    loads: &LoadVector,
    component: &TopologyComponent,
    traffic: TrafficType,
) -> Result<Vec<Packet>> {
    if loads.n() != component.n() {
        return Err(Error::InvalidParameter(format!(
            "load vector has {} nodes, component has {}",
            loads.n(),
            component.n()
        )));
    }
    let mut packets = Vec::with_capacity(loads.total() as usize);
    for node in component.nodes() {
        let dest = match traffic {
            TrafficType::Unicast => Dest::Unicast(component.dest_of(node)),
            TrafficType::Broadcast => Dest::Broadcast,
        };
        for _ in 0..loads.count(node) {
            packets.push(Packet {
                id: PacketId(packets.len() as u32),
                origin: node,
                dest,
            });
        }
    }
    Ok(packets)
}
