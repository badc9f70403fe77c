//! Slot-level simulator and exact analytical model for single-relay wireless
//! topology components under COPE-style XOR coding, node- or flow-fair
//! channel access and multi-packet reception.
//!
//! ```
//! use ncmac::{max_throughput, ComponentKind, TrafficType, Rational};
//!
//! let pt = max_throughput(ComponentKind::Cross, true, 1, TrafficType::Unicast, false).unwrap();
//! assert_eq!(pt.s_max, Rational::new(5, 6));
//! ```

pub mod analysis;
pub mod coding;
pub mod engine;
mod error;
pub mod mac_sched;
mod node_set;
pub mod topology;
pub mod traffic;

/// Exact rational used throughout the analytical model.
pub type Rational = num_rational::Ratio<i64>;

pub use analysis::{
    component_load, gain_decomposition, max_throughput, max_throughput_for, saturation_gap,
    ComponentLoad, GainDecomposition, ThroughputPoint,
};
pub use coding::{max_code_size, relays_per_round, CodingBudget, DecoderState, Transmission};
pub use engine::{
    iteration_loads, monte_carlo, p_grid, run, run_traced, sweep, McPoint, SimConfig, SimResult,
    SlotRecord, SweepCurve,
};
pub use error::{Error, Result};
pub use mac_sched::{flow_fair_shares, FlowFairFormula, MacPolicy, MacScheduler, MprConfig, ShareVector};
pub use node_set::NodeSet;
pub use topology::{ComponentKind, TopologyComponent};
pub use traffic::{draw_loads, make_packets, symmetric_loads, LoadVector, PacketId, TrafficType};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/topology.md")]
    mod topology {}
    #[doc = include_str!("../../../book/src/coding.md")]
    mod coding {}
    #[doc = include_str!("../../../book/src/fairness.md")]
    mod fairness {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
}
