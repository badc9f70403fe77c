//! Exact analytical model of a component under symmetric load.
//!
//! One round sends one packet from every node through the component. The
//! edge nodes need `E` slots for their natives (`E = ceil((N-1)/m)` with the
//! "X" pairing rule at `m = 2`) and the center needs `C` slots: its own
//! packet plus the relay transmissions. The component load `P_T` reaches 1
//! at per-node load `1/(E+C)`, so the maximum throughput is `N/(E+C)`.

use num_traits::Zero;

use crate::coding::relays_per_round;
use crate::error::{Error, Result};
use crate::mac_sched::MprConfig;
use crate::topology::{ComponentKind, TopologyComponent};
use crate::traffic::{LoadVector, TrafficType};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentLoad {
    /// Slot-time fraction the center spends relaying.
    pub rho_r: Rational,
    /// Slot-time fraction spent on natives (edge phase plus the center's own).
    pub rho_m: Rational,
    pub p_t: Rational,
    /// Set when edge loads differ: `rho_m` is then only a lower bound.
    pub lower_bound: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThroughputPoint {
    /// Offered load at which `P_T = 1`.
    pub p_star: Rational,
    pub s_max: Rational,
    /// Node-fair throughput as offered load grows without bound.
    pub s_sat: Rational,
    pub extrapolated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GainDecomposition {
    pub routing: Rational,
    pub nc_only: Rational,
    pub mpr_only: Rational,
    pub nc_plus_mpr: Rational,
    /// `routing + (nc_only - routing) + (mpr_only - routing)`.
    pub additive_prediction: Rational,
}

fn int(v: usize) -> Rational {
    Rational::from_integer(v as i64)
}

/// Slots the edge phase of one round takes.
pub fn edge_slots(component: &TopologyComponent, m_eff: usize) -> usize {
    match component.kind() {
        // Pairs must straddle the two sets.
        ComponentKind::X if m_eff == 2 => component.max_set_size(),
        _ => component.edge_count().div_ceil(m_eff),
    }
}

fn center_slots(component: &TopologyComponent, nc: bool, m_eff: usize, traffic: TrafficType) -> Result<(usize, bool)> {
    let rc = relays_per_round(component, nc, m_eff, traffic).ok_or_else(|| {
        Error::Unsupported(format!(
            "{} with n={} and sets {}/{} has no symmetric relay schedule",
            component.kind(),
            component.n(),
            component.x1().len(),
            component.x2().len()
        ))
    })?;
    Ok((rc.relays + 1, rc.extrapolated))
}

pub fn component_load(
    loads: &LoadVector,
    component: &TopologyComponent,
    nc: bool,
    mpr: MprConfig,
    traffic: TrafficType,
) -> Result<ComponentLoad> {
    mpr.validate()?;
    if loads.n() != component.n() {
        return Err(Error::InvalidParameter(format!(
            "load vector has {} nodes, component has {}",
            loads.n(),
            component.n()
        )));
    }
    let m = mpr.effective_m();
    let edges = component.edge_count();
    let sum_edges: Rational = component
        .edge_nodes()
        .map(|v| loads.rho(v))
        .fold(Rational::zero(), |a, b| a + b);
    let (relays, _) = center_slots(component, nc, m, traffic)?;
    let rho_r = int(relays - 1) / int(edges) * sum_edges;
    let rho_m = int(edge_slots(component, m)) / int(edges) * sum_edges + loads.rho(component.center());
    let first = loads.count(1);
    let lower_bound = component.edge_nodes().any(|v| loads.count(v) != first);
    Ok(ComponentLoad {
        rho_r,
        rho_m,
        p_t: rho_r + rho_m,
        lower_bound,
    })
}

/// Maximum and saturated throughput of an arbitrary component.
pub fn max_throughput_for(
    component: &TopologyComponent,
    nc: bool,
    mpr: MprConfig,
    traffic: TrafficType,
) -> Result<ThroughputPoint> {
    mpr.validate()?;
    let m = mpr.effective_m();
    let e = edge_slots(component, m);
    let (c, extrapolated) = center_slots(component, nc, m, traffic)?;
    let p_star = int(component.n()) / int(e + c);
    // Node fairness grants the center one slot per edge phase, and a
    // saturated center is busy with its own packets.
    let s_sat = int(1) / int(e + 1);
    Ok(ThroughputPoint {
        p_star,
        s_max: p_star,
        s_sat,
        extrapolated,
    })
}

/// [`max_throughput_for`] on the canonical 5-node component.
pub fn max_throughput(
    kind: ComponentKind,
    nc: bool,
    m: usize,
    traffic: TrafficType,
    cap2: bool,
) -> Result<ThroughputPoint> {
    let component = TopologyComponent::build(kind, 5, 2)?;
    max_throughput_for(&component, nc, MprConfig { m, cap2 }, traffic)
}

pub fn gain_decomposition(kind: ComponentKind, m: usize, traffic: TrafficType) -> Result<GainDecomposition> {
    let s = |nc, m| max_throughput(kind, nc, m, traffic, false).map(|p| p.s_max);
    let routing = s(false, 1)?;
    let nc_only = s(true, 1)?;
    let mpr_only = s(false, m)?;
    let nc_plus_mpr = s(true, m)?;
    Ok(GainDecomposition {
        routing,
        nc_only,
        mpr_only,
        nc_plus_mpr,
        additive_prediction: routing + (nc_only - routing) + (mpr_only - routing),
    })
}

/// `s_max - s_sat` under node-fair access.
pub fn saturation_gap(
    kind: ComponentKind,
    nc: bool,
    m: usize,
    traffic: TrafficType,
    cap2: bool,
) -> Result<Rational> {
    let p = max_throughput(kind, nc, m, traffic, cap2)?;
    Ok(p.s_max - p.s_sat)
}
