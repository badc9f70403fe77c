pub mod oracle;

use ncmac::{ComponentKind, FlowFairFormula, LoadVector, MacPolicy, MprConfig, SimConfig, TrafficType};
use oracle::{Instance, Kind, Mac};
use rand::Rng;

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let mut k = [0u32; 5];
    for v in k.iter_mut() {
        *v = rng.random_range(0..=3);
    }
    Instance {
        kind: if rng.random_bool(0.5) { Kind::Cross } else { Kind::X },
        broadcast: rng.random_bool(0.5),
        nc: rng.random_bool(0.5),
        m: rng.random_range(1..=4),
        cap2: rng.random_bool(0.25),
        mac: [Mac::NodeFair, Mac::Literal, Mac::Generalized][rng.random_range(0..3)],
        k,
        h: rng.random_range(1..=30),
    }
}

pub fn library_config(inst: &Instance) -> (SimConfig, LoadVector) {
    let config = SimConfig {
        kind: match inst.kind {
            Kind::Cross => ComponentKind::Cross,
            Kind::X => ComponentKind::X,
        },
        traffic: if inst.broadcast { TrafficType::Broadcast } else { TrafficType::Unicast },
        nc: inst.nc,
        mpr: MprConfig { m: inst.m, cap2: inst.cap2 },
        mac: match inst.mac {
            Mac::NodeFair => MacPolicy::NodeFair,
            Mac::Literal => MacPolicy::FlowFair(FlowFairFormula::Literal),
            Mac::Generalized => MacPolicy::FlowFair(FlowFairFormula::Generalized),
        },
        horizon: inst.h,
        g: 100,
        iterations: 1,
        ..SimConfig::default()
    };
    let loads = LoadVector::from_counts(100, inst.k.to_vec()).expect("valid counts");
    (config, loads)
}
