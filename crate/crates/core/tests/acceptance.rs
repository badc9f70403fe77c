//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned below.

mod support;

use ncmac::{
    draw_loads, flow_fair_shares, gain_decomposition, max_throughput, monte_carlo, p_grid, run,
    sweep, symmetric_loads, ComponentKind, FlowFairFormula, MacPolicy, MprConfig, Rational,
    SimConfig, TopologyComponent, TrafficType,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ComponentKind::{Cross, X};
use TrafficType::{Broadcast, Unicast};

const NONMONO_FIXED_TOL: f64 = 0.01;
const NONMONO_DROP_TOL: f64 = 0.02;
const NONMONO_MC_PEAK_TOL: f64 = 0.03;
const NONMONO_MC_ITERS: u32 = 1000;
const MONO_NOISE_TOL: f64 = 0.01;
const MONO_TAIL_TOL: f64 = 0.02;
const MONO_ITERS: u32 = 100;
const MONO_HORIZON: u32 = 420;
const SIXFOLD_REL_TOL: f64 = 0.05;
const SIXFOLD_ITERS: u32 = 200;
const LOADGEN_DRAWS: usize = 10_000;
const LOADGEN_VAR_REL_TOL: f64 = 0.15;
const ORACLE_CASES: usize = 200;
const DETERMINISM_ITERS: u32 = 50;

struct Anchor {
    label: &'static str,
    kind: ComponentKind,
    nc: bool,
    m: usize,
    traffic: TrafficType,
    cap2: bool,
    s_max: (i64, i64),
}

const fn anchor(
    label: &'static str,
    kind: ComponentKind,
    nc: bool,
    m: usize,
    traffic: TrafficType,
    cap2: bool,
    s_max: (i64, i64),
) -> Anchor {
    Anchor { label, kind, nc, m, traffic, cap2, s_max }
}

const ANCHORS: [Anchor; 12] = [
    anchor("cross routing", Cross, false, 1, Unicast, false, (5, 9)),
    anchor("cross nc", Cross, true, 1, Unicast, false, (5, 6)),
    anchor("cross m2", Cross, false, 2, Unicast, false, (5, 7)),
    anchor("cross m4", Cross, false, 4, Unicast, false, (5, 6)),
    anchor("cross nc+m2", Cross, true, 2, Unicast, false, (5, 4)),
    anchor("cross nc+m4 unicast", Cross, true, 4, Unicast, false, (5, 4)),
    anchor("cross nc+m4 broadcast", Cross, true, 4, Broadcast, false, (1, 1)),
    anchor("cross nc+m4 broadcast cap2", Cross, true, 4, Broadcast, true, (5, 4)),
    anchor("x nc", X, true, 1, Unicast, false, (5, 7)),
    anchor("x nc+m2", X, true, 2, Unicast, false, (1, 1)),
    anchor("x nc+m4 unicast", X, true, 4, Unicast, false, (5, 4)),
    anchor("x nc+m4 broadcast", X, true, 4, Broadcast, false, (1, 1)),
];

fn config(a: &Anchor, mac: MacPolicy) -> SimConfig {
    SimConfig {
        kind: a.kind,
        nc: a.nc,
        mpr: MprConfig { m: a.m, cap2: a.cap2 },
        traffic: a.traffic,
        mac,
        ..SimConfig::default()
    }
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

struct Gate {
    failed: usize,
}

impl Gate {
    fn report(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {detail}");
        if !ok {
            self.failed += 1;
        }
    }
}

fn analytic_maxima() -> (bool, String) {
    for a in &ANCHORS {
        let want = Rational::new(a.s_max.0, a.s_max.1);
        match max_throughput(a.kind, a.nc, a.m, a.traffic, a.cap2) {
            Ok(pt) if pt.s_max == want => {}
            Ok(pt) => return (false, format!("{}: got {} want {want}", a.label, pt.s_max)),
            Err(e) => return (false, format!("{}: {e}", a.label)),
        }
    }
    (true, format!("{} stars exact", ANCHORS.len()))
}

fn operating_point() -> (bool, String) {
    for a in &ANCHORS {
        let pt = max_throughput(a.kind, a.nc, a.m, a.traffic, a.cap2).unwrap();
        // k_i = G * p_star / 5 = 2 * numer.
        let g = 10 * *pt.p_star.denom() as u32;
        let cfg = SimConfig { g, horizon: g, ..config(a, MacPolicy::NodeFair) };
        let loads = symmetric_loads(pt.p_star, 5, g).unwrap();
        let s = run(&cfg, &loads).unwrap().s_exact();
        if s != pt.s_max {
            return (false, format!("{}: S = {s}, s_max = {}", a.label, pt.s_max));
        }
    }
    (true, "S = s_max exactly at P = p_star for all 12".into())
}

fn non_monotonic() -> (bool, String) {
    let routing = &ANCHORS[0];
    let base = config(routing, MacPolicy::NodeFair);
    let at = |p: Rational, g: u32| {
        let cfg = SimConfig { g, horizon: g, ..base.clone() };
        run(&cfg, &symmetric_loads(p, 5, g).unwrap()).unwrap().s_exact()
    };
    let peak = at(Rational::new(5, 9), 90);
    let tail = to_f64(at(Rational::from_integer(3), 100));
    let drop = to_f64(peak) - tail;
    let cfg = SimConfig { iterations: NONMONO_MC_ITERS, seed: 3, ..base };
    let curve = sweep(&cfg, &p_grid(0.05, 0.05, 3.0).unwrap()).unwrap();
    let mc_peak = curve.peak().unwrap();
    let ok = peak == Rational::new(5, 9)
        && (tail - 0.2).abs() <= NONMONO_FIXED_TOL
        && (drop - 16.0 / 45.0).abs() <= NONMONO_DROP_TOL
        && (mc_peak.mean - 5.0 / 9.0).abs() <= NONMONO_MC_PEAK_TOL;
    (
        ok,
        format!(
            "S(5/9) = {peak}, S(3) = {tail:.4}, drop = {drop:.4} (16/45 = {:.4}), MC peak {:.4} at P = {}",
            16.0 / 45.0,
            mc_peak.mean,
            mc_peak.p
        ),
    )
}

fn monotonic() -> (bool, String) {
    let grid = p_grid(0.05, 0.05, 3.0).unwrap();
    let mut worst_drop: f64 = 0.0;
    let mut worst_tail: f64 = 0.0;
    let mut bad = Vec::new();
    for a in &ANCHORS {
        let cfg = SimConfig {
            g: MONO_HORIZON,
            horizon: MONO_HORIZON,
            iterations: MONO_ITERS,
            seed: 4,
            ..config(a, MacPolicy::FlowFair(FlowFairFormula::Generalized))
        };
        let curve = sweep(&cfg, &grid).unwrap();
        let mut best: f64 = 0.0;
        let mut drop: f64 = 0.0;
        for pt in &curve.points {
            best = best.max(pt.mean);
            drop = drop.max(best - pt.mean);
        }
        let s_max = to_f64(Rational::new(a.s_max.0, a.s_max.1));
        let tail = (curve.points.last().unwrap().mean - s_max).abs();
        worst_drop = worst_drop.max(drop);
        worst_tail = worst_tail.max(tail);
        if drop > MONO_NOISE_TOL || tail > MONO_TAIL_TOL {
            bad.push(a.label);
        }
    }
    (
        bad.is_empty(),
        format!("max dip {worst_drop:.4}, max |tail - s_max| {worst_tail:.4}, failing {bad:?}"),
    )
}

fn literal_shares() -> (bool, String) {
    let mut checked = 0;
    for n in [3usize, 5, 9] {
        for kind in [Cross, X] {
            let c = TopologyComponent::build(kind, n, (n - 1) / 2).unwrap();
            let half = (n - 1) / 2;
            for m in [1usize, 2, 4] {
                for traffic in [Unicast, Broadcast] {
                    for nc in [false, true] {
                        let e = (n - 1).div_ceil(m) as i64;
                        let center = match (nc, kind) {
                            (false, _) => n as i64,
                            (true, Cross) => m as i64,
                            (true, X) if traffic == Broadcast && m == 4 => half as i64 + 2,
                            (true, X) => half as i64 + 1,
                        };
                        let want = (Rational::new(1, e + center), Rational::new(center, e + center));
                        let got = flow_fair_shares(&c, nc, MprConfig::new(m), traffic, FlowFairFormula::Literal)
                            .map(|s| (s.edge, s.center));
                        if got != Ok(want) {
                            return (false, format!("{kind} n={n} m={m} {traffic} nc={nc}: {got:?} != {want:?}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    (true, format!("{checked} allocations exact"))
}

fn super_additive() -> (bool, String) {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [2, 4] {
        let g = gain_decomposition(X, m, Unicast).unwrap();
        ok &= g.nc_plus_mpr > g.additive_prediction;
        parts.push(format!("m={m}: {} > {}", g.nc_plus_mpr, g.additive_prediction));
    }
    ok &= gain_decomposition(X, 2, Unicast).unwrap().additive_prediction == Rational::new(55, 63);
    (ok, parts.join(", "))
}

fn sixfold() -> (bool, String) {
    let routing = max_throughput(Cross, false, 1, Unicast, false).unwrap().s_sat;
    let combined = max_throughput(Cross, true, 2, Unicast, false).unwrap().s_max;
    let exact = combined / routing;
    let mut ok = exact == Rational::new(25, 4);
    let base = SimConfig { iterations: SIXFOLD_ITERS, seed: 7, ..config(&ANCHORS[0], MacPolicy::NodeFair) };
    let denom = monte_carlo(&base, 3.0).unwrap().mean;
    let mut parts = vec![format!("exact {exact}")];
    for a in [&ANCHORS[4], &ANCHORS[5]] {
        let cfg = SimConfig {
            iterations: SIXFOLD_ITERS,
            seed: 7,
            ..config(a, MacPolicy::FlowFair(FlowFairFormula::Generalized))
        };
        let ratio = monte_carlo(&cfg, 3.0).unwrap().mean / denom;
        ok &= (ratio / 6.25 - 1.0).abs() <= SIXFOLD_REL_TOL;
        parts.push(format!("{} {ratio:.3}", a.label));
    }
    (ok, parts.join(", "))
}

fn load_generator() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sum = [0f64; 5];
    let mut sum_sq = [0f64; 5];
    let mut conserved = true;
    for _ in 0..LOADGEN_DRAWS {
        let l = draw_loads(1.0, 5, 100, &mut rng).unwrap();
        conserved &= l.total() == 100;
        for (i, &k) in l.counts().iter().enumerate() {
            sum[i] += k as f64;
            sum_sq[i] += (k as f64).powi(2);
        }
    }
    let n = LOADGEN_DRAWS as f64;
    // Var(k_i) = 100 * 1/5 * 4/5 = 16.
    let sigma_mean = (16.0 / n).sqrt();
    let mut ok = conserved;
    let mut worst_mean: f64 = 0.0;
    let mut worst_var: f64 = 0.0;
    for i in 0..5 {
        let mean = sum[i] / n;
        let var = (sum_sq[i] - n * mean * mean) / (n - 1.0);
        worst_mean = worst_mean.max((mean - 20.0).abs() / sigma_mean);
        worst_var = worst_var.max((var / 16.0 - 1.0).abs());
    }
    ok &= worst_mean <= 3.0 && worst_var <= LOADGEN_VAR_REL_TOL;
    (
        ok,
        format!("sum always 100: {conserved}, worst mean offset {worst_mean:.2} sigma, worst variance error {:.1}%", worst_var * 100.0),
    )
}

fn oracle() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..ORACLE_CASES {
        let inst = support::random_instance(&mut rng);
        let want = support::oracle::simulate(&inst);
        let (cfg, loads) = support::library_config(&inst);
        let got = run(&cfg, &loads).unwrap();
        if got.delivered != want.delivered || got.per_flow != want.per_flow.to_vec() {
            return (false, format!("case {case} {inst:?}: engine {} oracle {}", got.delivered, want.delivered));
        }
    }
    (true, format!("{ORACLE_CASES} instances identical"))
}

fn determinism() -> (bool, String) {
    let grid = p_grid(0.05, 0.05, 3.0).unwrap();
    let cfg = SimConfig { iterations: DETERMINISM_ITERS, seed: 10, ..config(&ANCHORS[1], MacPolicy::NodeFair) };
    let a = sweep(&cfg, &grid).unwrap().to_csv(&cfg.id());
    let b = sweep(&cfg, &grid).unwrap().to_csv(&cfg.id());
    (a == b, format!("{} bytes, identical: {}", a.len(), a == b))
}

fn main() {
    let mut gate = Gate { failed: 0 };
    let checks: [(u32, &str, fn() -> (bool, String)); 10] = [
        (1, "analytic maxima", analytic_maxima),
        (2, "simulation at operating point", operating_point),
        (3, "non-monotonic saturation (node-fair)", non_monotonic),
        (4, "monotonic saturation (flow-fair generalized)", monotonic),
        (5, "literal flow-fair shares", literal_shares),
        (6, "super-additive gains", super_additive),
        (7, "six-fold combined gain", sixfold),
        (8, "load generator distribution", load_generator),
        (9, "oracle equivalence", oracle),
        (10, "determinism", determinism),
    ];
    for (id, name, check) in checks {
        let (ok, detail) = check();
        gate.report(id, name, ok, detail);
    }
    if gate.failed > 0 {
        println!("{} criteria failed", gate.failed);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
