mod plot;
mod spec;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ncmac::{
    flow_fair_shares, gain_decomposition, iteration_loads, max_throughput_for, run_traced, sweep,
    ComponentKind, FlowFairFormula, MacPolicy, MprConfig, Rational, SimConfig, SlotRecord,
    SweepCurve, TopologyComponent, TrafficType,
};

use spec::{ExperimentSpec, Opts};

#[derive(Parser, Debug)]
#[command(name = "ncmac", version, about = "Throughput of coded relay components under MAC fairness and multi-packet reception")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo throughput sweep over an offered-load grid.
    Sweep {
        #[command(flatten)]
        opts: Opts,
    },
    /// Analytic maxima, saturation values and flow-fair shares.
    Maxima {
        /// Add flow-fair slot shares (literal and generalized).
        #[arg(long)]
        shares: bool,
        /// Tabulate every kind, coding, m in {1,2,4} and traffic combination.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        opts: Opts,
    },
    /// Preset families of curves.
    Figure {
        name: FigureName,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FigureName {
    CrossNodefair,
    XNodefair,
    CrossFlowfair,
    XFlowfair,
    GainVsM,
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep { opts } => cmd_sweep(opts),
        Command::Maxima { shares, all, opts } => cmd_maxima(opts, *shares, *all),
        Command::Figure { name, opts } => cmd_figure(*name, opts),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn require_seed(spec: &ExperimentSpec) -> Result<()> {
    if !spec.seed_given {
        bail!("a master seed is required: pass --seed or set seed= in the config file");
    }
    Ok(())
}

fn write_plot(spec: &ExperimentSpec, key: &str, x: &str, xlabel: &str) -> Result<()> {
    if let Some(script) = &spec.plot_script {
        let csv = spec
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "out.csv".to_string());
        emit(Some(script), &plot::script(&csv, key, x, xlabel))?;
    }
    Ok(())
}

fn write_trace(spec: &ExperimentSpec, configs: &[(String, SimConfig)]) -> Result<()> {
    let Some(path) = &spec.trace else {
        return Ok(());
    };
    let mut out = format!("config_id,P,{}\n", SlotRecord::CSV_HEADER);
    for (id, cfg) in configs {
        for &p in &spec.grid {
            let loads = iteration_loads(cfg, p, 0)?;
            let (_, records) = run_traced(cfg, &loads)?;
            for r in records {
                let _ = writeln!(out, "{id},{p},{}", r.csv_row());
            }
        }
    }
    emit(Some(path), &out)
}

fn cmd_sweep(opts: &Opts) -> Result<()> {
    let spec = opts.resolve()?;
    require_seed(&spec)?;
    let curve = sweep(&spec.sim, &spec.grid)?;
    emit(spec.out.as_deref(), &curve.to_csv(&spec.sim.id()))?;
    write_trace(&spec, &[(spec.sim.id(), spec.sim.clone())])?;
    write_plot(&spec, "config_id", "P", "Total offered load P")
}

fn frac(r: Rational) -> String {
    format!("{r}")
}

fn dec(r: Rational) -> String {
    format!("{:.6}", *r.numer() as f64 / *r.denom() as f64)
}

const UNSUPPORTED: &str = "unsupported";

fn maxima_row(component: &TopologyComponent, nc: bool, mpr: MprConfig, traffic: TrafficType, shares: bool) -> String {
    let mut row = format!(
        "{},{},{},{},{},{}",
        component.kind(),
        component.n(),
        nc,
        mpr.m,
        mpr.cap2,
        traffic
    );
    match max_throughput_for(component, nc, mpr, traffic) {
        Ok(pt) => {
            for v in [pt.p_star, pt.s_max, pt.s_sat] {
                let _ = write!(row, ",{},{}", frac(v), dec(v));
            }
            row.push_str(if pt.extrapolated { ",extrapolated" } else { "," });
        }
        Err(e) => {
            for _ in 0..6 {
                let _ = write!(row, ",{UNSUPPORTED}");
            }
            let _ = write!(row, ",{}", e.to_string().replace(',', ";"));
        }
    }
    if shares {
        for formula in [FlowFairFormula::Literal, FlowFairFormula::Generalized] {
            match flow_fair_shares(component, nc, mpr, traffic, formula) {
                Ok(s) => {
                    let _ = write!(row, ",{},{},{},{}", frac(s.edge), dec(s.edge), frac(s.center), dec(s.center));
                }
                Err(_) => {
                    for _ in 0..4 {
                        let _ = write!(row, ",{UNSUPPORTED}");
                    }
                }
            }
        }
    }
    row.push('\n');
    row
}

fn cmd_maxima(opts: &Opts, shares: bool, all: bool) -> Result<()> {
    let spec = opts.resolve()?;
    let sim = &spec.sim;
    let mut out = String::from(
        "kind,n,nc,m,cap2,traffic,p_star,p_star_dec,s_max,s_max_dec,s_sat,s_sat_dec,note",
    );
    if shares {
        out.push_str(
            ",literal_s_edge,literal_s_edge_dec,literal_s_center,literal_s_center_dec,\
             generalized_s_edge,generalized_s_edge_dec,generalized_s_center,generalized_s_center_dec",
        );
    }
    out.push('\n');
    if all {
        for kind in [ComponentKind::Cross, ComponentKind::X] {
            let component = TopologyComponent::build(kind, sim.n, sim.x1)?;
            for nc in [false, true] {
                for m in [1, 2, 4] {
                    for traffic in [TrafficType::Unicast, TrafficType::Broadcast] {
                        let mpr = MprConfig { m, cap2: sim.mpr.cap2 };
                        out.push_str(&maxima_row(&component, nc, mpr, traffic, shares));
                    }
                }
            }
        }
    } else {
        out.push_str(&maxima_row(&sim.component()?, sim.nc, sim.mpr, sim.traffic, shares));
    }
    emit(spec.out.as_deref(), &out)
}

const FIGURE_SERIES: [(&str, bool, usize); 6] = [
    ("routing", false, 1),
    ("nc", true, 1),
    ("mpr2", false, 2),
    ("mpr4", false, 4),
    ("nc+mpr2", true, 2),
    ("nc+mpr4", true, 4),
];

fn cmd_figure(name: FigureName, opts: &Opts) -> Result<()> {
    let spec = opts.resolve()?;
    if name == FigureName::GainVsM {
        return gain_vs_m(&spec, opts.topology.unwrap_or(ComponentKind::X));
    }
    require_seed(&spec)?;
    let (kind, flow_fair) = match name {
        FigureName::CrossNodefair => (ComponentKind::Cross, false),
        FigureName::XNodefair => (ComponentKind::X, false),
        FigureName::CrossFlowfair => (ComponentKind::Cross, true),
        FigureName::XFlowfair => (ComponentKind::X, true),
        FigureName::GainVsM => unreachable!(),
    };
    let mac = match (flow_fair, spec.sim.mac) {
        (false, _) => MacPolicy::NodeFair,
        (true, m @ MacPolicy::FlowFair(_)) => m,
        (true, MacPolicy::NodeFair) => MacPolicy::FlowFair(FlowFairFormula::Generalized),
    };
    let mut out = format!("series,{}", SweepCurve::CSV_HEADER);
    out.push('\n');
    let mut configs = Vec::new();
    for (series, nc, m) in FIGURE_SERIES {
        let cfg = SimConfig {
            kind,
            nc,
            mpr: MprConfig { m, cap2: spec.sim.mpr.cap2 },
            mac,
            ..spec.sim.clone()
        };
        let curve = sweep(&cfg, &spec.grid)?;
        for line in curve.csv_rows(&cfg.id()).lines() {
            let _ = writeln!(out, "{series},{line}");
        }
        configs.push((series.to_string(), cfg));
    }
    emit(spec.out.as_deref(), &out)?;
    write_trace(&spec, &configs)?;
    write_plot(&spec, "series", "P", "Total offered load P")
}

fn gain_vs_m(spec: &ExperimentSpec, kind: ComponentKind) -> Result<()> {
    let mut out = String::from("series,m,value,exact\n");
    for m in [1, 2, 4] {
        let g = gain_decomposition(kind, m, spec.sim.traffic)?;
        for (series, v) in [
            ("routing", g.routing),
            ("nc_only", g.nc_only),
            ("mpr_only", g.mpr_only),
            ("nc_plus_mpr", g.nc_plus_mpr),
            ("additive_prediction", g.additive_prediction),
        ] {
            let _ = writeln!(out, "{series},{m},{},{}", dec(v), frac(v));
        }
    }
    emit(spec.out.as_deref(), &out)?;
    if let Some(script) = &spec.plot_script {
        let csv = spec
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "out.csv".to_string());
        emit(Some(script), &plot::gain_script(&csv))?;
    }
    Ok(())
}
