use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use aclab::config::ScenarioKind;
use aclab::plot::{write_series, Series};
use aclab::sweep::sweep_outcomes;
use aclab::{curvature_sweep, gap_probe, run_scenario, Check, Metric, ScenarioConfig, Thresholds};
use aclab_core::csf::{evolve, CsfState};
use aclab_core::diagnostics::{entropy, monotonicity_trace, SearchSpec};
use aclab_core::field::read_snapshot;
use aclab_core::geometry::{read_polyline_csv, write_polyline_csv};
use aclab_core::solver::Trajectory;

#[derive(Parser)]
#[command(name = "aclab", version, about = "Allen-Cahn nodal sets against curve shortening flow")]
struct Cli {
    /// Thresholds file replacing the built-in defaults.
    #[arg(long, global = true)]
    thresholds: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and its diagnostic battery.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = "aclab-out/simulate")]
        out: PathBuf,
        /// Also write every kept snapshot under <out>/trajectory.
        #[arg(long)]
        save_trajectory: bool,
    },
    /// Entropy of one snapshot.
    Entropy {
        snapshot: PathBuf,
        /// Defaults to the epsilon in a neighbouring trajectory.json.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Gaussian density trace along a saved trajectory.
    Monotonicity {
        trajectory_dir: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 2)]
        center: Vec<f64>,
        /// Final scale: the kernel at time t has scale s − t.
        #[arg(long)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Epsilon sweep with a log-log convergence-order fit.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.08,0.04,0.02")]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value = "csf-defect")]
        metric: Metric,
        #[arg(long, default_value = "aclab-out/converge")]
        out: PathBuf,
    },
    /// max|A|·r and entropy over shrinking circles of several radii.
    CurvatureSweep {
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.3,0.4,0.5")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, default_value = "aclab-out/curvature-sweep")]
        out: PathBuf,
    },
    /// Decay of a sinusoidal perturbation of the flat layer.
    GapProbe {
        config: PathBuf,
        #[arg(long, default_value = "aclab-out/gap-probe")]
        out: PathBuf,
    },
    /// Front-tracking curve shortening flow of a polyline.
    Csf {
        curve: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        dt: f64,
        #[arg(long, default_value_t = 0.05)]
        t_end: f64,
        /// Keep every n-th step in the trace.
        #[arg(long, default_value_t = 100)]
        record_every: usize,
        #[arg(long, default_value = "aclab-out/csf")]
        out: PathBuf,
    },
    /// Print the default config of a scenario.
    Preset {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Kind {
    Flat,
    Circle,
    PerturbedGraph,
    GrimReaper,
    GapProbe,
}

impl From<Kind> for ScenarioKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Flat => Self::Flat,
            Kind::Circle => Self::Circle,
            Kind::PerturbedGraph => Self::PerturbedGraph,
            Kind::GrimReaper => Self::GrimReaper,
            Kind::GapProbe => Self::GapProbe,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(checks) => {
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Vec<Check>> {
    let th = match &cli.thresholds {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?).with_context(|| format!("reading {}", p.display()))?,
        None => Thresholds::default(),
    };
    match cli.cmd {
        Cmd::Simulate { config, out, save_trajectory } => {
            let cfg = ScenarioConfig::load(&config)?;
            let o = run_scenario(&cfg, &th, Some(&out))?;
            if save_trajectory {
                o.trajectory.save(&out.join("trajectory"))?;
            }
            Ok(o.checks)
        }
        Cmd::Entropy { snapshot, eps } => {
            let (u, meta) = read_snapshot(&snapshot)?;
            let eps = match eps {
                Some(e) => e,
                None => trajectory_epsilon(&snapshot)?,
            };
            let r = entropy(&u, eps, &SearchSpec::default())?;
            println!("kind={} time={} eps={eps}", meta.kind, meta.time);
            println!("entropy={} y=({}, {}) s={} rho={} probes={} leaking={}", r.value, r.y[0], r.y[1], r.s, r.rho, r.probes, r.leaking_probes);
            Ok(vec![Check::report("entropy", r.value)])
        }
        Cmd::Monotonicity { trajectory_dir, center, scale, out } => {
            let traj = Trajectory::load(&trajectory_dir)?;
            let tr = monotonicity_trace(&traj, [center[0], center[1]], scale)?;
            let s = Series::new("monotonicity", "t", "gaussian_density", tr.times.iter().copied().zip(tr.values.iter().copied()).collect());
            match out {
                Some(p) => write_series(&p, &s)?,
                None => {
                    for (t, v) in &s.points {
                        println!("{t},{v}");
                    }
                }
            }
            Ok(vec![Check::at_most("monotonicity: max upward jump", tr.max_upward_jump, th.monotonicity_jump)])
        }
        Cmd::Converge { config, eps, metric, out } => {
            let base = ScenarioConfig::load(&config)?;
            let outcomes = sweep_outcomes(&base, &eps, &th, Some(&out))?;
            let table = aclab::sweep::table_from(&outcomes, metric)?;
            table.write_csv(&out.join(format!("convergence_{}.csv", metric.quantity())))?;
            std::fs::write(out.join("table.json"), serde_json::to_string_pretty(&table)?)?;
            for (e, v) in &table.rows {
                println!("eps={e} {}={v}", metric.quantity());
            }
            let name = format!("converge {}: fitted order (residual {})", metric.quantity(), table.fit_residual);
            let check = match metric {
                Metric::NodalHausdorff => Check::at_least(name, table.fitted_order, th.order_nodal),
                Metric::PhiSup => Check::at_least(name, table.fitted_order, th.order_phi),
                Metric::CsfDefect => Check::at_least(name, table.fitted_order, th.order_csf_defect),
                Metric::CurvatureSupError => Check::report(name, table.fitted_order),
            };
            let mut checks: Vec<Check> = outcomes.into_iter().flat_map(|o| o.checks).collect();
            checks.push(check);
            Ok(checks)
        }
        Cmd::CurvatureSweep { radii, eps, out } => {
            let st = curvature_sweep(&radii, eps, &th)?;
            st.write(&out, &th, "curvature-sweep")?;
            Ok(st.checks)
        }
        Cmd::GapProbe { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            Ok(gap_probe(&cfg, &th, Some(&out))?.checks)
        }
        Cmd::Csf { curve, dt, t_end, record_every, out } => {
            let (c, t0) = read_polyline_csv(&curve)?;
            let run = evolve(&CsfState::new(c, t0.unwrap_or(0.0)), dt, t_end, record_every)?;
            std::fs::create_dir_all(&out)?;
            let last = run.last().expect("initial state is kept");
            write_polyline_csv(&out.join("final.csv"), &last.curve, Some(last.time))?;
            let length = run.iter().map(|s| (s.time, s.curve.length())).collect();
            let area = run.iter().map(|s| (s.time, s.curve.signed_area())).collect();
            write_series(&out.join("plot_length.csv"), &Series::new("length", "t", "length", length))?;
            write_series(&out.join("plot_area.csv"), &Series::new("area", "t", "signed_area", area))?;
            let grew = run.windows(2).filter(|w| w[1].curve.length() > w[0].curve.length() + 1e-12).count();
            Ok(vec![
                Check::report("csf: final time", last.time),
                Check::at_most("csf: recorded length increases", grew as f64, 0.0),
            ])
        }
        Cmd::Preset { kind, eps } => {
            println!("{}", serde_json::to_string_pretty(&ScenarioConfig::preset(kind.into(), eps)?)?);
            Ok(Vec::new())
        }
    }
}

/// Epsilon recorded in the `trajectory.json` next to a snapshot file.
fn trajectory_epsilon(snapshot: &Path) -> anyhow::Result<f64> {
    let dir = snapshot.parent().unwrap_or(Path::new("."));
    let p = dir.join("trajectory.json");
    if !p.exists() {
        bail!("no --eps given and no trajectory.json beside {}", snapshot.display());
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p)?)?;
    v["config"]["epsilon"].as_f64().context("trajectory.json has no config.epsilon")
}
