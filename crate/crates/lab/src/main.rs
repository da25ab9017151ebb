//! `unitary-lab` command-line harness.
//!
//!   unitary-lab bootstrap --dim 2 --eps 0.1,0.05,0.02 --trials 20 --out out/boot
//!   unitary-lab scaling --config scaling.toml
//!   unitary-lab metrics-selftest --dim 2,3,4,8 --trials 1000

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use unitary_lab::run::{pauli_net, write_outputs, NET_ATTEMPTS, NET_SEPARATION, NET_SIZE};
use unitary_lab::selftest::metric_chains;
use unitary_lab::{run_experiment, run_trials, summarize, Experiment, ExperimentConfig};
use unitary_lab_core::hard_instances::build_net;

#[derive(Parser)]
#[command(name = "unitary-lab", about = "Seeded experiments for query-optimal unitary estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the distance inequality chains on Haar-random pairs.
    MetricsSelftest(Common),
    /// Pure-state tomography of the first column; eps is the infidelity target.
    StateTomo(Common),
    /// Constant-repetition tomography of a Haar unitary; success means pudist <= eps.
    BaseTomo(Common),
    /// Heisenberg-limited bootstrap with the tomography base; success means lie distance <= eps.
    Bootstrap(Common),
    /// Greedy packing of reflections.
    NetBuild {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = NET_SEPARATION)]
        separation: f64,
        #[arg(long, default_value_t = NET_SIZE)]
        size: usize,
        #[arg(long, default_value_t = NET_ATTEMPTS)]
        attempts: u64,
    },
    /// Postselected fractional-query gadget against its closed form.
    GadgetVerify(Common),
    /// Eigenphases up to a global shift; success means Hausdorff distance <= eps.
    Eigenphase(Common),
    /// Identify a hidden net reflection from a fractional power of it.
    Identify(Common),
    /// Bootstrap and base tomography on the same grid, with fitted slopes.
    Scaling(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

struct Defaults {
    dims: &'static [usize],
    eps: &'static [f64],
    eta: f64,
    trials: u64,
}

impl Common {
    fn resolve(&self, experiment: Experiment, name: &str, defaults: Defaults) -> anyhow::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let c = ExperimentConfig::load(path)?;
                if c.experiment != experiment {
                    bail!("{} configures {}, not {}", path.display(), c.experiment.name(), name);
                }
                c
            }
            None => {
                let mut c = ExperimentConfig::new(
                    experiment,
                    defaults.dims.to_vec(),
                    defaults.eps.to_vec(),
                    defaults.eta,
                    defaults.trials,
                    0,
                );
                c.out = PathBuf::from("out").join(name);
                c.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
                c
            }
        };
        if let Some(v) = &self.dim {
            config.dims = v.clone();
        }
        if let Some(v) = &self.eps {
            config.eps = v.clone();
        }
        if let Some(v) = self.eta {
            config.eta = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        if let Some(v) = self.workers {
            config.workers = v;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run_and_report(config: &ExperimentConfig) -> anyhow::Result<()> {
    let records = run_experiment(config)?;
    print_summary(&records)?;
    println!("wrote {}", config.out.display());
    Ok(())
}

fn print_summary(records: &[unitary_lab::ExperimentRecord]) -> anyhow::Result<()> {
    let summary = summarize(records)?;
    for c in &summary.cells {
        println!(
            "{:<14} d={:<3} eps={:<8} success={}/{} median_queries={:.4e}",
            c.experiment, c.d, c.eps, c.successes, c.trials, c.median_queries
        );
    }
    for s in &summary.slopes {
        match s.slope {
            Some(v) => println!("{:<14} d={:<3} slope={v:.3}", s.experiment, s.d),
            None => println!("{:<14} d={:<3} slope=n/a ({})", s.experiment, s.d, s.note.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(dir: &std::path::Path, file: &str, value: &T) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(file);
    std::fs::write(&path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let small = Defaults { dims: &[2], eps: &[0.1], eta: 0.1, trials: 10 };
    match cli.command {
        Command::MetricsSelftest(common) => {
            let defaults = Defaults { dims: &[2, 3, 4, 8], eps: &[0.1], eta: 0.1, trials: 1000 };
            let config = common.resolve(Experiment::Bootstrap, "metrics-selftest", defaults)?;
            let mut reports = Vec::new();
            for (i, &d) in config.dims.iter().enumerate() {
                let r = metric_chains(d, config.trials as usize, config.seed.wrapping_add(i as u64))?;
                println!("d={d:<3} pairs={} worst_violation={:.3e} {}", r.pairs, r.worst_violation, if r.passed { "PASS" } else { "FAIL" });
                reports.push(r);
            }
            write_json(&config.out, "metrics_selftest.json", &reports)?;
            if reports.iter().any(|r| !r.passed) {
                bail!("metric chain violated");
            }
        }
        Command::StateTomo(common) => {
            let defaults = Defaults { dims: &[4], eps: &[0.05], eta: 0.1, trials: 100 };
            run_and_report(&common.resolve(Experiment::StateTomo, "state-tomo", defaults)?)?;
        }
        Command::BaseTomo(common) => {
            let defaults = Defaults { dims: &[2], eps: &[0.1, 0.05], eta: 1.0 / 3.0, trials: 20 };
            run_and_report(&common.resolve(Experiment::BaseTomo, "base-tomo", defaults)?)?;
        }
        Command::Bootstrap(common) => {
            run_and_report(&common.resolve(Experiment::Bootstrap, "bootstrap", small)?)?;
        }
        Command::NetBuild { common, separation, size, attempts } => {
            let defaults = Defaults { dims: &[4], eps: &[0.1], eta: 0.1, trials: 1 };
            let config = common.resolve(Experiment::Identify, "net-build", defaults)?;
            let mut reports = Vec::new();
            for &d in &config.dims {
                let net = if d == 2 && size <= 3 {
                    pauli_net()
                } else {
                    build_net(d, separation, size, attempts, &mut ChaCha20Rng::seed_from_u64(config.seed))?
                };
                let min = net.min_pairwise_diamond()?;
                println!(
                    "d={d:<3} elements={} attempts={} complete={} min_pairwise_diamond={}",
                    net.elements.len(),
                    net.attempts,
                    net.complete,
                    min.map_or("n/a".to_string(), |m| format!("{m:.6}"))
                );
                reports.push(serde_json::json!({
                    "d": d,
                    "separation": separation,
                    "elements": net.elements.len(),
                    "attempts": net.attempts,
                    "complete": net.complete,
                    "min_pairwise_diamond": min,
                }));
            }
            write_json(&config.out, "net.json", &reports)?;
        }
        Command::GadgetVerify(common) => {
            let defaults = Defaults { dims: &[2, 3, 4], eps: &[0.1], eta: 0.1, trials: 200 };
            run_and_report(&common.resolve(Experiment::GadgetVerify, "gadget-verify", defaults)?)?;
        }
        Command::Eigenphase(common) => {
            let defaults = Defaults { dims: &[4], eps: &[0.05], eta: 0.1, trials: 100 };
            run_and_report(&common.resolve(Experiment::Eigenphase, "eigenphase", defaults)?)?;
        }
        Command::Identify(common) => {
            let defaults = Defaults { dims: &[2], eps: &[0.05], eta: 0.1, trials: 50 };
            run_and_report(&common.resolve(Experiment::Identify, "identify", defaults)?)?;
        }
        Command::Scaling(common) => {
            let defaults = Defaults { dims: &[2], eps: &[0.1, 0.05, 0.02, 0.01], eta: 0.1, trials: 30 };
            let boot = common.resolve(Experiment::Bootstrap, "scaling", defaults)?;
            let base = ExperimentConfig { experiment: Experiment::BaseTomo, ..boot.clone() };
            let mut records = run_trials(&boot)?;
            records.extend(run_trials(&base)?);
            write_outputs(&boot.out, &records)?;
            print_summary(&records)?;
            println!("wrote {}", boot.out.display());
        }
    }
    Ok(())
}
