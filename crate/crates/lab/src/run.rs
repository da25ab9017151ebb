//! Trial runners and the parallel experiment driver.

use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use unitary_lab_core::bootstrap::{bootstrap, TomographyBase};
use unitary_lab_core::eigenphase::{estimate_eigenphases, EigenphaseOracle};
use unitary_lab_core::hard_instances::{
    build_net, frac_reflection, gadget_apply, identify_via_powering, identification_alpha, net_from_candidates,
    sample_reflection, GadgetSign, ReflectionNet,
};
use unitary_lab_core::linalg::{basis_vector, eigenphases, haar_random, haar_state, pauli_x, pauli_y, pauli_z, C64};
use unitary_lab_core::metrics::{channel_distances, hausdorff_phase_dist, PhaseSet};
use unitary_lab_core::oracle::{QueryOracle, StatePreparation};
use unitary_lab_core::process_tomography::{base_estimate, EffectiveTarget};
use unitary_lab_core::state_tomography::{estimate_state, infidelity};
use unitary_lab_core::{UnitaryMatrix, CVector};

use crate::config::{Constants, Experiment, ExperimentConfig};
use crate::record::{write_csv, ExperimentRecord};
use crate::summary::summarize;

/// Gadget identity tolerance for `gadget-verify` trials.
pub const GADGET_TOL: f64 = 1e-10;

/// Net separation and size used by `identify` above d=2.
pub const NET_SEPARATION: f64 = 0.25;
pub const NET_SIZE: usize = 20;
pub const NET_ATTEMPTS: u64 = 10_000;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed from the master seed and the trial coordinates.
pub fn trial_seed(master: u64, d: usize, eps: f64, trial: u64) -> u64 {
    let mut h = splitmix(master);
    for x in [d as u64, eps.to_bits(), trial] {
        h = splitmix(h ^ x);
    }
    h
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Outcome {
    pub queries: u64,
    pub dist_diamond: Option<f64>,
    pub dist_lie: Option<f64>,
    pub pudist: Option<f64>,
    pub ent_infid: Option<f64>,
    pub success: bool,
}

impl Outcome {
    fn failed(queries: u64) -> Self {
        Self { queries, ..Default::default() }
    }

    fn unitary(queries: u64, truth: &UnitaryMatrix, est: &UnitaryMatrix, success: impl Fn(f64, f64) -> bool) -> Self {
        match channel_distances(truth, est) {
            Ok(c) => Self {
                queries,
                dist_diamond: Some(c.diamond_norm),
                dist_lie: Some(c.lie_dist),
                pudist: Some(c.pudist),
                ent_infid: Some(c.ent_infidelity),
                success: success(c.pudist, c.lie_dist),
            },
            Err(_) => Self::failed(queries),
        }
    }

    /// Pure-state analogues: trace norm, Fubini-Study angle, phase-minimised
    /// Euclidean distance and infidelity.
    fn state(queries: u64, truth: &CVector, est: &CVector, eps0: f64) -> Self {
        let infid = infidelity(truth, est);
        let fid = (1.0 - infid).clamp(0.0, 1.0);
        Self {
            queries,
            dist_diamond: Some(2.0 * infid.sqrt()),
            dist_lie: Some(fid.sqrt().acos()),
            pudist: Some((2.0 - 2.0 * fid.sqrt()).max(0.0).sqrt()),
            ent_infid: Some(infid),
            success: infid <= eps0,
        }
    }
}

pub fn pauli_net() -> ReflectionNet {
    net_from_candidates(&[pauli_x(), pauli_y(), pauli_z()], NET_SEPARATION).expect("Pauli operators are reflections")
}

/// Runs one trial; algorithm errors become unsuccessful outcomes.
pub fn run_trial(experiment: Experiment, d: usize, eps: f64, eta: f64, seed: u64, constants: &Constants) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match experiment {
        Experiment::StateTomo => {
            let z = haar_random(d, &mut rng);
            let truth = z.apply(&basis_vector(d, 0));
            let mut oracle = QueryOracle::new(z, rng.random());
            match estimate_state(&StatePreparation::new(d, 1), &mut oracle, eps, &constants.state(), &mut rng) {
                Ok(est) => Outcome::state(oracle.queries_used(), &truth, &est.vector, eps),
                Err(_) => Outcome::failed(oracle.queries_used()),
            }
        }
        Experiment::BaseTomo => {
            let z = haar_random(d, &mut rng);
            let mut oracle = QueryOracle::new(z.clone(), rng.random());
            let target = EffectiveTarget::direct(d);
            match base_estimate(&mut oracle, &target, eps, eta, &constants.base(), &mut rng) {
                Ok(est) => Outcome::unitary(oracle.queries_used(), &z, &est.estimate, |p, _| p <= eps),
                Err(_) => Outcome::failed(oracle.queries_used()),
            }
        }
        Experiment::Bootstrap => {
            let z = haar_random(d, &mut rng);
            let mut oracle = QueryOracle::new(z.clone(), rng.random());
            let mut base = TomographyBase::new(constants.base());
            match bootstrap(&mut oracle, eps, eta, &mut base, &mut rng) {
                Ok((est, _)) => Outcome::unitary(oracle.queries_used(), &z, &est, |_, l| l <= eps),
                Err(_) => Outcome::failed(oracle.queries_used()),
            }
        }
        Experiment::Eigenphase => {
            let z = haar_random(d, &mut rng);
            let mut run = || -> unitary_lab_core::Result<(u64, f64)> {
                let truth = PhaseSet::new(eigenphases(&z)?);
                let mut oracle = EigenphaseOracle::new(&z, rng.random())?;
                let est = estimate_eigenphases(&mut oracle, eps, &constants.eigenphase())?;
                Ok((oracle.queries_used(), hausdorff_phase_dist(&truth, &est.phases)?))
            };
            match run() {
                Ok((queries, dh)) => Outcome { queries, dist_lie: Some(dh), success: dh <= eps, ..Default::default() },
                Err(_) => Outcome::failed(0),
            }
        }
        Experiment::Identify => {
            let net = if d == 2 {
                pauli_net()
            } else {
                match build_net(d, NET_SEPARATION, NET_SIZE, NET_ATTEMPTS, &mut rng) {
                    Ok(net) => net,
                    Err(_) => return Outcome::failed(0),
                }
            };
            let hidden = rng.random_range(0..net.elements.len());
            let z = match identification_alpha(eps).and_then(|a| frac_reflection(&net.elements[hidden], a)) {
                Ok(z) => z,
                Err(_) => return Outcome::failed(0),
            };
            let mut oracle = QueryOracle::new(z.clone(), rng.random());
            let mut base = TomographyBase::new(constants.base());
            match identify_via_powering(&mut oracle, &net, eps, eta, &mut base, &mut rng) {
                Ok(id) => Outcome::unitary(oracle.queries_used(), &z, &id.estimate, |_, _| id.nearest.index == hidden),
                Err(_) => Outcome::failed(oracle.queries_used()),
            }
        }
        Experiment::GadgetVerify => {
            let alpha = 0.5 * (1.0 - rng.random::<f64>());
            let sign = if rng.random::<bool>() { GadgetSign::Plus } else { GadgetSign::Minus };
            let run = |rng: &mut ChaCha20Rng| -> unitary_lab_core::Result<bool> {
                let r = sample_reflection(d, rng)?;
                let psi = haar_state(d, rng);
                let g = gadget_apply(&r, alpha, sign, &psi)?;
                let want = frac_reflection(&r, sign.value() * alpha)?.apply(&psi) * g.nu;
                let amplitude_ok = g.nu.norm() >= (-alpha * std::f64::consts::PI / 2.0).exp() - GADGET_TOL;
                Ok((g.branch - want).norm() <= GADGET_TOL && amplitude_ok && g.nu != C64::new(0.0, 0.0))
            };
            Outcome { queries: 1, success: run(&mut rng).unwrap_or(false), ..Default::default() }
        }
    }
}

fn record(config: &ExperimentConfig, d: usize, eps: f64, trial: u64) -> ExperimentRecord {
    let seed = trial_seed(config.seed, d, eps, trial);
    let start = Instant::now();
    let o = run_trial(config.experiment, d, eps, config.eta, seed, &config.constants);
    ExperimentRecord {
        experiment: config.experiment.name().to_string(),
        d,
        eps,
        eta: config.eta,
        seed,
        queries: o.queries,
        dist_diamond: o.dist_diamond,
        dist_lie: o.dist_lie,
        pudist: o.pudist,
        ent_infid: o.ent_infid,
        success: o.success,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}

/// All trials of the config, in (d, eps, trial) order of the config lists.
pub fn run_trials(config: &ExperimentConfig) -> anyhow::Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &d in &config.dims {
        for &eps in &config.eps {
            for trial in 0..config.trials {
                jobs.push((d, eps, trial));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    // collect on an indexed parallel iterator preserves job order
    Ok(pool.install(|| jobs.par_iter().map(|&(d, eps, trial)| record(config, d, eps, trial)).collect()))
}

/// Runs the experiment and writes `results.csv` and `summary.json` under `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<Vec<ExperimentRecord>> {
    let records = run_trials(config)?;
    write_outputs(&config.out, &records)?;
    Ok(records)
}

pub fn write_outputs(dir: &Path, records: &[ExperimentRecord]) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_csv(&dir.join("results.csv"), records)?;
    let summary = summarize(records)?;
    let path = dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
