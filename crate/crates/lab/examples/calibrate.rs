//! Calibration sweeps for the pinned tomography and phase-estimation constants.
//!
//! `cargo run --release -p unitary-lab --example calibrate`

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use unitary_lab_core::eigenphase::{estimate_eigenphases, phase_diff_estimate, EigenphaseConfig, EigenphaseOracle, PhaseDiffSampler};
use unitary_lab_core::linalg::{basis_vector, circular_distance, eigenphases, haar_random};
use unitary_lab_core::metrics::{hausdorff_phase_dist, PhaseSet};
use unitary_lab_core::oracle::{QueryOracle, StatePreparation};
use unitary_lab_core::state_tomography::{estimate_state, infidelity, StateTomographyConfig};

fn state_success_rate(c_state: f64, d: usize, eps0: f64, seeds: u64) -> f64 {
    let cfg = StateTomographyConfig { c_state, ..Default::default() };
    let mut ok = 0;
    for seed in 0..seeds {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let z = haar_random(d, &mut rng);
        let truth = z.apply(&basis_vector(d, 0));
        let mut oracle = QueryOracle::new(z, seed ^ 0x5eed);
        let est = estimate_state(&StatePreparation::new(d, 1), &mut oracle, eps0, &cfg, &mut rng).unwrap();
        if infidelity(&truth, &est.vector) <= eps0 {
            ok += 1;
        }
    }
    ok as f64 / seeds as f64
}

fn phase_diff_success_rate(c_pe: f64, seeds: u64) -> f64 {
    let cfg = EigenphaseConfig { c_pe, ..Default::default() };
    let delta = std::f64::consts::FRAC_PI_2;
    let ok = (0..seeds)
        .filter(|&seed| {
            let mut s = PhaseDiffSampler::new(delta, seed);
            circular_distance(phase_diff_estimate(&mut s, 0.01, 0.01, &cfg).unwrap(), delta) <= 0.01
        })
        .count();
    ok as f64 / seeds as f64
}

fn eigenphase_success_rate(c_cc: f64, d: usize, eps: f64, seeds: u64) -> f64 {
    let cfg = EigenphaseConfig { c_cc, ..Default::default() };
    let ok = (0..seeds)
        .filter(|&seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let z = haar_random(d, &mut rng);
            let truth = PhaseSet::new(eigenphases(&z).unwrap());
            let mut oracle = EigenphaseOracle::new(&z, seed ^ 0xe16).unwrap();
            let est = estimate_eigenphases(&mut oracle, eps, &cfg).unwrap();
            hausdorff_phase_dist(&est.phases, &truth).unwrap() <= eps
        })
        .count();
    ok as f64 / seeds as f64
}

fn main() {
    println!("phase difference, delta=pi/2, eps=0.01, eta=0.01, 500 seeds");
    for c in [0.25, 0.5, 1.0, 2.0, 4.0] {
        println!("  C_pe={c:<6} success={:.3}", phase_diff_success_rate(c, 500));
    }
    println!("eigenphases, d=4, eps=0.05, 200 seeds");
    for c in [0.5, 1.0, 2.0, 3.0, 4.0] {
        println!("  C_cc={c:<6} success={:.3}", eigenphase_success_rate(c, 4, 0.05, 200));
    }

    println!("state tomography, d=4, eps0=0.05, 200 seeds");
    let mut c = 0.25;
    loop {
        let rate = state_success_rate(c, 4, 0.05, 200);
        println!("  C_state={c:<6} success={rate:.3}");
        if rate >= 0.95 {
            break;
        }
        c *= 2.0;
    }
}
