//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Runs with `harness = false` so the lines are always printed:
//! `cargo test -p unitary-lab --test acceptance`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use unitary_lab::record::read_csv;
use unitary_lab::run::{pauli_net, run_trial};
use unitary_lab::{run_experiment, run_trials, summarize, trial_seed, Constants, Experiment, ExperimentConfig};
use unitary_lab_core::bootstrap::mocks::{MockBase, Perturbation};
use unitary_lab_core::bootstrap::{bootstrap, iteration_count, BASE_LIE_ACCURACY};
use unitary_lab_core::eigenphase::{estimate_eigenphases, EigenphaseConfig, EigenphaseOracle};
use unitary_lab_core::hard_instances::{
    build_net, gadget_amplitude, identification_bound, ln_ancilla_truncation_error, sample_reflection,
    truncation_cutoff, GadgetSign,
};
use unitary_lab_core::linalg::{
    basis_vector, cis, eigenphases, expm, frac_power, gaussian_c64, haar_random, haar_state, identity, op_norm,
    AntiHermitianGenerator, CMatrix, CVector, UnitaryMatrix, C64,
};
use unitary_lab_core::metrics::{
    diamond_norm, ent_infidelity, hausdorff_phase_dist, lie_dist, path_dist, pudist, PhaseSet,
};
use unitary_lab_core::oracle::{QueryOracle, SamplingMode, StatePreparation};
use unitary_lab_core::state_tomography::{build_l, estimate_state, infidelity, StateTomographyConfig};

// Pinned tolerances.
const INEQ_SLACK: f64 = 1e-9;
const LIE_SLACK: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-12;
const GADGET_TOL: f64 = 1e-10;
const SHARP_UPPER_REL: f64 = 0.01;
const METRIC_BUDGET: Duration = Duration::from_secs(30);
const LIE_BUDGET: Duration = Duration::from_secs(60);
const BASE_BUDGET: Duration = Duration::from_secs(600);
/// Eigenphase query constant: Q <= C (d/eps) ln^2 d. With C_cc=4, C_pe=2 and
/// the eps/2 schedule, d=4 and eps=0.05 spend 129030 queries, i.e. C ~ 840.
const EIG_QUERY_CONST: f64 = 1024.0;

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line { pass, detail: detail.into() }
}

fn random_generator<R: Rng>(d: usize, max_norm: f64, rng: &mut R) -> AntiHermitianGenerator {
    let h = CMatrix::from_fn(d, d, |_, _| gaussian_c64(rng));
    let x = AntiHermitianGenerator::from_hermitian(&h);
    let n = x.norm();
    x.scaled(max_norm * rng.random::<f64>() / n)
}

fn diff(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    op_norm(&(a.matrix() - b.matrix()))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Ordinary least squares slope of `ln y` on `ln(1/x)`.
fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (1.0 / p.0).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn metric_suite() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let mut worst = f64::NEG_INFINITY;
    for d in [2, 3, 4, 8] {
        for _ in 0..1000 {
            let (u, v) = (haar_random(d, &mut rng), haar_random(d, &mut rng));
            let pu = pudist(&u, &v).unwrap();
            let lie = lie_dist(&u, &v).unwrap();
            let dn = diamond_norm(&u, &v).unwrap();
            let f = ent_infidelity(&u, &v).unwrap();
            for gap in [
                pu - lie,
                lie - FRAC_PI_2 * pu,
                dn / 2.0 - pu,
                pu - dn,
                4.0 * f - dn * dn,
                dn * dn - 2.0 * d as f64 * f,
            ] {
                worst = worst.max(gap);
            }
        }
    }
    let flip = UnitaryMatrix::from_phases(&[0.0, PI]);
    let i2 = UnitaryMatrix::identity(2);
    let f = ent_infidelity(&i2, &flip).unwrap();
    let dn = diamond_norm(&i2, &flip).unwrap();
    let sharp_lower = (4.0 * f - 4.0).abs() <= EXACT_TOL && (dn * dn - 4.0).abs() <= EXACT_TOL;
    let mut worst_upper: f64 = 0.0;
    for d in [2, 3, 4, 8] {
        let sigma: f64 = 0.01;
        let mut phases = vec![0.0; d];
        phases[0] = sigma / 2.0;
        phases[1] = -sigma / 2.0;
        let v = UnitaryMatrix::from_phases(&phases);
        let id = UnitaryMatrix::identity(d);
        let ratio = diamond_norm(&id, &v).unwrap().powi(2) / ent_infidelity(&id, &v).unwrap();
        worst_upper = worst_upper.max((ratio / (2.0 * d as f64) - 1.0).abs());
    }
    let elapsed = start.elapsed();
    line(
        worst <= INEQ_SLACK && sharp_lower && worst_upper <= SHARP_UPPER_REL && elapsed < METRIC_BUDGET,
        format!(
            "4000 Haar pairs worst gap {worst:.2e} (<= {INEQ_SLACK:e}); d=2 flip 4F={:.12} |.|^2={:.12}; \
             upper sharpness rel dev {worst_upper:.2e} (<= {SHARP_UPPER_REL}); {elapsed:.1?} (< 30s)",
            4.0 * f,
            dn * dn
        ),
    )
}

fn lie_geometry_suite() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(202);
    let mut gaps = [f64::NEG_INFINITY; 6];
    for k in 0..1000 {
        let d = 2 + k % 3;
        let x = random_generator(d, PI, &mut rng);
        gaps[0] = gaps[0].max((path_dist(&UnitaryMatrix::identity(d), &expm(&x)).unwrap() - x.norm()).abs());

        let (u, v) = (haar_random(d, &mut rng), haar_random(d, &mut rng));
        let path = path_dist(&u, &v).unwrap();
        gaps[1] = gaps[1].max((diff(&u, &v) - path).max(path - FRAC_PI_2 * diff(&u, &v)));

        let (x, y) = (random_generator(d, 3.0, &mut rng), random_generator(d, 3.0, &mut rng));
        gaps[2] = gaps[2].max(diff(&expm(&x), &expm(&y)) - op_norm(&(x.matrix() - y.matrix())));

        let (x, y) = (random_generator(d, 1.0 / PI, &mut rng), random_generator(d, 1.0 / PI, &mut rng));
        gaps[3] = gaps[3].max(op_norm(&(x.matrix() - y.matrix())) - PI * diff(&expm(&x), &expm(&y)));

        let (x, y) = (random_generator(d, 1.0, &mut rng), random_generator(d, 1.0, &mut rng));
        let comm = x.matrix() * y.matrix() - y.matrix() * x.matrix();
        gaps[4] = gaps[4].max(diff(&(&expm(&x) * &expm(&y)), &expm(&x.add(&y))) - 0.5 * op_norm(&comm));
    }
    let r = 1.0 / (3.0 * PI);
    for k in 0..500 {
        let d = 2 + k % 3;
        let u = expm(&random_generator(d, r, &mut rng));
        let v = expm(&random_generator(d, r, &mut rng));
        let base = lie_dist(&u, &v).unwrap();
        for e in 0..=6 {
            let p = (1u64 << e) as f64;
            let lhs = lie_dist(&frac_power(&u, 1.0 / p).unwrap(), &frac_power(&v, 1.0 / p).unwrap()).unwrap();
            gaps[5] = gaps[5].max(lhs - PI * PI / (2.0 * p) * base);
        }
    }
    let worst = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    line(
        worst <= LIE_SLACK && elapsed < LIE_BUDGET,
        format!(
            "(a) {:.1e} (b) {:.1e} (c) {:.1e} (d) {:.1e} product {:.1e} roots {:.1e}; worst {worst:.1e} (<= {LIE_SLACK:e}); \
             {elapsed:.1?} (< 60s)",
            gaps[0], gaps[1], gaps[2], gaps[3], gaps[4], gaps[5]
        ),
    )
}

fn state_tomography() -> Line {
    let cfg = StateTomographyConfig::default();
    let (d, eps0) = (4, 0.05);
    let mut ok = 0;
    for seed in 0..100 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let z = haar_random(d, &mut rng);
        let truth = z.apply(&basis_vector(d, 0));
        let mut oracle = QueryOracle::new(z, seed ^ 0xabc);
        let est = estimate_state(&StatePreparation::new(d, 1), &mut oracle, eps0, &cfg, &mut rng).unwrap();
        if infidelity(&truth, &est.vector) <= eps0 {
            ok += 1;
        }
    }
    // E[L] = |z><z|: each entry of L is a mean of m iid terms, 3 sigma from their sample spread
    let mut rng = ChaCha20Rng::seed_from_u64(303);
    let z = haar_random(d, &mut rng);
    let psi = z.apply(&basis_vector(d, 0));
    let m = 100_000;
    let mut oracle = QueryOracle::new(z, 304);
    let samples = oracle.measure_uniform_povm(&StatePreparation::new(d, 1), m, SamplingMode::Direct).unwrap();
    let l = build_l(&samples).unwrap();
    let mut worst_z: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let xs: Vec<C64> = samples.outcomes().iter().map(|v| v[i] * v[j].conj() * (d + 1) as f64).collect();
            let mean = xs.iter().sum::<C64>() / m as f64;
            let sd_re = (xs.iter().map(|x| (x.re - mean.re).powi(2)).sum::<f64>() / (m - 1) as f64 / m as f64).sqrt();
            let sd_im = (xs.iter().map(|x| (x.im - mean.im).powi(2)).sum::<f64>() / (m - 1) as f64 / m as f64).sqrt();
            let err = l[(i, j)] - psi[i] * psi[j].conj();
            worst_z = worst_z.max(err.re.abs() / sd_re);
            if sd_im > 0.0 {
                worst_z = worst_z.max(err.im.abs() / sd_im);
            }
        }
    }
    line(
        ok >= 90 && worst_z <= 3.0,
        format!("d=4 eps0=0.05 C_state={}: {ok}/100 (>= 90); E[L] worst |z| {worst_z:.2} at m=1e5 (<= 3)", cfg.c_state),
    )
}

fn base_tomography() -> Line {
    let start = Instant::now();
    let c = Constants::default();
    let eta = 1.0 / 3.0;
    let ok = (0..100)
        .filter(|&t| run_trial(Experiment::BaseTomo, 2, 0.1, eta, trial_seed(1, 2, 0.1, t), &c).success)
        .count();
    let q = |eps: f64| {
        median((0..50).map(|t| run_trial(Experiment::BaseTomo, 2, eps, eta, trial_seed(2, 2, eps, t), &c).queries as f64).collect())
    };
    let ratio = q(0.05) / q(0.1);
    let elapsed = start.elapsed();
    line(
        ok >= 66 && (3.5..=4.5).contains(&ratio) && elapsed < BASE_BUDGET,
        format!("d=2 eps=0.1 eta=1/3: {ok}/100 (>= 66); median Q(0.05)/Q(0.1) = {ratio:.4} (in [3.5, 4.5]); {elapsed:.1?} (< 10 min)"),
    )
}

fn bootstrap_with_mocks() -> Line {
    let mut recursion_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for eps in [0.05, 0.02, 0.01] {
        let bound = 2f64.powi(-(iteration_count(eps) as i32) - 4);
        for seed in 0..100 {
            for perturbation in [Perturbation::Random(BASE_LIE_ACCURACY), Perturbation::Aligned(BASE_LIE_ACCURACY)] {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let z = haar_random(3, &mut rng);
                let mut oracle = QueryOracle::new(z.clone(), seed);
                let mut base = MockBase::new(z.clone(), perturbation);
                let (v, _) = bootstrap(&mut oracle, eps, 0.1, &mut base, &mut rng).unwrap();
                let err = lie_dist(&z, &v).unwrap();
                worst_ratio = worst_ratio.max(err / bound);
                recursion_ok &= err <= bound;
            }
        }
    }
    let eps = 0.01;
    let t = iteration_count(eps);
    let mut graceful_ok = true;
    let mut worst_graceful: f64 = 0.0;
    for f in 0..=t {
        for seed in 0..20 {
            let mut rng = ChaCha20Rng::seed_from_u64(1000 + seed);
            let z = haar_random(2, &mut rng);
            let mut oracle = QueryOracle::new(z.clone(), seed);
            let mut base = MockBase::adversarial(z.clone()).failing_at(f);
            let (v, _) = bootstrap(&mut oracle, eps, 0.1, &mut base, &mut rng).unwrap();
            let ratio = lie_dist(&z, &v).unwrap() / 2f64.powi(2 - f as i32);
            worst_graceful = worst_graceful.max(ratio);
            graceful_ok &= ratio <= 1.0;
        }
    }
    let (eps, eta) = (0.05, 0.1);
    let mut sq = 0.0;
    for seed in 0..200 {
        let mut rng = ChaCha20Rng::seed_from_u64(5000 + seed);
        let z = haar_random(2, &mut rng);
        let mut oracle = QueryOracle::new(z.clone(), seed);
        let mut base = MockBase::adversarial(z.clone()).with_random_failures();
        let (v, _) = bootstrap(&mut oracle, eps, eta, &mut base, &mut rng).unwrap();
        sq += lie_dist(&z, &v).unwrap().powi(2);
    }
    let mean_sq = sq / 200.0;
    let cap = (1.0 + 32.0 * eta) * eps * eps;
    line(
        recursion_ok && graceful_ok && mean_sq <= cap,
        format!(
            "final error / 2^(-T-4) worst {worst_ratio:.3} (<= 1, 600 runs); planted failure error / 2^(2-f) worst \
             {worst_graceful:.3} (<= 1, f=0..{t}); E[dist^2] {mean_sq:.3e} (<= {cap:.3e})"
        ),
    )
}

fn heisenberg_scaling() -> Line {
    let grid = vec![0.1, 0.05, 0.02, 0.01];
    let mut boot = ExperimentConfig::new(Experiment::Bootstrap, vec![2], grid.clone(), 0.1, 30, 6);
    boot.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let base = ExperimentConfig { experiment: Experiment::BaseTomo, ..boot.clone() };
    let wide = ExperimentConfig { dims: vec![4], eps: vec![0.1], ..boot.clone() };
    let boot_records = run_trials(&boot).unwrap();
    let base_records = run_trials(&base).unwrap();
    let wide_records = run_trials(&wide).unwrap();
    let medians = |records: &[unitary_lab::ExperimentRecord], d: usize| -> Vec<(f64, f64)> {
        grid.iter()
            .filter_map(|&e| {
                let q: Vec<f64> = records.iter().filter(|r| r.d == d && r.eps == e).map(|r| r.queries as f64).collect();
                (!q.is_empty()).then(|| (e, median(q)))
            })
            .collect()
    };
    let boot_pts = medians(&boot_records, 2);
    let base_pts = medians(&base_records, 2);
    let boot_slope = ols_slope(&boot_pts);
    let base_slope = ols_slope(&base_pts);
    let summary = summarize(&boot_records).unwrap();
    let summary_slope = summary.slopes[0].slope.unwrap();
    let ratio = medians(&wide_records, 4)[0].1 / boot_pts[0].1;
    let successes = boot_records.iter().filter(|r| r.success).count();
    line(
        (0.8..=1.2).contains(&boot_slope)
            && (1.7..=2.3).contains(&base_slope)
            && (2.5..=6.5).contains(&ratio)
            && (summary_slope - boot_slope).abs() <= 1e-9,
        format!(
            "bootstrap slope {boot_slope:.3} (in [0.8, 1.2], summary agrees to {:.0e}); base slope {base_slope:.3} \
             (in [1.7, 2.3]); Q(d=4)/Q(d=2) at eps=0.1 = {ratio:.3} (in [2.5, 6.5]); bootstrap success {successes}/120",
            (summary_slope - boot_slope).abs()
        ),
    )
}

fn gadget_identity() -> Line {
    let mut rng = ChaCha20Rng::seed_from_u64(707);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let d = 2 + k % 3;
        let r = sample_reflection(d, &mut rng).unwrap();
        let alpha = 0.5 * (1.0 - rng.random::<f64>());
        let sign = if rng.random::<bool>() { GadgetSign::Plus } else { GadgetSign::Minus };
        let s = sign.value();
        let psi = haar_state(d, &mut rng);
        // explicit circuit: P on the ancilla, controlled R, P again; keep the ancilla-0 block
        let (sn, cs) = (alpha * PI / 2.0).sin_cos();
        let g = cs / (cs + sn);
        let p = [
            [C64::new(g.sqrt(), 0.0), C64::new(0.0, s * (1.0 - g).sqrt())],
            [C64::new((1.0 - g).sqrt(), 0.0), C64::new(0.0, -s * g.sqrt())],
        ];
        let after_p = [psi.clone() * p[0][0], psi.clone() * p[1][0]];
        let after_cr = [after_p[0].clone(), r.apply(&after_p[1])];
        let branch: CVector = &after_cr[0] * p[0][0] + &after_cr[1] * p[0][1];
        // R^{s alpha} from the spectral projectors of R
        let plus = (identity(d) + r.matrix()) * C64::new(0.5, 0.0);
        let minus = (identity(d) - r.matrix()) * C64::new(0.5, 0.0);
        let r_alpha = plus + minus * cis(-s * PI * alpha);
        let nu = cis(s * PI * alpha / 2.0) / (cs + sn);
        let want = r_alpha * &psi * nu;
        worst = worst.max((&branch - &want).norm());
        worst = worst.max((gadget_amplitude(alpha, sign) - nu).norm());
    }
    let mut amp_ok = true;
    for k in 1..=500 {
        let alpha = k as f64 / 1000.0;
        for sign in [GadgetSign::Plus, GadgetSign::Minus] {
            amp_ok &= gadget_amplitude(alpha, sign).norm() >= (-alpha * PI / 2.0).exp();
        }
    }
    line(
        worst <= GADGET_TOL && amp_ok,
        format!("200 random instances worst deviation {worst:.2e} (<= {GADGET_TOL:e}); |nu| >= exp(-alpha pi/2) on 500-point grid: {amp_ok}"),
    )
}

fn truncation_bound() -> Line {
    let mut ok = true;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut worst_agree: f64 = 0.0;
    for gamma in [0.5, 0.9, 0.99] {
        for q in 10u64..=200 {
            let k_cut = truncation_cutoff(q, gamma);
            assert_eq!(k_cut, (40.0 + 40.0 * (1.0 - gamma) * q as f64).ceil() as u64);
            // independent tail: direct summation of binomial terms
            let mut c = 1.0f64;
            let mut mass = 0.0;
            for w in 0..=q {
                if w > k_cut {
                    mass += c * gamma.powi((q - w) as i32) * (1.0 - gamma).powi(w as i32);
                }
                c = c * (q - w) as f64 / (w + 1) as f64;
            }
            let norm = mass.sqrt();
            let lib = ln_ancilla_truncation_error(q, gamma, k_cut).exp();
            worst_agree = worst_agree.max((lib - norm).abs() / norm.max(1e-300));
            let kk = k_cut as f64 / ((1.0 - gamma) * q as f64);
            let chernoff = (-kk * kk * (1.0 - gamma) * q as f64 / (2.0 * (2.0 + kk))).exp();
            ok &= norm <= chernoff;
            if norm > 0.0 {
                worst_margin = worst_margin.max(norm.ln() - chernoff.ln());
            }
        }
    }
    let agree = worst_agree <= 1e-9;
    line(
        ok && agree,
        format!(
            "Q=10..200, gamma in {{0.5, 0.9, 0.99}}: tail <= Chernoff everywhere: {ok}; worst ln(tail/bound) {worst_margin:.2} \
             (nonzero tails only); library vs direct sum rel {worst_agree:.1e}"
        ),
    )
}

fn net_and_identification() -> Line {
    let net = pauli_net();
    let mut pauli_ok = net.elements.len() == 3;
    for i in 0..3 {
        for j in 0..i {
            pauli_ok &= (diamond_norm(&net.elements[i], &net.elements[j]).unwrap() - 2.0).abs() <= EXACT_TOL;
        }
    }
    let greedy = build_net(4, 0.25, 20, 10_000, &mut ChaCha20Rng::seed_from_u64(808)).unwrap();
    let min = greedy.min_pairwise_diamond().unwrap().unwrap_or(0.0);
    let greedy_ok = greedy.complete && greedy.elements.len() == 20 && min >= 0.25;
    let c = Constants::default();
    let ok = (0..50)
        .filter(|&t| run_trial(Experiment::Identify, 2, 0.05, 0.1, trial_seed(9, 2, 0.05, t), &c).success)
        .count();
    // binomial spot values computed by hand
    let spots = [
        (0u64, 2u64, 7u64, 1.0 / 7.0),
        (1, 2, 4, 1.0),
        (2, 2, 10, 1.0),
        (1, 2, 100, 4.0 / 100.0),
        (2, 2, 1000, 10.0 / 1000.0),
        (3, 3, 1_000_000, 165.0 / 1_000_000.0),
    ];
    let spots_ok = spots.iter().all(|&(q, d, n, want)| (identification_bound(q, d, n) - want).abs() <= EXACT_TOL);
    line(
        pauli_ok && greedy_ok && 3 * ok >= 2 * 50 && spots_ok,
        format!(
            "Pauli net pairwise = 2: {pauli_ok}; d=4 greedy net {} elements, min pairwise {min:.3}, {} attempts (<= 1e4); \
             identify d=2 eps=0.05: {ok}/50 (>= 2/3); binomial spot values: {spots_ok}",
            greedy.elements.len(),
            greedy.attempts
        ),
    )
}

fn eigenphase_estimation() -> Line {
    let cfg = EigenphaseConfig::default();
    let (d, eps) = (4, 0.05);
    let mut ok = 0;
    let mut max_q = 0;
    for seed in 0..100 {
        let z = haar_random(d, &mut ChaCha20Rng::seed_from_u64(seed));
        let truth = PhaseSet::new(eigenphases(&z).unwrap());
        let mut oracle = EigenphaseOracle::new(&z, seed ^ 0xe19).unwrap();
        let est = estimate_eigenphases(&mut oracle, eps, &cfg).unwrap();
        max_q = max_q.max(oracle.queries_used());
        if hausdorff_phase_dist(&truth, &est.phases).unwrap() <= eps {
            ok += 1;
        }
    }
    let bound = EIG_QUERY_CONST * (d as f64 / eps) * (d as f64).ln().powi(2);

    let mut rng = ChaCha20Rng::seed_from_u64(909);
    let mut shift_dev: f64 = 0.0;
    for seed in 0..20 {
        let z = haar_random(d, &mut rng);
        let tau = rng.random_range(-PI..PI);
        let a = estimate_eigenphases(&mut EigenphaseOracle::new(&z, seed).unwrap(), eps, &cfg).unwrap();
        let b = estimate_eigenphases(&mut EigenphaseOracle::new(&z.scaled(cis(tau)), seed).unwrap(), eps, &cfg).unwrap();
        shift_dev = shift_dev.max(hausdorff_phase_dist(&a.phases, &b.phases).unwrap());
    }
    let theta = 2.0;
    let one = UnitaryMatrix::from_phases(&[0.0, 0.0, theta]);
    let two = UnitaryMatrix::from_phases(&[0.0, theta, theta]);
    let mut mult_dev: f64 = 0.0;
    let mut mult_sizes = true;
    for seed in 0..20 {
        let a = estimate_eigenphases(&mut EigenphaseOracle::new(&one, seed).unwrap(), eps, &cfg).unwrap();
        let b = estimate_eigenphases(&mut EigenphaseOracle::new(&two, seed).unwrap(), eps, &cfg).unwrap();
        mult_sizes &= a.phases.len() == 2 && b.phases.len() == 2;
        mult_dev = mult_dev.max(hausdorff_phase_dist(&a.phases, &b.phases).unwrap());
    }
    line(
        ok >= 90 && (max_q as f64) <= bound && shift_dev <= 1e-9 && mult_sizes && mult_dev <= 2.0 * eps,
        format!(
            "d=4 eps=0.05: {ok}/100 (>= 90); queries {max_q} <= {EIG_QUERY_CONST}(d/eps)ln^2 d = {bound:.0}; \
             global shift deviation {shift_dev:.1e} (<= 1e-9); multiplicity sets equal size 2: {mult_sizes}, \
             deviation {mult_dev:.2e} (<= 2 eps)"
        ),
    )
}

fn harness_determinism() -> Line {
    let root = std::env::temp_dir().join(format!("unitary-lab-acceptance-{}", std::process::id()));
    let toml = |out: &std::path::Path, workers: usize| {
        format!(
            "experiment = \"base-tomo\"\ndims = [2]\neps = [0.3, 0.2]\neta = 0.2\ntrials = 3\nseed = 42\n\
             out = \"{}\"\nworkers = {workers}\n\n[constants]\nc_state = 4.0\n",
            out.display()
        )
    };
    let mut csvs = Vec::new();
    for (i, workers) in [1, 1, 2].into_iter().enumerate() {
        let out = root.join(format!("run{i}"));
        std::fs::create_dir_all(&root).unwrap();
        let path = root.join(format!("run{i}.toml"));
        std::fs::write(&path, toml(&out, workers)).unwrap();
        let config = ExperimentConfig::load(&path).unwrap();
        let returned = run_experiment(&config).unwrap();
        let mut records = read_csv(&out.join("results.csv")).unwrap();
        let header = std::fs::read_to_string(out.join("results.csv")).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, unitary_lab::CSV_HEADER);
        assert_eq!(records.len(), returned.len());
        for r in &mut records {
            r.wall_ms = 0;
        }
        csvs.push(records);
    }
    let rejects_unknown = toml::from_str::<ExperimentConfig>(
        "experiment = \"bootstrap\"\ndims = [2]\neps = [0.1]\neta = 0.1\ntrials = 1\nseed = 0\nbogus = 1\n",
    )
    .is_err();
    let _ = std::fs::remove_dir_all(&root);
    let same = csvs[0] == csvs[1] && csvs[0] == csvs[2];
    line(
        same && rejects_unknown && csvs[0].len() == 6,
        format!(
            "{} records; identical across repeated runs and worker counts (wall_ms excluded): {same}; \
             unknown config keys rejected: {rejects_unknown}",
            csvs[0].len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Line); 11] = [
        ("metric property suite", metric_suite),
        ("Lie-geometry suite", lie_geometry_suite),
        ("pure-state tomography", state_tomography),
        ("base tomography", base_tomography),
        ("bootstrap with mock bases", bootstrap_with_mocks),
        ("Heisenberg scaling", heisenberg_scaling),
        ("gadget identity", gadget_identity),
        ("truncation bound", truncation_bound),
        ("net and identification", net_and_identification),
        ("eigenphase estimation", eigenphase_estimation),
        ("harness determinism", harness_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let l = check();
        let tag = if l.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name} [{:.1?}]: {}", start.elapsed(), l.detail);
        if !l.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
