//! Metric inequality chains on Haar-random pairs.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use unitary_lab_core::linalg::haar_random;
use unitary_lab_core::metrics::channel_distances;

/// Slack allowed on every inequality.
pub const CHAIN_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub d: usize,
    pub pairs: usize,
    /// Largest `lhs - rhs` over all pairs and all six inequalities.
    pub worst_violation: f64,
    pub passed: bool,
}

/// Checks `pudist <= lie <= (pi/2) pudist`, `||.||/2 <= pudist <= ||.||` and
/// `4 F <= ||.||^2 <= 2 d F` on `pairs` Haar pairs.
pub fn metric_chains(d: usize, pairs: usize, seed: u64) -> unitary_lab_core::Result<ChainReport> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let u = haar_random(d, &mut rng);
        let v = haar_random(d, &mut rng);
        let c = channel_distances(&u, &v)?;
        let dn = c.diamond_norm;
        let f = c.ent_infidelity;
        for (lhs, rhs) in [
            (c.pudist, c.lie_dist),
            (c.lie_dist, FRAC_PI_2 * c.pudist),
            (dn / 2.0, c.pudist),
            (c.pudist, dn),
            (4.0 * f, dn * dn),
            (dn * dn, 2.0 * d as f64 * f),
        ] {
            worst = worst.max(lhs - rhs);
        }
    }
    Ok(ChainReport { d, pairs, worst_violation: worst, passed: worst <= CHAIN_SLACK })
}
