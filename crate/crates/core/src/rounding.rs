//! Integer apportionment and seeded random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Splits `total` into integers proportional to `quotas` (Hamilton's method).
///
/// Every entry gets the floor of its quota; the leftover units go to the
/// largest fractional parts, lower index first on ties. `quotas` should sum
/// to `total` up to rounding noise.
pub fn largest_remainder(quotas: &[f64], total: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.max(0.0).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    if assigned <= total {
        let frac = |i: usize| quotas[i].max(0.0) - counts[i] as f64;
        order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
        for &i in order.iter().cycle().take(total - assigned) {
            counts[i] += 1;
        }
    } else {
        // only reachable when the quotas overshoot `total`; trim the smallest
        // fractional parts first
        let frac = |i: usize| quotas[i].max(0.0) - quotas[i].max(0.0).floor();
        order.sort_by(|&a, &b| frac(a).total_cmp(&frac(b)).then(a.cmp(&b)));
        let mut excess = assigned - total;
        while excess > 0 {
            for &i in &order {
                if excess > 0 && counts[i] > 0 {
                    counts[i] -= 1;
                    excess -= 1;
                }
            }
        }
    }
    counts
}

/// Independent ChaCha stream `stream` of the master `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
