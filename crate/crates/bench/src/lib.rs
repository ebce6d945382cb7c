//! Fixed workloads shared by the criterion benchmarks.

use dialride::{random_instance, Capacity, Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A reproducible random instance with `n` requests.
pub fn workload(n: usize, capacity: Capacity, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(&mut rng, n, 5.0, capacity)
}
