//! Per-path random streams.
//!
//! Every path owns independent ChaCha streams keyed by `(seed, path index,
//! component)`, so results do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent randomness sources within one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Brownian = 0,
    Subordinator = 1,
    Signs = 2,
    Auxiliary = 3,
}

pub fn stream_rng(seed: u64, path_index: u64, component: Component) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index.wrapping_mul(8).wrapping_add(component as u64));
    rng
}
