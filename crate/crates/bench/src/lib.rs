//! Fixed benchmark inputs shared by the criterion targets.

use coherence_core::states::{mixed_induced, BipartiteState};
use coherence_core::rng;

/// Reproducible random bipartite states for timing runs.
pub fn bipartite_inputs(d_a: usize, d_b: usize, n: usize, seed: u64) -> Vec<BipartiteState> {
    let mut r = rng::seeded(seed);
    (0..n)
        .map(|_| {
            BipartiteState::new(mixed_induced(&mut r, d_a * d_b, d_a * d_b), d_a, d_b)
                .expect("dims by construction")
        })
        .collect()
}
