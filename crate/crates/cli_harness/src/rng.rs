use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream families, one per kind of trial.
#[derive(Clone, Copy, Debug)]
pub enum Stream {
    IndexScan = 1,
    Adjoint = 2,
    Estimates = 3,
    HighModes = 4,
    Tuples = 5,
    LowerBound = 6,
    Typed = 7,
    Leading = 8,
}

/// Generator for one trial: the key comes from `seed`, the ChaCha stream from
/// `(family, trial_id)`, so trials are independent of run order.
pub fn trial_rng(seed: u64, family: Stream, trial_id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((family as u64) << 32) | (trial_id & 0xffff_ffff));
    r
}
