//! Reproducible parallel trial execution.
//!
//! Trial `t` of a run with master seed `s` always draws from ChaCha8 keyed by
//! `s` on stream `t`, so a trial's randomness is independent of scheduling.
//! Results come back in trial order and every reduction downstream is a
//! sequential fold over that order, which makes outputs bit-identical for any
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Name recorded in reports so runs can be reproduced.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(seed=master, stream=trial_index)";

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials on the current rayon pool, in trial order.
pub fn run_trials<R, F>(trials: usize, seed: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut TrialRng) -> R + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            f(t, &mut rng)
        })
        .collect()
}

/// Runs `f` on a dedicated pool with `workers` threads (`0` = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool").install(f)
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let mean = xs.clone().sum::<f64>() / nf;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (nf - 1.0)).sqrt() / nf.sqrt())
}
