//! Seeded trials run in parallel with results in trial order.

use pargames_core::mix::trial_rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Runs `trial(index, rng)` for `index` in `0..trials`, each with its own
/// stream derived from `(seed, index)`. The output does not depend on the
/// number of threads.
pub fn run_trials<T, F>(seed: u64, trials: u64, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| trial(i, &mut trial_rng(seed, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_of_thread_count() {
        let f = |i: u64, rng: &mut ChaCha8Rng| (i, rng.gen::<u64>());
        let a = run_trials(7, 50, f);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| run_trials(7, 50, f));
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(k, (i, _))| k as u64 == *i));
        assert_ne!(a[0].1, a[1].1);
    }
}
