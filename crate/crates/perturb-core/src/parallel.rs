//! Trial-level data parallelism with a sequential fallback.
//!
//! Experiments in this crate are embarrassingly parallel across trials: each
//! trial derives its own random stream from `seed ⊕ trial_index`, so results
//! never depend on execution order.  With the `parallel` feature (default)
//! the map below fans out on the rayon pool; without it the same closure runs
//! in a plain loop.  Outputs are returned in trial order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..count` in trial order, in parallel when enabled.
#[cfg(feature = "parallel")]
pub fn map_trials<T: Send, F: Fn(u64) -> T + Sync + Send>(count: u64, f: F) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..count` in trial order, in parallel when enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_trials<T: Send, F: Fn(u64) -> T + Sync + Send>(count: u64, f: F) -> Vec<T> {
    map_trials_seq(count, f)
}

/// Always-sequential variant, kept callable for benchmarking comparisons.
pub fn map_trials_seq<T: Send, F: Fn(u64) -> T + Sync + Send>(count: u64, f: F) -> Vec<T> {
    (0..count).map(f).collect()
}

/// Caps the worker pool at `n` threads.  Returns `false` when the build has
/// no parallel backend or the global pool was already initialized.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

/// Caps the worker pool at `n` threads.  Returns `false` when the build has
/// no parallel backend or the global pool was already initialized.
#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> bool {
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |t: u64| t.wrapping_mul(0x9e3779b97f4a7c15).rotate_left(17);
        assert_eq!(map_trials(64, f), map_trials_seq(64, f));
    }
}
