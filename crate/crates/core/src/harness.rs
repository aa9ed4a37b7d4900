//! Replicate fan-out. Replicate `i` always draws from stream `i` of the
//! given family, so results do not depend on the worker count.

use crate::error::Result;
use crate::rng::{RngStream, StreamRng};

/// Run `f(i, rng_i)` for i in 0..n and return the results in index order.
///
/// With the `parallel` feature and `workers > 1` the replicates run on a
/// dedicated rayon pool; otherwise they run sequentially.
pub fn map_replicates<T, F>(n: usize, workers: usize, family: RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut StreamRng) -> T + Sync,
{
    let run = |i: usize| {
        let mut rng = family.with_index(i as u64).rng();
        f(i, &mut rng)
    };
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| (0..n).into_par_iter().map(run).collect());
        }
    }
    let _ = workers;
    (0..n).map(run).collect()
}

/// [`map_replicates`] for fallible replicates; the first error in index order wins.
pub fn try_map_replicates<T, F>(n: usize, workers: usize, family: RngStream, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut StreamRng) -> Result<T> + Sync,
{
    map_replicates(n, workers, family, f).into_iter().collect()
}

/// Whether the crate was built with the rayon backend.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn worker_count_does_not_change_results() {
        let fam = RngStream::new(7, 0);
        let a = map_replicates(50, 1, fam, |_, r| r.next_u64());
        let b = map_replicates(50, 4, fam, |_, r| r.next_u64());
        assert_eq!(a, b);
    }
}
