//! Ordered parallel scans over candidate indices.
//!
//! Parallelism is capped by `ERS_THREADS`. Results never depend on the
//! thread count: the first index in canonical order always wins.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;

const BLOCK: u64 = 1 << 12;

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var("ERS_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            });
        if n <= 1 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
    })
    .as_ref()
}

/// First `i < n` with `f(i)`, and the number of `f` calls made.
pub(crate) fn first_index(n: u64, f: impl Fn(u64) -> bool + Sync) -> (Option<u64>, u64) {
    let Some(pool) = pool() else {
        for i in 0..n {
            if f(i) {
                return (Some(i), i + 1);
            }
        }
        return (None, n);
    };
    let calls = AtomicU64::new(0);
    let mut start = 0;
    while start < n {
        let end = n.min(start + BLOCK * pool.current_num_threads() as u64);
        let hit = pool.install(|| {
            (start..end).into_par_iter().find_first(|&i| {
                calls.fetch_add(1, Ordering::Relaxed);
                f(i)
            })
        });
        if hit.is_some() {
            return (hit, calls.load(Ordering::Relaxed));
        }
        start = end;
    }
    (None, calls.load(Ordering::Relaxed))
}

/// Index minimising `key` over `0..n`, the earliest on ties.
pub(crate) fn argmin<K: Ord + Send>(n: u64, key: impl Fn(u64) -> K + Sync) -> Option<(u64, K)> {
    let pick = |a: (u64, K), b: (u64, K)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    match pool() {
        None => (0..n).map(|i| (i, key(i))).reduce(pick),
        Some(pool) => pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|i| (i, key(i)))
                .reduce_with(pick)
        }),
    }
}
