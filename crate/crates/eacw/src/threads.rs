//! Shared worker pool. `EACW_THREADS` caps internal parallelism
//! (0 or unset picks the automatic thread count).

use std::sync::OnceLock;

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

pub(crate) fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        let requested = std::env::var("EACW_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .unwrap_or(0);
        let mut builder = rayon::ThreadPoolBuilder::new();
        if requested > 0 {
            builder = builder.num_threads(requested);
        }
        builder.build().expect("failed to build worker pool")
    })
}
