//! Data-parallel bootstrap driver.
//!
//! Replicates are computed in fixed-size chunks on a rayon pool and collected
//! in index order. Each replicate owns its random stream, so the samples are
//! the same for any number of workers.

use ctreserve_core::{Bootstrap, BootstrapResult};
use rayon::prelude::*;

/// Replicates handed to the pool at a time.
pub const CHUNK: u64 = 1 << 16;

#[derive(Debug, thiserror::Error)]
#[error("could not start a pool of {threads} worker threads: {source}")]
pub struct PoolError {
    threads: usize,
    #[source]
    source: rayon::ThreadPoolBuildError,
}

/// Runs every replicate of `bootstrap`. `threads = None` uses rayon's default
/// worker count.
pub fn run_parallel(
    bootstrap: &Bootstrap,
    threads: Option<usize>,
) -> Result<BootstrapResult, PoolError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|source| PoolError { threads: threads.unwrap_or(0), source })?;
    let total = bootstrap.config().replicates;
    Ok(pool.install(|| {
        let chunks = (0..total).step_by(CHUNK as usize).flat_map(|start| {
            let end = (start + CHUNK).min(total);
            (start..end)
                .into_par_iter()
                .map(|m| bootstrap.replicate(m))
                .collect::<Vec<_>>()
        });
        BootstrapResult::from_replicates(*bootstrap.config(), chunks)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctreserve_core::{BootstrapConfig, Dataset, Method};

    #[test]
    fn matches_sequential_run() {
        let t = Dataset::Mortgage.triangle();
        for method in Method::ALL {
            let b = Bootstrap::new(&t, BootstrapConfig::new(method, 2_000, 9)).unwrap();
            let seq = b.run();
            let par = run_parallel(&b, Some(3)).unwrap();
            assert_eq!(seq, par, "{method:?}");
        }
    }
}
