//! Work distribution for embarrassingly parallel sweeps.
//!
//! With the default `parallel` feature the maps run on the rayon global pool;
//! without it they degrade to plain sequential iteration. Output order always
//! matches input order, so results are byte-identical either way and for any
//! thread count.

use crate::error::{LcpError, Result};

/// Maps `f` over `items`, preserving order. Parallel when the `parallel`
/// feature is enabled, sequential otherwise.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, preserving order. Parallel when the `parallel`
/// feature is enabled, sequential otherwise.
#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    items.iter().map(f).collect()
}

/// Always-sequential map, kept as the benchmark baseline for the parallel
/// path.
pub fn map_ordered_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Installs the global worker pool size. `None` keeps the library default
/// (one worker per logical CPU under the `parallel` feature; a single worker
/// otherwise). Calling it twice with a size is harmless: rayon only honours
/// the first global initialisation, and the ordered maps make the outcome
/// identical anyway.
pub fn install_thread_pool(threads: Option<usize>) -> Result<()> {
    match threads {
        None => Ok(()),
        Some(0) => Err(LcpError::InvalidParameter(
            "--threads must be at least 1".into(),
        )),
        Some(n) => {
            #[cfg(feature = "parallel")]
            {
                // A second initialisation attempt returns an error from rayon;
                // the pool already runs with the earlier size, which is fine.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
                Ok(())
            }
            #[cfg(not(feature = "parallel"))]
            {
                if n > 1 {
                    return Err(LcpError::InvalidParameter(format!(
                        "--threads {n} requested but this binary was built without the \
                         `parallel` feature"
                    )));
                }
                Ok(())
            }
        }
    }
}
