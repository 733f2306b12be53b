//! Execution policy for the data-parallel parts of the solvers.
//!
//! With the `parallel` feature (on by default) `Threads(n)` runs work on a
//! rayon pool of `n` workers; without it every policy runs sequentially.
//! Results are always combined in input order, so output never depends on
//! the policy.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    Threads(usize),
}

/// Environment variable consulted by [`Parallelism::from_env`].
pub const THREADS_ENV: &str = "PW_THREADS";

impl Parallelism {
    /// `Threads(n)` for `n >= 2`, `Sequential` otherwise.
    pub fn with_threads(n: usize) -> Self {
        if n >= 2 {
            Self::Threads(n)
        } else {
            Self::Sequential
        }
    }

    /// Reads [`THREADS_ENV`]; falls back to sequential when unset or invalid.
    pub fn from_env() -> Self {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .map_or(Self::Sequential, Self::with_threads)
    }

    pub fn threads(self) -> usize {
        match self {
            Self::Sequential => 1,
            Self::Threads(n) => n.max(1),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self.threads() > 1
    }

    /// Maps `f` over `items`, returning results in input order.
    pub fn map_ordered<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return pool::get(self.threads())
                .install(|| items.into_par_iter().map(f).collect());
        }
        items.into_iter().map(f).collect()
    }
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sequential => f.write_str("sequential"),
            Self::Threads(n) => write!(f, "{n} threads"),
        }
    }
}

impl FromStr for Parallelism {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(Self::with_threads)
    }
}

#[cfg(feature = "parallel")]
mod pool {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    use rayon::{ThreadPool, ThreadPoolBuilder};

    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();

    pub(super) fn get(threads: usize) -> Arc<ThreadPool> {
        let mut pools = POOLS
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        pools
            .entry(threads)
            .or_insert_with(|| {
                Arc::new(
                    ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .expect("thread pool"),
                )
            })
            .clone()
    }
}
