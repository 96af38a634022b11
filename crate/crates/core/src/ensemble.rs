//! Schedule-independent parallel evaluation over sample indices.
//!
//! Every per-sample task is a pure function of its index; results land in
//! index order, and all reductions run sequentially over that order. Output is
//! therefore bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    workers: usize,
}

impl Default for Ensemble {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Ensemble {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(invalid("workers", "worker count must be >= 1"));
        }
        Ok(Self { workers })
    }

    pub fn sequential() -> Self {
        Self { workers: 1 }
    }

    /// One worker per available core.
    pub fn available() -> Self {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Evaluates `task(i)` for `i in 0..samples`, returned in index order.
    pub fn map<T, F>(&self, samples: u64, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        if self.workers == 1 || samples < 2 {
            return (0..samples).map(task).collect();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(|| (0..samples).into_par_iter().map(&task).collect()),
            // A pool that cannot be spawned still has to produce the same answer.
            Err(_) => (0..samples).map(task).collect(),
        }
    }
}
