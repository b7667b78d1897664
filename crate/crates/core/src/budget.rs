//! Abstract work budgets.
//!
//! A budget is a shared counter of cost units. Long computations charge it
//! as they go and stop with [`Error::Budget`](crate::Error::Budget) once the
//! limit is crossed, which callers report separately from arithmetic errors.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    spent: Arc<AtomicU64>,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, spent: Arc::new(AtomicU64::new(0)) }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn spent(&self) -> u64 {
        self.spent.load(Ordering::Relaxed)
    }

    /// Record `units` of work; fails if the total now exceeds the limit.
    pub fn charge(&self, units: u64, what: &str) -> Result<()> {
        let before = self.spent.fetch_add(units, Ordering::Relaxed);
        let total = before.saturating_add(units);
        if total > self.limit {
            return Err(Error::Budget { what: what.to_string(), spent: total, limit: self.limit });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}
