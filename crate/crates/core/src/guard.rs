//! Global bound on enumeration sizes.
//!
//! Every operation that materializes a hom-set, a function space or a dependent
//! product first asks [`check`] whether the number of items it is about to build
//! is within the bound. The bound is process-wide so callers (the CLI reads
//! `POLYCAT_GUARD`) can raise or lower it without threading it everywhere.

use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: u64 = 1_000_000;

static LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_LIMIT);

pub fn limit() -> u64 {
    LIMIT.load(Ordering::Relaxed)
}

pub fn set_limit(limit: u64) {
    LIMIT.store(limit, Ordering::Relaxed);
}

pub fn check(requested: u128) -> Result<()> {
    let limit = limit() as u128;
    if requested > limit {
        Err(Error::SearchTooLarge { requested, limit })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        if base == 0 {
            return 0;
        }
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Product of the given sizes, saturating.
pub fn product<I: IntoIterator<Item = usize>>(sizes: I) -> u128 {
    sizes
        .into_iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s as u128))
}
