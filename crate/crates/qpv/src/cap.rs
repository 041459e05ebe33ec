//! Dense-dimension cap.
//!
//! All dense constructions refuse to allocate matrices beyond a total
//! dimension cap. The default of 1024 (ten qubits) can be raised through the
//! `QPV_DIM_CAP` environment variable up to 4096 (twelve qubits), the point
//! where a single dense complex matrix reaches roughly 268 MB.

use crate::error::{Error, Result};

/// Cap applied when `QPV_DIM_CAP` is unset or unparseable.
pub const DEFAULT_DIM_CAP: usize = 1 << 10;
/// Largest accepted cap; higher requests clamp here.
pub const MAX_DIM_CAP: usize = 1 << 12;

/// Environment variable that overrides the default cap.
pub const DIM_CAP_ENV: &str = "QPV_DIM_CAP";

/// Current dimension cap.
pub fn dim_cap() -> usize {
    match std::env::var(DIM_CAP_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(v) if v >= 2 => v.min(MAX_DIM_CAP),
            _ => DEFAULT_DIM_CAP,
        },
        Err(_) => DEFAULT_DIM_CAP,
    }
}

/// Rejects dimensions above the current cap.
pub fn check_dim(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(Error::CapExceeded { dim, cap })
    } else {
        Ok(())
    }
}
