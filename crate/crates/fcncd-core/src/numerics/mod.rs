//! Dense-array math substrate: arrays, recorded computation graphs with
//! reverse-mode gradients, Xavier initialization, AdamW, and nonnegative
//! projection. Everything is f64 and deterministic under a fixed seed.

mod array;
mod check;
mod graph;
mod init;
mod optim;
mod params;

pub use array::{clip_nonnegative, fast_exp, sigmoid, softplus, Array};
pub use check::{finite_difference_gradients, FdGradients};
pub use graph::{DiffGraph, NodeId};
pub use init::xavier_uniform;
pub use optim::{adamw_step, AdamwConfig, AdamwState};
pub use params::{Gradients, ParamSet};

/// Raises glibc's mmap/trim thresholds so the multi-megabyte buffers the
/// trainer churns through stay on the heap instead of bouncing through mmap
/// and fresh page faults. Worth calling once at startup of long-running
/// processes; a no-op elsewhere.
pub fn tune_allocator() {
    #[cfg(target_env = "gnu")]
    unsafe {
        libc::mallopt(libc::M_MMAP_THRESHOLD, 256 << 20);
        libc::mallopt(libc::M_TRIM_THRESHOLD, 256 << 20);
    }
}
