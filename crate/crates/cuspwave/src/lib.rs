//! Spectral tools for 2D free-boundary incompressible flow whose interface
//! is fully symmetric with a cusp or a corner at the origin: singular-integral
//! operators, weighted-norm diagnostics, regularized evolution systems, and
//! executable validators for the kernel estimates underpinning them.

pub mod br;
pub mod error;
pub mod grid;
pub mod branch_diff;
pub mod kernel_checks;
pub mod mollify;
pub mod neumann;
pub mod norms;
pub mod patch;
pub mod profiles;
pub mod quad;
pub mod spectral;
pub mod state;

pub use error::{CuspError, Result};
pub use grid::{Grid, WeightFunction};
pub use state::InterfaceState;

/// Configure the global worker pool from the CUSPWAVE_THREADS variable.
/// Call once at startup; later calls are no-ops.
pub fn init_threads() {
    if let Ok(v) = std::env::var("CUSPWAVE_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}
