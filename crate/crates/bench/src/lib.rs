//! Fixtures shared by the benchmarks.

use mirrorbench::algo;
use mirrorbench::Circuit;

/// Depth-128 brickwork circuit used throughout the scaling benchmarks.
pub fn brickwork(n: usize) -> Circuit {
    algo::brickwork_u3_cz(n, 128, 7)
}
