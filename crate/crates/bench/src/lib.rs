//! Shared fixtures for the criterion benches. The package exists for its
//! `benches/` targets; this library only builds the inputs they reuse.

use dynembed::graph::{synth_dynamic_sbm, Snapshot, TemporalGraph};

/// Mid-size drifting block model: large enough that per-iteration costs
/// dominate setup, small enough to keep bench wall time in seconds.
pub fn bench_graph() -> TemporalGraph {
    synth_dynamic_sbm(150, 4, 6, 0.2, 0.02, 0.05, 17).unwrap()
}

pub fn bench_snapshot() -> Snapshot {
    bench_graph().snapshot(0).clone()
}
