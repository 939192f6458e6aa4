//! Synthetic experiments: footprint statistics of the codec and scan
//! robustness under 2D analogs of bending, occlusion and camera tilt.

mod bench;
mod distort;
mod noise;
mod sweep;

pub use bench::{bench_dataset, footprint_benchmark, write_bench_csv, BenchConfig, BenchResult, BenchRow, BenchSample, SampleSource};
pub use distort::{occlude, perspective, warp_image, OcclusionSpec, PerspectiveSpec, WarpSpec, CAMERA_DISTANCE, WARP_AMPLITUDE};
pub use noise::{structured_noise, NoiseKind};
pub use sweep::{
    experiment_scenarios, random_message, robustness_sweep, run_sweep, success_table, write_sweep_csv, CodeSample, Experiment, Scenario,
    SweepConfig, SweepRow, OCCLUSION_LEVELS,
};
