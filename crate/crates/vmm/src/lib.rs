//! Vibration monitoring: ground-plane fit, roughness grid and speed modulation.
//!
//! A cropped ground cloud is fitted with a RANSAC plane, binned into
//! 1 m x 1 m cells scored by mean point-to-plane distance, and the cells just
//! ahead of the vehicle select a speed factor β ∈ {1, 0.75, 0.5}.

pub mod cloud;
pub mod error;
pub mod grid;
pub mod plane;

pub use cloud::{synth_cloud, PointCloud, RoughnessProfile, Segment};
pub use error::VmmError;
pub use grid::{
    beta_for_score, classify, roughness_grid, speed_factor, speed_factor_at, Cell, Lookahead, RoughnessClass,
    RoughnessGrid, SpeedDecision,
};
pub use plane::{fit_plane_ransac, Plane, PlaneFit, RansacParams};
