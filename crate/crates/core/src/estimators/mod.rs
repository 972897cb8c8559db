//! Model-based estimators of angle and range, and their composition into
//! chart points.

pub mod chart;
pub mod joint;
pub mod music;
pub mod range;
pub mod rotate_sum;
pub mod steering;

pub use chart::{ChartOutcome, ChartPoint, ChartSettings, Charter, ModelAlgorithm, DEFAULT_THRESHOLD_RATIO};
pub use joint::{jm_estimate, jm_smooth};
pub use music::{
    music_estimate_rho, music_estimate_theta, music_spectrum, snapshot_covariance, split_subspace, Axis,
    PseudoSpectrum, SubspaceSplit,
};
pub use range::{isq_rho, lr_feature, lr_fit, lr_rho, LrModel};
pub use rotate_sum::{rs_estimate_rho, rs_estimate_theta, RsTables};
pub use steering::{steering_rho, steering_theta, SteeringTable};
