//! Point-process backgrounds and labeling mechanisms for simulation.

pub mod background;
pub mod labeling;

pub use background::{generate_background, BackgroundSpec};
pub use labeling::{label_non_rl, random_labeling, LabelOutcome, LabelingSpec};
