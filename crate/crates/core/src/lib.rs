pub mod circle_sets;
pub mod cli;
pub mod correlation;
pub mod error;
pub mod geometric_partition;
pub mod oracle;
pub mod raimi_circle;
pub mod rational;
pub mod torus;
