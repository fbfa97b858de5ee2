//! Seeded Monte Carlo model of a splitter cascade feeding on-off detectors.

mod engine;
mod rng;
mod tree;

pub use engine::{sample_histogram, ClickPattern, SimulationRun, Simulator};
pub(crate) use engine::multinomial as multinomial_draw;
pub use rng::StreamSeed;
pub use tree::SplitterTree;
