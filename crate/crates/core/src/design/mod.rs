//! Sampling and assignment designs: random draws, exact enumeration and
//! seeded Monte Carlo.

pub mod diagnostic;
pub mod draw;
pub mod enumerate;
pub mod moments;
pub mod monte_carlo;
pub mod rng;

pub use diagnostic::representation_gap;
pub use draw::{draw, Draw};
pub use enumerate::{enumerate_binary, enumerate_exact, CellReport, EnumerationReport, ENUMERATION_BUDGET};
pub use moments::Moments;
pub use monte_carlo::{monte_carlo, MonteCarloReport};
