//! Regression estimands and standard errors for a finite population when
//! uncertainty comes from sampling, from the assignment of causes, or both.
//!
//! The typical path is [`regression::fit_ols`] on a [`regression::SampleData`]
//! followed by [`variance::general_variance`], which reports EHW, causal,
//! causal-sample and descriptive variance estimates side by side.
//! [`design`] holds the exact enumeration and Monte Carlo tools used to
//! check those estimators against known populations.

pub mod bayes;
pub mod design;
pub mod error;
pub mod estimands;
pub mod linalg;
mod par;
pub mod population;
pub mod regression;
pub mod variance;

#[cfg(feature = "cli")]
pub mod cli;
#[cfg(feature = "cli")]
pub mod io;

pub use error::{Error, Result};
pub use estimands::Estimand;
pub use population::{AssignmentDesign, Design, FinitePopulation, PopulationSpec, SamplingDesign};
pub use regression::{fit_ols, FitResult, SampleData};
pub use variance::{general_variance, GeneralVarianceReport};
