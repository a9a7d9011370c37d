//! Feature-based newsvendor ordering models.
//!
//! This crate trains models that map day-level features (holiday, weather,
//! promotion, ...) directly to order quantities for a perishable good. Two
//! training objectives compete: the piecewise-linear newsvendor cost
//! (shortage charged `cp` per unit, leftovers `ch` per unit) and its
//! squared "quadratic" baseline. The original cost decomposes into two
//! ReLU units, which makes it trainable by ordinary backpropagation even
//! though it is non-smooth.
//!
//! What's here:
//!
//! - [`losses`]: both objectives, their subgradients, and the ReLU
//!   decomposition.
//! - [`models`]: a sigmoid MLP, a linear model, and the classical
//!   critical-fractile baselines.
//! - [`optim`]: full-batch training with L-BFGS (backtracking Armijo line
//!   search) or momentum gradient descent, plus the weight regularizer.
//! - [`data`]: CSV ingestion, train/test splitting, seeded synthetic
//!   generators, block resampling, and outlier injection.
//! - [`experiments`]: `cp/ch` ratio sweeps, error metrics, prediction
//!   dumps, and the robustness comparison.
//!
//! A `newsvendor` command-line tool wraps the same operations as
//! reproducible batch commands; see the guide in `book/` for a walkthrough.
//!
//! # Quick start
//!
//! Train a linear model on the embedded two-week dataset and measure its
//! squared error:
//!
//! ```
//! use newsvendor::data::table1_dataset;
//! use newsvendor::experiments::{test_err, train_err};
//! use newsvendor::models::LinearModel;
//! use newsvendor::optim::{train, TrainConfig};
//! use newsvendor::{CostPair, LossKind};
//!
//! # fn main() -> newsvendor::Result<()> {
//! let (train_set, test_set) = table1_dataset();
//! let costs = CostPair::new(3.0, 1.5)?;
//! let cfg = TrainConfig { max_iters: 100, ..TrainConfig::default() };
//!
//! let report = train(
//!     &LinearModel::zeros(train_set.n_features()),
//!     &train_set,
//!     &costs,
//!     LossKind::Original,
//!     &cfg,
//! )?;
//!
//! let fit = train_err(&report.model, &train_set)?;
//! let generalization = test_err(&report.model, &test_set)?;
//! assert!(fit.is_finite() && generalization.is_finite());
//! # Ok(())
//! # }
//! ```

pub mod data;
pub mod error;
pub mod experiments;
pub mod losses;
pub mod matrix;
pub mod models;
pub mod optim;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use losses::{CostPair, LossKind};
pub use matrix::Matrix;
pub use rng::SeededRng;

// The book's code snippets double as doctests so the guide can never
// drift from the API. `cargo test --doc` compiles and runs every fenced
// Rust block below.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/newsvendor-problem.md")]
    mod newsvendor_problem {}
    #[doc = include_str!("../../../book/src/losses.md")]
    mod losses {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
