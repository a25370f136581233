//! Exact construction of cyclic N-isogenies from points on the modular curve X0(N).

pub mod catalog;
pub(crate) mod conv;
pub mod error;
pub mod forms;
pub mod heegner;
pub mod linalg;
pub mod moduli;
pub mod numth;
pub mod parametrize;
pub mod poly;
pub mod qfile;
pub mod rational;
pub mod relations;
pub mod series;
pub mod tables;

pub use error::{Error, Result};
pub use series::QSeries;
