pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod distributions;

pub use distributions::{make_model, FamilySpec, QuantileLaw, QuantileModel, Support};
pub mod figures;
pub mod format;
pub mod identities;
pub mod orders;
pub mod registry;
pub mod risk;
pub mod unitlaw;
