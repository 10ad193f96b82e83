//! Exact evaluation of the Izergin-Korepin and Fateev-Zamolodchikov
//! nineteen-vertex models with domain-wall boundaries.

pub mod algebra;
pub mod bruteforce;
pub mod context;
pub mod error;
pub mod field;
pub mod linalg;
pub mod modular;
pub mod monodromy;
pub mod poly;
pub mod sampling;
pub mod structure;
pub mod weights;
pub mod zh;

pub use context::{make_context, Model, ModelContext};
pub use error::{Error, Result};
pub use field::{Field, Rational};
