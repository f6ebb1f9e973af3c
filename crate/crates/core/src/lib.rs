pub mod bernstein;
pub mod error;
pub mod mellin;
pub mod model_spec;
pub mod monte_carlo;
pub mod output;
pub mod quad;
pub mod special;
pub mod verify;
pub mod wphi;

pub use bernstein::{BernsteinFunction, LevyDensity, LevyTriple, WienerHopfPair};
pub use error::{BernsteinClass, Error, Result};
