//! Gamma-type special functions.

pub mod barnes;
pub mod gamma;

pub use barnes::{barnes_ratio, ln_barnes_ratio, ln_barnes_ratio_depth, ln_gamma_ratio};
pub use gamma::{
    digamma, gamma, gamma_real, ln_gamma, ln_gamma_real, pochhammer, polygamma, rgamma,
    rgamma_real,
};
