pub mod approx;
pub mod error;
pub mod extremes;
pub mod kernels;
pub mod oracles;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod trig;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use value::{CertifiedValue, LpExponent, Provenance};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/interpolation.md")]
    mod interpolation {}
    #[doc = include_str!("../../../book/src/best-approximation.md")]
    mod best_approximation {}
    #[doc = include_str!("../../../book/src/class-suprema.md")]
    mod class_suprema {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
