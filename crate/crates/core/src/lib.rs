//! Bilinear Bogolyubov construction over `F_p^n`, with certificates.
//!
//! Starting from a dense set `A ⊂ G × G` (`G = F_p^n`), the crate runs the
//! directional convolution pipeline `A → A⁽¹⁾ → A⁽²⁾ → A⁽³⁾` and extracts a
//! structured set `(U × V) ∩ Bᴸ`, two subspaces cut by a bilinear Bohr
//! variety, then checks exhaustively that the structured set really lies
//! inside `A⁽³⁾`. Every intermediate claim is recorded in a [`Certificate`].
//!
//! Module map:
//!
//! * [`linalg`]: vectors, RREF subspaces, affine maps over `F_p`.
//! * [`fourier`]: normalized transforms on `F_p^n`, convolution, spectra.
//! * [`product_set`]: bit-packed subsets of `G × G` and the convolution
//!   pipeline.
//! * [`bohr`]: biaffine maps, Bohr varieties, structured sets.
//! * [`pipeline`]: the construction itself and its building blocks.
//! * [`generators`]: synthetic instances.
//!
//! The guide under `book/` walks through each stage; its code listings are
//! compiled as doc-tests of this crate.

pub mod bohr;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod linalg;
pub mod pipeline;
pub mod product_set;

pub use error::{Error, Result};
pub use pipeline::{bilinear_bogolyubov, Certificate, PipelineConfig};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/linear-algebra.md")]
    mod linear_algebra {}
    #[doc = include_str!("../../../book/src/fourier.md")]
    mod fourier {}
    #[doc = include_str!("../../../book/src/convolution-pipeline.md")]
    mod convolution_pipeline {}
    #[doc = include_str!("../../../book/src/bohr-varieties.md")]
    mod bohr_varieties {}
    #[doc = include_str!("../../../book/src/linearization.md")]
    mod linearization {}
    #[doc = include_str!("../../../book/src/construction.md")]
    mod construction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
