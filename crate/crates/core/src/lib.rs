//! Exact computations behind the Künneth spectral sequence for `H_*(e_n; F_p)`:
//! the Koszul complex over `F_p[u_1, ..., u_{n-1}][u]`, its homology, the
//! presentation `A/𝔞`, triple Massey products and E₂-page bookkeeping.

pub mod gring;
pub mod homology;
pub mod koszul;
pub mod linalg;
pub mod massey;
pub mod page;
pub mod presentation;

pub use gring::{Monomial, Params, Ring, RingElement};
pub use koszul::{KoszulElement, Subset};
