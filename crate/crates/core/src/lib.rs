//! Integration of rough differential forms `f dg¹∧…∧dgᵈ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`]: rectangles, dyadic cubes, oriented faces and subdivision.
//! * [`funcrep`]: Hölder functions (closed forms, Schauder series, mollified
//!   functions) together with seminorm and oscillation estimates.
//! * [`sewing`]: the sewing integral over rectangles, built from lower-corner
//!   germs and a discrete Stokes recursion over cell faces.
//! * [`wavelets`]: compactly supported Daubechies bases, tensor wavelets and
//!   sparse coefficient fields.
//! * [`distribution`]: wavelet coefficients of the distribution `f dg` and
//!   empirical regularity fits.
//! * [`geometry`]: domains, box counts, grid Lebesgue boundaries and the
//!   summability criterion for indicator functions.
//! * [`pairing`]: the duality integral `⟨f dg, 𝟙_Ω⟩`.

pub mod distribution;
pub mod dyadic;
pub mod error;
pub mod fit;
pub mod funcrep;
pub mod geometry;
pub mod numeric;
pub mod pairing;
pub mod par;
pub mod sewing;
pub mod wavelets;

pub use distribution::{DistributionConfig, DistributionRep};
pub use dyadic::{DyadicCube, Face, Rectangle, Side};
pub use error::{Error, Result};
pub use funcrep::FunctionRep;
pub use sewing::{IntegralResult, SewingConfig};
pub use wavelets::{CoefficientField, WaveletBasis};
