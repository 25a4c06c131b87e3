//! State-space dynamic substructuring.
//!
//! This crate couples component state-space models through connecting
//! elements by relaxing the interface compatibility condition with Lagrange
//! multipliers, and provides the surrounding machinery that a substructuring
//! workflow needs:
//!
//! - [`model`]: the [`StateSpaceModel`] type and its primitive
//!   transformations (build from mass/stiffness/damping, differentiate,
//!   invert, negate, I/O selection, block-diagonal concatenation),
//! - [`frf`]: frequency-response evaluation on a grid and the [`FrfMatrix`]
//!   container,
//! - [`lumped`]: spring-mass-damper graph assembly and the built-in
//!   two-component benchmark,
//! - [`coupling`]: dual coupling with rigid or relaxed compatibility,
//! - [`primal`]: primal assembly/disassembly over inverted models,
//! - [`reduction`]: coupling-form transformation and minimal-order
//!   post-processing,
//! - [`invsub`]: in-situ identification of connecting elements from an
//!   assembly model,
//! - [`sim`]: zero-order-hold time simulation,
//! - [`io`]: JSON model files and CSV FRF export.
//!
//! All numeric kernels are generic over the scalar type through the
//! [`Scalar`] trait; `f64` aliases are exported at the crate root.

pub mod coupling;
pub mod dof;
pub mod error;
pub mod frf;
pub mod invsub;
pub mod io;
pub mod lumped;
pub mod model;
pub mod primal;
pub mod reduction;
pub mod sim;

pub use dof::{DofKind, DofLabel};
pub use error::Error;
pub use frf::{FrequencyGrid, FrfMatrix, FrfQuantity};
pub use model::{block_diagonal, OutputKind, StateSpaceModel};

/// Scalar type the numeric kernels are generic over.
///
/// `f32` and `f64` implement it; every tolerance in the test suites assumes
/// `f64` precision.
pub trait Scalar:
    nalgebra::RealField + num_traits::FromPrimitive + num_traits::ToPrimitive + Copy + Send + Sync
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `f64` state-space model.
pub type StateSpaceModel64 = model::StateSpaceModel<f64>;
/// `f64` FRF matrix.
pub type FrfMatrix64 = frf::FrfMatrix<f64>;
/// `f64` frequency grid.
pub type FrequencyGrid64 = frf::FrequencyGrid<f64>;
/// `f64` lumped system.
pub type LumpedSystem64 = lumped::LumpedSystem<f64>;

/// Convenience result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;
