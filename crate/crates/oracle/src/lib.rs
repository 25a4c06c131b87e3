//! Independent frequency-domain verification oracles.
//!
//! Every routine here works on sampled FRF matrices with per-frequency
//! dense complex algebra only, without state matrices or resolvents, so the
//! results cross-check the state-space pipeline through a disjoint
//! computational path. The [`substruct`] types ([`FrfMatrix`],
//! [`SignedMapping`], [`LocalizationMatrix`]) are shared as containers;
//! the dynamics computations are not.
//!
//! [`FrfMatrix`]: substruct::FrfMatrix
//! [`SignedMapping`]: substruct::coupling::SignedMapping
//! [`LocalizationMatrix`]: substruct::primal::LocalizationMatrix

pub mod compare;
pub mod direct;
pub mod fbs;
pub mod is;
pub mod noise;
pub mod primal;

pub use compare::{compare_frf, FrfComparison};
pub use fbs::{fbs_couple_relaxed, fbs_couple_rigid};
pub use is::{invert_frf, is_on_frf};
pub use noise::{add_noise, NoiseSpec};
pub use primal::primal_fbs;
