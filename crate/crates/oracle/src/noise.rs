//! Reproducible Gaussian perturbation of FRF data.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use substruct::{Error, FrfMatrix, Scalar};

/// Zero-mean Gaussian noise specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation in the FRF's output units.
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self, Error> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "noise sigma",
                detail: "must be >= 0".to_string(),
            });
        }
        Ok(NoiseSpec { sigma, seed })
    }
}

/// Perturbs real and imaginary parts of every FRF entry with independent
/// Gaussian draws.
///
/// The draw order is fixed (outputs, then inputs, then frequencies, real
/// part before imaginary part), so a seed reproduces the same perturbation
/// regardless of storage layout.
pub fn add_noise<T: Scalar>(h: &FrfMatrix<T>, ns: &NoiseSpec) -> Result<FrfMatrix<T>, Error> {
    if ns.sigma == 0.0 {
        return Ok(h.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ns.seed);
    let normal = Normal::new(0.0, ns.sigma).map_err(|e| Error::InvalidParameter {
        what: "noise sigma",
        detail: e.to_string(),
    })?;
    let mut data: Vec<_> = h.data().to_vec();
    for i in 0..h.outputs().len() {
        for j in 0..h.inputs().len() {
            for m in data.iter_mut() {
                let gamma = T::from_f64(normal.sample(&mut rng)).unwrap();
                let theta = T::from_f64(normal.sample(&mut rng)).unwrap();
                m[(i, j)] += Complex::new(gamma, theta);
            }
        }
    }
    FrfMatrix::new(
        h.frequencies().to_vec(),
        data,
        h.quantity(),
        h.outputs().to_vec(),
        h.inputs().to_vec(),
    )
}
