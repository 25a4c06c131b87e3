//! Ground-truth FRFs straight from mass/stiffness/damping matrices.
//!
//! The receptance comes from the per-frequency dense complex solve
//! `(K - w^2 M + jw V) Y = I`; no state-space construction is involved,
//! which makes these the reference for everything the state-space pipeline
//! produces.

use nalgebra::{Complex, DMatrix};
use substruct::frf::FrequencyGrid;
use substruct::lumped::LumpedSystem;
use substruct::{Error, FrfMatrix, FrfQuantity, Scalar};

/// Receptance by direct inversion of the dynamic stiffness matrix.
pub fn receptance_from_mkv<T: Scalar>(
    sys: &LumpedSystem<T>,
    grid: &FrequencyGrid<T>,
) -> Result<FrfMatrix<T>, Error> {
    solve(sys, grid, false)
}

/// Accelerance: `-w^2` times the receptance.
pub fn accelerance_from_mkv<T: Scalar>(
    sys: &LumpedSystem<T>,
    grid: &FrequencyGrid<T>,
) -> Result<FrfMatrix<T>, Error> {
    solve(sys, grid, true)
}

fn solve<T: Scalar>(
    sys: &LumpedSystem<T>,
    grid: &FrequencyGrid<T>,
    accelerance: bool,
) -> Result<FrfMatrix<T>, Error> {
    let (m, k, v) = sys.assemble_mkv();
    let n = sys.n_dof();
    let mc: DMatrix<Complex<T>> = m.map(|x| Complex::new(x, T::zero()));
    let kc: DMatrix<Complex<T>> = k.map(|x| Complex::new(x, T::zero()));
    let vc: DMatrix<Complex<T>> = v.map(|x| Complex::new(x, T::zero()));
    let mut data = Vec::with_capacity(grid.len());
    let mut singular = Vec::new();
    for (idx, &w) in grid.omegas().iter().enumerate() {
        let w2 = w * w;
        let z = &kc * Complex::new(T::one(), T::zero())
            - &mc * Complex::new(w2, T::zero())
            + &vc * Complex::new(T::zero(), w);
        match z.lu().try_inverse() {
            Some(mut y) => {
                if accelerance {
                    y *= Complex::new(-w2, T::zero());
                }
                data.push(y);
            }
            None => {
                singular.push(idx);
                data.push(DMatrix::zeros(n, n));
            }
        }
    }
    if let Some(&first) = singular.first() {
        return Err(Error::SingularAtFrequency {
            count: singular.len(),
            total: grid.len(),
            first_hz: (grid.omegas()[first] / T::two_pi())
                .to_f64()
                .unwrap_or(f64::NAN),
        });
    }
    FrfMatrix::new(
        grid.omegas().to_vec(),
        data,
        if accelerance {
            FrfQuantity::Accelerance
        } else {
            FrfQuantity::Receptance
        },
        sys.dof_labels(),
        sys.dof_labels(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use substruct::lumped::testcase;

    #[test]
    fn accelerance_is_minus_w2_receptance() {
        let sys = testcase::component_a::<f64>();
        let grid = FrequencyGrid::linear_hz(1.0, 20.0, 16).unwrap();
        let r = receptance_from_mkv(&sys, &grid).unwrap();
        let a = accelerance_from_mkv(&sys, &grid).unwrap();
        for (k, &w) in grid.omegas().iter().enumerate() {
            let scaled = r.at(k) * Complex::new(-w * w, 0.0);
            let d = (&scaled - a.at(k)).norm() / a.at(k).norm();
            assert!(d < 1e-14);
        }
    }
}
