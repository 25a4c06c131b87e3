//! Frequency-based dual assembly with rigid or relaxed compatibility.

use nalgebra::{Complex, DMatrix};
use substruct::coupling::SignedMapping;
use substruct::{Error, FrfMatrix, Scalar};

fn check_outputs<T: Scalar>(h: &FrfMatrix<T>, bc: &SignedMapping, op: &'static str) -> Result<(), Error> {
    if h.outputs().len() != bc.outputs().len()
        || h.outputs()
            .iter()
            .zip(bc.outputs())
            .any(|(a, b)| !a.same_dof(b))
    {
        return Err(Error::LabelMismatch {
            detail: format!("{op}: mapping columns do not match the FRF outputs"),
        });
    }
    Ok(())
}

fn couple_lines<T: Scalar>(
    h: &FrfMatrix<T>,
    bc: &SignedMapping,
    relax: Option<&[&FrfMatrix<T>]>,
) -> Result<FrfMatrix<T>, Error> {
    let nj = bc.n_pairs();
    if nj == 0 {
        return Ok(h.clone());
    }
    let bcr: DMatrix<Complex<T>> = bc
        .matrix()
        .map(|v| Complex::new(T::from_i32(v).unwrap(), T::zero()));
    let bct = bcr.transpose();
    let n_f = h.n_lines();

    let mut data = Vec::with_capacity(n_f);
    let mut singular: Vec<usize> = Vec::new();
    for k in 0..n_f {
        let hk = h.at(k);
        let mut iface = &bcr * hk * &bct;
        if let Some(ces) = relax {
            for (r, ce) in ces.iter().enumerate() {
                iface[(r, r)] += ce.at(k)[(0, 0)];
            }
        }
        let ghk = &bcr * hk;
        match iface.lu().solve(&ghk) {
            Some(x) => data.push(hk - hk * &bct * x),
            None => {
                singular.push(k);
                data.push(hk.clone());
            }
        }
    }
    if let Some(&first) = singular.first() {
        return Err(Error::SingularAtFrequency {
            count: singular.len(),
            total: n_f,
            first_hz: (h.frequencies()[first] / T::two_pi())
                .to_f64()
                .unwrap_or(f64::NAN),
        });
    }
    let _ = nj;
    FrfMatrix::new(
        h.frequencies().to_vec(),
        data,
        h.quantity(),
        h.outputs().to_vec(),
        h.inputs().to_vec(),
    )
}

/// Rigid dual assembly per frequency line:
/// `H' = H - H Bc' (Bc H Bc')^-1 Bc H`.
pub fn fbs_couple_rigid<T: Scalar>(
    h: &FrfMatrix<T>,
    bc: &SignedMapping,
) -> Result<FrfMatrix<T>, Error> {
    check_outputs(h, bc, "fbs_couple_rigid")?;
    couple_lines(h, bc, None)
}

/// Relaxed dual assembly: the connecting elements' inverted diagonal
/// apparent-mass FRFs enter the interface inverse,
/// `H' = H - H Bc' (Bc H Bc' + R)^-1 Bc H`, with `R` block-diagonal over
/// the pairs (`ce_inv_apparent_mass[r]` is the 1x1 FRF of pair `r`).
pub fn fbs_couple_relaxed<T: Scalar>(
    h: &FrfMatrix<T>,
    ce_inv_apparent_mass: &[&FrfMatrix<T>],
    bc: &SignedMapping,
) -> Result<FrfMatrix<T>, Error> {
    check_outputs(h, bc, "fbs_couple_relaxed")?;
    if ce_inv_apparent_mass.len() != bc.n_pairs() {
        return Err(Error::DimensionMismatch {
            context: "fbs_couple_relaxed connecting elements".to_string(),
            expected: format!("{}", bc.n_pairs()),
            found: format!("{}", ce_inv_apparent_mass.len()),
        });
    }
    for ce in ce_inv_apparent_mass {
        if ce.frequencies() != h.frequencies() {
            return Err(Error::GridMismatch {
                detail: "connecting-element FRF sampled on a different grid".to_string(),
            });
        }
        if ce.outputs().len() != 1 || ce.inputs().len() != 1 {
            return Err(Error::DimensionMismatch {
                context: "connecting-element FRF".to_string(),
                expected: "1x1".to_string(),
                found: format!("{}x{}", ce.outputs().len(), ce.inputs().len()),
            });
        }
    }
    couple_lines(h, bc, Some(ce_inv_apparent_mass))
}
