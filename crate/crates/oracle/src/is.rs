//! Inverse substructuring on sampled FRFs.

use nalgebra::DMatrix;
use substruct::invsub::IsSelection;
use substruct::{Error, FrfMatrix, FrfQuantity, Scalar};

/// Pointwise matrix inverse of a square FRF; the quantity flips to its
/// force/motion counterpart (accelerance <-> apparent mass, ...).
pub fn invert_frf<T: Scalar>(h: &FrfMatrix<T>) -> Result<FrfMatrix<T>, Error> {
    if h.outputs().len() != h.inputs().len() {
        return Err(Error::DimensionMismatch {
            context: "invert_frf".to_string(),
            expected: "square FRF".to_string(),
            found: format!("{}x{}", h.outputs().len(), h.inputs().len()),
        });
    }
    let mut data = Vec::with_capacity(h.n_lines());
    let mut singular = Vec::new();
    for k in 0..h.n_lines() {
        match h.at(k).clone().lu().try_inverse() {
            Some(inv) => data.push(inv),
            None => {
                singular.push(k);
                data.push(DMatrix::zeros(h.outputs().len(), h.inputs().len()));
            }
        }
    }
    if let Some(&first) = singular.first() {
        return Err(Error::SingularAtFrequency {
            count: singular.len(),
            total: h.n_lines(),
            first_hz: (h.frequencies()[first] / T::two_pi())
                .to_f64()
                .unwrap_or(f64::NAN),
        });
    }
    FrfMatrix::new(
        h.frequencies().to_vec(),
        data,
        h.quantity().inverse(),
        h.inputs().to_vec(),
        h.outputs().to_vec(),
    )
}

/// Inverse substructuring on an assembly's apparent-mass FRF: the negated
/// off-diagonal block (side-1 outputs, side-2 inputs) is the connecting
/// element's diagonal apparent mass.
pub fn is_on_frf<T: Scalar>(
    z_assembly: &FrfMatrix<T>,
    sel: &IsSelection,
) -> Result<FrfMatrix<T>, Error> {
    if z_assembly.quantity() != FrfQuantity::ApparentMass {
        return Err(Error::MixedQuantities {
            op: "is_on_frf",
            quantities: (FrfQuantity::ApparentMass, z_assembly.quantity()),
        });
    }
    let side1: Vec<&str> = sel.side1_outputs.iter().map(String::as_str).collect();
    let side2: Vec<&str> = sel.side2_inputs.iter().map(String::as_str).collect();
    Ok(z_assembly.select(&side1, &side2)?.negated())
}
