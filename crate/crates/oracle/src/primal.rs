//! Frequency-domain primal assembly.

use nalgebra::{Complex, DMatrix};
use substruct::primal::LocalizationMatrix;
use substruct::{Error, FrfMatrix, FrfQuantity, Scalar};

/// Primal assembly per frequency line: `Z' = L' Z L`.
///
/// `z` is the block-diagonal apparent-mass FRF of the substructures in the
/// localization's source ordering. Disassembly is the same call with the
/// removed blocks negated first.
pub fn primal_fbs<T: Scalar>(
    z: &FrfMatrix<T>,
    lo: &LocalizationMatrix,
) -> Result<FrfMatrix<T>, Error> {
    if z.quantity() != FrfQuantity::ApparentMass {
        return Err(Error::MixedQuantities {
            op: "primal_fbs",
            quantities: (FrfQuantity::ApparentMass, z.quantity()),
        });
    }
    if z.outputs().len() != lo.source_dofs().len()
        || z.outputs()
            .iter()
            .zip(lo.source_dofs())
            .any(|(a, b)| !a.same_dof(b))
    {
        return Err(Error::LabelMismatch {
            detail: "localization rows do not match the FRF outputs".to_string(),
        });
    }
    let l: DMatrix<Complex<T>> = lo
        .matrix()
        .map(|v| Complex::new(T::from_i32(v).unwrap(), T::zero()));
    let lt = l.transpose();
    let data = z.data().iter().map(|m| &lt * m * &l).collect();
    FrfMatrix::new(
        z.frequencies().to_vec(),
        data,
        FrfQuantity::ApparentMass,
        lo.retained_dofs().to_vec(),
        lo.retained_dofs().to_vec(),
    )
}
