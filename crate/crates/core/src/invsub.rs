//! In-situ identification of connecting elements from assembly models.
//!
//! For a massless element without cross couplings, the off-diagonal
//! apparent-mass terms of an assembly containing it are a property of the
//! element alone. Retaining one off-diagonal term from the inverted
//! assembly model, flipping its sign and inverting the result yields the
//! element model consumed by relaxed coupling. No decoupling operation is
//! involved, so the identified model carries no spurious states.

use crate::error::Error;
use crate::frf::FrfQuantity;
use crate::lumped::{add_residue_mass, ResidueSpec};
use crate::model::{OutputKind, StateSpaceModel};
use crate::reduction::to_coupling_form;
use crate::Scalar;

/// Output/input retention choice: `side1_outputs[i]` pairs with
/// `side2_inputs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsSelection {
    pub side1_outputs: Vec<String>,
    pub side2_inputs: Vec<String>,
}

impl IsSelection {
    pub fn new(side1_outputs: Vec<String>, side2_inputs: Vec<String>) -> Result<Self, Error> {
        if side1_outputs.is_empty() || side2_inputs.is_empty() {
            return Err(Error::EmptySelection { op: "IsSelection" });
        }
        if side1_outputs.len() != side2_inputs.len() {
            return Err(Error::dims(
                "selection sides",
                format!("{}", side1_outputs.len()),
                format!("{}", side2_inputs.len()),
            ));
        }
        if side1_outputs.iter().any(|a| side2_inputs.contains(a)) {
            return Err(Error::InvalidParameter {
                what: "selection",
                detail: "sides must be disjoint".to_string(),
            });
        }
        Ok(IsSelection {
            side1_outputs,
            side2_inputs,
        })
    }

    fn side1_refs(&self) -> Vec<&str> {
        self.side1_outputs.iter().map(String::as_str).collect()
    }
    fn side2_refs(&self) -> Vec<&str> {
        self.side2_inputs.iter().map(String::as_str).collect()
    }
}

/// Retains the off-diagonal apparent-mass block (side-1 outputs, side-2
/// inputs) of an inverted assembly model. All states are kept.
pub fn is_extract_offdiagonal<T: Scalar>(
    assembly_inverted: &StateSpaceModel<T>,
    sel: &IsSelection,
) -> Result<StateSpaceModel<T>, Error> {
    if assembly_inverted.output_kind() != OutputKind::Force
        || assembly_inverted.quantity() != FrfQuantity::ApparentMass
    {
        return Err(Error::WrongOutputKind {
            op: "is_extract_offdiagonal",
            expected: "inverted acceleration (apparent-mass)",
            found: format!(
                "{} / {:?}",
                assembly_inverted.output_kind().as_str(),
                assembly_inverted.quantity()
            ),
        });
    }
    assembly_inverted.select_io(&sel.side1_refs(), &sel.side2_refs())
}

/// Diagonal apparent-mass model: the negated off-diagonal term.
pub fn is_diagonal_apparent_mass<T: Scalar>(offdiag: &StateSpaceModel<T>) -> StateSpaceModel<T> {
    offdiag.negate()
}

/// Inverts the diagonal apparent-mass model, producing the
/// accelerance-quantity element model consumed by relaxed coupling.
pub fn is_inverted_diagonal<T: Scalar>(
    diag: &StateSpaceModel<T>,
) -> Result<StateSpaceModel<T>, Error> {
    diag.invert()
}

/// Options of the end-to-end identification chain.
#[derive(Debug, Clone)]
pub struct IsOptions<T: Scalar> {
    /// Transform the assembly into coupling form with respect to the
    /// side-2 (input-side) DOFs before differentiating. Required when the
    /// identified element is to enter minimal-order post-processing.
    pub coupling_form: bool,
    /// Residue mass added to the diagonal term before the final inversion.
    /// Mandatory for exact massless elements, whose extracted feed-through
    /// is identically zero.
    pub residue: Option<ResidueSpec<T>>,
}

/// Full identification chain on a displacement assembly model:
/// optional coupling-form transform, double differentiation, inversion,
/// off-diagonal retention, negation, residue regularization, inversion.
pub fn is_identify_ce<T: Scalar>(
    assembly_disp: &StateSpaceModel<T>,
    sel: &IsSelection,
    opts: &IsOptions<T>,
) -> Result<StateSpaceModel<T>, Error> {
    if assembly_disp.output_kind() != OutputKind::Displacement {
        return Err(Error::WrongOutputKind {
            op: "is_identify_ce",
            expected: "displacement",
            found: assembly_disp.output_kind().as_str().to_string(),
        });
    }
    let staged;
    let model = if opts.coupling_form {
        // The element model's leading states must track the beta-side
        // (input-side) interface motion, so the transform is taken with
        // respect to the side-2 DOFs.
        staged = to_coupling_form(assembly_disp, Some(&sel.side2_refs()))?;
        &staged
    } else {
        assembly_disp
    };
    let inv = model.differentiate_twice()?.invert()?;
    let off = is_extract_offdiagonal(&inv, sel)?;
    let mut diag = is_diagonal_apparent_mass(&off);
    if let Some(r) = &opts.residue {
        diag = add_residue_mass(&diag, r)?;
    }
    is_inverted_diagonal(&diag)
}
