//! Primal assembly and disassembly over inverted (apparent-mass) models.
//!
//! Compatibility is enforced by retaining the unique DOF set through a
//! Boolean localization matrix `L` with `B_C L = 0`:
//!
//! ```text
//! A' = A_D      B' = B_D L      C' = L' C_D      D' = L' D_D L
//! ```
//!
//! No matrix is inverted, so disassembly works even when the identified
//! remainder is massless.

use nalgebra::DMatrix;

use crate::coupling::SignedMapping;
use crate::dof::DofLabel;
use crate::error::Error;
use crate::frf::FrfQuantity;
use crate::model::{block_diagonal, OutputKind, StateSpaceModel};
use crate::Scalar;

/// Boolean basis of the nullspace of a signed mapping matrix.
///
/// Paired DOFs share one retained column (the first-side label survives);
/// unpaired DOFs map to their own column.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationMatrix {
    matrix: DMatrix<i32>,
    retained: Vec<DofLabel>,
    source: Vec<DofLabel>,
}

impl LocalizationMatrix {
    pub fn matrix(&self) -> &DMatrix<i32> {
        &self.matrix
    }
    pub fn retained_dofs(&self) -> &[DofLabel] {
        &self.retained
    }
    pub fn source_dofs(&self) -> &[DofLabel] {
        &self.source
    }

    fn as_scalar<T: Scalar>(&self) -> DMatrix<T> {
        self.matrix.map(|v| T::from_i32(v).unwrap())
    }
}

/// Builds the localization matrix from a signed mapping.
pub fn localization_from_bc(bc: &SignedMapping) -> LocalizationMatrix {
    let outputs = bc.outputs();
    let n_y = outputs.len();
    // beta-side DOFs merge into their alpha partner's column
    let mut merged_into: Vec<Option<usize>> = vec![None; n_y];
    for (la, lb) in bc.pairs() {
        let ia = outputs.iter().position(|l| l.same_dof(la)).expect("bc validated");
        let ib = outputs.iter().position(|l| l.same_dof(lb)).expect("bc validated");
        merged_into[ib] = Some(ia);
    }
    let mut column_of: Vec<Option<usize>> = vec![None; n_y];
    let mut retained = Vec::new();
    for (i, label) in outputs.iter().enumerate() {
        if merged_into[i].is_none() {
            column_of[i] = Some(retained.len());
            retained.push(label.clone());
        }
    }
    let mut matrix = DMatrix::zeros(n_y, retained.len());
    for i in 0..n_y {
        let col = match merged_into[i] {
            Some(alpha) => column_of[alpha].expect("alpha side is retained"),
            None => column_of[i].expect("set above"),
        };
        matrix[(i, col)] = 1;
    }
    debug_assert_eq!(bc.matrix() * &matrix, DMatrix::zeros(bc.n_pairs(), retained.len()));
    LocalizationMatrix {
        matrix,
        retained,
        source: outputs.to_vec(),
    }
}

fn check_force_kind<T: Scalar>(m: &StateSpaceModel<T>, op: &'static str) -> Result<(), Error> {
    if m.output_kind() != OutputKind::Force || m.quantity() != FrfQuantity::ApparentMass {
        return Err(Error::WrongOutputKind {
            op,
            expected: "inverted acceleration (apparent-mass) models",
            found: format!("{} / {:?}", m.output_kind().as_str(), m.quantity()),
        });
    }
    Ok(())
}

/// Primally assembles inverted models: block-diagonal stack, then
/// `B L`, `L' C`, `L' D L`. The state count is preserved.
pub fn primal_assemble<T: Scalar>(
    inverted_models: &[&StateSpaceModel<T>],
    lo: &LocalizationMatrix,
) -> Result<StateSpaceModel<T>, Error> {
    for m in inverted_models {
        check_force_kind(m, "primal_assemble")?;
    }
    let stacked = block_diagonal(inverted_models, "primal_stack")?;
    if stacked.outputs().len() != lo.source.len()
        || stacked
            .outputs()
            .iter()
            .zip(&lo.source)
            .any(|(a, b)| !a.same_dof(b))
    {
        return Err(Error::LabelMismatch {
            detail: "localization rows do not match the stacked model outputs".to_string(),
        });
    }
    let l: DMatrix<T> = lo.as_scalar();
    let lt = l.transpose();
    let b = stacked.b() * &l;
    let c = &lt * stacked.c();
    let d = &lt * stacked.d() * &l;
    StateSpaceModel::new(
        "primal_assembly",
        stacked.a().clone(),
        b,
        c,
        d,
        OutputKind::Force,
        FrfQuantity::ApparentMass,
        lo.retained.clone(),
        lo.retained.clone(),
        false,
    )
}

/// Primal disassembly: the removed models enter in negative form, then the
/// set is primally assembled. The result's apparent mass identifies the
/// remaining substructure.
pub fn primal_disassemble<T: Scalar>(
    assembly_inverted: &StateSpaceModel<T>,
    remove_inverted: &[&StateSpaceModel<T>],
    lo: &LocalizationMatrix,
) -> Result<StateSpaceModel<T>, Error> {
    check_force_kind(assembly_inverted, "primal_disassemble")?;
    for m in remove_inverted {
        check_force_kind(m, "primal_disassemble")?;
    }
    let negated: Vec<StateSpaceModel<T>> = remove_inverted.iter().map(|m| m.negate()).collect();
    let mut all: Vec<&StateSpaceModel<T>> = vec![assembly_inverted];
    all.extend(negated.iter());
    primal_assemble(&all, lo)
}

/// Output labels of a stacked model list, in stacking order.
pub fn stacked_outputs<T: Scalar>(models: &[&StateSpaceModel<T>]) -> Vec<DofLabel> {
    let mut out = Vec::new();
    for m in models {
        out.extend(m.outputs().iter().cloned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::build_bc;
    use crate::dof::DofLabel;

    #[test]
    fn localization_shares_columns_for_pairs() {
        let outs = vec![
            DofLabel::interface("w", "A"),
            DofLabel::interface("x", "A"),
            DofLabel::interface("y", "B"),
            DofLabel::interface("z", "B"),
        ];
        let bc = build_bc(&outs, &[("x", "y")], 1).unwrap();
        let lo = localization_from_bc(&bc);
        assert_eq!(lo.matrix().nrows(), 4);
        assert_eq!(lo.matrix().ncols(), 3);
        // rows x and y share a column; alpha-side label is retained
        let col_x = (0..3).find(|&j| lo.matrix()[(1, j)] == 1).unwrap();
        let col_y = (0..3).find(|&j| lo.matrix()[(2, j)] == 1).unwrap();
        assert_eq!(col_x, col_y);
        assert!(lo.retained_dofs().iter().any(|l| l.name == "x" && l.structure == "A"));
        assert!(!lo.retained_dofs().iter().any(|l| l.name == "y"));
        // B_C * L = 0 exactly
        let prod = bc.matrix() * lo.matrix();
        assert!(prod.iter().all(|&v| v == 0));
    }

    #[test]
    fn empty_bc_gives_identity() {
        let outs = vec![DofLabel::interface("x", "A"), DofLabel::interface("y", "B")];
        let bc = build_bc(&outs, &[], 1).unwrap();
        let lo = localization_from_bc(&bc);
        assert_eq!(lo.matrix(), &nalgebra::DMatrix::<i32>::identity(2, 2));
    }

    #[test]
    fn disassembling_nothing_is_the_identity() {
        use crate::lumped::testcase;
        let asm = testcase::mount_m1_with_fixtures::<f64>()
            .apparent_mass_model(None)
            .unwrap();
        let bc = build_bc(asm.outputs(), &[], 1).unwrap();
        let lo = localization_from_bc(&bc);
        let out = primal_disassemble(&asm, &[], &lo).unwrap();
        assert_eq!(out.a(), asm.a());
        assert_eq!(out.b(), asm.b());
        assert_eq!(out.c(), asm.c());
        assert_eq!(out.d(), asm.d());
    }

    #[test]
    fn assemble_rejects_wrong_kind_and_ordering() {
        use crate::lumped::testcase;
        let acc = testcase::mount_m1_with_fixtures::<f64>()
            .to_model(OutputKind::Acceleration)
            .unwrap();
        let outs = acc.outputs().to_vec();
        let bc = build_bc(&outs, &[], 1).unwrap();
        let lo = localization_from_bc(&bc);
        // not inverted: rejected
        assert!(primal_assemble(&[&acc], &lo).is_err());
        let inv = acc.invert().unwrap();
        // single model with identity localization: matrices unchanged
        let asm = primal_assemble(&[&inv], &lo).unwrap();
        assert_eq!(asm.a(), inv.a());
        assert_eq!(asm.d(), inv.d());
    }
}
