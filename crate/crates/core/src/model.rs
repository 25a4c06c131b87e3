//! State-space models and their primitive transformations.
//!
//! The continuous-time quadruple `(A, B, C, D)` is stored dense. Mechanical
//! models built from mass/stiffness/damping matrices use the state ordering
//! `x = [velocities; displacements]`:
//!
//! ```text
//! A = [ -M^-1 V   -M^-1 K ]      B = [ M^-1 ]
//!     [    I          0   ]          [  0   ]
//! ```
//!
//! with `C`, `D` chosen per output kind (displacement `C = [0 I]`, velocity
//! `C = [I 0]`, acceleration `C = [-M^-1 V  -M^-1 K]`, `D = M^-1`).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dof::{check_unique, resolve, DofKind, DofLabel};
use crate::error::Error;
use crate::frf::FrfQuantity;
use crate::Scalar;

/// Reciprocal-condition guard for feed-through inversion.
///
/// Inversion is rejected when `1/cond(D)` falls below this value.
pub const D_INVERSION_RCOND: f64 = 1e-12;

/// Physical meaning of the output vector.
///
/// `Force` marks inverted models: their outputs are the forces conjugate to
/// the original outputs, and the FRF quantity carries the precise meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Displacement,
    Velocity,
    Acceleration,
    Force,
}

impl OutputKind {
    /// FRF quantity of a force-input model with this output kind.
    pub fn base_quantity(self) -> Option<FrfQuantity> {
        match self {
            OutputKind::Displacement => Some(FrfQuantity::Receptance),
            OutputKind::Velocity => Some(FrfQuantity::Mobility),
            OutputKind::Acceleration => Some(FrfQuantity::Accelerance),
            OutputKind::Force => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Displacement => "displacement",
            OutputKind::Velocity => "velocity",
            OutputKind::Acceleration => "acceleration",
            OutputKind::Force => "force",
        }
    }
}

/// Continuous-time state-space model with DOF metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel<T: Scalar> {
    pub(crate) name: String,
    pub(crate) a: DMatrix<T>,
    pub(crate) b: DMatrix<T>,
    pub(crate) c: DMatrix<T>,
    pub(crate) d: DMatrix<T>,
    pub(crate) output_kind: OutputKind,
    pub(crate) quantity: FrfQuantity,
    pub(crate) outputs: Vec<DofLabel>,
    pub(crate) inputs: Vec<DofLabel>,
    /// True when the state vector is ordered
    /// `[interface velocities, interface displacements, remaining states]`.
    pub(crate) coupling_form: bool,
}

impl<T: Scalar> StateSpaceModel<T> {
    /// Builds and validates a model.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        a: DMatrix<T>,
        b: DMatrix<T>,
        c: DMatrix<T>,
        d: DMatrix<T>,
        output_kind: OutputKind,
        quantity: FrfQuantity,
        outputs: Vec<DofLabel>,
        inputs: Vec<DofLabel>,
        coupling_form: bool,
    ) -> Result<Self, Error> {
        let m = StateSpaceModel {
            name: name.into(),
            a,
            b,
            c,
            d,
            output_kind,
            quantity,
            outputs,
            inputs,
            coupling_form,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a mechanical model from mass, stiffness and damping matrices.
    ///
    /// `m` must be symmetric positive definite; `k` and `v` symmetric with
    /// the same size. The resulting model has `2 * dof` states and one
    /// output/input per DOF, labelled by `dofs`.
    pub fn from_mkv(
        name: impl Into<String>,
        m: &DMatrix<T>,
        k: &DMatrix<T>,
        v: &DMatrix<T>,
        kind: OutputKind,
        dofs: Vec<DofLabel>,
    ) -> Result<Self, Error> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::dims("mass matrix", format!("{n}x{n}"), format!("{}x{}", m.nrows(), m.ncols())));
        }
        for (mat, label) in [(k, "K"), (v, "V")] {
            if mat.nrows() != n || mat.ncols() != n {
                return Err(Error::dims(
                    format!("{label} matrix"),
                    format!("{n}x{n}"),
                    format!("{}x{}", mat.nrows(), mat.ncols()),
                ));
            }
        }
        for (mat, label) in [(m, "M"), (k, "K"), (v, "V")] {
            let asym = symmetry_error(mat);
            let scale = mat.amax().max(T::one());
            if asym > T::from_f64(1e-12).unwrap() * scale {
                return Err(Error::NotSymmetric {
                    name: label,
                    max_asym: asym.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if dofs.len() != n {
            return Err(Error::dims("DOF labels", format!("{n}"), format!("{}", dofs.len())));
        }
        // Cholesky verifies positive definiteness; the inverse itself comes
        // from LU, which is exact for the common diagonal mass matrices.
        if m.clone().cholesky().is_none() {
            return Err(Error::Singular {
                name: "M",
                detail: "mass matrix is singular or not positive definite; \
                         attach virtual masses before building"
                    .to_string(),
            });
        }
        let m_inv = m.clone().lu().try_inverse().ok_or(Error::Singular {
            name: "M",
            detail: "mass matrix inversion failed".to_string(),
        })?;

        let minv_v = -&m_inv * v;
        let minv_k = -&m_inv * k;
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, 0), (n, n)).copy_from(&minv_v);
        a.view_mut((0, n), (n, n)).copy_from(&minv_k);
        a.view_mut((n, 0), (n, n))
            .copy_from(&DMatrix::identity(n, n));
        let mut b = DMatrix::zeros(2 * n, n);
        b.view_mut((0, 0), (n, n)).copy_from(&m_inv);

        let (c, d) = match kind {
            OutputKind::Displacement => {
                let mut c = DMatrix::zeros(n, 2 * n);
                c.view_mut((0, n), (n, n)).copy_from(&DMatrix::identity(n, n));
                (c, DMatrix::zeros(n, n))
            }
            OutputKind::Velocity => {
                let mut c = DMatrix::zeros(n, 2 * n);
                c.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
                (c, DMatrix::zeros(n, n))
            }
            OutputKind::Acceleration => {
                let mut c = DMatrix::zeros(n, 2 * n);
                c.view_mut((0, 0), (n, n)).copy_from(&minv_v);
                c.view_mut((0, n), (n, n)).copy_from(&minv_k);
                (c, m_inv)
            }
            OutputKind::Force => {
                return Err(Error::WrongOutputKind {
                    op: "from_mkv",
                    expected: "displacement, velocity or acceleration",
                    found: "force".to_string(),
                })
            }
        };
        let quantity = kind.base_quantity().expect("checked above");
        // A model whose DOFs are all interfaces is already ordered
        // [interface velocities, interface displacements].
        let coupling_form = dofs.iter().all(|d| d.kind == DofKind::Interface);
        StateSpaceModel::new(name, a, b, c, d, kind, quantity, dofs.clone(), dofs, coupling_form)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let n = self.a.nrows();
        if self.a.ncols() != n {
            return Err(Error::dims("A", format!("{n}x{n}"), format!("{}x{}", n, self.a.ncols())));
        }
        if self.b.nrows() != n {
            return Err(Error::dims(
                "rows(B) vs rows(A)",
                format!("{n}"),
                format!("{}", self.b.nrows()),
            ));
        }
        if self.c.ncols() != n {
            return Err(Error::dims(
                "cols(C) vs cols(A)",
                format!("{n}"),
                format!("{}", self.c.ncols()),
            ));
        }
        if self.d.nrows() != self.c.nrows() || self.d.ncols() != self.b.ncols() {
            return Err(Error::dims(
                "D",
                format!("{}x{}", self.c.nrows(), self.b.ncols()),
                format!("{}x{}", self.d.nrows(), self.d.ncols()),
            ));
        }
        if self.outputs.len() != self.c.nrows() {
            return Err(Error::dims(
                "output labels",
                format!("{}", self.c.nrows()),
                format!("{}", self.outputs.len()),
            ));
        }
        if self.inputs.len() != self.b.ncols() {
            return Err(Error::dims(
                "input labels",
                format!("{}", self.b.ncols()),
                format!("{}", self.inputs.len()),
            ));
        }
        for (mat, what) in [(&self.a, "A"), (&self.b, "B"), (&self.c, "C"), (&self.d, "D")] {
            if mat.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("matrix {what} of model '{}'", self.name),
                });
            }
        }
        check_unique(&self.outputs, "model outputs")?;
        check_unique(&self.inputs, "model inputs")?;
        if self.coupling_form && self.output_kind == OutputKind::Displacement {
            self.check_coupling_form_selectors()?;
        }
        Ok(())
    }

    /// Interface displacement rows of a coupling-form model must be exact
    /// unit selectors of states `n_j..2*n_j`.
    fn check_coupling_form_selectors(&self) -> Result<(), Error> {
        let iface: Vec<usize> = self
            .outputs
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == DofKind::Interface)
            .map(|(i, _)| i)
            .collect();
        let nj = iface.len();
        for (pos, &row) in iface.iter().enumerate() {
            for col in 0..self.a.nrows() {
                let want = if col == nj + pos { T::one() } else { T::zero() };
                if self.c[(row, col)] != want {
                    return Err(Error::InvalidParameter {
                        what: "coupling_form",
                        detail: format!(
                            "interface displacement row {row} is not the unit selector of state {}",
                            nj + pos
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<T> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<T> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<T> {
        &self.d
    }
    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }
    pub fn n_outputs(&self) -> usize {
        self.c.nrows()
    }
    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn output_kind(&self) -> OutputKind {
        self.output_kind
    }
    pub fn quantity(&self) -> FrfQuantity {
        self.quantity
    }
    pub fn outputs(&self) -> &[DofLabel] {
        &self.outputs
    }
    pub fn inputs(&self) -> &[DofLabel] {
        &self.inputs
    }
    pub fn is_coupling_form(&self) -> bool {
        self.coupling_form
    }

    /// Indices of interface DOFs in the output list.
    pub fn interface_output_indices(&self) -> Vec<usize> {
        self.outputs
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == DofKind::Interface)
            .map(|(i, _)| i)
            .collect()
    }

    /// One differentiation step: displacement -> velocity -> acceleration.
    ///
    /// `C' = C A`, `D' = C B`; `A` and `B` are unchanged. Applying it twice
    /// to a displacement model gives `C'' = C A A`, `D'' = C A B`.
    pub fn differentiate(&self) -> Result<Self, Error> {
        let kind = match self.output_kind {
            OutputKind::Displacement => OutputKind::Velocity,
            OutputKind::Velocity => OutputKind::Acceleration,
            other => {
                return Err(Error::WrongOutputKind {
                    op: "differentiate",
                    expected: "displacement or velocity",
                    found: other.as_str().to_string(),
                })
            }
        };
        let mut out = self.clone();
        out.d = &self.c * &self.b;
        out.c = &self.c * &self.a;
        out.output_kind = kind;
        out.quantity = self.quantity.differentiated().expect("kind checked");
        Ok(out)
    }

    /// Two differentiation steps (displacement -> acceleration).
    pub fn differentiate_twice(&self) -> Result<Self, Error> {
        self.differentiate()?.differentiate()
    }

    /// Inverts the model: outputs and inputs swap roles.
    ///
    /// `A' = A - B D^-1 C`, `B' = B D^-1`, `C' = -D^-1 C`, `D' = D^-1`.
    /// Requires a square feed-through with `1/cond(D)` at least
    /// [`D_INVERSION_RCOND`]. The result is marked force-kind and its FRF
    /// quantity is the pointwise inverse of the source quantity.
    pub fn invert(&self) -> Result<Self, Error> {
        let nd = self.d.nrows();
        if self.d.ncols() != nd {
            return Err(Error::dims("feed-through D", "square".to_string(), format!("{}x{}", nd, self.d.ncols())));
        }
        if nd == 0 {
            return Err(Error::Singular {
                name: "D",
                detail: "cannot invert a model with no outputs".to_string(),
            });
        }
        let sv = self.d.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        let rcond = if smax > T::zero() { smin / smax } else { T::zero() };
        if rcond.to_f64().unwrap_or(0.0) < D_INVERSION_RCOND {
            return Err(Error::IllConditioned {
                name: "feed-through D",
                rcond: rcond.to_f64().unwrap_or(0.0),
                threshold: D_INVERSION_RCOND,
                hint: "apply residue-mass regularization (add small virtual \
                       masses) before inverting",
            });
        }
        let d_inv = self.d.clone().lu().try_inverse().ok_or(Error::Singular {
            name: "D",
            detail: "singular feed-through".to_string(),
        })?;
        let b_dinv = &self.b * &d_inv;
        let a = &self.a - &b_dinv * &self.c;
        let c = -(&d_inv * &self.c);
        StateSpaceModel::new(
            format!("{}_inv", self.name),
            a,
            b_dinv,
            c,
            d_inv,
            OutputKind::Force,
            self.quantity.inverse(),
            self.inputs.clone(),
            self.outputs.clone(),
            self.coupling_form,
        )
    }

    /// Negative form: `C' = -C`, `D' = -D`. Exact involution.
    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        out.c = -&self.c;
        out.d = -&self.d;
        out
    }

    /// Restricts outputs and inputs to the requested labels, in the
    /// requested order. States are untouched.
    pub fn select_io(&self, keep_outputs: &[&str], keep_inputs: &[&str]) -> Result<Self, Error> {
        if keep_outputs.is_empty() || keep_inputs.is_empty() {
            return Err(Error::EmptySelection { op: "select_io" });
        }
        let orows: Vec<usize> = keep_outputs
            .iter()
            .map(|q| resolve(&self.outputs, q, "select_io outputs"))
            .collect::<Result<_, _>>()?;
        let icols: Vec<usize> = keep_inputs
            .iter()
            .map(|q| resolve(&self.inputs, q, "select_io inputs"))
            .collect::<Result<_, _>>()?;
        let c = self.c.select_rows(orows.iter());
        let d_rows = self.d.select_rows(orows.iter());
        let d = d_rows.select_columns(icols.iter());
        let b = self.b.select_columns(icols.iter());
        StateSpaceModel::new(
            self.name.clone(),
            self.a.clone(),
            b,
            c,
            d,
            self.output_kind,
            self.quantity,
            orows.iter().map(|&i| self.outputs[i].clone()).collect(),
            icols.iter().map(|&i| self.inputs[i].clone()).collect(),
            self.coupling_form,
        )
    }
}

/// Block-diagonal concatenation in list order.
///
/// All models must share output kind and FRF quantity, and the combined
/// label lists must stay unique.
pub fn block_diagonal<T: Scalar>(
    models: &[&StateSpaceModel<T>],
    name: impl Into<String>,
) -> Result<StateSpaceModel<T>, Error> {
    let first = models.first().ok_or(Error::InvalidParameter {
        what: "block_diagonal",
        detail: "empty model list".to_string(),
    })?;
    if models.len() == 1 {
        let mut m = (*first).clone();
        m.name = name.into();
        return Ok(m);
    }
    for m in &models[1..] {
        if m.output_kind != first.output_kind {
            return Err(Error::WrongOutputKind {
                op: "block_diagonal",
                expected: first.output_kind.as_str(),
                found: m.output_kind.as_str().to_string(),
            });
        }
        if m.quantity != first.quantity {
            return Err(Error::MixedQuantities {
                op: "block_diagonal",
                quantities: (first.quantity, m.quantity),
            });
        }
    }
    let n: usize = models.iter().map(|m| m.n_states()).sum();
    let no: usize = models.iter().map(|m| m.n_outputs()).sum();
    let ni: usize = models.iter().map(|m| m.n_inputs()).sum();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, ni);
    let mut c = DMatrix::zeros(no, n);
    let mut d = DMatrix::zeros(no, ni);
    let mut outputs = Vec::with_capacity(no);
    let mut inputs = Vec::with_capacity(ni);
    let (mut i0, mut o0, mut u0) = (0usize, 0usize, 0usize);
    for m in models {
        a.view_mut((i0, i0), (m.n_states(), m.n_states())).copy_from(&m.a);
        b.view_mut((i0, u0), (m.n_states(), m.n_inputs())).copy_from(&m.b);
        c.view_mut((o0, i0), (m.n_outputs(), m.n_states())).copy_from(&m.c);
        d.view_mut((o0, u0), (m.n_outputs(), m.n_inputs())).copy_from(&m.d);
        outputs.extend(m.outputs.iter().cloned());
        inputs.extend(m.inputs.iter().cloned());
        i0 += m.n_states();
        o0 += m.n_outputs();
        u0 += m.n_inputs();
    }
    StateSpaceModel::new(
        name,
        a,
        b,
        c,
        d,
        first.output_kind,
        first.quantity,
        outputs,
        inputs,
        false,
    )
}

fn symmetry_error<T: Scalar>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let e = (m[(i, j)] - m[(j, i)]).abs();
            if e > worst {
                worst = e;
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dof::DofLabel;
    use nalgebra::dmatrix;

    fn sdof(m: f64, k: f64, v: f64, kind: OutputKind) -> StateSpaceModel<f64> {
        StateSpaceModel::from_mkv(
            "sdof",
            &dmatrix![m],
            &dmatrix![k],
            &dmatrix![v],
            kind,
            vec![DofLabel::interface("x", "sdof")],
        )
        .unwrap()
    }

    #[test]
    fn sdof_acceleration_matrices() {
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        assert_eq!(s.a, dmatrix![0.0, -1.0; 1.0, 0.0]);
        assert_eq!(s.b, dmatrix![1.0; 0.0]);
        assert_eq!(s.c, dmatrix![0.0, -1.0]);
        assert_eq!(s.d, dmatrix![1.0]);
        assert_eq!(s.n_states(), 2);
    }

    #[test]
    fn free_mass_displacement_model() {
        let s = StateSpaceModel::from_mkv(
            "mass",
            &dmatrix![2.0],
            &dmatrix![0.0],
            &dmatrix![0.0],
            OutputKind::Displacement,
            vec![DofLabel::interface("x", "mass")],
        )
        .unwrap();
        assert_eq!(s.a, dmatrix![0.0, 0.0; 1.0, 0.0]);
        assert_eq!(s.c, dmatrix![0.0, 1.0]);
        assert_eq!(s.d, dmatrix![0.0]);
    }

    #[test]
    fn fixture_pair_acceleration_feedthrough() {
        // two 2 kg masses joined by the (1e5, 20) spring-damper
        let m = dmatrix![2.0, 0.0; 0.0, 2.0];
        let k = dmatrix![1e5, -1e5; -1e5, 1e5];
        let v = dmatrix![20.0, -20.0; -20.0, 20.0];
        let dofs = vec![
            DofLabel::interface("T1", "m1_fixtures"),
            DofLabel::interface("T2", "m1_fixtures"),
        ];
        let s = StateSpaceModel::from_mkv("fmf", &m, &k, &v, OutputKind::Acceleration, dofs).unwrap();
        assert_eq!(s.n_states(), 4);
        assert_eq!(s.d, dmatrix![0.5, 0.0; 0.0, 0.5]);
    }

    #[test]
    fn singular_mass_rejected() {
        let err = StateSpaceModel::from_mkv(
            "bad",
            &dmatrix![0.0],
            &dmatrix![1.0],
            &dmatrix![0.0],
            OutputKind::Acceleration,
            vec![DofLabel::interface("x", "bad")],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Singular { name: "M", .. }));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = StateSpaceModel::from_mkv(
            "bad",
            &dmatrix![1.0],
            &dmatrix![1.0, 0.0; 0.0, 1.0],
            &dmatrix![0.0],
            OutputKind::Acceleration,
            vec![DofLabel::interface("x", "bad")],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn differentiate_twice_matches_acceleration_build() {
        let disp = sdof(1.0, 1.0, 0.0, OutputKind::Displacement);
        let acc = disp.differentiate_twice().unwrap();
        let built = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        assert_eq!(acc.c, built.c);
        assert_eq!(acc.d, built.d);
        assert_eq!(acc.output_kind, OutputKind::Acceleration);
        assert_eq!(acc.quantity, FrfQuantity::Accelerance);
    }

    #[test]
    fn newton_models_have_zero_velocity_feedthrough() {
        // C_disp * B = 0 for mechanical builds, so one step gives D' = 0
        let disp = sdof(3.0, 2e4, 15.0, OutputKind::Displacement);
        let vel = disp.differentiate().unwrap();
        assert_eq!(vel.d, dmatrix![0.0]);
        assert_eq!(vel.output_kind, OutputKind::Velocity);
    }

    #[test]
    fn differentiate_rejects_acceleration() {
        let acc = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        assert!(matches!(
            acc.differentiate(),
            Err(Error::WrongOutputKind { op: "differentiate", .. })
        ));
    }

    #[test]
    fn invert_swaps_roles_and_marks_force() {
        let acc = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        let inv = acc.invert().unwrap();
        assert_eq!(inv.output_kind, OutputKind::Force);
        assert_eq!(inv.quantity, FrfQuantity::ApparentMass);
        assert_eq!(inv.outputs(), acc.inputs());
        assert_eq!(inv.inputs(), acc.outputs());
    }

    #[test]
    fn invert_rejects_singular_feedthrough() {
        let disp = sdof(1.0, 1.0, 0.0, OutputKind::Displacement);
        let err = disp.invert().unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. } | Error::Singular { .. }));
    }

    #[test]
    fn negate_is_exact_involution() {
        let acc = sdof(2.0, 3e4, 7.0, OutputKind::Acceleration);
        let back = acc.negate().negate();
        assert_eq!(back.c, acc.c);
        assert_eq!(back.d, acc.d);
    }

    #[test]
    fn select_io_keep_all_is_identity() {
        let m = dmatrix![2.0, 0.0; 0.0, 2.0];
        let k = dmatrix![1e5, -1e5; -1e5, 1e5];
        let v = dmatrix![20.0, -20.0; -20.0, 20.0];
        let dofs = vec![
            DofLabel::interface("T1", "f"),
            DofLabel::interface("T2", "f"),
        ];
        let s = StateSpaceModel::from_mkv("fmf", &m, &k, &v, OutputKind::Acceleration, dofs).unwrap();
        let kept = s.select_io(&["T1", "T2"], &["T1", "T2"]).unwrap();
        assert_eq!(kept.c, s.c);
        assert_eq!(kept.d, s.d);
        let err = s.select_io(&[], &["T1"]).unwrap_err();
        assert!(matches!(err, Error::EmptySelection { .. }));
        assert!(s.select_io(&["T3"], &["T1"]).is_err());
    }

    #[test]
    fn block_diagonal_single_is_identity() {
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        let b = block_diagonal(&[&s], "one").unwrap();
        assert_eq!(b.a, s.a);
        assert_eq!(b.d, s.d);
    }

    #[test]
    fn block_diagonal_two_models() {
        let s1 = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        let mut s2 = sdof(2.0, 5.0, 0.1, OutputKind::Acceleration);
        s2.outputs = vec![DofLabel::interface("x", "other")];
        s2.inputs = s2.outputs.clone();
        let b = block_diagonal(&[&s1, &s2], "pair").unwrap();
        assert_eq!(b.n_states(), 4);
        assert_eq!(b.a[(2, 3)], s2.a[(0, 1)]);
        assert_eq!(b.a[(0, 2)], 0.0);

        // duplicate labels rejected
        let dup = block_diagonal(&[&s1, &s1], "dup");
        assert!(matches!(dup, Err(Error::DuplicateLabel { .. })));

        // mixed kinds rejected
        let disp = sdof(1.0, 1.0, 0.0, OutputKind::Displacement);
        assert!(matches!(
            block_diagonal(&[&s1, &disp], "mix"),
            Err(Error::WrongOutputKind { .. })
        ));
    }
}
