//! Frequency-response evaluation and the FRF container.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dof::{resolve, DofLabel};
use crate::error::Error;
use crate::model::StateSpaceModel;
use crate::Scalar;

/// Physical quantity represented by an FRF matrix.
///
/// Motion-over-force quantities pair with their force-over-motion inverses:
/// receptance/dynamic stiffness, mobility/mechanical impedance,
/// accelerance/apparent mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrfQuantity {
    Receptance,
    Mobility,
    Accelerance,
    DynamicStiffness,
    MechanicalImpedance,
    ApparentMass,
}

impl FrfQuantity {
    /// Quantity of the pointwise-inverted FRF.
    pub fn inverse(self) -> FrfQuantity {
        match self {
            FrfQuantity::Receptance => FrfQuantity::DynamicStiffness,
            FrfQuantity::DynamicStiffness => FrfQuantity::Receptance,
            FrfQuantity::Mobility => FrfQuantity::MechanicalImpedance,
            FrfQuantity::MechanicalImpedance => FrfQuantity::Mobility,
            FrfQuantity::Accelerance => FrfQuantity::ApparentMass,
            FrfQuantity::ApparentMass => FrfQuantity::Accelerance,
        }
    }

    /// Quantity after one output differentiation, when defined.
    pub fn differentiated(self) -> Option<FrfQuantity> {
        match self {
            FrfQuantity::Receptance => Some(FrfQuantity::Mobility),
            FrfQuantity::Mobility => Some(FrfQuantity::Accelerance),
            _ => None,
        }
    }
}

/// Strictly increasing, positive angular-frequency grid (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid<T: Scalar> {
    omegas: Vec<T>,
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn from_omegas(omegas: Vec<T>) -> Result<Self, Error> {
        if omegas.is_empty() {
            return Err(Error::InvalidParameter {
                what: "frequency grid",
                detail: "empty".to_string(),
            });
        }
        let mut prev = T::zero();
        for (i, &w) in omegas.iter().enumerate() {
            if !(w > prev) || !w.is_finite() {
                return Err(Error::InvalidParameter {
                    what: "frequency grid",
                    detail: format!("grid must be positive and strictly increasing (index {i})"),
                });
            }
            prev = w;
        }
        Ok(FrequencyGrid { omegas })
    }

    /// `lines` linearly spaced frequencies between `f_min_hz` and `f_max_hz`.
    pub fn linear_hz(f_min_hz: T, f_max_hz: T, lines: usize) -> Result<Self, Error> {
        if lines < 2 {
            return Err(Error::InvalidParameter {
                what: "frequency grid",
                detail: "need at least two lines".to_string(),
            });
        }
        let two_pi = T::two_pi();
        let step = (f_max_hz - f_min_hz) / T::from_usize(lines - 1).unwrap();
        let omegas = (0..lines)
            .map(|i| two_pi * (f_min_hz + step * T::from_usize(i).unwrap()))
            .collect();
        FrequencyGrid::from_omegas(omegas)
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }
    pub fn len(&self) -> usize {
        self.omegas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// Complex FRF data on a frequency grid: one `n_o x n_i` matrix per line.
#[derive(Debug, Clone, PartialEq)]
pub struct FrfMatrix<T: Scalar> {
    pub(crate) frequencies: Vec<T>,
    pub(crate) data: Vec<DMatrix<Complex<T>>>,
    pub(crate) quantity: FrfQuantity,
    pub(crate) outputs: Vec<DofLabel>,
    pub(crate) inputs: Vec<DofLabel>,
}

impl<T: Scalar> FrfMatrix<T> {
    pub fn new(
        frequencies: Vec<T>,
        data: Vec<DMatrix<Complex<T>>>,
        quantity: FrfQuantity,
        outputs: Vec<DofLabel>,
        inputs: Vec<DofLabel>,
    ) -> Result<Self, Error> {
        FrequencyGrid::from_omegas(frequencies.clone())?;
        if data.len() != frequencies.len() {
            return Err(Error::dims(
                "FRF data",
                format!("{} matrices", frequencies.len()),
                format!("{}", data.len()),
            ));
        }
        for (k, m) in data.iter().enumerate() {
            if m.nrows() != outputs.len() || m.ncols() != inputs.len() {
                return Err(Error::dims(
                    format!("FRF line {k}"),
                    format!("{}x{}", outputs.len(), inputs.len()),
                    format!("{}x{}", m.nrows(), m.ncols()),
                ));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("FRF line {k}"),
                });
            }
        }
        Ok(FrfMatrix {
            frequencies,
            data,
            quantity,
            outputs,
            inputs,
        })
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }
    pub fn n_lines(&self) -> usize {
        self.frequencies.len()
    }
    pub fn at(&self, line: usize) -> &DMatrix<Complex<T>> {
        &self.data[line]
    }
    pub fn data(&self) -> &[DMatrix<Complex<T>>] {
        &self.data
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

    /// Pointwise negation.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for m in &mut out.data {
            *m = -m.clone();
        }
        out
    }

    /// Sub-matrix by output/input label queries, in the requested order.
    pub fn select(&self, keep_outputs: &[&str], keep_inputs: &[&str]) -> Result<Self, Error> {
        if keep_outputs.is_empty() || keep_inputs.is_empty() {
            return Err(Error::EmptySelection { op: "FrfMatrix::select" });
        }
        let orows: Vec<usize> = keep_outputs
            .iter()
            .map(|q| resolve(&self.outputs, q, "frf outputs"))
            .collect::<Result<_, _>>()?;
        let icols: Vec<usize> = keep_inputs
            .iter()
            .map(|q| resolve(&self.inputs, q, "frf inputs"))
            .collect::<Result<_, _>>()?;
        let data = self
            .data
            .iter()
            .map(|m| m.select_rows(orows.iter()).select_columns(icols.iter()))
            .collect();
        Ok(FrfMatrix {
            frequencies: self.frequencies.clone(),
            data,
            quantity: self.quantity,
            outputs: orows.iter().map(|&i| self.outputs[i].clone()).collect(),
            inputs: icols.iter().map(|&i| self.inputs[i].clone()).collect(),
        })
    }

    /// Block-diagonal concatenation over shared grids.
    pub fn block_diagonal(blocks: &[&FrfMatrix<T>]) -> Result<Self, Error> {
        let first = blocks.first().ok_or(Error::InvalidParameter {
            what: "FrfMatrix::block_diagonal",
            detail: "empty block list".to_string(),
        })?;
        for b in &blocks[1..] {
            if b.frequencies != first.frequencies {
                return Err(Error::GridMismatch {
                    detail: "blocks sampled on different grids".to_string(),
                });
            }
            if b.quantity != first.quantity {
                return Err(Error::MixedQuantities {
                    op: "FrfMatrix::block_diagonal",
                    quantities: (first.quantity, b.quantity),
                });
            }
        }
        let no: usize = blocks.iter().map(|b| b.outputs.len()).sum();
        let ni: usize = blocks.iter().map(|b| b.inputs.len()).sum();
        let mut outputs = Vec::with_capacity(no);
        let mut inputs = Vec::with_capacity(ni);
        for b in blocks {
            outputs.extend(b.outputs.iter().cloned());
            inputs.extend(b.inputs.iter().cloned());
        }
        crate::dof::check_unique(&outputs, "frf block outputs")?;
        crate::dof::check_unique(&inputs, "frf block inputs")?;
        let data = (0..first.frequencies.len())
            .map(|k| {
                let mut m = DMatrix::zeros(no, ni);
                let (mut r0, mut c0) = (0usize, 0usize);
                for b in blocks {
                    m.view_mut((r0, c0), (b.outputs.len(), b.inputs.len()))
                        .copy_from(&b.data[k]);
                    r0 += b.outputs.len();
                    c0 += b.inputs.len();
                }
                m
            })
            .collect();
        Ok(FrfMatrix {
            frequencies: first.frequencies.clone(),
            data,
            quantity: first.quantity,
            outputs,
            inputs,
        })
    }

    /// Reorders outputs/inputs to match `other`'s label lists.
    pub fn reordered_like(&self, other: &FrfMatrix<T>) -> Result<Self, Error> {
        if self.outputs.len() != other.outputs.len() || self.inputs.len() != other.inputs.len() {
            return Err(Error::LabelMismatch {
                detail: format!(
                    "{}x{} vs {}x{} labels",
                    self.outputs.len(),
                    self.inputs.len(),
                    other.outputs.len(),
                    other.inputs.len()
                ),
            });
        }
        let find = |labels: &[DofLabel], want: &DofLabel| -> Result<usize, Error> {
            labels
                .iter()
                .position(|l| l.same_dof(want))
                .ok_or(Error::LabelMismatch {
                    detail: format!("label {} missing", want.qualified()),
                })
        };
        let orows: Vec<usize> = other
            .outputs
            .iter()
            .map(|w| find(&self.outputs, w))
            .collect::<Result<_, _>>()?;
        let icols: Vec<usize> = other
            .inputs
            .iter()
            .map(|w| find(&self.inputs, w))
            .collect::<Result<_, _>>()?;
        let data = self
            .data
            .iter()
            .map(|m| m.select_rows(orows.iter()).select_columns(icols.iter()))
            .collect();
        Ok(FrfMatrix {
            frequencies: self.frequencies.clone(),
            data,
            quantity: self.quantity,
            outputs: other.outputs.clone(),
            inputs: other.inputs.clone(),
        })
    }
}

impl<T: Scalar> StateSpaceModel<T> {
    /// Evaluates `C (jw I - A)^-1 B + D` on the grid.
    ///
    /// Lines are solved independently (LU with partial pivoting) and in
    /// parallel; output ordering is deterministic. Grid lines where the
    /// resolvent is singular are collected into one error.
    pub fn frf(&self, grid: &FrequencyGrid<T>) -> Result<FrfMatrix<T>, Error> {
        let n = self.n_states();
        let bc: DMatrix<Complex<T>> = self.b.map(|x| Complex::new(x, T::zero()));
        let cc: DMatrix<Complex<T>> = self.c.map(|x| Complex::new(x, T::zero()));
        let dc: DMatrix<Complex<T>> = self.d.map(|x| Complex::new(x, T::zero()));
        let ac: DMatrix<Complex<T>> = self.a.map(|x| Complex::new(x, T::zero()));

        let results: Vec<Option<DMatrix<Complex<T>>>> = grid
            .omegas()
            .par_iter()
            .map(|&w| {
                let jw = Complex::new(T::zero(), w);
                let mut m = -ac.clone();
                for i in 0..n {
                    m[(i, i)] += jw;
                }
                m.lu().solve(&bc).map(|x| &cc * x + &dc)
            })
            .collect();

        let total = results.len();
        let failed: Vec<usize> = results
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .map(|(i, _)| i)
            .collect();
        if let Some(&first) = failed.first() {
            let hz = grid.omegas()[first] / T::two_pi();
            return Err(Error::SingularAtFrequency {
                count: failed.len(),
                total,
                first_hz: hz.to_f64().unwrap_or(f64::NAN),
            });
        }
        FrfMatrix::new(
            grid.omegas().to_vec(),
            results.into_iter().map(|r| r.unwrap()).collect(),
            self.quantity,
            self.outputs.clone(),
            self.inputs.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OutputKind;
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
    fn grid_construction() {
        let g = FrequencyGrid::linear_hz(0.5, 50.0, 1024).unwrap();
        assert_eq!(g.len(), 1024);
        assert!((g.omegas()[0] - 0.5 * std::f64::consts::TAU).abs() < 1e-12);
        assert!((g.omegas()[1023] - 50.0 * std::f64::consts::TAU).abs() < 1e-9);
        assert!(FrequencyGrid::from_omegas(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::from_omegas(vec![-1.0, 1.0]).is_err());
        assert!(FrequencyGrid::<f64>::from_omegas(vec![]).is_err());
    }

    #[test]
    fn sdof_accelerance_closed_form() {
        // H(w) = -w^2 / (k - w^2 m); at w = sqrt(2): H = 2
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        let g = FrequencyGrid::from_omegas(vec![2f64.sqrt()]).unwrap();
        let h = s.frf(&g).unwrap();
        assert!((h.at(0)[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!(h.at(0)[(0, 0)].im.abs() < 1e-14);
        assert_eq!(h.quantity(), FrfQuantity::Accelerance);
    }

    #[test]
    fn sdof_accelerance_static_limit() {
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        let g = FrequencyGrid::from_omegas(vec![1e-3]).unwrap();
        let h = s.frf(&g).unwrap();
        assert!(h.at(0)[(0, 0)].norm() < 1e-5);
    }

    #[test]
    fn undamped_resonance_is_flagged() {
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration);
        let g = FrequencyGrid::from_omegas(vec![1.0]).unwrap();
        match s.frf(&g) {
            Err(Error::SingularAtFrequency { count, total, .. }) => {
                assert_eq!((count, total), (1, 1));
            }
            other => panic!("expected singular-frequency error, got {other:?}"),
        }
    }

    #[test]
    fn inverted_sdof_apparent_mass_zero_at_resonance() {
        // Z(w) = m - k / w^2; zero at w = sqrt(k/m)
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration).invert().unwrap();
        let g = FrequencyGrid::from_omegas(vec![1.0]).unwrap();
        let z = s.frf(&g).unwrap();
        assert!(z.at(0)[(0, 0)].norm() < 1e-12);
        assert_eq!(z.quantity(), FrfQuantity::ApparentMass);
    }

    #[test]
    fn negate_flips_frf_sign() {
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Acceleration).invert().unwrap();
        let g = FrequencyGrid::from_omegas(vec![2.0]).unwrap();
        let z = s.frf(&g).unwrap();
        let zn = s.negate().frf(&g).unwrap();
        assert_eq!(zn.at(0)[(0, 0)], -z.at(0)[(0, 0)]);
    }

    #[test]
    fn quantity_inverse_round_trip() {
        for q in [
            FrfQuantity::Receptance,
            FrfQuantity::Mobility,
            FrfQuantity::Accelerance,
            FrfQuantity::DynamicStiffness,
            FrfQuantity::MechanicalImpedance,
            FrfQuantity::ApparentMass,
        ] {
            assert_eq!(q.inverse().inverse(), q);
        }
    }
}
