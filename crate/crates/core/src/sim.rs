//! Fixed-step time simulation with exact zero-order-hold discretization.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::model::StateSpaceModel;
use crate::Scalar;

/// Sampled input/state/output histories of one simulation run.
///
/// `u`, `y` and `x` are row-per-sample matrices on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace<T: Scalar> {
    pub time: Vec<T>,
    pub u: DMatrix<T>,
    pub y: DMatrix<T>,
    pub x: DMatrix<T>,
    /// Diagnostics recorded during the run (e.g. step-size warnings).
    pub warnings: Vec<String>,
}

impl<T: Scalar> StateSpaceModel<T> {
    /// Propagates the model from `x0 = 0` under the sampled input `u`
    /// (one row per step) with exact zero-order-hold discretization.
    ///
    /// The discrete pair comes from one matrix exponential of the augmented
    /// matrix `[[A, B], [0, 0]] * dt`. A warning is recorded when `dt`
    /// exceeds a tenth of the fastest natural period scale `1/max|eig(A)|`.
    pub fn simulate(&self, u: &DMatrix<T>, dt: T) -> Result<SimulationTrace<T>, Error> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter {
                what: "time step",
                detail: "dt must be > 0".to_string(),
            });
        }
        let n = self.n_states();
        let ni = self.n_inputs();
        if u.ncols() != ni {
            return Err(Error::dims("input columns", format!("{ni}"), format!("{}", u.ncols())));
        }
        let steps = u.nrows();
        if steps == 0 {
            return Err(Error::InvalidParameter {
                what: "input trace",
                detail: "needs at least one sample".to_string(),
            });
        }

        let mut warnings = Vec::new();
        let omega_max = self
            .a()
            .complex_eigenvalues()
            .iter()
            .map(|l| (l.re * l.re + l.im * l.im).sqrt())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if omega_max > T::zero() && dt > T::one() / (T::from_f64(10.0).unwrap() * omega_max) {
            warnings.push(format!(
                "dt = {:?} exceeds 1/(10 * max natural frequency) = {:?}; response may be under-resolved",
                dt.to_f64().unwrap_or(f64::NAN),
                (T::one() / (T::from_f64(10.0).unwrap() * omega_max)).to_f64().unwrap_or(f64::NAN),
            ));
        }

        // exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]]
        let mut aug = DMatrix::zeros(n + ni, n + ni);
        aug.view_mut((0, 0), (n, n)).copy_from(self.a());
        aug.view_mut((0, n), (n, ni)).copy_from(self.b());
        let e = (aug * dt).exp();
        let ad = e.view((0, 0), (n, n)).into_owned();
        let bd = e.view((0, n), (n, ni)).into_owned();

        let mut x = DMatrix::zeros(steps, n);
        let mut y = DMatrix::zeros(steps, self.n_outputs());
        let mut state = nalgebra::DVector::zeros(n);
        for k in 0..steps {
            let uk = u.row(k).transpose();
            let yk = self.c() * &state + self.d() * &uk;
            x.row_mut(k).copy_from(&state.transpose());
            y.row_mut(k).copy_from(&yk.transpose());
            state = &ad * state + &bd * uk;
        }
        let time = (0..steps).map(|k| dt * T::from_usize(k).unwrap()).collect();
        Ok(SimulationTrace {
            time,
            u: u.clone(),
            y,
            x,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dof::DofLabel;
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
    fn zero_input_zero_output() {
        let s = sdof(1.0, 1.0, 0.1, OutputKind::Displacement);
        let u = DMatrix::zeros(100, 1);
        let tr = s.simulate(&u, 0.01).unwrap();
        assert!(tr.y.iter().all(|&y| y == 0.0));
        assert!(tr.x.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn step_force_settles_at_static_gain() {
        // steady displacement of a 1 N step is 1/k within 1%
        let s = sdof(1.0, 1.0, 0.1, OutputKind::Displacement);
        let steps = 15_000;
        let u = DMatrix::from_element(steps, 1, 1.0);
        let tr = s.simulate(&u, 0.01).unwrap();
        let tail = steps - 2_000;
        let mean: f64 = (tail..steps).map(|k| tr.y[(k, 0)]).sum::<f64>() / 2_000.0;
        assert!((mean - 1.0).abs() < 0.01, "static gain {mean}");
    }

    #[test]
    fn large_step_records_warning() {
        let s = sdof(1.0, 100.0, 0.0, OutputKind::Displacement);
        let u = DMatrix::zeros(4, 1);
        let tr = s.simulate(&u, 1.0).unwrap();
        assert_eq!(tr.warnings.len(), 1);
        let fine = s.simulate(&u, 1e-3).unwrap();
        assert!(fine.warnings.is_empty());
    }

    #[test]
    fn rejects_bad_dt_and_shape() {
        let s = sdof(1.0, 1.0, 0.0, OutputKind::Displacement);
        assert!(s.simulate(&DMatrix::zeros(4, 1), 0.0).is_err());
        assert!(s.simulate(&DMatrix::zeros(4, 2), 0.1).is_err());
        assert!(s.simulate(&DMatrix::zeros(0, 1), 0.1).is_err());
    }
}
