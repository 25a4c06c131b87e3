//! FRF comparison with per-frequency relative errors.

use substruct::{Error, FrfMatrix, Scalar};

/// Fraction of the largest line norm used as the relative-error floor,
/// protecting lines near FRF zeros from division blow-up.
pub const ERROR_FLOOR_FRACTION: f64 = 1e-12;

/// Result of comparing two FRF matrices.
#[derive(Debug, Clone)]
pub struct FrfComparison {
    /// Largest per-frequency relative Frobenius error.
    pub max_rel_error: f64,
    /// Relative error per frequency line.
    pub per_frequency: Vec<f64>,
    /// `(frequency_hz, output, input)` of the largest entrywise deviation
    /// at the worst line.
    pub worst_entry: (f64, String, String),
}

/// Compares two FRFs sampled on identical grids.
///
/// `h2` is reordered to `h1`'s label ordering first. The per-line error is
/// `|H1 - H2|_F / max(|H1|_F, floor)` with
/// `floor = ERROR_FLOOR_FRACTION * max_k |H1(w_k)|_F`.
pub fn compare_frf<T: Scalar>(h1: &FrfMatrix<T>, h2: &FrfMatrix<T>) -> Result<FrfComparison, Error> {
    if h1.frequencies().len() != h2.frequencies().len()
        || h1
            .frequencies()
            .iter()
            .zip(h2.frequencies())
            .any(|(a, b)| a != b)
    {
        return Err(Error::GridMismatch {
            detail: "comparison requires identical grids".to_string(),
        });
    }
    let h2 = h2.reordered_like(h1)?;

    let norms: Vec<f64> = h1
        .data()
        .iter()
        .map(|m| m.norm().to_f64().unwrap_or(f64::NAN))
        .collect();
    let floor = ERROR_FLOOR_FRACTION * norms.iter().cloned().fold(0.0_f64, f64::max);

    let mut per_frequency = Vec::with_capacity(h1.n_lines());
    let mut worst_line = 0usize;
    let mut max_rel_error = 0.0_f64;
    for k in 0..h1.n_lines() {
        let diff = (h1.at(k) - h2.at(k)).norm().to_f64().unwrap_or(f64::NAN);
        let rel = diff / norms[k].max(floor);
        if rel > max_rel_error {
            max_rel_error = rel;
            worst_line = k;
        }
        per_frequency.push(rel);
    }

    // locate the largest entrywise deviation at the worst line
    let dm = h1.at(worst_line) - h2.at(worst_line);
    let mut worst = (0usize, 0usize);
    let mut best = -1.0_f64;
    for i in 0..dm.nrows() {
        for j in 0..dm.ncols() {
            let z = dm[(i, j)];
            let v = (z.re * z.re + z.im * z.im)
                .sqrt()
                .to_f64()
                .unwrap_or(0.0);
            if v > best {
                best = v;
                worst = (i, j);
            }
        }
    }
    let f_hz = (h1.frequencies()[worst_line] / T::two_pi())
        .to_f64()
        .unwrap_or(f64::NAN);
    Ok(FrfComparison {
        max_rel_error,
        per_frequency,
        worst_entry: (
            f_hz,
            h1.outputs()[worst.0].qualified(),
            h1.inputs()[worst.1].qualified(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use substruct::frf::FrequencyGrid;
    use substruct::lumped::testcase;
    use substruct::model::OutputKind;

    fn sample() -> FrfMatrix<f64> {
        testcase::component_a::<f64>()
            .to_model(OutputKind::Acceleration)
            .unwrap()
            .frf(&FrequencyGrid::linear_hz(1.0, 20.0, 16).unwrap())
            .unwrap()
    }

    #[test]
    fn identical_frfs_compare_to_zero() {
        let h = sample();
        let cmp = compare_frf(&h, &h).unwrap();
        assert_eq!(cmp.max_rel_error, 0.0);
    }

    #[test]
    fn doubling_gives_unit_relative_error() {
        let h = sample();
        let mut doubled = h.clone();
        doubled = FrfMatrix::new(
            doubled.frequencies().to_vec(),
            doubled.data().iter().map(|m| m * nalgebra::Complex::new(2.0, 0.0)).collect(),
            doubled.quantity(),
            doubled.outputs().to_vec(),
            doubled.inputs().to_vec(),
        )
        .unwrap();
        let cmp = compare_frf(&h, &doubled).unwrap();
        assert!((cmp.max_rel_error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let h = sample();
        let other = testcase::component_a::<f64>()
            .to_model(OutputKind::Acceleration)
            .unwrap()
            .frf(&FrequencyGrid::linear_hz(1.0, 20.0, 8).unwrap())
            .unwrap();
        assert!(compare_frf(&h, &other).is_err());
    }
}
