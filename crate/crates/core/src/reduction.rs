//! Coupling-form transformation and minimal-order post-processing.
//!
//! A displacement model is transformed so that its state vector starts with
//! the interface velocities and displacements,
//! `z = [y_dot^J, y^J, x^I]`, via the similarity `z = T x` with
//! `T = [C^J A; C^J; R]` (`R` completes the basis with identity rows).
//!
//! After coupling, the states whose content is recoverable from interface
//! outputs (the per-element difference states of a relaxed coupling, or the
//! duplicated interface states of a rigid coupling) are removed by a state
//! mapping pair `B_T`/`L_T` or, equivalently, by the manual column-folding
//! procedure.

use nalgebra::DMatrix;

use crate::coupling::CoupledLayout;
use crate::dof::{resolve, DofKind};
use crate::error::Error;
use crate::model::{OutputKind, StateSpaceModel};
use crate::Scalar;

/// Relative pivot tolerance of the rank-revealing column selection used to
/// complete the coupling-form basis.
pub const BASIS_PIVOT_TOL: f64 = 1e-10;

/// State mapping `B_T` and its Boolean nullspace basis `L_T`.
///
/// `bt * lt = 0` exactly (integer arithmetic) and
/// `cols(lt) = n - rows(bt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMap {
    pub bt: DMatrix<i32>,
    pub lt: DMatrix<i32>,
    pub removed_state_indices: Vec<usize>,
}

impl ReductionMap {
    /// Kept state indices, ascending.
    pub fn kept_state_indices(&self) -> Vec<usize> {
        let n = self.lt.nrows();
        (0..n)
            .filter(|i| !self.removed_state_indices.contains(i))
            .collect()
    }
}

/// Transforms a displacement model into coupling form.
///
/// `interface` designates the interface DOFs by label query; when `None`,
/// the model's interface-kind outputs are used. The transformed model's
/// output labels are re-marked so that exactly the designated DOFs carry
/// interface kind, and the leading state blocks follow their order of
/// appearance in the output list.
pub fn to_coupling_form<T: Scalar>(
    model: &StateSpaceModel<T>,
    interface: Option<&[&str]>,
) -> Result<StateSpaceModel<T>, Error> {
    if model.output_kind() != OutputKind::Displacement {
        return Err(Error::WrongOutputKind {
            op: "to_coupling_form",
            expected: "displacement",
            found: model.output_kind().as_str().to_string(),
        });
    }
    let mut iface_rows: Vec<usize> = match interface {
        Some(queries) => {
            let mut rows = queries
                .iter()
                .map(|q| resolve(model.outputs(), q, "coupling-form interface"))
                .collect::<Result<Vec<_>, _>>()?;
            rows.sort_unstable();
            rows.dedup();
            if rows.len() != queries.len() {
                return Err(Error::InvalidParameter {
                    what: "coupling-form interface",
                    detail: "duplicate interface designation".to_string(),
                });
            }
            rows
        }
        None => model.interface_output_indices(),
    };
    iface_rows.sort_unstable();
    let nj = iface_rows.len();
    if nj == 0 {
        return Err(Error::InvalidParameter {
            what: "coupling-form interface",
            detail: "no interface DOFs designated".to_string(),
        });
    }
    let n = model.n_states();
    if 2 * nj > n {
        return Err(Error::RankDeficient {
            context: "coupling-form basis [C^J A; C^J]".to_string(),
            found: n,
            required: 2 * nj,
        });
    }

    let cj = model.c().select_rows(iface_rows.iter());
    let cj_a = &cj * model.a();
    let mut g = DMatrix::zeros(2 * nj, n);
    g.view_mut((0, 0), (nj, n)).copy_from(&cj_a);
    g.view_mut((nj, 0), (nj, n)).copy_from(&cj);

    let pivots = pivot_columns(&g, T::from_f64(BASIS_PIVOT_TOL).unwrap());
    if pivots.len() < 2 * nj {
        return Err(Error::RankDeficient {
            context: "coupling-form basis [C^J A; C^J]".to_string(),
            found: pivots.len(),
            required: 2 * nj,
        });
    }
    let mut t = DMatrix::zeros(n, n);
    t.view_mut((0, 0), (2 * nj, n)).copy_from(&g);
    let mut row = 2 * nj;
    for col in 0..n {
        if !pivots.contains(&col) {
            t[(row, col)] = T::one();
            row += 1;
        }
    }
    let t_inv = t.clone().lu().try_inverse().ok_or(Error::Singular {
        name: "coupling-form transform T",
        detail: "completed basis is singular".to_string(),
    })?;

    let mut a = &t * model.a() * &t_inv;
    let mut b = &t * model.b();
    let mut c = model.c() * &t_inv;
    let d = model.d().clone();

    // Snap the structural entries the transform guarantees symbolically:
    // rows nj..2nj of A are selectors of the velocity states, and the
    // interface displacement rows of C are selectors of states nj..2nj.
    let guard = T::from_f64(1e-8).unwrap();
    for i in 0..nj {
        for col in 0..n {
            let want = if col == i { T::one() } else { T::zero() };
            if (a[(nj + i, col)] - want).abs() < guard {
                a[(nj + i, col)] = want;
            }
        }
        for col in 0..b.ncols() {
            if b[(nj + i, col)].abs() < guard {
                b[(nj + i, col)] = T::zero();
            }
        }
    }
    for (pos, &row) in iface_rows.iter().enumerate() {
        for col in 0..n {
            let want = if col == nj + pos { T::one() } else { T::zero() };
            if (c[(row, col)] - want).abs() < guard {
                c[(row, col)] = want;
            }
        }
    }

    let outputs = model
        .outputs()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut l = l.clone();
            l.kind = if iface_rows.contains(&i) {
                DofKind::Interface
            } else {
                DofKind::Internal
            };
            l
        })
        .collect();
    StateSpaceModel::new(
        model.name().to_string(),
        a,
        b,
        c,
        d,
        OutputKind::Displacement,
        model.quantity(),
        outputs,
        model.inputs().to_vec(),
        true,
    )
}

/// Greedy rank-revealing column selection by Gaussian elimination with
/// column pivoting.
fn pivot_columns<T: Scalar>(g: &DMatrix<T>, rel_tol: T) -> Vec<usize> {
    let mut work = g.clone();
    let (rows, cols) = work.shape();
    let scale = work.amax();
    if scale == T::zero() {
        return Vec::new();
    }
    let tol = rel_tol * scale;
    let mut pivots = Vec::new();
    for r in 0..rows {
        // largest remaining entry over unchosen columns
        let mut best = T::zero();
        let mut best_col = None;
        for col in 0..cols {
            if pivots.contains(&col) {
                continue;
            }
            for rr in r..rows {
                if work[(rr, col)].abs() > best {
                    best = work[(rr, col)].abs();
                    best_col = Some((rr, col));
                }
            }
        }
        let Some((prow, pcol)) = best_col else { break };
        if best <= tol {
            break;
        }
        pivots.push(pcol);
        work.swap_rows(r, prow);
        let pivot = work[(r, pcol)];
        for rr in (r + 1)..rows {
            let f = work[(rr, pcol)] / pivot;
            if f != T::zero() {
                for col in 0..cols {
                    let top = work[(r, col)];
                    work[(rr, col)] -= f * top;
                }
            }
        }
    }
    pivots
}

fn check_layout_coupling_form(layout: &CoupledLayout, need_ces: bool) -> Result<(), Error> {
    for seg in &layout.components {
        if !seg.coupling_form {
            return Err(Error::InvalidParameter {
                what: "reduction layout",
                detail: format!("component '{}' is not in coupling form", seg.name),
            });
        }
    }
    if need_ces {
        for seg in &layout.ces {
            if !seg.coupling_form {
                return Err(Error::InvalidParameter {
                    what: "reduction layout",
                    detail: format!("connecting element '{}' is not in coupling form", seg.name),
                });
            }
        }
    }
    Ok(())
}

/// Per-pair state indices in the coupled vector.
struct PairStates {
    vel_a: usize,
    vel_b: usize,
    disp_a: usize,
    disp_b: usize,
}

fn pair_states(layout: &CoupledLayout, r: usize) -> PairStates {
    let p = layout.pairs[r];
    let sa = &layout.components[p.comp_a];
    let sb = &layout.components[p.comp_b];
    let nja = sa.interface_labels.len();
    let njb = sb.interface_labels.len();
    PairStates {
        vel_a: sa.start + p.iface_pos_a,
        vel_b: sb.start + p.iface_pos_b,
        disp_a: sa.start + nja + p.iface_pos_a,
        disp_b: sb.start + njb + p.iface_pos_b,
    }
}

/// Builds the state mapping for a relaxed coupling: two rows per pair tie
/// the element's difference states to the component interface states.
pub fn build_bt_relaxed(layout: &CoupledLayout) -> Result<ReductionMap, Error> {
    if layout.ces.len() != layout.pairs.len() {
        return Err(Error::InvalidParameter {
            what: "reduction layout",
            detail: "relaxed reduction needs one connecting element per pair".to_string(),
        });
    }
    check_layout_coupling_form(layout, true)?;
    let n = layout.n_states();
    let phi = layout.phi;
    let n_pairs = layout.pairs.len();
    let mut bt = DMatrix::zeros(2 * n_pairs, n);
    let mut removed = Vec::with_capacity(2 * n_pairs);
    for r in 0..n_pairs {
        let st = pair_states(layout, r);
        let diff_vel = layout.ces[r].start;
        let diff_disp = layout.ces[r].start + 1;
        bt[(2 * r, st.vel_a)] = -phi;
        bt[(2 * r, st.vel_b)] = phi;
        bt[(2 * r, diff_vel)] = 1;
        bt[(2 * r + 1, st.disp_a)] = -phi;
        bt[(2 * r + 1, st.disp_b)] = phi;
        bt[(2 * r + 1, diff_disp)] = 1;
        removed.push(diff_vel);
        removed.push(diff_disp);
    }
    removed.sort_unstable();
    finish_map(bt, removed, |lt, kept, r| {
        let st = pair_states(layout, r);
        let diff_vel = layout.ces[r].start;
        let diff_disp = layout.ces[r].start + 1;
        lt[(diff_vel, kept[&st.vel_a])] = phi;
        lt[(diff_vel, kept[&st.vel_b])] = -phi;
        lt[(diff_disp, kept[&st.disp_a])] = phi;
        lt[(diff_disp, kept[&st.disp_b])] = -phi;
    }, n_pairs)
}

/// Builds the state mapping for a rigid coupling: the second-side interface
/// states duplicate the first side and merge into its columns.
pub fn build_bt_rigid(layout: &CoupledLayout) -> Result<ReductionMap, Error> {
    if !layout.ces.is_empty() {
        return Err(Error::InvalidParameter {
            what: "reduction layout",
            detail: "rigid reduction applies to couplings without connecting elements".to_string(),
        });
    }
    check_layout_coupling_form(layout, false)?;
    let n = layout.n_states();
    let phi = layout.phi;
    let n_pairs = layout.pairs.len();
    let mut bt = DMatrix::zeros(2 * n_pairs, n);
    let mut removed = Vec::with_capacity(2 * n_pairs);
    for r in 0..n_pairs {
        let st = pair_states(layout, r);
        bt[(2 * r, st.vel_a)] = phi;
        bt[(2 * r, st.vel_b)] = -phi;
        bt[(2 * r + 1, st.disp_a)] = phi;
        bt[(2 * r + 1, st.disp_b)] = -phi;
        removed.push(st.vel_b);
        removed.push(st.disp_b);
    }
    removed.sort_unstable();
    removed.dedup();
    if removed.len() != 2 * n_pairs {
        return Err(Error::InvalidParameter {
            what: "reduction layout",
            detail: "pairs share second-side interface states".to_string(),
        });
    }
    finish_map(bt, removed, |lt, kept, r| {
        let st = pair_states(layout, r);
        lt[(st.vel_b, kept[&st.vel_a])] = 1;
        lt[(st.disp_b, kept[&st.disp_a])] = 1;
    }, n_pairs)
}

fn finish_map(
    bt: DMatrix<i32>,
    removed: Vec<usize>,
    fill: impl Fn(&mut DMatrix<i32>, &std::collections::HashMap<usize, usize>, usize),
    n_pairs: usize,
) -> Result<ReductionMap, Error> {
    let n = bt.ncols();
    let kept: Vec<usize> = (0..n).filter(|i| !removed.contains(i)).collect();
    let kept_col: std::collections::HashMap<usize, usize> =
        kept.iter().enumerate().map(|(j, &s)| (s, j)).collect();
    let mut lt = DMatrix::zeros(n, kept.len());
    for (j, &s) in kept.iter().enumerate() {
        lt[(s, j)] = 1;
    }
    for r in 0..n_pairs {
        fill(&mut lt, &kept_col, r);
    }
    let prod = &bt * &lt;
    if prod.iter().any(|&v| v != 0) {
        return Err(Error::InvalidParameter {
            what: "reduction map",
            detail: "B_T * L_T != 0 (inconsistent layout)".to_string(),
        });
    }
    Ok(ReductionMap {
        bt,
        lt,
        removed_state_indices: removed,
    })
}

/// Applies a reduction map.
///
/// Columns are folded exactly as `A L_T` and `C L_T`; the projection onto
/// the kept states reduces to selecting each retained state's own row (the
/// discarded rows are consistent by construction), so no floating-point
/// inverse is involved.
pub fn reduce_with_lt<T: Scalar>(
    model: &StateSpaceModel<T>,
    rm: &ReductionMap,
) -> Result<StateSpaceModel<T>, Error> {
    let n = model.n_states();
    if rm.lt.nrows() != n {
        return Err(Error::dims(
            "reduction map",
            format!("{n} states"),
            format!("{}", rm.lt.nrows()),
        ));
    }
    let kept = rm.kept_state_indices();
    let a_folded = fold_columns(model.a(), &rm.lt);
    let c_folded = fold_columns(model.c(), &rm.lt);
    let a = a_folded.select_rows(kept.iter());
    let b = model.b().select_rows(kept.iter());
    StateSpaceModel::new(
        model.name().to_string(),
        a,
        b,
        c_folded,
        model.d().clone(),
        model.output_kind(),
        model.quantity(),
        model.outputs().to_vec(),
        model.inputs().to_vec(),
        false,
    )
}

/// `M * L` for an integer column-merge matrix, folding columns in ascending
/// source order so the arithmetic matches the manual procedure exactly.
fn fold_columns<T: Scalar>(m: &DMatrix<T>, lt: &DMatrix<i32>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(m.nrows(), lt.ncols());
    for j in 0..lt.ncols() {
        for s in 0..lt.nrows() {
            let w = lt[(s, j)];
            if w == 0 {
                continue;
            }
            let wt = T::from_i32(w).unwrap();
            for i in 0..m.nrows() {
                out[(i, j)] += wt * m[(i, s)];
            }
        }
    }
    out
}

/// The manual post-processing procedure for relaxed couplings, executed
/// literally: for each pair, the difference-state columns of `A` and `C`
/// are folded (scaled by `+phi` into the first substructure's interface
/// column, by `-phi` into the second's), then the difference rows and
/// columns are eliminated; the same happens for the velocity-difference
/// states.
pub fn reduce_manual_relaxed<T: Scalar>(
    model: &StateSpaceModel<T>,
    layout: &CoupledLayout,
) -> Result<StateSpaceModel<T>, Error> {
    if layout.ces.len() != layout.pairs.len() {
        return Err(Error::InvalidParameter {
            what: "reduction layout",
            detail: "relaxed reduction needs one connecting element per pair".to_string(),
        });
    }
    check_layout_coupling_form(layout, true)?;
    let n = model.n_states();
    if layout.n_states() != n {
        return Err(Error::dims(
            "layout states",
            format!("{n}"),
            format!("{}", layout.n_states()),
        ));
    }
    if layout.pairs.is_empty() {
        return Ok(model.clone());
    }
    let phi = T::from_i32(layout.phi).unwrap();
    let mut a = model.a().clone();
    let mut c = model.c().clone();
    let mut removed = Vec::new();
    for r in 0..layout.pairs.len() {
        let st = pair_states(layout, r);
        let diff_vel = layout.ces[r].start;
        let diff_disp = layout.ces[r].start + 1;
        for (diff, target_a, target_b) in [
            (diff_disp, st.disp_a, st.disp_b),
            (diff_vel, st.vel_a, st.vel_b),
        ] {
            for i in 0..n {
                let add = a[(i, diff)];
                a[(i, target_a)] += phi * add;
                a[(i, target_b)] -= phi * add;
            }
            for i in 0..c.nrows() {
                let add = c[(i, diff)];
                c[(i, target_a)] += phi * add;
                c[(i, target_b)] -= phi * add;
            }
        }
        removed.push(diff_vel);
        removed.push(diff_disp);
    }
    removed.sort_unstable();
    let kept: Vec<usize> = (0..n).filter(|i| !removed.contains(i)).collect();
    let a = a.select_rows(kept.iter()).select_columns(kept.iter());
    let b = model.b().select_rows(kept.iter());
    let c = c.select_columns(kept.iter());
    StateSpaceModel::new(
        model.name().to_string(),
        a,
        b,
        c,
        model.d().clone(),
        model.output_kind(),
        model.quantity(),
        model.outputs().to_vec(),
        model.inputs().to_vec(),
        false,
    )
}
