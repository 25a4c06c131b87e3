//! Dual coupling of state-space models with rigid or relaxed interface
//! compatibility.
//!
//! Components enter as acceleration models; connecting elements enter as
//! inverted diagonal apparent-mass models (force input, acceleration
//! output). Writing `W = (B_C D_S B_C^T + D_M)^-1` over the block-diagonal
//! component matrices (`S`) and connecting-element matrices (`M`), the
//! coupled model is
//!
//! ```text
//! A = [ A_S - B_S Bc' W Bc C_S      B_S Bc' W C_M      ]
//!     [ B_M W Bc C_S                A_M - B_M W C_M    ]
//! B = [ B_S - B_S Bc' W Bc D_S ]    C = [ C_S - D_S Bc' W Bc C_S ,  D_S Bc' W C_M ]
//!     [ B_M W Bc D_S           ]    D = D_S - D_S Bc' W Bc D_S
//! ```
//!
//! Rigid coupling is the same computation with the connecting-element list
//! empty (`D_M = 0`, no `x_M` states).

use nalgebra::DMatrix;

use crate::dof::{resolve, DofKind, DofLabel};
use crate::error::Error;
use crate::frf::FrfQuantity;
use crate::model::{block_diagonal, OutputKind, StateSpaceModel};
use crate::Scalar;

/// Guard on the interface matrix `B_C D_S B_C^T + D_M`.
pub const INTERFACE_RCOND: f64 = 1e-12;

/// Signed Boolean mapping matrix over a global output ordering.
///
/// Row `r` carries `+phi` at the first DOF of pair `r` and `-phi` at the
/// second; all other entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMapping {
    matrix: DMatrix<i32>,
    phi: i32,
    pairs: Vec<(DofLabel, DofLabel)>,
    outputs: Vec<DofLabel>,
}

impl SignedMapping {
    pub fn matrix(&self) -> &DMatrix<i32> {
        &self.matrix
    }
    pub fn phi(&self) -> i32 {
        self.phi
    }
    pub fn pairs(&self) -> &[(DofLabel, DofLabel)] {
        &self.pairs
    }
    pub fn outputs(&self) -> &[DofLabel] {
        &self.outputs
    }
    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub(crate) fn as_scalar<T: Scalar>(&self) -> DMatrix<T> {
        self.matrix.map(|v| T::from_i32(v).unwrap())
    }
}

/// Builds the signed mapping for the given connection pairs.
///
/// Each pair names one interface DOF per side (bare name or
/// `structure/name`); a DOF may appear in at most one pair.
pub fn build_bc(
    global_outputs: &[DofLabel],
    pairs: &[(&str, &str)],
    phi: i32,
) -> Result<SignedMapping, Error> {
    if phi != 1 && phi != -1 {
        return Err(Error::InvalidParameter {
            what: "phi",
            detail: format!("must be +1 or -1, got {phi}"),
        });
    }
    let mut matrix = DMatrix::zeros(pairs.len(), global_outputs.len());
    let mut used: Vec<usize> = Vec::new();
    let mut pair_labels = Vec::with_capacity(pairs.len());
    for (r, (qa, qb)) in pairs.iter().enumerate() {
        let ia = resolve(global_outputs, qa, "coupling pair")?;
        let ib = resolve(global_outputs, qb, "coupling pair")?;
        if ia == ib {
            return Err(Error::InvalidParameter {
                what: "coupling pair",
                detail: format!("pair {r} connects '{qa}' to itself"),
            });
        }
        for (i, q) in [(ia, qa), (ib, qb)] {
            if global_outputs[i].kind != DofKind::Interface {
                return Err(Error::InvalidParameter {
                    what: "coupling pair",
                    detail: format!("'{q}' is not an interface DOF"),
                });
            }
            if used.contains(&i) {
                return Err(Error::DuplicateLabel {
                    label: global_outputs[i].qualified(),
                    context: "coupling pairs (one connecting element per pair)".to_string(),
                });
            }
            used.push(i);
        }
        matrix[(r, ia)] = phi;
        matrix[(r, ib)] = -phi;
        pair_labels.push((global_outputs[ia].clone(), global_outputs[ib].clone()));
    }
    Ok(SignedMapping {
        matrix,
        phi,
        pairs: pair_labels,
        outputs: global_outputs.to_vec(),
    })
}

/// One component's slice of the coupled state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSegment {
    pub name: String,
    pub start: usize,
    pub n_states: usize,
    pub coupling_form: bool,
    /// Interface DOFs in output order; for a coupling-form model these are
    /// also the order of the leading velocity/displacement state blocks.
    pub interface_labels: Vec<DofLabel>,
}

/// One connecting element's slice of the coupled state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CeSegment {
    pub name: String,
    pub start: usize,
    pub n_states: usize,
    pub coupling_form: bool,
}

/// Where each connection pair lands in the component segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLocation {
    pub comp_a: usize,
    pub iface_pos_a: usize,
    pub comp_b: usize,
    pub iface_pos_b: usize,
}

/// Ordered description of the coupled state vector: component segments
/// first, connecting-element segments after.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledLayout {
    pub components: Vec<ComponentSegment>,
    pub ces: Vec<CeSegment>,
    pub pairs: Vec<PairLocation>,
    pub phi: i32,
}

impl CoupledLayout {
    pub fn n_states(&self) -> usize {
        self.components.iter().map(|s| s.n_states).sum::<usize>()
            + self.ces.iter().map(|s| s.n_states).sum::<usize>()
    }
}

/// A coupled model plus the bookkeeping needed for post-processing.
#[derive(Debug, Clone)]
pub struct CouplingResult<T: Scalar> {
    pub model: StateSpaceModel<T>,
    pub layout: CoupledLayout,
    pub n_relaxed: usize,
    pub(crate) diag_substructures: StateSpaceModel<T>,
    pub(crate) diag_ces: Option<StateSpaceModel<T>>,
    pub(crate) bc: SignedMapping,
}

/// Couples components through connecting elements by compatibility
/// relaxation. `ce_models[r]` serves mapping row `r`.
pub fn couple_relaxed<T: Scalar>(
    components: &[&StateSpaceModel<T>],
    ce_models: &[&StateSpaceModel<T>],
    bc: &SignedMapping,
) -> Result<CouplingResult<T>, Error> {
    if ce_models.len() != bc.n_pairs() {
        return Err(Error::dims(
            "connecting-element models vs mapping rows",
            format!("{}", bc.n_pairs()),
            format!("{}", ce_models.len()),
        ));
    }
    for ce in ce_models {
        if ce.quantity() != FrfQuantity::Accelerance {
            return Err(Error::MixedQuantities {
                op: "couple_relaxed (connecting elements must be inverted apparent mass)",
                quantities: (FrfQuantity::Accelerance, ce.quantity()),
            });
        }
        if ce.n_outputs() != 1 || ce.n_inputs() != 1 {
            return Err(Error::dims(
                format!("connecting element '{}'", ce.name()),
                "1x1".to_string(),
                format!("{}x{}", ce.n_outputs(), ce.n_inputs()),
            ));
        }
    }
    couple_impl(components, ce_models, bc)
}

/// Classic dual coupling with rigid compatibility: the connecting-element
/// terms are absent.
pub fn couple_rigid<T: Scalar>(
    components: &[&StateSpaceModel<T>],
    bc: &SignedMapping,
) -> Result<CouplingResult<T>, Error> {
    couple_impl(components, &[], bc)
}

fn couple_impl<T: Scalar>(
    components: &[&StateSpaceModel<T>],
    ce_models: &[&StateSpaceModel<T>],
    bc: &SignedMapping,
) -> Result<CouplingResult<T>, Error> {
    for comp in components {
        if comp.output_kind() != OutputKind::Acceleration {
            return Err(Error::WrongOutputKind {
                op: "coupling",
                expected: "acceleration",
                found: comp.output_kind().as_str().to_string(),
            });
        }
    }
    let s = block_diagonal(components, "substructures")?;
    if s.outputs().len() != bc.outputs().len()
        || s.outputs()
            .iter()
            .zip(bc.outputs())
            .any(|(a, b)| !a.same_dof(b))
    {
        return Err(Error::LabelMismatch {
            detail: "mapping matrix columns do not match the stacked component outputs".to_string(),
        });
    }
    let m = if ce_models.is_empty() {
        None
    } else {
        Some(block_diagonal(ce_models, "connecting_elements")?)
    };

    let nj = bc.n_pairs();
    let bc_t: DMatrix<T> = bc.as_scalar();
    let bct_t = bc_t.transpose();

    // W = (B_C D_S B_C^T + D_M)^-1
    let mut iface = &bc_t * s.d() * &bct_t;
    if let Some(m) = &m {
        iface += m.d();
    }
    let w = if nj == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let sv = iface.clone().svd(false, false).singular_values;
        let rcond = if sv.max() > T::zero() { sv.min() / sv.max() } else { T::zero() };
        if rcond.to_f64().unwrap_or(0.0) < INTERFACE_RCOND {
            return Err(Error::IllConditioned {
                name: "interface matrix (B_C D_S B_C^T + D_M)",
                rcond: rcond.to_f64().unwrap_or(0.0),
                threshold: INTERFACE_RCOND,
                hint: "check pair definitions and connecting-element feed-through",
            });
        }
        iface.clone().lu().try_inverse().ok_or(Error::Singular {
            name: "interface matrix",
            detail: "LU inversion failed".to_string(),
        })?
    };

    // shared factors
    let bs_bct_w = s.b() * &bct_t * &w; // n_S x n_j
    let ds_bct_w = s.d() * &bct_t * &w; // n_y x n_j
    let bc_cs = &bc_t * s.c(); // n_j x n_S
    let bc_ds = &bc_t * s.d(); // n_j x n_u

    let a_ss = s.a() - &bs_bct_w * &bc_cs;
    let b_s = s.b() - &bs_bct_w * &bc_ds;
    let c_s = s.c() - &ds_bct_w * &bc_cs;
    let d_s = s.d() - &ds_bct_w * &bc_ds;

    let n_s = s.n_states();
    let n_m = m.as_ref().map_or(0, |m| m.n_states());
    let n = n_s + n_m;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, s.n_inputs());
    let mut c = DMatrix::zeros(s.n_outputs(), n);
    a.view_mut((0, 0), (n_s, n_s)).copy_from(&a_ss);
    b.view_mut((0, 0), (n_s, s.n_inputs())).copy_from(&b_s);
    c.view_mut((0, 0), (s.n_outputs(), n_s)).copy_from(&c_s);
    if let Some(m) = &m {
        let bm_w = m.b() * &w; // n_M x n_j
        let a_sm = &bs_bct_w * m.c();
        let a_ms = &bm_w * &bc_cs;
        let a_mm = m.a() - &bm_w * m.c();
        let b_m = &bm_w * &bc_ds;
        let c_m = &ds_bct_w * m.c();
        a.view_mut((0, n_s), (n_s, n_m)).copy_from(&a_sm);
        a.view_mut((n_s, 0), (n_m, n_s)).copy_from(&a_ms);
        a.view_mut((n_s, n_s), (n_m, n_m)).copy_from(&a_mm);
        b.view_mut((n_s, 0), (n_m, s.n_inputs())).copy_from(&b_m);
        c.view_mut((0, n_s), (s.n_outputs(), n_m)).copy_from(&c_m);
    }

    let model = StateSpaceModel::new(
        "coupled",
        a,
        b,
        c,
        d_s,
        OutputKind::Acceleration,
        FrfQuantity::Accelerance,
        s.outputs().to_vec(),
        s.inputs().to_vec(),
        false,
    )?;

    let layout = build_layout(components, ce_models, bc)?;
    Ok(CouplingResult {
        model,
        layout,
        n_relaxed: if ce_models.is_empty() { 0 } else { nj },
        diag_substructures: s,
        diag_ces: m,
        bc: bc.clone(),
    })
}

fn build_layout<T: Scalar>(
    components: &[&StateSpaceModel<T>],
    ce_models: &[&StateSpaceModel<T>],
    bc: &SignedMapping,
) -> Result<CoupledLayout, Error> {
    let mut segments = Vec::with_capacity(components.len());
    let mut start = 0usize;
    for comp in components {
        let interface_labels: Vec<DofLabel> = comp
            .outputs()
            .iter()
            .filter(|l| l.kind == DofKind::Interface)
            .cloned()
            .collect();
        segments.push(ComponentSegment {
            name: comp.name().to_string(),
            start,
            n_states: comp.n_states(),
            coupling_form: comp.is_coupling_form(),
            interface_labels,
        });
        start += comp.n_states();
    }
    let mut ces = Vec::with_capacity(ce_models.len());
    for ce in ce_models {
        ces.push(CeSegment {
            name: ce.name().to_string(),
            start,
            n_states: ce.n_states(),
            coupling_form: ce.is_coupling_form(),
        });
        start += ce.n_states();
    }
    let locate = |label: &DofLabel| -> Result<(usize, usize), Error> {
        for (ci, seg) in segments.iter().enumerate() {
            if let Some(pos) = seg.interface_labels.iter().position(|l| l.same_dof(label)) {
                return Ok((ci, pos));
            }
        }
        Err(Error::UnknownLabel {
            label: label.qualified(),
            context: "pair location in component interfaces".to_string(),
        })
    };
    let mut pairs = Vec::with_capacity(bc.n_pairs());
    for (la, lb) in bc.pairs() {
        let (comp_a, iface_pos_a) = locate(la)?;
        let (comp_b, iface_pos_b) = locate(lb)?;
        pairs.push(PairLocation {
            comp_a,
            iface_pos_a,
            comp_b,
            iface_pos_b,
        });
    }
    Ok(CoupledLayout {
        components: segments,
        ces,
        pairs,
        phi: bc.phi(),
    })
}

/// Requested output kind for [`coupled_output_variant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputVariant {
    Displacement,
    Velocity,
}

/// Recomputes the coupled output and feed-through matrices at displacement
/// or velocity level. The state matrices are unchanged.
///
/// `component_disp_c[i]` is the displacement output matrix of component `i`
/// (same output and state ordering as the model that entered coupling).
/// Connecting elements must be in coupling form: their displacement output
/// row is then the unit selector of their second state.
pub fn coupled_output_variant<T: Scalar>(
    result: &CouplingResult<T>,
    component_disp_c: &[&DMatrix<T>],
    variant: OutputVariant,
) -> Result<StateSpaceModel<T>, Error> {
    let s = &result.diag_substructures;
    if component_disp_c.len() != result.layout.components.len() {
        return Err(Error::dims(
            "displacement matrices",
            format!("{}", result.layout.components.len()),
            format!("{}", component_disp_c.len()),
        ));
    }
    let n_s = s.n_states();
    let mut cs_disp = DMatrix::zeros(s.n_outputs(), n_s);
    let (mut r0, mut c0) = (0usize, 0usize);
    for (seg, cd) in result.layout.components.iter().zip(component_disp_c) {
        let rows = cd.nrows();
        if cd.ncols() != seg.n_states {
            return Err(Error::dims(
                format!("displacement matrix of '{}'", seg.name),
                format!("cols = {}", seg.n_states),
                format!("{}", cd.ncols()),
            ));
        }
        cs_disp.view_mut((r0, c0), (rows, seg.n_states)).copy_from(cd);
        r0 += rows;
        c0 += seg.n_states;
    }
    if r0 != s.n_outputs() {
        return Err(Error::dims(
            "displacement matrix rows",
            format!("{}", s.n_outputs()),
            format!("{r0}"),
        ));
    }

    let nj = result.bc.n_pairs();
    let bc_t: DMatrix<T> = result.bc.as_scalar();
    let bct_t = bc_t.transpose();
    let mut iface = &bc_t * s.d() * &bct_t;
    if let Some(m) = &result.diag_ces {
        iface += m.d();
    }
    let w = if nj == 0 {
        DMatrix::zeros(0, 0)
    } else {
        iface.lu().try_inverse().ok_or(Error::Singular {
            name: "interface matrix",
            detail: "LU inversion failed".to_string(),
        })?
    };
    let ds_bct_w = s.d() * &bct_t * &w;

    // connecting-element displacement rows: unit selectors of each
    // element's displacement state (coupling form required)
    let (cm_disp, a_m) = match &result.diag_ces {
        Some(m) => {
            let n_m = m.n_states();
            let mut cm = DMatrix::zeros(nj, n_m);
            let base = result.layout.components.iter().map(|s| s.n_states).sum::<usize>();
            for (r, seg) in result.layout.ces.iter().enumerate() {
                if !seg.coupling_form {
                    return Err(Error::InvalidParameter {
                        what: "output variant",
                        detail: format!(
                            "connecting element '{}' is not in coupling form; its displacement \
                             output matrix is unavailable",
                            seg.name
                        ),
                    });
                }
                cm[(r, seg.start - base + 1)] = T::one();
            }
            (cm, m.a().clone())
        }
        None => (DMatrix::zeros(nj, 0), DMatrix::zeros(0, 0)),
    };

    let (c_s_var, c_m_var, d_var, kind, quantity) = match variant {
        OutputVariant::Velocity => {
            let cs_vel = &cs_disp * s.a();
            let c_s = &cs_vel - &ds_bct_w * (&bc_t * &cs_vel);
            let c_m = &ds_bct_w * (&cm_disp * &a_m);
            let cs_b = &cs_disp * s.b();
            let d = &cs_b - &ds_bct_w * (&bc_t * &cs_b);
            (c_s, c_m, d, OutputKind::Velocity, FrfQuantity::Mobility)
        }
        OutputVariant::Displacement => {
            let c_s = &cs_disp - &ds_bct_w * (&bc_t * &cs_disp);
            let c_m = &ds_bct_w * &cm_disp;
            let mut c_full = DMatrix::zeros(s.n_outputs(), result.model.n_states());
            c_full.view_mut((0, 0), (s.n_outputs(), n_s)).copy_from(&c_s);
            c_full
                .view_mut((0, n_s), (s.n_outputs(), result.model.n_states() - n_s))
                .copy_from(&c_m);
            // D_disp = D_accel - C_disp A B, which vanishes identically
            let d = &result.model.d - &c_full * result.model.a() * result.model.b();
            (c_s, c_m, d, OutputKind::Displacement, FrfQuantity::Receptance)
        }
    };

    let n = result.model.n_states();
    let mut c = DMatrix::zeros(s.n_outputs(), n);
    c.view_mut((0, 0), (s.n_outputs(), n_s)).copy_from(&c_s_var);
    c.view_mut((0, n_s), (s.n_outputs(), n - n_s)).copy_from(&c_m_var);
    StateSpaceModel::new(
        format!("{}_{:?}", result.model.name(), kind.as_str()),
        result.model.a().clone(),
        result.model.b().clone(),
        c,
        d_var,
        kind,
        quantity,
        result.model.outputs().to_vec(),
        result.model.inputs().to_vec(),
        false,
    )
}

/// Dual decoupling: rigidly couples the assembly with the negated models of
/// the substructures to remove.
///
/// `pairs` connects assembly DOFs to DOFs of the removed models. For exact
/// lumped models the interface feed-through often cancels exactly (the
/// removed mass equals the assembly's local mass), in which case this
/// rejects with a condition report and primal disassembly is the way to go.
pub fn decouple_lm<T: Scalar>(
    assembly: &StateSpaceModel<T>,
    remove: &[&StateSpaceModel<T>],
    pairs: &[(&str, &str)],
    phi: i32,
) -> Result<CouplingResult<T>, Error> {
    let negated: Vec<StateSpaceModel<T>> = remove.iter().map(|m| m.negate()).collect();
    let mut all: Vec<&StateSpaceModel<T>> = vec![assembly];
    all.extend(negated.iter());
    let mut outputs = Vec::new();
    for m in &all {
        outputs.extend(m.outputs().iter().cloned());
    }
    let bc = build_bc(&outputs, pairs, phi)?;
    couple_rigid(&all, &bc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dof::DofLabel;
    use nalgebra::dmatrix;

    fn labels(specs: &[(&str, &str)]) -> Vec<DofLabel> {
        specs
            .iter()
            .map(|(n, s)| DofLabel::interface(*n, *s))
            .collect()
    }

    #[test]
    fn bc_row_pattern() {
        let outs = vec![
            DofLabel::internal("a1", "A"),
            DofLabel::interface("a2", "A"),
            DofLabel::interface("p1", "B"),
            DofLabel::internal("p4", "B"),
        ];
        let bc = build_bc(&outs, &[("a2", "p1")], 1).unwrap();
        assert_eq!(bc.matrix().row(0).iter().copied().collect::<Vec<_>>(), vec![0, 1, -1, 0]);
        let bcm = build_bc(&outs, &[("a2", "p1")], -1).unwrap();
        assert_eq!(bcm.matrix()[(0, 1)], -1);
        assert_eq!(bcm.matrix()[(0, 2)], 1);
    }

    #[test]
    fn bc_rejects_bad_pairs() {
        let outs = labels(&[("x", "A"), ("y", "B"), ("z", "C")]);
        assert!(build_bc(&outs, &[("x", "x")], 1).is_err());
        assert!(build_bc(&outs, &[("x", "w")], 1).is_err());
        assert!(build_bc(&outs, &[("x", "y"), ("x", "z")], 1).is_err());
        assert!(build_bc(&outs, &[("x", "y")], 2).is_err());
        // internal DOFs are not connectable
        let mixed = vec![DofLabel::internal("x", "A"), DofLabel::interface("y", "B")];
        assert!(build_bc(&mixed, &[("x", "y")], 1).is_err());
    }

    #[test]
    fn rigid_empty_pairs_is_block_diagonal() {
        let s1 = StateSpaceModel::from_mkv(
            "s1",
            &dmatrix![1.0],
            &dmatrix![100.0],
            &dmatrix![1.0],
            OutputKind::Acceleration,
            vec![DofLabel::interface("x", "s1")],
        )
        .unwrap();
        let s2 = StateSpaceModel::from_mkv(
            "s2",
            &dmatrix![2.0],
            &dmatrix![300.0],
            &dmatrix![0.5],
            OutputKind::Acceleration,
            vec![DofLabel::interface("x", "s2")],
        )
        .unwrap();
        let outs: Vec<DofLabel> = s1.outputs().iter().chain(s2.outputs()).cloned().collect();
        let bc = build_bc(&outs, &[], 1).unwrap();
        let r = couple_rigid(&[&s1, &s2], &bc).unwrap();
        let blk = block_diagonal(&[&s1, &s2], "blk").unwrap();
        assert_eq!(r.model.a(), blk.a());
        assert_eq!(r.model.d(), blk.d());
        assert_eq!(r.n_relaxed, 0);
    }

    #[test]
    fn state_count_is_sum_of_parts() {
        use crate::lumped::testcase;
        use crate::lumped::ResidueSpec;
        use crate::invsub::{is_identify_ce, IsOptions, IsSelection};

        let a = testcase::component_a::<f64>().to_model(OutputKind::Acceleration).unwrap();
        let b = testcase::component_b::<f64>().to_model(OutputKind::Acceleration).unwrap();
        let asm1 = testcase::mount_m1_with_fixtures::<f64>().to_model(OutputKind::Displacement).unwrap();
        let asm2 = testcase::mount_m2_with_fixtures::<f64>().to_model(OutputKind::Displacement).unwrap();
        let opts = IsOptions {
            coupling_form: false,
            residue: Some(ResidueSpec::new(1e-6).unwrap()),
        };
        let ce1 = is_identify_ce(&asm1, &IsSelection::new(vec!["T1".into()], vec!["T2".into()]).unwrap(), &opts).unwrap();
        let ce2 = is_identify_ce(&asm2, &IsSelection::new(vec!["T3".into()], vec!["T4".into()]).unwrap(), &opts).unwrap();
        let mut outs = a.outputs().to_vec();
        outs.extend(b.outputs().iter().cloned());
        let bc = build_bc(&outs, &testcase::mount_pairs(), 1).unwrap();
        let r = couple_relaxed(&[&a, &b], &[&ce1, &ce2], &bc).unwrap();
        assert_eq!(a.n_states() + b.n_states(), 14);
        assert_eq!(ce1.n_states(), 4);
        assert_eq!(r.model.n_states(), 22);
        assert_eq!(r.n_relaxed, 2);
        assert_eq!(r.layout.n_states(), 22);
        assert_eq!(r.layout.ces[0].start, 14);
        assert_eq!(r.layout.ces[1].start, 18);
    }

    #[test]
    fn relaxed_rejects_mismatched_ce_count() {
        let s1 = StateSpaceModel::from_mkv(
            "s1",
            &dmatrix![1.0],
            &dmatrix![100.0],
            &dmatrix![1.0],
            OutputKind::Acceleration,
            vec![DofLabel::interface("x", "s1")],
        )
        .unwrap();
        let s2 = StateSpaceModel::from_mkv(
            "s2",
            &dmatrix![2.0],
            &dmatrix![300.0],
            &dmatrix![0.5],
            OutputKind::Acceleration,
            vec![DofLabel::interface("x", "s2")],
        )
        .unwrap();
        let outs: Vec<DofLabel> = s1.outputs().iter().chain(s2.outputs()).cloned().collect();
        let bc = build_bc(&outs, &[("s1/x", "s2/x")], 1).unwrap();
        assert!(couple_relaxed(&[&s1, &s2], &[], &bc).is_err());
    }
}
