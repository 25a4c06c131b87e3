//! Cross-checks between the state-space route and the frequency-domain
//! oracles outside the acceptance criteria.

use nalgebra::Complex;
use substruct::coupling::{build_bc, couple_rigid};
use substruct::frf::{FrequencyGrid, FrfMatrix};
use substruct::invsub::IsSelection;
use substruct::lumped::testcase;
use substruct::model::OutputKind;
use substruct::primal::{localization_from_bc, primal_assemble, stacked_outputs};
use substruct_oracle::direct::accelerance_from_mkv;
use substruct_oracle::{compare_frf, fbs_couple_relaxed, fbs_couple_rigid, invert_frf, is_on_frf, primal_fbs};

fn grid() -> FrequencyGrid<f64> {
    FrequencyGrid::linear_hz(0.5, 50.0, 257).unwrap()
}

#[test]
fn rigid_coupling_routes_agree() {
    let g = grid();
    let a = testcase::component_a::<f64>().to_model(OutputKind::Acceleration).unwrap();
    let b = testcase::component_b::<f64>().to_model(OutputKind::Acceleration).unwrap();
    let mut outs = a.outputs().to_vec();
    outs.extend(b.outputs().iter().cloned());
    let bc = build_bc(&outs, &testcase::mount_pairs(), 1).unwrap();
    let h_ss = couple_rigid(&[&a, &b], &bc).unwrap().model.frf(&g).unwrap();

    let ha = accelerance_from_mkv(&testcase::component_a::<f64>(), &g).unwrap();
    let hb = accelerance_from_mkv(&testcase::component_b::<f64>(), &g).unwrap();
    let h_blk = FrfMatrix::block_diagonal(&[&ha, &hb]).unwrap();
    let h_fbs = fbs_couple_rigid(&h_blk, &bc).unwrap();
    let cmp = compare_frf(&h_fbs, &h_ss).unwrap();
    assert!(cmp.max_rel_error < 1e-8, "{:e}", cmp.max_rel_error);
}

#[test]
fn vanishing_relaxation_converges_monotonically_to_rigid() {
    let g = grid();
    let ha = accelerance_from_mkv(&testcase::component_a::<f64>(), &g).unwrap();
    let hb = accelerance_from_mkv(&testcase::component_b::<f64>(), &g).unwrap();
    let h = FrfMatrix::block_diagonal(&[&ha, &hb]).unwrap();
    let bc = build_bc(h.outputs(), &testcase::mount_pairs(), 1).unwrap();
    let rigid = fbs_couple_rigid(&h, &bc).unwrap();

    // a fixed physical relaxation term, scaled down by decades
    let base: Vec<Complex<f64>> = g
        .omegas()
        .iter()
        .map(|&w| Complex::new(1.0, 0.0) / (Complex::new(1e5, 20.0 * w) / Complex::new(-w * w, 0.0)))
        .collect();
    let mut prev = f64::INFINITY;
    for scale in [1e-3, 1e-6, 1e-9] {
        let ce = FrfMatrix::new(
            g.omegas().to_vec(),
            base.iter().map(|&z| nalgebra::DMatrix::from_element(1, 1, z * Complex::new(scale, 0.0))).collect(),
            h.quantity(),
            vec![substruct::dof::DofLabel::interface("r", "ce")],
            vec![substruct::dof::DofLabel::interface("r", "ce")],
        )
        .unwrap();
        let relaxed = fbs_couple_relaxed(&h, &[&ce, &ce], &bc).unwrap();
        let dev = compare_frf(&rigid, &relaxed).unwrap().max_rel_error;
        assert!(dev < prev, "scale {scale:e}: {dev} !< {prev}");
        prev = dev;
    }
    assert!(prev < 1e-6, "{prev}");
}

#[test]
fn primal_routes_agree_and_recover_the_element() {
    let g = grid();
    // state-space primal assembly of fixtures around the massless mount
    let fix = |name: &str, dof: &str| {
        substruct::lumped::LumpedSystem::<f64>::new(
            name,
            vec![substruct::lumped::LumpedNode {
                name: dof.into(),
                mass: 2.0,
                grounded_spring: None,
            }],
            vec![],
            vec![dof.to_string()],
        )
        .unwrap()
        .apparent_mass_model(None)
        .unwrap()
    };
    let fix_a = fix("fixA", "T1");
    let fix_b = fix("fixB", "T2");
    let mount = testcase::mount_m1_bare::<f64>().apparent_mass_model(None).unwrap();
    let models = [&fix_a, &mount, &fix_b];
    let outs = stacked_outputs(&models);
    let bc = build_bc(&outs, &[("T1", "m1a"), ("T2", "m1b")], 1).unwrap();
    let lo = localization_from_bc(&bc);
    let asm_ss = primal_assemble(&models, &lo).unwrap().frf(&g).unwrap();

    // frequency-domain primal assembly over the same blocks
    let za = fix_a.frf(&g).unwrap();
    let zm = mount.frf(&g).unwrap();
    let zb = fix_b.frf(&g).unwrap();
    let z_blk = FrfMatrix::block_diagonal(&[&za, &zm, &zb]).unwrap();
    let asm_fbs = primal_fbs(&z_blk, &lo).unwrap();
    let cmp = compare_frf(&asm_fbs, &asm_ss).unwrap();
    assert!(cmp.max_rel_error < 1e-8, "{:e}", cmp.max_rel_error);

    // frequency-domain fixture decoupling: negate the fixture blocks and
    // assemble; the element's own apparent mass comes back
    let asm = testcase::mount_m1_with_fixtures::<f64>().apparent_mass_model(None).unwrap();
    let z_asm = asm.frf(&g).unwrap();
    let fix_n = |name: &str, dof: &str| fix(name, dof).frf(&g).unwrap().negated();
    let z_stack = FrfMatrix::block_diagonal(&[&z_asm, &fix_n("remA", "F1"), &fix_n("remB", "F2")]).unwrap();
    let bc2 = build_bc(z_stack.outputs(), &[("T1", "F1"), ("T2", "F2")], 1).unwrap();
    let lo2 = localization_from_bc(&bc2);
    let z_mount = primal_fbs(&z_stack, &lo2).unwrap();
    for (k, &w) in g.omegas().iter().enumerate() {
        let kap = Complex::new(1e5, 20.0 * w) / Complex::new(-w * w, 0.0);
        let want = nalgebra::DMatrix::from_row_slice(2, 2, &[kap, -kap, -kap, kap]);
        let err = (z_mount.at(k) - &want).norm() / want.norm();
        assert!(err < 1e-9, "line {k}: {err}");
    }
}

#[test]
fn in_situ_extraction_from_the_full_assembly_matches_the_fixture_route() {
    // the off-diagonal apparent-mass term between the connected DOFs is a
    // property of the element, whether extracted from the fixture assembly
    // or from the complete structure
    let g = grid();
    let h_mono = accelerance_from_mkv(&testcase::assembled_monolith::<f64>(), &g).unwrap();
    let z_mono = invert_frf(&h_mono).unwrap();
    let sel_mono = IsSelection::new(vec!["a2".into()], vec!["p1".into()]).unwrap();
    let diag_mono = is_on_frf(&z_mono, &sel_mono).unwrap();

    let h_fix = accelerance_from_mkv(&testcase::mount_m1_with_fixtures::<f64>(), &g).unwrap();
    let z_fix = invert_frf(&h_fix).unwrap();
    let sel_fix = IsSelection::new(vec!["T1".into()], vec!["T2".into()]).unwrap();
    let diag_fix = is_on_frf(&z_fix, &sel_fix).unwrap();

    for k in 0..g.len() {
        let a = diag_mono.at(k)[(0, 0)];
        let b = diag_fix.at(k)[(0, 0)];
        let err = (a - b).norm() / b.norm();
        assert!(err < 1e-9, "line {k}: {err}");
    }
}
