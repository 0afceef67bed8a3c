use magic_core::xyz::{
    find_hstar, solver_by_name, solver_names, ChainParams, HstarOptions, HstarStatus,
};

#[test]
fn solvers_agree_on_ground_manifolds() {
    for &(jy, jz, h) in &[
        (0.33, 0.0, 0.1),
        (0.5, -0.2, 0.6),
        (0.2, 0.4, 1.5),
        (0.0, 0.0, 0.0),
    ] {
        let params = ChainParams::frustrated(7, jy, jz, h).unwrap();
        let manifolds: Vec<_> = solver_names()
            .iter()
            .map(|name| {
                solver_by_name(name)
                    .unwrap()
                    .ground_manifold(&params)
                    .unwrap()
            })
            .collect();
        for m in &manifolds[1..] {
            assert!((m.ground_energy() - manifolds[0].ground_energy()).abs() < 1e-9);
            assert_eq!(m.degeneracy(), manifolds[0].degeneracy());
            let mut a: Vec<i64> = m.momenta().iter().map(|x| x.ell()).collect();
            let mut b: Vec<i64> = manifolds[0].momenta().iter().map(|x| x.ell()).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn lowest_levels_agree_with_dense() {
    let params = ChainParams::frustrated(9, 0.33, 0.1, 0.4).unwrap();
    let dense = solver_by_name("dense")
        .unwrap()
        .lowest_levels(&params, 6)
        .unwrap();
    let sparse = solver_by_name("lanczos")
        .unwrap()
        .lowest_levels(&params, 6)
        .unwrap();
    for (d, s) in dense.iter().zip(&sparse) {
        assert!((d.energy - s.energy).abs() < 1e-9);
    }
}

#[test]
fn hstar_brackets_a_change_of_ground_state() {
    let solver = solver_by_name("lanczos").unwrap();
    let r = find_hstar(0.33, 0.0, 9, &HstarOptions::default(), solver.as_ref()).unwrap();
    assert_eq!(r.status, HstarStatus::Found);
    assert!(r.hstar > 0.0 && r.bracket_width <= HstarOptions::default().tol);
    assert!(r.above.unwrap().is_unique_zero_momentum());
    let below = r.below.unwrap();
    assert_eq!(below.degeneracy(), 2);
    let ells: Vec<i64> = below.momenta().iter().map(|m| m.ell()).collect();
    assert_eq!(ells[0], -ells[1]);
    let none = find_hstar(0.33, -0.5, 9, &HstarOptions::default(), solver.as_ref()).unwrap();
    assert_eq!(none.status, HstarStatus::NoFinitePhase);
    assert_eq!(none.hstar, 0.0);
}
