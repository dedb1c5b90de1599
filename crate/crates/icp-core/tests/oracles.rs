//! Oracle tests for the non-facial cycle search: exhaustive enumeration on
//! small maps, and the frozen expected values derived from it.

mod common;

use std::f64::consts::PI;

use icp_core::angle::AngleAssignment;
use icp_core::cycles::min_nonfacial_cycle_weight;
use icp_core::map::{PlanarMap, Topology};
use icp_core::tessellation::{generate_regular_patch, generate_torus_quotient};

use common::{brute_force_min_nonfacial, cycle_weight, enumerate_simple_cycles, is_facial};

fn assert_matches_brute_force(map: &PlanarMap, theta: &AngleAssignment, label: &str) {
    let expected = brute_force_min_nonfacial(map, theta, None);
    let got = min_nonfacial_cycle_weight(map, theta, None);
    match (expected, &got) {
        (None, None) => {}
        (Some(w), Some(witness)) => {
            assert!(
                (w - witness.weight).abs() < 1e-12,
                "{label}: enumeration gives {w}, search gives {}",
                witness.weight
            );
            assert!(
                !is_facial(map, &witness.vertices),
                "{label}: witness bounds a face"
            );
            assert!(
                (cycle_weight(map, theta, &witness.vertices) - witness.weight).abs() < 1e-12,
                "{label}: witness weight is inconsistent"
            );
        }
        (e, g) => panic!("{label}: enumeration {e:?} vs search {:?}", g.is_some()),
    }
}

#[test]
fn search_agrees_with_enumeration_on_small_maps() {
    let square =
        PlanarMap::build_from_faces(&[vec![0, 1, 2, 3]], 0, Topology::DiskPatch).unwrap();
    let two_tri =
        PlanarMap::build_from_faces(&[vec![0, 1, 2], vec![0, 2, 3]], 0, Topology::DiskPatch)
            .unwrap();
    let tetra = PlanarMap::build_from_faces(
        &[vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]],
        0,
        Topology::DiskPatch,
    )
    .unwrap();
    let cases: Vec<(PlanarMap, f64, &str)> = vec![
        (square, PI / 2.0, "single square"),
        (two_tri, PI / 3.0, "two triangles"),
        (tetra, PI / 3.0, "tetrahedron minus a face"),
        (generate_regular_patch(3, 6, 1).unwrap(), PI / 3.0, "{3,6} gen 1"),
        (generate_regular_patch(3, 7, 1).unwrap(), PI / 3.0, "{3,7} gen 1"),
        (generate_regular_patch(4, 4, 1).unwrap(), PI / 2.0, "{4,4} gen 1"),
        (generate_torus_quotient(4, 4, 3).unwrap(), PI / 2.0, "(4,4,3) torus"),
        (generate_torus_quotient(3, 6, 3).unwrap(), PI / 3.0, "(3,6,3) torus"),
    ];
    for (map, angle, label) in &cases {
        assert!(map.vertex_count() <= 12, "{label} exceeds the oracle size");
        let theta = AngleAssignment::uniform(map, *angle).unwrap();
        assert_matches_brute_force(map, &theta, label);
        // A C1-preserving perturbation must not change the agreement.
        if let Ok(perturbed) = icp_core::angle::perturb_theta_on_c1(map, &theta, 0.05, 11) {
            assert_matches_brute_force(map, &perturbed, &format!("{label} (perturbed)"));
        }
    }
}

#[test]
fn square_torus_frozen_values() {
    // On the 3x3 square torus with Θ ≡ π/2, enumeration up to length 8 gives
    // a global minimum of 3π/2 (a wrap cycle of 3 edges) and a minimum of 3π
    // over contractible non-facial cycles (the boundary of two adjacent
    // squares, 6 edges).
    let m = generate_torus_quotient(4, 4, 3).unwrap();
    let theta = AngleAssignment::uniform(&m, PI / 2.0).unwrap();

    // Winding of a cycle in the 3-periodic quotient: displacement per step
    // is the representative in {-1, 0, 1}.
    let wrap = |cycle: &[usize]| -> (i64, i64) {
        let coord = |v: usize| ((v / 3) as i64, (v % 3) as i64);
        let mut total = (0i64, 0i64);
        for i in 0..cycle.len() {
            let (ai, aj) = coord(cycle[i]);
            let (bi, bj) = coord(cycle[(i + 1) % cycle.len()]);
            let step = |d: i64| ((d + 1).rem_euclid(3)) - 1;
            total.0 += step(bi - ai);
            total.1 += step(bj - aj);
        }
        total
    };

    let mut global_min = f64::INFINITY;
    let mut contractible_min = f64::INFINITY;
    for cycle in enumerate_simple_cycles(&m) {
        if cycle.len() > 8 || is_facial(&m, &cycle) {
            continue;
        }
        let w = cycle_weight(&m, &theta, &cycle);
        global_min = global_min.min(w);
        if wrap(&cycle) == (0, 0) {
            contractible_min = contractible_min.min(w);
        }
    }
    assert!((global_min - 1.5 * PI).abs() < 1e-12);
    assert!((contractible_min - 3.0 * PI).abs() < 1e-12);

    let witness = min_nonfacial_cycle_weight(&m, &theta, None).unwrap();
    assert!((witness.weight - global_min).abs() < 1e-12);
}

#[test]
fn heptagonal_patch_frozen_bound() {
    // {3,7} with Θ ≡ π/3: every edge weighs 2π/3; enumeration up to length 6
    // on the 2-generation patch confirms the shortest non-facial cycle has 4
    // edges, so the minimum weight is exactly 8π/3 (and ≥ the bound).
    let m = generate_regular_patch(3, 7, 2).unwrap();
    let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
    let brute = enumerate_simple_cycles(&m)
        .into_iter()
        .filter(|c| c.len() <= 6 && !is_facial(&m, c))
        .map(|c| cycle_weight(&m, &theta, &c))
        .min_by(f64::total_cmp)
        .unwrap();
    assert!((brute - 8.0 * PI / 3.0).abs() < 1e-12);
    let witness = min_nonfacial_cycle_weight(&m, &theta, None).unwrap();
    assert_eq!(witness.vertices.len(), 4);
    assert!(witness.weight >= 8.0 * PI / 3.0 - 1e-12);
    assert!((witness.weight - brute).abs() < 1e-12);
}

#[test]
fn capped_search_matches_capped_enumeration() {
    let m = generate_torus_quotient(3, 6, 3).unwrap();
    let theta = AngleAssignment::uniform(&m, PI / 3.0).unwrap();
    for cap in [3usize, 4, 5] {
        let expected = brute_force_min_nonfacial(&m, &theta, Some(cap));
        let got = min_nonfacial_cycle_weight(&m, &theta, Some(cap)).map(|w| w.weight);
        match (expected, got) {
            (None, None) => {}
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "cap {cap}: {a} vs {b}"),
            (a, b) => panic!("cap {cap}: {a:?} vs {b:?}"),
        }
    }
}
