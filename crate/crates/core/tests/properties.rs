//! Randomized invariants across the public API.

use std::f64::consts::PI;

use afm_duality::afm::{nr_energy_one_body, solve_afm, universal_nr, universal_ur, ur_mass_one_body, SystemSpec};
use afm_duality::duality::{
    bridge_build, bridge_verify, rhs_system, transform_params, verify_relation, Body, FreeParams, RelationId,
};
use afm_duality::exact::moshinsky::{band_states, rotation_block};
use afm_duality::exact::three_body::symmetry_projector;
use afm_duality::exact::{solve_3b, solve_radial_2b, MeshConfig, Symmetry, ThreeBodyBasisConfig};
use afm_duality::potentials::Potential;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn arb_potential() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|a| Potential::linear(a).unwrap()),
        (0.1f64..5.0).prop_map(|k| Potential::quadratic(k).unwrap()),
        (0.1f64..5.0).prop_map(|a| Potential::coulomb(a).unwrap()),
        (0.1f64..5.0, prop_oneof![-1.0f64..-0.1, 0.1f64..2.0]).prop_map(|(a, l)| Potential::power_law(a, l).unwrap()),
        (0.1f64..5.0, 0.1f64..5.0).prop_map(|(a, b)| Potential::funnel(a, b).unwrap()),
        (0.1f64..5.0).prop_map(|a| Potential::sqrt_well(a).unwrap()),
        (0.1f64..5.0, 0.1f64..3.0).prop_map(|(a, alpha)| Potential::funnel(a, 1.0).unwrap().sqrt_transform(alpha).unwrap()),
    ]
}

/// Confining potentials with a massless bound state for every flavor; the
/// Coulomb tail of the funnel stays weak enough for Q ≥ 1, N ≤ 8.
fn arb_confining() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|a| Potential::linear(a).unwrap()),
        (0.1f64..5.0).prop_map(|k| Potential::quadratic(k).unwrap()),
        (0.005f64..0.03, 0.5f64..2.0).prop_map(|(a, b)| Potential::funnel(a, b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_central_difference(p in arb_potential(), r in 0.1f64..10.0) {
        let h = 1e-5 * r;
        let fd = (p.eval(r + h).unwrap() - p.eval(r - h).unwrap()) / (2.0 * h);
        let d = p.deriv(r).unwrap();
        prop_assert!((d - fd).abs() / d.abs().max(1.0) <= 1e-6, "{p}: {d} vs {fd}");
    }

    #[test]
    fn double_sqrt_transform_quarters_power(a in 0.1f64..5.0, lambda in prop_oneof![-1.0f64..-0.1, 0.1f64..2.0]) {
        let p = Potential::power_law(a, lambda).unwrap();
        let twice = p.sqrt_transform(1.0).unwrap().sqrt_transform(1.0).unwrap();
        let (_, l) = twice.as_power_law().unwrap();
        prop_assert!((l - lambda / 4.0).abs() < 1e-15);
    }

    #[test]
    fn heavy_and_massless_limits(a in 0.1f64..5.0, n in 2usize..8, q in 1.5f64..20.0) {
        let v = Potential::linear(a).unwrap();
        let heavy = 1e4;
        let sr = solve_afm(&SystemSpec::semirelativistic(n, heavy, None, Some(v.clone())).unwrap(), q).unwrap().value;
        let nr = solve_afm(&SystemSpec::nonrelativistic(n, heavy, None, Some(v.clone())).unwrap(), q).unwrap().value;
        prop_assert!(rel(sr - n as f64 * heavy, nr) <= 1e-3, "{} vs {nr}", sr - n as f64 * heavy);

        let light = solve_afm(&SystemSpec::semirelativistic(n, 1e-6, None, Some(v.clone())).unwrap(), q).unwrap().value;
        let ur = solve_afm(&SystemSpec::ultrarelativistic(n, None, Some(v)).unwrap(), q).unwrap().value;
        prop_assert!(rel(light, ur) <= 1e-6, "{light} vs {ur}");
    }

    #[test]
    fn nonrelativistic_depends_on_q2_over_m(
        v in arb_confining(), n in 2usize..8, m in 0.1f64..10.0, q in 1.5f64..20.0, beta in 0.1f64..10.0,
    ) {
        let e1 = solve_afm(&SystemSpec::nonrelativistic(n, m, Some(v.clone()), None).unwrap(), q).unwrap().value;
        let e2 = solve_afm(&SystemSpec::nonrelativistic(n, beta * beta * m, Some(v), None).unwrap(), beta * q).unwrap().value;
        prop_assert!(rel(e1, e2) <= 1e-10, "{e1} vs {e2}");
    }

    #[test]
    fn value_increases_with_q(v in arb_confining(), n in 2usize..6, m in 0.1f64..5.0, sigma in 0.5f64..4.0) {
        let specs = [
            SystemSpec::nonrelativistic(n, m, None, Some(v.clone())).unwrap(),
            SystemSpec::ultrarelativistic(n, None, Some(v.clone())).unwrap(),
            SystemSpec::semirelativistic(n, m, None, Some(v.clone())).unwrap(),
            SystemSpec::sigma(sigma, m, v.clone()).unwrap(),
        ];
        for spec in &specs {
            let values: Vec<f64> = (0..12).map(|i| solve_afm(spec, 1.0 + 1.5 * i as f64).unwrap().value).collect();
            prop_assert!(values.windows(2).all(|w| w[1] > w[0]), "{:?}: {values:?}", spec.flavor);
        }
    }

    #[test]
    fn universal_functions_depend_only_on_argument(v in arb_confining(), x in 0.1f64..10.0, k in 1u32..4) {
        let n = 1usize << k;
        let via_mass = ur_mass_one_body(&v, n, x * n as f64).unwrap() / n as f64;
        prop_assert_eq!(via_mass.to_bits(), universal_ur(&v, x).unwrap().to_bits());
        let s = x.sqrt();
        let via_energy = nr_energy_one_body(&v, n, 1.0, s * n as f64).unwrap() / n as f64;
        prop_assert_eq!(via_energy.to_bits(), universal_nr(&v, s * s).unwrap().to_bits());
    }

    #[test]
    fn sigma_relations_hold_for_any_sigma(
        v in arb_confining(), n in 2usize..8, m in 0.1f64..10.0, q in 1.0f64..20.0, s1 in 0.2f64..5.0, s2 in 0.2f64..5.0,
    ) {
        for (rel_id, spec) in [
            (RelationId::Gen1bSigma, SystemSpec::semirelativistic(n, m, Some(v.clone()), None).unwrap()),
            (RelationId::Gen2bSigma, SystemSpec::semirelativistic(n, m, None, Some(v.clone())).unwrap()),
        ] {
            for sigma in [s1, s2] {
                let free = FreeParams { sigma: Some(sigma), ..Default::default() };
                let r = verify_relation(rel_id, &spec, q, &free, 1e-9).unwrap();
                prop_assert!(r.passed, "{rel_id} sigma={sigma}: {}", r.rel_residual);
            }
        }
    }

    #[test]
    fn n_to_p_and_back_recovers_value(
        v in arb_confining(), n in 2usize..8, p in 2usize..8, m in 0.1f64..10.0, q in 1.0f64..20.0,
    ) {
        let spec = SystemSpec::semirelativistic(n, m, None, Some(v)).unwrap();
        let there = transform_params(RelationId::Gen2bNp, n, m, q, &FreeParams { p: Some(p), ..Default::default() }).unwrap();
        let mid = rhs_system(RelationId::Gen2bNp, &spec, &there).unwrap();
        let back = transform_params(RelationId::Gen2bNp, p, mid.m, there.q, &FreeParams { p: Some(n), ..Default::default() }).unwrap();
        let end = rhs_system(RelationId::Gen2bNp, &mid, &back).unwrap();
        let original = solve_afm(&spec, q).unwrap().value;
        let round_trip = there.multiplier * back.multiplier * solve_afm(&end, back.q).unwrap().value;
        prop_assert_eq!(end.n, n);
        prop_assert!(rel(original, round_trip) <= 1e-10, "{original} vs {round_trip}");
    }

    #[test]
    fn bridge_potential_depends_on_mass(
        v in arb_confining(), n in 2usize..8, m in 0.1f64..10.0, q in 1.5f64..20.0,
    ) {
        for body in [Body::One, Body::Two] {
            let w1 = bridge_build(&v, body, n, m, q).unwrap();
            let w2 = bridge_build(&v, body, n, 2.0 * m, q).unwrap();
            prop_assert_ne!(&w1, &w2);
            prop_assert!(bridge_verify(&v, body, n, m, q, 1e-9).unwrap().passed);
            prop_assert!(bridge_verify(&v, body, n, 2.0 * m, q, 1e-9).unwrap().passed);
        }
    }

    #[test]
    fn moshinsky_blocks_are_orthogonal(l in 0u32..4, extra in 0u32..8) {
        let band = l + extra;
        let states = band_states(band, l);
        prop_assume!(!states.is_empty());
        let d = rotation_block(&states, l, 2.0 * PI / 3.0).unwrap();
        let n = states.len();
        let err = (d.transpose() * &d - DMatrix::identity(n, n)).abs().max();
        prop_assert!(err <= 1e-10, "B={band} L={l}: {err:e}");
    }

    #[test]
    fn symmetrizers_are_idempotent(l in 0u32..4, extra in 0u32..8) {
        let band = l + extra;
        let states = band_states(band, l);
        prop_assume!(!states.is_empty());
        let d = rotation_block(&states, l, 2.0 * PI / 3.0).unwrap();
        for s in Symmetry::ALL {
            let p = symmetry_projector(&states, &d, s);
            prop_assert!((&p * &p - &p).abs().max() <= 1e-12, "{} B={band} L={l}", s.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_levels_scale_as_cube_root_of_mass(m in 0.25f64..16.0, n in 0u32..3, l in 0u32..3) {
        let v = Potential::linear(1.0).unwrap();
        let cfg = MeshConfig::default();
        let e = solve_radial_2b(m, &v, n, l, &cfg).unwrap().energy * m.cbrt();
        let e1 = solve_radial_2b(1.0, &v, n, l, &cfg).unwrap().energy;
        prop_assert!(rel(e, e1) <= 1e-6, "{e} vs {e1}");
    }

    #[test]
    fn three_body_ground_state_scales_as_cube_root_of_mass(m in 0.25f64..16.0) {
        let v = Potential::linear(1.0).unwrap();
        // Scaling b with m^{-1/3} keeps the basis equivalent.
        let cfg = |mass: f64| ThreeBodyBasisConfig { b: Some(0.8 * (2.0 / mass).cbrt()), bmax: 12, ..Default::default() };
        let e = solve_3b(m, &v, &cfg(m)).unwrap().entries[0].energy * m.cbrt();
        let e2 = solve_3b(2.0, &v, &cfg(2.0)).unwrap().entries[0].energy * 2f64.cbrt();
        prop_assert!(rel(e, e2) <= 1e-6, "{e} vs {e2}");
    }

    #[test]
    fn larger_basis_lowers_every_level(b in 0.5f64..1.2, bmax in 4u32..10) {
        let v = Potential::linear(1.0).unwrap();
        for (l_total, parity, symmetry) in [(0, 1, Symmetry::Symmetric), (1, -1, Symmetry::Mixed)] {
            let cfg = |bm| ThreeBodyBasisConfig { b: Some(b), bmax: bm, l_total, parity, symmetry };
            let small = solve_3b(2.0, &v, &cfg(bmax)).unwrap();
            let large = solve_3b(2.0, &v, &cfg(bmax + 2)).unwrap();
            for (s, g) in small.entries.iter().zip(&large.entries) {
                prop_assert!(g.energy <= s.energy + 1e-10, "{} -> {}", s.energy, g.energy);
            }
        }
    }
}
