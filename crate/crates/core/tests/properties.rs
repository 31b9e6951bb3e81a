mod common;

use gfmi::catalog::get_catalog;
use gfmi::discovery::{discover, EnumerationSpec};
use gfmi::harness::{
    random_affine, random_map, random_pointset, random_similarity, AffineMap, Descriptor,
};
use gfmi::independence::{functional_rank, MomentVariableSpace};
use gfmi::moments::{central_moments, raw_moments};
use gfmi::{Group, InvariantCore, MomentPolynomial, WeightedPoint, WeightedPointSet};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn core_from_seed(seed: u64) -> InvariantCore {
    common::random_core(&mut ChaCha8Rng::seed_from_u64(seed), 4, 4)
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs()).max(1e-300)
}

fn core_value(core: &InvariantCore, ps: &WeightedPointSet) -> (f64, f64) {
    let p = core.translate();
    let mv = central_moments(ps, p.order().max(1)).unwrap();
    let (_, scale) = common::brute_force_core(core, ps);
    (p.evaluate(&mv).unwrap(), scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn central_moments_ignore_translation(
        seed in any::<u64>(),
        dx in -50.0f64..50.0,
        dy in -50.0f64..50.0,
    ) {
        let ps = random_pointset(2, 12, seed).unwrap();
        let a = central_moments(&ps, 4).unwrap();
        let b = central_moments(&ps.translated([dx, dy, 0.0]), 4).unwrap();
        let m20 = a.get(gfmi::MomentIndex::d2(2, 0)).unwrap();
        for ((idx, x), (_, y)) in a.iter().zip(b.iter()) {
            // Shifts of size 50 cost about 50^order relative digits of the second moment.
            let scale = m20.powf(idx.order() as f64 / 2.0) * a.m00();
            prop_assert!(close(x, y, scale, 1e-8), "{idx}: {x} vs {y}");
        }
    }

    #[test]
    fn moments_are_homogeneous(seed in any::<u64>(), c in 0.1f64..10.0, s in 0.2f64..5.0) {
        let ps = random_pointset(2, 10, seed).unwrap();
        let heavier = WeightedPointSet::new(
            2,
            ps.points().iter().map(|p| WeightedPoint { weight: p.weight * c, ..*p }).collect(),
        )
        .unwrap();
        let base = raw_moments(&ps, 3).unwrap();
        for ((idx, x), (_, y)) in base.iter().zip(raw_moments(&heavier, 3).unwrap().iter()) {
            prop_assert!(close(c * x, y, c * base.m00(), 1e-12), "{idx}");
        }
        // Scaling coordinates by s with density transport multiplies mu_pq by s^(p+q+2).
        let scaled = AffineMap::scale(2, s).apply(&ps).unwrap();
        let a = central_moments(&ps, 3).unwrap();
        for ((idx, x), (_, y)) in a.iter().zip(central_moments(&scaled, 3).unwrap().iter()) {
            let f = s.powi(idx.order() as i32 + 2);
            prop_assert!(close(f * x, y, f * a.m00(), 1e-11), "{idx}");
        }
    }

    #[test]
    fn translations_are_rotation_invariant_with_parity(
        core_seed in any::<u64>(),
        set_seed in any::<u64>(),
        theta in -3.2f64..3.2,
    ) {
        let core = core_from_seed(core_seed);
        let ps = random_pointset(2, 8, set_seed).unwrap();
        let (v, scale) = core_value(&core, &ps);
        let (r, _) = core_value(&core, &AffineMap::rotation_2d(theta).apply(&ps).unwrap());
        prop_assert!(close(v, r, scale, 1e-9), "{core}: {v} vs {r}");
        let (m, _) = core_value(&core, &AffineMap::mirror(2).apply(&ps).unwrap());
        let expected = if core.is_skew() { -v } else { v };
        prop_assert!(close(expected, m, scale, 1e-9), "{core}: mirror {m} vs {expected}");
    }

    #[test]
    fn g_cores_are_affine_covariant(entry in 0usize..19, set_seed in any::<u64>(), map_seed in any::<u64>()) {
        let e = &get_catalog(Group::Affine)[entry];
        let map = random_affine(map_seed);
        let ps = random_pointset(2, 12, set_seed).unwrap();
        let d = Descriptor::from(e);
        let before = d.numerator_value(&ps).unwrap();
        let after = d.numerator_value(&map.apply(&ps).unwrap()).unwrap();
        let factor = map.det().abs().powi(e.core.degree_order().0 as i32)
            * map.det().powi(e.core.count(gfmi::FactorKind::G) as i32);
        prop_assert!(close(before * factor, after, 0.0, 1e-9), "{}: {} vs {}", e.name, before * factor, after);
    }

    #[test]
    fn composition_matches_sequential_application(a in any::<u64>(), b in any::<u64>(), set_seed in any::<u64>()) {
        let (f, g) = (random_affine(a), random_similarity(b));
        let ps = random_pointset(2, 6, set_seed).unwrap();
        let once = f.compose(&g).unwrap().apply(&ps).unwrap();
        let twice = f.apply(&g.apply(&ps).unwrap()).unwrap();
        for (p, q) in once.points().iter().zip(twice.points()) {
            for d in 0..2 {
                prop_assert!(close(p.coords[d], q.coords[d], 1.0, 1e-12));
            }
            prop_assert!(close(p.weight, q.weight, 1.0, 1e-12));
        }
    }

    #[test]
    fn polynomial_text_round_trips(core_seed in any::<u64>()) {
        let p = core_from_seed(core_seed).translate();
        prop_assert_eq!(MomentPolynomial::parse(&p.to_string(), 2).unwrap(), p);
    }
}

fn affine_pool() -> Vec<MomentPolynomial> {
    get_catalog(Group::Affine)
        .iter()
        .map(|e| e.reference.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rank_is_monotone_and_bounded(mask in any::<u32>(), extra in 0usize..19, seed in 0u64..1000) {
        let pool = affine_pool();
        let space = MomentVariableSpace::new(Group::Affine, 5).unwrap();
        let subset: Vec<_> = (0..19).filter(|i| mask >> i & 1 == 1).map(|i| pool[i].clone()).collect();
        let mut superset = subset.clone();
        superset.push(pool[extra].clone());
        let r = functional_rank(&subset, &space, 5, seed).unwrap();
        let r_sup = functional_rank(&superset, &space, 5, seed).unwrap();
        prop_assert!(r <= r_sup && r_sup <= r + 1);
        prop_assert!(r <= subset.len().min(space.len()));
    }

    #[test]
    fn rank_ignores_constant_factors(num in 1i64..1000, den in 1i64..1000, neg in any::<bool>(), seed in 0u64..1000) {
        let space = MomentVariableSpace::new(Group::Affine, 5).unwrap();
        let c = BigRational::new((if neg { -num } else { num }).into(), den.into());
        let pool = affine_pool();
        let scaled: Vec<_> = pool.iter().map(|p| p.scale(&c)).collect();
        let r = functional_rank(&pool, &space, 5, seed).unwrap();
        prop_assert_eq!(r, functional_rank(&scaled, &space, 5, seed).unwrap());
        prop_assert_eq!(r, functional_rank(&pool, &space, 5, seed).unwrap());
    }
}

fn check_discovery(spec: &EnumerationSpec, seed: u64) {
    let report = discover(spec, usize::MAX, seed).unwrap();
    let canon: Vec<_> = report
        .selected
        .iter()
        .map(|s| s.canonical.clone())
        .collect();
    for (i, a) in canon.iter().enumerate() {
        assert!(
            !canon[..i].contains(a),
            "duplicate canonical polynomial {a}"
        );
    }
    let space = MomentVariableSpace::new(spec.group, spec.max_count).unwrap();
    assert_eq!(
        functional_rank(&canon, &space, 5, seed).unwrap(),
        canon.len()
    );

    let ps = random_pointset(spec.dim, 15, seed).unwrap();
    for s in &report.selected {
        let d = Descriptor::from_discovered(s, spec.group);
        let base = d.value(&ps).unwrap();
        for t in 0..5 {
            let v = d
                .value(&random_map(spec.group, seed * 31 + t).apply(&ps).unwrap())
                .unwrap();
            assert!(close(base, v, 0.0, 1e-8), "{}: {base} vs {v}", s.core);
        }
    }
}

#[test]
fn discovered_sets_are_distinct_independent_and_invariant() {
    for seed in [0, 1, 17] {
        check_discovery(&EnumerationSpec::new(Group::Affine, 3, 3), seed);
        check_discovery(&EnumerationSpec::new(Group::Similarity, 3, 3), seed);
        check_discovery(&EnumerationSpec::new(Group::Rotation3D, 3, 2), seed);
    }
}
