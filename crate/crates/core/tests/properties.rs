use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropdol::cohomology::{cohomology_table, euler_check, pd_check, random_region, random_simple_region};
use tropdol::mumford::{random_skeleton, theorem_table_simple};
use tropdol::selftest::{random_matrix, random_tropicalization};
use tropdol::valuation::{from_padic_points, validate_ultrametric};
use tropdol::value::{format_rational, parse_rational};
use tropdol::{
    project_transition, random_ultrametric, tropicalize_direct, tropicalize_incremental, Ambient, LogValue, Region,
    Q,
};

fn rational() -> impl Strategy<Value = Q> {
    (-1000i64..1000, 1i64..60).prop_map(|(n, d)| Q::new(n, d))
}

fn distinct_points() -> impl Strategy<Value = Vec<Q>> {
    prop::collection::btree_set((-200i64..200, 1i64..8), 1..7)
        .prop_map(|s| s.into_iter().map(|(n, d)| Q::new(n, d)).collect::<Vec<_>>())
        .prop_filter("distinct after reduction", |v| {
            let mut w = v.clone();
            w.sort();
            w.dedup();
            w.len() == v.len()
        })
}

fn prime() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![2i64, 3, 5, 7, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_round_trip(q in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        let v = LogValue::Finite(q);
        prop_assert_eq!(v.to_string().parse::<LogValue>().unwrap(), v);
    }

    #[test]
    fn generated_matrices_are_ultrametric(n in 1usize..9, seed in any::<u64>()) {
        let m = random_ultrametric(n, seed, Default::default()).unwrap();
        prop_assert!(validate_ultrametric(&m).unwrap().is_ok());
    }

    #[test]
    fn padic_matrix_is_ultrametric_and_translation_invariant(p in prime(), pts in distinct_points(), t in rational()) {
        let m = from_padic_points(p, &pts).unwrap();
        prop_assert!(validate_ultrametric(&m).unwrap().is_ok());
        let shifted: Vec<Q> = pts.iter().map(|x| x + t).collect();
        let t_m = from_padic_points(p, &shifted).unwrap();
        prop_assert_eq!(t_m.rows(), m.rows());
        // scaling by p lowers every log distance by one
        let scaled: Vec<Q> = pts.iter().map(|x| x * Q::from_integer(p)).collect();
        let s = from_padic_points(p, &scaled).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                prop_assert_eq!(s.get(i, j), m.get(i, j).shifted(Q::from_integer(-1)));
            }
        }
    }

    #[test]
    fn constructions_agree_and_are_smooth(seed in any::<u64>()) {
        let m = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), 7);
        let c = tropicalize_direct(&m).unwrap();
        prop_assert!(c.is_canonical());
        prop_assert!(c.check_balancing().is_balanced());
        prop_assert!(c.is_smooth());
        prop_assert_eq!(tropicalize_incremental(&m).unwrap(), c);
    }

    #[test]
    fn projection_is_tropicalization_of_submatrix(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, 7);
        let mut keep: Vec<usize> = (0..m.n()).filter(|_| rng.gen_bool(0.6)).collect();
        if keep.is_empty() {
            keep.push(0);
        }
        let c = tropicalize_direct(&m).unwrap();
        let sub = tropicalize_direct(&m.restrict(&keep).unwrap()).unwrap();
        prop_assert_eq!(project_transition(&c, &keep).unwrap(), sub);
    }

    #[test]
    fn permuting_points_permutes_coordinates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, 6);
        let mut perm: Vec<usize> = (0..m.n()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let c = tropicalize_direct(&m).unwrap();
        let p = tropicalize_direct(&m.permuted(&perm).unwrap()).unwrap();
        prop_assert_eq!(project_transition(&c, &perm).unwrap(), p);
    }

    #[test]
    fn canonical_form_ignores_subdivision_and_orientation(seed in any::<u64>(), pieces in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_tropicalization(&mut rng, 6);
        prop_assert_eq!(c.canonicalize().canonicalize(), c.canonicalize());
        let fine = c.subdivide_all(pieces);
        prop_assert!(fine.check_balancing().is_balanced());
        prop_assert_eq!(fine.canonicalize(), c.canonicalize());
        let bounded: Vec<usize> = (0..c.edges().len()).filter(|&e| !c.edge(e).is_free()).collect();
        if !bounded.is_empty() {
            let e = bounded[rng.gen_range(0..bounded.len())];
            prop_assert_eq!(c.reverse_edge(e).unwrap().canonicalize(), c.canonicalize());
        }
    }

    #[test]
    fn tables_are_invariant_under_subdivision_and_orientation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = Ambient::Embedded(random_tropicalization(&mut rng, 6));
        let region = random_region(&ambient, &mut rng).unwrap();
        let t = cohomology_table(&region).unwrap();
        prop_assert!(euler_check(&region).unwrap());
        for &e in region.edges() {
            prop_assert_eq!(cohomology_table(&region.subdivide_edge(e).unwrap()).unwrap(), t);
            if region.ambient().ends(e).1.is_some() {
                prop_assert_eq!(cohomology_table(&region.reverse_edge(e).unwrap()).unwrap(), t);
            }
        }
        prop_assert_eq!(cohomology_table(&region.to_abstract()).unwrap(), t);
    }

    #[test]
    fn smooth_regions_satisfy_duality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = Ambient::Embedded(random_tropicalization(&mut rng, 6));
        let region = random_region(&ambient, &mut rng).unwrap();
        prop_assert!(region.in_validated_envelope());
        prop_assert!(pd_check(&cohomology_table(&region).unwrap()).0);
    }

    #[test]
    fn simple_regions_match_closed_form(g in 0usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = random_skeleton(g, seed).ambient().unwrap();
        if let Ok(region) = random_simple_region(&ambient, &mut rng) {
            let k = region.end_count();
            prop_assert_eq!(cohomology_table(&region).unwrap(), theorem_table_simple(k).unwrap());
        }
    }

    #[test]
    fn whole_tropical_line_table(seed in any::<u64>()) {
        let c = random_tropicalization(&mut ChaCha8Rng::seed_from_u64(seed), 6);
        let t = cohomology_table(&Region::whole(Ambient::Embedded(c)).unwrap()).unwrap();
        prop_assert_eq!(t.h, [[1, 0], [0, 0]]);
        prop_assert_eq!(t.hc, [[0, 0], [0, 1]]);
    }
}
