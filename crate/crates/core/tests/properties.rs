use proptest::prelude::*;

use zms::build::{build_zms, replay, BuildOutcome};
use zms::kotzig::build_kotzig;
use zms::{abelian_groups_of_order, GroupSpec, Isomorphism, Square};

fn buildable() -> Vec<GroupSpec> {
    (3..=8u64).flat_map(|n| abelian_groups_of_order(n * n)).filter(GroupSpec::in_g).collect()
}

fn built(spec: &GroupSpec) -> Square {
    match build_zms(spec).unwrap() {
        BuildOutcome::Built { square, .. } => square,
        BuildOutcome::Impossible(c) => panic!("{} certified impossible", c.group),
    }
}

/// Presentations of one group: primary factors merged into cyclic factors
/// according to `mask` (coprime neighbours only).
fn regrouped(spec: &GroupSpec, mask: u64) -> GroupSpec {
    let mut out: Vec<u64> = Vec::new();
    for (i, &m) in spec.moduli().iter().enumerate() {
        match out.last_mut() {
            Some(last) if mask >> i & 1 == 1 && num_integer::gcd(*last, m) == 1 => *last *= m,
            _ => out.push(m),
        }
    }
    GroupSpec::new(out).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn text_and_json_round_trip(i in any::<prop::sample::Index>()) {
        let specs = buildable();
        let sq = built(&specs[i.index(specs.len())]);
        prop_assert_eq!(Square::from_text(&sq.to_text()).unwrap(), sq.clone());
        prop_assert_eq!(Square::from_json(&sq.to_json()).unwrap(), sq);
    }

    #[test]
    fn translation_shifts_the_constant(i in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let specs = buildable();
        let sq = built(&specs[i.index(specs.len())]);
        let spec = sq.spec();
        let x = spec.element_at(seed % spec.order());
        let want = spec.scale(sq.side() as i64, &x).unwrap();
        prop_assert_eq!(sq.translate(&x).unwrap().magic_constant(), Some(want));
    }

    #[test]
    fn builds_over_any_presentation(i in any::<prop::sample::Index>(), mask in any::<u64>()) {
        let specs = buildable();
        let spec = regrouped(&specs[i.index(specs.len())], mask);
        let BuildOutcome::Built { square, trace } = build_zms(&spec).unwrap() else {
            return Err(TestCaseError::fail("certified impossible"));
        };
        prop_assert!(square.is_zero_sum());
        prop_assert_eq!(square.spec(), &spec);
        prop_assert_eq!(replay(&trace).unwrap(), square.clone());
        prop_assert_eq!(build_zms(&spec).unwrap(), BuildOutcome::Built { square, trace });
    }

    #[test]
    fn isomorphisms_preserve_zero_sums(i in any::<prop::sample::Index>(), mask in any::<u64>()) {
        let specs = buildable();
        let spec = &specs[i.index(specs.len())];
        let sq = built(spec);
        let iso = Isomorphism::between(spec, &regrouped(spec, mask)).unwrap();
        prop_assert!(iso.is_consistent());
        let mapped = sq.map_square(&iso).unwrap();
        prop_assert!(mapped.is_zero_sum());
        prop_assert_eq!(mapped.map_square(&iso.inverse()).unwrap(), sq);
    }

    #[test]
    fn blocks_are_zero_sum(i in any::<prop::sample::Index>()) {
        let specs = buildable();
        let sq = built(&specs[i.index(specs.len())]);
        let d = sq.export_blocks().unwrap();
        prop_assert_eq!(d.blocks.len(), 2 * sq.side() + 2);
        for b in &d.blocks {
            prop_assert!(sq.spec().sum(&b.elements).unwrap().is_zero());
        }
    }

    #[test]
    fn kotzig_arrays_have_zero_columns(order in 1u64..=24, j in 2usize..=6, pick in any::<prop::sample::Index>()) {
        let classes = abelian_groups_of_order(order);
        let spec = &classes[pick.index(classes.len())];
        match build_kotzig(spec, j) {
            Ok(ka) => {
                prop_assert!(ka.is_kotzig());
                prop_assert!(ka.column_sums().iter().all(|s| s.is_zero()));
            }
            Err(_) => prop_assert!(j % 2 == 1 && !spec.in_g()),
        }
    }
}
