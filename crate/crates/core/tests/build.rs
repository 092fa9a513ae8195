use zms::build::{
    build_square, build_zms, compose_swl_with_strategy, figures, zms_rank2_odd, zms_two_power, BuildOutcome, ConstructionTrace, ImpossibilityReason,
    Lemma, Strategy,
};
use zms::{GroupElement, GroupSpec};

fn g(s: &str) -> GroupSpec {
    GroupSpec::parse(s).unwrap()
}

fn lemmas(t: &ConstructionTrace) -> Vec<Lemma> {
    t.steps.iter().map(|s| s.lemma).collect()
}

#[test]
fn z6_z6_uses_the_three_by_three_core() {
    let (sq, trace) = build_square(&g("Z6xZ6")).unwrap();
    assert!(sq.is_zero_sum());
    assert_eq!(sq.side(), 6);
    let swl = trace.steps.iter().find(|s| s.lemma == Lemma::Swl2).unwrap();
    assert_eq!((swl.params.m, swl.params.k), (Some(3), Some(2)));
    assert_eq!(swl.params.h, Some(g("Z2xZ2")));
}

#[test]
fn certificates_for_small_sides_and_unique_involutions() {
    for (s, reason) in [("Z4", ImpossibilityReason::SideTooSmall), ("Z2xZ2", ImpossibilityReason::SideTooSmall), ("trivial", ImpossibilityReason::SideTooSmall), ("Z36", ImpossibilityReason::UniqueInvolution), ("Z4xZ9", ImpossibilityReason::UniqueInvolution)] {
        let BuildOutcome::Impossible(c) = build_zms(&g(s)).unwrap() else { panic!("{s} was built") };
        assert_eq!(c.reason, reason, "{s}");
        c.recheck().unwrap();
    }
    let BuildOutcome::Impossible(c) = build_zms(&g("Z36")).unwrap() else { panic!() };
    assert_eq!(c.involution, Some(GroupElement::new(vec![18])));
    let json: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    assert_eq!(json["reason"], "unique_involution");
}

#[test]
fn two_power_cases() {
    let (_, t) = build_square(&g("Z2xZ2xZ2xZ2")).unwrap();
    assert_eq!(lemmas(&t), vec![Lemma::BaseFigure]);
    let (_, t) = build_square(&g("Z4xZ16")).unwrap();
    assert_eq!(lemmas(&t), vec![Lemma::BaseFigure, Lemma::H4Blocks]);
    assert_eq!(t.steps[0].params.fixture.as_deref(), Some("z4xz4"));
    let (sq, t) = build_square(&g("Z8xZ8")).unwrap();
    assert_eq!(lemmas(&t), vec![Lemma::BaseFigure, Lemma::Double]);
    assert_eq!(sq, figures::z8_z8());
    let (sq, _) = build_square(&g("Z2xZ32")).unwrap();
    assert_eq!(sq, figures::z2_z32());
    assert!(zms_two_power(&g("Z2xZ4xZ8")).unwrap().is_zero_sum());
}

#[test]
fn composition_example() {
    let sq = figures::z9_zero();
    let (out, strategy) = compose_swl_with_strategy(&zms_rank2_odd(3).unwrap(), &g("Z5xZ5")).unwrap();
    assert_eq!(strategy, Strategy::Grouped);
    assert_eq!(out.spec(), &g("Z3xZ3xZ5xZ5"));
    assert!(out.is_zero_sum());
    let (same, s) = compose_swl_with_strategy(&sq, &GroupSpec::trivial()).unwrap();
    assert_eq!((same.cells(), s), (sq.cells(), Strategy::Identity));
}

#[test]
fn odd_sylow_ranks_above_two() {
    let (_, t) = build_square(&g("Z3xZ3xZ3xZ3")).unwrap();
    assert!(t.steps.iter().any(|s| s.lemma == Lemma::Swl2 && s.params.h == Some(g("Z3xZ3"))));
    let (sq, _) = build_square(&g("Z3xZ3xZ9")).unwrap();
    assert_eq!(sq.side(), 9);
}

#[test]
fn trace_json_lists_lemma_names() {
    let (_, t) = build_square(&g("Z27xZ3")).unwrap();
    let json = t.to_json();
    assert!(json.contains(r#""lemma":"primep-rank2""#));
    assert!(json.contains(r#""lemma":"DWL""#));
    assert!(json.contains(r#""lemma":"translate""#));
    assert_eq!(ConstructionTrace::from_json(&json).unwrap(), t);
}
