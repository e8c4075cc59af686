use mbgg::gadgets::{parse_library, validate_library, write_library, GadgetLibrary};
use mbgg::geography::{enumerate_instances, GgInstance};
use mbgg::reduction::build_associated_game;
use mbgg::solver::{verify_equivalence, EquivalenceOptions, Verdict};
use mbgg::strategy::{verify_lemma5, verify_lemma8};

fn libraries() -> [GadgetLibrary; 2] {
    let hand = parse_library(include_str!("data/hand_gadgets.lib")).unwrap();
    [GadgetLibrary::builtin(), hand]
}

#[test]
fn both_libraries_are_valid_and_distinct() {
    let [shipped, hand] = libraries();
    assert_ne!(write_library(&shipped), write_library(&hand));
    for lib in [&shipped, &hand] {
        let report = validate_library(lib);
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn verdicts_do_not_depend_on_the_library() {
    let instances: Vec<GgInstance> = (3..=5).flat_map(|n| enumerate_instances(n, 1)).collect();
    for lib in libraries() {
        for inst in &instances {
            let r = verify_equivalence(inst, &lib, &EquivalenceOptions::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r}");
        }
        let e3 = GgInstance::from_arcs(
            "s",
            [
                ("s", "v"),
                ("v", "w1"),
                ("v", "w2"),
                ("w1", "x"),
                ("w2", "x"),
                ("x", "w1"),
            ],
        )
        .unwrap();
        let g = build_associated_game(&e3, &lib).unwrap();
        assert!(verify_lemma5(&g, None).unwrap().passed());
        assert!(verify_lemma8(&g).unwrap().passed());
    }
}
