use mbgg::gadgets::GadgetLibrary;
use mbgg::geography::{enumerate_up_to_iso, gen_convertible, write_gg, GgInstance};
use mbgg::reduction::{build_associated_game, AssociatedGame};
use mbgg::solver::SolveLimits;
use mbgg::strategy::{check_invariants, reachable_states, verify_lemma5, verify_lemma8};

fn game(inst: &GgInstance) -> AssociatedGame {
    build_associated_game(inst, &GadgetLibrary::builtin()).unwrap()
}

fn sweep(inst: &GgInstance, exhaustive: bool) {
    let g = game(inst);
    let l8 = verify_lemma8(&g).unwrap();
    assert!(l8.passed(), "{}\n{l8}", write_gg(inst));
    let l5 = verify_lemma5(&g, exhaustive.then(|| SolveLimits::nodes(200_000))).unwrap();
    assert!(l5.passed(), "{}\n{l5}", write_gg(inst));
    for st in reachable_states(&g).unwrap() {
        let r = check_invariants(&g, &st);
        assert!(
            r.is_clean(),
            "{}\n{:?}\n{}",
            write_gg(inst),
            r.violations,
            st.trace_text()
        );
    }
}

#[test]
fn named_instances() {
    for arcs in [
        &[("s", "v"), ("v", "w"), ("w", "v")][..],
        &[("s", "v"), ("v", "w"), ("w", "x"), ("x", "w")],
        &[
            ("s", "v"),
            ("v", "w1"),
            ("v", "w2"),
            ("w1", "x"),
            ("w2", "x"),
            ("x", "w1"),
        ],
    ] {
        sweep(&GgInstance::from_arcs("s", arcs.iter().copied()).unwrap(), true);
    }
}

#[test]
fn enumerated_instances() {
    for n in 3..=7 {
        for inst in enumerate_up_to_iso(n, 1) {
            sweep(&inst, n <= 5);
        }
    }
}

#[test]
fn generated_instances() {
    for seed in 0..50 {
        sweep(&gen_convertible(10, seed).unwrap(), false);
    }
}
