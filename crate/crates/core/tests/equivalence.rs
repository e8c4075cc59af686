use mbgg::gadgets::GadgetLibrary;
use mbgg::geography::{enumerate_instances, write_gg, GgInstance, Player};
use mbgg::solver::{verify_equivalence, EquivalenceOptions, Verdict};

fn check(inst: &GgInstance, expected: Option<Player>) {
    let lib = GadgetLibrary::builtin();
    let t = std::time::Instant::now();
    let r = verify_equivalence(inst, &lib, &EquivalenceOptions::default()).unwrap();
    eprintln!("{}\n{r}\n{:?}", write_gg(inst), t.elapsed());
    assert_eq!(r.verdict, Verdict::Pass, "{}", write_gg(inst));
    if let Some(p) = expected {
        assert_eq!(r.gg.winner, p);
    }
}

#[test]
fn two_cycle() {
    let inst = GgInstance::from_arcs("s", [("s", "v"), ("v", "w"), ("w", "v")]).unwrap();
    check(&inst, Some(Player::Alice));
}

#[test]
fn entry_into_a_two_cycle() {
    let inst = GgInstance::from_arcs("s", [("s", "v"), ("v", "w"), ("w", "x"), ("x", "w")]).unwrap();
    check(&inst, Some(Player::Bob));
}

#[test]
fn every_small_instance() {
    for n in 3..=5 {
        for inst in enumerate_instances(n, 1) {
            check(&inst, None);
        }
    }
}
