mod common;

use std::collections::BTreeSet;

use common::reach::{compare, random_workspace};
use lrkit::statechart::{reachable_outcomes, to_statechart};

#[test]
fn corpus_composites_match_the_oracle() {
    let mut total = 0;
    for name in common::CASE_STUDIES {
        let c = common::corpus(name);
        let ws = c.link().unwrap();
        let sc = to_statechart(&ws, c.manifest.process.as_deref().unwrap()).unwrap();
        total += compare(&ws, &sc).0;
    }
    assert!(total >= 20);
}

#[test]
fn screwing_has_both_outcomes() {
    let ws = common::workspace("screwing");
    let sc = to_statechart(&ws, "AssembleScrew").unwrap();
    let id = sc.by_path("AssembleScrew/job/Screwing").unwrap().id;
    let want: BTreeSet<String> = ["failed", "screwTightened"].map(String::from).into();
    assert_eq!(reachable_outcomes(&sc)[&id], want);
}

#[test]
fn random_nets_match_the_oracle() {
    let (mut composites, mut partial) = (0, 0);
    for seed in 0..200 {
        let ws = random_workspace(seed);
        let sc = to_statechart(&ws, "P0").unwrap();
        let (n, p) = compare(&ws, &sc);
        composites += n;
        partial += p;
    }
    assert!(composites >= 200 * 3);
    // the generator must also produce nets where some `end` is unreachable
    assert!(
        partial > 20,
        "only {partial} composites with unreachable ends"
    );
}
