//! The constructions against the brute-force oracles on seeded instances.

mod common;

use common::*;
use robinson::generate::{generate, random_ultrametric, rng_for, Profile};
use robinson::IndexSet;

fn run(name: &str, cases: impl IntoIterator<Item = (String, Check)>) {
    let failures: Vec<String> = cases
        .into_iter()
        .filter_map(|(id, r)| r.err().map(|e| format!("{id}: {e}")))
        .take(5)
        .collect();
    assert!(failures.is_empty(), "{name}:\n{}", failures.join("\n"));
}

#[test]
fn compatible_orders_match_brute_force() {
    for profile in Profile::ALL {
        run(
            "orders",
            (0..150u64).map(|seed| {
                let n = 2 + seed as usize % 8;
                (
                    format!("{profile} seed {seed}"),
                    check_orders(&instance(n, seed, profile, true)),
                )
            }),
        );
    }
}

#[test]
fn verdicts_match_brute_force() {
    run(
        "verdict",
        (0..400u64).map(|seed| (format!("seed {seed}"), check_verdict(&mixed_instance(seed)))),
    );
}

#[test]
fn mmodules_and_copoints_match_brute_force() {
    run(
        "mmodules",
        (0..60u64).map(|seed| {
            let profile = Profile::ALL[seed as usize % 4];
            let n = 1 + seed as usize % 11;
            (
                format!("{profile} seed {seed}"),
                check_mmodules(&generate(n, seed, profile)),
            )
        }),
    );
}

#[test]
fn translations_roundtrip() {
    run(
        "roundtrip",
        (0..120u64).map(|seed| {
            let profile = Profile::ALL[seed as usize % 4];
            let n = 2 + seed as usize % 39;
            (
                format!("{profile} seed {seed}"),
                check_roundtrip(&generate(n, seed, profile)),
            )
        }),
    );
}

#[test]
fn dendrogram_is_subdominant() {
    run(
        "subdominant",
        (0..40u64).map(|seed| {
            let profile = Profile::ALL[seed as usize % 4];
            let n = 1 + seed as usize % 48;
            (
                format!("{profile} seed {seed}"),
                check_subdominant(&generate(n, seed, profile)),
            )
        }),
    );
}

#[test]
fn ultrametric_trees_coincide() {
    run(
        "ultrametric",
        (0..40u64).map(|seed| {
            let n = 2 + seed as usize % 40;
            (
                format!("seed {seed}"),
                check_ultrametric(&random_ultrametric(n, &mut rng_for(seed))),
            )
        }),
    );
}

#[test]
fn structural_bounds() {
    run(
        "copoint count",
        (0..80u64).map(|seed| {
            let profile = Profile::ALL[seed as usize % 4];
            (
                format!("{profile} seed {seed}"),
                check_copoint_count(&generate(1 + seed as usize % 20, seed, profile)),
            )
        }),
    );
    run(
        "δ dichotomy",
        (0..30u64).flat_map(|seed| {
            let m = generate(2 + seed as usize % 7, seed, Profile::ALL[seed as usize % 4]);
            let pts = m.n();
            (1u32..1 << pts).map(move |mask| {
                let s = IndexSet::from_unsorted((0..pts).filter(|&i| mask >> i & 1 == 1).collect());
                (
                    format!("seed {seed} mask {mask:b}"),
                    check_delta_dichotomy(&m, &s),
                )
            })
        }),
    );
}

#[test]
fn counting_matches_enumeration() {
    run(
        "counting",
        (0..200u64).map(|seed| {
            let m = generate(
                1 + seed as usize % 12,
                seed,
                Profile::ALL[seed as usize % 4],
            );
            let t = robinson::pq_tree2(&m, &m.all()).expect("generated instances are Robinson");
            (format!("seed {seed}"), check_counting(&t, 10_000))
        }),
    );
}
