mod common;

use avwc_core::capacity::{
    capacity_ordering_report, inner_max_eve, inner_min_legit, secrecy_capacity_multi_letter_bound,
    secrecy_capacity_single_letter, CapacityOptions, JammerMode, PrefixSpec,
};
use avwc_core::channel::{mix_row_convex, row_convex_vertices, AvwcPair, ClosureKind};
use avwc_core::simplex::simplex_grid;
use avwc_core::{mutual_information, Distribution, StochasticMatrix};
use common::{random_dist, random_matrix, random_pair, rng};
use rand::Rng;

fn quick() -> CapacityOptions {
    CapacityOptions {
        check_hypotheses: false,
        ..CapacityOptions::default()
    }
}

/// Brute-force `max_P [I(P;W) − I(P;V)]` on the 1/200 grid.
fn single_state_oracle(w: &StochasticMatrix, v: &StochasticMatrix) -> f64 {
    simplex_grid(w.n_in(), 200)
        .into_iter()
        .map(|p| {
            let p = Distribution::new(p).unwrap();
            mutual_information(&p, w).unwrap() - mutual_information(&p, v).unwrap()
        })
        .fold(0.0, f64::max)
}

#[test]
fn single_state_modes_match_the_grid_oracle() {
    let mut r = rng(11);
    for _ in 0..4 {
        let nx = r.gen_range(2..=3);
        let w = random_matrix(&mut r, nx, 2);
        let v = random_matrix(&mut r, nx, 3);
        let pair = AvwcPair::from_matrices(vec![w.clone()], vec![v.clone()]).unwrap();
        let want = single_state_oracle(&w, &v);
        for mode in JammerMode::ALL {
            let got = secrecy_capacity_single_letter(&pair, mode, &quick()).unwrap();
            assert!(
                (got.value - want).abs() < 1e-3,
                "{mode}: {} vs {want}",
                got.value
            );
        }
    }
}

#[test]
fn noiseless_bob_and_blind_eve() {
    let blind = StochasticMatrix::constant(3, &Distribution::uniform(2));
    let pair = AvwcPair::from_matrices(vec![StochasticMatrix::identity(3)], vec![blind]).unwrap();
    let c = secrecy_capacity_single_letter(&pair, JammerMode::NoSideInfo, &quick()).unwrap();
    assert!((c.value - 3f64.log2()).abs() < 1e-6);
    assert!(c
        .opt_input
        .probs()
        .iter()
        .all(|&p| (p - 1.0 / 3.0).abs() < 1e-3));
}

#[test]
fn value_is_clipped_but_raw_difference_kept() {
    // Eve sees everything, Bob is noisy: every input loses.
    let bob = common::m(&[&[0.6, 0.4], &[0.4, 0.6]]);
    let pair = AvwcPair::from_matrices(vec![bob], vec![StochasticMatrix::identity(2)]).unwrap();
    let c = secrecy_capacity_single_letter(&pair, JammerMode::NoSideInfo, &quick()).unwrap();
    assert_eq!(c.value, 0.0);
    assert!(c.raw_difference <= 1e-9);
}

#[test]
fn side_information_never_helps_the_legitimate_users() {
    let mut r = rng(21);
    for _ in 0..6 {
        let (nx, ny, nz) = (r.gen_range(2..=3), r.gen_range(2..=3), r.gen_range(2..=3));
        let pair = random_pair(&mut r, nx, ny, nz, 2);
        let rep = capacity_ordering_report(&pair, &quick(), 1e-4).unwrap();
        assert!(rep.ordering_holds, "gap {}", rep.gap);
        let messages =
            secrecy_capacity_single_letter(&pair, JammerMode::MessagesOnly, &quick()).unwrap();
        assert!((messages.value - rep.convex.value).abs() < 1e-12);
    }
}

#[test]
fn eve_maximum_sits_on_a_vertex() {
    let mut r = rng(5);
    for _ in 0..10 {
        let p = random_dist(&mut r, 3);
        let f = avwc_core::channel::ChannelFamily::new(
            (0..2).map(|_| random_matrix(&mut r, 3, 2)).collect(),
        )
        .unwrap();
        let (best, _) = inner_max_eve(&p, &f, ClosureKind::RowConvex).unwrap();
        let vertex_best = row_convex_vertices(&f, 1 << 20)
            .unwrap()
            .iter()
            .map(|g| mutual_information(&p, &g.effective).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - vertex_best).abs() < 1e-12);
        for _ in 0..200 {
            let theta = random_matrix(&mut r, 3, 2);
            let v = mix_row_convex(&f, &theta).unwrap().effective;
            assert!(mutual_information(&p, &v).unwrap() <= best + 1e-9);
        }
        // Bob's minimum lies below every interior point as well.
        let (low, _) = inner_min_legit(&p, &f, ClosureKind::RowConvex).unwrap();
        let theta = random_matrix(&mut r, 3, 2);
        let v = mix_row_convex(&f, &theta).unwrap().effective;
        assert!(low <= mutual_information(&p, &v).unwrap() + 1e-9);
    }
}

/// Bob's states are both good, Eve's both poor: positive capacity in every mode.
fn positive_pair() -> AvwcPair {
    AvwcPair::from_matrices(
        vec![
            common::m(&[&[0.95, 0.05], &[0.1, 0.9]]),
            common::m(&[&[0.9, 0.1], &[0.05, 0.95]]),
        ],
        vec![
            common::m(&[&[0.7, 0.3], &[0.4, 0.6]]),
            common::m(&[&[0.6, 0.4], &[0.35, 0.65]]),
        ],
    )
    .unwrap()
}

#[test]
fn identity_prefix_reproduces_the_single_letter_value() {
    let pair = positive_pair();
    for mode in [JammerMode::NoSideInfo, JammerMode::InputKnown] {
        let single = secrecy_capacity_single_letter(&pair, mode, &quick()).unwrap();
        assert!(single.value > 0.05);
        let id =
            secrecy_capacity_multi_letter_bound(&pair, &PrefixSpec::identity(1, 2), mode, &quick())
                .unwrap();
        assert!((id.value - single.value).abs() < 1e-9);
        let opt = secrecy_capacity_multi_letter_bound(
            &pair,
            &PrefixSpec::optimized(1, 2),
            mode,
            &quick(),
        )
        .unwrap();
        assert!(opt.value >= single.value - 1e-6);
        let info = opt.prefix.unwrap();
        assert_eq!((info.k, info.psi_card), (1, 3));
    }
}

#[test]
fn two_letter_bound_is_at_least_the_single_letter_value() {
    let pair = positive_pair();
    let single = secrecy_capacity_single_letter(&pair, JammerMode::NoSideInfo, &quick()).unwrap();
    let two = secrecy_capacity_multi_letter_bound(
        &pair,
        &PrefixSpec::identity(2, 2),
        JammerMode::NoSideInfo,
        &CapacityOptions {
            grid_resolution: Some(30),
            ..quick()
        },
    )
    .unwrap();
    assert!(
        two.value >= single.value - 1e-6,
        "{} < {}",
        two.value,
        single.value
    );
    assert!(two.diagnostics.flags.iter().any(|f| f.contains("finite-k")));
}

#[test]
fn reports_are_deterministic() {
    let pair = common::example_pair();
    let a = secrecy_capacity_single_letter(&pair, JammerMode::NoSideInfo, &quick()).unwrap();
    let b = secrecy_capacity_single_letter(&pair, JammerMode::NoSideInfo, &quick()).unwrap();
    assert_eq!(a, b);
}
