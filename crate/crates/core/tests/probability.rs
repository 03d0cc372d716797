use avwc_core::prob::{
    conditional_entropy, entropy, entropy_continuity_bound, is_cond_typical, is_typical,
    mutual_information, output_distribution, sequence_type, variation_distance, TypicalityParams,
};
use avwc_core::{Distribution, StochasticMatrix};
use proptest::prelude::*;

fn dist(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.0f64..1.0, n)
        .prop_filter_map("all-zero weights", |w| Distribution::from_weights(&w).ok())
}

fn channel(n_in: usize, n_out: usize) -> impl Strategy<Value = StochasticMatrix> {
    prop::collection::vec(dist(n_out), n_in)
        .prop_map(|rows| StochasticMatrix::from_distributions(&rows).unwrap())
}

fn sizes() -> impl Strategy<Value = (usize, usize)> {
    (1usize..5, 1usize..5)
}

proptest! {
    #[test]
    fn mutual_information_is_bounded(
        (p, w, ny) in sizes().prop_flat_map(|(nx, ny)| (dist(nx), channel(nx, ny), Just(ny)))
    ) {
        let i = mutual_information(&p, &w).unwrap();
        prop_assert!(i >= -1e-12);
        prop_assert!(i <= entropy(&p) + 1e-9);
        prop_assert!(i <= (ny as f64).log2() + 1e-9);
        let hy = entropy(&output_distribution(&p, &w).unwrap());
        prop_assert!((i - (hy - conditional_entropy(&p, &w).unwrap())).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_is_convex_in_the_channel(
        p in dist(3),
        w1 in channel(3, 3),
        w2 in channel(3, 3),
        lambda in 0.0f64..=1.0,
    ) {
        let mixed: Vec<Vec<f64>> = w1
            .rows()
            .zip(w2.rows())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect())
            .collect();
        let wl = StochasticMatrix::from_rows(mixed).unwrap();
        let lhs = mutual_information(&p, &wl).unwrap();
        let rhs = lambda * mutual_information(&p, &w1).unwrap()
            + (1.0 - lambda) * mutual_information(&p, &w2).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn continuity_bound_dominates(p in dist(4), q in dist(4), t in 0.0f64..=1.0) {
        // Pull q towards p until the variation distance is at most 1/2.
        let mut mix: Vec<f64> = p.probs().iter().zip(q.probs()).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        let mut r = Distribution::from_weights(&mix).unwrap();
        while variation_distance(&p, &r).unwrap() > 0.5 {
            for (m, a) in mix.iter_mut().zip(p.probs()) {
                *m = 0.5 * (*m + a);
            }
            r = Distribution::from_weights(&mix).unwrap();
        }
        let gap = (entropy(&p) - entropy(&r)).abs();
        prop_assert!(gap <= entropy_continuity_bound(&p, &r).unwrap() + 1e-9);
    }

    #[test]
    fn typicality_depends_only_on_the_type(seq in prop::collection::vec(0usize..3, 1..12), delta in 0.01f64..0.5) {
        let p = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let params = TypicalityParams::new(delta, seq.len()).unwrap();
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        prop_assert_eq!(is_typical(&seq, &p, params).unwrap(), is_typical(&sorted, &p, params).unwrap());
        let ty = sequence_type(&seq, 3).unwrap();
        let n = seq.len() as f64;
        let direct = (0..3).all(|a| {
            let f = ty.counts()[a] as f64 / n;
            (f - p.get(a)).abs() < delta && (p.get(a) > 0.0 || ty.counts()[a] == 0)
        });
        prop_assert_eq!(is_typical(&seq, &p, params).unwrap(), direct);
    }

    #[test]
    fn noiseless_outputs_are_conditionally_typical(x in prop::collection::vec(0usize..3, 1..10)) {
        let id = StochasticMatrix::identity(3);
        let params = TypicalityParams::new(0.01, x.len()).unwrap();
        prop_assert!(is_cond_typical(&x, &x, &id, params).unwrap());
        let shifted: Vec<usize> = x.iter().map(|a| (a + 1) % 3).collect();
        prop_assert!(!is_cond_typical(&shifted, &x, &id, params).unwrap());
    }
}

#[test]
fn binary_symmetric_channel_information() {
    let eps: f64 = 0.11;
    let h = -eps * eps.log2() - (1.0 - eps) * (1.0 - eps).log2();
    let w = StochasticMatrix::from_rows(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).unwrap();
    let i = mutual_information(&Distribution::uniform(2), &w).unwrap();
    assert!((i - (1.0 - h)).abs() < 1e-12);
}

#[test]
fn point_mass_input_carries_nothing() {
    let w = StochasticMatrix::from_rows(vec![vec![0.2, 0.8], vec![0.9, 0.1]]).unwrap();
    assert_eq!(
        mutual_information(&Distribution::point(2, 1), &w).unwrap(),
        0.0
    );
}
