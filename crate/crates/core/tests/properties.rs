use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use permrd::ball::{
    ball_brute_force, chebyshev_ball_exact, chebyshev_ball_lower, chebyshev_ball_upper_bregman,
    kendall_ball_exact, kendall_ball_lower_quarter, kendall_ball_upper_binom as binom_upper,
    kendall_sphere_exact,
};
use permrd::bounds::{
    average_lower, probabilistic_upper, rate_views, sphere_covering_lower, stein_upper,
    DistortionQuery,
};
use permrd::codes::{
    construction_codewords, greedy_cover, is_codeword, project_to_codeword, BlockStructure,
};
use permrd::numutil::{factorial, lg_biguint, lg_ratio};
use permrd::perm::{
    enumerate_permutations, inversion_vector_to_perm, lex_cmp, perm_to_inversion_vector,
    restrict_positions, restrict_values, IndexSet, Metric, Permutation,
};

fn perm_strategy(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Permutation> {
    n_range
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

fn perm_triple(
    n_range: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    n_range.prop_flat_map(|n| {
        let one = move || Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle();
        (one(), one(), one()).prop_map(|(a, b, c)| {
            (
                Permutation::from_one_line(&a).unwrap(),
                Permutation::from_one_line(&b).unwrap(),
                Permutation::from_one_line(&c).unwrap(),
            )
        })
    })
}

proptest! {
    #[test]
    fn metric_axioms((p, q, s) in perm_triple(2..=7)) {
        for metric in [Metric::Kendall, Metric::Chebyshev] {
            let dpq = metric.distance(&p, &q).unwrap();
            let dqp = metric.distance(&q, &p).unwrap();
            prop_assert_eq!(dpq, dqp);
            prop_assert_eq!(dpq == 0, p == q);
            let dps = metric.distance(&p, &s).unwrap();
            let dqs = metric.distance(&q, &s).unwrap();
            prop_assert!(dps <= dpq + dqs);
            prop_assert!(dpq <= metric.diameter(p.len()));
        }
    }

    #[test]
    fn inversion_vector_bijection(p in perm_strategy(1..=10)) {
        let iv = perm_to_inversion_vector(&p);
        for (i, &xi) in iv.entries().iter().enumerate() {
            prop_assert!(xi as usize <= i);
        }
        prop_assert_eq!(inversion_vector_to_perm(&iv), p.clone());
        let id = Permutation::identity(p.len());
        prop_assert_eq!(iv.weight(), Metric::Kendall.distance(&p, &id).unwrap());
    }

    #[test]
    fn text_form_round_trip(p in perm_strategy(1..=12)) {
        let shown = p.to_string();
        prop_assert!(shown.starts_with('[') && shown.ends_with(']'));
        let back: Permutation = shown.parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn restriction_duality(p in perm_strategy(2..=7), seed in any::<u64>()) {
        let n = p.len();
        // Derive a nonempty subset of [n] from the seed bits.
        let mut members: Vec<u32> = (1..=n as u32).filter(|i| seed >> (i - 1) & 1 == 1).collect();
        if members.is_empty() {
            members.push((seed % n as u64) as u32 + 1);
        }
        let a = IndexSet::new(n, &members).unwrap();
        let lhs = restrict_values(&p, &a).unwrap();
        let rhs = restrict_positions(&p.inverse(), &a).unwrap().inverse();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sphere_ball_consistency(n in 2usize..=8, raw_r in 0u64..=28) {
        let diam = Metric::Kendall.diameter(n);
        let r = raw_r % (diam + 1);
        let total: BigUint = (0..=r).map(|s| kendall_sphere_exact(n, s)).sum();
        prop_assert_eq!(total, kendall_ball_exact(n, r));
        // Mahonian symmetry about the half-diameter.
        prop_assert_eq!(kendall_sphere_exact(n, r), kendall_sphere_exact(n, diam - r));
    }

    #[test]
    fn kendall_ball_sandwich(n in 2usize..=12, raw_r in 1u64..=11) {
        let r = 1 + raw_r % (n as u64 - 1).max(1); // formula regime 1 <= r < n
        prop_assume!(r < n as u64);
        let ball = kendall_ball_exact(n, r);
        let ball_rat = BigRational::from_integer(ball.clone().into());
        prop_assert!(kendall_ball_lower_quarter(n, r).unwrap() <= ball_rat);
        prop_assert!(ball <= binom_upper(n, r));
    }

    #[test]
    fn chebyshev_ball_sandwich(n in 2usize..=12, raw_r in 1u64..=11) {
        let r = 1 + raw_r % (n as u64 - 1).max(1);
        let ball = chebyshev_ball_exact(n, r).unwrap();
        let exact_lg = lg_biguint(&ball);
        prop_assert!(lg_ratio(&chebyshev_ball_lower(n, r)) <= exact_lg + 1e-9);
        prop_assert!(exact_lg <= chebyshev_ball_upper_bregman(n, r).lg() + 1e-9);
    }

    #[test]
    fn ball_monotone_reaching_diameter(n in 2usize..=7) {
        for metric in [Metric::Kendall, Metric::Chebyshev] {
            let diam = metric.diameter(n);
            let mut prev = BigUint::one(); // B(0)
            for r in 1..=diam {
                let cur = ball_brute_force(metric, n, r).unwrap();
                prop_assert!(cur >= prev);
                prev = cur;
            }
            prop_assert_eq!(prev, factorial(n));
        }
    }

    #[test]
    fn ball_center_independence(center in perm_strategy(2..=6), raw_r in 0u64..=15) {
        let n = center.len();
        for metric in [Metric::Kendall, Metric::Chebyshev] {
            let r = raw_r % (metric.diameter(n) + 1);
            let mut count = 0u64;
            for q in enumerate_permutations(n).unwrap() {
                if metric.distance(&q, &center).unwrap() <= r {
                    count += 1;
                }
            }
            let at_identity = ball_brute_force(metric, n, r).unwrap();
            prop_assert_eq!(BigUint::from(count), at_identity);
        }
    }

    #[test]
    fn rate_views_invert(n in 2usize..=20, bytes in proptest::collection::vec(any::<u8>(), 1..20)) {
        let mut m = BigUint::from_bytes_be(&bytes);
        if m == BigUint::default() {
            m = BigUint::one();
        }
        let v = rate_views(&BigRational::from_integer(m.into()), n);
        let reconstructed = v.excess + lg_biguint(&factorial(n)) / n as f64;
        prop_assert!((reconstructed - v.rate).abs() <= 1e-9);
    }

    #[test]
    fn bound_chain(n in 2usize..=7, raw_d in 1u64..=20, metric_bit in any::<bool>()) {
        let metric = if metric_bit { Metric::Kendall } else { Metric::Chebyshev };
        let d = 1 + raw_d % metric.diameter(n).max(1);
        let q = DistortionQuery::new(metric, n, d).unwrap();
        let avg = average_lower(&q).unwrap();
        let sphere = sphere_covering_lower(&q).unwrap();
        let stein = stein_upper(&q).unwrap();
        prop_assert!(avg <= sphere);
        prop_assert!(sphere.to_f64().unwrap() <= stein.value() + 1e-9);
        // The random-code bound only dominates once n!/B(D) >= e; below
        // that the ln factor undercuts Stein's (1 + ln B) form.
        if sphere.to_f64().unwrap() >= std::f64::consts::E {
            let prob = probabilistic_upper(&q).unwrap();
            prop_assert!(stein.value() <= prob.to_f64().unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn projection_lands_within_d(p in perm_strategy(2..=9), raw_d in 1u64..=8) {
        let n = p.len();
        let d = 1 + raw_d % (n as u64 - 1).max(1);
        let bs = BlockStructure::new(n, d).unwrap();
        let w = project_to_codeword(&p, &bs).unwrap();
        prop_assert!(is_codeword(&w, &bs));
        prop_assert!(Metric::Chebyshev.distance(&p, &w).unwrap() <= d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn construction_stream_sorted_distinct(n in 2usize..=7, raw_d in 1u64..=6) {
        let d = 1 + raw_d % (n as u64 - 1).max(1);
        let bs = BlockStructure::new(n, d).unwrap();
        let words: Vec<Permutation> = construction_codewords(&bs).collect();
        prop_assert_eq!(BigUint::from(words.len()), bs.size());
        for pair in words.windows(2) {
            prop_assert_eq!(lex_cmp(&pair[0], &pair[1]), std::cmp::Ordering::Less);
        }
        for w in &words {
            prop_assert!(is_codeword(w, &bs));
        }
    }

    #[test]
    fn greedy_cover_covers(n in 2usize..=5, raw_d in 1u64..=10, metric_bit in any::<bool>()) {
        let metric = if metric_bit { Metric::Kendall } else { Metric::Chebyshev };
        let d = 1 + raw_d % metric.diameter(n).max(1);
        let code = greedy_cover(metric, n, d).unwrap();
        prop_assert!(permrd::codes::covering_radius(&code).unwrap() <= d);
    }
}
