//! Randomized property tests over the library's structural invariants.

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::collection::vec;
use proptest::prelude::*;
use quickxsort::*;
use rand::SeedableRng;

fn algorithms() -> impl Strategy<Value = Algorithm> {
    prop::sample::select(Algorithm::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Sorts any key multiset (duplicates included), reports a consistent
    /// tally, and the output is a permutation of the input.
    #[test]
    fn quickxsort_sorts_any_input(
        keys in vec(0u64..64, 0..300),
        alg in algorithms(),
        t in 0usize..3,
        base_threshold in 1usize..24,
        seed in any::<u64>(),
    ) {
        let before = elements_from_keys(&keys);
        let mut data = before.clone();
        let scheme = SamplingScheme::new(t, SamplePolicy::PseudoRandomPositions);
        let opts = QuickXOptions { base_threshold, verify: true };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let stats = quickxsort(&mut data, scheme, &alg.sorter(), opts, &mut rng);
        let verdict = verify_run(&before, &data, &stats.tally(), stats.comparisons());
        prop_assert!(verdict.passed(), "{:?}", verdict.violations);
    }

    /// Merging two sorted runs yields sorted output, costs at most
    /// n1 + n2 - 1 comparisons and preserves the buffer multiset.
    #[test]
    fn merge_properties(
        mut run1 in vec(0u64..1000, 0..40),
        mut run2 in vec(0u64..1000, 0..40),
    ) {
        run1.sort_unstable();
        run2.sort_unstable();
        let split = run1.len();
        let all: Vec<u64> = run1.iter().chain(run2.iter()).copied().collect();
        let mut area = elements_from_keys(&all);
        let mut buffer: Vec<CountedElement> = (0..split.min(run2.len()))
            .map(|i| CountedElement::new(5000 + i as u64, 9000 + i as u32))
            .collect();
        let snapshot = buffer.clone();
        let mut tally = Tally::new();
        let cost = merge_with_buffer(&mut area, split, &mut buffer, &mut tally).unwrap();
        prop_assert!(area.windows(2).all(|w| w[0].key <= w[1].key));
        prop_assert!(quickxsort::instrument::same_multiset(&snapshot, &buffer));
        let bound = (run1.len() + run2.len()).saturating_sub(1) as u64;
        prop_assert!(cost <= bound, "cost {cost} > {bound}");
    }

    /// One partition round touches exactly n - k elements and separates
    /// strictly by the pivot.
    #[test]
    fn partition_counts_and_separates(
        keys in vec(0u64..10_000, 7..200),
        t in 0usize..3,
        seed in any::<u64>(),
    ) {
        let mut data = elements_from_keys(&keys);
        let n = data.len();
        let scheme = SamplingScheme::new(t, SamplePolicy::PseudoRandomPositions);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut tally = Tally::new();
        select_pivot(&mut data, scheme, &mut rng, &mut tally).unwrap();
        let out = partition_around(&mut data, t, &mut tally);
        prop_assert_eq!(tally.partition, (n - scheme.k()) as u64);
        prop_assert_eq!(out.j1 + out.j2, n - 1);
        let pivot = data[out.pivot_pos].key;
        prop_assert!(data[..out.pivot_pos].iter().all(|e| e.key < pivot));
        prop_assert!(data[out.pivot_pos + 1..].iter().all(|e| e.key >= pivot));
    }

    /// The side assignment always leaves the X segment a sufficient buffer.
    #[test]
    fn assignment_guarantees_buffer(j1 in 0usize..5000, j2 in 0usize..5000) {
        for alpha in [Alpha::HALF, Alpha::ONE] {
            let (x_side, recurse) = assign_sides(j1, j2, alpha);
            prop_assert_eq!(x_side, recurse.other());
            let (m, buf) = match x_side {
                Side::Left => (j1, j2),
                Side::Right => (j2, j1),
            };
            prop_assert!(buf >= alpha.buffer_need(m), "m={m} buf={buf}");
        }
    }

    /// I_{0,x} + I_{x,1} = 1 for random rational cuts and integer shapes.
    #[test]
    fn incomplete_beta_complement(num in 0i64..100, den in 1i64..100, a in 1u64..20, b in 1u64..20) {
        let x = BigRational::new(num.min(den).into(), den.into());
        let lo = reg_incomplete_beta(&BigRational::zero(), &x, a, b).unwrap();
        let hi = reg_incomplete_beta(&x, &BigRational::one(), a, b).unwrap();
        prop_assert_eq!(lo + hi, BigRational::one());
    }

    /// The subproblem-size law is a probability distribution.
    #[test]
    fn subproblem_pmf_normalized(n in 7usize..120, t in 0usize..3) {
        let pmf = subproblem_size_pmf(n, t);
        let total: ExactRational = pmf.iter().cloned().sum();
        prop_assert_eq!(total, BigRational::one());
        prop_assert!(pmf.iter().all(|p| p >= &BigRational::zero()));
    }

    /// Insertionsort: n - 1 comparisons on sorted input, at most n(n-1)/2.
    #[test]
    fn insertion_sort_bounds(keys in vec(0u64..50, 2..60)) {
        let n = keys.len() as u64;
        let mut data = elements_from_keys(&keys);
        let mut tally = Tally::new();
        insertion_sort(&mut data, &mut tally, Channel::Base);
        prop_assert!(data.windows(2).all(|w| w[0].key <= w[1].key));
        prop_assert!(tally.base >= n - 1);
        prop_assert!(tally.base <= n * (n - 1) / 2);
    }
}
