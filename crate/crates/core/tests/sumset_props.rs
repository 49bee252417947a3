use std::collections::{BTreeMap, BTreeSet};

use gifc_core::sumset::{fiber_sizes, suite};
use gifc_core::{
    entropy_of_sum, exg_construct, partial_sumset, plunnecke_check, ruzsa_cover, set_combine,
    setsum_bound_check, Combine, IntVectorSet, PairSubset,
};
use proptest::collection::btree_set;
use proptest::prelude::*;

fn set(v: &BTreeSet<i64>) -> IntVectorSet {
    IntVectorSet::from_scalars(v.iter().copied())
}

fn scalars(s: &IntVectorSet) -> BTreeSet<i64> {
    s.to_scalars().unwrap().into_iter().collect()
}

fn naive_sum(a: &BTreeSet<i64>, b: &BTreeSet<i64>) -> BTreeSet<i64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect()
}

fn small_set() -> impl Strategy<Value = BTreeSet<i64>> {
    btree_set(-30i64..30, 1..15)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sumset_operations_match_enumeration(a in small_set(), b in small_set(), p in -4i64..5) {
        let (sa, sb) = (set(&a), set(&b));
        prop_assert_eq!(scalars(&sa.sum(&sb).unwrap()), naive_sum(&a, &b));
        let diff: BTreeSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x - y)).collect();
        prop_assert_eq!(scalars(&sa.difference(&sb).unwrap()), diff);
        let dil: BTreeSet<i64> = a.iter().map(|x| p * x).collect();
        prop_assert_eq!(scalars(&sa.dilate(p)), dil);
        prop_assert_eq!(scalars(&sa.iterate(2).unwrap()), naive_sum(&a, &a));
        prop_assert_eq!(set_combine(Combine::Sum, &sa, Some(&sb)).unwrap(), sa.sum(&sb).unwrap());
        prop_assert_eq!(set_combine(Combine::Iterate(2), &sa, None).unwrap(), sa.sum(&sa).unwrap());
    }

    #[test]
    fn cardinality_sandwich(a in small_set(), b in small_set()) {
        // one-dimensional sets: |A|+|B|−1 ≤ |A+B| ≤ |A||B|
        let n = set(&a).sum(&set(&b)).unwrap().len();
        prop_assert!(n + 1 >= a.len() + b.len());
        prop_assert!(n <= a.len() * b.len());
    }

    #[test]
    fn fibers_partition_the_grid(a in small_set(), b in small_set()) {
        let sizes = fiber_sizes(&set(&a), &set(&b)).unwrap();
        prop_assert_eq!(sizes.values().sum::<usize>(), a.len() * b.len());
        let mut oracle: BTreeMap<i64, usize> = BTreeMap::new();
        for x in &a {
            for y in &b {
                *oracle.entry(x + y).or_default() += 1;
            }
        }
        let got: BTreeMap<i64, usize> = sizes.into_iter().map(|(k, v)| (k[0], v)).collect();
        prop_assert_eq!(got, oracle);
    }

    #[test]
    fn entropy_sits_between_marginal_and_support(a in small_set(), b in small_set()) {
        let h = entropy_of_sum(&set(&a), &set(&b)).unwrap();
        let support = naive_sum(&a, &b).len() as f64;
        let lower = (a.len().max(b.len()) as f64).log2();
        prop_assert!(h <= support.log2() + 1e-12);
        prop_assert!(h >= lower - 1e-12);
    }

    #[test]
    fn lemma_checks_hold(a in small_set(), b in small_set(), p in 1u32..4, q in 1u32..4, sp in -3i64..4, sq in -3i64..4) {
        let (sa, sb) = (set(&a), set(&b));
        prop_assert!(plunnecke_check(&sa, &sb, p, q).unwrap().holds);
        prop_assume!(sp != 0 && sq != 0);
        let r = setsum_bound_check(&sa, &sb, sp, sq).unwrap();
        prop_assert!(r.holds);
        let left: BTreeSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| sp * x + sq * y)).collect();
        prop_assert_eq!(r.left, left.len());
    }

    #[test]
    fn cover_is_a_cover(a in small_set(), b in small_set()) {
        let r = ruzsa_cover(&set(&a), &set(&b)).unwrap();
        let x = scalars(&r.cover);
        prop_assert!(x.is_subset(&b));
        prop_assert!(x.len() * a.len() <= naive_sum(&a, &b).len());
        let diff: BTreeSet<i64> = a.iter().flat_map(|u| a.iter().map(move |v| u - v)).collect();
        let reach = naive_sum(&diff, &x);
        prop_assert!(b.is_subset(&reach));
        prop_assert!(r.holds());
    }

    #[test]
    fn exg_subset_satisfies_both_conclusions(a in small_set(), b in small_set(), c in 1.2f64..5.0) {
        let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let (sa, sb) = (set(&big), set(&small));
        let (f, r) = exg_construct(&sa, &sb, c).unwrap();
        prop_assert!(f.validate(&sa, &sb).is_ok());
        let partial = partial_sumset(&sa, &sb, &f).unwrap().len();
        prop_assert_eq!(partial, r.partial_sumset_size);
        prop_assert!(f.len() as f64 * c >= (big.len() * small.len()) as f64 * (c - 1.0));
        prop_assert!(partial as f64 <= (big.len() as f64).powf(1.0 + c * r.epsilon));
    }
}

#[test]
fn exg_rejects_smaller_first_set() {
    let a = IntVectorSet::from_scalars([0, 1]);
    let b = IntVectorSet::from_scalars([0, 1, 2]);
    assert!(exg_construct(&a, &b, 2.0).is_err());
}

#[test]
fn partial_sumset_uses_only_listed_pairs() {
    let a = IntVectorSet::from_scalars([0, 1, 2]);
    let b = IntVectorSet::from_scalars([0, 10]);
    let f = PairSubset::from_scalar_pairs([(0, 0), (2, 10)]);
    assert_eq!(partial_sumset(&a, &b, &f).unwrap(), IntVectorSet::from_scalars([0, 12]));
}

#[test]
fn multidimensional_sums() {
    let a = IntVectorSet::new(2, [vec![0, 0], vec![1, 0]]).unwrap();
    let b = IntVectorSet::new(2, [vec![0, 0], vec![0, 1]]).unwrap();
    let s = a.sum(&b).unwrap();
    assert_eq!(s.len(), 4);
    assert!(s.contains(&[1, 1]));
    assert!(IntVectorSet::new(3, [vec![0, 0]]).is_err());
    assert!(a.sum(&IntVectorSet::from_scalars([1])).is_err());
}

#[test]
fn suite_rows_are_stable_and_clean() {
    for lemma in suite::Lemma::ALL {
        let cfg = suite::SuiteConfig { lemma, trials: 25, max_card: 20, seed: 77 };
        let first = suite::run_suite(&cfg).unwrap();
        let lines = |rows: &[suite::TrialRow]| rows.iter().map(suite::TrialRow::csv_line).collect::<Vec<_>>();
        assert_eq!(lines(&first), lines(&suite::run_suite(&cfg).unwrap()));
        assert!(first.iter().all(|r| r.pass), "{lemma:?}");
        assert!(first.iter().all(|r| r.size_a <= 20 && r.size_b <= 20));
    }
    let bad = suite::SuiteConfig { lemma: suite::Lemma::Cover, trials: 0, max_card: 5, seed: 0 };
    assert!(suite::run_suite(&bad).is_err());
}
