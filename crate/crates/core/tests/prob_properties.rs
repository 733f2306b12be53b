mod support;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use pworlds::prob::{epsilon_bound, inverse_sample_map, rational_approximation, Distribution, Variables};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{l1_oracle, q};

fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..n)
        .map(|_| if rng.random_bool(0.2) { 0 } else { rng.random_range(1..1000) })
        .collect();
    let raw = if raw.iter().all(|&x| x == 0) { vec![1; n] } else { raw };
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| q(x, total)).collect()
}

/// g(w) = least index whose cumulative mass times m reaches `w - shift`,
/// for w = 1..=m.
fn inverse_sampling_oracle(p: &[BigRational], m: u64, shift: &BigRational) -> Vec<BigRational> {
    let mut counts = vec![0u64; p.len()];
    for w in 1..=m {
        let target = BigRational::from_integer(BigInt::from(w)) - shift;
        let mut cumulative = BigRational::zero();
        let idx = p
            .iter()
            .position(|x| {
                cumulative += x;
                &cumulative * BigRational::from_integer(BigInt::from(m)) >= target
            })
            .unwrap();
        counts[idx] += 1;
    }
    counts.into_iter().map(|c| q(c as i64, m as i64)).collect()
}

fn l1(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| if x > y { x - y } else { y - x })
        .sum()
}

#[test]
fn rational_approximation_bound_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(2..=64u64);
        let p = random_weights(&mut rng, n);
        let approx = rational_approximation(&p, m).unwrap();
        assert_eq!(approx, inverse_sampling_oracle(&p, m, &q(1, 2)), "p={p:?} m={m}");
        let bound = q(n as i64 - 1, m as i64);
        assert!(l1(&p, &approx) <= bound, "p={p:?} m={m}");
        assert_eq!(approx.iter().sum::<BigRational>(), BigRational::one());
    }
}

#[test]
fn rational_approximation_bound_is_tight() {
    let p = [q(1, 4), q(3, 4)];
    let approx = rational_approximation(&p, 2).unwrap();
    assert_eq!(approx, [q(1, 2), q(1, 2)]);
    assert_eq!(l1(&p, &approx), q(1, 2));
    // The unshifted rule reaches the same distance here.
    let unshifted = inverse_sampling_oracle(&p, 2, &q(0, 1));
    assert_eq!(inverse_sample_map(&p, 2).unwrap(), [1, 1]);
    assert_eq!(unshifted, [q(0, 1), q(1, 1)]);
    assert_eq!(l1(&p, &unshifted), q(1, 2));
}

#[test]
fn unshifted_rule_can_exceed_the_bound() {
    let p = [q(2, 5), q(3, 5)];
    let unshifted = inverse_sampling_oracle(&p, 2, &q(0, 1));
    assert_eq!(unshifted, [q(0, 1), q(1, 1)]);
    assert_eq!(l1(&p, &unshifted), q(4, 5));
    assert!(l1(&p, &unshifted) > q(1, 2));
    assert_eq!(l1(&p, &rational_approximation(&p, 2).unwrap()), q(1, 5));
}

/// Σ_{n=1}^{L} x^n / n! with x = L(C-1)/K, accumulated with explicit
/// factorials.
fn epsilon_oracle(l: u32, c: u64, k: u64) -> BigRational {
    let x = q(i64::from(l) * (c as i64 - 1), k as i64);
    let mut total = BigRational::zero();
    let mut factorial = BigInt::one();
    for n in 1..=l {
        factorial *= BigInt::from(n);
        let mut power = BigRational::one();
        for _ in 0..n {
            power *= &x;
        }
        total += power / BigRational::from_integer(factorial.clone());
    }
    total
}

#[test]
fn epsilon_bound_values() {
    assert_eq!(epsilon_bound(2, 5, 100).epsilon, q(52, 625));
    assert_eq!(epsilon_bound(3, 1, 7).epsilon, q(0, 1));
    assert_eq!(epsilon_bound(1, 4, 3).epsilon, q(1, 1));
    for l in 1..=4 {
        for c in [1, 2, 6, 12] {
            for k in [1, 2, 3, 50] {
                assert_eq!(epsilon_bound(l, c, k).epsilon, epsilon_oracle(l, c, k));
            }
        }
    }
}

#[test]
fn epsilon_strictly_decreases_in_k() {
    for (l, c) in [(1, 2), (2, 5), (3, 12)] {
        let mut prev = epsilon_bound(l, c, 1).epsilon;
        for k in 2..=1000 {
            let e = epsilon_bound(l, c, k).epsilon;
            assert!(e < prev, "l={l} c={c} k={k}");
            prev = e;
        }
    }
}

fn arb_distribution(cards: Vec<u32>) -> impl Strategy<Value = Distribution> {
    let size: usize = cards.iter().map(|&c| c as usize).product();
    prop::collection::vec(0u32..20, size)
        .prop_filter("nonzero", |w| w.iter().any(|&x| x > 0))
        .prop_map(move |w| {
            let names: Vec<String> = (0..cards.len()).map(|i| format!("v{i}")).collect();
            let vars = Variables::new(&names, &cards).unwrap();
            let total: u32 = w.iter().sum();
            let entries: Vec<_> = vars
                .outcomes()
                .zip(&w)
                .filter(|(_, &x)| x > 0)
                .map(|(o, &x)| (o, q(i64::from(x), i64::from(total))))
                .collect();
            Distribution::new(vars, entries).unwrap()
        })
}

fn three() -> impl Strategy<Value = (Distribution, Distribution, Distribution)> {
    prop::collection::vec(1u32..4, 1..4).prop_flat_map(|cards| {
        (
            arb_distribution(cards.clone()),
            arb_distribution(cards.clone()),
            arb_distribution(cards),
        )
    })
}

proptest! {
    #[test]
    fn distance_is_a_metric((p, r, s) in three()) {
        let pr = p.distance(&r).unwrap();
        prop_assert_eq!(&pr, &l1_oracle(&p, &r));
        prop_assert_eq!(&pr, &r.distance(&p).unwrap());
        prop_assert!(p.distance(&p).unwrap().is_zero());
        prop_assert!(pr <= q(2, 1));
        prop_assert!(pr <= p.distance(&s).unwrap() + s.distance(&r).unwrap());
        prop_assert_eq!(pr.is_zero(), p == r);
    }

    #[test]
    fn marginals_sum_to_one((p, _, _) in three()) {
        let names = p.variables().names().to_vec();
        let m = p.marginalize(&names[..1]).unwrap();
        prop_assert_eq!(m.entries().map(|(_, x)| x.clone()).sum::<BigRational>(), BigRational::one());
        for (o, x) in m.entries() {
            let direct: BigRational = p.entries().filter(|(e, _)| e[0] == o[0]).map(|(_, y)| y.clone()).sum();
            prop_assert_eq!(x, &direct);
        }
    }
}
