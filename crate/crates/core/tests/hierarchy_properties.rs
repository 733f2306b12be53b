mod support;

use std::collections::BTreeSet;
use std::time::Duration;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pworlds::hierarchy::{
    enumerate_uniform, min_distance_to_uniform, order_k_test, EnumerationOptions, HierarchyError, TestVerdict,
};
use pworlds::prob::Distribution;
use pworlds::{scenarios, CausalStructure, Parallelism};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn counts(g: &CausalStructure, k: &[u32], opts: &EnumerationOptions) -> BTreeSet<Vec<u32>> {
    enumerate_uniform(g, k, opts).unwrap().counts().cloned().collect()
}

fn no_pruning() -> EnumerationOptions {
    EnumerationOptions {
        symmetry_pruning: false,
        ..EnumerationOptions::default()
    }
}

#[test]
fn enumeration_matches_full_table_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut done = 0;
    while done < 25 {
        let g = random_structure(&mut rng, 3, 3, 2).normalize().unwrap().structure;
        let k: Vec<u32> = g.latent().iter().map(|_| rng.random_range(1..=3)).collect();
        if k.iter().product::<u32>() > 8 {
            continue;
        }
        let expected = oracle_uniform_counts(&Model::new(&g), &k);
        assert_eq!(counts(&g, &k, &EnumerationOptions::default()), expected, "{k:?}");
        assert_eq!(counts(&g, &k, &no_pruning()), expected, "{k:?}");
        done += 1;
    }
}

#[test]
fn witnesses_reproduce_their_distributions() {
    let g = scenarios::w_structure().normalize().unwrap().structure;
    let opts = EnumerationOptions {
        witnesses: true,
        ..EnumerationOptions::default()
    };
    let set = enumerate_uniform(&g, &[2, 2], &opts).unwrap();
    assert!(!set.is_empty());
    for c in set.counts() {
        let d = set.witness(c).unwrap();
        assert_eq!(d.simulate_uniform().unwrap(), set.distribution(c));
        assert!(set.contains(&set.distribution(c)));
    }
}

#[test]
fn cardinality_one_gives_point_masses() {
    for g in [scenarios::triangle(), scenarios::bell(), scenarios::evans(), scenarios::instrumental()] {
        let normal = g.normalize().unwrap().structure;
        let k = vec![1; normal.latent().len()];
        let set = enumerate_uniform(&g, &k, &EnumerationOptions::default()).unwrap();
        let all: BTreeSet<Vec<u32>> = variables(&normal).outcomes().collect();
        let mut got = BTreeSet::new();
        for p in set.distributions() {
            let entries: Vec<_> = p.entries().collect();
            assert_eq!(entries.len(), 1);
            assert!(entries[0].1.is_one());
            got.insert(entries[0].0.clone());
        }
        assert_eq!(got, all);
    }
}

fn conditional(p: &Distribution, fixed: &[(usize, u32)]) -> Option<Vec<(Vec<u32>, BigRational)>> {
    let matching: Vec<_> = p
        .entries()
        .filter(|(o, _)| fixed.iter().all(|&(i, x)| o[i] == x))
        .map(|(o, x)| (o.clone(), x.clone()))
        .collect();
    let total: BigRational = matching.iter().map(|(_, x)| x.clone()).sum();
    (!total.is_zero()).then(|| matching.into_iter().map(|(o, x)| (o, x / &total)).collect())
}

#[test]
fn bell_models_are_local() {
    // Variables are (x, a, b, y).
    let g = scenarios::bell();
    let mut checked = 0;
    for k in 1..=2 {
        let set = enumerate_uniform(&g, &[k, k, k], &EnumerationOptions::default()).unwrap();
        for p in set.distributions() {
            let mut s = BigRational::zero();
            let mut full = true;
            for x in 0..2 {
                for y in 0..2 {
                    let Some(c) = conditional(&p, &[(0, x), (3, y)]) else {
                        full = false;
                        continue;
                    };
                    let e: BigRational = c
                        .iter()
                        .map(|(o, w)| if o[1] == o[2] { w.clone() } else { -w.clone() })
                        .sum();
                    s += if x & y == 1 { -e } else { e };
                    // P(a | x, y) does not depend on y, P(b | x, y) not on x.
                    let pa: BigRational = c.iter().filter(|(o, _)| o[1] == 1).map(|(_, w)| w.clone()).sum();
                    let pb: BigRational = c.iter().filter(|(o, _)| o[2] == 1).map(|(_, w)| w.clone()).sum();
                    if let Some(c2) = conditional(&p, &[(0, x), (3, 1 - y)]) {
                        let pa2: BigRational = c2.iter().filter(|(o, _)| o[1] == 1).map(|(_, w)| w.clone()).sum();
                        assert_eq!(pa, pa2);
                    }
                    if let Some(c2) = conditional(&p, &[(0, 1 - x), (3, y)]) {
                        let pb2: BigRational = c2.iter().filter(|(o, _)| o[2] == 1).map(|(_, w)| w.clone()).sum();
                        assert_eq!(pb, pb2);
                    }
                }
            }
            if full {
                assert!(s.abs() <= q(2, 1), "{s}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn instrumental_models_satisfy_the_instrumental_inequality() {
    // Variables are (a, b, c): instrument, treatment, outcome.
    let g = scenarios::instrumental();
    for k in 1..=3 {
        let set = enumerate_uniform(&g, &[k, k], &EnumerationOptions::default()).unwrap();
        for p in set.distributions() {
            let given: Vec<_> = (0..2).map(|a| conditional(&p, &[(0, a)])).collect();
            if given.iter().any(Option::is_none) {
                continue;
            }
            for b in 0..2 {
                let total: BigRational = (0..2)
                    .map(|c| {
                        given
                            .iter()
                            .map(|cond| {
                                cond.as_ref()
                                    .unwrap()
                                    .iter()
                                    .filter(|(o, _)| o[1] == b && o[2] == c)
                                    .map(|(_, w)| w.clone())
                                    .sum::<BigRational>()
                            })
                            .max()
                            .unwrap()
                    })
                    .sum();
                assert!(total <= BigRational::one(), "{total}");
            }
        }
    }
}

fn oracle_min_distance(g: &CausalStructure, k: u32, p: &Distribution) -> BigRational {
    let normal = g.normalize().unwrap().structure;
    let m = Model::new(&normal);
    let kk = vec![k; m.latents];
    let worlds = q(i64::from(k).pow(m.latents as u32), 1);
    let vars = variables(&normal);
    oracle_uniform_counts(&m, &kk)
        .into_iter()
        .map(|c| {
            vars.outcomes()
                .enumerate()
                .map(|(i, o)| (q(i64::from(c[i]), 1) / &worlds - p.probability(&o)).abs())
                .sum::<BigRational>()
        })
        .min()
        .unwrap()
}

#[test]
fn pr_box_distances_match_the_oracle() {
    let g = scenarios::bell();
    let p = pr_box(&g);
    let expected = [(1, q(7, 4), 16), (2, q(1, 2), 304), (3, q(17, 27), 3664)];
    for (k, delta, size) in expected {
        let set = enumerate_uniform(&g, &[k, k, k], &EnumerationOptions::default()).unwrap();
        assert_eq!(set.len(), size);
        let (d, nearest, _) = min_distance_to_uniform(&p, &set).unwrap();
        assert_eq!(d, delta);
        assert_eq!(p.distance(&nearest).unwrap(), d);
        assert_eq!(oracle_min_distance(&g, k, &p), delta);
    }
}

#[test]
fn order_k_test_reports_epsilon_and_verdict() {
    let g = scenarios::bell();
    let p = pr_box(&g);
    let r = order_k_test(&g, &p, 1, None, &EnumerationOptions::default()).unwrap();
    assert_eq!(r.epsilon.l, 3);
    assert_eq!(r.epsilon.c, 12);
    assert_eq!(r.epsilon.epsilon, q(6567, 1));
    assert!(!r.c_overridden);
    assert_eq!(r.verdict, TestVerdict::Pass);

    let r = order_k_test(&g, &p, 1, Some(1), &EnumerationOptions::default()).unwrap();
    assert!(r.c_overridden);
    assert!(r.epsilon.epsilon.is_zero());
    assert_eq!(r.min_distance, q(7, 4));
    assert_eq!(r.verdict, TestVerdict::Fail);
    assert_eq!(
        order_k_test(&g, &p, 0, None, &EnumerationOptions::default()).unwrap_err(),
        HierarchyError::InvalidOrder
    );
}

#[test]
fn compatible_distributions_pass_every_order() {
    // A distribution induced at K = 2 is within ε(K) of the K = 2 set trivially.
    let g = scenarios::w_structure();
    let set = enumerate_uniform(&g, &[2, 2], &EnumerationOptions::default()).unwrap();
    let p = set.distributions().nth(set.len() / 2).unwrap();
    let r = order_k_test(&g, &p, 2, Some(1), &EnumerationOptions::default()).unwrap();
    assert!(r.min_distance.is_zero());
    assert_eq!(r.verdict, TestVerdict::Pass);
}

#[test]
fn parallel_enumeration_is_identical() {
    for g in [scenarios::bell(), scenarios::triangle(), scenarios::evans()] {
        let k = vec![2; g.normalize().unwrap().structure.latent().len()];
        let seq = enumerate_uniform(&g, &k, &EnumerationOptions::default()).unwrap();
        for threads in [2, 8] {
            for witnesses in [false, true] {
                let opts = EnumerationOptions {
                    parallelism: Parallelism::Threads(threads),
                    split_depth: 3,
                    witnesses,
                    ..EnumerationOptions::default()
                };
                let par = enumerate_uniform(&g, &k, &opts).unwrap();
                assert_eq!(par.counts().collect::<Vec<_>>(), seq.counts().collect::<Vec<_>>());
                assert_eq!(par.nodes(), seq.nodes());
                if witnesses {
                    let seq_w = enumerate_uniform(
                        &g,
                        &k,
                        &EnumerationOptions {
                            witnesses: true,
                            ..EnumerationOptions::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(par, seq_w);
                }
            }
        }
    }
}

#[test]
fn budget_and_time_limits_are_errors() {
    let g = scenarios::bell();
    let opts = EnumerationOptions {
        node_budget: Some(100),
        ..EnumerationOptions::default()
    };
    assert_eq!(
        enumerate_uniform(&g, &[3, 3, 3], &opts).unwrap_err(),
        HierarchyError::EnumerationBudgetExceeded(100)
    );
    let opts = EnumerationOptions {
        node_budget: None,
        time_limit: Some(Duration::ZERO),
        ..EnumerationOptions::default()
    };
    assert!(matches!(
        enumerate_uniform(&g, &[3, 3, 3], &opts),
        Err(HierarchyError::EnumerationTimeout(_))
    ));
}
