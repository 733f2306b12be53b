mod support;

use pworlds::cnf::{export_cnf, solve_cnf, CnfDocument, SatResult};
use pworlds::possibilistic::{decide_support, DecideOptions, PossibilisticError};
use pworlds::scenarios;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn truth_table_sat(doc: &CnfDocument) -> bool {
    (0u64..1 << doc.num_vars).any(|bits| {
        let assignment: Vec<bool> = (0..doc.num_vars).map(|i| bits >> i & 1 == 1).collect();
        doc.satisfied_by(&assignment)
    })
}

fn random_cnf(rng: &mut impl Rng) -> CnfDocument {
    let num_vars = rng.random_range(1..=10);
    let clauses = (0..rng.random_range(0..=40))
        .map(|_| {
            (0..rng.random_range(1..=3))
                .map(|_| {
                    let v = rng.random_range(1..=num_vars as i64);
                    if rng.random_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    CnfDocument {
        num_vars,
        clauses,
        legend: Vec::new(),
    }
}

#[test]
fn dpll_matches_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sat = 0;
    for _ in 0..2_000 {
        let doc = random_cnf(&mut rng);
        let expected = truth_table_sat(&doc);
        match solve_cnf(&doc) {
            SatResult::Sat(assignment) => {
                assert!(expected);
                assert!(doc.satisfied_by(&assignment));
                sat += 1;
            }
            SatResult::Unsat => assert!(!expected, "{:?}", doc.clauses),
        }
    }
    assert!(sat > 200 && sat < 1_800);
}

#[test]
fn dimacs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let mut doc = random_cnf(&mut rng);
        doc.legend = (1..=doc.num_vars).map(|i| format!("x{i}")).collect();
        assert_eq!(CnfDocument::parse_dimacs(&doc.to_dimacs()).unwrap(), doc);
    }
    let g = scenarios::instrumental();
    let doc = export_cnf(&g, &support(&g, &[vec![0, 0, 0], vec![1, 0, 1]])).unwrap();
    assert_eq!(CnfDocument::parse_dimacs(&doc.to_dimacs()).unwrap(), doc);
}

fn agree(g: &pworlds::CausalStructure, events: &[Vec<u32>]) -> bool {
    let s = support(g, events);
    let doc = export_cnf(g, &s).unwrap();
    let cnf = solve_cnf(&doc);
    if let SatResult::Sat(a) = &cnf {
        assert!(doc.satisfied_by(a));
    }
    let decided = decide_support(g, &s, &DecideOptions::default()).unwrap();
    assert_eq!(cnf.is_sat(), decided.is_compatible(), "{events:?}");
    decided.is_compatible()
}

#[test]
fn cnf_matches_decide_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    let mut compatible = 0;
    while done < 50 {
        let g = random_structure(&mut rng, 4, 2, 2);
        let s = random_support(&mut rng, &g, 4);
        let latents = g.normalize().unwrap().structure.latent().len() as u32;
        if (s.len() as u64).pow(latents) > 256 {
            continue;
        }
        let events: Vec<Vec<u32>> = s.into_iter().collect();
        compatible += usize::from(agree(&g, &events));
        done += 1;
    }
    assert!(compatible > 5 && compatible < 45, "{compatible}");
}

#[test]
fn cnf_matches_decide_on_regressions() {
    assert!(!agree(&scenarios::w_structure(), &[vec![0, 0, 1], vec![1, 0, 0]]));
    assert!(!agree(&scenarios::instrumental(), &[vec![0, 0, 0], vec![1, 0, 1]]));
    assert!(!agree(&scenarios::bell(), &pr_box_events()));
    assert!(!agree(&scenarios::triangle(), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]));
    assert!(!agree(&scenarios::evans(), &[vec![0, 0, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 1, 1]]));
}

#[test]
fn non_boolean_visibles_are_rejected() {
    let g = scenarios::shared_cause_collider();
    let err = export_cnf(&g, &support(&g, &[vec![0, 0, 0]])).unwrap_err();
    assert_eq!(err, PossibilisticError::NonBooleanVisible("c".into(), 4));
}
