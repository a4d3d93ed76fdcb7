//! The seven-component example as an actual problem: axioms are the atoms
//! `x1..x7` and the background forbids each minimal conflict, where the
//! minimal conflicts are the minimal hitting sets of the six diagnoses.

use diagseq::diagnosis::{leading_diagnoses, AxiomSet};
use diagseq::logic::{Dpi, Formula};
use diagseq::prob::{Beliefs, FaultModel};
use diagseq::qsm::{select_query, Measure, RioState};
use diagseq::query::{candidate_pool, positive_class_prob};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DIAGNOSES: [&[usize]; 6] = [&[2, 3], &[2, 5], &[2, 6], &[2, 7], &[1, 4, 7], &[3, 4, 7]];
const PROBS: [f64; 6] = [0.01, 0.33, 0.14, 0.07, 0.41, 0.04];

fn zero_based(d: &[usize]) -> AxiomSet {
    d.iter().map(|i| i - 1).collect()
}

fn minimal_hitting_sets(family: &[AxiomSet], n: usize) -> Vec<AxiomSet> {
    let hits = |h: &AxiomSet| family.iter().all(|s| !s.is_disjoint(h));
    (0u32..1 << n)
        .map(|bits| (0..n).filter(|i| bits >> i & 1 == 1).collect::<AxiomSet>())
        .filter(|h| hits(h) && h.iter().all(|i| !hits(&h.without(i))))
        .collect()
}

fn example_dpi() -> Dpi {
    let diagnoses: Vec<AxiomSet> = DIAGNOSES.iter().map(|d| zero_based(d)).collect();
    let mut dpi = Dpi::from_axioms(["x1", "x2", "x3", "x4", "x5", "x6", "x7"]).unwrap();
    for c in minimal_hitting_sets(&diagnoses, 7) {
        let members: Vec<Formula> = c.iter().map(|i| Formula::atom(format!("x{}", i + 1))).collect();
        let clause = if members.len() == 1 {
            Formula::not(members.into_iter().next().unwrap())
        } else {
            Formula::not(Formula::and(members))
        };
        dpi = dpi.with_background(clause);
    }
    dpi
}

fn beliefs() -> Beliefs {
    Beliefs::new(DIAGNOSES.iter().map(|d| zero_based(d)).zip(PROBS).collect())
}

#[test]
fn reasoner_recovers_the_six_diagnoses() {
    let dpi = example_dpi();
    let fm = FaultModel::from_axiom_probs(&dpi, vec![0.1; 7]);
    let mut found = leading_diagnoses(&dpi, &fm, 100).unwrap();
    found.sort();
    let mut expected: Vec<AxiomSet> = DIAGNOSES.iter().map(|d| zero_based(d)).collect();
    expected.sort();
    assert_eq!(found, expected);
}

#[test]
fn reasoner_backed_partitions_match_the_table() {
    let dpi = example_dpi();
    let b = beliefs();
    let pool = candidate_pool(&dpi, &b, false).unwrap();
    assert_eq!(pool, candidate_pool(&dpi, &b, true).unwrap());
    let table = [
        (5, 1, 0.59),
        (2, 4, 0.45),
        (4, 2, 0.95),
        (4, 2, 0.55),
        (5, 1, 0.67),
        (5, 1, 0.86),
        (3, 3, 0.48),
    ];
    assert_eq!(pool.len(), 7);
    for ((q, qp), (plus, minus, p)) in pool.iter().zip(table) {
        assert_eq!((qp.d_plus.len(), qp.d_minus.len(), qp.d_zero.len()), (plus, minus, 0), "{}", q.id);
        assert!((positive_class_prob(qp) - p).abs() < 0.005, "{}", q.id);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rio = RioState { n: 2, leading_size: 6 };
    let picks: Vec<String> = Measure::ALL[..7]
        .iter()
        .map(|&m| {
            let r = (m == Measure::Rio).then_some(&rio);
            select_query(m, &pool, r, &mut rng).unwrap().id.clone()
        })
        .collect();
    assert_eq!(picks, ["ax7", "ax7", "ax3", "ax7", "ax1", "ax7", "ax2"]);
}
