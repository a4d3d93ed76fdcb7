//! Fault probabilities: sub-component extraction, biased distribution
//! generators, axiom and diagnosis priors, and belief updates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnosis::Diagnosis;
use crate::error::{Error, Result};
use crate::logic::{Dpi, Formula, SentenceSet};
use crate::query::{Answer, Block, QPartition};

/// Probabilities are kept inside `(EPSILON, 1 - EPSILON)`.
pub const EPSILON: f64 = 1e-6;

pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(EPSILON, 1.0 - EPSILON)
}

/// Kinds of sub-components an axiom is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubComponent {
    Not,
    And,
    Or,
    Implies,
    Iff,
    Atom,
}

impl SubComponent {
    pub const ALL: [SubComponent; 6] = [
        SubComponent::Not,
        SubComponent::And,
        SubComponent::Or,
        SubComponent::Implies,
        SubComponent::Iff,
        SubComponent::Atom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SubComponent::Not => "NOT",
            SubComponent::And => "AND",
            SubComponent::Or => "OR",
            SubComponent::Implies => "IMPLIES",
            SubComponent::Iff => "IFF",
            SubComponent::Atom => "ATOM",
        }
    }
}

impl fmt::Display for SubComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubComponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SubComponent::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidValue {
                what: "sub-component kind",
                value: s.to_string(),
            })
    }
}

/// Occurrence counts per sub-component kind.
pub type SubComponentCounts = BTreeMap<SubComponent, usize>;

/// Operator occurrences of `f`, plus one `ATOM` per atom occurrence.
/// Constants `true`/`false` contribute nothing.
pub fn subcomponents_of(f: &Formula) -> SubComponentCounts {
    fn walk(f: &Formula, out: &mut SubComponentCounts) {
        let mut bump = |k| *out.entry(k).or_insert(0) += 1;
        match f {
            Formula::Atom(_) => bump(SubComponent::Atom),
            Formula::True | Formula::False => {}
            Formula::Not(c) => {
                bump(SubComponent::Not);
                walk(c, out);
            }
            Formula::And(cs) | Formula::Or(cs) => {
                bump(if matches!(f, Formula::And(_)) {
                    SubComponent::And
                } else {
                    SubComponent::Or
                });
                cs.iter().for_each(|c| walk(c, out));
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                bump(if matches!(f, Formula::Implies(..)) {
                    SubComponent::Implies
                } else {
                    SubComponent::Iff
                });
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = SubComponentCounts::new();
    walk(f, &mut out);
    out
}

/// Sub-component multisets for every axiom, keyed by label.
pub fn extract_subcomponents(kb: &SentenceSet) -> BTreeMap<String, SubComponentCounts> {
    kb.iter().map(|(l, f)| (l.to_string(), subcomponents_of(f))).collect()
}

/// Bias of the sub-component fault distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistributionKind {
    /// One shared random value for every sub-component.
    Eq,
    /// Exponentially descending, λ = 0.5.
    Mod,
    /// Exponentially descending, λ = 1.75.
    Str,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] = [DistributionKind::Eq, DistributionKind::Mod, DistributionKind::Str];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Eq => "eq",
            DistributionKind::Mod => "mod",
            DistributionKind::Str => "str",
        }
    }

    pub fn default_lambda(self) -> f64 {
        match self {
            DistributionKind::Eq => 0.0,
            DistributionKind::Mod => 0.5,
            DistributionKind::Str => 1.75,
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DistributionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidValue {
                what: "distribution",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub lambda: f64,
    pub seed: u64,
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, seed: u64) -> Self {
        DistributionSpec {
            kind,
            lambda: kind.default_lambda(),
            seed,
        }
    }
}

/// Exponential density `λ e^{-λx}`.
pub fn exponential_density(lambda: f64, x: f64) -> f64 {
    lambda * (-lambda * x).exp()
}

/// Assigns a fault probability to each distinct kind in `kinds`.
///
/// `Eq` gives every kind the same draw `r ~ U[0,1]` (clamped). `Mod`/`Str`
/// give each kind a distinct rank `i` from a random permutation of
/// `1..=|kinds|` and the probability `λ e^{-λx}` for `x ~ U[i-1/2, i+1/2)`.
/// These values are not clamped, so the ratio structure stays intact; they
/// are only floored at the smallest positive float. The result is a pure
/// function of `(spec, kinds)`.
pub fn generate_distribution<T: Ord + Clone>(spec: &DistributionSpec, kinds: &[T]) -> BTreeMap<T, f64> {
    let kinds: Vec<T> = kinds.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        DistributionKind::Eq => {
            let r = clamp_prob(rng.gen::<f64>());
            kinds.into_iter().map(|k| (k, r)).collect()
        }
        DistributionKind::Mod | DistributionKind::Str => {
            let mut ranks: Vec<usize> = (1..=kinds.len()).collect();
            ranks.shuffle(&mut rng);
            kinds
                .into_iter()
                .zip(ranks)
                .map(|(k, i)| {
                    let x = rng.gen_range(i as f64 - 0.5..i as f64 + 0.5);
                    let p = exponential_density(spec.lambda, x).clamp(f64::MIN_POSITIVE, 1.0 - EPSILON);
                    (k, p)
                })
                .collect()
        }
    }
}

/// `1 - prod (1 - p(sc))` over the occurrences in `counts`, clamped.
pub fn axiom_fault_prob(counts: &SubComponentCounts, sc_probs: &BTreeMap<SubComponent, f64>) -> Result<f64> {
    let mut healthy = 1.0;
    for (&kind, &n) in counts {
        let p = sc_probs
            .get(&kind)
            .ok_or_else(|| Error::MissingSubComponent(kind.to_string()))?;
        healthy *= (1.0 - p).powi(n as i32);
    }
    Ok(clamp_prob(1.0 - healthy))
}

/// `prod_{ax in d} p(ax) * prod_{ax not in d} (1 - p(ax))`.
///
/// Factors are multiplied in sorted order, so diagnoses with equal factor
/// multisets get bit-identical priors.
pub fn prior_of(d: &Diagnosis, ax_probs: &[f64]) -> f64 {
    let mut factors: Vec<f64> = ax_probs
        .iter()
        .enumerate()
        .map(|(i, &p)| if d.contains(i) { p } else { 1.0 - p })
        .collect();
    factors.sort_by(f64::total_cmp);
    factors.into_iter().product()
}

/// Unnormalized prior of `d`; fails on indices outside `ax_probs`.
pub fn diagnosis_prior(d: &Diagnosis, ax_probs: &[f64]) -> Result<f64> {
    if d.bound() > ax_probs.len() {
        return Err(Error::UnknownLabel(format!("#{}", d.bound() - 1)));
    }
    Ok(prior_of(d, ax_probs))
}

/// Sub-component and axiom fault probabilities for one DPI.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultModel {
    pub sc_probs: BTreeMap<SubComponent, f64>,
    labels: Vec<String>,
    ax_probs: Vec<f64>,
    pub spec: Option<DistributionSpec>,
}

impl FaultModel {
    /// Draws sub-component probabilities for the kinds occurring in `K` and
    /// aggregates them per axiom.
    pub fn generate(dpi: &Dpi, spec: DistributionSpec) -> Self {
        let counts: Vec<SubComponentCounts> = dpi.kb.formulas().map(subcomponents_of).collect();
        let kinds: Vec<SubComponent> = counts.iter().flat_map(|c| c.keys().copied()).collect();
        let sc_probs: BTreeMap<SubComponent, f64> = generate_distribution(&spec, &kinds)
            .into_iter()
            .map(|(k, p)| (k, clamp_prob(p)))
            .collect();
        let ax_probs = counts
            .iter()
            .map(|c| axiom_fault_prob(c, &sc_probs).expect("every occurring kind has a probability"))
            .collect();
        FaultModel {
            sc_probs,
            labels: dpi.kb.labels().map(str::to_string).collect(),
            ax_probs,
            spec: Some(spec),
        }
    }

    /// A model with explicit per-axiom probabilities (clamped).
    pub fn from_axiom_probs(dpi: &Dpi, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), dpi.kb.len(), "one probability per axiom");
        FaultModel {
            sc_probs: BTreeMap::new(),
            labels: dpi.kb.labels().map(str::to_string).collect(),
            ax_probs: probs.into_iter().map(clamp_prob).collect(),
            spec: None,
        }
    }

    /// Axiom probabilities in `K` order.
    pub fn axiom_probs(&self) -> &[f64] {
        &self.ax_probs
    }

    pub fn ax_prob(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.ax_probs[i])
    }

    /// `kind,probability` rows.
    pub fn sc_probs_csv(&self) -> String {
        let rows = self.sc_probs.iter().map(|(k, p)| (k.to_string(), *p));
        write_prob_csv("kind", rows)
    }

    /// `label,probability` rows.
    pub fn ax_probs_csv(&self) -> String {
        let rows = self.labels.iter().cloned().zip(self.ax_probs.iter().copied());
        write_prob_csv("label", rows)
    }

    /// Inverse of [`sc_probs_csv`](Self::sc_probs_csv) and
    /// [`ax_probs_csv`](Self::ax_probs_csv).
    pub fn from_csv(sc_csv: &str, ax_csv: &str) -> Result<Self> {
        let sc_probs = read_prob_csv(sc_csv)?
            .into_iter()
            .map(|(k, p)| Ok((k.parse()?, p)))
            .collect::<Result<_>>()?;
        let (labels, ax_probs) = read_prob_csv(ax_csv)?.into_iter().unzip();
        Ok(FaultModel {
            sc_probs,
            labels,
            ax_probs,
            spec: None,
        })
    }
}

fn write_prob_csv(key: &str, rows: impl Iterator<Item = (String, f64)>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([key, "probability"]).expect("in-memory write");
    for (k, p) in rows {
        w.write_record([k, format!("{p:.16e}")]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn read_prob_csv(text: &str) -> Result<Vec<(String, f64)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv("<fault model>", e))?;
        let bad = |v: &str| Error::InvalidValue {
            what: "probability row",
            value: v.to_string(),
        };
        let key = rec.get(0).ok_or_else(|| bad(""))?;
        let p: f64 = rec
            .get(1)
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad(rec.get(1).unwrap_or("")))?;
        out.push((key.to_string(), p));
    }
    Ok(out)
}

/// Probabilities of diagnoses being the actual diagnosis.
#[derive(Debug, Clone, PartialEq)]
pub struct Beliefs {
    pub entries: Vec<(Diagnosis, f64)>,
    pub normalized: bool,
}

impl Beliefs {
    pub fn new(entries: Vec<(Diagnosis, f64)>) -> Self {
        Beliefs {
            entries,
            normalized: false,
        }
    }

    /// Prior beliefs over `diagnoses`, not yet normalized.
    pub fn from_priors(diagnoses: impl IntoIterator<Item = Diagnosis>, ax_probs: &[f64]) -> Self {
        Beliefs::new(diagnoses.into_iter().map(|d| {
            let p = prior_of(&d, ax_probs);
            (d, p)
        }).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn prob_of(&self, d: &Diagnosis) -> Option<f64> {
        self.entries.iter().find(|(e, _)| e == d).map(|(_, p)| *p)
    }

    pub fn diagnoses(&self) -> impl Iterator<Item = &Diagnosis> {
        self.entries.iter().map(|(d, _)| d)
    }

    pub fn probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, p)| *p)
    }

    /// Divides every entry by the total mass, preserving order.
    pub fn normalize(&self) -> Result<Beliefs> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(Beliefs {
            entries: self.entries.iter().map(|(d, p)| (d.clone(), p / total)).collect(),
            normalized: true,
        })
    }
}

/// Likelihood of `answer` for a diagnosis in `block`: 1 when the diagnosis
/// predicts the answer, 0 when it predicts the opposite, 1/2 when it is
/// uncommitted.
pub fn answer_likelihood(block: Block, answer: Answer) -> f64 {
    match (block, answer) {
        (Block::Zero, _) => 0.5,
        (Block::Plus, Answer::Positive) | (Block::Minus, Answer::Negative) => 1.0,
        _ => 0.0,
    }
}

/// Bayesian update of normalized beliefs after `answer` to the query that
/// induced `qp`. Contradicted diagnoses are dropped.
pub fn bayes_update(beliefs: &Beliefs, qp: &QPartition, answer: Answer) -> Result<Beliefs> {
    let mut entries = Vec::with_capacity(beliefs.len());
    for (d, p) in &beliefs.entries {
        let block = qp
            .block_of(d)
            .ok_or_else(|| Error::InvalidPartition(format!("diagnosis {d:?} is in no block")))?;
        let w = p * answer_likelihood(block, answer);
        if w > 0.0 {
            entries.push((d.clone(), w));
        }
    }
    Beliefs::new(entries).normalize()
}

#[cfg(test)]
mod tests {
    use approx_eq::assert_close;

    use super::*;
    use crate::diagnosis::AxiomSet;
    use crate::logic::parse_formula;

    mod approx_eq {
        macro_rules! assert_close {
            ($a:expr, $b:expr, $tol:expr) => {{
                let (a, b): (f64, f64) = ($a, $b);
                assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
            }};
        }
        pub(crate) use assert_close;
    }

    fn set(v: &[usize]) -> AxiomSet {
        v.iter().copied().collect()
    }

    fn counts(pairs: &[(SubComponent, usize)]) -> SubComponentCounts {
        pairs.iter().copied().collect()
    }

    #[test]
    fn subcomponent_extraction() {
        use SubComponent::*;
        let sc = |t| subcomponents_of(&parse_formula(t).unwrap());
        assert_eq!(sc("(and A (not B))"), counts(&[(And, 1), (Not, 1), (Atom, 2)]));
        assert_eq!(sc("A"), counts(&[(Atom, 1)]));
        assert_eq!(sc("(implies (or A B) C)"), counts(&[(Implies, 1), (Or, 1), (Atom, 3)]));
        assert_eq!(sc("(iff true (not false))"), counts(&[(Iff, 1), (Not, 1)]));
        let kb: SentenceSet = ["A", "(not A)"].iter().map(|t| parse_formula(t).unwrap()).collect();
        let all = extract_subcomponents(&kb);
        assert_eq!(all["ax2"], counts(&[(Not, 1), (Atom, 1)]));
    }

    #[test]
    fn axiom_probability_aggregation() {
        use SubComponent::*;
        let probs: BTreeMap<_, _> = [(And, 0.1), (Or, 0.1), (Not, 0.2), (Atom, 0.5)].into_iter().collect();
        assert_close!(axiom_fault_prob(&counts(&[(And, 1), (Or, 1)]), &probs).unwrap(), 0.19, 1e-12);
        assert_close!(axiom_fault_prob(&counts(&[(Atom, 1)]), &probs).unwrap(), 0.5, 1e-12);
        assert_close!(axiom_fault_prob(&counts(&[(Not, 2)]), &probs).unwrap(), 0.36, 1e-12);
        assert!(matches!(
            axiom_fault_prob(&counts(&[(Iff, 1)]), &probs),
            Err(Error::MissingSubComponent(k)) if k == "IFF"
        ));
        assert_eq!(axiom_fault_prob(&SubComponentCounts::new(), &probs).unwrap(), EPSILON);
    }

    #[test]
    fn diagnosis_prior_examples() {
        let p = [0.1, 0.2, 0.3];
        assert_close!(diagnosis_prior(&set(&[0]), &p).unwrap(), 0.056, 1e-12);
        assert_close!(diagnosis_prior(&set(&[]), &p).unwrap(), 0.504, 1e-12);
        assert_close!(diagnosis_prior(&set(&[0, 1, 2]), &p).unwrap(), 0.006, 1e-12);
        assert!(matches!(diagnosis_prior(&set(&[3]), &p), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn normalize_examples() {
        let b = |ps: &[f64]| Beliefs::new(ps.iter().enumerate().map(|(i, &p)| (set(&[i]), p)).collect());
        let n = b(&[0.2, 0.2]).normalize().unwrap();
        assert_eq!(n.probs().collect::<Vec<_>>(), [0.5, 0.5]);
        assert!(n.normalized);
        assert_close!(b(&[0.056]).normalize().unwrap().entries[0].1, 1.0, 1e-15);
        let n = b(&[0.405, 0.045, 0.045]).normalize().unwrap();
        let ps: Vec<f64> = n.probs().collect();
        assert_close!(ps[0], 0.8182, 5e-5);
        assert_close!(ps[1], 0.0909, 5e-5);
        assert_close!(ps[2], 0.0909, 5e-5);
        assert!(matches!(b(&[0.0, 0.0]).normalize(), Err(Error::ZeroMass)));
    }

    #[test]
    fn bayes_update_examples() {
        let (d1, d2, d3) = (set(&[0]), set(&[1]), set(&[2]));
        let beliefs = Beliefs::new(vec![(d1.clone(), 0.5), (d2.clone(), 0.3), (d3.clone(), 0.2)])
            .normalize()
            .unwrap();
        let qp = QPartition::from_blocks(vec![d1.clone()], vec![d3.clone()], vec![d2.clone()], &beliefs).unwrap();
        let post = bayes_update(&beliefs, &qp, Answer::Positive).unwrap();
        assert_eq!(post.diagnoses().cloned().collect::<Vec<_>>(), [d1.clone(), d2.clone()]);
        assert_close!(post.entries[0].1, 0.7692, 5e-5);
        assert_close!(post.entries[1].1, 0.2308, 5e-5);

        let strong = QPartition::from_blocks(vec![d1.clone(), d2.clone()], vec![d3.clone()], vec![], &beliefs).unwrap();
        let post = bayes_update(&beliefs, &strong, Answer::Positive).unwrap();
        assert_close!(post.entries[0].1, 0.625, 1e-12);
        assert_close!(post.entries[1].1, 0.375, 1e-12);

        let all_minus = QPartition::from_blocks(vec![], vec![d1, d2, d3], vec![], &beliefs).unwrap();
        assert!(matches!(bayes_update(&beliefs, &all_minus, Answer::Positive), Err(Error::ZeroMass)));
    }

    #[test]
    fn eq_distribution_is_constant() {
        let spec = DistributionSpec::new(DistributionKind::Eq, 17);
        let d = generate_distribution(&spec, &SubComponent::ALL);
        let first = d[&SubComponent::Not];
        assert!(d.values().all(|&p| p == first));
        assert!(first > 0.0 && first < 1.0);
    }

    #[test]
    fn str_values_bounded_by_density_peak() {
        let peak = exponential_density(1.75, 0.5);
        assert_close!(peak, 0.729, 1e-3);
        for seed in 0..50 {
            let d = generate_distribution(&DistributionSpec::new(DistributionKind::Str, seed), &(0..25).collect::<Vec<u32>>());
            assert!(d.values().all(|&p| p > 0.0 && p <= peak));
        }
    }

    #[test]
    fn generator_is_deterministic_and_permutes_ranks() {
        let kinds: Vec<u32> = (0..10).collect();
        let spec = DistributionSpec::new(DistributionKind::Mod, 3);
        assert_eq!(generate_distribution(&spec, &kinds), generate_distribution(&spec, &kinds));
        // Ranks are a permutation: exactly one value per unit interval of x.
        let d = generate_distribution(&spec, &kinds);
        let mut ranks: Vec<i64> = d.values().map(|&p| (-(p / 0.5).ln() / 0.5).round() as i64).collect();
        ranks.sort();
        assert_eq!(ranks, (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn fault_model_csv_round_trip() {
        let dpi = Dpi::from_axioms(["(and A (not B))", "(implies A B)", "C"]).unwrap();
        let fm = FaultModel::generate(&dpi, DistributionSpec::new(DistributionKind::Mod, 9));
        let back = FaultModel::from_csv(&fm.sc_probs_csv(), &fm.ax_probs_csv()).unwrap();
        assert_eq!(back.sc_probs, fm.sc_probs);
        assert_eq!(back.axiom_probs(), fm.axiom_probs());
        assert_eq!(back.ax_prob("ax2"), fm.ax_prob("ax2"));
        assert!(fm.sc_probs_csv().starts_with("kind,probability\n"));
    }

    #[test]
    fn priors_over_all_subsets_sum_to_one() {
        let p = [0.1, 0.35, 0.8, 0.02, 0.5];
        let total: f64 = (0u32..32)
            .map(|bits| prior_of(&(0..5).filter(|i| bits >> i & 1 == 1).collect(), &p))
            .sum();
        assert_close!(total, 1.0, 1e-12);
    }
}
