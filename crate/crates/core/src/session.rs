//! The sequential diagnosis loop.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::diagnosis::{Diagnosis, DiagnosisSearch, FaultChecker, SearchOptions};
use crate::error::{Error, Result};
use crate::logic::Dpi;
use crate::oracle::{classify, OracleKind};
use crate::prob::{answer_likelihood, Beliefs, FaultModel};
use crate::qsm::{select_index, update_rio_state, Measure, RioState};
use crate::query::{candidate_pool, positive_class_prob, Answer};
use crate::seed::stream;

pub const DEFAULT_MAX_QUERIES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub measure: Measure,
    /// Number of leading diagnoses; at least 2.
    pub ld: usize,
    pub oracle: OracleKind,
    pub max_queries: usize,
    pub seed: u64,
    /// Assign probe partitions by axiom membership instead of reasoning.
    pub fast_path: bool,
    pub reuse_conflicts: bool,
}

impl SessionConfig {
    pub fn new(measure: Measure, ld: usize, oracle: OracleKind, seed: u64) -> Self {
        SessionConfig {
            measure,
            ld,
            oracle,
            max_queries: DEFAULT_MAX_QUERIES,
            seed,
            fast_path: true,
            reuse_conflicts: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ld < 2 {
            return Err(Error::InvalidValue {
                what: "ld",
                value: self.ld.to_string(),
            });
        }
        if self.max_queries == 0 {
            return Err(Error::InvalidValue {
                what: "max_queries",
                value: "0".into(),
            });
        }
        Ok(())
    }
}

/// One answered query.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub query_id: String,
    /// Estimated probability of a positive answer.
    pub x: f64,
    pub answer: Answer,
    pub leading_size: usize,
    pub eliminated: usize,
}

impl TraceRecord {
    pub const HEADER: &'static str = "step,query_id,x,answer,leading,eliminated";

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{:.17},{},{},{}",
            self.step, self.query_id, self.x, self.answer, self.leading_size, self.eliminated
        )
    }
}

#[derive(Debug, Clone)]
pub struct SessionResult {
    pub n_queries: usize,
    /// The surviving minimal diagnosis, or the most probable leading one if
    /// the session was aborted.
    pub target: Diagnosis,
    pub target_labels: Vec<String>,
    pub answers: Vec<(String, Answer)>,
    pub trace: Vec<TraceRecord>,
    pub wall_time: Duration,
    pub aborted: bool,
    /// The input problem with all answered measurements added.
    pub final_dpi: Dpi,
}

impl SessionResult {
    pub fn trace_text(&self) -> String {
        let mut out = String::from(TraceRecord::HEADER);
        out.push('\n');
        for r in &self.trace {
            let _ = writeln!(out, "{}", r.to_line());
        }
        out
    }
}

/// Runs queries against a simulated oracle until the problem has a single
/// minimal diagnosis or `max_queries` queries were asked.
pub fn run_session(dpi: &Dpi, fault_model: &FaultModel, config: &SessionConfig) -> Result<SessionResult> {
    config.validate()?;
    let started = Instant::now();
    let ax_probs = fault_model.axiom_probs();
    let mut current = dpi.clone();
    let mut checker = FaultChecker::new(dpi);
    let mut search = DiagnosisSearch::new(SearchOptions {
        reuse_conflicts: config.reuse_conflicts,
        ..SearchOptions::default()
    });
    let mut oracle_rng = stream(config.seed, "oracle");
    let mut select_rng = stream(config.seed, "select");

    // Accumulated likelihood factors of diagnoses seen in earlier rounds.
    let mut likelihood: HashMap<Diagnosis, f64> = HashMap::new();
    let mut rio: Option<RioState> = None;
    let mut last_eliminated: Option<usize> = None;
    let mut asked = HashSet::new();
    let mut answers = Vec::new();
    let mut trace = Vec::new();

    let (target, aborted) = loop {
        let leading = search.leading(&mut checker, ax_probs, config.ld)?;
        if leading.len() == 1 {
            break (leading[0].0.clone(), false);
        }
        if answers.len() >= config.max_queries {
            break (leading[0].0.clone(), true);
        }
        if config.measure == Measure::Rio {
            rio = Some(match (rio, last_eliminated) {
                (Some(state), Some(e)) => update_rio_state(state, e, leading.len()),
                _ => RioState::new(leading.len()),
            });
        }

        let beliefs = Beliefs::new(
            leading
                .iter()
                .map(|(d, prior)| (d.clone(), prior * likelihood.get(d).copied().unwrap_or(1.0)))
                .collect(),
        )
        .normalize()?;
        let pool = candidate_pool(&current, &beliefs, config.fast_path)?;
        let pick = select_index(config.measure, &pool, rio.as_ref(), &mut select_rng)?;
        let (query, qp) = &pool[pick];
        let x = positive_class_prob(qp);
        let answer = classify(config.oracle, x, &mut oracle_rng);
        debug_assert!(asked.insert(query.id.clone()), "query {} posed twice", query.id);

        match answer {
            Answer::Positive => {
                current.positive.push(query.sentence.clone());
                checker.add_positive(&query.sentence);
            }
            Answer::Negative => {
                current.negative.push(query.sentence.clone());
                checker.add_negative(&query.sentence);
            }
        }
        search.dpi_changed();
        for d in beliefs.diagnoses() {
            let block = qp.block_of(d).expect("pool partitions cover the leading set");
            *likelihood.entry(d.clone()).or_insert(1.0) *= answer_likelihood(block, answer);
        }

        let eliminated = qp.eliminated_by(answer);
        last_eliminated = Some(eliminated);
        answers.push((query.id.clone(), answer));
        trace.push(TraceRecord {
            step: answers.len(),
            query_id: query.id.clone(),
            x,
            answer,
            leading_size: leading.len(),
            eliminated,
        });
    };

    Ok(SessionResult {
        n_queries: answers.len(),
        target_labels: target.labels(&current.kb).into_iter().map(str::to_string).collect(),
        target,
        answers,
        trace,
        wall_time: started.elapsed(),
        aborted,
        final_dpi: current,
    })
}
