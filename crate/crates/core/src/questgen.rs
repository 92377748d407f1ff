//! The iterative question-generation loop: each round asks the backend
//! for ten fresh YES/NO questions, scores every question on a new batch
//! of twenty training founders, and feeds the scores back into the next
//! round's prompt until the pool reaches its target size.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{render_profile, DatasetError, FeatureLexicon, FounderProfile, InsightSummary};
use crate::metrics::{confusion, ConfusionCounts, MetricsError};
use crate::oracle::{
    build_feedback_prompt, build_generation_prompt, request_questions, OracleBackend, OracleError,
    QuestionPerformance, QUESTIONS_PER_ROUND,
};
use crate::seeding::stream_rng;

/// Founder profiles shown as generation exemplars each round.
pub const GEN_BATCH_SIZE: usize = 20;
/// Founder profiles each new question is scored on.
pub const SCORING_BATCH_SIZE: usize = 20;

#[derive(Debug, Error)]
pub enum QuestgenError {
    #[error("invalid questgen config: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("round {round} failed: {source}")]
    RoundFailed {
        round: u32,
        /// Records accumulated before the failing round, for persistence.
        partial: QuestionPool,
        #[source]
        source: Box<QuestgenError>,
    },
    #[error("malformed pool file: {0}")]
    MalformedPool(String),
}

/// Stable question identifier, unique within a pool.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuestionId(String);

impl QuestionId {
    pub fn new(id: String) -> Self {
        Self(id)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionOrigin {
    Llm,
    Expert,
}

/// One candidate question with the confusion counts it scored on its
/// twenty-founder evaluation batch.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionRecord {
    pub id: QuestionId,
    pub text: String,
    pub round: u32,
    pub origin: QuestionOrigin,
    pub stats: ConfusionCounts,
}

impl QuestionRecord {
    pub fn performance(&self) -> QuestionPerformance {
        QuestionPerformance {
            text: self.text.clone(),
            precision: self.stats.precision(),
            recall: self.stats.recall(),
            predicted_positive: self.stats.predicted_positive() as usize,
            batch_size: self.stats.total() as usize,
        }
    }
}

/// The accumulating candidate pool.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionPool {
    pub questions: Vec<QuestionRecord>,
    pub target_size: usize,
}

impl QuestionPool {
    pub fn new(target_size: usize) -> Self {
        Self { questions: Vec::with_capacity(target_size), target_size }
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.questions.len() == self.target_size
    }

    pub fn max_round(&self) -> u32 {
        self.questions.iter().map(|q| q.round).max().unwrap_or(0)
    }

    fn push_round(&mut self, records: Vec<QuestionRecord>) {
        self.questions.extend(records);
        debug_assert!(self.questions.len() <= self.target_size);
    }

    /// One record per line, with derived metrics alongside the counts.
    pub fn to_jsonl(&self, meta: Option<&serde_json::Value>) -> String {
        let mut out = String::new();
        if let Some(meta) = meta {
            out.push_str(&meta.to_string());
            out.push('\n');
        }
        for q in &self.questions {
            let line = PoolLine {
                id: q.id.clone(),
                text: q.text.clone(),
                round: q.round,
                origin: q.origin,
                stats: q.stats,
                precision: q.stats.precision(),
                recall: q.stats.recall(),
                predicted_positive: q.stats.predicted_positive(),
            };
            out.push_str(&serde_json::to_string(&line).expect("pool line serializes"));
            out.push('\n');
        }
        out
    }

    /// Parse the format written by [`QuestionPool::to_jsonl`], verifying
    /// that stored derived metrics match the stored counts.
    pub fn from_jsonl(
        text: &str,
        target_size: usize,
    ) -> Result<(Option<serde_json::Value>, Self), QuestgenError> {
        let mut meta = None;
        let mut questions = Vec::new();
        let mut ids = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            if i == 0 {
                let value: serde_json::Value = serde_json::from_str(raw)
                    .map_err(|e| QuestgenError::MalformedPool(e.to_string()))?;
                if value.get("id").is_none() {
                    meta = Some(value);
                    continue;
                }
            }
            let line: PoolLine = serde_json::from_str(raw)
                .map_err(|e| QuestgenError::MalformedPool(format!("line {}: {e}", i + 1)))?;
            if line.precision != line.stats.precision()
                || line.recall != line.stats.recall()
                || line.predicted_positive != line.stats.predicted_positive()
            {
                return Err(QuestgenError::MalformedPool(format!(
                    "record {} has derived metrics inconsistent with its counts: {:?} {:?} {} vs {:?} {:?} {}",
                    line.id, line.precision, line.recall, line.predicted_positive,
                    line.stats.precision(), line.stats.recall(), line.stats.predicted_positive()
                )));
            }
            if line.text.is_empty() {
                return Err(QuestgenError::MalformedPool(format!("record {} has empty text", line.id)));
            }
            if !ids.insert(line.id.clone()) {
                return Err(QuestgenError::MalformedPool(format!("duplicate id {}", line.id)));
            }
            questions.push(QuestionRecord {
                id: line.id,
                text: line.text,
                round: line.round,
                origin: line.origin,
                stats: line.stats,
            });
        }
        Ok((meta, Self { questions, target_size }))
    }
}

#[derive(Serialize, Deserialize)]
struct PoolLine {
    id: QuestionId,
    text: String,
    round: u32,
    origin: QuestionOrigin,
    stats: ConfusionCounts,
    precision: Option<f64>,
    recall: Option<f64>,
    predicted_positive: u32,
}

/// Context for one round's prompt: insight hints for an opening round,
/// the previous round's scores for every later round.
pub enum RoundContext<'a> {
    Insights(&'a [InsightSummary]),
    PriorStats(&'a [QuestionPerformance]),
}

/// Deterministic per-round batch selection. Scoring batches consume the
/// training split without replacement, reshuffling once exhausted, so
/// ten rounds over a two-hundred-founder split use each founder exactly
/// once for scoring. Generation exemplars are drawn from the rest of the
/// split, disjoint from the round's scoring batch.
pub(crate) struct BatchSampler<'a> {
    train: &'a [FounderProfile],
    seed: u64,
}

impl<'a> BatchSampler<'a> {
    pub(crate) fn new(train: &'a [FounderProfile], seed: u64) -> Self {
        Self { train, seed }
    }

    pub(crate) fn round_batches(
        &self,
        round: u32,
    ) -> (Vec<&'a FounderProfile>, Vec<&'a FounderProfile>) {
        use rand::seq::SliceRandom;
        let n = self.train.len();
        let start = (round as usize - 1) * SCORING_BATCH_SIZE;
        let mut cached: Option<(u64, Vec<usize>)> = None;
        let mut eval_idx = Vec::with_capacity(SCORING_BATCH_SIZE);
        for k in 0..SCORING_BATCH_SIZE {
            let global = start + k;
            let cycle = (global / n) as u64;
            if cached.as_ref().map(|(c, _)| *c) != Some(cycle) {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut stream_rng(self.seed, 0x6576_616C ^ cycle));
                cached = Some((cycle, order));
            }
            eval_idx.push(cached.as_ref().unwrap().1[global % n]);
        }

        let eval_set: HashSet<usize> = eval_idx.iter().copied().collect();
        let complement: Vec<usize> = (0..n).filter(|i| !eval_set.contains(i)).collect();
        let mut rng = stream_rng(self.seed, 0x6765_6E00 ^ u64::from(round));
        let gen_idx = rand::seq::index::sample(&mut rng, complement.len(), GEN_BATCH_SIZE);

        let gen = gen_idx.iter().map(|i| &self.train[complement[i]]).collect();
        let eval = eval_idx.iter().map(|&i| &self.train[i]).collect();
        (gen, eval)
    }
}

/// Runs rounds against a backend and accumulates the pool.
pub struct PoolBuilder<'a> {
    pub backend: &'a dyn OracleBackend,
    pub lexicon: &'a FeatureLexicon,
    /// Attempts per oracle request before a round fails.
    pub attempts: u32,
}

impl PoolBuilder<'_> {
    /// Generate ten questions and score each one on the evaluation batch.
    pub fn run_round(
        &self,
        gen_batch: &[&FounderProfile],
        eval_batch: &[&FounderProfile],
        context: RoundContext<'_>,
        round: u32,
        origin: QuestionOrigin,
        next_seq: usize,
    ) -> Result<Vec<QuestionRecord>, QuestgenError> {
        let render_all = |batch: &[&FounderProfile]| {
            batch
                .iter()
                .map(|p| render_profile(p, self.lexicon))
                .collect::<Result<Vec<_>, _>>()
        };
        let gen_rendered = render_all(gen_batch)?;
        let eval_rendered = render_all(eval_batch)?;

        let prompt = match context {
            RoundContext::Insights(hints) => {
                let hint_texts: Vec<String> = hints.iter().map(|h| h.text.clone()).collect();
                build_generation_prompt(&gen_rendered, &hint_texts)
            }
            RoundContext::PriorStats(stats) => build_feedback_prompt(stats, &gen_rendered)?,
        };
        let texts = request_questions(self.backend, &prompt, self.attempts)?;

        let labels: Vec<bool> = eval_batch.iter().map(|p| p.label).collect();
        let mut records = Vec::with_capacity(texts.len());
        for (i, text) in texts.into_iter().enumerate() {
            let answers = self.backend.answer_batch(&text, &eval_rendered)?;
            let stats = confusion(&answers, &labels)?;
            records.push(QuestionRecord {
                id: QuestionId::new(format!("q{:03}", next_seq + i)),
                text,
                round,
                origin,
                stats,
            });
        }
        Ok(records)
    }

    /// Repeat rounds until the pool holds `target` questions. The first
    /// round is hinted with the provided insight summaries; every later
    /// round feeds back the previous round's scores.
    pub fn accumulate_pool(
        &self,
        train: &[FounderProfile],
        insights: &[InsightSummary],
        target: usize,
        seed: u64,
    ) -> Result<QuestionPool, QuestgenError> {
        validate_round_target(target)?;
        let pool = QuestionPool::new(target);
        self.extend_pool(pool, train, insights, target, QuestionOrigin::Llm, seed)
    }

    /// Append `count` expert-informed questions: fresh generation rounds
    /// whose hint section holds the expert descriptors instead of
    /// data-derived summaries. The pool's target grows by `count`.
    pub fn inject_expert_questions(
        &self,
        pool: QuestionPool,
        train: &[FounderProfile],
        expert_descriptors: &[InsightSummary],
        count: usize,
        seed: u64,
    ) -> Result<QuestionPool, QuestgenError> {
        if count == 0 {
            return Ok(pool);
        }
        validate_round_target(count)?;
        if expert_descriptors.is_empty() {
            return Err(QuestgenError::Config("expert descriptors are empty".into()));
        }
        let mut pool = pool;
        pool.target_size += count;
        self.extend_pool(pool, train, expert_descriptors, count, QuestionOrigin::Expert, seed)
    }

    fn extend_pool(
        &self,
        mut pool: QuestionPool,
        train: &[FounderProfile],
        insights: &[InsightSummary],
        count: usize,
        origin: QuestionOrigin,
        seed: u64,
    ) -> Result<QuestionPool, QuestgenError> {
        if train.len() < GEN_BATCH_SIZE + SCORING_BATCH_SIZE {
            return Err(QuestgenError::Config(format!(
                "training split has {} founders; need at least {}",
                train.len(),
                GEN_BATCH_SIZE + SCORING_BATCH_SIZE
            )));
        }
        let sampler = BatchSampler::new(train, seed);
        let rounds = count / QUESTIONS_PER_ROUND;
        let first_round = pool.max_round() + 1;
        let mut prior: Option<Vec<QuestionPerformance>> = None;
        for k in 0..rounds {
            let round = first_round + k as u32;
            let (gen_batch, eval_batch) = sampler.round_batches(round);
            let context = match &prior {
                None => RoundContext::Insights(insights),
                Some(stats) => RoundContext::PriorStats(stats),
            };
            let records = self
                .run_round(&gen_batch, &eval_batch, context, round, origin, pool.len() + 1)
                .map_err(|source| QuestgenError::RoundFailed {
                    round,
                    partial: pool.clone(),
                    source: Box::new(source),
                })?;
            prior = Some(records.iter().map(QuestionRecord::performance).collect());
            pool.push_round(records);
        }
        Ok(pool)
    }
}

fn validate_round_target(target: usize) -> Result<(), QuestgenError> {
    if target == 0 || target % QUESTIONS_PER_ROUND != 0 {
        return Err(QuestgenError::Config(format!(
            "target {target} must be a positive multiple of {QUESTIONS_PER_ROUND}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{
        generate_synthetic_dataset, InsightProvenance, SynthConfig,
    };
    use crate::oracle::mock::{MockOracle, TemplateLibrary};
    use std::sync::Mutex;

    fn setup(seed: u64) -> (Vec<FounderProfile>, MockOracle, FeatureLexicon) {
        let split = generate_synthetic_dataset(&SynthConfig::default(), seed).unwrap();
        let lexicon = FeatureLexicon::builtin();
        let backend =
            MockOracle::new(seed, &TemplateLibrary::builtin(), lexicon.clone()).unwrap();
        (split.train, backend, lexicon)
    }

    fn data_insights() -> Vec<InsightSummary> {
        ["prior exits", "technical depth", "fundraising record"]
            .iter()
            .map(|t| InsightSummary {
                text: t.to_string(),
                provenance: InsightProvenance::DataDerived,
                source_ids: vec![],
            })
            .collect()
    }

    fn expert_insights() -> Vec<InsightSummary> {
        ["founders with prior exits", "technical founders with experience scaling teams"]
            .iter()
            .map(|t| InsightSummary {
                text: t.to_string(),
                provenance: InsightProvenance::Expert,
                source_ids: vec![],
            })
            .collect()
    }

    #[test]
    fn pool_reaches_exact_target_with_expected_rounds() {
        let (train, backend, lexicon) = setup(31);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 100, 31).unwrap();
        assert!(pool.is_complete());
        assert_eq!(pool.len(), 100);
        assert_eq!(pool.max_round(), 10);
        assert_eq!(pool.questions[0].id.as_str(), "q001");
        assert_eq!(pool.questions[99].id.as_str(), "q100");
        for q in &pool.questions {
            assert_eq!(q.stats.total(), SCORING_BATCH_SIZE as u32);
            assert!(!q.text.is_empty());
            assert_eq!(q.origin, QuestionOrigin::Llm);
        }
    }

    #[test]
    fn desk_scale_target_twenty_runs_two_rounds() {
        let (train, backend, lexicon) = setup(32);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 20, 32).unwrap();
        assert_eq!(pool.len(), 20);
        assert_eq!(pool.max_round(), 2);
    }

    #[test]
    fn pools_are_identical_across_runs_with_fixed_seed() {
        let run = || {
            let (train, backend, lexicon) = setup(33);
            let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
            builder.accumulate_pool(&train, &data_insights(), 50, 33).unwrap().to_jsonl(None)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn target_must_be_a_multiple_of_round_size() {
        let (train, backend, lexicon) = setup(34);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        assert!(matches!(
            builder.accumulate_pool(&train, &data_insights(), 25, 34),
            Err(QuestgenError::Config(_))
        ));
        assert!(matches!(
            builder.accumulate_pool(&train, &data_insights(), 0, 34),
            Err(QuestgenError::Config(_))
        ));
    }

    #[test]
    fn stats_reproduce_from_reanswering_the_same_batches() {
        let (train, backend, lexicon) = setup(35);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 30, 35).unwrap();

        let sampler = BatchSampler::new(&train, 35);
        for round in 1..=3u32 {
            let (_, eval_batch) = sampler.round_batches(round);
            let rendered: Vec<String> =
                eval_batch.iter().map(|p| render_profile(p, &lexicon).unwrap()).collect();
            let labels: Vec<bool> = eval_batch.iter().map(|p| p.label).collect();
            for q in pool.questions.iter().filter(|q| q.round == round) {
                let answers = backend.answer_batch(&q.text, &rendered).unwrap();
                assert_eq!(confusion(&answers, &labels).unwrap(), q.stats, "{}", q.id);
            }
        }
    }

    #[test]
    fn scoring_batches_consume_the_split_exactly_over_ten_rounds() {
        let (train, _, _) = setup(36);
        let sampler = BatchSampler::new(&train, 36);
        let mut seen = HashSet::new();
        for round in 1..=10u32 {
            let (gen_batch, eval_batch) = sampler.round_batches(round);
            assert_eq!(gen_batch.len(), GEN_BATCH_SIZE);
            assert_eq!(eval_batch.len(), SCORING_BATCH_SIZE);
            let eval_ids: HashSet<&str> = eval_batch.iter().map(|p| p.id.as_str()).collect();
            for p in &gen_batch {
                assert!(!eval_ids.contains(p.id.as_str()), "gen/eval overlap in round {round}");
            }
            for id in eval_ids {
                assert!(seen.insert(id.to_string()), "{id} scored twice within first pass");
            }
        }
        assert_eq!(seen.len(), 200);
    }

    /// Wraps a backend and records every prompt sent through it.
    struct Recording<'a> {
        inner: &'a MockOracle,
        prompts: Mutex<Vec<String>>,
    }

    impl crate::oracle::OracleBackend for Recording<'_> {
        fn complete(&self, prompt: &str) -> Result<String, OracleError> {
            self.prompts.lock().unwrap().push(prompt.to_string());
            self.inner.complete(prompt)
        }

        fn answer_batch(&self, q: &str, p: &[String]) -> Result<Vec<bool>, OracleError> {
            self.inner.answer_batch(q, p)
        }
    }

    #[test]
    fn feedback_prompt_embeds_exactly_the_previous_round() {
        let (train, inner, lexicon) = setup(37);
        let backend = Recording { inner: &inner, prompts: Mutex::new(Vec::new()) };
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 30, 37).unwrap();

        let prompts = backend.prompts.lock().unwrap();
        assert_eq!(prompts.len(), 3);
        let round1: Vec<&QuestionRecord> =
            pool.questions.iter().filter(|q| q.round == 1).collect();
        let round2: Vec<&QuestionRecord> =
            pool.questions.iter().filter(|q| q.round == 2).collect();
        for q in &round1 {
            assert!(prompts[1].contains(&q.text), "round-2 prompt missing {:?}", q.text);
        }
        for q in &round1 {
            assert!(!prompts[2].contains(&q.text), "round-3 prompt should not carry round 1");
        }
        for q in &round2 {
            assert!(prompts[2].contains(&q.text), "round-3 prompt missing {:?}", q.text);
        }
        assert!(prompts[1].contains("Number of founders predicted successful:"));
    }

    #[test]
    fn expert_injection_grows_pool_with_expert_origin() {
        let (train, backend, lexicon) = setup(38);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 100, 38).unwrap();
        let pool = builder
            .inject_expert_questions(pool, &train, &expert_insights(), 20, 38)
            .unwrap();
        assert_eq!(pool.len(), 120);
        assert_eq!(pool.target_size, 120);
        assert!(pool.is_complete());
        let experts: Vec<&QuestionRecord> =
            pool.questions.iter().filter(|q| q.origin == QuestionOrigin::Expert).collect();
        assert_eq!(experts.len(), 20);
        assert!(experts.iter().all(|q| q.round >= 11));
        assert_eq!(pool.questions[100].id.as_str(), "q101");
    }

    #[test]
    fn expert_injection_with_zero_count_is_identity() {
        let (train, backend, lexicon) = setup(39);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 20, 39).unwrap();
        let before = pool.clone();
        let after = builder
            .inject_expert_questions(pool, &train, &expert_insights(), 0, 39)
            .unwrap();
        assert_eq!(after, before);
    }

    #[test]
    fn expert_rounds_use_generation_prompts_with_expert_hints() {
        let (train, inner, lexicon) = setup(40);
        let backend = Recording { inner: &inner, prompts: Mutex::new(Vec::new()) };
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 10, 40).unwrap();
        builder.inject_expert_questions(pool, &train, &expert_insights(), 10, 40).unwrap();
        let prompts = backend.prompts.lock().unwrap();
        assert_eq!(prompts.len(), 2);
        assert!(prompts[1].contains("- founders with prior exits"));
        assert!(prompts[1].contains("- technical founders with experience scaling teams"));
    }

    struct FailingBackend {
        inner: MockOracle,
        fail_from_call: u32,
        calls: std::sync::atomic::AtomicU32,
    }

    impl crate::oracle::OracleBackend for FailingBackend {
        fn complete(&self, prompt: &str) -> Result<String, OracleError> {
            let n = self.calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            if n >= self.fail_from_call {
                return Err(OracleError::Transport("synthetic outage".into()));
            }
            self.inner.complete(prompt)
        }

        fn answer_batch(&self, q: &str, p: &[String]) -> Result<Vec<bool>, OracleError> {
            self.inner.answer_batch(q, p)
        }
    }

    #[test]
    fn failed_round_surfaces_partial_pool() {
        let (train, inner, lexicon) = setup(41);
        let backend = FailingBackend {
            inner,
            fail_from_call: 2,
            calls: std::sync::atomic::AtomicU32::new(0),
        };
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 2 };
        let err = builder.accumulate_pool(&train, &data_insights(), 50, 41).unwrap_err();
        match err {
            QuestgenError::RoundFailed { round, partial, .. } => {
                assert_eq!(round, 3);
                assert_eq!(partial.len(), 20);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pool_jsonl_round_trips_with_meta() {
        let (train, backend, lexicon) = setup(42);
        let builder = PoolBuilder { backend: &backend, lexicon: &lexicon, attempts: 3 };
        let pool = builder.accumulate_pool(&train, &data_insights(), 20, 42).unwrap();
        let meta = serde_json::json!({"artifact": "pool", "seed": 42});
        let text = pool.to_jsonl(Some(&meta));
        let (parsed_meta, parsed) = QuestionPool::from_jsonl(&text, 20).unwrap();
        assert_eq!(parsed_meta, Some(meta));
        assert_eq!(parsed, pool);
    }

    #[test]
    fn pool_jsonl_rejects_inconsistent_derived_metrics() {
        let line = r#"{"id":"q001","text":"Q?","round":1,"origin":"llm","stats":{"tp":1,"fp":1,"fn":0,"tn":18},"precision":0.9,"recall":1.0,"predicted_positive":2}"#;
        assert!(matches!(
            QuestionPool::from_jsonl(line, 10),
            Err(QuestgenError::MalformedPool(_))
        ));
    }
}
