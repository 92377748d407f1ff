//! Founder records, synthetic dataset generation, profile rendering, and
//! the insight summaries that seed question generation.
//!
//! The generator plants configurable latent signals: each signal fires
//! with one probability for successful founders and another for
//! unsuccessful ones, and manifests either as a coded feature or as a
//! keyword phrase in a free-text section. Everything downstream of the
//! seed is deterministic, so two runs with the same config produce
//! byte-identical splits.

mod corpus;

pub use corpus::{default_signals, PHRASE_PRIOR_EXIT, PHRASE_TOP_UNIVERSITY, PHRASE_VENTURE_CAPITAL};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{self, OracleBackend, OracleError};
use crate::seeding::stream_rng;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid synthesis config: {0}")]
    Config(String),
    #[error("no phrase for feature {feature:?} code {code}")]
    UnknownFeatureCode { feature: String, code: u8 },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no descriptors found in {0} after filtering comments and blanks")]
    EmptyDescriptors(String),
    #[error("malformed record: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Opaque founder identifier, unique within a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FounderId(String);

impl FounderId {
    pub fn new(id: String) -> Self {
        Self(id)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FounderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One founder record. The label is assigned at generation time and never
/// rewritten by any pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FounderProfile {
    pub id: FounderId,
    pub education: Vec<String>,
    pub work_history: Vec<String>,
    pub previous_companies: Vec<String>,
    pub coded_features: BTreeMap<String, u8>,
    pub label: bool,
}

/// Free-text sections of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextField {
    Education,
    WorkHistory,
    PreviousCompanies,
}

impl TextField {
    pub fn entries<'a>(&self, profile: &'a FounderProfile) -> &'a [String] {
        match self {
            TextField::Education => &profile.education,
            TextField::WorkHistory => &profile.work_history,
            TextField::PreviousCompanies => &profile.previous_companies,
        }
    }

    /// Label used in rendered profiles.
    pub fn section_label(&self) -> &'static str {
        match self {
            TextField::Education => "Education",
            TextField::WorkHistory => "Work History",
            TextField::PreviousCompanies => "Previous Companies",
        }
    }
}

/// Maps (feature, code) pairs to the natural-language phrase embedded in
/// rendered profiles.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureLexicon {
    entries: BTreeMap<String, BTreeMap<u8, String>>,
}

impl FeatureLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, feature: &str, code: u8, phrase: &str) {
        self.entries.entry(feature.to_string()).or_default().insert(code, phrase.to_string());
    }

    pub fn phrase(&self, feature: &str, code: u8) -> Result<&str, DatasetError> {
        self.entries
            .get(feature)
            .and_then(|codes| codes.get(&code))
            .map(String::as_str)
            .ok_or_else(|| DatasetError::UnknownFeatureCode { feature: feature.to_string(), code })
    }

    pub fn has_feature(&self, feature: &str) -> bool {
        self.entries.contains_key(feature)
    }

    /// Phrases for every code of `feature` that is `>= code`.
    pub fn phrases_at_least(&self, feature: &str, code: u8) -> Vec<&str> {
        self.entries
            .get(feature)
            .map(|codes| {
                codes.range(code..).map(|(_, phrase)| phrase.as_str()).collect::<Vec<_>>()
            })
            .unwrap_or_default()
    }

    /// Parse a lexicon config file: one table per feature, keyed by code.
    pub fn from_toml_str(text: &str) -> Result<Self, DatasetError> {
        let raw: BTreeMap<String, BTreeMap<String, String>> =
            toml::from_str(text).map_err(|e| DatasetError::Config(format!("lexicon: {e}")))?;
        let mut lex = Self::empty();
        for (feature, codes) in raw {
            for (code, phrase) in codes {
                let code: u8 = code.parse().map_err(|_| {
                    DatasetError::Config(format!("lexicon: feature {feature:?} has non-numeric code {code:?}"))
                })?;
                lex.insert(&feature, code, &phrase);
            }
        }
        Ok(lex)
    }
}

/// How a planted signal shows up in a profile when it fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalEffect {
    /// Fired founders get code 1 or 2 for this feature; others get 0.
    CodedFeature { feature: String },
    /// Fired founders get this phrase appended to a text section.
    Keyword { field: TextField, phrase: String },
}

/// A latent boolean trait with class-conditional firing rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSignal {
    pub name: String,
    /// P(signal fires | founder successful)
    pub p_success: f64,
    /// P(signal fires | founder unsuccessful)
    pub p_failure: f64,
    #[serde(flatten)]
    pub effect: SignalEffect,
}

impl PlantedSignal {
    /// Expected precision of the question "did this signal fire?" at the
    /// given base rate, by Bayes' rule.
    pub fn analytic_precision(&self, base_rate: f64) -> f64 {
        let hit = base_rate * self.p_success;
        let miss = (1.0 - base_rate) * self.p_failure;
        hit / (hit + miss)
    }

    /// Whether the signal's observable effect is present in a profile.
    pub fn present_in(&self, profile: &FounderProfile) -> bool {
        match &self.effect {
            SignalEffect::CodedFeature { feature } => {
                profile.coded_features.get(feature).is_some_and(|&c| c >= 1)
            }
            SignalEffect::Keyword { field, phrase } => {
                field.entries(profile).iter().any(|e| e.contains(phrase))
            }
        }
    }
}

/// Synthetic dataset parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Multiplies the base split sizes of 200/500/500.
    pub scale: u32,
    pub signals: Vec<PlantedSignal>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { scale: 1, signals: default_signals() }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(), DatasetError> {
        if self.scale == 0 {
            return Err(DatasetError::Config("scale factor must be >= 1".into()));
        }
        let builtin = FeatureLexicon::builtin();
        let mut claimed_features = std::collections::HashSet::new();
        let mut claimed_phrases = std::collections::HashSet::new();
        for signal in &self.signals {
            for (label, p) in [("p_success", signal.p_success), ("p_failure", signal.p_failure)] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(DatasetError::Config(format!(
                        "signal {:?}: {label} = {p} is not a probability",
                        signal.name
                    )));
                }
            }
            match &signal.effect {
                SignalEffect::CodedFeature { feature } => {
                    if !builtin.has_feature(feature) {
                        return Err(DatasetError::Config(format!(
                            "signal {:?} targets unknown coded feature {feature:?}",
                            signal.name
                        )));
                    }
                    if !claimed_features.insert(feature.clone()) {
                        return Err(DatasetError::Config(format!(
                            "coded feature {feature:?} claimed by more than one signal"
                        )));
                    }
                }
                SignalEffect::Keyword { phrase, .. } => {
                    if phrase.trim().is_empty() {
                        return Err(DatasetError::Config(format!(
                            "signal {:?} has an empty keyword phrase",
                            signal.name
                        )));
                    }
                    if !claimed_phrases.insert(phrase.clone()) {
                        return Err(DatasetError::Config(format!(
                            "keyword phrase {phrase:?} claimed by more than one signal"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The three dataset splits. Base sizes are 200/500/500 founders with
/// 100/50/50 successes, multiplied by the configured scale.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<FounderProfile>,
    pub validation: Vec<FounderProfile>,
    pub test: Vec<FounderProfile>,
}

impl DatasetSplit {
    pub fn split(&self, kind: SplitKind) -> &[FounderProfile] {
        match kind {
            SplitKind::Train => &self.train,
            SplitKind::Validation => &self.validation,
            SplitKind::Test => &self.test,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Train,
    Validation,
    Test,
}

impl SplitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitKind::Train => "train",
            SplitKind::Validation => "validation",
            SplitKind::Test => "test",
        }
    }
}

impl std::str::FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(SplitKind::Train),
            "validation" => Ok(SplitKind::Validation),
            "test" => Ok(SplitKind::Test),
            other => Err(format!("unknown split {other:?} (expected train/validation/test)")),
        }
    }
}

/// Generate the three splits deterministically from (config, seed).
pub fn generate_synthetic_dataset(
    config: &SynthConfig,
    seed: u64,
) -> Result<DatasetSplit, DatasetError> {
    config.validate()?;
    let scale = config.scale as usize;
    let sized = |base: usize| {
        base.checked_mul(scale)
            .ok_or_else(|| DatasetError::Config(format!("split size {base} x {scale} overflows")))
    };
    let plan = [
        (SplitKind::Train, sized(200)?, sized(100)?, 1u64),
        (SplitKind::Validation, sized(500)?, sized(50)?, 2),
        (SplitKind::Test, sized(500)?, sized(50)?, 3),
    ];

    let mut next_id: u64 = 1;
    let mut splits = Vec::with_capacity(3);
    for (_, total, positives, stream) in plan {
        let mut rng = stream_rng(seed, stream);
        let mut labels = vec![true; positives];
        labels.resize(total, false);
        labels.shuffle(&mut rng);
        let profiles = labels
            .iter()
            .map(|&label| {
                let id = FounderId::new(format!("F{next_id:06}"));
                next_id += 1;
                synth_profile(&mut rng, id, label, config)
            })
            .collect::<Vec<_>>();
        splits.push(profiles);
    }
    let mut it = splits.into_iter();
    Ok(DatasetSplit {
        train: it.next().unwrap(),
        validation: it.next().unwrap(),
        test: it.next().unwrap(),
    })
}

fn weighted_code(rng: &mut impl Rng, weights: &[f64; 3]) -> u8 {
    let u: f64 = rng.random();
    if u < weights[0] {
        0
    } else if u < weights[0] + weights[1] {
        1
    } else {
        2
    }
}

fn pick_entries(rng: &mut impl Rng, pool: &[&str], count: usize) -> Vec<String> {
    rand::seq::index::sample(rng, pool.len(), count.min(pool.len()))
        .iter()
        .map(|i| pool[i].to_string())
        .collect()
}

fn synth_profile(
    rng: &mut impl Rng,
    id: FounderId,
    label: bool,
    config: &SynthConfig,
) -> FounderProfile {
    let fired: Vec<bool> = config
        .signals
        .iter()
        .map(|s| rng.random_bool(if label { s.p_success } else { s.p_failure }))
        .collect();

    let coded_signal = |feature: &str| {
        config.signals.iter().zip(&fired).find_map(|(s, &f)| match &s.effect {
            SignalEffect::CodedFeature { feature: target } if target == feature => Some(f),
            _ => None,
        })
    };

    let mut coded_features = BTreeMap::new();
    for (feature, _) in corpus::LEXICON_TABLE {
        let code = match coded_signal(feature) {
            Some(true) => rng.random_range(1..=2),
            Some(false) => 0,
            None => weighted_code(rng, &corpus::NOISE_CODE_WEIGHTS),
        };
        coded_features.insert(feature.to_string(), code);
    }

    let education_count = 1 + usize::from(rng.random_bool(0.5));
    let mut education = pick_entries(rng, corpus::EDUCATION_POOL, education_count);
    let work_count = 1 + usize::from(rng.random_bool(0.5));
    let mut work_history = pick_entries(rng, corpus::WORK_POOL, work_count);
    let prev_count = weighted_code(rng, &[0.35, 0.45, 0.20]) as usize;
    let mut previous_companies = pick_entries(rng, corpus::PREVIOUS_POOL, prev_count);

    for (signal, &f) in config.signals.iter().zip(&fired) {
        if !f {
            continue;
        }
        if let SignalEffect::Keyword { field, phrase } = &signal.effect {
            let target = match field {
                TextField::Education => &mut education,
                TextField::WorkHistory => &mut work_history,
                TextField::PreviousCompanies => &mut previous_companies,
            };
            target.push(phrase.clone());
        }
    }
    for (field, phrase, p) in corpus::NOISE_KEYWORDS {
        if rng.random_bool(*p) {
            let target = match field {
                TextField::Education => &mut education,
                TextField::WorkHistory => &mut work_history,
                TextField::PreviousCompanies => &mut previous_companies,
            };
            target.push(phrase.to_string());
        }
    }

    FounderProfile { id, education, work_history, previous_companies, coded_features, label }
}

fn render_section(label: &str, entries: &[String]) -> String {
    if entries.is_empty() {
        format!("{label}: None.")
    } else {
        format!("{label}: {}", entries.join("; "))
    }
}

/// Render a profile as the multi-line natural-language block embedded in
/// prompts: the three text sections plus one lexicon phrase per coded
/// feature. Empty sections render an explicit "None." so prompts keep a
/// stable shape.
pub fn render_profile(
    profile: &FounderProfile,
    lexicon: &FeatureLexicon,
) -> Result<String, DatasetError> {
    let mut notes = Vec::with_capacity(profile.coded_features.len());
    for (feature, &code) in &profile.coded_features {
        notes.push(lexicon.phrase(feature, code)?.to_string());
    }
    let notes_line = if notes.is_empty() {
        "Notes: None.".to_string()
    } else {
        format!("Notes: {}", notes.join(" "))
    };
    Ok(format!(
        "{}\n{}\n{}\n{}",
        render_section("Education", &profile.education),
        render_section("Work History", &profile.work_history),
        render_section("Previous Companies", &profile.previous_companies),
        notes_line,
    ))
}

/// A short natural-language pattern used as a question-generation hint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightSummary {
    pub text: String,
    pub provenance: InsightProvenance,
    pub source_ids: Vec<FounderId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsightProvenance {
    DataDerived,
    Expert,
}

/// Sample groups of successful founders and ask the oracle to distill
/// qualitative patterns from each group.
#[allow(clippy::too_many_arguments)]
pub fn sample_insight_summaries(
    successful: &[FounderProfile],
    group_size: usize,
    rules_per_group: usize,
    groups: usize,
    backend: &dyn OracleBackend,
    lexicon: &FeatureLexicon,
    seed: u64,
    retries: u32,
) -> Result<Vec<InsightSummary>, DatasetError> {
    if groups == 0 {
        return Ok(Vec::new());
    }
    if successful.len() < group_size {
        return Err(DatasetError::Config(format!(
            "need at least {group_size} successful founders, have {}",
            successful.len()
        )));
    }
    if rules_per_group == 0 {
        return Err(DatasetError::Config("rules_per_group must be >= 1".into()));
    }

    let mut summaries = Vec::with_capacity(groups * rules_per_group);
    for group in 0..groups {
        let mut rng = stream_rng(seed, 0x1000 + group as u64);
        let indices = rand::seq::index::sample(&mut rng, successful.len(), group_size);
        let members: Vec<&FounderProfile> = indices.iter().map(|i| &successful[i]).collect();
        let rendered = members
            .iter()
            .map(|p| render_profile(p, lexicon))
            .collect::<Result<Vec<_>, _>>()?;
        let prompt = oracle::build_insight_prompt(&rendered, rules_per_group);
        let texts = oracle::request_lines(backend, &prompt, rules_per_group, retries)?;
        let source_ids: Vec<FounderId> = members.iter().map(|p| p.id.clone()).collect();
        summaries.extend(texts.into_iter().map(|text| InsightSummary {
            text,
            provenance: InsightProvenance::DataDerived,
            source_ids: source_ids.clone(),
        }));
    }
    Ok(summaries)
}

/// Load expert descriptors from a plain-text file: one descriptor per
/// line, blank lines and `#` comments skipped, whitespace trimmed.
pub fn load_expert_descriptors(path: &Path) -> Result<Vec<InsightSummary>, DatasetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    let descriptors: Vec<InsightSummary> = text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| InsightSummary {
            text: line.to_string(),
            provenance: InsightProvenance::Expert,
            source_ids: Vec::new(),
        })
        .collect();
    if descriptors.is_empty() {
        return Err(DatasetError::EmptyDescriptors(path.display().to_string()));
    }
    Ok(descriptors)
}

/// Serialize profiles as line-delimited JSON, optionally preceded by a
/// meta line carrying provenance.
pub fn profiles_to_jsonl(
    profiles: &[FounderProfile],
    meta: Option<&serde_json::Value>,
) -> String {
    let mut out = String::new();
    if let Some(meta) = meta {
        out.push_str(&meta.to_string());
        out.push('\n');
    }
    for p in profiles {
        out.push_str(&serde_json::to_string(p).expect("profile serializes"));
        out.push('\n');
    }
    out
}

/// Parse the format written by [`profiles_to_jsonl`].
pub fn profiles_from_jsonl(
    text: &str,
) -> Result<(Option<serde_json::Value>, Vec<FounderProfile>), DatasetError> {
    let mut meta = None;
    let mut profiles = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            let value: serde_json::Value = serde_json::from_str(line)?;
            if value.get("id").is_none() {
                meta = Some(value);
                continue;
            }
        }
        profiles.push(serde_json::from_str(line)?);
    }
    Ok((meta, profiles))
}
