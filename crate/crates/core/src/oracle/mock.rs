//! Deterministic offline backend.
//!
//! Every question the mock can generate is the rendering of a structured
//! predicate over profile fields: a single atom or a conjunction of two
//! atoms, where an atom compares a coded feature against a code or checks
//! keyword membership in a text section. A registry maps question text
//! back to its predicate, so `answer_batch` can evaluate any question
//! this backend has ever produced, including ones loaded from a pool file
//! written by an earlier run.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering};

use serde::Deserialize;

use crate::dataset::{FeatureLexicon, FounderProfile, TextField};
use crate::seeding::stream_rng;

use super::prompt::{FEEDBACK_PREAMBLE, GENERATION_PREAMBLE, INSIGHT_REQUEST};
use super::{OracleBackend, OracleError, QUESTIONS_PER_ROUND};

fn contains_ignore_case(haystack: &str, needle: &str) -> bool {
    haystack.to_ascii_lowercase().contains(&needle.to_ascii_lowercase())
}

/// One testable condition over a founder profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    CodedAtLeast { feature: String, code: u8 },
    CodedEquals { feature: String, code: u8 },
    Keyword { field: TextField, phrase: String },
}

impl Atom {
    /// Atoms in the same group never pair up in a conjunction.
    fn conflict_group(&self) -> &str {
        match self {
            Atom::CodedAtLeast { feature, .. } | Atom::CodedEquals { feature, .. } => feature,
            Atom::Keyword { phrase, .. } => phrase,
        }
    }

    pub fn eval_profile(&self, profile: &FounderProfile) -> bool {
        match self {
            Atom::CodedAtLeast { feature, code } => {
                profile.coded_features.get(feature).is_some_and(|c| c >= code)
            }
            Atom::CodedEquals { feature, code } => {
                profile.coded_features.get(feature) == Some(code)
            }
            Atom::Keyword { field, phrase } => {
                field.entries(profile).iter().any(|e| contains_ignore_case(e, phrase))
            }
        }
    }

    /// Evaluate against a rendered profile block. Coded atoms are
    /// recovered through the lexicon phrases; keyword atoms search the
    /// matching section line.
    pub fn eval_rendered(&self, rendered: &str, lexicon: &FeatureLexicon) -> bool {
        match self {
            Atom::CodedAtLeast { feature, code } => lexicon
                .phrases_at_least(feature, *code)
                .iter()
                .any(|phrase| rendered.contains(phrase)),
            Atom::CodedEquals { feature, code } => lexicon
                .phrase(feature, *code)
                .map(|phrase| rendered.contains(phrase))
                .unwrap_or(false),
            Atom::Keyword { field, phrase } => section_line(rendered, *field)
                .is_some_and(|line| contains_ignore_case(line, phrase)),
        }
    }
}

fn section_line(rendered: &str, field: TextField) -> Option<&str> {
    let prefix = format!("{}: ", field.section_label());
    rendered.lines().find_map(|line| line.strip_prefix(prefix.as_str()))
}

/// A question with its hidden evaluation rule: one or two atoms, all of
/// which must hold.
#[derive(Debug, Clone, PartialEq)]
pub struct MockPredicate {
    pub question_text: String,
    pub atoms: Vec<Atom>,
}

impl MockPredicate {
    pub fn eval_profile(&self, profile: &FounderProfile) -> bool {
        self.atoms.iter().all(|a| a.eval_profile(profile))
    }

    pub fn eval_rendered(&self, rendered: &str, lexicon: &FeatureLexicon) -> bool {
        self.atoms.iter().all(|a| a.eval_rendered(rendered, lexicon))
    }
}

/// One configurable template: an atom plus its question wording.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomTemplate {
    pub atom: Atom,
    /// Standalone question text.
    pub question: String,
    /// Verb-phrase fragment used when this atom joins a conjunction.
    pub clause: String,
}

/// The predicate template library behind the mock backend.
#[derive(Debug, Clone)]
pub struct TemplateLibrary {
    atoms: Vec<AtomTemplate>,
}

#[derive(Debug, Deserialize)]
struct RawLibrary {
    atoms: Vec<RawAtom>,
}

#[derive(Debug, Deserialize)]
struct RawAtom {
    kind: String,
    question: String,
    clause: String,
    feature: Option<String>,
    code: Option<u8>,
    field: Option<TextField>,
    phrase: Option<String>,
}

impl TemplateLibrary {
    pub fn new(atoms: Vec<AtomTemplate>) -> Self {
        Self { atoms }
    }

    pub fn atom_templates(&self) -> &[AtomTemplate] {
        &self.atoms
    }

    /// Parse a template config file listing atom templates.
    pub fn from_toml_str(text: &str) -> Result<Self, OracleError> {
        let raw: RawLibrary = toml::from_str(text)
            .map_err(|e| OracleError::Config(format!("template library: {e}")))?;
        let mut atoms = Vec::with_capacity(raw.atoms.len());
        for (i, a) in raw.atoms.into_iter().enumerate() {
            let missing = |what: &str| {
                OracleError::Config(format!("template {i}: kind {:?} needs {what}", a.kind))
            };
            let atom = match a.kind.as_str() {
                "coded_at_least" => Atom::CodedAtLeast {
                    feature: a.feature.clone().ok_or_else(|| missing("feature"))?,
                    code: a.code.ok_or_else(|| missing("code"))?,
                },
                "coded_equals" => Atom::CodedEquals {
                    feature: a.feature.clone().ok_or_else(|| missing("feature"))?,
                    code: a.code.ok_or_else(|| missing("code"))?,
                },
                "keyword" => Atom::Keyword {
                    field: a.field.ok_or_else(|| missing("field"))?,
                    phrase: a.phrase.clone().ok_or_else(|| missing("phrase"))?,
                },
                other => {
                    return Err(OracleError::Config(format!(
                        "template {i}: unknown kind {other:?}"
                    )))
                }
            };
            atoms.push(AtomTemplate { atom, question: a.question, clause: a.clause });
        }
        Ok(Self { atoms })
    }

    /// All predicates this library can produce: every single atom, then
    /// every cross-group pair. Singles come first so early rounds sample
    /// broad questions and later rounds composite ones.
    pub fn expand(&self) -> Vec<MockPredicate> {
        let mut predicates: Vec<MockPredicate> = self
            .atoms
            .iter()
            .map(|t| MockPredicate { question_text: t.question.clone(), atoms: vec![t.atom.clone()] })
            .collect();
        for i in 0..self.atoms.len() {
            for j in (i + 1)..self.atoms.len() {
                let (a, b) = (&self.atoms[i], &self.atoms[j]);
                if a.atom.conflict_group() == b.atom.conflict_group() {
                    continue;
                }
                predicates.push(MockPredicate {
                    question_text: format!(
                        "Is it true that the founder {} and also {}?",
                        a.clause, b.clause
                    ),
                    atoms: vec![a.atom.clone(), b.atom.clone()],
                });
            }
        }
        predicates
    }

    /// The default library: three comparison atoms per builtin coded
    /// feature, plus keyword atoms over the text sections.
    pub fn builtin() -> Self {
        let mut atoms = Vec::new();
        let mut coded = |feature: &str, code: u8, at_least: bool, question: &str, clause: &str| {
            let atom = if at_least {
                Atom::CodedAtLeast { feature: feature.to_string(), code }
            } else {
                Atom::CodedEquals { feature: feature.to_string(), code }
            };
            atoms.push(AtomTemplate {
                atom,
                question: question.to_string(),
                clause: clause.to_string(),
            });
        };

        coded("technical_degree_level", 1, true,
            "Does the founder hold a technical degree?",
            "holds a technical degree");
        coded("technical_degree_level", 2, false,
            "Does the founder hold an advanced technical degree?",
            "holds an advanced technical degree");
        coded("technical_degree_level", 0, false,
            "Does the founder lack formal technical education?",
            "lacks formal technical education");

        coded("leadership_roles_count", 1, true,
            "Has the founder held a senior leadership role?",
            "has held a senior leadership role");
        coded("leadership_roles_count", 2, false,
            "Has the founder held multiple senior leadership roles?",
            "has held multiple senior leadership roles");
        coded("leadership_roles_count", 0, false,
            "Has the founder never held a formal leadership role?",
            "has never held a formal leadership role");

        coded("fundraising_experience_level", 1, true,
            "Has the founder raised institutional funding before?",
            "has raised institutional funding before");
        coded("fundraising_experience_level", 2, false,
            "Has the founder raised multiple funding rounds?",
            "has raised multiple funding rounds");
        coded("fundraising_experience_level", 0, false,
            "Has the founder never raised institutional funding?",
            "has never raised institutional funding");

        coded("prior_founder_roles_count", 1, true,
            "Has the founder started a company before?",
            "has started a company before");
        coded("prior_founder_roles_count", 2, false,
            "Has the founder founded several companies before?",
            "has founded several companies before");
        coded("prior_founder_roles_count", 0, false,
            "Is this the founder's first venture?",
            "is on their first venture");

        coded("press_media_coverage_count", 1, true,
            "Has the founder received press or media coverage?",
            "has received press or media coverage");
        coded("press_media_coverage_count", 2, false,
            "Has the founder received high press or media coverage?",
            "has received high press or media coverage");
        coded("press_media_coverage_count", 0, false,
            "Does the founder lack significant press coverage?",
            "lacks significant press coverage");

        coded("publication_count", 1, true,
            "Does the founder have academic publications?",
            "has academic publications");
        coded("publication_count", 2, false,
            "Does the founder have an extensive publication record?",
            "has an extensive publication record");
        coded("publication_count", 0, false,
            "Does the founder have no academic publications?",
            "has no academic publications");

        coded("patent_count", 1, true,
            "Does the founder hold at least one patent?",
            "holds at least one patent");
        coded("patent_count", 2, false,
            "Does the founder hold a sizable patent portfolio?",
            "holds a sizable patent portfolio");
        coded("patent_count", 0, false,
            "Does the founder hold no patents?",
            "holds no patents");

        coded("online_presence_score", 1, true,
            "Does the founder maintain a professional online presence?",
            "maintains a professional online presence");
        coded("online_presence_score", 2, false,
            "Does the founder have a strong online presence?",
            "has a strong online presence");
        coded("online_presence_score", 0, false,
            "Does the founder have minimal online presence?",
            "has minimal online presence");

        let mut keyword = |field: TextField, phrase: &str, question: &str, clause: &str| {
            atoms.push(AtomTemplate {
                atom: Atom::Keyword { field, phrase: phrase.to_string() },
                question: question.to_string(),
                clause: clause.to_string(),
            });
        };

        keyword(TextField::WorkHistory, "venture capital",
            "Has the founder worked at a venture capital or private equity firm?",
            "has worked at a venture capital firm");
        keyword(TextField::PreviousCompanies, "acquired",
            "Has the founder previously built a company that was acquired?",
            "has built a company that was acquired");
        keyword(TextField::Education, "top-ranked",
            "Did the founder graduate from a top-ranked university?",
            "graduated from a top-ranked university");
        keyword(TextField::WorkHistory, "global technology",
            "Has the founder worked at a large global technology company?",
            "has worked at a large global technology company");
        keyword(TextField::WorkHistory, "non-profit",
            "Has the founder been involved with a non-profit organization?",
            "has been involved with a non-profit organization");
        keyword(TextField::WorkHistory, "marketing",
            "Does the founder have a marketing background?",
            "has a marketing background");

        Self { atoms }
    }
}

/// Sample one round's worth of predicates from the expanded pool:
/// without replacement across rounds until the pool is exhausted, then
/// reshuffled for another pass.
pub fn mock_generate<'a>(
    seed: u64,
    round: u32,
    pool: &'a [MockPredicate],
) -> Result<Vec<&'a MockPredicate>, OracleError> {
    if round == 0 {
        return Err(OracleError::Config("rounds are numbered from 1".into()));
    }
    if pool.len() < QUESTIONS_PER_ROUND {
        return Err(OracleError::Config(format!(
            "template pool has {} predicates; need at least {QUESTIONS_PER_ROUND}",
            pool.len()
        )));
    }
    let start = (round as usize - 1) * QUESTIONS_PER_ROUND;
    let mut cached: Option<(u64, Vec<usize>)> = None;
    let mut out = Vec::with_capacity(QUESTIONS_PER_ROUND);
    for k in 0..QUESTIONS_PER_ROUND {
        let global = start + k;
        let cycle = (global / pool.len()) as u64;
        let offset = global % pool.len();
        if cached.as_ref().map(|(c, _)| *c) != Some(cycle) {
            cached = Some((cycle, cycle_permutation(seed, cycle, pool)));
        }
        let (_, perm) = cached.as_ref().unwrap();
        out.push(&pool[perm[offset]]);
    }
    Ok(out)
}

/// Shuffle singles and conjunctions separately, keeping singles first.
fn cycle_permutation(seed: u64, cycle: u64, pool: &[MockPredicate]) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let (mut singles, mut pairs): (Vec<usize>, Vec<usize>) =
        (0..pool.len()).partition(|&i| pool[i].atoms.len() == 1);
    let mut rng = stream_rng(seed, 0x6D6F_636B ^ cycle);
    singles.shuffle(&mut rng);
    pairs.shuffle(&mut rng);
    singles.extend(pairs);
    singles
}

const INSIGHT_POOL: [&str; 10] = [
    "Many of these founders pair a technical degree with prior fundraising experience.",
    "Several founders in this group had already started a company before this venture.",
    "Time spent at a venture capital firm appears repeatedly in this group.",
    "Founders in this group often combine senior leadership roles with multiple funding rounds.",
    "A previous company sale shows up more than once among these founders.",
    "Graduates of top-ranked universities are common in this group.",
    "Strong online presence paired with press coverage appears in several profiles.",
    "Patents and academic publications appear occasionally but not consistently.",
    "Operating experience at large technology companies shows up in a few profiles.",
    "Founders with several earlier companies tend to also have raised institutional funding.",
];

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Offline oracle: generates questions by sampling its template pool and
/// answers them by evaluating the hidden predicates on rendered profiles.
pub struct MockOracle {
    seed: u64,
    lexicon: FeatureLexicon,
    predicates: Vec<MockPredicate>,
    registry: HashMap<String, usize>,
    generation_calls: AtomicU32,
}

impl MockOracle {
    pub fn new(
        seed: u64,
        library: &TemplateLibrary,
        lexicon: FeatureLexicon,
    ) -> Result<Self, OracleError> {
        let predicates = library.expand();
        if predicates.len() < QUESTIONS_PER_ROUND {
            return Err(OracleError::Config(format!(
                "template library expands to {} predicates; need at least {QUESTIONS_PER_ROUND}",
                predicates.len()
            )));
        }
        let mut registry = HashMap::with_capacity(predicates.len());
        for (i, p) in predicates.iter().enumerate() {
            if registry.insert(p.question_text.clone(), i).is_some() {
                return Err(OracleError::Config(format!(
                    "duplicate question text in template library: {:?}",
                    p.question_text
                )));
            }
        }
        Ok(Self { seed, lexicon, predicates, registry, generation_calls: AtomicU32::new(0) })
    }

    pub fn predicate_for(&self, question: &str) -> Option<&MockPredicate> {
        self.registry.get(question).map(|&i| &self.predicates[i])
    }

    pub fn predicates(&self) -> &[MockPredicate] {
        &self.predicates
    }

    fn insight_lines(&self, prompt: &str, count: usize) -> String {
        let start = (fnv1a(prompt) % INSIGHT_POOL.len() as u64) as usize;
        (0..count)
            .map(|k| INSIGHT_POOL[(start + k) % INSIGHT_POOL.len()])
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn parse_insight_request(prompt: &str) -> Option<usize> {
    let tail = &prompt[prompt.find(INSIGHT_REQUEST)? + INSIGHT_REQUEST.len()..];
    let digits: String =
        tail.trim_start().chars().take_while(char::is_ascii_digit).collect();
    digits.parse().ok()
}

impl OracleBackend for MockOracle {
    fn complete(&self, prompt: &str) -> Result<String, OracleError> {
        if prompt.starts_with(GENERATION_PREAMBLE) || prompt.starts_with(FEEDBACK_PREAMBLE) {
            let round = self.generation_calls.fetch_add(1, Ordering::SeqCst) + 1;
            let sampled = mock_generate(self.seed, round, &self.predicates)?;
            return Ok(sampled
                .iter()
                .map(|p| p.question_text.as_str())
                .collect::<Vec<_>>()
                .join("\n"));
        }
        if let Some(count) = parse_insight_request(prompt) {
            return Ok(self.insight_lines(prompt, count));
        }
        let head: String = prompt.chars().take(60).collect();
        Err(OracleError::UnsupportedPrompt(head))
    }

    fn answer_batch(&self, question: &str, profiles: &[String]) -> Result<Vec<bool>, OracleError> {
        let predicate = self
            .predicate_for(question)
            .ok_or_else(|| OracleError::UnknownQuestion(question.to_string()))?;
        Ok(profiles.iter().map(|p| predicate.eval_rendered(p, &self.lexicon)).collect())
    }
}
