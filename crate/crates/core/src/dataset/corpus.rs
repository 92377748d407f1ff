//! Builtin profile corpus: the coded-feature lexicon, free-text pools,
//! and the default planted-signal specification.
//!
//! Signal keyword phrases are the only corpus strings containing their
//! keyword, so substring checks on rendered profiles recover a signal
//! exactly. Keep that property when editing pools.

use super::{FeatureLexicon, PlantedSignal, SignalEffect, TextField};

/// Coded features the generator emits, with one phrase per code.
/// Every generated profile carries all of these.
pub(crate) const LEXICON_TABLE: &[(&str, [&str; 3])] = &[
    (
        "fundraising_experience_level",
        [
            "Has never raised institutional funding.",
            "Has raised a seed or angel round.",
            "Has raised multiple institutional funding rounds.",
        ],
    ),
    (
        "leadership_roles_count",
        [
            "Has not held formal leadership roles.",
            "Has held one senior leadership role.",
            "Has held multiple senior leadership roles.",
        ],
    ),
    (
        "online_presence_score",
        [
            "Minimal professional online presence.",
            "Average professional online presence.",
            "Strong professional online presence.",
        ],
    ),
    (
        "patent_count",
        [
            "Holds no patents.",
            "Holds at least one patent.",
            "Holds a sizable patent portfolio.",
        ],
    ),
    (
        "press_media_coverage_count",
        [
            "No significant press or media coverage.",
            "Moderate press or media coverage.",
            "High press or media coverage.",
        ],
    ),
    (
        "prior_founder_roles_count",
        [
            "First-time founder with no earlier ventures.",
            "Has founded one earlier company.",
            "Has founded several earlier companies.",
        ],
    ),
    (
        "publication_count",
        [
            "No academic publications.",
            "A handful of academic publications.",
            "Extensive academic publications.",
        ],
    ),
    (
        "technical_degree_level",
        [
            "No formal technical education.",
            "Holds a technical undergraduate degree.",
            "Holds an advanced technical degree.",
        ],
    ),
];

pub(crate) const EDUCATION_POOL: &[&str] = &[
    "BA in Economics from a state university",
    "BSc in Biology from a public research university",
    "MBA from a regional business school",
    "BA in History from a liberal arts college",
    "MSc in Management from a European business school",
    "BSc in Mathematics from a mid-tier university",
];

pub(crate) const WORK_POOL: &[&str] = &[
    "Product manager at a mid-size software company",
    "Operations lead at a healthcare services firm",
    "Consultant at a management consulting firm",
    "Software engineer at an enterprise SaaS vendor",
    "Account executive at a media agency",
    "Data analyst at an insurance company",
];

pub(crate) const PREVIOUS_POOL: &[&str] = &[
    "Co-founded a small e-commerce storefront that wound down",
    "Launched a mobile app studio as a side project",
    "Started a boutique consulting practice",
];

/// Signal keyword phrases. Each keyword below appears in exactly one
/// corpus string.
pub const PHRASE_TOP_UNIVERSITY: &str = "MSc from a top-ranked research university";
pub const PHRASE_VENTURE_CAPITAL: &str =
    "Associate at a venture capital firm evaluating early-stage startups";
pub const PHRASE_PRIOR_EXIT: &str =
    "Founded a software company that was acquired by a larger competitor";

/// Label-independent keyword phrases, planted at the same rate in both
/// classes so questions about them hover at the base-rate precision.
pub(crate) const NOISE_KEYWORDS: &[(TextField, &str, f64)] = &[
    (TextField::WorkHistory, "Senior engineer at a large global technology company", 0.35),
    (TextField::WorkHistory, "Volunteer organizer at a community non-profit", 0.25),
    (TextField::WorkHistory, "Marketing manager at a consumer goods brand", 0.30),
];

/// Code distribution for coded features not claimed by any signal,
/// identical for successful and unsuccessful founders.
pub(crate) const NOISE_CODE_WEIGHTS: [f64; 3] = [0.5, 0.3, 0.2];

impl FeatureLexicon {
    /// The lexicon covering every feature the generator emits.
    pub fn builtin() -> Self {
        let mut lex = FeatureLexicon::empty();
        for (feature, phrases) in LEXICON_TABLE {
            for (code, phrase) in phrases.iter().enumerate() {
                lex.insert(feature, code as u8, phrase);
            }
        }
        lex
    }
}

/// Default planted signals. Conditional rates are chosen so each
/// signal-recovering question sits in the 0.15..0.30 precision band at a
/// 10% base rate (see [`PlantedSignal::analytic_precision`]).
pub fn default_signals() -> Vec<PlantedSignal> {
    let coded = |name: &str, feature: &str, p_success: f64, p_failure: f64| PlantedSignal {
        name: name.to_string(),
        p_success,
        p_failure,
        effect: SignalEffect::CodedFeature { feature: feature.to_string() },
    };
    let keyword = |name: &str, field: TextField, phrase: &str, p_success: f64, p_failure: f64| {
        PlantedSignal {
            name: name.to_string(),
            p_success,
            p_failure,
            effect: SignalEffect::Keyword { field, phrase: phrase.to_string() },
        }
    };
    vec![
        coded("technical_background", "technical_degree_level", 0.65, 0.28),
        coded("leadership_track", "leadership_roles_count", 0.60, 0.25),
        coded("fundraising_track", "fundraising_experience_level", 0.50, 0.20),
        coded("serial_founder", "prior_founder_roles_count", 0.55, 0.18),
        keyword("venture_capital_stint", TextField::WorkHistory, PHRASE_VENTURE_CAPITAL, 0.50, 0.16),
        keyword("prior_exit", TextField::PreviousCompanies, PHRASE_PRIOR_EXIT, 0.55, 0.15),
        keyword("elite_education", TextField::Education, PHRASE_TOP_UNIVERSITY, 0.50, 0.22),
    ]
}
