//! Prompt builders for the three prompt kinds: question generation,
//! question evaluation over a founder batch, and feedback-informed
//! regeneration. All builders are deterministic string assembly.

use super::OracleError;

pub(crate) const GENERATION_PREAMBLE: &str = "You are a venture capital analyst specializing in evaluating startup founders. Your task is to generate clear, objective YES/NO questions that could help assess a founder's likelihood of success. Your questions should be simple, interpretable and grounded in observable traits such as academic background, job roles, or industry experience.";

pub(crate) const EVALUATION_PREAMBLE: &str = "You are a VC analyst that evaluates startup founders.\nYour task is to assess whether the following question applies to each founder, based on their background information.\nFor each founder, respond simply with Yes or No.";

pub(crate) const FEEDBACK_PREAMBLE: &str =
    "Based on our testing of evaluation questions on founders, generate 10 new YES/NO questions.";

const OUTPUT_INSTRUCTION: &str = "Please return 10 YES/NO questions, one per line. Do not include explanations or formatting.\nExample question: Has the founder previously worked at a well-known tech company?";

pub(crate) const INSIGHT_REQUEST: &str = "Summarize exactly";

/// Scored performance of one question on its evaluation batch, as
/// embedded in feedback prompts.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionPerformance {
    pub text: String,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub predicted_positive: usize,
    pub batch_size: usize,
}

fn numbered_profiles(out: &mut String, profiles: &[String]) {
    for (i, profile) in profiles.iter().enumerate() {
        out.push_str(&format!("Founder {}:\n{}\n\n", i + 1, profile));
    }
}

/// Percentage with at most one decimal place: 0.134 -> "13.4%", 0.08 -> "8%".
fn format_pct(value: f64) -> String {
    let tenths = (value * 1000.0).round() / 10.0;
    if tenths.fract() == 0.0 {
        format!("{}%", tenths as i64)
    } else {
        format!("{tenths:.1}%")
    }
}

fn format_pct_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), format_pct)
}

/// Prompt asking for a fresh round of questions, guided by example
/// founder profiles and optional insight hints.
pub fn build_generation_prompt(profiles: &[String], hints: &[String]) -> String {
    let mut out = String::new();
    out.push_str(GENERATION_PREAMBLE);
    out.push_str("\n\n");
    out.push_str(&format!(
        "Here are {} founders to help guide your question generation:\n\n",
        profiles.len()
    ));
    numbered_profiles(&mut out, profiles);
    if !hints.is_empty() {
        out.push_str("Insights from successful founders:\n");
        for hint in hints {
            out.push_str(&format!("- {hint}\n"));
        }
        out.push('\n');
    }
    out.push_str(OUTPUT_INSTRUCTION);
    out
}

/// Prompt asking for one Yes/No answer per founder for a single question.
/// Newlines inside the question are collapsed to spaces.
pub fn build_evaluation_prompt(question: &str, profiles: &[String]) -> String {
    let question = question.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(EVALUATION_PREAMBLE);
    out.push_str("\n\n");
    out.push_str(&format!("Question: {question}\n\n"));
    out.push_str("Founder Summaries:\n\n");
    numbered_profiles(&mut out, profiles);
    out.pop();
    out
}

/// Prompt feeding the previous round's scores back and asking for a new
/// round of questions over a fresh founder batch.
pub fn build_feedback_prompt(
    stats: &[QuestionPerformance],
    profiles: &[String],
) -> Result<String, OracleError> {
    if stats.is_empty() {
        return Err(OracleError::EmptyFeedbackStats);
    }
    let mut out = String::new();
    out.push_str(FEEDBACK_PREAMBLE);
    out.push_str("\n\n");
    out.push_str("Previous questions performance:\n\n");
    for stat in stats {
        out.push_str(&format!("Question: {}\n", stat.text));
        out.push_str(&format!("Precision: {}\n", format_pct_opt(stat.precision)));
        out.push_str(&format!("Recall: {}\n", format_pct_opt(stat.recall)));
        out.push_str(&format!(
            "Number of founders predicted successful: {}/{}\n\n",
            stat.predicted_positive, stat.batch_size
        ));
    }
    out.push_str(&format!("Here are {} new founders to consider:\n\n", profiles.len()));
    numbered_profiles(&mut out, profiles);
    out.push_str("Requirements:\n");
    out.push_str("1. Questions must be objective and directly answerable from founder data.\n");
    out.push_str("2. Focus on patterns that showed high precision.\n");
    out.push_str(&format!(
        "3. Consider patterns in the new batch of {} founders when generating questions.\n\n",
        profiles.len()
    ));
    out.push_str(OUTPUT_INSTRUCTION);
    Ok(out)
}

/// Prompt asking for qualitative patterns shared by a group of
/// successful founders.
pub fn build_insight_prompt(profiles: &[String], rules: usize) -> String {
    let mut out = String::new();
    out.push_str(
        "You are a venture capital analyst reviewing profiles of successful startup founders.\n\n",
    );
    out.push_str(&format!("Here are {} successful founders:\n\n", profiles.len()));
    numbered_profiles(&mut out, profiles);
    out.push_str(&format!(
        "{INSIGHT_REQUEST} {rules} qualitative patterns these founders have in common, one per line. Do not include explanations or formatting.",
    ));
    out
}
