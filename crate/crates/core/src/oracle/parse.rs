//! Parsers for oracle responses: question lists and Yes/No answer lists.
//! Parsing is strict about counts; a mismatch is an error the caller can
//! retry, never a silent truncation.

use super::{OracleError, QUESTIONS_PER_ROUND};

/// Strip a leading enumeration marker such as "3.", "12)", "-", or "*".
fn strip_marker(line: &str) -> &str {
    let line = line.trim();
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        if let Some(rest) = line.get(digits..) {
            if let Some(stripped) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
                return stripped.trim();
            }
        }
    }
    if let Some(stripped) = line.strip_prefix('-').or_else(|| line.strip_prefix('*')) {
        return stripped.trim();
    }
    line
}

/// Nonempty lines with whitespace and enumeration markers removed.
pub(crate) fn clean_lines(text: &str) -> Vec<String> {
    text.lines().map(strip_marker).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

/// Parse exactly `expected` cleaned lines out of a response.
pub(crate) fn expect_lines(text: &str, expected: usize) -> Result<Vec<String>, OracleError> {
    let lines = clean_lines(text);
    if lines.len() != expected {
        return Err(OracleError::malformed(
            format!("expected {expected} lines, found {}", lines.len()),
            text,
        ));
    }
    Ok(lines)
}

/// Parse one round's worth of generated questions: one per line, markers
/// stripped, blanks dropped. Any count other than the requested ten is a
/// malformed response carrying the raw text so the caller can retry.
pub fn parse_questions(response: &str) -> Result<Vec<String>, OracleError> {
    expect_lines(response, QUESTIONS_PER_ROUND)
}

/// Parse exactly `expected` case-insensitive Yes/No answers, one per
/// line. Tolerates "Founder 3: Yes" style prefixes and enumeration
/// markers; anything else is a malformed response.
pub fn parse_answers(response: &str, expected: usize) -> Result<Vec<bool>, OracleError> {
    let mut answers = Vec::new();
    for line in response.lines() {
        let line = strip_marker(line);
        if line.is_empty() {
            continue;
        }
        let token = line.rsplit(':').next().unwrap_or(line);
        let token = token.trim().trim_end_matches(['.', ',', '!']).trim();
        match token.to_ascii_lowercase().as_str() {
            "yes" => answers.push(true),
            "no" => answers.push(false),
            other => {
                return Err(OracleError::malformed(
                    format!("unrecognizable answer token {other:?}"),
                    response,
                ))
            }
        }
    }
    if answers.len() != expected {
        return Err(OracleError::malformed(
            format!("expected {expected} answers, found {}", answers.len()),
            response,
        ));
    }
    Ok(answers)
}
