//! Confusion-matrix arithmetic, the answer-matrix substrate, and
//! incremental precision trajectories.
//!
//! Precision over zero predicted positives is undefined, not zero. All
//! operations here carry that through as `Option<f64>` so downstream
//! filtering cannot mistake "never says YES" for "always wrong".

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::FounderId;
use crate::questgen::QuestionId;

/// Y Combinator's screening record, quoted in reports as an external
/// baseline for precision-oriented founder selection.
pub const YC_REFERENCE_PRECISION: f64 = 0.032;
/// Recall accompanying [`YC_REFERENCE_PRECISION`].
pub const YC_REFERENCE_RECALL: f64 = 0.069;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown question id {0}")]
    UnknownQuestion(QuestionId),
    #[error("malformed answer matrix file: {0}")]
    MalformedMatrix(String),
}

/// Standard binary confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u32,
    pub fp: u32,
    #[serde(rename = "fn")]
    pub fn_: u32,
    pub tn: u32,
}

impl ConfusionCounts {
    pub fn total(&self) -> u32 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn predicted_positive(&self) -> u32 {
        self.tp + self.fp
    }

    /// tp / (tp + fp); `None` when nothing was predicted positive.
    pub fn precision(&self) -> Option<f64> {
        let denom = self.tp + self.fp;
        (denom > 0).then(|| f64::from(self.tp) / f64::from(denom))
    }

    /// tp / (tp + fn); `None` when there are no true positives to find.
    pub fn recall(&self) -> Option<f64> {
        let denom = self.tp + self.fn_;
        (denom > 0).then(|| f64::from(self.tp) / f64::from(denom))
    }
}

/// Count the confusion cells for aligned prediction and label vectors.
pub fn confusion(predictions: &[bool], labels: &[bool]) -> Result<ConfusionCounts, MetricsError> {
    if predictions.len() != labels.len() {
        return Err(MetricsError::Dimension(format!(
            "{} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(MetricsError::Dimension("empty vectors".into()));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Precision over each prefix of an answer row, in evaluation order.
///
/// Entry `k` (0-based) is the precision over the first `k + 1` founders;
/// `None` marks prefixes with no positive predictions yet.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionTrajectory {
    pub values: Vec<Option<f64>>,
}

impl PrecisionTrajectory {
    pub fn final_precision(&self) -> Option<f64> {
        self.values.last().copied().flatten()
    }
}

/// Incremental precision as founders are evaluated one by one.
pub fn trajectory(
    question_row: &[bool],
    labels: &[bool],
) -> Result<PrecisionTrajectory, MetricsError> {
    if question_row.len() != labels.len() {
        return Err(MetricsError::Dimension(format!(
            "{} answers vs {} labels",
            question_row.len(),
            labels.len()
        )));
    }
    let mut tp = 0u32;
    let mut fp = 0u32;
    let mut values = Vec::with_capacity(question_row.len());
    for (&p, &l) in question_row.iter().zip(labels) {
        if p {
            if l {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let denom = tp + fp;
        values.push((denom > 0).then(|| f64::from(tp) / f64::from(denom)));
    }
    Ok(PrecisionTrajectory { values })
}

/// Boolean answers of every question over every founder of one split,
/// aligned with the split's labels. Immutable after assembly; founder
/// order is the split's file order and is what trajectories run over.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerMatrix {
    question_ids: Vec<QuestionId>,
    founder_ids: Vec<FounderId>,
    rows: Vec<Vec<bool>>,
    labels: Vec<bool>,
}

impl AnswerMatrix {
    pub fn new(
        question_ids: Vec<QuestionId>,
        founder_ids: Vec<FounderId>,
        rows: Vec<Vec<bool>>,
        labels: Vec<bool>,
    ) -> Result<Self, MetricsError> {
        if rows.len() != question_ids.len() {
            return Err(MetricsError::Dimension(format!(
                "{} rows vs {} question ids",
                rows.len(),
                question_ids.len()
            )));
        }
        if labels.len() != founder_ids.len() {
            return Err(MetricsError::Dimension(format!(
                "{} labels vs {} founder ids",
                labels.len(),
                founder_ids.len()
            )));
        }
        for (qid, row) in question_ids.iter().zip(&rows) {
            if row.len() != founder_ids.len() {
                return Err(MetricsError::Dimension(format!(
                    "row {} has {} cells for {} founders",
                    qid,
                    row.len(),
                    founder_ids.len()
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for qid in &question_ids {
            if !seen.insert(qid.clone()) {
                return Err(MetricsError::Dimension(format!("duplicate question id {qid}")));
            }
        }
        Ok(Self { question_ids, founder_ids, rows, labels })
    }

    pub fn question_ids(&self) -> &[QuestionId] {
        &self.question_ids
    }

    pub fn founder_ids(&self) -> &[FounderId] {
        &self.founder_ids
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn num_questions(&self) -> usize {
        self.question_ids.len()
    }

    pub fn num_founders(&self) -> usize {
        self.founder_ids.len()
    }

    pub fn row(&self, id: &QuestionId) -> Option<&[bool]> {
        self.index_of(id).map(|i| self.rows[i].as_slice())
    }

    pub fn index_of(&self, id: &QuestionId) -> Option<usize> {
        self.question_ids.iter().position(|q| q == id)
    }

    pub fn row_by_index(&self, idx: usize) -> &[bool] {
        &self.rows[idx]
    }

    /// Fraction of truly successful founders in this split.
    pub fn base_rate(&self) -> f64 {
        let pos = self.labels.iter().filter(|&&l| l).count();
        pos as f64 / self.labels.len().max(1) as f64
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Confusion counts of one question's answers against the labels.
    pub fn question_confusion(&self, id: &QuestionId) -> Result<ConfusionCounts, MetricsError> {
        let row = self.row(id).ok_or_else(|| MetricsError::UnknownQuestion(id.clone()))?;
        confusion(row, &self.labels)
    }

    pub fn question_precision(&self, id: &QuestionId) -> Result<Option<f64>, MetricsError> {
        Ok(self.question_confusion(id)?.precision())
    }

    /// Serialize as delimited text: optional `# ` comment lines, a header
    /// row of founder ids, one 0/1 row per question, and a final labels
    /// row. Round-trips bit-exactly through [`AnswerMatrix::from_csv`].
    pub fn to_csv(&self, meta: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(meta) = meta {
            out.push_str("# ");
            out.push_str(meta);
            out.push('\n');
        }
        out.push_str("question_id");
        for fid in &self.founder_ids {
            out.push(',');
            out.push_str(fid.as_str());
        }
        out.push('\n');
        for (qid, row) in self.question_ids.iter().zip(&self.rows) {
            out.push_str(qid.as_str());
            for &cell in row {
                out.push(',');
                out.push(if cell { '1' } else { '0' });
            }
            out.push('\n');
        }
        out.push_str("labels");
        for &l in &self.labels {
            out.push(',');
            out.push(if l { '1' } else { '0' });
        }
        out.push('\n');
        out
    }

    /// Parse the format written by [`AnswerMatrix::to_csv`]. Returns the
    /// meta comment, if any, alongside the matrix.
    pub fn from_csv(text: &str) -> Result<(Option<String>, Self), MetricsError> {
        let mut meta = None;
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.peek() {
            if let Some(rest) = line.strip_prefix("# ") {
                meta = Some(rest.to_string());
                lines.next();
            } else {
                break;
            }
        }
        let header = lines
            .next()
            .ok_or_else(|| MetricsError::MalformedMatrix("missing header row".into()))?;
        let mut cols = header.split(',');
        if cols.next() != Some("question_id") {
            return Err(MetricsError::MalformedMatrix("header must start with question_id".into()));
        }
        let founder_ids: Vec<FounderId> = cols.map(|c| FounderId::new(c.to_string())).collect();
        if founder_ids.is_empty() {
            return Err(MetricsError::MalformedMatrix("header has no founder ids".into()));
        }

        let parse_cells = |name: &str, rest: std::str::Split<'_, char>| {
            rest.map(|c| match c {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(MetricsError::MalformedMatrix(format!(
                    "row {name}: cell {other:?} is not 0/1"
                ))),
            })
            .collect::<Result<Vec<bool>, _>>()
        };

        let mut question_ids = Vec::new();
        let mut rows = Vec::new();
        let mut labels = None;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let name = cells
                .next()
                .ok_or_else(|| MetricsError::MalformedMatrix("empty row".into()))?;
            let parsed = parse_cells(name, cells)?;
            if name == "labels" {
                labels = Some(parsed);
            } else {
                if labels.is_some() {
                    return Err(MetricsError::MalformedMatrix(
                        "labels row must be the final row".into(),
                    ));
                }
                question_ids.push(QuestionId::new(name.to_string()));
                rows.push(parsed);
            }
        }
        let labels =
            labels.ok_or_else(|| MetricsError::MalformedMatrix("missing labels row".into()))?;
        let matrix = Self::new(question_ids, founder_ids, rows, labels)?;
        Ok((meta, matrix))
    }
}
