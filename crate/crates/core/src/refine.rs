//! Question-pool refinement on the validation matrix: drop questions
//! whose precision is no better than chance, remove prediction-level
//! redundancy by Jaccard similarity, and rank the survivors by precision.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{AnswerMatrix, MetricsError};
use crate::questgen::QuestionId;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("invalid refinement config: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown question id {0}")]
    UnknownQuestion(QuestionId),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// A question dropped by the precision filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRemoval {
    pub id: QuestionId,
    /// Validation precision; `None` for questions that never answered YES.
    pub precision: Option<f64>,
}

/// One de-duplication event: `removed` was dropped in favor of `kept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupRemoval {
    pub kept: QuestionId,
    pub removed: QuestionId,
    pub similarity: f64,
}

/// Full disposition of every question in the pool: each input id appears
/// exactly once across the three lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub baseline: f64,
    pub jaccard_threshold: f64,
    pub removed_by_filter: Vec<FilterRemoval>,
    pub removed_by_dedup: Vec<DedupRemoval>,
    pub ranked_ids: Vec<QuestionId>,
}

/// Keep questions whose precision is defined and at least `baseline`
/// (the evaluation split's base rate, i.e. random-chance precision).
/// Questions with undefined precision are removed: a question that never
/// answers YES carries no signal.
pub fn filter_by_precision(
    matrix: &AnswerMatrix,
    baseline: f64,
) -> Result<(Vec<QuestionId>, Vec<FilterRemoval>), RefineError> {
    if !(baseline > 0.0 && baseline < 1.0) {
        return Err(RefineError::Config(format!("baseline {baseline} must be in (0, 1)")));
    }
    if matrix.num_questions() == 0 || matrix.num_founders() == 0 {
        return Err(RefineError::Dimension("empty answer matrix".into()));
    }
    let mut retained = Vec::new();
    let mut removed = Vec::new();
    for id in matrix.question_ids() {
        let precision = matrix.question_precision(id)?;
        match precision {
            Some(p) if p >= baseline => retained.push(id.clone()),
            _ => removed.push(FilterRemoval { id: id.clone(), precision }),
        }
    }
    Ok((retained, removed))
}

/// Intersection-over-union of two YES sets. Two all-NO vectors count as
/// identical (similarity 1.0), so vacuous questions cannot both survive
/// de-duplication.
pub fn jaccard(a: &[bool], b: &[bool]) -> Result<f64, RefineError> {
    if a.len() != b.len() {
        return Err(RefineError::Dimension(format!("{} vs {} entries", a.len(), b.len())));
    }
    let mut both = 0u32;
    let mut either = 0u32;
    for (&x, &y) in a.iter().zip(b) {
        if x && y {
            both += 1;
        }
        if x || y {
            either += 1;
        }
    }
    if either == 0 {
        return Ok(1.0);
    }
    Ok(f64::from(both) / f64::from(either))
}

/// Remove redundant questions until no surviving pair has similarity
/// strictly above `threshold`. Offending pairs are processed in
/// descending similarity (ties by id order); within a pair the
/// lower-precision member is removed, ties going against the
/// later-generated question.
pub fn deduplicate(
    matrix: &AnswerMatrix,
    retained: &[QuestionId],
    threshold: f64,
) -> Result<(Vec<QuestionId>, Vec<DedupRemoval>), RefineError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(RefineError::Config(format!("jaccard threshold {threshold} must be in (0, 1]")));
    }
    let rows: Vec<(&QuestionId, &[bool], Option<f64>)> = retained
        .iter()
        .map(|id| {
            let row = matrix.row(id).ok_or_else(|| RefineError::UnknownQuestion(id.clone()))?;
            let precision = matrix.question_precision(id)?;
            Ok((id, row, precision))
        })
        .collect::<Result<_, RefineError>>()?;

    let mut offending: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let sim = jaccard(rows[i].1, rows[j].1)?;
            if sim > threshold {
                offending.push((i, j, sim));
            }
        }
    }
    offending.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(Ordering::Equal)
            .then_with(|| rows[a.0].0.cmp(rows[b.0].0))
            .then_with(|| rows[a.1].0.cmp(rows[b.1].0))
    });

    let mut removed_set = vec![false; rows.len()];
    let mut removals = Vec::new();
    for (i, j, sim) in offending {
        if removed_set[i] || removed_set[j] {
            continue;
        }
        // Keep the higher-precision member; on ties keep the earlier id.
        let drop_i = match cmp_precision(rows[i].2, rows[j].2) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => rows[i].0 > rows[j].0,
        };
        let (keep, drop) = if drop_i { (j, i) } else { (i, j) };
        removed_set[drop] = true;
        removals.push(DedupRemoval {
            kept: rows[keep].0.clone(),
            removed: rows[drop].0.clone(),
            similarity: sim,
        });
    }
    let survivors = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed_set[*i])
        .map(|(_, (id, _, _))| (*id).clone())
        .collect();
    Ok((survivors, removals))
}

fn cmp_precision(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Greater,
        (None, Some(_)) => Ordering::Less,
        (None, None) => Ordering::Equal,
    }
}

/// Survivors ordered by validation precision, highest first. Ties break
/// toward higher recall, then lexicographic id.
pub fn rank_by_precision(
    matrix: &AnswerMatrix,
    surviving: &[QuestionId],
) -> Result<Vec<QuestionId>, RefineError> {
    let mut keyed: Vec<(Option<f64>, Option<f64>, QuestionId)> = surviving
        .iter()
        .map(|id| {
            if matrix.row(id).is_none() {
                return Err(RefineError::UnknownQuestion(id.clone()));
            }
            let counts = matrix.question_confusion(id)?;
            Ok((counts.precision(), counts.recall(), id.clone()))
        })
        .collect::<Result<_, RefineError>>()?;
    keyed.sort_by(|a, b| {
        cmp_precision(b.0, a.0)
            .then_with(|| cmp_precision(b.1, a.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    Ok(keyed.into_iter().map(|(_, _, id)| id).collect())
}

/// The full three-stage refinement over one fixed validation matrix.
pub fn run_refinement(
    matrix: &AnswerMatrix,
    baseline: f64,
    jaccard_threshold: f64,
) -> Result<RefinementReport, RefineError> {
    let (retained, removed_by_filter) = filter_by_precision(matrix, baseline)?;
    let (survivors, removed_by_dedup) = deduplicate(matrix, &retained, jaccard_threshold)?;
    let ranked_ids = rank_by_precision(matrix, &survivors)?;
    Ok(RefinementReport {
        baseline,
        jaccard_threshold,
        removed_by_filter,
        removed_by_dedup,
        ranked_ids,
    })
}


#[cfg(test)]
mod property_tests {
    use super::*;
    use crate::dataset::FounderId;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn random_matrix(seed: u64, questions: usize, founders: usize) -> AnswerMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<bool>> = (0..questions)
            .map(|_| (0..founders).map(|_| rng.random_bool(0.3)).collect())
            .collect();
        let labels: Vec<bool> = (0..founders).map(|_| rng.random_bool(0.1)).collect();
        AnswerMatrix::new(
            (0..questions).map(|i| QuestionId::new(format!("q{i:03}"))).collect(),
            (0..founders).map(|i| FounderId::new(format!("F{i:04}"))).collect(),
            rows,
            labels,
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn prop_jaccard_symmetry_and_identity(
            pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..80)
        ) {
            let a: Vec<bool> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<bool> = pairs.iter().map(|p| p.1).collect();
            prop_assert_eq!(jaccard(&a, &b).unwrap(), jaccard(&b, &a).unwrap());
            prop_assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
            let sim = jaccard(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&sim));
        }

        #[test]
        fn prop_dedup_postcondition_and_conservation(
            seed in any::<u64>(),
            questions in 2usize..20,
            founders in 4usize..60,
            threshold in 0.3f64..1.0,
        ) {
            let matrix = random_matrix(seed, questions, founders);
            let report = run_refinement(&matrix, 0.10, threshold).unwrap();
            for i in 0..report.ranked_ids.len() {
                for j in (i + 1)..report.ranked_ids.len() {
                    let sim = jaccard(
                        matrix.row(&report.ranked_ids[i]).unwrap(),
                        matrix.row(&report.ranked_ids[j]).unwrap(),
                    ).unwrap();
                    prop_assert!(sim <= threshold);
                }
            }
            prop_assert_eq!(
                report.removed_by_filter.len() + report.removed_by_dedup.len()
                    + report.ranked_ids.len(),
                questions
            );
            // Filter soundness both ways.
            for id in &report.ranked_ids {
                let p = matrix.question_precision(id).unwrap();
                prop_assert!(p.is_some_and(|p| p >= 0.10));
            }
            for removal in &report.removed_by_filter {
                let p = matrix.question_precision(&removal.id).unwrap();
                prop_assert!(p.is_none_or(|p| p < 0.10));
            }
        }
    }
}
