//! Phase 5b: scoring reverse identification into per-class accuracy,
//! overall accuracy, and a confusion matrix.
//!
//! UNPARSED answers count as incorrect and are tracked in a dedicated
//! column, keeping the roster×roster submatrix directly comparable across
//! runs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::identify::Prediction;
use crate::ratio::Ratio;

/// Correct/total counts with the exact accuracy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassStats {
    pub correct: u64,
    pub total: u64,
    pub accuracy: Ratio,
}

impl ClassStats {
    fn new(correct: u64, total: u64) -> Self {
        Self {
            correct,
            total,
            accuracy: Ratio::new(correct, total.max(1)).expect("denominator forced nonzero"),
        }
    }
}

/// Counts of predicted vs. actual, in roster order, plus one UNPARSED
/// column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfusionMatrix {
    /// Row and column labels, in roster order.
    pub labels: Vec<String>,
    /// `rows[actual][predicted]` over roster labels.
    pub rows: Vec<Vec<u64>>,
    /// Unresolvable answers per actual character.
    pub unparsed: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn has_unparsed(&self) -> bool {
        self.unparsed.iter().any(|&count| count > 0)
    }

    /// Sum of one actual row, including the UNPARSED column.
    pub fn row_total(&self, row: usize) -> u64 {
        self.rows[row].iter().sum::<u64>() + self.unparsed[row]
    }

    /// Sum of the diagonal: all correct identifications.
    pub fn trace(&self) -> u64 {
        self.rows.iter().enumerate().map(|(i, row)| row[i]).sum()
    }
}

/// The phase 5 report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub per_class: BTreeMap<String, ClassStats>,
    pub overall: ClassStats,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no predictions to evaluate")]
    EmptyPredictions,
    #[error("prediction refers to '{0}', which is not in the roster")]
    UnknownCharacter(String),
    #[error("predicted name '{0}' is not in the roster")]
    UnknownPrediction(String),
}

/// Score a batch of predictions against the roster.
pub fn evaluate(predictions: &[Prediction], roster: &[String]) -> Result<EvalReport, EvalError> {
    if predictions.is_empty() {
        return Err(EvalError::EmptyPredictions);
    }
    let index: BTreeMap<&str, usize> = roster
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();

    let mut rows = alloc::vec![alloc::vec![0u64; roster.len()]; roster.len()];
    let mut unparsed = alloc::vec![0u64; roster.len()];
    for prediction in predictions {
        let actual = *index
            .get(prediction.true_character.as_str())
            .ok_or_else(|| EvalError::UnknownCharacter(prediction.true_character.clone()))?;
        match &prediction.predicted {
            None => unparsed[actual] += 1,
            Some(name) => {
                let predicted = *index
                    .get(name.as_str())
                    .ok_or_else(|| EvalError::UnknownPrediction(name.clone()))?;
                rows[actual][predicted] += 1;
            }
        }
    }

    let confusion = ConfusionMatrix {
        labels: roster.to_vec(),
        rows,
        unparsed,
    };

    let mut per_class = BTreeMap::new();
    for (i, name) in roster.iter().enumerate() {
        let total = confusion.row_total(i);
        if total > 0 {
            per_class.insert(name.clone(), ClassStats::new(confusion.rows[i][i], total));
        }
    }
    let overall = ClassStats::new(confusion.trace(), predictions.len() as u64);

    Ok(EvalReport {
        per_class,
        overall,
        confusion,
    })
}
