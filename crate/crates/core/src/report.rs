//! Rendering profiles and evaluation results as Markdown, CSV, or JSON.
//!
//! Rendering is a pure function of its input: identical reports yield
//! byte-identical output in every format. Trait consensus scores are shown
//! with one decimal truncated toward zero (`10/15` → `66.6`); accuracies
//! round half up, one decimal per class and two decimals overall.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::eval::EvalReport;
use crate::identify::UNPARSED_LABEL;
use crate::profile::CharacterProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "markdown" | "md" => Some(Self::Markdown),
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// Placeholder row label for characters whose profile came out empty.
pub const NO_CONSISTENT_TRAITS: &str = "no consistent traits";

#[derive(Serialize)]
struct TraitRow<'a> {
    character: &'a str,
    label: &'a str,
    score_percent: Option<String>,
}

fn trait_rows(profiles: &[CharacterProfile]) -> Vec<TraitRow<'_>> {
    let mut rows = Vec::new();
    for profile in profiles {
        if profile.groups.is_empty() {
            rows.push(TraitRow {
                character: &profile.character,
                label: NO_CONSISTENT_TRAITS,
                score_percent: None,
            });
            continue;
        }
        for group in &profile.groups {
            rows.push(TraitRow {
                character: &profile.character,
                label: &group.label,
                score_percent: Some(group.consensus_score.percent_floor_1dp()),
            });
        }
    }
    rows
}

/// Render the per-character trait tables, one row per retained group in
/// profile order.
pub fn render_trait_table(profiles: &[CharacterProfile], format: ReportFormat) -> String {
    let rows = trait_rows(profiles);
    match format {
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str("| Detective | Trait Description | Score (%) |\n");
            out.push_str("| --- | --- | --- |\n");
            for row in &rows {
                out.push_str(&format!(
                    "| {} | {} | {} |\n",
                    md_cell(row.character),
                    md_cell(row.label),
                    row.score_percent.as_deref().unwrap_or("")
                ));
            }
            out
        }
        ReportFormat::Csv => {
            let mut out = String::from("detective,trait,score_percent\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(row.character),
                    csv_field(row.label),
                    csv_field(row.score_percent.as_deref().unwrap_or(""))
                ));
            }
            out
        }
        ReportFormat::Json => canonical_json(&rows),
    }
}

/// Render the identification report: per-class accuracy lines, the overall
/// line, and the confusion matrix. The UNPARSED column appears only when
/// some answer failed to parse.
pub fn render_eval_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str("## Accuracy per detective\n\n");
            out.push_str("| Detective | Accuracy (Correct / Total) |\n");
            out.push_str("| --- | --- |\n");
            for (name, stats) in per_class_in_roster_order(report) {
                out.push_str(&format!(
                    "| {} | {}% ({}/{}) |\n",
                    md_cell(name),
                    stats_percent_1dp(stats),
                    stats.correct,
                    stats.total
                ));
            }
            out.push_str(&format!(
                "\nOverall accuracy: {}% ({}/{})\n",
                report.overall.accuracy.percent_round_2dp(),
                report.overall.correct,
                report.overall.total
            ));
            out.push_str("\n## Confusion matrix\n\n");
            out.push_str(&render_confusion_markdown(report));
            out
        }
        ReportFormat::Csv => {
            let mut out =
                String::from("kind,detective,predicted,correct,total,accuracy_percent,count\n");
            for (name, stats) in per_class_in_roster_order(report) {
                out.push_str(&format!(
                    "per_class,{},,{},{},{},\n",
                    csv_field(name),
                    stats.correct,
                    stats.total,
                    stats_percent_1dp(stats)
                ));
            }
            out.push_str(&format!(
                "overall,,,{},{},{},\n",
                report.overall.correct,
                report.overall.total,
                report.overall.accuracy.percent_round_2dp()
            ));
            let labels = &report.confusion.labels;
            for (i, actual) in labels.iter().enumerate() {
                for (j, predicted) in labels.iter().enumerate() {
                    out.push_str(&format!(
                        "confusion,{},{},,,,{}\n",
                        csv_field(actual),
                        csv_field(predicted),
                        report.confusion.rows[i][j]
                    ));
                }
                if report.confusion.has_unparsed() {
                    out.push_str(&format!(
                        "confusion,{},{UNPARSED_LABEL},,,,{}\n",
                        csv_field(actual),
                        report.confusion.unparsed[i]
                    ));
                }
            }
            out
        }
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct ClassRow<'a> {
                detective: &'a str,
                correct: u64,
                total: u64,
                accuracy_percent: String,
            }
            #[derive(Serialize)]
            struct Rendered<'a> {
                per_class: Vec<ClassRow<'a>>,
                overall: ClassRow<'a>,
                confusion: &'a crate::eval::ConfusionMatrix,
            }
            let rendered = Rendered {
                per_class: per_class_in_roster_order(report)
                    .into_iter()
                    .map(|(name, stats)| ClassRow {
                        detective: name,
                        correct: stats.correct,
                        total: stats.total,
                        accuracy_percent: stats_percent_1dp(stats),
                    })
                    .collect(),
                overall: ClassRow {
                    detective: "",
                    correct: report.overall.correct,
                    total: report.overall.total,
                    accuracy_percent: report.overall.accuracy.percent_round_2dp(),
                },
                confusion: &report.confusion,
            };
            canonical_json(&rendered)
        }
    }
}

/// The confusion matrix alone, in the actual-rows × predicted-columns
/// layout.
pub fn render_confusion_markdown(report: &EvalReport) -> String {
    let confusion = &report.confusion;
    let mut out = String::new();
    out.push_str("| Actual \\ Predicted |");
    for label in &confusion.labels {
        out.push_str(&format!(" {} |", md_cell(label)));
    }
    if confusion.has_unparsed() {
        out.push_str(&format!(" {UNPARSED_LABEL} |"));
    }
    out.push('\n');
    let columns = confusion.labels.len() + 1 + usize::from(confusion.has_unparsed());
    out.push_str("|");
    for _ in 0..columns {
        out.push_str(" --- |");
    }
    out.push('\n');
    for (i, label) in confusion.labels.iter().enumerate() {
        out.push_str(&format!("| {} |", md_cell(label)));
        for &count in &confusion.rows[i] {
            out.push_str(&format!(" {count} |"));
        }
        if confusion.has_unparsed() {
            out.push_str(&format!(" {} |", confusion.unparsed[i]));
        }
        out.push('\n');
    }
    out
}

fn per_class_in_roster_order(report: &EvalReport) -> Vec<(&str, &crate::eval::ClassStats)> {
    report
        .confusion
        .labels
        .iter()
        .filter_map(|name| {
            report
                .per_class
                .get(name)
                .map(|stats| (name.as_str(), stats))
        })
        .collect()
}

fn stats_percent_1dp(stats: &crate::eval::ClassStats) -> String {
    stats.accuracy.percent_round_1dp()
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

fn csv_field(text: &str) -> String {
    let needs_quoting = text.contains(',')
        || text.contains('"')
        || text.contains('\n')
        || text.contains('\r')
        || text.starts_with(' ')
        || text.ends_with(' ');
    if needs_quoting {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Sorted-key pretty JSON with a trailing newline.
fn canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types serialize infallibly");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes infallibly");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;
    use crate::group::TraitGroup;
    use crate::identify::Prediction;
    use crate::profile::consensus_score;
    use crate::ratio::Ratio;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn group(label: &str, supporters: u64, total: u64) -> TraitGroup {
        TraitGroup {
            label: label.to_string(),
            members: vec![],
            supporting_models: (0..supporters)
                .map(|i| format!("m{i:02}"))
                .collect::<BTreeSet<_>>(),
            consensus_score: consensus_score(supporters, total).unwrap(),
        }
    }

    fn profile(character: &str, groups: Vec<TraitGroup>) -> CharacterProfile {
        CharacterProfile {
            character: character.to_string(),
            groups,
            threshold: Ratio::new(1, 5).unwrap(),
            total_models: 15,
        }
    }

    #[test]
    fn trait_table_renders_truncated_scores() {
        let profiles = vec![profile(
            "Hercule Poirot",
            vec![group("Reliance on psychological insight", 11, 15)],
        )];
        let markdown = render_trait_table(&profiles, ReportFormat::Markdown);
        assert!(markdown.contains("| Hercule Poirot | Reliance on psychological insight | 73.3 |"));
    }

    #[test]
    fn empty_profile_gets_placeholder_row() {
        let profiles = vec![profile("Miss Marple", vec![])];
        let markdown = render_trait_table(&profiles, ReportFormat::Markdown);
        assert!(markdown.contains("| Miss Marple | no consistent traits |  |"));
        let csv = render_trait_table(&profiles, ReportFormat::Csv);
        assert!(csv.contains("Miss Marple,no consistent traits,\n"));
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let profiles = vec![profile(
            "X",
            vec![group("Order, symmetry, and \"method\"", 4, 15)],
        )];
        let csv = render_trait_table(&profiles, ReportFormat::Csv);
        assert!(csv.contains("X,\"Order, symmetry, and \"\"method\"\"\",26.6\n"));
    }

    fn table_like_report() -> EvalReport {
        let roster = vec!["A".to_string(), "B".to_string()];
        let mut predictions = Vec::new();
        for i in 0..15 {
            predictions.push(Prediction {
                true_character: "A".to_string(),
                model_id: format!("m{i}"),
                predicted: Some(if i < 8 { "A" } else { "B" }.to_string()),
                raw_response: String::new(),
            });
            predictions.push(Prediction {
                true_character: "B".to_string(),
                model_id: format!("m{i}"),
                predicted: Some("B".to_string()),
                raw_response: String::new(),
            });
        }
        evaluate(&predictions, &roster).unwrap()
    }

    #[test]
    fn eval_report_lines_match_expected_formats() {
        let report = table_like_report();
        let markdown = render_eval_report(&report, ReportFormat::Markdown);
        assert!(markdown.contains("| A | 53.3% (8/15) |"));
        assert!(markdown.contains("| B | 100.0% (15/15) |"));
        assert!(markdown.contains("Overall accuracy: 76.67% (23/30)"));
        assert!(markdown.contains("| Actual \\ Predicted | A | B |"));
        assert!(markdown.contains("| A | 8 | 7 |"));
        assert!(!markdown.contains("UNPARSED"));
    }

    #[test]
    fn unparsed_column_rendered_when_nonzero() {
        let roster = vec!["A".to_string()];
        let predictions = vec![
            Prediction {
                true_character: "A".to_string(),
                model_id: "m0".to_string(),
                predicted: None,
                raw_response: "???".to_string(),
            },
            Prediction {
                true_character: "A".to_string(),
                model_id: "m1".to_string(),
                predicted: Some("A".to_string()),
                raw_response: "A".to_string(),
            },
        ];
        let report = evaluate(&predictions, &roster).unwrap();
        let markdown = render_eval_report(&report, ReportFormat::Markdown);
        assert!(markdown.contains("| Actual \\ Predicted | A | UNPARSED |"));
        assert!(markdown.contains("| A | 1 | 1 |"));
        let csv = render_eval_report(&report, ReportFormat::Csv);
        assert!(csv.contains("confusion,A,UNPARSED,,,,1\n"));
    }

    #[test]
    fn formats_agree_on_the_numbers() {
        let report = table_like_report();
        let markdown = render_eval_report(&report, ReportFormat::Markdown);
        let csv = render_eval_report(&report, ReportFormat::Csv);
        let json = render_eval_report(&report, ReportFormat::Json);
        for number in ["53.3", "100.0", "76.67"] {
            assert!(markdown.contains(number), "markdown missing {number}");
            assert!(csv.contains(number), "csv missing {number}");
            assert!(json.contains(number), "json missing {number}");
        }
        // determinism
        assert_eq!(markdown, render_eval_report(&report, ReportFormat::Markdown));
        assert_eq!(json, render_eval_report(&report, ReportFormat::Json));
    }

    #[test]
    fn trait_table_formats_agree() {
        let profiles = vec![
            profile("P1", vec![group("alpha", 12, 15), group("beta", 3, 15)]),
            profile("P2", vec![]),
        ];
        let markdown = render_trait_table(&profiles, ReportFormat::Markdown);
        let csv = render_trait_table(&profiles, ReportFormat::Csv);
        let json = render_trait_table(&profiles, ReportFormat::Json);
        for number in ["80.0", "20.0"] {
            assert!(markdown.contains(number));
            assert!(csv.contains(number));
            assert!(json.contains(number));
        }
        assert!(json.contains(NO_CONSISTENT_TRAITS));
    }
}
