//! Report writers. Every table is emitted twice: an aligned text table for
//! reading and JSON lines for scripts. Plot data goes to CSV.

use std::fmt::Write as _;

use biasline_core::bias::CorpusSummary;
use biasline_core::embed::SimilarityMatrix;
use biasline_core::ml::TransferRow;
use serde::Serialize;

pub const METRIC_NAMES: [&str; 5] = ["Accuracy", "Precision", "Recall", "F-Score", "AUROC"];

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Aligned text table with a header row.
pub fn text_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let line: Vec<String> = (0..cols)
            .map(|c| {
                let cell = r.get(c).map_or("", String::as_str);
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn jsonl<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r).expect("report records serialize"));
        out.push('\n');
    }
    out
}

fn metric_values(row: &TransferRow) -> [Option<f64>; 5] {
    let m = &row.metrics;
    [Some(m.accuracy), Some(m.precision), Some(m.recall), Some(m.f_score), m.auroc]
}

/// Metrics as rows, models as columns.
pub fn metrics_table(title: &str, rows: &[TransferRow]) -> String {
    let mut header = vec![String::from("Metric")];
    header.extend(rows.iter().map(|r| r.model.clone()));
    let values: Vec<[Option<f64>; 5]> = rows.iter().map(metric_values).collect();
    let body: Vec<Vec<String>> = METRIC_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut line = vec![String::from(*name)];
            line.extend(values.iter().map(|v| v[i].map_or_else(|| "n/a".to_string(), fmt)));
            line
        })
        .collect();
    let mut out = format!("{title}\n");
    out.push_str(&text_table(&header, &body));
    for r in rows.iter().filter(|r| r.metrics.no_positive_predictions) {
        let _ = writeln!(out, "note: {} predicted no positives; precision reported as 0", r.model);
    }
    out
}

#[derive(Serialize)]
struct MetricRecord<'a> {
    #[serde(flatten)]
    context: &'a serde_json::Map<String, serde_json::Value>,
    model: &'a str,
    accuracy: f64,
    precision: f64,
    recall: f64,
    f_score: f64,
    auroc: Option<f64>,
    tp: usize,
    fp: usize,
    tn: usize,
    #[serde(rename = "fn")]
    false_neg: usize,
}

/// One JSON record per model, each carrying the `context` key-value pairs.
pub fn metrics_jsonl(context: &[(&str, &str)], rows: &[TransferRow]) -> String {
    let map: serde_json::Map<String, serde_json::Value> =
        context.iter().map(|(k, v)| (k.to_string(), serde_json::Value::from(*v))).collect();
    jsonl(rows.iter().map(|r| MetricRecord {
        context: &map,
        model: &r.model,
        accuracy: r.metrics.accuracy,
        precision: r.metrics.precision,
        recall: r.metrics.recall,
        f_score: r.metrics.f_score,
        auroc: r.metrics.auroc,
        tp: r.metrics.confusion.tp,
        fp: r.metrics.confusion.fp,
        tn: r.metrics.confusion.tn,
        false_neg: r.metrics.confusion.false_neg,
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ForumSummary {
    pub forum: String,
    pub posts: usize,
    pub scored: usize,
    pub sum: f64,
    pub mean: f64,
    pub median: f64,
}

impl ForumSummary {
    pub fn new(forum: &str, posts: usize, s: &CorpusSummary) -> Self {
        ForumSummary {
            forum: forum.to_string(),
            posts,
            scored: s.count,
            sum: s.sum,
            mean: s.mean,
            median: s.median,
        }
    }
}

pub fn summary_table(rows: &[ForumSummary]) -> String {
    let header: Vec<String> = ["Forum", "Posts", "Scored", "Sum", "Mean", "Median"].map(String::from).to_vec();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.forum.clone(), r.posts.to_string(), r.scored.to_string(), fmt(r.sum), fmt(r.mean), fmt(r.median)])
        .collect();
    text_table(&header, &body)
}

pub fn similarity_table(m: &SimilarityMatrix) -> String {
    let mut header = vec![String::new()];
    header.extend(m.names.iter().cloned());
    let body: Vec<Vec<String>> = (0..m.names.len())
        .map(|i| {
            let mut line = vec![m.names[i].clone()];
            line.extend((0..m.names.len()).map(|j| fmt(m.get(i, j))));
            line
        })
        .collect();
    text_table(&header, &body)
}

/// Long-form `row,column,cosine` for heatmaps.
pub fn similarity_csv(m: &SimilarityMatrix) -> String {
    let mut out = String::from("row,column,cosine\n");
    for i in 0..m.names.len() {
        for j in 0..m.names.len() {
            let _ = writeln!(out, "{},{},{}", m.names[i], m.names[j], m.get(i, j));
        }
    }
    out
}

#[derive(Serialize)]
struct SimilarityRecord<'a> {
    row: &'a str,
    column: &'a str,
    cosine: f64,
}

pub fn similarity_jsonl(m: &SimilarityMatrix) -> String {
    let n = m.names.len();
    jsonl((0..n * n).map(|k| SimilarityRecord {
        row: &m.names[k / n],
        column: &m.names[k % n],
        cosine: m.get(k / n, k % n),
    }))
}
