//! Report emission: JSON summaries, ROC point CSV and the class
//! distribution as CSV and an SVG bar chart.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::pipeline::{SearchResult, SearchStatus};
use super::search::ParamSet;
use crate::error::{Error, Result};
use crate::metrics::roc_to_csv;
use crate::LabelId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassShareRow {
    pub name: String,
    pub count: usize,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub total: usize,
    pub classes: Vec<ClassShareRow>,
}

impl ClassDistribution {
    pub fn from_labels(names: &[String], labels: &[LabelId]) -> ClassDistribution {
        let mut counts = vec![0usize; names.len()];
        for &y in labels {
            counts[y] += 1;
        }
        let total = labels.len();
        let classes = names
            .iter()
            .zip(counts)
            .map(|(name, count)| ClassShareRow {
                name: name.clone(),
                count,
                proportion: if total == 0 { 0.0 } else { count as f64 / total as f64 },
            })
            .collect();
        ClassDistribution { total, classes }
    }

    pub fn proportion_of(&self, name: &str) -> Option<f64> {
        self.classes.iter().find(|c| c.name == name).map(|c| c.proportion)
    }

    /// `name,count,proportion,percent` with the percentage rounded to a
    /// whole number.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,count,proportion,percent\n");
        for c in &self.classes {
            let _ = writeln!(out, "{},{},{:.6},{:.0}", csv_field(&c.name), c.count, c.proportion, c.proportion * 100.0);
        }
        out
    }

    /// Vertical bar chart, one bar per class, labelled with its percentage.
    pub fn to_svg(&self) -> String {
        let bar_w = 60.0;
        let gap = 20.0;
        let plot_h = 240.0;
        let top = 30.0;
        let left = 40.0;
        let width = left + self.classes.len() as f64 * (bar_w + gap) + gap;
        let height = top + plot_h + 60.0;
        let max = self.classes.iter().map(|c| c.proportion).fold(0.0, f64::max).max(1e-12);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">Class distribution (n = {})</text>"#, width / 2.0, self.total);
        let base = top + plot_h;
        let _ = writeln!(s, r#"<line x1="{left}" y1="{base}" x2="{:.1}" y2="{base}" stroke="black"/>"#, width - gap / 2.0);
        for (i, c) in self.classes.iter().enumerate() {
            let h = plot_h * c.proportion / max;
            let x = left + gap + i as f64 * (bar_w + gap);
            let y = base - h;
            let _ = writeln!(s, r##"<rect x="{x:.1}" y="{y:.1}" width="{bar_w}" height="{h:.1}" fill="#4c72b0"><title>{}: {}</title></rect>"##, xml_escape(&c.name), c.count);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}%</text>"#, x + bar_w / 2.0, y - 4.0, c.proportion * 100.0);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, x + bar_w / 2.0, base + 16.0, xml_escape(&c.name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub model: String,
    pub weighted_f1: Option<f64>,
    pub auroc: Option<f64>,
    pub macro_auroc: Option<f64>,
    pub per_class_auroc: Vec<Option<f64>>,
}

/// Compact, human-oriented view of a search result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub status: SearchStatus,
    pub message: Option<String>,
    pub model: String,
    pub classes: Vec<String>,
    pub n_trials: usize,
    pub n_failed: usize,
    pub best_params: Option<ParamSet>,
    pub validation_weighted_f1: Option<f64>,
    pub test: Option<ScoreRow>,
    pub distribution: ClassDistribution,
}

pub fn summarize(result: &SearchResult) -> ReportSummary {
    let n_failed = result.trials.iter().filter(|t| t.error.is_some()).count();
    let model = result.family.name().to_string();
    ReportSummary {
        status: result.status,
        message: (result.status == SearchStatus::NoSuccessfulTrials).then(|| "no successful trials".to_string()),
        model: model.clone(),
        classes: result.class_names.clone(),
        n_trials: result.trials.len(),
        n_failed,
        best_params: result.best_params.clone(),
        validation_weighted_f1: result.validation_weighted_f1,
        test: result.test.as_ref().map(|t| ScoreRow {
            model,
            weighted_f1: Some(t.weighted_f1),
            auroc: t.auroc,
            macro_auroc: t.macro_auroc,
            per_class_auroc: t.per_class_auroc.clone(),
        }),
        distribution: result.distribution.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Svg,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s {
            "json" => Some(ReportFormat::Json),
            "csv" => Some(ReportFormat::Csv),
            "svg" => Some(ReportFormat::Svg),
            _ => None,
        }
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the requested artefacts into `dir` and returns their paths.
/// JSON gives `report.json`; CSV gives `distribution.csv` and, when a test
/// report exists, `roc.csv`; SVG gives `distribution.svg`.
pub fn emit_report(result: &SearchResult, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        ReportFormat::Json => {
            let summary = serde_json::to_string_pretty(&summarize(result))?;
            written.push(write(dir.join("report.json"), &summary)?);
        }
        ReportFormat::Csv => {
            written.push(write(dir.join("distribution.csv"), &result.distribution.to_csv())?);
            if let Some(roc) = result.test.as_ref().and_then(|t| t.roc.as_ref()) {
                written.push(write(dir.join("roc.csv"), &roc_to_csv(roc))?);
            }
        }
        ReportFormat::Svg => {
            written.push(write(dir.join("distribution.svg"), &result.distribution.to_svg())?);
        }
    }
    Ok(written)
}

/// Distribution CSV and SVG for a prepared corpus, without any model.
pub fn emit_distribution(dist: &ClassDistribution, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(vec![
        write(dir.join("distribution.csv"), &dist.to_csv())?,
        write(dir.join("distribution.svg"), &dist.to_svg())?,
    ])
}
