use std::collections::BTreeMap;
use std::fmt::Write;
use std::io::Read;

use serde::Serialize;

use super::{krocc, logistic_fit, plcc, rmse, srocc, LogisticFit};
use crate::error::{Error, Result};
use crate::video_io::FrameRate;

const MIN_RECORDS: usize = 3;
const HEADER: [&str; 4] = ["video_id", "fps", "predicted", "subjective"];

/// One scored video with its subjective rating.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub video_id: String,
    pub fps: FrameRate,
    pub predicted: f64,
    pub subjective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content_id: Option<String>,
}

/// Reads `video_id,fps,predicted,subjective[,content_id]` CSV.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<EvalRecord>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = csv.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let has_content = match names.as_slice() {
        [a, b, c, d] if [*a, *b, *c, *d] == HEADER => false,
        [a, b, c, d, "content_id"] if [*a, *b, *c, *d] == HEADER => true,
        _ => {
            return Err(Error::MalformedCsv(format!(
                "expected header `video_id,fps,predicted,subjective[,content_id]`, got `{}`",
                names.join(",")
            )))
        }
    };
    let mut records = Vec::new();
    for (line, row) in csv.records().enumerate() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let number = |i: usize, what: &str| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::MalformedCsv(format!("row {}: bad {what} `{}`", line + 2, field(i))))
        };
        let fps = field(1)
            .parse::<FrameRate>()
            .map_err(|_| Error::MalformedCsv(format!("row {}: bad fps `{}`", line + 2, field(1))))?;
        records.push(EvalRecord {
            video_id: field(0).to_string(),
            fps,
            predicted: number(2, "predicted")?,
            subjective: number(3, "subjective")?,
            content_id: has_content.then(|| field(4).to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub label: String,
    pub n: usize,
    pub srocc: Option<f64>,
    pub krocc: Option<f64>,
    pub plcc: Option<f64>,
    pub rmse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Logistic parameters `τ₁..τ₄`, when a fit was possible.
    pub logistic: Option<[f64; 4]>,
    pub logistic_converged: Option<bool>,
    pub overall: MetricRow,
    pub groups: Vec<MetricRow>,
    pub notes: Vec<String>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let mut out = format!("{:<12} {:>5} {:>8} {:>8} {:>8} {:>10}\n", "group", "n", "SROCC", "KROCC", "PLCC", "RMSE");
        for row in self.groups.iter().chain(std::iter::once(&self.overall)) {
            writeln!(
                out,
                "{:<12} {:>5} {:>8} {:>8} {:>8} {:>10}",
                row.label,
                row.n,
                cell(row.srocc),
                cell(row.krocc),
                cell(row.plcc),
                cell(row.rmse)
            )
            .unwrap();
        }
        for note in &self.notes {
            writeln!(out, "note: {note}").unwrap();
        }
        out
    }
}

fn row(label: String, predicted: &[f64], mapped: &[f64], subjective: &[f64], notes: &mut Vec<String>) -> MetricRow {
    let mut keep = |name: &str, r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{label}: {name} undefined ({e})"));
            None
        }
    };
    MetricRow {
        srocc: keep("SROCC", srocc(predicted, subjective)),
        krocc: keep("KROCC", krocc(predicted, subjective)),
        plcc: keep("PLCC", plcc(mapped, subjective)),
        rmse: keep("RMSE", rmse(mapped, subjective)),
        n: predicted.len(),
        label,
    }
}

/// Overall and per-frame-rate agreement. One logistic mapping is fit over
/// the whole record set and reused for every group's PLCC and RMSE.
pub fn eval_report(records: &[EvalRecord]) -> Result<EvalReport> {
    if records.len() < MIN_RECORDS {
        return Err(Error::TooFewSamples { needed: MIN_RECORDS, got: records.len() });
    }
    let predicted: Vec<f64> = records.iter().map(|r| r.predicted).collect();
    let subjective: Vec<f64> = records.iter().map(|r| r.subjective).collect();
    let mut notes = Vec::new();

    let fit: Option<LogisticFit> = match logistic_fit(&predicted, &subjective) {
        Ok(fit) => {
            if !fit.converged {
                notes.push("logistic fit hit its iteration cap; using the best parameters found".into());
            }
            Some(fit)
        }
        Err(e) => {
            notes.push(format!("no logistic mapping ({e}); PLCC and RMSE use raw predictions"));
            None
        }
    };
    let mapped = fit.as_ref().map_or_else(|| predicted.clone(), |f| f.apply(&predicted));

    let mut by_fps: BTreeMap<FrameRate, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_fps.entry(r.fps).or_default().push(i);
    }
    let mut groups = Vec::new();
    for (fps, idx) in &by_fps {
        let label = if fps.denom() == 1 { format!("{} fps", fps.numer()) } else { format!("{fps} fps") };
        if idx.len() < MIN_RECORDS {
            notes.push(format!("{label}: {} records, skipped (need at least {MIN_RECORDS})", idx.len()));
            continue;
        }
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        groups.push(row(label, &pick(&predicted), &pick(&mapped), &pick(&subjective), &mut notes));
    }
    let overall = row("overall".into(), &predicted, &mapped, &subjective, &mut notes);
    Ok(EvalReport {
        logistic: fit.as_ref().map(|f| f.params),
        logistic_converged: fit.as_ref().map(|f| f.converged),
        overall,
        groups,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: usize, fps: u64, predicted: f64, subjective: f64) -> EvalRecord {
        EvalRecord {
            video_id: format!("v{id}"),
            fps: FrameRate::integer(fps).unwrap(),
            predicted,
            subjective,
            content_id: None,
        }
    }

    #[test]
    fn perfect_predictions() {
        let records: Vec<_> = (0..6).map(|i| rec(i, 60, 20.0 + 10.0 * i as f64, 20.0 + 10.0 * i as f64)).collect();
        let r = eval_report(&records).unwrap();
        assert_eq!(r.overall.srocc, Some(1.0));
        assert_eq!(r.overall.krocc, Some(1.0));
        assert!((r.overall.plcc.unwrap() - 1.0).abs() < 1e-3, "{:?}", r.overall);
        assert!(r.overall.rmse.unwrap() < 0.5, "{:?}", r.overall);
    }

    #[test]
    fn grouping() {
        let mut records: Vec<_> = (0..3).map(|i| rec(i, 30, i as f64, 10.0 * i as f64 + 1.0)).collect();
        records.extend((0..3).map(|i| rec(i + 3, 120, i as f64 + 0.5, 10.0 * i as f64 + 3.0)));
        let r = eval_report(&records).unwrap();
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.groups[0].label, "30 fps");
        assert_eq!(r.groups[1].label, "120 fps");
        assert_eq!(r.overall.n, 6);
        let table = r.to_table();
        assert_eq!(table.lines().filter(|l| l.contains("fps") || l.starts_with("overall")).count(), 3);
    }

    #[test]
    fn small_group_is_skipped() {
        let mut records: Vec<_> = (0..4).map(|i| rec(i, 60, i as f64, i as f64 * 2.0)).collect();
        records.extend((0..2).map(|i| rec(i + 4, 24, i as f64, i as f64 + 5.0)));
        let r = eval_report(&records).unwrap();
        assert_eq!(r.groups.len(), 1);
        assert!(r.notes.iter().any(|n| n.contains("24 fps") && n.contains("skipped")));
    }

    #[test]
    fn too_few() {
        let records: Vec<_> = (0..2).map(|i| rec(i, 60, i as f64, i as f64)).collect();
        assert!(matches!(eval_report(&records), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn csv_parsing() {
        let text = "video_id,fps,predicted,subjective,content_id\na,120,0.1,70.5,bball\nb,59.94,0.3,60,\n";
        let recs = read_records(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].content_id.as_deref(), Some("bball"));
        assert_eq!(recs[1].fps, FrameRate::new(5994, 100).unwrap());
        assert_eq!(recs[1].content_id, None);

        let short = "video_id,fps,predicted,subjective\nx,30,1.5,2\n";
        assert_eq!(read_records(short.as_bytes()).unwrap()[0].subjective, 2.0);

        for bad in ["id,fps,predicted,subjective\n", "video_id,fps,predicted\n", "video_id,fps,predicted,subjective\nx,30,abc,2\n"] {
            assert!(matches!(read_records(bad.as_bytes()), Err(Error::MalformedCsv(_))), "{bad}");
        }
    }
}
