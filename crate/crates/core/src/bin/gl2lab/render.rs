//! Report rendering. JSON is the stable format; CSV has one row per class
//! (scan), entry (cache stat) or report; text is for reading.

use std::fmt::Write as _;
use std::io;

use clap::ValueEnum;
use serde::Serialize;

use gl2lab::cache::CacheStat;
use gl2lab::classify::{ClassificationResult, ShapeLabel};
use gl2lab::scan::ScanReport;
use gl2lab::verify::VerifyReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Output {
    Classify(ClassificationResult),
    Verify(VerifyReport),
    Scan(ScanReport),
    CacheStat(CacheStat),
    CacheCleared { dir: String, removed: usize },
}

impl Output {
    pub fn failed(&self) -> bool {
        match self {
            Output::Verify(r) => !r.passed,
            Output::Scan(r) => r.failed(),
            _ => false,
        }
    }
}

pub fn render(output: &Output, format: Format) -> io::Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(output)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv_rows(output),
        Format::Text => Ok(text(output)),
    }
}

fn label_list(labels: &[ShapeLabel]) -> String {
    labels
        .iter()
        .map(|l| l.tag.name())
        .collect::<Vec<_>>()
        .join(";")
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

fn csv_rows(output: &Output) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match output {
        Output::Classify(r) => {
            w.write_record([
                "key",
                "labels",
                "projective_order",
                "is_abelian",
                "is_diagonalizable",
                "det_image_order",
            ])?;
            w.write_record([
                r.key.to_string(),
                label_list(&r.labels),
                r.projective_order.to_string(),
                r.is_abelian.to_string(),
                r.is_diagonalizable.to_string(),
                r.det_image_order.to_string(),
            ])?;
        }
        Output::Verify(r) => {
            w.write_record(["check", "params", "passed", "checked", "failures"])?;
            w.write_record([
                r.check.clone(),
                r.params.to_string(),
                r.passed.to_string(),
                r.checked.to_string(),
                r.failures.len().to_string(),
            ])?;
        }
        Output::Scan(r) => {
            w.write_record([
                "key",
                "order",
                "shapes",
                "exclusion",
                "admissible",
                "constraints_met",
                "labels",
                "conclusion_ok",
            ])?;
            for c in &r.classes {
                let shapes: Vec<&str> = c.shapes.iter().map(|s| s.name()).collect();
                let met: Vec<String> = c
                    .constraints_met
                    .iter()
                    .map(|h| h.constraint.to_string())
                    .collect();
                w.write_record([
                    c.key.to_string(),
                    c.order.to_string(),
                    shapes.join(";"),
                    opt(&c.exclusion),
                    c.admissible.to_string(),
                    met.join(";"),
                    label_list(&c.labels),
                    opt(&c.conclusion_ok),
                ])?;
            }
        }
        Output::CacheStat(s) => {
            w.write_record(["file", "family", "p", "subgroups", "bytes", "valid"])?;
            for e in &s.entries {
                w.write_record([
                    e.file.clone(),
                    opt(&e.family.map(|f| f.name())),
                    opt(&e.p),
                    opt(&e.subgroups),
                    e.bytes.to_string(),
                    e.valid.to_string(),
                ])?;
            }
        }
        Output::CacheCleared { dir, removed } => {
            w.write_record(["dir", "removed"])?;
            w.write_record([dir.clone(), removed.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    String::from_utf8(bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

fn text(output: &Output) -> String {
    let mut s = String::new();
    match output {
        Output::Classify(r) => {
            let _ = writeln!(s, "labels:");
            for l in &r.labels {
                match &l.witness {
                    Some(m) => {
                        let _ = writeln!(s, "  {} (witness {m})", l.tag.name());
                    }
                    None => {
                        let _ = writeln!(s, "  {}", l.tag.name());
                    }
                }
            }
            let _ = writeln!(
                s,
                "projective order {}, abelian {}, diagonalizable {}, |det G| = {}",
                r.projective_order, r.is_abelian, r.is_diagonalizable, r.det_image_order
            );
        }
        Output::Verify(r) => {
            let _ = writeln!(
                s,
                "{} {}: {} ({} checked, {} failures)",
                r.check,
                r.params,
                if r.passed { "PASS" } else { "FAIL" },
                r.checked,
                r.failures.len()
            );
            for f in &r.failures {
                let _ = writeln!(
                    s,
                    "  {}{}",
                    f.key
                        .as_ref()
                        .map(|k| format!("[{k}] "))
                        .unwrap_or_default(),
                    f.reason
                );
            }
        }
        Output::Scan(r) => {
            let p = &r.params;
            let _ = writeln!(
                s,
                "{} scan p={} d={} {}: {} classes, {} excluded, {} admissible, {} violations{}",
                p.mode,
                p.p,
                p.d,
                if p.ramified { "ramified" } else { "unramified" },
                r.totals.classes,
                r.totals.excluded,
                r.totals.admissible,
                r.totals.violations,
                if r.asserted {
                    ""
                } else {
                    " (descriptive, not asserted)"
                }
            );
            for c in r.classes.iter().filter(|c| c.admissible) {
                let met: Vec<String> = c
                    .constraints_met
                    .iter()
                    .map(|h| h.constraint.to_string())
                    .collect();
                let _ = writeln!(
                    s,
                    "  order {:>5}  {}  ok={}  [{}]",
                    c.order,
                    label_list(&c.labels),
                    opt(&c.conclusion_ok),
                    met.join(", ")
                );
            }
            for v in &r.violations {
                let _ = writeln!(s, "  VIOLATION {}: {}", v.key, v.reason);
            }
            for c in &r.constraint_summary {
                let _ = writeln!(
                    s,
                    "  {:<40} satisfied by {}",
                    c.constraint.to_string(),
                    c.satisfied_by
                );
            }
        }
        Output::CacheStat(st) => {
            let _ = writeln!(
                s,
                "{}: {} entries, {} bytes",
                st.dir,
                st.entries.len(),
                st.total_bytes
            );
            for e in &st.entries {
                let _ = writeln!(
                    s,
                    "  {} {} bytes{}",
                    e.file,
                    e.bytes,
                    if e.valid { "" } else { " (invalid)" }
                );
            }
        }
        Output::CacheCleared { dir, removed } => {
            let _ = writeln!(s, "{dir}: removed {removed} entries");
        }
    }
    s
}
