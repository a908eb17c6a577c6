//! CSV event logs: streaming emission, parsing, and the activity encoding
//! shared by the miner and the graph diff.

use crate::rat::{format_rat, parse_rat};
use crate::sim::{SimOutcome, StepRecord};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

pub const HEADER: &str = "step,caseId,action,source,target,installed,vars";
const SEP: &str = "##";

/// Joins action, source state, and target state into a single activity name
/// for mining. [`decode_activity`] is its exact inverse.
pub fn encode_activity(action: &str, source: &str, target: &str) -> String {
    format!("{action}{SEP}{source}{SEP}{target}")
}

pub fn decode_activity(activity: &str) -> Option<(String, String, String)> {
    let parts: Vec<&str> = activity.split(SEP).collect();
    match parts.as_slice() {
        [a, s, t] => Some((a.to_string(), s.to_string(), t.to_string())),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn render_row(r: &StepRecord) -> String {
    let installed = r.installed.join(";");
    let vars = r
        .vars
        .iter()
        .map(|(k, v)| format!("{k}={}", format_rat(v)))
        .collect::<Vec<_>>()
        .join(";");
    format!(
        "{},{},{},{},{},{},{}",
        r.step,
        r.case_id,
        quote(&r.action),
        quote(&r.source),
        quote(&r.target),
        quote(&installed),
        quote(&vars)
    )
}

/// Streaming writer: header first, then one row per step record, LF line
/// endings throughout.
pub struct EventLogWriter<W: Write> {
    inner: W,
}

impl EventLogWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, LogError> {
        Self::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> EventLogWriter<W> {
    pub fn new(mut inner: W) -> Result<Self, LogError> {
        writeln!(inner, "{HEADER}")?;
        Ok(EventLogWriter { inner })
    }

    pub fn write_record(&mut self, r: &StepRecord) -> Result<(), LogError> {
        writeln!(self.inner, "{}", render_row(r))?;
        Ok(())
    }

    pub fn write_outcome(&mut self, outcome: &SimOutcome) -> Result<(), LogError> {
        for r in &outcome.records {
            self.write_record(r)?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), LogError> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_log(path: &Path, records: &[StepRecord]) -> Result<(), LogError> {
    let mut w = EventLogWriter::create(path)?;
    for r in records {
        w.write_record(r)?;
    }
    w.finish()
}

pub fn log_to_string(records: &[StepRecord]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&render_row(r));
        s.push('\n');
    }
    s
}

fn split_csv_line(line: &str, lineno: usize) -> Result<Vec<String>, LogError> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut in_quotes = false;
    while let Some(c) = chars.next() {
        if in_quotes {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    cur.push('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push(c);
            }
        } else {
            match c {
                '"' if cur.is_empty() => in_quotes = true,
                ',' => fields.push(std::mem::take(&mut cur)),
                _ => cur.push(c),
            }
        }
    }
    if in_quotes {
        return Err(LogError::Malformed {
            line: lineno,
            message: "unterminated quoted field".into(),
        });
    }
    fields.push(cur);
    Ok(fields)
}

pub fn parse_log(text: &str) -> Result<Vec<StepRecord>, LogError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => {
            return Err(LogError::Malformed {
                line: 1,
                message: format!("expected header `{HEADER}`"),
            });
        }
    }
    let mut out = Vec::new();
    let mut last_step: std::collections::BTreeMap<u64, u64> = Default::default();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let fields = split_csv_line(line, lineno)?;
        if fields.len() != 7 {
            return Err(LogError::Malformed {
                line: lineno,
                message: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let bad = |message: String| LogError::Malformed {
            line: lineno,
            message,
        };
        let step: u64 = fields[0]
            .parse()
            .map_err(|_| bad(format!("bad step `{}`", fields[0])))?;
        let case_id: u64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad caseId `{}`", fields[1])))?;
        if let Some(&prev) = last_step.get(&case_id) {
            if step <= prev {
                return Err(bad(format!(
                    "steps out of order in case {case_id}: {step} after {prev}"
                )));
            }
        }
        last_step.insert(case_id, step);
        let installed: Vec<String> = if fields[5].is_empty() {
            Vec::new()
        } else {
            fields[5].split(';').map(str::to_string).collect()
        };
        let mut vars = Vec::new();
        if !fields[6].is_empty() {
            for pair in fields[6].split(';') {
                let (name, value) = pair
                    .split_once('=')
                    .ok_or_else(|| bad(format!("bad var binding `{pair}`")))?;
                let value =
                    parse_rat(value).ok_or_else(|| bad(format!("bad var value `{value}`")))?;
                vars.push((name.to_string(), value));
            }
        }
        out.push(StepRecord {
            step,
            case_id,
            action: fields[2].clone(),
            source: fields[3].clone(),
            target: fields[4].clone(),
            installed,
            vars,
        });
    }
    Ok(out)
}

pub fn read_log(path: &Path) -> Result<Vec<StepRecord>, LogError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_log(&text)
}

/// Groups records into traces of encoded activities, ordered by case id.
pub fn preprocess(records: &[StepRecord]) -> Vec<(u64, Vec<String>)> {
    let mut traces: std::collections::BTreeMap<u64, Vec<String>> = Default::default();
    for r in records {
        traces
            .entry(r.case_id)
            .or_default()
            .push(encode_activity(&r.action, &r.source, &r.target));
    }
    traces.into_iter().collect()
}

/// Minimal XES rendering of the same traces, one event per step.
pub fn write_xes(path: &Path, records: &[StepRecord]) -> Result<(), LogError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>")?;
    writeln!(w, "<log xes.version=\"1.0\">")?;
    for (case, activities) in preprocess(records) {
        writeln!(w, "  <trace>")?;
        writeln!(w, "    <string key=\"concept:name\" value=\"{case}\"/>")?;
        for a in activities {
            writeln!(w, "    <event>")?;
            writeln!(
                w,
                "      <string key=\"concept:name\" value=\"{}\"/>",
                xml_escape(&a)
            )?;
            writeln!(w, "    </event>")?;
        }
        writeln!(w, "  </trace>")?;
    }
    writeln!(w, "</log>")?;
    w.flush()?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn sample() -> StepRecord {
        StepRecord {
            step: 1,
            case_id: 0,
            action: "replace(Coffee,Tea)".into(),
            source: "factory".into(),
            target: "factory".into(),
            installed: vec!["Machine".into(), "Tea".into()],
            vars: vec![("sold".into(), rat_int(0))],
        }
    }

    #[test]
    fn round_trip_bytes() {
        let records = vec![sample()];
        let text = log_to_string(&records);
        let parsed = parse_log(&text).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(log_to_string(&parsed), text);
    }

    #[test]
    fn comma_fields_quoted() {
        let text = log_to_string(&[sample()]);
        assert!(text.contains("\"replace(Coffee,Tea)\""));
    }

    #[test]
    fn activity_codec_inverse() {
        let a = encode_activity("sell", "factory", "deposit");
        assert_eq!(
            decode_activity(&a),
            Some(("sell".into(), "factory".into(), "deposit".into()))
        );
        assert_eq!(decode_activity("noseparator"), None);
    }
}
