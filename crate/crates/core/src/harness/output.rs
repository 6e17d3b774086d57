//! Result files: line-delimited JSON records and flat CSV tables, each
//! starting with a schema line.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::run::{IterationRecord, PhaseTimings, RunHistory, RunMeta};

pub const SCHEMA_VERSION: u32 = 1;
pub const HISTORY_FILE: &str = "history.jsonl";
pub const TIMINGS_FILE: &str = "timings.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SERIES_FILE: &str = "series.csv";

#[derive(Debug, Serialize, Deserialize)]
struct Header<M> {
    schema: String,
    version: u32,
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    meta: Option<M>,
}

fn parse_err(path: &Path, line: usize, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}:{}: {e}", path.display(), line))
}

/// Writes a header line followed by one JSON object per row.
pub fn write_jsonl<M: Serialize, T: Serialize>(
    path: &Path,
    schema: &str,
    meta: Option<&M>,
    rows: &[T],
) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    let header = Header {
        schema: schema.to_string(),
        version: SCHEMA_VERSION,
        meta,
    };
    writeln!(w, "{}", json_line(&header)?)?;
    for r in rows {
        writeln!(w, "{}", json_line(r)?)?;
    }
    w.flush()?;
    Ok(())
}

fn json_line<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a file written by [`write_jsonl`], checking its schema and version.
pub fn read_jsonl<M: DeserializeOwned, T: DeserializeOwned>(
    path: &Path,
    schema: &str,
) -> Result<(Option<M>, Vec<T>)> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let Some((_, first)) = lines.next() else {
        return Err(parse_err(path, 1, "empty file"));
    };
    let header: Header<M> = serde_json::from_str(&first?).map_err(|e| parse_err(path, 1, e))?;
    if header.schema != schema || header.version != SCHEMA_VERSION {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected schema {schema} v{SCHEMA_VERSION}, found {} v{}",
                header.schema, header.version
            ),
        ));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| parse_err(path, i + 1, e))?);
    }
    Ok((header.meta, rows))
}

/// Writes `# schema vN` and then a CSV table with a header row.
pub fn write_csv<T: Serialize>(path: &Path, schema: &str, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = BufWriter::new(fs::File::create(path)?);
    writeln!(file, "# {schema} v{SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<Vec<T>> {
    let text = fs::read_to_string(path)?;
    let (first, body) = text.split_once('\n').unwrap_or((&text, ""));
    let want = format!("# {schema} v{SCHEMA_VERSION}");
    if first.trim_end() != want {
        return Err(parse_err(path, 1, format!("expected {want:?}, found {first:?}")));
    }
    csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| parse_err(path, i + 3, e)))
        .collect()
}

/// One finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub strategy: String,
    pub seed: u64,
    pub iterations: usize,
    pub observations: usize,
    pub final_hypervolume: f64,
    pub final_rhv: f64,
}

impl SummaryRow {
    pub fn from_history(h: &RunHistory) -> Self {
        Self {
            problem: h.meta.problem.clone(),
            strategy: h.meta.strategy.to_string(),
            seed: h.meta.seed,
            iterations: h.meta.iterations,
            observations: h.observations(),
            final_hypervolume: h.final_hypervolume(),
            final_rhv: h.final_rhv(),
        }
    }
}

/// RHV mean and sample standard deviation across seeds at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub problem: String,
    pub strategy: String,
    pub iteration: usize,
    pub runs: usize,
    pub rhv_mean: f64,
    pub rhv_sd: f64,
}

/// Aggregates RHV per iteration over all runs sharing a problem and strategy.
pub fn rhv_series(histories: &[RunHistory]) -> Vec<SeriesRow> {
    let mut groups: BTreeMap<(String, String), Vec<Vec<f64>>> = BTreeMap::new();
    for h in histories {
        groups
            .entry((h.meta.problem.clone(), h.meta.strategy.to_string()))
            .or_default()
            .push(h.rhv_by_iteration());
    }
    let mut rows = Vec::new();
    for ((problem, strategy), runs) in groups {
        let len = runs.iter().map(|r| r.len()).min().unwrap_or(0);
        for t in 0..len {
            let vals: Vec<f64> = runs.iter().map(|r| r[t]).collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let sd = if vals.len() > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            rows.push(SeriesRow {
                problem: problem.clone(),
                strategy: strategy.clone(),
                iteration: t,
                runs: vals.len(),
                rhv_mean: mean,
                rhv_sd: sd,
            });
        }
    }
    rows
}

/// Writes `history.jsonl`, `timings.jsonl`, `summary.csv` and `series.csv` into `dir`.
pub fn emit_results(history: &RunHistory, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_jsonl(
        &dir.join(HISTORY_FILE),
        "pfev-history",
        Some(&history.meta),
        &history.records,
    )?;
    write_jsonl::<(), _>(&dir.join(TIMINGS_FILE), "pfev-timings", None, &history.timings)?;
    write_csv(
        &dir.join(SUMMARY_FILE),
        "pfev-summary",
        &[SummaryRow::from_history(history)],
    )?;
    write_csv(
        &dir.join(SERIES_FILE),
        "pfev-series",
        &rhv_series(std::slice::from_ref(history)),
    )
}

/// Reads a run directory written by [`emit_results`]; timings are optional.
pub fn read_results(dir: &Path) -> Result<RunHistory> {
    let (meta, records): (Option<RunMeta>, Vec<IterationRecord>) =
        read_jsonl(&dir.join(HISTORY_FILE), "pfev-history")?;
    let meta = meta.ok_or_else(|| Error::Parse("history file has no run metadata".into()))?;
    let timings_path = dir.join(TIMINGS_FILE);
    let timings: Vec<PhaseTimings> = if timings_path.exists() {
        read_jsonl::<(), _>(&timings_path, "pfev-timings")?.1
    } else {
        Vec::new()
    };
    Ok(RunHistory {
        meta,
        records,
        timings,
    })
}
