//! CSV ingestion and export.
//!
//! Timestamps are either RFC3339 or integer epoch seconds; the format is
//! detected from the first data row and must hold for the whole file. Missing
//! rows and empty cells are repaired by linear interpolation when a gap spans
//! at most [`MAX_REPAIRABLE_GAP`] samples.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use indexmap::IndexMap;

use super::{UniformSeries, WeatherTable, REQUIRED_CHANNELS, SOP_UNIT};
use crate::error::{Error, Result};

pub const MAX_REPAIRABLE_GAP: usize = 4;

const SOP_COLUMN: &str = "sop_rad_per_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TimeFormat {
    Epoch,
    Rfc3339,
}

fn detect_format(raw: &str) -> TimeFormat {
    if raw.trim().parse::<i64>().is_ok() {
        TimeFormat::Epoch
    } else {
        TimeFormat::Rfc3339
    }
}

fn parse_timestamp_as(raw: &str, fmt: TimeFormat, row: usize) -> Result<i64> {
    let raw = raw.trim();
    match fmt {
        TimeFormat::Epoch => raw
            .parse::<i64>()
            .map_err(|_| Error::Ingestion(format!("row {row}: expected epoch seconds, got `{raw}`"))),
        TimeFormat::Rfc3339 => {
            let dt = DateTime::parse_from_rfc3339(raw)
                .map_err(|e| Error::Ingestion(format!("row {row}: bad timestamp `{raw}`: {e}")))?;
            if dt.timestamp_subsec_nanos() != 0 {
                return Err(Error::Ingestion(format!(
                    "row {row}: sub-second timestamps are not supported"
                )));
            }
            Ok(dt.timestamp())
        }
    }
}

/// Epoch seconds or RFC3339, as accepted in CSV files.
pub fn parse_timestamp(raw: &str) -> Result<i64> {
    parse_timestamp_as(raw, detect_format(raw), 0)
        .map_err(|_| Error::InvalidParameter(format!("bad timestamp `{}`", raw.trim())))
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64> {
    let raw = raw.trim();
    if raw.is_empty() || raw.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::Ingestion(format!("row {row}: bad number `{raw}` in `{column}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Ingestion(format!("row {row}: non-finite value in `{column}`")))
    }
}

/// Fills NaN runs of length `<= max_gap` by linear interpolation between the
/// neighbouring valid samples. Returns the number of filled samples.
pub fn repair_gaps(values: &mut [f64], max_gap: usize) -> Result<usize> {
    let n = values.len();
    let mut filled = 0;
    let mut i = 0;
    while i < n {
        if !values[i].is_nan() {
            i += 1;
            continue;
        }
        let from = i;
        while i < n && values[i].is_nan() {
            i += 1;
        }
        let len = i - from;
        if from == 0 || i == n {
            return Err(Error::Ingestion(format!(
                "gap of {len} samples at index {from} touches the series boundary"
            )));
        }
        if len > max_gap {
            return Err(Error::Ingestion(format!(
                "gap of {len} samples at index {from} exceeds the repairable limit of {max_gap}"
            )));
        }
        let (a, b) = (values[from - 1], values[i]);
        for k in 0..len {
            let frac = (k + 1) as f64 / (len + 1) as f64;
            values[from + k] = a + frac * (b - a);
        }
        filled += len;
    }
    Ok(filled)
}

/// Parsed CSV: timestamps plus one column per value field.
struct RawTable {
    times: Vec<i64>,
    columns: IndexMap<String, Vec<f64>>,
}

fn read_table<R: Read>(reader: R, required: &[&str]) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("timestamp") {
        return Err(Error::Ingestion("first column must be `timestamp`".into()));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    for r in required {
        if !names.iter().any(|n| n == r) {
            return Err(Error::MissingChannel(r.to_string()));
        }
    }
    let mut times = Vec::new();
    let mut columns: IndexMap<String, Vec<f64>> =
        names.iter().map(|n| (n.clone(), Vec::new())).collect();
    let mut fmt = None;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row + 2;
        if rec.len() != names.len() + 1 {
            return Err(Error::Ingestion(format!(
                "row {row}: expected {} fields, got {}",
                names.len() + 1,
                rec.len()
            )));
        }
        let fmt = *fmt.get_or_insert_with(|| detect_format(&rec[0]));
        times.push(parse_timestamp_as(&rec[0], fmt, row)?);
        for (k, name) in names.iter().enumerate() {
            columns[name].push(parse_cell(&rec[k + 1], row, name)?);
        }
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData("CSV needs at least two data rows".into()));
    }
    Ok(RawTable { times, columns })
}

/// Places rows on a uniform grid (the most common spacing), marks missing
/// rows as NaN and repairs short gaps.
fn regularize(raw: RawTable) -> Result<(i64, i64, IndexMap<String, Vec<f64>>)> {
    let times = &raw.times;
    let mut diffs = Vec::with_capacity(times.len() - 1);
    for (k, w) in times.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d <= 0 {
            return Err(Error::Ingestion(format!(
                "timestamps must be strictly increasing (row {})",
                k + 3
            )));
        }
        diffs.push(d);
    }
    let mut counts: IndexMap<i64, usize> = IndexMap::new();
    for &d in &diffs {
        *counts.entry(d).or_default() += 1;
    }
    let step = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(d, _)| *d)
        .expect("at least one difference");
    let start = times[0];
    let span = times[times.len() - 1] - start;
    if let Some(d) = diffs.iter().find(|&&d| d % step != 0) {
        return Err(Error::Ingestion(format!(
            "irregular spacing: {d} s is not a multiple of the {step} s step"
        )));
    }
    let len = (span / step) as usize + 1;
    let mut out = IndexMap::new();
    for (name, col) in raw.columns {
        let mut v = vec![f64::NAN; len];
        for (t, x) in times.iter().zip(col) {
            v[((t - start) / step) as usize] = x;
        }
        repair_gaps(&mut v, MAX_REPAIRABLE_GAP)
            .map_err(|e| Error::Ingestion(format!("column `{name}`: {e}")))?;
        out.insert(name, v);
    }
    Ok((start, step, out))
}

pub fn read_sop_from<R: Read>(reader: R) -> Result<UniformSeries> {
    let raw = read_table(reader, &[SOP_COLUMN])?;
    let (start, step, mut cols) = regularize(raw)?;
    let values = cols.swap_remove(SOP_COLUMN).expect("checked above");
    UniformSeries::new(start, step, values, SOP_UNIT)
}

pub fn read_weather_from<R: Read>(reader: R) -> Result<WeatherTable> {
    let raw = read_table(reader, &REQUIRED_CHANNELS)?;
    let (start, step, cols) = regularize(raw)?;
    WeatherTable::new(start, step, cols)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Ingestion(format!("{}: {e}", path.display())))
}

pub fn read_sop_csv(path: impl AsRef<Path>) -> Result<UniformSeries> {
    read_sop_from(open(path.as_ref())?)
}

pub fn read_weather_csv(path: impl AsRef<Path>) -> Result<WeatherTable> {
    read_weather_from(open(path.as_ref())?)
}

pub fn format_timestamp(t: i64) -> String {
    DateTime::<Utc>::from_timestamp(t, 0)
        .map(|d| d.to_rfc3339_opts(SecondsFormat::Secs, true))
        .unwrap_or_else(|| t.to_string())
}

pub fn write_sop_to<W: Write>(writer: W, s: &UniformSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["timestamp", SOP_COLUMN])?;
    for (i, v) in s.values().iter().enumerate() {
        w.write_record([format_timestamp(s.timestamp(i)), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_weather_to<W: Write>(writer: W, table: &WeatherTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["timestamp".to_string()];
    header.extend(table.channel_names().map(str::to_string));
    w.write_record(&header)?;
    for i in 0..table.len() {
        let mut rec = vec![format_timestamp(table.timestamp(i))];
        rec.extend(table.channels().values().map(|c| c[i].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sop_csv(path: impl AsRef<Path>, s: &UniformSeries) -> Result<()> {
    write_sop_to(File::create(path)?, s)
}

pub fn write_weather_csv(path: impl AsRef<Path>, table: &WeatherTable) -> Result<()> {
    write_weather_to(File::create(path)?, table)
}
