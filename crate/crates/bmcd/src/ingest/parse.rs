//! Station file formats.
//!
//! Two formats are supported:
//!
//! - `ecad`: the fixed-column blended-series text format used by the
//!   European Climate Assessment & Dataset. Rows read
//!   `STAID, SOUID, DATE, RR, Q_RR` with DATE as YYYYMMDD and RR in
//!   0.1 mm; any free-text preamble before the column header is skipped.
//!   RR = -9999, a negative RR, or Q_RR = 9 mark the day missing.
//! - `generic_csv`: `station_id,date,precip_mm` with ISO-8601 dates and
//!   the literal `NA` for missing days; an optional header row is
//!   tolerated.
//!
//! Date holes in either format become missing days so that the assembled
//! series is strictly daily; non-monotone dates are a hard error.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use super::{DailySeries, IngestError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Ecad,
    GenericCsv,
}

impl std::str::FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ecad" => Ok(InputFormat::Ecad),
            "generic_csv" | "csv" => Ok(InputFormat::GenericCsv),
            other => Err(format!("unknown input format: {other}")),
        }
    }
}

pub fn parse_station_file(path: &Path, format: InputFormat) -> Result<DailySeries, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let path_str = path.display().to_string();
    match format {
        InputFormat::Ecad => parse_ecad(&path_str, &text),
        InputFormat::GenericCsv => parse_generic_csv(&path_str, &text),
    }
}

struct Row {
    date: NaiveDate,
    value: Option<f64>,
    line: usize,
}

fn assemble(path: &str, station_id: String, rows: Vec<Row>) -> Result<DailySeries, IngestError> {
    let mut rows = rows.into_iter();
    let first = rows.next().ok_or_else(|| IngestError::Empty { path: path.to_string() })?;
    let start = first.date;
    let mut values = vec![first.value];
    let mut prev = first.date;
    for row in rows {
        if row.date <= prev {
            return Err(IngestError::NonMonotoneDates { path: path.to_string(), line: row.line });
        }
        let hole = (row.date - prev).num_days() - 1;
        for _ in 0..hole {
            values.push(None);
        }
        values.push(row.value);
        prev = row.date;
    }
    Ok(DailySeries { station_id, start, values })
}

fn parse_ecad(path: &str, text: &str) -> Result<DailySeries, IngestError> {
    let mut rows = Vec::new();
    let mut station_id: Option<String> = None;
    let mut in_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !in_data {
            let head = line.trim_start_matches(',').trim();
            if head.starts_with("STAID") {
                in_data = true;
                continue;
            }
            // preamble until something parses as data
            if let Ok(row) = parse_ecad_row(line, line_no) {
                in_data = true;
                station_id.get_or_insert_with(|| row.0.clone());
                rows.push(row.1);
            }
            continue;
        }
        let (staid, row) = parse_ecad_row(line, line_no).map_err(|message| IngestError::Parse {
            path: path.to_string(),
            line: line_no,
            message,
        })?;
        station_id.get_or_insert(staid);
        rows.push(row);
    }
    let station_id = station_id.ok_or_else(|| IngestError::Empty { path: path.to_string() })?;
    assemble(path, station_id, rows)
}

fn parse_ecad_row(line: &str, line_no: usize) -> Result<(String, Row), String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(format!("expected 5 fields, found {}", fields.len()));
    }
    let staid: i64 = fields[0].parse().map_err(|_| format!("bad STAID {:?}", fields[0]))?;
    let _souid: i64 = fields[1].parse().map_err(|_| format!("bad SOUID {:?}", fields[1]))?;
    let date = parse_yyyymmdd(fields[2])?;
    let rr: i64 = fields[3].parse().map_err(|_| format!("bad RR {:?}", fields[3]))?;
    let q_rr: i64 = fields[4].parse().map_err(|_| format!("bad Q_RR {:?}", fields[4]))?;
    // RR is in 0.1 mm; -9999 (or any negative amount) and Q_RR = 9 are missing
    let value = if rr < 0 || q_rr == 9 { None } else { Some(rr as f64 / 10.0) };
    Ok((staid.to_string(), Row { date, value, line: line_no }))
}

fn parse_yyyymmdd(s: &str) -> Result<NaiveDate, String> {
    if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad DATE {s:?}"));
    }
    let y: i32 = s[0..4].parse().unwrap();
    let m: u32 = s[4..6].parse().unwrap();
    let d: u32 = s[6..8].parse().unwrap();
    NaiveDate::from_ymd_opt(y, m, d).ok_or_else(|| format!("invalid calendar date {s:?}"))
}

fn parse_generic_csv(path: &str, text: &str) -> Result<DailySeries, IngestError> {
    let mut rows = Vec::new();
    let mut station_id: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line_no == 1 && line.eq_ignore_ascii_case("station_id,date,precip_mm") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(IngestError::Parse {
                path: path.to_string(),
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let date = NaiveDate::parse_from_str(fields[1], "%Y-%m-%d").map_err(|_| {
            IngestError::Parse {
                path: path.to_string(),
                line: line_no,
                message: format!("bad date {:?}", fields[1]),
            }
        })?;
        let value = if fields[2].eq_ignore_ascii_case("na") {
            None
        } else {
            let v: f64 = fields[2].parse().map_err(|_| IngestError::Parse {
                path: path.to_string(),
                line: line_no,
                message: format!("bad precipitation {:?}", fields[2]),
            })?;
            // out-of-range amounts are treated as missing
            if v.is_finite() && v >= 0.0 {
                Some(v)
            } else {
                None
            }
        };
        station_id.get_or_insert_with(|| fields[0].to_string());
        rows.push(Row { date, value, line: line_no });
    }
    let station_id = station_id.ok_or_else(|| IngestError::Empty { path: path.to_string() })?;
    assemble(path, station_id, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("bmcd-parse-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn ecad_preamble_units_and_sentinels() {
        let content = "\
EUROPEAN CLIMATE ASSESSMENT & DATASET (ECA&D)

THIS IS FREE TEXT, 12345 numbers do not fool the parser

 STAID, SOUID,    DATE,   RR, Q_RR
   229,   709,19950301,   64,    0
   229,   709,19950302,-9999,    9
   229,   709,19950303,   35,    9
   229,   709,19950304,    0,    0
";
        let path = write_temp("ecad_basic.txt", content);
        let s = parse_station_file(&path, InputFormat::Ecad).unwrap();
        assert_eq!(s.station_id, "229");
        assert_eq!(s.start, date(1995, 3, 1));
        // RR = 64 in 0.1 mm units -> 6.4 mm; Q_RR = 9 -> missing
        assert_eq!(s.values, vec![Some(6.4), None, None, Some(0.0)]);
    }

    #[test]
    fn ecad_date_hole_becomes_missing() {
        let content = "\
 STAID, SOUID,    DATE,   RR, Q_RR
     7,     1,20000101,   10,    0
     7,     1,20000104,   20,    0
";
        let path = write_temp("ecad_hole.txt", content);
        let s = parse_station_file(&path, InputFormat::Ecad).unwrap();
        assert_eq!(s.values, vec![Some(1.0), None, None, Some(2.0)]);
    }

    #[test]
    fn ecad_non_monotone_is_hard_error() {
        let content = "\
 STAID, SOUID,    DATE,   RR, Q_RR
     7,     1,20000102,   10,    0
     7,     1,20000101,   20,    0
";
        let path = write_temp("ecad_mono.txt", content);
        match parse_station_file(&path, InputFormat::Ecad) {
            Err(IngestError::NonMonotoneDates { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected date error, got {other:?}"),
        }
    }

    #[test]
    fn ecad_malformed_data_line_reports_line_number() {
        let content = "\
 STAID, SOUID,    DATE,   RR, Q_RR
     7,     1,20000101,   10,    0
     7,     1,20000102,   oops,    0
";
        let path = write_temp("ecad_bad.txt", content);
        match parse_station_file(&path, InputFormat::Ecad) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn generic_csv_identity_parse() {
        let content = "\
station_id,date,precip_mm
P001,1995-03-02,0.0
P001,1995-03-03,NA
P001,1995-03-04,12.5
";
        let path = write_temp("generic.csv", content);
        let s = parse_station_file(&path, InputFormat::GenericCsv).unwrap();
        assert_eq!(s.station_id, "P001");
        assert_eq!(s.start, date(1995, 3, 2));
        assert_eq!(s.values, vec![Some(0.0), None, Some(12.5)]);
    }

    #[test]
    fn generic_csv_negative_is_missing() {
        let content = "P2,2001-06-01,-3.5\nP2,2001-06-02,1.0\n";
        let path = write_temp("generic_neg.csv", content);
        let s = parse_station_file(&path, InputFormat::GenericCsv).unwrap();
        assert_eq!(s.values, vec![None, Some(1.0)]);
    }

    #[test]
    fn empty_file_is_reported() {
        let path = write_temp("empty.csv", "");
        assert!(matches!(
            parse_station_file(&path, InputFormat::GenericCsv),
            Err(IngestError::Empty { .. })
        ));
    }
}
