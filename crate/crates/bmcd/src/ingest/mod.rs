//! Station-file ingestion: daily precipitation series -> per-season spell
//! datasets.
//!
//! The pipeline is fill_gaps -> threshold_occurrence -> extract_spells ->
//! build_dataset. Missing-value runs of up to three days are linearly
//! interpolated; longer runs (and runs touching a series boundary, where
//! no bracketing value exists) split the series. A day is wet when its
//! precipitation is strictly above the threshold (0.6 mm by default). The
//! first and last spell of every contiguous segment are dropped as
//! potentially censored, and each surviving spell is stamped with the
//! season and year of its start date.

mod parse;

pub use parse::{parse_station_file, InputFormat};

use std::collections::BTreeMap;

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_WET_THRESHOLD_MM: f64 = 0.6;
pub const DEFAULT_MIN_YEARS: usize = 30;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}:{line}: dates are not strictly increasing")]
    NonMonotoneDates { path: String, line: usize },
    #[error("{path}: no data rows")]
    Empty { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Season {
    pub fn from_month(month: u32) -> Self {
        match month {
            12 | 1 | 2 => Season::Winter,
            3..=5 => Season::Spring,
            6..=8 => Season::Summer,
            9..=11 => Season::Autumn,
            _ => unreachable!("month out of range: {month}"),
        }
    }

    pub fn of(date: NaiveDate) -> Self {
        Self::from_month(date.month())
    }

    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Autumn, Season::Winter];

    pub fn as_str(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Autumn => "autumn",
        }
    }
}

impl std::str::FromStr for Season {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "winter" => Ok(Season::Winter),
            "spring" => Ok(Season::Spring),
            "summer" => Ok(Season::Summer),
            "autumn" | "fall" => Ok(Season::Autumn),
            other => Err(format!("unknown season: {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpellKind {
    Dry,
    Wet,
}

impl SpellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpellKind::Dry => "dry",
            SpellKind::Wet => "wet",
        }
    }
}

/// One station's daily record. Values are stored densely from `start`,
/// one slot per calendar day, `None` marking missing days (including
/// date holes in the input file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySeries {
    pub station_id: String,
    pub start: NaiveDate,
    pub values: Vec<Option<f64>>,
}

impl DailySeries {
    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start
            .checked_add_days(Days::new(index as u64))
            .expect("date within calendar range")
    }

    pub fn recorded_days(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Drop everything before `cutoff` (the analysis-period filter).
    pub fn trim_before(&mut self, cutoff: NaiveDate) {
        if self.start >= cutoff {
            return;
        }
        let skip = (cutoff - self.start).num_days() as usize;
        if skip >= self.values.len() {
            self.values.clear();
            self.start = cutoff;
        } else {
            self.values.drain(..skip);
            self.start = cutoff;
        }
    }
}

/// A maximal contiguous run of recorded (or interpolated) values.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordedRun {
    pub start: NaiveDate,
    pub values: Vec<f64>,
}

/// A run thresholded into wet/dry states (true = wet).
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceSegment {
    pub start: NaiveDate,
    pub states: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpellRecord {
    pub kind: SpellKind,
    pub duration: u32,
    pub start_date: NaiveDate,
    pub season: Season,
    pub year: i32,
}

impl SpellRecord {
    pub fn end_date(&self) -> NaiveDate {
        self.start_date
            .checked_add_days(Days::new(u64::from(self.duration)))
            .expect("date within calendar range")
    }
}

/// Estimation sample for one (station, season).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpellDataset {
    pub station_id: String,
    pub season: Season,
    pub dry: Vec<SpellRecord>,
    pub wet: Vec<SpellRecord>,
    /// Within-year (dry, wet) duration pairs in temporal order; only
    /// temporally adjacent dry->wet pairs form a cycle.
    pub cycles_per_year: BTreeMap<i32, Vec<(u32, u32)>>,
}

impl SpellDataset {
    pub fn dry_durations(&self) -> Vec<u32> {
        self.dry.iter().map(|s| s.duration).collect()
    }

    pub fn wet_durations(&self) -> Vec<u32> {
        self.wet.iter().map(|s| s.duration).collect()
    }

    pub fn cycles_as_vec(&self) -> Vec<Vec<(u32, u32)>> {
        self.cycles_per_year.values().cloned().collect()
    }
}

/// Station-level gate: accepted datasets or the rejection record.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetOutcome {
    Accepted(SpellDataset),
    Rejected { cumulative_years: usize, required: usize },
}

/// Split a series into recorded runs, interpolating interior missing runs
/// of up to three days and splitting on longer (or boundary) ones.
pub fn fill_gaps(series: &DailySeries) -> Vec<RecordedRun> {
    let mut runs: Vec<RecordedRun> = Vec::new();
    let mut current: Option<RecordedRun> = None;
    let mut pending_missing = 0usize;

    for (idx, value) in series.values.iter().enumerate() {
        match value {
            None => pending_missing += 1,
            Some(v) => {
                match current.as_mut() {
                    Some(run) if pending_missing == 0 => run.values.push(*v),
                    Some(run) if pending_missing <= 3 => {
                        let a = *run.values.last().expect("run is non-empty");
                        let g = pending_missing as f64;
                        for t in 1..=pending_missing {
                            run.values.push(a + (v - a) * t as f64 / (g + 1.0));
                        }
                        run.values.push(*v);
                    }
                    Some(_) => {
                        // gap of four or more days: split
                        runs.extend(current.take());
                        current = Some(RecordedRun {
                            start: series.date_at(idx),
                            values: vec![*v],
                        });
                    }
                    None => {
                        // leading gap (if any) cannot be interpolated
                        current = Some(RecordedRun {
                            start: series.date_at(idx),
                            values: vec![*v],
                        });
                    }
                }
                pending_missing = 0;
            }
        }
    }
    runs.extend(current);
    runs
}

/// Threshold a run into wet/dry states: wet iff precip strictly above
/// `wet_threshold_mm`.
pub fn threshold_occurrence(run: &RecordedRun, wet_threshold_mm: f64) -> OccurrenceSegment {
    assert!(!run.values.is_empty());
    OccurrenceSegment {
        start: run.start,
        states: run.values.iter().map(|&v| v > wet_threshold_mm).collect(),
    }
}

/// Run-length encode a segment into spells, dropping the first and last
/// (potentially censored by the segment boundaries). Segments with at most
/// two runs yield nothing.
pub fn extract_spells(segment: &OccurrenceSegment) -> Vec<SpellRecord> {
    assert!(!segment.states.is_empty());
    // (state, start offset, length)
    let mut runs: Vec<(bool, usize, u32)> = Vec::new();
    for (offset, &state) in segment.states.iter().enumerate() {
        match runs.last_mut() {
            Some((s, _, len)) if *s == state => *len += 1,
            _ => runs.push((state, offset, 1)),
        }
    }
    if runs.len() <= 2 {
        return Vec::new();
    }
    runs[1..runs.len() - 1]
        .iter()
        .map(|&(state, offset, len)| {
            let start_date = segment
                .start
                .checked_add_days(Days::new(offset as u64))
                .expect("date within calendar range");
            SpellRecord {
                kind: if state { SpellKind::Wet } else { SpellKind::Dry },
                duration: len,
                start_date,
                season: Season::of(start_date),
                year: start_date.year(),
            }
        })
        .collect()
}

/// Group one station's spells into the dataset for `season`, gating on the
/// station's cumulative coverage (number of distinct calendar years with
/// at least one spell, across all seasons).
pub fn build_dataset(
    station_id: &str,
    spells: &[SpellRecord],
    season: Season,
    min_years: usize,
) -> DatasetOutcome {
    let mut years: Vec<i32> = spells.iter().map(|s| s.year).collect();
    years.sort_unstable();
    years.dedup();
    if years.len() < min_years {
        return DatasetOutcome::Rejected { cumulative_years: years.len(), required: min_years };
    }

    let mut seasonal: Vec<&SpellRecord> =
        spells.iter().filter(|s| s.season == season).collect();
    seasonal.sort_by_key(|s| s.start_date);

    let mut dry = Vec::new();
    let mut wet = Vec::new();
    let mut cycles_per_year: BTreeMap<i32, Vec<(u32, u32)>> = BTreeMap::new();
    for s in &seasonal {
        match s.kind {
            SpellKind::Dry => dry.push(**s),
            SpellKind::Wet => wet.push(**s),
        }
    }
    let mut i = 0;
    while i + 1 < seasonal.len() {
        let (a, b) = (seasonal[i], seasonal[i + 1]);
        if a.kind == SpellKind::Dry
            && b.kind == SpellKind::Wet
            && a.end_date() == b.start_date
            && a.year == b.year
        {
            cycles_per_year
                .entry(a.year)
                .or_default()
                .push((a.duration, b.duration));
            i += 2;
        } else {
            i += 1;
        }
    }

    DatasetOutcome::Accepted(SpellDataset {
        station_id: station_id.to_string(),
        season,
        dry,
        wet,
        cycles_per_year,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn series(values: Vec<Option<f64>>) -> DailySeries {
        DailySeries { station_id: "TST".into(), start: date(1990, 3, 1), values }
    }

    #[test]
    fn interior_gap_interpolates() {
        let s = series(vec![Some(2.0), None, Some(4.0)]);
        let runs = fill_gaps(&s);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].values, vec![2.0, 3.0, 4.0]);
        assert_eq!(runs[0].start, date(1990, 3, 1));
    }

    #[test]
    fn three_day_gap_interpolates_linearly() {
        let s = series(vec![Some(0.0), None, None, None, Some(4.0)]);
        let runs = fill_gaps(&s);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].values, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn four_day_gap_splits() {
        let s = series(vec![Some(2.0), None, None, None, None, Some(4.0)]);
        let runs = fill_gaps(&s);
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].values, vec![2.0]);
        assert_eq!(runs[1].values, vec![4.0]);
        assert_eq!(runs[1].start, date(1990, 3, 6));
    }

    #[test]
    fn boundary_gaps_split_regardless_of_length() {
        let s = series(vec![None, None, Some(1.0)]);
        let runs = fill_gaps(&s);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].values, vec![1.0]);
        assert_eq!(runs[0].start, date(1990, 3, 3));

        let s = series(vec![Some(1.0), None, None]);
        let runs = fill_gaps(&s);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].values, vec![1.0]);
    }

    #[test]
    fn all_missing_yields_nothing() {
        let s = series(vec![None, None, None]);
        assert!(fill_gaps(&s).is_empty());
    }

    #[test]
    fn gap_rule_preserves_recorded_values() {
        // recorded values survive unchanged; only interpolations are added
        let s = series(vec![
            Some(1.0),
            None,
            Some(5.0),
            None,
            None,
            None,
            None,
            Some(2.0),
            Some(0.0),
        ]);
        let runs = fill_gaps(&s);
        let mut recovered: Vec<f64> = Vec::new();
        for r in &runs {
            recovered.extend(&r.values);
        }
        for v in [1.0, 5.0, 2.0, 0.0] {
            assert!(recovered.contains(&v));
        }
        assert!(runs.iter().all(|r| r.values.iter().all(|v| v.is_finite())));
    }

    #[test]
    fn threshold_is_strict() {
        let run = RecordedRun { start: date(1990, 3, 1), values: vec![0.6, 0.61, 0.0] };
        let seg = threshold_occurrence(&run, 0.6);
        assert_eq!(seg.states, vec![false, true, false]);

        let run = RecordedRun { start: date(1990, 3, 1), values: vec![0.0, 0.1] };
        let seg = threshold_occurrence(&run, 0.0);
        assert_eq!(seg.states, vec![false, true]);

        let run = RecordedRun { start: date(1990, 3, 1), values: vec![0.0; 5] };
        let seg = threshold_occurrence(&run, 0.6);
        assert!(seg.states.iter().all(|s| !s));
    }

    #[test]
    fn spells_drop_first_and_last() {
        // D D W W W D D D D W -> kept W(3), D(4)
        let seg = OccurrenceSegment {
            start: date(1990, 3, 1),
            states: vec![
                false, false, true, true, true, false, false, false, false, true,
            ],
        };
        let spells = extract_spells(&seg);
        assert_eq!(spells.len(), 2);
        assert_eq!(spells[0].kind, SpellKind::Wet);
        assert_eq!(spells[0].duration, 3);
        assert_eq!(spells[0].start_date, date(1990, 3, 3));
        assert_eq!(spells[1].kind, SpellKind::Dry);
        assert_eq!(spells[1].duration, 4);
    }

    #[test]
    fn single_spell_yields_nothing() {
        let seg = OccurrenceSegment { start: date(1990, 3, 1), states: vec![false; 3] };
        assert!(extract_spells(&seg).is_empty());
    }

    #[test]
    fn three_runs_keep_middle() {
        let seg = OccurrenceSegment {
            start: date(1990, 3, 1),
            states: vec![false, true, false],
        };
        let spells = extract_spells(&seg);
        assert_eq!(spells.len(), 1);
        assert_eq!(spells[0].kind, SpellKind::Wet);
        assert_eq!(spells[0].duration, 1);
    }

    #[test]
    fn round_trip_full_rle() {
        // before trimming, the run-length encoding reproduces the segment
        let states = vec![false, false, true, false, true, true, true, false];
        let seg = OccurrenceSegment { start: date(1990, 3, 1), states: states.clone() };
        let mut runs: Vec<(bool, u32)> = Vec::new();
        for &s in &seg.states {
            match runs.last_mut() {
                Some((r, n)) if *r == s => *n += 1,
                _ => runs.push((s, 1)),
            }
        }
        let rebuilt: Vec<bool> = runs
            .iter()
            .flat_map(|&(s, n)| std::iter::repeat_n(s, n as usize))
            .collect();
        assert_eq!(rebuilt, states);
    }

    #[test]
    fn season_assignment_uses_start_date() {
        // spell starting 30 May (spring) but running into June stays spring
        let seg = OccurrenceSegment {
            start: date(1990, 5, 29),
            states: vec![true, false, false, false, false, true],
        };
        let spells = extract_spells(&seg);
        assert_eq!(spells.len(), 1);
        assert_eq!(spells[0].kind, SpellKind::Dry);
        assert_eq!(spells[0].start_date, date(1990, 5, 30));
        assert_eq!(spells[0].season, Season::Spring);
        assert_eq!(spells[0].duration, 4);
    }

    #[test]
    fn year_assignment_uses_start_date() {
        let seg = OccurrenceSegment {
            start: date(1990, 12, 29),
            states: vec![true, false, false, false, false, true],
        };
        let spells = extract_spells(&seg);
        assert_eq!(spells[0].year, 1990);
        assert_eq!(spells[0].season, Season::Winter);
    }

    #[test]
    fn dataset_year_gate() {
        let mk_spell = |y: i32| SpellRecord {
            kind: SpellKind::Dry,
            duration: 2,
            start_date: date(y, 4, 1),
            season: Season::Spring,
            year: y,
        };
        let spells29: Vec<SpellRecord> = (1950..1979).map(mk_spell).collect();
        match build_dataset("S", &spells29, Season::Spring, 30) {
            DatasetOutcome::Rejected { cumulative_years, required } => {
                assert_eq!(cumulative_years, 29);
                assert_eq!(required, 30);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        let spells30: Vec<SpellRecord> = (1950..1980).map(mk_spell).collect();
        assert!(matches!(
            build_dataset("S", &spells30, Season::Spring, 30),
            DatasetOutcome::Accepted(_)
        ));
    }

    #[test]
    fn cycles_pair_adjacent_dry_wet() {
        // year with spells D(3) W(1) D(2) W(4) -> cycles [(3,1),(2,4)]
        let seg = OccurrenceSegment {
            start: date(1990, 4, 1),
            states: vec![
                true, // boundary spell, dropped
                false, false, false, // D(3)
                true, // W(1)
                false, false, // D(2)
                true, true, true, true, // W(4)
                false, // boundary spell, dropped
            ],
        };
        let spells = extract_spells(&seg);
        match build_dataset("S", &spells, Season::Spring, 1) {
            DatasetOutcome::Accepted(ds) => {
                assert_eq!(ds.cycles_per_year.get(&1990), Some(&vec![(3, 1), (2, 4)]));
                assert_eq!(ds.dry.len(), 2);
                assert_eq!(ds.wet.len(), 2);
            }
            other => panic!("expected dataset, got {other:?}"),
        }
    }

    #[test]
    fn non_adjacent_spells_do_not_pair() {
        // two dry spells from different segments with a hole between them
        let a = SpellRecord {
            kind: SpellKind::Dry,
            duration: 3,
            start_date: date(1990, 4, 1),
            season: Season::Spring,
            year: 1990,
        };
        let b = SpellRecord {
            kind: SpellKind::Wet,
            duration: 2,
            start_date: date(1990, 4, 20), // not adjacent to a's end (Apr 4)
            season: Season::Spring,
            year: 1990,
        };
        match build_dataset("S", &[a, b], Season::Spring, 1) {
            DatasetOutcome::Accepted(ds) => assert!(ds.cycles_per_year.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn leap_day_is_a_regular_day() {
        let s = DailySeries {
            station_id: "L".into(),
            start: date(1996, 2, 28),
            values: vec![Some(0.0), Some(5.0), Some(0.0), Some(0.0)],
        };
        assert_eq!(s.date_at(1), date(1996, 2, 29));
        assert_eq!(s.date_at(2), date(1996, 3, 1));
        let runs = fill_gaps(&s);
        let spells = extract_spells(&threshold_occurrence(&runs[0], 0.6));
        assert_eq!(spells.len(), 1);
        assert_eq!(spells[0].start_date, date(1996, 2, 29));
        assert_eq!(spells[0].season, Season::Winter);
    }

    #[test]
    fn trim_before_cuts_prefix() {
        let mut s = series(vec![Some(1.0), Some(2.0), Some(3.0)]);
        s.trim_before(date(1990, 3, 2));
        assert_eq!(s.start, date(1990, 3, 2));
        assert_eq!(s.values, vec![Some(2.0), Some(3.0)]);
    }
}
