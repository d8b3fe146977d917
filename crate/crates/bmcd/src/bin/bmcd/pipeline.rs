//! The batch pipeline behind the subcommands: ingest station files, fit
//! all four model/regime combinations per (station, season), run the
//! diagnostics, simulate occurrence series and evaluate the risk metrics.
//!
//! Everything is a pure function of (inputs, config, master seed); station
//! work items run on a worker pool and results are re-sorted before
//! writing, so output bytes do not depend on scheduling.

use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;

use bmcd::chain::{exit_probs_from_distribution, simulate_chain, tabulate_to_survival_floor};
use bmcd::diagnostics::{acf_bivariate, exit_curve, gof_test, qq_envelope, DMaxRule, GofError};
use bmcd::distributions::{
    DurationDistribution, Egpd1Params, GeomMixParams, GeometricParams, HdeGpdParams,
};
use bmcd::estimation::{
    em_fit_geommix, estimate_f1, fit_geometric, pwm_fit_egpd, EmOptions, EstimationError,
    FitResult, PwmOptions,
};
use bmcd::ingest::{
    build_dataset, extract_spells, fill_gaps, parse_station_file, threshold_occurrence,
    DatasetOutcome, Season, SpellDataset,
};
use bmcd::risk::{mean_residual_geometric, mean_residual_hdegpd, proportion_time_long_dry};
use bmcd::risk::{DryModel, RiskError, WetModel};
use bmcd::seeding::derive_seed;

use crate::config::RunConfig;
use crate::outputs::{fmt_f64, fmt_opt, Table};
use crate::pool::map_parallel;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StationStatus {
    Fitted,
    Rejected,
    Errored,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationReport {
    pub station_id: String,
    pub status: StationStatus,
    pub detail: String,
    pub recorded_days: usize,
    pub cumulative_years: usize,
}

pub struct IngestResult {
    /// Accepted per-season datasets, sorted by (station, season).
    pub datasets: Vec<SpellDataset>,
    pub reports: Vec<StationReport>,
    pub n_errors: usize,
}

fn season_rank(s: Season) -> u8 {
    match s {
        Season::Spring => 0,
        Season::Summer => 1,
        Season::Autumn => 2,
        Season::Winter => 3,
    }
}

/// Expand configured inputs into a sorted list of station files.
pub fn collect_input_files(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in &config.inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(input)
                .with_context(|| format!("reading input directory {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

pub fn run_ingest(config: &RunConfig) -> Result<IngestResult> {
    let format = config.input_format()?;
    let start_date = config.start_date()?;
    let seasons = config.season_list()?;
    let files = collect_input_files(config)?;

    struct PerFile {
        report: StationReport,
        datasets: Vec<SpellDataset>,
        failed: bool,
    }

    let outcomes: Vec<PerFile> = map_parallel(files, |path| {
        let fallback_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let mut series = match parse_station_file(path, format) {
            Ok(s) => s,
            Err(e) => {
                return PerFile {
                    report: StationReport {
                        station_id: fallback_id,
                        status: StationStatus::Errored,
                        detail: e.to_string(),
                        recorded_days: 0,
                        cumulative_years: 0,
                    },
                    datasets: Vec::new(),
                    failed: true,
                }
            }
        };
        series.trim_before(start_date);
        let recorded_days = series.recorded_days();
        let mut spells = Vec::new();
        for run in fill_gaps(&series) {
            let segment = threshold_occurrence(&run, config.wet_threshold_mm);
            spells.extend(extract_spells(&segment));
        }
        let mut datasets = Vec::new();
        let mut rejection: Option<(usize, usize)> = None;
        for &season in &seasons {
            match build_dataset(&series.station_id, &spells, season, config.min_years) {
                DatasetOutcome::Accepted(ds) => datasets.push(ds),
                DatasetOutcome::Rejected { cumulative_years, required } => {
                    rejection = Some((cumulative_years, required));
                    break;
                }
            }
        }
        let report = match rejection {
            Some((years, required)) => StationReport {
                station_id: series.station_id.clone(),
                status: StationStatus::Rejected,
                detail: format!("{years} cumulative years < required {required}"),
                recorded_days,
                cumulative_years: years,
            },
            None => {
                let years = {
                    let mut ys: Vec<i32> = spells.iter().map(|s| s.year).collect();
                    ys.sort_unstable();
                    ys.dedup();
                    ys.len()
                };
                StationReport {
                    station_id: series.station_id.clone(),
                    status: StationStatus::Fitted,
                    detail: String::new(),
                    recorded_days,
                    cumulative_years: years,
                }
            }
        };
        PerFile { report, datasets, failed: false }
    });

    let n_errors = outcomes.iter().filter(|o| o.failed).count();
    let mut reports: Vec<StationReport> = outcomes.iter().map(|o| o.report.clone()).collect();
    reports.sort_by(|a, b| a.station_id.cmp(&b.station_id));
    let mut datasets: Vec<SpellDataset> =
        outcomes.into_iter().flat_map(|o| o.datasets).collect();
    datasets.sort_by(|a, b| {
        (a.station_id.as_str(), season_rank(a.season))
            .cmp(&(b.station_id.as_str(), season_rank(b.season)))
    });
    Ok(IngestResult { datasets, reports, n_errors })
}

pub fn spells_table(datasets: &[SpellDataset]) -> Table {
    let mut table = Table::new(
        "spells",
        vec!["station", "season", "kind", "start_date", "year", "duration"],
    );
    for ds in datasets {
        let mut all: Vec<_> = ds.dry.iter().chain(&ds.wet).collect();
        all.sort_by_key(|s| (s.start_date, s.kind));
        for s in all {
            table.push(vec![
                ds.station_id.clone(),
                ds.season.as_str().into(),
                s.kind.as_str().into(),
                s.start_date.to_string(),
                s.year.to_string(),
                s.duration.to_string(),
            ]);
        }
    }
    table
}

/// Every fitted family for one (station, season).
pub struct SeasonFit {
    pub station_id: String,
    pub season: Season,
    pub dry_durations: Vec<u32>,
    pub wet_durations: Vec<u32>,
    pub f1: Option<f64>,
    pub hdegpd: Result<FitResult<Egpd1Params>, EstimationError>,
    pub geommix: Result<FitResult<GeomMixParams>, EstimationError>,
    pub dry_geometric: Result<GeometricParams, EstimationError>,
    pub wet_geometric: Result<GeometricParams, EstimationError>,
}

impl SeasonFit {
    pub fn hdegpd_params(&self) -> Option<HdeGpdParams> {
        let f1 = self.f1?;
        let fit = self.hdegpd.as_ref().ok()?;
        HdeGpdParams::new(f1, fit.params.kappa, fit.params.sigma, fit.params.xi).ok()
    }
}

pub fn run_fits(datasets: &[SpellDataset], config: &RunConfig) -> Vec<SeasonFit> {
    let pwm_opts = PwmOptions {
        min_tail_count: config.fit_min_tail_count,
        ..PwmOptions::default()
    };
    let em_opts = EmOptions::default();
    let master = config.seed;
    map_parallel(datasets.to_vec(), move |ds| {
        let dry = ds.dry_durations();
        let wet = ds.wet_durations();
        let em_seed = derive_seed(master, &["em", &ds.station_id, ds.season.as_str()]);
        SeasonFit {
            station_id: ds.station_id.clone(),
            season: ds.season,
            f1: estimate_f1(&dry).ok(),
            hdegpd: pwm_fit_egpd(&dry, &pwm_opts),
            geommix: em_fit_geommix(&wet, &em_opts, em_seed),
            dry_geometric: fit_geometric(&dry),
            wet_geometric: fit_geometric(&wet),
            dry_durations: dry,
            wet_durations: wet,
        }
    })
}

fn fit_status<P>(fit: &Result<FitResult<P>, EstimationError>) -> String {
    match fit {
        Ok(f) if f.diagnostics.converged => "ok".into(),
        Ok(_) => "non_converged".into(),
        Err(EstimationError::EmptySample) => "empty".into(),
        Err(EstimationError::InsufficientData { .. }) => "insufficient_data".into(),
    }
}

pub fn fits_table(fits: &[SeasonFit]) -> Table {
    let mut table = Table::new(
        "fits",
        vec![
            "station", "season", "regime", "family", "f1", "kappa", "sigma", "xi", "pi", "p1",
            "p2", "p", "n_obs", "converged", "iterations", "objective", "status",
        ],
    );
    let blank = || String::new();
    for fit in fits {
        let base = |regime: &str, family: &str| {
            vec![
                fit.station_id.clone(),
                fit.season.as_str().into(),
                regime.into(),
                family.into(),
            ]
        };
        // dry: hurdle + eGPD tail by PWM
        {
            let mut row = base("dry", "hdegpd");
            match (&fit.f1, &fit.hdegpd) {
                (Some(f1), Ok(f)) => {
                    row.extend([
                        fmt_f64(*f1),
                        fmt_f64(f.params.kappa),
                        fmt_f64(f.params.sigma),
                        fmt_f64(f.params.xi),
                        blank(),
                        blank(),
                        blank(),
                        blank(),
                        f.n_obs.to_string(),
                        f.diagnostics.converged.to_string(),
                        f.diagnostics.iterations.to_string(),
                        fmt_f64(f.diagnostics.objective),
                        fit_status(&fit.hdegpd),
                    ]);
                }
                _ => {
                    row.extend([
                        fmt_opt(fit.f1),
                        blank(),
                        blank(),
                        blank(),
                        blank(),
                        blank(),
                        blank(),
                        blank(),
                        fit.dry_durations.len().to_string(),
                        blank(),
                        blank(),
                        blank(),
                        fit_status(&fit.hdegpd),
                    ]);
                }
            }
            table.push(row);
        }
        // dry: geometric baseline
        {
            let mut row = base("dry", "geometric");
            let p = fit.dry_geometric.as_ref().ok().map(|g| g.p);
            row.extend([
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                fmt_opt(p),
                fit.dry_durations.len().to_string(),
                blank(),
                blank(),
                blank(),
                if p.is_some() { "ok".into() } else { "empty".into() },
            ]);
            table.push(row);
        }
        // wet: geometric mixture by EM
        {
            let mut row = base("wet", "geommix");
            match &fit.geommix {
                Ok(f) => row.extend([
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    fmt_f64(f.params.pi),
                    fmt_f64(f.params.p1),
                    fmt_f64(f.params.p2),
                    blank(),
                    f.n_obs.to_string(),
                    f.diagnostics.converged.to_string(),
                    f.diagnostics.iterations.to_string(),
                    fmt_f64(f.diagnostics.objective),
                    fit_status(&fit.geommix),
                ]),
                Err(_) => row.extend([
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    fit.wet_durations.len().to_string(),
                    blank(),
                    blank(),
                    blank(),
                    fit_status(&fit.geommix),
                ]),
            }
            table.push(row);
        }
        // wet: geometric baseline
        {
            let mut row = base("wet", "geometric");
            let p = fit.wet_geometric.as_ref().ok().map(|g| g.p);
            row.extend([
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                fmt_opt(p),
                fit.wet_durations.len().to_string(),
                blank(),
                blank(),
                blank(),
                if p.is_some() { "ok".into() } else { "empty".into() },
            ]);
            table.push(row);
        }
    }
    table
}

/// Largest depth with any data, for the exit-curve display.
fn display_d_max(durations: &[u32]) -> u32 {
    durations.iter().copied().max().unwrap_or(0).min(366)
}

pub struct DiagnoseTables {
    pub exitcurves: Table,
    pub gof: Table,
    pub acf: Table,
    pub qq: Table,
}

pub fn run_diagnostics(fits: &[SeasonFit], datasets: &[SpellDataset], config: &RunConfig) -> DiagnoseTables {
    let mut exitcurves = Table::new(
        "exitcurves",
        vec![
            "station", "season", "regime", "model", "d", "count", "q_model", "q_emp", "band_sd",
        ],
    );
    let mut gof = Table::new(
        "gof",
        vec![
            "station", "season", "regime", "model", "statistic", "dof", "p_value", "d_max",
            "condition", "status",
        ],
    );
    let mut acf = Table::new(
        "acf",
        vec![
            "station", "season", "lag", "pairs", "dry_dry", "dry_wet", "wet_dry", "wet_wet",
            "bound", "status",
        ],
    );
    let mut qq = Table::new(
        "qq",
        vec![
            "station", "season", "regime", "model", "rank", "recorded", "lower", "median",
            "upper", "multiplicity",
        ],
    );

    struct Work<'a> {
        fit: &'a SeasonFit,
        dataset: &'a SpellDataset,
    }
    let work: Vec<Work> = fits
        .iter()
        .zip(datasets)
        .map(|(fit, dataset)| Work { fit, dataset })
        .collect();

    struct Out {
        exit_rows: Vec<Vec<String>>,
        gof_rows: Vec<Vec<String>>,
        acf_rows: Vec<Vec<String>>,
        qq_rows: Vec<Vec<String>>,
    }

    let master = config.seed;
    let alpha = config.alpha;
    let replicates = config.bootstrap_replicates;
    let gof_tail = config.gof_min_tail_count;

    let results: Vec<Out> = map_parallel(work, |w| {
        let fit = w.fit;
        let station = fit.station_id.as_str();
        let season = fit.season.as_str();
        let mut out = Out {
            exit_rows: Vec::new(),
            gof_rows: Vec::new(),
            acf_rows: Vec::new(),
            qq_rows: Vec::new(),
        };

        let push_curve = |rows: &mut Vec<Vec<String>>,
                              regime: &str,
                              model: &str,
                              durations: &[u32],
                              dist: &dyn Fn(u32) -> (Option<f64>, Option<f64>, Option<f64>, u64)| {
            let d_max = display_d_max(durations);
            for d in 1..=d_max {
                let (q_model, q_emp, band, count) = dist(d);
                if q_emp.is_none() && q_model.is_none() {
                    continue;
                }
                rows.push(vec![
                    station.into(),
                    season.into(),
                    regime.into(),
                    model.into(),
                    d.to_string(),
                    count.to_string(),
                    fmt_opt(q_model),
                    fmt_opt(q_emp),
                    fmt_opt(band),
                ]);
            }
        };

        // dry curves under the hdeGPD and geometric fits
        if let Some(params) = fit.hdegpd_params() {
            let curve = exit_curve(&fit.dry_durations, &params, display_d_max(&fit.dry_durations).max(1));
            push_curve(&mut out.exit_rows, "dry", "hdegpd", &fit.dry_durations, &|d| {
                let i = (d - 1) as usize;
                (curve.q_model[i], curve.q_emp[i], curve.band_sd[i], curve.counts[i])
            });
        }
        if let Ok(g) = &fit.dry_geometric {
            let curve = exit_curve(&fit.dry_durations, g, display_d_max(&fit.dry_durations).max(1));
            push_curve(&mut out.exit_rows, "dry", "geometric", &fit.dry_durations, &|d| {
                let i = (d - 1) as usize;
                (curve.q_model[i], curve.q_emp[i], curve.band_sd[i], curve.counts[i])
            });
        }
        if let Ok(m) = &fit.geommix {
            let curve = exit_curve(&fit.wet_durations, &m.params, display_d_max(&fit.wet_durations).max(1));
            push_curve(&mut out.exit_rows, "wet", "geommix", &fit.wet_durations, &|d| {
                let i = (d - 1) as usize;
                (curve.q_model[i], curve.q_emp[i], curve.band_sd[i], curve.counts[i])
            });
        }

        // goodness of fit on dry spells, both models
        let mut push_gof = |model: &str, res: Result<bmcd::diagnostics::GofResult, GofError>| {
            let row = match res {
                Ok(r) => vec![
                    station.into(),
                    season.into(),
                    "dry".into(),
                    model.into(),
                    fmt_f64(r.statistic),
                    r.dof.to_string(),
                    fmt_f64(r.p_value),
                    r.d_max.to_string(),
                    fmt_f64(r.condition),
                    "ok".into(),
                ],
                Err(GofError::Singular { condition }) => vec![
                    station.into(),
                    season.into(),
                    "dry".into(),
                    model.into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    fmt_f64(condition),
                    "singular".into(),
                ],
                Err(GofError::InsufficientData { .. }) => vec![
                    station.into(),
                    season.into(),
                    "dry".into(),
                    model.into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "insufficient_data".into(),
                ],
            };
            out.gof_rows.push(row);
        };
        if let Some(params) = fit.hdegpd_params() {
            push_gof("hdegpd", gof_test(&fit.dry_durations, &params, DMaxRule::Auto, gof_tail));
        }
        if let Ok(g) = &fit.dry_geometric {
            push_gof("geometric", gof_test(&fit.dry_durations, g, DMaxRule::Auto, gof_tail));
        }

        // pooled bivariate spell autocorrelation
        match acf_bivariate(&w.dataset.cycles_as_vec(), 12) {
            Ok(matrix) => {
                for lag in &matrix.lags {
                    out.acf_rows.push(vec![
                        station.into(),
                        season.into(),
                        lag.lag.to_string(),
                        lag.pairs.to_string(),
                        fmt_f64(lag.dry_dry),
                        fmt_f64(lag.dry_wet),
                        fmt_f64(lag.wet_dry),
                        fmt_f64(lag.wet_wet),
                        fmt_f64(lag.bound),
                        "ok".into(),
                    ]);
                }
            }
            Err(e) => {
                let status = match e {
                    bmcd::diagnostics::AcfError::InsufficientData { .. } => "insufficient_data",
                    bmcd::diagnostics::AcfError::Degenerate { .. } => "degenerate",
                };
                out.acf_rows.push(vec![
                    station.into(),
                    season.into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    status.into(),
                ]);
            }
        }

        // bootstrap Q-Q envelopes
        let mut push_qq = |regime: &str, model: &str, durations: &[u32], dist: &dyn DurationDistribution| {
            if durations.is_empty() {
                return;
            }
            let seed = derive_seed(master, &["qq", station, season, regime, model]);
            let env = qq_envelope_dyn(durations, dist, replicates, alpha, seed);
            for p in &env.points {
                out.qq_rows.push(vec![
                    station.into(),
                    season.into(),
                    regime.into(),
                    model.into(),
                    p.rank.to_string(),
                    p.recorded.to_string(),
                    p.lower.to_string(),
                    p.median.to_string(),
                    p.upper.to_string(),
                    p.multiplicity.to_string(),
                ]);
            }
        };
        if let Some(params) = fit.hdegpd_params() {
            push_qq("dry", "hdegpd", &fit.dry_durations, &params);
        }
        if let Ok(m) = &fit.geommix {
            push_qq("wet", "geommix", &fit.wet_durations, &m.params);
        }

        out
    });

    for r in results {
        exitcurves.rows.extend(r.exit_rows);
        gof.rows.extend(r.gof_rows);
        acf.rows.extend(r.acf_rows);
        qq.rows.extend(r.qq_rows);
    }
    DiagnoseTables { exitcurves, gof, acf, qq }
}

// object-safe shim over the generic qq_envelope
fn qq_envelope_dyn(
    recorded: &[u32],
    dist: &dyn DurationDistribution,
    replicates: u32,
    alpha: f64,
    seed: u64,
) -> bmcd::diagnostics::QqEnvelope {
    struct Shim<'a>(&'a dyn DurationDistribution);
    impl DurationDistribution for Shim<'_> {
        fn pmf(&self, d: u32) -> f64 {
            self.0.pmf(d)
        }
        fn survival(&self, d: u32) -> f64 {
            self.0.survival(d)
        }
        fn sample(&self, rng: &mut dyn rand::Rng) -> u32 {
            self.0.sample(rng)
        }
        fn mean(&self) -> Option<f64> {
            self.0.mean()
        }
    }
    qq_envelope(recorded, &Shim(dist), replicates, alpha, seed)
}

/// Nominal (non-leap) season lengths in days.
pub fn season_length(season: Season) -> u32 {
    match season {
        Season::Spring | Season::Summer => 92,
        Season::Autumn => 91,
        Season::Winter => 90,
    }
}

pub fn run_simulate(
    fit: &SeasonFit,
    n_years: u32,
    config: &RunConfig,
) -> Result<Table> {
    let mut table = Table::new(
        "occurrence",
        vec!["station", "season", "year_index", "day_index", "state"],
    );
    if n_years == 0 {
        return Ok(table);
    }
    let dry = fit
        .hdegpd_params()
        .ok_or_else(|| anyhow!("dry-spell fit unavailable for {} {}", fit.station_id, fit.season.as_str()))?;
    let wet = fit
        .geommix
        .as_ref()
        .map_err(|e| anyhow!("wet-spell fit unavailable: {e}"))?
        .params;
    let q0 = tabulate_to_survival_floor(&exit_probs_from_distribution(dry), 1e-12, 1 << 20);
    let q1 = tabulate_to_survival_floor(&exit_probs_from_distribution(wet), 1e-12, 1 << 20);
    let q0 = exit_probs_from_distribution(q0);
    let q1 = exit_probs_from_distribution(q1);
    let days = season_length(fit.season);
    for year in 0..n_years {
        let seed = derive_seed(
            config.seed,
            &["simulate", &fit.station_id, fit.season.as_str(), &year.to_string()],
        );
        let path = simulate_chain(&q0, &q1, days as usize, seed);
        for (day, state) in path.iter().enumerate() {
            table.push(vec![
                fit.station_id.clone(),
                fit.season.as_str().into(),
                year.to_string(),
                day.to_string(),
                match state.regime {
                    bmcd::chain::Regime::Wet => "1".into(),
                    bmcd::chain::Regime::Dry => "0".into(),
                },
            ]);
        }
    }
    Ok(table)
}

pub fn run_risk(fits: &[SeasonFit], config: &RunConfig) -> Table {
    let mut table = Table::new(
        "risk",
        vec![
            "station", "season", "model", "metric", "d", "lower", "upper", "width", "u_used",
            "status",
        ],
    );
    struct Row(Vec<String>);
    let thresholds = config.risk_thresholds.clone();
    let precision = config.precision;
    let fit_refs: Vec<&SeasonFit> = fits.iter().collect();
    let results: Vec<Vec<Row>> = map_parallel(fit_refs, |fit| {
        let mut rows = Vec::new();
        let station = fit.station_id.as_str();
        let season = fit.season.as_str();
        let wet_model = fit
            .geommix
            .as_ref()
            .ok()
            .map(|m| WetModel::GeomMix(m.params))
            .or_else(|| fit.wet_geometric.as_ref().ok().map(|g| WetModel::Geometric(*g)));
        for &d in &thresholds {
            if let Some(params) = fit.hdegpd_params() {
                let mr = mean_residual_hdegpd(&params, d, precision);
                rows.push(Row(risk_row(station, season, "hdegpd", "mean_residual", d, mr)));
                if let Some(wet) = &wet_model {
                    let pl = proportion_time_long_dry(&DryModel::HdeGpd(params), wet, d, precision);
                    rows.push(Row(risk_row(station, season, "hdegpd", "proportion_long_dry", d, pl)));
                }
            }
            if let Ok(g) = &fit.dry_geometric {
                let v = mean_residual_geometric(g, d);
                rows.push(Row(vec![
                    station.into(),
                    season.into(),
                    "geometric".into(),
                    "mean_residual".into(),
                    d.to_string(),
                    fmt_f64(v),
                    fmt_f64(v),
                    "0".into(),
                    "0".into(),
                    "ok".into(),
                ]));
                if let Some(wet) = &wet_model {
                    let pl = proportion_time_long_dry(&DryModel::Geometric(*g), wet, d, precision);
                    rows.push(Row(risk_row(station, season, "geometric", "proportion_long_dry", d, pl)));
                }
            }
        }
        rows
    });
    for rows in results {
        for Row(r) in rows {
            table.push(r);
        }
    }
    table
}

fn risk_row(
    station: &str,
    season: &str,
    model: &str,
    metric: &str,
    d: u32,
    res: Result<bmcd::risk::RiskBound, RiskError>,
) -> Vec<String> {
    match res {
        Ok(b) => vec![
            station.into(),
            season.into(),
            model.into(),
            metric.into(),
            d.to_string(),
            fmt_f64(b.lower),
            fmt_f64(b.upper),
            fmt_f64(b.width),
            b.u_used.to_string(),
            "ok".into(),
        ],
        Err(RiskError::Undefined { .. }) => vec![
            station.into(),
            season.into(),
            model.into(),
            metric.into(),
            d.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            "undefined".into(),
        ],
        Err(RiskError::NonConverged { width }) => vec![
            station.into(),
            season.into(),
            model.into(),
            metric.into(),
            d.to_string(),
            String::new(),
            String::new(),
            fmt_f64(width),
            String::new(),
            "non_converged".into(),
        ],
    }
}
