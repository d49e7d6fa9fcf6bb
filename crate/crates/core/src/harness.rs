//! Error metrics and the chronological train/test benchmark.
//!
//! Both scales share one split time. Training windows end strictly before it
//! and test windows start forecasting at or after it, so no target value seen
//! in training is ever scored.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{
    band_correlations, moving_average_forecast, select_exogenous_bands, train_forecaster,
    train_plain_ann, CorrelationPolicy, ForecastConfig, ForecasterBundle, PlainAnn, Scale, Wiring,
};
use crate::neural::TrainConfig;
use crate::series::{
    align, ema_denoise, format_timestamp, make_windows, UniformSeries, WeatherTable,
    WindowedDataset, DEFAULT_EMA_ALPHA,
};

pub fn rmse(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_pair(truth, pred)?;
    let s: f64 = truth.iter().zip(pred).map(|(t, p)| (t - p).powi(2)).sum();
    Ok((s / truth.len() as f64).sqrt())
}

/// Smallest |truth| accepted by [`mape`].
pub const MAPE_MIN_TRUTH: f64 = 1e-9;

pub fn mape(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_pair(truth, pred)?;
    let mut s = 0.0;
    for (i, (t, p)) in truth.iter().zip(pred).enumerate() {
        if t.abs() < MAPE_MIN_TRUTH {
            return Err(Error::UndefinedMape { index: i, value: *t });
        }
        s += ((t - p) / t).abs();
    }
    Ok(100.0 * s / truth.len() as f64)
}

fn check_pair(truth: &[f64], pred: &[f64]) -> Result<()> {
    if truth.is_empty() || truth.len() != pred.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: pred.len(),
            context: "metric operands",
        });
    }
    Ok(())
}

/// `(base - ours) / base * 100`.
pub fn improvement(base: f64, ours: f64) -> f64 {
    (base - ours) / base * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Windy,
    Calm,
    LongTerm,
    AnnDwt,
    Ann,
    MovingAverage,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Windy => "windy",
            Method::Calm => "calm",
            Method::LongTerm => "long_term",
            Method::AnnDwt => "ann_dwt",
            Method::Ann => "ann",
            Method::MovingAverage => "moving_average",
        }
    }

    pub fn for_scale(scale: Scale) -> [Method; 4] {
        match scale {
            Scale::Short => [Method::Windy, Method::Calm, Method::Ann, Method::MovingAverage],
            Scale::Long => [Method::LongTerm, Method::AnnDwt, Method::Ann, Method::MovingAverage],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    /// Fraction of the SOP record held out at the end; ignored when
    /// `split_time` is set.
    pub test_fraction: f64,
    pub split_time: Option<i64>,
    pub ema_alpha: f64,
    pub short: ForecastConfig,
    pub long: ForecastConfig,
    pub policy: CorrelationPolicy,
    pub train: TrainConfig,
    pub short_train_stride: usize,
    pub long_train_stride: usize,
    pub short_test_stride: usize,
    pub long_test_stride: usize,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        let short = ForecastConfig::short();
        Self {
            test_fraction: 0.1,
            split_time: None,
            ema_alpha: DEFAULT_EMA_ALPHA,
            short_test_stride: short.horizon,
            short,
            long: ForecastConfig::long(),
            policy: CorrelationPolicy::Top1,
            train: TrainConfig::default(),
            short_train_stride: 20,
            long_train_stride: 1,
            long_test_stride: 1,
            seed: 42,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.split_time.is_none() && !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidParameter("test fraction must be in (0, 1)".into()));
        }
        let strides = [
            self.short_train_stride,
            self.long_train_stride,
            self.short_test_stride,
            self.long_test_stride,
        ];
        if strides.contains(&0) {
            return Err(Error::InvalidParameter("strides must be >= 1".into()));
        }
        self.short.validate()?;
        self.long.validate()?;
        self.train.validate()
    }

    fn method_config(&self, m: Method) -> ForecastConfig {
        let base = |c: &ForecastConfig, ch: &[&str]| ForecastConfig {
            exogenous: ch.iter().map(|s| s.to_string()).collect(),
            policy: self.policy,
            ..c.clone()
        };
        match m {
            Method::Windy => base(&self.short, &[crate::series::WIND_GUST]),
            Method::Calm | Method::Ann | Method::MovingAverage => base(&self.short, &[]),
            Method::LongTerm => base(
                &self.long,
                &[crate::series::TEMPERATURE, crate::series::HUMIDITY],
            ),
            Method::AnnDwt => base(&self.long, &[]),
        }
    }

    fn train_config(&self, m: Method) -> TrainConfig {
        TrainConfig {
            seed: self.seed.wrapping_mul(31).wrapping_add(m as u64),
            ..self.train.clone()
        }
    }
}

/// Denoised, aligned inputs for one scale plus its train/test windows.
#[derive(Debug, Clone)]
pub struct ScaleData {
    pub scale: Scale,
    pub sop: UniformSeries,
    pub weather: WeatherTable,
    pub train: WindowedDataset,
    pub test: WindowedDataset,
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub split_time: i64,
    pub short: ScaleData,
    pub long: ScaleData,
}

impl Prepared {
    pub fn scale(&self, s: Scale) -> &ScaleData {
        match s {
            Scale::Short => &self.short,
            Scale::Long => &self.long,
        }
    }
}

fn scale_data(
    scale: Scale,
    sop: UniformSeries,
    weather: WeatherTable,
    fc: &ForecastConfig,
    split: i64,
    train_stride: usize,
    test_stride: usize,
) -> Result<ScaleData> {
    let (w, h) = (fc.window, fc.horizon);
    let train = make_windows(&sop, Some(&weather), w, h, train_stride)?.retain(|t| t.last_target < split);
    let test = make_windows(&sop, Some(&weather), w, h, test_stride)?.retain(|t| t.first_forecast >= split);
    if train.is_empty() || test.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{scale:?} scale has {} training and {} test windows around the split at {}",
            train.len(),
            test.len(),
            format_timestamp(split)
        )));
    }
    Ok(ScaleData {
        scale,
        sop,
        weather,
        train,
        test,
    })
}

/// Denoised SOP and matching weather on each scale's grid.
#[derive(Debug, Clone)]
pub struct AlignedInputs {
    pub short_sop: UniformSeries,
    pub short_weather: WeatherTable,
    pub long_sop: UniformSeries,
    pub long_weather: WeatherTable,
}

/// Denoises the 1-s SOP record and derives the long-scale series by
/// subsampling it on the weather grid; both are aligned with the weather.
pub fn align_inputs(sop: &UniformSeries, weather: &WeatherTable, cfg: &BenchmarkConfig) -> Result<AlignedInputs> {
    cfg.validate()?;
    if sop.step != cfg.short.step {
        return Err(Error::InvalidParameter(format!(
            "SOP step is {} s, short-term scale expects {} s",
            sop.step, cfg.short.step
        )));
    }
    if cfg.long.step % sop.step != 0 {
        return Err(Error::InvalidParameter("long step must be a multiple of the SOP step".into()));
    }
    let smooth = ema_denoise(sop, cfg.ema_alpha)?;
    let factor = (cfg.long.step / sop.step) as usize;
    let offset = ((weather.start - smooth.start).rem_euclid(cfg.long.step) / sop.step) as usize;
    let coarse = smooth.subsample(offset, factor)?;
    let (short_sop, short_weather) = align(&smooth, weather)?;
    let (long_sop, long_weather) = align(&coarse, weather)?;
    Ok(AlignedInputs {
        short_sop,
        short_weather,
        long_sop,
        long_weather,
    })
}

/// Split time implied by `cfg` for a 1-s record.
pub fn split_time(sop: &UniformSeries, cfg: &BenchmarkConfig) -> i64 {
    match cfg.split_time {
        Some(t) => t,
        None => {
            let n_train = ((sop.len() as f64) * (1.0 - cfg.test_fraction)).floor() as usize;
            sop.timestamp(n_train.min(sop.len() - 1))
        }
    }
}

/// Aligns both scales and windows them around one split time.
pub fn prepare(sop: &UniformSeries, weather: &WeatherTable, cfg: &BenchmarkConfig) -> Result<Prepared> {
    let a = align_inputs(sop, weather, cfg)?;
    let split = split_time(sop, cfg);
    Ok(Prepared {
        split_time: split,
        short: scale_data(
            Scale::Short,
            a.short_sop,
            a.short_weather,
            &cfg.short,
            split,
            cfg.short_train_stride,
            cfg.short_test_stride,
        )?,
        long: scale_data(
            Scale::Long,
            a.long_sop,
            a.long_weather,
            &cfg.long,
            split,
            cfg.long_train_stride,
            cfg.long_test_stride,
        )?,
    })
}

/// Trained models for both scales.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModels {
    pub windy: ForecasterBundle,
    pub calm: ForecasterBundle,
    pub short_ann: PlainAnn,
    pub long_term: ForecasterBundle,
    pub ann_dwt: ForecasterBundle,
    pub long_ann: PlainAnn,
}

fn train_bundle(data: &ScaleData, cfg: &BenchmarkConfig, m: Method) -> Result<ForecasterBundle> {
    let fc = cfg.method_config(m);
    let wiring = if fc.exogenous.is_empty() {
        Wiring::empty(fc.levels)
    } else {
        let corr = band_correlations(&data.train, &fc.exogenous, fc.levels)?;
        select_exogenous_bands(&corr, fc.policy)
    };
    train_forecaster(&data.train, &fc, &wiring, &cfg.train_config(m))
}

pub fn train_all(p: &Prepared, cfg: &BenchmarkConfig) -> Result<TrainedModels> {
    let ((windy, calm), ((short_ann, long_term), (ann_dwt, long_ann))) = rayon::join(
        || {
            rayon::join(
                || train_bundle(&p.short, cfg, Method::Windy),
                || train_bundle(&p.short, cfg, Method::Calm),
            )
        },
        || {
            rayon::join(
                || {
                    rayon::join(
                        || train_plain_ann(&p.short.train, &cfg.short.hidden, &cfg.train_config(Method::Ann)),
                        || train_bundle(&p.long, cfg, Method::LongTerm),
                    )
                },
                || {
                    rayon::join(
                        || train_bundle(&p.long, cfg, Method::AnnDwt),
                        || {
                            let tc = TrainConfig {
                                seed: cfg.train_config(Method::Ann).seed ^ 1,
                                ..cfg.train.clone()
                            };
                            train_plain_ann(&p.long.train, &cfg.long.hidden, &tc)
                        },
                    )
                },
            )
        },
    );
    Ok(TrainedModels {
        windy: windy?,
        calm: calm?,
        short_ann: short_ann?,
        long_term: long_term?,
        ann_dwt: ann_dwt?,
        long_ann: long_ann?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub rmse: f64,
    pub mape: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub rmse: f64,
    pub mape: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataDescriptor {
    pub source: String,
    pub start: String,
    pub end: String,
    pub step_s: i64,
    pub samples: usize,
    pub split: String,
    pub train_windows: usize,
    pub test_windows: usize,
    pub window: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub scale: Scale,
    pub rows: Vec<ReportRow>,
    pub improvements: IndexMap<String, Improvement>,
    pub seed: u64,
    pub data_descriptor: DataDescriptor,
}

impl EvalReport {
    pub fn row(&self, m: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == m.name())
    }

    pub fn rmse(&self, m: Method) -> f64 {
        self.row(m).map_or(f64::NAN, |r| r.rmse)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let title = match self.scale {
            Scale::Short => "short-term",
            Scale::Long => "long-term",
        };
        let d = &self.data_descriptor;
        let mut out = format!(
            "{title} forecasting (W={}, H={}, step {} s, {} test windows, seed {})\n",
            d.window, d.horizon, d.step_s, d.test_windows, self.seed
        );
        out.push_str(&format!("{:<16} {:>14} {:>10}\n", "method", "RMSE (rad/s)", "MAPE (%)"));
        for r in &self.rows {
            out.push_str(&format!("{:<16} {:>14.4} {:>10.4}\n", r.method, r.rmse, r.mape));
        }
        for (name, imp) in &self.improvements {
            out.push_str(&format!(
                "improvement {name}: RMSE {:.2}%, MAPE {:.2}%\n",
                imp.rmse, imp.mape
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub timestamp: i64,
    pub truth: f64,
    pub prediction: f64,
    pub method: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub short: EvalReport,
    pub long: EvalReport,
    /// Forecasts on non-overlapping test windows, for plotting.
    pub predictions: Vec<PredictionRow>,
}

impl BenchmarkResult {
    pub fn predictions_csv(&self) -> String {
        let mut out = String::from("timestamp,truth,prediction,method\n");
        for r in &self.predictions {
            out.push_str(&format!(
                "{},{},{},{}\n",
                format_timestamp(r.timestamp),
                r.truth,
                r.prediction,
                r.method
            ));
        }
        out
    }
}

fn forecast(models: &TrainedModels, m: Method, data: &ScaleData, i: usize) -> Result<Vec<f64>> {
    let ds = &data.test;
    match (m, data.scale) {
        (Method::Windy, _) => models.windy.predict_sample(ds, i),
        (Method::Calm, _) => models.calm.predict_sample(ds, i),
        (Method::LongTerm, _) => models.long_term.predict_sample(ds, i),
        (Method::AnnDwt, _) => models.ann_dwt.predict_sample(ds, i),
        (Method::Ann, Scale::Short) => models.short_ann.predict(ds.input(i)),
        (Method::Ann, Scale::Long) => models.long_ann.predict(ds.input(i)),
        (Method::MovingAverage, _) => moving_average_forecast(ds.input(i), ds.window(), ds.horizon()),
    }
}

fn evaluate_scale(
    models: &TrainedModels,
    data: &ScaleData,
    split: i64,
    seed: u64,
    source: &str,
    predictions: &mut Vec<PredictionRow>,
) -> Result<EvalReport> {
    let ds = &data.test;
    let mut truth = Vec::with_capacity(ds.len() * ds.horizon());
    for i in 0..ds.len() {
        truth.extend_from_slice(ds.future(i));
    }
    let first_origin = ds.times(0).origin;
    let plot_every = ds.horizon() as i64 * ds.step();
    let mut rows = Vec::new();
    for m in Method::for_scale(data.scale) {
        let mut pred = Vec::with_capacity(truth.len());
        for i in 0..ds.len() {
            let f = forecast(models, m, data, i)?;
            let t = ds.times(i);
            if (t.origin - first_origin) % plot_every == 0 {
                for (k, (p, y)) in f.iter().zip(ds.future(i)).enumerate() {
                    predictions.push(PredictionRow {
                        timestamp: t.first_forecast + k as i64 * ds.step(),
                        truth: *y,
                        prediction: *p,
                        method: m.name(),
                    });
                }
            }
            pred.extend(f);
        }
        rows.push(ReportRow {
            method: m.name().to_string(),
            rmse: rmse(&truth, &pred)?,
            mape: mape(&truth, &pred)?,
        });
    }
    let ours = &rows[0];
    let improvements = rows[1..]
        .iter()
        .map(|base| {
            (
                format!("{}_over_{}", ours.method, base.method),
                Improvement {
                    rmse: improvement(base.rmse, ours.rmse),
                    mape: improvement(base.mape, ours.mape),
                },
            )
        })
        .collect();
    Ok(EvalReport {
        scale: data.scale,
        rows,
        improvements,
        seed,
        data_descriptor: DataDescriptor {
            source: source.to_string(),
            start: format_timestamp(data.sop.start),
            end: format_timestamp(data.sop.end()),
            step_s: data.sop.step,
            samples: data.sop.len(),
            split: format_timestamp(split),
            train_windows: data.train.len(),
            test_windows: ds.len(),
            window: ds.window(),
            horizon: ds.horizon(),
        },
    })
}

pub fn evaluate(
    p: &Prepared,
    models: &TrainedModels,
    seed: u64,
    source: &str,
) -> Result<BenchmarkResult> {
    let mut predictions = Vec::new();
    let short = evaluate_scale(models, &p.short, p.split_time, seed, source, &mut predictions)?;
    let long = evaluate_scale(models, &p.long, p.split_time, seed, source, &mut predictions)?;
    Ok(BenchmarkResult {
        short,
        long,
        predictions,
    })
}

/// Prepares, trains every method and scores both scales.
pub fn run_benchmark(
    sop: &UniformSeries,
    weather: &WeatherTable,
    cfg: &BenchmarkConfig,
    source: &str,
) -> Result<BenchmarkResult> {
    let p = prepare(sop, weather, cfg)?;
    let models = train_all(&p, cfg)?;
    evaluate(&p, &models, cfg.seed, source)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() <= 1e-15);
        assert_eq!(mape(&[5.0, 7.0], &[5.0, 7.0]).unwrap(), 0.0);
        assert!((mape(&[100.0], &[99.0]).unwrap() - 1.0).abs() <= 1e-12);
        assert!(matches!(
            mape(&[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::UndefinedMape { index: 1, .. })
        ));
        assert!(rmse(&[], &[]).is_err());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn improvement_formula() {
        assert!((improvement(1.28, 0.89) - 30.46875).abs() <= 1e-12);
        assert_eq!(improvement(0.6, 0.3), 50.0);
    }

    #[test]
    fn method_sets() {
        let names: Vec<_> = Method::for_scale(Scale::Short).iter().map(|m| m.name()).collect();
        assert_eq!(names, ["windy", "calm", "ann", "moving_average"]);
        let names: Vec<_> = Method::for_scale(Scale::Long).iter().map(|m| m.name()).collect();
        assert_eq!(names, ["long_term", "ann_dwt", "ann", "moving_average"]);
    }
}
