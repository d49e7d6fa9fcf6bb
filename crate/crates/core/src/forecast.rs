//! Per-band forecasting models and baselines.
//!
//! A bundle holds one network per wavelet band. Each network maps the band's
//! coefficients of the input window (plus any wired exogenous coefficients)
//! to the same band's coefficients of the target window, which is the input
//! window shifted forward by `H`. The forecast is the last `H` samples of the
//! reconstructed target window.
//!
//! Windows are anchored before decomposition: the last input SOP value is
//! subtracted from both input and target windows, so the SOP networks see
//! shapes rather than absolute levels; the anchor is added back after
//! reconstruction. Exogenous windows keep their levels, since a gust of
//! 20 m/s means something different from one of 5 m/s.

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{self, fit, mlp_new, MlpModel, ModelDocument, TrainConfig};
use crate::series::{WindowedDataset, ZScore, HUMIDITY, TEMPERATURE, WIND_GUST};
use crate::wavelet::{band_name, coeff_lengths, wavedec, waverec_bands, WaveletSpec};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Short,
    Long,
}

impl Scale {
    pub fn step(self) -> i64 {
        match self {
            Scale::Short => 1,
            Scale::Long => 1800,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationPolicy {
    /// Per channel, the band with the largest |r| feeds the same band's model.
    #[default]
    Top1,
    /// Every channel's approximation band feeds the approximation model.
    #[serde(alias = "paper-default")]
    Approximation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub scale: Scale,
    pub window: usize,
    pub horizon: usize,
    pub levels: usize,
    pub exogenous: Vec<String>,
    pub step: i64,
    pub hidden: Vec<usize>,
    pub policy: CorrelationPolicy,
}

impl ForecastConfig {
    pub fn short() -> Self {
        Self {
            scale: Scale::Short,
            window: 36,
            horizon: 12,
            levels: 5,
            exogenous: Vec::new(),
            step: Scale::Short.step(),
            hidden: vec![32],
            policy: CorrelationPolicy::Top1,
        }
    }

    pub fn long() -> Self {
        Self {
            scale: Scale::Long,
            window: 48,
            horizon: 24,
            step: Scale::Long.step(),
            ..Self::short()
        }
    }

    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Short => Self::short(),
            Scale::Long => Self::long(),
        }
    }

    pub fn with_exogenous(mut self, channels: &[&str]) -> Self {
        self.exogenous = channels.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn windy() -> Self {
        Self::short().with_exogenous(&[WIND_GUST])
    }

    pub fn calm() -> Self {
        Self::short()
    }

    pub fn long_term() -> Self {
        Self::long().with_exogenous(&[TEMPERATURE, HUMIDITY])
    }

    /// Calm structure at the long-term window and horizon.
    pub fn ann_dwt() -> Self {
        Self::long()
    }

    pub fn wavelet(&self) -> WaveletSpec {
        WaveletSpec::db5(self.levels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.window <= self.horizon {
            return Err(Error::InvalidParameter(format!(
                "need window > horizon >= 1, got W={} H={}",
                self.window, self.horizon
            )));
        }
        if self.step <= 0 {
            return Err(Error::InvalidParameter("step must be positive".into()));
        }
        if self.hidden.contains(&0) {
            return Err(Error::InvalidParameter("hidden layer sizes must be >= 1".into()));
        }
        coeff_lengths(self.window, self.levels)?;
        Ok(())
    }
}

/// Pearson r of one channel against the SOP, per band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCorrelation {
    pub r: f64,
    /// Either side had zero variance; `r` is reported as 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCorrelations {
    pub levels: usize,
    /// Per channel, one entry per band in `[A_J, D_J, ..., D_1]` order.
    pub channels: IndexMap<String, Vec<BandCorrelation>>,
}

impl BandCorrelations {
    /// Rows of `(channel, band name, r)`.
    pub fn rows(&self) -> Vec<(String, String, f64)> {
        self.channels
            .iter()
            .flat_map(|(ch, rs)| {
                rs.iter()
                    .enumerate()
                    .map(move |(k, c)| (ch.clone(), band_name(self.levels, k), c.r))
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,band,r\n");
        for (ch, band, r) in self.rows() {
            out.push_str(&format!("{ch},{band},{r}\n"));
        }
        out
    }
}

/// Pearson correlation; `(0, true)` when either input has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> BandCorrelation {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 || !(saa * sbb).is_normal() {
        return BandCorrelation { r: 0.0, degenerate: true };
    }
    BandCorrelation {
        r: (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0),
        degenerate: false,
    }
}

/// Correlates raw SOP input windows with each channel's windows, band by band,
/// over the concatenated coefficients of all samples.
pub fn band_correlations(
    ds: &WindowedDataset,
    channels: &[String],
    levels: usize,
) -> Result<BandCorrelations> {
    if ds.is_empty() {
        return Err(Error::InsufficientData("correlation needs a non-empty dataset".into()));
    }
    let bands = levels + 1;
    let mut sop: Vec<Vec<f64>> = vec![Vec::new(); bands];
    let mut exo: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); bands]; channels.len()];
    for i in 0..ds.len() {
        let p = wavedec(ds.input(i), levels)?;
        for (k, b) in p.bands().iter().enumerate() {
            sop[k].extend_from_slice(b);
        }
        for (c, ch) in channels.iter().enumerate() {
            let q = wavedec(ds.exo(ch, i)?, levels)?;
            for (k, b) in q.bands().iter().enumerate() {
                exo[c][k].extend_from_slice(b);
            }
        }
    }
    let channels = channels
        .iter()
        .zip(&exo)
        .map(|(ch, per_band)| {
            let rs = per_band.iter().zip(&sop).map(|(e, s)| pearson(s, e)).collect();
            (ch.clone(), rs)
        })
        .collect();
    Ok(BandCorrelations { levels, channels })
}

/// One exogenous coefficient block feeding a band model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExoInput {
    pub channel: String,
    pub band: usize,
}

/// For each SOP band (in `[A_J, ..., D_1]` order) the exogenous blocks it reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wiring {
    pub bands: Vec<Vec<ExoInput>>,
}

impl Wiring {
    pub fn empty(levels: usize) -> Self {
        Self {
            bands: vec![Vec::new(); levels + 1],
        }
    }

    pub fn channels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in self.bands.iter().flatten() {
            if !out.contains(&e.channel) {
                out.push(e.channel.clone());
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.bands.iter().all(Vec::is_empty)
    }
}

pub fn select_exogenous_bands(c: &BandCorrelations, policy: CorrelationPolicy) -> Wiring {
    let mut wiring = Wiring::empty(c.levels);
    for (ch, rs) in &c.channels {
        let band = match policy {
            CorrelationPolicy::Approximation => 0,
            // strict > keeps the coarsest band on ties
            CorrelationPolicy::Top1 => rs
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, bc)| {
                    if bc.r.abs() > best.1 {
                        (k, bc.r.abs())
                    } else {
                        best
                    }
                })
                .0,
        };
        wiring.bands[band].push(ExoInput {
            channel: ch.clone(),
            band,
        });
    }
    wiring
}

/// Z-score parameters of one band model's inputs and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStats {
    pub sop: ZScore,
    pub target: ZScore,
    /// Parallel to the band's wiring entries.
    pub exo: Vec<ZScore>,
}

/// Anchored band coefficients of one sample.
struct Encoded {
    anchor: f64,
    sop: Vec<Vec<f64>>,
    /// Keyed by channel.
    exo: IndexMap<String, Vec<Vec<f64>>>,
}

fn anchored(window: &[f64]) -> (f64, Vec<f64>) {
    let a = *window.last().expect("non-empty window");
    (a, window.iter().map(|v| v - a).collect())
}

/// Source of per-band predictions in normalized coefficient space.
pub trait BandPredictor {
    fn predict_band(&self, band: usize, input: &[f64]) -> Result<Vec<f64>>;
}

impl BandPredictor for [MlpModel] {
    fn predict_band(&self, band: usize, input: &[f64]) -> Result<Vec<f64>> {
        self[band].forward(input)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecasterBundle {
    config: ForecastConfig,
    wavelet: WaveletSpec,
    wiring: Wiring,
    models: Vec<MlpModel>,
    stats: Vec<BandStats>,
}

impl ForecasterBundle {
    pub fn from_parts(
        config: ForecastConfig,
        wiring: Wiring,
        models: Vec<MlpModel>,
        stats: Vec<BandStats>,
    ) -> Result<Self> {
        config.validate()?;
        let lens = coeff_lengths(config.window, config.levels)?;
        check_wiring(&config, &wiring)?;
        if models.len() != lens.len() || stats.len() != lens.len() {
            return Err(Error::DimensionMismatch {
                expected: lens.len(),
                actual: models.len().min(stats.len()),
                context: "band model count",
            });
        }
        for (k, ((m, s), len)) in models.iter().zip(&stats).zip(&lens).enumerate() {
            let inputs = wiring.bands[k].len() + 1;
            if m.input_size() != inputs * len || m.output_size() != *len {
                return Err(Error::DimensionMismatch {
                    expected: inputs * len,
                    actual: m.input_size(),
                    context: "band model input size",
                });
            }
            if s.exo.len() != wiring.bands[k].len() {
                return Err(Error::DimensionMismatch {
                    expected: wiring.bands[k].len(),
                    actual: s.exo.len(),
                    context: "band exogenous stats",
                });
            }
        }
        Ok(Self {
            wavelet: config.wavelet(),
            config,
            wiring,
            models,
            stats,
        })
    }

    pub fn config(&self) -> &ForecastConfig {
        &self.config
    }

    pub fn wiring(&self) -> &Wiring {
        &self.wiring
    }

    pub fn models(&self) -> &[MlpModel] {
        &self.models
    }

    pub fn stats(&self) -> &[BandStats] {
        &self.stats
    }

    fn encode(&self, sop_window: &[f64], exo: &[(&str, &[f64])]) -> Result<Encoded> {
        encode_sample(&self.config, &self.wiring, sop_window, exo)
    }

    fn band_input(&self, band: usize, enc: &Encoded) -> Vec<f64> {
        let s = &self.stats[band];
        let mut input = Vec::with_capacity(self.models[band].input_size());
        s.sop.apply_into(&enc.sop[band], &mut input);
        for (e, z) in self.wiring.bands[band].iter().zip(&s.exo) {
            z.apply_into(&enc.exo[&e.channel][e.band], &mut input);
        }
        input
    }

    /// Normalized band targets for a known `(input, target)` window pair, as
    /// used during training.
    pub fn encode_target(&self, sop_window: &[f64], target_window: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_window(sop_window)?;
        self.check_window(target_window)?;
        let anchor = *sop_window.last().expect("checked length");
        let shifted: Vec<f64> = target_window.iter().map(|v| v - anchor).collect();
        let p = wavedec(&shifted, self.config.levels)?;
        Ok(p.bands()
            .iter()
            .zip(&self.stats)
            .map(|(b, s)| s.target.apply(b))
            .collect())
    }

    fn check_window(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.config.window {
            return Err(Error::DimensionMismatch {
                expected: self.config.window,
                actual: w.len(),
                context: "forecast window",
            });
        }
        Ok(())
    }

    /// H-step forecast from one input window and the wired channels' windows.
    pub fn predict(&self, sop_window: &[f64], exo: &[(&str, &[f64])]) -> Result<Vec<f64>> {
        self.predict_with(self.models.as_slice(), sop_window, exo)
    }

    pub fn predict_with<P: BandPredictor + ?Sized>(
        &self,
        predictor: &P,
        sop_window: &[f64],
        exo: &[(&str, &[f64])],
    ) -> Result<Vec<f64>> {
        let enc = self.encode(sop_window, exo)?;
        let mut bands = Vec::with_capacity(self.stats.len());
        for (k, s) in self.stats.iter().enumerate() {
            let out = predictor.predict_band(k, &self.band_input(k, &enc))?;
            if out.len() != enc.sop[k].len() {
                return Err(Error::DimensionMismatch {
                    expected: enc.sop[k].len(),
                    actual: out.len(),
                    context: "band prediction",
                });
            }
            bands.push(s.target.invert(&out));
        }
        let y = waverec_bands(self.config.levels, self.config.window, &bands)?;
        Ok(y[self.config.window - self.config.horizon..]
            .iter()
            .map(|v| v + enc.anchor)
            .collect())
    }

    /// Forecast for sample `i` of a dataset built with this bundle's window.
    pub fn predict_sample(&self, ds: &WindowedDataset, i: usize) -> Result<Vec<f64>> {
        let channels = self.wiring.channels();
        let exo = channels
            .iter()
            .map(|c| Ok((c.as_str(), ds.exo(c, i)?)))
            .collect::<Result<Vec<_>>>()?;
        self.predict(ds.input(i), &exo)
    }

    pub fn to_document(&self) -> BundleDocument {
        BundleDocument {
            format_version: BUNDLE_FORMAT_VERSION,
            config: self.config.clone(),
            wiring: self.wiring.clone(),
            band_models: self.models.iter().map(neural::save_model).collect(),
            band_stats: self.stats.clone(),
        }
    }

    pub fn from_document(doc: BundleDocument) -> Result<Self> {
        if doc.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: doc.format_version,
                expected: BUNDLE_FORMAT_VERSION,
            });
        }
        let models = doc
            .band_models
            .iter()
            .map(neural::load_model)
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(doc.config, doc.wiring, models, doc.band_stats)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        neural::check_version(&value, BUNDLE_FORMAT_VERSION)?;
        let doc: BundleDocument =
            serde_json::from_value(value).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        Self::from_document(doc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleDocument {
    pub format_version: u32,
    pub config: ForecastConfig,
    pub wiring: Wiring,
    pub band_models: Vec<ModelDocument>,
    pub band_stats: Vec<BandStats>,
}

fn check_wiring(cfg: &ForecastConfig, wiring: &Wiring) -> Result<()> {
    if wiring.bands.len() != cfg.levels + 1 {
        return Err(Error::InvalidParameter(format!(
            "wiring covers {} bands, expected {}",
            wiring.bands.len(),
            cfg.levels + 1
        )));
    }
    for (k, entries) in wiring.bands.iter().enumerate() {
        for e in entries {
            if !cfg.exogenous.contains(&e.channel) {
                return Err(Error::InvalidParameter(format!(
                    "wired channel `{}` is not among the configured exogenous channels",
                    e.channel
                )));
            }
            if e.band != k {
                return Err(Error::InvalidParameter(format!(
                    "channel `{}` band {} cannot feed band {k}",
                    e.channel, e.band
                )));
            }
        }
    }
    Ok(())
}

fn encode_sample(
    cfg: &ForecastConfig,
    wiring: &Wiring,
    sop_window: &[f64],
    exo: &[(&str, &[f64])],
) -> Result<Encoded> {
    if sop_window.len() != cfg.window {
        return Err(Error::DimensionMismatch {
            expected: cfg.window,
            actual: sop_window.len(),
            context: "forecast window",
        });
    }
    let (anchor, shifted) = anchored(sop_window);
    let sop = wavedec(&shifted, cfg.levels)?.into_bands();
    let mut exo_bands = IndexMap::new();
    for ch in wiring.channels() {
        let w = exo
            .iter()
            .find(|(name, _)| *name == ch)
            .map(|(_, w)| *w)
            .ok_or_else(|| Error::MissingChannel(ch.clone()))?;
        if w.len() != cfg.window {
            return Err(Error::DimensionMismatch {
                expected: cfg.window,
                actual: w.len(),
                context: "exogenous window",
            });
        }
        exo_bands.insert(ch, wavedec(w, cfg.levels)?.into_bands());
    }
    Ok(Encoded {
        anchor,
        sop,
        exo: exo_bands,
    })
}

fn pooled<'a>(parts: impl Iterator<Item = &'a [f64]>) -> Result<ZScore> {
    let all: Vec<f64> = parts.flatten().copied().collect();
    ZScore::fit(&all)
}

fn band_seed(seed: u64, band: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(band as u64 + 1)
}

/// Trains one network per band on the dataset's (input, shifted target) pairs.
pub fn train_forecaster(
    train: &WindowedDataset,
    cfg: &ForecastConfig,
    wiring: &Wiring,
    tcfg: &TrainConfig,
) -> Result<ForecasterBundle> {
    cfg.validate()?;
    check_wiring(cfg, wiring)?;
    if train.is_empty() {
        return Err(Error::InsufficientData("training dataset is empty".into()));
    }
    if train.window() != cfg.window || train.horizon() != cfg.horizon {
        return Err(Error::InvalidParameter(format!(
            "dataset windows are W={} H={}, config expects W={} H={}",
            train.window(),
            train.horizon(),
            cfg.window,
            cfg.horizon
        )));
    }
    let channels = wiring.channels();
    let mut encoded = Vec::with_capacity(train.len());
    let mut targets = Vec::with_capacity(train.len());
    for i in 0..train.len() {
        let exo = channels
            .iter()
            .map(|c| Ok((c.as_str(), train.exo(c, i)?)))
            .collect::<Result<Vec<_>>>()?;
        let enc = encode_sample(cfg, wiring, train.input(i), &exo)?;
        let shifted: Vec<f64> = train.target(i).iter().map(|v| v - enc.anchor).collect();
        targets.push(wavedec(&shifted, cfg.levels)?.into_bands());
        encoded.push(enc);
    }

    let mut stats = Vec::with_capacity(cfg.levels + 1);
    for k in 0..=cfg.levels {
        let exo = wiring.bands[k]
            .iter()
            .map(|e| pooled(encoded.iter().map(|enc| enc.exo[&e.channel][e.band].as_slice())))
            .collect::<Result<Vec<_>>>()?;
        stats.push(BandStats {
            sop: pooled(encoded.iter().map(|enc| enc.sop[k].as_slice()))?,
            target: pooled(targets.iter().map(|t| t[k].as_slice()))?,
            exo,
        });
    }

    let lens = coeff_lengths(cfg.window, cfg.levels)?;
    let models = (0..=cfg.levels)
        .into_par_iter()
        .map(|k| {
            let s = &stats[k];
            let xs: Vec<Vec<f64>> = encoded
                .iter()
                .map(|enc| {
                    let mut x = Vec::new();
                    s.sop.apply_into(&enc.sop[k], &mut x);
                    for (e, z) in wiring.bands[k].iter().zip(&s.exo) {
                        z.apply_into(&enc.exo[&e.channel][e.band], &mut x);
                    }
                    x
                })
                .collect();
            let ys: Vec<Vec<f64>> = targets.iter().map(|t| s.target.apply(&t[k])).collect();
            let mut sizes = vec![(wiring.bands[k].len() + 1) * lens[k]];
            sizes.extend(&cfg.hidden);
            sizes.push(lens[k]);
            let seed = band_seed(tcfg.seed, k);
            let model = mlp_new(&sizes, seed)?;
            let band_cfg = TrainConfig {
                seed,
                ..tcfg.clone()
            };
            fit(&model, &xs, &ys, &band_cfg).map(|(m, _)| m)
        })
        .collect::<Result<Vec<_>>>()?;
    ForecasterBundle::from_parts(cfg.clone(), wiring.clone(), models, stats)
}

/// Trailing mean of the last `k` values, repeated `horizon` times.
pub fn moving_average_forecast(history: &[f64], k: usize, horizon: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("moving average needs k >= 1".into()));
    }
    if history.len() < k {
        return Err(Error::InsufficientData(format!(
            "moving average over {k} values needs at least {k} samples, got {}",
            history.len()
        )));
    }
    let mean = history[history.len() - k..].iter().sum::<f64>() / k as f64;
    Ok(vec![mean; horizon])
}

/// Direct window-to-horizon network without any wavelet stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PlainAnn {
    pub window: usize,
    pub horizon: usize,
    pub stats: ZScore,
    pub model: MlpModel,
}

impl PlainAnn {
    pub fn predict(&self, window: &[f64]) -> Result<Vec<f64>> {
        if window.len() != self.window {
            return Err(Error::DimensionMismatch {
                expected: self.window,
                actual: window.len(),
                context: "plain ANN window",
            });
        }
        let out = self.model.forward(&self.stats.apply(window))?;
        Ok(self.stats.invert(&out))
    }

    pub fn to_document(&self) -> PlainAnnDocument {
        PlainAnnDocument {
            format_version: BUNDLE_FORMAT_VERSION,
            window: self.window,
            horizon: self.horizon,
            stats: self.stats,
            model: neural::save_model(&self.model),
        }
    }

    pub fn from_document(doc: PlainAnnDocument) -> Result<Self> {
        if doc.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: doc.format_version,
                expected: BUNDLE_FORMAT_VERSION,
            });
        }
        let model = neural::load_model(&doc.model)?;
        if model.input_size() != doc.window || model.output_size() != doc.horizon {
            return Err(Error::MalformedDocument("plain ANN sizes disagree with its window".into()));
        }
        Ok(Self {
            window: doc.window,
            horizon: doc.horizon,
            stats: doc.stats,
            model,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlainAnnDocument {
    pub format_version: u32,
    pub window: usize,
    pub horizon: usize,
    pub stats: ZScore,
    pub model: ModelDocument,
}

/// One network mapping the z-scored window to the z-scored `H` future values;
/// a single pooled z-score over all training SOP values serves both sides.
pub fn train_plain_ann(
    train: &WindowedDataset,
    hidden: &[usize],
    tcfg: &TrainConfig,
) -> Result<PlainAnn> {
    if train.is_empty() {
        return Err(Error::InsufficientData("training dataset is empty".into()));
    }
    let all: Vec<f64> = (0..train.len()).flat_map(|i| train.input(i).iter().copied()).collect();
    let stats = ZScore::fit(&all)?;
    let xs: Vec<Vec<f64>> = (0..train.len()).map(|i| stats.apply(train.input(i))).collect();
    let ys: Vec<Vec<f64>> = (0..train.len()).map(|i| stats.apply(train.future(i))).collect();
    let mut sizes = vec![train.window()];
    sizes.extend(hidden);
    sizes.push(train.horizon());
    let model = mlp_new(&sizes, tcfg.seed)?;
    let (model, _) = fit(&model, &xs, &ys, tcfg)?;
    Ok(PlainAnn {
        window: train.window(),
        horizon: train.horizon(),
        stats,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{make_windows, UniformSeries, WeatherTable, REQUIRED_CHANNELS};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corr(rs: &[f64]) -> BandCorrelations {
        let mut channels = IndexMap::new();
        channels.insert(
            WIND_GUST.to_string(),
            rs.iter()
                .map(|&r| BandCorrelation {
                    r,
                    degenerate: r == 0.0,
                })
                .collect(),
        );
        BandCorrelations { levels: 5, channels }
    }

    #[test]
    fn top1_wiring_examples() {
        let w = select_exogenous_bands(&corr(&[0.9, 0.1, 0.1, 0.1, 0.1, 0.1]), CorrelationPolicy::Top1);
        assert_eq!(w.bands[0], vec![ExoInput { channel: WIND_GUST.into(), band: 0 }]);
        assert!(w.bands[1..].iter().all(Vec::is_empty));

        let w = select_exogenous_bands(&corr(&[0.0; 6]), CorrelationPolicy::Top1);
        assert_eq!(w.bands[0].len(), 1);
        assert_eq!(w.bands.iter().flatten().count(), 1);

        // D2 sits at index 4 in [A5, D5, D4, D3, D2, D1]
        let w = select_exogenous_bands(&corr(&[0.2, 0.1, -0.3, 0.1, -0.8, 0.5]), CorrelationPolicy::Top1);
        assert_eq!(w.bands[4], vec![ExoInput { channel: WIND_GUST.into(), band: 4 }]);

        let w = select_exogenous_bands(&corr(&[0.2, 0.1, -0.3, 0.1, -0.8, 0.5]), CorrelationPolicy::Approximation);
        assert_eq!(w.bands[0].len(), 1);
    }

    #[test]
    fn pearson_matches_textbook_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<f64> = (0..500).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..500).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = 500.0;
        let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
        let sab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let saa: f64 = a.iter().map(|x| x * x).sum();
        let sbb: f64 = b.iter().map(|x| x * x).sum();
        let r = (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt());
        let got = pearson(&a, &b);
        assert!((got.r - r).abs() <= 1e-12);
        assert!(got.r.abs() < 0.15);
        assert_eq!(pearson(&a, &[1.0; 500]), BandCorrelation { r: 0.0, degenerate: true });
    }

    fn dataset(sop: Vec<f64>, gust: Vec<f64>) -> WindowedDataset {
        let n = sop.len();
        let s = UniformSeries::new(0, 1, sop, "").unwrap();
        let mut ch = IndexMap::new();
        for name in REQUIRED_CHANNELS {
            ch.insert(name.to_string(), vec![0.0; n]);
        }
        ch.insert(WIND_GUST.to_string(), gust);
        let w = WeatherTable::new(0, 1, ch).unwrap();
        make_windows(&s, Some(&w), 36, 12, 1).unwrap()
    }

    #[test]
    fn correlations_of_identical_and_negated_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..10.0)).collect();
        let ds = dataset(x.clone(), x.clone());
        let c = band_correlations(&ds, &[WIND_GUST.to_string()], 5).unwrap();
        assert!(c.channels[WIND_GUST].iter().all(|b| (b.r - 1.0).abs() <= 1e-12));
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let ds = dataset(x, neg);
        let c = band_correlations(&ds, &[WIND_GUST.to_string()], 5).unwrap();
        assert!(c.channels[WIND_GUST].iter().all(|b| (b.r + 1.0).abs() <= 1e-12));
        assert!(band_correlations(&ds, &["pressure".to_string()], 5).is_err());
        assert!(c.to_csv().starts_with("channel,band,r\nwind_gust,A5,"));
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average_forecast(&[4.0; 5], 5, 3).unwrap(), vec![4.0; 3]);
        assert_eq!(moving_average_forecast(&[1.0, 2.0, 3.0], 3, 2).unwrap(), vec![2.0, 2.0]);
        assert!(moving_average_forecast(&[1.0], 2, 2).is_err());
        assert!(moving_average_forecast(&[1.0], 0, 2).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..100.0)).collect();
        let mut brute = 0.0;
        for v in &h[30..] {
            brute += v;
        }
        assert!((moving_average_forecast(&h, 10, 4).unwrap()[0] - brute / 10.0).abs() <= 1e-12);
    }

    #[test]
    fn config_defaults() {
        let s = ForecastConfig::short();
        assert_eq!((s.window, s.horizon, s.levels, s.step), (36, 12, 5, 1));
        let l = ForecastConfig::long();
        assert_eq!((l.window, l.horizon, l.levels, l.step), (48, 24, 5, 1800));
        assert_eq!(ForecastConfig::windy().exogenous, vec![WIND_GUST]);
        assert!(ForecastConfig::calm().exogenous.is_empty());
        assert_eq!(ForecastConfig::long_term().exogenous, vec![TEMPERATURE, HUMIDITY]);
        let mut bad = ForecastConfig::short();
        bad.horizon = 36;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn wiring_must_use_configured_channels() {
        let mut w = Wiring::empty(5);
        w.bands[0].push(ExoInput { channel: WIND_GUST.into(), band: 0 });
        assert!(check_wiring(&ForecastConfig::calm(), &w).is_err());
        assert!(check_wiring(&ForecastConfig::windy(), &w).is_ok());
        w.bands[1].push(ExoInput { channel: WIND_GUST.into(), band: 0 });
        assert!(check_wiring(&ForecastConfig::windy(), &w).is_err());
    }
}
