//! Seeded generator of coupled SOP and weather recordings.
//!
//! Weather is produced on a 30-minute grid: temperature and humidity are
//! anti-phase diurnal cycles with AR(1) anomalies, wind gust is an AR(1)
//! baseline with Poisson bursts that decay exponentially. The 1-s SOP series
//! is a weighted sum of the linearly interpolated weather anomalies plus a
//! drift interpolated between 30-minute knots, rescaled so that together with
//! a wind-driven vibration and white measurement noise it has the configured
//! standard deviation. The drift knots are uncorrelated by default: a
//! persistent drift picks up spurious correlation with the diurnal channels
//! even when every coupling gain is zero.
//!
//! The vibration is a damped resonator whose pitch rises with the gust speed
//! and whose drive is proportional to it, scaled by the wind gain: the wind
//! changes the second-scale texture of the SOP, not only its level.

use std::path::Path;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::ForecastConfig;
use crate::series::{
    write_sop_csv, write_weather_csv, UniformSeries, WeatherTable, HUMIDITY, SOP_UNIT,
    TEMPERATURE, WIND_GUST,
};

pub const WEATHER_STEP: i64 = 1800;
pub const DAY: i64 = 86_400;

/// 2021-05-22T00:00:00Z.
pub const DEFAULT_START: i64 = 1_621_641_600;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1 {
    pub phi: f64,
    pub std: f64,
}

/// AR(2) resonator `x[t] = 2r cos(w) x[t-1] - r² x[t-2] + e[t]` with
/// `w = 2π (base_hz + hz_per_mps · gust)` and `e ~ N(0, wind_gain · drive · gust)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonator {
    pub base_hz: f64,
    pub hz_per_mps: f64,
    pub pole_radius: f64,
    pub drive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub start: i64,
    pub duration_s: i64,
    pub sop_mean: f64,
    pub sop_std: f64,
    pub wind_gain: f64,
    pub temperature_gain: f64,
    pub humidity_gain: f64,
    pub diurnal_period_s: i64,
    pub temperature_mean: f64,
    pub temperature_amplitude: f64,
    pub temperature_noise: Ar1,
    pub humidity_mean: f64,
    pub humidity_amplitude: f64,
    pub humidity_noise: Ar1,
    pub gust_baseline: f64,
    pub gust_noise: Ar1,
    /// Expected bursts per 30-minute step.
    pub burst_rate: f64,
    /// Mean burst height (exponentially distributed), m/s.
    pub burst_amplitude: f64,
    /// Burst decay constant in 30-minute steps.
    pub burst_decay_steps: f64,
    pub drift: Ar1,
    pub vibration: Resonator,
    pub noise_std: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            start: DEFAULT_START,
            duration_s: 10 * DAY,
            sop_mean: 211.0,
            sop_std: 42.0,
            wind_gain: 0.25,
            temperature_gain: 1.0,
            humidity_gain: 0.2,
            diurnal_period_s: DAY,
            temperature_mean: 15.0,
            temperature_amplitude: 6.0,
            temperature_noise: Ar1 { phi: 0.99, std: 0.3 },
            humidity_mean: 65.0,
            humidity_amplitude: 15.0,
            humidity_noise: Ar1 { phi: 0.99, std: 0.8 },
            gust_baseline: 8.0,
            gust_noise: Ar1 { phi: 0.3, std: 3.0 },
            burst_rate: 0.08,
            burst_amplitude: 4.0,
            burst_decay_steps: 3.0,
            drift: Ar1 { phi: 0.0, std: 0.1 },
            vibration: Resonator {
                base_hz: 1.0 / 240.0,
                hz_per_mps: 1.0 / 600.0,
                pole_radius: 0.998,
                drive: 0.02,
            },
            noise_std: 1.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let gains = [self.wind_gain, self.temperature_gain, self.humidity_gain];
        if gains.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::InvalidParameter("coupling gains must be >= 0".into()));
        }
        if !(self.sop_std > self.noise_std && self.noise_std >= 0.0) {
            return Err(Error::InvalidParameter(
                "SOP std must exceed the measurement noise std".into(),
            ));
        }
        if self.diurnal_period_s <= 0 || self.burst_decay_steps <= 0.0 || self.burst_amplitude < 0.0 {
            return Err(Error::InvalidParameter("periods and burst parameters must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.burst_rate) {
            return Err(Error::InvalidParameter("burst rate must be a probability per step".into()));
        }
        for ar in [self.temperature_noise, self.humidity_noise, self.gust_noise, self.drift] {
            if !(ar.phi.abs() < 1.0 && ar.std >= 0.0) {
                return Err(Error::InvalidParameter("AR(1) terms need |phi| < 1 and std >= 0".into()));
            }
        }
        let v = self.vibration;
        if !(0.0..1.0).contains(&v.pole_radius) || !(v.drive >= 0.0 && v.base_hz >= 0.0 && v.hz_per_mps >= 0.0) {
            return Err(Error::InvalidParameter(
                "vibration needs pole radius in [0, 1) and non-negative rates".into(),
            ));
        }
        let short = ForecastConfig::short();
        let long = ForecastConfig::long();
        let short_need = (short.window + short.horizon) as i64;
        let long_need = (long.window + long.horizon - 1) as i64 * WEATHER_STEP + 1;
        if self.duration_s < short_need.max(long_need) {
            return Err(Error::InvalidParameter(format!(
                "duration {} s is too short; need at least {} s for both forecast scales",
                self.duration_s,
                short_need.max(long_need)
            )));
        }
        Ok(())
    }
}

/// A generated recording: SOP at 1 s, weather at 30 min.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub sop: UniformSeries,
    pub weather: WeatherTable,
}

impl SynthData {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_sop_csv(dir.join(SOP_FILE), &self.sop)?;
        write_weather_csv(dir.join(WEATHER_FILE), &self.weather)?;
        Ok(())
    }
}

pub const SOP_FILE: &str = "sop_1s.csv";
pub const WEATHER_FILE: &str = "weather_30min.csv";

fn ar1(rng: &mut ChaCha8Rng, p: Ar1, n: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, p.std).expect("validated std");
    let mut out = Vec::with_capacity(n);
    let mut prev = normal.sample(rng) / (1.0 - p.phi * p.phi).sqrt();
    out.push(prev);
    for _ in 1..n {
        prev = p.phi * prev + normal.sample(rng);
        out.push(prev);
    }
    out
}

fn resonate(rng: &mut ChaCha8Rng, r: Resonator, gain: f64, gust: impl Fn(i64) -> f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for t in 0..n {
        let u = gust(t as i64);
        let e = gain * r.drive * u * rng.sample::<f64, _>(rand_distr::StandardNormal);
        let w = 2.0 * std::f64::consts::PI * (r.base_hz + r.hz_per_mps * u);
        let x1 = if t >= 1 { out[t - 1] } else { 0.0 };
        let x2 = if t >= 2 { out[t - 2] } else { 0.0 };
        out[t] = 2.0 * r.pole_radius * w.cos() * x1 - r.pole_radius * r.pole_radius * x2 + e;
    }
    out
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Linear interpolation of a 30-minute series at second `t` (relative).
fn interp(v: &[f64], t: i64) -> f64 {
    let i = (t / WEATHER_STEP) as usize;
    let rem = t - i as i64 * WEATHER_STEP;
    if rem == 0 {
        return v[i];
    }
    let f = rem as f64 / WEATHER_STEP as f64;
    v[i] + f * (v[i + 1] - v[i])
}

pub fn generate(cfg: &SynthConfig, seed: u64) -> Result<SynthData> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.duration_s as usize;
    let nw = ((cfg.duration_s - 1) / WEATHER_STEP) as usize + 2;

    let phase = |i: usize| {
        let t = i as i64 * WEATHER_STEP + cfg.start;
        // temperature peaks mid-afternoon (15:00 UTC)
        2.0 * std::f64::consts::PI * ((t - 9 * 3600).rem_euclid(cfg.diurnal_period_s)) as f64
            / cfg.diurnal_period_s as f64
    };
    let t_noise = ar1(&mut rng, cfg.temperature_noise, nw);
    let h_noise = ar1(&mut rng, cfg.humidity_noise, nw);
    let g_noise = ar1(&mut rng, cfg.gust_noise, nw);
    let temperature: Vec<f64> = (0..nw)
        .map(|i| cfg.temperature_mean + cfg.temperature_amplitude * phase(i).sin() + t_noise[i])
        .collect();
    let humidity: Vec<f64> = (0..nw)
        .map(|i| cfg.humidity_mean - cfg.humidity_amplitude * phase(i).sin() + h_noise[i])
        .collect();

    let mut bursts = vec![0.0; nw];
    let exp = Exp::new(1.0).expect("unit rate");
    for i in 0..nw {
        if rng.random::<f64>() < cfg.burst_rate {
            let amp = cfg.burst_amplitude * exp.sample(&mut rng);
            for (k, b) in bursts[i..].iter_mut().enumerate() {
                *b += amp * (-(k as f64) / cfg.burst_decay_steps).exp();
            }
        }
    }
    let gust: Vec<f64> = (0..nw)
        .map(|i| (cfg.gust_baseline + g_noise[i] + bursts[i]).max(0.0))
        .collect();
    let drift = ar1(&mut rng, cfg.drift, nw);

    let (gm, tm, hm) = (mean(&gust), mean(&temperature), mean(&humidity));
    let structured: Vec<f64> = (0..n as i64)
        .map(|t| {
            cfg.wind_gain * (interp(&gust, t) - gm)
                + cfg.temperature_gain * (interp(&temperature, t) - tm)
                + cfg.humidity_gain * (interp(&humidity, t) - hm)
                + interp(&drift, t)
        })
        .collect();
    let vibration = resonate(&mut rng, cfg.vibration, cfg.wind_gain, |t| interp(&gust, t), n);
    let vm = mean(&vibration);
    let vib_var = vibration.iter().map(|v| (v - vm).powi(2)).sum::<f64>() / n as f64;
    let sm = mean(&structured);
    let sd = (structured.iter().map(|v| (v - sm).powi(2)).sum::<f64>() / n as f64).sqrt();
    let slow_var = cfg.sop_std.powi(2) - cfg.noise_std.powi(2) - vib_var;
    if slow_var <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "vibration std {:.2} leaves no room for the SOP std {}",
            vib_var.sqrt(),
            cfg.sop_std
        )));
    }
    let scale = if sd > 0.0 { slow_var.sqrt() / sd } else { 0.0 };
    let noise = Normal::new(0.0, cfg.noise_std).expect("validated noise");
    let sop: Vec<f64> = structured
        .iter()
        .zip(&vibration)
        .map(|(v, x)| cfg.sop_mean + scale * (v - sm) + (x - vm) + noise.sample(&mut rng))
        .collect();

    let mut channels = IndexMap::new();
    channels.insert(WIND_GUST.to_string(), gust);
    channels.insert(TEMPERATURE.to_string(), temperature);
    channels.insert(HUMIDITY.to_string(), humidity);
    Ok(SynthData {
        sop: UniformSeries::new(cfg.start, 1, sop, SOP_UNIT)?,
        weather: WeatherTable::new(cfg.start, WEATHER_STEP, channels)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Population statistics.
pub fn summary_stats(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::InsufficientData("statistics of an empty series".into()));
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64;
    Ok(SummaryStats {
        mean: m,
        std: var.sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}
