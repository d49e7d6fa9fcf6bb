use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sopcast::forecast::{band_correlations, ForecasterBundle, PlainAnn, PlainAnnDocument};
use sopcast::fusion::{aggregate_to_minutes, fuse, gust_threshold, minute_grid, wind_gate, DEFAULT_GUST_QUANTILE};
use sopcast::harness::{align_inputs, evaluate, prepare, split_time, train_all, BenchmarkConfig, TrainedModels};
use sopcast::series::{
    format_timestamp, parse_timestamp, read_sop_csv, read_weather_csv, UniformSeries, WeatherTable,
    REQUIRED_CHANNELS, SOP_UNIT, WIND_GUST,
};
use sopcast::synth::{generate, summary_stats, DAY, SOP_FILE, WEATHER_FILE};
use sopcast::wavelet::wavedec;

use crate::config::RunConfig;
use crate::{
    Cli, CliError, Command, CorrelateArgs, DataArgs, DecomposeArgs, EvalArgs, ForecastArgs, Mode, ScaleArg,
    SynthArgs, TrainArgs,
};

const TRAINING_FILE: &str = "training.json";
const TRAINING_FORMAT_VERSION: u32 = 1;

/// Bundle file names inside a model directory.
const WINDY: &str = "windy.json";
const CALM: &str = "calm.json";
const SHORT_ANN: &str = "short_ann.json";
const LONG_TERM: &str = "long_term.json";
const ANN_DWT: &str = "ann_dwt.json";
const LONG_ANN: &str = "long_ann.json";

/// Settings a model directory was trained with; evaluation and forecasting
/// reuse its split and gate threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrainingRecord {
    format_version: u32,
    seed: u64,
    split_time: String,
    gust_quantile: f64,
    gust_threshold: f64,
    benchmark: BenchmarkConfig,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synth(a) => synth(&cfg, a),
        Command::Train(a) => train(&cfg, a),
        Command::Forecast(a) => forecast(&cfg, a),
        Command::Eval(a) => eval(&cfg, a),
        Command::Decompose(a) => decompose(&cfg, a),
        Command::Correlate(a) => correlate(&cfg, a),
    }
}

fn data_dir(cfg: &RunConfig, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.paths.data_dir.clone())
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn sop_path(cfg: &RunConfig, d: &DataArgs) -> PathBuf {
    d.sop
        .clone()
        .or_else(|| cfg.paths.sop.clone())
        .unwrap_or_else(|| data_dir(cfg, &d.data_dir).join(SOP_FILE))
}

fn load_data(cfg: &RunConfig, d: &DataArgs) -> Result<(UniformSeries, WeatherTable), CliError> {
    let weather = d
        .weather
        .clone()
        .or_else(|| cfg.paths.weather.clone())
        .unwrap_or_else(|| data_dir(cfg, &d.data_dir).join(WEATHER_FILE));
    Ok((read_sop_csv(sop_path(cfg, d))?, read_weather_csv(weather)?))
}

fn models_dir(cfg: &RunConfig, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.paths.models.clone())
        .unwrap_or_else(|| PathBuf::from("models"))
}

fn parse_time(raw: &str) -> Result<i64, CliError> {
    parse_timestamp(raw).map_err(|e| CliError::Usage(e.to_string()))
}

/// Writes to `path`, or to standard output when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(sopcast::Error::from)?;
    s.push('\n');
    Ok(s)
}

fn synth(cfg: &RunConfig, a: SynthArgs) -> Result<(), CliError> {
    let seed = cfg.seed(a.seed);
    let mut sc = cfg.synth.clone();
    if let Some(days) = a.days {
        if !(days > 0.0) {
            return Err(CliError::Usage("--days must be positive".into()));
        }
        sc.duration_s = (days * DAY as f64).round() as i64;
    }
    let out = a.out.or_else(|| cfg.paths.data_dir.clone()).unwrap_or_else(|| PathBuf::from("data"));
    let data = generate(&sc, seed)?;
    data.write(&out)?;
    #[derive(Serialize)]
    struct Record<'a> {
        seed: u64,
        config: &'a sopcast::synth::SynthConfig,
    }
    fs::write(out.join("synth.json"), to_json(&Record { seed, config: &sc })?)?;
    let s = summary_stats(data.sop.values())?;
    eprintln!(
        "wrote {} SOP samples (mean {:.2}, std {:.2} {SOP_UNIT}) and {} weather rows to {}",
        data.sop.len(),
        s.mean,
        s.std,
        data.weather.len(),
        out.display()
    );
    Ok(())
}

fn save_models(dir: &Path, m: &TrainedModels) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for (name, b) in [(WINDY, &m.windy), (CALM, &m.calm), (LONG_TERM, &m.long_term), (ANN_DWT, &m.ann_dwt)] {
        fs::write(dir.join(name), b.to_json()? + "\n")?;
    }
    for (name, p) in [(SHORT_ANN, &m.short_ann), (LONG_ANN, &m.long_ann)] {
        fs::write(dir.join(name), to_json(&p.to_document())?)?;
    }
    Ok(())
}

fn read(dir: &Path, name: &str) -> Result<String, CliError> {
    let p = dir.join(name);
    fs::read_to_string(&p).map_err(|e| {
        CliError::Data(sopcast::Error::InvalidParameter(format!("cannot read {}: {e}", p.display())))
    })
}

fn load_bundle(dir: &Path, name: &str) -> Result<ForecasterBundle, CliError> {
    Ok(ForecasterBundle::from_json(&read(dir, name)?)?)
}

fn load_plain(dir: &Path, name: &str) -> Result<PlainAnn, CliError> {
    let doc: PlainAnnDocument = serde_json::from_str(&read(dir, name)?)
        .map_err(|e| sopcast::Error::MalformedDocument(e.to_string()))?;
    Ok(PlainAnn::from_document(doc)?)
}

fn load_models(dir: &Path) -> Result<TrainedModels, CliError> {
    Ok(TrainedModels {
        windy: load_bundle(dir, WINDY)?,
        calm: load_bundle(dir, CALM)?,
        short_ann: load_plain(dir, SHORT_ANN)?,
        long_term: load_bundle(dir, LONG_TERM)?,
        ann_dwt: load_bundle(dir, ANN_DWT)?,
        long_ann: load_plain(dir, LONG_ANN)?,
    })
}

fn load_record(dir: &Path) -> Result<TrainingRecord, CliError> {
    let r: TrainingRecord = serde_json::from_str(&read(dir, TRAINING_FILE)?)
        .map_err(|e| sopcast::Error::MalformedDocument(e.to_string()))?;
    if r.format_version != TRAINING_FORMAT_VERSION {
        return Err(sopcast::Error::VersionMismatch {
            found: r.format_version,
            expected: TRAINING_FORMAT_VERSION,
        }
        .into());
    }
    Ok(r)
}

fn train(cfg: &RunConfig, a: TrainArgs) -> Result<(), CliError> {
    let seed = cfg.seed(a.seed);
    let mut bc = cfg.benchmark(seed, a.policy.map(Into::into))?;
    let (sop, weather) = load_data(cfg, &a.data)?;
    let split = split_time(&sop, &bc);
    bc.split_time = Some(split);
    let p = prepare(&sop, &weather, &bc)?;
    let models = train_all(&p, &bc)?;

    let gusts: Vec<f64> = (0..weather.len())
        .filter(|&i| weather.timestamp(i) < split)
        .map(|i| weather.channel(WIND_GUST).map(|g| g[i]))
        .collect::<Result<_, _>>()?;
    let quantile = cfg.fusion.quantile.unwrap_or(DEFAULT_GUST_QUANTILE);
    let threshold = match cfg.fusion.threshold {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(CliError::Usage(format!("fusion threshold must be positive, got {t}"))),
        None => gust_threshold(&gusts, quantile)?,
    };

    let dir = a.out.unwrap_or_else(|| models_dir(cfg, &None));
    save_models(&dir, &models)?;
    let record = TrainingRecord {
        format_version: TRAINING_FORMAT_VERSION,
        seed,
        split_time: format_timestamp(split),
        gust_quantile: quantile,
        gust_threshold: threshold,
        benchmark: bc,
    };
    fs::write(dir.join(TRAINING_FILE), to_json(&record)?)?;
    eprintln!(
        "trained on {} short and {} long windows before {}; models in {}",
        p.short.train.len(),
        p.long.train.len(),
        record.split_time,
        dir.display()
    );
    Ok(())
}

fn eval(cfg: &RunConfig, a: EvalArgs) -> Result<(), CliError> {
    let dir = models_dir(cfg, &a.models);
    let record = load_record(&dir)?;
    let models = load_models(&dir)?;
    let seed = a.seed.or(cfg.seed).unwrap_or(record.seed);
    let mut bc = record.benchmark.clone();
    bc.seed = seed;
    let (sop, weather) = load_data(cfg, &a.data)?;
    let p = prepare(&sop, &weather, &bc)?;
    let source = sop_path(cfg, &a.data).display().to_string();
    let r = evaluate(&p, &models, seed, &source)?;

    let out = a.out.or_else(|| cfg.paths.out.clone()).unwrap_or_else(|| PathBuf::from("reports"));
    fs::create_dir_all(&out)?;
    fs::write(out.join("report_short.json"), r.short.to_json()? + "\n")?;
    fs::write(out.join("report_long.json"), r.long.to_json()? + "\n")?;
    let text = format!("{}\n{}", r.short.to_text(), r.long.to_text());
    fs::write(out.join("report.txt"), &text)?;
    fs::write(out.join("predictions.csv"), r.predictions_csv())?;
    print!("{text}");
    Ok(())
}

fn horizon_csv(start: i64, step: i64, values: &[f64]) -> String {
    let mut out = String::from("timestamp,sop_rad_per_s\n");
    for (k, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", format_timestamp(start + k as i64 * step), v));
    }
    out
}

/// Index of the window's last sample, checking there is enough history.
fn origin_index(s: &UniformSeries, t: i64, window: usize) -> Result<usize, CliError> {
    let i = s.index_of(t).ok_or_else(|| {
        sopcast::Error::InvalidParameter(format!("{} is not a sample time of the series", format_timestamp(t)))
    })?;
    if i + 1 < window {
        return Err(sopcast::Error::InsufficientData(format!(
            "origin {} leaves {} samples of history, the window needs {window}",
            format_timestamp(t),
            i + 1
        ))
        .into());
    }
    Ok(i)
}

fn window_forecast(
    b: &ForecasterBundle,
    sop: &UniformSeries,
    weather: &WeatherTable,
    t: i64,
) -> Result<Vec<f64>, CliError> {
    let w = b.config().window;
    let i = origin_index(sop, t, w)?;
    let range = i + 1 - w..i + 1;
    let channels = b.wiring().channels();
    let exo = channels
        .iter()
        .map(|c| Ok((c.as_str(), &weather.channel(c)?[range.clone()])))
        .collect::<Result<Vec<_>, sopcast::Error>>()?;
    Ok(b.predict(&sop.values()[range], &exo)?)
}

fn forecast(cfg: &RunConfig, a: ForecastArgs) -> Result<(), CliError> {
    let dir = models_dir(cfg, &a.models);
    let record = load_record(&dir)?;
    let (sop, weather) = load_data(cfg, &a.data)?;
    let inputs = align_inputs(&sop, &weather, &record.benchmark)?;
    let at = a.at.as_deref().map(parse_time).transpose()?;
    let text = match a.mode {
        Mode::Short => {
            let b = load_bundle(&dir, WINDY)?;
            let t = at.unwrap_or(inputs.short_sop.end());
            let f = window_forecast(&b, &inputs.short_sop, &inputs.short_weather, t)?;
            horizon_csv(t + inputs.short_sop.step, inputs.short_sop.step, &f)
        }
        Mode::Long => {
            let b = load_bundle(&dir, LONG_TERM)?;
            let t = at.unwrap_or(inputs.long_sop.end());
            let f = window_forecast(&b, &inputs.long_sop, &inputs.long_weather, t)?;
            horizon_csv(t + inputs.long_sop.step, inputs.long_sop.step, &f)
        }
        Mode::Adaptive => {
            let threshold = a.threshold.or(cfg.fusion.threshold).unwrap_or(record.gust_threshold);
            if !(threshold > 0.0) {
                return Err(CliError::Usage(format!("gust threshold must be positive, got {threshold}")));
            }
            let fused = adaptive(&dir, &inputs, &weather, at, threshold)?;
            let mut buf = Vec::new();
            fused.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
    };
    emit(a.out.as_deref(), &text)
}

/// Long-term forecast on the minute grid with windy minutes replaced by
/// aggregated short-term forecasts. The short-term model is replayed over the
/// recorded SOP, issuing a forecast every H seconds across each windy minute,
/// so windy minutes need recorded SOP up to their end.
fn adaptive(
    dir: &Path,
    inputs: &sopcast::harness::AlignedInputs,
    weather: &WeatherTable,
    at: Option<i64>,
    threshold: f64,
) -> Result<sopcast::fusion::FusedForecast, CliError> {
    let long_b = load_bundle(dir, LONG_TERM)?;
    let short_b = load_bundle(dir, WINDY)?;
    let (ls, lw) = (&inputs.long_sop, &inputs.long_weather);
    let (ss, sw) = (&inputs.short_sop, &inputs.short_weather);
    let span = long_b.config().horizon as i64 * ls.step;
    let h = short_b.config().horizon as i64;
    // last short-term origin needed to cover a minute starting at tau, minus tau
    let reach = h * ((60 + h - 1) / h - 1) - 1;
    let t = match at {
        Some(t) => t,
        None => {
            // the gate needs weather, and the replay needs SOP, over the whole horizon
            let limit = ls.end().min(weather.end() - span).min(ss.end() - span - reach);
            ls.start + (limit - ls.start).div_euclid(ls.step) * ls.step
        }
    };
    if t + span > weather.end() {
        return Err(sopcast::Error::InsufficientData(format!(
            "weather ends at {}, the horizon from {} needs it until {}",
            format_timestamp(weather.end()),
            format_timestamp(t),
            format_timestamp(t + span)
        ))
        .into());
    }
    let preds = window_forecast(&long_b, ls, lw, t)?;
    let origin_value = ls.values()[ls.index_of(t).expect("checked by the forecast")];
    let long = UniformSeries::new(t, ls.step, std::iter::once(origin_value).chain(preds).collect(), SOP_UNIT)?;

    let gust = weather.series(WIND_GUST)?;
    let mut gate = Vec::new();
    let mut short_minutes = Vec::new();
    for tau in minute_grid(&long) {
        let upcoming = [tau, (tau + 60).min(weather.end())].map(|x| gust.interpolate_at(x).expect("inside weather range"));
        let windy = wind_gate(&upcoming, threshold)?;
        gate.push(windy);
        if !windy {
            continue;
        }
        // short forecasts issued every H seconds across the minute
        let mut seconds = Vec::with_capacity(60);
        let mut origin = tau - 1;
        while seconds.len() < 60 {
            match window_forecast(&short_b, ss, sw, origin) {
                Ok(f) => seconds.extend(f),
                Err(_) => break,
            }
            origin += h;
        }
        if seconds.len() >= 60 {
            seconds.truncate(60);
            short_minutes.push(aggregate_to_minutes(&UniformSeries::new(tau, 1, seconds, SOP_UNIT)?)?);
        }
    }
    Ok(fuse(&long, &short_minutes, &gate)?)
}

fn decompose(cfg: &RunConfig, a: DecomposeArgs) -> Result<(), CliError> {
    let path = a
        .sop
        .clone()
        .or_else(|| cfg.paths.sop.clone())
        .unwrap_or_else(|| data_dir(cfg, &a.data_dir).join(SOP_FILE));
    let sop = read_sop_csv(path)?;
    let short = cfg.benchmark(cfg.seed(None), None)?.short;
    let w = a.window.unwrap_or(short.window);
    let levels = a.levels.unwrap_or(short.levels);
    let t = a.at.as_deref().map(parse_time).transpose()?.unwrap_or(sop.end());
    let i = origin_index(&sop, t, w)?;
    let p = wavedec(&sop.values()[i + 1 - w..=i], levels)?;
    emit(a.out.as_deref(), &to_json(&p.to_dump())?)
}

fn correlate(cfg: &RunConfig, a: CorrelateArgs) -> Result<(), CliError> {
    let bc = cfg.benchmark(cfg.seed(None), None)?;
    let (sop, weather) = load_data(cfg, &a.data)?;
    let p = prepare(&sop, &weather, &bc)?;
    let (data, fc) = match a.scale {
        ScaleArg::Short => (&p.short, &bc.short),
        ScaleArg::Long => (&p.long, &bc.long),
    };
    let channels: Vec<String> = REQUIRED_CHANNELS.iter().map(|c| c.to_string()).collect();
    let c = band_correlations(&data.train, &channels, fc.levels)?;
    emit(a.out.as_deref(), &c.to_csv())
}
