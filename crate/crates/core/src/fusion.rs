//! Weather-gated merge of short- and long-term forecasts on a minute grid.
//!
//! The long-term forecast, linearly interpolated to one-minute steps, is the
//! baseline. Minutes gated windy are replaced by minute means of the
//! short-term forecast; a windy minute without short-term coverage is an
//! error, never a silent fallback.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{format_timestamp, UniformSeries};

pub const MINUTE: i64 = 60;

/// Default gate threshold: this quantile of the training-period gusts.
pub const DEFAULT_GUST_QUANTILE: f64 = 0.75;

/// Windy when the largest upcoming gust reaches the threshold.
pub fn wind_gate(gust_window: &[f64], threshold: f64) -> Result<bool> {
    if gust_window.is_empty() {
        return Err(Error::InvalidParameter("wind gate needs at least one gust value".into()));
    }
    let max = gust_window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(max >= threshold)
}

/// Linear-interpolation quantile (`q` in `[0, 1]`) of `values`; must be > 0
/// to serve as a gate threshold.
pub fn gust_threshold(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("threshold needs gust values".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("quantile {q} outside [0, 1]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let t = v[lo] + (pos - lo as f64) * (v[hi] - v[lo]);
    if t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gust threshold must be positive, got {t}"
        )));
    }
    Ok(t)
}

/// Block means over 60 one-second samples; a trailing partial block is
/// averaged over the samples it has.
pub fn aggregate_to_minutes(s: &UniformSeries) -> Result<UniformSeries> {
    if s.step != 1 {
        return Err(Error::InvalidParameter(format!(
            "minute aggregation expects a 1 s series, got step {}",
            s.step
        )));
    }
    let values = s
        .values()
        .chunks(MINUTE as usize)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    UniformSeries::new(s.start, MINUTE, values, s.unit.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ShortTerm,
    LongTerm,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ShortTerm => "short-term",
            Provenance::LongTerm => "long-term",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusedForecast {
    pub series: UniformSeries,
    /// One tag per sample of `series`.
    pub provenance: Vec<Provenance>,
}

impl FusedForecast {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["timestamp", "sop_rad_per_s", "provenance"])?;
        for (i, (v, p)) in self.series.values().iter().zip(&self.provenance).enumerate() {
            w.write_record([
                format_timestamp(self.series.timestamp(i)),
                v.to_string(),
                p.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Minute timestamps spanned by the long-term forecast.
pub fn minute_grid(long: &UniformSeries) -> Vec<i64> {
    let n = (long.end() - long.start) / MINUTE + 1;
    (0..n).map(|k| long.start + k * MINUTE).collect()
}

/// Merges forecasts over the minute grid of `long`; `windy` holds one gate
/// decision per grid minute.
pub fn fuse(long: &UniformSeries, short_minutes: &[UniformSeries], windy: &[bool]) -> Result<FusedForecast> {
    let grid = minute_grid(long);
    if windy.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: windy.len(),
            context: "gate decisions per minute",
        });
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut provenance = Vec::with_capacity(grid.len());
    for (&t, &is_windy) in grid.iter().zip(windy) {
        if is_windy {
            let v = short_minutes
                .iter()
                .find_map(|s| s.index_of(t).map(|i| s.values()[i]))
                .ok_or(Error::CoverageGap { timestamp: t })?;
            values.push(v);
            provenance.push(Provenance::ShortTerm);
        } else {
            values.push(long.interpolate_at(t).expect("grid lies inside the long forecast"));
            provenance.push(Provenance::LongTerm);
        }
    }
    Ok(FusedForecast {
        series: UniformSeries::new(long.start, MINUTE, values, long.unit.clone())?,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gate_examples() {
        assert!(wind_gate(&[3.0, 12.0, 4.0], 10.0).unwrap());
        assert!(!wind_gate(&[9.99], 10.0).unwrap());
        assert!(wind_gate(&[10.0], 10.0).unwrap());
        assert!(wind_gate(&[], 10.0).is_err());
    }

    #[test]
    fn threshold_quantile() {
        let g: Vec<f64> = (1..=5).map(f64::from).collect();
        assert_eq!(gust_threshold(&g, 0.75).unwrap(), 4.0);
        assert_eq!(gust_threshold(&g, 0.5).unwrap(), 3.0);
        assert!((gust_threshold(&[1.0, 2.0], 0.75).unwrap() - 1.75).abs() <= 1e-15);
        assert!(gust_threshold(&[0.0, 0.0], 0.75).is_err());
    }

    #[test]
    fn aggregation_examples() {
        let s = UniformSeries::new(0, 1, vec![5.0; 60], "").unwrap();
        assert_eq!(aggregate_to_minutes(&s).unwrap().values(), &[5.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..120).map(|_| rng.random_range(0.0..10.0)).collect();
        let m = aggregate_to_minutes(&UniformSeries::new(0, 1, v.clone(), "").unwrap()).unwrap();
        assert_eq!(m.len(), 2);
        for k in 0..2 {
            let mut brute = 0.0;
            for x in &v[60 * k..60 * (k + 1)] {
                brute += x;
            }
            assert!((m.values()[k] - brute / 60.0).abs() <= 1e-12);
        }

        let v: Vec<f64> = (0..90).map(f64::from).collect();
        let m = aggregate_to_minutes(&UniformSeries::new(0, 1, v, "").unwrap()).unwrap();
        assert_eq!(m.values(), &[29.5, 74.5]);
        assert!(aggregate_to_minutes(&UniformSeries::new(0, 60, vec![1.0], "").unwrap()).is_err());
    }

    #[test]
    fn windy_minute_without_coverage_fails() {
        let long = UniformSeries::new(0, 1800, vec![1.0, 2.0], "").unwrap();
        let mut gate = vec![false; 31];
        gate[10] = true;
        assert!(matches!(
            fuse(&long, &[], &gate),
            Err(Error::CoverageGap { timestamp: 600 })
        ));
        assert!(fuse(&long, &[], &gate[..5]).is_err());
    }
}
