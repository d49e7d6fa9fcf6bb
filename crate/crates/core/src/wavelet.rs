//! Decimated db5 wavelet transform with symmetric (half-point) boundary
//! extension.
//!
//! A single step maps a length-`n` signal to approximation and detail bands of
//! length `floor((n + 9) / 2)`. The inverse step reconstructs exactly, and
//! multi-level pyramids are stored as `[A_J, D_J, ..., D_1]`.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FILTER_LEN: usize = 10;

/// Hard cap on decomposition depth. Band lengths never drop below 5 under the
/// symmetric rule, so deeper pyramids only repeat boundary content.
pub const MAX_LEVELS: usize = 16;

/// Daubechies 5 scaling coefficients (sum `sqrt(2)`, unit energy).
const DB5: [f64; FILTER_LEN] = [
    0.160_102_397_974_192_93,
    0.603_829_269_797_189_6,
    0.724_308_528_437_772_9,
    0.138_428_145_901_320_74,
    -0.242_294_887_066_382_03,
    -0.032_244_869_584_638_375,
    0.077_571_493_840_045_72,
    -0.006_241_490_212_798_274,
    -0.012_580_751_999_081_999,
    0.003_335_725_285_473_771_2,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Db5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub levels: usize,
}

impl WaveletSpec {
    pub fn db5(levels: usize) -> Self {
        Self {
            family: WaveletFamily::Db5,
            levels,
        }
    }

    pub fn filters(&self) -> FilterBank {
        match self.family {
            WaveletFamily::Db5 => db5_filters(),
        }
    }

    /// Number of bands, `levels + 1`.
    pub fn band_count(&self) -> usize {
        self.levels + 1
    }
}

/// Analysis filters are applied as correlations, synthesis filters as
/// convolutions; `rec_*` are the time reverses of `dec_*`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub dec_lo: [f64; FILTER_LEN],
    pub dec_hi: [f64; FILTER_LEN],
    pub rec_lo: [f64; FILTER_LEN],
    pub rec_hi: [f64; FILTER_LEN],
}

pub fn db5_filters() -> FilterBank {
    let h = DB5;
    let g: [f64; FILTER_LEN] =
        std::array::from_fn(|k| if k % 2 == 0 { h[FILTER_LEN - 1 - k] } else { -h[FILTER_LEN - 1 - k] });
    let mut rec_lo = h;
    rec_lo.reverse();
    let mut rec_hi = g;
    rec_hi.reverse();
    FilterBank {
        dec_lo: h,
        dec_hi: g,
        rec_lo,
        rec_hi,
    }
}

/// Length of each band produced by one analysis step.
pub fn step_len(n: usize) -> usize {
    (n + FILTER_LEN - 1) / 2
}

fn check_levels(n: usize, levels: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::SignalTooShort(n));
    }
    if levels == 0 || levels > MAX_LEVELS {
        return Err(Error::TooManyLevels { levels, length: n });
    }
    Ok(())
}

/// Band lengths `[A_J, D_J, ..., D_1]` for a length-`n` signal.
pub fn coeff_lengths(n: usize, levels: usize) -> Result<Vec<usize>> {
    check_levels(n, levels)?;
    let mut details = Vec::with_capacity(levels);
    let mut len = n;
    for _ in 0..levels {
        len = step_len(len);
        details.push(len);
    }
    let mut out = vec![len];
    out.extend(details.iter().rev());
    Ok(out)
}

/// Input length seen by each analysis step: `[n, n_1, ..., n_{J-1}]`.
fn level_inputs(n: usize, levels: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(levels);
    let mut len = n;
    for _ in 0..levels {
        v.push(len);
        len = step_len(len);
    }
    v
}

#[inline]
fn sym_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

const SHIFT: isize = FILTER_LEN as isize - 2;

/// One analysis step. Returns `(approximation, detail)`.
pub fn dwt_step(x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::SignalTooShort(n));
    }
    let f = db5_filters();
    let len = step_len(n);
    let mut a = Vec::with_capacity(len);
    let mut d = Vec::with_capacity(len);
    for o in 0..len {
        let base = 2 * o as isize - SHIFT;
        let (mut sa, mut sd) = (0.0, 0.0);
        for k in 0..FILTER_LEN {
            let v = x[sym_index(base + k as isize, n)];
            sa += f.dec_lo[k] * v;
            sd += f.dec_hi[k] * v;
        }
        a.push(sa);
        d.push(sd);
    }
    Ok((a, d))
}

/// One synthesis step; `out_len` is the length of the signal that was analysed.
pub fn idwt_step(a: &[f64], d: &[f64], out_len: usize) -> Result<Vec<f64>> {
    if a.len() != d.len() {
        return Err(Error::InconsistentPyramid(format!(
            "approximation has {} coefficients but detail has {}",
            a.len(),
            d.len()
        )));
    }
    if out_len < 2 || step_len(out_len) != a.len() {
        return Err(Error::InconsistentPyramid(format!(
            "{} coefficients cannot reconstruct {out_len} samples",
            a.len()
        )));
    }
    let f = db5_filters();
    let mut out = vec![0.0; out_len];
    for (i, slot) in out.iter_mut().enumerate() {
        // taps k = i + SHIFT - 2o must lie in [0, FILTER_LEN)
        let hi = (i as isize + SHIFT) / 2;
        let lo = ((i as isize + SHIFT - FILTER_LEN as isize + 2) / 2).max(0);
        let mut s = 0.0;
        for o in lo..=hi.min(a.len() as isize - 1) {
            let k = (i as isize + SHIFT - 2 * o) as usize;
            if k < FILTER_LEN {
                s += a[o as usize] * f.dec_lo[k] + d[o as usize] * f.dec_hi[k];
            }
        }
        *slot = s;
    }
    Ok(out)
}

/// Multi-level decomposition, bands ordered `[A_J, D_J, ..., D_1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    levels: usize,
    original_length: usize,
    bands: Vec<Vec<f64>>,
}

impl CoefficientPyramid {
    pub fn from_bands(levels: usize, original_length: usize, bands: Vec<Vec<f64>>) -> Result<Self> {
        let expected = coeff_lengths(original_length, levels)?;
        if bands.len() != expected.len() {
            return Err(Error::InconsistentPyramid(format!(
                "expected {} bands, got {}",
                expected.len(),
                bands.len()
            )));
        }
        for (k, (b, &len)) in bands.iter().zip(&expected).enumerate() {
            if b.len() != len {
                return Err(Error::InconsistentPyramid(format!(
                    "band {} has {} coefficients, expected {len}",
                    band_name(levels, k),
                    b.len()
                )));
            }
        }
        Ok(Self {
            levels,
            original_length,
            bands,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn bands(&self) -> &[Vec<f64>] {
        &self.bands
    }

    pub fn band(&self, k: usize) -> &[f64] {
        &self.bands[k]
    }

    pub fn into_bands(self) -> Vec<Vec<f64>> {
        self.bands
    }

    pub fn band_names(&self) -> Vec<String> {
        band_names(self.levels)
    }

    pub fn to_dump(&self) -> PyramidDump {
        PyramidDump {
            levels: self.levels,
            original_length: self.original_length,
            bands: self
                .band_names()
                .into_iter()
                .zip(self.bands.iter().cloned())
                .collect(),
        }
    }
}

/// JSON form: `{"levels", "original_length", "bands": {"A5": [...], "D5": ..., "D1": ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PyramidDump {
    pub levels: usize,
    pub original_length: usize,
    pub bands: IndexMap<String, Vec<f64>>,
}

impl PyramidDump {
    pub fn into_pyramid(self) -> Result<CoefficientPyramid> {
        let mut bands = self.bands;
        let ordered = band_names(self.levels)
            .into_iter()
            .map(|name| {
                bands
                    .swap_remove(&name)
                    .ok_or_else(|| Error::InconsistentPyramid(format!("missing band {name}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientPyramid::from_bands(self.levels, self.original_length, ordered)
    }
}

/// Name of band `k` in `[A_J, D_J, ..., D_1]` order.
pub fn band_name(levels: usize, k: usize) -> String {
    if k == 0 {
        format!("A{levels}")
    } else {
        format!("D{}", levels + 1 - k)
    }
}

pub fn band_names(levels: usize) -> Vec<String> {
    (0..=levels).map(|k| band_name(levels, k)).collect()
}

pub fn wavedec(x: &[f64], levels: usize) -> Result<CoefficientPyramid> {
    check_levels(x.len(), levels)?;
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = dwt_step(&approx)?;
        details.push(d);
        approx = a;
    }
    let mut bands = Vec::with_capacity(levels + 1);
    bands.push(approx);
    bands.extend(details.into_iter().rev());
    Ok(CoefficientPyramid {
        levels,
        original_length: x.len(),
        bands,
    })
}

pub fn waverec(p: &CoefficientPyramid) -> Result<Vec<f64>> {
    waverec_bands(p.levels, p.original_length, &p.bands)
}

/// Reconstruction from raw bands; validates lengths against `original_length`.
pub fn waverec_bands(levels: usize, original_length: usize, bands: &[Vec<f64>]) -> Result<Vec<f64>> {
    let expected = coeff_lengths(original_length, levels)?;
    if bands.len() != expected.len() {
        return Err(Error::InconsistentPyramid(format!(
            "expected {} bands, got {}",
            expected.len(),
            bands.len()
        )));
    }
    for (k, (b, &len)) in bands.iter().zip(&expected).enumerate() {
        if b.len() != len {
            return Err(Error::InconsistentPyramid(format!(
                "band {} has {} coefficients, expected {len}",
                band_name(levels, k),
                b.len()
            )));
        }
    }
    let inputs = level_inputs(original_length, levels);
    let mut approx = bands[0].clone();
    for (k, detail) in bands[1..].iter().enumerate() {
        let out_len = inputs[levels - 1 - k];
        approx = idwt_step(&approx, detail, out_len)?;
    }
    Ok(approx)
}
