//! Monte Carlo estimate of the camera orientation PDF from recorded
//! yaw/pitch samples: random-interval resampling, per-axis histograms,
//! a chi-square independence test, uniform fits and assembly of the joint
//! grid table.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub const YAW_RANGE: AngleRange = AngleRange { lo: -PI, hi: PI, closed: false };
pub const PITCH_RANGE: AngleRange = AngleRange { lo: -FRAC_PI_2, hi: FRAC_PI_2, closed: true };

/// Significance level of both the goodness-of-fit and independence tests.
pub const SIGNIFICANCE: f64 = 0.05;

/// Admissible interval of an angle; `closed` includes the upper end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleRange {
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl AngleRange {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && (v < self.hi || (self.closed && v == self.hi))
    }

    fn bin(&self, v: f64, bins: usize) -> usize {
        (((v - self.lo) / self.width() * bins as f64) as usize).min(bins - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSample {
    pub t: f64,
    pub yaw: f64,
    pub pitch: f64,
}

/// Time-ordered yaw/pitch records.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSamples {
    samples: Vec<AngleSample>,
}

impl AngleSamples {
    pub fn new(samples: Vec<AngleSample>) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            if !YAW_RANGE.contains(s.yaw) || !PITCH_RANGE.contains(s.pitch) {
                return Err(Error::invalid(format!("sample {i} has an angle out of range")));
            }
            if !s.t.is_finite() || (i > 0 && s.t <= samples[i - 1].t) {
                return Err(Error::invalid(format!("timestamps must be strictly increasing (sample {i})")));
            }
        }
        Ok(Self { samples })
    }

    /// Parses `t,alpha_rad,beta_rad` CSV with a header line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::EmptyInput)?;
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        if columns != ["t", "alpha_rad", "beta_rad"] {
            return Err(Error::invalid(format!("expected header t,alpha_rad,beta_rad, found {header}")));
        }
        let samples = lines
            .enumerate()
            .map(|(i, line)| {
                let values: Vec<f64> = line
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::invalid(format!("line {}: {e}", i + 2)))?;
                match values[..] {
                    [t, yaw, pitch] => Ok(AngleSample { t, yaw, pitch }),
                    _ => Err(Error::invalid(format!("line {}: expected 3 columns", i + 2))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn as_slice(&self) -> &[AngleSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn yaws(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.yaw).collect()
    }

    pub fn pitches(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.pitch).collect()
    }

    /// Median spacing of the timestamps.
    pub fn sample_period(&self) -> Option<f64> {
        let mut gaps: Vec<f64> = self.samples.windows(2).map(|w| w[1].t - w[0].t).collect();
        if gaps.is_empty() {
            return None;
        }
        gaps.sort_by(f64::total_cmp);
        Some(gaps[gaps.len() / 2])
    }
}

/// Keeps the first sample at or after each of a sequence of random times.
/// Gaps between target times are `mean_gap / 2 + Exp(mean = mean_gap / 2)`,
/// so a mean gap at least as long as the recording keeps at most two samples.
pub fn random_interval_resample(samples: &AngleSamples, mean_gap: f64, seed: u64) -> Result<AngleSamples> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 samples, got {}", samples.len())));
    }
    if !(mean_gap > 0.0 && mean_gap.is_finite()) {
        return Err(Error::invalid("mean gap must be > 0"));
    }
    let half = mean_gap / 2.0;
    let exp = Exp::new(1.0 / half).expect("positive rate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = samples.as_slice();
    let end = all.last().unwrap().t;
    let mut target = all[0].t;
    let mut cursor = 0;
    let mut kept = Vec::new();
    loop {
        target += half + exp.sample(&mut rng);
        if target > end {
            break;
        }
        while all[cursor].t < target {
            cursor += 1;
        }
        if kept.last().is_none_or(|last: &AngleSample| last.t < all[cursor].t) {
            kept.push(all[cursor]);
        }
    }
    Ok(AngleSamples { samples: kept })
}

/// Normalized histogram over an angle range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretePdf1D {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DiscretePdf1D {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn samples(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.bins() as f64;
        (0..=self.bins()).map(|i| self.lo + w * i as f64).collect()
    }
}

pub fn histogram_density(values: &[f64], range: AngleRange, bins: usize) -> Result<DiscretePdf1D> {
    if bins == 0 {
        return Err(Error::invalid("bins must be at least 1"));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = vec![0u64; bins];
    for (i, &v) in values.iter().enumerate() {
        if !range.contains(v) {
            return Err(Error::invalid(format!("value {i} = {v} outside [{}, {}]", range.lo, range.hi)));
        }
        counts[range.bin(v, bins)] += 1;
    }
    let total = values.len() as f64;
    Ok(DiscretePdf1D {
        lo: range.lo,
        hi: range.hi,
        masses: counts.iter().map(|&c| c as f64 / total).collect(),
        counts,
    })
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    dist.sf(statistic).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceTest {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
    pub independent: bool,
    pub yaw_bins: usize,
    pub pitch_bins: usize,
}

/// Pearson chi-square test of independence on the joint histogram.
/// Rows or columns without observations are dropped from the table.
pub fn independence_test(yaws: &[f64], pitches: &[f64], yaw_bins: usize, pitch_bins: usize) -> Result<IndependenceTest> {
    if yaws.len() != pitches.len() {
        return Err(Error::LengthMismatch { expected: yaws.len(), found: pitches.len() });
    }
    if yaws.is_empty() {
        return Err(Error::EmptyInput);
    }
    if yaw_bins == 0 || pitch_bins == 0 {
        return Err(Error::invalid("bins must be at least 1"));
    }
    let mut joint = vec![0u64; yaw_bins * pitch_bins];
    for (&a, &b) in yaws.iter().zip(pitches) {
        if !YAW_RANGE.contains(a) || !PITCH_RANGE.contains(b) {
            return Err(Error::invalid("angle out of range"));
        }
        joint[YAW_RANGE.bin(a, yaw_bins) * pitch_bins + PITCH_RANGE.bin(b, pitch_bins)] += 1;
    }
    let rows: Vec<u64> = (0..yaw_bins).map(|i| joint[i * pitch_bins..(i + 1) * pitch_bins].iter().sum()).collect();
    let cols: Vec<u64> = (0..pitch_bins).map(|j| (0..yaw_bins).map(|i| joint[i * pitch_bins + j]).sum()).collect();
    let total = yaws.len() as f64;
    let mut statistic = 0.0;
    let mut min_expected = f64::INFINITY;
    for (i, &r) in rows.iter().enumerate().filter(|(_, &r)| r > 0) {
        for (j, &c) in cols.iter().enumerate().filter(|(_, &c)| c > 0) {
            let expected = r as f64 * c as f64 / total;
            min_expected = min_expected.min(expected);
            let d = joint[i * pitch_bins + j] as f64 - expected;
            statistic += d * d / expected;
        }
    }
    if min_expected < 5.0 {
        return Err(Error::InsufficientExpectedCount { min_expected });
    }
    let occupied = |v: &[u64]| v.iter().filter(|&&x| x > 0).count();
    let dof = occupied(&rows).saturating_sub(1) * occupied(&cols).saturating_sub(1);
    let p_value = chi_square_sf(statistic, dof);
    Ok(IndependenceTest { statistic, p_value, dof, independent: p_value >= SIGNIFICANCE, yaw_bins, pitch_bins })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformFit {
    /// Fitted constant density (1 / range width).
    pub density: f64,
    /// Chi-square goodness-of-fit p-value against equal bin masses.
    pub p_value: f64,
    pub accepted: bool,
}

pub fn fit_uniform(pdf: &DiscretePdf1D) -> UniformFit {
    let n = pdf.samples() as f64;
    let expected = n / pdf.bins() as f64;
    let statistic: f64 = pdf.counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = chi_square_sf(statistic, pdf.bins() - 1);
    UniformFit { density: 1.0 / (pdf.hi - pdf.lo), p_value, accepted: p_value >= SIGNIFICANCE }
}

/// Yaw-major grid table (`index = yaw_cell · pitch_cells + pitch_cell`) of
/// the product of two uniform fits over equal-width cells.
pub fn uniform_product_table(yaw_cells: usize, pitch_cells: usize) -> Vec<f64> {
    let cell = (YAW_RANGE.width() / yaw_cells as f64) * (PITCH_RANGE.width() / pitch_cells as f64);
    let density = 1.0 / YAW_RANGE.width() * (1.0 / PITCH_RANGE.width());
    let raw = vec![density * cell; yaw_cells * pitch_cells];
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Empirical joint histogram as a yaw-major grid table.
pub fn empirical_table(samples: &AngleSamples, yaw_cells: usize, pitch_cells: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut table = vec![0.0; yaw_cells * pitch_cells];
    for s in samples.as_slice() {
        table[YAW_RANGE.bin(s.yaw, yaw_cells) * pitch_cells + PITCH_RANGE.bin(s.pitch, pitch_cells)] += 1.0;
    }
    let total = samples.len() as f64;
    table.iter_mut().for_each(|w| *w /= total);
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationParams {
    pub yaw_cells: usize,
    pub pitch_cells: usize,
    /// Mean resampling gap; defaults to 50 sample periods.
    pub mean_gap: Option<f64>,
    pub seed: u64,
}

impl EstimationParams {
    pub fn new(yaw_cells: usize, pitch_cells: usize, seed: u64) -> Self {
        Self { yaw_cells, pitch_cells, mean_gap: None, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfDecision {
    UniformProduct,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub samples_in: usize,
    pub samples_used: usize,
    pub mean_gap: f64,
    pub yaw: DiscretePdf1D,
    pub pitch: DiscretePdf1D,
    pub yaw_fit: UniformFit,
    pub pitch_fit: UniformFit,
    pub independence: IndependenceTest,
    pub decision: PdfDecision,
}

/// Output table, readable as a scene `pdf` entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfTable {
    pub schema: u32,
    pub yaw_cells: usize,
    pub pitch_cells: usize,
    pub table: Vec<f64>,
}

/// Chi-square test with both bin counts halved until every expected count
/// reaches 5.
fn coarsened_independence(samples: &AngleSamples, mut yaw_bins: usize, mut pitch_bins: usize) -> Result<IndependenceTest> {
    let (yaws, pitches) = (samples.yaws(), samples.pitches());
    loop {
        match independence_test(&yaws, &pitches, yaw_bins, pitch_bins) {
            Err(Error::InsufficientExpectedCount { min_expected }) => {
                if yaw_bins == 1 && pitch_bins == 1 {
                    return Err(Error::InsufficientExpectedCount { min_expected });
                }
                yaw_bins = yaw_bins.div_ceil(2);
                pitch_bins = pitch_bins.div_ceil(2);
            }
            other => return other,
        }
    }
}

/// Full pipeline: resample, histogram, test, fit and assemble.
pub fn estimate_pdf(samples: &AngleSamples, params: &EstimationParams) -> Result<(PdfTable, EstimationReport)> {
    if params.yaw_cells == 0 || params.pitch_cells == 0 {
        return Err(Error::invalid("grid cells must be at least 1"));
    }
    let period = samples
        .sample_period()
        .ok_or_else(|| Error::InsufficientData(format!("need at least 2 samples, got {}", samples.len())))?;
    let mean_gap = params.mean_gap.unwrap_or(50.0 * period);
    let used = random_interval_resample(samples, mean_gap, params.seed)?;
    if used.is_empty() {
        return Err(Error::InsufficientData("resampling kept no samples".into()));
    }
    let yaw = histogram_density(&used.yaws(), YAW_RANGE, params.yaw_cells)?;
    let pitch = histogram_density(&used.pitches(), PITCH_RANGE, params.pitch_cells)?;
    let (yaw_fit, pitch_fit) = (fit_uniform(&yaw), fit_uniform(&pitch));
    let independence = coarsened_independence(&used, params.yaw_cells, params.pitch_cells)?;
    let (decision, table) = if yaw_fit.accepted && pitch_fit.accepted && independence.independent {
        (PdfDecision::UniformProduct, uniform_product_table(params.yaw_cells, params.pitch_cells))
    } else {
        (PdfDecision::Empirical, empirical_table(&used, params.yaw_cells, params.pitch_cells)?)
    };
    let report = EstimationReport {
        samples_in: samples.len(),
        samples_used: used.len(),
        mean_gap,
        yaw,
        pitch,
        yaw_fit,
        pitch_fit,
        independence,
        decision,
    };
    let table = PdfTable { schema: 1, yaw_cells: params.yaw_cells, pitch_cells: params.pitch_cells, table };
    Ok((table, report))
}
