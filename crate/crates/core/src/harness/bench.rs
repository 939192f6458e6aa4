//! Total footprint of encoded trees over a mixed bit-string dataset.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bittree::{encode_bits, BitString, Scheme};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub lengths: Vec<usize>,
    /// Bit strings per length, shared by all schemes.
    pub samples: usize,
    pub schemes: Vec<Scheme>,
    /// Share of samples drawn with a swept ones-probability; the rest sweep
    /// the lag-1 autocorrelation.
    pub ones_share: f64,
    /// Range of the probability that adjacent bits agree.
    pub autocorrelation: (f64, f64),
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            lengths: vec![50, 100, 200, 400],
            samples: 200,
            schemes: vec![Scheme::Squares, Scheme::Cubes],
            ones_share: 0.7,
            autocorrelation: (0.1, 0.9),
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        if self.lengths.is_empty() || self.schemes.is_empty() {
            return Err(invalid("need at least one length and one scheme"));
        }
        if !(0.0..=1.0).contains(&self.ones_share) {
            return Err(invalid("ones_share must lie in [0, 1]"));
        }
        let (lo, hi) = self.autocorrelation;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(invalid("autocorrelation range must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// How a sample was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleSource {
    OnesProbability(f64),
    Autocorrelation(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSample {
    pub length: usize,
    pub source: SampleSource,
    pub ones_fraction: f64,
    /// One entry per configured scheme, in order.
    pub footprints: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub length: usize,
    pub scheme: Scheme,
    pub median: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub samples: Vec<BenchSample>,
}

/// Linear sweep position of item `i` out of `n`.
fn sweep(i: usize, n: usize, lo: f64, hi: f64) -> f64 {
    if n <= 1 { (lo + hi) / 2.0 } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }
}

fn draw<R: Rng + ?Sized>(length: usize, source: SampleSource, rng: &mut R) -> BitString {
    let mut bits = BitString::new();
    match source {
        SampleSource::OnesProbability(p) => {
            for _ in 0..length {
                bits.push(rng.random_bool(p));
            }
        }
        SampleSource::Autocorrelation(same) => {
            let mut prev = rng.random_bool(0.5);
            for i in 0..length {
                if i > 0 && !rng.random_bool(same) {
                    prev = !prev;
                }
                bits.push(prev);
            }
        }
    }
    bits
}

/// The dataset for one length: a ones-probability sweep over `[0, 1]`
/// followed by an ascending autocorrelation sweep.
pub fn bench_dataset(cfg: &BenchConfig, length: usize) -> Vec<(SampleSource, BitString)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(length as u64);
    let n_ones = (cfg.samples as f64 * cfg.ones_share).round() as usize;
    let n_auto = cfg.samples - n_ones;
    let (lo, hi) = cfg.autocorrelation;
    let sources = (0..n_ones)
        .map(|i| SampleSource::OnesProbability(sweep(i, n_ones, 0.0, 1.0)))
        .chain((0..n_auto).map(|i| SampleSource::Autocorrelation(sweep(i, n_auto, lo, hi))));
    sources.map(|s| (s, draw(length, s, &mut rng))).collect()
}

fn median(values: &mut [u64]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 { values[n / 2] as f64 } else { (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0 }
}

fn stddev(values: &[u64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    (values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n).sqrt()
}

pub fn footprint_benchmark(cfg: &BenchConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let per_length: Vec<Vec<BenchSample>> = cfg
        .lengths
        .par_iter()
        .map(|&length| {
            bench_dataset(cfg, length)
                .into_iter()
                .map(|(source, bits)| BenchSample {
                    length,
                    source,
                    ones_fraction: bits.ones_fraction(),
                    footprints: cfg.schemes.iter().map(|&s| encode_bits(&bits, s).total_footprint()).collect(),
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for (length, samples) in cfg.lengths.iter().zip(&per_length) {
        for (k, &scheme) in cfg.schemes.iter().enumerate() {
            let mut values: Vec<u64> = samples.iter().map(|s| s.footprints[k]).collect();
            rows.push(BenchRow {
                length: *length,
                scheme,
                stddev: stddev(&values),
                median: median(&mut values),
                n: values.len(),
                seed: cfg.seed,
            });
        }
    }
    Ok(BenchResult { rows, samples: per_length.into_iter().flatten().collect() })
}

/// CSV with columns `length,scheme,median,stddev,n,seed`.
pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| invalid(format!("csv: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig { lengths: vec![16, 32, 64], samples: 40, seed: 7, ..BenchConfig::default() }
    }

    #[test]
    fn dataset_sweeps_both_parameters() {
        let cfg = small();
        let data = bench_dataset(&cfg, 64);
        assert_eq!(data.len(), 40);
        let ones: Vec<_> = data.iter().filter(|(s, _)| matches!(s, SampleSource::OnesProbability(_))).collect();
        assert_eq!(ones.len(), 28);
        assert_eq!(ones[0].1.count_ones(), 0);
        assert_eq!(ones[27].1.count_ones(), 64);
        let SampleSource::Autocorrelation(last) = data[39].0 else { panic!() };
        assert!((last - 0.9).abs() < 1e-12);
        assert!(data.iter().all(|(_, b)| b.len() == 64));
    }

    #[test]
    fn footprint_grows_with_length() {
        let result = footprint_benchmark(&small()).unwrap();
        assert_eq!(result.rows.len(), 6);
        let squares: Vec<f64> = result.rows.iter().filter(|r| r.scheme == Scheme::Squares).map(|r| r.median).collect();
        assert!(squares.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cubes_cost_more_than_squares() {
        // the gap is a few percent and closes near 64 bits
        let cfg = BenchConfig { lengths: vec![50, 100, 200], ..BenchConfig::default() };
        let result = footprint_benchmark(&cfg).unwrap();
        for pair in result.rows.chunks(2) {
            assert!(pair[1].median > pair[0].median, "cubes above squares at {}", pair[0].length);
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let render = || {
            let mut buf = Vec::new();
            write_bench_csv(&footprint_benchmark(&small()).unwrap().rows, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let text = render();
        assert_eq!(text, render());
        assert!(text.starts_with("length,scheme,median,stddev,n,seed\n16,squares,"));
    }

    #[test]
    fn config_validation() {
        assert!(BenchConfig { samples: 0, ..BenchConfig::default() }.validate().is_err());
        assert!(BenchConfig { autocorrelation: (0.9, 0.1), ..BenchConfig::default() }.validate().is_err());
    }
}
