//! Robustness sweeps: sign a clean image, distort it, verify, record the
//! correct detection rate. Output is CSV.
//!
//! CSV columns, fixed order:
//!
//! `row,distortion,block_size,margin,reps,level,trial,cdr,mean_cdr,std_cdr,blocks,granularity_px`
//!
//! `row` is `trial` for one (cell, trial) measurement and `mean` for the
//! aggregate row that follows each cell's trials. Trial rows leave
//! `mean_cdr,std_cdr` empty; aggregate rows leave `trial,cdr` empty.
//! `blocks` is the number of authenticated blocks per image and
//! `granularity_px` the side of one localization cell.

use std::fmt::Write;

use blockauth_core::{
    add_gaussian_noise, sign_image, verify_image, AuthKey, ChannelMode, CodeSource, ImageBuffer,
    Margin, SignConfig, VerificationReport,
};
use rayon::prelude::*;

use crate::codec::jpeg_roundtrip;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "row,distortion,block_size,margin,reps,level,trial,cdr,mean_cdr,std_cdr,blocks,granularity_px";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distortion {
    /// Additive Gaussian noise; levels are variances on the unit scale.
    Gaussian,
    /// JPEG round-trip; levels are qualities.
    Jpeg,
}

impl Distortion {
    pub fn name(self) -> &'static str {
        match self {
            Distortion::Gaussian => "gaussian",
            Distortion::Jpeg => "jpeg",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub distortion: Distortion,
    pub block_sizes: Vec<usize>,
    pub margins: Vec<f64>,
    pub levels: Vec<f64>,
    pub trials: usize,
    /// Trial `t` uses noise seed `base_seed + t`.
    pub base_seed: u64,
    pub reps: usize,
    /// Trial `t` signs with key `key + t`.
    pub key: u64,
    pub mode: ChannelMode,
}

pub const DEFAULT_BLOCK_SIZES: [usize; 4] = [4, 8, 16, 32];
pub const DEFAULT_VARIANCES: [f64; 6] = [0.001, 0.0025, 0.005, 0.0075, 0.01, 0.02];
pub const DEFAULT_SWEEP_KEY: u64 = 0x0123_4567_89AB_CDEF;

/// 0 to 0.3 in steps of 0.05.
pub fn default_margins() -> Vec<f64> {
    (0..=6).map(|i| i as f64 / 20.0).collect()
}

/// Qualities 40 to 100 in steps of 10.
pub fn default_qualities() -> Vec<f64> {
    (4..=10).map(|q| (q * 10) as f64).collect()
}

impl SweepSpec {
    pub fn noise() -> Self {
        SweepSpec {
            distortion: Distortion::Gaussian,
            block_sizes: DEFAULT_BLOCK_SIZES.to_vec(),
            margins: default_margins(),
            levels: DEFAULT_VARIANCES.to_vec(),
            trials: 10,
            base_seed: 0,
            reps: 1,
            key: DEFAULT_SWEEP_KEY,
            mode: ChannelMode::PerChannel,
        }
    }

    pub fn jpeg() -> Self {
        SweepSpec {
            distortion: Distortion::Jpeg,
            block_sizes: vec![8],
            levels: default_qualities(),
            ..Self::noise()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(format!("sweep: {m}")));
        if self.block_sizes.is_empty() || self.margins.is_empty() || self.levels.is_empty() {
            return fail("value lists must be non-empty");
        }
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.reps == 0 {
            return fail("repetitions must be at least 1");
        }
        for &t in &self.margins {
            Margin::new(t)?;
        }
        for &l in &self.levels {
            let ok = match self.distortion {
                Distortion::Gaussian => l.is_finite() && l >= 0.0,
                Distortion::Jpeg => l.fract() == 0.0 && (1.0..=100.0).contains(&l),
            };
            if !ok {
                return fail("distortion level out of range");
            }
        }
        Ok(())
    }

    fn distort(&self, image: &ImageBuffer, level: f64, trial: usize) -> Result<ImageBuffer> {
        match self.distortion {
            Distortion::Gaussian => Ok(add_gaussian_noise(
                image,
                level,
                self.base_seed.wrapping_add(trial as u64),
            )?),
            Distortion::Jpeg => jpeg_roundtrip(image, level as u8),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub block_size: usize,
    pub margin: f64,
    pub level: f64,
    pub trial: usize,
    pub cdr: f64,
    pub blocks: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub block_size: usize,
    pub margin: f64,
    pub level: f64,
    pub mean: f64,
    /// Sample standard deviation over trials (0 for a single trial).
    pub std: f64,
    pub blocks: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub distortion: Distortion,
    pub reps: usize,
    pub trials: Vec<TrialRow>,
    pub cells: Vec<CellSummary>,
}

impl SweepResult {
    pub fn cell(&self, block_size: usize, margin: f64, level: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.block_size == block_size && c.margin == margin && c.level == level)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{CSV_HEADER}");
        let name = self.distortion.name();
        let reps = self.reps;
        let per_cell = self.trials.len() / self.cells.len().max(1);
        for (cell, rows) in self.cells.iter().zip(self.trials.chunks(per_cell)) {
            for r in rows {
                let _ = writeln!(
                    s,
                    "trial,{name},{},{},{reps},{},{},{:.6},,,{},{}",
                    r.block_size, r.margin, r.level, r.trial, r.cdr, r.blocks, r.block_size
                );
            }
            let _ = writeln!(
                s,
                "mean,{name},{},{},{reps},{},,,{:.6},{:.6},{},{}",
                cell.block_size,
                cell.margin,
                cell.level,
                cell.mean,
                cell.std,
                cell.blocks,
                cell.block_size
            );
        }
        s
    }
}

pub fn run_sweep(image: &ImageBuffer, spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(image, spec, |_, _| Ok(()))
}

/// Runs every (block size, margin, level, trial) job in parallel and calls
/// `on_trial` with each verification report. Results come back in
/// (block size, margin, level, trial) order.
pub fn run_sweep_with<F>(image: &ImageBuffer, spec: &SweepSpec, on_trial: F) -> Result<SweepResult>
where
    F: Fn(&TrialRow, &VerificationReport) -> Result<()> + Sync,
{
    spec.validate()?;
    let mut jobs = Vec::new();
    for &b in &spec.block_sizes {
        for &t in &spec.margins {
            for &level in &spec.levels {
                for trial in 0..spec.trials {
                    jobs.push((b, t, level, trial));
                }
            }
        }
    }

    let trials = jobs
        .par_iter()
        .map(|&(block_size, margin, level, trial)| {
            let key = AuthKey::new(spec.key.wrapping_add(trial as u64));
            let config = SignConfig {
                block_size,
                margin: Margin::new(margin)?,
                reps: spec.reps,
                mode: spec.mode,
                code: CodeSource::KeyDerived,
            };
            let descriptor = sign_image(image, key, &config)?;
            let distorted = spec.distort(image, level, trial)?;
            let report = verify_image(&distorted, &descriptor, key)?;
            let row = TrialRow {
                block_size,
                margin,
                level,
                trial,
                cdr: report.cdr,
                blocks: report.matched.len(),
            };
            on_trial(&row, &report)?;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let cells = trials
        .chunks(spec.trials)
        .map(|rows| {
            let n = rows.len() as f64;
            let mean = rows.iter().map(|r| r.cdr).sum::<f64>() / n;
            let std = if rows.len() > 1 {
                (rows.iter().map(|r| (r.cdr - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            CellSummary {
                block_size: rows[0].block_size,
                margin: rows[0].margin,
                level: rows[0].level,
                mean,
                std,
                blocks: rows[0].blocks,
            }
        })
        .collect();

    Ok(SweepResult {
        distortion: spec.distortion,
        reps: spec.reps,
        trials,
        cells,
    })
}

pub fn run_noise_sweep(image: &ImageBuffer, spec: &SweepSpec) -> Result<SweepResult> {
    if spec.distortion != Distortion::Gaussian {
        return Err(Error::InvalidArgument("expected a gaussian sweep".into()));
    }
    run_sweep(image, spec)
}

pub fn run_jpeg_sweep(image: &ImageBuffer, spec: &SweepSpec) -> Result<SweepResult> {
    if spec.distortion != Distortion::Jpeg {
        return Err(Error::InvalidArgument("expected a jpeg sweep".into()));
    }
    run_sweep(image, spec)
}
