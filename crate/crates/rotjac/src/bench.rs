//! Timing and accuracy of the rotation Jacobian formulas, behind
//! `rotjac bench`.
//!
//! Accuracy is measured against a Richardson-extrapolated central difference.
//! Timing always runs on one thread after a warm-up pass; `jobs` only spreads
//! the oracle evaluations.

use std::f64::consts::PI;
use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use rotjac_core::fd::{default_step, fd_rotation_jacobian, fd_rotation_jacobian_extrapolated};
use rotjac_core::jacobian::{drot_classical, drot_compact};
use rotjac_core::sampling::{rotation_vector_in_band, trial_rng};
use rotjac_core::{RotationJacobian, Vector3};
use serde::Serialize;

use crate::output::{csv_real, csv_row};
use crate::parallel::map_chunks;

/// Step of the extrapolated oracle. Its truncation error is `O(h⁴)`.
pub const ORACLE_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchFormula {
    Compact,
    Classical,
    FiniteDiff,
}

impl BenchFormula {
    pub const ALL: [BenchFormula; 3] = [BenchFormula::Compact, BenchFormula::Classical, BenchFormula::FiniteDiff];

    pub fn name(&self) -> &'static str {
        match self {
            BenchFormula::Compact => "compact",
            BenchFormula::Classical => "classical",
            BenchFormula::FiniteDiff => "finite-diff",
        }
    }

    pub fn evaluate(&self, v: &Vector3) -> RotationJacobian {
        match self {
            BenchFormula::Compact => drot_compact(v),
            BenchFormula::Classical => drot_classical(v),
            BenchFormula::FiniteDiff => fd_rotation_jacobian(v, default_step(v)),
        }
    }
}

/// A rotation-angle interval `[lo, hi]` inside `(0, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    lo: f64,
    hi: f64,
}

impl Band {
    pub fn try_new(lo: f64, hi: f64) -> Result<Self, String> {
        if !(lo > 0.0 && hi < PI && lo <= hi) {
            return Err(format!("band {lo}:{hi} must satisfy 0 < lo <= hi < π"));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

impl FromStr for Band {
    type Err = String;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Band::try_new(parse(lo)?, parse(hi)?)
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub formula: BenchFormula,
    pub band_lo: f64,
    pub band_hi: f64,
    pub trials: usize,
    pub mean_ns_per_eval: f64,
    pub max_abs_err: f64,
}

pub const CSV_HEADER: [&str; 6] = ["formula", "band_lo", "band_hi", "trials", "mean_ns_per_eval", "max_abs_err"];

/// One record per `(band, formula)`, bands outermost.
///
/// # Panics
///
/// If `trials` is zero.
pub fn run_bench(bands: &[Band], trials: usize, seed: u64, jobs: usize) -> Vec<BenchRecord> {
    assert!(trials > 0, "at least one trial is needed");
    let mut records = Vec::with_capacity(bands.len() * BenchFormula::ALL.len());
    for (index, band) in bands.iter().enumerate() {
        let inputs: Vec<Vector3> = (0..trials as u64)
            .map(|k| rotation_vector_in_band(&mut trial_rng(seed, ((index as u64) << 40) | k), band.lo, band.hi))
            .collect();
        let errors = map_chunks(trials as u64, jobs, |range| {
            let mut worst = [0.0_f64; 3];
            for k in range {
                let v = &inputs[k as usize];
                let oracle = fd_rotation_jacobian_extrapolated(v, ORACLE_STEP);
                for (w, formula) in worst.iter_mut().zip(BenchFormula::ALL) {
                    let err = formula.evaluate(v).max_abs_diff(&oracle);
                    if err.is_nan() || err > *w {
                        *w = err;
                    }
                }
            }
            worst
        });
        for (slot, formula) in BenchFormula::ALL.iter().enumerate() {
            let max_abs_err =
                errors.iter().map(|w| w[slot]).fold(0.0, |a: f64, b| if b.is_nan() { b } else { a.max(b) });
            records.push(BenchRecord {
                formula: *formula,
                band_lo: band.lo,
                band_hi: band.hi,
                trials,
                mean_ns_per_eval: time_per_eval(*formula, &inputs),
                max_abs_err,
            });
        }
    }
    records
}

fn time_per_eval(formula: BenchFormula, inputs: &[Vector3]) -> f64 {
    for v in inputs {
        black_box(formula.evaluate(black_box(v)));
    }
    let start = Instant::now();
    for v in inputs {
        black_box(formula.evaluate(black_box(v)));
    }
    start.elapsed().as_nanos() as f64 / inputs.len() as f64
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = csv_row(CSV_HEADER);
    for r in records {
        out += &csv_row([
            r.formula.name().to_owned(),
            csv_real(r.band_lo),
            csv_real(r.band_hi),
            r.trials.to_string(),
            csv_real(r.mean_ns_per_eval),
            csv_real(r.max_abs_err),
        ]);
    }
    out
}

pub fn to_text(records: &[BenchRecord]) -> String {
    let mut out =
        format!("{:<12} {:>8} {:>8} {:>8} {:>12} {:>13}\n", "formula", "lo", "hi", "trials", "ns/eval", "max_abs_err");
    for r in records {
        out += &format!(
            "{:<12} {:>8.4} {:>8.4} {:>8} {:>12.1} {:>13.5e}\n",
            r.formula.name(),
            r.band_lo,
            r.band_hi,
            r.trials,
            r.mean_ns_per_eval,
            r.max_abs_err
        );
    }
    out
}
