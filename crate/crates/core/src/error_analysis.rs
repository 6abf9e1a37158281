//! Exhaustive accuracy characterization of the approximate multiplier.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuits::{approx_mul8, MulConfig, CONFIG_COUNT};

/// Multiplier power at the all-approximate mask, in microwatts.
pub const MUL8_POWER_MIN_UW: f64 = 70.2;
/// Multiplier power at the all-accurate mask, in microwatts.
pub const MUL8_POWER_MAX_UW: f64 = 101.3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ErrorAnalysisError {
    #[error("reference has {reference} values but candidate has {candidate}")]
    LengthMismatch { reference: usize, candidate: usize },
}

/// Accuracy of one multiplier configuration over all 65,536 input pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorStats {
    pub config: u8,
    /// Fraction of pairs with a wrong product.
    pub er: f64,
    /// Mean relative error distance over pairs with a nonzero exact product.
    pub mred: f64,
    pub mean_ed: f64,
    pub max_ed: u32,
    pub power_estimate_uw: f64,
}

/// Estimated 8x8 multiplier power, interpolated on the number of accurate cells.
pub fn power_estimate(cfg: MulConfig) -> f64 {
    let accurate = cfg.error_mask().count_ones() as f64;
    MUL8_POWER_MIN_UW + (MUL8_POWER_MAX_UW - MUL8_POWER_MIN_UW) * accurate / 7.0
}

/// Enumerates every 8-bit operand pair against the exact product.
///
/// Truncation in `cfg` is honored; the configuration sweep always uses 0.
pub fn error_stats_8x8(cfg: MulConfig) -> ErrorStats {
    let mut wrong = 0u32;
    let mut red_sum = 0.0f64;
    let mut red_count = 0u32;
    let mut ed_sum = 0u64;
    let mut max_ed = 0u32;
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            let exact = a as u32 * b as u32;
            let ed = (approx_mul8(a, b, cfg) as u32).abs_diff(exact);
            if ed != 0 {
                wrong += 1;
            }
            if exact != 0 {
                red_sum += ed as f64 / exact as f64;
                red_count += 1;
            }
            ed_sum += ed as u64;
            max_ed = max_ed.max(ed);
        }
    }
    let total = 65_536.0;
    ErrorStats {
        config: cfg.error_mask(),
        er: wrong as f64 / total,
        mred: red_sum / red_count as f64,
        mean_ed: ed_sum as f64 / total,
        max_ed,
        power_estimate_uw: power_estimate(cfg),
    }
}

/// One row per error mask 0x00..=0x7F, in mask order.
pub fn sweep_configs() -> Vec<ErrorStats> {
    (0..CONFIG_COUNT as u8)
        .into_par_iter()
        .map(|mask| error_stats_8x8(MulConfig::with_mask(mask)))
        .collect()
}

pub const SWEEP_HEADER: &str = "mask_hex,er,mred,mean_ed,max_ed,power_uW";

pub fn write_sweep_table<W: Write>(rows: &[ErrorStats], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "0x{:02X},{:.6},{:.6},{:.6},{},{:.4}",
            r.config, r.er, r.mred, r.mean_ed, r.max_ed, r.power_estimate_uw
        )?;
    }
    Ok(())
}

/// MRED range over every configuration except the fully accurate one.
pub fn nontrivial_mred_range(rows: &[ErrorStats]) -> Option<(f64, f64)> {
    rows.iter()
        .filter(|r| r.config != MulConfig::FULL_MASK)
        .map(|r| r.mred)
        .fold(None, |acc, m| match acc {
            None => Some((m, m)),
            Some((lo, hi)) => Some((lo.min(m), hi.max(m))),
        })
}

/// Signed error `approx - exact` for every 8x8 operand pair of one config.
pub struct ErrorTable {
    cfg: MulConfig,
    errors: Vec<i16>,
}

impl ErrorTable {
    pub fn build(cfg: MulConfig) -> Self {
        let errors = (0..65_536u32)
            .map(|i| {
                let (a, b) = ((i >> 8) as u8, i as u8);
                (approx_mul8(a, b, cfg) as i32 - (a as i32 * b as i32)) as i16
            })
            .collect();
        ErrorTable { cfg, errors }
    }

    pub fn config(&self) -> MulConfig {
        self.cfg
    }

    #[inline]
    pub fn error(&self, a: u8, b: u8) -> i32 {
        self.errors[(a as usize) << 8 | b as usize] as i32
    }
}

/// Element-wise error between an accurate run's outputs and an approximate run's.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct OutputErrorStats {
    pub er: f64,
    pub mred: f64,
    pub mean_ed: f64,
    pub max_ed: u64,
}

/// Words are compared as signed 32-bit values. Zero reference values are
/// left out of the MRED average.
pub fn app_output_error(
    reference: &[u32],
    candidate: &[u32],
) -> Result<OutputErrorStats, ErrorAnalysisError> {
    if reference.len() != candidate.len() {
        return Err(ErrorAnalysisError::LengthMismatch {
            reference: reference.len(),
            candidate: candidate.len(),
        });
    }
    if reference.is_empty() {
        return Ok(OutputErrorStats::default());
    }
    let mut wrong = 0usize;
    let mut red = (0.0f64, 0usize);
    let mut ed_sum = 0u128;
    let mut max_ed = 0u64;
    for (&r, &c) in reference.iter().zip(candidate) {
        let (r, c) = (r as i32 as i64, c as i32 as i64);
        let ed = r.abs_diff(c);
        if ed != 0 {
            wrong += 1;
        }
        if r != 0 {
            red.0 += ed as f64 / r.unsigned_abs() as f64;
            red.1 += 1;
        }
        ed_sum += ed as u128;
        max_ed = max_ed.max(ed);
    }
    let n = reference.len() as f64;
    Ok(OutputErrorStats {
        er: wrong as f64 / n,
        mred: if red.1 == 0 {
            0.0
        } else {
            red.0 / red.1 as f64
        },
        mean_ed: ed_sum as f64 / n,
        max_ed,
    })
}
