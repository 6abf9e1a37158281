//! Running programs under a cost model, and accurate-versus-approximate
//! comparisons across kernels.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::energy::{
    improvement, summary_across_apps, CostModel, EnergyError, EnergyMeter, EnergyReport,
    ImprovementSummary, Scope,
};
use crate::error_analysis::{app_output_error, OutputErrorStats};
use crate::isa::csr::{CSR_ALUCSR, CSR_DIVCSR, CSR_MULCSR};
use crate::isa::{CsrFile, Mnemonic};
use crate::kernels::{
    generate, Asm, EncodeError, InstructionMix, KernelError, KernelSpec, Operands,
};
use crate::machine::{
    parse_ihex, LoadError, Machine, MachineConfig, RunOutcome, RunSummary, Segment, TraceDigest,
    TraceEvent,
};

/// Default approximate multiplier control word: enabled, slot 1, error mask 0x7E.
pub const DEFAULT_APPROX_MULCSR: u32 = 0x007E_0003;

/// Raw words for the three approximation CSRs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CsrPreset {
    pub alucsr: u32,
    pub mulcsr: u32,
    pub divcsr: u32,
}

impl CsrPreset {
    pub const ACCURATE: CsrPreset = CsrPreset {
        alucsr: 0,
        mulcsr: 0,
        divcsr: 0,
    };

    pub fn approximate_mul(mulcsr: u32) -> Self {
        CsrPreset {
            mulcsr,
            ..Self::ACCURATE
        }
    }

    pub fn apply(&self, csrs: &mut CsrFile) {
        csrs.alucsr = self.alucsr;
        csrs.mulcsr = self.mulcsr;
        csrs.divcsr = self.divcsr;
    }

    /// Code that writes the three CSRs and then jumps to `entry`.
    ///
    /// x1 is used as scratch; it is zero on arrival when `entry` is below
    /// 2 KiB and holds the upper bits of `entry` otherwise.
    pub fn prologue(&self, entry: u32) -> Result<Vec<u32>, EncodeError> {
        let mut a = Asm::new();
        for (addr, value) in [
            (CSR_ALUCSR, self.alucsr),
            (CSR_MULCSR, self.mulcsr),
            (CSR_DIVCSR, self.divcsr),
        ] {
            a.li(1, value as i32);
            a.emit(
                Mnemonic::Csrrw,
                Operands {
                    rd: 0,
                    rs1: 1,
                    rs2: 0,
                    imm: addr as i64,
                },
            );
        }
        if entry < 2048 {
            a.li(1, 0);
            a.i(Mnemonic::Jalr, 0, 0, entry as i64);
        } else {
            let lo = ((entry as i32) << 20) >> 20;
            a.emit(
                Mnemonic::Lui,
                Operands::i(1, 0, ((entry.wrapping_sub(lo as u32)) >> 12) as i64),
            );
            a.i(Mnemonic::Jalr, 0, 1, lo as i64);
        }
        a.finish()
    }
}

/// Where a program comes from.
#[derive(Clone, Debug)]
pub enum ProgramSource {
    Kernel(KernelSpec),
    Binary(Vec<u8>),
    Ihex(String),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub csrs: CsrPreset,
    /// Write the CSRs with real instructions instead of presetting them.
    pub prologue: bool,
    pub max_cycles: u64,
    pub machine: MachineConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        let machine = MachineConfig::default();
        RunOptions {
            csrs: CsrPreset::ACCURATE,
            prologue: false,
            max_cycles: machine.max_cycles,
            machine,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("cannot write trace: {0}")]
    Trace(#[from] io::Error),
    #[error("{label}: {source}")]
    Context {
        label: String,
        #[source]
        source: Box<RunError>,
    },
    #[error("{label}: run did not halt normally: {outcome:?}")]
    Abnormal { label: String, outcome: RunOutcome },
    #[error(transparent)]
    Output(#[from] crate::error_analysis::ErrorAnalysisError),
}

/// Identity of the retired instruction stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StreamDigest {
    pub instret: u64,
    pub pc_hash: u64,
    pub addr_hash: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub label: String,
    pub csrs: CsrPreset,
    pub summary: RunSummary,
    pub energy: EnergyReport,
    pub outputs: Vec<u32>,
    pub mix: InstructionMix,
    pub mul_share: f64,
    pub digest: StreamDigest,
}

impl RunResult {
    pub fn halted_normally(&self) -> bool {
        self.summary.outcome.is_normal_halt()
    }
}

/// Address the CSR prologue is placed at: the last 256 bytes of memory.
fn prologue_addr(cfg: &MachineConfig) -> u32 {
    cfg.base + cfg.mem_size - 0x100
}

/// Loads, configures and runs one program, metering energy under `model`.
///
/// Every retired instruction is written to `trace` when one is given.
pub fn run_program(
    label: &str,
    source: &ProgramSource,
    model: &CostModel,
    opts: &RunOptions,
    trace: Option<&mut dyn Write>,
) -> Result<RunResult, RunError> {
    let mut cfg = opts.machine.clone();
    cfg.clock_hz = model.clock_hz;
    let mut segments = match source {
        ProgramSource::Kernel(spec) => vec![Segment {
            addr: cfg.base,
            data: generate(spec)?.image(),
        }],
        ProgramSource::Binary(bytes) => vec![Segment {
            addr: cfg.base,
            data: bytes.clone(),
        }],
        ProgramSource::Ihex(text) => parse_ihex(text)?,
    };
    let mut start = None;
    if opts.prologue {
        let at = prologue_addr(&cfg);
        let words = opts.csrs.prologue(cfg.base).map_err(KernelError::from)?;
        let data: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        if segments
            .iter()
            .any(|s| s.addr as u64 + s.data.len() as u64 > at as u64)
        {
            return Err(LoadError::ImageOverflow {
                addr: at,
                len: data.len(),
            }
            .into());
        }
        segments.push(Segment { addr: at, data });
        start = Some(at);
    }
    let mut machine = Machine::load_segments(cfg.clone(), &segments)?;
    match start {
        Some(at) => machine.set_pc(at),
        None => opts.csrs.apply(machine.csrs_mut()),
    }

    let mut meter = EnergyMeter::new(model.clone(), cfg.slots.clone())?;
    let mut mix = InstructionMix::default();
    let mut digest = TraceDigest::default();
    let mut energy_err = None;
    let mut trace_err = None;
    let mut trace = trace;
    let summary = machine.run_with(opts.max_cycles, |ev: &TraceEvent| {
        if energy_err.is_none() {
            if let Err(e) = meter.observe(ev) {
                energy_err = Some(e);
            }
        }
        mix.observe(ev);
        digest.observe(ev);
        if let (Some(out), None) = (trace.as_mut(), &trace_err) {
            if let Err(e) = writeln!(out, "{}", ev.trace_line()) {
                trace_err = Some(e);
            }
        }
    });
    if let Some(e) = energy_err {
        return Err(e.into());
    }
    if let Some(e) = trace_err {
        return Err(e.into());
    }
    Ok(RunResult {
        label: label.to_string(),
        csrs: opts.csrs,
        energy: meter.finalize()?,
        outputs: machine.output().to_vec(),
        mul_share: mix.mul_share(),
        mix,
        digest: StreamDigest {
            instret: digest.instret,
            pc_hash: digest.pc_hash(),
            addr_hash: digest.addr_hash(),
        },
        summary,
    })
}

/// Runs a generated kernel, applying the model's profile for that kernel when it has one.
pub fn run_kernel(
    spec: &KernelSpec,
    model: &CostModel,
    opts: &RunOptions,
) -> Result<RunResult, RunError> {
    let model = model.for_profile(Some(spec.kind.profile_name()));
    run_program(
        spec.kind.name(),
        &ProgramSource::Kernel(*spec),
        &model,
        opts,
        None,
    )
}

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub kernels: Vec<KernelSpec>,
    pub accurate_model: CostModel,
    pub approx_model: CostModel,
    pub accurate_csrs: CsrPreset,
    pub approx_csrs: CsrPreset,
    pub options: RunOptions,
}

impl CompareConfig {
    /// Shipped table models, accurate presets versus [`DEFAULT_APPROX_MULCSR`].
    pub fn with_shipped_tables(kernels: Vec<KernelSpec>) -> Self {
        CompareConfig {
            kernels,
            accurate_model: CostModel::builtin("tables_accurate.json").expect("shipped"),
            approx_model: CostModel::builtin("tables_approx.json").expect("shipped"),
            accurate_csrs: CsrPreset::ACCURATE,
            approx_csrs: CsrPreset::approximate_mul(DEFAULT_APPROX_MULCSR),
            options: RunOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AppComparison {
    pub app: String,
    pub profile: String,
    pub accurate: RunResult,
    pub approximate: RunResult,
    pub total_improvement: f64,
    pub exe_improvement: f64,
    pub mul_improvement: f64,
    /// Approximate outputs against the accurate run's outputs.
    pub output_error: OutputErrorStats,
    pub same_instruction_stream: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareSummary {
    pub apps: Vec<AppComparison>,
    pub averages: ImprovementSummary,
}

pub const COMPARE_CSV_HEADER: &str = "app,instret,pj_per_instr_accurate,pj_per_instr_approx,\
total_improvement,exe_improvement,mul_improvement,output_er,output_mred";

impl CompareSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{COMPARE_CSV_HEADER}")?;
        for a in &self.apps {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                a.app,
                a.accurate.summary.instret,
                a.accurate.energy.pj_per_instr,
                a.approximate.energy.pj_per_instr,
                a.total_improvement,
                a.exe_improvement,
                a.mul_improvement,
                a.output_error.er,
                a.output_error.mred
            )?;
        }
        let s = &self.averages;
        writeln!(
            out,
            "average,,,,{},{},{},,",
            s.avg_total_improvement, s.avg_exe_improvement, s.avg_mul_improvement
        )
    }
}

fn checked_run(
    spec: &KernelSpec,
    model: &CostModel,
    opts: &RunOptions,
) -> Result<RunResult, RunError> {
    let r = run_kernel(spec, model, opts).map_err(|e| RunError::Context {
        label: spec.kind.name().to_string(),
        source: Box::new(e),
    })?;
    if !r.halted_normally() {
        return Err(RunError::Abnormal {
            label: r.label,
            outcome: r.summary.outcome,
        });
    }
    Ok(r)
}

fn compare_one(spec: &KernelSpec, cfg: &CompareConfig) -> Result<AppComparison, RunError> {
    let acc_opts = RunOptions {
        csrs: cfg.accurate_csrs,
        ..cfg.options.clone()
    };
    let apx_opts = RunOptions {
        csrs: cfg.approx_csrs,
        ..cfg.options.clone()
    };
    let accurate = checked_run(spec, &cfg.accurate_model, &acc_opts)?;
    let approximate = checked_run(spec, &cfg.approx_model, &apx_opts)?;
    let imp = |scope| improvement(&accurate.energy, &approximate.energy, scope);
    Ok(AppComparison {
        app: spec.kind.name().to_string(),
        profile: spec.kind.profile_name().to_string(),
        total_improvement: imp(Scope::Total)?,
        exe_improvement: imp(Scope::Exe)?,
        mul_improvement: imp(Scope::Mul)?,
        output_error: app_output_error(&accurate.outputs, &approximate.outputs)?,
        same_instruction_stream: accurate.digest == approximate.digest,
        accurate,
        approximate,
    })
}

/// Runs every kernel accurately and approximately, in parallel, and
/// summarizes the improvements. Results keep the order of `cfg.kernels`.
pub fn compare(cfg: &CompareConfig) -> Result<CompareSummary, RunError> {
    let apps = cfg
        .kernels
        .par_iter()
        .map(|spec| compare_one(spec, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<_> = apps
        .iter()
        .map(|a| (a.accurate.energy.clone(), a.approximate.energy.clone()))
        .collect();
    let averages = summary_across_apps(&pairs)?;
    Ok(CompareSummary { apps, averages })
}
