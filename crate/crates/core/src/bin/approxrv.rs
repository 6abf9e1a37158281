use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use approxrv::compare::{
    compare, run_program, CompareConfig, CsrPreset, ProgramSource, RunOptions,
    DEFAULT_APPROX_MULCSR,
};
use approxrv::energy::{CostModel, EnergyReport};
use approxrv::error_analysis::{nontrivial_mred_range, sweep_configs, write_sweep_table};
use approxrv::kernels::{generate, KernelKind, KernelSpec};

#[derive(Parser)]
#[command(
    version,
    about = "RV32IEM simulator with CSR-controlled approximate arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one program and report energy, outputs and instruction mix.
    Run(RunArgs),
    /// Characterize all 128 multiplier error masks.
    SweepErrors {
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run kernels accurately and approximately and compare power.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Json,
    Csv,
}

fn hex_word(s: &str) -> Result<u32, String> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    u32::from_str_radix(&digits.replace('_', ""), 16).map_err(|e| format!("{s:?}: {e}"))
}

#[derive(Args)]
struct CsrArgs {
    /// ALU control word (hex).
    #[arg(long, value_parser = hex_word)]
    alucsr: Option<u32>,
    /// Multiplier control word (hex).
    #[arg(long, value_parser = hex_word)]
    mulcsr: Option<u32>,
    /// Divider control word (hex).
    #[arg(long, value_parser = hex_word)]
    divcsr: Option<u32>,
}

impl CsrArgs {
    fn preset(&self, default_mulcsr: u32) -> CsrPreset {
        CsrPreset {
            alucsr: self.alucsr.unwrap_or(0),
            mulcsr: self.mulcsr.unwrap_or(default_mulcsr),
            divcsr: self.divcsr.unwrap_or(0),
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "program")]
struct ProgramArgs {
    /// Built-in kernel name.
    #[arg(long)]
    kernel: Option<String>,
    /// Raw little-endian binary image loaded at address 0.
    #[arg(long)]
    bin: Option<PathBuf>,
    /// Intel HEX image.
    #[arg(long)]
    ihex: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[command(flatten)]
    csrs: CsrArgs,
    /// Cost model file, or the name of a shipped model.
    #[arg(long, default_value = "tables_accurate.json")]
    cost_model: String,
    /// Cost-model profile (default: the kernel's own, when present).
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    report: Report,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one line per retired instruction to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000_000)]
    max_cycles: u64,
    /// Kernel input seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Kernel size parameter.
    #[arg(long)]
    size: Option<usize>,
    /// Write the CSRs with csrrw instructions instead of presetting them.
    #[arg(long)]
    prologue_csr: bool,
    /// Also write the generated kernel as a raw binary.
    #[arg(long)]
    export_bin: Option<PathBuf>,
    /// Also write the generated kernel as Intel HEX.
    #[arg(long)]
    export_ihex: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Kernels to compare (default: all).
    #[arg(long = "kernel")]
    kernels: Vec<String>,
    #[arg(long, default_value = "tables_accurate.json")]
    accurate_model: String,
    #[arg(long, default_value = "tables_approx.json")]
    approx_model: String,
    /// CSR words for the approximate runs; the accurate runs use all zeros.
    #[command(flatten)]
    csrs: CsrArgs,
    #[arg(long, value_enum, default_value = "json")]
    report: Report,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000_000)]
    max_cycles: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type Failure = Box<dyn std::error::Error>;

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("{}: {e}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn cmd_run(args: RunArgs) -> Result<bool, Failure> {
    let p = &args.program;
    let (label, source, kind) = if let Some(name) = &p.kernel {
        let kind: KernelKind = name.parse()?;
        let mut spec = KernelSpec::new(kind, args.seed);
        if let Some(size) = args.size {
            spec = spec.with_size(size);
        }
        let prog = generate(&spec)?;
        if let Some(path) = &args.export_bin {
            std::fs::write(path, prog.image())?;
        }
        if let Some(path) = &args.export_ihex {
            std::fs::write(path, prog.to_ihex())?;
        }
        (
            kind.name().to_string(),
            ProgramSource::Kernel(spec),
            Some(kind),
        )
    } else if let Some(path) = &p.bin {
        (
            path.display().to_string(),
            ProgramSource::Binary(read(path)?),
            None,
        )
    } else {
        let path = p.ihex.as_ref().expect("one program source is required");
        let text = String::from_utf8(read(path)?)?;
        (path.display().to_string(), ProgramSource::Ihex(text), None)
    };

    let base = CostModel::resolve(&args.cost_model)?;
    let model = match (&args.profile, kind) {
        (Some(name), _) => base.with_profile(name)?,
        (None, Some(k)) => base.for_profile(Some(k.profile_name())),
        (None, None) => base,
    };
    let opts = RunOptions {
        csrs: args.csrs.preset(0),
        prologue: args.prologue_csr,
        max_cycles: args.max_cycles,
        ..RunOptions::default()
    };
    let mut trace_file = match &args.trace {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let result = run_program(
        &label,
        &source,
        &model,
        &opts,
        trace_file.as_mut().map(|w| w as &mut dyn Write),
    )?;
    if let Some(mut w) = trace_file {
        w.flush()?;
    }

    let mut out = output(&args.out)?;
    match args.report {
        Report::Json => writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?,
        Report::Csv => EnergyReport::write_csv(&[(&label, &result.energy)], &mut out)?,
    }
    out.flush()?;
    if !result.halted_normally() {
        eprintln!("{label}: {:?}", result.summary.outcome);
    }
    Ok(result.halted_normally())
}

fn cmd_sweep(out_path: Option<PathBuf>) -> Result<bool, Failure> {
    let rows = sweep_configs();
    let mut out = output(&out_path)?;
    write_sweep_table(&rows, &mut out)?;
    out.flush()?;
    if let Some((lo, hi)) = nontrivial_mred_range(&rows) {
        eprintln!(
            "non-trivial MRED range {:.3}%..{:.3}% (reference band 0.85%..8.94%)",
            lo * 100.0,
            hi * 100.0
        );
    }
    Ok(true)
}

fn cmd_compare(args: CompareArgs) -> Result<bool, Failure> {
    let kinds = if args.kernels.is_empty() {
        KernelKind::ALL.to_vec()
    } else {
        args.kernels
            .iter()
            .map(|k| k.parse())
            .collect::<Result<Vec<KernelKind>, _>>()?
    };
    let mut cfg = CompareConfig::with_shipped_tables(
        kinds
            .into_iter()
            .map(|k| KernelSpec::new(k, args.seed))
            .collect(),
    );
    cfg.accurate_model = CostModel::resolve(&args.accurate_model)?;
    cfg.approx_model = CostModel::resolve(&args.approx_model)?;
    cfg.approx_csrs = args.csrs.preset(DEFAULT_APPROX_MULCSR);
    cfg.options.max_cycles = args.max_cycles;
    let summary = compare(&cfg)?;
    let mut out = output(&args.out)?;
    match args.report {
        Report::Json => writeln!(out, "{}", summary.to_json())?,
        Report::Csv => summary.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::SweepErrors { out } => cmd_sweep(out),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
