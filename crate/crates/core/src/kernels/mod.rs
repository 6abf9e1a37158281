//! Benchmark kernels generated as RV32E instruction streams, with host-side
//! reference implementations.
//!
//! Every kernel's control flow depends only on loop counters, so switching the
//! multiplier to an approximate circuit changes output values but never the
//! retired instruction sequence or the addresses touched. Results are stored
//! to the MMIO output word and the program halts by storing 0 to the halt word.

pub mod asm;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::isa::Mnemonic::{self, *};
use crate::machine::{write_ihex, TraceEvent, MMIO_OUTPUT};
pub use asm::{encode, encode_for, Asm, EncodeError, Operands};

/// Where kernel input data is placed. Code starts at address 0.
pub const DATA_BASE: u32 = 0x4000;
/// Upper bound on image size, set by 16-bit Intel HEX addressing.
pub const IMAGE_LIMIT: usize = 0x1_0000;

const OUT: u8 = 15;
const FIR_TAPS: usize = 16;
const IIR_B0: i32 = 77;
const IIR_A1: i32 = 179;
const IIR_SCALE: i32 = 256;
const NR_ITERATIONS: usize = 12;
const NR_START: i32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    #[serde(rename = "conv2d3x3")]
    Conv2d3x3,
    #[serde(rename = "conv2d5x5")]
    Conv2d5x5,
    FirInt,
    IirInt,
    MatmulInt,
    NrSolver,
    Factorial,
}

impl KernelKind {
    pub const ALL: [KernelKind; 7] = [
        KernelKind::Conv2d3x3,
        KernelKind::Conv2d5x5,
        KernelKind::FirInt,
        KernelKind::IirInt,
        KernelKind::MatmulInt,
        KernelKind::NrSolver,
        KernelKind::Factorial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Conv2d3x3 => "conv2d3x3",
            KernelKind::Conv2d5x5 => "conv2d5x5",
            KernelKind::FirInt => "fir_int",
            KernelKind::IirInt => "iir_int",
            KernelKind::MatmulInt => "matmul_int",
            KernelKind::NrSolver => "nr_solver",
            KernelKind::Factorial => "factorial",
        }
    }

    /// Name of this application's row in the shipped table cost models.
    pub fn profile_name(self) -> &'static str {
        match self {
            KernelKind::Conv2d3x3 => "2DConv3x3",
            KernelKind::Conv2d5x5 => "2DConv5x5",
            KernelKind::FirInt => "fir_int",
            KernelKind::IirInt => "iir_int",
            KernelKind::MatmulInt => "matMul_int",
            KernelKind::NrSolver => "nr_solver",
            KernelKind::Factorial => "factorial",
        }
    }

    /// Default size parameter: image side for the convolutions, output
    /// count for fir, sample count for iir, matrix order for matmul, number
    /// of inputs for nr_solver, largest n for factorial.
    pub fn default_size(self) -> usize {
        match self {
            KernelKind::Conv2d3x3 | KernelKind::Conv2d5x5 => 16,
            KernelKind::FirInt | KernelKind::IirInt => 64,
            KernelKind::MatmulInt => 8,
            KernelKind::NrSolver => 16,
            KernelKind::Factorial => 12,
        }
    }

    fn size_range(self) -> (usize, usize) {
        match self {
            KernelKind::Conv2d3x3 => (3, 64),
            KernelKind::Conv2d5x5 => (5, 64),
            KernelKind::FirInt | KernelKind::IirInt => (1, 2048),
            KernelKind::MatmulInt => (1, 48),
            KernelKind::NrSolver => (1, 4096),
            KernelKind::Factorial => (1, 64),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = KernelError;

    /// Accepts canonical names, cost-model profile names and short aliases.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase();
        let alias = match key.as_str() {
            "matmul" => Some(KernelKind::MatmulInt),
            "conv3x3" | "conv2d_3x3" => Some(KernelKind::Conv2d3x3),
            "conv5x5" | "conv2d_5x5" => Some(KernelKind::Conv2d5x5),
            "fir" => Some(KernelKind::FirInt),
            "iir" => Some(KernelKind::IirInt),
            "nr" | "newton" => Some(KernelKind::NrSolver),
            _ => None,
        };
        alias
            .or_else(|| {
                KernelKind::ALL
                    .into_iter()
                    .find(|k| k.name() == key || k.profile_name().to_ascii_lowercase() == key)
            })
            .ok_or_else(|| KernelError::UnknownKernel(s.to_string()))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("unknown kernel {0:?}")]
    UnknownKernel(String),
    #[error("{kind} size {size} outside supported range {min}..={max}")]
    SizeOutOfRange {
        kind: KernelKind,
        size: usize,
        min: usize,
        max: usize,
    },
    #[error("program image of {0} bytes exceeds the {IMAGE_LIMIT}-byte budget")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub size: usize,
    pub seed: u64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, seed: u64) -> Self {
        KernelSpec {
            kind,
            size: kind.default_size(),
            seed,
        }
    }

    pub fn with_size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    fn check(&self) -> Result<(), KernelError> {
        let (min, max) = self.kind.size_range();
        if self.size < min || self.size > max {
            return Err(KernelError::SizeOutOfRange {
                kind: self.kind,
                size: self.size,
                min,
                max,
            });
        }
        Ok(())
    }

    /// Seeded input data, laid out as stored at [`DATA_BASE`].
    pub fn inputs(&self) -> Vec<i32> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.size;
        let mut draw = |count: usize, lo: i32, hi: i32| -> Vec<i32> {
            (0..count).map(|_| rng.gen_range(lo..=hi)).collect()
        };
        match self.kind {
            KernelKind::Conv2d3x3 | KernelKind::Conv2d5x5 => {
                let k = self.conv_k();
                let mut data = draw(n * n, 0, 255);
                data.extend(draw(k * k, -16, 16));
                data
            }
            KernelKind::FirInt => {
                let mut data = draw(n + FIR_TAPS - 1, -128, 127);
                data.extend(draw(FIR_TAPS, -64, 63));
                data
            }
            KernelKind::IirInt => draw(n, -128, 127),
            KernelKind::MatmulInt => draw(2 * n * n, 0, 255),
            KernelKind::NrSolver => draw(n, 1, 65535),
            KernelKind::Factorial => Vec::new(),
        }
    }

    fn conv_k(&self) -> usize {
        if self.kind == KernelKind::Conv2d5x5 {
            5
        } else {
            3
        }
    }

    /// Number of values the kernel writes to the output channel.
    pub fn output_len(&self) -> usize {
        let n = self.size;
        match self.kind {
            KernelKind::Conv2d3x3 | KernelKind::Conv2d5x5 => (n - self.conv_k() + 1).pow(2),
            KernelKind::MatmulInt => n * n,
            _ => n,
        }
    }

    /// Multiply-class instructions the program retires.
    pub fn expected_mul_count(&self) -> u64 {
        let n = self.size as u64;
        match self.kind {
            KernelKind::Conv2d3x3 | KernelKind::Conv2d5x5 => {
                let k = self.conv_k() as u64;
                (n - k + 1).pow(2) * k * k
            }
            KernelKind::FirInt => n * FIR_TAPS as u64,
            KernelKind::IirInt => 2 * n,
            KernelKind::MatmulInt => n * n * n,
            KernelKind::NrSolver => n * NR_ITERATIONS as u64,
            KernelKind::Factorial => n * (n + 1) / 2,
        }
    }

    /// Divide-class instructions the program retires.
    pub fn expected_div_count(&self) -> u64 {
        let n = self.size as u64;
        match self.kind {
            KernelKind::IirInt => n,
            KernelKind::NrSolver => n * NR_ITERATIONS as u64,
            _ => 0,
        }
    }

    /// Host reference outputs with exact 32-bit wrapping arithmetic.
    pub fn reference(&self) -> Vec<u32> {
        self.reference_with(&|a, b| a.wrapping_mul(b))
    }

    /// Host reference outputs with the low word of every product supplied by
    /// `mul`. Additions wrap; division follows RISC-V semantics.
    pub fn reference_with(&self, mul: &dyn Fn(i32, i32) -> i32) -> Vec<u32> {
        let n = self.size;
        let data = self.inputs();
        let out: Vec<i32> = match self.kind {
            KernelKind::Conv2d3x3 | KernelKind::Conv2d5x5 => {
                let k = self.conv_k();
                let (img, w) = data.split_at(n * n);
                let on = n - k + 1;
                let mut out = Vec::with_capacity(on * on);
                for r in 0..on {
                    for c in 0..on {
                        let mut acc = 0i32;
                        for ky in 0..k {
                            for kx in 0..k {
                                let p = img[(r + ky) * n + c + kx];
                                acc = acc.wrapping_add(mul(p, w[ky * k + kx]));
                            }
                        }
                        out.push(acc);
                    }
                }
                out
            }
            KernelKind::FirInt => {
                let (x, h) = data.split_at(n + FIR_TAPS - 1);
                (0..n)
                    .map(|i| {
                        (0..FIR_TAPS).fold(0i32, |acc, t| acc.wrapping_add(mul(x[i + t], h[t])))
                    })
                    .collect()
            }
            KernelKind::IirInt => {
                let mut y = 0i32;
                data.iter()
                    .map(|&x| {
                        let acc = mul(x, IIR_B0).wrapping_add(mul(y, IIR_A1));
                        y = riscv_div(acc, IIR_SCALE);
                        y
                    })
                    .collect()
            }
            KernelKind::MatmulInt => {
                let (a, b) = data.split_at(n * n);
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push((0..n).fold(0i32, |acc, k| {
                            acc.wrapping_add(mul(a[i * n + k], b[k * n + j]))
                        }));
                    }
                }
                out
            }
            KernelKind::NrSolver => data
                .iter()
                .map(|&target| {
                    let mut x = NR_START;
                    for _ in 0..NR_ITERATIONS {
                        let t = mul(x, x).wrapping_sub(target);
                        x = x.wrapping_sub(riscv_div(t, x.wrapping_add(x)));
                    }
                    x
                })
                .collect(),
            KernelKind::Factorial => (1..=n as i32).map(|i| (1..=i).fold(1i32, mul)).collect(),
        };
        out.into_iter().map(|v| v as u32).collect()
    }
}

/// Signed division with RISC-V results for division by zero and overflow.
fn riscv_div(a: i32, b: i32) -> i32 {
    if b == 0 {
        -1
    } else {
        a.wrapping_div(b)
    }
}

/// A generated program with its data and expected outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedProgram {
    pub spec: KernelSpec,
    pub words: Vec<u32>,
    pub entry: u32,
    pub data_base: u32,
    pub data: Vec<i32>,
    pub output_len: usize,
    pub reference: Vec<u32>,
}

impl EncodedProgram {
    /// Little-endian memory image starting at address 0.
    pub fn image(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        if !self.data.is_empty() {
            bytes.resize(self.data_base as usize, 0);
            bytes.extend(self.data.iter().flat_map(|w| w.to_le_bytes()));
        }
        bytes
    }

    pub fn to_ihex(&self) -> String {
        write_ihex(0, &self.image())
    }
}

fn addr(a: u32) -> i32 {
    a as i32
}

/// Emits the loop-closing sequence `counter -= 1; bne counter, x0, label`.
fn close_loop(a: &mut Asm, counter: u8, label: &str) {
    a.i(Addi, counter, counter, -1);
    a.branch(Bne, counter, 0, label);
}

fn mac(a: &mut Asm, acc: u8, x: u8, y: u8) {
    a.r(Mul, x, x, y);
    a.r(Add, acc, acc, x);
}

/// Generates the program for `spec`.
pub fn generate(spec: &KernelSpec) -> Result<EncodedProgram, KernelError> {
    spec.check()?;
    let n = spec.size;
    let n_i = n as i32;
    let mut a = Asm::new();
    a.li(OUT, MMIO_OUTPUT as i32);
    let data = spec.inputs();

    match spec.kind {
        KernelKind::Conv2d3x3 | KernelKind::Conv2d5x5 => {
            let k = spec.conv_k();
            let on = (n - k + 1) as i32;
            a.li(1, addr(DATA_BASE));
            a.li(7, addr(DATA_BASE) + 4 * (n * n) as i32);
            a.li(3, on);
            a.label("row");
            a.li(4, on);
            a.label("col");
            a.li(5, 0);
            for ky in 0..k {
                for kx in 0..k {
                    a.lw(9, ((ky * n + kx) * 4) as i64, 1);
                    a.lw(10, ((ky * k + kx) * 4) as i64, 7);
                    mac(&mut a, 5, 9, 10);
                }
            }
            a.sw(5, 0, OUT);
            a.i(Addi, 1, 1, 4);
            close_loop(&mut a, 4, "col");
            a.i(Addi, 1, 1, ((k - 1) * 4) as i64);
            close_loop(&mut a, 3, "row");
        }
        KernelKind::FirInt => {
            let x_len = n + FIR_TAPS - 1;
            a.li(1, addr(DATA_BASE));
            a.li(3, n_i);
            a.label("out");
            a.i(Addi, 6, 1, 0);
            a.li(7, addr(DATA_BASE) + 4 * x_len as i32);
            a.li(8, FIR_TAPS as i32);
            a.li(5, 0);
            a.label("tap");
            a.lw(9, 0, 6);
            a.lw(10, 0, 7);
            mac(&mut a, 5, 9, 10);
            a.i(Addi, 6, 6, 4);
            a.i(Addi, 7, 7, 4);
            close_loop(&mut a, 8, "tap");
            a.sw(5, 0, OUT);
            a.i(Addi, 1, 1, 4);
            close_loop(&mut a, 3, "out");
        }
        KernelKind::IirInt => {
            a.li(1, addr(DATA_BASE));
            a.li(3, n_i);
            a.li(11, IIR_SCALE);
            a.li(13, IIR_B0);
            a.li(14, IIR_A1);
            a.li(12, 0);
            a.label("sample");
            a.lw(9, 0, 1);
            a.r(Mul, 9, 9, 13);
            a.r(Mul, 10, 12, 14);
            a.r(Add, 9, 9, 10);
            a.r(Div, 12, 9, 11);
            a.sw(12, 0, OUT);
            a.i(Addi, 1, 1, 4);
            close_loop(&mut a, 3, "sample");
        }
        KernelKind::MatmulInt => {
            let row_bytes = 4 * n as i64;
            a.li(1, addr(DATA_BASE));
            a.li(3, n_i);
            a.label("i");
            a.li(2, addr(DATA_BASE) + 4 * (n * n) as i32);
            a.li(4, n_i);
            a.label("j");
            a.i(Addi, 6, 1, 0);
            a.i(Addi, 7, 2, 0);
            a.li(8, n_i);
            a.li(5, 0);
            a.label("k");
            a.lw(9, 0, 6);
            a.lw(10, 0, 7);
            mac(&mut a, 5, 9, 10);
            a.i(Addi, 6, 6, 4);
            a.i(Addi, 7, 7, row_bytes);
            close_loop(&mut a, 8, "k");
            a.sw(5, 0, OUT);
            a.i(Addi, 2, 2, 4);
            close_loop(&mut a, 4, "j");
            a.i(Addi, 1, 1, row_bytes);
            close_loop(&mut a, 3, "i");
        }
        KernelKind::NrSolver => {
            a.li(1, addr(DATA_BASE));
            a.li(3, n_i);
            a.label("input");
            a.lw(2, 0, 1);
            a.li(5, NR_START);
            a.li(4, NR_ITERATIONS as i32);
            a.label("iter");
            a.r(Mul, 6, 5, 5);
            a.r(Sub, 6, 6, 2);
            a.r(Add, 7, 5, 5);
            a.r(Div, 6, 6, 7);
            a.r(Sub, 5, 5, 6);
            close_loop(&mut a, 4, "iter");
            a.sw(5, 0, OUT);
            a.i(Addi, 1, 1, 4);
            close_loop(&mut a, 3, "input");
        }
        KernelKind::Factorial => {
            a.li(1, 1);
            a.li(3, n_i);
            a.label("n");
            a.li(5, 1);
            a.li(6, 1);
            a.i(Addi, 4, 1, 0);
            a.label("j");
            a.r(Mul, 5, 5, 6);
            a.i(Addi, 6, 6, 1);
            close_loop(&mut a, 4, "j");
            a.sw(5, 0, OUT);
            a.i(Addi, 1, 1, 1);
            close_loop(&mut a, 3, "n");
        }
    }
    a.sw(0, 4, OUT);
    let words = a.finish()?;

    let code_bytes = words.len() * 4;
    let image_len = if data.is_empty() {
        code_bytes
    } else {
        if code_bytes > DATA_BASE as usize {
            return Err(KernelError::BudgetExceeded(code_bytes));
        }
        DATA_BASE as usize + data.len() * 4
    };
    if image_len > IMAGE_LIMIT {
        return Err(KernelError::BudgetExceeded(image_len));
    }

    Ok(EncodedProgram {
        spec: *spec,
        words,
        entry: 0,
        data_base: DATA_BASE,
        output_len: spec.output_len(),
        reference: spec.reference(),
        data,
    })
}

/// Retired-instruction counts by arithmetic and memory category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InstructionMix {
    /// `add`, `addi`, `sub`.
    pub add: u64,
    pub mul: u64,
    /// `mulh`, `mulhsu`, `mulhu`.
    pub mulh: u64,
    /// `div`, `divu`, `rem`, `remu`.
    pub div: u64,
    pub load: u64,
    pub store: u64,
    pub branch: u64,
    pub other: u64,
}

impl InstructionMix {
    pub fn record(&mut self, m: Mnemonic) {
        let slot = match m {
            Add | Addi | Sub => &mut self.add,
            Mul => &mut self.mul,
            Mulh | Mulhsu | Mulhu => &mut self.mulh,
            Div | Divu | Rem | Remu => &mut self.div,
            Lb | Lh | Lw | Lbu | Lhu => &mut self.load,
            Sb | Sh | Sw => &mut self.store,
            Beq | Bne | Blt | Bge | Bltu | Bgeu => &mut self.branch,
            _ => &mut self.other,
        };
        *slot += 1;
    }

    pub fn observe(&mut self, ev: &TraceEvent) {
        self.record(ev.mnemonic);
    }

    pub fn total(&self) -> u64 {
        self.add
            + self.mul
            + self.mulh
            + self.div
            + self.load
            + self.store
            + self.branch
            + self.other
    }

    /// Multiplications as a fraction of addition, multiplication and division instructions.
    pub fn mul_share(&self) -> f64 {
        let arith = self.add + self.mul + self.mulh + self.div;
        if arith == 0 {
            0.0
        } else {
            (self.mul + self.mulh) as f64 / arith as f64
        }
    }

    pub fn as_map(&self) -> BTreeMap<&'static str, u64> {
        BTreeMap::from([
            ("add", self.add),
            ("mul", self.mul),
            ("mulh", self.mulh),
            ("div", self.div),
            ("load", self.load),
            ("store", self.store),
            ("branch", self.branch),
            ("other", self.other),
        ])
    }
}

/// Instruction mix of a recorded trace.
pub fn instruction_mix<'a>(trace: impl IntoIterator<Item = &'a TraceEvent>) -> InstructionMix {
    let mut mix = InstructionMix::default();
    for ev in trace {
        mix.observe(ev);
    }
    mix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::decode;

    #[test]
    fn factorial_reference() {
        let r = KernelSpec::new(KernelKind::Factorial, 0).reference();
        assert_eq!(r[9], 3_628_800);
        assert_eq!(r[0], 1);
    }

    #[test]
    fn every_kernel_encodes_legally_and_deterministically() {
        for kind in KernelKind::ALL {
            let spec = KernelSpec::new(kind, 3);
            let p = generate(&spec).unwrap();
            assert_eq!(p, generate(&spec).unwrap());
            assert_eq!(p.reference.len(), p.output_len);
            for w in &p.words {
                decode(*w).unwrap();
            }
            assert!(p.image().len() <= IMAGE_LIMIT);
        }
    }

    #[test]
    fn names_parse() {
        for kind in KernelKind::ALL {
            assert_eq!(kind.name().parse::<KernelKind>().unwrap(), kind);
            assert_eq!(kind.profile_name().parse::<KernelKind>().unwrap(), kind);
        }
        assert_eq!(
            "matmul".parse::<KernelKind>().unwrap(),
            KernelKind::MatmulInt
        );
        assert!("fft".parse::<KernelKind>().is_err());
    }

    #[test]
    fn size_limits() {
        let spec = KernelSpec::new(KernelKind::MatmulInt, 0).with_size(100);
        assert!(matches!(
            generate(&spec),
            Err(KernelError::SizeOutOfRange { .. })
        ));
        let spec = KernelSpec::new(KernelKind::Conv2d5x5, 0).with_size(4);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn mix_share() {
        let mut mix = InstructionMix::default();
        for _ in 0..3 {
            mix.record(Add);
        }
        assert_eq!(mix.mul_share(), 0.0);
        mix.record(Mul);
        assert_eq!(mix.mul_share(), 0.25);
    }
}
