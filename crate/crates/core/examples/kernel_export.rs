//! Generates a kernel and writes it as a raw binary and as Intel HEX.

use approxrv::kernels::{generate, KernelKind, KernelSpec};

fn main() -> std::io::Result<()> {
    let kind = std::env::args()
        .nth(1)
        .map(|n| n.parse::<KernelKind>().expect("known kernel"))
        .unwrap_or(KernelKind::Conv2d3x3);
    let program = generate(&KernelSpec::new(kind, 0)).expect("kernel generates");
    let dir = std::env::temp_dir();
    let bin = dir.join(format!("{kind}.bin"));
    let hex = dir.join(format!("{kind}.hex"));
    std::fs::write(&bin, program.image())?;
    std::fs::write(&hex, program.to_ihex())?;
    println!(
        "{kind}: {} instructions, {} data words, {} outputs",
        program.words.len(),
        program.data.len(),
        program.output_len
    );
    println!("wrote {} and {}", bin.display(), hex.display());
    println!("run with: approxrv run --ihex {}", hex.display());
    Ok(())
}
