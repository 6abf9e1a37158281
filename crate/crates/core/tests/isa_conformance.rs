//! Decode and execute conformance against the `rrs-lib` RV32IM model.

mod common;

use approxrv::isa::{decode_for, Mnemonic, RegisterFile};
use approxrv::kernels::{encode_for, Operands};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn disassembly_matches_for_every_mnemonic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in covered() {
        for _ in 0..500 {
            let word = encode_for(m, random_operands(m, &mut rng), RegisterFile::Rv32I).unwrap();
            let d = decode_for(word, RegisterFile::Rv32I).unwrap();
            assert_eq!(d.mnemonic, m);
            assert_eq!(
                Some(render(&d, PC)),
                reference_disasm(word, PC),
                "word 0x{word:08x}"
            );
        }
    }
}

#[test]
fn every_accepted_random_word_agrees_with_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut accepted = 0;
    for _ in 0..400_000 {
        let word: u32 = rng.gen::<u32>() | 0b11;
        if word & 0x7F == 0x73 {
            continue;
        }
        if let Ok(d) = decode_for(word, RegisterFile::Rv32I) {
            accepted += 1;
            assert_eq!(
                Some(render(&d, PC)),
                reference_disasm(word, PC),
                "0x{word:08x}"
            );
        }
    }
    assert!(accepted > 10_000, "only {accepted} legal words sampled");
}

#[test]
fn rv32e_rejects_upper_registers() {
    let word = encode_for(Mnemonic::Add, Operands::r(16, 1, 2), RegisterFile::Rv32I).unwrap();
    assert!(decode_for(word, RegisterFile::Rv32I).is_ok());
    assert!(decode_for(word, RegisterFile::Rv32E).is_err());
}

#[test]
fn execution_matches_on_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in covered() {
        for _ in 0..300 {
            let word = encode_for(m, random_operands(m, &mut rng), RegisterFile::Rv32I).unwrap();
            let d = decode_for(word, RegisterFile::Rv32I).unwrap();
            let mut regs = [0u32; 32];
            for r in regs.iter_mut() {
                *r = interesting(&mut rng);
            }
            check_case(&make_case(word, &d, &mut rng, regs));
        }
    }
}

#[test]
fn division_corner_cases() {
    use Mnemonic::*;
    let values = [0, 1, 0xFFFF_FFFF, 0x8000_0000, 0x7FFF_FFFF, 7, 0xFFFF_FFF9];
    for m in [Div, Divu, Rem, Remu] {
        for &a in &values {
            for &b in &values {
                run_rr(m, a, b);
            }
        }
    }
}

#[test]
fn multiply_sign_grid() {
    use Mnemonic::*;
    for m in [Mul, Mulh, Mulhsu, Mulhu] {
        for a in -8i32..8 {
            for b in -8i32..8 {
                run_rr(m, a as u32, b as u32);
            }
        }
        for (a, b) in [
            (0x8000_0000u32, 0x8000_0000u32),
            (0x8000_0000, 0xFFFF_FFFF),
            (0xFFFF_FFFF, 0xFFFF_FFFF),
            (0x7FFF_FFFF, 0x8000_0000),
            (0x1234_5678, 0x9ABC_DEF0),
        ] {
            run_rr(m, a, b);
            run_rr(m, b, a);
        }
    }
}
