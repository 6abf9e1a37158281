use std::collections::BTreeMap;

use approxrv::circuits::{
    approx_mul8, csa32_add, mul32, mul32_signed, ripple32_add, AdderConfig, MulConfig,
};
use approxrv::energy::{
    improvement, load_cost_model, CostModel, EnergyEvent, EnergyMeter, EnergyReport, ModelKind,
    ModelMode, PowerUnit, Scope,
};
use approxrv::isa::{
    decode, execute_arith, ApproxControlWord, CircuitKind, CircuitSlotTable, CsrFile, OpClass,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn control_word_round_trips(raw in any::<u32>()) {
        prop_assert_eq!(ApproxControlWord::decode(raw).encode(), raw);
    }

    #[test]
    fn carry_select_equals_ripple(x in any::<u32>(), y in any::<u32>(), cin in any::<bool>(), field in any::<u16>()) {
        let cfg = AdderConfig::from_error_field(field);
        prop_assert_eq!(csa32_add(x, y, cin, cfg), ripple32_add(x, y, cin, cfg));
        let exact = x as u64 + y as u64 + cin as u64;
        prop_assert_eq!(
            csa32_add(x, y, cin, AdderConfig::ACCURATE),
            (exact as u32, exact >> 32 == 1)
        );
    }

    #[test]
    fn disabled_units_are_exact(
        lhs in any::<u32>(),
        rhs in any::<u32>(),
        alucsr in any::<u32>(),
        mulcsr in any::<u32>(),
    ) {
        let csrs = CsrFile { alucsr: alucsr & !1, mulcsr: mulcsr & !1, ..CsrFile::default() };
        let slots = CircuitSlotTable::default();
        let add = decode(0x0031_00B3).unwrap();
        let mul = decode(0x0031_00B3 | 1 << 25).unwrap();
        prop_assert_eq!(execute_arith(&add, lhs, rhs, &csrs, &slots).unwrap().value, lhs.wrapping_add(rhs));
        prop_assert_eq!(execute_arith(&mul, lhs, rhs, &csrs, &slots).unwrap().value, lhs.wrapping_mul(rhs));
    }

    #[test]
    fn accurate_multiplier_is_exact(a in any::<u32>(), b in any::<u32>()) {
        prop_assert_eq!(mul32(a, b, MulConfig::ACCURATE), a as u64 * b as u64);
        prop_assert_eq!(mul32(a, b, MulConfig::with_mask(0x7F)), a as u64 * b as u64);
        let high = ((a as i32 as i64 * b as i32 as i64) >> 32) as u32;
        prop_assert_eq!(mul32_signed(a as i32, b as i32, true, MulConfig::ACCURATE), high);
    }

    #[test]
    fn mul8_error_is_a_signed_sum_of_controlled_weights(a in any::<u8>(), b in any::<u8>(), mask in 0u8..128) {
        let cfg = MulConfig::with_mask(mask);
        let err = approx_mul8(a, b, cfg) as i32 - (a as i32 * b as i32);
        prop_assert!(err.unsigned_abs() <= cfg.max_error_bound());
        // Error is a multiple of 16 and vanishes when no cell is approximate.
        prop_assert_eq!(err % 16, 0);
        if mask == 0x7F {
            prop_assert_eq!(err, 0);
        }
    }
}

// ---------------------------------------------------------------------------
// Energy properties

fn table_model() -> CostModel {
    CostModel::builtin("tables_accurate.json")
        .unwrap()
        .with_profile("matMul_int")
        .unwrap()
}

fn event_model(gating: bool) -> CostModel {
    let mut m = CostModel::builtin("event_default.json").unwrap();
    if let ModelKind::Event { gating: g, .. } = &mut m.kind {
        *g = gating;
    }
    m
}

fn random_event() -> impl Strategy<Value = EnergyEvent> {
    (
        0usize..6,
        0u8..2,
        any::<bool>(),
        any::<bool>(),
        0u8..128,
        proptest::option::of(0usize..9),
        1u64..40,
    )
        .prop_map(|(u, slot, selected, approximate, mask, op, cycles)| {
            let unit = PowerUnit::ALL[u];
            let (slot, kind) = match unit {
                PowerUnit::Mul if slot == 1 => (1, CircuitKind::Approximate),
                PowerUnit::Mul => (0, CircuitKind::Accurate),
                PowerUnit::Alu => (0, CircuitKind::Approximate),
                _ => (0, CircuitKind::Accurate),
            };
            EnergyEvent {
                unit,
                slot,
                kind,
                selected: selected || !unit.is_exe(),
                approximate: approximate && kind == CircuitKind::Approximate,
                mul_config: MulConfig::with_mask(mask),
                op: op.map(|i| OpClass::ALL[i]),
                cycles,
            }
        })
}

fn meter_over(model: &CostModel, events: &[EnergyEvent]) -> EnergyMeter {
    let mut m = EnergyMeter::new(model.clone(), CircuitSlotTable::default()).unwrap();
    for ev in events {
        m.accrue(ev).unwrap();
    }
    m.count(events.len() as u64, events.iter().map(|e| e.cycles).sum());
    m
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn energy_is_additive_over_segments(
        events in proptest::collection::vec(random_event(), 2..60),
        split in any::<prop::sample::Index>(),
    ) {
        let model = table_model();
        let k = 1 + split.index(events.len() - 1);
        let whole = meter_over(&model, &events).finalize().unwrap();
        let first = meter_over(&model, &events[..k]).finalize().unwrap();
        let second = meter_over(&model, &events[k..]).finalize().unwrap();
        let joined = first.combine(&second).unwrap();
        prop_assert!(close(joined.total_energy_pj, whole.total_energy_pj));
        for u in PowerUnit::ALL {
            prop_assert!(close(joined.unit_energy_pj[&u], whole.unit_energy_pj[&u]));
        }
        prop_assert_eq!(joined.instret, whole.instret);
        prop_assert_eq!(joined.cycles, whole.cycles);
    }

    #[test]
    fn gating_never_increases_energy(events in proptest::collection::vec(random_event(), 1..60)) {
        let on = meter_over(&event_model(true), &events).finalize().unwrap();
        let off = meter_over(&event_model(false), &events).finalize().unwrap();
        prop_assert!(on.total_energy_pj <= off.total_energy_pj + 1e-9);
    }

    #[test]
    fn multiplier_energy_is_monotone_in_mask_popcount(a in 0u8..128, b in 0u8..128) {
        let meter = EnergyMeter::new(event_model(true), CircuitSlotTable::default()).unwrap();
        let energy = |mask: u8| {
            meter
                .event_energy(&EnergyEvent {
                    unit: PowerUnit::Mul,
                    slot: 1,
                    kind: CircuitKind::Approximate,
                    selected: true,
                    approximate: true,
                    mul_config: MulConfig::with_mask(mask),
                    op: Some(OpClass::Mul),
                    cycles: 4,
                })
                .unwrap()
        };
        if a.count_ones() <= b.count_ones() {
            prop_assert!(energy(a) <= energy(b));
        }
    }
}

fn report(mode: ModelMode, powers: [f64; 6], cycles: u64, instret: u64) -> EnergyReport {
    let clock = 5e8;
    let units: BTreeMap<_, _> = PowerUnit::ALL
        .into_iter()
        .zip(powers)
        .map(|(u, mw)| (u, mw * 1e-3 * cycles as f64 / clock * 1e12))
        .collect();
    EnergyReport::from_parts(mode, clock, instret, cycles, units, Vec::new()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn improvement_antisymmetry(
        pa in proptest::array::uniform6(0.001f64..5.0),
        pb in proptest::array::uniform6(0.001f64..5.0),
        cycles in 1u64..1_000_000,
    ) {
        let a = report(ModelMode::Table, pa, cycles, cycles);
        let b = report(ModelMode::Table, pb, cycles, cycles);
        for scope in [Scope::Total, Scope::Exe, Scope::Mul] {
            let ab = improvement(&a, &b, scope).unwrap();
            let ba = improvement(&b, &a, scope).unwrap();
            let ratio = b.scope_power(scope) / a.scope_power(scope);
            prop_assert!((ab + ba * ratio).abs() < 1e-6, "{} {} {}", ab, ba, ratio);
        }
    }
}

#[test]
fn event_mode_counts_unselected_slots_only_without_gating() {
    let ev = EnergyEvent {
        unit: PowerUnit::Mul,
        slot: 0,
        kind: CircuitKind::Accurate,
        selected: false,
        approximate: false,
        mul_config: MulConfig::ACCURATE,
        op: Some(OpClass::Mul),
        cycles: 4,
    };
    let gated = EnergyMeter::new(event_model(true), CircuitSlotTable::default()).unwrap();
    let open = EnergyMeter::new(event_model(false), CircuitSlotTable::default()).unwrap();
    assert_eq!(gated.event_energy(&ev).unwrap(), 0.0);
    assert!(open.event_energy(&ev).unwrap() > 0.0);
}

#[test]
fn event_model_rejects_missing_circuit_entries() {
    let doc = r#"{"mode":"event","clock_hz":5e8,"units":{
        "IFID":{},"ALU":{"approximate":{}},"MUL":{"accurate":{}},
        "DIV":{"accurate":{}},"MEMWB":{},"other":{}}}"#;
    let model = load_cost_model(doc).unwrap();
    // The default slot table installs an approximate multiplier in slot 1.
    assert!(EnergyMeter::new(model, CircuitSlotTable::default()).is_err());
}
