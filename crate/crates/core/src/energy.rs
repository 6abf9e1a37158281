//! Cost-model-driven energy and power accounting.
//!
//! Two model modes are supported:
//!
//! * **table** — every pipeline unit draws a fixed average power (mW) for the
//!   whole run. Slot-bearing units may give separate values for the accurate
//!   and the approximate circuit; the value of the selected circuit is charged.
//! * **event** — each instruction costs a per-operation energy (pJ) in every
//!   unit it touches, plus leakage (mW) for the cycles it occupies. With gating
//!   enabled, unselected circuit slots are switched off and cost nothing;
//!   without it they leak and also switch on every operation their unit sees.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::MulConfig;
use crate::error_analysis::{power_estimate, MUL8_POWER_MAX_UW};
use crate::isa::{CircuitKind, CircuitSlotTable, ExeUnit, OpClass, UnitSnapshot};
use crate::machine::TraceEvent;

/// Pipeline units that consume power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PowerUnit {
    #[serde(rename = "IFID")]
    Ifid,
    #[serde(rename = "ALU")]
    Alu,
    #[serde(rename = "MUL")]
    Mul,
    #[serde(rename = "DIV")]
    Div,
    #[serde(rename = "MEMWB")]
    Memwb,
    #[serde(rename = "other")]
    Other,
}

impl PowerUnit {
    pub const ALL: [PowerUnit; 6] = [
        PowerUnit::Ifid,
        PowerUnit::Alu,
        PowerUnit::Mul,
        PowerUnit::Div,
        PowerUnit::Memwb,
        PowerUnit::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PowerUnit::Ifid => "IFID",
            PowerUnit::Alu => "ALU",
            PowerUnit::Mul => "MUL",
            PowerUnit::Div => "DIV",
            PowerUnit::Memwb => "MEMWB",
            PowerUnit::Other => "other",
        }
    }

    /// The execution unit behind this power unit, for the slot-bearing ones.
    pub fn exe_unit(self) -> Option<ExeUnit> {
        match self {
            PowerUnit::Alu => Some(ExeUnit::Alu),
            PowerUnit::Mul => Some(ExeUnit::Mul),
            PowerUnit::Div => Some(ExeUnit::Div),
            _ => None,
        }
    }

    pub fn is_exe(self) -> bool {
        self.exe_unit().is_some()
    }
}

impl From<ExeUnit> for PowerUnit {
    fn from(u: ExeUnit) -> Self {
        match u {
            ExeUnit::Alu => PowerUnit::Alu,
            ExeUnit::Mul => PowerUnit::Mul,
            ExeUnit::Div => PowerUnit::Div,
        }
    }
}

impl fmt::Display for PowerUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PowerUnit {
    type Err = EnergyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PowerUnit::ALL
            .into_iter()
            .find(|u| u.name() == s)
            .ok_or_else(|| EnergyError::UnknownUnit(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("cost model is not valid JSON: {0}")]
    Syntax(String),
    #[error("cost model schema violation: {0}")]
    Schema(String),
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("negative or non-finite value {value} for {what}")]
    InvalidValue { what: String, value: String },
    #[error("cost model has no entry for {0}")]
    MissingEntry(String),
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("cannot finalize a run that retired no instructions")]
    NoInstructions,
    #[error("{scope} power is zero in the accurate report")]
    ZeroPower { scope: Scope },
    #[error("no report pairs to summarize")]
    EmptySummary,
    #[error("reports are incompatible: {0}")]
    Incompatible(String),
    #[error("cannot read cost model {path}: {source}")]
    Io { path: String, source: io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelMode {
    Table,
    Event,
}

/// Average power of one unit in table mode, per kind of selected circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TablePower {
    pub accurate_mw: f64,
    pub approximate_mw: f64,
}

impl TablePower {
    pub fn uniform(mw: f64) -> Self {
        TablePower {
            accurate_mw: mw,
            approximate_mw: mw,
        }
    }

    pub fn for_mode(&self, approximate: bool) -> f64 {
        if approximate {
            self.approximate_mw
        } else {
            self.accurate_mw
        }
    }
}

/// Event-mode costs of one circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitCost {
    pub leakage_mw: f64,
    /// Energy per operation keyed by op class name, with `"any"` as fallback.
    pub op_pj: BTreeMap<String, f64>,
    /// Scale operation energy with the multiplier's error mask.
    pub mask_scaled: bool,
}

impl CircuitCost {
    pub fn op_energy(&self, class: OpClass) -> f64 {
        self.op_pj
            .get(class.name())
            .or_else(|| self.op_pj.get("any"))
            .copied()
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Table {
        units: BTreeMap<PowerUnit, TablePower>,
        profiles: BTreeMap<String, BTreeMap<PowerUnit, TablePower>>,
    },
    Event {
        gating: bool,
        /// Non-slot units are stored under `CircuitKind::Accurate`.
        units: BTreeMap<PowerUnit, BTreeMap<CircuitKind, CircuitCost>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    pub clock_hz: f64,
    pub description: Option<String>,
    pub kind: ModelKind,
}

// ---------------------------------------------------------------------------
// Document schema

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Value(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    mode: ModelMode,
    clock_hz: Number,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    gating: Option<bool>,
    units: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    profiles: BTreeMap<String, BTreeMap<String, serde_json::Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KindPair {
    accurate: Number,
    approximate: Number,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TableEntry {
    Uniform(Number),
    PerKind(KindPair),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    #[serde(default)]
    leakage_mw: Option<Number>,
    #[serde(default)]
    op_pj: BTreeMap<String, Number>,
    #[serde(default)]
    mask_scaled: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlottedDoc {
    #[serde(default)]
    accurate: Option<CircuitDoc>,
    #[serde(default)]
    approximate: Option<CircuitDoc>,
}

fn number(n: &Number, what: &str) -> Result<f64, EnergyError> {
    let (v, text) = match n {
        Number::Text(s) => (
            s.trim().parse::<f64>().map_err(|_| {
                EnergyError::Schema(format!("{what}: {s:?} is not a decimal number"))
            })?,
            s.clone(),
        ),
        Number::Value(v) => (*v, v.to_string()),
    };
    if !v.is_finite() || v < 0.0 {
        return Err(EnergyError::InvalidValue {
            what: what.to_string(),
            value: text,
        });
    }
    Ok(v)
}

fn table_entry(
    name: &str,
    value: serde_json::Value,
) -> Result<(PowerUnit, TablePower), EnergyError> {
    let unit: PowerUnit = name.parse()?;
    let entry: TableEntry = serde_json::from_value(value)
        .map_err(|e| EnergyError::Schema(format!("unit {name}: {e}")))?;
    let power = match entry {
        TableEntry::Uniform(n) => TablePower::uniform(number(&n, name)?),
        TableEntry::PerKind(p) => TablePower {
            accurate_mw: number(&p.accurate, &format!("{name}.accurate"))?,
            approximate_mw: number(&p.approximate, &format!("{name}.approximate"))?,
        },
    };
    Ok((unit, power))
}

fn circuit_cost(doc: CircuitDoc, what: &str) -> Result<CircuitCost, EnergyError> {
    let leakage_mw = match &doc.leakage_mw {
        Some(n) => number(n, &format!("{what}.leakage_mw"))?,
        None => 0.0,
    };
    let mut op_pj = BTreeMap::new();
    for (key, n) in &doc.op_pj {
        let known = key == "any" || OpClass::ALL.iter().any(|c| c.name() == key);
        if !known {
            return Err(EnergyError::Schema(format!(
                "{what}: unknown op class {key:?}"
            )));
        }
        op_pj.insert(key.clone(), number(n, &format!("{what}.op_pj.{key}"))?);
    }
    Ok(CircuitCost {
        leakage_mw,
        op_pj,
        mask_scaled: doc.mask_scaled,
    })
}

fn event_entry(
    name: &str,
    value: serde_json::Value,
) -> Result<(PowerUnit, BTreeMap<CircuitKind, CircuitCost>), EnergyError> {
    let unit: PowerUnit = name.parse()?;
    let schema = |e: serde_json::Error| EnergyError::Schema(format!("unit {name}: {e}"));
    let mut kinds = BTreeMap::new();
    if unit.is_exe() {
        let doc: SlottedDoc = serde_json::from_value(value).map_err(schema)?;
        for (kind, c) in [
            (CircuitKind::Accurate, doc.accurate),
            (CircuitKind::Approximate, doc.approximate),
        ] {
            if let Some(c) = c {
                kinds.insert(kind, circuit_cost(c, &format!("{name}.{kind:?}"))?);
            }
        }
        if kinds.is_empty() {
            return Err(EnergyError::Schema(format!(
                "unit {name} needs an accurate or approximate entry"
            )));
        }
    } else {
        let doc: CircuitDoc = serde_json::from_value(value).map_err(schema)?;
        kinds.insert(CircuitKind::Accurate, circuit_cost(doc, name)?);
    }
    Ok((unit, kinds))
}

fn require_all_units<V>(units: &BTreeMap<PowerUnit, V>, context: &str) -> Result<(), EnergyError> {
    match PowerUnit::ALL.into_iter().find(|u| !units.contains_key(u)) {
        Some(u) => Err(EnergyError::MissingEntry(format!("unit {u}{context}"))),
        None => Ok(()),
    }
}

/// Parses and validates a cost-model document.
pub fn load_cost_model(document: &str) -> Result<CostModel, EnergyError> {
    if document.trim().is_empty() {
        return Err(EnergyError::Schema("empty document".into()));
    }
    let doc: Document = serde_json::from_str(document).map_err(|e| {
        if e.is_data() {
            EnergyError::Schema(e.to_string())
        } else {
            EnergyError::Syntax(e.to_string())
        }
    })?;
    let clock_hz = number(&doc.clock_hz, "clock_hz")?;
    if clock_hz == 0.0 {
        return Err(EnergyError::InvalidValue {
            what: "clock_hz".into(),
            value: "0".into(),
        });
    }
    let kind = match doc.mode {
        ModelMode::Table => {
            if doc.gating.is_some() {
                return Err(EnergyError::Schema(
                    "gating applies to event mode only".into(),
                ));
            }
            let units = doc
                .units
                .into_iter()
                .map(|(k, v)| table_entry(&k, v))
                .collect::<Result<BTreeMap<_, _>, _>>()?;
            require_all_units(&units, "")?;
            let mut profiles = BTreeMap::new();
            for (name, overrides) in doc.profiles {
                let parsed = overrides
                    .into_iter()
                    .map(|(k, v)| table_entry(&k, v))
                    .collect::<Result<BTreeMap<_, _>, _>>()?;
                profiles.insert(name, parsed);
            }
            ModelKind::Table { units, profiles }
        }
        ModelMode::Event => {
            if !doc.profiles.is_empty() {
                return Err(EnergyError::Schema(
                    "profiles apply to table mode only".into(),
                ));
            }
            let units = doc
                .units
                .into_iter()
                .map(|(k, v)| event_entry(&k, v))
                .collect::<Result<BTreeMap<_, _>, _>>()?;
            require_all_units(&units, "")?;
            ModelKind::Event {
                gating: doc.gating.unwrap_or(true),
                units,
            }
        }
    };
    Ok(CostModel {
        clock_hz,
        description: doc.description,
        kind,
    })
}

/// Models shipped with the crate, by file name.
pub const BUILTIN_MODELS: &[(&str, &str)] = &[
    (
        "tables_accurate.json",
        include_str!("../models/tables_accurate.json"),
    ),
    (
        "tables_approx.json",
        include_str!("../models/tables_approx.json"),
    ),
    (
        "event_default.json",
        include_str!("../models/event_default.json"),
    ),
];

impl CostModel {
    /// A shipped model by file name (`tables_accurate.json`, ...).
    pub fn builtin(name: &str) -> Option<CostModel> {
        BUILTIN_MODELS
            .iter()
            .find(|(n, _)| *n == name || n.trim_end_matches(".json") == name)
            .map(|(_, text)| load_cost_model(text).expect("shipped cost model is valid"))
    }

    /// Loads a model from `path`; when no such file exists, a shipped model
    /// with that file name is used instead.
    pub fn resolve(path: &str) -> Result<CostModel, EnergyError> {
        let p = Path::new(path);
        if !p.exists() {
            let file = p.file_name().and_then(|f| f.to_str()).unwrap_or(path);
            if let Some(m) = CostModel::builtin(file) {
                return Ok(m);
            }
        }
        let text = std::fs::read_to_string(p).map_err(|source| EnergyError::Io {
            path: path.to_string(),
            source,
        })?;
        load_cost_model(&text)
    }

    pub fn mode(&self) -> ModelMode {
        match self.kind {
            ModelKind::Table { .. } => ModelMode::Table,
            ModelKind::Event { .. } => ModelMode::Event,
        }
    }

    pub fn profile_names(&self) -> Vec<&str> {
        match &self.kind {
            ModelKind::Table { profiles, .. } => profiles.keys().map(String::as_str).collect(),
            ModelKind::Event { .. } => Vec::new(),
        }
    }

    pub fn has_profile(&self, name: &str) -> bool {
        self.profile_names().contains(&name)
    }

    /// The model with `name`'s per-unit overrides applied and no profiles left.
    pub fn with_profile(&self, name: &str) -> Result<CostModel, EnergyError> {
        match &self.kind {
            ModelKind::Table { units, profiles } => {
                let overrides = profiles
                    .get(name)
                    .ok_or_else(|| EnergyError::UnknownProfile(name.to_string()))?;
                let mut merged = units.clone();
                merged.extend(overrides.iter().map(|(u, p)| (*u, *p)));
                Ok(CostModel {
                    clock_hz: self.clock_hz,
                    description: self.description.clone(),
                    kind: ModelKind::Table {
                        units: merged,
                        profiles: BTreeMap::new(),
                    },
                })
            }
            ModelKind::Event { .. } => Err(EnergyError::UnknownProfile(name.to_string())),
        }
    }

    /// Applies `name` when the model has such a profile, else returns the model unchanged.
    pub fn for_profile(&self, name: Option<&str>) -> CostModel {
        match name {
            Some(n) if self.has_profile(n) => self.with_profile(n).expect("profile exists"),
            _ => self.clone(),
        }
    }

    /// Table-mode power of `unit`, if this is a table model.
    pub fn table_power(&self, unit: PowerUnit) -> Option<TablePower> {
        match &self.kind {
            ModelKind::Table { units, .. } => units.get(&unit).copied(),
            ModelKind::Event { .. } => None,
        }
    }

    /// Checks that every circuit installed in `slots` has a cost entry.
    pub fn check_slots(&self, slots: &CircuitSlotTable) -> Result<(), EnergyError> {
        if let ModelKind::Event { units, .. } = &self.kind {
            for exe in ExeUnit::ALL {
                for (slot, kind) in slots.occupied(exe) {
                    let present = units
                        .get(&PowerUnit::from(exe))
                        .is_some_and(|k| k.contains_key(&kind));
                    if !present {
                        return Err(EnergyError::MissingEntry(format!(
                            "{exe} slot {slot} ({kind:?})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Accrual

/// One unit's (or one circuit slot's) share of a retired instruction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyEvent {
    pub unit: PowerUnit,
    /// Circuit slot; 0 for units without slots.
    pub slot: u8,
    /// Circuit kind installed in the slot; `Accurate` for units without slots.
    pub kind: CircuitKind,
    /// Whether the unit routes to this slot.
    pub selected: bool,
    /// Whether the circuit runs with its error lines applied.
    pub approximate: bool,
    /// Multiplier configuration in effect, for mask-scaled costs.
    pub mul_config: MulConfig,
    /// Operation the unit performs during this event, if any.
    pub op: Option<OpClass>,
    pub cycles: u64,
}

impl EnergyEvent {
    /// An event for a unit without circuit slots.
    pub fn plain(unit: PowerUnit, op: Option<OpClass>, cycles: u64) -> Self {
        EnergyEvent {
            unit,
            slot: 0,
            kind: CircuitKind::Accurate,
            selected: true,
            approximate: false,
            mul_config: MulConfig::ACCURATE,
            op,
            cycles,
        }
    }
}

/// Converts power over a number of cycles into picojoules.
pub fn power_to_pj(mw: f64, cycles: u64, clock_hz: f64) -> f64 {
    mw * 1e-3 * (cycles as f64 / clock_hz) * 1e12
}

/// Compensated (Neumaier) running sum, so long runs of small per-instruction
/// energies do not drift.
#[derive(Clone, Copy, Debug, Default)]
struct Sum {
    total: f64,
    compensation: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.compensation += (self.total - t) + x;
        } else {
            self.compensation += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.compensation
    }
}

/// Running energy ledger of one machine.
#[derive(Clone, Debug)]
pub struct EnergyMeter {
    model: CostModel,
    unit_pj: BTreeMap<PowerUnit, Sum>,
    slot_pj: BTreeMap<(ExeUnit, u8), Sum>,
    slots: CircuitSlotTable,
    instret: u64,
    cycles: u64,
}

impl EnergyMeter {
    pub fn new(model: CostModel, slots: CircuitSlotTable) -> Result<Self, EnergyError> {
        model.check_slots(&slots)?;
        let mut slot_pj = BTreeMap::new();
        for exe in ExeUnit::ALL {
            for (slot, _) in slots.occupied(exe) {
                slot_pj.insert((exe, slot as u8), Sum::default());
            }
        }
        Ok(EnergyMeter {
            model,
            unit_pj: PowerUnit::ALL
                .into_iter()
                .map(|u| (u, Sum::default()))
                .collect(),
            slot_pj,
            slots,
            instret: 0,
            cycles: 0,
        })
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    /// Energy of one event under the model, without recording it.
    pub fn event_energy(&self, ev: &EnergyEvent) -> Result<f64, EnergyError> {
        let f = self.model.clock_hz;
        match &self.model.kind {
            ModelKind::Table { units, .. } => {
                let p = units
                    .get(&ev.unit)
                    .ok_or_else(|| EnergyError::MissingEntry(format!("unit {}", ev.unit)))?;
                if !ev.selected {
                    return Ok(0.0);
                }
                Ok(power_to_pj(p.for_mode(ev.approximate), ev.cycles, f))
            }
            ModelKind::Event { gating, units } => {
                if !ev.selected && *gating {
                    return Ok(0.0);
                }
                let cost = units
                    .get(&ev.unit)
                    .and_then(|k| k.get(&ev.kind))
                    .ok_or_else(|| {
                        EnergyError::MissingEntry(format!("{} ({:?})", ev.unit, ev.kind))
                    })?;
                let mut pj = power_to_pj(cost.leakage_mw, ev.cycles, f);
                if let Some(op) = ev.op {
                    let mut e = cost.op_energy(op);
                    if cost.mask_scaled && ev.approximate {
                        e *= power_estimate(ev.mul_config) / MUL8_POWER_MAX_UW;
                    }
                    pj += e;
                }
                Ok(pj)
            }
        }
    }

    /// Records one event.
    pub fn accrue(&mut self, ev: &EnergyEvent) -> Result<f64, EnergyError> {
        let pj = self.event_energy(ev)?;
        self.unit_pj.entry(ev.unit).or_default().add(pj);
        if let Some(exe) = ev.unit.exe_unit() {
            self.slot_pj.entry((exe, ev.slot)).or_default().add(pj);
        }
        Ok(pj)
    }

    /// Adds retired-instruction and cycle counts without energy, for callers
    /// that feed events through [`EnergyMeter::accrue`] directly.
    pub fn count(&mut self, instret: u64, cycles: u64) {
        self.instret += instret;
        self.cycles += cycles;
    }

    /// The events one retired instruction produces.
    pub fn events_for(&self, trace: &TraceEvent) -> Vec<EnergyEvent> {
        let cycles = trace.cycles as u64;
        let mut events = vec![
            EnergyEvent::plain(PowerUnit::Ifid, Some(trace.class), cycles),
            EnergyEvent::plain(PowerUnit::Memwb, Some(trace.class), cycles),
            EnergyEvent::plain(PowerUnit::Other, None, cycles),
        ];
        for exe in ExeUnit::ALL {
            let routed = selected_slot(trace, &trace.units, exe);
            let busy = matches!(trace.active, Some((u, _)) if u == exe);
            let sel = trace.units.get(exe);
            for (slot, kind) in self.slots.occupied(exe) {
                let selected = slot as u8 == routed;
                // The approximate flag follows the slot that actually ran.
                let approximate = if selected {
                    if busy {
                        trace.approximate
                    } else {
                        sel.approximate
                    }
                } else {
                    kind == CircuitKind::Approximate && sel.approximate
                };
                events.push(EnergyEvent {
                    unit: exe.into(),
                    slot: slot as u8,
                    kind,
                    selected,
                    approximate,
                    mul_config: if approximate {
                        MulConfig::new((sel.error_field & 0x7F) as u8, sel.truncation)
                    } else {
                        MulConfig::ACCURATE
                    },
                    op: busy.then_some(trace.class),
                    cycles,
                });
            }
        }
        events
    }

    /// Records a retired instruction.
    pub fn observe(&mut self, trace: &TraceEvent) -> Result<(), EnergyError> {
        for ev in self.events_for(trace) {
            self.accrue(&ev)?;
        }
        self.count(1, trace.cycles as u64);
        Ok(())
    }

    pub fn instret(&self) -> u64 {
        self.instret
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn finalize(&self) -> Result<EnergyReport, EnergyError> {
        EnergyReport::from_parts(
            self.model.mode(),
            self.model.clock_hz,
            self.instret,
            self.cycles,
            self.unit_pj.iter().map(|(u, s)| (*u, s.value())).collect(),
            self.slot_pj
                .iter()
                .map(|(&(unit, slot), s)| SlotEnergy {
                    unit,
                    slot,
                    pj: s.value(),
                })
                .collect(),
        )
    }
}

/// Slot that handles `exe`'s work for this instruction.
fn selected_slot(trace: &TraceEvent, snapshot: &UnitSnapshot, exe: ExeUnit) -> u8 {
    match trace.active {
        Some((u, slot)) if u == exe => slot,
        _ => snapshot.get(exe).slot,
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlotEnergy {
    pub unit: ExeUnit,
    pub slot: u8,
    pub pj: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub mode: ModelMode,
    pub clock_hz: f64,
    pub instret: u64,
    pub cycles: u64,
    pub elapsed_s: f64,
    pub unit_energy_pj: BTreeMap<PowerUnit, f64>,
    pub slot_energy_pj: Vec<SlotEnergy>,
    pub total_energy_pj: f64,
    pub pj_per_instr: f64,
    pub unit_power_mw: BTreeMap<PowerUnit, f64>,
    /// Fraction of total power per unit.
    pub unit_share: BTreeMap<PowerUnit, f64>,
    pub exe_stage_power_mw: f64,
    pub total_power_mw: f64,
    pub exe_share: f64,
}

pub const REPORT_CSV_HEADER: &str = "label,mode,instret,cycles,elapsed_s,total_pj,pj_per_instr,\
IFID_mW,ALU_mW,MUL_mW,DIV_mW,MEMWB_mW,other_mW,exe_mW,total_mW,exe_share";

impl EnergyReport {
    /// Builds a report from accumulated energies, deriving powers and shares.
    pub fn from_parts(
        mode: ModelMode,
        clock_hz: f64,
        instret: u64,
        cycles: u64,
        mut unit_energy_pj: BTreeMap<PowerUnit, f64>,
        slot_energy_pj: Vec<SlotEnergy>,
    ) -> Result<Self, EnergyError> {
        if instret == 0 {
            return Err(EnergyError::NoInstructions);
        }
        for u in PowerUnit::ALL {
            unit_energy_pj.entry(u).or_insert(0.0);
        }
        let elapsed_s = cycles as f64 / clock_hz;
        let total_energy_pj: f64 = unit_energy_pj.values().sum();
        let to_mw = |pj: f64| {
            if elapsed_s > 0.0 {
                pj * 1e-12 / elapsed_s * 1e3
            } else {
                0.0
            }
        };
        let unit_power_mw: BTreeMap<_, _> = unit_energy_pj
            .iter()
            .map(|(u, pj)| (*u, to_mw(*pj)))
            .collect();
        let total_power_mw = to_mw(total_energy_pj);
        let exe_stage_power_mw = unit_power_mw
            .iter()
            .filter(|(u, _)| u.is_exe())
            .map(|(_, p)| p)
            .sum();
        let share = |p: f64| {
            if total_power_mw > 0.0 {
                p / total_power_mw
            } else {
                0.0
            }
        };
        Ok(EnergyReport {
            mode,
            clock_hz,
            instret,
            cycles,
            elapsed_s,
            unit_share: unit_power_mw.iter().map(|(u, p)| (*u, share(*p))).collect(),
            unit_energy_pj,
            slot_energy_pj,
            total_energy_pj,
            pj_per_instr: total_energy_pj / instret as f64,
            unit_power_mw,
            exe_stage_power_mw,
            total_power_mw,
            exe_share: share(exe_stage_power_mw),
        })
    }

    /// Report of two consecutive segments of one run.
    pub fn combine(&self, next: &EnergyReport) -> Result<EnergyReport, EnergyError> {
        if self.mode != next.mode || self.clock_hz != next.clock_hz {
            return Err(EnergyError::Incompatible("mode or clock differs".into()));
        }
        let mut units = self.unit_energy_pj.clone();
        for (u, pj) in &next.unit_energy_pj {
            *units.entry(*u).or_insert(0.0) += pj;
        }
        let mut slots: BTreeMap<(ExeUnit, u8), f64> = BTreeMap::new();
        for s in self.slot_energy_pj.iter().chain(&next.slot_energy_pj) {
            *slots.entry((s.unit, s.slot)).or_insert(0.0) += s.pj;
        }
        EnergyReport::from_parts(
            self.mode,
            self.clock_hz,
            self.instret + next.instret,
            self.cycles + next.cycles,
            units,
            slots
                .into_iter()
                .map(|((unit, slot), pj)| SlotEnergy { unit, slot, pj })
                .collect(),
        )
    }

    /// Energy spent in unselected slots of `unit`.
    pub fn slot_energy(&self, unit: ExeUnit, slot: u8) -> f64 {
        self.slot_energy_pj
            .iter()
            .filter(|s| s.unit == unit && s.slot == slot)
            .map(|s| s.pj)
            .sum()
    }

    pub fn power(&self, unit: PowerUnit) -> f64 {
        self.unit_power_mw.get(&unit).copied().unwrap_or(0.0)
    }

    pub fn scope_power(&self, scope: Scope) -> f64 {
        match scope {
            Scope::Total => self.total_power_mw,
            Scope::Exe => self.exe_stage_power_mw,
            Scope::Mul => self.power(PowerUnit::Mul),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_row(&self, label: &str) -> String {
        let mut row = format!(
            "{label},{},{},{},{},{},{}",
            match self.mode {
                ModelMode::Table => "table",
                ModelMode::Event => "event",
            },
            self.instret,
            self.cycles,
            self.elapsed_s,
            self.total_energy_pj,
            self.pj_per_instr
        );
        for u in PowerUnit::ALL {
            row.push_str(&format!(",{}", self.power(u)));
        }
        row.push_str(&format!(
            ",{},{},{}",
            self.exe_stage_power_mw, self.total_power_mw, self.exe_share
        ));
        row
    }

    pub fn write_csv<W: Write>(rows: &[(&str, &EnergyReport)], mut out: W) -> io::Result<()> {
        writeln!(out, "{REPORT_CSV_HEADER}")?;
        for (label, r) in rows {
            writeln!(out, "{}", r.csv_row(label))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Total,
    Exe,
    Mul,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Total => "total",
            Scope::Exe => "EXE",
            Scope::Mul => "MUL",
        })
    }
}

/// Percentage power reduction of `approx` relative to `accurate` in `scope`.
pub fn improvement(
    accurate: &EnergyReport,
    approx: &EnergyReport,
    scope: Scope,
) -> Result<f64, EnergyError> {
    let p_acc = accurate.scope_power(scope);
    if p_acc == 0.0 {
        return Err(EnergyError::ZeroPower { scope });
    }
    Ok(100.0 * (p_acc - approx.scope_power(scope)) / p_acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImprovementSummary {
    pub avg_exe_improvement: f64,
    pub avg_mul_improvement: f64,
    pub avg_total_improvement: f64,
}

/// Mean per-app improvement in each scope.
pub fn summary_across_apps(
    pairs: &[(EnergyReport, EnergyReport)],
) -> Result<ImprovementSummary, EnergyError> {
    if pairs.is_empty() {
        return Err(EnergyError::EmptySummary);
    }
    let mean = |scope| -> Result<f64, EnergyError> {
        let mut sum = 0.0;
        for (acc, apx) in pairs {
            sum += improvement(acc, apx, scope)?;
        }
        Ok(sum / pairs.len() as f64)
    };
    Ok(ImprovementSummary {
        avg_exe_improvement: mean(Scope::Exe)?,
        avg_mul_improvement: mean(Scope::Mul)?,
        avg_total_improvement: mean(Scope::Total)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_model(mw: f64) -> CostModel {
        load_cost_model(&format!(
            r#"{{"mode":"table","clock_hz":"500000000","units":{{
                "IFID":"{mw}","ALU":"0","MUL":"0","DIV":"0","MEMWB":"0","other":"0"}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn power_time_product() {
        assert!((power_to_pj(1.0, 500, 5e8) - 1000.0).abs() < 1e-9);
        let mut m = EnergyMeter::new(table_model(1.0), CircuitSlotTable::default()).unwrap();
        m.accrue(&EnergyEvent::plain(PowerUnit::Ifid, None, 500))
            .unwrap();
        m.count(500, 500);
        let r = m.finalize().unwrap();
        assert!((r.total_energy_pj - 1000.0).abs() < 1e-9);
        assert!((r.pj_per_instr - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shipped_models_load() {
        let acc = CostModel::builtin("tables_accurate.json").unwrap();
        let apx = CostModel::builtin("tables_approx").unwrap();
        let mm = acc.with_profile("matMul_int").unwrap();
        assert_eq!(mm.table_power(PowerUnit::Mul).unwrap().accurate_mw, 0.437);
        let mm = apx.with_profile("matMul_int").unwrap();
        assert_eq!(mm.table_power(PowerUnit::Mul).unwrap().accurate_mw, 0.126);
        assert_eq!(acc.profile_names().len(), 7);
        assert_eq!(
            CostModel::builtin("event_default.json").unwrap().mode(),
            ModelMode::Event
        );
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(load_cost_model(""), Err(EnergyError::Schema(_))));
        assert!(matches!(load_cost_model("{"), Err(EnergyError::Syntax(_))));
        let base = r#""IFID":"1","ALU":"1","MUL":"1","DIV":"1","MEMWB":"1""#;
        let doc =
            |extra: &str| format!(r#"{{"mode":"table","clock_hz":5e8,"units":{{{base}{extra}}}}}"#);
        assert!(load_cost_model(&doc(r#","other":"0""#)).is_ok());
        assert!(matches!(
            load_cost_model(&doc(r#","other":"0","FPU":"1""#)),
            Err(EnergyError::UnknownUnit(_))
        ));
        assert!(matches!(
            load_cost_model(&doc(r#","other":"-0.1""#)),
            Err(EnergyError::InvalidValue { .. })
        ));
        assert!(matches!(
            load_cost_model(&doc("")),
            Err(EnergyError::MissingEntry(_))
        ));
        assert!(matches!(
            load_cost_model(&doc(r#","other":"abc""#)),
            Err(EnergyError::Schema(_))
        ));
    }

    #[test]
    fn improvement_examples() {
        let acc = CostModel::builtin("tables_accurate.json")
            .unwrap()
            .with_profile("matMul_int")
            .unwrap();
        let apx = CostModel::builtin("tables_approx.json")
            .unwrap()
            .with_profile("matMul_int")
            .unwrap();
        let report = |model: CostModel| {
            let mut m = EnergyMeter::new(model, CircuitSlotTable::default()).unwrap();
            for u in PowerUnit::ALL {
                m.accrue(&EnergyEvent::plain(u, None, 1000)).unwrap();
            }
            m.count(1000, 1000);
            m.finalize().unwrap()
        };
        let (a, b) = (report(acc), report(apx));
        assert!((improvement(&a, &b, Scope::Mul).unwrap() - 71.167).abs() < 0.01);
        assert!((improvement(&a, &b, Scope::Exe).unwrap() - 18.050).abs() < 0.01);
        assert!((a.exe_share - 0.8).abs() < 1e-9);
        assert_eq!(improvement(&a, &a, Scope::Total).unwrap(), 0.0);
        let s = summary_across_apps(&[(a.clone(), a.clone())]).unwrap();
        assert_eq!(s.avg_total_improvement, 0.0);
        assert!(matches!(
            summary_across_apps(&[]),
            Err(EnergyError::EmptySummary)
        ));
    }

    #[test]
    fn zero_instructions_is_error() {
        let m = EnergyMeter::new(table_model(1.0), CircuitSlotTable::default()).unwrap();
        assert!(matches!(m.finalize(), Err(EnergyError::NoInstructions)));
    }
}
