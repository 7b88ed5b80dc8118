//! Run configuration, report bundles, and their table/JSON/CSV renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::audit::{
    audit_all, classify_all, cloner_io, closed_form_error, default_blank, lab_cut,
    lemma_scan_seeded, AuditRecord, Category, InsufficiencyCertificate, PairClassification,
    ScanReport,
};
use crate::catalog::{GhzLabel, WBasisIndex};
use crate::error::{Error, Result};
use crate::ghz::{
    all_pairs, all_triples, original_fidelity, synthesize_cloner_with_tol, triple_clonability,
    verify_cloner, CloningCircuit, TripleVerdict, FIDELITY_TOL,
};
use crate::measures::negativity;
use crate::random::{random_unitary, random_wclass_params, rng};
use crate::register::{embed_operator, RANK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub rank_tol: f64,
    pub fidelity_tol: f64,
    pub match_tol: f64,
    pub step: f64,
    pub radius: f64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rank_tol: RANK_TOL,
            fidelity_tol: FIDELITY_TOL,
            match_tol: 1e-3,
            step: 0.02,
            radius: 0.05,
            seed: 0,
            format: Format::Table,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank tolerance", self.rank_tol),
            ("fidelity tolerance", self.fidelity_tol),
            ("match tolerance", self.match_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if !(self.step > 0.0 && 3.0 * self.step <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "step {} outside (0, 1/3]",
                self.step
            )));
        }
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return Err(Error::InvalidInput("radius must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloneResult {
    pub states: Vec<GhzLabel>,
    pub circuit: CloningCircuit,
    pub fidelities: Vec<f64>,
    pub original_fidelities: Vec<f64>,
    pub verified: bool,
}

/// Synthesizes and verifies a cloner for `states` with the given blank.
pub fn clone_result(states: &[GhzLabel], blank: GhzLabel, tol: f64) -> Result<CloneResult> {
    let circuit = synthesize_cloner_with_tol(states, blank, tol)?;
    let fids = verify_cloner(&circuit, states)?;
    let fidelities: Vec<f64> = states.iter().map(|s| fids[s]).collect();
    let original_fidelities = states
        .iter()
        .map(|&s| original_fidelity(&circuit, s))
        .collect::<Result<Vec<_>>>()?;
    let verified = fidelities
        .iter()
        .chain(&original_fidelities)
        .all(|&f| f >= 1.0 - tol);
    Ok(CloneResult {
        states: states.to_vec(),
        circuit,
        fidelities,
        original_fidelities,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    #[serde(flatten)]
    pub record: AuditRecord,
    pub reference_in: Option<f64>,
    pub reference_out: Option<f64>,
}

impl From<AuditRecord> for AuditRow {
    fn from(record: AuditRecord) -> Self {
        let reference = record.reference_values();
        AuditRow {
            record,
            reference_in: reference.map(|r| r.0),
            reference_out: reference.map(|r| r.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub quantity: String,
    pub state: String,
    pub cut: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossChecks {
    pub closed_form_points: usize,
    pub closed_form_max_error: f64,
    pub local_unitary_trials: usize,
    pub local_unitary_max_error: f64,
}

/// Seeded oracle comparisons: closed-form W-class spectra against direct
/// marginals, and negativity invariance under random local unitaries on
/// the lab cut.
pub fn cross_checks(seed: u64, points: usize, trials: usize) -> Result<CrossChecks> {
    let mut r = rng(seed);
    let mut closed_form_max_error: f64 = 0.0;
    for _ in 0..points {
        closed_form_max_error =
            closed_form_max_error.max(closed_form_error(random_wclass_params(&mut r))?);
    }
    let pairs = WBasisIndex::pairs();
    let mut local_unitary_max_error: f64 = 0.0;
    for t in 0..trials {
        let (m, n) = pairs[(t * 11 + 5) % pairs.len()];
        let k = (t % 3) as u8 + 1;
        let (rho_in, _, cut) = cloner_io(m, n, k, default_blank())?;
        let base = negativity(&rho_in, &cut)?;
        let ua = random_unitary(16, &mut r);
        let ub = random_unitary(4, &mut r);
        let full = embed_operator(&ua, &cut.side_a(), 6)? * embed_operator(&ub, cut.side_b(), 6)?;
        let moved = negativity(&rho_in.conjugate_by(&full)?, &lab_cut(k)?)?;
        local_unitary_max_error = local_unitary_max_error.max((moved - base).abs());
    }
    Ok(CrossChecks {
        closed_form_points: points,
        closed_form_max_error,
        local_unitary_trials: trials,
        local_unitary_max_error,
    })
}

/// Everything a run produced. Sections a command did not touch stay empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub tool_version: String,
    pub config: RunConfig,
    pub ghz_clone: Vec<CloneResult>,
    pub ghz_pairs: Vec<CloneResult>,
    pub ghz_triples: Vec<TripleVerdict>,
    pub classifications: Vec<PairClassification>,
    pub pairs: Vec<AuditRow>,
    pub scan: Option<ScanReport>,
    pub certificates: Vec<InsufficiencyCertificate>,
    pub measurements: Vec<Measurement>,
    pub cross_checks: Option<CrossChecks>,
    pub discrepancies: Vec<String>,
}

impl ReportBundle {
    pub fn new(config: RunConfig) -> Self {
        ReportBundle {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            ghz_clone: Vec::new(),
            ghz_pairs: Vec::new(),
            ghz_triples: Vec::new(),
            classifications: Vec::new(),
            pairs: Vec::new(),
            scan: None,
            certificates: Vec::new(),
            measurements: Vec::new(),
            cross_checks: None,
            discrepancies: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn add_clone(&mut self, result: CloneResult) {
        if !result.verified {
            self.discrepancies.push(format!(
                "cloner for {:?} below fidelity tolerance: {:?}",
                result
                    .states
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>(),
                result.fidelities
            ));
        }
        self.ghz_clone.push(result);
    }

    pub fn add_audits(&mut self, records: Vec<AuditRecord>) {
        let tol = self.config.match_tol;
        for record in records {
            let row = AuditRow::from(record);
            let r = &row.record;
            if matches!(r.category, Category::B | Category::C) && r.blank == default_blank() {
                if !r.monotone_violated() {
                    self.discrepancies.push(format!(
                        "({}, {}): output negativity {} does not exceed input {}",
                        r.m, r.n, r.negativity_out, r.negativity_in
                    ));
                }
                if let (Some(ri), Some(ro)) = (row.reference_in, row.reference_out) {
                    if (r.negativity_in - ri).abs() > tol || (r.negativity_out - ro).abs() > tol {
                        self.discrepancies.push(format!(
                            "({}, {}): negativities ({:.6}, {:.6}) differ from published ({ri}, {ro}) by more than {tol}",
                            r.m, r.n, r.negativity_in, r.negativity_out
                        ));
                    }
                }
            }
            self.pairs.push(row);
        }
    }

    pub fn set_scan(&mut self, scan: ScanReport) {
        for v in &scan.violations {
            self.discrepancies.push(format!(
                "entropy scan: {} has minimum cut entropy {} at or above threshold",
                v.params, v.min_cut_entropy
            ));
        }
        if scan.max_cross_check_error > 1e-10 {
            self.discrepancies.push(format!(
                "entropy scan: closed-form spectra deviate by {:e}",
                scan.max_cross_check_error
            ));
        }
        self.scan = Some(scan);
    }

    pub fn set_cross_checks(&mut self, checks: CrossChecks) {
        if checks.closed_form_max_error > 1e-10 {
            self.discrepancies.push(format!(
                "closed-form spectra deviate by {:e}",
                checks.closed_form_max_error
            ));
        }
        if checks.local_unitary_max_error > 1e-10 {
            self.discrepancies.push(format!(
                "negativity changed by {:e} under local unitaries",
                checks.local_unitary_max_error
            ));
        }
        self.cross_checks = Some(checks);
    }
}

/// Runs every analysis with `config`.
pub fn full_report(config: RunConfig) -> Result<ReportBundle> {
    config.validate()?;
    let blank = GhzLabel::new(0, 0, 0)?;
    let mut bundle = ReportBundle::new(config.clone());
    for pair in all_pairs() {
        let result = clone_result(&pair, blank, config.fidelity_tol)?;
        if !result.verified {
            bundle
                .discrepancies
                .push(format!("GHZ pair ({}), ({}) not cloned", pair[0], pair[1]));
        }
        bundle.ghz_pairs.push(result);
    }
    for triple in all_triples() {
        bundle.ghz_triples.push(triple_clonability(&triple)?);
    }
    bundle.classifications = classify_all(config.rank_tol)?;
    bundle.add_audits(audit_all(default_blank(), config.rank_tol)?);
    bundle.set_scan(lemma_scan_seeded(config.step, config.radius, config.seed)?);
    bundle.set_cross_checks(cross_checks(config.seed, 1000, 6)?);
    Ok(bundle)
}

/// Decimal rendering with `sig` significant digits; scientific notation
/// outside `[1e-4, 1e15)`.
pub fn format_real(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    if !x.is_finite() {
        return "null".into();
    }
    let mag = x.abs();
    if !(1e-4..1e15).contains(&mag) {
        return format!("{:.*e}", sig.saturating_sub(1), x);
    }
    let exponent = mag.log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exponent).max(1) as usize;
    format!("{x:.decimals$}")
}

const JSON_DIGITS: usize = 12;
const TABLE_DIGITS: usize = 6;

fn scalar_text(v: &Value, digits: usize) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format_real(n.as_f64().unwrap_or(f64::NAN), digits),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|i| scalar_text(i, digits))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Object(_) => serde_json::to_string(v).unwrap_or_default(),
    }
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent + 1);
    let close = "  ".repeat(indent);
    match v {
        Value::Number(n) if n.is_f64() => {
            out.push_str(&format_real(n.as_f64().unwrap_or(f64::NAN), JSON_DIGITS))
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (x, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_json(out, item, indent + 1);
                out.push_str(if x + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (x, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(key).expect("string key"));
                out.push_str(": ");
                write_json(out, item, indent + 1);
                out.push_str(if x + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("scalar")),
    }
}

fn rows<T: Serialize>(x: &T) -> Result<Vec<Value>> {
    Ok(
        match serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))? {
            Value::Array(items) => items,
            Value::Null => Vec::new(),
            other => vec![other],
        },
    )
}

/// Sections rendered as tables, each a list of flat rows.
fn sections(bundle: &ReportBundle) -> Result<Vec<(&'static str, Vec<Value>)>> {
    let notes: Vec<Value> = bundle
        .discrepancies
        .iter()
        .map(|d| serde_json::json!({ "note": d }))
        .collect();
    Ok(vec![
        ("ghz_clone", rows(&bundle.ghz_clone)?),
        ("ghz_pair", rows(&bundle.ghz_pairs)?),
        ("ghz_triple", rows(&bundle.ghz_triples)?),
        ("w_class", rows(&bundle.classifications)?),
        ("w_pair", rows(&bundle.pairs)?),
        ("scan", rows(&bundle.scan)?),
        ("certificate", rows(&bundle.certificates)?),
        ("measurement", rows(&bundle.measurements)?),
        ("cross_check", rows(&bundle.cross_checks)?),
        ("discrepancy", notes),
    ])
}

fn flatten_row(v: &Value) -> Vec<(String, Value)> {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, item)| {
                let item = match item {
                    // nested records collapse to their gate listing or JSON text
                    Value::Object(inner) if inner.contains_key("gates") => inner["gates"].clone(),
                    Value::Array(xs) if xs.iter().any(|x| x.is_object()) => {
                        Value::String(xs.len().to_string())
                    }
                    other => other.clone(),
                };
                (k.clone(), item)
            })
            .collect(),
        other => vec![("value".into(), other.clone())],
    }
}

fn render_table(bundle: &ReportBundle) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "locc {}", bundle.tool_version).ok();
    for (name, rows) in sections(bundle)? {
        if rows.is_empty() {
            continue;
        }
        let flat: Vec<Vec<(String, Value)>> = rows.iter().map(flatten_row).collect();
        let headers: Vec<String> = flat[0].iter().map(|(k, _)| k.clone()).collect();
        let cells: Vec<Vec<String>> = flat
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(_, v)| scalar_text(v, TABLE_DIGITS))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..headers.len())
            .map(|c| {
                cells
                    .iter()
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .chain([headers[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        writeln!(out, "\n[{name}]").ok();
        let line = |cols: &[String]| -> String {
            cols.iter()
                .enumerate()
                .map(|(c, s)| format!("{:<w$}", s, w = widths.get(c).copied().unwrap_or(0)))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(&headers)).ok();
        for row in &cells {
            writeln!(out, "{}", line(row)).ok();
        }
    }
    writeln!(
        out,
        "\n{}",
        if bundle.passed() {
            "all checks passed"
        } else {
            "CHECKS FAILED"
        }
    )
    .ok();
    Ok(out)
}

fn render_csv(bundle: &ReportBundle) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    for (name, rows) in sections(bundle)? {
        if rows.is_empty() {
            continue;
        }
        let flat: Vec<Vec<(String, Value)>> = rows.iter().map(flatten_row).collect();
        let mut header = vec!["section".to_string()];
        header.extend(flat[0].iter().map(|(k, _)| k.clone()));
        writer.write_record(&header).map_err(io)?;
        for row in &flat {
            let mut record = vec![name.to_string()];
            record.extend(row.iter().map(|(_, v)| scalar_text(v, JSON_DIGITS)));
            writer.write_record(&record).map_err(io)?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Renders `bundle`. Identical bundles give identical bytes.
pub fn emit_report(bundle: &ReportBundle, format: Format) -> Result<Vec<u8>> {
    let text = match format {
        Format::Json => {
            let value = serde_json::to_value(bundle).map_err(|e| Error::Io(e.to_string()))?;
            let mut s = String::new();
            write_json(&mut s, &value, 0);
            s.push('\n');
            s
        }
        Format::Csv => render_csv(bundle)?,
        Format::Table => render_table(bundle)?,
    };
    Ok(text.into_bytes())
}

/// JSON for a single top-level field of `bundle`.
pub fn emit_section(bundle: &ReportBundle, field: &str) -> Result<Vec<u8>> {
    let value = serde_json::to_value(bundle).map_err(|e| Error::Io(e.to_string()))?;
    let section = value
        .get(field)
        .ok_or_else(|| Error::InvalidInput(format!("no report section {field:?}")))?;
    let mut s = String::new();
    write_json(&mut s, section, 0);
    s.push('\n');
    Ok(s.into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(2.145967610998309, 12), "2.14596761100");
        assert_eq!(format_real(0.5, 12), "0.500000000000");
        assert_eq!(format_real(0.0, 12), "0.0");
        assert_eq!(format_real(1e-17, 12), "1.00000000000e-17");
        assert_eq!(format_real(1.890965660143577, 6), "1.89097");
        assert_eq!(format_real(123.0, 2), "123.0");
    }

    #[test]
    fn empty_bundle_is_valid_json() {
        let bundle = ReportBundle::new(RunConfig::default());
        let bytes = emit_report(&bundle, Format::Json).unwrap();
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["pairs"], Value::Array(vec![]));
        assert_eq!(v["scan"], Value::Null);
        assert_eq!(emit_report(&bundle, Format::Json).unwrap(), bytes);
        assert!(emit_report(&bundle, Format::Csv).unwrap().is_empty());
        let table = String::from_utf8(emit_report(&bundle, Format::Table).unwrap()).unwrap();
        assert!(table.contains("all checks passed"));
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            match_tol: 0.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            step: 0.5,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn audit_rows_flag_mismatches() {
        let mut bundle = ReportBundle::new(RunConfig::default());
        let mut record = crate::audit::negativity_audit(
            WBasisIndex::new(1).unwrap(),
            WBasisIndex::new(6).unwrap(),
        )
        .unwrap();
        bundle.add_audits(vec![record.clone()]);
        assert!(bundle.passed());
        record.negativity_in += 0.01;
        bundle.add_audits(vec![record]);
        assert_eq!(bundle.discrepancies.len(), 1);
    }
}
