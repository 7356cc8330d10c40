//! Report assembly: runs the requested order computations on one group
//! instance, timestamps each method, and packages the results with the
//! agreement verdict into serializable records.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::formulas;
use crate::gf2k::Field;
use crate::group::builders::{build, flatten, parse_spec};
use crate::group::iso::{fingerprint, Fingerprint};
use crate::order::OrderValue;
use crate::unitary::{count_vstar_bruteforce, vstar_recursion, ThetaMethod};
use crate::{Error, Result};

/// Which methods a report should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Brute,
    Recursion,
    Formula,
    All,
}

impl MethodChoice {
    fn wants(&self, name: &str) -> bool {
        match self {
            MethodChoice::All => true,
            MethodChoice::Brute => name == "brute",
            MethodChoice::Recursion => name == "recursion",
            MethodChoice::Formula => name == "formula",
        }
    }
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(MethodChoice::Brute),
            "recursion" => Ok(MethodChoice::Recursion),
            "formula" => Ok(MethodChoice::Formula),
            "all" => Ok(MethodChoice::All),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// Outcome classification of one method run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Exact,
    LowerBound,
    Unsupported,
    Skipped,
}

/// A computed order in symbolic and, when it fits, integer form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedValue {
    pub log2_ell: i64,
    pub q_exponent: i64,
    pub display: String,
    pub integer: Option<u128>,
}

impl From<OrderValue> for ReportedValue {
    fn from(v: OrderValue) -> Self {
        ReportedValue {
            log2_ell: v.log2_ell(),
            q_exponent: v.f_exponent(),
            display: v.to_string(),
            integer: v.to_u128(),
        }
    }
}

/// One method's result inside a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub status: Status,
    pub value: Option<ReportedValue>,
    pub note: Option<String>,
    pub wall_ms: u128,
}

/// Omega set sizes as a serializable pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaPair {
    pub omega1: u128,
    pub omega_c: u128,
}

/// Full record of one |V_*| computation across methods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub spec: String,
    pub group_order: u64,
    pub field_q: u16,
    pub omega_enumerated: OmegaPair,
    pub omega_closed: Option<OmegaPair>,
    pub methods: Vec<MethodReport>,
    pub agreement: Option<bool>,
}

/// Structure summary for the `group` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub spec: String,
    pub order: u64,
    pub abelian: bool,
    pub center_order: u64,
    pub derived_order: u64,
    pub omega1: u128,
    pub omega_c: u128,
    pub fingerprint: Fingerprint,
}

fn timed<T>(work: impl FnOnce() -> Result<T>) -> (Result<T>, u128) {
    let start = Instant::now();
    let out = work();
    (out, start.elapsed().as_millis())
}

/// Folds a method outcome into a MethodReport, mapping budget misses to
/// `Skipped` and missing rules or structure to `Unsupported`.
fn method_report(
    name: &str,
    status_on_ok: Status,
    outcome: Result<OrderValue>,
    wall_ms: u128,
) -> Result<(MethodReport, Option<OrderValue>)> {
    match outcome {
        Ok(value) => Ok((
            MethodReport {
                method: name.into(),
                status: status_on_ok,
                value: Some(value.into()),
                note: None,
                wall_ms,
            },
            Some(value),
        )),
        Err(Error::Capacity { required_log2, given }) => Ok((
            MethodReport {
                method: name.into(),
                status: Status::Skipped,
                value: None,
                note: Some(format!(
                    "budget exceeded: needs 2^{required_log2} candidates, budget {given}"
                )),
                wall_ms,
            },
            None,
        )),
        Err(Error::Unsupported(msg)) | Err(Error::NoRule(msg)) => Ok((
            MethodReport {
                method: name.into(),
                status: Status::Unsupported,
                value: None,
                note: Some(msg),
                wall_ms,
            },
            None,
        )),
        Err(other) => Err(other),
    }
}

fn skipped(name: &str) -> MethodReport {
    MethodReport {
        method: name.into(),
        status: Status::Skipped,
        value: None,
        note: Some("not requested".into()),
        wall_ms: 0,
    }
}

/// Runs the selected methods on one parsed group and assembles the report.
/// The agreement flag is Some only when at least two methods are exact.
pub fn vstar_report(
    spec_text: &str,
    field_k: u8,
    choice: MethodChoice,
    budget: Option<u64>,
    theta_method: ThetaMethod,
) -> Result<Report> {
    let spec = parse_spec(spec_text)?;
    let group = build(&spec)?;
    let field = Field::new(field_k)?;
    let counts = group.omega_sets();
    let omega_enumerated =
        OmegaPair { omega1: counts.count1() as u128, omega_c: counts.count_c() as u128 };
    let flat = flatten(&spec)?;
    let omega_closed = formulas::omega_closed_spec(&flat)
        .ok()
        .map(|(o1, oc)| OmegaPair { omega1: o1, omega_c: oc });

    let mut methods = Vec::new();
    let mut exact = Vec::new();
    let mut push = |report: MethodReport, value: Option<OrderValue>| {
        if report.status == Status::Exact {
            if let Some(v) = value {
                exact.push(v);
            }
        }
        methods.push(report);
    };

    if choice.wants("brute") {
        let (outcome, ms) = timed(|| {
            count_vstar_bruteforce(&group, &field, budget)
                .and_then(|count| OrderValue::from_count(count, field_k))
        });
        let (report, value) = method_report("brute", Status::Exact, outcome, ms)?;
        push(report, value);
    } else {
        push(skipped("brute"), None);
    }

    if choice.wants("recursion") {
        let status = if theta_method == ThetaMethod::Sampled && !group.is_abelian() {
            Status::LowerBound
        } else {
            Status::Exact
        };
        let (outcome, ms) = timed(|| vstar_recursion(&group, &field, theta_method));
        let (mut report, value) = method_report("recursion", status, outcome, ms)?;
        if report.status == Status::LowerBound {
            report.note = Some("Theta rank from sampling; order is not certified exact".into());
        }
        push(report, value);
    } else {
        push(skipped("recursion"), None);
    }

    if choice.wants("formula") {
        let (outcome, ms) = timed(|| formulas::vstar_recursion_symbolic(&flat, field_k));
        let (report, value) = method_report("formula", Status::Exact, outcome, ms)?;
        push(report, value);
    } else {
        push(skipped("formula"), None);
    }

    let agreement = if exact.len() >= 2 {
        Some(exact.windows(2).all(|w| w[0] == w[1]))
    } else {
        None
    };

    Ok(Report {
        spec: spec_text.into(),
        group_order: group.order() as u64,
        field_q: field.q(),
        omega_enumerated,
        omega_closed,
        methods,
        agreement,
    })
}

/// Builds the structure summary for one group spec.
pub fn group_report(spec_text: &str) -> Result<GroupReport> {
    let spec = parse_spec(spec_text)?;
    let group = build(&spec)?;
    let counts = group.omega_sets();
    Ok(GroupReport {
        spec: spec_text.into(),
        order: group.order() as u64,
        abelian: group.is_abelian(),
        center_order: group.center().order() as u64,
        derived_order: group.derived().order() as u64,
        omega1: counts.count1() as u128,
        omega_c: counts.count_c() as u128,
        fingerprint: fingerprint(&group),
    })
}

/// Renders a report as aligned plain-text rows.
pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "spec: {}  |G| = {}  q = {}  omega = ({}, {})",
        report.spec,
        report.group_order,
        report.field_q,
        report.omega_enumerated.omega1,
        report.omega_enumerated.omega_c
    ));
    if let Some(closed) = &report.omega_closed {
        out.push_str(&format!("  omega_closed = ({}, {})", closed.omega1, closed.omega_c));
    }
    out.push('\n');
    for m in &report.methods {
        let value = m.value.as_ref().map(|v| v.display.clone()).unwrap_or_else(|| "-".into());
        let note = m.note.as_deref().unwrap_or("");
        out.push_str(&format!(
            "  {:<10} {:<12} {:<24} {:>6} ms  {}\n",
            m.method,
            format!("{:?}", m.status),
            value,
            m.wall_ms,
            note
        ));
    }
    out.push_str(&format!(
        "  agreement: {}\n",
        match report.agreement {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "n/a",
        }
    ));
    out
}

/// True when the report shows a certified disagreement between methods.
pub fn has_disagreement(report: &Report) -> bool {
    report.agreement == Some(false)
}
