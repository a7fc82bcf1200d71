//! Structure documents, check dispatch and report rendering behind the
//! `gcx` binary.
//!
//! A document is a JSON object
//!
//! ```json
//! {"kind": "leibniz", "payload": {...}, "options": {"degree_bound": 2, "seed": 0, "trials": 20, "checks": ["jacobi"]}}
//! ```
//!
//! with `kind` one of `leibniz`, `point-courant`, `gen-tangent`,
//! `cubic-hamiltonian`. Schema errors carry the JSON pointer of the
//! offending value.

use crate::courant::{
    self, classify_courant_tensor, commutant_solve, in_span, contracted_anchor_violation,
    contracted_axiom_violations, delta_conditions, dorfman_axiom_violations, dorfman_jacobi_violation,
    generating_set, proof_identities, theorem4_check, torsion_violation, CommutantStage, CourantKind,
    GenEndomorphism, Witness, WireEndomorphism,
};
use crate::derived::{
    self, build_psi, canonical_psi, data_from_psi, derived_axiom_violations, derived_jacobi_violation,
    derived_structure_constants, double_bracket_classify, generating_lifts, homological_check, lift_section,
    n_to_quadratic, quadratic_to_n, torsion_identity_terms, weak_nijenhuis_cocycle_check, CubicHamiltonianData,
    GeneratorKind, QuadraticElement, WireCubic, WirePhiEntry,
};
use crate::error::Error;
use crate::leibniz::{
    classify_tensor, compatibility_pencil_check, cocycle_violation, point_courant_violation, square_commutes_check,
    torsion, twice_contracted_identity, LeibnizAlgebra, StructureConstants, TensorClass, TensorEndo,
};
use crate::linalg::Matrix;
use crate::poly::WirePoly;
use crate::random::Sampler;
use crate::rational::{WireRational, Q};
use crate::superalgebra::{pb, GradedContext, SuperPolynomial};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Io(String),
    Parse { offset: usize, line: usize, column: usize, message: String },
    Schema { path: String, message: String },
    UnknownCheck { name: String, subcommand: Subcommand, available: Vec<&'static str> },
}

impl CliError {
    fn schema(path: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Schema { path: path.into(), message: message.to_string() }
    }

    /// Every input error exits with 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "cannot read input: {m}"),
            CliError::Parse { offset, line, column, message } => {
                write!(f, "parse error at offset {offset} (line {line}, column {column}): {message}")
            }
            CliError::Schema { path, message } => write!(f, "schema error at {path}: {message}"),
            CliError::UnknownCheck { name, subcommand, available } => {
                write!(f, "unknown check {name:?} for {subcommand}; available: {}", available.join(", "))
            }
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DocumentKind {
    Leibniz,
    PointCourant,
    GenTangent,
    CubicHamiltonian,
}

impl DocumentKind {
    pub const ALL: [DocumentKind; 4] =
        [DocumentKind::Leibniz, DocumentKind::PointCourant, DocumentKind::GenTangent, DocumentKind::CubicHamiltonian];

    pub fn name(self) -> &'static str {
        match self {
            DocumentKind::Leibniz => "leibniz",
            DocumentKind::PointCourant => "point-courant",
            DocumentKind::GenTangent => "gen-tangent",
            DocumentKind::CubicHamiltonian => "cubic-hamiltonian",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subcommand {
    CheckLeibniz,
    ClassifyTensor,
    CheckCourant,
    Commutant,
    DerivedBracket,
    Homological,
    ClassifyGenerator,
    RoundtripPsi,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::CheckLeibniz,
        Subcommand::ClassifyTensor,
        Subcommand::CheckCourant,
        Subcommand::Commutant,
        Subcommand::DerivedBracket,
        Subcommand::Homological,
        Subcommand::ClassifyGenerator,
        Subcommand::RoundtripPsi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::CheckLeibniz => "check-leibniz",
            Subcommand::ClassifyTensor => "classify-tensor",
            Subcommand::CheckCourant => "check-courant",
            Subcommand::Commutant => "commutant",
            Subcommand::DerivedBracket => "derived-bracket",
            Subcommand::Homological => "homological",
            Subcommand::ClassifyGenerator => "classify-generator",
            Subcommand::RoundtripPsi => "roundtrip-psi",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Check names, in report order.
    pub fn checks(self) -> &'static [&'static str] {
        match self {
            Subcommand::CheckLeibniz => &["jacobi", "point-courant"],
            Subcommand::ClassifyTensor => {
                &["classify", "contracted-jacobi", "pencil", "square-commutes", "twice-contracted"]
            }
            Subcommand::CheckCourant => &[
                "axioms",
                "classify",
                "contracted-axioms",
                "delta",
                "jacobi",
                "proof-identities",
                "square-commutes",
                "torsion",
            ],
            Subcommand::Commutant => &["stage1", "stage2"],
            Subcommand::DerivedBracket => &["compatibility", "dorfman", "jacobi"],
            Subcommand::Homological => &["differential", "homological", "jacobi-agreement"],
            Subcommand::ClassifyGenerator => &["classify", "cocycle", "contracted", "torsion-identity"],
            Subcommand::RoundtripPsi => &["psi", "quadratic"],
        }
    }

    pub fn accepts(self, kind: DocumentKind) -> bool {
        use DocumentKind::*;
        match self {
            Subcommand::CheckLeibniz | Subcommand::ClassifyTensor => matches!(kind, Leibniz | PointCourant),
            Subcommand::CheckCourant | Subcommand::Commutant => kind == GenTangent,
            Subcommand::DerivedBracket | Subcommand::Homological | Subcommand::ClassifyGenerator => {
                matches!(kind, GenTangent | CubicHamiltonian)
            }
            Subcommand::RoundtripPsi => matches!(kind, PointCourant | CubicHamiltonian),
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DocumentOptions {
    pub degree_bound: Option<u32>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub checks: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct AlgebraPayload {
    pub algebra: LeibnizAlgebra,
    pub tensor: Option<TensorEndo>,
}

#[derive(Clone, Debug)]
pub struct TangentPayload {
    pub n: usize,
    pub endomorphism: Option<GenEndomorphism>,
    pub coeff_degree: u32,
}

#[derive(Clone, Debug)]
pub struct CubicPayload {
    pub data: CubicHamiltonianData,
    pub quadratic: Option<Matrix>,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Algebra(AlgebraPayload),
    Tangent(TangentPayload),
    Cubic(CubicPayload),
}

#[derive(Clone, Debug)]
pub struct SpecDocument {
    pub kind: DocumentKind,
    pub payload: Payload,
    pub options: DocumentOptions,
}

/// Typed access to the fields of one JSON object, tracking its pointer.
struct Fields<'a> {
    path: String,
    map: &'a Map<String, Value>,
    seen: BTreeSet<&'static str>,
}

impl<'a> Fields<'a> {
    fn new(value: &'a Value, path: &str) -> Result<Self, CliError> {
        let map = value.as_object().ok_or_else(|| CliError::schema(pointer(path), "expected an object"))?;
        Ok(Fields { path: path.to_string(), map, seen: BTreeSet::new() })
    }

    fn at(&self, key: &str) -> String {
        format!("{}/{}", self.path, key)
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.insert(key);
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn optional<T: DeserializeOwned>(&mut self, key: &'static str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => T::deserialize(v).map(Some).map_err(|e| CliError::schema(self.at(key), e)),
        }
    }

    fn required<T: DeserializeOwned>(&mut self, key: &'static str) -> Result<T, CliError> {
        self.optional(key)?.ok_or_else(|| CliError::schema(self.at(key), "missing required field"))
    }

    fn finish(self) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !self.seen.contains(key.as_str()) {
                return Err(CliError::schema(self.at(key), "unknown field"));
            }
        }
        Ok(())
    }
}

fn pointer(path: &str) -> String {
    if path.is_empty() {
        "/".into()
    } else {
        path.into()
    }
}

fn square_matrix(rows: Vec<Vec<WireRational>>, size: usize, path: &str) -> Result<Matrix, CliError> {
    if rows.len() != size {
        return Err(CliError::schema(path, format!("expected {size} rows, found {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != size {
            return Err(CliError::schema(format!("{path}/{i}"), format!("expected {size} entries, found {}", r.len())));
        }
    }
    Matrix::from_wire(&rows).map_err(|e| CliError::schema(path, e))
}

fn parse_algebra(value: &Value, require_metric: bool) -> Result<AlgebraPayload, CliError> {
    let mut f = Fields::new(value, "/payload")?;
    let dim: usize = f.required("dim")?;
    let constants: Vec<Vec<Vec<WireRational>>> = f.required("constants")?;
    let path = f.at("constants");
    if constants.len() != dim {
        return Err(CliError::schema(path, format!("expected {dim} entries, found {}", constants.len())));
    }
    let mut nested = Vec::with_capacity(dim);
    for (a, plane) in constants.into_iter().enumerate() {
        if plane.len() != dim {
            return Err(CliError::schema(format!("{path}/{a}"), format!("expected {dim} entries, found {}", plane.len())));
        }
        let mut rows = Vec::with_capacity(dim);
        for (b, row) in plane.into_iter().enumerate() {
            if row.len() != dim {
                return Err(CliError::schema(
                    format!("{path}/{a}/{b}"),
                    format!("expected {dim} entries, found {}", row.len()),
                ));
            }
            rows.push(row.into_iter().map(|w| w.0).collect());
        }
        nested.push(rows);
    }
    let constants = StructureConstants::from_nested(nested).map_err(|e| CliError::schema(path, e))?;
    let metric = match f.optional::<Vec<Vec<WireRational>>>("metric")? {
        None if require_metric => return Err(CliError::schema(f.at("metric"), "missing required field")),
        None => None,
        Some(rows) => Some(square_matrix(rows, dim, &f.at("metric"))?),
    };
    let tensor = match f.optional::<Vec<Vec<WireRational>>>("tensor")? {
        None => None,
        Some(rows) => {
            let m = square_matrix(rows, dim, &f.at("tensor"))?;
            Some(TensorEndo::new(m).map_err(|e| CliError::schema(f.at("tensor"), e))?)
        }
    };
    let algebra = match metric {
        None => LeibnizAlgebra::new(constants),
        Some(g) => LeibnizAlgebra::with_metric(constants, g).map_err(|e| CliError::schema(f.at("metric"), e))?,
    };
    f.finish()?;
    Ok(AlgebraPayload { algebra, tensor })
}

fn parse_tangent(value: &Value) -> Result<TangentPayload, CliError> {
    let mut f = Fields::new(value, "/payload")?;
    let n: usize = f.required("n")?;
    if n == 0 {
        return Err(CliError::schema(f.at("n"), "n must be at least 1"));
    }
    let coeff_degree: u32 = f.optional("coeff_degree")?.unwrap_or(courant::DEFAULT_DEGREE_BOUND);
    if coeff_degree == 0 {
        return Err(CliError::schema(f.at("coeff_degree"), "coeff_degree must be at least 1"));
    }
    let endomorphism = match f.optional::<WireEndomorphism>("endomorphism")? {
        None => None,
        Some(w) => Some(w.to_endomorphism(n).map_err(|(block, msg)| {
            let path = if block.is_empty() { f.at("endomorphism") } else { format!("{}/{}", f.at("endomorphism"), block) };
            CliError::schema(path, msg)
        })?),
    };
    f.finish()?;
    Ok(TangentPayload { n, endomorphism, coeff_degree })
}

fn parse_cubic(value: &Value) -> Result<CubicPayload, CliError> {
    let mut f = Fields::new(value, "/payload")?;
    let wire = WireCubic {
        n: f.required("n")?,
        m: f.required("m")?,
        g: f.required("g")?,
        rho: f.optional::<Vec<Vec<WirePoly>>>("rho")?,
        phi: f.optional::<Vec<WirePhiEntry>>("phi")?.unwrap_or_default(),
    };
    let quadratic = f.optional::<Vec<Vec<WireRational>>>("quadratic")?;
    let quad_path = f.at("quadratic");
    f.finish()?;
    let data = wire.to_data().map_err(|(path, msg)| CliError::schema(format!("/payload{path}"), msg))?;
    let quadratic = match quadratic {
        None => None,
        Some(rows) => Some(square_matrix(rows, wire.m, &quad_path)?),
    };
    Ok(CubicPayload { data, quadratic })
}

fn parse_error(text: &str, e: &serde_json::Error) -> CliError {
    let (line, column) = (e.line(), e.column());
    let offset = if line == 0 {
        0
    } else {
        let before: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
        (before + column.saturating_sub(1)).min(text.len())
    };
    let message = e.to_string();
    let message = message.split(" at line ").next().unwrap_or(&message).to_string();
    CliError::Parse { offset, line, column, message }
}

/// Parses and validates a document.
pub fn parse(bytes: &[u8]) -> Result<SpecDocument, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::Parse {
        offset: e.valid_up_to(),
        line: 0,
        column: 0,
        message: "input is not valid UTF-8".into(),
    })?;
    let value: Value = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
    parse_value(&value)
}

pub fn parse_value(value: &Value) -> Result<SpecDocument, CliError> {
    let mut root = Fields::new(value, "")?;
    let kind_name: String = root.required("kind")?;
    let kind = DocumentKind::from_name(&kind_name).ok_or_else(|| {
        let names: Vec<&str> = DocumentKind::ALL.iter().map(|k| k.name()).collect();
        CliError::schema("/kind", format!("unknown kind {kind_name:?}; expected one of {}", names.join(", ")))
    })?;
    let payload_value = root.raw("payload").ok_or_else(|| CliError::schema("/payload", "missing required field"))?;
    let payload = match kind {
        DocumentKind::Leibniz => Payload::Algebra(parse_algebra(payload_value, false)?),
        DocumentKind::PointCourant => Payload::Algebra(parse_algebra(payload_value, true)?),
        DocumentKind::GenTangent => Payload::Tangent(parse_tangent(payload_value)?),
        DocumentKind::CubicHamiltonian => Payload::Cubic(parse_cubic(payload_value)?),
    };
    let options = match root.raw("options") {
        None => DocumentOptions::default(),
        Some(v) => {
            let mut f = Fields::new(v, "/options")?;
            let options = DocumentOptions {
                degree_bound: f.optional("degree_bound")?,
                seed: f.optional("seed")?,
                trials: f.optional("trials")?,
                checks: f.optional("checks")?,
            };
            f.finish()?;
            options
        }
    };
    root.finish()?;
    Ok(SpecDocument { kind, payload, options })
}

/// Command-line values that take precedence over document options.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub degree_bound: Option<u32>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl CheckResult {
    fn new(name: &str, verdict: Verdict) -> Self {
        CheckResult { name: name.into(), verdict, details: BTreeMap::new(), witnesses: Vec::new(), timing_ms: None }
    }

    fn from_witnesses(name: &str, witnesses: Vec<Witness>) -> Self {
        let verdict = if witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
        CheckResult { witnesses, ..Self::new(name, verdict) }
    }

    fn skipped(name: &str, reason: impl fmt::Display) -> Self {
        Self::new(name, Verdict::Skipped).detail("reason", reason.to_string())
    }

    fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.into(), value.into());
        self
    }

    /// A failing verdict always carries a witness.
    fn fail_with(name: &str, witness: Witness) -> Self {
        Self::from_witnesses(name, vec![witness])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl Format {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "text" => Some(Format::Text),
            _ => None,
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) if !s.is_empty() && !s.contains(char::is_whitespace) && !s.contains('"') => s.clone(),
        other => other.to_string(),
    }
}

/// Renders a report; the output always ends in a newline.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            if report.checks.is_empty() {
                return "0 checks\n".into();
            }
            let mut out = String::new();
            for c in &report.checks {
                out.push_str(&format!("{} {}", c.verdict, c.name));
                for (k, v) in &c.details {
                    out.push_str(&format!(" {k}={}", text_value(v)));
                }
                if !c.witnesses.is_empty() {
                    out.push_str(&format!(" witnesses={}", serde_json::to_string(&c.witnesses).expect("witnesses serialize")));
                }
                if let Some(t) = c.timing_ms {
                    out.push_str(&format!(" time={t}ms"));
                }
                out.push('\n');
            }
            out
        }
    }
}

struct RunContext<'a> {
    doc: &'a SpecDocument,
    degree_bound: u32,
    seed: u64,
    trials: usize,
}

impl RunContext<'_> {
    fn sampler(&self, check: &str) -> Sampler {
        // one stream per check keeps results independent of which checks run
        let salt = check.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
        Sampler::new(self.seed ^ salt)
    }
}

fn rational_value(q: &Q) -> Value {
    Value::String(q.to_string())
}

fn vector_string(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(Q::to_string).collect();
    format!("({})", parts.join(", "))
}

fn basis_name(i: usize) -> String {
    format!("e{}", i + 1)
}

fn leibniz_residual(c: &StructureConstants, [a, b, d]: [usize; 3]) -> Vec<Q> {
    let dim = c.dim();
    let e = |i| crate::leibniz::unit(dim, i);
    let lhs = c.product(&c.basis_product(a, b), &e(d));
    let r1 = c.product(&e(a), &c.basis_product(b, d));
    let r2 = c.product(&e(b), &c.basis_product(a, d));
    lhs.iter().zip(r1.iter().zip(&r2)).map(|(l, (x, y))| l - x + y).collect()
}

fn leibniz_jacobi_witness(c: &StructureConstants, label: &str) -> Option<Witness> {
    c.jacobi_violation().map(|idx| {
        Witness::new(
            format!("{label}(X∘Y)∘Z = X∘(Y∘Z) − Y∘(X∘Z)"),
            idx.iter().map(|&i| basis_name(i)).collect(),
            vector_string(&leibniz_residual(c, idx)),
        )
    })
}

fn algebra_payload(doc: &SpecDocument) -> &AlgebraPayload {
    match &doc.payload {
        Payload::Algebra(p) => p,
        _ => unreachable!("subcommand accepts only algebra documents"),
    }
}

fn tangent_payload(doc: &SpecDocument) -> &TangentPayload {
    match &doc.payload {
        Payload::Tangent(p) => p,
        _ => unreachable!("subcommand accepts only gen-tangent documents"),
    }
}

fn run_check_leibniz(cx: &RunContext, name: &str) -> CheckResult {
    let p = algebra_payload(cx.doc);
    let l = &p.algebra;
    match name {
        "jacobi" => CheckResult::from_witnesses(name, leibniz_jacobi_witness(l.constants(), "").into_iter().collect()),
        "point-courant" => match point_courant_violation(l) {
            Err(_) => CheckResult::skipped(name, "no metric given"),
            Ok(None) => CheckResult::new(name, Verdict::Pass),
            Ok(Some(v)) => CheckResult::fail_with(
                name,
                Witness::new(v.identity, v.indices.iter().map(|&i| basis_name(i)).collect(), v.value),
            ),
        },
        _ => unreachable!(),
    }
}

fn class_value(c: TensorClass) -> Value {
    Value::String(c.to_string())
}

fn run_classify_tensor(cx: &RunContext, name: &str) -> Result<CheckResult, CliError> {
    let p = algebra_payload(cx.doc);
    let l = &p.algebra;
    let n = p.tensor.as_ref().ok_or_else(|| CliError::schema("/payload/tensor", "missing required field"))?;
    let report = classify_tensor(l, n).map_err(|e| CliError::schema("/payload/tensor", e))?;
    Ok(match name {
        "classify" => {
            let base = CheckResult::new(name, Verdict::Pass)
                .detail("class", class_value(report.classification))
                .detail("torsion_zero", report.torsion_zero)
                .detail("cocycle", report.cocycle);
            if report.classification == TensorClass::Neither {
                let tor = torsion(l, n).expect("validated");
                let idx = cocycle_violation(l, &tor).expect("neither means a cocycle violation");
                CheckResult {
                    verdict: Verdict::Fail,
                    witnesses: vec![Witness::new(
                        "torsion is a cocycle",
                        idx.iter().map(|&i| basis_name(i)).collect(),
                        "nonzero coboundary",
                    )],
                    ..base
                }
            } else {
                base
            }
        }
        "contracted-jacobi" => {
            if !report.cocycle {
                CheckResult::skipped(name, "torsion is not a cocycle")
            } else {
                let c = crate::leibniz::contracted_product(l, n).expect("validated");
                CheckResult::from_witnesses(name, leibniz_jacobi_witness(&c, "∘_N: ").into_iter().collect())
            }
        }
        "pencil" => {
            if report.classification == TensorClass::Neither {
                return Ok(CheckResult::skipped(name, "tensor is neither Nijenhuis nor weak Nijenhuis"));
            }
            let mut sampler = cx.sampler(name);
            let mut witnesses = Vec::new();
            for _ in 0..cx.trials {
                let lambda = sampler.nonzero_rational();
                if !compatibility_pencil_check(l, n, &lambda).expect("precondition checked") {
                    witnesses.push(Witness::new("∘_N + λ∘ is Leibniz", vec![format!("λ = {lambda}")], "Jacobi fails"));
                    break;
                }
            }
            CheckResult::from_witnesses(name, witnesses).detail("trials", cx.trials)
        }
        "square-commutes" => {
            let Some(g) = l.metric() else {
                return Ok(CheckResult::skipped(name, "no metric given"));
            };
            if let Some((a, c, v)) = derived::orthogonality_violation(n.matrix(), g) {
                return Ok(CheckResult::skipped(
                    name,
                    format!("tensor is not orthogonal: entry ({}, {}) is {v}", a + 1, c + 1),
                ));
            }
            if !report.torsion_zero {
                return Ok(CheckResult::skipped(name, "tensor has nonzero torsion"));
            }
            if square_commutes_check(l, n).expect("validated") {
                CheckResult::new(name, Verdict::Pass)
            } else {
                CheckResult::fail_with(name, Witness::new("X∘N²Y = N²(X∘Y)", vec![], "fails on a basis pair"))
            }
        }
        "twice-contracted" => {
            if twice_contracted_identity(l.constants(), n) {
                CheckResult::new(name, Verdict::Pass)
            } else {
                CheckResult::fail_with(
                    name,
                    Witness::new("X(∘_N)_N Y = 2Tor_N(X,Y) + X∘_{N²}Y", vec![], "fails on a basis pair"),
                )
            }
        }
        _ => unreachable!(),
    })
}

fn run_check_courant(cx: &RunContext, name: &str) -> CheckResult {
    let p = tangent_payload(cx.doc);
    let (n, d) = (p.n, cx.degree_bound);
    let needs_tensor = |f: &dyn Fn(&GenEndomorphism) -> CheckResult| match &p.endomorphism {
        None => CheckResult::skipped(name, "no endomorphism given"),
        Some(t) => f(t),
    };
    match name {
        "axioms" => CheckResult::from_witnesses(name, dorfman_axiom_violations(n, d)),
        "jacobi" => CheckResult::from_witnesses(name, dorfman_jacobi_violation(n, d).into_iter().collect()),
        "proof-identities" => {
            let report = proof_identities(n, d);
            let total: usize = report.instances.values().sum();
            CheckResult::from_witnesses(name, report.witnesses).detail("instances", total)
        }
        "delta" => needs_tensor(&|t| {
            let delta = t.add(&t.adjoint());
            let c = delta_conditions(&delta, d);
            CheckResult::from_witnesses(name, c.witnesses)
                .detail("commutes_with_left_multiplication", c.commutes_with_left_multiplication)
                .detail("square_condition", c.square_condition)
        }),
        "torsion" => needs_tensor(&|t| CheckResult::from_witnesses(name, torsion_violation(t, d).into_iter().collect())),
        "contracted-axioms" => needs_tensor(&|t| {
            let mut w = contracted_axiom_violations(t, d);
            w.extend(contracted_anchor_violation(t, d));
            CheckResult::from_witnesses(name, w)
        }),
        "classify" => needs_tensor(&|t| {
            let c = classify_courant_tensor(t, d);
            let opt = |q: &Option<Q>| q.as_ref().map(rational_value).unwrap_or(Value::Null);
            let base = CheckResult::from_witnesses(name, c.witnesses.clone())
                .detail("kind", c.kind.to_string())
                .detail("lambda", opt(&c.lambda))
                .detail("gamma", opt(&c.gamma))
                .detail("shifted_square", opt(&c.shifted_square));
            if c.kind == CourantKind::None && base.witnesses.is_empty() {
                CheckResult { verdict: Verdict::Fail, ..base }
            } else {
                base
            }
        }),
        "square-commutes" => needs_tensor(&|t| match theorem4_check(t, d) {
            Ok(true) => CheckResult::new(name, Verdict::Pass),
            Ok(false) => {
                let sq = t.compose(t);
                CheckResult::from_witnesses(name, delta_conditions(&sq, d).witnesses)
            }
            Err(Error::Precondition(m)) => CheckResult::skipped(name, format!("precondition: {m}")),
            Err(e) => CheckResult::skipped(name, e),
        }),
        _ => unreachable!(),
    }
}

fn run_commutant(cx: &RunContext, name: &str) -> CheckResult {
    let p = tangent_payload(cx.doc);
    let n = p.n;
    let (stage, expected) = match name {
        "stage1" => (
            CommutantStage::LeftMultiplication,
            vec![GenEndomorphism::diag_blocks(n, crate::rational::one(), Q::from_integer(0.into())), GenEndomorphism::diag_blocks(n, Q::from_integer(0.into()), crate::rational::one())],
        ),
        "stage2" => (CommutantStage::WithSquare, vec![GenEndomorphism::identity(n)]),
        _ => unreachable!(),
    };
    let sol = commutant_solve(n, p.coeff_degree, cx.degree_bound, stage);
    let basis: Vec<Value> = sol.basis.iter().map(|b| Value::String(b.to_string())).collect();
    let spans = sol.dimension() == expected.len() && expected.iter().all(|e| in_span(&sol.basis, e));
    let base = CheckResult::new(name, Verdict::Pass)
        .detail("stage", stage.to_string())
        .detail("dimension", sol.dimension())
        .detail("expected_dimension", expected.len())
        .detail("unknowns", sol.unknowns)
        .detail("equations", sol.equations)
        .detail("rank", sol.rank)
        .detail("basis", Value::Array(basis));
    if spans {
        base
    } else {
        let expected_names: Vec<String> = expected.iter().map(|e| e.to_string()).collect();
        CheckResult {
            verdict: Verdict::Fail,
            witnesses: vec![Witness::new(
                "solution space is spanned by the expected tensors",
                expected_names,
                format!("dimension {}", sol.dimension()),
            )],
            ..base
        }
    }
}

/// Ψ and, for the tangent chart, whether it is the canonical one.
fn psi_of(doc: &SpecDocument) -> (SuperPolynomial, Option<usize>) {
    match &doc.payload {
        Payload::Tangent(p) => (canonical_psi(p.n), Some(p.n)),
        Payload::Cubic(p) => {
            let psi = build_psi(&p.data);
            let ctx = p.data.context();
            let n = ctx.n();
            let canonical = (ctx.m() == 2 * n && n > 0 && psi == canonical_psi(n)).then_some(n);
            (psi, canonical)
        }
        Payload::Algebra(_) => unreachable!("subcommand accepts only graded documents"),
    }
}

fn run_derived_bracket(cx: &RunContext, name: &str) -> CheckResult {
    let (psi, canonical) = psi_of(cx.doc);
    let d = cx.degree_bound;
    match name {
        "compatibility" => CheckResult::from_witnesses(name, derived_axiom_violations(&psi, d).expect("degree 3")),
        "jacobi" => CheckResult::from_witnesses(name, derived_jacobi_violation(&psi, d).expect("degree 3").into_iter().collect()),
        "dorfman" => {
            let Some(n) = canonical else {
                return CheckResult::skipped(name, "not the canonical cubic of the tangent chart");
            };
            let ctx = psi.context().clone();
            let gens = generating_set(n, d);
            let lifts: Vec<SuperPolynomial> = gens.iter().map(|s| lift_section(&ctx, s).expect("tangent chart")).collect();
            for (a, la) in gens.iter().zip(&lifts) {
                for (b, lb) in gens.iter().zip(&lifts) {
                    let got = derived::derived_bracket(&psi, la, lb).expect("degrees checked");
                    let expected = lift_section(&ctx, &courant::dorfman(a, b).expect("same n")).expect("tangent chart");
                    if got != expected {
                        return CheckResult::fail_with(
                            name,
                            Witness::new("{{X,Ψ},Y} = lift(X∘Y)", vec![a.to_string(), b.to_string()], &got - &expected),
                        );
                    }
                }
            }
            CheckResult::new(name, Verdict::Pass).detail("pairs", gens.len() * gens.len())
        }
        _ => unreachable!(),
    }
}

fn run_homological(cx: &RunContext, name: &str) -> CheckResult {
    let (psi, _) = psi_of(cx.doc);
    let homological = homological_check(&psi).expect("degree 3");
    match name {
        "homological" => {
            if homological {
                CheckResult::new(name, Verdict::Pass)
            } else {
                CheckResult::fail_with(name, Witness::new("{Ψ,Ψ} = 0", vec![psi.to_string()], pb(&psi, &psi)))
            }
        }
        "jacobi-agreement" => {
            let violation = derived_jacobi_violation(&psi, cx.degree_bound).expect("degree 3");
            let base = CheckResult::new(name, Verdict::Pass)
                .detail("homological", homological)
                .detail("jacobi", violation.is_none());
            if homological == violation.is_none() {
                base
            } else {
                let w = violation.unwrap_or_else(|| Witness::new("{Ψ,Ψ} = 0", vec![psi.to_string()], pb(&psi, &psi)));
                CheckResult { verdict: Verdict::Fail, witnesses: vec![w], ..base }
            }
        }
        "differential" => {
            if !homological {
                return CheckResult::skipped(name, "Ψ is not homological");
            }
            let mut sampler = cx.sampler(name);
            let ctx = psi.context().clone();
            for t in 0..cx.trials {
                let degree = (t % 4) as u32;
                let f = sampler.homogeneous(&ctx, degree, 3);
                if !derived::differential_check(&psi, &f).expect("degree 3") {
                    return CheckResult::fail_with(
                        name,
                        Witness::new("{Ψ,{Ψ,F}} = 0", vec![f.to_string()], pb(&psi, &pb(&psi, &f))),
                    );
                }
            }
            CheckResult::new(name, Verdict::Pass).detail("trials", cx.trials)
        }
        _ => unreachable!(),
    }
}

fn quadratic_of(doc: &SpecDocument, ctx: &Arc<GradedContext>) -> Result<QuadraticElement, CliError> {
    let (matrix, path) = match &doc.payload {
        Payload::Tangent(p) => {
            let t = p.endomorphism.as_ref().ok_or_else(|| CliError::schema("/payload/endomorphism", "missing required field"))?;
            let m = t
                .as_constant_matrix()
                .ok_or_else(|| CliError::schema("/payload/endomorphism", "entries must be constant"))?;
            (m, "/payload/endomorphism")
        }
        Payload::Cubic(p) => {
            (p.quadratic.clone().ok_or_else(|| CliError::schema("/payload/quadratic", "missing required field"))?, "/payload/quadratic")
        }
        Payload::Algebra(_) => unreachable!(),
    };
    n_to_quadratic(&matrix, ctx).map_err(|e| match e {
        Error::NotOrthogonal { a, c, value } => {
            CliError::schema(path, format!("not orthogonal: (NᵀG + GN) at ({}, {}) is {value}", a + 1, c + 1))
        }
        other => CliError::schema(path, other),
    })
}

fn run_classify_generator(cx: &RunContext, name: &str) -> Result<CheckResult, CliError> {
    let (psi, _) = psi_of(cx.doc);
    let ctx = psi.context().clone();
    let quad = quadratic_of(cx.doc, &ctx)?;
    let homological = homological_check(&psi).expect("degree 3");
    let d = cx.degree_bound;
    Ok(match name {
        "classify" => {
            let kind = double_bracket_classify(&psi, &quad).expect("degrees checked");
            let base = CheckResult::new(name, Verdict::Pass).detail("kind", kind.to_string());
            if kind == GeneratorKind::Other {
                let dd = derived::double_bracket(&psi, &quad).expect("degrees checked");
                CheckResult {
                    verdict: Verdict::Fail,
                    witnesses: vec![Witness::new("{{Ψ,Q},Q} ∈ {−Ψ, Ψ, 0}", vec![quad.to_string()], dd)],
                    ..base
                }
            } else {
                base
            }
        }
        "cocycle" => {
            if !homological {
                return Ok(CheckResult::skipped(name, "Ψ is not homological"));
            }
            if weak_nijenhuis_cocycle_check(&psi, &quad).expect("homological") {
                CheckResult::new(name, Verdict::Pass)
            } else {
                let dd = derived::double_bracket(&psi, &quad).expect("degrees checked");
                CheckResult::fail_with(name, Witness::new("{Ψ,{{Ψ,Q},Q}} = 0", vec![quad.to_string()], pb(&psi, &dd)))
            }
        }
        "torsion-identity" => {
            if !homological {
                return Ok(CheckResult::skipped(name, "Ψ is not homological"));
            }
            let gens = generating_lifts(&ctx, d);
            for x in &gens {
                for y in &gens {
                    let t = torsion_identity_terms(&psi, &quad, x, y).expect("degrees checked");
                    if !t.holds() {
                        let residual = &(&t.twice_contracted - &t.torsion.scale(&Q::from_integer(2.into()))) - &t.square_contracted;
                        return Ok(CheckResult::fail_with(
                            name,
                            Witness::new("X(∘_N)_N Y = 2Tor_N(X,Y) + X∘_{N²}Y", vec![x.to_string(), y.to_string()], residual),
                        ));
                    }
                }
            }
            CheckResult::new(name, Verdict::Pass).detail("pairs", gens.len() * gens.len())
        }
        "contracted" => {
            let psi_n = derived::contracted_generator(&psi, &quad).expect("degrees checked");
            let gens = generating_lifts(&ctx, d);
            let prod = |a: &SuperPolynomial, b: &SuperPolynomial| pb(&pb(a, &psi), b);
            let n = |a: &SuperPolynomial| quad.act(a).expect("same context");
            for x in &gens {
                for y in &gens {
                    let expected = &(&prod(&n(x), y) + &prod(x, &n(y))) - &n(&prod(x, y));
                    let got = pb(&pb(x, &psi_n), y);
                    if got != expected {
                        return Ok(CheckResult::fail_with(
                            name,
                            Witness::new("{{X,{Ψ,Q}},Y} = X∘_N Y", vec![x.to_string(), y.to_string()], &got - &expected),
                        ));
                    }
                }
            }
            CheckResult::new(name, Verdict::Pass).detail("pairs", gens.len() * gens.len())
        }
        _ => unreachable!(),
    })
}

fn run_roundtrip(cx: &RunContext, name: &str) -> CheckResult {
    match (&cx.doc.payload, name) {
        (Payload::Algebra(p), "psi") => {
            let l = &p.algebra;
            let g = l.metric().expect("point-courant documents carry a metric").clone();
            let ctx = GradedContext::new(0, g).expect("validated metric");
            let data = match CubicHamiltonianData::from_structure_constants(&ctx, l.constants()) {
                Ok(d) => d,
                Err(e) => {
                    return CheckResult::fail_with(name, Witness::new("<e_a∘e_b, e_c> totally antisymmetric", vec![], e));
                }
            };
            let psi = build_psi(&data);
            let back = derived_structure_constants(&psi).expect("constant data");
            if &back == l.constants() {
                CheckResult::new(name, Verdict::Pass).detail("psi", psi.to_string())
            } else {
                CheckResult::fail_with(name, Witness::new("constants → Ψ → constants", vec![psi.to_string()], "differs"))
            }
        }
        (Payload::Cubic(p), "psi") => {
            let psi = build_psi(&p.data);
            let back = data_from_psi(&psi).expect("built by build_psi");
            let again = build_psi(&back);
            let same = back.rho() == p.data.rho() && back.phi_entries().eq(p.data.phi_entries()) && again == psi;
            if same {
                CheckResult::new(name, Verdict::Pass).detail("psi", psi.to_string())
            } else {
                CheckResult::fail_with(name, Witness::new("data → Ψ → data", vec![psi.to_string()], &again - &psi))
            }
        }
        (payload, "quadratic") => {
            let (matrix, ctx) = match payload {
                Payload::Algebra(p) => match (&p.tensor, p.algebra.metric()) {
                    (Some(t), Some(g)) => (t.matrix().clone(), GradedContext::new(0, g.clone()).expect("validated metric")),
                    _ => return CheckResult::skipped(name, "no tensor given"),
                },
                Payload::Cubic(p) => match &p.quadratic {
                    Some(m) => (m.clone(), p.data.context().clone()),
                    None => return CheckResult::skipped(name, "no quadratic given"),
                },
                Payload::Tangent(_) => unreachable!(),
            };
            match n_to_quadratic(&matrix, &ctx) {
                Err(e) => CheckResult::fail_with(name, Witness::new("N is orthogonal", vec![matrix.to_string()], e)),
                Ok(quad) => {
                    let back = quadratic_to_n(&quad).expect("constant coefficients");
                    if back == matrix {
                        CheckResult::new(name, Verdict::Pass).detail("quadratic", quad.to_string())
                    } else {
                        CheckResult::fail_with(name, Witness::new("N → Q → N", vec![matrix.to_string()], back))
                    }
                }
            }
        }
        _ => unreachable!(),
    }
}

/// Runs the requested checks of `subcommand` (all of them when the
/// document names none) and returns the report sorted by check name.
pub fn run(subcommand: Subcommand, doc: &SpecDocument, overrides: &Overrides) -> Result<Report, CliError> {
    if !subcommand.accepts(doc.kind) {
        let kinds: Vec<&str> = DocumentKind::ALL.iter().filter(|k| subcommand.accepts(**k)).map(|k| k.name()).collect();
        return Err(CliError::schema(
            "/kind",
            format!("{subcommand} does not accept {} documents; expected {}", doc.kind, kinds.join(" or ")),
        ));
    }
    let available = subcommand.checks();
    let requested: Vec<&'static str> = match &doc.options.checks {
        None => available.to_vec(),
        Some(names) => {
            let mut out = BTreeSet::new();
            for n in names {
                let found = available.iter().find(|a| **a == n.as_str()).ok_or_else(|| CliError::UnknownCheck {
                    name: n.clone(),
                    subcommand,
                    available: available.to_vec(),
                })?;
                out.insert(*found);
            }
            out.into_iter().collect()
        }
    };
    let cx = RunContext {
        doc,
        degree_bound: overrides.degree_bound.or(doc.options.degree_bound).unwrap_or(courant::DEFAULT_DEGREE_BOUND),
        seed: overrides.seed.or(doc.options.seed).unwrap_or(DEFAULT_SEED),
        trials: overrides.trials.or(doc.options.trials).unwrap_or(DEFAULT_TRIALS),
    };
    let mut checks = Vec::new();
    for name in requested {
        let start = Instant::now();
        let mut result = match subcommand {
            Subcommand::CheckLeibniz => run_check_leibniz(&cx, name),
            Subcommand::ClassifyTensor => run_classify_tensor(&cx, name)?,
            Subcommand::CheckCourant => run_check_courant(&cx, name),
            Subcommand::Commutant => run_commutant(&cx, name),
            Subcommand::DerivedBracket => run_derived_bracket(&cx, name),
            Subcommand::Homological => run_homological(&cx, name),
            Subcommand::ClassifyGenerator => run_classify_generator(&cx, name)?,
            Subcommand::RoundtripPsi => run_roundtrip(&cx, name),
        };
        if overrides.timing {
            result.timing_ms = Some(start.elapsed().as_millis() as u64);
        }
        checks.push(result);
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report { checks })
}

/// Parses, runs and renders; returns the output and the exit code.
pub fn execute(subcommand: Subcommand, input: &[u8], format: Format, overrides: &Overrides) -> (String, i32) {
    match parse(input).and_then(|doc| run(subcommand, &doc, overrides)) {
        Ok(report) => (render(&report, format), report.exit_code()),
        Err(e) => (format!("error: {e}\n"), e.exit_code()),
    }
}
