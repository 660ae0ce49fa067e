//! Job documents, dispatch and report assembly for the `qdiff` binary.
//!
//! A job is either a line `<command> <input>` or a JSON object
//! `{"command": ..., "input": ..., "options": {...}}`. Inputs are strings in
//! the rational-function grammar or JSON values (hypergeometric parameter
//! documents, operator coefficient lists, matrices).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use qdiff::citations;
use qdiff::error::{Error, Result};
use qdiff::hypergeom::{build_operator, classify, HypergeometricSpec};
use qdiff::isomono::{search_discrete, search_telescoper, TelescoperMode, TelescoperQuery};
use qdiff::matrix::MatrixOverRat;
use qdiff::newton::{iterate_system, newton_polygon, puiseux_solve};
use qdiff::operator::OperatorSpec;
use qdiff::parse::{parse_expvec, parse_factored, parse_qscalar, parse_zratfun};
use qdiff::qdivisor::{classify_rank_one, div_q, divq_twisted_product, solve_b};
use qdiff::ratfun::{FactoredRat, ZRatFun};
use qdiff::scalars::{Exponent, ExponentVector};
use qdiff::series::{effective_lambda, nphi_s, verify_series};

pub const DEFAULT_ORDER: usize = 30;
pub const DEFAULT_D_MAX: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Divq,
    SolveB,
    RankOne,
    Classify,
    Newton,
    SolveSeries,
    Series,
    Verify,
    Telescoper,
    Iterate,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Divq,
        Command::SolveB,
        Command::RankOne,
        Command::Classify,
        Command::Newton,
        Command::SolveSeries,
        Command::Series,
        Command::Verify,
        Command::Telescoper,
        Command::Iterate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Divq => "divq",
            Command::SolveB => "solve-b",
            Command::RankOne => "rank-one",
            Command::Classify => "classify",
            Command::Newton => "newton",
            Command::SolveSeries => "solve-series",
            Command::Series => "series",
            Command::Verify => "verify",
            Command::Telescoper => "telescoper",
            Command::Iterate => "iterate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Command> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown command `{s}`")))
    }
}

/// Validated command input.
#[derive(Clone, Debug)]
pub enum Payload {
    Rational(FactoredRat),
    Spec(HypergeometricSpec),
    Operator(OperatorSpec),
    Matrix(MatrixOverRat),
}

#[derive(Clone, Debug)]
pub struct JobDocument {
    pub command: Command,
    pub payload: Payload,
    pub options: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Command,
    pub input: Value,
    pub result: Value,
    pub citations: Vec<&'static str>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let cites: Vec<Value> = self
            .citations
            .iter()
            .map(|id| {
                let c = citations::lookup(id);
                json!({"id": c.id, "summary": c.summary})
            })
            .collect();
        json!({
            "command": self.command.name(),
            "input": self.input,
            "result": self.result,
            "citations": cites,
            "warnings": self.warnings,
        })
    }
}

/// Structured error object; `command` is absent when parsing failed early.
pub fn error_json(command: Option<Command>, err: &Error) -> Value {
    let mut e = Map::new();
    e.insert("kind".into(), json!(err.kind()));
    e.insert("message".into(), json!(err.to_string()));
    if let Error::Parse {
        line,
        column,
        expected,
    } = err
    {
        e.insert("line".into(), json!(line));
        e.insert("column".into(), json!(column));
        e.insert("expected".into(), json!(expected));
    }
    json!({"command": command.map(Command::name), "error": Value::Object(e)})
}

fn json_parse_error(err: &serde_json::Error) -> Error {
    Error::Parse {
        line: err.line(),
        column: err.column(),
        expected: "a JSON value".into(),
    }
}

fn as_text(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Invalid(format!("{what} must be a string"))),
    }
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("{what} must be an array")))
}

fn parse_spec(obj: &Map<String, Value>) -> Result<HypergeometricSpec> {
    let list = |key: &str| -> Result<Vec<ExponentVector>> {
        match obj.get(key) {
            None => Ok(Vec::new()),
            Some(v) => as_array(v, key)?
                .iter()
                .map(|x| parse_expvec(&as_text(x, key)?))
                .collect(),
        }
    };
    let alphas = list("alphas")?;
    let betas = list("betas")?;
    let lambda = match obj.get("lambda") {
        None => parse_qscalar("1")?,
        Some(v) => parse_qscalar(&as_text(v, "lambda")?)?,
    };
    for (key, len) in [("n", alphas.len()), ("s", betas.len())] {
        if let Some(v) = obj.get(key) {
            if v.as_u64() != Some(len as u64) {
                return Err(Error::Invalid(format!(
                    "`{key}` = {v} does not match the parameter list length {len}"
                )));
            }
        }
    }
    for key in obj.keys() {
        if !["n", "s", "alphas", "betas", "lambda"].contains(&key.as_str()) {
            return Err(Error::Invalid(format!(
                "unknown field `{key}` in parameter document"
            )));
        }
    }
    HypergeometricSpec::new(alphas, betas, lambda)
}

fn parse_operator(v: &Value) -> Result<OperatorSpec> {
    match v {
        Value::Array(items) => {
            let coeffs: Vec<ZRatFun> = items
                .iter()
                .map(|x| parse_zratfun(&as_text(x, "operator coefficient")?))
                .collect::<Result<_>>()?;
            Ok(OperatorSpec::from_rational(&coeffs))
        }
        Value::Object(obj) if obj.contains_key("alphas") => build_operator(&parse_spec(obj)?),
        _ => Err(Error::Invalid(
            "an operator is a list of coefficients a_0..a_n or a parameter document".into(),
        )),
    }
}

fn parse_matrix(v: &Value) -> Result<MatrixOverRat> {
    match v {
        Value::Array(rows) if rows.iter().all(Value::is_array) && !rows.is_empty() => {
            let rows: Vec<Vec<ZRatFun>> = rows
                .iter()
                .map(|r| {
                    as_array(r, "matrix row")?
                        .iter()
                        .map(|x| parse_zratfun(&as_text(x, "matrix entry")?))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            MatrixOverRat::from_rows(rows)
        }
        _ => MatrixOverRat::companion(&parse_operator(v)?),
    }
}

fn input_value(text: &str) -> Result<Value> {
    let t = text.trim();
    if t.starts_with('{') || t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| json_parse_error(&e))
    } else if let Some(inner) = t.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        Ok(Value::String(inner.to_string()))
    } else {
        Ok(Value::String(t.to_string()))
    }
}

pub fn parse_payload(command: Command, input: &Value) -> Result<Payload> {
    match command {
        Command::Divq | Command::SolveB | Command::RankOne => {
            Ok(Payload::Rational(parse_factored(&as_text(input, "input")?)?))
        }
        Command::Classify | Command::Series | Command::Verify => match input {
            Value::Object(obj) => Ok(Payload::Spec(parse_spec(obj)?)),
            _ => Err(Error::Invalid(format!(
                "`{command}` expects a parameter document {{\"alphas\": [...], \"betas\": [...], \"lambda\": ...}}"
            ))),
        },
        Command::Newton | Command::SolveSeries => Ok(Payload::Operator(parse_operator(input)?)),
        Command::Telescoper | Command::Iterate => Ok(Payload::Matrix(parse_matrix(input)?)),
    }
}

/// Builds a document from a command name, an input text and option flags.
pub fn build_document(
    command: &str,
    input: &str,
    options: BTreeMap<String, String>,
) -> Result<JobDocument> {
    let command: Command = command.parse()?;
    let payload = parse_payload(command, &input_value(input)?)?;
    Ok(JobDocument {
        command,
        payload,
        options,
    })
}

/// Parses `<command> <input>` or a JSON job object.
pub fn parse_input(text: &str) -> Result<JobDocument> {
    let t = text.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| json_parse_error(&e))?;
        let obj = v.as_object().expect("object");
        let command = obj
            .get("command")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Invalid("job document needs a `command` string".into()))?;
        let command: Command = command.parse()?;
        let input = obj
            .get("input")
            .ok_or_else(|| Error::Invalid("job document needs an `input`".into()))?;
        let mut options = BTreeMap::new();
        if let Some(opts) = obj.get("options") {
            let opts = opts
                .as_object()
                .ok_or_else(|| Error::Invalid("`options` must be an object".into()))?;
            for (k, v) in opts {
                options.insert(k.clone(), as_text(v, k)?);
            }
        }
        return Ok(JobDocument {
            command,
            payload: parse_payload(command, input)?,
            options,
        });
    }
    let (command, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
    build_document(command, rest, BTreeMap::new())
}

fn option<T: FromStr>(doc: &JobDocument, key: &str) -> Result<Option<T>> {
    doc.options
        .get(key)
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| Error::Invalid(format!("option `{key}` has invalid value `{v}`")))
        })
        .transpose()
}

fn order_option(doc: &JobDocument) -> Result<usize> {
    Ok(option(doc, "order")?.unwrap_or(DEFAULT_ORDER))
}

fn exponent_option(doc: &JobDocument, key: &str, default: usize) -> Result<Exponent> {
    match doc.options.get(key) {
        None => Ok(Exponent::from_int(default as i64)),
        Some(v) => parse_expvec(v)?
            .as_exponent()
            .ok_or_else(|| Error::Invalid(format!("option `{key}` must be rational"))),
    }
}

fn twist_option(doc: &JobDocument) -> Result<Option<Vec<i64>>> {
    let Some(v) = doc.options.get("twist") else {
        return Ok(None);
    };
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("twist exponents must be integers, got `{x}`")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn spec_echo(spec: &HypergeometricSpec) -> Value {
    json!({
        "n": spec.n,
        "s": spec.s,
        "alphas": spec.alphas.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "betas": spec.betas.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "lambda": spec.lambda.to_string(),
    })
}

/// Canonical printed form of a payload; parsing it back yields the same job.
pub fn payload_echo(p: &Payload) -> Value {
    match p {
        Payload::Rational(f) => json!(f.to_string()),
        Payload::Spec(s) => spec_echo(s),
        Payload::Operator(op) => to_value(op),
        Payload::Matrix(m) => to_value(m),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

const FORMAL_ONLY: &str = "formal solution only: convergence of the series is not certified";
const ANALYTIC: &str =
    "the analytic hypothesis 0 < |q| < 1 is assumed, not checked; q is a formal symbol";

fn rational_payload(doc: &JobDocument) -> &FactoredRat {
    match &doc.payload {
        Payload::Rational(f) => f,
        _ => unreachable!("validated by parse_payload"),
    }
}

fn spec_payload(doc: &JobDocument) -> &HypergeometricSpec {
    match &doc.payload {
        Payload::Spec(s) => s,
        _ => unreachable!("validated by parse_payload"),
    }
}

fn operator_payload(doc: &JobDocument) -> &OperatorSpec {
    match &doc.payload {
        Payload::Operator(o) => o,
        _ => unreachable!("validated by parse_payload"),
    }
}

fn matrix_payload(doc: &JobDocument) -> &MatrixOverRat {
    match &doc.payload {
        Payload::Matrix(m) => m,
        _ => unreachable!("validated by parse_payload"),
    }
}

pub fn run(doc: &JobDocument) -> Result<Report> {
    let mut citations: Vec<&'static str> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let result = match doc.command {
        Command::Divq => {
            let f = rational_payload(doc);
            citations.push("qdiv.trivial");
            let mut out = Map::new();
            let d = div_q(f);
            out.insert("trivial".into(), json!(d.is_zero()));
            out.insert("divisor".into(), to_value(&d));
            out.insert(
                "witness".into(),
                if d.is_zero() {
                    to_value(&solve_b(f)?)
                } else {
                    Value::Null
                },
            );
            if let Some(k) = twist_option(doc)? {
                let t = divq_twisted_product(f, &k);
                citations.push("qdiv.twisted-product");
                out.insert(
                    "twisted_product".into(),
                    json!({"exponents": k, "divisor": to_value(&t), "trivial": t.is_zero()}),
                );
            }
            Value::Object(out)
        }
        Command::SolveB => {
            let f = rational_payload(doc);
            citations.push("qdiv.trivial");
            let w = solve_b(f)?;
            json!({"witness": to_value(&w), "verified": w.verify(f)})
        }
        Command::RankOne => {
            citations.extend(["rank-one.classification", "qdiv.trivial"]);
            warnings.push(ANALYTIC.into());
            to_value(&classify_rank_one(rational_payload(doc)))
        }
        Command::Classify => {
            let v = classify(spec_payload(doc))?;
            citations.extend(v.citation_ids());
            warnings.push(ANALYTIC.into());
            to_value(&v)
        }
        Command::Newton => {
            citations.push("newton.ramification");
            to_value(&newton_polygon(operator_payload(doc))?)
        }
        Command::SolveSeries => {
            let op = operator_payload(doc);
            let order = exponent_option(doc, "order", DEFAULT_ORDER)?;
            let slope: Option<usize> = option(doc, "slope_index")?;
            let polygon = newton_polygon(op)?;
            let sol = puiseux_solve(op, &order, slope)?;
            citations.extend(["newton.ramification", "newton.formal-solution"]);
            warnings.push(FORMAL_ONLY.into());
            json!({"polygon": to_value(&polygon), "solution": to_value(&sol)})
        }
        Command::Series => {
            let spec = spec_payload(doc);
            let order = order_option(doc)?;
            let y = nphi_s(spec, order)?;
            citations.push("hyper.series");
            let lambda = effective_lambda(spec);
            if lambda != spec.lambda {
                warnings.push(format!(
                    "n - s is odd: the coefficients use (-1)^(n-s) lambda = {lambda} so that the series solves the operator"
                ));
            }
            let coefficients: Vec<Value> = y
                .terms()
                .iter()
                .map(|(e, c)| json!({"m": e.to_string(), "coefficient": c.to_string()}))
                .collect();
            json!({"order": order, "effective_lambda": lambda.to_string(), "coefficients": coefficients})
        }
        Command::Verify => {
            let spec = spec_payload(doc);
            let order = order_option(doc)?;
            let a = verify_series(spec, order)?;
            citations.push("hyper.series");
            json!({
                "order": order,
                "residual_valuation": a.valuation.to_string(),
                "known_to": a.known_to.to_string(),
                "annihilated": a.residual.is_zero(),
            })
        }
        Command::Telescoper => {
            let a = matrix_payload(doc);
            let bound: Option<u32> = option(doc, "bound")?;
            let mode = doc.options.get("mode").map_or("continuous", String::as_str);
            warnings.push("searches run over the rational model; descent from an extended constant field is not modeled".into());
            match mode {
                "continuous" => {
                    citations.extend(["telescoper.continuous", "telescoper.none-for-classical"]);
                    let q = TelescoperQuery::new(
                        a.clone(),
                        TelescoperMode::ContinuousProjective,
                        bound,
                    )?;
                    let r = search_telescoper(&q)?;
                    if !r.found {
                        warnings.push(r.label.clone());
                    }
                    json!({"searches": [to_value(&r)], "found": r.found})
                }
                "discrete" => {
                    citations.push("telescoper.discrete");
                    let results = match option::<u32>(doc, "d")? {
                        Some(d) => {
                            let q = TelescoperQuery::new(
                                a.clone(),
                                TelescoperMode::Discrete(d),
                                bound,
                            )?;
                            vec![search_telescoper(&q)?]
                        }
                        None => search_discrete(
                            a,
                            option(doc, "d_max")?.unwrap_or(DEFAULT_D_MAX),
                            bound,
                        )?,
                    };
                    let found = results.iter().any(|r| r.found);
                    for r in results.iter().filter(|r| !r.found) {
                        warnings.push(format!("d = {}: {}", mode_d(r.mode), r.label));
                    }
                    json!({"searches": to_value(&results), "found": found})
                }
                other => {
                    return Err(Error::Invalid(format!(
                        "mode must be `continuous` or `discrete`, got `{other}`"
                    )))
                }
            }
        }
        Command::Iterate => {
            let a = matrix_payload(doc);
            let l: u32 = option(doc, "l")?.unwrap_or(1);
            citations.push("newton.iterated-system");
            json!({"l": l, "matrix": to_value(&iterate_system(a, l)?)})
        }
    };
    Ok(Report {
        command: doc.command,
        input: payload_echo(&doc.payload),
        result,
        citations,
        warnings,
    })
}

fn mode_d(m: TelescoperMode) -> u32 {
    match m {
        TelescoperMode::Discrete(d) => d,
        TelescoperMode::ContinuousProjective => 0,
    }
}

/// Runs one job text end to end: `(json, ok)`.
pub fn run_text(text: &str) -> (Value, bool) {
    match parse_input(text) {
        Err(e) => (error_json(None, &e), false),
        Ok(doc) => run_document(&doc),
    }
}

pub fn run_document(doc: &JobDocument) -> (Value, bool) {
    match run(doc) {
        Ok(r) => (r.to_json(), true),
        Err(e) => (error_json(Some(doc.command), &e), false),
    }
}

/// Plain-text rendering of a report value, one `key: value` per line.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out
}

fn render_into(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object() || x.is_array() && !x.as_array().unwrap().is_empty() {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_into(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x)));
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}-\n"));
                    render_into(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if a.is_empty() => "[]".into(),
        other => other.to_string(),
    }
}
